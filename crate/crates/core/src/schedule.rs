//! Piecewise-linear modulation-frequency schedule.
//!
//! Frequencies are stored as offsets from the hyperfine splitting. A hop
//! starts a new segment; the accumulated laser phase is the integral of the
//! schedule and is therefore continuous across hops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSegment {
    /// Segment start time, s.
    pub t_start: f64,
    /// Modulation-frequency offset from omega_hfs at `t_start`, rad/s.
    pub offset: f64,
    /// Linear chirp rate, rad/s^2.
    pub chirp_rate: f64,
}

impl ScheduleSegment {
    #[inline]
    pub fn offset_at(&self, t: f64) -> f64 {
        self.offset + self.chirp_rate * (t - self.t_start)
    }

    /// Integral of the offset over [a, b] within this segment.
    #[inline]
    fn phase_over(&self, a: f64, b: f64) -> f64 {
        let (ra, rb) = (a - self.t_start, b - self.t_start);
        self.offset * (b - a) + 0.5 * self.chirp_rate * (rb * rb - ra * ra)
    }
}

/// Modulation-frequency offset as a function of time. Segments are sorted by
/// start time; the first one is extended backwards and the last one forwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySchedule {
    segments: Vec<ScheduleSegment>,
}

impl FrequencySchedule {
    pub fn new(segments: Vec<ScheduleSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("schedule needs at least one segment".into()));
        }
        for s in &segments {
            if !(s.t_start.is_finite() && s.offset.is_finite() && s.chirp_rate.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite schedule segment {s:?}")));
            }
        }
        if segments.windows(2).any(|w| w[1].t_start <= w[0].t_start) {
            return Err(Error::InvalidParameter(
                "schedule segments must have strictly increasing start times".into(),
            ));
        }
        Ok(Self { segments })
    }

    /// A single segment covering all time.
    pub fn constant(offset: f64, chirp_rate: f64) -> Self {
        Self {
            segments: vec![ScheduleSegment {
                t_start: 0.0,
                offset,
                chirp_rate,
            }],
        }
    }

    pub fn segments(&self) -> &[ScheduleSegment] {
        &self.segments
    }

    fn segment_index(&self, t: f64) -> usize {
        // Last segment whose start is <= t, clamped to the first one.
        self.segments
            .partition_point(|s| s.t_start <= t)
            .saturating_sub(1)
    }

    pub fn segment_at(&self, t: f64) -> &ScheduleSegment {
        &self.segments[self.segment_index(t)]
    }

    /// Offset of the modulation frequency from omega_hfs at time `t`, rad/s.
    pub fn offset_at(&self, t: f64) -> f64 {
        self.segment_at(t).offset_at(t)
    }

    /// Laser phase accumulated between `a` and `b` (b >= a), rad.
    pub fn phase_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        let mut i = self.segment_index(a);
        let mut lo = a;
        loop {
            let hi = match self.segments.get(i + 1) {
                Some(next) if next.t_start < b => next.t_start,
                _ => b,
            };
            total += self.segments[i].phase_over(lo, hi);
            if hi >= b {
                break;
            }
            lo = hi;
            i += 1;
        }
        total
    }

    /// Accumulated laser phase from the first segment start to `t`.
    pub fn phase_at(&self, t: f64) -> f64 {
        let t0 = self.segments[0].t_start;
        if t >= t0 {
            self.phase_between(t0, t)
        } else {
            -self.phase_between(t, t0)
        }
    }
}
