use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanVariable {
    /// Modulation-frequency offset from omega_hfs, rad/s.
    OmegaModOffset,
    /// Half duration T, s.
    T,
    /// LMT interval T0, s.
    T0,
}

impl ScanVariable {
    pub fn name(self) -> &'static str {
        match self {
            ScanVariable::OmegaModOffset => "omega_mod_offset",
            ScanVariable::T => "T",
            ScanVariable::T0 => "T0",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            ScanVariable::OmegaModOffset => "rad/s",
            ScanVariable::T | ScanVariable::T0 => "s",
        }
    }
}

impl fmt::Display for ScanVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega_mod_offset" => Ok(ScanVariable::OmegaModOffset),
            "T" => Ok(ScanVariable::T),
            "T0" => Ok(ScanVariable::T0),
            other => Err(Error::InvalidParameter(format!("unknown scan variable {other:?}"))),
        }
    }
}

/// Scan output: one detected F = 3 population per grid value, with a
/// free-form key/value header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub variable: ScanVariable,
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub metadata: Vec<(String, String)>,
}

impl ScanResult {
    pub fn new(variable: ScanVariable, x: Vec<f64>, mean: Vec<f64>, stderr: Vec<f64>) -> Self {
        assert_eq!(x.len(), mean.len());
        assert_eq!(x.len(), stderr.len());
        Self {
            variable,
            x,
            mean,
            stderr,
            metadata: vec![
                ("variable".into(), variable.name().into()),
                ("x_unit".into(), variable.unit().into()),
                ("code_version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.push((key.into(), value.into()));
        self
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Same result with `scale * mean`, e.g. to check scale invariance.
    pub fn scaled(&self, scale: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.mean {
            *m *= scale;
        }
        for s in &mut out.stderr {
            *s *= scale.abs();
        }
        out
    }

    /// Copy with additive Gaussian noise of standard deviation `sigma`.
    /// Only meant to exercise fit robustness.
    pub fn with_noise(&self, sigma: f64, seed: u64) -> Result<Self> {
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::InvalidParameter(format!("noise sigma {sigma}: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for m in &mut out.mean {
            *m += normal.sample(&mut rng);
        }
        Ok(out)
    }

    /// CSV with a `# key = value` header and columns `x,mean,stderr`.
    /// Values use the shortest representation that parses back exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str("x,mean,stderr\n");
        for i in 0..self.len() {
            let _ = writeln!(out, "{:e},{:e},{:e}", self.x[i], self.mean[i], self.stderr[i]);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, what: &str| Error::InvalidParameter(format!("CSV line {line}: {what}"));
        let mut metadata = Vec::new();
        let (mut x, mut mean, mut stderr) = (Vec::new(), Vec::new(), Vec::new());
        let mut seen_columns = false;
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest.split_once(" = ").ok_or_else(|| bad(n, "header without ' = '"))?;
                metadata.push((k.trim_start().to_string(), v.to_string()));
            } else if !seen_columns {
                if line.trim() != "x,mean,stderr" {
                    return Err(bad(n, "expected column header x,mean,stderr"));
                }
                seen_columns = true;
            } else if !line.trim().is_empty() {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() != 3 {
                    return Err(bad(n, "expected 3 columns"));
                }
                let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(n, "not a number"));
                x.push(parse(cols[0])?);
                mean.push(parse(cols[1])?);
                stderr.push(parse(cols[2])?);
            }
        }
        let variable = metadata
            .iter()
            .find(|(k, _)| k == "variable")
            .ok_or_else(|| Error::InvalidParameter("CSV header lacks 'variable'".into()))?
            .1
            .parse()?;
        Ok(Self {
            variable,
            x,
            mean,
            stderr,
            metadata,
        })
    }
}
