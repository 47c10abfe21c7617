use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::kappa_for_confidence;
use crate::error::{Error, Result};
use crate::model::Envelope;
use crate::nelder_mead::NmConfig;
use crate::optimizer::QpSolverConfig;
use crate::synthetic::NoiseMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quantile,
    Bootstrap,
    CrossValidation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quantile => "quantile",
            Method::Bootstrap => "bootstrap",
            Method::CrossValidation => "cross_validation",
        }
    }

    pub fn sweep_param(self) -> &'static str {
        match self {
            Method::Quantile => "q",
            Method::Bootstrap => "kappa",
            Method::CrossValidation => "gamma",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quantile" => Ok(Method::Quantile),
            "bootstrap" => Ok(Method::Bootstrap),
            "cross_validation" => Ok(Method::CrossValidation),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantileSweep {
    /// Coverage fractions, e.g. `0.6 … 1.0`.
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSweep {
    pub n_bootstrap: usize,
    /// Confidence levels in percent, mapped to normal critical values.
    pub confidence: Vec<u32>,
    /// Additional raw critical values.
    pub kappa: Vec<f64>,
}

impl Default for BootstrapSweep {
    fn default() -> Self {
        Self {
            n_bootstrap: 100,
            confidence: Vec::new(),
            kappa: Vec::new(),
        }
    }
}

impl BootstrapSweep {
    /// Critical values swept, confidence levels first.
    pub fn kappas(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for &c in &self.confidence {
            out.push(kappa_for_confidence(c).ok_or_else(|| {
                Error::Config(format!("no critical value tabulated for {c}% confidence"))
            })?);
        }
        out.extend_from_slice(&self.kappa);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSweep {
    pub gamma: Vec<f64>,
    pub k_folds: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub nm: NmConfig,
}

impl Default for CvSweep {
    fn default() -> Self {
        Self {
            gamma: Vec::new(),
            k_folds: 5,
            lambda1: 1.0,
            lambda2: 1.0,
            nm: NmConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformEnvelope {
    pub pmin: f64,
    pub pmax: f64,
}

impl Default for UniformEnvelope {
    fn default() -> Self {
        Self {
            pmin: 0.5,
            pmax: 1.1,
        }
    }
}

impl UniformEnvelope {
    pub fn for_items(&self, m: usize) -> Result<Envelope> {
        Envelope::uniform(m, self.pmin, self.pmax)
    }
}

/// A full experiment: grid of `(m, n, δ)`, methods with their sweeps, and
/// the number of seeded trials per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub delta: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub envelope: UniformEnvelope,
    pub noise: NoiseMode,
    pub quantile: Option<QuantileSweep>,
    pub bootstrap: Option<BootstrapSweep>,
    pub cross_validation: Option<CvSweep>,
    pub qp: QpSolverConfig,
    /// Write wall-clock times into the results; disable for byte-for-byte
    /// reproducible output.
    pub record_timing: bool,
    pub output_dir: Option<PathBuf>,
    /// Worker threads; `None` or `0` uses all cores.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: vec![5],
            n: vec![1000],
            delta: vec![0.25],
            trials: 100,
            master_seed: 0,
            envelope: UniformEnvelope::default(),
            noise: NoiseMode::Shared,
            quantile: None,
            bootstrap: None,
            cross_validation: None,
            qp: QpSolverConfig::default(),
            record_timing: true,
            output_dir: None,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m.is_empty() || self.n.is_empty() || self.delta.is_empty() {
            return Err(Error::Config(
                "grid must be non-empty in m, n and delta".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.m.contains(&0) || self.n.iter().any(|&n| n < 2) {
            return Err(Error::Config("m must be positive and n at least 2".into()));
        }
        if self.delta.iter().any(|d| !(0.0..1.0).contains(d)) {
            return Err(Error::Config("every delta must lie in [0, 1)".into()));
        }
        if !(self.envelope.pmin <= self.envelope.pmax) {
            return Err(Error::Config("envelope pmin must not exceed pmax".into()));
        }
        if self.methods().is_empty() {
            return Err(Error::Config("select at least one method".into()));
        }
        if let Some(q) = &self.quantile {
            if q.q.is_empty() || q.q.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
                return Err(Error::Config(
                    "quantile sweep needs values in (0, 1]".into(),
                ));
            }
        }
        if let Some(b) = &self.bootstrap {
            if b.n_bootstrap < 2 {
                return Err(Error::Config("n_bootstrap must be at least 2".into()));
            }
            let kappas = b.kappas()?;
            if kappas.is_empty() || kappas.iter().any(|k| !(*k >= 0.0)) {
                return Err(Error::Config(
                    "bootstrap sweep needs non-negative kappas".into(),
                ));
            }
        }
        if let Some(cv) = &self.cross_validation {
            if cv.gamma.is_empty() || cv.gamma.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                return Err(Error::Config(
                    "cross-validation sweep needs finite gamma >= 0".into(),
                ));
            }
            if cv.k_folds < 2 || self.n.iter().any(|&n| n < cv.k_folds) {
                return Err(Error::Config(
                    "k_folds must be in [2, n] for every grid n".into(),
                ));
            }
            cv.nm.validate()?;
        }
        self.qp.validate()
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut out = Vec::new();
        if self.quantile.is_some() {
            out.push(Method::Quantile);
        }
        if self.bootstrap.is_some() {
            out.push(Method::Bootstrap);
        }
        if self.cross_validation.is_some() {
            out.push(Method::CrossValidation);
        }
        out
    }

    /// Sweep values of one method, in configuration order.
    pub fn sweep(&self, method: Method) -> Vec<f64> {
        match method {
            Method::Quantile => self.quantile.as_ref().map(|q| q.q.clone()),
            Method::Bootstrap => self.bootstrap.as_ref().and_then(|b| b.kappas().ok()),
            Method::CrossValidation => self.cross_validation.as_ref().map(|c| c.gamma.clone()),
        }
        .unwrap_or_default()
    }

    /// Grid points in `(m, n, δ)` nesting order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &n in &self.n {
                for &delta in &self.delta {
                    out.push(GridPoint { m, n, delta });
                }
            }
        }
        out
    }

    pub fn max_items(&self) -> usize {
        self.m.iter().copied().max().unwrap_or(0)
    }

    /// Expected row count when no trial is flagged or fails.
    pub fn expected_rows(&self) -> usize {
        let per_trial: usize = self.methods().iter().map(|&m| self.sweep(m).len()).sum();
        self.grid().len() * self.trials * per_trial
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub m: usize,
    pub n: usize,
    pub delta: f64,
}
