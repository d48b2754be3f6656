//! Strict JSON experiment configuration.
//!
//! Every key is optional; missing keys take the per-experiment defaults of the
//! resolved settings structs. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use ptgain::feedback::{CurrentSignal, Scheme};
use ptgain::Operator64;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Fig2,
    Fig3,
    Spectrum,
    DecayCheck,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Spectrum => "spectrum",
            Self::DecayCheck => "decay-check",
        })
    }
}

/// Named Hermitian feedback operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackSelector {
    Sx,
    Sy,
    Sz,
    Id,
    /// `|0⟩⟨1| + |1⟩⟨0|`.
    RaiseLower,
}

impl FeedbackSelector {
    pub fn operator(self) -> Operator64 {
        match self {
            Self::Sx => Operator64::sigma_x(),
            Self::Sy => Operator64::sigma_y(),
            Self::Sz => Operator64::sigma_z(),
            Self::Id => Operator64::identity(2),
            Self::RaiseLower => &Operator64::transition(2, 0, 1) + &Operator64::transition(2, 1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sx => "sx",
            Self::Sy => "sy",
            Self::Sz => "sz",
            Self::Id => "id",
            Self::RaiseLower => "raise-lower",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalChoice {
    Homodyne,
    FeedbackObservable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeChoice {
    Milstein,
    EulerMaruyama,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaPair {
    pub omega_a: f64,
    pub gamma_a: f64,
}

/// The raw configuration document.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub dt: Option<f64>,
    #[serde(alias = "T")]
    pub t_max: Option<f64>,
    pub n_traj: Option<usize>,
    pub master_seed: Option<u64>,
    pub gamma_1: Option<f64>,
    pub gamma_10: Option<f64>,
    pub delta_a: Option<f64>,
    pub omega_sys: Option<f64>,
    pub lambda_pairs: Option<Vec<LambdaPair>>,
    pub gains: Option<Vec<f64>>,
    pub feedback: Option<Vec<FeedbackSelector>>,
    pub signal: Option<SignalChoice>,
    pub scheme: Option<SchemeChoice>,
    /// Gain/loss rate of the spectrum sweep.
    pub gamma: Option<f64>,
    /// `[min, max]` of Ω_sys/γ for the spectrum sweep.
    pub ratio_range: Option<[f64; 2]>,
    pub points: Option<usize>,
    pub output_dir: Option<PathBuf>,
    /// Keep every n-th grid point in emitted curves.
    pub output_stride: Option<usize>,
    pub svg: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::validation(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("{}: cannot read config: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::validation(format!("{}: {}", path.display(), e_msg(&e))))
    }

    /// Rejects a config written for a different experiment.
    pub fn check_kind(&self, kind: ExperimentKind) -> Result<(), CliError> {
        match self.experiment {
            Some(k) if k != kind => Err(CliError::validation(format!(
                "config is for experiment `{k}` but `{kind}` was requested"
            ))),
            _ => Ok(()),
        }
    }

    pub fn fig2(&self) -> Result<Fig2Settings, CliError> {
        let s = Fig2Settings {
            dt: self.dt.unwrap_or(1e-4),
            t_max: self.t_max.unwrap_or(5.0),
            n_traj: self.n_traj.unwrap_or(1000),
            master_seed: self.master_seed.unwrap_or(0),
            gamma_1: self.gamma_1.unwrap_or(1.0),
            omega_sys: self.omega_sys.unwrap_or(0.0),
            gains: self.gains.clone().unwrap_or_else(|| vec![0.0, 0.3, 0.6, 1.0]),
            feedback: self.feedback.clone().unwrap_or_else(|| {
                vec![FeedbackSelector::Sx, FeedbackSelector::Sy, FeedbackSelector::Sz, FeedbackSelector::Id]
            }),
            signal: match self.signal.unwrap_or(SignalChoice::Homodyne) {
                SignalChoice::Homodyne => CurrentSignal::Homodyne,
                SignalChoice::FeedbackObservable => CurrentSignal::FeedbackObservable,
            },
            scheme: match self.scheme.unwrap_or(SchemeChoice::Milstein) {
                SchemeChoice::Milstein => Scheme::Milstein,
                SchemeChoice::EulerMaruyama => Scheme::EulerMaruyama,
            },
            stride: self.stride()?,
        };
        check_step(s.dt, s.t_max)?;
        non_negative("gamma_1", s.gamma_1)?;
        non_negative("omega_sys", s.omega_sys)?;
        if s.n_traj == 0 {
            return Err(CliError::validation("n_traj: at least one trajectory is required"));
        }
        if s.gains.is_empty() || s.gains.iter().any(|g| !g.is_finite()) {
            return Err(CliError::validation("gains: need at least one finite feedback strength"));
        }
        if s.feedback.is_empty() {
            return Err(CliError::validation("feedback: need at least one selector"));
        }
        Ok(s)
    }

    pub fn fig3(&self) -> Result<Fig3Settings, CliError> {
        let s = Fig3Settings {
            dt: self.dt.unwrap_or(1e-3),
            t_max: self.t_max.unwrap_or(20.0),
            gamma_10: self.gamma_10.unwrap_or(0.1),
            delta_a: self.delta_a.unwrap_or(0.0),
            omega_sys: self.omega_sys.unwrap_or(0.1),
            pairs: self.lambda_pairs.clone().unwrap_or_else(|| {
                [(0.5, 2.5), (1.0, 10.0), (1.5, 22.5), (2.0, 40.0)]
                    .into_iter()
                    .map(|(omega_a, gamma_a)| LambdaPair { omega_a, gamma_a })
                    .collect()
            }),
            feedback: match self.feedback.as_deref() {
                None => FeedbackSelector::RaiseLower,
                Some([one]) => *one,
                Some(_) => return Err(CliError::validation("feedback: fig3 takes exactly one selector")),
            },
            stride: self.stride()?,
        };
        check_step(s.dt, s.t_max)?;
        non_negative("gamma_10", s.gamma_10)?;
        non_negative("omega_sys", s.omega_sys)?;
        if !s.delta_a.is_finite() {
            return Err(CliError::validation("delta_a: must be finite"));
        }
        if s.pairs.is_empty() {
            return Err(CliError::validation("lambda_pairs: need at least one pair"));
        }
        for p in &s.pairs {
            non_negative("lambda_pairs.omega_a", p.omega_a)?;
            if !(p.gamma_a > 0.0) || !p.gamma_a.is_finite() {
                return Err(CliError::validation(format!("lambda_pairs.gamma_a: must be positive, got {}", p.gamma_a)));
            }
            if p.omega_a == 0.0 {
                return Err(CliError::validation("lambda_pairs.omega_a: zero drive gives no gain to balance"));
            }
        }
        Ok(s)
    }

    pub fn spectrum(&self) -> Result<SpectrumSettings, CliError> {
        let s = SpectrumSettings {
            gamma: self.gamma.unwrap_or(0.5),
            ratio_range: self.ratio_range.unwrap_or([0.0, 2.0]),
            points: self.points.unwrap_or(51),
        };
        non_negative("gamma", s.gamma)?;
        let [lo, hi] = s.ratio_range;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(CliError::validation(format!("ratio_range: need 0 <= min <= max, got [{lo}, {hi}]")));
        }
        if s.points < 2 {
            return Err(CliError::validation("points: need at least two grid points"));
        }
        Ok(s)
    }

    pub fn decay_check(&self) -> Result<DecaySettings, CliError> {
        let s = DecaySettings {
            dt: self.dt.unwrap_or(1e-3),
            t_max: self.t_max.unwrap_or(1.0),
            gamma_1: self.gamma_1.unwrap_or(1.0),
            stride: self.stride()?,
        };
        check_step(s.dt, s.t_max)?;
        non_negative("gamma_1", s.gamma_1)?;
        Ok(s)
    }

    fn stride(&self) -> Result<usize, CliError> {
        match self.output_stride {
            Some(0) => Err(CliError::validation("output_stride: must be at least 1")),
            Some(n) => Ok(n),
            None => Ok(1),
        }
    }
}

fn e_msg(e: &CliError) -> String {
    match e {
        CliError::Validation(m) => m.clone(),
        other => other.to_string(),
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), CliError> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(CliError::validation(format!("{name}: must be finite and non-negative, got {v}")));
    }
    Ok(())
}

fn check_step(dt: f64, t_max: f64) -> Result<(), CliError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CliError::validation(format!("dt: must be positive, got {dt}")));
    }
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(CliError::validation(format!("t_max: must be finite and non-negative, got {t_max}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Settings {
    pub dt: f64,
    pub t_max: f64,
    pub n_traj: usize,
    pub master_seed: u64,
    pub gamma_1: f64,
    pub omega_sys: f64,
    pub gains: Vec<f64>,
    pub feedback: Vec<FeedbackSelector>,
    pub signal: CurrentSignal,
    pub scheme: Scheme,
    pub stride: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig3Settings {
    pub dt: f64,
    pub t_max: f64,
    pub gamma_10: f64,
    pub delta_a: f64,
    pub omega_sys: f64,
    pub pairs: Vec<LambdaPair>,
    pub feedback: FeedbackSelector,
    pub stride: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSettings {
    pub gamma: f64,
    pub ratio_range: [f64; 2],
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecaySettings {
    pub dt: f64,
    pub t_max: f64,
    pub gamma_1: f64,
    pub stride: usize,
}
