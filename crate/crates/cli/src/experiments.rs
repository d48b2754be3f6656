//! The four experiment pipelines. Each returns its curve tables plus a
//! one-row-per-case summary; nothing here touches the filesystem except
//! [`write_report`].

use std::path::Path;

use ptgain::effective::validity_metric;
use ptgain::feedback::{ensemble_average, FeedbackConfig, FeedbackMasterEquation};
use ptgain::lindblad::{integrate_master, integrate_nonhermitian, LindbladModel, NonHermitianModel};
use ptgain::pt::{
    effective_feedback_hamiltonian, feedback_gain_for_balance, gamma_eff, ideal_pt_hamiltonian, lambda_model,
    original_lambda_hamiltonian, pt_spectrum, LambdaParams, PtParams, PtPhase,
};
use ptgain::{DensityMatrix64, Operator64};
use serde::Serialize;

use crate::config::{DecaySettings, Fig2Settings, Fig3Settings, SpectrumSettings};
use crate::error::CliError;
use crate::table::{emit_csv, emit_records, emit_svg, sci, sci_opt, CurveTable};

/// Validity metric above which the reduced Λ model is flagged.
pub const VALIDITY_WARN: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    /// File stem.
    pub name: String,
    pub table: CurveTable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report<S> {
    pub curves: Vec<Artifact>,
    pub summary: Vec<S>,
    /// Non-fatal diagnostics for stderr.
    pub warnings: Vec<String>,
}

/// Writes `<name>.csv` per curve table (optionally `.svg`) and `summary.csv`.
pub fn write_report<S: Serialize>(report: &Report<S>, dir: &Path, stride: usize, svg: bool) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for artifact in &report.curves {
        let table = artifact.table.thinned(stride);
        emit_csv(&table, &dir.join(format!("{}.csv", artifact.name)))?;
        if svg {
            emit_svg(&table, &dir.join(format!("{}.svg", artifact.name)))?;
        }
    }
    emit_records(&report.summary, &dir.join("summary.csv"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig2Summary {
    pub feedback: &'static str,
    #[serde(serialize_with = "sci")]
    pub gain: f64,
    pub n_traj: usize,
    #[serde(serialize_with = "sci")]
    pub mean_abs_dev: f64,
    #[serde(serialize_with = "sci")]
    pub max_abs_dev: f64,
    /// Largest `|dev| / max(0.1, 6·stderr)` over the grid.
    #[serde(serialize_with = "sci")]
    pub worst_tolerance_ratio: f64,
    pub pass: bool,
}

/// Ensemble-averaged SME with feedback against the unconditional master
/// equation, for every (F, G) pair. One table per F.
pub fn run_fig2(s: &Fig2Settings) -> Result<Report<Fig2Summary>, CliError> {
    let jump = Operator64::transition(2, 0, 1);
    let h = Operator64::sigma_x().scale_real(s.omega_sys);
    let rho0 = DensityMatrix64::basis(2, 1);
    let mut report = Report {
        curves: Vec::new(),
        summary: Vec::new(),
        warnings: Vec::new(),
    };
    for &selector in &s.feedback {
        let f = selector.operator();
        let mut table: Option<CurveTable> = None;
        for &gain in &s.gains {
            let cfg = FeedbackConfig::new(s.gamma_1, jump.clone(), f.clone(), gain)?
                .with_signal(s.signal)
                .with_scheme(s.scheme);
            let ens = ensemble_average(&cfg, &h, &rho0, s.dt, s.t_max, s.n_traj, s.master_seed)?;
            let master = integrate_master(&FeedbackMasterEquation::new(cfg, h.clone())?, &rho0, s.dt, s.t_max)?;
            let mean = ens.mean_population(1);
            let stderr = ens.stderr_population(1);
            let exact = master.population_series(1);

            let mut sum = 0.0;
            let mut max_dev: f64 = 0.0;
            let mut worst: f64 = 0.0;
            for ((m, e), se) in mean.iter().zip(&exact).zip(&stderr) {
                let dev = (m - e).abs();
                sum += dev;
                max_dev = max_dev.max(dev);
                worst = worst.max(dev / (6.0 * se).max(0.1));
            }
            let mad = sum / mean.len() as f64;
            report.summary.push(Fig2Summary {
                feedback: selector.name(),
                gain,
                n_traj: s.n_traj,
                mean_abs_dev: mad,
                max_abs_dev: max_dev,
                worst_tolerance_ratio: worst,
                pass: mad <= 0.05 && worst <= 1.0,
            });

            let table = table.get_or_insert(CurveTable::new("t", ens.times.clone())?);
            table.push(format!("P1_sme_mean_G{gain}"), mean)?;
            table.push(format!("P1_sme_stderr_G{gain}"), stderr)?;
            table.push(format!("P1_unconditional_G{gain}"), exact)?;
        }
        report.curves.push(Artifact {
            name: format!("fig2_{}", selector.name()),
            table: table.expect("gains are non-empty"),
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig3Summary {
    pub panel: String,
    #[serde(serialize_with = "sci")]
    pub omega_a: f64,
    #[serde(serialize_with = "sci")]
    pub gamma_a: f64,
    #[serde(serialize_with = "sci")]
    pub gamma_eff: f64,
    #[serde(serialize_with = "sci")]
    pub gain: f64,
    #[serde(serialize_with = "sci")]
    pub validity: f64,
    /// L∞ distance between the reduced and ideal populations (both levels).
    #[serde(serialize_with = "sci")]
    pub eff_vs_ideal: f64,
    /// L∞ distance between the three-level and reduced `P1`.
    #[serde(serialize_with = "sci")]
    pub orig_vs_eff: f64,
}

fn renormalized_pair(
    h: Operator64,
    rho0: &DensityMatrix64,
    dt: f64,
    t_max: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), CliError> {
    let out = integrate_nonhermitian(&NonHermitianModel::new(h), rho0, dt, t_max)?;
    let p0 = out.renormalized_population_series(0)?;
    let p1 = out.renormalized_population_series(1)?;
    Ok((out.times, p0, p1))
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Ideal PT dynamics against the reduced and the full Λ-system gain, one
/// table per (Ω_a, γ_a) panel.
pub fn run_fig3(s: &Fig3Settings) -> Result<Report<Fig3Summary>, CliError> {
    let h_sys = Operator64::sigma_x().scale_real(s.omega_sys);
    let f = s.feedback.operator();
    let rho2 = DensityMatrix64::diagonal(&[0.5, 0.5]);
    let rho3 = DensityMatrix64::diagonal(&[0.5, 0.5, 0.0]);
    let (times, ideal0, ideal1) =
        renormalized_pair(ideal_pt_hamiltonian(s.gamma_10, &h_sys)?, &rho2, s.dt, s.t_max)?;

    let mut report = Report {
        curves: Vec::new(),
        summary: Vec::new(),
        warnings: Vec::new(),
    };
    for (i, pair) in s.pairs.iter().enumerate() {
        let panel = char::from(b'a' + (i % 26) as u8).to_string();
        let p = LambdaParams::new(pair.omega_a, s.delta_a, pair.gamma_a, s.gamma_10)?;
        let geff = gamma_eff(&p);
        let gain = feedback_gain_for_balance(geff, s.gamma_10)?;
        let validity = validity_metric(&lambda_model(&p));
        if validity > VALIDITY_WARN {
            report.warnings.push(format!(
                "panel {panel}: Ω_a = {}, γ_a = {} gives validity metric {validity:.3} > {VALIDITY_WARN}; the reduced model may be inaccurate",
                pair.omega_a, pair.gamma_a
            ));
        }
        let (_, eff0, eff1) =
            renormalized_pair(effective_feedback_hamiltonian(&p, gain, &f, &h_sys)?, &rho2, s.dt, s.t_max)?;
        let (_, orig0, orig1) =
            renormalized_pair(original_lambda_hamiltonian(&p, gain, &f, &h_sys)?, &rho3, s.dt, s.t_max)?;

        report.summary.push(Fig3Summary {
            panel: panel.clone(),
            omega_a: pair.omega_a,
            gamma_a: pair.gamma_a,
            gamma_eff: geff,
            gain,
            validity,
            eff_vs_ideal: linf(&eff0, &ideal0).max(linf(&eff1, &ideal1)),
            orig_vs_eff: linf(&orig1, &eff1),
        });

        let mut table = CurveTable::new("t", times.clone())?;
        table.push("P0_ideal", ideal0.clone())?;
        table.push("P1_ideal", ideal1.clone())?;
        table.push("P0_eff", eff0)?;
        table.push("P1_eff", eff1)?;
        table.push("P0_orig", orig0)?;
        table.push("P1_orig", orig1)?;
        report.curves.push(Artifact {
            name: format!("fig3_{panel}"),
            table,
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    #[serde(serialize_with = "sci")]
    pub gamma: f64,
    pub points: usize,
    /// Ω/γ of the first grid point at the exceptional point, if any.
    #[serde(serialize_with = "sci_opt")]
    pub exceptional_ratio: Option<f64>,
}

fn phase_code(phase: PtPhase) -> f64 {
    match phase {
        PtPhase::Broken => -1.0,
        PtPhase::ExceptionalPoint => 0.0,
        PtPhase::Unbroken => 1.0,
    }
}

/// Eigenvalues of the balanced gain/loss qubit over a grid of Ω/γ.
/// `phase` is −1 broken, 0 exceptional point, 1 unbroken.
pub fn run_spectrum(s: &SpectrumSettings) -> Result<Report<SpectrumSummary>, CliError> {
    let [lo, hi] = s.ratio_range;
    let last = (s.points - 1) as f64;
    let ratios: Vec<f64> = (0..s.points).map(|k| lo + (hi - lo) * k as f64 / last).collect();
    let mut cols: [Vec<f64>; 6] = Default::default();
    let mut exceptional = None;
    for &ratio in &ratios {
        let omega = ratio * s.gamma;
        let eig = pt_spectrum(&PtParams::new(omega, s.gamma)?);
        if eig.phase == PtPhase::ExceptionalPoint && exceptional.is_none() {
            exceptional = Some(ratio);
        }
        let [plus, minus] = eig.eigenvalues;
        for (col, v) in cols
            .iter_mut()
            .zip([omega, plus.re, plus.im, minus.re, minus.im, phase_code(eig.phase)])
        {
            col.push(v);
        }
    }
    let mut table = CurveTable::new("ratio", ratios)?;
    for (name, col) in ["omega", "re_plus", "im_plus", "re_minus", "im_minus", "phase"]
        .into_iter()
        .zip(cols)
    {
        table.push(name, col)?;
    }
    Ok(Report {
        curves: vec![Artifact {
            name: "spectrum".into(),
            table,
        }],
        summary: vec![SpectrumSummary {
            gamma: s.gamma,
            points: s.points,
            exceptional_ratio: exceptional,
        }],
        warnings: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySummary {
    #[serde(serialize_with = "sci")]
    pub dt: f64,
    #[serde(serialize_with = "sci")]
    pub max_error: f64,
    #[serde(serialize_with = "sci")]
    pub max_error_double_dt: f64,
    /// `max_error_double_dt / max_error`; about 16 for a fourth-order scheme
    /// once truncation error dominates roundoff.
    #[serde(serialize_with = "sci")]
    pub error_ratio: f64,
}

fn decay_errors(gamma_1: f64, dt: f64, t_max: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), CliError> {
    let model = LindbladModel::new(Operator64::zeros(2)).with_channel(gamma_1, Operator64::transition(2, 0, 1))?;
    let out = integrate_master(&model, &DensityMatrix64::basis(2, 1), dt, t_max)?;
    let exact: Vec<f64> = out.times.iter().map(|t| (-gamma_1 * t).exp()).collect();
    Ok((out.times.clone(), out.population_series(1), exact))
}

/// RK4 spontaneous decay against `e^{−γ₁t}`, plus the same run at `2·dt`.
pub fn run_decay_check(s: &DecaySettings) -> Result<Report<DecaySummary>, CliError> {
    let (times, numeric, exact) = decay_errors(s.gamma_1, s.dt, s.t_max)?;
    let error: Vec<f64> = numeric.iter().zip(&exact).map(|(a, b)| (a - b).abs()).collect();
    let max_error = error.iter().copied().fold(0.0, f64::max);
    let (_, coarse, coarse_exact) = decay_errors(s.gamma_1, 2.0 * s.dt, s.t_max)?;
    let max_error_double_dt = linf(&coarse, &coarse_exact);

    let mut table = CurveTable::new("t", times)?;
    table.push("P1_numeric", numeric)?;
    table.push("P1_exact", exact)?;
    table.push("abs_error", error)?;
    Ok(Report {
        curves: vec![Artifact {
            name: "decay_check".into(),
            table,
        }],
        summary: vec![DecaySummary {
            dt: s.dt,
            max_error,
            max_error_double_dt,
            error_ratio: if max_error > 0.0 { max_error_double_dt / max_error } else { f64::INFINITY },
        }],
        warnings: Vec::new(),
    })
}
