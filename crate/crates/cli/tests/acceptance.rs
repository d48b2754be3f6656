//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 1 asks for `γ₁D[L] − iG√γ₁[F, L·+·L†] + G²D[F] = D[√γ₁L − iGF]`
//! on random instances. That identity misses the Hamiltonian term
//! `−i[(√γ₁G/2)(L†F + FL), ·]` whenever `L†F ≠ −FL`, so it is checked as
//! stated, reported as FAIL, and listed in `KNOWN_FAILURES`. The process exits
//! non-zero on any other failure and on a known failure that starts passing.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ptgain::effective::{effective_hamiltonian, effective_jumps, split_hamiltonian, PerturbativeModel, SubspaceSplit};
use ptgain::feedback::{collapse_form_rhs, effective_collapse, unconditional_feedback_rhs, FeedbackConfig};
use ptgain::lindblad::{dissipator, integrate_master, integrate_nonhermitian, Channel, LindbladModel, NonHermitianModel};
use ptgain::pt::{
    effective_feedback_hamiltonian, feedback_gain_for_balance, gamma_eff, ideal_pt_hamiltonian, no_ground_gain_witness,
    pt_hamiltonian, pt_spectrum, LambdaParams, PtParams, PtPhase,
};
use ptgain::quantum::eigenvalues;
use ptgain::{Complex64, DensityMatrix64, Operator64};
use ptgain_cli::experiments::{run_fig2, run_fig3};
use ptgain_cli::ExperimentConfig;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: &[u32] = &[1];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn random_operator(dim: usize, rng: &mut impl Rng) -> Operator64 {
    Operator64::from_row_major(
        dim,
        (0..dim * dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    )
    .unwrap()
}

fn random_hermitian(dim: usize, rng: &mut impl Rng) -> Operator64 {
    let a = random_operator(dim, rng);
    (&a + &a.dagger()).scale_real(0.5)
}

fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix64 {
    let a = random_operator(dim, rng);
    let p = &a * &a.dagger();
    let tr = p.trace().re;
    DensityMatrix64::normalized(p.scale_real(1.0 / tr)).unwrap()
}

fn superoperator_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut literal, mut corrected) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for _ in 0..500 {
        let dim = rng.gen_range(2..=4);
        let rate = rng.gen_range(0.0..3.0);
        let gain = rng.gen_range(-3.0..3.0);
        let cfg = FeedbackConfig::new(rate, random_operator(dim, &mut rng), random_hermitian(dim, &mut rng), gain)
            .unwrap();
        let rho = random_density(dim, &mut rng);
        let lhs = unconditional_feedback_rhs(&rho, &cfg, &Operator64::zeros(dim)).unwrap();
        let bare = dissipator(&effective_collapse(&cfg), &rho).unwrap();
        let residual = lhs.frobenius_distance(&bare);
        if residual > 1e-12 {
            failures += 1;
        }
        literal = literal.max(residual);
        corrected = corrected.max(lhs.frobenius_distance(&collapse_form_rhs(&rho, &cfg).unwrap()));
    }
    Outcome::new(
        failures == 0,
        format!(
            "{failures}/500 instances above 1e-12, max residual {literal:.3e}; \
             with the (√γ₁G/2)(L†F+FL) commutator added, max residual {corrected:.3e}"
        ),
    )
}

fn fig2_reproduction() -> Outcome {
    let settings = ExperimentConfig::default().fig2().unwrap();
    let report = match run_fig2(&settings) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, format!("run failed: {e}")),
    };
    let failed: Vec<String> = report
        .summary
        .iter()
        .filter(|s| !s.pass)
        .map(|s| format!("{} G={}", s.feedback, s.gain))
        .collect();
    let worst_mad = report.summary.iter().map(|s| s.mean_abs_dev).fold(0.0, f64::max);
    let worst_ratio = report.summary.iter().map(|s| s.worst_tolerance_ratio).fold(0.0, f64::max);
    Outcome::new(
        failed.is_empty(),
        format!(
            "{} (F, G) cases, worst MAD {worst_mad:.4}, worst pointwise |dev|/max(0.1, 6·stderr) {worst_ratio:.3}{}",
            report.summary.len(),
            if failed.is_empty() { String::new() } else { format!(", failing: {}", failed.join(", ")) }
        ),
    )
}

fn fig3_reproduction() -> Outcome {
    let settings = ExperimentConfig::default().fig3().unwrap();
    let report = match run_fig3(&settings) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, format!("run failed: {e}")),
    };
    let rates = report.summary.iter().all(|s| (s.gamma_eff - 0.1).abs() <= 1e-12);
    let balanced = report.summary.iter().map(|s| s.eff_vs_ideal).fold(0.0, f64::max);
    let distances: Vec<f64> = report.summary.iter().map(|s| s.orig_vs_eff).collect();
    let decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    Outcome::new(
        report.summary.len() == 4 && rates && balanced <= 1e-10 && decreasing,
        format!(
            "(a) γ_eff = 0.1: {rates}; (b) max |eff − ideal| {balanced:.1e}; (c) L∞ three-level vs reduced {}",
            distances.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

fn balance_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g_eff: f64 = rng.gen_range(0.01..2.0);
        let gamma_10 = rng.gen_range(0.0..2.0);
        let gamma_a = rng.gen_range(1.0..50.0);
        let p = LambdaParams::new((g_eff * gamma_a).sqrt(), 0.0, gamma_a, gamma_10).unwrap();
        let h_sys = Operator64::sigma_x().scale_real(rng.gen_range(0.0..1.0));
        let g = feedback_gain_for_balance(gamma_eff(&p), gamma_10).unwrap();
        let a = effective_feedback_hamiltonian(&p, g, &Operator64::sigma_x(), &h_sys).unwrap();
        let b = ideal_pt_hamiltonian(gamma_10, &h_sys).unwrap();
        worst = worst.max(a.frobenius_distance(&b));
    }
    Outcome::new(worst <= 1e-14, format!("100 (γ_eff, γ₁₀) pairs, max distance {worst:.2e}"))
}

fn no_gain_obstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let gain = rng.gen_range(-5.0..=5.0);
        let rate = rng.gen_range(0.0..3.0);
        let cfg = FeedbackConfig::new(rate, Operator64::transition(2, 0, 1), random_hermitian(2, &mut rng), gain)
            .unwrap();
        worst = worst.max(no_ground_gain_witness(&cfg));
    }
    Outcome::new(worst <= 1e-12, format!("200 random F, max |⟨0|H|0⟩| {worst:.2e}"))
}

fn analytic_oracles() -> Outcome {
    let decay = LindbladModel::new(Operator64::zeros(2))
        .with_channel(1.0, Operator64::transition(2, 0, 1))
        .unwrap();
    let out = integrate_master(&decay, &DensityMatrix64::basis(2, 1), 1e-3, 1.0).unwrap();
    let decay_err = (out.final_state().population(1) - (-1.0f64).exp()).abs();

    let gain = NonHermitianModel::new(ideal_pt_hamiltonian(0.1, &Operator64::zeros(2)).unwrap());
    let out = integrate_nonhermitian(&gain, &DensityMatrix64::maximally_mixed(2), 1e-3, 20.0).unwrap();
    let cosh_err = out
        .times
        .iter()
        .zip(&out.traces)
        .map(|(t, tr)| (tr - (0.1 * t).cosh()).abs())
        .fold(0.0, f64::max);

    let half_pi = std::f64::consts::FRAC_PI_2;
    let rabi = LindbladModel::new(Operator64::sigma_x());
    let out = integrate_master(&rabi, &DensityMatrix64::basis(2, 0), half_pi / 2000.0, half_pi).unwrap();
    let rabi_err = (out.final_state().population(1) - 1.0).abs();

    Outcome::new(
        decay_err <= 1e-6 && cosh_err <= 1e-6 && rabi_err <= 1e-6,
        format!("decay {decay_err:.1e}, cosh trace {cosh_err:.1e}, Rabi {rabi_err:.1e}"),
    )
}

fn pt_spectrum_check() -> Outcome {
    let gamma = 0.5;
    let (mut closed, mut numeric) = (0.0f64, 0.0f64);
    let mut ep_points = Vec::new();
    for k in 0..50 {
        let omega = gamma * k as f64 / 25.0;
        let p = PtParams::new(omega, gamma).unwrap();
        let s = pt_spectrum(&p);
        let root = Complex64::new(omega * omega - gamma * gamma, 0.0).sqrt();
        closed = closed.max((s.eigenvalues[0] - root).norm()).max((s.eigenvalues[1] + root).norm());
        if s.phase == PtPhase::ExceptionalPoint {
            ep_points.push(k);
            continue;
        }
        let mut found = eigenvalues(&pt_hamiltonian(&p)).unwrap();
        found.sort_by(|a, b| (b.re + b.im).total_cmp(&(a.re + a.im)));
        numeric = numeric.max((found[0] - root).norm()).max((found[1] + root).norm());
    }
    Outcome::new(
        closed <= 1e-10 && numeric <= 1e-10 && ep_points == [25],
        format!(
            "50 points, closed form {closed:.1e}, matrix eigenvalues {numeric:.1e}, exceptional point at grid index {ep_points:?}"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("fig2.json");
    std::fs::write(
        &config,
        r#"{"experiment": "fig2", "n_traj": 200, "T": 1.0, "dt": 1e-3, "master_seed": 42}"#,
    )
    .unwrap();
    let run = |threads: &str| {
        let out = dir.path().join(format!("threads{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_ptgain"))
            .args(["fig2", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env("PTGAIN_THREADS", threads)
            .status()
            .unwrap();
        (status.success(), out)
    };
    let (ok1, a) = run("1");
    let (ok2, b) = run("2");
    if !(ok1 && ok2) {
        return Outcome::new(false, "fig2 run exited with failure");
    }
    let files = |dir: &Path| {
        let mut names: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        names
    };
    let names = files(&a);
    let identical = names == files(&b)
        && names
            .iter()
            .all(|n| std::fs::read(a.join(n)).unwrap() == std::fs::read(b.join(n)).unwrap());
    Outcome::new(
        identical,
        format!("{} files compared between PTGAIN_THREADS=1 and 2", names.len()),
    )
}

fn random_perturbative_model(rng: &mut ChaCha8Rng) -> PerturbativeModel<f64> {
    let dim = rng.gen_range(3..=5);
    let n_excited = rng.gen_range(1..dim);
    let mut levels: Vec<usize> = (0..dim).collect();
    levels.shuffle(rng);
    let (excited, ground) = levels.split_at(n_excited);
    let split = SubspaceSplit::new(dim, ground, excited).unwrap();
    let pg = split.ground_projector();
    let pe = split.excited_projector();
    let channels: Vec<Channel<f64>> = (0..rng.gen_range(1..=3))
        .map(|_| Channel {
            rate: rng.gen_range(0.5..3.0),
            jump: &(&pg * &random_operator(dim, rng)) * &pe,
        })
        .collect();
    split_hamiltonian(&random_hermitian(dim, rng), &split, &channels).unwrap()
}

fn seom_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut herm, mut leak) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let model = random_perturbative_model(&mut rng);
        let pe = model.split().excited_projector();
        let h = effective_hamiltonian(&model).unwrap();
        herm = herm.max(h.hermitian_residual());
        leak = leak.max((&pe * &h).max_abs()).max((&h * &pe).max_abs());
        for l in effective_jumps(&model).unwrap() {
            leak = leak.max((&pe * &l).max_abs()).max((&l * &pe).max_abs());
        }
    }
    Outcome::new(
        herm <= 1e-10 && leak <= 1e-12,
        format!("200 models, Hermitian residual {herm:.1e}, weight outside ground block {leak:.1e}"),
    )
}

fn main() {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Outcome); 9] = [
        (1, "superoperator identity", Some(Duration::from_secs(5)), superoperator_identity),
        (2, "fig2 ensemble vs unconditional", Some(Duration::from_secs(300)), fig2_reproduction),
        (3, "fig3 ideal, reduced and three-level", Some(Duration::from_secs(30)), fig3_reproduction),
        (4, "balance identity", None, balance_identity),
        (5, "no ground gain from natural decay", None, no_gain_obstruction),
        (6, "analytic oracles", None, analytic_oracles),
        (7, "PT spectrum and exceptional point", None, pt_spectrum_check),
        (8, "fig2 byte-identical across thread counts", None, determinism),
        (9, "effective operator structure", None, seom_structure),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let Some(budget) = budget {
            if elapsed > budget {
                outcome.pass = false;
                outcome.detail.push_str(&format!("; over the {}s budget", budget.as_secs()));
            }
        }
        let known = KNOWN_FAILURES.contains(&id);
        let verdict = match (outcome.pass, known) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known)",
            (true, true) => "PASS (unexpected)",
        };
        if outcome.pass == known {
            unexpected.push(id);
        }
        println!(
            "criterion {id} {verdict:<17} {name} [{:.2}s]: {}",
            elapsed.as_secs_f64(),
            outcome.detail
        );
    }
    if !unexpected.is_empty() {
        println!("unexpected results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
