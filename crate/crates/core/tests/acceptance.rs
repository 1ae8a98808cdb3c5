//! Acceptance run: one line per criterion, exit code 1 if any fails.
//!
//! Every criterion is evaluated at its stated tolerance and runtime budget.
//! Random instances come from a fixed ChaCha8 stream so the run is
//! deterministic.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use effgrow::dynamics::{diagnostics, simulate, PopulationState, SimulationOptions, TimeStep};
use effgrow::experiments::{run_experiment, ExperimentConfig, ExperimentId};
use effgrow::model::{
    alpha_threshold, make_kernel_alpha, make_kernel_bimodal, make_kernel_noheredity, make_kernel_random,
    make_trait_set, pearson_correlation_alpha, MeanKind, TraitSet,
};
use effgrow::numeric::{solve_heterogeneous, Fragmentation, Growth, ModelSpec, SolveMethod, SolverOptions};
use effgrow::profiles::{profile_mitosis_series, profile_uniform_division, DivisionRate, SizeGrid};
use effgrow::spectral::{
    build_growth_matrix, dominant_eigentriplet, effective_trait_bimodal, solve_noheredity, EigenTriplet,
};
use effgrow::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn run(id: u32, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.map_or(true, |b| elapsed < b);
    let passed = out.passed && in_time;
    let budget_note = match budget {
        Some(b) if !in_time => format!(", over budget {:.0?}", b),
        Some(b) => format!(" / {:.0?}", b),
        None => String::new(),
    };
    println!(
        "[{}] {id:>2}. {title}: {} ({:.2?}{budget_note})",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed
    );
    passed
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn triplet(traits: &TraitSet, kernel: &effgrow::HeredityKernel, beta: f64) -> EigenTriplet {
    dominant_eigentriplet(&build_growth_matrix(traits, kernel, beta).unwrap()).unwrap()
}

fn sorted_traits(rng: &mut ChaCha8Rng, m: usize) -> TraitSet {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..10.0)).collect();
        if let Ok(t) = TraitSet::from_unsorted(v) {
            return t;
        }
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let v1 = rng.gen_range(0.01..100.0);
        let v2 = rng.gen_range(0.01..100.0);
        let v = effective_trait_bimodal(v1, v2, 0.5, 0.5).unwrap();
        let g = (v1 * v2).sqrt();
        worst = worst.max(((v - g) / g).abs());
    }
    outcome(worst <= 1e-12, format!("max relative error {worst:.2e} over 100 pairs"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let quarter = make_kernel_bimodal(0.25, 0.25).unwrap();
    let mut worst_v: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    for _ in 0..20 {
        let t = sorted_traits(&mut rng, 2);
        let v = triplet(&t, &quarter, 1.0).effective_trait;
        worst_v = worst_v.max((v - t.mean(MeanKind::Arithmetic)).abs());
    }
    for m in 2..=50 {
        let t = sorted_traits(&mut rng, m);
        let tr = triplet(&t, &make_kernel_alpha(m, alpha_threshold(m)).unwrap(), 1.0);
        worst_v = worst_v.max((tr.effective_trait - t.mean(MeanKind::Arithmetic)).abs());
        for n in &tr.fractions {
            worst_n = worst_n.max((n - 1.0 / m as f64).abs());
        }
    }
    outcome(
        worst_v <= 1e-10 && worst_n <= 1e-10,
        format!("max |v_eff - m_A| {worst_v:.2e}, max |N_i - 1/M| {worst_n:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rel: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for i in 0..200 {
        let m = if i < 20 { 2 } else { rng.gen_range(2..=20) };
        let t = sorted_traits(&mut rng, m);
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let poly = solve_noheredity(&t, &w).unwrap().lambda;
        let power = triplet(&t, &make_kernel_noheredity(&w).unwrap(), 1.0).lambda;
        worst_rel = worst_rel.max(((poly - power) / power).abs());
        if m == 2 {
            let closed = effective_trait_bimodal(t.values()[0], t.values()[1], w[1], w[0]).unwrap();
            worst_closed = worst_closed.max((poly - closed).abs()).max((power - closed).abs());
        }
    }
    outcome(
        worst_rel <= 1e-9 && worst_closed <= 1e-10,
        format!("max relative polynomial/power gap {worst_rel:.2e}, M=2 closed-form gap {worst_closed:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut outside = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let m = rng.gen_range(2..=12);
        let t = sorted_traits(&mut rng, m);
        let beta = rng.gen_range(0.1..5.0);
        let k = make_kernel_random(m, rng.gen()).unwrap();
        let tr = triplet(&t, &k, beta);
        if tr.effective_trait < t.min() || tr.effective_trait > t.max() {
            outside += 1;
        }
        worst = worst.max((tr.lambda - tr.weighted_rate(&t)).abs());
    }
    outcome(
        outside == 0 && worst <= 1e-10,
        format!("{outside} instances outside [v1, vM], max |lambda - beta sum v_i N_i| {worst:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_k2: f64 = 0.0;
    let mut worst_k1: f64 = 0.0;
    for i in 0..50 {
        let k = 0.01 + 0.98 * i as f64 / 49.0;
        let v = effective_trait_bimodal(0.5, 2.5, k, 1e-8).unwrap();
        worst_k2 = worst_k2.max((v - 2.5).abs());
        let v = effective_trait_bimodal(0.5, 2.5, 1e-8, k).unwrap();
        worst_k1 = worst_k1.max((v - 0.5f64.max((1.0 - 2.0 * k) * 2.5)).abs());
    }
    outcome(
        worst_k2 <= 1e-6 && worst_k1 <= 1e-6,
        format!("k2 -> 0: max gap {worst_k2:.2e}; k1 -> 0: max gap {worst_k1:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let sigmas: Vec<f64> = (0..20).map(|i| 7.6 * i as f64 / 19.0).collect();
    let mut worst: f64 = 0.0;
    let mut wrong = Vec::new();
    for m in [10usize, 100] {
        let a0 = alpha_threshold(m);
        for alpha in [0.0, 1.0 / m as f64, 0.3, a0, 0.7, 0.9] {
            let v: Vec<f64> = sigmas
                .iter()
                .map(|&s| {
                    let t = make_trait_set(m, s, 4.0, MeanKind::Arithmetic).unwrap();
                    if t.len() == 1 {
                        t.values()[0]
                    } else {
                        triplet(&t, &make_kernel_alpha(m, alpha).unwrap(), 1.0).effective_trait
                    }
                })
                .collect();
            if alpha == a0 {
                worst = v.iter().map(|x| (x - 4.0).abs()).fold(worst, f64::max);
                continue;
            }
            let sign = if alpha < a0 { -1.0 } else { 1.0 };
            if v.windows(2).any(|w| sign * (w[1] - w[0]) <= 0.0) {
                wrong.push(format!("M={m} alpha={alpha}"));
            }
        }
    }
    outcome(
        worst <= 1e-9 && wrong.is_empty(),
        format!(
            "max |v_eff - 4| at alpha0 {worst:.2e}; slope sign violations: {}",
            if wrong.is_empty() { "none".to_string() } else { wrong.join(", ") }
        ),
    )
}

/// Monte Carlo estimate of the mother/daughter correlation with a batch
/// standard error.
fn monte_carlo_gamma(rng: &mut ChaCha8Rng, law: &[f64], traits: &[f64], alpha: f64) -> (f64, f64) {
    let m = law.len();
    let cdf: Vec<f64> = law
        .iter()
        .scan(0.0, |s, p| {
            *s += p;
            Some(*s)
        })
        .collect();
    let batches = 100;
    let per_batch = 10_000;
    let mut estimates = Vec::with_capacity(batches);
    for _ in 0..batches {
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..per_batch {
            let u: f64 = rng.gen();
            let i = cdf.iter().position(|c| u < *c).unwrap_or(m - 1);
            let j = if rng.gen::<f64>() < alpha {
                i
            } else {
                let k = rng.gen_range(0..m - 1);
                if k >= i {
                    k + 1
                } else {
                    k
                }
            };
            let (x, y) = (traits[i], traits[j]);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let n = per_batch as f64;
        let cov = sxy / n - sx / n * sy / n;
        let vx = sxx / n - (sx / n).powi(2);
        let vy = syy / n - (sy / n).powi(2);
        estimates.push(cov / (vx * vy).sqrt());
    }
    let mean = estimates.iter().sum::<f64>() / batches as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_closed: f64 = 0.0;
    for m in 2..=12 {
        let t = sorted_traits(&mut rng, m);
        let law = vec![1.0 / m as f64; m];
        for alpha in [0.0, 0.1, 0.25, 0.5, 0.75, 0.99] {
            let g = pearson_correlation_alpha(m, alpha, &law, &t).unwrap().gamma;
            let expected = (alpha * m as f64 - 1.0) / (m as f64 - 1.0);
            worst_closed = worst_closed.max((g - expected).abs());
        }
    }
    let mut worst_z: f64 = 0.0;
    for _ in 0..10 {
        let m = rng.gen_range(2..=6);
        let t = sorted_traits(&mut rng, m);
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let law: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let alpha = rng.gen_range(0.0..0.95);
        let g = pearson_correlation_alpha(m, alpha, &law, &t).unwrap().gamma;
        let (est, se) = monte_carlo_gamma(&mut rng, &law, t.values(), alpha);
        worst_z = worst_z.max((est - g).abs() / se);
    }
    outcome(
        worst_closed <= 1e-12 && worst_z <= 3.0,
        format!("uniform-law closed-form gap {worst_closed:.2e}; Monte Carlo max |z| {worst_z:.2} over 10 instances"),
    )
}

fn case_a_single(frag: Fragmentation, dx: f64) -> (f64, f64) {
    let grid = SizeGrid::uniform(dx, 15.0).unwrap();
    let model = ModelSpec::case_a(
        TraitSet::new(vec![1.0]).unwrap(),
        make_kernel_noheredity(&[1.0]).unwrap(),
        1.0,
        frag,
    )
    .unwrap();
    let eig = solve_heterogeneous(&model, &grid, &SolverOptions::default()).unwrap();
    let exact = match frag {
        Fragmentation::Uniform => profile_uniform_division(1.0, &grid).unwrap(),
        Fragmentation::Mitosis => profile_mitosis_series(1.0, &grid).unwrap(),
    };
    ((eig.lambda - 1.0).abs(), eig.profile.l1_distance(&exact).unwrap())
}

fn criterion_8() -> Outcome {
    let mut passed = true;
    let mut notes = Vec::new();
    for frag in [Fragmentation::Uniform, Fragmentation::Mitosis] {
        let (err, l1) = case_a_single(frag, 0.005);
        let (err_half, _) = case_a_single(frag, 0.0025);
        let ratio = err / err_half;
        passed &= err <= 1e-3 && l1 <= 1e-2 && ratio >= 1.8;
        notes.push(format!(
            "A/{frag}: |lambda-1| {err:.2e} -> {err_half:.2e} (ratio {ratio:.2}), profile L1 {l1:.2e}"
        ));
    }
    let grid = SizeGrid::uniform(0.01, 10.0).unwrap();
    let model = ModelSpec::new(
        Growth::Linear,
        DivisionRate::power(1.0, 2.0).unwrap(),
        Fragmentation::Mitosis,
        TraitSet::new(vec![2.0]).unwrap(),
        make_kernel_noheredity(&[1.0]).unwrap(),
    )
    .unwrap();
    let eig = solve_heterogeneous(
        &model,
        &grid,
        &SolverOptions {
            method: SolveMethod::Renewal,
            ..SolverOptions::default()
        },
    )
    .unwrap();
    let n = eig.profile.type_values(0);
    let phi = eig.adjoint.type_values(0);
    let x = grid.nodes();
    let moment: Vec<f64> = x.iter().zip(n).map(|(x, n)| x * n).collect();
    let c = 1.0 / grid.integrate(&moment);
    let dev: Vec<f64> = (0..grid.len()).map(|j| (phi[j] - c * x[j]).abs() * n[j]).collect();
    let adj = grid.integrate(&dev);
    let err = (eig.lambda - 2.0).abs();
    passed &= err <= 1e-2 && adj <= 5e-2;
    notes.push(format!("B/mitosis: |lambda-2| {err:.2e}, adjoint L1(N) gap to Cx {adj:.2e}"));
    outcome(passed, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let traits = TraitSet::new(vec![0.5, 2.5]).unwrap();
    let kernel = make_kernel_bimodal(0.3, 0.5).unwrap();
    let closed = effective_trait_bimodal(0.5, 2.5, 0.3, 0.5).unwrap();
    let matrix = triplet(&traits, &kernel, 1.0).lambda;
    let model = ModelSpec::case_a(traits, kernel, 1.0, Fragmentation::Uniform).unwrap();
    let grid = SizeGrid::uniform(0.01, 20.0).unwrap();
    let numeric = solve_heterogeneous(&model, &grid, &SolverOptions::default()).unwrap().lambda;
    let oracle_gap = (closed - matrix).abs().max((closed - 0.9717797887).abs());
    let gap = (numeric - closed).abs();
    outcome(
        gap <= 5e-3 && oracle_gap <= 1e-9,
        format!("numeric {numeric:.10}, closed form {closed:.10}, matrix {matrix:.10}; gap {gap:.2e}"),
    )
}

fn criterion_10() -> Outcome {
    let traits = TraitSet::new(vec![0.5, 2.5]).unwrap();
    let model = ModelSpec::case_a(traits, make_kernel_bimodal(0.3, 0.5).unwrap(), 1.0, Fragmentation::Uniform).unwrap();
    let grid = SizeGrid::uniform(0.01, 20.0).unwrap();
    let eig = solve_heterogeneous(&model, &grid, &SolverOptions::default()).unwrap();
    let w = grid.weights();

    let start = PopulationState::from_profile(&eig.profile, 1.0).unwrap();
    let opts = SimulationOptions {
        t_end: 10.0,
        dt: TimeStep::Auto,
        snapshot_every: 0.5,
    };
    let traj = simulate(&model, &start, &opts).unwrap();
    let rate = (eig.lambda * traj.dt).ln_1p() / traj.dt;
    let mut stationary: f64 = 0.0;
    for s in &traj.snapshots {
        let damp = (-rate * s.time).exp();
        let mut d = 0.0;
        for (n, nn) in s.densities().iter().zip(eig.profile.values()) {
            d += (0..grid.len()).map(|j| w[j] * (damp * n[j] - nn[j]).abs()).sum::<f64>();
        }
        stationary = stationary.max(d);
    }
    let stationary_ok = stationary <= 10.0 * traj.dt;

    let bump = PopulationState::gaussian(&grid, 2, 0, 1.0, 0.05).unwrap();
    let opts = SimulationOptions {
        t_end: 40.0 / eig.lambda,
        dt: TimeStep::Auto,
        snapshot_every: 0.5,
    };
    let traj = simulate(&model, &bump, &opts).unwrap();
    let d = diagnostics(&traj, &eig).unwrap();
    let fit = ((d.fitted_rate - eig.lambda) / eig.lambda).abs();
    let last = *d.l1_phi_distance.last().unwrap();
    outcome(
        stationary_ok && d.max_mass_drift <= d.conservation_tolerance && fit <= 1e-2 && last < 1e-3,
        format!(
            "stationary L1 drift {stationary:.2e} (10 dt = {:.2e}); phi-mass drift {:.2e} (tol {:.2e}); \
             exponent rel err {fit:.2e}; final L1(phi) {last:.2e}",
            10.0 * traj.dt,
            d.max_mass_drift,
            d.conservation_tolerance
        ),
    )
}

fn run_into(id: ExperimentId, dir: &Path) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::new(id);
    cfg.out = dir.to_path_buf();
    match run_experiment(&cfg) {
        Ok(_) | Err(Error::CheckFailed { .. }) => Ok(()),
        Err(e) => Err(e),
    }
}

fn criterion_11() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    let mut files = 0;
    for id in ExperimentId::ALL {
        if let Err(e) = run_into(id, a.path()).and_then(|_| run_into(id, b.path())) {
            return outcome(false, format!("{id} failed: {e}"));
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in names {
        files += 1;
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).ok();
        if y.as_deref() != Some(x.as_slice()) {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    outcome(
        differing.is_empty() && files >= 2 * ExperimentId::ALL.len(),
        format!(
            "{files} files from {} experiments, differing: {}",
            ExperimentId::ALL.len(),
            if differing.is_empty() { "none".to_string() } else { differing.join(", ") }
        ),
    )
}

fn main() -> ExitCode {
    let results = [
        run(1, "geometric-mean coincidence", secs(1), criterion_1),
        run(2, "arithmetic-mean coincidences", secs(5), criterion_2),
        run(3, "triple-oracle agreement", secs(10), criterion_3),
        run(4, "bounds and weighted-average identity", secs(10), criterion_4),
        run(5, "limit behavior", secs(1), criterion_5),
        run(6, "neutrality threshold", secs(10), criterion_6),
        run(7, "Pearson correlation", secs(30), criterion_7),
        run(8, "numerical eigensolver vs closed forms", secs(180), criterion_8),
        run(9, "heterogeneous consistency", secs(60), criterion_9),
        run(10, "dynamics", secs(300), criterion_10),
        run(11, "reproducibility", None, criterion_11),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
