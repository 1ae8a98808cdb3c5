//! Sweeps that only need the reduced matrix problem.

use rayon::prelude::*;

use super::{case_a_triplet, linspace, query::parse_kernel, Params, RunOutput};
use crate::csv::{Cell, CsvTable};
use crate::error::Result;
use crate::model::{
    alpha_threshold, make_trait_set, mean, pearson_correlation_alpha, sigma_limit, MeanKind,
    TraitSet,
};
use crate::spectral::effective_trait_bimodal;

/// Traits `(min(4, v*), max(4, v*))` with `k1` attached to the smaller one.
fn vstar_row(v_star: f64, k1: f64, k2: f64) -> Result<[f64; 7]> {
    let (v1, v2) = (v_star.min(4.0), v_star.max(4.0));
    let v = effective_trait_bimodal(v1, v2, k1, k2)?;
    Ok([
        v_star,
        k1,
        k2,
        v,
        0.5 * (v1 + v2),
        (v1 * v2).sqrt(),
        2.0 * v1 * v2 / (v1 + v2),
    ])
}

fn vstar_sweep(p: &mut Params, default_kernels: &[(f64, f64)], out: &mut RunOutput) -> Result<Vec<[f64; 7]>> {
    let points = p.usize("v_star_points", 201)?;
    let lo = p.f64("v_star_min", 1.0)?;
    let hi = p.f64("v_star_max", 8.0)?;
    let kernels = p.pair_list("kernels", default_kernels)?;
    let grid = linspace(lo, hi, points);
    let mut rows = Vec::with_capacity(kernels.len() * points);
    for &(k1, k2) in &kernels {
        for &v in &grid {
            rows.push(vstar_row(v, k1, k2)?);
        }
    }
    let bad = rows.iter().filter(|r| r[3] < r[0].min(4.0) || r[3] > r[0].max(4.0)).count();
    out.check("v_eff_within_trait_bounds", bad == 0, format!("{bad} rows outside [v1, v2]"));
    Ok(rows)
}

fn vstar_table(rows: &[[f64; 7]]) -> CsvTable {
    let mut t = CsvTable::new(&["v_star", "k1", "k2", "v_eff", "m_A", "m_G", "m_H"]);
    for r in rows {
        t.push(r.iter().map(|x| Cell::from(*x)).collect());
    }
    t
}

fn close_check(out: &mut RunOutput, name: &str, value: f64, expected: f64, tol: f64) {
    out.check(
        name,
        (value - expected).abs() <= tol,
        format!("{value:.12} vs {expected:.12} (tol {tol:e})"),
    );
}

/// Effective trait against `v*` for the uniform kernel and `k1 = k2 = 1/4`.
pub(crate) fn run_fig3(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let rows = vstar_sweep(p, &[(0.5, 0.5), (0.25, 0.25)], &mut out)?;
    close_check(&mut out, "uniform_equal_traits", vstar_row(4.0, 0.5, 0.5)?[3], 4.0, 1e-12);
    close_check(&mut out, "uniform_geometric_mean", vstar_row(1.0, 0.5, 0.5)?[3], 2.0, 1e-12);
    close_check(&mut out, "quarter_arithmetic_mean", vstar_row(8.0, 0.25, 0.25)?[3], 6.0, 1e-12);
    out.table("fig3.csv", vstar_table(&rows));
    Ok(out)
}

/// Same sweep for asymmetric kernels.
pub(crate) fn run_fig4(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let rows = vstar_sweep(p, &[(0.2, 0.2), (0.8, 0.8), (0.2, 0.8), (0.8, 0.2)], &mut out)?;
    // Switching away from the fast trait lowers v_eff, away from the slow one raises it.
    let grid: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let mut violations = 0;
    for &v in &grid {
        if vstar_row(v, 0.8, 0.2)?[3] < vstar_row(v, 0.2, 0.8)?[3] - 1e-12 {
            violations += 1;
        }
    }
    out.check(
        "fast_heredity_dominates",
        violations == 0,
        format!("{violations} points where v_eff(0.8, 0.2) < v_eff(0.2, 0.8)"),
    );
    out.table("fig4.csv", vstar_table(&rows));
    Ok(out)
}

/// Effective trait over the `(k1, k2)` square for traits `(0.5, 2.5)`.
pub(crate) fn run_fig5_heatmap(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let n = p.usize("points", 99)?;
    let lo = p.f64("k_min", 0.01)?;
    let hi = p.f64("k_max", 0.99)?;
    let v1 = p.f64("v1", 0.5)?;
    let v2 = p.f64("v2", 2.5)?;
    let ks = linspace(lo, hi, n);
    let rows: Vec<[f64; 3]> = ks
        .iter()
        .flat_map(|&k1| ks.iter().map(move |&k2| (k1, k2)))
        .map(|(k1, k2)| Ok([k1, k2, effective_trait_bimodal(v1, v2, k1, k2)?]))
        .collect::<Result<_>>()?;

    let low_k2 = rows.iter().filter(|r| r[1] == lo).map(|r| (r[2] - v2).abs()).fold(0.0, f64::max);
    out.check(
        "low_k2_approaches_v2",
        low_k2 < 0.05,
        format!("max |v_eff - v2| on k2 = {lo}: {low_k2:.4}"),
    );
    close_check(
        &mut out,
        "symmetric_geometric_mean",
        effective_trait_bimodal(v1, v2, 0.5, 0.5)?,
        (v1 * v2).sqrt(),
        1e-12,
    );
    let near = effective_trait_bimodal(v1, v2, lo, 0.45)?;
    let limit = v1.max((1.0 - 2.0 * 0.45) * v2);
    close_check(&mut out, "low_k1_limit", near, limit, 0.1);

    let mut t = CsvTable::new(&["k1", "k2", "v_eff"]);
    for r in &rows {
        t.push(r.iter().map(|x| Cell::from(*x)).collect());
    }
    out.table("fig5_heatmap.csv", t);
    Ok(out)
}

/// Effective trait against the number of traits `M`, traits equally spaced.
pub(crate) fn run_fig6(p: &mut Params, seed: u64) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let m_min = p.usize("m_min", 2)?;
    let m_max = p.usize("m_max", 60)?;
    let lo = p.f64("v_min", 1.0)?;
    let hi = p.f64("v_max", 7.0)?;
    let kernels = p.string_list("kernels", &["uniform", "alpha:0.2", "alpha:0.5", "alpha:0.8", "alpha0", "random"])?;
    let ms: Vec<usize> = (m_min.max(2)..=m_max).collect();

    let rows: Vec<(usize, String, [f64; 4])> = kernels
        .iter()
        .flat_map(|k| ms.iter().map(move |&m| (k.clone(), m)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(kernel, m)| {
            let traits = TraitSet::new(linspace(lo, hi, m))?;
            let t = case_a_triplet(&traits, |m| parse_kernel(&kernel, m, seed))?;
            let means = [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic].map(|k| mean(&traits, k));
            Ok((m, kernel, [t.effective_trait, means[0], means[1], means[2]]))
        })
        .collect::<Result<_>>()?;

    let bad = rows
        .iter()
        .filter(|(_, _, r)| r[0] < lo - 1e-12 || r[0] > hi + 1e-12)
        .count();
    out.check("v_eff_within_trait_bounds", bad == 0, format!("{bad} rows outside [{lo}, {hi}]"));
    let value = |kernel: &str, m: usize| {
        rows.iter()
            .find(|(mm, k, _)| *mm == m && k == kernel)
            .map(|(_, _, r)| r[0])
    };
    if let Some(v) = value("uniform", 2) {
        close_check(&mut out, "uniform_two_traits_geometric_mean", v, (lo * hi).sqrt(), 1e-10);
        if let Some(v_max) = value("uniform", m_max) {
            out.check(
                "geometric_mean_coincidence_is_specific_to_two_traits",
                (v - v_max).abs() > 1e-3,
                format!("M=2: {v:.6}, M={m_max}: {v_max:.6}"),
            );
        }
    }
    if m_max >= 60 && m_min <= 50 {
        // A single random draw fluctuates by about 1e-2 between sizes, so it
        // is compared with the uniform kernel it concentrates around instead.
        for kernel in kernels.iter().filter(|k| !k.starts_with("random")) {
            if let (Some(a), Some(b)) = (value(kernel, 50), value(kernel, 60)) {
                out.check(
                    &format!("plateau_{kernel}"),
                    (a - b).abs() < 0.01,
                    format!("|v_eff(60) - v_eff(50)| = {:.3e}", (a - b).abs()),
                );
            }
        }
        for kernel in kernels.iter().filter(|k| k.starts_with("random")) {
            let gap = (50..=60)
                .filter_map(|m| Some((value(kernel, m)? - value("uniform", m)?).abs()))
                .fold(0.0, f64::max);
            out.check(
                &format!("plateau_{kernel}_near_uniform"),
                gap < 0.1,
                format!("max |v_eff - v_eff(uniform)| for M in 50..=60: {gap:.3e}"),
            );
        }
    }

    let mut t = CsvTable::new(&["M", "kernel_id", "v_eff", "m_A", "m_G", "m_H"]);
    t.meta("random_kernel_seed", seed);
    for (m, k, r) in &rows {
        let mut row = vec![Cell::from(*m), Cell::from(k.as_str())];
        row.extend(r.iter().map(|x| Cell::from(*x)));
        t.push(row);
    }
    out.table("fig6_Mconvergence.csv", t);
    Ok(out)
}

/// One `(M, alpha, kind, sigma)` point of the σ sweeps.
struct SigmaPoint {
    m: usize,
    kernel: String,
    alpha: Option<f64>,
    kind: MeanKind,
    sigma: f64,
    /// `None` when σ is outside the admissible range of the mean.
    v_eff: Option<f64>,
    gamma: Option<f64>,
}

fn sigma_point(m: usize, kernel: &str, kind: MeanKind, sigma: f64, vbar: f64, seed: u64) -> Result<SigmaPoint> {
    let mut point = SigmaPoint {
        m,
        kernel: kernel.to_string(),
        alpha: None,
        kind,
        sigma,
        v_eff: None,
        gamma: None,
    };
    if sigma >= sigma_limit(vbar, kind) {
        return Ok(point);
    }
    let traits = make_trait_set(m, sigma, vbar, kind)?;
    let k = parse_kernel(kernel, m, seed)?;
    point.alpha = k.alpha_parameter();
    point.v_eff = Some(case_a_triplet(&traits, |_| Ok(k.clone()))?.effective_trait);
    if let (Some(alpha), true) = (point.alpha, traits.len() == m) {
        let law = vec![1.0 / m as f64; m];
        point.gamma = pearson_correlation_alpha(m, alpha, &law, &traits).ok().map(|r| r.gamma);
    }
    Ok(point)
}

pub(super) fn alpha_grid(m: usize, extra: &[f64]) -> Vec<f64> {
    let mut alphas: Vec<f64> = extra.to_vec();
    alphas.push(1.0 / m as f64);
    alphas.push(alpha_threshold(m));
    alphas.sort_by(f64::total_cmp);
    alphas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    alphas
}

fn opt(x: Option<f64>) -> Cell {
    x.map_or(Cell::Text(String::new()), Cell::Num)
}

fn status(p: &SigmaPoint) -> &'static str {
    if p.v_eff.is_some() {
        "ok"
    } else {
        "skipped_sigma_out_of_range"
    }
}

/// Effective trait against σ for the α-family kernel and all three means.
pub(crate) fn run_fig7(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let ms: Vec<usize> = p.f64_list("m_values", &[10.0])?.into_iter().map(|m| m as usize).collect();
    let vbar = p.f64("vbar", 4.0)?;
    let sigmas = linspace(0.0, p.f64("sigma_max", 7.6)?, p.usize("sigma_points", 20)?);
    let extra = p.f64_list("alphas", &[0.0, 0.3, 0.7, 0.9])?;

    let mut jobs = Vec::new();
    for &m in &ms {
        for alpha in alpha_grid(m, &extra) {
            for kind in MeanKind::ALL {
                for &s in &sigmas {
                    jobs.push((m, alpha, kind, s));
                }
            }
        }
    }
    let points: Vec<SigmaPoint> = jobs
        .into_par_iter()
        .map(|(m, alpha, kind, s)| {
            let mut pt = sigma_point(m, &format!("alpha:{alpha}"), kind, s, vbar, 0)?;
            pt.alpha = Some(alpha);
            Ok(pt)
        })
        .collect::<Result<_>>()?;

    neutrality_check(&mut out, &points, vbar);
    let mut decreasing = 0;
    for &m in &ms {
        let alphas = alpha_grid(m, &extra);
        for &s in &sigmas {
            let series: Vec<f64> = alphas
                .iter()
                .filter_map(|a| {
                    points
                        .iter()
                        .find(|q| q.m == m && q.kind == MeanKind::Arithmetic && q.sigma == s && q.alpha == Some(*a))
                        .and_then(|q| q.v_eff)
                })
                .collect();
            decreasing += series.windows(2).filter(|w| w[1] < w[0] - 1e-10).count();
        }
    }
    out.check(
        "v_eff_nondecreasing_in_alpha",
        decreasing == 0,
        format!("{decreasing} decreasing steps along alpha (arithmetic mean)"),
    );
    let zero = points
        .iter()
        .filter(|q| q.sigma == 0.0)
        .filter_map(|q| q.v_eff)
        .map(|v| (v - vbar).abs())
        .fold(0.0, f64::max);
    out.check("homogeneous_at_zero_sigma", zero < 1e-12, format!("max |v_eff - vbar| at sigma=0: {zero:.3e}"));

    let mut t = CsvTable::new(&["M", "alpha", "mean_kind", "sigma", "v_eff", "gamma", "status"]);
    for q in &points {
        t.push(vec![
            q.m.into(),
            opt(q.alpha),
            q.kind.label().into(),
            q.sigma.into(),
            opt(q.v_eff),
            opt(q.gamma),
            status(q).into(),
        ]);
    }
    out.table("fig7_sigma_alpha.csv", t);
    Ok(out)
}

fn neutrality_check(out: &mut RunOutput, points: &[SigmaPoint], vbar: f64) {
    let worst = points
        .iter()
        .filter(|q| q.kind == MeanKind::Arithmetic && q.alpha.is_some_and(|a| (a - alpha_threshold(q.m)).abs() < 1e-12))
        .filter_map(|q| q.v_eff)
        .map(|v| (v - vbar).abs())
        .fold(0.0, f64::max);
    out.check(
        "neutral_threshold_keeps_arithmetic_mean",
        worst <= 1e-9,
        format!("max |v_eff - vbar| at alpha0: {worst:.3e}"),
    );
}

/// Effective trait against σ with arithmetic pinning, for several kernels.
pub(crate) fn run_fig8(p: &mut Params, seed: u64) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let ms: Vec<usize> = p.f64_list("m_values", &[10.0, 100.0])?.into_iter().map(|m| m as usize).collect();
    let vbar = p.f64("vbar", 4.0)?;
    let sigmas = linspace(0.0, p.f64("sigma_max", 7.6)?, p.usize("sigma_points", 20)?);
    let kernels = p.string_list("kernels", &["uniform", "alpha:0.2", "alpha0", "alpha:0.9", "random"])?;

    let mut jobs = Vec::new();
    for &m in &ms {
        for k in &kernels {
            for &s in &sigmas {
                jobs.push((m, k.clone(), s));
            }
        }
    }
    let points: Vec<SigmaPoint> = jobs
        .into_par_iter()
        .map(|(m, k, s)| sigma_point(m, &k, MeanKind::Arithmetic, s, vbar, seed.wrapping_add(m as u64)))
        .collect::<Result<_>>()?;

    neutrality_check(&mut out, &points, vbar);
    let mut wrong = Vec::new();
    for &m in &ms {
        let a0 = alpha_threshold(m);
        for k in &kernels {
            let series: Vec<&SigmaPoint> = points.iter().filter(|q| q.m == m && &q.kernel == k).collect();
            let Some(alpha) = series.iter().find_map(|q| q.alpha) else { continue };
            if (alpha - a0).abs() < 1e-12 {
                continue;
            }
            let v: Vec<f64> = series.iter().filter_map(|q| q.v_eff).collect();
            let sign = if alpha < a0 { -1.0 } else { 1.0 };
            if v.windows(2).any(|w| sign * (w[1] - w[0]) <= 0.0) {
                wrong.push(format!("M={m} {k}"));
            }
        }
    }
    out.check(
        "sigma_slope_sign_follows_threshold",
        wrong.is_empty(),
        if wrong.is_empty() { "all monotone".to_string() } else { wrong.join("; ") },
    );

    let mut t = CsvTable::new(&["M", "kernel_id", "alpha", "sigma", "v_eff", "m_A", "status"]);
    t.meta("random_kernel_seed", format!("seed + M with seed={seed}"));
    for q in &points {
        t.push(vec![
            q.m.into(),
            q.kernel.as_str().into(),
            opt(q.alpha),
            q.sigma.into(),
            opt(q.v_eff),
            vbar.into(),
            status(q).into(),
        ]);
    }
    out.table("fig8_neutrality.csv", t);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_kernel_alpha;

    #[test]
    fn alpha_grid_contains_special_values() {
        let g = alpha_grid(10, &[0.0, 0.1, 0.9]);
        assert_eq!(g, vec![0.0, 0.1, 0.55, 0.9]);
        assert!(make_kernel_alpha(10, g[2]).is_ok());
    }
}
