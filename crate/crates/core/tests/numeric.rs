use effgrow::model::{make_kernel_bimodal, make_kernel_noheredity};
use effgrow::numeric::{solve_heterogeneous, Fragmentation, Growth, ModelSpec, SolveMethod, SolverOptions};
use effgrow::profiles::{profile_uniform_division, profiles_caseb_heterogeneous, DivisionRate};
use effgrow::{SizeGrid, TraitSet};

const BIMODAL_LAMBDA: f64 = 0.9717797887081347;
/// Frozen regression value: `tau = x`, mitosis, `beta = 1`, traits (0.5, 2.5),
/// no-heredity kernel [0.5, 0.5], x_max = 30, dx = 0.02, renewal solver.
const MITOSIS_REGRESSION: f64 = 1.152725715980;

fn renewal() -> SolverOptions {
    SolverOptions {
        method: SolveMethod::Renewal,
        ..SolverOptions::default()
    }
}

fn case_b_two_traits() -> ModelSpec {
    ModelSpec::case_b(
        TraitSet::new(vec![0.5, 2.5]).unwrap(),
        make_kernel_bimodal(0.3, 0.5).unwrap(),
        DivisionRate::power(1.0, 2.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn case_a_single_trait_matches_analytic_profile() {
    let grid = SizeGrid::uniform(0.01, 15.0).unwrap();
    let model = ModelSpec::case_a(
        TraitSet::new(vec![1.0]).unwrap(),
        make_kernel_noheredity(&[1.0]).unwrap(),
        1.0,
        Fragmentation::Uniform,
    )
    .unwrap();
    let eig = solve_heterogeneous(&model, &grid, &SolverOptions::default()).unwrap();
    assert!((eig.lambda - 1.0).abs() < 1e-9);
    let exact = profile_uniform_division(1.0, &grid).unwrap();
    assert!(eig.profile.l1_distance(&exact).unwrap() < 1e-2);
}

#[test]
fn power_and_renewal_agree() {
    let grid = SizeGrid::uniform(0.02, 20.0).unwrap();
    let model = ModelSpec::case_a(
        TraitSet::new(vec![0.5, 2.5]).unwrap(),
        make_kernel_bimodal(0.3, 0.5).unwrap(),
        1.0,
        Fragmentation::Uniform,
    )
    .unwrap();
    let a = solve_heterogeneous(&model, &grid, &SolverOptions::default()).unwrap();
    let b = solve_heterogeneous(&model, &grid, &renewal()).unwrap();
    assert!((a.lambda - BIMODAL_LAMBDA).abs() < 1e-8);
    assert!((a.lambda - b.lambda).abs() < 1e-8);
}

#[test]
fn duality_normalization_holds() {
    let grid = SizeGrid::uniform(0.02, 20.0).unwrap();
    let model = ModelSpec::case_a(
        TraitSet::new(vec![0.5, 2.5]).unwrap(),
        make_kernel_bimodal(0.2, 0.8).unwrap(),
        1.0,
        Fragmentation::Uniform,
    )
    .unwrap();
    let eig = solve_heterogeneous(&model, &grid, &SolverOptions::default()).unwrap();
    let pairing = eig.adjoint.pair(eig.profile.values());
    assert!((pairing - 1.0).abs() < 1e-9, "pairing {pairing}");
    assert!((eig.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn linear_growth_two_traits_share_one_shape() {
    let grid = SizeGrid::uniform(0.0025, 10.0).unwrap();
    let eig = solve_heterogeneous(&case_b_two_traits(), &grid, &renewal()).unwrap();
    let n = eig.profile.values();
    let w = grid.weights();
    let r = eig.fractions[1] / eig.fractions[0];
    let spread: f64 = (0..grid.len()).map(|j| w[j] * (n[1][j] - r * n[0][j]).abs()).sum();
    assert!(spread < 1e-3, "ratio spread {spread:.3e}");

    let (analytic, triplet) = profiles_caseb_heterogeneous(
        &TraitSet::new(vec![0.5, 2.5]).unwrap(),
        &make_kernel_bimodal(0.3, 0.5).unwrap(),
        &DivisionRate::power(1.0, 2.0).unwrap(),
        &grid,
    )
    .unwrap();
    assert!((triplet.lambda - BIMODAL_LAMBDA).abs() < 1e-10);
    assert!(eig.profile.l1_distance(&analytic).unwrap() < 1e-2);
}

#[test]
fn linear_growth_error_is_first_order() {
    let mut errors = Vec::new();
    for dx in [0.01, 0.005] {
        let grid = SizeGrid::uniform(dx, 10.0).unwrap();
        let eig = solve_heterogeneous(&case_b_two_traits(), &grid, &renewal()).unwrap();
        errors.push((eig.lambda - BIMODAL_LAMBDA).abs());
    }
    let ratio = errors[0] / errors[1];
    assert!(errors[0] < 5e-3);
    assert!(ratio > 1.8 && ratio < 2.2, "ratio {ratio}");
}

#[test]
fn mitosis_regression() {
    let grid = SizeGrid::uniform(0.02, 30.0).unwrap();
    let model = ModelSpec::new(
        Growth::Linear,
        DivisionRate::constant(1.0).unwrap(),
        Fragmentation::Mitosis,
        TraitSet::new(vec![0.5, 2.5]).unwrap(),
        make_kernel_noheredity(&[0.5, 0.5]).unwrap(),
    )
    .unwrap();
    let eig = solve_heterogeneous(&model, &grid, &renewal()).unwrap();
    assert!((eig.lambda - MITOSIS_REGRESSION).abs() < 1e-9, "lambda {}", eig.lambda);
}

#[test]
fn case_a_rejects_power_law_division_in_matrix_query() {
    use effgrow::experiments::{solve_query, BetaSpec};
    let traits = TraitSet::new(vec![0.5, 2.5]).unwrap();
    let kernel = make_kernel_bimodal(0.3, 0.5).unwrap();
    let r = solve_query(effgrow::GrowthCase::A, &traits, &kernel, BetaSpec::Power(2.0));
    assert!(r.is_err());
}
