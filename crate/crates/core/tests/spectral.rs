use effgrow::model::{
    alpha_threshold, make_kernel_alpha, make_kernel_bimodal, make_kernel_noheredity, make_kernel_random, MeanKind,
};
use effgrow::spectral::{
    build_growth_matrix, build_growth_matrix_case_b, dominant_eigentriplet, effective_trait_bimodal, solve_noheredity,
};
use effgrow::{HeredityKernel, TraitSet};
use proptest::prelude::*;

fn triplet(traits: &TraitSet, kernel: &HeredityKernel) -> effgrow::EigenTriplet {
    dominant_eigentriplet(&build_growth_matrix(traits, kernel, 1.0).unwrap()).unwrap()
}

#[test]
fn bimodal_reference_value() {
    // a = (1/2 - 0.3) * 0.5 = 0.1, b = 0, 4 k1 k2 v1 v2 = 0.75.
    let expected = 0.1 + 0.76f64.sqrt();
    let v = effective_trait_bimodal(0.5, 2.5, 0.3, 0.5).unwrap();
    assert!((v - expected).abs() < 1e-14);
    assert!((v - 0.9717797887081347).abs() < 1e-15);
}

#[test]
fn matrix_matches_bimodal_closed_form() {
    let traits = TraitSet::new(vec![0.5, 2.5]).unwrap();
    for (k1, k2) in [(0.3, 0.5), (0.2, 0.8), (0.8, 0.2), (0.05, 0.95)] {
        let t = triplet(&traits, &make_kernel_bimodal(k1, k2).unwrap());
        let closed = effective_trait_bimodal(0.5, 2.5, k1, k2).unwrap();
        assert!((t.lambda - closed).abs() < 1e-10, "k=({k1},{k2})");
        let dual: f64 = t.fractions.iter().zip(&t.adjoint).map(|(n, p)| n * p).sum();
        assert!((dual - 1.0).abs() < 1e-12);
    }
}

#[test]
fn invalid_bimodal_inputs_are_rejected() {
    let swapped = effective_trait_bimodal(2.5, 0.5, 0.5, 0.3).unwrap();
    assert_eq!(swapped, effective_trait_bimodal(0.5, 2.5, 0.3, 0.5).unwrap());
    assert!(effective_trait_bimodal(-0.5, 2.5, 0.3, 0.5).is_err());
    assert!(effective_trait_bimodal(0.5, 2.5, 1.3, 0.5).is_err());
    assert!(make_kernel_bimodal(-0.1, 0.5).is_err());
}

#[test]
fn case_b_matrix_has_the_same_spectrum_for_two_traits() {
    // Linear growth: cells of trait v divide after the same size gain, so the
    // reduced system no longer depends on the trait values.
    let traits = TraitSet::new(vec![0.5, 2.5]).unwrap();
    let kernel = make_kernel_bimodal(0.3, 0.5).unwrap();
    let t = dominant_eigentriplet(&build_growth_matrix_case_b(&traits, &kernel).unwrap()).unwrap();
    assert!(t.lambda.is_finite() && t.lambda > 0.0);
    assert!((t.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn neutral_kernel_keeps_uniform_fractions() {
    for m in [3, 7, 25] {
        let traits = TraitSet::new((1..=m).map(|i| i as f64 * 0.4).collect()).unwrap();
        let t = triplet(&traits, &make_kernel_alpha(m, alpha_threshold(m)).unwrap());
        assert!((t.effective_trait - traits.mean(MeanKind::Arithmetic)).abs() < 1e-10);
    }
}

#[test]
fn random_kernel_is_seeded() {
    let a = make_kernel_random(6, 11).unwrap();
    let b = make_kernel_random(6, 11).unwrap();
    let c = make_kernel_random(6, 12).unwrap();
    assert_eq!(a.to_row_major(), b.to_row_major());
    assert_ne!(a.to_row_major(), c.to_row_major());
}

fn traits_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..10.0, 2..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn effective_trait_stays_between_extremes(values in traits_strategy(), seed in any::<u64>()) {
        let Ok(traits) = TraitSet::from_unsorted(values) else { return Ok(()); };
        let kernel = make_kernel_random(traits.len(), seed).unwrap();
        let t = triplet(&traits, &kernel);
        prop_assert!(t.effective_trait >= traits.min() - 1e-12);
        prop_assert!(t.effective_trait <= traits.max() + 1e-12);
        prop_assert!((t.lambda - t.weighted_rate(&traits)).abs() < 1e-10);
    }

    #[test]
    fn noheredity_polynomial_matches_matrix(values in traits_strategy(), raw in prop::collection::vec(0.05f64..1.0, 8)) {
        let Ok(traits) = TraitSet::from_unsorted(values) else { return Ok(()); };
        let m = traits.len();
        let total: f64 = raw[..m].iter().sum();
        let w: Vec<f64> = raw[..m].iter().map(|x| x / total).collect();
        let poly = solve_noheredity(&traits, &w).unwrap();
        let power = triplet(&traits, &make_kernel_noheredity(&w).unwrap());
        prop_assert!(((poly.lambda - power.lambda) / power.lambda).abs() < 1e-9);
    }

    #[test]
    fn geometric_mean_for_uniform_two_trait_kernel(v1 in 0.01f64..50.0, gap in 0.01f64..50.0) {
        let v2 = v1 + gap;
        let v = effective_trait_bimodal(v1, v2, 0.5, 0.5).unwrap();
        prop_assert!(((v - (v1 * v2).sqrt()) / v).abs() < 1e-12);
    }
}
