mod common;

use almost_grassmann::tensor::{IndexedTensor, Signature, TensorFile};
use almost_grassmann::torsion::{
    gauge_shift, project, scale_weight, torsion_from_raw, CoefficientSet, GaugeShift, RawCoefficients,
    TorsionTensor,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn raw(p: usize, q: usize, seed: u64) -> RawCoefficients {
    RawCoefficients::random(Signature::new(p, q).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn projection_matches_loop_oracle(p in 2usize..5, q in 2usize..5, seed in any::<u64>()) {
        let u = raw(p, q, seed);
        let a = project(&u, CoefficientSet::Standard);
        prop_assert!(common::max_diff(&a, &common::project(u.tensor())) < 1e-13);
        let (g, l) = common::torsion_traces(&a);
        prop_assert!(g < 1e-13 && l < 1e-13);
        prop_assert!(common::pair_antisymmetry(&a) < 1e-15);
    }

    #[test]
    fn fiber_shifts_leave_torsion_unchanged(p in 2usize..5, q in 2usize..5, seed in any::<u64>()) {
        let u = raw(p, q, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        let shifted = gauge_shift(&u, &GaugeShift::random(u.signature(), &mut rng)).unwrap();
        prop_assert!(common::max_diff(shifted.tensor(), u.tensor()) > 1e-3);
        let a0 = torsion_from_raw(&u, 1e-12).unwrap().a;
        let a1 = torsion_from_raw(&shifted, 1e-12).unwrap().a;
        prop_assert!(common::max_diff(&a0, &a1) < 1e-12);
    }

    #[test]
    fn homotheties_have_weight_minus_one(lambda in 0.1f64..10.0, seed in any::<u64>()) {
        let a = torsion_from_raw(&raw(3, 2, seed), 1e-12).unwrap().a;
        let scaled = scale_weight(&a, lambda).unwrap();
        prop_assert!(common::max_diff(&scaled.scale(lambda), &a) < 1e-13);
    }
}

#[test]
fn rejects_tensors_violating_the_constraints() {
    let u = raw(3, 3, 7);
    assert!(TorsionTensor::from_tensor(u.tensor().clone(), 1e-12).unwrap_err().is_constraint_violation());
    assert!(scale_weight(u.tensor(), 0.0).is_err());
}

#[test]
fn tensor_files_roundtrip() {
    let a = torsion_from_raw(&raw(2, 3, 8), 1e-12).unwrap().a;
    let text = serde_json::to_string(&TensorFile::from(&a)).unwrap();
    let back = IndexedTensor::try_from(serde_json::from_str::<TensorFile>(&text).unwrap()).unwrap();
    assert_eq!(back, a);
    let direct: IndexedTensor = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
    assert_eq!(direct, a);
}
