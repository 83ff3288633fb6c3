use potent_core::linalg::{StateVector, C64};
use potent_core::pps::{potent_operator, PrePostSelection};
use potent_core::random;
use potent_core::timemachine::{
    conditional_evolution, control_selection, potent_time_superposition, superposed_evolution, EvolutionFamily,
    SuperpositionSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(seed: u64) -> (EvolutionFamily, SuperpositionSpec, StateVector, ChaCha8Rng) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let dim = r.gen_range(1..=8);
    let n = r.gen_range(1..=5);
    let h0 = random::hermitian(&mut r, dim).into_operator();
    let h1 = random::hermitian(&mut r, dim).into_operator();
    let params: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
    let family = EvolutionFamily::new(params, 1.3, move |a| Ok(&h0 + &h1.scaled(C64::new(a, 0.0)))).unwrap();
    let mut c: Vec<C64> = (0..n - 1).map(|_| random::complex_normal(&mut r)).collect();
    let rest: C64 = c.iter().sum();
    c.push(C64::new(1.0, 0.0) - rest);
    let spec = SuperpositionSpec::new(c).unwrap();
    let meter = random::state(&mut r, dim);
    (family, spec, meter, r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn potent_operator_realizes_the_superposition(seed in any::<u64>()) {
        let (family, spec, meter, _) = random_instance(seed);
        let up = potent_time_superposition(&family, &spec).unwrap();
        let sup = superposed_evolution(&family, &spec, &meter).unwrap();
        prop_assert!(up.apply(&meter).unwrap().max_abs_diff(&sup.state).unwrap() <= 1e-12);
        prop_assert!(sup.success_norm <= spec.l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn control_state_normalization_is_irrelevant(seed in any::<u64>()) {
        let (family, spec, _, mut r) = random_instance(seed);
        let u = conditional_evolution(&family).unwrap();
        let sel = control_selection(&spec).unwrap();
        let rescaled = PrePostSelection::new(
            sel.psi().scaled(random::nonzero_scale(&mut r)),
            sel.phi().scaled(random::nonzero_scale(&mut r)),
        )
        .unwrap();
        let a = potent_operator(&u, &sel).unwrap();
        let b = potent_operator(&u, &rescaled).unwrap();
        prop_assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() <= 1e-12);
    }
}
