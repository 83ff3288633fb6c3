use nalgebra::DMatrix;
use potent_core::linalg::{
    general_exponential, hermitian_exponential, partial_matrix_element, Factor, JointSpace, Operator, StateVector,
    C64,
};
use potent_core::random;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_operator(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    Operator::new(DMatrix::from_fn(dim, dim, |_, _| random::complex_normal(rng))).unwrap()
}

/// Index-sum reference for the partial contraction, written independently of
/// the block-view implementation.
fn brute_force_contraction(u: &Operator, s: usize, a: usize, bra: &StateVector, ket: &StateVector, factor: Factor) -> Operator {
    let (b, k) = (bra.amplitudes(), ket.amplitudes());
    let out = match factor {
        Factor::System => DMatrix::from_fn(a, a, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..s {
                for y in 0..s {
                    acc += b[x].conj() * u.entry(x * a + i, y * a + j) * k[y];
                }
            }
            acc
        }),
        Factor::Apparatus => DMatrix::from_fn(s, s, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..a {
                for y in 0..a {
                    acc += b[x].conj() * u.entry(i * a + x, j * a + y) * k[y];
                }
            }
            acc
        }),
    };
    Operator::new(out).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_product_is_associative(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..4) {
        let mut r = rng(seed);
        let (x, y, z) = (random_operator(&mut r, d1), random_operator(&mut r, d2), random_operator(&mut r, d3));
        let left = x.kron(&y).kron(&z);
        let right = x.kron(&y.kron(&z));
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-12);
    }

    #[test]
    fn hermitian_evolution_is_unitary(seed in any::<u64>(), dim in 1usize..=16, g in -10.0f64..10.0) {
        let mut r = rng(seed);
        let h = random::hermitian(&mut r, dim);
        let u = hermitian_exponential(&h, C64::new(0.0, -g)).unwrap();
        prop_assert!(u.unitary_defect() <= 1e-10);
    }

    #[test]
    fn exponential_inverse_pairs(seed in any::<u64>(), dim in 1usize..=8, re in -1.0f64..1.0, im in -5.0f64..5.0) {
        let mut r = rng(seed);
        let h = random::hermitian(&mut r, dim);
        let s = C64::new(re, im);
        let fwd = hermitian_exponential(&h, s).unwrap();
        let back = hermitian_exponential(&h, -s).unwrap();
        prop_assert!((&fwd * &back).max_abs_diff(&Operator::identity(dim)).unwrap() <= 1e-10);
    }

    #[test]
    fn pade_route_agrees_with_eigen_route(seed in any::<u64>(), dim in 1usize..=8, g in -10.0f64..10.0) {
        let mut r = rng(seed);
        let h = random::hermitian(&mut r, dim);
        let a = hermitian_exponential(&h, C64::new(0.0, -g)).unwrap();
        let b = general_exponential(&h, C64::new(0.0, -g)).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-10);
    }

    #[test]
    fn partial_contraction_matches_index_sum(seed in any::<u64>(), s in 1usize..=4, a in 1usize..=4, on_system in any::<bool>()) {
        let mut r = rng(seed);
        let space = JointSpace::new(s, a).unwrap();
        let u = random_operator(&mut r, s * a);
        let factor = if on_system { Factor::System } else { Factor::Apparatus };
        let d = space.factor_dim(factor);
        let bra = StateVector::new((0..d).map(|_| random::complex_normal(&mut r)).collect()).unwrap();
        let ket = StateVector::new((0..d).map(|_| random::complex_normal(&mut r)).collect()).unwrap();
        let got = partial_matrix_element(&u, space, &bra, &ket, factor).unwrap();
        let want = brute_force_contraction(&u, s, a, &bra, &ket, factor);
        prop_assert!(got.max_abs_diff(&want).unwrap() <= 1e-12);

        // Linear in U, antilinear in bra, linear in ket.
        let v = random_operator(&mut r, s * a);
        let (alpha, beta) = (random::complex_normal(&mut r), random::complex_normal(&mut r));
        let combo = &u.scaled(alpha) + &v.scaled(beta);
        let lhs = partial_matrix_element(&combo, space, &bra, &ket, factor).unwrap();
        let rhs = &got.scaled(alpha) + &partial_matrix_element(&v, space, &bra, &ket, factor).unwrap().scaled(beta);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
        let lhs = partial_matrix_element(&u, space, &bra.scaled(alpha), &ket.scaled(beta), factor).unwrap();
        prop_assert!(lhs.max_abs_diff(&got.scaled(alpha.conj() * beta)).unwrap() <= 1e-12);
    }

    #[test]
    fn normalize_is_idempotent_and_phase_canonical(seed in any::<u64>(), dim in 1usize..=8) {
        let mut r = rng(seed);
        let v = StateVector::new((0..dim).map(|_| random::complex_normal(&mut r)).collect()).unwrap();
        let lambda = random::nonzero_scale(&mut r);
        let n = v.normalized().unwrap();
        prop_assert!(n.normalized().unwrap().max_abs_diff(&n).unwrap() <= 1e-14);
        prop_assert!(v.scaled(lambda).normalized().unwrap().max_abs_diff(&n).unwrap() <= 1e-12);
    }
}
