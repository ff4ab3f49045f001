//! Randomized invariants. Each case draws a seed and builds its instance
//! from it, so failures reproduce from the printed seed.

mod common;

use common::*;
use num_traits::Zero;
use presym::cartan::{exterior_derivative, interior, lie_bracket, lie_derivative};
use presym::linred::{linear_reduce, LinForm, Subspace};
use presym::presymp::{hamiltonian_vector_field, poisson_bracket, PresympSystem};
use presym::sample::Sampler;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn kernel_of_restriction_splits(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = Sampler::new(seed);
        let a = random_two_form(&mut rng, n);
        let s = random_subspace(&mut rng, n);
        let oracle = two_form_oracle(&a, &s);
        // The identity on the oracle side alone.
        prop_assert!(same_span(&oracle.ker_alpha_n, &oracle.ker_plus_cap, n));
        let lr = linear_reduce(&LinForm::from_matrix(&a).unwrap(), &Subspace::span(n, &s)).unwrap();
        prop_assert!(same_span(lr.kernel_of_alpha_n.basis(), &oracle.ker_plus_cap, n));
        prop_assert!(same_span(lr.n.basis(), &oracle.n, n));
        prop_assert!(same_span(lr.n_cap_s.basis(), &oracle.cap, n));
        prop_assert_eq!(lr.kernel_decomposition_verified, Some(true));
        prop_assert_eq!(lr.quotient_dim, oracle.n.len() - rank(&oracle.ker_alpha_n, n));
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn reduced_three_forms_are_nondegenerate(seed in any::<u64>(), n in 3usize..=7) {
        let mut rng = Sampler::new(seed);
        let alt = random_alt(&mut rng, n, 3, 0.5);
        let s = random_subspace(&mut rng, n);
        let alpha = LinForm::from_components(n, 3, alt.comps.clone().into_iter().collect()).unwrap();
        let lr = linear_reduce(&alpha, &Subspace::span(n, &s)).unwrap();
        let q = lr.quotient_dim;
        let red = Alt { n: q, k: 3, comps: lr.reduced_form.components().map(|(k, c)| (k.clone(), c.clone())).collect() };
        // The reduced form is α evaluated on the quotient representatives.
        for t in increasing(q, 3) {
            let vs: Vec<Vector> = t.iter().map(|&i| lr.quotient_basis[i].clone()).collect();
            prop_assert_eq!(red.get(&t), alt.eval(&vs));
        }
        if q > 0 {
            prop_assert_eq!(rank(&red.contraction_columns(), increasing(q, 2).len()), q);
        }
    }

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), n in 1usize..=5, k in 0usize..=3) {
        let mut rng = Sampler::new(seed);
        let c = chart(n);
        let w = random_form(&mut rng, &c, k.min(n));
        prop_assert!(exterior_derivative(&exterior_derivative(&w)).is_zero());
    }

    #[test]
    fn cartan_formula_matches_leibniz(seed in any::<u64>(), n in 1usize..=4, k in 0usize..=3) {
        let mut rng = Sampler::new(seed);
        let c = chart(n);
        let w = random_form(&mut rng, &c, k.min(n));
        let x = random_field(&mut rng, &c);
        let expected = leibniz_lie(&x, &w);
        prop_assert_eq!(&components(&lie_derivative(&x, &w).unwrap()), &expected);
        if w.degree() > 0 {
            let cartan = interior(&x, &exterior_derivative(&w)).unwrap()
                .try_add(&exterior_derivative(&interior(&x, &w).unwrap())).unwrap();
            prop_assert_eq!(&components(&cartan), &expected);
        }
    }

    #[test]
    fn poisson_bracket_is_jacobi(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = Sampler::new(seed);
        let (c, w) = random_symplectic(&mut rng, m);
        let sys = PresympSystem::new(c.clone(), w, c.zero()).unwrap();
        let f: Vec<_> = (0..3).map(|_| random_poly(&mut rng, &c, 3, 2)).collect();
        let pb = |a: &presym::symexpr::Poly, b: &presym::symexpr::Poly| poisson_bracket(&sys, a, b).unwrap();
        let j = &(&pb(&f[0], &pb(&f[1], &f[2])) + &pb(&f[1], &pb(&f[2], &f[0]))) + &pb(&f[2], &pb(&f[0], &f[1]));
        prop_assert!(j.is_zero(), "Jacobiator {}", j);
    }

    #[test]
    fn bracket_of_hamiltonian_fields(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = Sampler::new(seed);
        let (c, w) = random_symplectic(&mut rng, m);
        let sys = PresympSystem::new(c.clone(), w, c.zero()).unwrap();
        let f1 = random_poly(&mut rng, &c, 3, 2);
        let f2 = random_poly(&mut rng, &c, 3, 2);
        let x1 = hamiltonian_vector_field(&sys, &f1).unwrap().unwrap().particular;
        let x2 = hamiltonian_vector_field(&sys, &f2).unwrap().unwrap().particular;
        let lhs = interior(&lie_bracket(&x1, &x2).unwrap(), &sys.omega).unwrap();
        let rhs = exterior_derivative(&presym::cartan::DiffForm::function(&c, poisson_bracket(&sys, &f2, &f1).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn oracle_sanity() {
    // ω = dx0∧dx1 on R³, S = span{e0}: N = span{e0, e2}, α_N = 0.
    let a = vec![
        vec![0.into(), 1.into(), 0.into()],
        vec![(-1).into(), 0.into(), 0.into()],
        vec![0.into(), 0.into(), 0.into()],
    ]
    .into_iter()
    .map(|r: Vec<i64>| r.into_iter().map(presym::symexpr::rat).collect())
    .collect::<Vec<Vector>>();
    let e0: Vector = vec![presym::symexpr::rat(1), Zero::zero(), Zero::zero()];
    let o = two_form_oracle(&a, &[e0]);
    assert_eq!(rank(&o.n, 3), 2);
    assert_eq!(rank(&o.ker_alpha_n, 3), 2);
    assert_eq!(sort_sign(&[2, 0, 1]), Some((1, vec![0, 1, 2])));
    assert_eq!(sort_sign(&[1, 0]), Some((-1, vec![0, 1])));
    assert_eq!(sort_sign(&[1, 1]), None);
}
