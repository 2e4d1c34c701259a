mod common;

use common::{haar_state, qubit, random_mixture, rng};
use gravclock::clockstate::*;
use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;

const SP: [(&str, usize); 2] = [("S", 2), ("P", 2)];

fn random_local_unitary(r: &mut impl rand::Rng) -> DMatrix<C64> {
    let a = common::haar_amplitudes(r, 2);
    let ph = C64::from_polar(1.0, r.random::<f64>() * 6.0);
    // columns (a0, a1) and its orthogonal complement, times a phase
    let u = Matrix2::new(a[0], -a[1].conj() * ph, a[1], a[0].conj() * ph);
    DMatrix::from_iterator(2, 2, u.iter().copied())
}

#[test]
fn randomized_postconditions() {
    let mut r = rng(11);
    for _ in 0..10_000 {
        let psi = haar_state(&mut r, &[("S", 2), ("P", 2), ("C", 2)]);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let rho = reduced_density(&psi, &["S", "C"]).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!((rho.matrix() - rho.matrix().adjoint()).iter().all(|z| z.norm() < 1e-12));
        assert!(rho.eigenvalues()[0] > -1e-10);
        let s = von_neumann_entropy(&rho, EntropyBase::Bits);
        assert!((-1e-12..=2.0 + 1e-12).contains(&s));
        let c = concurrence(&rho).unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&c));
        let w = witness_value(&rho).unwrap();
        assert!(w <= 2.0 + 1e-12);
    }
}

#[test]
fn pure_bipartite_entropies_match() {
    // for a pure state both marginals share their spectrum
    let mut r = rng(12);
    for _ in 0..500 {
        let psi = haar_state(&mut r, &SP);
        let a = von_neumann_entropy(&reduced_density(&psi, &["S"]).unwrap(), EntropyBase::Bits);
        let b = von_neumann_entropy(&reduced_density(&psi, &["P"]).unwrap(), EntropyBase::Bits);
        assert!((a - b).abs() < 1e-10);
        // for pure states E_F equals the marginal entropy
        let ef = entanglement_of_formation(&psi.to_density(), EntropyBase::Bits).unwrap();
        assert!((ef - a).abs() < 1e-9, "{ef} {a}");
    }
}

#[test]
fn entropy_additive_on_products() {
    let mut r = rng(13);
    for _ in 0..500 {
        let a = random_mixture(&mut r, &[("A", 2)], 2);
        let b = random_mixture(&mut r, &[("B", 2)], 3);
        let ab = a.tensor(&b).unwrap();
        let lhs = von_neumann_entropy(&ab, EntropyBase::Nats);
        let rhs = von_neumann_entropy(&a, EntropyBase::Nats) + von_neumann_entropy(&b, EntropyBase::Nats);
        assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn concurrence_local_unitary_invariance() {
    let mut r = rng(14);
    for _ in 0..1000 {
        let rho = random_mixture(&mut r, &SP, 2);
        let u = random_local_unitary(&mut r).kronecker(&random_local_unitary(&mut r));
        let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint(), rho.labels().to_vec()).unwrap();
        let (a, b) = (concurrence(&rho).unwrap(), concurrence(&rotated).unwrap());
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }
}

#[test]
fn witness_on_separable_states() {
    let mut r = rng(15);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = tensor_state(&[qubit(&mut r, "S"), qubit(&mut r, "P")]).unwrap();
        let w = witness_value(&p.to_density()).unwrap();
        assert!(w <= 1.0 + 1e-9, "{w}");
        assert!(concurrence(&p.to_density()).unwrap() < 1e-7);
        worst = worst.max(w);
    }
    assert!(worst > 0.9, "sampling should approach the separable bound, got {worst}");
    for _ in 0..1000 {
        let states: Vec<StateVector> =
            (0..3).map(|_| tensor_state(&[qubit(&mut r, "S"), qubit(&mut r, "P")]).unwrap()).collect();
        let mix = DensityMatrix::mixture(&[0.2, 0.3, 0.5], &states).unwrap();
        assert!(witness_value(&mix).unwrap() <= 1.0 + 1e-9);
    }
}

#[test]
fn werner_concurrence_closed_form() {
    // p |Bell><Bell| + (1-p) I/4 has C = max(0, (3p - 1)/2)
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = StateVector::new(
        nalgebra::DVector::from_vec(vec![C64::from(s), C64::from(0.0), C64::from(0.0), C64::from(s)]),
        vec![Subsystem::new("S", 2), Subsystem::new("P", 2)],
    )
    .unwrap();
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let m = bell.to_density().matrix() * C64::from(p) + DMatrix::identity(4, 4) * C64::from((1.0 - p) / 4.0);
        let rho = DensityMatrix::new(m, bell.labels().to_vec()).unwrap();
        let c = concurrence(&rho).unwrap();
        assert!((c - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-12, "p={p}: {c}");
    }
}

proptest! {
    #[test]
    fn binary_entropy_symmetric(x in 0.0f64..1.0) {
        let a = binary_entropy(x, EntropyBase::Bits);
        let b = binary_entropy(1.0 - x, EntropyBase::Bits);
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&a));
        prop_assert!((binary_entropy(x, EntropyBase::Nats) - a * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn formation_monotone_in_concurrence(c in 0.0f64..0.999) {
        let a = formation_from_concurrence(c, EntropyBase::Bits);
        let b = formation_from_concurrence(c + 1e-3, EntropyBase::Bits);
        prop_assert!(b >= a);
    }

    #[test]
    fn tensor_then_reduce_round_trip(seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = haar_state(&mut r, &[("A", 2)]);
        let b = haar_state(&mut r, &[("B", 3)]);
        let ab = tensor_state(&[a.clone(), b.clone()]).unwrap();
        prop_assert!((ab.norm() - 1.0).abs() < 1e-12);
        let ra = reduced_density(&ab, &["A"]).unwrap();
        prop_assert!((ra.matrix() - a.to_density().matrix()).iter().all(|z| z.norm() < 1e-12));
        prop_assert!((ra.purity() - 1.0).abs() < 1e-12);
        let rb = reduced_density(&ab, &["B"]).unwrap();
        prop_assert!((rb.matrix() - b.to_density().matrix()).iter().all(|z| z.norm() < 1e-12));
    }
}
