mod common;

use modval::djstates::{table2, CanonicalStatePair};
use modval::modular::{
    eraser_spin, expected_spin, joint_probabilities, modular_value, spin_from_joint,
    spin_from_modular_value, MeterConfig,
};
use modval::oracle::{oracle_unitary, BooleanFunction};
use modval::qcore::{controlled_gate, projector_from_bloch, spin_observable, STRUCTURAL_TOL};
use modval::{BlochVector, Complex, DenseOperator, Kron, Statevector};
use proptest::prelude::*;

fn bloch() -> impl Strategy<Value = BlochVector> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(t, p)| {
        BlochVector::normalize(t.sin() * p.cos(), t.sin() * p.sin(), t.cos()).unwrap()
    })
}

fn state(dim: usize) -> impl Strategy<Value = Statevector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_filter_map("zero vector", |v| {
            Statevector::normalized(v.into_iter().map(|(a, b)| Complex::new(a, b)).collect()).ok()
        })
}

fn op(dim: usize) -> impl Strategy<Value = DenseOperator> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        DenseOperator::new(dim, v.into_iter().map(|(a, b)| Complex::new(a, b)).collect()).unwrap()
    })
}

fn truth_table(bits: usize) -> impl Strategy<Value = BooleanFunction> {
    prop::collection::vec(0..2u8, 1 << bits).prop_map(|t| BooleanFunction::new(t).unwrap())
}

/// `q` orthogonal to `r`, obtained by projecting out the `r` component.
fn eraser_meter() -> impl Strategy<Value = MeterConfig> {
    (bloch(), bloch(), bloch()).prop_filter_map("degenerate q", |(m, r, t)| {
        let d = t.dot(&r);
        let q = BlochVector::normalize(t.x() - d * r.x(), t.y() - d * r.y(), t.z() - d * r.z()).ok()?;
        MeterConfig::new(m, r, q).ok()
    })
}

proptest! {
    #[test]
    fn projectors_are_idempotent_and_complementary(v in bloch()) {
        let p = projector_from_bloch(&v);
        let pm = projector_from_bloch(&-v);
        prop_assert!(p.matmul(&p).unwrap().approx_eq(&p, STRUCTURAL_TOL));
        prop_assert!((&p + &pm).approx_eq(&DenseOperator::identity(2), STRUCTURAL_TOL));
        prop_assert!(p.is_hermitian(STRUCTURAL_TOL));
    }

    #[test]
    fn spin_observable_squares_to_identity(q in bloch()) {
        let s = spin_observable(&q);
        prop_assert!(s.matmul(&s).unwrap().approx_eq(&DenseOperator::identity(2), STRUCTURAL_TOL));
    }

    #[test]
    fn controlled_oracle_is_unitary(r in bloch(), f in truth_table(2)) {
        let g = controlled_gate(&r, &oracle_unitary(&f)).unwrap();
        prop_assert!(g.is_unitary(STRUCTURAL_TOL));
        prop_assert_eq!(g.dim(), 16);
    }

    #[test]
    fn kron_is_associative(a in op(2), b in op(2), c in op(2)) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(left.approx_eq(&right, STRUCTURAL_TOL));
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(a in state(8), b in state(8)) {
        let ab = a.inner(&b).unwrap();
        let ba = b.inner(&a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= STRUCTURAL_TOL);
    }

    #[test]
    fn joint_probabilities_match_projection(
        psi_i in state(8), psi_f in state(8), f in truth_table(2), cfg in eraser_meter()
    ) {
        let u = oracle_unitary(&f);
        let (bp, bm) = common::joint_bruteforce(&psi_i, &psi_f, &u, &cfg);
        let (cp, cm) = joint_probabilities(&psi_i, &psi_f, &u, &cfg).unwrap();
        prop_assert!((bp - cp).abs() <= 1e-10 && (bm - cm).abs() <= 1e-10);
        prop_assume!(bp + bm > 1e-9 && psi_f.inner(&psi_i).unwrap().norm() > 1e-6);
        let o = modular_value(&psi_i, &psi_f, &u).unwrap();
        let ratio = spin_from_joint(bp, bm).unwrap();
        prop_assert!((spin_from_modular_value(o, &cfg) - ratio).abs() <= 1e-8);
    }

    #[test]
    fn spin_numerator_ignores_imaginary_part_when_cross_term_vanishes(
        re in -3.0..3.0f64, im1 in -3.0..3.0f64, im2 in -3.0..3.0f64, phi in 0.0..std::f64::consts::TAU
    ) {
        // r = x and m in the x-y plane make (r x m).q vanish for q = y.
        let m = BlochVector::new(phi.cos(), phi.sin(), 0.0).unwrap();
        let cfg = MeterConfig::new(m, BlochVector::PLUS_X, BlochVector::PLUS_Y).unwrap();
        let s1 = spin_from_modular_value(Complex::new(re, im1), &cfg);
        let s2 = spin_from_modular_value(Complex::new(re, im2), &cfg);
        let d1 = (1.0 + phi.cos()) + (1.0 - phi.cos()) * (re * re + im1 * im1);
        let d2 = (1.0 + phi.cos()) + (1.0 - phi.cos()) * (re * re + im2 * im2);
        prop_assert!((s1 * d1 - s2 * d2).abs() <= 1e-9);
        prop_assert!((s1 * d1 - 2.0 * phi.sin() * re).abs() <= 1e-9);
    }

    #[test]
    fn eraser_spin_depends_on_real_part_only_through_magnitude(
        re in -3.0..3.0f64, im in -3.0..3.0f64
    ) {
        let cfg = MeterConfig::ibm();
        let o = Complex::new(re, im);
        let s = spin_from_modular_value(o, &cfg);
        prop_assert!((s - eraser_spin(o)).abs() <= 1e-12);
        prop_assert!((s - eraser_spin(Complex::new(-re, im))).abs() <= 1e-12);
        prop_assert!((s * (1.0 + o.norm_sqr()) + 2.0 * im).abs() <= 1e-9);
    }

    #[test]
    fn modular_value_is_phase_invariant(
        psi_i in state(8), psi_f in state(8), f in truth_table(2),
        a in 0.0..std::f64::consts::TAU, b in 0.0..std::f64::consts::TAU
    ) {
        prop_assume!(psi_f.inner(&psi_i).unwrap().norm() > 1e-3);
        let u = oracle_unitary(&f);
        let o = modular_value(&psi_i, &psi_f, &u).unwrap();
        let rotate = |s: &Statevector, t: f64| {
            Statevector::from_amplitudes(s.amplitudes().iter().map(|z| z * Complex::from_polar(1.0, t)).collect()).unwrap()
        };
        let o2 = modular_value(&rotate(&psi_i, a), &rotate(&psi_f, b), &u).unwrap();
        prop_assert!((o - o2).norm() <= 1e-9 * (1.0 + o.norm()));
    }
}

#[test]
fn complementary_functions_negate_the_modular_value() {
    let pair = CanonicalStatePair::three_qubit_exact();
    let rows = table2(&pair).unwrap();
    for row in &rows {
        let comp = rows.iter().find(|r| r.f == row.f.complement()).unwrap();
        assert!((row.o_m + comp.o_m).norm() <= 1e-12);
    }
}

#[test]
fn eraser_violation_is_rejected() {
    let q = BlochVector::normalize(1.0, 1.0, 0.0).unwrap();
    assert!(MeterConfig::new(BlochVector::PLUS_Z, BlochVector::PLUS_X, q).is_err());
}

#[test]
fn expected_spin_for_constants_is_zero_under_the_eraser_meter() {
    let pair = CanonicalStatePair::ibm();
    let cfg = MeterConfig::ibm();
    for bits in ["0000", "1111"] {
        let u = oracle_unitary(&bits.parse().unwrap());
        assert!(expected_spin(pair.psi_i(), pair.psi_f(), &u, &cfg).unwrap().abs() <= 1e-12);
    }
}
