//! Canonical pre/post-selected states for the modular-value Deutsch-Jozsa test.
//!
//! Throughout, `n` is the number of oracle input bits; states live on the
//! `n + 1` qubit oracle register `|x_1 ... x_n, y>` with the target `y` last.

use std::io::Write;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::modular_value;
use crate::oracle::{oracle_unitary, table1_balanced, BooleanFunction};
use crate::qcore::{u_gate, Complex, DenseOperator, Kron, Statevector, I, ONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateVariant {
    /// The three-qubit pair with the `1/sqrt(11)` post-selection.
    ThreeQubitExact,
    /// Structural generalization of the three-qubit post-selection to any `n`.
    GeneralN,
    /// Product-state post-selection used on hardware.
    IbmSimplified,
}

impl StateVariant {
    pub fn name(self) -> &'static str {
        match self {
            StateVariant::ThreeQubitExact => "exact-n2",
            StateVariant::GeneralN => "general",
            StateVariant::IbmSimplified => "ibm",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalStatePair {
    n: usize,
    psi_i: Statevector,
    psi_f: Statevector,
    variant: StateVariant,
}

impl CanonicalStatePair {
    pub fn three_qubit_exact() -> Self {
        Self {
            n: 2,
            psi_i: preselect(2).expect("n = 2 is valid"),
            psi_f: postselect_exact_n2(),
            variant: StateVariant::ThreeQubitExact,
        }
    }

    pub fn general(n: usize) -> Result<Self> {
        Ok(Self {
            n,
            psi_i: preselect(n)?,
            psi_f: postselect_general(n)?,
            variant: StateVariant::GeneralN,
        })
    }

    pub fn ibm() -> Self {
        Self {
            n: 2,
            psi_i: preselect(2).expect("n = 2 is valid"),
            psi_f: postselect_ibm(),
            variant: StateVariant::IbmSimplified,
        }
    }

    pub fn for_variant(variant: StateVariant, n: usize) -> Result<Self> {
        match variant {
            StateVariant::GeneralN => Self::general(n),
            fixed => {
                if n != 2 {
                    return Err(Error::InvalidConfig(format!(
                        "variant {} requires n = 2, got {n}",
                        fixed.name()
                    )));
                }
                Ok(match fixed {
                    StateVariant::ThreeQubitExact => Self::three_qubit_exact(),
                    _ => Self::ibm(),
                })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn psi_i(&self) -> &Statevector {
        &self.psi_i
    }
    pub fn psi_f(&self) -> &Statevector {
        &self.psi_f
    }
    pub fn variant(&self) -> StateVariant {
        self.variant
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewInputBits { min: 2, got: n });
    }
    Ok(())
}

/// Uniform superposition over inputs with the target in `|->`:
/// amplitude of `|x, y>` is `(-1)^y / sqrt(2^(n+1))`.
pub fn preselect(n: usize) -> Result<Statevector> {
    check_n(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = Statevector::from_real(&[h, h])?;
    let minus = Statevector::from_real(&[h, -h])?;
    let inputs = (1..n).fold(plus.clone(), |acc, _| acc.kron(&plus));
    Ok(inputs.kron(&minus))
}

/// Unnormalized coefficients of the post-selected state at the given `n`:
/// `-2i|0..0,0> + i|0..0,1>`, then `-i |x>(|0>-|1>)` for every non-zero
/// label with leading bit 0 and `+|x>(|0>-|1>)` for every label with
/// leading bit 1.
pub(crate) fn postselect_coefficients(n: usize) -> Vec<Complex> {
    let inputs = 1usize << n;
    let mut amps = vec![Complex::default(); 2 * inputs];
    amps[0] = -2.0 * I;
    amps[1] = I;
    for x in 1..inputs {
        let weight = if x < inputs / 2 { -I } else { ONE };
        amps[2 * x] += weight;
        amps[2 * x + 1] -= weight;
    }
    amps
}

pub fn postselect_exact_n2() -> Statevector {
    let s = 11f64.sqrt();
    let c = |re: f64, im: f64| Complex::new(re / s, im / s);
    // |000> |001> |010> |011> |100> |101> |110> |111>
    Statevector::new(vec![
        c(0.0, -2.0),
        c(0.0, 1.0),
        c(0.0, -1.0),
        c(0.0, 1.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
    ])
    .expect("norm is 11/11")
}

pub fn postselect_general(n: usize) -> Result<Statevector> {
    check_n(n)?;
    Statevector::normalized(postselect_coefficients(n))
}

/// Closed-form post-selection probability
/// `(2^(2k-1) + 2^k + 1) / (2^(2k) + 3 * 2^k)`.
///
/// `k` counts every qubit of the oracle register, so the constructed
/// [`postselect_general`]`(n)` state has overlap `predicted_p(n + 1)`.
pub fn predicted_p(k: u32) -> Ratio<u128> {
    assert!((2..=60).contains(&k), "k out of range");
    let p = 1u128 << k;
    Ratio::new(p * p / 2 + p + 1, p * p + 3 * p)
}

/// `(|0> + i|1>)/sqrt2 (x) (|0> + |1>)/sqrt2 (x) (|0> - |1>)/sqrt2`.
pub fn postselect_ibm() -> Statevector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = Statevector::new(vec![Complex::new(h, 0.0), Complex::new(0.0, h)]).unwrap();
    let b = Statevector::from_real(&[h, h]).unwrap();
    let c = Statevector::from_real(&[h, -h]).unwrap();
    a.kron(&b).kron(&c)
}

/// Single-qubit `U(theta, phi, lambda)` parameters, one per register qubit,
/// whose product sends [`postselect_ibm`] to `|000>`.
pub const IBM_POSTSELECT_GATES: [(f64, f64, f64); 3] = [
    (std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::FRAC_PI_2),
    (std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::PI),
    (std::f64::consts::FRAC_PI_2, 0.0, 0.0),
];

pub fn ibm_postselect_map() -> DenseOperator {
    let gates: Vec<_> = IBM_POSTSELECT_GATES
        .iter()
        .map(|&(t, p, l)| u_gate(t, p, l))
        .collect();
    crate::qcore::kron_all(&gates)
}

/// Exact Table 2 entries: `(function, Re * 41, Im * 41)`.
pub const TABLE2_EXPECTED: [(&str, i64, i64); 6] = [
    ("0011", 9, 40),
    ("0101", 5, 4),
    ("0110", 5, 4),
    ("1100", -9, -40),
    ("1010", -5, -4),
    ("1001", -5, -4),
];

pub fn table2_expected() -> Vec<(BooleanFunction, Ratio<i64>, Ratio<i64>)> {
    TABLE2_EXPECTED
        .iter()
        .map(|&(f, re, im)| {
            (
                f.parse().expect("valid literal"),
                Ratio::new(re, 41),
                Ratio::new(im, 41),
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table2Row {
    pub f: BooleanFunction,
    pub o_m: Complex,
}

impl Table2Row {
    pub fn re(&self) -> f64 {
        self.o_m.re
    }
    pub fn im(&self) -> f64 {
        self.o_m.im
    }
}

/// Modular values of the six balanced two-bit functions, in table order.
pub fn table2(pair: &CanonicalStatePair) -> Result<Vec<Table2Row>> {
    if pair.variant != StateVariant::ThreeQubitExact {
        return Err(Error::WrongVariant {
            expected: StateVariant::ThreeQubitExact.name(),
            found: pair.variant.name(),
        });
    }
    balanced_rows(pair, &table1_balanced())
}

/// Modular values for arbitrary functions under any pair.
pub fn balanced_rows(
    pair: &CanonicalStatePair,
    functions: &[BooleanFunction],
) -> Result<Vec<Table2Row>> {
    functions
        .iter()
        .map(|f| {
            if f.input_bits() != pair.n {
                return Err(Error::DimensionMismatch {
                    expected: pair.n,
                    found: f.input_bits(),
                });
            }
            let o_m = modular_value(&pair.psi_i, &pair.psi_f, &oracle_unitary(f))?;
            Ok(Table2Row { f: f.clone(), o_m })
        })
        .collect()
}

/// Writes rows as CSV with one column per truth-table entry.
pub fn write_rows_csv<W: Write>(mut out: W, rows: &[Table2Row]) -> Result<()> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let k = first.f.input_bits();
    let labels: Vec<String> = (0..1usize << k).map(|x| format!("f{x:0k$b}")).collect();
    writeln!(out, "{},om_re,om_im", labels.join(","))?;
    for row in rows {
        let bits: Vec<String> = row.f.table().iter().map(u8::to_string).collect();
        writeln!(out, "{},{:.17e},{:.17e}", bits.join(","), row.o_m.re, row.o_m.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::postselection_probability;

    #[test]
    fn preselect_n2_amplitudes() {
        let s = preselect(2).unwrap();
        let a = 1.0 / 8f64.sqrt();
        for (i, amp) in s.amplitudes().iter().enumerate() {
            let sign = if i & 1 == 0 { 1.0 } else { -1.0 };
            assert!((amp - Complex::new(sign * a, 0.0)).norm() < 1e-15);
        }
        for cut in 1..3 {
            assert_eq!(s.schmidt_rank(cut), 1);
        }
    }

    #[test]
    fn preselect_n3_amplitudes() {
        let s = preselect(3).unwrap();
        assert_eq!(s.dim(), 16);
        for (i, amp) in s.amplitudes().iter().enumerate() {
            let sign = if i & 1 == 0 { 0.25 } else { -0.25 };
            assert!((amp.re - sign).abs() < 1e-15 && amp.im == 0.0);
        }
    }

    #[test]
    fn too_small_n_rejected() {
        assert!(matches!(preselect(1), Err(Error::TooFewInputBits { .. })));
        assert!(postselect_general(1).is_err());
    }

    #[test]
    fn exact_amplitudes() {
        let s = postselect_exact_n2();
        let r = 11f64.sqrt();
        assert!((s.amplitude(0b000) - Complex::new(0.0, -2.0 / r)).norm() < 1e-15);
        assert!((s.amplitude(0b111) - Complex::new(-1.0 / r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_overlap_is_41_over_88() {
        let p = postselection_probability(&preselect(2).unwrap(), &postselect_exact_n2()).unwrap();
        assert!((p - 41.0 / 88.0).abs() < 1e-15);
    }

    #[test]
    fn general_reduces_to_exact() {
        let g = postselect_general(2).unwrap();
        assert!(g.approx_eq(&postselect_exact_n2(), 1e-12));
        let norm2: f64 = postselect_coefficients(2).iter().map(|a| a.norm_sqr()).sum();
        assert!((norm2 - 11.0).abs() < 1e-12);
    }

    #[test]
    fn predicted_p_values() {
        assert_eq!(predicted_p(2), Ratio::new(13, 28));
        assert_eq!(predicted_p(3), Ratio::new(41, 88));
        let mut last = 0.0;
        for k in 2..40 {
            let v = *predicted_p(k).numer() as f64 / *predicted_p(k).denom() as f64;
            assert!(v > last && v < 0.5);
            last = v;
        }
        assert!((last - 0.5).abs() < 1e-9);
    }

    #[test]
    fn ibm_state_is_product_with_half_overlap() {
        let s = postselect_ibm();
        assert_eq!(s.schmidt_rank(1), 1);
        assert_eq!(s.schmidt_rank(2), 1);
        let p = postselection_probability(&preselect(2).unwrap(), &s).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let r = 8f64.sqrt();
        assert!((s.amplitude(0b100) - Complex::new(0.0, 1.0 / r)).norm() < 1e-15);
        assert!((s.amplitude(0b101) - Complex::new(0.0, -1.0 / r)).norm() < 1e-15);
    }

    #[test]
    fn ibm_map_sends_post_state_to_zero() {
        let m = ibm_postselect_map();
        assert!(m.is_unitary(1e-10));
        let out = m.apply(&postselect_ibm()).unwrap();
        assert!(out.approx_eq_up_to_phase(&Statevector::zero(3), 1e-12));
    }

    #[test]
    fn ibm_modular_values() {
        let pair = CanonicalStatePair::ibm();
        let bal: BooleanFunction = "0011".parse().unwrap();
        let o = modular_value(pair.psi_i(), pair.psi_f(), &oracle_unitary(&bal)).unwrap();
        assert!((o - I).norm() < 1e-12);
        let zero = BooleanFunction::constant(2, false);
        let o = modular_value(pair.psi_i(), pair.psi_f(), &oracle_unitary(&zero)).unwrap();
        assert!((o - ONE).norm() < 1e-12);
    }

    #[test]
    fn table2_requires_exact_variant() {
        assert!(matches!(
            table2(&CanonicalStatePair::ibm()),
            Err(Error::WrongVariant { .. })
        ));
    }

    #[test]
    fn table2_rows() {
        let rows = table2(&CanonicalStatePair::three_qubit_exact()).unwrap();
        let first = &rows[0];
        let expected = (Complex::new(-4.0, 5.0)) / Complex::new(4.0, 5.0);
        assert!((first.o_m - expected).norm() < 1e-12);
        assert!((rows[3].re() + 9.0 / 41.0).abs() < 1e-12);
        assert!((rows[3].im() + 40.0 / 41.0).abs() < 1e-12);
        assert!((rows[5].re() + 5.0 / 41.0).abs() < 1e-12);
        assert!((rows[5].im() + 4.0 / 41.0).abs() < 1e-12);
    }

    #[test]
    fn csv_header() {
        let rows = table2(&CanonicalStatePair::three_qubit_exact()).unwrap();
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "f00,f01,f10,f11,om_re,om_im");
        assert!(lines.next().unwrap().starts_with("0,0,1,1,2.19512195"));
        assert_eq!(text.lines().count(), 7);
    }
}
