//! Modular values of an oracle and the meter statistics they induce.
//!
//! With meter directions `m` (initial state), `r` (control projector) and `q`
//! (readout), and `r . q = 0`, the joint probabilities of post-selecting
//! `psi_f` and reading `+-q` are
//!
//! ```text
//! P(+-q) = 1/4 { (1 + r.m) |<f|i>|^2 + (1 - r.m) |<f|U|i>|^2
//!               +- 2 (m.q) Re(<f|U|i><i|f>)
//!               +- 2 ((r x m).q) Im(<f|U|i><i|f>) }
//! ```
//!
//! and the conditional meter spin is
//! `2 [(m.q) Re O + ((r x m).q) Im O] / [(1 + r.m) + (1 - r.m)|O|^2]`
//! where `O = <f|U|i> / <f|i>` is the modular value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{BlochVector, Complex, DenseOperator, Statevector, SCALAR_TOL, STRUCTURAL_TOL};

/// Below this `|<psi_f|psi_i>|` the modular value is reported as undefined.
pub const ORTHOGONALITY_CUTOFF: f64 = 1e-12;
/// Negative joint probabilities down to `-NEGATIVE_CLAMP` are treated as roundoff.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Meter directions. Construction enforces the eraser condition `r . q = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeter")]
pub struct MeterConfig {
    m: BlochVector,
    r: BlochVector,
    q: BlochVector,
}

#[derive(Deserialize)]
struct RawMeter {
    m: BlochVector,
    r: BlochVector,
    q: BlochVector,
}

impl TryFrom<RawMeter> for MeterConfig {
    type Error = Error;
    fn try_from(raw: RawMeter) -> Result<Self> {
        Self::new(raw.m, raw.r, raw.q)
    }
}

impl MeterConfig {
    pub fn new(m: BlochVector, r: BlochVector, q: BlochVector) -> Result<Self> {
        let rq = r.dot(&q);
        if rq.abs() > STRUCTURAL_TOL {
            return Err(Error::EraserViolated(rq));
        }
        Ok(Self { m, r, q })
    }

    /// `m = +z`, `r = +x`, `q = +y`: the spin reads `-Im(O)` only.
    pub fn ibm() -> Self {
        Self {
            m: BlochVector::PLUS_Z,
            r: BlochVector::PLUS_X,
            q: BlochVector::PLUS_Y,
        }
    }

    pub fn m(&self) -> BlochVector {
        self.m
    }
    pub fn r(&self) -> BlochVector {
        self.r
    }
    pub fn q(&self) -> BlochVector {
        self.q
    }

    fn coefficients(&self) -> MeterCoefficients {
        let rxm = self.r.cross(&self.m);
        let q = [self.q.x(), self.q.y(), self.q.z()];
        MeterCoefficients {
            rm: self.r.dot(&self.m),
            mq: self.m.dot(&self.q),
            rxm_q: rxm.iter().zip(q).map(|(a, b)| a * b).sum(),
        }
    }
}

struct MeterCoefficients {
    rm: f64,
    mq: f64,
    rxm_q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularValueReport {
    pub o_m_re: f64,
    pub o_m_im: f64,
    pub p_postselect: f64,
    pub p_joint_plus: f64,
    pub p_joint_minus: f64,
    pub expected_spin: f64,
    pub visibility: f64,
}

impl ModularValueReport {
    pub fn o_m(&self) -> Complex {
        Complex::new(self.o_m_re, self.o_m_im)
    }
}

/// `(<f|i>, <f|U|i>)`.
fn overlaps(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle_u: &DenseOperator,
) -> Result<(Complex, Complex)> {
    let denom = psi_f.inner(psi_i)?;
    let numer = psi_f.inner(&oracle_u.apply(psi_i)?)?;
    Ok((denom, numer))
}

/// `<f|U|i> / <f|i>`.
pub fn modular_value(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle_u: &DenseOperator,
) -> Result<Complex> {
    modular_value_with_cutoff(psi_i, psi_f, oracle_u, ORTHOGONALITY_CUTOFF)
}

pub fn modular_value_with_cutoff(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle_u: &DenseOperator,
    cutoff: f64,
) -> Result<Complex> {
    let (denom, numer) = overlaps(psi_i, psi_f, oracle_u)?;
    if denom.norm() <= cutoff {
        return Err(Error::OrthogonalPrePost(denom.norm()));
    }
    Ok(numer / denom)
}

fn clamp_probability(p: f64) -> Result<f64> {
    if p < -NEGATIVE_CLAMP {
        return Err(Error::NegativeProbability(p));
    }
    Ok(p.max(0.0))
}

/// Joint probabilities `(P(+q), P(-q))` of post-selecting `psi_f` and
/// reading the meter along `+-q`.
pub fn joint_probabilities(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle_u: &DenseOperator,
    cfg: &MeterConfig,
) -> Result<(f64, f64)> {
    let (denom, numer) = overlaps(psi_i, psi_f, oracle_u)?;
    let k = cfg.coefficients();
    let cross = numer * denom.conj();
    let common = (1.0 + k.rm) * denom.norm_sqr() + (1.0 - k.rm) * numer.norm_sqr();
    let signed = 2.0 * k.mq * cross.re + 2.0 * k.rxm_q * cross.im;
    Ok((
        clamp_probability(0.25 * (common + signed))?,
        clamp_probability(0.25 * (common - signed))?,
    ))
}

/// Conditional mean of the meter spin along `q`, from the modular value.
pub fn expected_spin(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle_u: &DenseOperator,
    cfg: &MeterConfig,
) -> Result<f64> {
    let (plus, minus) = joint_probabilities(psi_i, psi_f, oracle_u, cfg)?;
    if plus + minus <= SCALAR_TOL {
        return Err(Error::ZeroPostselection);
    }
    let o = modular_value(psi_i, psi_f, oracle_u)?;
    let spin = spin_from_modular_value(o, cfg);
    debug_assert!(
        (spin - (plus - minus) / (plus + minus)).abs() <= STRUCTURAL_TOL,
        "closed form and joint-probability ratio disagree"
    );
    Ok(spin)
}

/// The closed-form meter spin for a known modular value.
pub fn spin_from_modular_value(o: Complex, cfg: &MeterConfig) -> f64 {
    let k = cfg.coefficients();
    let num = 2.0 * (k.mq * o.re + k.rxm_q * o.im);
    let den = (1.0 + k.rm) + (1.0 - k.rm) * o.norm_sqr();
    num / den
}

/// Spin estimate from the two joint probabilities.
pub fn spin_from_joint(p_plus: f64, p_minus: f64) -> Result<f64> {
    let total = p_plus + p_minus;
    if total <= SCALAR_TOL {
        return Err(Error::ZeroPostselection);
    }
    Ok((p_plus - p_minus) / total)
}

/// `|<psi_f|psi_i>|^2`.
pub fn postselection_probability(psi_i: &Statevector, psi_f: &Statevector) -> Result<f64> {
    Ok(psi_f.inner(psi_i)?.norm_sqr().min(1.0))
}

/// `(P_max - P_min) / (P_max + P_min)`.
pub fn visibility(p_plus: f64, p_minus: f64) -> Result<f64> {
    let total = p_plus + p_minus;
    if total <= SCALAR_TOL || p_plus < 0.0 || p_minus < 0.0 {
        return Err(Error::ZeroPostselection);
    }
    Ok((p_plus.max(p_minus) - p_plus.min(p_minus)) / total)
}

/// Meter spin for the `m = z, r = x, q = y` configuration.
pub fn eraser_spin(o_m: Complex) -> f64 {
    -2.0 * o_m.im / (1.0 + o_m.norm_sqr())
}

/// Visibility for the `m = z, r = x, q = y` configuration.
pub fn eraser_visibility(o_m: Complex) -> f64 {
    2.0 * o_m.im.abs() / (1.0 + o_m.im * o_m.im + o_m.re * o_m.re)
}

/// Normalized meter state proportional to `alpha|0> + beta O_m |1>`.
pub fn final_meter_state(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle_u: &DenseOperator,
    alpha: Complex,
    beta: Complex,
) -> Result<Statevector> {
    let weight = alpha.norm_sqr() + beta.norm_sqr();
    if (weight - 1.0).abs() > STRUCTURAL_TOL {
        return Err(Error::NotNormalized(weight));
    }
    let o = modular_value(psi_i, psi_f, oracle_u)?;
    Statevector::normalized(vec![alpha, beta * o])
}

/// Every derived quantity for one (states, oracle, meter) configuration.
pub fn report(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle_u: &DenseOperator,
    cfg: &MeterConfig,
) -> Result<ModularValueReport> {
    let o = modular_value(psi_i, psi_f, oracle_u)?;
    let (p_joint_plus, p_joint_minus) = joint_probabilities(psi_i, psi_f, oracle_u, cfg)?;
    Ok(ModularValueReport {
        o_m_re: o.re,
        o_m_im: o.im,
        p_postselect: postselection_probability(psi_i, psi_f)?,
        p_joint_plus,
        p_joint_minus,
        expected_spin: expected_spin(psi_i, psi_f, oracle_u, cfg)?,
        visibility: visibility(p_joint_plus, p_joint_minus)?,
    })
}
