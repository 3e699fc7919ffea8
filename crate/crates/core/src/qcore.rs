//! Dense complex linear algebra for registers of a few qubits.
//!
//! Basis convention: qubit 0 is the most significant bit of a basis index, so
//! `|x_1 x_2 ... x_k>` lives at index `sum_j x_j * 2^(k-j)`. Wherever a meter
//! (ancilla) qubit is present it is tensor factor 0.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Tolerance for structural checks (unitarity, normalization, idempotence).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for scalar comparisons and unit-vector validation.
pub const SCALAR_TOL: f64 = 1e-12;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Tensor product.
pub trait Kron {
    fn kron(&self, rhs: &Self) -> Self;
}

pub fn kron<T: Kron>(a: &T, b: &T) -> T {
    a.kron(b)
}

/// Amplitude vector over `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex>,
}

impl Statevector {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<Complex>) -> Result<Self> {
        let s = Self::from_amplitudes(amplitudes)?;
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amplitudes: Vec<Complex>) -> Result<Self> {
        let mut s = Self::from_amplitudes(amplitudes)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        s.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(s)
    }

    /// Builds a vector without any norm check. Used for intermediate,
    /// possibly projected, vectors.
    pub fn from_amplitudes(amplitudes: Vec<Complex>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex::new(a, 0.0)).collect())
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1 && index < 1 << num_qubits);
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when the states agree up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &Statevector, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let overlap = match self.inner(other) {
            Ok(o) => o,
            Err(_) => return false,
        };
        if overlap.norm() < tol {
            return self.norm_sqr() < tol && other.norm_sqr() < tol;
        }
        let phase = overlap / overlap.norm();
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }

    pub fn approx_eq(&self, other: &Statevector, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Rank of the coefficient matrix across the cut after the first
    /// `left_qubits` qubits. A product state has rank 1 across every cut.
    pub fn schmidt_rank(&self, left_qubits: usize) -> usize {
        assert!(left_qubits > 0 && left_qubits < self.num_qubits);
        let rows = 1 << left_qubits;
        let cols = self.dim() / rows;
        let mut m: Vec<Vec<Complex>> = (0..rows)
            .map(|r| self.amplitudes[r * cols..(r + 1) * cols].to_vec())
            .collect();
        matrix_rank(&mut m, STRUCTURAL_TOL)
    }
}

fn matrix_rank(m: &mut [Vec<Complex>], tol: f64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        if m[pivot][col].norm() <= tol {
            continue;
        }
        m.swap(rank, pivot);
        let (top, below) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in below {
            let factor = row[col] / pivot_row[col];
            for (x, v) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * v;
            }
        }
        rank += 1;
    }
    rank
}

impl Kron for Statevector {
    fn kron(&self, rhs: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| rhs.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self {
            num_qubits: self.num_qubits + rhs.num_qubits,
            amplitudes,
        }
    }
}

impl fmt::Display for Statevector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.num_qubits;
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() < SCALAR_TOL {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{:0width$b}>", a.re, a.im, i)?;
        }
        Ok(())
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex>,
}

impl DenseOperator {
    pub fn new(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        qubits_for_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex; N]; N]) -> Self {
        Self::new(N, rows.into_iter().flatten().collect()).expect("N is a power of two")
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    /// Permutation matrix sending basis state `j` to `image(j)`.
    pub fn permutation(dim: usize, image: impl Fn(usize) -> usize) -> Self {
        let mut op = Self::zeros(dim);
        for col in 0..dim {
            op.entries[image(col) * dim + col] = ONE;
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Self { dim: d, entries }
    }

    pub fn matmul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(rhs.dim)?;
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        Ok(Self { dim: d, entries })
    }

    pub fn apply(&self, state: &Statevector) -> Result<Statevector> {
        self.check_dim(state.dim())?;
        let amplitudes = self
            .entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(state.amplitudes()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Statevector {
            num_qubits: state.num_qubits(),
            amplitudes,
        })
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn approx_eq(&self, other: &DenseOperator, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `U^dagger U = I` elementwise within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint()
            .matmul(self)
            .map(|p| p.approx_eq(&Self::identity(self.dim), tol))
            .unwrap_or(false)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Kron for DenseOperator {
    fn kron(&self, rhs: &Self) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let d = da * db;
        let mut entries = vec![ZERO; d * d];
        for ar in 0..da {
            for ac in 0..da {
                let a = self.entries[ar * da + ac];
                if a == ZERO {
                    continue;
                }
                for br in 0..db {
                    for bc in 0..db {
                        entries[(ar * db + br) * d + ac * db + bc] = a * rhs.entries[br * db + bc];
                    }
                }
            }
        }
        Self { dim: d, entries }
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: Self) -> DenseOperator {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: Self) -> DenseOperator {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: Self) -> DenseOperator {
        self.matmul(rhs).expect("operator dimension mismatch")
    }
}

/// Applies `op` to `state`.
pub fn apply(op: &DenseOperator, state: &Statevector) -> Result<Statevector> {
    op.apply(state)
}

/// `<a|b>`.
pub fn inner(a: &Statevector, b: &Statevector) -> Result<Complex> {
    a.inner(b)
}

pub fn pauli_x() -> DenseOperator {
    DenseOperator::from_rows([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> DenseOperator {
    DenseOperator::from_rows([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> DenseOperator {
    DenseOperator::from_rows([[ONE, ZERO], [ZERO, -ONE]])
}

pub fn hadamard() -> DenseOperator {
    let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DenseOperator::from_rows([[h, h], [h, -h]])
}

/// Generic single-qubit rotation
/// `[[cos(t/2), -e^{i lambda} sin(t/2)], [e^{i phi} sin(t/2), e^{i(phi+lambda)} cos(t/2)]]`.
pub fn u_gate(theta: f64, phi: f64, lambda: f64) -> DenseOperator {
    let (s, c) = (theta / 2.0).sin_cos();
    DenseOperator::from_rows([
        [Complex::new(c, 0.0), -Complex::from_polar(s, lambda)],
        [Complex::from_polar(s, phi), Complex::from_polar(c, phi + lambda)],
    ])
}

/// Kronecker product of a sequence of operators, first element leftmost.
pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a DenseOperator>) -> DenseOperator {
    ops.into_iter()
        .fold(None, |acc: Option<DenseOperator>, op| {
            Some(match acc {
                None => op.clone(),
                Some(a) => a.kron(op),
            })
        })
        .expect("at least one operator")
}

/// Unit vector on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub const PLUS_X: Self = Self::axis(1.0, 0.0, 0.0);
    pub const PLUS_Y: Self = Self::axis(0.0, 1.0, 0.0);
    pub const PLUS_Z: Self = Self::axis(0.0, 0.0, 1.0);

    const fn axis(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Rejects vectors whose squared length differs from 1 by more than
    /// [`SCALAR_TOL`]. Vectors are never silently renormalized.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > SCALAR_TOL {
            return Err(Error::NotUnitVector(n2));
        }
        Ok(Self { x, y, z })
    }

    /// Scales an arbitrary non-zero vector onto the sphere.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Cross product; the result is generally not a unit vector.
    pub fn cross(&self, o: &BlochVector) -> [f64; 3] {
        [
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        ]
    }

    /// `v . sigma`.
    pub fn sigma(&self) -> DenseOperator {
        let x = Complex::new(self.x, 0.0);
        let z = Complex::new(self.z, 0.0);
        let y = I * self.y;
        DenseOperator::from_rows([[z, x - y], [x + y, -z]])
    }

    /// Pure state whose projector is `(I + v.sigma)/2`.
    pub fn ket(&self) -> Statevector {
        let theta = self.z.clamp(-1.0, 1.0).acos();
        let phi = self.y.atan2(self.x);
        let (s, c) = (theta / 2.0).sin_cos();
        Statevector {
            num_qubits: 1,
            amplitudes: vec![Complex::new(c, 0.0), Complex::from_polar(s, phi)],
        }
    }

    /// Unitary sending the `+v` eigenstate to `|0>` and `-v` to `|1>`.
    pub fn readout_rotation(&self) -> DenseOperator {
        let plus = self.ket();
        let minus = (-*self).ket();
        let (p, m) = (plus.amplitudes(), minus.amplitudes());
        DenseOperator::from_rows([[p[0].conj(), p[1].conj()], [m[0].conj(), m[1].conj()]])
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        [v.x, v.y, v.z]
    }
}

/// `(I + v.sigma)/2`.
pub fn projector_from_bloch(v: &BlochVector) -> DenseOperator {
    let id = DenseOperator::identity(2);
    (&id + &v.sigma()).scale(Complex::new(0.5, 0.0))
}

/// `Pi_{+q} - Pi_{-q}`.
pub fn spin_observable(q: &BlochVector) -> DenseOperator {
    &projector_from_bloch(q) - &projector_from_bloch(&-*q)
}

/// `Pi_r (x) I + Pi_{-r} (x) U`, with the control qubit as tensor factor 0.
pub fn controlled_gate(r: &BlochVector, oracle: &DenseOperator) -> Result<DenseOperator> {
    if !oracle.is_unitary(STRUCTURAL_TOL) {
        return Err(Error::NotUnitary);
    }
    let id = DenseOperator::identity(oracle.dim());
    let idle = projector_from_bloch(r).kron(&id);
    let active = projector_from_bloch(&-*r).kron(oracle);
    Ok(&idle + &active)
}
