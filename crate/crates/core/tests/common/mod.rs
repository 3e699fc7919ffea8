//! Test-only reference computations. Nothing here calls the library's
//! projector, gate, or joint-probability code; only plain complex arithmetic.
#![allow(dead_code)]

use modval::modular::MeterConfig;
use modval::{BlochVector, Complex, DenseOperator, Statevector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<Complex>>;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// `(I + s * v.sigma) / 2` written out entrywise.
pub fn projector(v: [f64; 3], s: f64) -> Mat {
    let [x, y, z] = v;
    vec![
        vec![c(0.5 * (1.0 + s * z), 0.0), c(0.5 * s * x, -0.5 * s * y)],
        vec![c(0.5 * s * x, 0.5 * s * y), c(0.5 * (1.0 - s * z), 0.0)],
    ]
}

fn to_mat(op: &DenseOperator) -> Mat {
    let d = op.dim();
    (0..d).map(|r| (0..d).map(|col| op.get(r, col)).collect()).collect()
}

/// Normalized column of a rank-one projector.
pub fn ket_of(p: &Mat) -> Vec<Complex> {
    let col = if p[0][0].norm() >= p[1][1].norm() { 0 } else { 1 };
    let v = vec![p[0][col], p[1][col]];
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

pub fn axis(v: &BlochVector) -> [f64; 3] {
    [v.x(), v.y(), v.z()]
}

/// Brute-force joint probabilities: evolve `|m> (x) psi_i` under the
/// block-assembled controlled gate, then take the squared norm of the
/// projection onto `psi_f` and meter `+-q`.
pub fn joint_bruteforce(
    psi_i: &Statevector,
    psi_f: &Statevector,
    oracle: &DenseOperator,
    cfg: &MeterConfig,
) -> (f64, f64) {
    let d = psi_i.dim();
    let u = to_mat(oracle);
    let m = ket_of(&projector(axis(&cfg.m()), 1.0));
    let pr = projector(axis(&cfg.r()), 1.0);
    let pmr = projector(axis(&cfg.r()), -1.0);
    let start: Vec<Complex> = (0..2 * d).map(|k| m[k / d] * psi_i.amplitude(k % d)).collect();
    let mut evolved = vec![Complex::default(); 2 * d];
    for a in 0..2 {
        for i in 0..d {
            let mut acc = Complex::default();
            for b in 0..2 {
                for j in 0..d {
                    let id = if i == j { 1.0 } else { 0.0 };
                    let g = pr[a][b] * id + pmr[a][b] * u[i][j];
                    acc += g * start[b * d + j];
                }
            }
            evolved[a * d + i] = acc;
        }
    }
    let mut out = [0.0; 2];
    for (slot, sign) in [(0, 1.0), (1, -1.0)] {
        let pq = projector(axis(&cfg.q()), sign);
        // <psi_f| on the system, Pi_q on the meter
        let mut meter_part = [Complex::default(); 2];
        for (a, mp) in meter_part.iter_mut().enumerate() {
            *mp = (0..d)
                .map(|i| psi_f.amplitude(i).conj() * evolved[a * d + i])
                .sum();
        }
        let projected: Vec<Complex> = (0..2)
            .map(|a| (0..2).map(|b| pq[a][b] * meter_part[b]).sum())
            .collect();
        out[slot] = projected.iter().map(|z| z.norm_sqr()).sum();
    }
    (out[0], out[1])
}

pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Statevector {
    let amps = (0..dim)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Statevector::normalized(amps).unwrap()
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Random `m`, random `r`, and a `q` orthogonal to `r`.
pub fn random_meter(rng: &mut ChaCha8Rng) -> MeterConfig {
    let m = random_unit(rng);
    let r = random_unit(rng);
    let t = random_unit(rng);
    let dot = t[0] * r[0] + t[1] * r[1] + t[2] * r[2];
    let q = [t[0] - dot * r[0], t[1] - dot * r[1], t[2] - dot * r[2]];
    let bv = |v: [f64; 3]| BlochVector::normalize(v[0], v[1], v[2]).unwrap();
    MeterConfig::new(bv(m), bv(r), bv(q)).unwrap()
}

/// Haar-ish unitary from Gram-Schmidt on a random complex matrix.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DenseOperator {
    let mut cols: Vec<Vec<Complex>> = Vec::new();
    while cols.len() < dim {
        let mut v: Vec<Complex> = (0..dim)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for _ in 0..2 {
            for b in &cols {
                let o: Complex = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= o * bi);
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let entries = (0..dim).flat_map(|r| cols.iter().map(move |col| col[r])).collect();
    DenseOperator::new(dim, entries).unwrap()
}

pub fn random_truth_table(input_bits: usize, rng: &mut ChaCha8Rng) -> modval::oracle::BooleanFunction {
    let table = (0..1usize << input_bits).map(|_| rng.gen_range(0..2u8)).collect();
    modval::oracle::BooleanFunction::new(table).unwrap()
}
