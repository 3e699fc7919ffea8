//! Shot-by-shot simulation of the post-selected meter protocol.
//!
//! Each shot prepares `|m> (x) psi_i` (meter first), applies the controlled
//! oracle, optionally suffers one two-qubit Pauli error, rotates the system so
//! that `psi_f` becomes `|0...0>` and the meter so that `+q` becomes `|0>`,
//! then reads every qubit in the computational basis. A shot is kept when all
//! system bits read 0; the meter bit then records `+q` (0) or `-q` (1).

use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::djstates::{ibm_postselect_map, CanonicalStatePair, StateVariant};
use crate::error::{Error, Result};
use crate::modular::MeterConfig;
use crate::oracle::{classify, oracle_unitary, BooleanFunction, OracleClass};
use crate::qcore::{
    controlled_gate, hadamard, kron_all, pauli_x, pauli_y, pauli_z, Complex, DenseOperator, Kron,
    Statevector, STRUCTURAL_TOL,
};
use crate::rng::{self, StreamRng};

/// Median two-qubit gate error of the reference device.
pub const DEVICE_TWO_QUBIT_ERROR: f64 = 6.895e-3;
/// Median readout error of the reference device.
pub const DEVICE_READOUT_ERROR: f64 = 3.920e-2;
pub const DEFAULT_REPETITIONS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub two_qubit_depolarizing: f64,
    pub readout_flip: f64,
    pub enabled: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            two_qubit_depolarizing: DEVICE_TWO_QUBIT_ERROR,
            readout_flip: DEVICE_READOUT_ERROR,
            enabled: true,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("two_qubit_depolarizing", self.two_qubit_depolarizing),
            ("readout_flip", self.readout_flip),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    f: BooleanFunction,
    psi_i: Statevector,
    psi_f: Statevector,
    meter: MeterConfig,
    postselect_map: DenseOperator,
    gate: DenseOperator,
}

impl ExperimentPlan {
    pub fn f(&self) -> &BooleanFunction {
        &self.f
    }
    pub fn psi_i(&self) -> &Statevector {
        &self.psi_i
    }
    pub fn psi_f(&self) -> &Statevector {
        &self.psi_f
    }
    pub fn meter(&self) -> &MeterConfig {
        &self.meter
    }
    pub fn postselect_map(&self) -> &DenseOperator {
        &self.postselect_map
    }
    /// Number of system (oracle-register) qubits; the meter adds one more.
    pub fn system_qubits(&self) -> usize {
        self.psi_i.num_qubits()
    }

    /// State of meter and system just after the controlled oracle.
    fn evolved(&self) -> Statevector {
        let start = self.meter.m().ket().kron(&self.psi_i);
        self.gate.apply(&start).expect("dimensions checked at construction")
    }

    fn readout(&self) -> DenseOperator {
        self.meter.q().readout_rotation().kron(&self.postselect_map)
    }

    /// Exact probabilities of `(kept and +q, kept and -q)` without noise,
    /// computed on the full register.
    pub fn exact_outcomes(&self) -> (f64, f64) {
        let out = self.readout().apply(&self.evolved()).expect("dimensions match");
        let half = out.dim() / 2;
        (out.amplitude(0).norm_sqr(), out.amplitude(half).norm_sqr())
    }

    pub fn exact_postselection_rate(&self) -> f64 {
        let (p, m) = self.exact_outcomes();
        p + m
    }
}

/// Unitary whose first row is `<psi_f|`, completed by Gram-Schmidt over the
/// computational basis in index order; it sends `psi_f` to `|0...0>`.
pub fn postselect_map_for(psi_f: &Statevector) -> DenseOperator {
    let dim = psi_f.dim();
    let mut basis: Vec<Vec<Complex>> = vec![psi_f.amplitudes().to_vec()];
    for j in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![Complex::default(); dim];
        v[j] = Complex::new(1.0, 0.0);
        // two passes keep the basis orthonormal to working precision
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= overlap * bi);
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let entries = basis.iter().flat_map(|row| row.iter().map(|x| x.conj())).collect();
    DenseOperator::new(dim, entries).expect("square basis")
}

/// Builds a plan for a canonical pair. The product-state pair uses its
/// single-qubit rotation map, everything else the Gram-Schmidt map.
pub fn build_plan(
    f: &BooleanFunction,
    pair: &CanonicalStatePair,
    meter: &MeterConfig,
) -> Result<ExperimentPlan> {
    let map = match pair.variant() {
        StateVariant::IbmSimplified => ibm_postselect_map(),
        _ => postselect_map_for(pair.psi_f()),
    };
    plan_with_map(f, pair.psi_i(), pair.psi_f(), meter, map)
}

pub fn build_plan_from_states(
    f: &BooleanFunction,
    psi_i: &Statevector,
    psi_f: &Statevector,
    meter: &MeterConfig,
) -> Result<ExperimentPlan> {
    plan_with_map(f, psi_i, psi_f, meter, postselect_map_for(psi_f))
}

fn plan_with_map(
    f: &BooleanFunction,
    psi_i: &Statevector,
    psi_f: &Statevector,
    meter: &MeterConfig,
    postselect_map: DenseOperator,
) -> Result<ExperimentPlan> {
    let dim = 2 * f.table().len();
    for d in [psi_i.dim(), psi_f.dim(), postselect_map.dim()] {
        if d != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: d });
        }
    }
    let mapped = postselect_map.apply(psi_f)?;
    if !mapped.approx_eq_up_to_phase(&Statevector::zero(psi_f.num_qubits()), STRUCTURAL_TOL) {
        return Err(Error::InvalidConfig(
            "post-selection map does not send psi_f to |0...0>".into(),
        ));
    }
    let gate = controlled_gate(&meter.r(), &oracle_unitary(f))?;
    Ok(ExperimentPlan {
        f: f.clone(),
        psi_i: psi_i.clone(),
        psi_f: psi_f.clone(),
        meter: *meter,
        postselect_map,
        gate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotBatch {
    pub shots: usize,
    pub kept: usize,
    pub plus_count: usize,
    pub minus_count: usize,
    pub seed: u64,
    pub stream: u64,
}

impl ShotBatch {
    /// `(plus - minus) / kept`, or `None` when nothing survived post-selection.
    pub fn mean_spin(&self) -> Option<f64> {
        (self.kept > 0).then(|| (self.plus_count as f64 - self.minus_count as f64) / self.kept as f64)
    }

    pub fn postselect_rate(&self) -> f64 {
        self.kept as f64 / self.shots as f64
    }
}

/// Outcome distributions for the error-free branch and for every
/// single two-qubit Pauli error after the controlled oracle.
struct Branches {
    clean: WeightedIndex<f64>,
    errors: Vec<WeightedIndex<f64>>,
}

fn pauli(k: usize) -> DenseOperator {
    match k {
        0 => DenseOperator::identity(2),
        1 => pauli_x(),
        2 => pauli_y(),
        _ => pauli_z(),
    }
}

fn distribution(state: &Statevector) -> WeightedIndex<f64> {
    WeightedIndex::new(state.probabilities()).expect("non-zero state")
}

impl Branches {
    fn new(plan: &ExperimentPlan, with_errors: bool) -> Self {
        let evolved = plan.evolved();
        let readout = plan.readout();
        let clean = distribution(&readout.apply(&evolved).expect("dims"));
        let mut errors = Vec::new();
        if with_errors {
            let qubits = evolved.num_qubits();
            for a in 0..qubits {
                for b in a + 1..qubits {
                    for code in 1..16 {
                        let ops: Vec<DenseOperator> = (0..qubits)
                            .map(|q| match q {
                                q if q == a => pauli(code / 4),
                                q if q == b => pauli(code % 4),
                                _ => DenseOperator::identity(2),
                            })
                            .collect();
                        let hit = kron_all(&ops).apply(&evolved).expect("dims");
                        errors.push(distribution(&readout.apply(&hit).expect("dims")));
                    }
                }
            }
        }
        Self { clean, errors }
    }
}

fn sample_batch(
    branches: &Branches,
    qubits: usize,
    shots: usize,
    noise: &NoiseModel,
    rng: &mut StreamRng,
) -> (usize, usize, usize) {
    let system_mask = (1usize << (qubits - 1)) - 1;
    let (mut kept, mut plus, mut minus) = (0, 0, 0);
    for _ in 0..shots {
        let dist = if noise.enabled && rng.gen_bool(noise.two_qubit_depolarizing) {
            &branches.errors[rng.gen_range(0..branches.errors.len())]
        } else {
            &branches.clean
        };
        let mut outcome = dist.sample(rng);
        if noise.enabled {
            for bit in 0..qubits {
                if rng.gen_bool(noise.readout_flip) {
                    outcome ^= 1 << bit;
                }
            }
        }
        if outcome & system_mask == 0 {
            kept += 1;
            if outcome >> (qubits - 1) == 0 {
                plus += 1;
            } else {
                minus += 1;
            }
        }
    }
    (kept, plus, minus)
}

/// Runs `shots` shots on rng stream `stream` of `seed`.
pub fn run_shots(
    plan: &ExperimentPlan,
    shots: usize,
    noise: &NoiseModel,
    seed: u64,
    stream: u64,
) -> Result<ShotBatch> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    noise.validate()?;
    let branches = Branches::new(plan, noise.enabled);
    let mut rng = rng::stream(seed, stream);
    let (kept, plus_count, minus_count) =
        sample_batch(&branches, plan.system_qubits() + 1, shots, noise, &mut rng);
    Ok(ShotBatch {
        shots,
        kept,
        plus_count,
        minus_count,
        seed,
        stream,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub shots_per_run: usize,
    pub repetitions: usize,
    /// `None` marks a run where no shot survived post-selection.
    pub mean_spin_per_run: Vec<Option<f64>>,
    pub grand_mean: Option<f64>,
    /// Sample standard deviation over runs with a defined mean.
    pub std_dev: f64,
    pub std_error: f64,
    pub postselect_rate_per_run: Vec<f64>,
    pub batches: Vec<ShotBatch>,
}

/// Runs `repetitions` independent batches; batch `r` uses rng stream `r`.
pub fn summarize(
    plan: &ExperimentPlan,
    shots_per_run: usize,
    repetitions: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<RunSummary> {
    if repetitions == 0 || shots_per_run == 0 {
        return Err(Error::InvalidConfig(
            "repetitions and shots per run must be at least 1".into(),
        ));
    }
    noise.validate()?;
    let branches = Branches::new(plan, noise.enabled);
    let qubits = plan.system_qubits() + 1;
    let batches: Vec<ShotBatch> = (0..repetitions as u64)
        .into_par_iter()
        .map(|stream| {
            let mut rng = rng::stream(seed, stream);
            let (kept, plus_count, minus_count) =
                sample_batch(&branches, qubits, shots_per_run, noise, &mut rng);
            ShotBatch {
                shots: shots_per_run,
                kept,
                plus_count,
                minus_count,
                seed,
                stream,
            }
        })
        .collect();
    let mean_spin_per_run: Vec<Option<f64>> = batches.iter().map(ShotBatch::mean_spin).collect();
    let present: Vec<f64> = mean_spin_per_run.iter().flatten().copied().collect();
    let (grand_mean, std_dev) = mean_and_sd(&present);
    let std_error = if present.is_empty() {
        0.0
    } else {
        std_dev / (present.len() as f64).sqrt()
    };
    Ok(RunSummary {
        shots_per_run,
        repetitions,
        postselect_rate_per_run: batches.iter().map(ShotBatch::postselect_rate).collect(),
        mean_spin_per_run,
        grand_mean,
        std_dev,
        std_error,
        batches,
    })
}

/// Mean and sample standard deviation (zero for fewer than two values).
pub fn mean_and_sd(values: &[f64]) -> (Option<f64>, f64) {
    if values.is_empty() {
        return (None, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (Some(mean), var.sqrt())
}

/// One row per repetition: `shots,repetition,mean_spin,postselect_rate`.
/// A run with no surviving shot leaves `mean_spin` empty.
pub fn write_summary_csv<W: Write>(mut out: W, runs: &[RunSummary]) -> Result<()> {
    writeln!(out, "shots,repetition,mean_spin,postselect_rate")?;
    for s in runs {
        for (r, (spin, rate)) in s
            .mean_spin_per_run
            .iter()
            .zip(&s.postselect_rate_per_run)
            .enumerate()
        {
            let spin = spin.map_or(String::new(), |v| format!("{v:.17e}"));
            writeln!(out, "{},{r},{spin},{rate:.17e}", s.shots_per_run)?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DjVerdict {
    Constant,
    Balanced,
}

/// Final state of the textbook circuit: `|0..0>|1>`, Hadamards on every
/// qubit, the oracle, then Hadamards on the input qubits.
pub fn deutsch_jozsa_state(f: &BooleanFunction) -> Statevector {
    let n = f.input_bits();
    let start = Statevector::basis(n + 1, 1);
    let h_all = kron_all(&vec![hadamard(); n + 1]);
    let mut h_inputs: Vec<DenseOperator> = vec![hadamard(); n];
    h_inputs.push(DenseOperator::identity(2));
    let h_inputs = kron_all(&h_inputs);
    let s = h_all.apply(&start).expect("dims");
    let s = oracle_unitary(f).apply(&s).expect("dims");
    h_inputs.apply(&s).expect("dims")
}

/// Probability that every input qubit reads 0.
pub fn dj_all_zero_probability(f: &BooleanFunction) -> f64 {
    let s = deutsch_jozsa_state(f);
    s.amplitude(0).norm_sqr() + s.amplitude(1).norm_sqr()
}

/// One noiseless shot of the textbook circuit.
pub fn baseline_dj(f: &BooleanFunction, rng: &mut StreamRng) -> Result<DjVerdict> {
    if classify(f) == OracleClass::Neither {
        return Err(Error::NeitherClass);
    }
    let outcome = distribution(&deutsch_jozsa_state(f)).sample(rng);
    Ok(if outcome >> 1 == 0 {
        DjVerdict::Constant
    } else {
        DjVerdict::Balanced
    })
}
