//! Random exploration of pre/post-selected states, scored by average
//! visibility against post-selection probability.
//!
//! Candidates are drawn on the `n`-qubit input register and embedded as
//! `psi (x) |->` on the oracle register, so the XOR oracle acts as the phase
//! oracle `(-1)^f(x)` on the sampled part. Visibilities use the
//! `m = z, r = x, q = y` meter, where they reduce to
//! `2|Im O| / (1 + |O|^2)`.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::modular::{eraser_visibility, modular_value, postselection_probability, MeterConfig};
use crate::oracle::{enumerate, oracle_unitary, table1_balanced, BooleanFunction, OracleClass};
use crate::qcore::{Complex, DenseOperator, Kron, Statevector};
use crate::rng::{self, StreamRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Oracle input bits; sampled states have `n` qubits.
    pub n: usize,
    pub samples: usize,
    pub separable_only: bool,
    pub min_im: f64,
    pub min_individual_visibility: f64,
    pub min_p: f64,
    pub seed: u64,
    /// Amplitude parts are integers drawn uniformly from `[-R, R]`.
    pub integer_amplitude_range: i64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n: 2,
            samples: 10_000,
            separable_only: false,
            min_im: 0.1,
            min_individual_visibility: 0.4,
            min_p: 0.5,
            seed: 42,
            integer_amplitude_range: 10,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.samples < 1 {
            return bad("samples must be at least 1".into());
        }
        if !(1..=4).contains(&self.n) {
            return bad(format!("n must be in 1..=4, got {}", self.n));
        }
        if self.integer_amplitude_range < 1 {
            return bad(format!(
                "integer_amplitude_range must be >= 1, got {}",
                self.integer_amplitude_range
            ));
        }
        for (name, v) in [
            ("min_im", self.min_im),
            ("min_individual_visibility", self.min_individual_visibility),
            ("min_p", self.min_p),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        Ok(())
    }

    pub fn metadata(&self) -> serde_json::Value {
        let meter = MeterConfig::ibm();
        json!({
            "seed": self.seed,
            "integer_amplitude_range": self.integer_amplitude_range,
            "thresholds": {
                "min_im": self.min_im,
                "min_individual_visibility": self.min_individual_visibility,
                "min_p": self.min_p,
            },
            "meter": meter,
            "rng": rng::GENERATOR,
            "embedding": "sampled n-qubit state (x) |-> on the oracle target",
            "visibility": "eraser form 2|Im O|/(1+|O|^2) for m=z, r=x, q=y",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchPoint {
    pub sample_index: usize,
    #[serde(skip)]
    pub psi_i: Statevector,
    #[serde(skip)]
    pub psi_f: Statevector,
    pub avg_visibility: f64,
    pub p_postselect: f64,
    pub per_function_im: Vec<f64>,
    pub per_function_visibility: Vec<f64>,
    pub accepted: bool,
    /// Set when the point could not be scored.
    pub diagnostic: Option<String>,
}

/// Balanced functions in output column order: classic table order at two
/// input bits, lexicographic otherwise.
pub fn balanced_functions(n: usize) -> Result<Vec<BooleanFunction>> {
    if n == 2 {
        Ok(table1_balanced())
    } else {
        enumerate(n, OracleClass::Balanced)
    }
}

fn draw_amplitude(range: i64, rng: &mut StreamRng) -> Complex {
    let re = rng.gen_range(-range..=range);
    let im = rng.gen_range(-range..=range);
    Complex::new(re as f64, im as f64)
}

fn draw_vector(len: usize, range: i64, rng: &mut StreamRng) -> Statevector {
    loop {
        let amps: Vec<Complex> = (0..len).map(|_| draw_amplitude(range, rng)).collect();
        if let Ok(s) = Statevector::normalized(amps) {
            return s;
        }
    }
}

/// Draws a random `n`-qubit state with integer-valued amplitude parts.
/// Separable states are a product of independently drawn single-qubit factors.
pub fn sample_state(n: usize, separable: bool, range: i64, rng: &mut StreamRng) -> Statevector {
    if separable {
        let mut state = draw_vector(2, range, rng);
        for _ in 1..n {
            state = state.kron(&draw_vector(2, range, rng));
        }
        state
    } else {
        draw_vector(1 << n, range, rng)
    }
}

/// `psi (x) (|0> - |1>)/sqrt2`.
pub fn with_minus_target(psi: &Statevector) -> Statevector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    psi.kron(&Statevector::from_real(&[h, -h]).expect("normalized"))
}

/// Scores one oracle-register pair against every balanced function.
pub fn evaluate(psi_i: &Statevector, psi_f: &Statevector, cfg: &SearchConfig) -> SearchPoint {
    let oracles: Vec<DenseOperator> = balanced_functions(cfg.n)
        .map(|fs| fs.iter().map(oracle_unitary).collect())
        .unwrap_or_default();
    evaluate_with(0, psi_i, psi_f, cfg, &oracles)
}

fn evaluate_with(
    sample_index: usize,
    psi_i: &Statevector,
    psi_f: &Statevector,
    cfg: &SearchConfig,
    oracles: &[DenseOperator],
) -> SearchPoint {
    let mut point = SearchPoint {
        sample_index,
        psi_i: psi_i.clone(),
        psi_f: psi_f.clone(),
        avg_visibility: 0.0,
        p_postselect: 0.0,
        per_function_im: Vec::new(),
        per_function_visibility: Vec::new(),
        accepted: false,
        diagnostic: None,
    };
    if psi_i.num_qubits() != cfg.n + 1 || psi_f.num_qubits() != cfg.n + 1 {
        point.diagnostic = Some(format!(
            "states must have {} qubits, got {} and {}",
            cfg.n + 1,
            psi_i.num_qubits(),
            psi_f.num_qubits()
        ));
        return point;
    }
    point.p_postselect = postselection_probability(psi_i, psi_f).unwrap_or(0.0);
    let values: Result<Vec<Complex>> = oracles
        .iter()
        .map(|u| modular_value(psi_i, psi_f, u))
        .collect();
    let values = match values {
        Ok(v) => v,
        Err(e) => {
            point.diagnostic = Some(e.to_string());
            return point;
        }
    };
    point.per_function_im = values.iter().map(|o| o.im).collect();
    point.per_function_visibility = values.iter().map(|&o| eraser_visibility(o)).collect();
    if !values.is_empty() {
        point.avg_visibility =
            point.per_function_visibility.iter().sum::<f64>() / values.len() as f64;
    }
    point.accepted = point.per_function_im.iter().all(|im| im.abs() > cfg.min_im)
        && point
            .per_function_visibility
            .iter()
            .all(|&v| v > cfg.min_individual_visibility)
        && point.p_postselect > cfg.min_p;
    point
}

/// Samples and scores `cfg.samples` pairs. Sample `i` uses rng stream `i`,
/// so the output is independent of thread scheduling.
pub fn run_search(cfg: &SearchConfig) -> Result<Vec<SearchPoint>> {
    cfg.validate()?;
    let oracles: Vec<DenseOperator> = balanced_functions(cfg.n)?
        .iter()
        .map(oracle_unitary)
        .collect();
    let points = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(cfg.seed, i as u64);
            let a = sample_state(cfg.n, cfg.separable_only, cfg.integer_amplitude_range, &mut rng);
            let b = sample_state(cfg.n, cfg.separable_only, cfg.integer_amplitude_range, &mut rng);
            evaluate_with(i, &with_minus_target(&a), &with_minus_target(&b), cfg, &oracles)
        })
        .collect();
    Ok(points)
}

/// Accepted points not dominated in `(p_postselect, avg_visibility)`, both
/// maximized, sorted by `p_postselect` ascending.
pub fn pareto_frontier(points: &[SearchPoint]) -> Result<Vec<SearchPoint>> {
    let mut accepted: Vec<&SearchPoint> = points.iter().filter(|p| p.accepted).collect();
    if accepted.is_empty() {
        return Err(Error::EmptyAcceptedSet);
    }
    accepted.sort_by(|a, b| {
        b.p_postselect
            .total_cmp(&a.p_postselect)
            .then(b.avg_visibility.total_cmp(&a.avg_visibility))
    });
    let mut frontier = Vec::new();
    let mut best_higher_p = f64::NEG_INFINITY;
    let mut i = 0;
    while i < accepted.len() {
        let p = accepted[i].p_postselect;
        let group_end = accepted[i..]
            .iter()
            .position(|q| q.p_postselect != p)
            .map_or(accepted.len(), |k| i + k);
        let top = accepted[i].avg_visibility;
        if top > best_higher_p {
            frontier.extend(
                accepted[i..group_end]
                    .iter()
                    .filter(|q| q.avg_visibility == top)
                    .map(|q| (*q).clone()),
            );
            best_higher_p = top;
        }
        i = group_end;
    }
    frontier.reverse();
    Ok(frontier)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties. `None` when either
/// series is constant or shorter than two.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

pub fn write_points_csv<W: Write>(mut out: W, points: &[SearchPoint], functions: usize) -> Result<()> {
    let mut header = vec!["sample_index".to_string(), "p".into(), "avg_visibility".into(), "accepted".into()];
    header.extend((0..functions).map(|k| format!("im_{k}")));
    header.extend((0..functions).map(|k| format!("vis_{k}")));
    writeln!(out, "{}", header.join(","))?;
    for pt in points {
        let mut row = vec![
            pt.sample_index.to_string(),
            format!("{:.17e}", pt.p_postselect),
            format!("{:.17e}", pt.avg_visibility),
            (pt.accepted as u8).to_string(),
        ];
        let pad = |v: &[f64]| -> Vec<String> {
            (0..functions)
                .map(|k| v.get(k).map_or(String::new(), |x| format!("{x:.17e}")))
                .collect()
        };
        row.extend(pad(&pt.per_function_im));
        row.extend(pad(&pt.per_function_visibility));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::djstates::CanonicalStatePair;

    fn point(p: f64, v: f64) -> SearchPoint {
        let s = Statevector::zero(1);
        SearchPoint {
            sample_index: 0,
            psi_i: s.clone(),
            psi_f: s,
            avg_visibility: v,
            p_postselect: p,
            per_function_im: vec![],
            per_function_visibility: vec![],
            accepted: true,
            diagnostic: None,
        }
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let cfg = SearchConfig { samples: 0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let cfg = SearchConfig { min_p: 1.5, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = SearchConfig { integer_amplitude_range: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<SearchConfig>(r#"{"sample": 3}"#).is_err());
        let cfg: SearchConfig = serde_json::from_str(r#"{"samples": 3}"#).unwrap();
        assert_eq!(cfg.min_im, 0.1);
    }

    #[test]
    fn sampled_states_are_normalized_and_seeded() {
        for separable in [true, false] {
            let a = sample_state(2, separable, 10, &mut rng::stream(42, 0));
            let b = sample_state(2, separable, 10, &mut rng::stream(42, 0));
            assert_eq!(a, b);
            assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
            assert_eq!(a.dim(), 4);
        }
    }

    #[test]
    fn separable_samples_have_unit_schmidt_rank() {
        let mut r = rng::stream(5, 0);
        for _ in 0..100 {
            let s = sample_state(3, true, 10, &mut r);
            assert_eq!(s.schmidt_rank(1), 1);
            assert_eq!(s.schmidt_rank(2), 1);
        }
    }

    #[test]
    fn canonical_pair_narrowly_fails_default_filter() {
        let pair = CanonicalStatePair::three_qubit_exact();
        let pt = evaluate(pair.psi_i(), pair.psi_f(), &SearchConfig::default());
        assert!((pt.p_postselect - 41.0 / 88.0).abs() < 1e-12);
        let expect = [40.0, 4.0, 4.0, -40.0, -4.0, -4.0];
        for (got, e) in pt.per_function_im.iter().zip(expect) {
            assert!((got - e / 41.0).abs() < 1e-12);
        }
        assert!(!pt.accepted);
    }

    #[test]
    fn ibm_pair_rejected() {
        let pair = CanonicalStatePair::ibm();
        let pt = evaluate(pair.psi_i(), pair.psi_f(), &SearchConfig::default());
        assert!(!pt.accepted);
        assert!(pt.per_function_im.iter().any(|im| im.abs() < 1e-12));
    }

    #[test]
    fn identical_pre_post_has_unit_overlap() {
        let pair = CanonicalStatePair::three_qubit_exact();
        let pt = evaluate(pair.psi_i(), pair.psi_i(), &SearchConfig::default());
        assert!((pt.p_postselect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_pair_flagged() {
        let a = Statevector::basis(3, 0);
        let b = Statevector::basis(3, 1);
        let pt = evaluate(&a, &b, &SearchConfig::default());
        assert!(!pt.accepted);
        assert!(pt.diagnostic.is_some());
    }

    #[test]
    fn single_sample() {
        let cfg = SearchConfig { samples: 1, ..Default::default() };
        assert_eq!(run_search(&cfg).unwrap().len(), 1);
    }

    #[test]
    fn frontier_examples() {
        let f = pareto_frontier(&[point(0.6, 0.5)]).unwrap();
        assert_eq!(f.len(), 1);
        let f = pareto_frontier(&[point(0.8, 0.4), point(0.5, 0.9)]).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].p_postselect, 0.5);
        let f = pareto_frontier(&[point(0.8, 0.4), point(0.5, 0.9), point(0.4, 0.3)]).unwrap();
        assert_eq!(f.len(), 2);
        let mut rejected = point(0.9, 0.9);
        rejected.accepted = false;
        assert!(matches!(pareto_frontier(&[rejected]), Err(Error::EmptyAcceptedSet)));
    }

    #[test]
    fn spearman_basic() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[1.0, 5.0, 9.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
    }
}
