//! Sampled meter spin for a constant and a balanced oracle, with and
//! without device-level noise.

use modval::djstates::CanonicalStatePair;
use modval::modular::MeterConfig;
use modval::rng::derive_seed;
use modval::shots::{build_plan, summarize, NoiseModel, DEFAULT_REPETITIONS};

fn main() -> modval::Result<()> {
    let pair = CanonicalStatePair::ibm();
    let meter = MeterConfig::ibm();
    for (label, noise) in [("noiseless", NoiseModel::noiseless()), ("noisy", NoiseModel::default())] {
        for bits in ["0000", "0011"] {
            let plan = build_plan(&bits.parse()?, &pair, &meter)?;
            for shots in [8, 16, 32, 64, 128] {
                let s = summarize(&plan, shots, DEFAULT_REPETITIONS, &noise, derive_seed(7, shots as u64))?;
                let rate = s.postselect_rate_per_run.iter().sum::<f64>() / s.repetitions as f64;
                println!(
                    "{label:9} f={bits} shots={shots:3}  spin {:+.3} +- {:.3}  rate {rate:.3}",
                    s.grand_mean.unwrap_or(f64::NAN),
                    s.std_dev
                );
            }
        }
    }
    Ok(())
}
