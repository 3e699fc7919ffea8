//! The textbook Deutsch-Jozsa circuit on every two-bit function.

use modval::oracle::table1_functions;
use modval::rng::stream;
use modval::shots::{baseline_dj, dj_all_zero_probability};

fn main() -> modval::Result<()> {
    let mut rng = stream(1, 0);
    for f in table1_functions() {
        let verdict = baseline_dj(&f, &mut rng)?;
        println!(
            "{f}  {:<8}  P(all zeros) = {:.3}  verdict {verdict:?}",
            f.classify().to_string(),
            dj_all_zero_probability(&f)
        );
    }
    Ok(())
}
