//! Random search for pre/post-selection pairs that discriminate every
//! balanced function, separable and general.

use modval::search::{pareto_frontier, run_search, spearman, SearchConfig};

fn main() -> modval::Result<()> {
    for separable_only in [true, false] {
        let cfg = SearchConfig {
            samples: 20_000,
            separable_only,
            ..SearchConfig::default()
        };
        let points = run_search(&cfg)?;
        let frontier = pareto_frontier(&points)?;
        let accepted = points.iter().filter(|p| p.accepted).count();
        let ps: Vec<f64> = frontier.iter().map(|p| p.p_postselect).collect();
        let vs: Vec<f64> = frontier.iter().map(|p| p.avg_visibility).collect();
        println!(
            "{}: {accepted}/{} accepted, frontier {} points, spearman {:?}",
            if separable_only { "separable" } else { "general" },
            points.len(),
            frontier.len(),
            spearman(&ps, &vs)
        );
        for p in &frontier {
            println!("  p = {:.4}  V = {:.4}", p.p_postselect, p.avg_visibility);
        }
    }
    Ok(())
}
