// Stochastic continuity of D and independence of its increments.

use multistable::experiments::{continuity_constant, default_truncation};
use multistable::ppp;
use multistable::stats::{binomial_proportion, increment_correlation};
use multistable::subordinator::build_path;
use multistable::{RngStream, StabilityIndex};

fn main() -> multistable::Result<()> {
    let idx = StabilityIndex::constant(0.5, 1.0)?;
    let trunc = default_truncation(&idx)?;
    let paths = (0..2_000)
        .map(|r| {
            let mut s = RngStream::with_lane(3, r, 0);
            Ok(build_path(&ppp::sample(&mut s, 1.0, trunc, &idx)?))
        })
        .collect::<multistable::Result<Vec<_>>>()?;

    let eps = 0.1;
    let c = continuity_constant(idx.beta_sup(), eps);
    for h in [0.01, 0.05, 0.1] {
        let mut hits = 0;
        for p in &paths {
            hits += usize::from(p.increment(0.4, h)? > eps);
        }
        let est = binomial_proportion(hits, paths.len())?;
        println!("P(D(0.4+{h}) - D(0.4) > {eps}) = {:.4} ± {:.4}, bound {:.3}", est.mean, est.se, c * h);
    }

    let rho = increment_correlation(&paths, (0.0, 0.5), (0.5, 1.0))?;
    println!("corr of increments on (0,0.5] and (0.5,1]: {:.4} (null SE {:.4})", rho.mean, rho.se);
    Ok(())
}
