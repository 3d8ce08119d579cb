// The stationary and threshold samplers target the same law. Compare
// D(1) from both with a two-sample KS test.

use multistable::ppp::{self, TruncationMode};
use multistable::stats::{ks_critical_value, ks_two_sample};
use multistable::subordinator::build_path;
use multistable::{RngStream, StabilityIndex};

fn totals(idx: &StabilityIndex, mode: TruncationMode, lane: u64, reps: u64) -> multistable::Result<Vec<f64>> {
    let trunc = ppp::truncation_for_mass(idx, 1.0, 1e-3, mode)?;
    (0..reps)
        .map(|r| {
            let mut s = RngStream::with_lane(11, r, lane);
            Ok(build_path(&ppp::sample(&mut s, 1.0, trunc, idx)?).total())
        })
        .collect()
}

fn main() -> multistable::Result<()> {
    let idx = StabilityIndex::parse("affine:0.4,0.2", 1.0)?;
    let a = totals(&idx, TruncationMode::Stationary, 0, 1_000)?;
    let b = totals(&idx, TruncationMode::Threshold, 3, 1_000)?;
    let d = ks_two_sample(&a, &b)?;
    let crit = ks_critical_value(0.01, a.len(), b.len())?;
    println!("KS distance {d:.4}, critical value at 1% {crit:.4}");
    Ok(())
}
