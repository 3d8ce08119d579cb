// The triangular-array summands are normalised so that `n P(J/b > c)`
// tends to `c^{-β}`. Check it for both slowly varying families.

use multistable::ctrw::{invert_tail, norming_an, SlowlyVarying};
use multistable::experiments::tail_identity;
use multistable::StabilityIndex;

fn main() -> multistable::Result<()> {
    let idx = StabilityIndex::constant(0.5, 1.0)?;
    for family in [SlowlyVarying::Unit, SlowlyVarying::Log] {
        let a = norming_an(100, family, 0.5)?;
        println!("{family}: a_100 = {a:.4}, tail inverse at 0.25 = {:.4}", invert_tail(0.25, 0.5, 0.5, family)?);
        for c in [0.5, 1.0, 2.0] {
            let est = tail_identity(&idx, family, 100, c, 50_000, 9)?;
            println!("  c={c}: n P(J/b > c) = {:.4} ± {:.4}, limit {:.4}", est.mean, est.se, c.powf(-0.5));
        }
    }
    Ok(())
}
