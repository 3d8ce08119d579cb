// Monte Carlo Laplace transform of the subordinator against its closed
// form `exp(-∫₀ᵗ Γ(1-β(s)) θ^β(s) ds)`.

use multistable::experiments::{default_truncation, laplace_experiment};
use multistable::StabilityIndex;

fn main() -> multistable::Result<()> {
    for spec in ["constant:0.5", "affine:0.4,0.2"] {
        let idx = StabilityIndex::parse(spec, 1.0)?;
        let rows = laplace_experiment(&idx, &[0.5, 1.0, 2.0], &[0.5, 1.0], 4_000, 7, default_truncation(&idx)?)?;
        println!("{spec}");
        for r in rows {
            println!(
                "  theta={:<4} t={:<4} mc={:.5} ± {:.5}  oracle={:.5}  {}",
                r.theta,
                r.t,
                r.estimate.mean,
                r.estimate.se,
                r.oracle,
                if r.pass { "ok" } else { "off" }
            );
        }
    }
    Ok(())
}
