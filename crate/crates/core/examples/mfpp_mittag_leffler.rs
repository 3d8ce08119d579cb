// For constant β the multistable fractional Poisson process reduces to the
// fractional Poisson process, whose one-dimensional law is known.

use multistable::experiments::{auto_horizon, default_truncation, mfpp_experiment};
use multistable::numeric::gamma_fn;
use multistable::stats::mittag_leffler;
use multistable::StabilityIndex;

fn main() -> multistable::Result<()> {
    let spec = "constant:0.5";
    let idx = StabilityIndex::parse(spec, auto_horizon(spec)?)?;
    let rows = mfpp_experiment(&idx, 1.0, &[1.0], 4_000, 5, default_truncation(&idx)?, Some(4))?;
    println!(" k  empirical        oracle");
    for r in &rows {
        println!(
            "{:>2}  {:.4} ± {:.4}  {:.4}",
            r.k,
            r.estimate.mean,
            r.estimate.se,
            r.oracle.unwrap_or(f64::NAN)
        );
    }
    // the subordinator carries the factor Γ(1-β) in its Laplace exponent
    let z = -1.0 / gamma_fn(0.5)?;
    println!("P(X(1) = 0) = E_0.5({z:.6}) = {:.6}", mittag_leffler(0.5, z)?);
    Ok(())
}
