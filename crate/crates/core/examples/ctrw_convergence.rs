// The rescaled CTRW, its partial sums and its inverse approach the
// multistable limits as `n` grows. KS distances should shrink with `n`.

use multistable::ctrw::{PnRule, SlowlyVarying};
use multistable::experiments::{auto_horizon, ctrw_experiment, default_truncation, CtrwSetup};
use multistable::StabilityIndex;

fn main() -> multistable::Result<()> {
    let spec = "constant:0.5";
    let idx = StabilityIndex::parse(spec, auto_horizon(spec)?)?;
    let setup = CtrwSetup {
        family: SlowlyVarying::Unit,
        ns: vec![10, 100],
        ts: vec![1.0],
        reps: 500,
        pn_rule: PnRule::Sqrt,
        lambda: 1.0,
        truncation: default_truncation(&idx)?,
        alpha: 0.05,
    };
    println!("     n  ks_S_n  ks_E_n  ks_X    critical");
    for r in ctrw_experiment(&idx, &setup, 21)? {
        println!("{:>6}  {:.4}  {:.4}  {:.4}  {:.4}", r.n, r.ks_d, r.ks_e, r.ks_x, r.critical_value);
    }
    Ok(())
}
