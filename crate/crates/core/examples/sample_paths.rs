// One path of D, E and X, plus a CTRW path for comparison.

use multistable::ctrw::{self, SlowlyVarying};
use multistable::experiments::default_truncation;
use multistable::mfpp::MfppSample;
use multistable::{Error, RngStream, StabilityIndex};

fn main() -> multistable::Result<()> {
    let idx = StabilityIndex::parse("affine:0.4,0.2", 2.5)?;
    let mut jumps = RngStream::with_lane(2024, 0, 0);
    let mut clock = RngStream::with_lane(2024, 0, 1);
    let sample = MfppSample::simulate(&mut jumps, &mut clock, &idx, 2.5, default_truncation(&idx)?, 2.0)?;
    println!("{} jumps, D(2.5) = {:.4}", sample.d_path().len(), sample.d_path().total());
    println!("   t      D(t)      E(t)  X(t)");
    for k in 0..=10 {
        let t = k as f64 * 0.25;
        let d = sample.d_path().eval(t)?;
        match (sample.operational_time(t), sample.value(t)) {
            (Ok(e), Ok(x)) => println!("{t:>4.2}  {d:>8.4}  {e:>8.4}  {x:>4}"),
            (Err(Error::HorizonExceeded { .. }), _) => println!("{t:>4.2}  {d:>8.4}  beyond horizon"),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }

    let mut row = RngStream::with_lane(2024, 0, 2);
    let path = ctrw::partial_sum_path(&mut row, 200, 1.0, &idx, SlowlyVarying::Unit)?;
    println!("CTRW n=200: S_n(1) = {:.4}, E_n(1) = {:?}", path.value_at(1.0)?, path.inverse(1.0).ok());
    Ok(())
}
