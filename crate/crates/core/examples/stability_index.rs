// Parse stability-index specs and evaluate them on a grid.
//
// Run with `cargo run --example stability_index`.

use multistable::StabilityIndex;

fn main() -> multistable::Result<()> {
    let specs = [
        "constant:0.5",
        "affine:0.4,0.2",
        "sin:0.5,0.3,1",
        "table:0,0.3;0.5,0.7;1,0.4",
    ];
    for spec in specs {
        let idx = StabilityIndex::parse(spec, 1.0)?;
        let (lo, hi) = idx.bounds();
        print!("{spec:<40} range [{lo:.3}, {hi:.3}] lipschitz {:.3} |", idx.lipschitz());
        for k in 0..=4 {
            print!(" {:.3}", idx.evaluate(k as f64 / 4.0)?);
        }
        println!();
    }
    // indices outside (0, 1) are rejected up front
    assert!(StabilityIndex::parse("affine:0.9,0.2", 1.0).is_err());
    Ok(())
}
