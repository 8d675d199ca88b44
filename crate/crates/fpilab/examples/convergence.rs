//! Grid-convergence study of the closed-form Gagliardo identity: the core
//! ratio tends to 1 with an O(h) bias from the excluded diagonal, and the
//! observed order confirms it.
//!
//! Run with: `cargo run --release --example convergence`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::Cube;
use fpilab::verify::{convergence_study, InequalityId, VerifyParams};
use fpilab::weights::WeightSpec;

fn main() -> fpilab::Result<()> {
    let table = convergence_study(
        InequalityId::L61,
        &parse_func("linear")?,
        &WeightSpec::Constant { c: 1.0 },
        &[],
        2.0,
        0.5,
        &VerifyParams::default(),
        Cube::unit(1)?,
        &[16, 32, 64, 128],
    )?;
    println!("N      ratio            error");
    for row in &table.rows {
        println!("{:<6} {:.12}  {:.3e}", row.res, row.ratio, (row.ratio - 1.0).abs());
    }
    for s in &table.slopes {
        println!("observed order: {s:.3}");
    }
    Ok(())
}
