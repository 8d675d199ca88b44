//! Marcinkiewicz quasinorms over the product kernel and Kolmogorov's
//! inequality, which is exact on the lattice.
//!
//! Run with: `cargo run --release --example weak_norms`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::{make_grid, Cube};
use fpilab::seminorm::{kolmogorov_check, marcinkiewicz_quasinorm, product_kernel_samples};
use fpilab::weights::{MeasureSpec, WeightSpec};

fn main() -> fpilab::Result<()> {
    let grid = make_grid(Cube::unit(2)?, 32)?;
    let u = parse_func("gauss")?.sample(&grid)?;
    let w = WeightSpec::Constant { c: 1.0 };

    // Weak quasinorm of |u(x)-u(y)| / |x-y|^{n+delta} over Q x Q.
    let set = product_kernel_samples(&u, 0.6, &w, grid.cube(), 100_000_000, 0)?;
    println!("pairs: {} (subsampled: {})", set.samples.len(), set.subsampled);
    for (q, normalized) in [(1.0, false), (1.0, true), (2.0, true)] {
        let v = marcinkiewicz_quasinorm(&set.samples, q, normalized)?;
        println!("weak-L^{q} (normalized={normalized}): {v:.6}");
    }

    // Kolmogorov: L^q average bounded by the weak-L^r quasinorm, q < r.
    for (qe, re) in [(0.5, 1.0), (1.0, 2.0)] {
        let rho = kolmogorov_check(&u, qe, re, &MeasureSpec::lebesgue(), grid.cube())?;
        println!("kolmogorov q={qe} r={re}: core ratio {rho:.6} (<= 1 exactly)");
    }
    Ok(())
}
