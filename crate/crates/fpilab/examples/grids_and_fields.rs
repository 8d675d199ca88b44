//! Lattice basics: build a grid, sample catalog functions, take cube
//! averages and discrete gradients, and round-trip a field file.
//!
//! Run with: `cargo run --release --example grids_and_fields`

use fpilab::lattice::catalog::parse_func;
use fpilab::lattice::io::{load_field, save_field};
use fpilab::lattice::{cube_average, gradient_magnitude, make_grid, Cube};

fn main() -> fpilab::Result<()> {
    let cube = Cube::unit(2)?;
    let grid = make_grid(cube, 32)?;
    println!("grid: n={} N={} h={}", grid.dim(), grid.res(), grid.spacing());

    let u = parse_func("quadratic")?.sample(&grid)?;
    println!("avg over Q        = {} (analytic 2/3)", cube_average(&u, grid.cube())?);
    let quadrant = Cube::new(&[0.0, 0.0], 0.5)?;
    println!("avg over quadrant = {} (analytic 1/6)", cube_average(&u, &quadrant)?);

    // Central differences are exact on affine functions.
    let affine = parse_func("linear:a=1,2")?.sample(&grid)?;
    let gm = gradient_magnitude(&affine)?;
    println!("|grad(x + 2y)|    = {} (exact: {})", gm.values()[0], 5.0f64.sqrt() / 1.0);

    let path = std::env::temp_dir().join("fpilab-example-field.csv");
    save_field(&u, &path)?;
    let back = load_field(&path, &grid)?;
    let identical = u
        .values()
        .iter()
        .zip(back.values())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("field file round-trip bit-identical: {identical}");
    std::fs::remove_file(&path).ok();
    Ok(())
}
