//! Cubes, uniform cell-centered lattices, sampled scalar fields, averages,
//! discrete gradients and the grid-aligned subcube family.
//!
//! Everything downstream (weights, maximal operators, seminorms) works on a
//! cell-centered lattice: a cube `Q` with side `l` split into `N` cells per
//! axis, sampled at the `N^n` cell centers. Cubes are closed sets; containment
//! tests use half-open cell ownership (lower face in, upper face out, except
//! the topmost face of the lattice cube) so that every point of the domain
//! belongs to exactly one cell.

pub mod catalog;
pub mod io;

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// Hard cap on the node count of a single grid.
pub const GRID_NODE_CAP: u64 = 1 << 24;

/// Axis-aligned cube in dimension 1..=3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cube {
    dim: usize,
    corner: [f64; 3],
    side: f64,
}

impl Cube {
    pub fn new(corner: &[f64], side: f64) -> Result<Cube> {
        let dim = corner.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidCube(format!("dimension {dim} not in 1..=3")));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::InvalidCube(format!("side {side} must be positive and finite")));
        }
        if corner.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidCube("corner has non-finite coordinate".into()));
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(corner);
        Ok(Cube { dim, corner: c, side })
    }

    /// Unit cube `[0,1]^n`.
    pub fn unit(dim: usize) -> Result<Cube> {
        Cube::new(&[0.0; 3][..dim], 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner[..self.dim]
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn center(&self) -> Vec<f64> {
        self.corner().iter().map(|c| c + 0.5 * self.side).collect()
    }
}

/// Uniform cell-centered lattice over a cube: `res` cells per axis,
/// node `i` at `corner + (i + 1/2) h` along each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGrid {
    cube: Cube,
    res: usize,
    spacing: f64,
}

/// Build a grid, enforcing `N >= 2` and the global node cap.
pub fn make_grid(cube: Cube, res: usize) -> Result<LatticeGrid> {
    if res < 2 {
        return Err(Error::InvalidResolution(res, 2));
    }
    let nodes = (res as u64).pow(cube.dim as u32);
    if nodes > GRID_NODE_CAP {
        return Err(Error::GridTooLarge(nodes, GRID_NODE_CAP));
    }
    let spacing = cube.side / res as f64;
    debug_assert!((spacing * res as f64 - cube.side).abs() <= 4.0 * f64::EPSILON * cube.side);
    Ok(LatticeGrid { cube, res, spacing })
}

impl LatticeGrid {
    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn dim(&self) -> usize {
        self.cube.dim
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn node_count(&self) -> usize {
        self.res.pow(self.dim() as u32)
    }

    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    /// Coordinate of node index `i` along `axis`.
    pub fn node_coord(&self, axis: usize, i: usize) -> f64 {
        self.cube.corner[axis] + (i as f64 + 0.5) * self.spacing
    }

    /// Full coordinates of the node with linear index `lin`.
    pub fn node_position(&self, lin: usize) -> Vec<f64> {
        let idx = self.unravel(lin);
        (0..self.dim()).map(|a| self.node_coord(a, idx[a])).collect()
    }

    /// Row-major linear index (axis 0 slowest).
    pub fn ravel(&self, idx: &[usize; 3]) -> usize {
        let mut lin = 0;
        for a in 0..self.dim() {
            lin = lin * self.res + idx[a];
        }
        lin
    }

    pub fn unravel(&self, mut lin: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.dim()).rev() {
            idx[a] = lin % self.res;
            lin /= self.res;
        }
        idx
    }

    /// Cell owning `point` under half-open ownership with a closed top face;
    /// `None` when the point is outside the lattice cube.
    pub fn owning_cell(&self, point: &[f64]) -> Option<[usize; 3]> {
        let mut idx = [0usize; 3];
        for a in 0..self.dim() {
            let lo = self.cube.corner[a];
            let hi = lo + self.cube.side;
            let x = point[a];
            if x < lo || x > hi {
                return None;
            }
            let i = if x == hi {
                self.res - 1
            } else {
                (((x - lo) / self.spacing).floor() as usize).min(self.res - 1)
            };
            idx[a] = i;
        }
        Some(idx)
    }

    /// Nearest node to `point` (clamped to the lattice).
    pub fn nearest_node(&self, point: &[f64]) -> usize {
        let mut idx = [0usize; 3];
        for a in 0..self.dim() {
            let t = (point[a] - self.cube.corner[a]) / self.spacing - 0.5;
            idx[a] = (t.round().max(0.0) as usize).min(self.res - 1);
        }
        self.ravel(&idx)
    }
}

/// Grid-aligned cube in cell-index form: anchor cell `lo`, `k` cells per axis.
/// Its real-space extent is `[corner + lo*h, corner + (lo+k)*h]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AlignedCube {
    pub lo: [usize; 3],
    pub k: usize,
}

impl AlignedCube {
    pub fn full(grid: &LatticeGrid) -> AlignedCube {
        AlignedCube { lo: [0; 3], k: grid.res() }
    }

    pub fn to_cube(&self, grid: &LatticeGrid) -> Cube {
        let mut corner = [0.0; 3];
        for a in 0..grid.dim() {
            corner[a] = grid.cube.corner[a] + self.lo[a] as f64 * grid.spacing;
        }
        Cube {
            dim: grid.dim(),
            corner,
            side: self.k as f64 * grid.spacing,
        }
    }

    /// Node count `k^n`.
    pub fn node_count(&self, dim: usize) -> usize {
        self.k.pow(dim as u32)
    }

    pub fn contains(&self, other: &AlignedCube, dim: usize) -> bool {
        (0..dim).all(|a| other.lo[a] >= self.lo[a] && other.lo[a] + other.k <= self.lo[a] + self.k)
    }

    pub fn contains_index(&self, idx: &[usize; 3], dim: usize) -> bool {
        (0..dim).all(|a| idx[a] >= self.lo[a] && idx[a] < self.lo[a] + self.k)
    }

    /// Real-space membership of a point: half-open per axis, closed on faces
    /// that coincide with the top of the lattice cube.
    pub fn contains_point(&self, grid: &LatticeGrid, point: &[f64]) -> bool {
        for a in 0..grid.dim() {
            let lo = grid.cube.corner[a] + self.lo[a] as f64 * grid.spacing;
            let hi = grid.cube.corner[a] + (self.lo[a] + self.k) as f64 * grid.spacing;
            let x = point[a];
            let top = self.lo[a] + self.k == grid.res();
            let inside = x >= lo && (x < hi || (top && x == grid.cube.corner[a] + grid.cube.side));
            if !inside {
                return false;
            }
        }
        true
    }
}

/// Resolve a real-space cube to its aligned form, failing when its faces do
/// not land on cell boundaries (within roundoff) or it leaves the lattice.
pub fn align(grid: &LatticeGrid, cube: &Cube) -> Result<AlignedCube> {
    if cube.dim != grid.dim() {
        return Err(Error::Alignment(format!(
            "cube dimension {} != grid dimension {}",
            cube.dim,
            grid.dim()
        )));
    }
    let h = grid.spacing;
    let tol = 4.0 * f64::EPSILON * (grid.cube.side + grid.cube.corner().iter().fold(0.0f64, |m, c| m.max(c.abs())));
    let kf = cube.side / h;
    let k = kf.round();
    if (cube.side - k * h).abs() > tol || k < 1.0 {
        return Err(Error::Alignment(format!("side {} is not a multiple of the spacing {h}", cube.side)));
    }
    let k = k as usize;
    let mut lo = [0usize; 3];
    for a in 0..grid.dim() {
        let t = (cube.corner[a] - grid.cube.corner[a]) / h;
        let i = t.round();
        if (cube.corner[a] - (grid.cube.corner[a] + i * h)).abs() > tol {
            return Err(Error::Alignment(format!(
                "corner coordinate {} does not lie on a cell boundary",
                cube.corner[a]
            )));
        }
        if i < -0.5 {
            return Err(Error::Domain(format!("cube extends below the lattice on axis {a}")));
        }
        let i = i as usize;
        if i + k > grid.res() {
            return Err(Error::Domain(format!("cube extends beyond the lattice on axis {a}")));
        }
        lo[a] = i;
    }
    Ok(AlignedCube { lo, k })
}

/// Visit every node of an aligned window in row-major order.
pub fn for_each_node<F: FnMut(usize, &[usize; 3])>(grid: &LatticeGrid, window: &AlignedCube, mut f: F) {
    let n = grid.dim();
    let mut idx = [0usize; 3];
    let hi = |a: usize| if a < n { window.lo[a] + window.k } else { 1 };
    let lo = |a: usize| if a < n { window.lo[a] } else { 0 };
    for i0 in lo(0)..hi(0) {
        idx[0] = i0;
        for i1 in lo(1)..hi(1) {
            idx[1] = i1;
            for i2 in lo(2)..hi(2) {
                idx[2] = i2;
                f(grid.ravel(&idx), &idx);
            }
        }
    }
}

/// The role a sampled field plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Function,
    GradientMagnitude,
    WeightDensity,
}

/// Samples of a function, gradient magnitude or weight density on a grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: LatticeGrid,
    values: Vec<f64>,
    kind: FieldKind,
}

impl ScalarField {
    pub fn new(grid: LatticeGrid, values: Vec<f64>, kind: FieldKind) -> Result<ScalarField> {
        if values.len() != grid.node_count() {
            return Err(Error::Format(format!(
                "value count {} does not match node count {}",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite sample {v}")));
        }
        if kind == FieldKind::WeightDensity {
            if let Some(v) = values.iter().find(|&&v| v <= 0.0) {
                return Err(Error::NotAWeight(format!("weight density sample {v} is not positive")));
            }
        }
        Ok(ScalarField { grid, values, kind })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: LatticeGrid, kind: FieldKind, f: F) -> Result<ScalarField> {
        let values = (0..grid.node_count()).map(|lin| f(&grid.node_position(lin))).collect();
        ScalarField::new(grid, values, kind)
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: FieldKind) -> Result<ScalarField> {
        self.kind = kind;
        ScalarField::new(self.grid, self.values, kind)
    }

    /// Node-wise absolute value, tagged as a plain function.
    pub fn abs(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.abs()).collect(),
            kind: FieldKind::Function,
        }
    }

    /// Node-wise map, preserving the grid.
    pub fn map<F: Fn(f64) -> f64>(&self, kind: FieldKind, f: F) -> Result<ScalarField> {
        ScalarField::new(self.grid, self.values.iter().map(|&v| f(v)).collect(), kind)
    }
}

/// Average of `f` over a grid-aligned cube `R` (midpoint quadrature).
pub fn cube_average(f: &ScalarField, r: &Cube) -> Result<f64> {
    let window = align(f.grid(), r)?;
    Ok(window_average(f, &window))
}

/// Average over an already-aligned window.
pub fn window_average(f: &ScalarField, window: &AlignedCube) -> f64 {
    let mut vals = Vec::with_capacity(window.node_count(f.grid().dim()));
    for_each_node(f.grid(), window, |lin, _| vals.push(f.values[lin]));
    pairwise_sum(&vals) / vals.len() as f64
}

/// Discrete gradient components: central differences inside, second-order
/// one-sided stencils on the boundary layer. Exact on affine functions.
pub fn gradient_vector(u: &ScalarField) -> Result<Vec<[f64; 3]>> {
    if u.kind != FieldKind::Function {
        return Err(Error::Precondition("gradient input must be a function field".into()));
    }
    let grid = u.grid();
    let n = grid.dim();
    if grid.res() < 3 {
        return Err(Error::TooCoarseForGradient(grid.res()));
    }
    let h = grid.spacing();
    let res = grid.res();
    let v = &u.values;
    let mut out = vec![[0.0; 3]; v.len()];
    for lin in 0..v.len() {
        let idx = grid.unravel(lin);
        for a in 0..n {
            let mut shifted = idx;
            let i = idx[a];
            let d = if i == 0 {
                shifted[a] = 1;
                let f1 = v[grid.ravel(&shifted)];
                shifted[a] = 2;
                let f2 = v[grid.ravel(&shifted)];
                (-3.0 * v[lin] + 4.0 * f1 - f2) / (2.0 * h)
            } else if i == res - 1 {
                shifted[a] = res - 2;
                let f1 = v[grid.ravel(&shifted)];
                shifted[a] = res - 3;
                let f2 = v[grid.ravel(&shifted)];
                (3.0 * v[lin] - 4.0 * f1 + f2) / (2.0 * h)
            } else {
                shifted[a] = i + 1;
                let fp = v[grid.ravel(&shifted)];
                shifted[a] = i - 1;
                let fm = v[grid.ravel(&shifted)];
                (fp - fm) / (2.0 * h)
            };
            out[lin][a] = d;
        }
    }
    Ok(out)
}

/// `|grad u|` as a field.
pub fn gradient_magnitude(u: &ScalarField) -> Result<ScalarField> {
    let n = u.grid().dim();
    let comps = gradient_vector(u)?;
    let values = comps
        .iter()
        .map(|g| g[..n].iter().map(|c| c * c).sum::<f64>().sqrt())
        .collect();
    ScalarField::new(u.grid, values, FieldKind::GradientMagnitude)
}

/// All grid-aligned cubes contained in `q0` (default: the whole lattice
/// cube), in index form. Order: side `k` ascending, anchors row-major.
pub fn aligned_subcubes(
    grid: &LatticeGrid,
    q0: Option<&Cube>,
) -> Result<impl Iterator<Item = AlignedCube>> {
    let region = match q0 {
        Some(c) => align(grid, c)?,
        None => AlignedCube::full(grid),
    };
    Ok(aligned_subcubes_of(region, grid.dim()))
}

/// Subcubes of an aligned region.
pub fn aligned_subcubes_of(region: AlignedCube, dim: usize) -> impl Iterator<Item = AlignedCube> {
    let m = region.k;
    (1..=m).flat_map(move |k| {
        let spots = m - k + 1;
        let total = spots.pow(dim as u32);
        (0..total).map(move |t| {
            let mut lo = region.lo;
            let mut rem = t;
            for a in (0..dim).rev() {
                lo[a] += rem % spots;
                rem /= spots;
            }
            AlignedCube { lo, k }
        })
    })
}

/// Spec'd enumeration in real-space form.
pub fn enumerate_subcubes<'g>(
    grid: &'g LatticeGrid,
    q0: Option<&Cube>,
) -> Result<impl Iterator<Item = Cube> + 'g> {
    let inner = aligned_subcubes(grid, q0)?;
    Ok(inner.map(move |ac| ac.to_cube(grid)))
}

/// Closed-form count of the aligned subcube family of a full grid.
pub fn subcube_count(res: usize, dim: usize) -> u64 {
    (1..=res).map(|k| ((res - k + 1) as u64).pow(dim as u32)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_grid(dim: usize, res: usize) -> LatticeGrid {
        make_grid(Cube::unit(dim).unwrap(), res).unwrap()
    }

    #[test]
    fn grid_nodes_n1() {
        let g = unit_grid(1, 2);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.node_coord(0, 0), 0.25);
        assert_eq!(g.node_coord(0, 1), 0.75);
    }

    #[test]
    fn grid_nodes_n2() {
        let g = unit_grid(2, 4);
        assert_eq!(g.node_count(), 16);
        assert_eq!(g.spacing(), 0.25);
    }

    #[test]
    fn grid_nodes_side3() {
        let cube = Cube::new(&[2.0], 3.0).unwrap();
        let g = make_grid(cube, 3).unwrap();
        assert_eq!(g.spacing(), 1.0);
        let nodes: Vec<f64> = (0..3).map(|i| g.node_coord(0, i)).collect();
        assert_eq!(nodes, vec![2.5, 3.5, 4.5]);
    }

    #[test]
    fn grid_errors() {
        assert!(matches!(
            make_grid(Cube::unit(1).unwrap(), 1),
            Err(Error::InvalidResolution(1, 2))
        ));
        assert!(matches!(
            make_grid(Cube::unit(3).unwrap(), 300),
            Err(Error::GridTooLarge(..))
        ));
    }

    #[test]
    fn average_of_constant() {
        let g = unit_grid(2, 8);
        let f = ScalarField::from_fn(g, FieldKind::Function, |_| 3.0).unwrap();
        let r = Cube::new(&[0.25, 0.5], 0.25).unwrap();
        assert_eq!(cube_average(&f, &r).unwrap(), 3.0);
        assert_eq!(cube_average(&f, g.cube()).unwrap(), 3.0);
    }

    #[test]
    fn average_of_x1_on_unit_square() {
        let g = unit_grid(2, 16);
        let f = ScalarField::from_fn(g, FieldKind::Function, |x| x[0]).unwrap();
        assert_abs_diff_eq!(cube_average(&f, g.cube()).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn average_of_x_squared_midpoint_error() {
        // Analytic oracle: the antiderivative gives 1/3; composite midpoint
        // quadrature of x^2 carries an error of exactly h^2/12.
        let g = unit_grid(1, 64);
        let f = ScalarField::from_fn(g, FieldKind::Function, |x| x[0] * x[0]).unwrap();
        let avg = cube_average(&f, g.cube()).unwrap();
        let h = g.spacing();
        assert_abs_diff_eq!(avg, 1.0 / 3.0 - h * h / 12.0, epsilon = 1e-13);
    }

    #[test]
    fn average_alignment_and_domain_errors() {
        let g = unit_grid(1, 4);
        let f = ScalarField::from_fn(g, FieldKind::Function, |_| 1.0).unwrap();
        let misaligned = Cube::new(&[0.1], 0.5).unwrap();
        assert!(matches!(cube_average(&f, &misaligned), Err(Error::Alignment(_))));
        let outside = Cube::new(&[0.75], 0.5).unwrap();
        assert!(matches!(cube_average(&f, &outside), Err(Error::Domain(_))));
    }

    #[test]
    fn gradient_constant_is_zero() {
        let g = unit_grid(2, 8);
        let u = ScalarField::from_fn(g, FieldKind::Function, |_| 5.0).unwrap();
        let m = gradient_magnitude(&u).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_exact_on_affine() {
        let g = unit_grid(2, 8);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| x[0] + 2.0 * x[1]).unwrap();
        let m = gradient_magnitude(&u).unwrap();
        let expect = 5.0f64.sqrt();
        for &v in m.values() {
            assert_abs_diff_eq!(v, expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn gradient_second_order_on_sine() {
        // Analytic derivative oracle: u' = pi cos(pi x).
        let g = unit_grid(1, 64);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| (std::f64::consts::PI * x[0]).sin()).unwrap();
        let m = gradient_magnitude(&u).unwrap();
        let mut worst = 0.0f64;
        for (lin, &v) in m.values().iter().enumerate() {
            let x = g.node_coord(0, lin);
            let exact = (std::f64::consts::PI * x).cos().abs() * std::f64::consts::PI;
            worst = worst.max((v - exact).abs());
        }
        // One-sided boundary stencil dominates: error constant f'''/3 = pi^3/3.
        let h = g.spacing();
        assert!(worst <= 12.0 * h * h, "max gradient error {worst} too large");
    }

    #[test]
    fn gradient_too_coarse() {
        let g = unit_grid(1, 2);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| x[0]).unwrap();
        assert!(matches!(gradient_magnitude(&u), Err(Error::TooCoarseForGradient(2))));
    }

    #[test]
    fn subcube_enumeration_counts() {
        let g1 = unit_grid(1, 2);
        let cubes: Vec<Cube> = enumerate_subcubes(&g1, None).unwrap().collect();
        assert_eq!(cubes.len(), 3);
        assert_eq!(subcube_count(2, 1), 3);
        assert_eq!(subcube_count(3, 1), 6);
        assert_eq!(subcube_count(4, 2), 30);
        let g2 = unit_grid(2, 4);
        assert_eq!(aligned_subcubes(&g2, None).unwrap().count() as u64, 30);
        let g3 = unit_grid(3, 4);
        assert_eq!(
            aligned_subcubes(&g3, None).unwrap().count() as u64,
            subcube_count(4, 3)
        );
    }

    #[test]
    fn subcube_enumeration_unique() {
        let g = unit_grid(2, 5);
        let mut seen: Vec<AlignedCube> = aligned_subcubes(&g, None).unwrap().collect();
        let total = seen.len();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), total);
        assert_eq!(total as u64, subcube_count(5, 2));
    }

    #[test]
    fn subcubes_within_region() {
        let g = unit_grid(1, 4);
        let q0 = Cube::new(&[0.0], 0.5).unwrap();
        let cubes: Vec<Cube> = enumerate_subcubes(&g, Some(&q0)).unwrap().collect();
        assert_eq!(cubes.len(), 3); // two cells: 2 + 1
    }

    #[test]
    fn average_shift_invariance() {
        let g = unit_grid(2, 8);
        let f = ScalarField::from_fn(g, FieldKind::Function, |x| (x[0] * 3.1).sin() + x[1]).unwrap();
        let fc = f.map(FieldKind::Function, |v| v + 2.5).unwrap();
        for ac in aligned_subcubes(&g, None).unwrap().step_by(7) {
            let r = ac.to_cube(&g);
            let a = cube_average(&f, &r).unwrap();
            let b = cube_average(&fc, &r).unwrap();
            assert_abs_diff_eq!(b, a + 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn owning_cell_rules() {
        let g = unit_grid(1, 4);
        assert_eq!(g.owning_cell(&[0.0]), Some([0, 0, 0]));
        assert_eq!(g.owning_cell(&[0.25]), Some([1, 0, 0]));
        assert_eq!(g.owning_cell(&[1.0]), Some([3, 0, 0])); // closed top
        assert_eq!(g.owning_cell(&[1.01]), None);
    }

    #[test]
    fn gradient_constant_on_affine_catalog() {
        // Every affine catalog entry has an exactly constant gradient field.
        for coeffs in [vec![2.0, 0.0, 0.0], vec![1.0, -3.0, 0.0], vec![0.5, 0.25, -1.0]] {
            for dim in 2..=3 {
                let g = unit_grid(dim, 4);
                let f = crate::lattice::catalog::CatalogFn::Linear { coeffs: coeffs.clone() };
                let m = gradient_magnitude(&f.sample(&g).unwrap()).unwrap();
                let first = m.values()[0];
                assert!(m.values().iter().all(|v| (v - first).abs() <= 1e-12 * first.max(1.0)));
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            /// Averages are linear and shift-invariant on every aligned cube.
            #[test]
            fn average_affine_in_f(
                seed in 0u64..1000,
                shift in -5.0f64..5.0,
                scale in 0.25f64..4.0,
                pick in 0usize..1000,
            ) {
                let g = unit_grid(2, 6);
                let f = ScalarField::from_fn(g, FieldKind::Function, |x| {
                    ((x[0] * 13.7 + x[1] * 7.1 + seed as f64).sin() * 2.0).fract()
                }).unwrap();
                let cubes: Vec<AlignedCube> = aligned_subcubes(&g, None).unwrap().collect();
                let r = cubes[pick % cubes.len()].to_cube(&g);
                let base = cube_average(&f, &r).unwrap();
                let mapped = f.map(FieldKind::Function, |v| scale * v + shift).unwrap();
                let got = cube_average(&mapped, &r).unwrap();
                prop_assert!((got - (scale * base + shift)).abs() <= 1e-11 * (1.0 + got.abs()));
            }

            /// The subcube family count matches the closed form in every
            /// dimension and the members are pairwise distinct.
            #[test]
            fn subcube_family_complete(res in 2usize..7, dim in 1usize..4) {
                let g = make_grid(Cube::unit(dim).unwrap(), res).unwrap();
                let mut all: Vec<AlignedCube> = aligned_subcubes(&g, None).unwrap().collect();
                prop_assert_eq!(all.len() as u64, subcube_count(res, dim));
                all.sort();
                all.dedup();
                prop_assert_eq!(all.len() as u64, subcube_count(res, dim));
            }
        }
    }
}
