//! Seminorms, weak quasinorms, Kolmogorov's inequality and the pointwise
//! representation bounds.
//!
//! The Gagliardo double sum excludes the diagonal pairs `x = y`; for C^1
//! functions the integrand is `O(|x-y|^{p(1-delta)-n})`, so the exclusion
//! removes an integrable sliver and biases the value low. An optional
//! near-diagonal correction (`diagonal_depth > 0`) integrates a first-order
//! model of `u` over subdivided self-cells for convergence studies.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    align, cube_average, for_each_node, gradient_magnitude, gradient_vector, Cube, LatticeGrid,
    ScalarField,
};
use crate::maximal::{maximal_function, MaximalInput, MaximalSpec, MaximalVariant};
use crate::sum::pairwise_sum;
use crate::weights::{MeasureSpec, WeightSpec};

/// Parameter bundle for seminorms and representation checks.
#[derive(Debug, Clone, Copy)]
pub struct SeminormParams {
    pub p: f64,
    pub delta: f64,
    /// Integrability exponent of the gradient datum (representation bounds).
    pub r: f64,
    /// Hoelder exponent in the oscillation bounds; defaults to `delta`.
    pub beta: f64,
    /// Fractional order of the maximal/Riesz operators.
    pub alpha: f64,
    /// Free exponent in the Riesz representation, in `(0, n - alpha)`.
    pub eta: f64,
    /// Constant of the assumed Poincaré datum; unidentifiable from data, 1 by
    /// convention.
    pub kappa: f64,
}

impl SeminormParams {
    pub fn new(p: f64, delta: f64) -> SeminormParams {
        SeminormParams { p, delta, r: 1.0, beta: delta, alpha: 1.0, eta: 0.5, kappa: 1.0 }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidExponent(format!("delta = {} outside (0,1)", self.delta)));
        }
        if !(self.p >= 1.0) {
            return Err(Error::InvalidExponent(format!("p = {} below 1", self.p)));
        }
        if !(self.beta > 0.0) || self.beta > self.alpha {
            return Err(Error::InvalidExponent(format!(
                "beta = {} outside (0, alpha = {}]",
                self.beta, self.alpha
            )));
        }
        if !(self.alpha > 0.0) || self.alpha >= n as f64 {
            return Err(Error::InvalidExponent(format!(
                "alpha = {} outside (0, n = {n})",
                self.alpha
            )));
        }
        if !(self.eta > 0.0) || self.eta >= n as f64 - self.alpha {
            return Err(Error::InvalidExponent(format!(
                "eta = {} outside (0, n - alpha)",
                self.eta
            )));
        }
        if !(self.r >= 1.0) {
            return Err(Error::InvalidExponent(format!("r = {} below 1", self.r)));
        }
        Ok(())
    }
}

/// Kernel lookup table `|x-y|^{-(n + delta p)}` indexed by the absolute index
/// offset per axis. Collapses the double sum's `powf` calls to one per
/// distinct lattice offset.
struct KernelTable {
    n: usize,
    extent: usize,
    values: Vec<f64>,
}

impl KernelTable {
    fn build(n: usize, extent: usize, h: f64, exponent: f64) -> KernelTable {
        let total = extent.pow(n as u32);
        let values = (0..total)
            .map(|t| {
                let mut rem = t;
                let mut d2 = 0.0;
                for _ in 0..n {
                    let d = (rem % extent) as f64;
                    rem /= extent;
                    d2 += d * d;
                }
                if d2 == 0.0 {
                    0.0
                } else {
                    (d2.sqrt() * h).powf(exponent)
                }
            })
            .collect();
        KernelTable { n, extent, values }
    }

    #[inline]
    fn get(&self, xi: &[usize; 3], yi: &[usize; 3]) -> f64 {
        let mut t = 0;
        for a in (0..self.n).rev() {
            let d = xi[a].abs_diff(yi[a]);
            t = t * self.extent + d;
        }
        self.values[t]
    }
}

fn pow_p(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else if p == 2.0 {
        v * v
    } else {
        v.powf(p)
    }
}

/// Weighted Gagliardo seminorm over `Q`:
/// `( sum_{x in Q} sum_{y in Q, y != x} |u(x)-u(y)|^p |x-y|^{-(n+delta p)}
///    h^n  d mu(x-cell) )^{1/p}`.
pub fn gagliardo_seminorm(
    u: &ScalarField,
    p: f64,
    delta: f64,
    mu: &MeasureSpec,
    q: &Cube,
    diagonal_depth: usize,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidExponent(format!("delta = {delta} outside (0,1)")));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(format!("p = {p} below 1")));
    }
    let grid = u.grid();
    let n = grid.dim();
    let window = align(grid, q)?;
    let mu_cells = mu.cell_masses(grid)?;
    warn_atoms_on_nodes(mu, grid);
    let h = grid.spacing();
    let hn = grid.cell_volume();
    let kernel = KernelTable::build(n, window.k, h, -(n as f64 + delta * p));
    let mut xs = Vec::with_capacity(window.node_count(n));
    for_each_node(grid, &window, |lin, idx| xs.push((lin, *idx)));
    let grad = if diagonal_depth > 0 { Some(gradient_vector(u)?) } else { None };
    let vals = u.values();
    let partials: Vec<f64> = xs
        .par_iter()
        .map(|(x_lin, xi)| {
            let ux = vals[*x_lin];
            let mut inner = 0.0;
            for (y_lin, yi) in &xs {
                if y_lin == x_lin {
                    continue;
                }
                let d = (ux - vals[*y_lin]).abs();
                inner += pow_p(d, p) * kernel.get(xi, yi);
            }
            let mut partial = inner * hn;
            if let Some(gv) = &grad {
                partial += diagonal_correction(&gv[*x_lin], n, h, p, delta, diagonal_depth);
            }
            partial * mu_cells[*x_lin]
        })
        .collect();
    Ok(pairwise_sum(&partials).powf(1.0 / p))
}

/// First-order near-diagonal correction: the self-cell's `y`-integral with
/// `u(y) ~ u(x) + grad u(x) . (y - x)` on a `2^depth`-per-axis subdivision.
fn diagonal_correction(g: &[f64; 3], n: usize, h: f64, p: f64, delta: f64, depth: usize) -> f64 {
    let m = 1usize << depth;
    let q = h / m as f64;
    let cells = m.pow(n as u32);
    let mut total = 0.0;
    for c in 0..cells {
        let mut rem = c;
        let mut dot = 0.0;
        let mut d2 = 0.0;
        for a in 0..n {
            let i = rem % m;
            rem /= m;
            let off = -0.5 * h + (i as f64 + 0.5) * q;
            dot += g[a] * off;
            d2 += off * off;
        }
        let dist = d2.sqrt();
        total += pow_p(dot.abs(), p) * dist.powf(-(n as f64 + delta * p)) * q.powi(n as i32);
    }
    total
}

fn warn_atoms_on_nodes(mu: &MeasureSpec, grid: &LatticeGrid) {
    for a in &mu.atoms {
        if a.point.len() != grid.dim() {
            continue;
        }
        let lin = grid.nearest_node(&a.point);
        let pos = grid.node_position(lin);
        if pos.iter().zip(&a.point).all(|(n, p)| n == p) {
            log::warn!("atom at {:?} coincides with a grid node; its cell mass is kept", a.point);
        }
    }
}

/// Weighted Sobolev seminorm `(h^n sum_Q |grad u|^p w)^{1/p}`.
pub fn sobolev_seminorm(u: &ScalarField, p: f64, w: &WeightSpec, q: &Cube) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(format!("p = {p} below 1")));
    }
    let grid = u.grid();
    let window = align(grid, q)?;
    let gm = gradient_magnitude(u)?;
    let wf = w.sample(grid)?;
    let hn = grid.cell_volume();
    let mut terms = Vec::with_capacity(window.node_count(grid.dim()));
    for_each_node(grid, &window, |lin, _| {
        terms.push(pow_p(gm.values()[lin], p) * wf.values()[lin] * hn);
    });
    Ok(pairwise_sum(&terms).powf(1.0 / p))
}

/// Mean oscillation `avg_Q |u - u_Q|`.
pub fn poincare_oscillation(u: &ScalarField, q: &Cube) -> Result<f64> {
    let grid = u.grid();
    let window = align(grid, q)?;
    let mean = cube_average(u, q)?;
    let mut terms = Vec::with_capacity(window.node_count(grid.dim()));
    for_each_node(grid, &window, |lin, _| terms.push((u.values()[lin] - mean).abs()));
    Ok(pairwise_sum(&terms) / terms.len() as f64)
}

/// One sample of the product-space kernel `|u(x)-u(y)| / |x-y|^{n+delta}`
/// with its product-measure weight.
#[derive(Debug, Clone, Copy)]
pub struct ProductKernelSample {
    pub x: u32,
    pub y: u32,
    pub value: f64,
    pub weight: f64,
}

/// Result of building the product-kernel sample set.
pub struct ProductKernelSet {
    pub samples: Vec<ProductKernelSample>,
    pub subsampled: bool,
}

/// Build the kernel samples over `Q x Q` against `w(x) dx x dy`.
///
/// The full unordered pair set is used up to `max_pairs` ordered pairs;
/// beyond that a per-`x` stratified subsample keyed by `seed` replaces it and
/// weights are rescaled to keep the product measure unbiased.
pub fn product_kernel_samples(
    u: &ScalarField,
    delta: f64,
    w: &WeightSpec,
    q: &Cube,
    max_pairs: u64,
    seed: u64,
) -> Result<ProductKernelSet> {
    use rand::{Rng, SeedableRng};
    let grid = u.grid();
    let n = grid.dim();
    let window = align(grid, q)?;
    let wf = w.sample(grid)?;
    let h = grid.spacing();
    let hn = grid.cell_volume();
    let kernel = KernelTable::build(n, window.k, h, -(n as f64 + delta));
    let mut xs = Vec::with_capacity(window.node_count(n));
    for_each_node(grid, &window, |lin, idx| xs.push((lin, *idx)));
    let m = xs.len() as u64;
    let vals = u.values();
    if m * m <= max_pairs {
        let samples: Vec<ProductKernelSample> = xs
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, (x_lin, xi))| {
                let xs = &xs;
                let kernel = &kernel;
                let wf = &wf;
                xs[i + 1..].iter().map(move |(y_lin, yi)| {
                    let value = (vals[*x_lin] - vals[*y_lin]).abs() * kernel.get(xi, yi);
                    // F is symmetric: the unordered pair carries both
                    // ordered weights w(x) h^{2n} and w(y) h^{2n}.
                    let weight = (wf.values()[*x_lin] + wf.values()[*y_lin]) * hn * hn;
                    ProductKernelSample { x: *x_lin as u32, y: *y_lin as u32, value, weight }
                })
            })
            .collect();
        Ok(ProductKernelSet { samples, subsampled: false })
    } else {
        let per_x = ((max_pairs / m).max(1) as usize).min(xs.len() - 1);
        let scale = (m - 1) as f64 / per_x as f64;
        let samples: Vec<ProductKernelSample> = xs
            .par_iter()
            .flat_map_iter(|(x_lin, xi)| {
                let mut rng =
                    rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (*x_lin as u64).wrapping_mul(0x9e3779b97f4a7c15));
                let xs = &xs;
                let kernel = &kernel;
                let wf = &wf;
                let x_lin = *x_lin;
                let xi = *xi;
                (0..per_x).map(move |_| {
                    let mut j = rng.gen_range(0..xs.len() - 1);
                    if xs[j].0 == x_lin {
                        j = xs.len() - 1;
                    }
                    let (y_lin, yi) = &xs[j];
                    let value = (vals[x_lin] - vals[*y_lin]).abs() * kernel.get(&xi, yi);
                    let weight = wf.values()[x_lin] * hn * hn * scale;
                    ProductKernelSample { x: x_lin as u32, y: *y_lin as u32, value, weight }
                })
            })
            .collect();
        Ok(ProductKernelSet { samples, subsampled: true })
    }
}

/// Weak-L^q (Marcinkiewicz) quasinorm of a weighted sample set:
/// `sup_t t (measure{|F| > t} [/ total])^{1/q}`. The supremum over the step
/// function is attained at a sample value, so the scan over the sorted
/// distinct values is exact.
pub fn weak_quasinorm_samples(samples: &[(f64, f64)], q: f64, normalized: bool) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Precondition("weak quasinorm of an empty sample set".into()));
    }
    if !(q > 0.0) {
        return Err(Error::InvalidExponent(format!("weak exponent q = {q} must be positive")));
    }
    let mut sorted: Vec<(f64, f64)> = samples.to_vec();
    sorted.par_sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| b.1.total_cmp(&a.1))
    });
    let total = if normalized {
        let ws: Vec<f64> = sorted.iter().map(|s| s.1).collect();
        pairwise_sum(&ws)
    } else {
        1.0
    };
    let mut sup: f64 = 0.0;
    let mut cum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == v {
            cum += sorted[i].1;
            i += 1;
        }
        if v > 0.0 {
            // measure{F >= v} = measure{F > t} for t just below v.
            let g = if normalized { cum / total } else { cum };
            sup = sup.max(v * g.powf(1.0 / q));
        }
    }
    Ok(sup)
}

/// Spec'd entry point on product-kernel samples.
pub fn marcinkiewicz_quasinorm(
    samples: &[ProductKernelSample],
    q: f64,
    normalized: bool,
) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.value, s.weight)).collect();
    weak_quasinorm_samples(&pairs, q, normalized)
}

/// Kolmogorov's inequality core ratio for `0 < q < r`:
/// `rho = [mu(Q)^{-1} int u^q dmu] / [(r/(r-q)) ||u||^q_{L^{r,inf}(Q, dmu/mu(Q))}]`.
pub fn kolmogorov_check(
    u: &ScalarField,
    q_exp: f64,
    r_exp: f64,
    mu: &MeasureSpec,
    q: &Cube,
) -> Result<f64> {
    if !(q_exp > 0.0 && q_exp < r_exp) || !r_exp.is_finite() {
        return Err(Error::InvalidExponent(format!(
            "Kolmogorov needs 0 < q < r < inf, got q = {q_exp}, r = {r_exp}"
        )));
    }
    if u.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("Kolmogorov check needs u >= 0".into()));
    }
    let grid = u.grid();
    let window = align(grid, q)?;
    let mu_cells = mu.cell_masses(grid)?;
    let mut samples = Vec::new();
    let mut mass_terms = Vec::new();
    let mut uq_terms = Vec::new();
    for_each_node(grid, &window, |lin, _| {
        let mass = mu_cells[lin];
        mass_terms.push(mass);
        uq_terms.push(u.values()[lin].powf(q_exp) * mass);
        if mass > 0.0 {
            samples.push((u.values()[lin], mass));
        }
    });
    let mu_q = pairwise_sum(&mass_terms);
    if !(mu_q > 0.0) {
        return Err(Error::Precondition("measure of Q vanishes".into()));
    }
    let lhs = pairwise_sum(&uq_terms) / mu_q;
    let weak = weak_quasinorm_samples(&samples, r_exp, true)?;
    let rhs = r_exp / (r_exp - q_exp) * weak.powf(q_exp);
    if lhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

/// Which pointwise representation bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReprLemma {
    /// Oscillation vs fractional local maximal functions at a pair:
    /// core = `|x-y|^beta (M_{a-b,Q0} g(x) + M_{a-b,Q0} g(y))`.
    L43,
    /// Oscillation from the cube mean vs a Riesz potential at a point:
    /// core = `kappa a^{-1/r'} eta^{-1/r} l(Q0)^{a/r'} I_a(g^r chi_Q0)(x)^{1/r}`.
    L44,
    /// Lipschitz-type bound via min/max of maximal functions (n >= 2):
    /// core = `kappa |x-y| min M^{1/n} max M^{1/n'}`.
    L45,
}

#[derive(Debug, Clone)]
pub struct ReprReport {
    pub max_ratio: f64,
    pub argmax: (usize, usize),
    pub pairs_checked: usize,
}

/// Precomputed per-node data for a representation bound.
pub struct ReprEvaluator {
    lemma: ReprLemma,
    params: SeminormParams,
    q0: Cube,
    /// L43/L45: maximal field; L44: Riesz potentials of `g^r`.
    field: Vec<f64>,
    u_mean: f64,
    n: usize,
}

impl ReprEvaluator {
    pub fn new(
        lemma: ReprLemma,
        u: &ScalarField,
        g: &ScalarField,
        params: SeminormParams,
        q0: &Cube,
    ) -> Result<ReprEvaluator> {
        let grid = g.grid();
        let n = grid.dim();
        if lemma == ReprLemma::L45 && n < 2 {
            return Err(Error::Dimension("the min/max bound needs n >= 2".into()));
        }
        params.validate(n)?;
        if g.values().iter().any(|&v| v < 0.0) {
            return Err(Error::Precondition("gradient datum g must be nonnegative".into()));
        }
        let field = match lemma {
            ReprLemma::L43 => {
                let spec = MaximalSpec::new(
                    MaximalVariant::Local(*q0),
                    params.alpha - params.beta,
                    MaximalInput::Field(g.clone()),
                );
                maximal_function(&spec, grid)?.values().to_vec()
            }
            ReprLemma::L44 => {
                let gr = g.map(crate::lattice::FieldKind::Function, |v| pow_p(v, params.r))?;
                riesz_field_samples(gr.values(), params.alpha, grid, q0)?
            }
            ReprLemma::L45 => {
                if n < 2 {
                    return Err(Error::Dimension("the min/max bound needs n >= 2".into()));
                }
                let spec =
                    MaximalSpec::new(MaximalVariant::Noncentered, 0.0, MaximalInput::Field(g.clone()))
                        .restricted(*q0);
                maximal_function(&spec, grid)?.values().to_vec()
            }
        };
        let u_mean = cube_average(u, q0)?;
        Ok(ReprEvaluator { lemma, params, q0: *q0, field, u_mean, n })
    }

    /// The C(n)-free core at a node pair (L44 ignores `y`).
    pub fn core(&self, grid: &LatticeGrid, x: usize, y: usize) -> Result<f64> {
        let p = &self.params;
        match self.lemma {
            ReprLemma::L43 => {
                if x == y {
                    return Err(Error::DegeneratePair(x));
                }
                let d = node_distance(grid, x, y);
                Ok(d.powf(p.beta) * (self.field[x] + self.field[y]))
            }
            ReprLemma::L44 => {
                let one_over_rp = if p.r == 1.0 { 0.0 } else { 1.0 - 1.0 / p.r };
                let factor = p.kappa
                    * p.alpha.powf(-one_over_rp)
                    * p.eta.powf(-1.0 / p.r)
                    * self.q0.side().powf(p.alpha * one_over_rp);
                Ok(factor * self.field[x].powf(1.0 / p.r))
            }
            ReprLemma::L45 => {
                if x == y {
                    return Err(Error::DegeneratePair(x));
                }
                let d = node_distance(grid, x, y);
                let (lo, hi) = if self.field[x] <= self.field[y] {
                    (self.field[x], self.field[y])
                } else {
                    (self.field[y], self.field[x])
                };
                let np = self.n as f64;
                Ok(p.kappa * d * lo.powf(1.0 / np) * hi.powf(1.0 - 1.0 / np))
            }
        }
    }

    /// `|u(x)-u(y)| / core` (L44: `|u(x) - u_Q0| / core`).
    pub fn ratio(&self, u: &ScalarField, x: usize, y: usize) -> Result<f64> {
        let num = match self.lemma {
            ReprLemma::L44 => (u.values()[x] - self.u_mean).abs(),
            _ => (u.values()[x] - u.values()[y]).abs(),
        };
        if num == 0.0 {
            return Ok(0.0);
        }
        Ok(num / self.core(u.grid(), x, y)?)
    }
}

fn node_distance(grid: &LatticeGrid, a: usize, b: usize) -> f64 {
    let ai = grid.unravel(a);
    let bi = grid.unravel(b);
    let mut d2 = 0.0;
    for ax in 0..grid.dim() {
        let d = ai[ax] as f64 - bi[ax] as f64;
        d2 += d * d;
    }
    d2.sqrt() * grid.spacing()
}

/// Riesz potential of a sampled nonnegative density (same midpoint rule and
/// self-cell handling as the measure-based evaluator).
fn riesz_field_samples(
    density: &[f64],
    alpha: f64,
    grid: &LatticeGrid,
    q0: &Cube,
) -> Result<Vec<f64>> {
    let n = grid.dim();
    if !(alpha > 0.0) || alpha >= n as f64 {
        return Err(Error::InvalidExponent(format!(
            "Riesz exponent alpha = {alpha} outside (0, n)"
        )));
    }
    let window = align(grid, q0)?;
    let h = grid.spacing();
    let hn = grid.cell_volume();
    let kernel_exp = alpha - n as f64;
    let self_cell = crate::maximal::self_cell_weight(alpha, h, n);
    let mut xs = Vec::new();
    for_each_node(grid, &window, |lin, idx| xs.push((lin, *idx)));
    let out: Vec<f64> = (0..grid.node_count())
        .into_par_iter()
        .map(|x_lin| {
            let xi = grid.unravel(x_lin);
            let mut sum = 0.0;
            for (lin, idx) in &xs {
                if *lin == x_lin {
                    continue;
                }
                let mut d2 = 0.0;
                for a in 0..n {
                    let d = idx[a] as f64 - xi[a] as f64;
                    d2 += d * d;
                }
                sum += density[*lin] * (d2.sqrt() * h).powf(kernel_exp) * hn;
            }
            if window.contains_index(&xi, n) {
                sum += density[x_lin] * self_cell;
            }
            sum
        })
        .collect();
    Ok(out)
}

/// Evaluate a representation bound's core at explicit points.
pub fn representation_rhs(
    lemma: ReprLemma,
    u: &ScalarField,
    g: &ScalarField,
    params: SeminormParams,
    q0: &Cube,
    x: usize,
    y: usize,
) -> Result<f64> {
    let ev = ReprEvaluator::new(lemma, u, g, params, q0)?;
    ev.core(u.grid(), x, y)
}

/// Max of `|u(x)-u(y)| / core` over the supplied pairs (all unordered pairs
/// of `Q0` nodes when `pairs` is `None`; L44 runs over single nodes).
pub fn representation_check(
    lemma: ReprLemma,
    u: &ScalarField,
    g: &ScalarField,
    params: SeminormParams,
    q0: &Cube,
    pairs: Option<&[(usize, usize)]>,
) -> Result<ReprReport> {
    let grid = u.grid();
    let ev = ReprEvaluator::new(lemma, u, g, params, q0)?;
    let window = align(grid, q0)?;
    let mut nodes = Vec::new();
    for_each_node(grid, &window, |lin, _| nodes.push(lin));
    let owned: Vec<(usize, usize)> = match pairs {
        Some(p) => p.to_vec(),
        None => match lemma {
            ReprLemma::L44 => nodes.iter().map(|&x| (x, x)).collect(),
            _ => {
                let mut v = Vec::with_capacity(nodes.len() * (nodes.len() - 1) / 2);
                for (i, &x) in nodes.iter().enumerate() {
                    for &y in &nodes[i + 1..] {
                        v.push((x, y));
                    }
                }
                v
            }
        },
    };
    let mut max_ratio = 0.0f64;
    let mut argmax = (0, 0);
    let ratios: Result<Vec<f64>> = owned
        .par_iter()
        .map(|&(x, y)| ev.ratio(u, x, y))
        .collect();
    for (pair, r) in owned.iter().zip(ratios?) {
        if r > max_ratio {
            max_ratio = r;
            argmax = *pair;
        }
    }
    Ok(ReprReport { max_ratio, argmax, pairs_checked: owned.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog::parse_func;
    use crate::lattice::{make_grid, FieldKind};
    use approx::assert_abs_diff_eq;

    fn unit_grid(dim: usize, res: usize) -> LatticeGrid {
        make_grid(Cube::unit(dim).unwrap(), res).unwrap()
    }

    #[test]
    fn gagliardo_vanishes_on_constants() {
        let g = unit_grid(2, 8);
        let u = ScalarField::from_fn(g, FieldKind::Function, |_| 4.2).unwrap();
        let v = gagliardo_seminorm(&u, 2.0, 0.5, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn gagliardo_linear_kernel_cancellation() {
        // n=1, u(x)=x, p=2, delta=1/2: the integrand is identically one and
        // the diagonal-excluded double sum is exactly (N-1)/N.
        let g = unit_grid(1, 64);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| x[0]).unwrap();
        let v = gagliardo_seminorm(&u, 2.0, 0.5, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap();
        let expect = (63.0f64 / 64.0).sqrt();
        assert_abs_diff_eq!(v, expect, epsilon = 1e-13);
        assert!((v - 1.0).abs() <= 1.0 / 64.0);
    }

    #[test]
    fn gagliardo_gauss_richardson_consistent() {
        // The diagonal exclusion removes O(h^{p(1-delta)}) of the p-th power;
        // Richardson extrapolation at that rate from (N, 2N) and (2N, 4N)
        // must agree within 3%.
        let f = parse_func("gauss").unwrap();
        let p = 2.0;
        for delta in [0.3, 0.6, 0.9] {
            let mut vals = Vec::new();
            for res in [16usize, 32, 64] {
                let g = unit_grid(2, res);
                let u = f.sample(&g).unwrap();
                vals.push(
                    gagliardo_seminorm(&u, p, delta, &MeasureSpec::lebesgue(), g.cube(), 0)
                        .unwrap()
                        .powf(p),
                );
            }
            let rate = (p * (1.0 - delta)).min(1.0);
            let w = 2f64.powf(-rate);
            let r1 = (vals[1] - w * vals[0]) / (1.0 - w);
            let r2 = (vals[2] - w * vals[1]) / (1.0 - w);
            assert!(
                (r2 - r1).abs() / r2.abs() < 0.03,
                "delta={delta}: extrapolations {r1} vs {r2}"
            );
        }
    }

    #[test]
    fn gagliardo_homogeneous_in_u() {
        let g = unit_grid(1, 16);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let base = gagliardo_seminorm(&u, 1.5, 0.4, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap();
        let u3 = u.map(FieldKind::Function, |v| 3.0 * v).unwrap();
        let scaled = gagliardo_seminorm(&u3, 1.5, 0.4, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap();
        assert_abs_diff_eq!(scaled, 3.0 * base, epsilon = 1e-12 * scaled);
    }

    #[test]
    fn gagliardo_monotone_in_measure() {
        let g = unit_grid(1, 16);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let base = gagliardo_seminorm(&u, 2.0, 0.4, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap();
        let with_atom = MeasureSpec::new(
            Some(WeightSpec::Constant { c: 1.0 }),
            vec![crate::weights::Atom { point: vec![0.3], mass: 0.5 }],
        )
        .unwrap();
        let bigger = gagliardo_seminorm(&u, 2.0, 0.4, &with_atom, g.cube(), 0).unwrap();
        assert!(bigger >= base);
    }

    #[test]
    fn gagliardo_rejects_bad_exponents() {
        let g = unit_grid(1, 8);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        assert!(gagliardo_seminorm(&u, 2.0, 1.5, &MeasureSpec::lebesgue(), g.cube(), 0).is_err());
        assert!(gagliardo_seminorm(&u, 0.5, 0.5, &MeasureSpec::lebesgue(), g.cube(), 0).is_err());
    }

    #[test]
    fn diagonal_depth_adds_mass() {
        let g = unit_grid(1, 32);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let v0 = gagliardo_seminorm(&u, 2.0, 0.5, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap();
        let v2 = gagliardo_seminorm(&u, 2.0, 0.5, &MeasureSpec::lebesgue(), g.cube(), 2).unwrap();
        assert!(v2 > v0);
        assert!((v2 - v0) / v0 < 0.2);
    }

    #[test]
    fn sobolev_affine_exact() {
        let g = unit_grid(2, 16);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| x[0]).unwrap();
        let v = sobolev_seminorm(&u, 2.0, &WeightSpec::Constant { c: 1.0 }, g.cube()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn sobolev_homogeneous() {
        let g = unit_grid(2, 16);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let w = WeightSpec::Constant { c: 1.0 };
        let v = sobolev_seminorm(&u, 2.0, &w, g.cube()).unwrap();
        let u2 = u.map(FieldKind::Function, |t| 2.0 * t).unwrap();
        let v2 = sobolev_seminorm(&u2, 2.0, &w, g.cube()).unwrap();
        assert_eq!(v2.to_bits(), (2.0 * v).to_bits());
        let u3 = u.map(FieldKind::Function, |t| 3.0 * t).unwrap();
        let v3 = sobolev_seminorm(&u3, 1.5, &w, g.cube()).unwrap();
        let v15 = sobolev_seminorm(&u, 1.5, &w, g.cube()).unwrap();
        assert_abs_diff_eq!(v3, 3.0 * v15, epsilon = 1e-12 * v3);
    }

    #[test]
    fn sobolev_sine_analytic() {
        // (int pi^2 cos^2(pi x))^{1/2} = pi / sqrt(2).
        let g = unit_grid(1, 64);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| (std::f64::consts::PI * x[0]).sin())
            .unwrap();
        let v = sobolev_seminorm(&u, 2.0, &WeightSpec::Constant { c: 1.0 }, g.cube()).unwrap();
        let exact = std::f64::consts::PI / 2f64.sqrt();
        assert!((v - exact).abs() / exact < 0.01);
    }

    #[test]
    fn oscillation_cases() {
        let g = unit_grid(1, 64);
        let c = ScalarField::from_fn(g, FieldKind::Function, |_| 3.0).unwrap();
        assert_eq!(poincare_oscillation(&c, g.cube()).unwrap(), 0.0);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| x[0]).unwrap();
        assert_abs_diff_eq!(poincare_oscillation(&u, g.cube()).unwrap(), 0.25, epsilon = 1e-14);
        let shifted = u.map(FieldKind::Function, |v| v + 5.0).unwrap();
        assert_abs_diff_eq!(
            poincare_oscillation(&shifted, g.cube()).unwrap(),
            0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn weak_quasinorm_cases() {
        // Constant: the level set is everything right up to c.
        let samples = vec![(2.5, 0.3), (2.5, 0.7)];
        assert_abs_diff_eq!(weak_quasinorm_samples(&samples, 1.0, true).unwrap(), 2.5, epsilon = 1e-15);
        // Two-level indicator with half the normalized mass.
        let samples = vec![(1.0, 0.5), (0.0, 0.5)];
        assert_abs_diff_eq!(weak_quasinorm_samples(&samples, 1.0, true).unwrap(), 0.5, epsilon = 1e-15);
        // Homogeneity.
        let samples: Vec<(f64, f64)> = (0..20).map(|i| ((i as f64 * 0.37).sin().abs(), 0.05)).collect();
        let base = weak_quasinorm_samples(&samples, 2.0, true).unwrap();
        let scaled: Vec<(f64, f64)> = samples.iter().map(|(v, w)| (2.0 * v, *w)).collect();
        assert_abs_diff_eq!(weak_quasinorm_samples(&scaled, 2.0, true).unwrap(), 2.0 * base, epsilon = 1e-13);
        assert!(weak_quasinorm_samples(&[], 1.0, true).is_err());
    }

    #[test]
    fn weak_quasinorm_below_lp_norm() {
        // Chebyshev: the normalized weak-L^p quasinorm never exceeds the
        // normalized L^p norm, exactly in the discrete setting.
        let samples: Vec<(f64, f64)> = (0..50)
            .map(|i| (((i as f64) * 0.618).fract(), 0.02 + 0.001 * (i % 3) as f64))
            .collect();
        for p in [1.0, 2.0] {
            let weak = weak_quasinorm_samples(&samples, p, true).unwrap();
            let total: f64 = samples.iter().map(|s| s.1).sum();
            let lp = (samples.iter().map(|(v, w)| v.powf(p) * w).sum::<f64>() / total).powf(1.0 / p);
            assert!(weak <= lp + 1e-12, "p={p}: weak {weak} > Lp {lp}");
        }
    }

    #[test]
    fn kolmogorov_cases() {
        let g = unit_grid(1, 32);
        let q = *g.cube();
        // Constants: rho = (r - q)/r.
        let c = ScalarField::from_fn(g, FieldKind::Function, |_| 3.0).unwrap();
        let rho = kolmogorov_check(&c, 0.5, 1.0, &MeasureSpec::lebesgue(), &q).unwrap();
        assert_abs_diff_eq!(rho, 0.5, epsilon = 1e-12);
        // Two-level field: enumerate the closed form.
        let two = ScalarField::from_fn(g, FieldKind::Function, |x| if x[0] < 0.5 { 1.0 } else { 4.0 })
            .unwrap();
        let rho = kolmogorov_check(&two, 0.5, 1.0, &MeasureSpec::lebesgue(), &q).unwrap();
        // LHS = (1 + 2)/2 = 1.5; weak norm W = max(4 * 1/2, 1 * 1) = 2;
        // RHS = 2 * sqrt(2).
        assert_abs_diff_eq!(rho, 1.5 / (2.0 * 2f64.sqrt()), epsilon = 1e-12);
        assert!(rho <= 1.0);
        assert!(kolmogorov_check(&c, 1.0, 0.5, &MeasureSpec::lebesgue(), &q).is_err());
    }

    #[test]
    fn kolmogorov_exact_on_catalog() {
        let g = unit_grid(1, 32);
        let q = *g.cube();
        for f in crate::lattice::catalog::standard_catalog() {
            let u = f.sample(&g).unwrap().abs();
            for (qe, re) in [(0.5, 1.0), (1.0, 2.0)] {
                let rho = kolmogorov_check(&u, qe, re, &MeasureSpec::lebesgue(), &q).unwrap();
                assert!(rho <= 1.0 + 1e-12, "{} q={qe} r={re}: rho = {rho}", f.id());
            }
        }
    }

    #[test]
    fn repr_l43_constant_gradient_closed_form() {
        // g = 1: M_{1-delta,Q0} g = l(Q0)^{1-delta} everywhere, so the core
        // is |x-y|^delta * 2 l^{1-delta}; verified against direct enumeration.
        let g = unit_grid(1, 16);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| x[0]).unwrap();
        let ones = ScalarField::from_fn(g, FieldKind::Function, |_| 1.0).unwrap();
        let delta = 0.5;
        let params = SeminormParams {
            p: 1.0,
            delta,
            beta: delta,
            alpha: 0.75,
            r: 1.0,
            eta: 0.1,
            kappa: 1.0,
        };
        let core = representation_rhs(ReprLemma::L43, &u, &ones, params, g.cube(), 0, 10).unwrap();
        // Direct enumeration of the admissible cube family at both nodes.
        let h = g.spacing();
        let mut best = 0.0f64;
        for k in 1..=g.res() {
            best = best.max((k as f64 * h).powf(params.alpha - delta));
        }
        let d = 10.0 * h;
        assert_abs_diff_eq!(core, d.powf(delta) * 2.0 * best, epsilon = 1e-12);
    }

    #[test]
    fn repr_l45_affine_ratio_one() {
        let g = unit_grid(2, 8);
        let u = ScalarField::from_fn(g, FieldKind::Function, |x| x[0]).unwrap();
        let ones = ScalarField::from_fn(g, FieldKind::Function, |_| 1.0).unwrap();
        let params = SeminormParams::new(1.0, 0.5);
        let rep = representation_check(ReprLemma::L45, &u, &ones, params, g.cube(), None).unwrap();
        assert_abs_diff_eq!(rep.max_ratio, 1.0, epsilon = 1e-12);
        // Constant u gives zero.
        let c = ScalarField::from_fn(g, FieldKind::Function, |_| 2.0).unwrap();
        let rep = representation_check(ReprLemma::L45, &c, &ones, params, g.cube(), None).unwrap();
        assert_eq!(rep.max_ratio, 0.0);
        // n = 1 rejected.
        let g1 = unit_grid(1, 8);
        let u1 = ScalarField::from_fn(g1, FieldKind::Function, |x| x[0]).unwrap();
        let o1 = ScalarField::from_fn(g1, FieldKind::Function, |_| 1.0).unwrap();
        assert!(matches!(
            representation_check(ReprLemma::L45, &u1, &o1, params, g1.cube(), None),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn repr_l44_r_one_convention() {
        let g = unit_grid(2, 16);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let gm = gradient_magnitude(&u).unwrap();
        let params = SeminormParams {
            p: 1.0,
            delta: 0.5,
            beta: 0.5,
            alpha: 1.0,
            r: 1.0,
            eta: 0.5,
            kappa: 1.0,
        };
        let rep = representation_check(ReprLemma::L44, &u, &gm, params, g.cube(), None).unwrap();
        assert!(rep.max_ratio.is_finite() && rep.max_ratio > 0.0);
        // With r = 1, 1/r' = 0: the alpha and l(Q0) factors drop out, so the
        // core must equal I_alpha(g)/eta pointwise.
        let ev = ReprEvaluator::new(ReprLemma::L44, &u, &gm, params, g.cube()).unwrap();
        let direct = riesz_field_samples(gm.values(), 1.0, &g, g.cube()).unwrap();
        for x in [0usize, 37, 200] {
            let core = ev.core(&g, x, x).unwrap();
            assert_abs_diff_eq!(core, direct[x] / params.eta, epsilon = 1e-12 * direct[x].max(1.0));
        }
    }

    #[test]
    fn repr_degenerate_pair_rejected() {
        let g = unit_grid(2, 8);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let gm = gradient_magnitude(&u).unwrap();
        let params = SeminormParams::new(1.0, 0.5);
        assert!(matches!(
            representation_rhs(ReprLemma::L43, &u, &gm, params, g.cube(), 5, 5),
            Err(Error::DegeneratePair(5))
        ));
    }

    #[test]
    fn oscillation_homogeneous() {
        let g = unit_grid(1, 32);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let base = poincare_oscillation(&u, g.cube()).unwrap();
        let u2 = u.map(FieldKind::Function, |v| -2.5 * v).unwrap();
        let scaled = poincare_oscillation(&u2, g.cube()).unwrap();
        assert_abs_diff_eq!(scaled, 2.5 * base, epsilon = 1e-12 * scaled.max(1.0));
    }

    #[test]
    fn gagliardo_three_dimensional() {
        let g = unit_grid(3, 8);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let v = gagliardo_seminorm(&u, 2.0, 0.5, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap();
        assert!(v.is_finite() && v > 0.0);
        let c = ScalarField::from_fn(g, FieldKind::Function, |_| 1.0).unwrap();
        assert_eq!(
            gagliardo_seminorm(&c, 2.0, 0.5, &MeasureSpec::lebesgue(), g.cube(), 0).unwrap(),
            0.0
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            /// Chebyshev: the normalized weak-L^q quasinorm never exceeds the
            /// normalized L^q norm (exact for finite samples).
            #[test]
            fn weak_below_lq(
                values in proptest::collection::vec(0.0f64..10.0, 1..40),
                q in 0.5f64..3.0,
                seed in 0u64..100,
            ) {
                let samples: Vec<(f64, f64)> = values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, 0.01 + ((i as u64 + seed) % 7) as f64 * 0.03))
                    .collect();
                let weak = weak_quasinorm_samples(&samples, q, true).unwrap();
                let total: f64 = samples.iter().map(|s| s.1).sum();
                let lq = (samples.iter().map(|(v, w)| v.powf(q) * w).sum::<f64>() / total)
                    .powf(1.0 / q);
                prop_assert!(weak <= lq + 1e-9 * lq.max(1.0), "weak {weak} > L^q {lq}");
            }

            /// Both quasinorm flavours are 1-homogeneous.
            #[test]
            fn quasinorm_homogeneous(
                values in proptest::collection::vec(0.0f64..5.0, 1..30),
                c in 0.1f64..8.0,
                normalized in proptest::bool::ANY,
            ) {
                let samples: Vec<(f64, f64)> = values.iter().map(|&v| (v, 0.125)).collect();
                let base = weak_quasinorm_samples(&samples, 1.5, normalized).unwrap();
                let scaled: Vec<(f64, f64)> = samples.iter().map(|(v, w)| (c * v, *w)).collect();
                let got = weak_quasinorm_samples(&scaled, 1.5, normalized).unwrap();
                prop_assert!((got - c * base).abs() <= 1e-10 * (1.0 + got.abs()));
            }

            /// Kolmogorov's inequality holds for random two-level functions
            /// with random exponents.
            #[test]
            fn kolmogorov_two_level(
                a in 0.0f64..4.0,
                b in 0.0f64..4.0,
                cut in 0.2f64..0.8,
                q in 0.3f64..1.4,
                extra in 0.1f64..2.0,
            ) {
                let r = q + extra;
                let g = unit_grid(1, 16);
                let u = ScalarField::from_fn(g, FieldKind::Function, |x| {
                    if x[0] < cut { a } else { b }
                }).unwrap();
                let rho = kolmogorov_check(&u, q, r, &MeasureSpec::lebesgue(), g.cube()).unwrap();
                prop_assert!(rho <= 1.0 + 1e-12, "rho = {rho}");
            }
        }
    }

    #[test]
    fn product_kernel_full_vs_subsampled() {
        let g = unit_grid(1, 16);
        let u = parse_func("gauss").unwrap().sample(&g).unwrap();
        let w = WeightSpec::Constant { c: 1.0 };
        let full = product_kernel_samples(&u, 0.5, &w, g.cube(), 1_000_000, 0).unwrap();
        assert!(!full.subsampled);
        assert_eq!(full.samples.len(), 16 * 15 / 2);
        let sub = product_kernel_samples(&u, 0.5, &w, g.cube(), 64, 7).unwrap();
        assert!(sub.subsampled);
        // Deterministic under the same seed.
        let sub2 = product_kernel_samples(&u, 0.5, &w, g.cube(), 64, 7).unwrap();
        assert_eq!(sub.samples.len(), sub2.samples.len());
        for (a, b) in sub.samples.iter().zip(&sub2.samples) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.weight.to_bits(), b.weight.to_bits());
        }
        // Total sampled product mass approximates the full one.
        let wt_full: f64 = full.samples.iter().map(|s| s.weight).sum();
        let wt_sub: f64 = sub.samples.iter().map(|s| s.weight).sum();
        assert!((wt_full - wt_sub).abs() / wt_full < 0.25, "{wt_full} vs {wt_sub}");
    }
}
