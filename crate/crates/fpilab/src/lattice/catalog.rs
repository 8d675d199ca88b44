//! Catalog of closed-form C^1 test functions.
//!
//! Every entry is defined on the unit cube and rescaled to an arbitrary cube
//! through `x_hat = (x - corner) / side`, so the same id produces a
//! comparable shape at every scale and dimension.

use crate::error::{Error, Result};
use crate::lattice::{FieldKind, LatticeGrid, ScalarField};

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogFn {
    /// Constant `c`.
    Const { c: f64 },
    /// Linear `a . x_hat`.
    Linear { coeffs: Vec<f64> },
    /// `sum_i x_hat_i^2`.
    Quadratic,
    /// `exp(-|x_hat - 1/2|^2 / (2 sigma^2))`.
    Gauss { sigma: f64 },
    /// Compactly supported C^1 bump `(1 - (r/radius)^2)_+^2`, `r = |x_hat - 1/2|`.
    Bump { radius: f64 },
    /// `prod_i sin(k pi x_hat_i)`.
    Oscillatory { k: f64 },
    /// `|x_hat - 1/2|^s` with `s > 1` (C^1 at the center).
    Radial { s: f64 },
    /// `c * inner`, for homogeneity sweeps.
    Scaled { c: f64, inner: Box<CatalogFn> },
}

impl CatalogFn {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogFn::Const { .. } => "const",
            CatalogFn::Linear { .. } => "linear",
            CatalogFn::Quadratic => "quadratic",
            CatalogFn::Gauss { .. } => "gauss",
            CatalogFn::Bump { .. } => "bump",
            CatalogFn::Oscillatory { .. } => "oscillatory",
            CatalogFn::Radial { .. } => "radial",
            CatalogFn::Scaled { .. } => "scale",
        }
    }

    /// Canonical id string (parseable by [`parse_func`]).
    pub fn id(&self) -> String {
        match self {
            CatalogFn::Const { c } => format!("const:c={c}"),
            CatalogFn::Linear { coeffs } => {
                let list: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                format!("linear:a={}", list.join(","))
            }
            CatalogFn::Quadratic => "quadratic".to_string(),
            CatalogFn::Gauss { sigma } => format!("gauss:sigma={sigma}"),
            CatalogFn::Bump { radius } => format!("bump:radius={radius}"),
            CatalogFn::Oscillatory { k } => format!("oscillatory:k={k}"),
            CatalogFn::Radial { s } => format!("radial:s={s}"),
            CatalogFn::Scaled { c, inner } => format!("scale:c={c}*({})", inner.id()),
        }
    }

    /// Evaluate on unit-cube coordinates.
    pub fn eval_unit(&self, x: &[f64]) -> f64 {
        match self {
            CatalogFn::Const { c } => *c,
            CatalogFn::Linear { coeffs } => x.iter().zip(coeffs).map(|(xi, a)| xi * a).sum(),
            CatalogFn::Quadratic => x.iter().map(|xi| xi * xi).sum(),
            CatalogFn::Gauss { sigma } => {
                let r2: f64 = x.iter().map(|xi| (xi - 0.5) * (xi - 0.5)).sum();
                (-r2 / (2.0 * sigma * sigma)).exp()
            }
            CatalogFn::Bump { radius } => {
                let r2: f64 = x.iter().map(|xi| (xi - 0.5) * (xi - 0.5)).sum();
                let t = 1.0 - r2 / (radius * radius);
                if t > 0.0 {
                    t * t
                } else {
                    0.0
                }
            }
            CatalogFn::Oscillatory { k } => x
                .iter()
                .map(|xi| (k * std::f64::consts::PI * xi).sin())
                .product(),
            CatalogFn::Radial { s } => {
                let r2: f64 = x.iter().map(|xi| (xi - 0.5) * (xi - 0.5)).sum();
                r2.sqrt().powf(*s)
            }
            CatalogFn::Scaled { c, inner } => c * inner.eval_unit(x),
        }
    }

    /// Sample onto a grid (rescaled to the grid's cube).
    pub fn sample(&self, grid: &LatticeGrid) -> Result<ScalarField> {
        let corner = grid.cube().corner().to_vec();
        let side = grid.cube().side();
        ScalarField::from_fn(*grid, FieldKind::Function, move |x| {
            let hat: Vec<f64> = x.iter().zip(&corner).map(|(xi, c)| (xi - c) / side).collect();
            self.eval_unit(&hat)
        })
    }
}

/// Default-parameter instances of every catalog entry, used by sweeps and
/// listed by the `catalog` subcommand.
pub fn standard_catalog() -> Vec<CatalogFn> {
    vec![
        CatalogFn::Const { c: 1.0 },
        CatalogFn::Linear { coeffs: vec![1.0, 0.0, 0.0] },
        CatalogFn::Quadratic,
        CatalogFn::Gauss { sigma: 0.2 },
        CatalogFn::Bump { radius: 0.4 },
        CatalogFn::Oscillatory { k: 2.0 },
        CatalogFn::Radial { s: 1.5 },
    ]
}

/// Parse `<name>` or `<name>:<key>=<v>[,<v>...][,<key>=...]`; scaled entries
/// use `scale:c=<v>*(<inner>)`.
pub fn parse_func(s: &str) -> Result<CatalogFn> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("scale:") {
        let (head, tail) = rest
            .split_once('*')
            .ok_or_else(|| Error::Parse("scale expects `c=<v>*(<func>)`".into()))?;
        let c: f64 = head
            .trim()
            .strip_prefix("c=")
            .ok_or_else(|| Error::Parse("scale expects `c=<v>`".into()))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad scale factor `{head}`")))?;
        let (inner, after) = crate::weights::take_parenthesized(tail)?;
        if !after.trim().is_empty() {
            return Err(Error::Parse(format!("trailing input `{after}` after scale")));
        }
        return Ok(CatalogFn::Scaled { c, inner: Box::new(parse_func(inner)?) });
    }
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (s, None),
    };
    let kv = parse_kv(rest.unwrap_or(""))?;
    let scalar = |key: &str, default: f64| -> Result<f64> {
        match kv.iter().find(|(k, _)| k == key) {
            Some((_, vals)) => {
                if vals.len() != 1 {
                    return Err(Error::Parse(format!("{key} expects a single value")));
                }
                Ok(vals[0])
            }
            None => Ok(default),
        }
    };
    let f = match name {
        "const" => CatalogFn::Const { c: scalar("c", 1.0)? },
        "linear" => {
            let coeffs = match kv.iter().find(|(k, _)| k == "a") {
                Some((_, vals)) => {
                    let mut c = vals.clone();
                    c.resize(3, 0.0);
                    c
                }
                None => vec![1.0, 0.0, 0.0],
            };
            CatalogFn::Linear { coeffs }
        }
        "quadratic" => CatalogFn::Quadratic,
        "gauss" => CatalogFn::Gauss { sigma: scalar("sigma", 0.2)? },
        "bump" => CatalogFn::Bump { radius: scalar("radius", 0.4)? },
        "oscillatory" => CatalogFn::Oscillatory { k: scalar("k", 2.0)? },
        "radial" => {
            let s = scalar("s", 1.5)?;
            if s <= 1.0 {
                return Err(Error::Parse(format!("radial exponent s={s} must exceed 1 for C^1 smoothness")));
            }
            CatalogFn::Radial { s }
        }
        other => return Err(Error::Parse(format!("unknown function id `{other}`"))),
    };
    Ok(f)
}

/// Split `key=v1,v2,key2=v3,...` into keyed numeric lists: a token containing
/// `=` opens a key, bare tokens extend the previous key's list.
pub(crate) fn parse_kv(s: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    for tok in s.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        if let Some((k, v)) = tok.split_once('=') {
            let val: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numeric value `{v}`")))?;
            out.push((k.trim().to_string(), vec![val]));
        } else {
            let val: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad numeric value `{tok}`")))?;
            match out.last_mut() {
                Some((_, vals)) => vals.push(val),
                None => return Err(Error::Parse(format!("value `{tok}` without a key"))),
            }
        }
    }
    Ok(out)
}
