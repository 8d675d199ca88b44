//! Field file format.
//!
//! A field file is plain text: one header line
//!
//! ```text
//! # fpilab-field v1 dim=<n> N=<N> corner=<c1,..> side=<l>
//! ```
//!
//! followed by `N^n` lines holding one real each in row-major node order.
//! Values are written in shortest round-trip form, so `save` → `load` is
//! bit-identical for finite data.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{FieldKind, LatticeGrid, ScalarField};

pub const FORMAT_VERSION: &str = "v1";

pub fn save_field(field: &ScalarField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "{}", header(field.grid()))?;
    for v in field.values() {
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn header(grid: &LatticeGrid) -> String {
    let corner: Vec<String> = grid.cube().corner().iter().map(|c| c.to_string()).collect();
    format!(
        "# fpilab-field {FORMAT_VERSION} dim={} N={} corner={} side={}\n",
        grid.dim(),
        grid.res(),
        corner.join(","),
        grid.cube().side()
    )
}

/// Load a field file against an expected grid. The header must agree with the
/// grid (dimension, resolution, geometry within roundoff).
pub fn load_field(path: &Path, grid: &LatticeGrid) -> Result<ScalarField> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::Format("empty field file".into()))??;
    check_header(&head, grid)?;
    let mut values = Vec::with_capacity(grid.node_count());
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| Error::Format(format!("bad value line `{t}`")))?;
        if !v.is_finite() {
            return Err(Error::Data(format!("non-finite entry `{t}`")));
        }
        values.push(v);
    }
    if values.len() != grid.node_count() {
        return Err(Error::Format(format!(
            "file holds {} values, grid needs {}",
            values.len(),
            grid.node_count()
        )));
    }
    ScalarField::new(*grid, values, FieldKind::Function)
}

fn check_header(head: &str, grid: &LatticeGrid) -> Result<()> {
    let mut parts = head.split_whitespace();
    if parts.next() != Some("#") || parts.next() != Some("fpilab-field") {
        return Err(Error::Format("missing `# fpilab-field` header".into()));
    }
    let version = parts.next().unwrap_or("");
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version `{version}`")));
    }
    let mut dim = None;
    let mut res = None;
    let mut corner: Option<Vec<f64>> = None;
    let mut side = None;
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header token `{p}`")))?;
        match k {
            "dim" => dim = Some(v.parse::<usize>().map_err(|_| Error::Format("bad dim".into()))?),
            "N" => res = Some(v.parse::<usize>().map_err(|_| Error::Format("bad N".into()))?),
            "corner" => {
                let c: std::result::Result<Vec<f64>, _> = v.split(',').map(str::parse).collect();
                corner = Some(c.map_err(|_| Error::Format("bad corner".into()))?);
            }
            "side" => side = Some(v.parse::<f64>().map_err(|_| Error::Format("bad side".into()))?),
            _ => return Err(Error::Format(format!("unknown header key `{k}`"))),
        }
    }
    let (dim, res, corner, side) = match (dim, res, corner, side) {
        (Some(d), Some(r), Some(c), Some(s)) => (d, r, c, s),
        _ => return Err(Error::Format("incomplete header".into())),
    };
    if dim != grid.dim() || res != grid.res() {
        return Err(Error::Format(format!(
            "header dim={dim} N={res} does not match grid dim={} N={}",
            grid.dim(),
            grid.res()
        )));
    }
    let tol = 4.0 * f64::EPSILON * grid.cube().side().abs().max(1.0);
    let geo_ok = corner.len() == dim
        && corner
            .iter()
            .zip(grid.cube().corner())
            .all(|(a, b)| (a - b).abs() <= tol)
        && (side - grid.cube().side()).abs() <= tol;
    if !geo_ok {
        return Err(Error::Format("header geometry does not match grid".into()));
    }
    Ok(())
}
