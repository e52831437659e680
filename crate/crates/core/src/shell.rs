//! Patch files, SVG rendering and JSON dumps used by the command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::rules::StarCatalog;
use crate::tiles::{DecoratedTile, Patch, SideId, TileError, TileShape};

#[derive(Debug, Error)]
pub enum ShellError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: TileError },
}

#[derive(Deserialize)]
struct PatchFile {
    tiles: Vec<DecoratedTile>,
}

/// Parses patch JSON; `path` only labels errors.
pub fn parse_patch(text: &str, path: &Path) -> Result<Patch, ShellError> {
    let f: PatchFile = serde_json::from_str(text).map_err(|e| ShellError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Patch::from_tiles(f.tiles).map_err(|source| ShellError::Invalid {
        path: path.to_owned(),
        source,
    })
}

pub fn load_patch(path: &Path) -> Result<Patch, ShellError> {
    let text = fs::read_to_string(path).map_err(|source| ShellError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_patch(&text, path)
}

pub fn patch_json(p: &Patch) -> String {
    let mut s = serde_json::to_string_pretty(p).expect("patches serialize");
    s.push('\n');
    s
}

pub fn save_patch(p: &Patch, path: &Path) -> Result<(), ShellError> {
    write_file(path, &patch_json(p))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), ShellError> {
    fs::write(path, contents).map_err(|source| ShellError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Label colors: 0 red, 1 yellow, 2 green, 3 blue.
pub const PALETTE: [&str; 4] = ["#d62728", "#e6b800", "#2ca02c", "#1f5fbf"];
const NEUTRAL: &str = "#808080";

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    pub palette: [&'static str; 4],
    pub arrows: bool,
    /// Pixels per unit length.
    pub scale: f64,
}

impl Default for RenderStyle {
    fn default() -> RenderStyle {
        RenderStyle {
            palette: PALETTE,
            arrows: true,
            scale: 200.0,
        }
    }
}

/// One polygon per tile, sides stroked in their label colors and an
/// arrowhead at the midpoint of every directed side.
pub fn render_svg(p: &Patch, style: &RenderStyle) -> String {
    let pts: Vec<(f64, f64)> = p
        .iter()
        .flat_map(|t| t.vertices())
        .map(|v| v.to_f64())
        .collect();
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(&(x, y)) = pts.first() {
        (x0, y0, x1, y1) = (x, y, x, y);
    }
    for &(x, y) in &pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let k = style.scale;
    let margin = 10.0;
    let width = (x1 - x0) * k + 2.0 * margin;
    let height = (y1 - y0) * k + 2.0 * margin;
    let map = |(x, y): (f64, f64)| ((x - x0) * k + margin, (y1 - y) * k + margin);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let stroke = (k * 0.006).max(0.5);
    for t in p.iter() {
        let fill = match t.shape {
            TileShape::Large => "#f2f2f2",
            TileShape::Small => "#d9d9d9",
        };
        let v = t.vertices().map(|v| map(v.to_f64()));
        let _ = writeln!(
            out,
            r#"<polygon class="tile" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" stroke="none"/>"#,
            v[0].0, v[0].1, v[1].0, v[1].1, v[2].0, v[2].1
        );
    }
    for t in p.iter() {
        for side in [SideId::Hyp, SideId::LargeLeg, SideId::SmallLeg] {
            let d = t.side(side);
            let color = d.label.map_or(NEUTRAL, |l| style.palette[l as usize % 4]);
            let seg = t.side_segment(side);
            let (a, b) = (map(seg.a.to_f64()), map(seg.b.to_f64()));
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="{stroke:.2}"/>"#,
                a.0, a.1, b.0, b.1
            );
            if !style.arrows {
                continue;
            }
            if let Some(arrow) = t.side_arrow(side) {
                let (a, b) = (map(arrow.a.to_f64()), map(arrow.b.to_f64()));
                out.push_str(&arrowhead(a, b, color, k));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn arrowhead(a: (f64, f64), b: (f64, f64), color: &str, k: f64) -> String {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = dx.hypot(dy);
    let size = (len * 0.12).min(k * 0.04);
    let (ux, uy) = (dx / len, dy / len);
    let m = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    let tip = (m.0 + ux * size, m.1 + uy * size);
    let l = (
        m.0 - ux * size - uy * size * 0.6,
        m.1 - uy * size + ux * size * 0.6,
    );
    let r = (
        m.0 - ux * size + uy * size * 0.6,
        m.1 - uy * size - ux * size * 0.6,
    );
    format!(
        "<polygon class=\"arrow\" points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"{color}\"/>\n",
        tip.0, tip.1, l.0, l.1, r.0, r.1
    )
}

/// The catalog as JSON: one record per star, in the frame of its canonical key.
pub fn catalog_json(catalog: &StarCatalog) -> Value {
    let stars: Vec<Value> = catalog
        .stars()
        .iter()
        .map(|cs| {
            json!({
                "name": cs.class.to_string(),
                "class": cs.class,
                "star": cs.star,
            })
        })
        .collect();
    json!({
        "stars": stars,
        "shape_classes": catalog.shape_count(),
    })
}
