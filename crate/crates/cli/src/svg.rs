use std::collections::HashMap;
use std::io::Write;

use anyhow::{bail, Result};
use dapc_core::{Dataset, NOISE};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

fn color(index: usize) -> String {
    let hue = (index as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},70%,45%)")
}

/// Scatter plot with one fill color per label; noise is a small grey hollow
/// marker.
pub fn write<W: Write>(mut out: W, data: &Dataset, labels: &[i64]) -> Result<()> {
    if data.dim() != 2 {
        bail!(
            "SVG output needs 2-dimensional data, got {} dimensions",
            data.dim()
        );
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in data.iter() {
        for a in 0..2 {
            lo[a] = lo[a].min(p.coords[a]);
            hi[a] = hi[a].max(p.coords[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * MARGIN) / span;

    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    let mut palette: HashMap<i64, String> = HashMap::new();
    for (p, &label) in data.iter().zip(labels) {
        let x = MARGIN + (p.coords[0] - lo[0]) * scale;
        let y = SIZE - MARGIN - (p.coords[1] - lo[1]) * scale;
        if label == NOISE {
            writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="none" stroke="grey" class="noise"/>"#
            )?;
        } else {
            let next = palette.len();
            let fill = palette.entry(label).or_insert_with(|| color(next));
            writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{fill}" data-label="{label}"/>"#
            )?;
        }
    }
    writeln!(out, "</svg>")?;
    out.flush()?;
    Ok(())
}
