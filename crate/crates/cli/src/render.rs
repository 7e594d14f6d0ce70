//! Linkage-diagram emitter: a relation drawn between the letter
//! occurrences of its source formula (top row) and target formula (bottom
//! row), as ASCII art, DOT, or SVG. Output is byte-deterministic.

use bicoh_core::{Formula, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Ascii,
    Dot,
    Svg,
}

/// Occurrence labels and columns for one row of the diagram.
#[derive(Debug, Clone)]
pub struct RowSpec {
    pub text: String,
    /// (label, column) per letter occurrence, in occurrence order.
    pub occurrences: Vec<(String, usize)>,
}

/// Layout of a two-row linkage diagram.
#[derive(Debug, Clone)]
pub struct DiagramSpec {
    pub top: RowSpec,
    pub bottom: RowSpec,
    pub links: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("relation type {rel_src}->{rel_tgt} does not match formulas with {src_count} and {tgt_count} occurrences")]
pub struct DimensionError {
    pub rel_src: usize,
    pub rel_tgt: usize,
    pub src_count: usize,
    pub tgt_count: usize,
}

fn row_spec(formula: &Formula) -> RowSpec {
    let text = formula.to_string();
    let bytes = text.as_bytes();
    let mut occurrences = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_lowercase() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit()) {
                i += 1;
            }
            occurrences.push((text[start..i].to_string(), start));
        } else {
            i += 1;
        }
    }
    RowSpec { text, occurrences }
}

pub fn diagram_spec(
    rel: &Relation,
    src: &Formula,
    tgt: &Formula,
) -> Result<DiagramSpec, DimensionError> {
    let top = row_spec(src);
    let bottom = row_spec(tgt);
    if rel.src != top.occurrences.len() || rel.tgt != bottom.occurrences.len() {
        return Err(DimensionError {
            rel_src: rel.src,
            rel_tgt: rel.tgt,
            src_count: top.occurrences.len(),
            tgt_count: bottom.occurrences.len(),
        });
    }
    Ok(DiagramSpec { top, bottom, links: rel.pairs().collect() })
}

pub fn render(
    rel: &Relation,
    src: &Formula,
    tgt: &Formula,
    emit: Emit,
) -> Result<String, DimensionError> {
    let spec = diagram_spec(rel, src, tgt)?;
    Ok(match emit {
        Emit::Ascii => ascii(&spec),
        Emit::Dot => dot(&spec),
        Emit::Svg => svg(&spec),
    })
}

const BAND_HEIGHT: usize = 4;

fn ascii(spec: &DiagramSpec) -> String {
    let width = spec.top.text.len().max(spec.bottom.text.len()) + 1;
    let mut band = vec![vec![b' '; width]; BAND_HEIGHT];
    for &(x, y) in &spec.links {
        let c0 = spec.top.occurrences[x].1 as isize;
        let c1 = spec.bottom.occurrences[y].1 as isize;
        for (row, cell) in band.iter_mut().enumerate() {
            // interpolate between the rows just below the top text and
            // just above the bottom text
            let t_num = row as isize + 1;
            let t_den = BAND_HEIGHT as isize + 1;
            let col = c0 + ((c1 - c0) * t_num + t_den / 2) / t_den;
            let glyph = match c1.cmp(&c0) {
                std::cmp::Ordering::Equal => b'|',
                std::cmp::Ordering::Greater => b'\\',
                std::cmp::Ordering::Less => b'/',
            };
            let col = col.clamp(0, width as isize - 1) as usize;
            cell[col] = if cell[col] == b' ' { glyph } else { b'X' };
        }
    }
    let mut out = String::new();
    out.push_str(&spec.top.text);
    out.push('\n');
    for row in band {
        out.push_str(String::from_utf8_lossy(&row).trim_end());
        out.push('\n');
    }
    out.push_str(&spec.bottom.text);
    out.push('\n');
    let links: Vec<String> =
        spec.links.iter().map(|(x, y)| format!("{x}-{y}")).collect();
    out.push_str(&format!("links: {}\n", if links.is_empty() { "(none)".to_string() } else { links.join(" ") }));
    out
}

fn dot(spec: &DiagramSpec) -> String {
    let mut out = String::from("digraph linkage {\n  rankdir=TB;\n  node [shape=plaintext];\n");
    out.push_str("  { rank=source;");
    for (i, (label, _)) in spec.top.occurrences.iter().enumerate() {
        out.push_str(&format!(" s{i} [label=\"{label}\"];"));
    }
    out.push_str(" }\n  { rank=sink;");
    for (i, (label, _)) in spec.bottom.occurrences.iter().enumerate() {
        out.push_str(&format!(" t{i} [label=\"{label}\"];"));
    }
    out.push_str(" }\n");
    for (x, y) in &spec.links {
        out.push_str(&format!("  s{x} -> t{y} [arrowhead=none];\n"));
    }
    out.push_str("}\n");
    out
}

const SVG_STEP: usize = 40;
const SVG_MARGIN: usize = 20;
const SVG_ROW_GAP: usize = 40;

fn svg(spec: &DiagramSpec) -> String {
    let cols = spec.top.occurrences.len().max(spec.bottom.occurrences.len()).max(1);
    let width = 2 * SVG_MARGIN + (cols - 1) * SVG_STEP + SVG_STEP;
    let height = 2 * SVG_MARGIN + SVG_ROW_GAP;
    let top_y = SVG_MARGIN;
    let bottom_y = SVG_MARGIN + SVG_ROW_GAP;
    let x_of = |i: usize| SVG_MARGIN + i * SVG_STEP;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    for (i, (label, _)) in spec.top.occurrences.iter().enumerate() {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\">{}</text>\n",
            x_of(i),
            top_y,
            label
        ));
    }
    for (i, (label, _)) in spec.bottom.occurrences.iter().enumerate() {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\">{}</text>\n",
            x_of(i),
            bottom_y + 10,
            label
        ));
    }
    for (x, y) in &spec.links {
        out.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            x_of(*x),
            top_y + 5,
            x_of(*y),
            bottom_y,
        ));
    }
    out.push_str("</svg>\n");
    out
}
