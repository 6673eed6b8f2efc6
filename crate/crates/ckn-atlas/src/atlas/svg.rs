//! Hand-rolled SVG rendering of a curve table: one polyline per threshold
//! curve, a dashed horizontal line at a_c, and translucent bands between
//! consecutive curves. Pure string assembly, deterministic for a fixed table.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::CurveTable;

const W: f64 = 900.0;
const H: f64 = 620.0;
const ML: f64 = 70.0;
const MR: f64 = 25.0;
const MT: f64 = 45.0;
const MB: f64 = 50.0;

/// Curve order from bottom to top of the diagram, with the stroke palette.
const CURVES: [(&str, &str); 4] = [
    ("a_bar", "#d62728"),
    ("a_star", "#1f77b4"),
    ("a_1", "#2ca02c"),
    ("a_0", "#9467bd"),
];

struct Frame {
    p_lo: f64,
    p_hi: f64,
    a_lo: f64,
    a_hi: f64,
}

impl Frame {
    fn fx(&self, p: f64) -> f64 {
        ML + (p - self.p_lo) / (self.p_hi - self.p_lo) * (W - ML - MR)
    }

    fn fy(&self, a: f64) -> f64 {
        // svg y grows downward
        H - MB - (a - self.a_lo) / (self.a_hi - self.a_lo) * (H - MT - MB)
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn point_runs(frame: &Frame, grid: &[f64], col: &[Option<f64>]) -> Vec<Vec<(f64, f64)>> {
    let mut runs = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    for (i, &p) in grid.iter().enumerate() {
        match col[i] {
            Some(a) => current.push((frame.fx(p), frame.fy(a))),
            None => {
                if current.len() >= 2 {
                    runs.push(std::mem::take(&mut current));
                } else {
                    current.clear();
                }
            }
        }
    }
    if current.len() >= 2 {
        runs.push(current);
    }
    runs
}

fn points_attr(points: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", px(*x), px(*y));
    }
    s
}

pub fn render_svg(table: &CurveTable) -> Result<String> {
    table.validate()?;
    if table.p_grid.len() < 2 {
        return Err(Error::precondition("an svg render needs at least 2 grid points"));
    }

    let columns = [&table.a_bar, &table.a_star, &table.a_1, &table.a_0];
    let finite_min = columns
        .iter()
        .flat_map(|c| c.iter().flatten())
        .fold(f64::INFINITY, |m, &v| m.min(v));
    let a_lo_raw = if finite_min.is_finite() { finite_min } else { table.a_c - 1.0 };
    let span = (table.a_c - a_lo_raw).max(1e-9);
    let frame = Frame {
        p_lo: table.p_grid[0],
        p_hi: *table.p_grid.last().unwrap(),
        a_lo: a_lo_raw - 0.08 * span,
        a_hi: table.a_c + 0.08 * span,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" \
         font-family=\"monospace\" font-size=\"13\" data-tool=\"ckn-atlas {}\" \
         data-d=\"{}\" data-theta=\"critical\">",
        W as u32, H as u32, table.version, table.d
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>",
        px(ML),
        px(MT),
        px(W - ML - MR),
        px(H - MT - MB)
    );

    // bottom-to-top stack of everything drawable, a_c as a constant pseudo
    // curve so the topmost band reaches it
    let n = table.p_grid.len();
    let a_c_col = vec![Some(table.a_c); n];
    let mut stack: Vec<(&str, &str, &[Option<f64>])> = Vec::new();
    for (i, (name, color)) in CURVES.iter().enumerate() {
        if columns[i].iter().any(|v| v.is_some()) {
            stack.push((name, color, columns[i]));
        }
    }
    stack.push(("a_c", "#777777", &a_c_col));

    // translucent bands between consecutive present curves
    for pair in stack.windows(2) {
        let (_, _, low) = pair[0];
        let (_, upper_color, high) = pair[1];
        let both: Vec<Option<f64>> = (0..n)
            .map(|i| match (low[i], high[i]) {
                (Some(_), Some(_)) => Some(1.0),
                _ => None,
            })
            .collect();
        for run in index_runs(&both) {
            if run.len() < 2 {
                continue;
            }
            let mut pts: Vec<(f64, f64)> = run
                .iter()
                .map(|&i| (frame.fx(table.p_grid[i]), frame.fy(low[i].unwrap())))
                .collect();
            pts.extend(
                run.iter()
                    .rev()
                    .map(|&i| (frame.fx(table.p_grid[i]), frame.fy(high[i].unwrap()))),
            );
            let _ = writeln!(
                svg,
                "<polygon fill=\"{}\" fill-opacity=\"0.10\" stroke=\"none\" points=\"{}\"/>",
                upper_color,
                points_attr(&pts)
            );
        }
    }

    // the curves themselves, split at gaps
    for (i, (_, color)) in CURVES.iter().enumerate() {
        for run in point_runs(&frame, &table.p_grid, columns[i]) {
            let _ = writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>",
                color,
                points_attr(&run)
            );
        }
    }

    // critical exponent line
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" \
         stroke-width=\"1.4\" stroke-dasharray=\"7 4\"/>",
        px(ML),
        px(frame.fy(table.a_c)),
        px(W - MR),
        px(frame.fy(table.a_c))
    );

    // axis ticks and labels
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let p = frame.p_lo + f * (frame.p_hi - frame.p_lo);
        let x = frame.fx(p);
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#999\"/>",
            px(x),
            px(H - MB),
            px(H - MB + 5.0)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.2}</text>",
            px(x),
            px(H - MB + 20.0),
            p
        );
        let a = frame.a_lo + f * (frame.a_hi - frame.a_lo);
        let y = frame.fy(a);
        let _ = writeln!(
            svg,
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#999\"/>",
            px(y),
            px(ML - 5.0),
            px(ML)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.2}</text>",
            px(ML - 9.0),
            px(y + 4.0),
            a
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">p</text>",
        px(ML + 0.5 * (W - ML - MR)),
        px(H - 10.0)
    );
    let _ = writeln!(svg, "<text x=\"16\" y=\"{}\">a</text>", px(MT + 0.5 * (H - MT - MB)));

    // legend row above the plot frame
    let mut lx = ML;
    let ly = MT - 10.0;
    for (name, color, _) in &stack {
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/>",
            px(lx),
            px(ly),
            px(lx + 20.0),
            px(ly),
            color
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            px(lx + 25.0),
            px(ly + 4.0),
            name
        );
        lx += 108.0;
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">d = {}</text>",
        px(W - MR),
        px(ly + 4.0),
        table.d
    );

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn index_runs(col: &[Option<f64>]) -> Vec<Vec<usize>> {
    let mut runs = Vec::new();
    let mut current = Vec::new();
    for (i, v) in col.iter().enumerate() {
        if v.is_some() {
            current.push(i);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

pub fn emit_svg(table: &CurveTable, destination: &Path) -> Result<()> {
    let body = render_svg(table)?;
    std::fs::write(destination, body).map_err(|source| Error::Io {
        path: destination.to_path_buf(),
        source,
    })
}

/// Just enough of an XML parser to decide balance: tags must nest, exactly
/// one root element, quotes inside tags are respected, comments and `<?...?>`
/// are skipped. No entity or schema checks.
pub(crate) fn is_well_formed_xml(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut stack: Vec<&str> = Vec::new();
    let mut root_closed = false;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            if stack.is_empty() && !bytes[i].is_ascii_whitespace() {
                return false;
            }
            i += 1;
            continue;
        }
        let start = i + 1;
        if text[start..].starts_with("!--") {
            match text[start + 3..].find("-->") {
                Some(j) => {
                    i = start + 3 + j + 3;
                    continue;
                }
                None => return false,
            }
        }
        let mut quote: Option<u8> = None;
        let mut end = None;
        let mut j = start;
        while j < bytes.len() {
            match (quote, bytes[j]) {
                (None, b'"') => quote = Some(b'"'),
                (None, b'\'') => quote = Some(b'\''),
                (Some(q), c) if c == q => quote = None,
                (None, b'>') => {
                    end = Some(j);
                    break;
                }
                (None, b'<') => return false,
                _ => {}
            }
            j += 1;
        }
        let Some(end) = end else { return false };
        let inner = &text[start..end];
        if inner.is_empty() {
            return false;
        }
        if inner.starts_with('?') {
            if !inner.ends_with('?') {
                return false;
            }
        } else if let Some(rest) = inner.strip_prefix('/') {
            match stack.pop() {
                Some(open) if open == rest.trim() => {
                    if stack.is_empty() {
                        root_closed = true;
                    }
                }
                _ => return false,
            }
        } else {
            let body = inner.strip_suffix('/').unwrap_or(inner);
            let Some(name) = body.split_whitespace().next() else {
                return false;
            };
            if !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_:.".contains(c))
            {
                return false;
            }
            if stack.is_empty() && root_closed {
                return false;
            }
            if inner.ends_with('/') {
                if stack.is_empty() {
                    root_closed = true;
                }
            } else {
                stack.push(name);
            }
        }
        i = end + 1;
    }
    stack.is_empty() && root_closed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_table(gap_in_a_star: bool) -> CurveTable {
        let n = 6;
        let p_grid: Vec<f64> = (0..n).map(|i| 2.2 + 0.1 * i as f64).collect();
        let mut a_star: Vec<Option<f64>> =
            (0..n).map(|i| Some(-0.30 + 0.02 * i as f64)).collect();
        if gap_in_a_star {
            a_star[3] = None;
        }
        CurveTable {
            d: 5,
            version: "0.0.0",
            p_grid,
            a_bar: (0..n).map(|i| Some(-0.52 + 0.01 * i as f64)).collect(),
            a_star,
            a_1: (0..n).map(|i| Some(0.20 + 0.01 * i as f64)).collect(),
            a_0: (0..n).map(|i| Some(1.00 + 0.02 * i as f64)).collect(),
            a_c: 1.5,
        }
    }

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn full_table_renders_four_curves_and_is_well_formed() {
        let body = render_svg(&toy_table(false)).unwrap();
        assert!(is_well_formed_xml(&body), "svg not well formed:\n{body}");
        assert_eq!(count(&body, "<polyline"), 4);
        assert_eq!(count(&body, "stroke-dasharray"), 1);
        assert_eq!(count(&body, "<polygon"), 4);
        assert!(body.contains("data-d=\"5\""));
        assert_eq!(body, render_svg(&toy_table(false)).unwrap());
    }

    #[test]
    fn gaps_split_curves_and_bands() {
        let body = render_svg(&toy_table(true)).unwrap();
        assert!(is_well_formed_xml(&body));
        // a_star splits in two, its two neighbouring bands split as well
        assert_eq!(count(&body, "<polyline"), 5);
        assert_eq!(count(&body, "<polygon"), 6);
    }

    #[test]
    fn empty_columns_drop_their_polyline() {
        let mut t = toy_table(false);
        t.a_1 = vec![None; t.p_grid.len()];
        t.a_0 = vec![None; t.p_grid.len()];
        let body = render_svg(&t).unwrap();
        assert!(is_well_formed_xml(&body));
        assert_eq!(count(&body, "<polyline"), 2);
        // bands compact across the missing curves: a_bar/a_star, a_star/a_c
        assert_eq!(count(&body, "<polygon"), 2);
    }

    #[test]
    fn tiny_tables_are_rejected() {
        let mut t = toy_table(false);
        t.p_grid.truncate(1);
        t.a_bar.truncate(1);
        t.a_star.truncate(1);
        t.a_1.truncate(1);
        t.a_0.truncate(1);
        assert!(render_svg(&t).is_err());
    }

    #[test]
    fn xml_checker_catches_broken_nesting() {
        assert!(is_well_formed_xml("<svg/>"));
        assert!(is_well_formed_xml("<a><b x=\"1>2\"/><c></c></a>"));
        assert!(is_well_formed_xml("<?xml version=\"1.0\"?>\n<a>text</a>\n"));
        assert!(is_well_formed_xml("<a><!-- <not a tag> --></a>"));
        assert!(!is_well_formed_xml(""));
        assert!(!is_well_formed_xml("<svg><line></svg>"));
        assert!(!is_well_formed_xml("<a></b>"));
        assert!(!is_well_formed_xml("<a>"));
        assert!(!is_well_formed_xml("<a/><b/>"));
        assert!(!is_well_formed_xml("stray<a/>"));
        assert!(!is_well_formed_xml("<a/>stray"));
        assert!(!is_well_formed_xml("<a b=\"unterminated></a>"));
    }

    #[test]
    fn files_land_on_disk() {
        let t = toy_table(false);
        let path = std::env::temp_dir().join("ckn-atlas-svg-test.svg");
        emit_svg(&t, &path).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert!(is_well_formed_xml(&body));
        std::fs::remove_file(&path).ok();
    }
}
