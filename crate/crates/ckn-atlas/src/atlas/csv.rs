//! Flat-file rendering of a curve table. The format is frozen: one comment
//! line, one header, one row per grid point, plain decimal numbers with nine
//! significant digits, absent entries as empty fields, `\n` endings. Output
//! is a pure function of the table so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::CurveTable;

/// Plain decimal with `sig` significant digits, no exponent notation.
/// Trailing zeros are kept so column widths stay stable.
pub(crate) fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn push_field(row: &mut String, value: Option<f64>) {
    row.push(',');
    if let Some(v) = value {
        row.push_str(&fmt_sig(v, 9));
    }
}

pub fn render_csv(table: &CurveTable) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "# ckn-atlas d={} theta=critical", table.d);
    text.push_str("p,a_bar,a_star,a_1,a_0,a_c\n");
    for (i, &p) in table.p_grid.iter().enumerate() {
        let mut row = fmt_sig(p, 9);
        push_field(&mut row, table.a_bar[i]);
        push_field(&mut row, table.a_star[i]);
        push_field(&mut row, table.a_1[i]);
        push_field(&mut row, table.a_0[i]);
        push_field(&mut row, Some(table.a_c));
        row.push('\n');
        text.push_str(&row);
    }
    text
}

pub fn emit_csv(table: &CurveTable, destination: &Path) -> Result<()> {
    table.validate()?;
    std::fs::write(destination, render_csv(table)).map_err(|source| Error::Io {
        path: destination.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_table() -> CurveTable {
        CurveTable {
            d: 5,
            version: "0.0.0",
            p_grid: vec![2.1, 2.2, 2.3],
            a_bar: vec![Some(-0.512195122), Some(-0.523809524), Some(-0.534883721)],
            a_star: vec![Some(-0.1), None, Some(-0.3)],
            a_1: vec![Some(0.25), Some(0.26), Some(0.27)],
            a_0: vec![Some(1.0), Some(1.1), Some(1.2)],
            a_c: 1.5,
        }
    }

    #[test]
    fn three_rows_make_five_lines() {
        let text = render_csv(&toy_table());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "# ckn-atlas d=5 theta=critical");
        assert_eq!(lines[1], "p,a_bar,a_star,a_1,a_0,a_c");
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn absent_entries_render_as_empty_fields() {
        let text = render_csv(&toy_table());
        let second_row = text.lines().nth(3).unwrap();
        assert_eq!(
            second_row,
            "2.20000000,-0.523809524,,0.260000000,1.10000000,1.50000000"
        );
    }

    #[test]
    fn rendering_is_deterministic() {
        let t = toy_table();
        assert_eq!(render_csv(&t), render_csv(&t));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0, 9), "0");
        assert_eq!(fmt_sig(-0.0, 9), "0");
        assert_eq!(fmt_sig(2.05, 9), "2.05000000");
        assert_eq!(fmt_sig(-0.32436, 9), "-0.324360000");
        assert_eq!(fmt_sig(1.5, 9), "1.50000000");
        assert_eq!(fmt_sig(123.456789123, 9), "123.456789");
        assert_eq!(fmt_sig(0.000123456789, 9), "0.000123456789");
    }

    #[test]
    fn files_round_trip_on_disk() {
        let t = toy_table();
        let path = std::env::temp_dir().join("ckn-atlas-csv-test.csv");
        emit_csv(&t, &path).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert_eq!(body, render_csv(&t));
        std::fs::remove_file(&path).ok();

        let missing = std::env::temp_dir().join("no-such-dir-ckn").join("x.csv");
        assert!(matches!(
            emit_csv(&t, &missing),
            Err(Error::Io { .. })
        ));
    }
}
