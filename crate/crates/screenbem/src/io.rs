//! Serialisation helpers: full-precision number formatting and CSV assembly.

use std::fmt::Write as _;

/// Formats a double with 17 significant digits (exact round trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV line from string fields.
pub fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

/// Builds a CSV document (header plus rows), '\n' separated with a trailing
/// newline.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip_is_exact() {
        for &x in &[0.1, std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -4.9e-324] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let doc = csv_document(&["a", "b"], &[vec!["1".into(), "2".into()]]);
        assert_eq!(doc, "a,b\n1,2\n");
    }
}
