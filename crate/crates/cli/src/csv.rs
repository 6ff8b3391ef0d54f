//! CSV rendering of a finished sweep.
//!
//! One header line, then one line per receiver distance. The header is
//! `d2_m` followed by `<strategy>_dbm` in the sweep's strategy order.
//! Every number is written as `{:.5e}` (six significant digits) so the
//! file is byte-identical across platforms and reruns; line endings are
//! a bare `\n`.

use std::fmt::Write as _;
use std::io::{self, Write};

use ris_core::experiment::SweepResult;

/// Renders the sweep as CSV text.
pub fn csv_bytes(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str("d2_m");
    for id in &result.strategies {
        let _ = write!(out, ",{}_dbm", id.snake_name());
    }
    out.push('\n');
    for row in &result.rows {
        let _ = write!(out, "{:.5e}", row.d2);
        for outcome in &row.outcomes {
            let _ = write!(out, ",{:.5e}", outcome.reported_dbm);
        }
        out.push('\n');
    }
    out
}

/// Writes [`csv_bytes`] to `sink` and reports how many bytes went out.
pub fn emit_csv(result: &SweepResult, sink: &mut impl Write) -> io::Result<usize> {
    let text = csv_bytes(result);
    sink.write_all(text.as_bytes())?;
    Ok(text.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ris_core::experiment::run_sweep;

    fn tiny_result() -> SweepResult {
        let mut spec = ris_core::experiment::preset_fig5();
        spec.d2_values = vec![1.0, 2.0];
        run_sweep(&spec).unwrap()
    }

    #[test]
    fn header_names_distances_then_strategies() {
        let text = csv_bytes(&tiny_result());
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("d2_m,ris0_dbm,ris1_dbm"));
        assert_eq!(lines.count(), 2);
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn every_value_uses_six_significant_digits() {
        let text = csv_bytes(&tiny_result());
        for line in text.lines().skip(1) {
            for field in line.split(',') {
                assert!(field.contains('e'), "field `{field}` is not scientific");
                let mantissa = &field[..field.find('e').unwrap()];
                let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
                assert_eq!(digits, 6, "field `{field}`");
                assert!(field.parse::<f64>().is_ok(), "field `{field}`");
            }
        }
    }

    #[test]
    fn rendering_is_reproducible() {
        let a = csv_bytes(&tiny_result());
        let b = csv_bytes(&tiny_result());
        assert_eq!(a, b);
        let mut sink = Vec::new();
        let n = emit_csv(&tiny_result(), &mut sink).unwrap();
        assert_eq!(n, a.len());
        assert_eq!(sink, a.as_bytes());
    }
}
