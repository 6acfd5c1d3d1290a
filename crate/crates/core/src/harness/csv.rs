//! Trace serialization.

use std::fmt::Write;

use crate::solvers::{Trace, TraceRow};

pub const TRACE_HEADER: &str = "iter,wall_time_s,f,grad_x_norm,grad_y_norm,dist_x,dist_y,cg_iters_x,cg_iters_y";

/// Columns after `iter`, in header order.
pub const TRACE_FIELDS: [&str; 8] = ["wall_time_s", "f", "grad_x_norm", "grad_y_norm", "dist_x", "dist_y", "cg_iters_x", "cg_iters_y"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvFormat {
    /// Significant digits; `None` is shortest round-trip.
    pub precision: Option<usize>,
    pub wall_time: bool,
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-5, 1e16)` so tiny residuals stay short.
pub fn format_float(v: f64, precision: Option<usize>) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    match precision {
        Some(p) => {
            let s = format!("{:.*e}", p.saturating_sub(1), v);
            s.parse::<f64>().map(|r| shortest(r)).unwrap_or(s)
        }
        None => shortest(v),
    }
}

fn shortest(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn push_cells(out: &mut String, row: &TraceRow, fmt: CsvFormat) {
    let f = |v: f64| format_float(v, fmt.precision);
    let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
    let wall = if fmt.wall_time { f(row.wall_time_s) } else { String::new() };
    let _ = write!(
        out,
        "{wall},{},{},{},{},{},{},{}",
        f(row.f),
        f(row.grad_x_norm),
        f(row.grad_y_norm),
        opt(row.dist_x),
        opt(row.dist_y),
        row.cg_iters_x,
        row.cg_iters_y
    );
}

pub fn trace_to_csv(trace: &Trace, fmt: CsvFormat) -> String {
    let mut out = String::with_capacity(64 * (trace.rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in &trace.rows {
        let _ = write!(out, "{},", row.iter);
        push_cells(&mut out, row, fmt);
        out.push('\n');
    }
    out
}

/// One column group per labelled trace, rows aligned by iteration. Cells of
/// traces that stopped early are left empty.
pub fn aligned_csv(traces: &[(String, &Trace)], fmt: CsvFormat) -> String {
    let mut out = String::from("iter");
    for (label, _) in traces {
        for field in TRACE_FIELDS {
            let _ = write!(out, ",{label}.{field}");
        }
    }
    out.push('\n');
    let len = traces.iter().map(|(_, t)| t.rows.len()).max().unwrap_or(0);
    let blank = ",".repeat(TRACE_FIELDS.len() - 1);
    for i in 0..len {
        let _ = write!(out, "{i}");
        for (_, trace) in traces {
            out.push(',');
            match trace.rows.get(i) {
                Some(row) => push_cells(&mut out, row, fmt),
                None => out.push_str(&blank),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, 0.1, 1.0 / 3.0, -2.5e-12, 1e300, 123456.789, f64::MIN_POSITIVE, 4e-6] {
            let s = format_float(v, None);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_float(0.1, None), "0.1");
        assert_eq!(format_float(1e-20, None), "1e-20");
        assert_eq!(format_float(1.0 / 3.0, Some(3)), "0.333");
        assert_eq!(format_float(f64::NAN, None), "nan");
    }
}
