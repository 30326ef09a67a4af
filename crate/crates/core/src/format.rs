//! Deterministic number formatting for CSV and JSON output: `.` decimal
//! separator, 17 significant digits, bit-stable across runs.

/// Format a float with 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Avoid the "-0" wrinkle so identical values print identically.
        return "0.0000000000000000e0".into();
    }
    format!("{v:.16e}")
}

/// Format an integer count.
pub fn fmt_usize(v: usize) -> String {
    v.to_string()
}
