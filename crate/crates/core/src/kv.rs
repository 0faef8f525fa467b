//! Shared plain-text conventions for exports: `key = value` lines with
//! dotted keys, floats in scientific notation with 17 significant digits
//! (enough to round-trip any f64), lines starting with `#` reserved for
//! comments.

/// Formats a float with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Appends one `key = value` line.
pub fn push_line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&value.to_string());
    out.push('\n');
}
