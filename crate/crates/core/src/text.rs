//! Human-readable number formatting.

/// `x` rounded to `digits` significant digits, without trailing zeros.
pub fn significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    if decimals > 17 {
        // Tiny values read better in scientific form.
        return trim_exponent(&format!("{:.*e}", digits.saturating_sub(1), x));
    }
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn trim_exponent(s: &str) -> String {
    match s.split_once('e') {
        Some((mantissa, exp)) if mantissa.contains('.') => {
            format!("{}e{exp}", mantissa.trim_end_matches('0').trim_end_matches('.'))
        }
        _ => s.to_string(),
    }
}

/// `x` with at most `places` decimal places, without trailing zeros.
pub fn fixed(x: f64, places: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.places$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// Human-facing form of a probability-scale quantity: twelve decimal
/// places, which is twelve significant digits for values in [0.1, 1].
/// Machine-readable outputs keep full precision instead.
pub fn human(x: f64) -> String {
    fixed(x, 12)
}

/// Tolerances in exponent form, e.g. `1e-9`.
pub fn tolerance(x: f64) -> String {
    format!("{x:e}")
}
