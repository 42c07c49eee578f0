//! Number formatting shared by every output file.

/// Formats like C's `%.9g`: nine significant digits, trailing zeros
/// removed, exponent notation outside `1e-4 ≤ |x| < 1e9`.
pub fn g9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        format!("{}e{exp}", trim_fraction(mantissa))
    } else {
        let digits = (8 - exp) as usize;
        trim_fraction(&format!("{x:.digits$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `g9` for optional values; `None` becomes an empty field.
pub fn g9_opt(x: Option<f64>) -> String {
    x.map(g9).unwrap_or_default()
}
