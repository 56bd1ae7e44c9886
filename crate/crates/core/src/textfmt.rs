//! Number formatting for CSV and JSON output.

/// Rounds `x` to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// `x` at 12 significant digits in the shortest decimal form that parses
/// back to the rounded value.
pub fn sig12(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        "0".to_string()
    } else if r.is_nan() {
        "NaN".to_string()
    } else if r.is_infinite() {
        if r > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{r}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(1.0 / 3.0e9), "0.000000000333333333333");
        assert_eq!(sig12(f64::INFINITY), "inf");
    }
}
