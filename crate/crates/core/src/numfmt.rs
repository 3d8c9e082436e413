/// Formats `x` with 12 significant digits, trimming trailing zeros.
/// The output parses back to the same value after one rounding pass.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

/// Rounds `x` to the value `sig12` would print.
pub fn round12(x: f64) -> f64 {
    sig12(x).parse().unwrap_or(x)
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig12(7.0), "7");
        assert_eq!(sig12(-1.5), "-1.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0f64.log2() + 1e-15), "1");
        assert_eq!(sig12(1234567.0), "1234567");
        assert_eq!(sig12(1e-7), "1e-7");
        assert_eq!(sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(sig12(0.000123), "0.000123");
    }

    #[test]
    fn round_is_stable() {
        for &x in &[0.1, 2.0404, 13.287712379549449, 1e-9 / 7.0, 123456.789e10] {
            let r = round12(x);
            assert_eq!(sig12(r), sig12(x));
            assert_eq!(round12(r), r);
        }
    }
}
