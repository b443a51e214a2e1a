//! Locale-independent number formatting.

/// `%.{digits}g`-style rendering: `digits` significant digits, trailing
/// zeros trimmed, scientific notation outside `1e-4 <= |x| < 10^digits`.
pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Six significant digits, the precision of every emitted table.
pub fn g6(x: f64) -> String {
    sig(x, 6)
}

/// Exact round-trip representation (17 significant digits).
pub fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(g6(0.0), "0");
        assert_eq!(g6(1.0), "1");
        assert_eq!(g6(16.666_666_666), "16.6667");
        assert_eq!(g6(-0.000_123_456_78), "-0.000123457");
        assert_eq!(g6(43.75), "43.75");
        assert_eq!(g6(999_999.6), "1e6");
        assert_eq!(g6(1_234_567.0), "1.23457e6");
        assert_eq!(g6(0.000_001_5), "1.5e-6");
        assert_eq!(g6(175.0), "175");
        assert_eq!(g6(f64::NAN), "nan");
    }

    proptest! {
        #[test]
        fn exact_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(exact(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }

        #[test]
        fn six_digits_are_close(x in -1e9f64..1e9) {
            let y: f64 = g6(x).parse().unwrap();
            prop_assert!((y - x).abs() <= 5e-6 * x.abs() + 1e-300);
        }
    }
}
