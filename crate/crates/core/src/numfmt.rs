//! Small numeric helpers shared by the text formats.

use num_rational::Rational64;

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exponent}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let s = trim_zeros(&s);
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Parses `p`, `p/q` or a decimal literal (decimals are only accepted when exact
/// as a ratio with a power-of-ten denominator).
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational64::new(p, q));
    }
    if let Ok(p) = s.parse::<i64>() {
        return Some(Rational64::from_integer(p));
    }
    let (int, frac) = s.split_once('.')?;
    if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let negative = int.starts_with('-');
    let int_val: i64 = if int.is_empty() || int == "-" {
        0
    } else {
        int.parse().ok()?
    };
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = int_val.abs().checked_mul(den)?.checked_add(frac_val)?;
    Some(Rational64::new(if negative { -num } else { num }, den))
}

/// Parses a real number given as a float literal or as `p/q`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.contains('/') {
        let r = parse_rational(s)?;
        return Some(*r.numer() as f64 / *r.denom() as f64);
    }
    s.parse().ok()
}

pub fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Renders `r * log2(prime)` as `p/q*log2(prime)`, or `p*log2(prime)` for integers.
pub fn render_exact(r: Rational64, prime: u64) -> String {
    if *r.denom() == 1 {
        format!("{}*log2({})", r.numer(), prime)
    } else {
        format!("{}/{}*log2({})", r.numer(), r.denom(), prime)
    }
}

/// Inverse of [`render_exact`]; also accepts `p*log2(r)`.
pub fn parse_exact(s: &str) -> Option<(Rational64, u64)> {
    let (coeff, log) = s.trim().split_once('*')?;
    let prime = log
        .trim()
        .strip_prefix("log2(")?
        .strip_suffix(')')?
        .trim()
        .parse()
        .ok()?;
    Some((parse_rational(coeff)?, prime))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(-0.12256265, 12), "-0.12256265");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(3f64.log2(), 12), "1.58496250072");
        assert_eq!(format_sig(1.5e-9, 12), "1.5e-9");
        assert_eq!(format_sig(0.0, 12), "0");
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6"), Some(Rational64::new(1, 2)));
        assert_eq!(parse_rational("-2"), Some(Rational64::from_integer(-2)));
        assert_eq!(parse_rational("0.25"), Some(Rational64::new(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(Rational64::new(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn exact_round_trip() {
        let s = render_exact(Rational64::new(-3, 2), 3);
        assert_eq!(s, "-3/2*log2(3)");
        assert_eq!(parse_exact(&s), Some((Rational64::new(-3, 2), 3)));
        assert_eq!(parse_exact("2*log2(2)"), Some((Rational64::from_integer(2), 2)));
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
