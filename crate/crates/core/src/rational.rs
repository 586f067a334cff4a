//! Exact rational helpers: decimal parsing and rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

const SIGNIFICANT_DIGITS: usize = 17;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a plain or scientific decimal literal (`-1.25`, `3`, `4.5e-3`) exactly.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .bytes()
        .chain(frac.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{whole}{frac}");
    let mut value =
        Rational::from_integer(all.parse::<BigInt>().unwrap_or_else(|_| BigInt::zero()));
    let scale = exponent - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Renders a rational as a decimal: exactly when the expansion terminates within
/// 17 significant digits, otherwise rounded to 17 significant digits.
pub fn render_decimal(value: &Rational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let negative = value.is_negative();
    let abs = value.abs();
    let ten = BigInt::from(10);

    // Position of the leading digit: find e with 10^e <= abs < 10^(e+1).
    let mut exp10: i64 =
        (abs.numer().to_string().len() as i64) - (abs.denom().to_string().len() as i64);
    loop {
        let lower = pow10(exp10);
        if abs < lower {
            exp10 -= 1;
            continue;
        }
        if abs >= pow10(exp10 + 1) {
            exp10 += 1;
            continue;
        }
        break;
    }
    // Scale so that SIGNIFICANT_DIGITS digits sit left of the point.
    let shift = SIGNIFICANT_DIGITS as i64 - 1 - exp10;
    let scaled = &abs * pow10(shift);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut digits = q.clone();
    let exact = r.is_zero();
    if !exact {
        // round half up
        if (r * 2u32) >= *scaled.denom() {
            digits += 1u32;
        }
    }
    let mut shift = shift;
    let mut digits = digits;
    // strip trailing zeros
    while shift > 0 && (&digits % &ten).is_zero() {
        digits /= &ten;
        shift -= 1;
    }
    let mut text = digits.to_string();
    let body = if shift <= 0 {
        text.push_str(&"0".repeat((-shift) as usize));
        text
    } else if (text.len() as i64) > shift {
        let split = text.len() - shift as usize;
        format!("{}.{}", &text[..split], &text[split..])
    } else {
        format!("0.{}{}", "0".repeat(shift as usize - text.len()), text)
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn pow10(exp: i64) -> Rational {
    let ten = Rational::from_integer(BigInt::from(10));
    if exp >= 0 {
        num_traits::pow(ten, exp as usize)
    } else {
        Rational::one() / num_traits::pow(ten, (-exp) as usize)
    }
}

/// Parses `p/q` exactly, falling back to [`parse_decimal`].
pub fn parse_rational(text: &str) -> Option<Rational> {
    match text.trim().split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| Rational::new(p, q))
        }
        None => parse_decimal(text),
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `|a - b| <= tol` in exact arithmetic.
pub fn within(a: &Rational, b: &Rational, tol: &Rational) -> bool {
    (a - b).abs() <= *tol
}

pub fn is_integral_within(value: &Rational, tol: &Rational) -> bool {
    let nearest = value.round();
    within(value, &nearest, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_scientific() {
        assert_eq!(parse_decimal("0.001"), Some(ratio(1, 1000)));
        assert_eq!(parse_decimal("-2.5"), Some(ratio(-5, 2)));
        assert_eq!(parse_decimal("1e-3"), Some(ratio(1, 1000)));
        assert_eq!(parse_decimal("9.5E1"), Some(int(95)));
        assert_eq!(parse_decimal("3"), Some(int(3)));
        assert_eq!(parse_decimal(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_decimal("abc"), None);
        assert_eq!(parse_decimal("1.2.3"), None);
        assert_eq!(parse_decimal(""), None);
    }

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("6277/27000"), Some(ratio(6277, 27000)));
        assert_eq!(parse_rational("-1/3"), Some(ratio(-1, 3)));
        assert_eq!(parse_rational("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational(&ratio(5, 7).to_string()), Some(ratio(5, 7)));
    }

    #[test]
    fn renders_terminating_exactly() {
        assert_eq!(render_decimal(&ratio(1, 10)), "0.1");
        assert_eq!(render_decimal(&ratio(-3, 8)), "-0.375");
        assert_eq!(render_decimal(&int(42)), "42");
        assert_eq!(render_decimal(&ratio(1, 1000)), "0.001");
        assert_eq!(render_decimal(&ratio(25, 2)), "12.5");
    }

    #[test]
    fn renders_repeating_with_17_digits() {
        assert_eq!(render_decimal(&ratio(1, 3)), "0.33333333333333333");
        assert_eq!(render_decimal(&ratio(2, 3)), "0.66666666666666667");
        assert_eq!(render_decimal(&ratio(1, 62)), "0.016129032258064516");
        assert_eq!(render_decimal(&ratio(100, 3)), "33.333333333333333");
    }

    #[test]
    fn render_parse_round_trip_for_terminating() {
        for (n, d) in [(1, 4), (7, 20), (-13, 1000), (123456789, 100)] {
            let r = ratio(n, d);
            assert_eq!(parse_decimal(&render_decimal(&r)), Some(r));
        }
    }
}
