//! Exact probabilities.
//!
//! Everything that is a probability or a measure is a `Ratio<i128>`. Floats
//! only appear in spectra.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{HdxError, Result};

pub type Rational = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

/// Accepts `"p/q"`, integers and plain decimals such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || HdxError::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 30 {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let den = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let r = Ratio::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

pub fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Scales nonnegative rationals to integers over their least common
/// denominator, so inner loops can add `u128`s.
pub fn common_scale(ws: &[Rational]) -> Result<(Vec<u128>, u128)> {
    let mut den: i128 = 1;
    for w in ws {
        if w.is_negative() {
            return Err(HdxError::InvalidWeights(format!("negative weight {w}")));
        }
        den = den.lcm(w.denom());
        if den > (1i128 << 62) {
            return Err(HdxError::TooLarge("common denominator overflow".into()));
        }
    }
    let nums = ws.iter().map(|w| (w.numer() * (den / w.denom())) as u128).collect();
    Ok((nums, den as u128))
}

pub fn sum<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Rational {
    it.into_iter().fold(Rational::zero(), |a, b| a + b)
}

pub fn is_probability_vector(ws: &[Rational]) -> bool {
    ws.iter().all(|w| !w.is_negative()) && sum(ws) == Rational::one()
}

/// serde adapter writing rationals as `"p/q"` strings and reading strings or numbers.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(serde::de::Error::custom("expected rational")),
        };
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Like [`serde_str`] for optional values; `None` is written as `null`.
pub mod serde_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let v = Option::<serde_json::Value>::deserialize(d)?;
        match v {
            None | Some(serde_json::Value::Null) => Ok(None),
            Some(serde_json::Value::String(s)) => parse_rational(&s).map(Some).map_err(serde::de::Error::custom),
            Some(serde_json::Value::Number(n)) => parse_rational(&n.to_string()).map(Some).map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("expected rational")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/12").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1e-3").is_err());
    }

    #[test]
    fn round_trips_through_text() {
        for r in [rat(0, 1), rat(7, 3), rat(-5, 9), rat(4, 1)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(30, 15), 155117520);
        assert_eq!(factorial(5), 120);
    }

    #[test]
    fn scaling_keeps_ratios() {
        let (nums, den) = common_scale(&[rat(1, 4), rat(1, 6), rat(7, 12)]).unwrap();
        assert_eq!(den, 12);
        assert_eq!(nums, vec![3, 2, 7]);
    }
}
