//! Exact weights in rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Enumeration;

pub fn pow_ratio(base: &BigRational, e: u32) -> BigRational {
    num_traits::pow::pow(base.clone(), e as usize)
}

/// `x^o n^L` for every configuration, indexed by face mask.
pub fn rational_weights(en: &Enumeration, n: &BigRational, x: &BigRational) -> Vec<BigRational> {
    en.stats()
        .iter()
        .map(|s| pow_ratio(x, s.o) * pow_ratio(n, s.loops))
        .collect()
}

pub fn rational_partition_function(
    en: &Enumeration,
    n: &BigRational,
    x: &BigRational,
) -> BigRational {
    rational_weights(en, n, x)
        .into_iter()
        .fold(BigRational::zero(), |a, w| a + w)
}

pub fn rational_probabilities(
    en: &Enumeration,
    n: &BigRational,
    x: &BigRational,
) -> Vec<BigRational> {
    let w = rational_weights(en, n, x);
    let z = w.iter().fold(BigRational::zero(), |a, v| a + v);
    w.into_iter().map(|v| v / &z).collect()
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Parse `p/q` or an integer or a finite decimal into an exact rational.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let digits = format!("{ip}{fp}");
        let num: BigInt = digits.parse().ok()?;
        let den = num_traits::pow::pow(BigInt::from(10), fp.len());
        return Some(BigRational::new(num, den));
    }
    let v: BigInt = t.parse().ok()?;
    Some(BigRational::new(v, BigInt::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ratios() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(parse_ratio("1/2"), Some(half.clone()));
        assert_eq!(parse_ratio("0.5"), Some(half));
        assert_eq!(parse_ratio("8"), Some(BigRational::from_integer(8.into())));
        assert_eq!(parse_ratio("1/0"), None);
    }
}
