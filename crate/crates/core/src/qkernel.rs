//! Exact scalar arithmetic: rationals, q-shifted factorials for all integer
//! indices, and the specialized parameter point `(u, v, s_1..s_n, alpha)` with
//! `q = u^2`, `t = v^2`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Exponent, Truncation};

/// Exact rational scalar.
pub type Scalar = num_rational::BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// `x^k` for any integer `k`; negative powers require `x != 0`.
pub fn powi(x: &Scalar, k: i64) -> Result<Scalar> {
    if k < 0 {
        if x.is_zero() {
            return Err(Error::DivisionByZero("negative power of zero".into()));
        }
        Ok(num_traits::pow(x.recip(), k.unsigned_abs() as usize))
    } else {
        Ok(num_traits::pow(x.clone(), k as usize))
    }
}

pub fn checked_div(a: &Scalar, b: &Scalar, what: &str) -> Result<Scalar> {
    if b.is_zero() {
        Err(Error::DivisionByZero(what.to_string()))
    } else {
        Ok(a / b)
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn sqrt_exact(x: &Scalar) -> Result<Scalar> {
    if x.is_negative() {
        return Err(Error::NotASquare(format_fraction(x)));
    }
    let num = x.numer();
    let den = x.denom();
    let rn = num.sqrt();
    let rd = den.sqrt();
    if &(&rn * &rn) == num && &(&rd * &rd) == den {
        Ok(Scalar::new(rn, rd))
    } else {
        Err(Error::NotASquare(format_fraction(x)))
    }
}

/// Canonical `p/q` string (always with an explicit denominator).
pub fn format_fraction(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_fraction(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("malformed fraction {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::DivisionByZero(format!("denominator of {s:?}")));
    }
    Ok(Scalar::new(n, d))
}

/// Parses a decimal in plain or scientific notation (`1e-25`, `0.003`)
/// into an exact rational.
pub fn parse_decimal(s: &str) -> Result<Scalar> {
    let bad = || Error::InvalidInput(format!("malformed decimal {s:?}"));
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}0").parse().map_err(|_| bad())?;
    let digits = digits / BigInt::from(10);
    let scale = exp - fp.len() as i64;
    let mut x = Scalar::from_integer(digits) * powi(&int(10), scale)?;
    if neg {
        x = -x;
    }
    Ok(x)
}

/// Scientific-notation rendering of a rational with `digits` significant
/// digits, computed exactly on big integers.
pub fn format_sci(x: &Scalar, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    let a = x.abs();
    let ten = BigInt::from(10);
    // estimate the decimal exponent from digit counts, then correct
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let scaled = |e: i64| -> Scalar { &a * powi(&Scalar::from_integer(ten.clone()), -e).unwrap() };
    while scaled(e) >= Scalar::from_integer(ten.clone()) {
        e += 1;
    }
    while scaled(e) < Scalar::one() {
        e -= 1;
    }
    let m = scaled(e) * Scalar::from_integer(num_traits::pow(ten.clone(), digits.saturating_sub(1)));
    let mut m = m.round().to_integer();
    if m.to_string().len() > digits {
        m /= &ten;
        e += 1;
    }
    let ms = m.to_string();
    let (head, tail) = ms.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

/// Lossy conversion for display and tail-bound estimates only.
pub fn to_f64(x: &Scalar) -> f64 {
    format_sci(x, 17).parse().unwrap_or(f64::NAN)
}

pub mod fraction_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_fraction(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse_fraction(&s).map_err(serde::de::Error::custom)
    }
}

pub mod fraction_vec_serde {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_fraction(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Scalar>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_fraction(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// q-shifted factorial `(a;q)_k` for any integer `k`.
///
/// For `k < 0` this is `1 / ((1 - a q^-1)(1 - a q^-2)...(1 - a q^k))`.
pub fn qpoch(a: &Scalar, q: &Scalar, k: i64) -> Result<Scalar> {
    let one = Scalar::one();
    if k >= 0 {
        let mut acc = one.clone();
        let mut aq = a.clone();
        for _ in 0..k {
            acc *= &one - &aq;
            if acc.is_zero() {
                return Ok(acc);
            }
            aq *= q;
        }
        Ok(acc)
    } else {
        let qinv = checked_div(&one, q, "q = 0 in negative-index q-Pochhammer")?;
        let mut acc = one.clone();
        let mut aq = a * &qinv;
        for _ in 0..k.unsigned_abs() {
            acc *= &one - &aq;
            aq *= &qinv;
        }
        if acc.is_zero() {
            return Err(Error::DivisionByZero(format!(
                "({};q)_{k} has a vanishing factor",
                format_fraction(a)
            )));
        }
        Ok(acc.recip())
    }
}

/// `(a_1, ..., a_m; q)_k`.
pub fn qpoch_multi(params: &[Scalar], q: &Scalar, k: i64) -> Result<Scalar> {
    let mut acc = Scalar::one();
    for a in params {
        acc *= qpoch(a, q, k)?;
    }
    Ok(acc)
}

/// `mu(a; k) = (a;q)_k / (a q/t;q)_k * (u/v)^k`.
pub fn mu(a: &Scalar, k: i64, pt: &ParamPoint) -> Result<Scalar> {
    let q = pt.q();
    let num = qpoch(a, &q, k)?;
    let den = qpoch(&(a * &q / pt.t()), &q, k)?;
    let ratio = checked_div(&num, &den, "mu denominator")?;
    Ok(ratio * powi(&(&pt.u / &pt.v), k)?)
}

/// Exact rational specialization of the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamPoint {
    #[serde(with = "fraction_serde")]
    pub u: Scalar,
    #[serde(with = "fraction_serde")]
    pub v: Scalar,
    #[serde(with = "fraction_vec_serde")]
    pub s: Vec<Scalar>,
    #[serde(with = "fraction_serde")]
    pub alpha: Scalar,
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.s.iter().map(format_fraction).collect();
        write!(
            f,
            "u={} v={} s=[{}] alpha={}",
            format_fraction(&self.u),
            format_fraction(&self.v),
            s.join(", "),
            format_fraction(&self.alpha)
        )
    }
}

impl ParamPoint {
    pub fn new(u: Scalar, v: Scalar, s: Vec<Scalar>, alpha: Scalar) -> Result<Self> {
        let pt = ParamPoint { u, v, s, alpha };
        pt.validate()?;
        Ok(pt)
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn q(&self) -> Scalar {
        &self.u * &self.u
    }

    pub fn t(&self) -> Scalar {
        &self.v * &self.v
    }

    pub fn with_alpha(&self, alpha: Scalar) -> ParamPoint {
        ParamPoint { alpha, ..self.clone() }
    }

    pub fn with_s(&self, s: Vec<Scalar>) -> ParamPoint {
        ParamPoint { s, ..self.clone() }
    }

    /// Structural screen: `q not in {0, 1}`, nothing else zero, `n >= 2`.
    pub fn validate(&self) -> Result<()> {
        if self.n() < 2 {
            return Err(Error::InvalidInput(format!("n = {} < 2", self.n())));
        }
        if self.u.is_zero() || self.q().is_one() {
            return Err(Error::NonGeneric("q must avoid 0 and 1".into()));
        }
        if self.v.is_zero() {
            return Err(Error::NonGeneric("t = 0".into()));
        }
        if self.alpha.is_zero() {
            return Err(Error::NonGeneric("alpha = 0".into()));
        }
        if self.s.iter().any(Zero::is_zero) {
            return Err(Error::NonGeneric("some s_i = 0".into()));
        }
        Ok(())
    }

    /// Full genericity screen relative to a truncation.
    ///
    /// With `K = genericity_bound(trunc)` the point must satisfy: `q^m != 1`
    /// for `1 <= m <= K`; none of `alpha/s_i`, `alpha q/(s_i t)`, `s_i/s_j`,
    /// `s_i t/s_j`, `s_i/(s_j t)` (`i != j`) or `t` equals `q^m` for
    /// `|m| <= K`; and the diagonal eigenvalues over the truncated basis are
    /// pairwise distinct. Together these keep every q-Pochhammer
    /// denominator used by the closed forms and the operator action nonzero.
    pub fn check_generic(&self, trunc: &Truncation) -> Result<()> {
        self.validate()?;
        let k = genericity_bound(trunc);
        let q = self.q();
        let t = self.t();
        let mut qpow = Scalar::one();
        for m in 1..=k {
            qpow *= &q;
            if qpow.is_one() {
                return Err(Error::NonGeneric(format!("q^{m} = 1")));
            }
        }
        let powers: HashSet<Scalar> = (-(k as i64)..=k as i64)
            .map(|m| powi(&q, m).expect("q != 0"))
            .collect();
        let mut avoid: Vec<(String, Scalar)> = vec![("t".into(), t.clone())];
        for (i, si) in self.s.iter().enumerate() {
            let a = &self.alpha / si;
            avoid.push((format!("alpha/s_{}", i + 1), a.clone()));
            avoid.push((format!("alpha q/(s_{} t)", i + 1), &a * &q / &t));
            for (j, sj) in self.s.iter().enumerate() {
                if i == j {
                    continue;
                }
                let r = si / sj;
                avoid.push((format!("s_{}/s_{}", i + 1, j + 1), r.clone()));
                avoid.push((format!("s_{} t/s_{}", i + 1, j + 1), &r * &t));
                avoid.push((format!("s_{}/(s_{} t)", i + 1, j + 1), &r / &t));
            }
        }
        for (name, x) in &avoid {
            if powers.contains(x) {
                return Err(Error::NonGeneric(format!("{name} is an integer power of q")));
            }
        }
        if let Some((a, b)) = first_eigenvalue_collision(self, trunc)? {
            return Err(Error::NonGeneric(format!("eigenvalues at {a} and {b} coincide")));
        }
        Ok(())
    }
}

/// First pair of basis exponents (in basis order) whose diagonal
/// eigenvalues coincide.
pub fn first_eigenvalue_collision(pt: &ParamPoint, trunc: &Truncation) -> Result<Option<(Exponent, Exponent)>> {
    let mut seen: HashMap<Scalar, Exponent> = HashMap::new();
    for e in trunc.basis(pt.n()) {
        let lam = crate::eigen::eigenvalue(&e, pt)?;
        if let Some(prev) = seen.get(&lam) {
            return Ok(Some((prev.clone(), e)));
        }
        seen.insert(lam, e);
    }
    Ok(None)
}

/// `K(D)`: twice the largest cone weight admitted by the truncation, plus 2.
/// Every q-Pochhammer index reached by the operator action and the closed
/// forms at that truncation lies within `[-K, K]`.
pub fn genericity_bound(trunc: &Truncation) -> usize {
    2 * trunc.max_weight() as usize + 2
}

/// Knobs for random point generation.
#[derive(Clone, Debug)]
pub struct SampleConfig {
    /// Height bound for the square roots `u`, `v`, `sqrt(s_i)`; the squared
    /// quantities `q`, `t`, `s_i` then have height at most its square.
    pub root_height: i64,
    /// Height bound for `alpha`.
    pub alpha_height: i64,
    pub max_attempts: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { root_height: 8, alpha_height: 64, max_attempts: 1000 }
    }
}

pub(crate) fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ tag)
}

/// Random rational with `|num|, |den| <= height`, `|x| != 1`, nonzero.
pub(crate) fn random_rational(rng: &mut ChaCha8Rng, height: i64, below_one: bool) -> Scalar {
    loop {
        let a = rng.gen_range(1..=height);
        let b = rng.gen_range(1..=height);
        if a == b || (below_one && a > b) {
            continue;
        }
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        return frac(sign * a, b);
    }
}

/// Deterministic generic point for `n` variables at truncation `trunc`.
///
/// `u` is drawn with `|u| < 1` and every `s_i` is the square of a drawn
/// positive rational, so `sqrt(s_i/s_j)` is always rational.
pub fn sample_generic_point_with(
    n: usize,
    trunc: &Truncation,
    seed: u64,
    cfg: &SampleConfig,
) -> Result<ParamPoint> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n = {n} < 2")));
    }
    let mut rng = rng_for(seed, 0x5151_0000 + n as u64);
    for _ in 0..cfg.max_attempts {
        let u = random_rational(&mut rng, cfg.root_height, true);
        let v = random_rational(&mut rng, cfg.root_height, false);
        let s: Vec<Scalar> = (0..n)
            .map(|_| {
                let r = random_rational(&mut rng, cfg.root_height, false).abs();
                &r * &r
            })
            .collect();
        let alpha = random_rational(&mut rng, cfg.alpha_height, false);
        let pt = ParamPoint { u, v, s, alpha };
        if pt.check_generic(trunc).is_ok() {
            return Ok(pt);
        }
    }
    Err(Error::ExhaustedRetries(cfg.max_attempts))
}

/// `sample_generic_point(n, D, seed)` at `TotalDegree(D)`.
pub fn sample_generic_point(n: usize, degree: u32, seed: u64) -> Result<ParamPoint> {
    sample_generic_point_with(n, &Truncation::TotalDegree(degree), seed, &SampleConfig::default())
}

/// A second spectral parameter for the same point, generic at `trunc`.
pub fn sample_second_alpha(pt: &ParamPoint, trunc: &Truncation, seed: u64, pair: u64) -> Result<Scalar> {
    let mut rng = rng_for(seed, 0xBE7A_0000 + pair);
    let cfg = SampleConfig::default();
    for _ in 0..cfg.max_attempts {
        let beta = random_rational(&mut rng, cfg.alpha_height, false);
        if beta != pt.alpha && pt.with_alpha(beta.clone()).check_generic(trunc).is_ok() {
            return Ok(beta);
        }
    }
    Err(Error::ExhaustedRetries(cfg.max_attempts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_point() -> ParamPoint {
        ParamPoint::new(frac(1, 2), frac(2, 3), vec![frac(9, 25), frac(49, 16)], frac(5, 7)).unwrap()
    }

    #[test]
    fn qpoch_basic_values() {
        let a = frac(3, 7);
        let q = frac(1, 2);
        assert_eq!(qpoch(&a, &q, 0).unwrap(), int(1));
        assert_eq!(qpoch(&int(2), &frac(1, 2), 2).unwrap(), int(0));
        assert_eq!(qpoch(&int(3), &int(2), -1).unwrap(), int(-2));
    }

    #[test]
    fn qpoch_negative_index_vanishing_factor() {
        // (q;q)_{-1} = 1/(1 - q q^{-1}) is undefined
        let q = frac(1, 3);
        assert!(matches!(qpoch(&q, &q, -1), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn qpoch_multi_values() {
        let q = frac(1, 2);
        assert_eq!(qpoch_multi(&[frac(2, 5), frac(3, 7)], &q, 0).unwrap(), int(1));
        assert_eq!(qpoch_multi(&[frac(1, 2), frac(1, 3)], &q, 1).unwrap(), frac(1, 3));
        let a = frac(-4, 9);
        assert_eq!(qpoch_multi(std::slice::from_ref(&a), &q, 3).unwrap(), qpoch(&a, &q, 3).unwrap());
    }

    #[test]
    fn mu_trivial_cases() {
        let pt = sym_point();
        assert_eq!(mu(&frac(2, 3), 0, &pt).unwrap(), int(1));
        let tq = ParamPoint { v: pt.u.clone(), ..pt.clone() };
        for k in -3..=3 {
            assert_eq!(mu(&frac(2, 3), k, &tq).unwrap(), int(1));
        }
    }

    #[test]
    fn mu_splits_over_index_sums() {
        let pt = sym_point();
        let a = frac(-3, 11);
        let q = pt.q();
        for k in -3i64..=3 {
            for l in -3i64..=3 {
                let lhs = mu(&a, k + l, &pt).unwrap();
                let rhs = mu(&a, k, &pt).unwrap() * mu(&(&a * powi(&q, k).unwrap()), l, &pt).unwrap();
                assert_eq!(lhs, rhs, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn fractions_parse_and_print() {
        assert_eq!(parse_fraction("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse_fraction("5").unwrap(), int(5));
        assert_eq!(format_fraction(&int(5)), "5/1");
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("x").is_err());
        assert_eq!(parse_decimal("1e-25").unwrap(), powi(&int(10), -25).unwrap());
        assert_eq!(parse_decimal("-2.50").unwrap(), frac(-5, 2));
        assert_eq!(format_sci(&frac(1, 3), 3), "3.33e-1");
        assert_eq!(format_sci(&int(-1000), 2), "-1.0e3");
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(sqrt_exact(&frac(9, 49)).unwrap(), frac(3, 7));
        assert!(matches!(sqrt_exact(&frac(2, 9)), Err(Error::NotASquare(_))));
        assert!(sqrt_exact(&frac(-4, 9)).is_err());
    }

    #[test]
    fn point_json_schema() {
        let pt = sym_point();
        let js = serde_json::to_string(&pt).unwrap();
        assert_eq!(js, r#"{"u":"1/2","v":"2/3","s":["9/25","49/16"],"alpha":"5/7"}"#);
        let back: ParamPoint = serde_json::from_str(&js).unwrap();
        assert_eq!(back, pt);
    }

    #[test]
    fn sampled_points_are_generic_and_deterministic() {
        let a = sample_generic_point(2, 4, 7).unwrap();
        let b = sample_generic_point(2, 4, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.check_generic(&Truncation::TotalDegree(4)).is_ok());
        assert!(sqrt_exact(&(&a.s[0] / &a.s[1])).is_ok());
        assert_ne!(a, sample_generic_point(2, 4, 8).unwrap());
    }

    #[test]
    fn screen_rejects_q_one() {
        let pt = ParamPoint { u: int(1), ..sym_point() };
        assert!(pt.check_generic(&Truncation::TotalDegree(2)).is_err());
        let pt = ParamPoint { u: int(-1), ..sym_point() };
        assert!(pt.validate().is_err());
    }

    #[test]
    fn screen_rejects_eigenvalue_collision() {
        // t = q makes every eigenvalue 1
        let base = sym_point();
        let pt = ParamPoint { v: base.u.clone(), ..base };
        let err = pt.check_generic(&Truncation::TotalDegree(2)).unwrap_err();
        assert!(matches!(err, Error::NonGeneric(_)));
    }

    #[test]
    fn collision_detector_finds_equal_diagonal_entries() {
        // at t = q every eigenvalue is 1: the first two basis exponents collide
        let base = sym_point();
        let pt = ParamPoint { v: base.u.clone(), ..base };
        let hit = first_eigenvalue_collision(&pt, &Truncation::TotalDegree(3)).unwrap();
        assert_eq!(hit, Some((Exponent::new(vec![0]), Exponent::new(vec![1]))));
        let sampled = sample_generic_point(2, 3, 3).unwrap();
        assert_eq!(first_eigenvalue_collision(&sampled, &Truncation::TotalDegree(3)).unwrap(), None);
    }
}
