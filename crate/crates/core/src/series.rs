//! Truncated formal power series in the cone variables
//! `x_i = zeta_{i+1} / zeta_i`, `i = 1..n-1`, with exact coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperg::q_binomial_coeffs;
use crate::qkernel::{format_fraction, parse_fraction, powi, qpoch, ParamPoint, Scalar};

/// Exponent vector of a cone monomial, ordered by (weight, lex).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(e: Vec<u32>) -> Self {
        Exponent(e)
    }

    pub fn zero(dim: usize) -> Self {
        Exponent(vec![0; dim])
    }

    /// Exponent of `zeta_m / zeta_l` for `1 <= l < m <= n`: ones in
    /// coordinates `l..m-1` (1-based), so its weight is `m - l`.
    pub fn pair(l: usize, m: usize, n: usize) -> Self {
        assert!(1 <= l && l < m && m <= n, "pair ({l},{m}) out of range for n={n}");
        let mut e = vec![0; n - 1];
        for c in e.iter_mut().take(m - 1).skip(l - 1) {
            *c = 1;
        }
        Exponent(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, k: u32) -> Exponent {
        Exponent(self.0.iter().map(|a| a * k).collect())
    }

    /// `self - other` if `self >= other` componentwise.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Exponent)
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight().cmp(&other.weight()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Which cone exponents are kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "bound", rename_all = "snake_case")]
pub enum Truncation {
    TotalDegree(u32),
    Box(Vec<u32>),
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::TotalDegree(d) => write!(f, "deg<={d}"),
            Truncation::Box(b) => {
                let parts: Vec<String> = b.iter().map(u32::to_string).collect();
                write!(f, "box({})", parts.join(","))
            }
        }
    }
}

impl Truncation {
    pub fn admits(&self, e: &Exponent) -> bool {
        match self {
            Truncation::TotalDegree(d) => e.weight() <= *d,
            Truncation::Box(b) => b.len() == e.dim() && e.0.iter().zip(b).all(|(x, y)| x <= y),
        }
    }

    /// Largest weight of an admitted exponent.
    pub fn max_weight(&self) -> u32 {
        match self {
            Truncation::TotalDegree(d) => *d,
            Truncation::Box(b) => b.iter().sum(),
        }
    }

    /// Checks the truncation is usable for `n` variables.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            Truncation::Box(b) if b.len() != n - 1 => Err(Error::ShapeMismatch(format!(
                "box truncation has {} bounds, n = {n} needs {}",
                b.len(),
                n - 1
            ))),
            _ => Ok(()),
        }
    }

    /// All admitted exponents for `n` variables in (weight, lex) order.
    pub fn basis(&self, n: usize) -> Vec<Exponent> {
        let dim = n - 1;
        let caps: Vec<u32> = match self {
            Truncation::TotalDegree(d) => vec![*d; dim],
            Truncation::Box(b) => b.clone(),
        };
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fn rec(i: usize, cur: &mut Vec<u32>, caps: &[u32], t: &Truncation, out: &mut Vec<Exponent>) {
            if i == cur.len() {
                let e = Exponent(cur.clone());
                if t.admits(&e) {
                    out.push(e);
                }
                return;
            }
            for x in 0..=caps[i] {
                cur[i] = x;
                rec(i + 1, cur, caps, t, out);
            }
            cur[i] = 0;
        }
        rec(0, &mut cur, &caps, self, &mut out);
        out.sort();
        out
    }

    /// Whether every exponent admitted by `other` is admitted here.
    pub fn contains(&self, other: &Truncation, n: usize) -> bool {
        other.basis(n).iter().all(|e| self.admits(e))
    }
}

/// Truncated series `sum c_e x^e` (zero coefficients are never stored).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSeries {
    n: usize,
    trunc: Truncation,
    coeffs: BTreeMap<Exponent, Scalar>,
}

impl ConeSeries {
    pub fn zero(n: usize, trunc: &Truncation) -> Self {
        ConeSeries { n, trunc: trunc.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(n: usize, trunc: &Truncation) -> Self {
        Self::monomial(n, trunc, Exponent::zero(n - 1), Scalar::one())
    }

    pub fn monomial(n: usize, trunc: &Truncation, e: Exponent, c: Scalar) -> Self {
        let mut s = Self::zero(n, trunc);
        s.add_term(e, c);
        s
    }

    /// `sum_k coeffs[k] x^(k * dir)`, truncated.
    pub fn along(n: usize, trunc: &Truncation, dir: &Exponent, coeffs: &[Scalar]) -> Self {
        let mut s = Self::zero(n, trunc);
        for (k, c) in coeffs.iter().enumerate() {
            s.add_term(dir.scaled(k as u32), c.clone());
        }
        s
    }

    /// Builds from explicit terms; terms outside the truncation are dropped.
    pub fn from_terms(n: usize, trunc: &Truncation, terms: impl IntoIterator<Item = (Exponent, Scalar)>) -> Self {
        let mut s = Self::zero(n, trunc);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Adds `c x^e` in place (dropped if not admitted).
    pub fn add_term(&mut self, e: Exponent, c: Scalar) {
        if c.is_zero() || !self.trunc.admits(&e) {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coeffs.remove(&e);
                }
            }
            None => {
                self.coeffs.insert(e, c);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> &Truncation {
        &self.trunc
    }

    pub fn coeff(&self, e: &Exponent) -> Scalar {
        self.coeffs.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_shape(&self, other: &ConeSeries) -> Result<()> {
        if self.n != other.n || self.trunc != other.trunc {
            return Err(Error::ShapeMismatch(format!(
                "series over n={} {} vs n={} {}",
                self.n, self.trunc, other.n, other.trunc
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &ConeSeries) -> Result<ConeSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ConeSeries) -> Result<ConeSeries> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> ConeSeries {
        let mut out = Self::zero(self.n, &self.trunc);
        if c.is_zero() {
            return out;
        }
        for (e, x) in &self.coeffs {
            out.coeffs.insert(e.clone(), x * c);
        }
        out
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &Exponent) -> ConeSeries {
        let mut out = Self::zero(self.n, &self.trunc);
        for (f, x) in &self.coeffs {
            out.add_term(f.add(e), x.clone());
        }
        out
    }

    /// Truncated product.
    pub fn mul(&self, other: &ConeSeries) -> Result<ConeSeries> {
        self.check_shape(other)?;
        let mut acc: BTreeMap<Exponent, Scalar> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea.add(eb);
                if !self.trunc.admits(&e) {
                    continue;
                }
                let p = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += p,
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(ConeSeries { n: self.n, trunc: self.trunc.clone(), coeffs: acc })
    }

    /// Restriction to a smaller truncation.
    pub fn restrict(&self, trunc: &Truncation) -> ConeSeries {
        let mut out = Self::zero(self.n, trunc);
        for (e, c) in &self.coeffs {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// Exponents where the two series differ, in basis order.
    pub fn differences(&self, other: &ConeSeries) -> Vec<Exponent> {
        let mut keys: Vec<&Exponent> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|e| self.coeff(e) != other.coeff(e))
            .cloned()
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    e: Exponent,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct ConeSeriesJson {
    n: usize,
    trunc: Truncation,
    coeffs: Vec<TermJson>,
}

impl Serialize for ConeSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConeSeriesJson {
            n: self.n,
            trunc: self.trunc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| TermJson { e: e.clone(), c: format_fraction(c) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConeSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ConeSeriesJson::deserialize(d)?;
        let mut out = ConeSeries::zero(raw.n, &raw.trunc);
        for t in raw.coeffs {
            if t.e.dim() + 1 != raw.n || !raw.trunc.admits(&t.e) {
                return Err(D::Error::custom(format!("exponent {} not admitted", t.e)));
            }
            out.add_term(t.e, parse_fraction(&t.c).map_err(D::Error::custom)?);
        }
        Ok(out)
    }
}

/// Largest `k` such that `k * dir` is admitted.
pub fn max_power_along(trunc: &Truncation, dir: &Exponent) -> u32 {
    let mut k = 0;
    while trunc.admits(&dir.scaled(k + 1)) {
        k += 1;
    }
    k
}

/// `(1 - x^dir)`, truncated.
pub fn one_minus(n: usize, trunc: &Truncation, dir: &Exponent) -> ConeSeries {
    let mut s = ConeSeries::one(n, trunc);
    s.add_term(dir.clone(), -Scalar::one());
    s
}

/// Expansion of `h(zeta_m/zeta_l) = (1 - z)(q z/t;q)_inf / (t z;q)_inf`.
pub fn h_expand(l: usize, m: usize, pt: &ParamPoint, trunc: &Truncation) -> Result<ConeSeries> {
    let n = pt.n();
    if !(1 <= l && l < m && m <= n) {
        return Err(Error::InvalidInput(format!("h needs 1 <= l < m <= n, got ({l},{m})")));
    }
    let dir = Exponent::pair(l, m, n);
    let kmax = max_power_along(trunc, &dir);
    let q = pt.q();
    let t = pt.t();
    let a = &q / (&t * &t);
    let ratio = q_binomial_coeffs(&a, &q, kmax as usize)?;
    let coeffs: Vec<Scalar> = ratio
        .into_iter()
        .enumerate()
        .map(|(k, c)| c * powi(&t, k as i64).expect("t != 0"))
        .collect();
    one_minus(n, trunc, &dir).mul(&ConeSeries::along(n, trunc, &dir, &coeffs))
}

/// `g_k = (t;q)_k/(q;q)_k (u/v)^k`, the coefficients of `g(zeta)`.
pub fn g_coeff(k: u32, pt: &ParamPoint) -> Result<Scalar> {
    let q = pt.q();
    let num = qpoch(&pt.t(), &q, k as i64)?;
    let den = qpoch(&q, &q, k as i64)?;
    let r = crate::qkernel::checked_div(&num, &den, "(q;q)_k in g_k")?;
    Ok(r * powi(&(&pt.u / &pt.v), k as i64)?)
}

/// `prod_{i<j} h(zeta_j/zeta_i)`, truncated.
pub fn product_h(pt: &ParamPoint, trunc: &Truncation) -> Result<ConeSeries> {
    let n = pt.n();
    trunc.check_dim(n)?;
    let mut acc = ConeSeries::one(n, trunc);
    for l in 1..=n {
        for m in l + 1..=n {
            acc = acc.mul(&h_expand(l, m, pt, trunc)?)?;
        }
    }
    Ok(acc)
}
