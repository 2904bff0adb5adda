//! Explicit series against which computed eigenfunctions are compared:
//! the three-variable ground state, the quasi-eigenfunction `F(alpha)` and
//! its product degenerations, and the four-variable ground state expanded
//! term by term on the box of bound 2.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperg::{phi_eval_terminating, phi_series, PhiSpec};
use crate::qkernel::{checked_div, int, powi, qpoch, ParamPoint, Scalar};
use crate::series::{max_power_along, one_minus, ConeSeries, Exponent, Truncation};

/// `sum_k c_k z0^k x^{k dir}` for the `phi` coefficients `c_k`.
pub fn phi_along(
    upper: &[Scalar],
    lower: &[Scalar],
    q: &Scalar,
    z0: &Scalar,
    dir: &Exponent,
    n: usize,
    trunc: &Truncation,
) -> Result<ConeSeries> {
    let order = max_power_along(trunc, dir) as usize;
    let c = phi_series(&PhiSpec { upper: upper.to_vec(), lower: lower.to_vec(), q: q.clone(), z_order: order })?;
    let scaled = c
        .iter()
        .enumerate()
        .map(|(k, ck)| Ok(ck * powi(z0, k as i64)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConeSeries::along(n, trunc, dir, &scaled))
}

/// All pairs `(i, j)`, `1 <= i < j <= n`, ordered by `j - i` then `i`.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for gap in 1..n {
        for i in 1..=n - gap {
            out.push((i, i + gap));
        }
    }
    out
}

/// `prod_{i<j} (1 - zeta_j/zeta_i) 2phi1(q^{k_ij+1}/t, q s_ij/t; q^{k_ij+1} s_ij; q, t zeta_j/zeta_i)`
/// with `k` listed in the order of [`pairs`].
pub fn pair_product(ks: &[u32], pt: &ParamPoint, trunc: &Truncation) -> Result<ConeSeries> {
    let n = pt.n();
    let ps = pairs(n);
    if ks.len() != ps.len() {
        return Err(Error::ShapeMismatch(format!("{} pair indices for n = {n}", ks.len())));
    }
    let (q, t) = (pt.q(), pt.t());
    let mut acc = ConeSeries::one(n, trunc);
    for (&(i, j), &k) in ps.iter().zip(ks) {
        let sij = &pt.s[i - 1] / &pt.s[j - 1];
        let qk1 = powi(&q, k as i64 + 1)?;
        let dir = Exponent::pair(i, j, n);
        let f = phi_along(&[&qk1 / &t, &q * &sij / &t], &[&qk1 * &sij], &q, &t, &dir, n, trunc)?;
        acc = acc.mul(&one_minus(n, trunc, &dir).mul(&f)?)?;
    }
    Ok(acc)
}

/// Three-variable ground state:
/// `sum_k (q/t)_k^2 (t)_k^2 / ((q, q s_12, q s_23, q s_13)_k) (q s_13)^k x^{k(1,1)} prod(pairs at k)`.
pub fn ground_state_n3(pt: &ParamPoint, trunc: &Truncation) -> Result<ConeSeries> {
    if pt.n() != 3 {
        return Err(Error::ShapeMismatch("three-variable ground state needs n = 3".into()));
    }
    let (q, t) = (pt.q(), pt.t());
    let s = &pt.s;
    let diag = Exponent::pair(1, 3, 3);
    let mut total = ConeSeries::zero(3, trunc);
    let mut k = 0u32;
    loop {
        let ek = diag.scaled(k);
        if !trunc.admits(&ek) {
            break;
        }
        let kk = k as i64;
        let qt = qpoch(&(&q / &t), &q, kk)?;
        let tt = qpoch(&t, &q, kk)?;
        let s13 = &s[0] / &s[2];
        let den = qpoch(&q, &q, kk)?
            * qpoch(&(&q * &s[0] / &s[1]), &q, kk)?
            * qpoch(&(&q * &s[1] / &s[2]), &q, kk)?
            * qpoch(&(&q * &s13), &q, kk)?;
        let pre = checked_div(&(&qt * &qt * &tt * &tt), &den, "ground-state prefactor")? * powi(&(&q * &s13), kk)?;
        let body = pair_product(&[k, k, k], pt, trunc)?;
        total = total.add(&body.shift(&ek).scale(&pre))?;
        k += 1;
    }
    Ok(total)
}

/// Quasi-eigenfunction `F(alpha)` for `n = 2, 3`; only `q` and `t` of `pt`
/// are used. For `n = 2` it is the single-pair product with `k = 0`.
pub fn quasi_eigenfunction(alpha: &Scalar, pt: &ParamPoint, trunc: &Truncation) -> Result<ConeSeries> {
    let n = pt.n();
    if !(2..=3).contains(&n) {
        return Err(Error::ShapeMismatch(format!("quasi-eigenfunction defined for n = 2, 3, got {n}")));
    }
    let (q, t) = (pt.q(), pt.t());
    let mut total = ConeSeries::zero(n, trunc);
    let mut k = 0u32;
    loop {
        let ek = if n == 3 {
            Exponent::pair(1, 3, 3).scaled(k)
        } else if k == 0 {
            Exponent::zero(1)
        } else {
            break;
        };
        if !trunc.admits(&ek) {
            break;
        }
        let kk = k as i64;
        let qt = qpoch(&(&q / &t), &q, kk)?;
        let qa = qpoch(&(&q / alpha), &q, kk)?;
        let num = qpoch(&(&t / (alpha * alpha)), &q, kk)? * &qt * &qt;
        let den = qpoch(&q, &q, kk)? * &qa * &qa;
        let qmk = powi(&q, -kk)?;
        let inner = phi_eval_terminating(
            &[alpha.recip(), qmk.clone()],
            &[alpha * &qmk * &q],
            &q,
            &(alpha * &t),
            k as usize,
        )?;
        let pre = checked_div(&num, &den, "quasi-eigenfunction prefactor")? * powi(&q, kk)? * inner;
        let qk1 = powi(&q, kk + 1)?;
        let mut body = ConeSeries::one(n, trunc);
        for (i, j) in pairs(n) {
            let dir = Exponent::pair(i, j, n);
            let f = phi_along(&[&qk1 / &t, alpha * &q / &t], &[&qk1 / alpha], &q, &(&t / alpha), &dir, n, trunc)?;
            body = body.mul(&one_minus(n, trunc, &dir).mul(&f)?)?;
        }
        total = total.add(&body.shift(&ek).scale(&pre))?;
        k += 1;
    }
    Ok(total)
}

/// `prod_{(i,j) in pairs} (1 - z)(a z;q)_inf/(b z;q)_inf` with `z = zeta_j/zeta_i`,
/// expanded by the q-binomial theorem.
pub fn product_series(a: &Scalar, b: &Scalar, pt: &ParamPoint, trunc: &Truncation, which: &[(usize, usize)]) -> Result<ConeSeries> {
    let n = pt.n();
    let q = pt.q();
    let ratio = checked_div(a, b, "product ratio")?;
    let mut acc = ConeSeries::one(n, trunc);
    for &(i, j) in which {
        let dir = Exponent::pair(i, j, n);
        let f = phi_along(std::slice::from_ref(&ratio), &[], &q, b, &dir, n, trunc)?;
        acc = acc.mul(&one_minus(n, trunc, &dir).mul(&f)?)?;
    }
    Ok(acc)
}

/// How the half-integer power of the auxiliary parameter `p` is read in the
/// four-variable expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfReading {
    /// `p^{1/2} -> q`
    Q,
    /// `p^{1/2} -> q^{1/2}`
    U,
}

#[derive(Clone, Debug)]
enum Base {
    QOverT,
    T,
    Q,
    /// `q^k s_i/s_j`
    S(usize, usize, i64),
    /// `q^k prod s_i^{e_i}`
    Mono(i64, [i64; 4]),
    /// `p^{1/2} s_i/s_j`
    Ps(usize, usize),
}

#[derive(Clone, Debug)]
struct Term {
    cone: [u32; 3],
    sign: i64,
    qpow: i64,
    sexp: [i64; 4],
    num: Vec<(Base, i64)>,
    den: Vec<(Base, i64)>,
    /// Pair indices in the order (12, 23, 34, 13, 24, 14).
    ks: [u32; 6],
}

fn s(i: usize, j: usize) -> Base {
    Base::S(i, j, 1)
}

fn seven(over: &[(usize, i64)]) -> Vec<(Base, i64)> {
    let base = [Base::Q, s(1, 2), s(2, 3), s(3, 4), s(1, 3), s(2, 4), s(1, 4)];
    base.into_iter()
        .enumerate()
        .map(|(i, b)| (b, over.iter().find(|(k, _)| *k == i).map(|(_, v)| *v).unwrap_or(1)))
        .collect()
}

fn with_q1(mut v: Vec<(Base, i64)>) -> Vec<(Base, i64)> {
    v.insert(0, (Base::Q, 1));
    v
}

fn rep(b: Base, k: i64, times: usize) -> Vec<(Base, i64)> {
    vec![(b, k); times]
}

fn cat(parts: Vec<Vec<(Base, i64)>>) -> Vec<(Base, i64)> {
    parts.into_iter().flatten().collect()
}

fn t3_1() -> Vec<(Base, i64)> {
    cat(vec![rep(Base::QOverT, 1, 3), rep(Base::T, 1, 3)])
}

fn t3_2() -> Vec<(Base, i64)> {
    vec![(Base::QOverT, 2), (Base::QOverT, 1), (Base::QOverT, 1), (Base::T, 2), (Base::T, 1), (Base::T, 1)]
}

fn t3_22() -> Vec<(Base, i64)> {
    vec![(Base::QOverT, 2), (Base::QOverT, 2), (Base::QOverT, 1), (Base::T, 2), (Base::T, 2), (Base::T, 1)]
}

fn two_two(k: i64) -> Vec<(Base, i64)> {
    cat(vec![rep(Base::QOverT, k, 2), rep(Base::T, k, 2)])
}

#[allow(clippy::too_many_arguments)]
fn term(cone: [u32; 3], sign: i64, qpow: i64, sexp: [i64; 4], num: Vec<(Base, i64)>, den: Vec<(Base, i64)>, ks: [u32; 6]) -> Term {
    Term { cone, sign, qpow, sexp, num, den, ks }
}

fn four_variable_terms() -> Vec<Term> {
    let m1 = |e: [i64; 4]| (Base::Mono(2, e), 1);
    let m3 = |k: i64| (Base::Mono(3, [1, 1, -1, -1]), k);
    vec![
        term([0, 0, 0], 1, 0, [0, 0, 0, 0], vec![], vec![], [0; 6]),
        term([1, 1, 0], 1, 1, [1, 0, -1, 0], two_two(1), vec![(Base::Q, 1), (s(1, 2), 1), (s(2, 3), 1), (s(1, 3), 1)], [1, 1, 0, 1, 0, 0]),
        term([0, 1, 1], 1, 1, [0, 1, 0, -1], two_two(1), vec![(Base::Q, 1), (s(2, 3), 1), (s(3, 4), 1), (s(2, 4), 1)], [0, 1, 1, 0, 1, 0]),
        term([1, 1, 1], 1, 1, [1, 0, 0, -1], two_two(1), vec![(Base::Q, 1), (s(1, 2), 1), (s(2, 4), 1), (s(1, 4), 1)], [1, 0, 0, 0, 1, 1]),
        term([1, 1, 1], 1, 1, [1, 0, 0, -1], two_two(1), vec![(Base::Q, 1), (s(1, 3), 1), (s(3, 4), 1), (s(1, 4), 1)], [0, 0, 1, 1, 0, 1]),
        term([1, 1, 1], -1, 1, [1, 0, 0, -1], cat(vec![t3_1(), vec![m1([1, 1, -1, -1])]]), seven(&[]), [1; 6]),
        term([2, 2, 0], 1, 2, [2, 0, -2, 0], two_two(2), vec![(Base::Q, 2), (s(1, 2), 2), (s(2, 3), 2), (s(1, 3), 2)], [2, 2, 0, 2, 0, 0]),
        term([0, 2, 2], 1, 2, [0, 2, 0, -2], two_two(2), vec![(Base::Q, 2), (s(2, 3), 2), (s(3, 4), 2), (s(2, 4), 2)], [0, 2, 2, 0, 2, 0]),
        term([1, 2, 1], -1, 1, [1, 1, -1, -1], cat(vec![t3_1(), vec![m1([1, -1, 1, -1])]]), seven(&[]), [1; 6]),
        term([1, 2, 1], 1, 1, [1, 1, -1, -1], cat(vec![t3_2(), vec![(Base::S(1, 4, 2), 1)]]), with_q1(seven(&[(2, 2)])), [1, 2, 1, 1, 1, 1]),
        term([2, 2, 1], -1, 1, [2, 0, -1, -1], cat(vec![t3_1(), vec![m1([-1, 1, 1, -1])]]), seven(&[]), [1; 6]),
        term([2, 2, 1], 1, 1, [2, 0, -1, -1], cat(vec![t3_2(), vec![(Base::S(3, 4, 2), 1)]]), with_q1(seven(&[(1, 2)])), [2, 1, 1, 1, 1, 1]),
        term([2, 2, 1], 1, 1, [2, 0, -1, -1], cat(vec![t3_2(), vec![(Base::S(2, 4, 2), 1)]]), with_q1(seven(&[(4, 2)])), [1, 1, 1, 2, 1, 1]),
        term([2, 2, 1], -1, 1, [2, 0, -1, -1], cat(vec![t3_22(), vec![m3(1)]]), with_q1(seven(&[(1, 2), (2, 2), (4, 2)])), [2, 2, 1, 2, 1, 1]),
        term([1, 2, 2], -1, 1, [1, 1, 0, -2], cat(vec![t3_1(), vec![m1([1, -1, -1, 1])]]), seven(&[]), [1; 6]),
        term([1, 2, 2], 1, 1, [1, 1, 0, -2], cat(vec![t3_2(), vec![(Base::S(1, 2, 2), 1)]]), with_q1(seven(&[(3, 2)])), [1, 1, 2, 1, 1, 1]),
        term([1, 2, 2], 1, 1, [1, 1, 0, -2], cat(vec![t3_2(), vec![(Base::S(1, 3, 2), 1)]]), with_q1(seven(&[(5, 2)])), [1, 1, 1, 1, 2, 1]),
        term([1, 2, 2], -1, 1, [1, 1, 0, -2], cat(vec![t3_22(), vec![m3(1)]]), with_q1(seven(&[(2, 2), (3, 2), (5, 2)])), [1, 2, 2, 1, 2, 1]),
        term([2, 2, 2], 1, 2, [2, 0, 0, -2], two_two(2), vec![(Base::Q, 2), (s(1, 2), 2), (s(2, 4), 2), (s(1, 4), 2)], [2, 0, 0, 0, 2, 2]),
        term([2, 2, 2], 1, 2, [2, 0, 0, -2], two_two(2), vec![(Base::Q, 2), (s(1, 3), 2), (s(3, 4), 2), (s(1, 4), 2)], [0, 0, 2, 2, 0, 2]),
        term(
            [2, 2, 2],
            1,
            1,
            [2, 0, 0, -2],
            cat(vec![rep(Base::QOverT, 2, 3), rep(Base::T, 2, 3), vec![m3(2)]]),
            seven(&[(0, 2), (1, 2), (2, 2), (3, 2), (4, 2), (5, 2), (6, 2)]),
            [2; 6],
        ),
        term([2, 2, 2], -1, 1, [2, 0, 0, -2], cat(vec![t3_1(), vec![m1([-1, 1, -1, 1])]]), seven(&[]), [1; 6]),
        term([2, 2, 2], 1, 1, [2, 0, 0, -2], cat(vec![t3_2(), vec![(Base::S(2, 3, 2), 1)]]), with_q1(seven(&[(6, 2)])), [1, 1, 1, 1, 1, 2]),
        term([2, 2, 2], 1, 1, [2, 0, 0, -2], cat(vec![t3_2(), vec![(Base::S(2, 1, 2), 1)]]), with_q1(seven(&[(3, 2)])), [1, 1, 2, 1, 1, 1]),
        term(
            [2, 2, 2],
            1,
            1,
            [2, 0, 0, -2],
            cat(vec![t3_2(), vec![(Base::S(4, 3, 2), 1)]]),
            vec![
                (Base::Q, 1),
                (Base::Q, 1),
                (s(1, 2), 2),
                (Base::Ps(2, 3), 1),
                (s(3, 4), 1),
                (s(1, 3), 1),
                (s(2, 4), 1),
                (s(1, 4), 1),
            ],
            [2, 1, 1, 1, 1, 1],
        ),
        term([2, 2, 2], -1, 1, [2, 0, 0, -2], cat(vec![t3_22(), vec![m3(1)]]), with_q1(seven(&[(3, 2), (4, 2), (6, 2)])), [1, 1, 2, 2, 1, 2]),
        term([2, 2, 2], -1, 1, [2, 0, 0, -2], cat(vec![t3_22(), vec![m3(1)]]), with_q1(seven(&[(1, 2), (5, 2), (6, 2)])), [2, 1, 1, 1, 2, 2]),
        term(
            [2, 2, 2],
            -1,
            1,
            [2, 0, 0, -2],
            cat(vec![vec![(Base::Q, 2)], t3_22()]),
            cat(vec![rep(Base::Q, 1, 2), with_q1(seven(&[(1, 2), (3, 2)]))]),
            [2, 1, 2, 1, 1, 1],
        ),
    ]
}

/// The term for `(2,2,2)` whose denominator carries the half power
/// `p^{1/2}`; it is the only one sensitive to [`HalfReading`].
pub const HALF_POWER_TERM: [u32; 3] = [2, 2, 2];

fn base_value(b: &Base, pt: &ParamPoint, half: &Scalar) -> Result<Scalar> {
    let (q, t, s) = (pt.q(), pt.t(), &pt.s);
    Ok(match b {
        Base::QOverT => &q / &t,
        Base::T => t,
        Base::Q => q,
        Base::S(i, j, k) => powi(&q, *k)? * &s[i - 1] / &s[j - 1],
        Base::Mono(k, e) => {
            let mut r = powi(&q, *k)?;
            for (x, p) in s.iter().zip(e) {
                r *= powi(x, *p)?;
            }
            r
        }
        Base::Ps(i, j) => half * &s[i - 1] / &s[j - 1],
    })
}

/// Four-variable ground state expanded on the box `(2,2,2)` from the
/// explicit term list, with the half power read as `reading`.
pub fn four_variable_expansion(pt: &ParamPoint, reading: HalfReading) -> Result<ConeSeries> {
    if pt.n() != 4 {
        return Err(Error::ShapeMismatch("four-variable expansion needs n = 4".into()));
    }
    let trunc = Truncation::Box(vec![2, 2, 2]);
    let half = match reading {
        HalfReading::Q => pt.q(),
        HalfReading::U => pt.u.clone(),
    };
    let q = pt.q();
    let mut acc: BTreeMap<Exponent, Scalar> = BTreeMap::new();
    let mut cache: BTreeMap<[u32; 6], ConeSeries> = BTreeMap::new();
    for tm in four_variable_terms() {
        let mut c = int(tm.sign) * powi(&q, tm.qpow)?;
        for (x, e) in pt.s.iter().zip(&tm.sexp) {
            c *= powi(x, *e)?;
        }
        for (b, k) in &tm.num {
            c *= qpoch(&base_value(b, pt, &half)?, &q, *k)?;
        }
        let mut den = Scalar::one();
        for (b, k) in &tm.den {
            den *= qpoch(&base_value(b, pt, &half)?, &q, *k)?;
        }
        c = checked_div(&c, &den, "four-variable term denominator")?;
        if c.is_zero() {
            continue;
        }
        let body = match cache.get(&tm.ks) {
            Some(b) => b.clone(),
            None => {
                // table order (12, 23, 34, 13, 24, 14) matches `pairs(4)`
                let b = pair_product(&tm.ks, pt, &trunc)?;
                cache.insert(tm.ks, b.clone());
                b
            }
        };
        let shifted = body.shift(&Exponent::new(tm.cone.to_vec()));
        for (e, v) in shifted.terms() {
            *acc.entry(e.clone()).or_insert_with(Scalar::zero) += &c * v;
        }
    }
    Ok(ConeSeries::from_terms(4, &trunc, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigenfunction;
    use crate::qkernel::frac;

    #[test]
    fn pair_order() {
        assert_eq!(pairs(4), vec![(1, 2), (2, 3), (3, 4), (1, 3), (2, 4), (1, 4)]);
        assert_eq!(pairs(2), vec![(1, 2)]);
    }

    #[test]
    fn ground_state_matches_solver_n3() {
        let pt = ParamPoint::new(frac(1, 2), frac(2, 3), vec![frac(3, 5), frac(7, 4), frac(9, 2)], frac(5, 7)).unwrap();
        let tr = Truncation::TotalDegree(4);
        let f = eigenfunction(&pt, &tr, &Exponent::zero(2)).unwrap().f;
        assert_eq!(f, ground_state_n3(&pt, &tr).unwrap());
    }

    #[test]
    fn quasi_degenerates_to_products() {
        for n in [2usize, 3] {
            let pt = ParamPoint::new(frac(1, 2), frac(2, 3), vec![int(1); n], int(1)).unwrap();
            let tr = Truncation::TotalDegree(4);
            let (q, t, v) = (pt.q(), pt.t(), pt.v.clone());
            let all = pairs(n);
            let lhs = quasi_eigenfunction(&v, &pt, &tr).unwrap();
            assert_eq!(lhs, product_series(&(&q / &v), &v, &pt, &tr, &all).unwrap(), "n={n}");
            let lhs = quasi_eigenfunction(&-v.clone(), &pt, &tr).unwrap();
            assert_eq!(lhs, product_series(&-(&q / &v), &-v.clone(), &pt, &tr, &all).unwrap());
            let even: Vec<_> = all.iter().copied().filter(|(i, j)| (j - i) % 2 == 0).collect();
            let lhs = quasi_eigenfunction(&t, &pt, &tr).unwrap();
            assert_eq!(lhs, product_series(&(&q / &t), &t, &pt, &tr, &even).unwrap());
        }
    }
}
