//! Basic hypergeometric series: coefficient lists for truncated series in
//! `z`, exact sums of terminating series, and the very-well-poised `8W7`
//! completion.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qkernel::{checked_div, format_fraction, powi, Scalar};

/// `r+1 phi r (upper; lower; q, z)` truncated at `z^z_order`.
#[derive(Clone, Debug)]
pub struct PhiSpec {
    pub upper: Vec<Scalar>,
    pub lower: Vec<Scalar>,
    pub q: Scalar,
    pub z_order: usize,
}

/// Coefficients of `z^0..z^z_order`:
/// `(a_1..a_{r+1};q)_k / (b_1..b_r, q;q)_k`.
///
/// Terms are built by the ratio recurrence; once a numerator factor
/// vanishes every later coefficient is zero and no further denominators are
/// evaluated.
pub fn phi_series(spec: &PhiSpec) -> Result<Vec<Scalar>> {
    let one = Scalar::one();
    let mut out = Vec::with_capacity(spec.z_order + 1);
    let mut term = one.clone();
    let mut qk = one.clone();
    out.push(term.clone());
    for k in 0..spec.z_order {
        if term.is_zero() {
            out.push(Scalar::zero());
            continue;
        }
        let mut num = one.clone();
        for a in &spec.upper {
            num *= &one - a * &qk;
        }
        let mut den = &one - &qk * &spec.q;
        for b in &spec.lower {
            den *= &one - b * &qk;
        }
        if num.is_zero() {
            term = Scalar::zero();
        } else {
            term = checked_div(&(term * num), &den, &format!("lower parameter pole at term {}", k + 1))?;
        }
        out.push(term.clone());
        qk *= &spec.q;
    }
    Ok(out)
}

/// Smallest `m <= bound` with some upper parameter equal to `q^-m`.
pub fn termination_index(upper: &[Scalar], q: &Scalar, bound: usize) -> Option<usize> {
    let qinv = if q.is_zero() { return None } else { q.recip() };
    let mut p = Scalar::one();
    for m in 0..=bound {
        if upper.iter().any(|a| a == &p) {
            return Some(m);
        }
        p *= &qinv;
    }
    None
}

/// Exact value of a terminating series. When several upper parameters are
/// of the form `q^-m`, the smallest `m` governs.
pub fn phi_eval_terminating(
    upper: &[Scalar],
    lower: &[Scalar],
    q: &Scalar,
    z: &Scalar,
    bound: usize,
) -> Result<Scalar> {
    let m = termination_index(upper, q, bound).ok_or(Error::NotTerminating(bound))?;
    let coeffs = phi_series(&PhiSpec { upper: upper.to_vec(), lower: lower.to_vec(), q: q.clone(), z_order: m })?;
    let mut acc = Scalar::zero();
    let mut zk = Scalar::one();
    for c in coeffs {
        acc += c * &zk;
        zk *= z;
    }
    Ok(acc)
}

/// Parameter lists of the very-well-poised series
/// `W(a1; a_4..a_{r+1}; q, z)`, given `sqrt(a1)`: upper
/// `a1, q sqrt(a1), -q sqrt(a1), a_4, ...`, lower
/// `sqrt(a1), -sqrt(a1), q a1/a_4, ...`.
pub fn very_well_poised_params(a1_root: &Scalar, rest: &[Scalar], q: &Scalar) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let a1 = a1_root * a1_root;
    let mut upper = vec![a1.clone(), q * a1_root, -(q * a1_root)];
    let mut lower = vec![a1_root.clone(), -a1_root.clone()];
    for a in rest {
        upper.push(a.clone());
        lower.push(checked_div(&(q * &a1), a, &format!("well-poised partner of {}", format_fraction(a)))?);
    }
    Ok((upper, lower))
}

/// Terminating `8W7(a1; a_4..a_8; q, z)` (any number of extra parameters).
pub fn w87_eval(a1_root: &Scalar, rest: &[Scalar], q: &Scalar, z: &Scalar, terminating_bound: usize) -> Result<Scalar> {
    let (upper, lower) = very_well_poised_params(a1_root, rest, q)?;
    phi_eval_terminating(&upper, &lower, q, z, terminating_bound)
}

/// q-binomial theorem: `(a z;q)_inf / (z;q)_inf = sum_k (a;q)_k/(q;q)_k z^k`;
/// returns the coefficients for `k = 0..=order`.
pub fn q_binomial_coeffs(a: &Scalar, q: &Scalar, order: usize) -> Result<Vec<Scalar>> {
    phi_series(&PhiSpec { upper: vec![a.clone()], lower: vec![], q: q.clone(), z_order: order })
}

/// Coefficients of `z^k` in `sum_k c_k (scale z)^k`.
pub fn rescale(coeffs: &[Scalar], scale: &Scalar) -> Vec<Scalar> {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * powi(scale, k as i64).expect("nonnegative power"))
        .collect()
}

/// Truncated product of two coefficient lists.
pub fn poly_mul(a: &[Scalar], b: &[Scalar], order: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::{frac, int, qpoch, qpoch_multi};

    #[test]
    fn constant_term_is_one() {
        let c = phi_series(&PhiSpec { upper: vec![frac(2, 3), frac(5, 7)], lower: vec![frac(-1, 4)], q: frac(1, 3), z_order: 3 })
            .unwrap();
        assert_eq!(c[0], int(1));
    }

    #[test]
    fn unit_upper_parameter_kills_tail() {
        let c = phi_series(&PhiSpec { upper: vec![int(1), frac(5, 7)], lower: vec![frac(-1, 4)], q: frac(1, 3), z_order: 4 })
            .unwrap();
        assert!(c[1..].iter().all(Zero::is_zero));
    }

    #[test]
    fn two_phi_one_terminating_at_one() {
        let q = frac(2, 5);
        let (b, c) = (frac(-3, 7), frac(4, 11));
        let coeffs = phi_series(&PhiSpec { upper: vec![q.recip(), b.clone()], lower: vec![c.clone()], q: q.clone(), z_order: 4 })
            .unwrap();
        let want = (int(1) - q.recip()) * (int(1) - &b) / ((int(1) - &c) * (int(1) - &q));
        assert_eq!(coeffs[1], want);
        assert_eq!(coeffs[2], int(0));
    }

    #[test]
    fn coefficients_match_direct_pochhammer_ratio() {
        let q = frac(-1, 3);
        let up = vec![frac(2, 3), frac(5, 7), frac(-9, 2)];
        let lo = vec![frac(-1, 4), frac(7, 5)];
        let c = phi_series(&PhiSpec { upper: up.clone(), lower: lo.clone(), q: q.clone(), z_order: 6 }).unwrap();
        for (k, ck) in c.iter().enumerate() {
            let k = k as i64;
            let want = qpoch_multi(&up, &q, k).unwrap() / (qpoch_multi(&lo, &q, k).unwrap() * qpoch(&q, &q, k).unwrap());
            assert_eq!(ck, &want);
        }
    }

    #[test]
    fn terminating_detection() {
        let q = frac(1, 3);
        let qm3 = powi(&q, -3).unwrap();
        assert_eq!(termination_index(&[frac(2, 7), qm3.clone()], &q, 10), Some(3));
        assert_eq!(termination_index(&[frac(2, 7)], &q, 10), None);
        // m = 0 gives the single term 1
        let v = phi_eval_terminating(&[int(1), frac(2, 7)], &[frac(3, 5)], &q, &frac(9, 4), 4).unwrap();
        assert_eq!(v, int(1));
        assert!(matches!(
            phi_eval_terminating(&[frac(2, 7)], &[frac(3, 5)], &q, &int(1), 4),
            Err(Error::NotTerminating(4))
        ));
    }

    #[test]
    fn terminating_series_vanish_past_termination() {
        let q = frac(3, 7);
        for m in 0..4i64 {
            let c = phi_series(&PhiSpec {
                upper: vec![powi(&q, -m).unwrap(), frac(5, 2), frac(-1, 3)],
                lower: vec![frac(2, 9), frac(11, 4)],
                q: q.clone(),
                z_order: m as usize + 1,
            })
            .unwrap();
            assert!(c[m as usize + 1].is_zero());
        }
    }

    #[test]
    fn well_poised_completion_pairs_parameters() {
        let q = frac(1, 4);
        let root = frac(3, 5);
        let a1 = &root * &root;
        let rest = vec![frac(2, 3), frac(-7, 2)];
        let (up, lo) = very_well_poised_params(&root, &rest, &q).unwrap();
        assert_eq!(up.len(), 5);
        assert_eq!(lo.len(), 4);
        for (a, b) in up[3..].iter().zip(&lo[2..]) {
            assert_eq!(a * b, &q * &a1);
        }
        assert_eq!(&up[1] * &lo[1], -(&q * &a1));
    }

    #[test]
    fn q_binomial_matches_finite_product_for_negative_power() {
        // a = q^-N turns the ratio into the polynomial (z q^-N;q)_N
        let q = frac(2, 3);
        let n = 3i64;
        let c = q_binomial_coeffs(&powi(&q, -n).unwrap(), &q, 5).unwrap();
        let mut poly = vec![int(1)];
        for i in 0..n {
            let f = powi(&q, i - n).unwrap();
            poly = poly_mul(&poly, &[int(1), -f], poly.len());
        }
        for (k, ck) in c.iter().enumerate().take(6) {
            assert_eq!(*ck, poly.get(k).cloned().unwrap_or_else(Scalar::zero), "k={k}");
        }
    }
}
