//! Eigenfunctions of the triangular operator matrix by back-substitution.
//!
//! For an index `j` the eigenvalue is the diagonal entry at `x^j` and the
//! eigenfunction is normalised to `x^j + (terms dominating j)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qkernel::{fraction_serde, powi, ParamPoint, Scalar};
use crate::series::{ConeSeries, Exponent, Truncation};
use crate::xform::{operator_matrix, OperatorMatrix};

pub use crate::xform::lambda_diag as eigenvalue;

/// Normalised eigenfunction with its eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenResult {
    pub j: Exponent,
    #[serde(with = "fraction_serde")]
    pub lambda: Scalar,
    pub f: ConeSeries,
}

/// Solves `(M - lambda_j) f = 0` with `f_j = 1` over exponents dominating `j`.
pub fn eigen_from_matrix(m: &OperatorMatrix, j: &Exponent) -> Result<EigenResult> {
    let jdx = m
        .index_of(j)
        .ok_or_else(|| Error::InvalidInput(format!("index {j} outside truncation {}", m.trunc)))?;
    let lambda = m.entries.get(jdx, jdx).clone();
    let size = m.basis.len();
    let mut c: Vec<Scalar> = vec![Scalar::zero(); size];
    c[jdx] = Scalar::one();
    for r in jdx + 1..size {
        let e = &m.basis[r];
        if !e.dominates(j) {
            continue;
        }
        let mut acc = Scalar::zero();
        for (k, ck) in c.iter().enumerate().take(r).skip(jdx) {
            if ck.is_zero() {
                continue;
            }
            let mrk = m.entries.get(r, k);
            if !mrk.is_zero() {
                acc += mrk * ck;
            }
        }
        if acc.is_zero() {
            continue;
        }
        let gap = &lambda - m.entries.get(r, r);
        if gap.is_zero() {
            return Err(Error::EigenvalueCollision { index: j.to_string(), at: e.to_string() });
        }
        c[r] = acc / gap;
    }
    let f = ConeSeries::from_terms(m.n(), &m.trunc, m.basis.iter().cloned().zip(c));
    Ok(EigenResult { j: j.clone(), lambda, f })
}

/// Builds the operator matrix and solves for index `j`.
pub fn eigenfunction(pt: &ParamPoint, trunc: &Truncation, j: &Exponent) -> Result<EigenResult> {
    let m = operator_matrix(pt, trunc)?;
    eigen_from_matrix(&m, j)
}

/// `M f - lambda f`; zero for a true eigenpair.
pub fn residual(m: &OperatorMatrix, eig: &EigenResult) -> Result<ConeSeries> {
    let mf = m.apply(&eig.f)?;
    mf.sub(&eig.f.scale(&eig.lambda))
}

/// Retries eigen-solving at freshly sampled points when the sampled point
/// turns out non-generic.
pub fn eigenfunction_resampled(
    n: usize,
    trunc: &Truncation,
    j: &Exponent,
    seed: u64,
    attempts: usize,
) -> Result<(ParamPoint, EigenResult)> {
    let mut last = None;
    for a in 0..attempts.max(1) {
        let s = seed ^ ((a as u64) << 40);
        let pt = crate::qkernel::sample_generic_point_with(n, trunc, s, &Default::default())?;
        match eigenfunction(&pt, trunc, j) {
            Ok(e) => return Ok((pt, e)),
            Err(e) if e.is_non_generic() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::ExhaustedRetries(attempts)))
}

/// `s_i -> s_i q^{sign (j_i - j_{i-1})}` with `j_0 = j_n = 0`.
pub fn shifted_point(pt: &ParamPoint, j: &Exponent, sign: i64) -> Result<ParamPoint> {
    let n = pt.n();
    let mut jj = vec![0i64; n + 1];
    for (i, x) in j.as_slice().iter().enumerate() {
        jj[i + 1] = *x as i64;
    }
    let q = pt.q();
    let s = (1..=n)
        .map(|i| Ok(&pt.s[i - 1] * powi(&q, sign * (jj[i] - jj[i - 1]))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(pt.with_s(s))
}

/// Outcome of comparing `f_j` with `x^j f_0` at shifted parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftOutcome {
    pub j: Exponent,
    /// `s_i -> s_i q^{j_i - j_{i-1}}`.
    pub forward: bool,
    /// `s_i -> s_i q^{j_{i-1} - j_i}`.
    pub reversed: bool,
    /// First differing exponent with `(f_j, shifted f_0)` coefficients.
    pub forward_mismatch: Option<(Exponent, Scalar, Scalar)>,
}

/// `f_j(s) = x^j f_0(shifted s)` on the truncation.
pub fn shift_check(pt: &ParamPoint, trunc: &Truncation, j: &Exponent) -> Result<ShiftOutcome> {
    let n = pt.n();
    let fj = eigenfunction(pt, trunc, j)?.f;
    let compare = |sign: i64| -> Result<Option<(Exponent, Scalar, Scalar)>> {
        let ps = shifted_point(pt, j, sign)?;
        let f0 = eigenfunction(&ps, trunc, &Exponent::zero(n - 1))?.f;
        let shifted = f0.shift(j);
        Ok(fj.differences(&shifted).into_iter().next().map(|e| {
            let (a, b) = (fj.coeff(&e), shifted.coeff(&e));
            (e, a, b)
        }))
    };
    let fwd = compare(1)?;
    let rev = match compare(-1) {
        Ok(r) => r.is_none(),
        Err(e) if e.is_non_generic() => false,
        Err(e) => return Err(e),
    };
    Ok(ShiftOutcome { j: j.clone(), forward: fwd.is_none(), reversed: rev, forward_mismatch: fwd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::frac;

    fn pt2() -> ParamPoint {
        ParamPoint::new(frac(1, 2), frac(2, 3), vec![frac(9, 25), frac(49, 16)], frac(5, 7)).unwrap()
    }

    #[test]
    fn eigenpairs_have_zero_residual() {
        let pt = ParamPoint::new(frac(1, 2), frac(2, 3), vec![frac(9, 25), frac(49, 16), frac(4, 9)], frac(5, 7)).unwrap();
        let tr = Truncation::TotalDegree(4);
        let m = operator_matrix(&pt, &tr).unwrap();
        for j in tr.basis(3).iter().take(6) {
            let e = eigen_from_matrix(&m, j).unwrap();
            assert!(residual(&m, &e).unwrap().is_empty(), "j = {j}");
            assert_eq!(e.f.coeff(j), Scalar::one());
            assert_eq!(e.lambda, eigenvalue(j, &pt).unwrap());
        }
    }

    #[test]
    fn n2_eigenvectors_are_columns_of_c() {
        let pt = pt2();
        let d = 6u32;
        let m = operator_matrix(&pt, &Truncation::TotalDegree(d)).unwrap();
        let p = crate::xform::N2Params::new(&pt).unwrap();
        let c = crate::xform::c_matrix(&p, d as usize + 1).unwrap();
        for j in 0..=d as usize {
            let e = eigen_from_matrix(&m, &Exponent::new(vec![j as u32])).unwrap();
            for i in 0..=d as usize {
                assert_eq!(&e.f.coeff(&Exponent::new(vec![i as u32])), c.get(i, j), "({i},{j})");
            }
        }
    }

    #[test]
    fn collision_is_reported() {
        let tr = Truncation::TotalDegree(1);
        let mut entries = crate::matrix::Matrix::identity(2);
        entries.set(1, 0, frac(1, 3));
        let m = OperatorMatrix { point: pt2(), trunc: tr.clone(), basis: tr.basis(2), entries };
        let r = eigen_from_matrix(&m, &Exponent::zero(1));
        assert!(matches!(r, Err(Error::EigenvalueCollision { .. })));
    }

    #[test]
    fn shift_orientation() {
        let pt = pt2();
        let out = shift_check(&pt, &Truncation::TotalDegree(5), &Exponent::new(vec![1])).unwrap();
        assert!(out.forward);
        assert!(!out.reversed);
    }
}
