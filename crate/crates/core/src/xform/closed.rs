//! Closed forms for two variables: the diagonalising triangular pair `C`,
//! `D = C^-1`, the auxiliary `C~`, eigenvalues, and the matrix `E` with
//! `I(alpha) = L E` where `L` is the unit lower bidiagonal difference matrix.
//!
//! Everything is written in `s = s_1/s_2`, `r = s^{1/2}` and `v = t^{1/2}`.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::hyperg::{phi_eval_terminating, phi_series, w87_eval, PhiSpec};
use crate::matrix::Matrix;
use crate::qkernel::{checked_div, int, powi, qpoch, qpoch_multi, sqrt_exact, ParamPoint, Scalar};

/// Derived quantities of a two-variable parameter point.
#[derive(Clone, Debug)]
pub struct N2Params {
    pub q: Scalar,
    pub t: Scalar,
    pub v: Scalar,
    pub s1: Scalar,
    pub s2: Scalar,
    pub s: Scalar,
    pub r: Scalar,
    pub alpha: Scalar,
}

impl N2Params {
    pub fn new(pt: &ParamPoint) -> Result<Self> {
        if pt.n() != 2 {
            return Err(crate::error::Error::ShapeMismatch(format!("closed forms need n = 2, got {}", pt.n())));
        }
        let s = &pt.s[0] / &pt.s[1];
        let r = sqrt_exact(&s)?;
        Ok(N2Params {
            q: pt.q(),
            t: pt.t(),
            v: pt.v.clone(),
            s1: pt.s[0].clone(),
            s2: pt.s[1].clone(),
            s,
            r,
            alpha: pt.alpha.clone(),
        })
    }

    fn qp(&self, k: i64) -> Result<Scalar> {
        powi(&self.q, k)
    }

    fn ratio(&self, up: &[Scalar], lo: &[Scalar], k: i64) -> Result<Scalar> {
        let num = qpoch_multi(up, &self.q, k)?;
        let den = qpoch_multi(lo, &self.q, k)? * qpoch(&self.q, &self.q, k)?;
        checked_div(&num, &den, "closed-form denominator")
    }
}

/// `C_{ij}`, the `j`-th eigenvector's coefficient of `x^i`, as a `4phi3` term:
/// `(s q^{2j}/t, r q^{j+1}/v, -r q^{j+1}/v, 1/t)_d / (q, r q^j/v, -r q^j/v, s q^{2j+1})_d t^d`.
pub fn c_entry(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let d = (i - j) as i64;
    let j = j as i64;
    let q2j = p.qp(2 * j)?;
    let rq = &p.r * p.qp(j)? / &p.v;
    let up = [&p.s * &q2j / &p.t, &rq * &p.q, -(&rq * &p.q), p.t.recip()];
    let lo = [rq.clone(), -rq, &p.s * &q2j * &p.q];
    Ok(p.ratio(&up, &lo, d)? * powi(&p.t, d)?)
}

/// `C_{ij}` as a first difference of `2phi1` coefficients:
/// `a_d - a_{d-1}` with `a_m = (q/t, s q^{2j+1}/t)_m / (q, s q^{2j+1})_m t^m`.
pub fn c_entry_2phi1(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let d = i - j;
    let z = p.s.clone() * p.qp(2 * j as i64 + 1)?;
    let coeffs = phi_series(&PhiSpec {
        upper: vec![&p.q / &p.t, &z / &p.t],
        lower: vec![z],
        q: p.q.clone(),
        z_order: d,
    })?;
    let a = |m: usize| -> Result<Scalar> { Ok(&coeffs[m] * powi(&p.t, m as i64)?) };
    if d == 0 {
        a(0)
    } else {
        Ok(a(d)? - a(d - 1)?)
    }
}

/// `D_{ij} = (s q^{i+j+1}/t, t)_d / (q, s q^{i+j})_d`.
pub fn d_entry(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let d = (i - j) as i64;
    let sq = &p.s * p.qp((i + j) as i64)?;
    p.ratio(&[&sq * &p.q / &p.t, p.t.clone()], &[sq], d)
}

/// `C~_{ij} = (s q^{2j+1}/t, q/t)_d / (q, s q^{2j+1})_d t^d`.
pub fn ctilde_entry(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let d = (i - j) as i64;
    let z = &p.s * p.qp(2 * j as i64 + 1)?;
    Ok(p.ratio(&[&z / &p.t, &p.q / &p.t], &[z], d)? * powi(&p.t, d)?)
}

pub fn c_matrix(p: &N2Params, size: usize) -> Result<Matrix> {
    Matrix::lower_from_fn(size, |i, j| c_entry(p, i, j))
}

pub fn c_matrix_2phi1(p: &N2Params, size: usize) -> Result<Matrix> {
    Matrix::lower_from_fn(size, |i, j| c_entry_2phi1(p, i, j))
}

pub fn d_matrix(p: &N2Params, size: usize) -> Result<Matrix> {
    Matrix::lower_from_fn(size, |i, j| d_entry(p, i, j))
}

pub fn ctilde_matrix(p: &N2Params, size: usize) -> Result<Matrix> {
    Matrix::lower_from_fn(size, |i, j| ctilde_entry(p, i, j))
}

/// `lambda_j = (alpha/s_1)_{-j} (alpha/s_2)_j / ((alpha q/(s_1 t))_{-j} (alpha q/(s_2 t))_j)`.
pub fn lambda_n2(p: &N2Params, j: usize) -> Result<Scalar> {
    let j = j as i64;
    let a1 = &p.alpha / &p.s1;
    let a2 = &p.alpha / &p.s2;
    let num = qpoch(&a1, &p.q, -j)? * qpoch(&a2, &p.q, j)?;
    let den = qpoch(&(&a1 * &p.q / &p.t), &p.q, -j)? * qpoch(&(&a2 * &p.q / &p.t), &p.q, j)?;
    checked_div(&num, &den, "eigenvalue denominator")
}

/// Same eigenvalue with the negative index rewritten through
/// `(a)_{-j} = 1/(a q^{-j})_j`.
pub fn lambda_n2_alt(p: &N2Params, j: usize) -> Result<Scalar> {
    let j = j as i64;
    let qmj = p.qp(-j)?;
    let a1 = &p.alpha / &p.s1;
    let a2 = &p.alpha / &p.s2;
    let num = qpoch(&a2, &p.q, j)? * qpoch(&(&a1 * &p.q * &qmj / &p.t), &p.q, j)?;
    let den = qpoch(&(&a2 * &p.q / &p.t), &p.q, j)? * qpoch(&(&a1 * &qmj), &p.q, j)?;
    checked_div(&num, &den, "eigenvalue denominator")
}

pub fn lambda_n2_matrix(p: &N2Params, size: usize) -> Result<Matrix> {
    let diag = (0..size).map(|j| lambda_n2(p, j)).collect::<Result<Vec<_>>>()?;
    Ok(Matrix::diagonal(&diag))
}

/// `E_{ij}` as a terminating balanced `4phi3` at argument `q`.
pub fn e_entry(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let d = (i - j) as i64;
    let (q, t) = (&p.q, &p.t);
    let sa = &p.s1 / &p.alpha;
    let a1 = &p.alpha / &p.s1;
    let a2 = &p.alpha / &p.s2;
    let qj1 = p.qp(j as i64 + 1)?;
    let pre = p.ratio(&[q / t, &sa * &qj1 / t], &[&sa * &qj1], d)? * powi(t, d)? * lambda_n2(p, j)?;
    let qmd = p.qp(-d)?;
    let qmi = p.qp(-(i as i64))?;
    let qj = p.qp(j as i64)?;
    let upper = [qmd.clone(), t.clone(), &a1 * &qmi, &a2 * &qj];
    let lower = [&qmd * t, &a1 * &qmi * t, &a2 * &qj1 / t];
    Ok(pre * phi_eval_terminating(&upper, &lower, q, q, d as usize)?)
}

pub fn e_matrix_closed(pt: &ParamPoint, size: usize) -> Result<Matrix> {
    let p = N2Params::new(pt)?;
    Matrix::lower_from_fn(size, |i, j| e_entry(&p, i, j))
}

/// `(C~ Lambda D)_{ij}` as a very-well-poised `8W7` at argument `q/t`.
pub fn ctlamc_w87_entry(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let (ii, jj) = (i as i64, j as i64);
    let (q, t) = (&p.q, &p.t);
    let root = p.r.recip() * p.qp(-ii)?;
    let qmi = p.qp(-ii)?;
    let rest = [
        q / t,
        p.qp(-ii - jj)? * t / &p.s,
        &p.alpha / &p.s1 * &qmi,
        &p.s2 / &p.alpha * &qmi * t,
        p.qp(jj - ii)?,
    ];
    let w = w87_eval(&root, &rest, q, &(q / t), i - j)?;
    Ok(lambda_n2(p, i)? * d_entry(p, i, j)? * w)
}

/// Same entry after Watson's transformation, a terminating `4phi3` at `q`.
pub fn ctlamc_watson_entry(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let (ii, jj) = (i as i64, j as i64);
    let d = ii - jj;
    let (q, t) = (&p.q, &p.t);
    let q1mi = p.qp(1 - ii)?;
    let qmi = p.qp(-ii)?;
    let qmd = p.qp(-d)?;
    let num = qpoch(&(p.qp(1 - 2 * ii)? / &p.s), q, d)? * qpoch(&(q / t), q, d)?;
    let den = qpoch(&(&p.s2 / &p.alpha * &q1mi), q, d)? * qpoch(&(&p.alpha / &p.s1 * &q1mi / t), q, d)?;
    let pre = lambda_n2(p, i)? * d_entry(p, i, j)? * checked_div(&num, &den, "Watson prefactor")?;
    let upper = [qmd.clone(), &p.alpha / &p.s1 * &qmi, &p.s2 / &p.alpha * &qmi * t, qmd.clone()];
    let lower = [&qmd * t, &qmd * q / t, p.qp(-2 * ii)? * t / &p.s];
    Ok(pre * phi_eval_terminating(&upper, &lower, q, q, d as usize)?)
}

pub fn ctlamc_w87(p: &N2Params, size: usize) -> Result<Matrix> {
    Matrix::lower_from_fn(size, |i, j| ctlamc_w87_entry(p, i, j))
}

pub fn ctlamc_watson(p: &N2Params, size: usize) -> Result<Matrix> {
    Matrix::lower_from_fn(size, |i, j| ctlamc_watson_entry(p, i, j))
}

/// `sum_k C_{ik} D_{kj}` written as `D_{ij}` times a `6phi5` at argument `q`;
/// equals `delta_{ij}`.
pub fn inverse_6phi5(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let (ii, jj) = (i as i64, j as i64);
    let (q, t) = (&p.q, &p.t);
    let rq = &p.r * p.qp(jj)? / &p.v;
    let q2j = p.qp(2 * jj)?;
    let upper = [
        &p.s * &q2j / t,
        &rq * q,
        -(&rq * q),
        t.recip(),
        &p.s * p.qp(ii + jj)?,
        p.qp(jj - ii)?,
    ];
    let lower = [rq.clone(), -rq, &p.s * &q2j * q, p.qp(jj - ii + 1)? / t, &p.s * p.qp(ii + jj + 1)? / t];
    Ok(d_entry(p, i, j)? * phi_eval_terminating(&upper, &lower, q, q, i - j)?)
}

/// `sum_k C~_{ik} D_{kj}` written as `D_{ij}` times a `6phi5` at argument `1`;
/// equals `1` on and below the diagonal.
pub fn ctilde_6phi5(p: &N2Params, i: usize, j: usize) -> Result<Scalar> {
    if i < j {
        return Ok(Scalar::zero());
    }
    let (ii, jj) = (i as i64, j as i64);
    let (q, t) = (&p.q, &p.t);
    let rinv = p.r.recip();
    let upper = [
        p.qp(-2 * ii)? / &p.s,
        p.qp(1 - ii)? * &rinv,
        -(p.qp(1 - ii)? * &rinv),
        q / t,
        p.qp(-ii - jj)? * t / &p.s,
        p.qp(jj - ii)?,
    ];
    let lower = [
        p.qp(-ii)? * &rinv,
        -(p.qp(-ii)? * &rinv),
        p.qp(-2 * ii)? * t / &p.s,
        p.qp(jj - ii + 1)? / t,
        p.qp(1 - ii - jj)? / &p.s,
    ];
    Ok(d_entry(p, i, j)? * phi_eval_terminating(&upper, &lower, q, &Scalar::one(), i - j)?)
}

/// Unit lower bidiagonal matrix with `-1` below the diagonal.
pub fn bidiagonal_l(size: usize) -> Matrix {
    Matrix::from_fn(size, size, |i, j| {
        if i == j {
            int(1)
        } else if i == j + 1 {
            int(-1)
        } else {
            Scalar::zero()
        }
    })
}
