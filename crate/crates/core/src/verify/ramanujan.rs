//! Approximate check of Ramanujan's bilateral summation in the form
//!
//! ```text
//! sum_m (alpha;q)_m/(alpha q/t;q)_m (u/v)^m w^m
//!   = (q, q/t;q)_inf / (alpha q/t, q/alpha;q)_inf
//!     * (c w, q/(c w);q)_inf / (b w, b/w;q)_inf,   b = u/v, c = alpha u/v.
//! ```
//!
//! The product side is expanded as a Laurent series in `w` from
//! Euler's expansions cut at `K` terms; the prefactor uses products cut at
//! `K` factors. Arithmetic stays exact; only the cuts are approximations.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde_json::json;

use super::{Claim, Discrepancy, Status, VerificationReport};
use crate::error::Result;
use crate::hyperg::poly_mul;
use crate::qkernel::{format_sci, frac, mu, parse_decimal, powi, qpoch, rng_for, to_f64, ParamPoint, Scalar};
use crate::series::Truncation;

#[derive(Clone, Debug)]
pub struct RamanujanConfig {
    /// Laurent window `|m| <= window`.
    pub window: i64,
    /// Number of terms/factors kept in every infinite expansion.
    pub terms: usize,
    /// Decimal tolerance, e.g. `"1e-25"`.
    pub tol: String,
}

impl Default for RamanujanConfig {
    fn default() -> Self {
        RamanujanConfig { window: 6, terms: 50, tol: "1e-25".into() }
    }
}

#[derive(Clone, Debug)]
pub struct RamanujanOutcome {
    pub report: VerificationReport,
    pub max_residual: Scalar,
    pub tail_bound: f64,
}

/// `u = +-1/2`, `2 <= |v| <= 4`, `1/2 <= |alpha| <= 2`, `s = (1, 1)`.
pub fn ramanujan_point(seed: u64) -> ParamPoint {
    let mut rng = rng_for(seed, 0x7A5A_0001);
    let u = if rng.gen_bool(0.5) { frac(1, 2) } else { frac(-1, 2) };
    let pick = |rng: &mut rand_chacha::ChaCha8Rng, lo: i64, hi: i64| loop {
        let a = rng.gen_range(1..=16i64);
        let b = rng.gen_range(1..=16i64);
        if a >= lo * b && a <= hi * b && a != b {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            return frac(sign * a, b);
        }
    };
    let v = loop {
        let a = rng.gen_range(2..=64i64);
        let b = rng.gen_range(1..=16i64);
        if a >= 2 * b && a <= 4 * b {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            break frac(sign * a, b);
        }
    };
    let alpha = loop {
        let x = pick(&mut rng, 0, 2);
        if x.abs() >= frac(1, 2) && x.abs() != frac(1, 1) {
            break x;
        }
    };
    ParamPoint { u, v, s: vec![frac(1, 1), frac(1, 1)], alpha }
}

/// `(x w;q)_inf` cut after `terms` terms: `sum (-1)^k q^{k(k-1)/2} x^k/(q;q)_k w^k`.
fn euler(x: &Scalar, q: &Scalar, terms: usize) -> Result<Vec<Scalar>> {
    (0..=terms)
        .map(|k| {
            let k = k as i64;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            Ok(frac(sign, 1) * powi(q, k * (k - 1) / 2)? * powi(x, k)? / qpoch(q, q, k)?)
        })
        .collect()
}

/// `1/(x w;q)_inf` cut after `terms` terms: `sum x^k/(q;q)_k w^k`.
fn euler_inverse(x: &Scalar, q: &Scalar, terms: usize) -> Result<Vec<Scalar>> {
    (0..=terms).map(|k| Ok(powi(x, k as i64)? / qpoch(q, q, k as i64)?)).collect()
}

/// `(-|x|; |q|)_inf` in floating point.
fn pos_product(x: f64, q: f64) -> f64 {
    let mut p = 1.0;
    let mut qi = 1.0;
    for _ in 0..200 {
        p *= 1.0 + x * qi;
        qi *= q;
    }
    p
}

/// Upper bound on `|exact - computed|` for every coefficient in the window.
///
/// Both Laurent factors are q-binomial series, so
/// `|P_k| <= A |b|^k` with `A = (-|alpha|;|q|)_inf / (|q|;|q|)_inf` and
/// `|N_k| <= B |b|^k` with `B = (-|t/alpha|;|q|)_inf / (|q|;|q|)_inf`.
/// Terms dropped from the convolution have `k >= K + 1 - max(m, 0)`, giving
/// `A B |b|^{2K + 2 - W} / (1 - b^2)`. Each prefactor product cut at `K`
/// factors has relative error at most `e^{d} - 1`, `d = |x| |q|^K / (1 - |q|)`;
/// summing over the four products and scaling by the largest coefficient
/// bounds the prefactor contribution.
fn tail_bound(pt: &ParamPoint, cfg: &RamanujanConfig, prefactor: f64, coeff_max: f64) -> f64 {
    let q = to_f64(&pt.q()).abs();
    let t = to_f64(&pt.t()).abs();
    let b = to_f64(&(&pt.u / &pt.v)).abs();
    let alpha = to_f64(&pt.alpha).abs();
    let k = cfg.terms as f64;
    let w = cfg.window as f64;
    let inv_qq = 1.0 / (1..200).fold(1.0, |p, i| p * (1.0 - q.powi(i)));
    let a_const = pos_product(alpha, q) * inv_qq;
    let b_const = pos_product(t / alpha, q) * inv_qq;
    let series = prefactor.abs() * a_const * b_const * b.powf(2.0 * k + 2.0 - w) / (1.0 - b * b);
    let qk = q.powf(k);
    let rel: f64 = [q, q / t, alpha * q / t, q / alpha]
        .iter()
        .map(|x| (x * qk / (1.0 - q)).exp_m1())
        .sum::<f64>();
    // 1/(1 - d) <= 1 + 2d for the denominators at these sizes
    series + 2.0 * rel * coeff_max
}

/// Runs the approximate check at `ramanujan_point(seed)`.
pub fn check_ramanujan(cfg: &RamanujanConfig, seed: u64) -> Result<RamanujanOutcome> {
    let pt = ramanujan_point(seed);
    let tol = parse_decimal(&cfg.tol)?;
    let (q, t) = (pt.q(), pt.t());
    let b = &pt.u / &pt.v;
    let c = &pt.alpha * &b;
    let k = cfg.terms;
    let p = poly_mul(&euler(&c, &q, k)?, &euler_inverse(&b, &q, k)?, k);
    let n = poly_mul(&euler(&(&q / &c), &q, k)?, &euler_inverse(&b, &q, k)?, k);
    let kk = k as i64;
    let prefactor = qpoch(&q, &q, kk)? * qpoch(&(&q / &t), &q, kk)?
        / (qpoch(&(&pt.alpha * &q / &t), &q, kk)? * qpoch(&(&q / &pt.alpha), &q, kk)?);

    let mut max_res = Scalar::zero();
    let mut worst: Option<(i64, Scalar, Scalar)> = None;
    let mut rhs_max = 0f64;
    let mut residuals = Vec::new();
    for m in -cfg.window..=cfg.window {
        let mut lhs = Scalar::zero();
        for j in 0..=k as i64 {
            let i = m + j;
            if (0..=k as i64).contains(&i) {
                lhs += &p[i as usize] * &n[j as usize];
            }
        }
        let lhs = &prefactor * lhs;
        let rhs = mu(&pt.alpha, m, &pt)?;
        rhs_max = rhs_max.max(to_f64(&rhs).abs());
        let res = (&lhs - &rhs).abs();
        residuals.push(json!({ "m": m, "residual": format_sci(&res, 3) }));
        if worst.is_none() || res > max_res {
            max_res = res.clone();
            worst = Some((m, lhs, rhs));
        }
    }
    let bound = tail_bound(&pt, cfg, to_f64(&prefactor), rhs_max);
    let bound_ok = bound.is_finite() && bound <= to_f64(&tol);
    let passed = max_res < tol && bound_ok;
    let discrepancy = (!passed).then(|| {
        let (m, l, r) = worst.clone().expect("window is nonempty");
        let why = if bound_ok { "residual not below tolerance" } else { "tail bound exceeds tolerance" };
        Discrepancy::new(format!("w^{m} ({why})"), &l, &r)
    });
    let mut report = VerificationReport::from_outcome(
        "ramanujan",
        Claim::Approximate,
        pt.clone(),
        Truncation::TotalDegree(cfg.window as u32),
        seed,
        discrepancy,
    );
    report.status = if passed { Status::Pass } else { Status::Fail };
    let report = report.with_details(json!({
        "window": cfg.window,
        "terms": cfg.terms,
        "tol": cfg.tol,
        "max_residual": format_sci(&max_res, 6),
        "tail_bound": format!("{bound:.3e}"),
        "residuals": residuals,
    }));
    Ok(RamanujanOutcome { report, max_residual: max_res, tail_bound: bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_ranges() {
        for seed in 0..20 {
            let pt = ramanujan_point(seed);
            assert_eq!(pt.q(), frac(1, 4));
            let v = pt.v.abs();
            assert!(v >= frac(2, 1) && v <= frac(4, 1));
            let a = pt.alpha.abs();
            assert!(a >= frac(1, 2) && a <= frac(2, 1));
        }
    }

    #[test]
    fn zeroth_coefficient_is_one() {
        let pt = ramanujan_point(3);
        assert_eq!(mu(&pt.alpha, 0, &pt).unwrap(), frac(1, 1));
    }

    #[test]
    fn passes_at_default_settings() {
        let out = check_ramanujan(&RamanujanConfig::default(), 1).unwrap();
        assert_eq!(out.report.status, Status::Pass, "{:?}", out.report.details);
        assert!(out.tail_bound < 1e-25);
    }

    #[test]
    fn too_few_terms_fail() {
        let cfg = RamanujanConfig { terms: 8, ..RamanujanConfig::default() };
        let out = check_ramanujan(&cfg, 1).unwrap();
        assert_eq!(out.report.status, Status::Fail);
        assert!(out.report.first_discrepancy.is_some());
    }
}
