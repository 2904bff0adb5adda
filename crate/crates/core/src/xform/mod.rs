//! The operator `I(alpha)` on the monomial basis of the truncated series
//! space, built from its explicit action on cone monomials, plus the `n = 2`
//! closed-form matrices.
//!
//! On `x^j` the operator acts as
//!
//! ```text
//! x^j * prod_{i<j} h(zeta_j/zeta_i)
//!     * sum_{k_{l,m} >= 0, l != m} prod_r mu(alpha/s_r; K_r)
//!       * prod_{l != m} g_{k_{l,m}} (zeta_max/zeta_min)^{k_{l,m}}
//! K_r = sum_{l<r} k_{l,r} - sum_{l>r} k_{l,r} + j_{r-1} - j_r,  j_0 = j_n = 0
//! ```
//!
//! Each `k_{l,m}` adds cone weight `|m - l|`, so only finitely many
//! configurations survive any truncation.

pub mod closed;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::qkernel::{format_fraction, fraction_serde, mu, parse_fraction, ParamPoint, Scalar};
use crate::series::{g_coeff, product_h, ConeSeries, Exponent, Truncation};

pub use closed::{
    bidiagonal_l, c_entry, c_entry_2phi1, c_matrix, c_matrix_2phi1, ctilde_6phi5, ctilde_matrix, ctlamc_w87,
    ctlamc_watson, d_matrix, e_entry, e_matrix_closed, inverse_6phi5, lambda_n2, lambda_n2_alt, lambda_n2_matrix,
    N2Params,
};

/// Guard on the number of `k`-configurations enumerated per monomial.
pub const DEFAULT_CONFIG_BUDGET: usize = 20_000_000;

/// Precomputed tables for the monomial action at one parameter point.
pub struct ActionContext {
    pt: ParamPoint,
    trunc: Truncation,
    hprod: ConeSeries,
    /// `(l, m, exponent of zeta_max/zeta_min)` for every ordered pair `l != m`.
    pairs: Vec<(usize, usize, Exponent)>,
    g: Vec<Scalar>,
    /// `mu(alpha/s_r; k)` for `k` in `-offset..=offset`.
    mu_table: Vec<Vec<Scalar>>,
    offset: i64,
    budget: usize,
}

impl ActionContext {
    pub fn new(pt: &ParamPoint, trunc: &Truncation) -> Result<Self> {
        let n = pt.n();
        trunc.check_dim(n)?;
        let w = trunc.max_weight();
        let hprod = product_h(pt, trunc)?;
        let mut pairs = Vec::new();
        for l in 1..=n {
            for m in 1..=n {
                if l != m {
                    pairs.push((l, m, Exponent::pair(l.min(m), l.max(m), n)));
                }
            }
        }
        let g = (0..=w).map(|k| g_coeff(k, pt)).collect::<Result<Vec<_>>>()?;
        // |K_r| <= (sum of all k) + j_{r-1} + j_r <= 2W
        let offset = 2 * w as i64;
        let mut mu_table = Vec::with_capacity(n);
        for s in &pt.s {
            let a = &pt.alpha / s;
            let row = (-offset..=offset).map(|k| mu(&a, k, pt)).collect::<Result<Vec<_>>>()?;
            mu_table.push(row);
        }
        Ok(ActionContext {
            pt: pt.clone(),
            trunc: trunc.clone(),
            hprod,
            pairs,
            g,
            mu_table,
            offset,
            budget: DEFAULT_CONFIG_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn mu_at(&self, r: usize, k: i64) -> Result<&Scalar> {
        if k.abs() > self.offset {
            return Err(Error::InvalidInput(format!("mu index {k} outside the precomputed range")));
        }
        Ok(&self.mu_table[r][(k + self.offset) as usize])
    }

    /// Image of the monomial `x^j`.
    pub fn monomial_image(&self, j: &Exponent) -> Result<ConeSeries> {
        let n = self.pt.n();
        if j.dim() + 1 != n {
            return Err(Error::ShapeMismatch(format!("exponent {j} for n = {n}")));
        }
        if !self.trunc.admits(j) {
            return Ok(ConeSeries::zero(n, &self.trunc));
        }
        let mut jj = vec![0i64; n + 1];
        for (i, x) in j.as_slice().iter().enumerate() {
            jj[i + 1] = *x as i64;
        }
        let mut acc: BTreeMap<Exponent, Scalar> = BTreeMap::new();
        let mut ks = vec![0u32; self.pairs.len()];
        let mut visited = 0usize;
        self.enumerate(0, j.clone(), Scalar::one(), &mut ks, &jj, &mut acc, &mut visited)?;
        let sum = ConeSeries::from_terms(n, &self.trunc, acc);
        sum.mul(&self.hprod)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        idx: usize,
        cur: Exponent,
        gprod: Scalar,
        ks: &mut [u32],
        jj: &[i64],
        acc: &mut BTreeMap<Exponent, Scalar>,
        visited: &mut usize,
    ) -> Result<()> {
        if idx == self.pairs.len() {
            *visited += 1;
            if *visited > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            let n = self.pt.n();
            let mut c = gprod;
            for r in 1..=n {
                let mut k = jj[r - 1] - jj[r];
                for (p, (l, m, _)) in self.pairs.iter().enumerate() {
                    if *m == r {
                        if *l < r {
                            k += ks[p] as i64;
                        } else {
                            k -= ks[p] as i64;
                        }
                    }
                }
                c *= self.mu_at(r - 1, k)?;
                if c.is_zero() {
                    return Ok(());
                }
            }
            let slot = acc.entry(cur).or_insert_with(Scalar::zero);
            *slot += c;
            return Ok(());
        }
        let dir = &self.pairs[idx].2;
        let mut e = cur;
        let mut k = 0u32;
        while self.trunc.admits(&e) {
            ks[idx] = k;
            let g = &gprod * &self.g[k as usize];
            self.enumerate(idx + 1, e.clone(), g, ks, jj, acc, visited)?;
            k += 1;
            e = e.add(dir);
        }
        ks[idx] = 0;
        Ok(())
    }
}

/// Image of the monomial `x^j` under `I(alpha)`, truncated.
pub fn monomial_image(j: &Exponent, pt: &ParamPoint, trunc: &Truncation) -> Result<ConeSeries> {
    ActionContext::new(pt, trunc)?.monomial_image(j)
}

/// Lower-triangular matrix of `I(alpha)` on the truncated monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub point: ParamPoint,
    pub trunc: Truncation,
    pub basis: Vec<Exponent>,
    pub entries: Matrix,
}

impl OperatorMatrix {
    pub fn n(&self) -> usize {
        self.point.n()
    }

    pub fn alpha(&self) -> &Scalar {
        &self.point.alpha
    }

    pub fn index_of(&self, e: &Exponent) -> Option<usize> {
        self.basis.binary_search(e).ok()
    }

    pub fn diagonal(&self) -> Vec<Scalar> {
        (0..self.basis.len()).map(|i| self.entries.get(i, i).clone()).collect()
    }

    /// `M f` for a series on the same truncation.
    pub fn apply(&self, f: &ConeSeries) -> Result<ConeSeries> {
        if f.n() != self.n() || f.trunc() != &self.trunc {
            return Err(Error::ShapeMismatch("series and operator truncations differ".into()));
        }
        let mut out = ConeSeries::zero(self.n(), &self.trunc);
        for (r, e) in self.basis.iter().enumerate() {
            let mut acc = Scalar::zero();
            for (k, c) in f.terms() {
                let col = self.index_of(k).expect("admitted exponent is in the basis");
                let m = self.entries.get(r, col);
                if !m.is_zero() {
                    acc += m * c;
                }
            }
            out.add_term(e.clone(), acc);
        }
        Ok(out)
    }

    /// Restriction to a sub-truncation (rows and columns of admitted exponents).
    pub fn restrict(&self, trunc: &Truncation) -> OperatorMatrix {
        let keep: Vec<usize> = (0..self.basis.len()).filter(|&i| trunc.admits(&self.basis[i])).collect();
        let entries = Matrix::from_fn(keep.len(), keep.len(), |i, j| self.entries.get(keep[i], keep[j]).clone());
        OperatorMatrix {
            point: self.point.clone(),
            trunc: trunc.clone(),
            basis: keep.iter().map(|&i| self.basis[i].clone()).collect(),
            entries,
        }
    }

    /// Verifies entries vanish unless the row exponent dominates the column exponent.
    pub fn check_triangular(&self) -> Result<()> {
        for (r, er) in self.basis.iter().enumerate() {
            for (c, ec) in self.basis.iter().enumerate() {
                if !self.entries.get(r, c).is_zero() && !er.dominates(ec) {
                    return Err(Error::TriangularityViolation { row: r, col: c });
                }
            }
        }
        Ok(())
    }
}

/// Builds the operator matrix column by column (columns in parallel).
pub fn operator_matrix(pt: &ParamPoint, trunc: &Truncation) -> Result<OperatorMatrix> {
    let ctx = ActionContext::new(pt, trunc)?;
    operator_matrix_with(&ctx)
}

pub fn operator_matrix_with(ctx: &ActionContext) -> Result<OperatorMatrix> {
    let basis = ctx.trunc.basis(ctx.pt.n());
    let columns: Vec<ConeSeries> = basis.par_iter().map(|e| ctx.monomial_image(e)).collect::<Result<_>>()?;
    let size = basis.len();
    let mut entries = Matrix::zeros(size, size);
    for (c, col) in columns.iter().enumerate() {
        for (e, v) in col.terms() {
            let r = basis.binary_search(e).expect("image stays inside the truncation");
            entries.set(r, c, v.clone());
        }
    }
    let m = OperatorMatrix { point: ctx.pt.clone(), trunc: ctx.trunc.clone(), basis, entries };
    m.check_triangular()?;
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct OperatorMatrixJson {
    n: usize,
    trunc: Truncation,
    point: ParamPoint,
    #[serde(with = "fraction_serde")]
    alpha: Scalar,
    basis: Vec<Exponent>,
    entries: Vec<Vec<String>>,
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorMatrixJson {
            n: self.n(),
            trunc: self.trunc.clone(),
            point: self.point.clone(),
            alpha: self.point.alpha.clone(),
            basis: self.basis.clone(),
            entries: self.entries.to_fraction_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = OperatorMatrixJson::deserialize(d)?;
        let size = raw.basis.len();
        if raw.entries.len() != size || raw.entries.iter().any(|r| r.len() != size) {
            return Err(D::Error::custom("entries are not square in the basis size"));
        }
        let mut entries = Matrix::zeros(size, size);
        for (i, row) in raw.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                entries.set(i, j, parse_fraction(v).map_err(D::Error::custom)?);
            }
        }
        Ok(OperatorMatrix { point: raw.point, trunc: raw.trunc, basis: raw.basis, entries })
    }
}

/// Eigenvalue attached to index vector `j`:
/// `prod_i (alpha/s_i;q)_{j_{i-1}-j_i} / (alpha q/(s_i t);q)_{j_{i-1}-j_i}`.
pub fn lambda_diag(j: &Exponent, pt: &ParamPoint) -> Result<Scalar> {
    let n = pt.n();
    if j.dim() + 1 != n {
        return Err(Error::ShapeMismatch(format!("index {j} for n = {n}")));
    }
    let q = pt.q();
    let t = pt.t();
    let mut jj = vec![0i64; n + 1];
    for (i, x) in j.as_slice().iter().enumerate() {
        jj[i + 1] = *x as i64;
    }
    let mut acc = Scalar::one();
    for i in 1..=n {
        let a = &pt.alpha / &pt.s[i - 1];
        let k = jj[i - 1] - jj[i];
        let num = crate::qkernel::qpoch(&a, &q, k)?;
        let den = crate::qkernel::qpoch(&(&a * &q / &t), &q, k)?;
        acc *= crate::qkernel::checked_div(&num, &den, "eigenvalue denominator")?;
    }
    Ok(acc)
}

/// Checks that a matrix entry equals a hand-summed expectation; used by tests
/// and the suite to report a readable mismatch.
pub fn describe_entry(m: &OperatorMatrix, r: usize, c: usize) -> String {
    format!("row {} col {} = {}", m.basis[r], m.basis[c], format_fraction(m.entries.get(r, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::{frac, int, sample_generic_point};

    fn pt2() -> ParamPoint {
        ParamPoint::new(frac(1, 2), frac(2, 3), vec![frac(9, 25), frac(49, 16)], frac(5, 7)).unwrap()
    }

    fn pt3() -> ParamPoint {
        ParamPoint::new(frac(1, 2), frac(2, 3), vec![frac(9, 25), frac(49, 16), frac(4, 9)], frac(5, 7)).unwrap()
    }

    #[test]
    fn constant_term_of_image_of_one() {
        let pt = pt3();
        let tr = Truncation::TotalDegree(3);
        let img = monomial_image(&Exponent::zero(2), &pt, &tr).unwrap();
        assert_eq!(img.coeff(&Exponent::zero(2)), int(1));
    }

    #[test]
    fn diagonal_is_eigenvalue_formula() {
        let pt = pt3();
        let tr = Truncation::TotalDegree(4);
        let m = operator_matrix(&pt, &tr).unwrap();
        for (i, e) in m.basis.iter().enumerate() {
            assert_eq!(m.entries.get(i, i), &lambda_diag(e, &pt).unwrap(), "at {e}");
        }
    }

    #[test]
    fn n2_matrix_is_bidiagonal_times_e() {
        let pt = pt2();
        let d = 6u32;
        let m = operator_matrix(&pt, &Truncation::TotalDegree(d)).unwrap();
        let size = d as usize + 1;
        let le = bidiagonal_l(size).mul(&e_matrix_closed(&pt, size).unwrap()).unwrap();
        assert_eq!(m.entries.first_difference(&le), None);
    }

    #[test]
    fn t_equals_q_gives_unit_diagonal() {
        let pt = ParamPoint { v: frac(1, 2), ..pt3() };
        let m = operator_matrix(&pt, &Truncation::TotalDegree(3)).unwrap();
        assert!(m.diagonal().iter().all(One::is_one));
    }

    /// Hand sum for the entry at `(c + unit vector, c)`: only configurations
    /// with a single `k_{l,m} = 1` on an adjacent pair, or the h-product's
    /// linear term, reach one step above the diagonal.
    #[test]
    fn unit_step_entries_match_single_configuration_sum() {
        let pt = pt3();
        let tr = Truncation::TotalDegree(3);
        let m = operator_matrix(&pt, &tr).unwrap();
        let n = 3usize;
        let q = pt.q();
        let t = pt.t();
        let col = Exponent::new(vec![1, 1]);
        let mut jj = vec![0i64; n + 1];
        jj[1] = 1;
        jj[2] = 1;
        let mu_r = |r: usize, k: i64| mu(&(&pt.alpha / &pt.s[r - 1]), k, &pt).unwrap();
        let base: Vec<i64> = (1..=n).map(|r| jj[r - 1] - jj[r]).collect();
        let diag: Scalar = (1..=n).map(|r| mu_r(r, base[r - 1])).product();
        for unit in 0..2usize {
            let mut row = col.as_slice().to_vec();
            row[unit] += 1;
            let row = Exponent::new(row);
            // adjacent pair (a, a+1) with a = unit + 1; either orientation
            let a = unit + 1;
            let b = a + 1;
            let g1 = g_coeff(1, &pt).unwrap();
            let mut want = Scalar::zero();
            // k_{a,b} = 1: index of r = b increases by one
            let mut ks = base.clone();
            ks[b - 1] += 1;
            want += &g1 * (1..=n).map(|r| mu_r(r, ks[r - 1])).product::<Scalar>();
            // k_{b,a} = 1: index of r = a decreases by one
            let mut ks = base.clone();
            ks[a - 1] -= 1;
            want += &g1 * (1..=n).map(|r| mu_r(r, ks[r - 1])).product::<Scalar>();
            // linear term of h(zeta_b/zeta_a) times the diagonal
            let h1 = (int(1) - &q / (&t * &t)) * &t / (int(1) - &q) - int(1);
            want += h1 * &diag;
            let r = m.index_of(&row).unwrap();
            let c = m.index_of(&col).unwrap();
            assert_eq!(m.entries.get(r, c), &want, "unit {unit}");
        }
    }

    #[test]
    fn restriction_matches_direct_build() {
        let pt = sample_generic_point(3, 4, 11).unwrap();
        let big = operator_matrix(&pt, &Truncation::TotalDegree(4)).unwrap();
        let small = operator_matrix(&pt, &Truncation::TotalDegree(2)).unwrap();
        assert_eq!(big.restrict(&Truncation::TotalDegree(2)), small);
        let boxed = operator_matrix(&pt, &Truncation::Box(vec![1, 2])).unwrap();
        assert_eq!(big.restrict(&Truncation::Box(vec![1, 2])), boxed);
    }

    #[test]
    fn budget_guard_trips() {
        let pt = pt3();
        let ctx = ActionContext::new(&pt, &Truncation::TotalDegree(3)).unwrap().with_budget(5);
        assert!(matches!(ctx.monomial_image(&Exponent::zero(2)), Err(Error::BudgetExceeded(5))));
    }

    #[test]
    fn matrix_json_shape() {
        let pt = pt2();
        let m = operator_matrix(&pt, &Truncation::TotalDegree(2)).unwrap();
        let js = serde_json::to_value(&m).unwrap();
        assert_eq!(js["basis"].as_array().unwrap().len(), 3);
        assert_eq!(js["entries"][0][0], "1/1");
        assert_eq!(js["entries"][0][1], "0/1");
        let back: OperatorMatrix = serde_json::from_value(js).unwrap();
        assert_eq!(back, m);
    }
}
