//! Solves for an eigenfunction and confirms the residual vanishes.

use qcommute::eigen::{eigen_from_matrix, residual};
use qcommute::qkernel::{format_fraction, sample_generic_point};
use qcommute::series::{Exponent, Truncation};
use qcommute::xform::operator_matrix;

fn main() -> qcommute::Result<()> {
    let trunc = Truncation::TotalDegree(4);
    let pt = sample_generic_point(3, 4, 5)?;
    let m = operator_matrix(&pt, &trunc)?;
    let j = Exponent::new(vec![1, 0]);
    let e = eigen_from_matrix(&m, &j)?;
    println!("lambda_{j} = {}", format_fraction(&e.lambda));
    for (exp, c) in e.f.terms().take(6) {
        println!("  x^{exp}: {}", format_fraction(c));
    }
    println!("residual terms: {}", residual(&m, &e)?.len());
    Ok(())
}
