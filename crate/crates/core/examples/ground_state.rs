//! Three variables: the solved ground state against the explicit product formula.

use qcommute::eigen::eigenfunction;
use qcommute::qkernel::sample_generic_point;
use qcommute::series::{Exponent, Truncation};
use qcommute::special::ground_state_n3;

fn main() -> qcommute::Result<()> {
    let trunc = Truncation::TotalDegree(5);
    let pt = sample_generic_point(3, 5, 8)?;
    let solved = eigenfunction(&pt, &trunc, &Exponent::zero(2))?.f;
    let closed = ground_state_n3(&pt, &trunc)?;
    let diff = solved.differences(&closed);
    println!("terms: {}, differing: {}", solved.len(), diff.len());
    Ok(())
}
