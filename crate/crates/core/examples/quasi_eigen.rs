//! Quasi-eigenfunctions and their degenerations for two and three variables.

use qcommute::series::Truncation;
use qcommute::verify::{check_quasi_eigen, check_shift};

fn main() -> qcommute::Result<()> {
    for n in [2, 3] {
        let q = check_quasi_eigen(n, &Truncation::TotalDegree(4), &Truncation::TotalDegree(3), 3)?;
        let s = check_shift(n, &Truncation::TotalDegree(4), 3)?;
        println!("n={n}: quasi {} / shift {}", q.status, s.status);
        if let Some(d) = q.details {
            println!("  {d}");
        }
    }
    Ok(())
}
