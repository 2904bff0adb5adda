//! Two variables: the operator matrix against its closed-form factorisation
//! `M = C Lambda C^{-1}` with `C^{-1} = D`.

use qcommute::matrix::Matrix;
use qcommute::qkernel::sample_generic_point;
use qcommute::series::Truncation;
use qcommute::xform::{c_matrix, d_matrix, lambda_n2_matrix, operator_matrix, N2Params};

fn main() -> qcommute::Result<()> {
    let size = 6;
    let pt = sample_generic_point(2, size as u32 - 1, 2)?;
    let p = N2Params::new(&pt)?;
    let m = operator_matrix(&pt, &Truncation::TotalDegree(size as u32 - 1))?;
    let c = c_matrix(&p, size)?;
    let d = d_matrix(&p, size)?;
    let l = lambda_n2_matrix(&p, size)?;
    println!("C D = I: {}", c.mul(&d)?.sub(&Matrix::identity(size))?.is_zero());
    println!("C Lambda D = M: {}", c.mul(&l)?.mul(&d)?.sub(&m.entries)?.is_zero());
    Ok(())
}
