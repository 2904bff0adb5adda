//! Builds the operator matrix for three variables and prints its lower-left corner.

use qcommute::qkernel::{format_fraction, sample_generic_point};
use qcommute::series::Truncation;
use qcommute::xform::operator_matrix;

fn main() -> qcommute::Result<()> {
    let trunc = Truncation::TotalDegree(3);
    let pt = sample_generic_point(3, 3, 11)?;
    println!("point: {}", serde_json::to_string(&pt)?);
    let m = operator_matrix(&pt, &trunc)?;
    println!("basis ({}): {:?}", m.basis.len(), m.basis.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    for r in 0..4 {
        let row: Vec<String> = (0..=r).map(|c| format_fraction(m.entries.get(r, c))).collect();
        println!("  {}", row.join("  "));
    }
    m.check_triangular()?;
    println!("lower triangular: yes");
    Ok(())
}
