//! Four variables on the box (2,2,2): which reading of the half-integer power
//! reproduces the solved ground state.

use qcommute::verify::check_n4_partial;

fn main() -> qcommute::Result<()> {
    let out = check_n4_partial(1)?;
    println!("status: {}", out.report.status);
    println!("mismatches with p^(1/2) -> q: {:?}", out.mismatches_q.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    println!("mismatches with p^(1/2) -> u: {:?}", out.mismatches_u.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    Ok(())
}
