//! Checks `[I(alpha), I(beta)] = 0` on a truncation for several variable counts.

use qcommute::series::Truncation;
use qcommute::verify::check_commutator;

fn main() -> qcommute::Result<()> {
    for (n, trunc) in [(2, Truncation::TotalDegree(6)), (3, Truncation::TotalDegree(4)), (4, Truncation::Box(vec![1, 1, 1]))] {
        let r = check_commutator(n, &trunc, 1, 2)?;
        println!("n={n} {trunc}: {}", r.status);
    }
    Ok(())
}
