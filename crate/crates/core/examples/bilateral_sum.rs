//! Approximate check of the bilateral summation behind the kernel, with a
//! rigorous bound on the truncation error.

use qcommute::verify::{check_ramanujan, RamanujanConfig};

fn main() -> qcommute::Result<()> {
    for terms in [20, 50] {
        let cfg = RamanujanConfig { terms, ..RamanujanConfig::default() };
        let out = check_ramanujan(&cfg, 2)?;
        println!(
            "terms={terms}: {} max residual {:.3e}, tail bound {:.3e}",
            out.report.status,
            qcommute::qkernel::to_f64(&out.max_residual),
            out.tail_bound
        );
    }
    Ok(())
}
