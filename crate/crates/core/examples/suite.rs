//! Runs every exact check for two seeds and prints the summary table.

use qcommute::verify::{run_suite, summary_table, SuiteConfig};

fn main() -> qcommute::Result<()> {
    let mut cfg = SuiteConfig::all(false);
    cfg.seeds = vec![1, 2];
    let reports = run_suite(&cfg)?;
    print!("{}", summary_table(&reports));
    Ok(())
}
