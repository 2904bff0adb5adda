//! Basic hypergeometric building blocks: q-binomial coefficients and the two
//! summation lemmas.

use qcommute::qkernel::frac;
use qcommute::verify::{check_lemma1, check_lemma3};

fn main() -> qcommute::Result<()> {
    let q = frac(1, 9);
    let terms = qcommute::hyperg::q_binomial_coeffs(&frac(2, 5), &q, 5)?;
    println!("(a z;q)_inf/(z;q)_inf, a = 2/5: {:?}", terms.iter().map(qcommute::qkernel::format_fraction).collect::<Vec<_>>());
    println!("lemma1: {}", check_lemma1(10, 1)?.status);
    println!("lemma3: {}", check_lemma3(10, 1)?.status);
    Ok(())
}
