//! Interpolation exponents of the temperature bound across conductivity
//! exponents; the second one reaches 1 at b = 11/3.

use radgas::diagnostics::proof_exponents;

fn main() -> radgas::Result<()> {
    println!("{:>8} {:>10} {:>10}", "b", "first", "second");
    for b in [2.0, 3.0, 11.0 / 3.0, 3.7, 4.0, 5.0, 6.0, 7.0, 10.0, 20.0] {
        let (l1, l2) = proof_exponents(b)?;
        println!("{b:>8.4} {l1:>10.6} {l2:>10.6}");
    }
    Ok(())
}
