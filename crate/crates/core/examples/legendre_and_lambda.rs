//! Legendre symbols χ(x) = (x/p) and the counts λ_l of z with
//! (z+1)⁻¹ − z⁻¹ ≡ l.

use kloosterman::{lambda_brute, lambda_formula, PrimeModulus};

fn main() -> kloosterman::Result<()> {
    let m = PrimeModulus::new(13)?;

    let residues: Vec<u32> = (1..13).filter(|&a| m.legendre(a as i64) == 1).collect();
    println!("quadratic residues mod 13: {residues:?}");

    let table = lambda_brute(&m);
    println!("{:>3} {:>8} {:>10}", "l", "counted", "1+χ(l²-4l)");
    for (l, count) in table.iter() {
        println!("{l:>3} {count:>8} {:>10}", lambda_formula(&m, l));
    }
    println!("total {} = p - 2", table.total());
    Ok(())
}
