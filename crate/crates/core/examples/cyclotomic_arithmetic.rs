//! Exact arithmetic in ℤ[ζ_p] and its complex embedding.

use kloosterman::{CyclotomicInt, PrimeModulus, UnitRoots};

fn main() -> kloosterman::Result<()> {
    let m = PrimeModulus::new(7)?;
    let zeta = CyclotomicInt::basis(1, &m);

    // 1 + ζ + ... + ζ^6 = 0
    let mut sum = CyclotomicInt::zero(&m);
    for k in 0..7 {
        sum = sum.add(&CyclotomicInt::basis(k, &m))?;
    }
    println!("1 + ζ + ... + ζ^6 = {sum}  (zero: {})", sum.is_zero());

    // ζ^7 = 1
    let mut power = CyclotomicInt::one(&m);
    for _ in 0..7 {
        power = power.mul(&zeta)?;
    }
    println!("ζ^7 = {power}");

    // x·x̄ is real; its embedding is |x|²
    let x = CyclotomicInt::from_coeffs(&m, vec![3, -1, 0, 2, 0, 0, 1])?;
    let norm = x.mul(&x.conjugate())?;
    let roots = UnitRoots::new(7);
    println!("x = {x}");
    println!("x·conj(x) = {norm}  real: {}", norm.is_real());
    println!("|embed(x)|² = {:.12}", roots.embed(&x).norm_sqr());
    println!("embed(x·conj(x)) = {:.12}", roots.embed(&norm).re);
    Ok(())
}
