//! Evaluate K(p; a, b) exactly and in floating point.
//!
//! cargo run --example compute_sum -- 13 2 5

use kloosterman::{kloosterman_exact, kloosterman_float, PrimeModulus};

fn main() -> kloosterman::Result<()> {
    let args: Vec<i64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("integer argument"))
        .collect();
    let (p, a, b) = match args[..] {
        [p, a, b] => (p, a, b),
        _ => (13, 2, 5),
    };

    let m = PrimeModulus::new(p as u64)?;
    let exact = kloosterman_exact(&m, a, b)?;
    let float = kloosterman_float(&m, a, b)?;

    println!("K({p}; {a}, {b})");
    println!("  coefficients of ζ^0..ζ^{}: {}", p - 1, exact.exact);
    println!("  embedding      {:.12}", exact.approx());
    println!("  float path     {float:.12}");
    println!("  |K| / 2√p      {:.6}", float.abs() / (2.0 * (p as f64).sqrt()));
    Ok(())
}
