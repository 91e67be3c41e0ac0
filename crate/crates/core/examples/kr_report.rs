//! max |K_r|/p^{3/4} per prime, for x^r in place of x in the first term.

use kloosterman::report::write_kr_human;
use kloosterman::{kloosterman_r_exact, kr_scan, KrConfig, ParameterPolicy, PrimeModulus};

fn main() -> kloosterman::Result<()> {
    let m = PrimeModulus::new(11)?;
    let k2 = kloosterman_r_exact(&m, 2, 1, 1)?;
    println!(
        "K_2(11; 1, 1) = {:.6} + {:.6}i\n",
        k2.embedding.re, k2.embedding.im
    );

    for r in 1..=3 {
        let cfg = KrConfig {
            policy: ParameterPolicy::Pairs(vec![(1, 1), (1, 2)]),
            ..KrConfig::new(r, 3, 499)
        };
        write_kr_human(&kr_scan(&cfg)?, std::io::stdout().lock())?;
        println!();
    }
    Ok(())
}
