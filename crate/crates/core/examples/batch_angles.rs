//! All K(1, t) for one prime and the histogram of their angles θ, where
//! K = 2√p·cos θ.

use kloosterman::report::kloosterman_angle;
use kloosterman::{batch_kloosterman, batch_kloosterman_fft, PrimeModulus};

const BINS: usize = 12;

fn main() -> kloosterman::Result<()> {
    let m = PrimeModulus::new(1009)?;
    let values = batch_kloosterman_fft(&m);

    let direct = batch_kloosterman(&m);
    let drift = values
        .iter()
        .zip(&direct)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    println!("p = {}, transform vs direct: max difference {drift:.2e}", m.p());

    let scale = 2.0 * (m.p() as f64).sqrt();
    let mut hist = [0usize; BINS];
    for &v in &values {
        let theta = kloosterman_angle(v, scale);
        let bin = ((theta / std::f64::consts::PI) * BINS as f64) as usize;
        hist[bin.min(BINS - 1)] += 1;
    }
    let widest = *hist.iter().max().unwrap();
    for (i, count) in hist.iter().enumerate() {
        let bar = "#".repeat(count * 50 / widest);
        println!(
            "θ/π in [{:.2}, {:.2})  {count:>4}  {bar}",
            i as f64 / BINS as f64,
            (i + 1) as f64 / BINS as f64
        );
    }
    Ok(())
}
