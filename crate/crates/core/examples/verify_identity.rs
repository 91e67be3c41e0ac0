//! Check K(a,b)² = p + Σ_{l=1}^{p} ((l²−4l)/p)·K(a, lb) and the steps behind
//! it for a single (p, a, b), exactly and numerically.

use kloosterman::{CheckName, Mode, PrimeModulus, Verifier};

fn main() -> kloosterman::Result<()> {
    let m = PrimeModulus::new(31)?;
    let verifier = Verifier::new(&m);
    let (a, b) = (3, 7);

    for check in [
        CheckName::SqIdentity,
        CheckName::YDecomposition,
        CheckName::SumOverL,
        CheckName::SecondMoment,
    ] {
        let exact = verifier.identity(check, a, b, Mode::Exact)?;
        let float = verifier.identity(check, a, b, Mode::Float)?;
        println!(
            "{:<16} exact {:<5} float residual {:.3e}",
            check.as_str(),
            exact.passed(),
            float.float_residual
        );
    }

    // three ways to write the cross term Y(a, b)
    let y = verifier.y_double_sum(a as u32, b as u32)?;
    println!("Y by double sum    {y}");
    println!("Y over z           {}", verifier.y_over_z(a as u32, b as u32)?);
    println!(
        "Y from λ counts    {}",
        verifier.y_from_lambda(a as u32, b as u32)?
    );
    Ok(())
}
