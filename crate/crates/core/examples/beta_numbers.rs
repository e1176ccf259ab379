//! Jones beta numbers on the Cantor corner set at its critical dyadic
//! scale, next to the exact per-scale lower bounds that force the beta sum
//! to diverge.

use holdercover::beta::{beta_squared_sum, bnv_sum, cantor_beta_bound, dyadic_scale_for};
use holdercover::cantor::{corners, schedule, side_exponents, Variant, DEFAULT_BUDGET};
use holdercover::exact::{format_rational, rat};

fn main() -> holdercover::Result<()> {
    let s = schedule(&rat(3, 4), 3, Variant::Corrected)?;
    let e = side_exponents(&s, None)?;

    let i1 = dyadic_scale_for(&e, 1)? as u32;
    let points = corners(&e, 5, false, DEFAULT_BUDGET)?;
    let report = beta_squared_sum(&points, i1..=i1)?;
    println!(
        "level {i1}: {} squares, min beta(3Q) = {:.4}, level sum {:.4}",
        report.records.len(),
        report.min_beta().unwrap_or(0.0),
        report.per_level_sums[0]
    );

    for n in 1..=3 {
        let b = cantor_beta_bound(&e, n)?;
        println!(
            "n = {n}: i_n = {:>5}, bound = (1/576) 4^({}) = {:.3e}, n * bound = {:.3e}",
            dyadic_scale_for(&e, n)?,
            format_rational(&b.exponent),
            b.value,
            b.ratio_to_harmonic()
        );
    }

    for level in bnv_sum(&points, 1.0, 0..=i1, 1.0 / 12.0)? {
        println!("level {:>2}: {:>5} of {:>5} squares with beta(Q) >= 1/12, partial sum {:.4}", level.level, level.count, level.squares, level.partial_sum);
    }
    Ok(())
}
