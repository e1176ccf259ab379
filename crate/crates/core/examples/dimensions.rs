//! Box-counting fits on a segment, a filled square, and a Cantor corner set.

use holdercover::cantor::{corners, schedule, side_exponents, Variant, DEFAULT_BUDGET};
use holdercover::covering::{box_count_samples, box_dim_fit};
use holdercover::exact::rat;
use holdercover::Point2;

fn main() -> holdercover::Result<()> {
    let segment: Vec<Point2> = (0..=512).map(|i| Point2::new(i as f64 / 512.0, 0.25)).collect();
    let square: Vec<Point2> = (0..64 * 64).map(|i| Point2::new((i % 64) as f64 / 64.0, (i / 64) as f64 / 64.0)).collect();
    let s = schedule(&rat(3, 4), 2, Variant::Corrected)?;
    let cantor = corners(&side_exponents(&s, None)?, 5, false, DEFAULT_BUDGET)?;

    for (name, pts) in [("segment", &segment), ("square", &square), ("cantor corners", &cantor)] {
        let fit = box_dim_fit(&box_count_samples(pts, 1..=6))?;
        let counts: Vec<u64> = fit.samples.iter().map(|s| s.1).collect();
        println!("{name:>15}: slope {:.3}, residual {:.3}, counts {counts:?}", fit.slope, fit.residual);
    }
    Ok(())
}
