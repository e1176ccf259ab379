//! A Hölder curve through a point cloud: greedy cover chain, cover tree,
//! Euler tour, and the certified constant against the observed one.
//!
//! cargo run --example holder_curve [out.svg]

use holdercover::cantor::{corners, schedule, side_exponents, Variant, DEFAULT_BUDGET};
use holdercover::covering::{build_chain, dini_report};
use holdercover::covertree::build_tree;
use holdercover::curve::{build_curve, coverage_gap, holder_estimate};
use holdercover::exact::rat;

fn main() -> holdercover::Result<()> {
    let s = schedule(&rat(3, 4), 2, Variant::Corrected)?;
    let e = side_exponents(&s, None)?;
    let points = corners(&e, 3, false, DEFAULT_BUDGET)?;

    let (levels, d) = (10, 1.5);
    let chain = build_chain(&points, 1.0, levels, d)?;
    let tree = build_tree(&chain)?;
    let curve = build_curve(&tree, &chain)?;

    println!("{} points, counts per level {:?}", points.len(), chain.counts().iter().map(|c| c.1).collect::<Vec<_>>());
    println!("tree: {} vertices, total length {:.6}", tree.len(), tree.total_length());
    println!("coverage gap {:.3e} (radius at level {levels}: {:.3e})", coverage_gap(&points, &curve), (-(levels as f64)).exp2());
    println!(
        "Hölder constant: observed {:.4}, certified {:.4} (exponent {:.4})",
        holder_estimate(&curve, 100_000, 0),
        curve.constant_bound,
        curve.alpha
    );
    let dini = dini_report(&chain.counts(), d)?;
    println!("Dini partial sum {:.6}, verdict {:?}", dini.partial_sums.last().unwrap(), dini.verdict);

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, curve.to_svg(0.002)).expect("write svg");
        println!("wrote {path}");
    }
    Ok(())
}
