//! Corner sets of the Cantor-type set and its primed twin, plus a seeded
//! sample of deep addresses that would be too many to enumerate.
//!
//! cargo run --example cantor_corners [depth] [out.json]

use holdercover::cantor::{corners, f_map, sample_addresses, schedule, side_exponents, Variant, DEFAULT_BUDGET};
use holdercover::exact::rat;
use holdercover::geometry::{diameter, points_to_json};

fn main() -> holdercover::Result<()> {
    let mut args = std::env::args().skip(1);
    let depth: usize = args.next().map(|s| s.parse().expect("depth")).unwrap_or(3);
    let out = args.next();

    let s = schedule(&rat(3, 4), 3, Variant::Corrected)?;
    let e = side_exponents(&s, Some(&rat(5, 8)))?;
    let k = corners(&e, depth, false, DEFAULT_BUDGET)?;
    let kp = corners(&e, depth, true, DEFAULT_BUDGET)?;
    println!("depth {depth}: {} corners, side {:.3e} (primed {:.3e})", k.len(), e.side(depth as u64, false), e.side(depth as u64, true));
    println!("diameters: {} and {}", diameter(&k), diameter(&kp));

    // depth 40 has 4^40 squares; sampling reaches them without enumeration
    for a in sample_addresses(40, 3, 1) {
        let (p, q) = f_map(&a, &e)?;
        println!("square {a}: K' corner ({:.6}, {:.6}) -> K corner ({:.6}, {:.6})", p.x, p.y, q.x, q.y);
    }

    if let Some(path) = out {
        std::fs::write(&path, points_to_json(&k)).expect("write corners");
        println!("wrote {path}");
    }
    Ok(())
}
