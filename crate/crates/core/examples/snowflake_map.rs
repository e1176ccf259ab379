//! The corner correspondence between the primed and unprimed Cantor sets:
//! fitted bi-Hölder constants and the covering-number inequality it implies.

use holdercover::cantor::{bihoelder_sample, corners, schedule, side_exponents, Variant, DEFAULT_BUDGET};
use holdercover::covering::pushforward_check;
use holdercover::exact::{format_rational, rat, to_f64};

fn main() -> holdercover::Result<()> {
    let (gamma, delta) = (rat(3, 4), rat(5, 8));
    let s = schedule(&gamma, 2, Variant::Corrected)?;
    let e = side_exponents(&s, Some(&delta))?;

    for depth in 2..=4 {
        let fit = bihoelder_sample(&e, depth, None, 0, DEFAULT_BUDGET)?;
        println!(
            "depth {depth}: exponent {}, L_upper {:.4}, L_lower {:.4} over {} pairs",
            format_rational(&fit.exponent),
            fit.l_upper_fit,
            fit.l_lower_fit,
            fit.pairs
        );
    }

    let k = corners(&e, 3, false, DEFAULT_BUDGET)?;
    let kp = corners(&e, 3, true, DEFAULT_BUDGET)?;
    let identity: Vec<usize> = (0..k.len()).collect();
    let report = pushforward_check(&k, &kp, &identity, to_f64(&(&delta / &gamma)))?;
    for sc in &report.scales {
        println!("eps {:<10} N(K', L eps^a) >= {:>4} <= N(K, eps) <= {:>4}", sc.eps, sc.image_lower, sc.source_net);
    }
    println!("holds: {}", report.holds);
    Ok(())
}
