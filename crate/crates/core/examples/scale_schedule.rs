//! Scale schedules for gamma = 3/4 under both sign conventions, with the
//! exact side-length exponents and the normalized lengths at odd stages.
//!
//! cargo run --example scale_schedule [gamma] [stages]

use holdercover::cantor::{normalized_length, schedule, side_exponents, ScheduleDoc, Variant};
use holdercover::exact::{format_rational, parse_rational};

fn main() -> holdercover::Result<()> {
    let mut args = std::env::args().skip(1);
    let gamma = parse_rational(&args.next().unwrap_or_else(|| "3/4".into()))?;
    let stages: usize = args.next().map(|s| s.parse().expect("stages")).unwrap_or(3);

    for variant in [Variant::Corrected, Variant::Printed] {
        let s = schedule(&gamma, stages, variant)?;
        let e = side_exponents(&s, None)?;
        println!("{variant}: k = {:?}, clamped at {:?}", s.ks, s.clamp_indices());
        for n in 1..=stages {
            let nl = normalized_length(&e, n)?;
            println!(
                "  n = {n}: k = {:>6}, e_k = {:>12}, n 4^k ell_k = {:.6} (window: {})",
                nl.k,
                format_rational(&e.e(nl.k)),
                nl.value,
                nl.in_window
            );
        }
        println!("  {}", ScheduleDoc::new(&s, &e).to_json());
    }
    Ok(())
}
