//! Seeded sampling of every inequality suite on its constraint surface.
//!
//! `cargo run --release --example inequality_sampling -- 200000 42`

use sigma2lab::ineq::{sample_verify, Inequality, SampleConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().map_or(50_000, |s| s.parse().expect("count"));
    let seed: u64 = args.next().map_or(42, |s| s.parse().expect("seed"));

    let cfg = SampleConfig::new(3, count, seed);
    let suites = [
        Inequality::LemmaCq,
        Inequality::CorollaryThirdDerivative,
        Inequality::LemmaShift,
        Inequality::CorollaryA,
        Inequality::QuadraticForm { eps: 0.04 },
    ];
    println!("{:<30} {:>10} {:>10} {:>10} {:>14}", "inequality", "evaluated", "vacuous", "violations", "min margin");
    for which in suites {
        let r = sample_verify(which, &cfg).unwrap();
        println!(
            "{:<30} {:>10} {:>10} {:>10} {:>14.3e}",
            r.name, r.evaluated, r.vacuous, r.violations, r.min_margin
        );
    }

    // The worker count does not change the report.
    let a = sample_verify(Inequality::LemmaCq, &SampleConfig::new(3, 10_000, seed).with_workers(1)).unwrap();
    let b = sample_verify(Inequality::LemmaCq, &SampleConfig::new(3, 10_000, seed).with_workers(4)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
