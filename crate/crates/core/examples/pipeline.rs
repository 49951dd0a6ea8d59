//! The command-line pipeline driven from code: verify, solve, probe, report.
//!
//! `cargo run --release --example pipeline -- /tmp/sigma2lab-run`

use std::path::PathBuf;

use sigma2lab::cli;

fn main() {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sigma2lab-pipeline".into()));
    let dir = |s: &str| root.join(s).display().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["verify".into(), "--count".into(), "20000".into()],
        vec!["solve".into(), "--data".into(), "zero".into()],
        vec!["probe".into(), "--kind".into(), "pogorelov".into(), "--solve".into(), dir("solve")],
        vec!["probe".into(), "--kind".into(), "warren".into()],
        vec!["probe".into(), "--kind".into(), "phase".into(), "--count".into(), "10000".into()],
    ];
    let mut outs = Vec::new();
    for args in runs {
        let name = if args[0] == "probe" { args[2].clone() } else { args[0].clone() };
        let out = dir(&name);
        let mut argv = vec!["sigma2lab".to_string(), "--out".into(), out.clone()];
        argv.extend(args);
        let code = cli::run(argv);
        println!("{name:<10} exit {code}");
        outs.push(out);
    }
    let code = cli::run(["sigma2lab".to_string(), "--out".into(), dir("report"), "report".into(), "--inputs".into(), outs.join(",")]);
    println!("report     exit {code}");
    println!("{}", std::fs::read_to_string(root.join("report/summary.csv")).unwrap());
}
