//! Minimum sampled margin of the quadratic-form inequality as ε grows.

use sigma2lab::ineq::{epsilon_frontier, SampleConfig};

fn main() {
    let cfg = SampleConfig::new(3, 50_000, 42);
    let grid = [0.0, 0.01, 0.02, 0.03, 0.04, 0.049, 0.1, 0.2, 0.4];
    let table = epsilon_frontier(&cfg, &grid).unwrap();
    table.write_csv(std::io::stdout()).unwrap();
    match table.largest_nonnegative_eps() {
        Some(e) => println!("largest eps without violations: {e}"),
        None => println!("violations already at eps = {}", grid[0]),
    }
    println!("monotone within tol: {}", table.monotone(table.tol));
}
