//! Exact-integer cross-checks for the periodic Fibonacci system.

use resonance_bvp::cli::commands::render_fib_check;
use resonance_bvp::lotka_volterra::{fib_check, fib_delta, fib_green_coeffs, fib_green_oracle, FibonacciOracle};

fn main() -> resonance_bvp::Result<()> {
    let o = FibonacciOracle::for_horizon(5);
    println!("Δ(1) = {}, Δ(2) = {}", fib_delta(&o, 1), fib_delta(&o, 2));
    println!("closed form a(2, 3, 1) = {:?}", fib_green_coeffs(&o, 2, 3, 1));
    println!("exact   a(2, 3, 1) = {:?}", fib_green_oracle(&o, 2, 3, 1));
    print!("{}", render_fib_check(&fib_check(12)?));
    Ok(())
}
