//! The exponential martingale bound `P(sup M ≥ x, ⟨M⟩ ≤ y) ≤ e^{-x²/2y}`,
//! checked for Brownian motion against the reflection-principle value.

use stochtame::experiments::revuz_yor_study;

pub fn run_example() -> stochtame::Result<()> {
    let rows = revuz_yor_study(&[0.5, 1.0, 2.0], &[0.5, 1.0, 2.0], 2000, 1e-3, 0.99, 11)?;
    println!("   x     y     p̂      99% CI            exact    bound");
    for r in &rows {
        println!(
            "{:4.2}  {:4.2}  {:.4}  [{:.4}, {:.4}]  {:.4}  {:.4}",
            r.x, r.y, r.p_hat, r.ci_lo, r.ci_hi, r.exact, r.bound
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}
