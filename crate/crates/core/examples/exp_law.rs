//! For `M = W`, `E(ε) = sup_t (M_t - (ε/2)⟨M⟩_t)` is exponential with rate
//! ε, so `P(E ≥ 1) = e^{-ε}`.

use stochtame::experiments::exp_law_study;

pub fn run_example() -> stochtame::Result<()> {
    let r = exp_law_study(1.0, 2000, 1e-3, 20.0, 7)?;
    println!(
        "P(E ≥ 1) = {:.4} (exact {:.4}); KS D = {:.4}, p = {:.3}",
        r.survival_at_1, r.survival_exact, r.ks.statistic, r.ks.p_value
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}
