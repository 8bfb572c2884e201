//! Geometric Brownian motion `df = a f dt + b f dW`: exact terminal samples,
//! the decay criterion `b² > 2a`, and the strong order of the tamed scheme.

use stochtame::experiments::{gbm_study, strong_order_study};
use stochtame::integrators::Scheme;
use stochtame::noise::{gbm_decay_criterion, GbmSpec};

pub fn run_example() -> stochtame::Result<()> {
    let specs = [GbmSpec::new(1.0, 2.0, 1.0)?, GbmSpec::new(1.0, 0.5, 1.0)?, GbmSpec::new(-0.5, 0.3, 1.0)?];
    println!("   a     b  b²>2a  P(f_T<1e-2)   95% CI            exact    median f_T");
    for row in gbm_study(&specs, 2000, 10.0, 1)? {
        println!(
            "{:5.2} {:5.2}  {:5}  {:10.4}   [{:.4}, {:.4}]  {:.4}   {:.3e}",
            row.a, row.b, row.decays, row.frac_small, row.ci_lo, row.ci_hi, row.frac_small_exact, row.median_ratio
        );
    }

    let spec = specs[0];
    assert!(gbm_decay_criterion(&spec));
    let dts = [2f64.powi(-7), 2f64.powi(-8), 2f64.powi(-9)];
    for scheme in [Scheme::EulerMaruyama, Scheme::TamedEulerMaruyama] {
        let r = strong_order_study(&spec, scheme, &dts, 500, 1.0, 2)?;
        println!("{scheme:?}: strong order {:.3}", r.order);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}
