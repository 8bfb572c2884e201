//! The scale function of GBM by quadrature, next to its closed form.

use stochtame::noise::{scale_function, ScaleFunctionSpec};

pub fn run_example() -> stochtame::Result<()> {
    for (a, b) in [(1.0, 2.0), (1.0, 0.5), (0.0, 1.0)] {
        let spec = ScaleFunctionSpec::gbm(a, b, 1.0);
        println!("a = {a}, b = {b}, p = 2a/b² = {}", 2.0 * a / (b * b));
        for x in [0.1, 0.5, 2.0, 10.0] {
            let s = scale_function(&spec, x)?;
            let exact = ScaleFunctionSpec::gbm_closed_form(a, b, 1.0, x);
            println!("  s({x:>4}) = {s:>12.6}   closed form {exact:>12.6}");
            assert!((s - exact).abs() <= 1e-6 * exact.abs().max(1.0));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}
