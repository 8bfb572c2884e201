//! Every example runs to completion.

#[path = "../examples/gbm.rs"]
mod gbm;
#[path = "../examples/scale_function.rs"]
mod scale_function;
#[path = "../examples/exp_law.rs"]
mod exp_law;
#[path = "../examples/revuz_yor.rs"]
mod revuz_yor;
#[path = "../examples/simulate_burgers.rs"]
mod simulate_burgers;
#[path = "../examples/control.rs"]
mod control;
#[path = "../examples/ensemble.rs"]
mod ensemble;
#[path = "../examples/audit.rs"]
mod audit;
#[path = "../examples/rsw.rs"]
mod rsw;
#[path = "../examples/vorticity.rs"]
mod vorticity;

#[test]
fn gbm_example() {
    gbm::run_example().unwrap();
}

#[test]
fn scale_function_example() {
    scale_function::run_example().unwrap();
}

#[test]
fn exp_law_example() {
    exp_law::run_example().unwrap();
}

#[test]
fn revuz_yor_example() {
    revuz_yor::run_example().unwrap();
}

#[test]
fn simulate_burgers_example() {
    simulate_burgers::run_example().unwrap();
}

#[test]
fn control_example() {
    control::run_example().unwrap();
}

#[test]
fn ensemble_example() {
    ensemble::run_example().unwrap();
}

#[test]
fn audit_example() {
    audit::run_example().unwrap();
}

#[test]
fn rsw_example() {
    rsw::run_example().unwrap();
}

#[test]
fn vorticity_example() {
    vorticity::run_example().unwrap();
}
