//! Inviscid Burgers from `sin x`: the noise-free run loses resolution near
//! the shock time `t = 1`, while the tamed run with advised θ keeps going.
//!
//! The run is described by a TOML config, the same format the `stochtame`
//! binary reads.

use stochtame::integrators::integrate_path;
use stochtame::io::parse_config;
use stochtame::noise::WienerPath;

const CONFIG: &str = r#"
seed = 3

[model]
kind = "burgers1d"
resolution = 256

[initial]
space = "F0"
field = { type = "sine", amplitude = 1.0 }

# from the refined audit at n = 1024 (see the `audit` example); the
# sample-only advisor (`theta = "advisor"`) underestimates C₁ here
[noise]
theta = 6.73
alpha = 1.55
case = "I"

[stepper]
scheme = "milstein"
t_end = 2.0
save_every = 100
resolution_tail = 1e-3
"#;

pub fn run_example() -> stochtame::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let (noise, _) = cfg.resolve_noise()?.expect("config has a noise section");
    let stepper = cfg.stepper();

    let (plain, x0) = cfg.single_path(None)?;
    let det = integrate_path(&x0, &plain, &stepper, None, cfg.epsilon())?;
    match det.blowup {
        Some((t, why)) => println!("θ = 0: {} at t = {t:.4}", why.as_str()),
        None => println!("θ = 0: reached t = {}", det.t_final()),
    }

    let (tamed, x0) = cfg.single_path(Some(noise))?;
    let rec = integrate_path(&x0, &tamed, &stepper, Some(WienerPath::new(cfg.seed, stepper.dt)?), cfg.epsilon())?;
    println!("     t      ‖X‖_F0      ‖X‖_F1         M        ⟨M⟩");
    for r in &rec.rows {
        println!("{:6.3}  {:10.4e}  {:10.4e}  {:9.4}  {:9.4}", r.t, r.norm_f0, r.norm_f1, r.m, r.qv);
    }
    match rec.blowup {
        Some((t, why)) => println!("tamed: {} at t = {t:.4}", why.as_str()),
        None => println!("tamed: reached t = {}, E(ε) = {:.4}", rec.t_final(), rec.e_record),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}
