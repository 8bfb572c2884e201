//! The `stochtame` command line.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::control::{control_run, validate_schedule};
use crate::error::{Error, Result};
use crate::experiments::{
    aldous_table, assumption_audit, d_space_control_report, gbm_study, run_ensemble, strong_order_study,
    uniform_control_report, AuditConfig,
};
use crate::integrators::{integrate_path, Scheme};
use crate::io::{
    load_config, resolve_seed, write_aldous_csv, write_control_csv, write_json, write_key_values, write_trajectory,
    Provenance, RunConfig, TrajectorySummary,
};
use crate::noise::{scale_function, theta_advisor, Advice, GbmSpec, ScaleFunctionSpec, WienerPath};
use crate::verify::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "stochtame", version, about = "Tamed stochastic fluid simulations and Monte Carlo checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Base seed; overrides STOCHTAME_SEED and the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; defaults to `[output] dir` or `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Number of paths (samples for `audit`).
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one path and write its trajectory.
    Simulate { config: PathBuf },
    /// Run the deterministic/stochastic switching strategy and validate it.
    Control { config: PathBuf },
    /// Monte Carlo ensemble over the cutoffs of `[ensemble]`.
    Ensemble { config: PathBuf },
    /// Fit the structural constants of the configured drift.
    Audit {
        config: PathBuf,
        /// Gradient ascent iterations from the two best samples; 0 disables.
        #[arg(long, default_value_t = 20)]
        ascent: usize,
    },
    /// Exact-solution study of geometric Brownian motion.
    Gbm {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        f0: f64,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        /// Also measure the strong order of tamed Euler–Maruyama.
        #[arg(long)]
        order: bool,
    },
    /// Tabulate the scale function of GBM against its closed form.
    Scalefn {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.1)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Run a self-check suite; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value = "trivial", value_parser = parse_suite)]
        suite: Suite,
    },
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Ctx {
    out: PathBuf,
    quiet: bool,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn out_dir(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.map(|c| PathBuf::from(&c.output.dir)))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Hash of a flag-only command's parameters.
fn params_hash<T: Serialize>(v: &T) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(serde_json::to_vec(v).unwrap_or_default()))
}

fn load(cli: &Cli, path: &Path) -> Result<(RunConfig, u64, Provenance, Ctx)> {
    let cfg = load_config(path)?;
    let seed = resolve_seed(cli.seed, cfg.seed)?;
    let prov = Provenance::new(cfg.hash()?, seed);
    let ctx = Ctx { out: out_dir(cli, Some(&cfg)), quiet: cli.quiet };
    Ok((cfg, seed, prov, ctx))
}

fn report_advice(ctx: &Ctx, advice: &Option<Advice>, prov: &Provenance) -> Result<()> {
    if let Some(a) = advice {
        ctx.say(format!("advisor: θ = {:.6}, α = {:.6} ({})", a.theta, a.alpha, a.inequality));
        write_json(&ctx.path("advice.json"), a, prov)?;
    }
    Ok(())
}

fn simulate(cli: &Cli, path: &Path) -> Result<i32> {
    let (cfg, seed, prov, ctx) = load(cli, path)?;
    let noise = cfg.resolve_noise()?;
    let advice = noise.as_ref().and_then(|n| n.1.clone());
    let (sys, x0) = cfg.single_path(noise.map(|n| n.0))?;
    let stepper = cfg.stepper();
    let wiener = sys.has_noise().then(|| WienerPath::new(seed, stepper.dt)).transpose()?;
    let mut rec = integrate_path(&x0, &sys, &stepper, wiener, cfg.epsilon())?;
    rec.seed = Some(seed);
    rec.config_hash = prov.config_hash.clone();
    report_advice(&ctx, &advice, &prov)?;
    let file = ctx.path("trajectory.jsonl");
    write_trajectory(&file, &rec, &prov)?;
    let last = rec.final_row();
    ctx.say(format!(
        "t = {:.4}, ‖X‖_F0 = {:.6e}, blow-up: {}; wrote {}",
        rec.t_final(),
        last.map_or(f64::NAN, |r| r.norm_f0),
        rec.blowup.map_or("none".into(), |(t, r)| format!("{} at t = {t:.4}", r.as_str())),
        file.display()
    ));
    Ok(0)
}

fn control(cli: &Cli, path: &Path) -> Result<i32> {
    let (cfg, seed, prov, ctx) = load(cli, path)?;
    let sched = cfg.control.ok_or_else(|| Error::Config("`control` needs a [control] section".into()))?;
    let (noise, advice) = cfg.resolve_noise()?.ok_or_else(|| Error::Config("[control] needs a [noise] section".into()))?;
    report_advice(&ctx, &advice, &prov)?;
    let paths = cli.paths.unwrap_or(1);
    let (sys, x0) = cfg.single_path(Some(noise))?;
    let stepper = cfg.stepper();
    let mut all_ok = true;
    let mut reports = Vec::new();
    for i in 0..paths as u64 {
        let s = seed.wrapping_add(i);
        let mut rec = control_run(&x0, &sys, &sched, &stepper, WienerPath::new(s, stepper.dt)?, cfg.epsilon())?;
        rec.seed = Some(s);
        rec.config_hash = prov.config_hash.clone();
        let v = validate_schedule(&rec, &sched);
        all_ok &= v.pass;
        let name = if paths == 1 { "trajectory.jsonl".to_string() } else { format!("trajectory_{s}.jsonl") };
        write_trajectory(&ctx.path(&name), &rec, &Provenance::new(prov.config_hash.clone(), s))?;
        ctx.say(format!(
            "seed {s}: {} tau, {} rho, α = {}, blow-up: {}, schedule {}",
            v.n_tau,
            v.n_rho,
            v.alpha.map_or("n/a".into(), |a| format!("{a:.4}")),
            rec.blowup.map_or("none".into(), |(t, r)| format!("{} at t = {t:.4}", r.as_str())),
            if v.pass { "valid" } else { "INVALID" }
        ));
        for f in &v.failures {
            ctx.say(format!("  {f}"));
        }
        reports.push((s, v, TrajectorySummary::of(&rec).events));
    }
    #[derive(Serialize)]
    struct Out<'a> {
        l_hi: f64,
        l_lo: f64,
        paths: &'a [(u64, crate::control::ValidationReport, Vec<crate::integrators::Event>)],
    }
    write_json(&ctx.path("control.json"), &Out { l_hi: sched.l_hi(), l_lo: sched.l_lo(), paths: &reports }, &prov)?;
    Ok(if all_ok { 0 } else { 1 })
}

fn ensemble(cli: &Cli, path: &Path) -> Result<i32> {
    let (mut cfg, seed, prov, ctx) = load(cli, path)?;
    cfg.seed = seed;
    if let (Some(n), Some(e)) = (cli.paths, cfg.ensemble.as_mut()) {
        e.n_paths = n;
    }
    let target = cfg.ensemble.as_ref().map_or(0.1, |e| e.epsilon_target);
    let noise = cfg.resolve_noise()?;
    report_advice(&ctx, &noise.as_ref().and_then(|n| n.1.clone()), &prov)?;
    let ens = cfg.ensemble_config(noise.map(|n| n.0))?;
    let out = run_ensemble(&ens, false)?;
    let s = &out.stats;
    let u = uniform_control_report(s, target)?;
    let d = d_space_control_report(s, target)?;
    write_control_csv(&ctx.path("uniform_control.csv"), &u.sup.rows, &prov)?;
    write_control_csv(&ctx.path("integral_control.csv"), &u.integral.rows, &prov)?;
    write_control_csv(&ctx.path("d_space_control.csv"), &d.rows, &prov)?;
    let aldous = if ens.aldous.is_some() {
        let t = aldous_table(s, ens.aldous.as_ref().and_then(|a| a.eta))?;
        write_aldous_csv(&ctx.path("aldous.csv"), &t.rows, &prov)?;
        Some(t)
    } else {
        None
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        uniform: &'a crate::experiments::UniformControlReport,
        d_space: &'a crate::experiments::ThresholdReport,
        aldous_eta: Option<f64>,
        blowups: &'a [crate::experiments::Counts],
        failures: &'a [u64],
        schedule_ok: &'a [crate::experiments::Counts],
        min_dwell: &'a [Option<f64>],
    }
    write_json(
        &ctx.path("summary.json"),
        &Summary {
            uniform: &u,
            d_space: &d,
            aldous_eta: aldous.as_ref().map(|a| a.eta),
            blowups: &s.blowups,
            failures: &s.failures,
            schedule_ok: &s.schedule_ok,
            min_dwell: &s.min_dwell,
        },
        &prov,
    )?;
    let show = |k: Option<f64>| k.map_or("not attained".to_string(), |v| format!("{v}"));
    ctx.say(format!(
        "K₁ = {}, K₂ = {}, K_D = {}; blow-ups {:?}; wrote {}",
        show(u.k1()),
        show(u.k2()),
        show(d.k_attained),
        s.blowups.iter().map(|c| format!("{}/{}", c.hits, c.n)).collect::<Vec<_>>(),
        ctx.out.display()
    ));
    Ok(0)
}

fn audit(cli: &Cli, path: &Path, ascent: usize) -> Result<i32> {
    let (cfg, seed, prov, ctx) = load(cli, path)?;
    let op = cfg.operator()?;
    let mut ac = AuditConfig::for_operator(&op, cfg.cutoff(), cli.paths.unwrap_or(200), seed);
    if ascent > 0 {
        ac.ascent_starts = 2;
        ac.ascent_iters = ascent;
    }
    let r = assumption_audit(&op, &ac)?;
    let k = &r.constants;
    let mut kv: Vec<(String, String)> = vec![
        ("kind".into(), format!("{:?}", r.kind)),
        ("c1".into(), k.c1.to_string()),
        ("c2".into(), k.c2.to_string()),
        ("c3".into(), k.c3.to_string()),
        ("gamma1".into(), k.gamma1.to_string()),
        ("gamma2".into(), k.gamma2.to_string()),
        ("gamma_sup1".into(), k.gamma_sup1.to_string()),
        ("gamma_sup2".into(), k.gamma_sup2.to_string()),
        ("gamma13".into(), k.gamma13.to_string()),
        ("c1_a2".into(), k.c1_a2.to_string()),
        ("c1_a3".into(), k.c1_a3.to_string()),
        ("alpha_emb".into(), k.alpha_emb.to_string()),
        ("beta_emb".into(), k.beta_emb.to_string()),
        ("declared_gamma1".into(), r.declared_gamma1.to_string()),
        ("fitted_gamma1".into(), r.fitted_gamma1.to_string()),
        ("exponent_ok".into(), r.exponent_ok.to_string()),
        ("sample_max_a1".into(), r.sample_max_a1.to_string()),
        ("sample_argmax_seed".into(), r.sample_argmax_seed.to_string()),
        ("refined_max_a1".into(), r.refined_max_a1.to_string()),
        ("max_abs_ratio_g".into(), r.max_abs_ratio_g.to_string()),
    ];
    if let Some(n) = &cfg.noise {
        let a = theta_advisor(n.case, k, n.epsilon)?;
        kv.push(("advised_theta".into(), a.theta.to_string()));
        kv.push(("advised_alpha".into(), a.alpha.to_string()));
    }
    write_key_values(&ctx.path("audit.csv"), &kv, &prov)?;
    write_json(&ctx.path("audit.json"), &r, &prov)?;
    for (key, v) in &kv {
        ctx.say(format!("{key:>20}  {v}"));
    }
    Ok(0)
}

fn gbm(cli: &Cli, a: f64, b: f64, f0: f64, t: f64, order: bool) -> Result<i32> {
    let spec = GbmSpec::new(a, b, f0)?;
    let n = cli.paths.unwrap_or(1000);
    let seed = resolve_seed(cli.seed, 0)?;
    let prov = Provenance::new(params_hash(&(a, b, f0, t, n, order)), seed);
    let ctx = Ctx { out: out_dir(cli, None), quiet: cli.quiet };
    let rows = gbm_study(&[spec], n, t, seed)?;
    let r = &rows[0];
    ctx.say(format!(
        "b² > 2a: {}; P̂(f_T < 1e-2 f0) = {:.4} [{:.4}, {:.4}], exact {:.4}; median f_T/f0 = {:.4e}",
        r.decays, r.frac_small, r.ci_lo, r.ci_hi, r.frac_small_exact, r.median_ratio
    ));
    #[derive(Serialize)]
    struct Out<'a> {
        rows: &'a [crate::experiments::GbmRow],
        strong_order: Option<crate::experiments::StrongOrderReport>,
    }
    let strong = if order {
        let dts = [2f64.powi(-9), 2f64.powi(-10), 2f64.powi(-11)];
        let s = strong_order_study(&spec, Scheme::TamedEulerMaruyama, &dts, n, 1.0, seed)?;
        ctx.say(format!("tamed Euler–Maruyama strong order {:.3}, errors {:?}", s.order, s.errors));
        Some(s)
    } else {
        None
    };
    write_json(&ctx.path("gbm.json"), &Out { rows: &rows, strong_order: strong }, &prov)?;
    Ok(0)
}

fn scalefn(cli: &Cli, a: f64, b: f64, c: f64, x_min: f64, x_max: f64, points: usize) -> Result<i32> {
    if !(x_min > 0.0 && x_max > x_min && points >= 2 && c > 0.0) {
        return Err(Error::Config("need 0 < x_min < x_max, c > 0 and at least two points".into()));
    }
    let seed = resolve_seed(cli.seed, 0)?;
    let prov = Provenance::new(params_hash(&(a, b, c, x_min, x_max, points)), seed);
    let ctx = Ctx { out: out_dir(cli, None), quiet: cli.quiet };
    let spec = ScaleFunctionSpec::gbm(a, b, c);
    #[derive(Serialize)]
    struct Row {
        x: f64,
        s: f64,
        closed_form: f64,
    }
    let ratio = (x_max / x_min).powf(1.0 / (points - 1) as f64);
    let rows: Vec<Row> = (0..points)
        .map(|i| {
            let x = x_min * ratio.powi(i as i32);
            Ok(Row { x, s: scale_function(&spec, x)?, closed_form: ScaleFunctionSpec::gbm_closed_form(a, b, c, x) })
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|r| (r.s - r.closed_form).abs() / r.closed_form.abs().max(1.0)).fold(0.0, f64::max);
    let file = ctx.path("scalefn.csv");
    let kv: Vec<(String, String)> = rows.iter().map(|r| (r.x.to_string(), r.s.to_string())).collect();
    write_key_values(&file, &kv, &prov)?;
    write_json(&ctx.path("scalefn.json"), &serde_json::json!({ "rows": rows, "max_rel_error": worst }), &prov)?;
    ctx.say(format!(
        "s(x_max) = {:.6e}, max relative deviation from the closed form {worst:.2e}; p = 2a/b² = {:.4}",
        rows.last().map_or(f64::NAN, |r| r.s),
        2.0 * a / (b * b)
    ));
    Ok(0)
}

fn verify(cli: &Cli, suite: Suite) -> Result<i32> {
    let checks = run_suite(suite);
    for c in &checks {
        if !cli.quiet || !c.pass {
            println!("{c}");
        }
    }
    if let Some(dir) = &cli.out {
        write_json(&dir.join("verify.json"), &serde_json::json!({ "checks": checks }), &Provenance::new("", 0))?;
    }
    Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    if let Some(j) = cli.jobs {
        // fails harmlessly if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match &cli.command {
        Command::Simulate { config } => simulate(cli, config),
        Command::Control { config } => control(cli, config),
        Command::Ensemble { config } => ensemble(cli, config),
        Command::Audit { config, ascent } => audit(cli, config, *ascent),
        Command::Gbm { a, b, f0, t, order } => gbm(cli, *a, *b, *f0, *t, *order),
        Command::Scalefn { a, b, c, x_min, x_max, points } => scalefn(cli, *a, *b, *c, *x_min, *x_max, *points),
        Command::Verify { suite } => verify(cli, *suite),
    }
}

/// Entry point of the binary: 0 on success, 1 on failed checks or runtime
/// errors, 2 on usage and configuration errors.
pub fn main_from_env() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parse(_) | Error::Parameter(_) => 2,
                _ => 1,
            }
        }
    }
}
