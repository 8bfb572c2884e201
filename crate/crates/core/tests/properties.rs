use proptest::prelude::*;

use stochtame::control::{scale_inverse, scale_value, ControlSchedule};
use stochtame::experiments::{wilson_interval, PathSummary, SummaryStats};
use stochtame::io::{parse_config, RunConfig};
use stochtame::models::{default_ladder, ModelKind, ModelParams};
use stochtame::noise::{noise_factor, CaseLabel, NoiseSpec};
use stochtame::spectral::{
    galerkin_project, interpolation_check, random_field, sobolev_norm, GalerkinProjector, TorusGrid,
};

const D_LIST: [usize; 2] = [4, 8];
const K_GRID: [f64; 3] = [0.5, 2.0, 10.0];
const DELTAS: [f64; 2] = [0.01, 0.1];

fn path_summary() -> impl Strategy<Value = PathSummary> {
    (
        prop::sample::select(D_LIST.to_vec()),
        0u64..1000,
        0.0f64..20.0,
        0.0f64..20.0,
        any::<bool>(),
        0.0f64..5.0,
        prop::option::of((any::<bool>(), 0.0f64..1.0, 0usize..3)),
        prop::collection::vec(0.0f64..1.0, 2),
    )
        .prop_map(|(d, seed, sup, int, blew_up, e, ctl, increments)| PathSummary {
            d,
            seed,
            sup_f0sq: if blew_up { f64::INFINITY } else { sup },
            int_f1sq: int,
            sup_dsq: sup * 2.0,
            blew_up,
            e_record: e,
            schedule_ok: ctl.map(|c| c.0),
            dwell: ctl.map(|c| c.1),
            control_cycles: ctl.map_or(0, |c| c.2),
            increments,
        })
}

fn stats_of(paths: &[PathSummary]) -> SummaryStats {
    let mut s = SummaryStats::empty(&D_LIST, &K_GRID, &DELTAS, 0.95);
    for p in paths {
        s.push(p).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn scale_function_round_trips(dk in 0.01f64..100.0, c in 0.1f64..10.0, m in 0.0f64..1e4) {
        let sched = ControlSchedule::new(c.ln().max(0.0) + dk, c).unwrap();
        let y = scale_value(m, &sched).unwrap();
        let back = scale_inverse(y, &sched).unwrap();
        prop_assert!((back - m).abs() <= 1e-8 * (1.0 + m));
    }

    #[test]
    fn wilson_interval_contains_estimate(n in 1u64..5000, frac in 0.0f64..=1.0, level in 0.5f64..0.999) {
        let k = ((n as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(k, n, level);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn stats_merge_is_associative_and_commutative(
        a in prop::collection::vec(path_summary(), 0..8),
        b in prop::collection::vec(path_summary(), 0..8),
        c in prop::collection::vec(path_summary(), 0..8),
    ) {
        let (sa, sb, sc) = (stats_of(&a), stats_of(&b), stats_of(&c));
        let left = sa.merge(&sb).unwrap().merge(&sc).unwrap();
        let right = sa.merge(&sb.merge(&sc).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(sa.merge(&sb).unwrap(), sb.merge(&sa).unwrap());
        let all: Vec<_> = a.iter().chain(&b).chain(&c).cloned().collect();
        let direct = stats_of(&all);
        prop_assert_eq!(left.sup_f0, direct.sup_f0);
        prop_assert_eq!(left.e_records, direct.e_records);
    }

    #[test]
    fn projection_is_idempotent_and_contracting(seed in 0u64..10_000, cutoff in 1usize..=8, s in -1.0f64..3.0) {
        let f = random_field(TorusGrid::new(2, 16).unwrap(), 2, 2.5, 1.0, seed);
        let p = GalerkinProjector::new(cutoff);
        let once = galerkin_project(&f, p).unwrap();
        prop_assert_eq!(&galerkin_project(&once, p).unwrap(), &once);
        prop_assert!(sobolev_norm(&once, s).unwrap() <= sobolev_norm(&f, s).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn interpolation_inequality_holds(seed in 0u64..10_000, decay in 0.5f64..6.0, log_amp in -3.0f64..3.0) {
        let f = random_field(TorusGrid::new(1, 64).unwrap(), 1, decay, 10f64.powf(log_amp), seed);
        for kind in [ModelKind::Burgers1d, ModelKind::RswViscous, ModelKind::Vorticity3d] {
            let (lhs, rhs) = interpolation_check(&f, &default_ladder(kind, &ModelParams::default())).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn noise_factor_is_homogeneous(theta in 0.0f64..10.0, alpha in 0.0f64..3.0, lambda in 0.01f64..100.0, seed in 0u64..1000) {
        let ladder = default_ladder(ModelKind::Burgers1d, &ModelParams::default());
        let x = random_field(TorusGrid::new(1, 32).unwrap(), 1, 3.0, 1.0, seed);
        for case in [CaseLabel::I, CaseLabel::II, CaseLabel::III] {
            let spec = NoiseSpec::new(theta, alpha, case).unwrap();
            let base = noise_factor(&x, &spec, &ladder).unwrap();
            let scaled = noise_factor(&x.scaled(lambda), &spec, &ladder).unwrap();
            let want = lambda.powf(alpha) * base;
            prop_assert!((scaled - want).abs() <= 1e-10 * (1.0 + want));
        }
    }

    #[test]
    fn config_round_trips(seed in 0u64..(i64::MAX as u64), res in 3u32..8, t_end in 0.01f64..5.0, k in 0.01f64..10.0) {
        let text = format!(
            "seed = {seed}\n[model]\nkind = \"burgers1d\"\nresolution = {}\n[initial]\nspace = \"F0\"\n\
             field = {{ type = \"sine\", amplitude = 0.5 }}\n[noise]\ntheta = 2.0\nalpha = 1.5\ncase = \"I\"\n\
             [stepper]\nt_end = {t_end}\n[control]\nK = {k}\n",
            1usize << res
        );
        let c: RunConfig = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&c.to_toml().unwrap()).unwrap(), c);
    }
}
