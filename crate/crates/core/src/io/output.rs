use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{AldousRow, ControlRow};
use crate::integrators::{TrajectoryRecord, TrajectoryRow};

/// Environment variable read for the base seed when no `--seed` is given.
pub const SEED_ENV: &str = "STOCHTAME_SEED";

/// Column headers of the written tables.
pub const CONTROL_HEADER: &str = "d,K,p_hat,ci_lo,ci_hi,n";
pub const ALDOUS_HEADER: &str = "d,delta,eta,p_hat,ci_lo,ci_hi";
pub const TRAJECTORY_COLUMNS: [&str; 10] =
    ["t", "norm_G", "norm_F0", "norm_F1", "norm_D", "int_F1sq", "regime", "M", "QV", "flags"];

/// `--seed`, then `STOCHTAME_SEED`, then the config value.
pub fn resolve_seed(flag: Option<u64>, config: u64) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(config),
    }
}

/// Stamped into every written file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Provenance {
            config_hash: config_hash.into(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    fn comment(&self) -> String {
        format!(
            "# config_hash={}\n# seed={}\n# version={}\n",
            self.config_hash, self.seed, self.version
        )
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn json_line<T: Serialize>(w: &mut impl Write, v: &T, path: &Path) -> Result<()> {
    serde_json::to_writer(&mut *w, v).map_err(|e| Error::Parse(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    provenance: Provenance,
}

/// Everything in a record besides the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub blowup: Option<(f64, crate::integrators::BlowupReason)>,
    pub events: Vec<crate::integrators::Event>,
    pub sup_f0sq: f64,
    pub sup_dsq: f64,
    pub min_f0: f64,
    pub int_f1sq: f64,
    pub e_record: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub positivity_warnings: usize,
    pub envelope_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Footer {
    summary: TrajectorySummary,
}

impl TrajectorySummary {
    pub fn of(rec: &TrajectoryRecord) -> Self {
        TrajectorySummary {
            blowup: rec.blowup,
            events: rec.events.clone(),
            sup_f0sq: rec.sup_f0sq,
            sup_dsq: rec.sup_dsq,
            min_f0: rec.min_f0,
            int_f1sq: rec.int_f1sq,
            e_record: rec.e_record,
            accepted_steps: rec.accepted_steps,
            rejected_steps: rec.rejected_steps,
            positivity_warnings: rec.positivity_warnings,
            envelope_residual: rec.envelope_residual,
        }
    }
}

/// Line-delimited JSON: a provenance header, one object per saved row, and a
/// summary footer with the event list.
pub fn write_trajectory(path: &Path, rec: &TrajectoryRecord, prov: &Provenance) -> Result<()> {
    let mut w = create(path)?;
    json_line(&mut w, &Header { provenance: prov.clone() }, path)?;
    for r in &rec.rows {
        json_line(&mut w, r, path)?;
    }
    json_line(&mut w, &Footer { summary: TrajectorySummary::of(rec) }, path)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trajectory(path: &Path) -> Result<(Provenance, Vec<TrajectoryRow>, TrajectorySummary)> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut prov = None;
    let mut rows = Vec::new();
    let mut summary = None;
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let bad = |e: serde_json::Error| Error::Parse(format!("{}:{}: {e}", path.display(), i + 1));
        if i == 0 {
            prov = Some(serde_json::from_str::<Header>(&line).map_err(bad)?.provenance);
        } else if line.starts_with("{\"summary\"") {
            summary = Some(serde_json::from_str::<Footer>(&line).map_err(bad)?.summary);
        } else {
            rows.push(serde_json::from_str(&line).map_err(bad)?);
        }
    }
    match (prov, summary) {
        (Some(p), Some(s)) => Ok((p, rows, s)),
        _ => Err(Error::Parse(format!("{}: truncated trajectory file", path.display()))),
    }
}

fn write_csv<T: Serialize>(path: &Path, header: &str, rows: &[T], prov: &Provenance) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(prov.comment().as_bytes()).map_err(|e| Error::io(path, e))?;
    w.write_all(header.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    let mut c = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for r in rows {
        c.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    c.flush().map_err(|e| Error::io(path, e))
}

/// Threshold probabilities as `d,K,p_hat,ci_lo,ci_hi,n`.
pub fn write_control_csv(path: &Path, rows: &[ControlRow], prov: &Provenance) -> Result<()> {
    write_csv(path, CONTROL_HEADER, rows, prov)
}

/// Increment probabilities as `d,delta,eta,p_hat,ci_lo,ci_hi`.
pub fn write_aldous_csv(path: &Path, rows: &[AldousRow], prov: &Provenance) -> Result<()> {
    write_csv(path, ALDOUS_HEADER, rows, prov)
}

/// Two-column `key,value` table.
pub fn write_key_values(path: &Path, kv: &[(String, String)], prov: &Provenance) -> Result<()> {
    write_csv(path, "key,value", kv, prov)
}

/// Any serializable value as pretty JSON with a `provenance` member.
pub fn write_json<T: Serialize>(path: &Path, value: &T, prov: &Provenance) -> Result<()> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        provenance: &'a Provenance,
        #[serde(flatten)]
        value: &'a T,
    }
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &Wrapped { provenance: prov, value })
        .map_err(|e| Error::Parse(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Rows of a table written by [`write_csv`], comments skipped.
pub fn read_csv_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Parse(format!("{}: {e}", path.display()))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::Regime;

    fn record() -> TrajectoryRecord {
        TrajectoryRecord {
            rows: vec![TrajectoryRow {
                t: 0.5,
                norm_g: 1.0,
                norm_f0: 2.0,
                norm_f1: 3.0,
                norm_d: 4.0,
                int_f1sq: 0.25,
                regime: Regime::Stochastic,
                m: 0.1,
                qv: 0.01,
                flags: "tau".into(),
            }],
            ..Default::default()
        }
    }

    #[test]
    fn trajectory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        let prov = Provenance::new("abc", 7);
        write_trajectory(&p, &record(), &prov).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let row_line = text.lines().nth(1).unwrap();
        let at: Vec<usize> = TRAJECTORY_COLUMNS
            .iter()
            .map(|c| row_line.find(&format!("\"{c}\":")).unwrap())
            .collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]), "{row_line}");
        let (p2, rows, _) = read_trajectory(&p).unwrap();
        assert_eq!(p2, prov);
        assert_eq!(rows, record().rows);
    }

    #[test]
    fn csv_headers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let rows = [ControlRow { d: 8, k: 1.5, p_hat: 0.25, ci_lo: 0.1, ci_hi: 0.4, n: 20 }];
        write_control_csv(&p, &rows, &Provenance::new("h", 3)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# config_hash=h\n# seed=3\n"));
        assert!(text.lines().any(|l| l == CONTROL_HEADER));
        assert_eq!(read_csv_rows::<ControlRow>(&p).unwrap(), rows);
        let q = dir.path().join("a.csv");
        let a = [AldousRow { d: 8, delta: 0.1, eta: 0.5, p_hat: 0.0, ci_lo: 0.0, ci_hi: 0.2 }];
        write_aldous_csv(&q, &a, &Provenance::new("h", 3)).unwrap();
        assert!(std::fs::read_to_string(&q).unwrap().lines().any(|l| l == ALDOUS_HEADER));
        assert_eq!(read_csv_rows::<AldousRow>(&q).unwrap(), a);
    }

    #[test]
    fn unwritable_path_names_it() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let e = write_json(&blocker.join("sub/x.json"), &1, &Provenance::new("h", 0)).unwrap_err();
        assert!(e.to_string().contains("file"), "{e}");
    }
}
