use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::args::ReportArgs;
use crate::{usage, CliError};

pub const CONVERGE_COLUMNS: [&str; 7] = ["scheme", "seed", "iter", "snr_db", "zeta", "rho", "config_hash"];

pub const SWEEP_COLUMNS: [&str; 11] = [
    "axis",
    "value",
    "scheme",
    "seed",
    "status",
    "sum_snr_db",
    "mean_sum_snr_db",
    "min_sinr_db",
    "power_w",
    "iterations",
    "config_hash",
];

#[derive(Debug, Deserialize)]
struct ConvergeRow {
    scheme: String,
    seed: u64,
    iter: usize,
    snr_db: f64,
    #[allow(dead_code)]
    zeta: f64,
    #[allow(dead_code)]
    rho: f64,
    config_hash: String,
}

#[derive(Debug, Deserialize)]
struct SweepRow {
    axis: String,
    value: f64,
    scheme: String,
    #[allow(dead_code)]
    seed: u64,
    status: String,
    sum_snr_db: Option<f64>,
    #[allow(dead_code)]
    mean_sum_snr_db: Option<f64>,
    #[allow(dead_code)]
    min_sinr_db: Option<f64>,
    #[allow(dead_code)]
    power_w: Option<f64>,
    iterations: Option<usize>,
    #[allow(dead_code)]
    config_hash: String,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub inputs: Vec<String>,
    pub convergence: Vec<ConvergenceSummary>,
    pub sweeps: Vec<SweepPoint>,
    pub feasibility: Vec<Feasibility>,
}

#[derive(Debug, Serialize)]
pub struct ConvergenceSummary {
    pub scheme: String,
    pub runs: usize,
    pub median_iterations: f64,
    pub mean_iterations: f64,
    pub max_iterations: usize,
    pub mean_final_snr_db: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepPoint {
    pub axis: String,
    pub value: f64,
    pub schemes: Vec<SchemePoint>,
    /// Mean sum-SNR of `proposed` minus each baseline, in dB.
    pub gaps_db: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
pub struct SchemePoint {
    pub scheme: String,
    pub seeds: usize,
    pub solved: usize,
    pub mean_sum_snr_db: Option<f64>,
    pub median_iterations: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Feasibility {
    pub scheme: String,
    pub runs: usize,
    pub feasible: usize,
    pub rate: f64,
}

enum Kind {
    Converge,
    Sweep,
}

/// Identifies the file type from its header and checks every column.
fn classify(headers: &csv::StringRecord) -> anyhow::Result<Kind> {
    let (kind, expected): (Kind, &[&str]) = if headers.iter().any(|h| h == "iter") {
        (Kind::Converge, &CONVERGE_COLUMNS)
    } else if headers.iter().any(|h| h == "axis") {
        (Kind::Sweep, &SWEEP_COLUMNS)
    } else {
        let first = headers.get(0).unwrap_or("");
        anyhow::bail!("schema mismatch: unrecognized column `{first}`");
    };
    for (i, want) in expected.iter().enumerate() {
        match headers.get(i) {
            Some(got) if got == *want => {}
            Some(got) => anyhow::bail!("schema mismatch: column {} is `{got}`, expected `{want}`", i + 1),
            None => anyhow::bail!("schema mismatch: missing column `{want}`"),
        }
    }
    if let Some(extra) = headers.get(expected.len()) {
        anyhow::bail!("schema mismatch: unexpected column `{extra}`");
    }
    Ok(kind)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Default)]
struct Acc {
    // (scheme, seed, hash) -> (last iter, snr at last iter)
    traces: BTreeMap<(String, u64, String), (usize, f64)>,
    // (axis, value bits ordered) -> scheme -> rows
    points: BTreeMap<(String, OrdF64), BTreeMap<String, Vec<SweepRow>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn read_file(path: &Path, acc: &mut Acc) -> anyhow::Result<()> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let headers = rdr.headers()?.clone();
    match classify(&headers)? {
        Kind::Converge => {
            for row in rdr.deserialize::<ConvergeRow>() {
                let r = row?;
                let slot = acc.traces.entry((r.scheme, r.seed, r.config_hash)).or_insert((0, f64::NAN));
                if r.iter >= slot.0 {
                    *slot = (r.iter, r.snr_db);
                }
            }
        }
        Kind::Sweep => {
            for row in rdr.deserialize::<SweepRow>() {
                let r = row?;
                acc.points
                    .entry((r.axis.clone(), OrdF64(r.value)))
                    .or_default()
                    .entry(r.scheme.clone())
                    .or_default()
                    .push(r);
            }
        }
    }
    Ok(())
}

fn solved(r: &SweepRow) -> bool {
    r.sum_snr_db.is_some() && r.status != "infeasible" && r.status != "error"
}

pub fn summarize(paths: &[impl AsRef<Path>]) -> anyhow::Result<Summary> {
    let mut acc = Acc::default();
    for p in paths {
        let p = p.as_ref();
        read_file(p, &mut acc).with_context(|| p.display().to_string())?;
    }
    let mut summary = Summary {
        inputs: paths.iter().map(|p| p.as_ref().display().to_string()).collect(),
        ..Summary::default()
    };

    let mut by_scheme: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for ((scheme, _, _), v) in acc.traces {
        by_scheme.entry(scheme).or_default().push(v);
    }
    for (scheme, runs) in by_scheme {
        let mut iters: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
        let finals: Vec<f64> = runs.iter().map(|r| r.1).collect();
        summary.convergence.push(ConvergenceSummary {
            scheme,
            runs: runs.len(),
            mean_iterations: mean(&iters),
            median_iterations: median(&mut iters),
            max_iterations: runs.iter().map(|r| r.0).max().unwrap_or(0),
            mean_final_snr_db: mean(&finals),
        });
    }

    let mut feas: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for ((axis, value), schemes) in acc.points {
        let mut point = SweepPoint {
            axis,
            value: value.0,
            schemes: Vec::new(),
            gaps_db: BTreeMap::new(),
        };
        for (scheme, rows) in &schemes {
            let ok: Vec<&SweepRow> = rows.iter().filter(|r| solved(r)).collect();
            let snr: Vec<f64> = ok.iter().filter_map(|r| r.sum_snr_db).collect();
            let mut iters: Vec<f64> = ok.iter().filter_map(|r| r.iterations.map(|i| i as f64)).collect();
            let f = feas.entry(scheme.clone()).or_default();
            f.0 += rows.len();
            f.1 += ok.len();
            point.schemes.push(SchemePoint {
                scheme: scheme.clone(),
                seeds: rows.len(),
                solved: ok.len(),
                mean_sum_snr_db: (!snr.is_empty()).then(|| mean(&snr)),
                median_iterations: (!iters.is_empty()).then(|| median(&mut iters)),
            });
        }
        let proposed = point
            .schemes
            .iter()
            .find(|s| s.scheme == "proposed")
            .and_then(|s| s.mean_sum_snr_db);
        if let Some(p) = proposed {
            for s in &point.schemes {
                if let (false, Some(b)) = (s.scheme == "proposed", s.mean_sum_snr_db) {
                    point.gaps_db.insert(s.scheme.clone(), p - b);
                }
            }
        }
        summary.sweeps.push(point);
    }
    summary.feasibility = feas
        .into_iter()
        .map(|(scheme, (runs, feasible))| Feasibility {
            scheme,
            runs,
            feasible,
            rate: if runs == 0 { 0.0 } else { feasible as f64 / runs as f64 },
        })
        .collect();
    Ok(summary)
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    // unreadable or malformed inputs are the caller's problem
    let summary = summarize(&args.inputs).map_err(|e| usage(format!("{e:#}")))?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Internal(e.into()))? + "\n";
    match &args.out {
        Some(p) => std::fs::write(p, json)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(CliError::Internal),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}
