use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use rayon::prelude::*;
use ris_isac_core::scenario::realize;
use ris_isac_core::{run_baseline, Error, RunOutcome, ScenarioConfig, Scheme};

use crate::args::{parse_schemes, parse_seeds, parse_values, Axis, ConvergeArgs, RunArgs, SweepArgs};
use crate::report::{CONVERGE_COLUMNS, SWEEP_COLUMNS};
use crate::{usage, CliError};

enum Outcome {
    Done(Box<RunOutcome>),
    Infeasible(String),
    Error(String),
}

fn execute(config: &ScenarioConfig, scheme: Scheme) -> Outcome {
    let result = realize(config).and_then(|(_, ch)| run_baseline(&ch, config, scheme));
    match result {
        Ok(o) => Outcome::Done(Box::new(o)),
        Err(Error::Infeasible(msg)) => Outcome::Infeasible(msg),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = match workers {
        Some(0) => return Err(usage("--workers must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Internal(e.into()))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(CliError::Internal)?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn header_line(command: &str) -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    format!("# ris-isac {command} generated_unix={secs}\n")
}

fn check_outcomes<'a>(outcomes: impl Iterator<Item = &'a Outcome>) -> Result<(), CliError> {
    let (mut done, mut infeasible, mut errors) = (0, 0, 0);
    for o in outcomes {
        match o {
            Outcome::Done(_) => done += 1,
            Outcome::Infeasible(_) => infeasible += 1,
            Outcome::Error(_) => errors += 1,
        }
    }
    if done > 0 {
        return Ok(());
    }
    if infeasible > 0 && errors == 0 {
        return Err(CliError::InfeasibleAll);
    }
    Err(CliError::Internal(anyhow::anyhow!("no run completed")))
}

fn report_problem(label: &str, o: &Outcome) {
    match o {
        Outcome::Infeasible(msg) => eprintln!("warning: {label}: infeasible: {msg}"),
        Outcome::Error(msg) => eprintln!("warning: {label}: {msg}"),
        Outcome::Done(_) => {}
    }
}

struct Plan {
    schemes: Vec<Scheme>,
    seeds: Vec<u64>,
    pool: rayon::ThreadPool,
}

fn plan(args: &RunArgs) -> Result<Plan, CliError> {
    Ok(Plan {
        schemes: parse_schemes(&args.schemes)?,
        seeds: parse_seeds(&args.seeds)?,
        pool: pool(args.workers)?,
    })
}

fn write_all(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .context("write failed")
        .map_err(CliError::Internal)
}

pub fn converge(base: &ScenarioConfig, args: &ConvergeArgs) -> Result<(), CliError> {
    let plan = plan(args)?;
    let jobs: Vec<(Scheme, u64)> = plan
        .schemes
        .iter()
        .flat_map(|&s| plan.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let outcomes: Vec<(ScenarioConfig, Outcome)> = plan.pool.install(|| {
        jobs.par_iter()
            .map(|&(scheme, seed)| {
                let cfg = ScenarioConfig { rng_seed: seed, ..base.clone() };
                let o = execute(&cfg, scheme);
                (cfg, o)
            })
            .collect()
    });

    let mut body = csv::Writer::from_writer(Vec::new());
    body.write_record(CONVERGE_COLUMNS).map_err(|e| CliError::Internal(e.into()))?;
    for ((scheme, seed), (cfg, o)) in jobs.iter().zip(&outcomes) {
        report_problem(&format!("{scheme} seed {seed}"), o);
        let Outcome::Done(run) = o else { continue };
        let hash = cfg.hash();
        for e in &run.trace.entries {
            body.write_record([
                scheme.name().to_string(),
                seed.to_string(),
                e.iter.to_string(),
                format!("{:.6}", e.sum_snr_db),
                format!("{:.6e}", e.zeta),
                format!("{:.6e}", e.rho),
                hash.clone(),
            ])
            .map_err(|e| CliError::Internal(e.into()))?;
        }
    }
    let body = String::from_utf8(body.into_inner().map_err(|e| CliError::Internal(anyhow::anyhow!("{e}")))?)
        .expect("csv output is utf-8");
    let mut out = open_out(args.out.as_deref())?;
    write_all(out.as_mut(), &(header_line("converge") + &body))?;
    check_outcomes(outcomes.iter().map(|(_, o)| o))
}

fn apply_axis(base: &ScenarioConfig, axis: Axis, value: f64) -> ScenarioConfig {
    let mut cfg = base.clone();
    match axis {
        Axis::Power => cfg.power_w = value,
        Axis::RisElems => cfg.ris_elements = value as usize,
        Axis::SinrTarget => cfg.gamma_db = value,
    }
    cfg
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

pub fn sweep(base: &ScenarioConfig, args: &SweepArgs) -> Result<(), CliError> {
    let plan = plan(args)?;
    let values = parse_values(&args.values, args.axis)?;
    for &v in &values {
        apply_axis(base, args.axis, v)
            .validate()
            .map_err(|e| usage(format!("{} = {v}: {e}", args.axis.name())))?;
    }
    let mut jobs = Vec::new();
    for (vi, &v) in values.iter().enumerate() {
        for &seed in &plan.seeds {
            for &scheme in &plan.schemes {
                jobs.push((vi, v, seed, scheme));
            }
        }
    }
    let outcomes: Vec<(ScenarioConfig, Outcome)> = plan.pool.install(|| {
        jobs.par_iter()
            .map(|&(_, v, seed, scheme)| {
                let cfg = ScenarioConfig { rng_seed: seed, ..apply_axis(base, args.axis, v) };
                let o = execute(&cfg, scheme);
                (cfg, o)
            })
            .collect()
    });

    // mean over the seeds that produced a solution, per (value, scheme)
    let mean = |vi: usize, scheme: Scheme| {
        let vals: Vec<f64> = jobs
            .iter()
            .zip(&outcomes)
            .filter(|(j, _)| j.0 == vi && j.3 == scheme)
            .filter_map(|(_, (_, o))| match o {
                Outcome::Done(r) => Some(r.metrics.sum_snr_db),
                _ => None,
            })
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };

    let mut body = csv::Writer::from_writer(Vec::new());
    body.write_record(SWEEP_COLUMNS).map_err(|e| CliError::Internal(e.into()))?;
    for (&(vi, v, seed, scheme), (cfg, o)) in jobs.iter().zip(&outcomes) {
        report_problem(&format!("{}={v} {scheme} seed {seed}", args.axis.name()), o);
        let (status, snr, sinr, power, iters) = match o {
            Outcome::Done(r) => (
                r.trace.status.label(),
                Some(r.metrics.sum_snr_db),
                r.metrics.sinr_db.iter().copied().reduce(f64::min),
                Some(r.metrics.power),
                r.trace.iterations().to_string(),
            ),
            Outcome::Infeasible(_) => ("infeasible", None, None, None, String::new()),
            Outcome::Error(_) => ("error", None, None, None, String::new()),
        };
        body.write_record([
            args.axis.name().to_string(),
            format!("{v}"),
            scheme.name().to_string(),
            seed.to_string(),
            status.to_string(),
            fmt_opt(snr),
            fmt_opt(mean(vi, scheme)),
            fmt_opt(sinr),
            fmt_opt(power),
            iters,
            cfg.hash(),
        ])
        .map_err(|e| CliError::Internal(e.into()))?;
    }
    let body = String::from_utf8(body.into_inner().map_err(|e| CliError::Internal(anyhow::anyhow!("{e}")))?)
        .expect("csv output is utf-8");
    let mut out = open_out(args.out.as_deref())?;
    write_all(out.as_mut(), &(header_line("sweep") + &body))?;
    check_outcomes(outcomes.iter().map(|(_, o)| o))
}
