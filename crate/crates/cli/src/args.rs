use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ris_isac_core::Scheme;

use crate::{usage, CliError};

#[derive(Debug, Parser)]
#[command(name = "ris-isac", version, about = "Joint precoder and RIS phase design for ISAC")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-iteration sum-SNR traces, one block per scheme and seed.
    Converge(ConvergeArgs),
    /// Final sum-SNR over a grid of one scenario parameter.
    Sweep(SweepArgs),
    /// JSON summary of CSV files written by `converge` and `sweep`.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated seeds, `a-b` for inclusive ranges, e.g. `1-5,9`.
    #[arg(long, default_value = "1")]
    pub seeds: String,
    /// Comma-separated schemes: proposed, no_ris, random_ris, radar_only,
    /// radar_only_no_ris.
    #[arg(long, default_value = "proposed,random_ris,no_ris")]
    pub schemes: String,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

impl std::ops::Deref for ConvergeArgs {
    type Target = RunArgs;
    fn deref(&self) -> &RunArgs {
        &self.run
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Axis {
    /// Transmit power budget in watts.
    Power,
    /// Number of RIS elements.
    RisElems,
    /// Common SINR target in dB.
    SinrTarget,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Power => "power",
            Axis::RisElems => "ris_elems",
            Axis::SinrTarget => "sinr_target",
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated axis values.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
    #[command(flatten)]
    pub run: RunArgs,
}

impl std::ops::Deref for SweepArgs {
    type Target = RunArgs;
    fn deref(&self) -> &RunArgs {
        &self.run
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// CSV files produced by `converge` or `sweep`.
    pub inputs: Vec<PathBuf>,
    /// Output JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_schemes(text: &str) -> Result<Vec<Scheme>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let scheme: Scheme = item.parse().map_err(|e| CliError::Usage(anyhow::Error::new(e)))?;
        if !out.contains(&scheme) {
            out.push(scheme);
        }
    }
    if out.is_empty() {
        return Err(usage("no schemes given"));
    }
    Ok(out)
}

pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = |s: &str| usage(format!("invalid seed list entry `{s}`"));
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad(item))?;
                let b: u64 = b.trim().parse().map_err(|_| bad(item))?;
                if b < a {
                    return Err(bad(item));
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad(item))?),
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(usage("no seeds given"));
    }
    Ok(out)
}

pub fn parse_values(text: &str, axis: Axis) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v: f64 = item
            .parse()
            .map_err(|_| usage(format!("invalid axis value `{item}`")))?;
        let ok = match axis {
            Axis::Power => v.is_finite() && v > 0.0,
            Axis::RisElems => v >= 1.0 && v.fract() == 0.0 && v <= 1e6,
            Axis::SinrTarget => v.is_finite(),
        };
        if !ok {
            return Err(usage(format!("value `{item}` is not valid for axis {}", axis.name())));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(usage("no axis values given"));
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges_expand_sorted() {
        assert_eq!(parse_seeds("5,1-3, 2").unwrap(), vec![1, 2, 3, 5]);
        assert!(parse_seeds("3-1").is_err());
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds(" , ").is_err());
    }

    #[test]
    fn schemes_parse_and_reject() {
        assert_eq!(
            parse_schemes("no_ris,proposed,no_ris").unwrap(),
            vec![Scheme::NoRis, Scheme::Proposed]
        );
        assert!(parse_schemes("").is_err());
        assert!(parse_schemes("magic").is_err());
    }

    #[test]
    fn values_checked_per_axis() {
        assert_eq!(parse_values("-3,0,3", Axis::SinrTarget).unwrap(), vec![-3.0, 0.0, 3.0]);
        assert!(parse_values("0", Axis::Power).is_err());
        assert!(parse_values("8.5", Axis::RisElems).is_err());
        assert_eq!(parse_values("32,8,16", Axis::RisElems).unwrap(), vec![8.0, 16.0, 32.0]);
    }
}
