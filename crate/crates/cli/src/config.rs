//! Command-line flags, the JSON config file and their merge into a [`RunConfig`].

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use clext_core::pssqm::SsqmVariant;
use clext_core::{AlgebraSpec, RepKind};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const MAX_LAMBDA: usize = 64;
pub const MAX_DIM: usize = 4096;
pub const DEFAULT_SEED: u64 = clext_core::sampling::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "clext", version, about = "Fock-space toolkit for the C_lambda-extended oscillator algebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Residuals of every defining relation on the truncated Fock space
    Verify,
    /// Levels and degeneracy clusters of H0 or a sector-shifted Hamiltonian
    Spectrum,
    /// Solve the sector shifts r for a parasupersymmetric configuration
    PssqmSolve,
    /// Check the order-p parasupersymmetry relations for a solved (or given) r
    PssqmCheck,
    /// Check both supersymmetric bosonizations at lambda = 2
    Ssqm,
    /// Scan alpha_(mu+2) and record the order-2 double-commutator residual
    BdScan,
    /// Classify the unitary Fock representation of the parameters
    Classify,
    /// Write the truncated operator matrices
    Dump,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::PssqmSolve => "pssqm-solve",
            Command::PssqmCheck => "pssqm-check",
            Command::Ssqm => "ssqm",
            Command::BdScan => "bd-scan",
            Command::Classify => "classify",
            Command::Dump => "dump",
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            Command::Verify | Command::PssqmSolve | Command::Classify | Command::Dump => 1e-12,
            Command::Spectrum => clext_core::spectrum::DEFAULT_CLUSTER_TOL,
            Command::PssqmCheck | Command::BdScan => clext_core::pssqm::KHARE_TOL,
            Command::Ssqm => 1e-13,
        }
    }

    fn is_pssqm(self) -> bool {
        matches!(self, Command::PssqmSolve | Command::PssqmCheck | Command::BdScan)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Tsv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Unbroken,
    Broken,
}

impl From<Variant> for SsqmVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Unbroken => SsqmVariant::Unbroken,
            Variant::Broken => SsqmVariant::Broken,
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    Complex64::from_str(s.trim()).map_err(|_| format!("'{s}' is not a complex number (use forms like 0.5, 1-2i, 0.3i)"))
}

#[derive(Args, Debug, Default)]
pub struct Opts {
    /// Order of the cyclic group
    #[arg(long, global = true)]
    pub lambda: Option<usize>,
    /// Projector couplings alpha_0..alpha_(lambda-1), comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Group-element couplings kappa_1..kappa_(lambda-1), e.g. 0.5+0.2i,0.5-0.2i
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub kappa: Option<Vec<Complex64>>,
    /// Truncation dimension [default: 12 * lambda]
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Residual tolerance (cluster tolerance for `spectrum`)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Parasupersymmetry order; lambda must equal p + 1
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Distinguished sector
    #[arg(long, global = true)]
    pub mu: Option<usize>,
    /// eta_(mu+1)..eta_(mu+p) [default: sqrt 2 each]
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub eta: Option<Vec<Complex64>>,
    /// Sector shifts r_0..r_p, bypassing the solver
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub r: Option<Vec<f64>>,
    /// Start of the scan range (sampling box lower edge for `pssqm-check`)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub scan_from: Option<f64>,
    /// End of the scan range (sampling box upper edge for `pssqm-check`)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub scan_to: Option<f64>,
    #[arg(long, global = true)]
    pub scan_points: Option<usize>,
    /// Number of random ground-energy samples for `pssqm-check`
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// SSQM variant [default: both]
    #[arg(long, global = true, value_enum)]
    pub variant: Option<Variant>,
    /// Report path; the report goes to stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file whose kebab-case keys mirror the flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Complex entries in a config file: a number, a string such as "1-2i", or `[re, im]`.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl ComplexInput {
    fn value(&self) -> anyhow::Result<Complex64> {
        match self {
            ComplexInput::Real(x) => Ok(Complex64::new(*x, 0.0)),
            ComplexInput::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            ComplexInput::Text(s) => parse_complex(s).map_err(|e| anyhow!(e)),
        }
    }
}

#[derive(Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    lambda: Option<usize>,
    alpha: Option<Vec<f64>>,
    kappa: Option<Vec<ComplexInput>>,
    dim: Option<usize>,
    tol: Option<f64>,
    p: Option<usize>,
    mu: Option<usize>,
    eta: Option<Vec<ComplexInput>>,
    r: Option<Vec<f64>>,
    scan_from: Option<f64>,
    scan_to: Option<f64>,
    scan_points: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    variant: Option<Variant>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

fn complex_list(v: Option<Vec<ComplexInput>>, key: &str) -> anyhow::Result<Option<Vec<Complex64>>> {
    v.map(|items| items.iter().map(ComplexInput::value).collect::<anyhow::Result<Vec<_>>>())
        .transpose()
        .with_context(|| format!("config key '{key}'"))
}

fn read_file_config(path: &Path) -> Result<Opts, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Io)?;
    let file: FileConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Usage)?;
    Ok(Opts {
        lambda: file.lambda,
        alpha: file.alpha,
        kappa: complex_list(file.kappa, "kappa").map_err(Failure::Usage)?,
        dim: file.dim,
        tol: file.tol,
        p: file.p,
        mu: file.mu,
        eta: complex_list(file.eta, "eta").map_err(Failure::Usage)?,
        r: file.r,
        scan_from: file.scan_from,
        scan_to: file.scan_to,
        scan_points: file.scan_points,
        samples: file.samples,
        seed: file.seed,
        variant: file.variant,
        out: file.out,
        format: file.format,
        config: None,
    })
}

/// Flags override file values field by field.
fn overlay(flags: Opts, file: Opts) -> Opts {
    Opts {
        lambda: flags.lambda.or(file.lambda),
        alpha: flags.alpha.or(file.alpha),
        kappa: flags.kappa.or(file.kappa),
        dim: flags.dim.or(file.dim),
        tol: flags.tol.or(file.tol),
        p: flags.p.or(file.p),
        mu: flags.mu.or(file.mu),
        eta: flags.eta.or(file.eta),
        r: flags.r.or(file.r),
        scan_from: flags.scan_from.or(file.scan_from),
        scan_to: flags.scan_to.or(file.scan_to),
        scan_points: flags.scan_points.or(file.scan_points),
        samples: flags.samples.or(file.samples),
        seed: flags.seed.or(file.seed),
        variant: flags.variant.or(file.variant),
        out: flags.out.or(file.out),
        format: flags.format.or(file.format),
        config: flags.config,
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub spec: AlgebraSpec,
    pub dim: usize,
    pub tol: f64,
    pub p: usize,
    pub mu: Option<usize>,
    pub eta: Option<Vec<Complex64>>,
    pub r: Option<Vec<f64>>,
    pub scan_from: Option<f64>,
    pub scan_to: Option<f64>,
    pub scan_points: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub variant: Option<SsqmVariant>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub fn parse_config(cli: Cli) -> Result<RunConfig, Failure> {
    let opts = match &cli.opts.config {
        Some(path) => {
            let file = read_file_config(path)?;
            overlay(cli.opts, file)
        }
        None => cli.opts,
    };
    validate(cli.command, opts).map_err(Failure::Usage)
}

fn infer_lambda(command: Command, o: &Opts) -> anyhow::Result<usize> {
    let candidates = [
        ("--lambda", o.lambda),
        ("--alpha", o.alpha.as_ref().map(Vec::len)),
        ("--kappa", o.kappa.as_ref().map(|k| k.len() + 1)),
        ("--p", o.p.map(|p| p + 1)),
        ("--r", o.r.as_ref().map(Vec::len)),
    ];
    let mut found: Option<(&str, usize)> = None;
    for (flag, value) in candidates {
        let Some(v) = value else { continue };
        match found {
            None => found = Some((flag, v)),
            Some((first, l)) if l != v => {
                if flag == "--p" || first == "--p" {
                    bail!("lambda = {l} from {first} but --p implies lambda = {v}; lambda must equal p + 1");
                }
                bail!("lambda = {l} from {first} but {flag} implies lambda = {v}");
            }
            _ => {}
        }
    }
    match (found, command) {
        (Some((_, l)), _) => Ok(l),
        (None, Command::Ssqm) => Ok(2),
        (None, Command::BdScan) => Ok(3),
        (None, _) => bail!("no algebra given; pass --alpha (or --kappa) and optionally --lambda"),
    }
}

fn validate(command: Command, o: Opts) -> anyhow::Result<RunConfig> {
    let lambda = infer_lambda(command, &o)?;
    if !(2..=MAX_LAMBDA).contains(&lambda) {
        bail!("lambda must lie in 2..={MAX_LAMBDA}, got {lambda}");
    }
    let spec = match (&o.alpha, &o.kappa) {
        (Some(_), Some(_)) => bail!("give either --alpha or --kappa, not both"),
        (Some(a), None) => AlgebraSpec::from_alpha(lambda, a).context("invalid --alpha")?,
        (None, Some(k)) => AlgebraSpec::from_kappa(lambda, k).context("invalid --kappa")?,
        // the undeformed oscillator, the natural base point for ssqm and bd-scan
        (None, None) => AlgebraSpec::from_alpha(lambda, &vec![0.0; lambda])?,
    };
    let p = lambda - 1;
    if command.is_pssqm() {
        if let Some(mu) = o.mu {
            if mu > p {
                bail!("--mu must lie in 0..={p} for lambda = {lambda}, got {mu}");
            }
        }
        if let Some(eta) = &o.eta {
            if eta.len() != p {
                bail!("--eta needs p = {p} entries, got {}", eta.len());
            }
        }
    } else if o.eta.is_some() && command != Command::Spectrum {
        bail!("--eta only applies to pssqm commands and spectrum");
    }
    if command == Command::BdScan && lambda != 3 {
        bail!("bd-scan works at order p = 2; use lambda = 3 (got {lambda})");
    }
    if command == Command::Ssqm && lambda != 2 {
        bail!("ssqm needs lambda = 2, got {lambda}");
    }
    if let Some(mu) = o.mu {
        if mu >= lambda {
            bail!("--mu must lie in 0..{lambda}, got {mu}");
        }
    }
    if let Some(r) = &o.r {
        if r.len() != lambda {
            bail!("--r needs lambda = {lambda} entries, got {}", r.len());
        }
    }

    let dim = match (o.dim, spec.classify()) {
        (Some(d), _) => d,
        (None, Ok(class)) => match class.kind {
            RepKind::FiniteDim { dim } => dim,
            RepKind::BoundedFromBelow => 12 * lambda,
        },
        (None, Err(_)) => 12 * lambda,
    };
    if dim == 0 || dim > MAX_DIM {
        bail!("--dim must lie in 1..={MAX_DIM}, got {dim}");
    }
    let tol = o.tol.unwrap_or(command.default_tol());
    if !(tol.is_finite() && tol > 0.0) {
        bail!("--tol must be a positive number, got {tol}");
    }
    if let (Some(a), Some(b)) = (o.scan_from, o.scan_to) {
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            bail!("--scan-from ({a}) must be below --scan-to ({b})");
        }
    }

    Ok(RunConfig {
        command,
        spec,
        dim,
        tol,
        p,
        mu: o.mu,
        eta: o.eta,
        r: o.r,
        scan_from: o.scan_from,
        scan_to: o.scan_to,
        scan_points: o.scan_points,
        samples: o.samples,
        seed: o.seed.unwrap_or(DEFAULT_SEED),
        variant: o.variant.map(Into::into),
        out: o.out,
        format: o.format.unwrap_or(Format::Json),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> anyhow::Result<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("clext").chain(args.iter().copied()))?;
        parse_config(cli).map_err(|f| f.into_error())
    }

    #[test]
    fn flags_map_to_config() {
        let c = parse(&["verify", "--lambda", "3", "--alpha", "1,-0.5,-0.5", "--dim", "30"]).unwrap();
        assert_eq!(c.command, Command::Verify);
        assert_eq!(c.spec.lambda(), 3);
        assert_eq!(c.dim, 30);
        assert_eq!(c.tol, 1e-12);
        assert_eq!(c.seed, 42);
    }

    #[test]
    fn defaults() {
        let c = parse(&["pssqm-check", "--p", "2", "--mu", "0", "--alpha", "1,-0.5,-0.5"]).unwrap();
        assert_eq!(c.dim, 36);
        assert_eq!(c.p, 2);
        assert_eq!(c.tol, 1e-10);
        assert!(c.eta.is_none() && c.r.is_none());
        let c = parse(&["classify", "--alpha", "-1,1"]).unwrap();
        assert_eq!(c.dim, 1);
    }

    #[test]
    fn order_must_match_lambda() {
        let err = parse(&["pssqm-solve", "--p", "3", "--alpha", "1,-0.5,-0.5"]).unwrap_err();
        assert!(err.to_string().contains("p + 1"), "{err}");
    }

    #[test]
    fn kappa_and_eta_parse_complex() {
        let c = parse(&["classify", "--kappa", "0.5+0.2i,0.5-0.2i"]).unwrap();
        assert_eq!(c.spec.lambda(), 3);
        let c = parse(&["pssqm-solve", "--alpha", "1,-0.5,-0.5", "--eta", "1.4142135623730951i,1.4142135623730951"]);
        assert!(c.is_ok());
        assert!(parse(&["classify", "--kappa", "zz"]).is_err());
    }

    #[test]
    fn sum_violation_names_the_sum() {
        let err = parse(&["verify", "--alpha", "1,0.5,-0.5"]).unwrap_err();
        assert!(format!("{err:#}").contains("sum"), "{err:#}");
    }
}
