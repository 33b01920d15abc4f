//! One function per subcommand, each turning a [`RunConfig`] into a [`Report`].

use std::collections::BTreeMap;

use anyhow::anyhow;
use clext_core::fock::interior_max;
use clext_core::fmt::{ser_f64, ser_vec};
use clext_core::pssqm::{
    bd_scan, build_supercharge, classify_breaking, default_eta, khare_check, nonlinear_residual, recursion_residual,
    sample_ground_energies, ssqm_check, BreakingReport, PssqmConfig, PssqmReport, ScanRow, SignSampling, SsqmReport,
    SsqmVariant,
};
use clext_core::spectrum::{default_cutoff, h0_diagonal, shifted_diagonal, to_f64_vec, SpectrumReport};
use clext_core::verify::{verify_defining_relations, verify_projector_algebra, ResidualReport};
use clext_core::{AlgebraSpec, DoubleF64, Error, FockRep, FockRepDd, RepClass};
use serde::Serialize;
use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::output::{num, to_body, Header, Report, Table};
use crate::Failure;

/// Casimir entries are O(1) at any D; this bound holds at full double precision.
const CASIMIR_TOL: f64 = 1e-13;
/// Width of the window around α_{μ+2} = −1 where the double-commutator form may hold.
const BD_WINDOW: f64 = 1e-9;
const DEFAULT_SAMPLE_BOX: (f64, f64) = (-3.0, 3.0);

fn core(e: Error) -> Failure {
    Failure::Usage(anyhow!(e))
}

pub fn run(cfg: &RunConfig) -> Result<Report, Failure> {
    match cfg.command {
        Command::Verify => verify(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::PssqmSolve => pssqm_solve(cfg),
        Command::PssqmCheck => pssqm_check(cfg),
        Command::Ssqm => ssqm(cfg),
        Command::BdScan => bd(cfg),
        Command::Classify => classify(cfg),
        Command::Dump => dump(cfg),
    }
}

fn report(cfg: &RunConfig, pass: bool, body: serde_json::Value, table: Option<Table>, summary: Vec<String>) -> Report {
    Report { header: Header::new(cfg), pass, body, table, summary }
}

#[derive(Serialize)]
struct Casimir {
    #[serde(serialize_with = "ser_f64")]
    residual: f64,
    #[serde(serialize_with = "ser_f64")]
    tolerance: f64,
    pass: bool,
}

fn residual_rows(reports: &[&ResidualReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .flat_map(|r| r.entries.iter())
        .map(|e| vec![e.relation.clone(), e.word_length.to_string(), num(e.residual), e.pass.to_string()])
        .collect()
}

fn verify(cfg: &RunConfig) -> Result<Report, Failure> {
    let class = cfg.spec.classify().map_err(core)?;
    let rep = FockRep::build(&cfg.spec, cfg.dim).map_err(core)?;
    let relations = verify_defining_relations(&rep, cfg.tol);
    let projectors = verify_projector_algebra(&rep, cfg.tol);
    let c = interior_max(&rep.casimir(), 0);
    let casimir = Casimir { residual: c, tolerance: CASIMIR_TOL, pass: c <= CASIMIR_TOL };
    let pass = relations.all_pass() && projectors.all_pass() && casimir.pass;

    let mut summary = vec![format!("{:<22} {:>4} {:>12}  pass", "relation", "word", "residual")];
    for e in relations.entries.iter().chain(&projectors.entries) {
        summary.push(format!("{:<22} {:>4} {:>12.3e}  {}", e.relation, e.word_length, e.residual, e.pass));
    }
    summary.push(format!("{:<22} {:>4} {:>12.3e}  {}", "casimir", 0, c, casimir.pass));

    let mut rows = residual_rows(&[&relations, &projectors]);
    rows.push(vec!["casimir".into(), "0".into(), num(c), casimir.pass.to_string()]);
    let body = json!({
        "classification": to_body(&class)?,
        "relations": to_body(&relations)?,
        "projector_algebra": to_body(&projectors)?,
        "casimir": to_body(&casimir)?,
    });
    let table = Table::Rows { columns: vec!["relation", "word_length", "residual", "pass"], rows };
    Ok(report(cfg, pass, body, Some(table), summary))
}

fn level_rows(s: &SpectrumReport) -> Vec<Vec<String>> {
    s.levels.iter().map(|l| vec![l.n.to_string(), num(l.energy), l.sector.to_string()]).collect()
}

fn cluster_summary(s: &SpectrumReport) -> Vec<String> {
    let mut out = vec![format!("{:>16}  multiplicity", "energy")];
    out.extend(s.clusters.iter().map(|c| format!("{:>16}  {}", num(c.energy), c.multiplicity)));
    out.push(format!("({} clusters within the top {} states excluded)", s.excluded_clusters, s.cutoff));
    out
}

/// Sector shifts from `--r`, or solved when `--mu` is given.
fn shifts_for_spectrum(cfg: &RunConfig) -> Result<Option<Vec<f64>>, Failure> {
    match (&cfg.r, cfg.mu) {
        (Some(r), _) => Ok(Some(r.clone())),
        (None, Some(mu)) => Ok(Some(PssqmConfig::solve(&cfg.spec, mu, cfg.eta.clone()).map_err(core)?.r)),
        (None, None) => Ok(None),
    }
}

fn spectrum(cfg: &RunConfig) -> Result<Report, Failure> {
    FockRep::build(&cfg.spec, cfg.dim).map_err(core)?;
    let r = shifts_for_spectrum(cfg)?;
    let diag = match &r {
        Some(r) => to_f64_vec(&shifted_diagonal::<f64>(&cfg.spec, cfg.dim, r).map_err(core)?),
        None => to_f64_vec(&h0_diagonal::<f64>(&cfg.spec, cfg.dim)),
    };
    let lambda = cfg.spec.lambda();
    let s = SpectrumReport::new(&diag, lambda, default_cutoff(lambda, lambda - 1), cfg.tol);
    #[derive(Serialize)]
    struct Body<'a> {
        #[serde(serialize_with = "ser_opt_vec")]
        r: Option<Vec<f64>>,
        spectrum: &'a SpectrumReport,
    }
    let body = to_body(&Body { r, spectrum: &s })?;
    let table = Table::Rows { columns: vec!["n", "energy", "sector"], rows: level_rows(&s) };
    Ok(report(cfg, true, body, Some(table), cluster_summary(&s)))
}

fn ser_opt_vec<S: serde::Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_vec(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct Constraints {
    #[serde(serialize_with = "ser_f64")]
    recursion_residual: f64,
    #[serde(serialize_with = "ser_f64")]
    nonlinear_residual: f64,
    #[serde(serialize_with = "ser_f64")]
    tolerance: f64,
    pass: bool,
}

fn constraints(spec: &AlgebraSpec, config: &PssqmConfig, tol: f64) -> Constraints {
    let recursion = recursion_residual(spec, config.mu, &config.r);
    let nonlinear = nonlinear_residual(spec, config.mu, &config.eta, &config.r);
    Constraints {
        recursion_residual: recursion,
        nonlinear_residual: nonlinear,
        tolerance: tol,
        pass: recursion <= tol && nonlinear <= tol,
    }
}

fn breaking_summary(b: &BreakingReport) -> String {
    format!(
        "ground {} x{}, excited {:?}, expected {:?}: {}",
        b.ground_energy.map_or("none".into(), num),
        b.ground_multiplicity.unwrap_or(0),
        b.excited_multiplicities,
        b.expected,
        if b.matches_expected { "matches" } else { "MISMATCH" }
    )
}

fn pssqm_solve(cfg: &RunConfig) -> Result<Report, Failure> {
    let mu = cfg.mu.unwrap_or(0);
    let config = PssqmConfig::solve(&cfg.spec, mu, cfg.eta.clone()).map_err(core)?;
    let checks = constraints(&cfg.spec, &config, cfg.tol);
    let diag = to_f64_vec(&shifted_diagonal::<f64>(&cfg.spec, cfg.dim, &config.r).map_err(core)?);
    let breaking = classify_breaking(&diag, mu, config.p, clext_core::spectrum::DEFAULT_CLUSTER_TOL);
    let pass = checks.pass && breaking.matches_expected;

    let summary = vec![
        format!("r = ({})", config.r.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")),
        format!("recursion residual {:.3e}, constraint residual {:.3e}", checks.recursion_residual, checks.nonlinear_residual),
        breaking_summary(&breaking),
    ];
    let rows = config.r.iter().enumerate().map(|(i, x)| vec![i.to_string(), num(*x)]).collect();
    let body = json!({
        "config": to_body(&config)?,
        "constraints": to_body(&checks)?,
        "breaking": to_body(&breaking)?,
    });
    Ok(report(cfg, pass, body, Some(Table::Rows { columns: vec!["sector", "r"], rows }), summary))
}

#[derive(Serialize)]
struct Sampling {
    #[serde(flatten)]
    result: SignSampling,
    /// For μ ≥ p − 1 every ground energy must be positive; `None` otherwise.
    positivity_holds: Option<bool>,
}

fn pssqm_check(cfg: &RunConfig) -> Result<Report, Failure> {
    let mu = cfg.mu.unwrap_or(0);
    let p = cfg.p;
    let eta = cfg.eta.clone().unwrap_or_else(|| default_eta(p));
    // a user-supplied r is checked as given, so a tampered chain shows up as failed residuals
    let config = match &cfg.r {
        Some(r) => {
            clext_core::pssqm::check_eta(&eta).map_err(core)?;
            PssqmConfig { p, mu, eta, r: r.clone() }
        }
        None => PssqmConfig::solve(&cfg.spec, mu, Some(eta)).map_err(core)?,
    };
    let rep = FockRepDd::build(&cfg.spec, cfg.dim).map_err(core)?;
    let q = build_supercharge(&rep, mu, &config.eta).map_err(core)?;
    let h = shifted_diagonal::<DoubleF64>(&cfg.spec, cfg.dim, &config.r).map_err(core)?;
    let khare: PssqmReport = khare_check(&rep, &q, &h, cfg.tol);
    let breaking = classify_breaking(&to_f64_vec(&h), mu, p, clext_core::spectrum::DEFAULT_CLUSTER_TOL);
    let checks = constraints(&cfg.spec, &config, clext_core::algebra::CONSTRAINT_TOL);

    let sampling = match cfg.samples {
        Some(n) if n > 0 => {
            let (lo, hi) = (
                cfg.scan_from.unwrap_or(DEFAULT_SAMPLE_BOX.0),
                cfg.scan_to.unwrap_or(DEFAULT_SAMPLE_BOX.1),
            );
            let result = sample_ground_energies(p, mu, lo, hi, n, cfg.seed).map_err(core)?;
            let positivity_holds = (mu + 1 >= p).then(|| result.all_positive());
            Some(Sampling { result, positivity_holds })
        }
        _ => None,
    };
    let pass = khare.pass
        && breaking.matches_expected
        && sampling.as_ref().and_then(|s| s.positivity_holds).unwrap_or(true);

    let mut summary = vec![
        format!("precision {}, margin {}", <DoubleF64 as clext_core::Real>::NAME, khare.margin),
        format!("Q^(p+1) = 0           {:>12.3e}", khare.residual_nilpotency),
        format!("min_n<=p |Q^n|        {:>12.3e}", khare.nonvanishing_witness),
        format!("[H, Q]                {:>12.3e}", khare.residual_commutator),
        format!("multilinear relation  {:>12.3e}", khare.residual_multilinear),
        breaking_summary(&breaking),
    ];
    if let Some(s) = &sampling {
        let r = &s.result;
        summary.push(format!(
            "ground energy over {} samples in [{}, {}]: {} positive, {} negative, zero {}",
            r.samples.len(),
            num(r.lo),
            num(r.hi),
            r.positive,
            r.negative,
            r.zero.as_ref().map_or("not constructed".into(), |z| format!("at alpha {:?} (E = {:.1e})", z.alpha, z.ground_energy))
        ));
    }
    let rows = vec![
        vec!["nilpotency".into(), num(khare.residual_nilpotency)],
        vec!["nonvanishing_witness".into(), num(khare.nonvanishing_witness)],
        vec!["commutator".into(), num(khare.residual_commutator)],
        vec!["multilinear".into(), num(khare.residual_multilinear)],
    ];
    let body = json!({
        "config": to_body(&config)?,
        "constraints": to_body(&checks)?,
        "precision": <DoubleF64 as clext_core::Real>::NAME,
        "khare": to_body(&khare)?,
        "breaking": to_body(&breaking)?,
        "sign_sampling": to_body(&sampling)?,
    });
    Ok(report(cfg, pass, body, Some(Table::Rows { columns: vec!["check", "residual"], rows }), summary))
}

fn ssqm(cfg: &RunConfig) -> Result<Report, Failure> {
    let rep = FockRep::build(&cfg.spec, cfg.dim).map_err(core)?;
    let variants = match cfg.variant {
        Some(v) => vec![v],
        None => vec![SsqmVariant::Unbroken, SsqmVariant::Broken],
    };
    let reports: Vec<SsqmReport> =
        variants.iter().map(|&v| ssqm_check(&rep, v, cfg.tol)).collect::<Result<_, _>>().map_err(core)?;
    let pass = reports.iter().all(|r| r.pass);
    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for r in &reports {
        let name = serde_json::to_value(r.variant).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        summary.push(format!(
            "{name}: Q^2 {:.1e}, {{Q+,Q}} - H {:.1e}, [H,Q] {:.1e}; clusters {:?}",
            r.residual_nilpotency,
            r.residual_anticommutator,
            r.residual_commutator,
            r.spectrum.clusters.iter().map(|c| (num(c.energy), c.multiplicity)).collect::<Vec<_>>()
        ));
        rows.extend(level_rows(&r.spectrum).into_iter().map(|mut row| {
            row.insert(0, name.clone());
            row
        }));
    }
    let body = json!({ "variants": to_body(&reports)? });
    Ok(report(cfg, pass, body, Some(Table::Rows { columns: vec!["variant", "n", "energy", "sector"], rows }), summary))
}

#[derive(Serialize)]
struct ScanClaim {
    #[serde(serialize_with = "ser_vec")]
    compatible_parameters: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    window: f64,
    /// Compatible exactly at the scanned points within `window` of −1.
    holds: bool,
}

fn bd(cfg: &RunConfig) -> Result<Report, Failure> {
    let mu = cfg.mu.unwrap_or(0);
    let from = cfg.scan_from.unwrap_or(-2.0);
    let to = cfg.scan_to.unwrap_or(0.0);
    let points = cfg.scan_points.unwrap_or(41);
    let rows: Vec<ScanRow> =
        bd_scan::<DoubleF64>(cfg.spec.alpha(), mu, from, to, points, cfg.dim, cfg.tol).map_err(core)?;
    let holds = rows.iter().all(|r| r.compatible == ((r.parameter + 1.0).abs() <= BD_WINDOW));
    let claim = ScanClaim {
        compatible_parameters: rows.iter().filter(|r| r.compatible).map(|r| r.parameter).collect(),
        window: BD_WINDOW,
        holds,
    };
    let mut summary = vec![format!("{:>10}  {:>12}  compatible", "alpha", "residual")];
    summary.extend(rows.iter().map(|r| format!("{:>10}  {:>12.3e}  {}", num(r.parameter), r.residual, r.compatible)));
    let table_rows = rows.iter().map(|r| vec![num(r.parameter), num(r.residual)]).collect();
    let mut body = BTreeMap::new();
    body.insert("mu", json!(mu));
    body.insert("component", json!((mu + 2) % 3));
    body.insert("rows", to_body(&rows)?);
    body.insert("claim", to_body(&claim)?);
    let body = to_body(&body)?;
    Ok(report(cfg, holds, body, Some(Table::Rows { columns: vec!["parameter", "residual"], rows: table_rows }), summary))
}

fn classify(cfg: &RunConfig) -> Result<Report, Failure> {
    let (body, pass, summary, row) = match cfg.spec.classify() {
        Ok(RepClass { kind, witnesses }) => {
            let class = RepClass { kind, witnesses };
            let text = match kind {
                clext_core::RepKind::FiniteDim { dim } => format!("finite-dim ({dim})"),
                clext_core::RepKind::BoundedFromBelow => "bounded-from-below".to_string(),
            };
            let row = vec![text.clone(), class.witnesses.iter().map(|w| num(*w)).collect::<Vec<_>>().join(" ")];
            (json!({ "classification": to_body(&class)? }), true, vec![text], row)
        }
        Err(Error::NonUnitary { index, value }) => {
            let body = json!({ "classification": { "kind": "non-unitary", "index": index, "value": to_body(&Value(value))? } });
            let text = format!("non-unitary: F({index}) = {} < 0", num(value));
            (body, false, vec![text.clone()], vec!["non-unitary".into(), num(value)])
        }
        Err(e) => return Err(core(e)),
    };
    let table = Table::Rows { columns: vec!["kind", "witnesses"], rows: vec![row] };
    Ok(report(cfg, pass, body, Some(table), summary))
}

#[derive(Serialize)]
struct Value(#[serde(serialize_with = "ser_f64")] f64);

fn dump(cfg: &RunConfig) -> Result<Report, Failure> {
    let rep = FockRep::build(&cfg.spec, cfg.dim).map_err(core)?;
    let mut named: Vec<(String, _)> =
        vec![("a".into(), rep.a()), ("adag".into(), rep.adag()), ("N".into(), rep.num()), ("T".into(), rep.t())];
    for (mu, p) in rep.projectors().iter().enumerate() {
        named.push((format!("P{mu}"), p));
    }
    let mut matrices = serde_json::Map::new();
    for (name, m) in &named {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        matrices.insert(name.clone(), to_body(&rows)?);
    }
    let summary = vec![format!("{} operators of size {}x{}", named.len(), cfg.dim, cfg.dim)];
    let body = json!({ "layout": "row-major [re, im]", "matrices": matrices });
    let table = Table::Text(Box::new(move |delim| {
        let mut out = Vec::new();
        rep.write_dump(&mut out, delim).expect("writing to memory");
        out
    }));
    Ok(report(cfg, true, body, Some(table), summary))
}
