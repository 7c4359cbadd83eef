//! Command-line front end.
//!
//! Every command builds a JSON value; text output is a rendering of the same
//! value. Exit status is 0 when every verification in the report passes, 1
//! when one fails and 2 on invalid input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::cohomology::{build_ring, monomial_string, CohomRing};
use crate::dmodule::{
    find_annihilators, gkz_operator, operator_in_span, semiclassical, AnsatzBounds, DiffOp,
};
use crate::error::{Error, Result};
use crate::givental_series::{
    build_series, check_inverse, component, component_json, homogeneity_violations, series_json,
    GiventalSeries, SignMode,
};
use crate::linalg;
use crate::loop_model::{check_stabilization, min_modes};
use crate::rational::{format_rational, rat};
use crate::toric_geometry::{in_mori_cone, ChargeMatrix, CurveClass, ToricVariety};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Ring dimensions, basis, Poincare pairing.
    Cohomology,
    /// Truncated series and its components.
    Ifunction,
    /// GKZ operators, annihilator search and semiclassical relations.
    Operators,
    /// Stabilization of Euler-class ratios in the finite-mode model.
    LoopModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "qdm", version, about = "Quantum D-modules of smooth Fano toric varieties")]
pub struct Args {
    pub command: Command,
    /// Fan description (JSON with `rays`, `max_cones`, optional `nef_basis`).
    pub fan: PathBuf,
    /// Truncation bound B on the c1-degree.
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Maximal total theta order of the operator ansatz.
    #[arg(long)]
    pub theta_order: Option<u32>,
    /// Maximal total q degree of the operator ansatz.
    #[arg(long)]
    pub q_degree: Option<u32>,
    /// Maximal hbar degree of the operator ansatz.
    #[arg(long)]
    pub hbar_order: Option<u32>,
    /// Mode bounds as `N0..N1` (inclusive) or a single `N`.
    #[arg(long)]
    pub modes: Option<String>,
    /// Curve class in nef coordinates, e.g. `1,0`; repeatable.
    #[arg(long = "degree")]
    pub degrees: Vec<String>,
    /// Evaluate classes with negative divisor pairings.
    #[arg(long)]
    pub allow_general_sign: bool,
    /// Also emit the components of the series.
    #[arg(long)]
    pub components: bool,
    /// Order of the logarithmic expansion in components.
    #[arg(long)]
    pub log_order: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed and validated run parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub fan: PathBuf,
    pub max_degree: Option<u32>,
    pub theta_order: Option<u32>,
    pub q_degree: Option<u32>,
    pub hbar_order: Option<u32>,
    pub modes: Option<(usize, usize)>,
    pub degrees: Vec<Vec<i64>>,
    pub sign_mode: SignMode,
    pub components: bool,
    pub log_order: Option<u32>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

const DEFAULT_MAX_DEGREE: u32 = 6;

fn parse_modes(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Syntax(format!("mode range {text:?} is not of the form N0..N1"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(text)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_degree(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Syntax(format!("degree {text:?} is not a list of integers"))))
        .collect()
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self> {
        Ok(RunConfig {
            command: args.command,
            fan: args.fan,
            max_degree: args.max_degree,
            theta_order: args.theta_order,
            q_degree: args.q_degree,
            hbar_order: args.hbar_order,
            modes: args.modes.as_deref().map(parse_modes).transpose()?,
            degrees: args.degrees.iter().map(|d| parse_degree(d)).collect::<Result<_>>()?,
            sign_mode: if args.allow_general_sign { SignMode::General } else { SignMode::StrictPositive },
            components: args.components,
            log_order: args.log_order,
            format: args.format,
            out: args.out,
        })
    }
}

/// Result of one command: the JSON report and whether its checks passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub value: Value,
    pub passed: bool,
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let text = fs::read_to_string(&cfg.fan)?;
    let variety = ToricVariety::from_json(&text)?;
    let ring = build_ring(&variety.fan, &variety.charge)?;
    match cfg.command {
        Command::Cohomology => cmd_cohomology(&variety, &ring),
        Command::Ifunction => cmd_ifunction(cfg, &variety, &ring),
        Command::Operators => cmd_operators(cfg, &variety, &ring),
        Command::LoopModel => cmd_loop_model(cfg, &variety, &ring),
    }
}

fn matrix_json(rows: &[Vec<crate::rational::Rational>]) -> Value {
    rows.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect()
}

fn curves_json(curves: &[CurveClass]) -> Value {
    curves.iter().map(|c| c.0.clone()).collect()
}

pub fn cmd_cohomology(v: &ToricVariety, ring: &CohomRing) -> Result<Report> {
    let dims = ring.graded_dims();
    let total: usize = dims.iter().sum();
    let top = ring.top_degree();
    let pairings: Vec<Value> = (0..=top)
        .map(|deg| json!({ "degree": deg, "matrix": matrix_json(&ring.pairing_matrix(deg)) }))
        .collect();
    let nonsingular = (0..=top).all(|deg| {
        let m = ring.pairing_matrix(deg);
        linalg::rank(&m) == m.len() && m.len() == dims[top - deg]
    });
    let relations_vanish = ring.linear_relations(&v.fan).iter().all(|c| c.is_zero());
    let dimension_ok = total == v.fan.max_cones().len();
    let value = json!({
        "command": "cohomology",
        "dimension": v.fan.dim(),
        "picard_rank": v.fan.picard_rank(),
        "charge_matrix": v.charge.rows(),
        "mori_generators": curves_json(&v.generators),
        "graded_dimensions": dims,
        "total_dimension": total,
        "basis": ring.basis().iter().map(|m| monomial_string(m)).collect::<Vec<_>>(),
        "stanley_reisner": ring.sr_generators(),
        "first_chern_class": ring.display(&ring.first_chern_class()),
        "pairing_matrices": pairings,
        "checks": {
            "total_dimension_matches_cones": dimension_ok,
            "pairing_nonsingular": nonsingular,
            "linear_relations_vanish": relations_vanish,
        },
    });
    Ok(Report { value, passed: dimension_ok && nonsingular && relations_vanish })
}

fn build(cfg: &RunConfig, v: &ToricVariety, ring: &CohomRing, bound: u32) -> Result<GiventalSeries> {
    build_series(ring, &v.charge, &v.generators, bound, cfg.sign_mode)
}

fn sign_mode_name(mode: SignMode) -> &'static str {
    match mode {
        SignMode::StrictPositive => "strict-positive",
        SignMode::General => "general",
    }
}

pub fn cmd_ifunction(cfg: &RunConfig, v: &ToricVariety, ring: &CohomRing) -> Result<Report> {
    let bound = cfg.max_degree.unwrap_or(DEFAULT_MAX_DEGREE);
    let series = build(cfg, v, ring, bound)?;
    let violations: usize = series
        .terms()
        .iter()
        .map(|(d, r)| homogeneity_violations(ring, r, v.charge.c1(d)))
        .sum();
    let inverses_ok = series.terms().iter().all(|(d, r)| check_inverse(ring, &v.charge, d, r));
    let mut value = json!({
        "command": "ifunction",
        "max_degree": bound,
        "sign_mode": sign_mode_name(cfg.sign_mode),
        "prefactor": "exp(sum_j t_j w_j / hbar)",
        "basis": ring.basis().iter().map(|m| monomial_string(m)).collect::<Vec<_>>(),
        "series": serde_json::to_value(series_json(&series, ring))?,
        "checks": {
            "homogeneity_violations": violations,
            "inverse_products_exact": inverses_ok,
        },
    });
    if cfg.components {
        let order = cfg.log_order.unwrap_or(ring.top_degree() as u32);
        let degrees = series.degrees();
        let comps = (0..ring.size())
            .map(|b| Ok(serde_json::to_value(component_json(&component(&series, ring, b, order)?, ring, &degrees))?))
            .collect::<Result<Vec<Value>>>()?;
        value["log_order"] = json!(order);
        value["components"] = Value::Array(comps);
    }
    Ok(Report { value, passed: violations == 0 && inverses_ok })
}

/// Largest `int_e c_1` over `|e| <= q_degree`.
fn probe_c1(m: &ChargeMatrix, q_degree: u32) -> i64 {
    (0..m.l())
        .map(|j| {
            let mut e = vec![0; m.l()];
            e[j] = q_degree as i64;
            m.c1(&CurveClass(e))
        })
        .max()
        .unwrap_or(0)
}

fn operator_json(op: &DiffOp, ring: &CohomRing) -> Value {
    let rel = semiclassical(op);
    json!({
        "display": op.to_string(),
        "operator": op.to_json(),
        "relation": rel.to_string(),
        "relation_classical_zero": rel.classical_reduction(ring).is_zero(),
    })
}

pub fn cmd_operators(cfg: &RunConfig, v: &ToricVariety, ring: &CohomRing) -> Result<Report> {
    let gkz: Vec<(CurveClass, DiffOp)> =
        v.generators.iter().map(|g| (g.clone(), gkz_operator(&v.charge, g))).collect();
    let theta_order = cfg
        .theta_order
        .unwrap_or_else(|| gkz.iter().map(|(_, op)| op.theta_order()).max().unwrap_or(0));
    let q_degree = cfg.q_degree.unwrap_or(1);
    let bounds = AnsatzBounds { theta_order, q_degree, hbar_degree: cfg.hbar_order.unwrap_or(theta_order) };
    let gen_c1 = v.generators.iter().map(|g| v.charge.c1(g)).max().unwrap_or(0);
    let reach = probe_c1(&v.charge, q_degree.max(1)).max(gen_c1);
    let bound = cfg.max_degree.unwrap_or_else(|| DEFAULT_MAX_DEGREE.max(3 * reach as u32));
    let series = build(cfg, v, ring, bound)?;

    let found = find_annihilators(ring, &series, bounds)?;
    let mut passed = true;
    let mut gkz_reports = Vec::new();
    for (g, op) in &gkz {
        let applied = crate::dmodule::apply(ring, op, &series)?;
        let mut entry = operator_json(op, ring);
        let ok = applied.vanishes() && entry["relation_classical_zero"] == json!(true);
        passed &= ok;
        entry["generator"] = json!(g.0);
        entry["window"] = json!(applied.window());
        entry["annihilates"] = json!(applied.vanishes());
        entry["in_annihilator_span"] = json!(operator_in_span(op, &found));
        gkz_reports.push(entry);
    }
    let mut found_reports = Vec::new();
    for op in &found {
        let entry = operator_json(op, ring);
        passed &= entry["relation_classical_zero"] == json!(true);
        found_reports.push(entry);
    }
    let value = json!({
        "command": "operators",
        "max_degree": bound,
        "sign_mode": sign_mode_name(cfg.sign_mode),
        "bounds": {
            "theta_order": bounds.theta_order,
            "q_degree": bounds.q_degree,
            "hbar_order": bounds.hbar_degree,
        },
        "gkz": gkz_reports,
        "annihilators": found_reports,
        "checks": { "all_pass": passed },
    });
    Ok(Report { value, passed })
}

pub fn cmd_loop_model(cfg: &RunConfig, v: &ToricVariety, ring: &CohomRing) -> Result<Report> {
    let m = &v.charge;
    let degrees: Vec<CurveClass> = if cfg.degrees.is_empty() {
        v.degrees(cfg.max_degree.unwrap_or(DEFAULT_MAX_DEGREE))?
    } else {
        cfg.degrees.iter().map(|d| CurveClass(d.clone())).collect()
    };
    let lambda = vec![rat(1); m.l()];
    let mut reports = Vec::new();
    let mut passed = true;
    for d in &degrees {
        if d.0.len() != m.l() {
            return Err(Error::LengthMismatch { expected: m.l(), found: d.0.len() });
        }
        if !in_mori_cone(&v.generators, d) {
            return Err(Error::NotEffective { degree: d.to_string() });
        }
        if cfg.sign_mode == SignMode::StrictPositive {
            if let Some(k) = m.pairing_vector(d).iter().position(|&a| a < 0) {
                return Err(Error::NegativePairing { degree: d.to_string(), divisor: k });
            }
        }
        let need = min_modes(m, d);
        let (lo, hi) = cfg.modes.unwrap_or((need, need + 3));
        let modes: Vec<usize> = (lo..=hi).collect();
        let rep = check_stabilization(ring, m, d, &modes, &lambda)?;
        passed &= rep.stable;
        let mut entry = serde_json::to_value(rep.to_json(ring))?;
        entry["min_modes"] = json!(need);
        reports.push(entry);
    }
    let value = json!({
        "command": "loop-model",
        "lambda": lambda.iter().map(format_rational).collect::<Vec<_>>(),
        "reports": reports,
        "checks": { "all_stable": passed },
    });
    Ok(Report { value, passed })
}

/// Indented `key: value` rendering of a JSON value.
pub fn render_text(value: &Value) -> String {
    let mut out = String::new();
    render_into(value, 0, &mut out);
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Array(items) if items.iter().all(|x| is_scalar(x) || inline(x).is_some()) => {
            let parts: Option<Vec<String>> =
                items.iter().map(|x| if is_scalar(x) { Some(scalar_text(x)) } else { inline(x) }).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        v if is_scalar(v) => Some(scalar_text(v)),
        _ => None,
    }
}

fn render_into(value: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match inline(v) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_into(v, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match inline(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_into(item, indent + 2, out);
                    }
                }
            }
        }
        scalar => out.push_str(&format!("{pad}{}\n", scalar_text(scalar))),
    }
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&report.value)? + "\n",
        Format::Text => render_text(&report.value),
    })
}

pub fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = RunConfig::from_args(args).and_then(|cfg| {
        let report = run(&cfg)?;
        let text = render(&report, cfg.format)?;
        match &cfg.out {
            Some(path) => fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(report.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
