use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use nqfa::bimodules::{check_bim_equals_ranperp, enumerate_ideals, ideal_from_generators, random_ideals, LeftIdeal};
use nqfa::dynamics::{crossed_product, fejer_partial, load_action};
use nqfa::fourier::Functional;
use nqfa::fubini::{slice_map_check, XChoice};
use nqfa::groups::FiniteGroup;
use nqfa::numerics::{CMatrix, C64};
use nqfa::qg::{FiniteQuantumGroup, StructureTensors};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::output::{envelope, sci, to_json};
use crate::suites::{self, SuiteReport};
use crate::{Format, HostArgs, OutArgs, Outcome, Suite};

/// Anything that maps to exit code 2.
#[derive(Debug)]
pub struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<nqfa::Error> for CliError {
    fn from(e: nqfa::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(format!("JSON error: {e}"))
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

type CliResult<T> = Result<T, CliError>;

fn read(path: impl AsRef<Path>) -> CliResult<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Hosts used by `verify` when no `--group` is given.
const DEFAULT_HOSTS: [(&str, &str); 6] =
    [("c2", "function"), ("c2", "group"), ("c4", "function"), ("c4", "group"), ("s3", "function"), ("s3", "group")];

fn format_of(out: &OutArgs, default: Format, allowed: &[Format], command: &str) -> CliResult<Format> {
    let f = out.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(format!("`{command}` does not support --format {f:?}").to_lowercase()))
    }
}

fn check_tol(tol: Option<f64>) -> CliResult<()> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(usage(format!("--tol must be positive, got {t}"))),
        _ => Ok(()),
    }
}

/// A builtin name, a group file (`table`) or a structure-tensor file
/// (`mult`). The side is ignored for tensor files.
pub fn load_host(group: &str, side: &str) -> CliResult<FiniteQuantumGroup> {
    if let Ok(g) = FiniteGroup::builtin(group) {
        return Ok(FiniteQuantumGroup::from_group_side(&g, side)?);
    }
    let path = Path::new(group);
    if !path.is_file() {
        return Err(usage(format!("`{group}` is neither a builtin group nor a readable file")));
    }
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text)?;
    if value.get("table").is_some() {
        Ok(FiniteQuantumGroup::from_group_side(&FiniteGroup::from_file(path)?, side)?)
    } else if value.get("mult").is_some() {
        Ok(FiniteQuantumGroup::from_structure_tensors(StructureTensors::from_json(&text)?)?)
    } else {
        Err(usage(format!("{}: expected a group file (`table`) or structure tensors (`mult`)", path.display())))
    }
}

fn required_group(host: &HostArgs) -> CliResult<&str> {
    host.group.as_deref().ok_or_else(|| usage("--group is required"))
}

pub fn build(host: &HostArgs, out: &OutArgs) -> CliResult<Outcome> {
    let format = format_of(out, Format::Json, &[Format::Json, Format::Text], "build")?;
    let q = load_host(required_group(host)?, &host.side)?;
    let irrep_dims: Vec<usize> = q.irreps().iter().map(|u| u.dim()).collect();
    let axiom_max = q.axioms().iter().chain(q.dual_axioms()).map(|a| a.residual).fold(0.0, f64::max);
    let unitary = q.unitary_report().max();
    let pw = q.peter_weyl_report();
    let passed = axiom_max <= 1e-10 && unitary <= 1e-10 && pw.max() <= 1e-10;
    let body = match format {
        Format::Text => {
            let mut s = format!("{} dim {}\n", q.label(), q.dim());
            s += &format!("irreps: {}\n", irrep_dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "));
            s += &format!("axioms max residual {}\n", sci(axiom_max));
            s += &format!("unitaries max residual {}\n", sci(unitary));
            s += &format!("peter-weyl max residual {}\n", sci(pw.max()));
            s += if passed { "PASS\n" } else { "FAIL\n" };
            s
        }
        _ => {
            let mut m = envelope("build");
            m.insert("label".into(), json!(q.label()));
            m.insert("dim".into(), json!(q.dim()));
            m.insert("irrep_dims".into(), json!(irrep_dims));
            m.insert("quantum_dims".into(), json!(q.irreps().iter().map(|u| u.qdim()).collect::<Vec<_>>()));
            m.insert("axioms".into(), serde_json::to_value(q.axioms())?);
            m.insert("dual_axioms".into(), serde_json::to_value(q.dual_axioms())?);
            m.insert("unitary".into(), serde_json::to_value(q.unitary_report())?);
            m.insert("peter_weyl".into(), serde_json::to_value(&pw)?);
            m.insert("passed".into(), json!(passed));
            to_json(m)
        }
    };
    Ok(Outcome { body, passed })
}

pub fn verify(host: &HostArgs, selected: &[Suite], tol: Option<f64>, seed: u64, out: &OutArgs) -> CliResult<Outcome> {
    check_tol(tol)?;
    let format = format_of(out, Format::Json, &[Format::Json, Format::Csv, Format::Text], "verify")?;
    let hosts: Vec<(String, String)> = match &host.group {
        Some(g) => vec![(g.clone(), host.side.clone())],
        None => DEFAULT_HOSTS.iter().map(|(g, s)| (g.to_string(), s.to_string())).collect(),
    };
    let suites = Suite::expand(selected);
    let mut runs: Vec<(String, String, String, Vec<SuiteReport>)> = Vec::new();
    for (g, side) in hosts {
        let q = Arc::new(load_host(&g, &side)?);
        let reports = suites.iter().map(|&s| suites::run(s, &q, tol, seed)).collect::<nqfa::Result<Vec<_>>>()?;
        runs.push((g, side, q.label().to_string(), reports));
    }
    let passed = runs.iter().all(|r| r.3.iter().all(|s| s.passed));
    let body = match format {
        Format::Csv => {
            let mut s = String::from("group,side,suite,check,residual,passed\n");
            for (g, side, _, reports) in &runs {
                for r in reports {
                    for c in &r.checks {
                        s += &format!("{g},{side},{},\"{}\",{:e},{}\n", r.name, c.name, c.residual, c.passed);
                    }
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (_, _, label, reports) in &runs {
                for r in reports {
                    s += &format!(
                        "{label:<10} {:<10} {} max {} tol {}\n",
                        r.name,
                        if r.passed { "PASS" } else { "FAIL" },
                        sci(r.max_residual),
                        sci(r.tolerance)
                    );
                }
            }
            s += if passed { "PASS\n" } else { "FAIL\n" };
            s
        }
        Format::Json => {
            let mut m = envelope("verify");
            m.insert("seed".into(), json!(seed));
            let hosts: Vec<Value> = runs
                .iter()
                .map(|(g, side, label, reports)| {
                    json!({ "group": g, "side": side, "label": label, "suites": reports,
                            "passed": reports.iter().all(|r| r.passed) })
                })
                .collect();
            m.insert("hosts".into(), Value::Array(hosts));
            m.insert("passed".into(), json!(passed));
            to_json(m)
        }
    };
    Ok(Outcome { body, passed })
}

struct FejerRow {
    index: usize,
    band: usize,
    partial: f64,
    last: f64,
}

pub fn fejer(action: &str, tol: Option<f64>, out: &OutArgs) -> CliResult<Outcome> {
    check_tol(tol)?;
    let tol = tol.unwrap_or(1e-8);
    let format = format_of(out, Format::Csv, &[Format::Csv, Format::Json], "fejer")?;
    let a = load_action(action)?;
    let cp = crossed_product(&a)?;
    let q = a.host();
    let eps = Functional::counit(q.dual_side());
    let bands = q.irreps().len();
    let mut rows = Vec::new();
    for (index, t) in cp.generators().iter().enumerate() {
        let partial: Vec<f64> = (0..bands)
            .map(|s| {
                let f: Vec<usize> = (0..=s).collect();
                fejer_partial(&cp, t, &eps, &f).map(|p| p.dist(t))
            })
            .collect::<nqfa::Result<_>>()?;
        let last = partial[bands - 1];
        rows.extend(partial.into_iter().enumerate().map(|(band, partial)| FejerRow { index, band, partial, last }));
    }
    let passed = rows.iter().all(|r| r.last <= tol);
    let body = match format {
        Format::Json => {
            let mut m = envelope("fejer");
            m.insert("action".into(), json!(a.label()));
            m.insert("tolerance".into(), json!(tol));
            let table: Vec<Value> = rows
                .iter()
                .map(|r| json!({"index": r.index, "band": r.band, "partial_residual": r.partial, "final_residual": r.last}))
                .collect();
            m.insert("rows".into(), Value::Array(table));
            m.insert("max_final_residual".into(), json!(rows.iter().map(|r| r.last).fold(0.0, f64::max)));
            m.insert("passed".into(), json!(passed));
            to_json(m)
        }
        _ => {
            let mut s = String::from("index,band,partial_residual,final_residual\n");
            for r in &rows {
                s += &format!("{},{},{:e},{:e}\n", r.index, r.band, r.partial, r.last);
            }
            s
        }
    };
    Ok(Outcome { body, passed })
}

#[derive(Deserialize)]
struct IdealFile {
    generators: Vec<Vec<(f64, f64)>>,
}

fn load_ideals<'q>(q: &'q FiniteQuantumGroup, spec: &str, seed: u64) -> CliResult<Vec<LeftIdeal<'q>>> {
    if spec == "enumerate" {
        return Ok(enumerate_ideals(q)?);
    }
    if let Some(k) = spec.strip_prefix("random:") {
        let k: usize = k.parse().map_err(|_| usage(format!("bad ideal count in `{spec}`")))?;
        return Ok(random_ideals(q, k, seed)?);
    }
    let file: IdealFile = serde_json::from_str(&read(spec)?)?;
    let gens = file
        .generators
        .iter()
        .map(|g| Functional::new(q.primal(), g.iter().map(|&(re, im)| C64::new(re, im)).collect()))
        .collect::<nqfa::Result<Vec<_>>>()?;
    Ok(vec![ideal_from_generators(q, &gens)?])
}

pub fn bimodule(host: &HostArgs, ideal: &str, seed: u64, out: &OutArgs) -> CliResult<Outcome> {
    let format = format_of(out, Format::Json, &[Format::Json, Format::Csv], "bimodule")?;
    let q = load_host(required_group(host)?, &host.side)?;
    let ideals = load_ideals(&q, ideal, seed)?;
    let reports = ideals.iter().map(check_bim_equals_ranperp).collect::<nqfa::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed());
    let body = match format {
        Format::Csv => {
            let mut s = String::from("ideal,ideal_dim,annihilator_dim,bim_dim,ranperp_dim,equal,trace_identity,residual\n");
            for (i, r) in reports.iter().enumerate() {
                s += &format!(
                    "{i},{},{},{},{},{},{},{:e}\n",
                    r.ideal_dim, r.annihilator_dim, r.bim_dim, r.ranperp_dim, r.equal, r.trace_identity, r.residual
                );
            }
            s
        }
        _ => {
            let mut m = envelope("bimodule");
            m.insert("label".into(), json!(q.label()));
            m.insert("ideals".into(), serde_json::to_value(&reports)?);
            m.insert("passed".into(), json!(passed));
            to_json(m)
        }
    };
    Ok(Outcome { body, passed })
}

#[derive(Deserialize)]
struct XFile {
    matrices: Vec<CMatrix>,
}

pub fn fubini(action: &str, x: &str, out: &OutArgs) -> CliResult<Outcome> {
    format_of(out, Format::Json, &[Format::Json], "fubini")?;
    let a = load_action(action)?;
    let choice = match XChoice::parse(x) {
        Some(c) => c,
        None => XChoice::Given(serde_json::from_str::<XFile>(&read(x)?)?.matrices),
    };
    let cp = crossed_product(&a)?;
    let report = slice_map_check(&cp, &choice.resolve(&a)?)?;
    let passed = report.passed();
    let mut m = envelope("fubini");
    m.insert("x".into(), json!(choice.name()));
    if let Value::Object(fields) = serde_json::to_value(&report)? {
        m.extend(fields);
    }
    m.insert("passed".into(), json!(passed));
    Ok(Outcome { body: to_json(m), passed })
}

fn section(name: &str, run: &Map<String, Value>) -> String {
    let passed = run.get("passed").and_then(Value::as_bool).unwrap_or(false);
    let command = run.get("command").and_then(Value::as_str).unwrap_or("?");
    let mut s = format!("== {name}: {command} {}\n", if passed { "PASS" } else { "FAIL" });
    let label = run.get("label").or_else(|| run.get("action")).and_then(Value::as_str);
    if let Some(l) = label {
        s += &format!("   {l}\n");
    }
    match command {
        "build" => {
            s += &format!("   dim {} irreps {}\n", run["dim"], run["irrep_dims"]);
        }
        "verify" => {
            for h in run.get("hosts").and_then(Value::as_array).into_iter().flatten() {
                for r in h["suites"].as_array().into_iter().flatten() {
                    s += &format!(
                        "   {:<10} {:<10} {} max {}\n",
                        h["label"].as_str().unwrap_or("?"),
                        r["name"].as_str().unwrap_or("?"),
                        if r["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" },
                        sci(r["max_residual"].as_f64().unwrap_or(f64::NAN))
                    );
                }
            }
        }
        "fejer" => {
            s += &format!("   max final residual {}\n", sci(run["max_final_residual"].as_f64().unwrap_or(f64::NAN)));
        }
        "bimodule" => {
            s += &format!("   {} ideals\n", run["ideals"].as_array().map_or(0, Vec::len));
        }
        "fubini" => {
            s += &format!("   x {} dim {} fubini dim {}\n", run["x"], run["x_dim"], run["fubini_dim"]);
        }
        _ => {}
    }
    s
}

pub fn report(input: &Path, out: &OutArgs) -> CliResult<Outcome> {
    format_of(out, Format::Text, &[Format::Text], "report")?;
    let mut paths: Vec<_> = fs::read_dir(input)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Ok(Outcome { body: "no runs\n".into(), passed: true });
    }
    let mut sections = String::new();
    let mut passed = true;
    for p in &paths {
        let value: Value = serde_json::from_str(&read(p)?)
            .map_err(|e| usage(format!("{}: {e}", p.display())))?;
        let run = match value {
            Value::Object(m) if m.get("schema").and_then(Value::as_str) == Some(crate::output::SCHEMA) => m,
            _ => return Err(usage(format!("{}: not an nqfa/1 report", p.display()))),
        };
        passed &= run.get("passed").and_then(Value::as_bool).unwrap_or(false);
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        sections += &section(&name, &run);
    }
    let banner = format!("OVERALL {} ({} runs)\n", if passed { "PASS" } else { "FAIL" }, paths.len());
    Ok(Outcome { body: banner + &sections, passed })
}
