//! `sosdeg`: JSON front end for the multiplier, bound and curve pipelines.
//!
//! Exit codes: 0 success (certificate, passed verification), 2 separator,
//! 3 indeterminate, 1 rejected witness, 64 bad input, 70 compute failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sosdeg::algebra::{Polynomial, Rat};
use sosdeg::bounds::{
    bound_report, curve_invariants, minimal_surface_hf, p2_hf, surface_inequality, surface_multiplier_schedule,
    toric_bound_report, SurfaceKind,
};
use sosdeg::certify::{
    build_multiplier_problem, certify_multiplier, restrict_form, search_min_multiplier_degree, verify_certificate,
    verify_separator, CertifyOutcome, MultiplierCertificate, SearchEntry, StrictSeparator,
};
use sosdeg::curves::{curve_by_name, form_by_name, CurveModel, CURVE_NAMES};
use sosdeg::harnack::{default_roots, detect_nodes, harnack_parametrization, HarnackSpec, NodeKind};
use sosdeg::io::{curve_from_json, curve_to_json, exact_poly_from_json, parse_rat, rat_to_string};
use sosdeg::polygon::{is_smooth, polygon_by_name, polygon_invariants, toric_curve_invariants, LatticePolygon};
use sosdeg::sdp::{check_pointed, Pointedness, SdpError, SdpOptions};

const EXIT_REJECTED: u8 = 1;
const EXIT_SEPARATOR: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_COMPUTE: u8 = 70;

#[derive(Parser)]
#[command(name = "sosdeg", about = "Sum-of-squares multipliers, separators and degree bounds")]
struct Cli {
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Suppress the summary on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree, arithmetic genus, regularity index and Hilbert function.
    Invariants(InvariantsArgs),
    /// Multiplier degree bounds for a curve, a toric curve class or a surface.
    Bound(BoundArgs),
    /// Search for a multiplier certificate or a strict separator.
    Certify(CertifyArgs),
    /// Check a certificate or separator produced by `certify`.
    SeparatorVerify(VerifyArgs),
    /// Build a rational Harnack curve and report its nodes.
    Harnack(HarnackArgs),
    /// Lattice polygon invariants and toric curve closed forms.
    Polygon(PolygonArgs),
    /// Decide whether the sum-of-squares cone in degree 2j is pointed.
    Pointed(PointedArgs),
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_parser = positive_f64)]
    eps_feas: Option<f64>,
    /// Separator margin after normalizing the functional.
    #[arg(long, value_parser = positive_f64)]
    delta: Option<f64>,
    #[arg(long, value_parser = positive_usize)]
    max_iter: Option<usize>,
}

impl SolverArgs {
    fn options(&self) -> SdpOptions {
        let mut o = SdpOptions::default();
        if let Some(e) = self.eps_feas {
            o.eps_feas = e;
        }
        if let Some(d) = self.delta {
            o.delta = d;
        }
        if let Some(m) = self.max_iter {
            o.max_iter = m;
        }
        o
    }
}

#[derive(Args)]
struct InvariantsArgs {
    /// Built-in name or curve JSON file.
    #[arg(long)]
    curve: String,
    /// Also write the curve JSON here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Minimal,
    P2,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["curve", "polygon", "surface"])))]
struct BoundArgs {
    #[arg(long)]
    curve: Option<String>,
    /// Polygon name (`simplex`, `simplex2`, `hirzebruch:r,s`) or vertex list.
    #[arg(long, requires = "j")]
    polygon: Option<String>,
    #[arg(long, value_enum, requires = "j")]
    surface: Option<SurfaceArg>,
    #[arg(long)]
    j: Option<u32>,
    /// Ambient dimension of the surface of minimal degree.
    #[arg(long, default_value_t = 3)]
    n: u32,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    curve: String,
    /// Built-in form (`deltoid-witness:J`, `motzkin`) or polynomial JSON file.
    #[arg(long = "f", value_name = "FORM")]
    f: String,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long, conflicts_with = "kmax")]
    k: Option<u32>,
    /// Largest multiplier half-degree to try; defaults to the curve bound.
    #[arg(long)]
    kmax: Option<u32>,
    /// Solve every k up to the maximum instead of stopping at a certificate.
    #[arg(long)]
    exhaustive: bool,
    /// Write the SDP problems and outcomes here.
    #[arg(long, value_name = "PATH")]
    dump_sdp: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    curve: String,
    #[arg(long = "f", value_name = "FORM")]
    f: String,
    #[arg(long)]
    j: Option<u32>,
    /// JSON emitted by `certify --k` (separator or certificate).
    #[arg(long, value_name = "PATH")]
    witness: PathBuf,
    /// Residual and eigenvalue tolerance for certificates.
    #[arg(long, default_value_t = 1e-6, value_parser = positive_f64)]
    tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct HarnackArgs {
    #[arg(long)]
    polygon: String,
    #[arg(long)]
    t: u32,
    /// Per-edge root lists as JSON (`[["1/3", "2/3"], …]`).
    #[arg(long, value_name = "PATH")]
    roots: Option<PathBuf>,
    /// Write the parametrized curve JSON here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PolygonArgs {
    /// Polygon name or vertex list such as `[[0,0],[1,0],[0,1]]`.
    #[arg(long)]
    name: String,
    /// Curve class `(j−1)·L_Q`; omit for the polygon itself.
    #[arg(long)]
    j: Option<u32>,
}

#[derive(Args)]
struct PointedArgs {
    #[arg(long)]
    curve: String,
    #[arg(long)]
    j: u32,
    #[command(flatten)]
    solver: SolverArgs,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(x) if x > 0 => Ok(x),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

enum Failure {
    Usage(String),
    Compute(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn compute(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

struct Report {
    json: Value,
    summary: String,
    code: u8,
}

impl Report {
    fn ok(json: Value, summary: String) -> Self {
        Report { json, summary, code: 0 }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable output")
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string(v).expect("serializable output");
    fs::write(path, text + "\n").map_err(|e| compute(format!("{}: {e}", path.display())))
}

fn load_curve(arg: &str) -> Result<CurveModel, Failure> {
    if CURVE_NAMES.contains(&arg) {
        return curve_by_name(arg).map_err(compute);
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(usage(format!(
            "unknown curve `{arg}`: not a file and not one of {}",
            CURVE_NAMES.join(", ")
        )));
    }
    curve_from_json(&read_json(path)?).map_err(|e| usage(format!("{arg}: {e}")))
}

/// The form and its half-degree.
fn load_form(arg: &str, j: Option<u32>) -> Result<(Polynomial<Rat>, u32), Failure> {
    let (form, jf) = if let Ok((p, jf)) = form_by_name(arg) {
        (p, jf)
    } else {
        let path = Path::new(arg);
        if !path.is_file() {
            return Err(usage(format!(
                "unknown form `{arg}`: not a file, `motzkin` or `deltoid-witness:J`"
            )));
        }
        let p = exact_poly_from_json(&read_json(path)?).map_err(|e| usage(format!("{arg}: {e}")))?;
        let deg = p
            .homogeneous_degree()
            .ok_or_else(|| usage(format!("{arg}: form is zero or not homogeneous")))?;
        if deg % 2 != 0 {
            return Err(usage(format!("{arg}: form has odd degree {deg}")));
        }
        (p, deg / 2)
    };
    match j {
        Some(j) if j != jf => Err(usage(format!("form `{arg}` has degree {}, not 2j = {}", 2 * jf, 2 * j))),
        _ => Ok((form, jf)),
    }
}

fn parse_polygon(arg: &str) -> Result<LatticePolygon, Failure> {
    if arg.trim_start().starts_with('[') {
        let v: Vec<[i64; 2]> = serde_json::from_str(arg).map_err(|e| usage(format!("vertex list: {e}")))?;
        return LatticePolygon::new(v).map_err(|e| usage(e.to_string()));
    }
    polygon_by_name(arg).map_err(|e| usage(e.to_string()))
}

fn invariants(a: &InvariantsArgs) -> Result<Report, Failure> {
    let model = load_curve(&a.curve)?;
    if let Some(out) = &a.out {
        write_json(out, &curve_to_json(&model))?;
    }
    if !model.is_curve() {
        let hf: Vec<usize> = (0..=6).map(|m| model.hilbert_function(m)).collect();
        return Ok(Report::ok(json!({ "hilbert_function": hf }), format!("HF(0..6) = {hf:?}")));
    }
    let inv = curve_invariants(&model).map_err(compute)?;
    let top = inv.r.max(0) as u32 + 2;
    let hf: Vec<usize> = (0..=top).map(|m| model.hilbert_function(m)).collect();
    let mut v = to_value(&inv);
    v["hilbert_function"] = to_value(&hf);
    let summary = format!("d = {}, p_a = {}, r = {}", inv.d, inv.p_a, inv.r);
    Ok(Report::ok(v, summary))
}

#[derive(Serialize)]
struct SurfaceReport {
    kind: &'static str,
    j: u32,
    k: Option<u32>,
    margin: Option<i64>,
    holds: Option<bool>,
    multiplier_degree: u64,
    product_degree: u64,
}

fn bound(a: &BoundArgs) -> Result<Report, Failure> {
    if let Some(c) = &a.curve {
        let model = load_curve(c)?;
        let r = bound_report(&model).map_err(compute)?;
        let summary = format!("k >= {} (curve bound), k >= {} (degree only)", r.k_curve, r.k_degree_only);
        return Ok(Report::ok(to_value(&r), summary));
    }
    let j = a.j.expect("clap enforces --j");
    if let Some(p) = &a.polygon {
        let q = parse_polygon(p)?;
        let r = toric_bound_report(&q, j).map_err(compute)?;
        let summary = format!("k >= {} (curve bound), k >= {} (degree only)", r.k_curve, r.k_degree_only);
        return Ok(Report::ok(to_value(&r), summary));
    }
    let kind = a.surface.expect("clap enforces one target");
    let (name, sk) = match kind {
        SurfaceArg::Minimal => ("minimal", SurfaceKind::Minimal),
        SurfaceArg::P2 => ("p2", SurfaceKind::P2),
    };
    let sched = surface_multiplier_schedule(sk, j).map_err(compute)?;
    let margin = match kind {
        SurfaceArg::Minimal if j >= 1 => {
            if a.n < 3 {
                return Err(usage("--n must be at least 3"));
            }
            Some((j - 1, surface_inequality(minimal_surface_hf(a.n), 2, j, j - 1).map_err(compute)?))
        }
        SurfaceArg::P2 if j >= 2 => Some((j - 2, surface_inequality(p2_hf, 2, j, j - 2).map_err(compute)?)),
        _ => None,
    };
    let out = SurfaceReport {
        kind: name,
        j,
        k: margin.map(|m| m.0),
        margin: margin.map(|m| m.1.margin),
        holds: margin.map(|m| m.1.holds),
        multiplier_degree: sched.multiplier_degree,
        product_degree: sched.product_degree,
    };
    let summary = format!(
        "multiplier of degree {} with product of degree {}",
        sched.multiplier_degree, sched.product_degree
    );
    Ok(Report::ok(to_value(&out), summary))
}

fn describe(k: u32, o: &CertifyOutcome) -> String {
    match o {
        CertifyOutcome::Certificate(c) => format!(
            "k = {k}: certificate, residual {:.2e}, min eigenvalues {:.2e} / {:.2e}",
            c.residual, c.eig_margins.0, c.eig_margins.1
        ),
        CertifyOutcome::Separator(s) => format!("k = {k}: separator, margin {:.2e}", s.margin),
        CertifyOutcome::Indeterminate(d) => format!("k = {k}: indeterminate ({})", d.message),
    }
}

fn outcome_code(o: &CertifyOutcome) -> u8 {
    match o {
        CertifyOutcome::Certificate(_) => 0,
        CertifyOutcome::Separator(_) => EXIT_SEPARATOR,
        CertifyOutcome::Indeterminate(_) => EXIT_INDETERMINATE,
    }
}

fn certify(a: &CertifyArgs) -> Result<Report, Failure> {
    let model = load_curve(&a.curve)?;
    let (form, j) = load_form(&a.f, a.j)?;
    let opts = a.solver.options();
    let f = restrict_form(&model, &form, j).map_err(compute)?;
    let dump = |ks: &[(u32, &CertifyOutcome)]| -> Result<(), Failure> {
        let Some(path) = &a.dump_sdp else { return Ok(()) };
        let mut items = Vec::new();
        for (k, o) in ks {
            let p = build_multiplier_problem(&model, &f, j, *k).map_err(compute)?;
            items.push(json!({ "j": j, "k": k, "problem": p, "outcome": o }));
        }
        write_json(path, &Value::Array(items))
    };
    if let Some(k) = a.k {
        let outcome = certify_multiplier(&model, &f, j, k, &opts).map_err(compute)?;
        dump(&[(k, &outcome)])?;
        let summary = describe(k, &outcome);
        let code = outcome_code(&outcome);
        return Ok(Report {
            json: to_value(&SearchEntry { k, outcome }),
            summary,
            code,
        });
    }
    let k_max = match a.kmax {
        Some(m) => m,
        None if model.is_curve() => {
            let b = bound_report(&model).map_err(compute)?;
            u32::try_from(b.k_curve).map_err(compute)?
        }
        None => return Err(usage("--k or --kmax is required for models that are not curves")),
    };
    let table = search_min_multiplier_degree(&model, &f, j, k_max, a.exhaustive, &opts).map_err(compute)?;
    dump(&table.iter().map(|e| (e.k, &e.outcome)).collect::<Vec<_>>())?;
    let min_k = table.iter().find(|e| e.outcome.is_certificate()).map(|e| e.k);
    let code = if min_k.is_some() {
        0
    } else if table.iter().all(|e| e.outcome.is_separator()) {
        EXIT_SEPARATOR
    } else {
        EXIT_INDETERMINATE
    };
    let summary = table
        .iter()
        .map(|e| describe(e.k, &e.outcome))
        .collect::<Vec<_>>()
        .join("\n");
    let json = json!({ "j": j, "k_max": k_max, "min_certified_k": min_k, "entries": table });
    Ok(Report { json, summary, code })
}

fn separator_verify(a: &VerifyArgs) -> Result<Report, Failure> {
    let model = load_curve(&a.curve)?;
    let (form, j) = load_form(&a.f, a.j)?;
    let f = restrict_form(&model, &form, j).map_err(compute)?;
    let v = read_json(&a.witness)?;
    let bad = |e: serde_json::Error| usage(format!("{}: {e}", a.witness.display()));
    let (kind, verdict) = match v.get("outcome").and_then(Value::as_str) {
        Some("certificate") => {
            let cert: MultiplierCertificate = serde_json::from_value(v).map_err(bad)?;
            if cert.j != j {
                return Err(usage(format!("certificate is for j = {}, form has j = {j}", cert.j)));
            }
            ("certificate", verify_certificate(&model, &f, &cert, a.tol))
        }
        Some("separator") | None => {
            let sep: StrictSeparator = serde_json::from_value(v).map_err(bad)?;
            let delta = a.solver.options().delta;
            ("separator", verify_separator(&model, &f, j, &sep, delta))
        }
        Some(other) => return Err(usage(format!("nothing to verify in a `{other}` outcome"))),
    };
    let summary = if verdict.passed {
        format!("{kind} verified")
    } else {
        format!("{kind} rejected: {}", verdict.reasons.join("; "))
    };
    let code = if verdict.passed { 0 } else { EXIT_REJECTED };
    let mut json = to_value(&verdict);
    json["kind"] = Value::from(kind);
    Ok(Report { json, summary, code })
}

fn read_roots(path: &Path) -> Result<Vec<Vec<Rat>>, Failure> {
    let v = read_json(path)?;
    let shape = || usage(format!("{}: expected an array of arrays of rationals", path.display()));
    let edges = v.as_array().ok_or_else(shape)?;
    edges
        .iter()
        .map(|e| {
            e.as_array()
                .ok_or_else(shape)?
                .iter()
                .map(|r| match r {
                    Value::String(s) => parse_rat(s).map_err(|e| usage(e.to_string())),
                    Value::Number(n) => n
                        .as_i64()
                        .map(|i| Rat::from_integer(i.into()))
                        .ok_or_else(|| usage(format!("root {n} must be an integer or a \"p/q\" string"))),
                    _ => Err(shape()),
                })
                .collect()
        })
        .collect()
}

fn harnack(a: &HarnackArgs) -> Result<Report, Failure> {
    let q = parse_polygon(&a.polygon)?;
    let roots = match &a.roots {
        Some(p) => read_roots(p)?,
        None => default_roots(&q, a.t).map_err(|e| usage(e.to_string()))?,
    };
    let spec = HarnackSpec::new(q, a.t, roots).map_err(|e| usage(e.to_string()))?;
    let model = harnack_parametrization(&spec).map_err(compute)?;
    let report = detect_nodes(&model).map_err(compute)?;
    let summary = format!(
        "forms of degree {}: {} solitary, {} crossing, {} complex node pairs (residual {:.2e})",
        model.form_degree(),
        report.count(NodeKind::Solitary),
        report.count(NodeKind::Crossing),
        report.count(NodeKind::Complex),
        report.residual
    );
    if let Some(out) = &a.out {
        write_json(out, &curve_to_json(&CurveModel::Param(model)))?;
    }
    Ok(Report::ok(to_value(&report), summary))
}

#[derive(Serialize)]
struct ToricReport {
    d: u64,
    p_a: u64,
    two_pa_over_d: String,
    r: i64,
}

#[derive(Serialize)]
struct PolygonReport {
    two_area: u64,
    boundary: u64,
    interior: u64,
    smooth: bool,
}

fn polygon(a: &PolygonArgs) -> Result<Report, Failure> {
    let q = parse_polygon(&a.name)?;
    if let Some(j) = a.j {
        let t = toric_curve_invariants(&q, j).map_err(|e| usage(e.to_string()))?;
        let out = ToricReport {
            d: t.d,
            p_a: t.p_a,
            two_pa_over_d: rat_to_string(&t.two_pa_over_d),
            r: t.r,
        };
        let summary = format!("d = {}, p_a = {}, 2p_a/d = {}, r = {}", t.d, t.p_a, out.two_pa_over_d, t.r);
        return Ok(Report::ok(to_value(&out), summary));
    }
    let inv = polygon_invariants(&q);
    let out = PolygonReport {
        two_area: inv.two_area,
        boundary: inv.boundary,
        interior: inv.interior,
        smooth: is_smooth(&q),
    };
    let summary = format!(
        "2·area = {}, {} boundary and {} interior lattice points",
        inv.two_area, inv.boundary, inv.interior
    );
    Ok(Report::ok(to_value(&out), summary))
}

fn pointed(a: &PointedArgs) -> Result<Report, Failure> {
    let model = load_curve(&a.curve)?;
    match check_pointed(&model, a.j, &a.solver.options()) {
        Ok(Pointedness::Pointed {
            functional,
            min_eigenvalue,
        }) => Ok(Report::ok(
            json!({ "pointed": true, "min_eigenvalue": min_eigenvalue, "functional": functional }),
            format!("pointed: catalecticant min eigenvalue {min_eigenvalue:.2e}"),
        )),
        Ok(Pointedness::NotPointed { gram, residual }) => Ok(Report::ok(
            json!({ "pointed": false, "residual": residual, "gram": gram }),
            format!("not pointed: a nonzero sum of squares vanishes (residual {residual:.2e})"),
        )),
        Err(SdpError::Indeterminate(msg)) => Ok(Report {
            json: json!({ "pointed": null, "message": msg }),
            summary: format!("undecided: {msg}"),
            code: EXIT_INDETERMINATE,
        }),
        Err(SdpError::Dimension(msg)) => Err(usage(msg)),
        Err(e) => Err(compute(e)),
    }
}

fn version_text() -> String {
    let o = SdpOptions::default();
    format!(
        "{} (library {})\nsolver defaults: eps_feas = {:e}, eps_gap = {:e}, max_iter = {}, delta = {:e}",
        env!("CARGO_PKG_VERSION"),
        sosdeg::VERSION,
        o.eps_feas,
        o.eps_gap,
        o.max_iter,
        o.delta
    )
}

fn emit(sink: Option<&Path>, v: &Value) -> Result<(), Failure> {
    match sink {
        Some(p) => write_json(p, v),
        None => {
            let text = serde_json::to_string(v).expect("serializable output");
            // a closed pipe downstream is not a failure of the computation
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let matches = match Cli::command().version(version_text()).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match &cli.command {
        Command::Invariants(a) => invariants(a),
        Command::Bound(a) => bound(a),
        Command::Certify(a) => certify(a),
        Command::SeparatorVerify(a) => separator_verify(a),
        Command::Harnack(a) => harnack(a),
        Command::Polygon(a) => polygon(a),
        Command::Pointed(a) => pointed(a),
    };
    let sink = cli.json.as_deref();
    let failure = match result {
        Ok(r) => {
            if !cli.quiet {
                eprintln!("{}", r.summary);
            }
            match emit(sink, &r.json) {
                Ok(()) => return ExitCode::from(r.code),
                Err(f) => f,
            }
        }
        Err(f) => f,
    };
    match failure {
        Failure::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Failure::Compute(msg) => {
            eprintln!("computation failed: {msg}");
            let _ = emit(sink, &json!({ "error": "compute", "message": msg }));
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}
