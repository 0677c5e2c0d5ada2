//! Command-line front end. `run` is pure apart from the returned streams, so
//! the binary and the tests share one code path.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::admissible::{enumerate_admissible, is_nondegenerate, verify_admissible, AdmissibleLabel, LevelData};
use crate::chars::{
    chi_s_transform_check, parse_complex, polar_distance, theta_g_transform_residual, theta_jacobi_transform_residual,
    theta_transform_residual, Characters, EvalPoint, SeriesEval, Truncation,
};
use crate::linalg::{fmt_q, parse_q, vzero, Q};
use crate::rootsys::FiniteRootSystem;
use crate::smatrix::{build_smatrix, label_name, tmatrix, tmatrix_exponents, verify_sl2_relations, SMatrix};
use crate::walg::{
    central_charge_w, check_bijection, check_fkw_factorization, enumerate_wlabels, integrable_fusion, w_fusion,
    FusionTensor, WLabel,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Residual bound for the randomized character check in `verify`.
pub const CHARS_TOL: f64 = 1e-5;

#[derive(Parser, Debug)]
#[command(name = "kacfusion", version, about = "Admissible weights, modular S-matrices and W-algebra fusion rules")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Tolerance for verification residuals.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tol: f64,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Debug, Clone)]
pub struct TypeArg {
    /// Simple type, e.g. `A1`, `G2`, `E8`.
    #[arg(long = "type")]
    pub ty: String,
}

#[derive(Args, Debug, Clone)]
pub struct LevelArgs {
    #[arg(long = "type")]
    pub ty: String,
    /// Coprime pair `p,q` with `k + h∨ = p/q`.
    #[arg(long, conflicts_with = "level", required_unless_present = "level")]
    pub pq: Option<String>,
    /// The level `k` as a rational, e.g. `-1/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub level: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct CharsArgs {
    #[command(flatten)]
    pub level: LevelArgs,
    #[arg(long, default_value = "i")]
    pub tau: String,
    /// Comma-separated fundamental-weight coordinates of `x`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Label index, or `all`.
    #[arg(long, default_value = "all")]
    pub label: String,
    /// Fixed truncation order; by default it is chosen from the tail bound.
    #[arg(long = "N")]
    pub n: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct ThetaArgs {
    #[arg(long = "type", default_value = "A1")]
    pub ty: String,
    #[arg(long, default_value = "i")]
    pub tau: String,
    #[arg(long, default_value = "0.3+0.1i", allow_hyphen_values = true)]
    pub z: String,
    /// Level of the lattice theta functions on the root lattice.
    #[arg(long, default_value_t = 10)]
    pub m: i128,
    #[arg(long = "N")]
    pub n: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct FusionArgs {
    #[command(flatten)]
    pub level: LevelArgs,
    /// Integrable fusion at the nonnegative integer level `--level`.
    #[arg(long)]
    pub integrable: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Root data, lattices and the twisted datum.
    Rootsys(TypeArg),
    /// Admissible labels at a level.
    Enumerate(LevelArgs),
    /// Modular S-matrix on the admissible labels.
    Smatrix {
        #[command(flatten)]
        level: LevelArgs,
        /// Check the SL2(Z) relations; exit 2 on failure.
        #[arg(long)]
        verify: bool,
    },
    /// Diagonal T-matrix.
    Tmatrix(LevelArgs),
    /// SL2 relations, admissibility of every label and a seeded character check.
    Verify {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long, default_value_t = CHARS_TOL)]
        chars_tol: f64,
    },
    /// Normalised characters at one point.
    CharsEval(CharsArgs),
    /// Modular residuals of the Jacobi, lattice and root-product thetas.
    ThetaCheck(ThetaArgs),
    /// W-algebra labels.
    Wlabels(LevelArgs),
    /// Verlinde fusion of the W-algebra.
    Fusion(FusionArgs),
    /// Factorised fusion rules.
    Factorize(LevelArgs),
    #[command(subcommand, hide = true)]
    Chars(CharsCommand),
    #[command(subcommand, hide = true)]
    Walg(WalgCommand),
}

#[derive(Subcommand, Debug)]
pub enum CharsCommand {
    Eval(CharsArgs),
}

#[derive(Subcommand, Debug)]
pub enum WalgCommand {
    Labels(LevelArgs),
    Fusion(FusionArgs),
    Factorize(LevelArgs),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Command output before formatting.
struct Report {
    json: Value,
    csv: Option<String>,
    pretty: Option<String>,
    /// Failed identity, if any.
    failure: Option<String>,
}

impl Report {
    fn plain(json: Value) -> Self {
        Self { json, csv: None, pretty: None, failure: None }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(r) => {
            let stdout = render(&r, cli.format);
            match r.failure {
                None => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
                Some(msg) => Outcome { code: EXIT_VERIFY, stdout, stderr: format!("verification failed: {msg}\n") },
            }
        }
        Err(e @ Error::Hypothesis { .. }) => {
            Outcome { code: EXIT_VERIFY, stdout: String::new(), stderr: format!("{e}\n") }
        }
        Err(e) => Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Parses `args` (program name first) and runs; clap errors map to exit 1.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

fn render(r: &Report, format: Format) -> String {
    let mut s = match format {
        Format::Json => serde_json::to_string_pretty(&r.json).unwrap_or_default(),
        Format::Csv => r.csv.clone().unwrap_or_else(|| flat_csv(&r.json)),
        Format::Pretty => r.pretty.clone().unwrap_or_else(|| serde_json::to_string_pretty(&r.json).unwrap_or_default()),
    };
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// `key,value` rows for the scalar leaves of a JSON object.
fn flat_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), x, out);
                }
            }
            Value::String(s) => {
                let _ = writeln!(out, "{prefix},\"{s}\"");
            }
            other => {
                let _ = writeln!(out, "{prefix},{other}");
            }
        }
    }
    let mut out = String::from("key,value\n");
    walk("", v, &mut out);
    out
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Rootsys(a) => cmd_rootsys(&a.ty),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Smatrix { level, verify } => cmd_smatrix(level, *verify, cli.tol),
        Command::Tmatrix(a) => cmd_tmatrix(a),
        Command::Verify { level, n, chars_tol } => cmd_verify(level, *n, cli.tol, *chars_tol, cli.seed),
        Command::CharsEval(a) | Command::Chars(CharsCommand::Eval(a)) => cmd_chars_eval(a),
        Command::ThetaCheck(a) => cmd_theta_check(a, cli.tol),
        Command::Wlabels(a) | Command::Walg(WalgCommand::Labels(a)) => cmd_wlabels(a),
        Command::Fusion(a) | Command::Walg(WalgCommand::Fusion(a)) => cmd_fusion(a),
        Command::Factorize(a) | Command::Walg(WalgCommand::Factorize(a)) => cmd_factorize(a),
    }
}

pub fn parse_type(s: &str) -> Result<FiniteRootSystem> {
    FiniteRootSystem::from_str_spec(s)
}

/// `"p,q"` as a pair of integers.
pub fn parse_pq(s: &str) -> Result<(i128, i128)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Parse(format!("expected `p,q`, got `{s}`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let p = parts[0].parse().map_err(|_| bad())?;
    let q = parts[1].parse().map_err(|_| bad())?;
    Ok((p, q))
}

pub fn level_data(a: &LevelArgs) -> Result<LevelData> {
    let rs = parse_type(&a.ty)?;
    match (&a.pq, &a.level) {
        (Some(pq), None) => {
            let (p, q) = parse_pq(pq)?;
            LevelData::new(&rs, p, q)
        }
        (None, Some(k)) => LevelData::from_k(&rs, parse_q(k)?),
        _ => Err(Error::Parse("give exactly one of --pq and --level".into())),
    }
}

fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn qss(v: &[Vec<Q>]) -> Vec<Vec<String>> {
    v.iter().map(|x| qs(x)).collect()
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn level_json(ld: &LevelData) -> Value {
    json!({
        "type": ld.rs.spec.to_string(),
        "p": ld.p,
        "q": ld.q,
        "k": fmt_q(&ld.k),
        "variant": ld.variant.to_string(),
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

pub fn label_json(l: &AdmissibleLabel) -> Value {
    json!({
        "lambda_bar": qs(l.lambda_bar()),
        "nu": {"finite": qs(&l.nu.finite), "level": fmt_q(&l.nu.level)},
        "beta": qs(&l.beta),
        "ybar": l.ybar.rows(),
    })
}

/// Root data, marks, special nodes and positive roots as JSON.
pub fn rootsys_json(rs: &FiniteRootSystem) -> Result<Value> {
    let twisted = if rs.is_simply_laced() { Value::Null } else { json!(rs.twisted_datum()?.twisted_type) };
    let n = rs.rank();
    let gram: Vec<Vec<String>> = (0..n).map(|i| qs(rs.gram.row(i))).collect();
    Ok(json!({
        "type": rs.spec.to_string(),
        "rank": n,
        "dim": rs.dim(),
        "cartan": rs.cartan,
        "d": qs(&rs.d),
        "gram": gram,
        "marks": rs.marks,
        "comarks": qs(&rs.comarks),
        "langlands_marks": qs(&rs.langlands_marks),
        "h": rs.h,
        "hvee": rs.hvee,
        "rvee": rs.rvee,
        "theta": qs(&rs.theta),
        "theta_short": qs(&rs.theta_short),
        "rho": qs(&rs.rho),
        "rhovee": qs(&rs.rhovee),
        "j_set": rs.j_set,
        "lj_set": rs.lj_set,
        "twisted_type": twisted,
        "positive_roots": qss(&rs.positive_roots),
        "positive_roots_simple": rs.positive_roots_simple,
    }))
}

fn cmd_rootsys(ty: &str) -> Result<Report> {
    let rs = parse_type(ty)?;
    let n = rs.rank();
    let json = rootsys_json(&rs)?;
    let mut csv = String::from("index,simple_coords,weight_coords\n");
    for (i, (a, b)) in rs.positive_roots_simple.iter().zip(&rs.positive_roots).enumerate() {
        let sc: Vec<String> = a.iter().map(i128::to_string).collect();
        let _ = writeln!(csv, "{i},\"{}\",\"{}\"", sc.join(" "), qs(b).join(" "));
    }
    let mut pretty = String::new();
    let _ = writeln!(pretty, "{}: rank {}, dim {}, |Δ₊| = {}", rs.spec, n, rs.dim(), rs.positive_roots.len());
    let _ = writeln!(pretty, "h = {}, h∨ = {}, r∨ = {}", rs.h, rs.hvee, rs.rvee);
    let _ = writeln!(pretty, "marks {:?}, comarks {:?}", rs.marks, qs(&rs.comarks));
    let _ = writeln!(pretty, "J = {:?}, ᴸJ = {:?}", rs.j_set, rs.lj_set);
    if let Value::String(t) = &json["twisted_type"] {
        let _ = writeln!(pretty, "twisted type {t}");
    }
    Ok(Report { json, csv: Some(csv), pretty: Some(pretty), failure: None })
}

fn cmd_enumerate(a: &LevelArgs) -> Result<Report> {
    let ld = level_data(a)?;
    let labels = enumerate_admissible(&ld)?;
    let nondeg = labels.iter().filter(|l| is_nondegenerate(&ld.rs, l.lambda_bar())).count();
    let json = merge(
        level_json(&ld),
        json!({
            "count": labels.len(),
            "nondegenerate": nondeg,
            "labels": labels.iter().map(label_json).collect::<Vec<_>>(),
        }),
    );
    let mut csv = String::from("index,lambda_bar,nu,beta,nondegenerate\n");
    let mut pretty = format!("{}: {} labels ({} nondegenerate)\n", ld.describe(), labels.len(), nondeg);
    for (i, l) in labels.iter().enumerate() {
        let nd = is_nondegenerate(&ld.rs, l.lambda_bar());
        let _ = writeln!(
            csv,
            "{i},\"{}\",\"{}\",\"{}\",{nd}",
            qs(l.lambda_bar()).join(" "),
            qs(&l.nu.finite).join(" "),
            qs(&l.beta).join(" ")
        );
        let _ = writeln!(
            pretty,
            "{i:>4}  λ̄ = {}  ν̄ = {}  β = {}",
            label_name(l.lambda_bar()),
            label_name(&l.nu.finite),
            label_name(&l.beta)
        );
    }
    Ok(Report { json, csv: Some(csv), pretty: Some(pretty), failure: None })
}

fn matrix_pretty(s: &SMatrix) -> String {
    let mut out = String::new();
    for (i, l) in s.labels.iter().enumerate() {
        let row: Vec<String> = (0..s.dim())
            .map(|j| {
                let z = s.entries[(i, j)];
                format!("{:+.6}{:+.6}i", z.re, z.im)
            })
            .collect();
        let _ = writeln!(out, "{l:>16}  {}", row.join("  "));
    }
    out
}

fn cmd_smatrix(a: &LevelArgs, verify: bool, tol: f64) -> Result<Report> {
    let ld = level_data(a)?;
    let s = build_smatrix(&ld)?;
    let mut json = s.to_json();
    let mut pretty =
        format!("{}: {}×{} {} S-matrix, norm {}\n", ld.describe(), s.dim(), s.dim(), ld.variant, s.norm_const);
    let mut failure = None;
    if verify {
        let t = tmatrix(&ld, &s.admissible);
        let rep = verify_sl2_relations(&s.entries, &t, tol);
        let _ = writeln!(
            pretty,
            "|S−Sᵀ| = {:.3e}, |SS†−1| = {:.3e}, |S⁴−1| = {:.3e}, |(ST)³−S²| = {:.3e}, S² permutation {:.3e}",
            rep.symmetric, rep.unitary, rep.s4, rep.st3, rep.s2_permutation
        );
        if !rep.passed() {
            failure = Some(format!("SL2(Z) relations: max deviation {:.3e} > {tol:e}", rep.max_deviation()));
        }
        json["verification"] = json!({ "passed": rep.passed(), "max_deviation": rep.max_deviation(), "report": rep });
    }
    if s.dim() <= 12 {
        pretty.push_str(&matrix_pretty(&s));
    }
    Ok(Report { json, csv: Some(s.to_csv()), pretty: Some(pretty), failure })
}

fn cmd_tmatrix(a: &LevelArgs) -> Result<Report> {
    let ld = level_data(a)?;
    let labels = enumerate_admissible(&ld)?;
    let ex = tmatrix_exponents(&ld, &labels);
    let names: Vec<String> = labels.iter().map(|l| label_name(l.lambda_bar())).collect();
    let json = merge(level_json(&ld), json!({ "labels": names, "exponents": qs(&ex), "c": fmt_q(&ld.c_k) }));
    let mut csv = String::from("index,label,exponent\n");
    for (i, (n, e)) in names.iter().zip(&ex).enumerate() {
        let _ = writeln!(csv, "{i},\"{n}\",{}", fmt_q(e));
    }
    Ok(Report { json, csv: Some(csv), pretty: None, failure: None })
}

/// Random point with `Im τ ∈ [0.8, 1.25]` and small real `x`, kept away from
/// polar hyperplanes.
fn random_point(rs: &FiniteRootSystem, rng: &mut ChaCha8Rng) -> Result<EvalPoint> {
    for _ in 0..64 {
        let tau = Complex64::new(rng.gen_range(-0.25..0.25), rng.gen_range(0.8..1.25));
        let x: Vec<f64> = (0..rs.rank()).map(|_| rng.gen_range(0.03..0.2)).collect();
        let pt = EvalPoint::real(tau, &x)?;
        if polar_distance(rs, &pt) > 1e-3 && polar_distance(rs, &pt.s_image(rs)) > 1e-3 {
            return Ok(pt);
        }
    }
    Err(Error::InvalidPoint("no sample away from polar hyperplanes".into()))
}

fn cmd_verify(a: &LevelArgs, n: Option<u32>, tol: f64, chars_tol: f64, seed: u64) -> Result<Report> {
    let ld = level_data(a)?;
    let s = build_smatrix(&ld)?;
    let t = tmatrix(&ld, &s.admissible);
    let sl2 = verify_sl2_relations(&s.entries, &t, tol);
    let mut bad_labels = Vec::new();
    for l in &s.admissible {
        if !verify_admissible(&ld, &l.lambda)?.admissible {
            bad_labels.push(label_name(l.lambda_bar()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pt = random_point(&ld.rs, &mut rng)?;
    let trunc = n.map(Truncation::fixed).unwrap_or_default();
    let chi = chi_s_transform_check(&ld, &pt, trunc)?;
    let mut failures = Vec::new();
    if !sl2.passed() {
        failures.push(format!("SL2(Z) relations (max deviation {:.3e})", sl2.max_deviation()));
    }
    if !bad_labels.is_empty() {
        failures.push(format!("admissibility of {}", bad_labels.join(", ")));
    }
    if !(chi.residual < chars_tol) {
        failures.push(format!("character S-transform (residual {:.3e})", chi.residual));
    }
    let json = merge(
        level_json(&ld),
        json!({
            "seed": seed,
            "labels": s.dim(),
            "sl2": { "passed": sl2.passed(), "max_deviation": sl2.max_deviation(), "report": sl2 },
            "admissibility": { "passed": bad_labels.is_empty(), "failures": bad_labels },
            "characters": {
                "passed": chi.residual < chars_tol,
                "tau": cjson(pt.tau),
                "x": pt.x.iter().map(|c| c.re).collect::<Vec<_>>(),
                "residual": chi.residual,
                "max_tail": chi.max_tail,
                "tol": chars_tol,
            },
            "passed": failures.is_empty(),
        }),
    );
    let failure = if failures.is_empty() { None } else { Some(failures.join("; ")) };
    Ok(Report { json, csv: None, pretty: None, failure })
}

fn parse_x(s: &str, rank: usize) -> Result<Vec<Complex64>> {
    let x: Vec<Complex64> = s.split(',').map(|t| parse_complex(t.trim())).collect::<Result<_>>()?;
    if x.len() != rank {
        return Err(Error::DimensionMismatch { expected: rank, got: x.len() });
    }
    Ok(x)
}

fn series_json(label: &str, e: &SeriesEval) -> Value {
    json!({ "label": label, "value": cjson(e.value), "tail_bound": e.tail_bound, "N": e.truncation_order })
}

fn cmd_chars_eval(a: &CharsArgs) -> Result<Report> {
    let ld = level_data(&a.level)?;
    let ch = Characters::new(&ld)?;
    let tau = parse_complex(&a.tau)?;
    let pt = EvalPoint::new(tau, parse_x(&a.x, ld.rs.rank())?)?;
    let trunc = a.n.map(Truncation::fixed).unwrap_or_default();
    let picked: Vec<&AdmissibleLabel> = if a.label == "all" {
        ch.labels.iter().collect()
    } else {
        let i: usize = a.label.parse().map_err(|_| Error::Parse(format!("label index `{}`", a.label)))?;
        vec![ch
            .labels
            .get(i)
            .ok_or_else(|| Error::Parse(format!("label index {i} out of range 0..{}", ch.labels.len())))?]
    };
    let evals: Vec<Value> = picked
        .iter()
        .map(|l| Ok(series_json(&label_name(l.lambda_bar()), &ch.chi(l, &pt, trunc)?)))
        .collect::<Result<_>>()?;
    let json = if evals.len() == 1 {
        evals.into_iter().next().unwrap_or(Value::Null)
    } else {
        merge(level_json(&ld), json!({ "tau": cjson(tau), "values": evals }))
    };
    Ok(Report::plain(json))
}

fn cmd_theta_check(a: &ThetaArgs, tol: f64) -> Result<Report> {
    let rs = parse_type(&a.ty)?;
    let tau = parse_complex(&a.tau)?;
    let z = parse_complex(&a.z)?;
    let trunc = a.n.map(Truncation::fixed).unwrap_or_else(|| Truncation::target(1e-14));
    let jac = theta_jacobi_transform_residual(tau, z, trunc)?;
    let x: Vec<Complex64> = (0..rs.rank()).map(|i| z * (0.5 + 0.25 * i as f64)).collect();
    let pt = EvalPoint::new(tau, x)?;
    let dual = rs.root_lattice.dual(&rs.gram)?;
    let reps = dual.coset_reps(&rs.root_lattice.scaled(a.m))?;
    let mut lat: f64 = 0.0;
    for mu in reps.iter().take(4) {
        lat = lat.max(theta_transform_residual(&rs, &rs.root_lattice, a.m, mu, &pt, trunc)?);
    }
    let zero = vzero(rs.rank());
    lat = lat.max(theta_transform_residual(&rs, &rs.root_lattice, a.m, &zero, &pt, trunc)?);
    let tg = theta_g_transform_residual(&rs, &pt, trunc)?;
    let passed = jac < tol.max(1e-8) && lat < tol.max(1e-6) && tg < tol.max(1e-8);
    let json = json!({
        "type": rs.spec.to_string(),
        "tau": cjson(tau),
        "z": cjson(z),
        "m": a.m,
        "jacobi_residual": jac,
        "lattice_residual": lat,
        "root_product_residual": tg,
        "passed": passed,
    });
    let failure =
        (!passed).then(|| format!("theta transforms: jacobi {jac:.3e}, lattice {lat:.3e}, root product {tg:.3e}"));
    Ok(Report { json, csv: None, pretty: None, failure })
}

fn wlabel_json(l: &WLabel) -> Value {
    json!({ "name": l.name(), "lambda": qs(&l.lam), "lambda_prime": qs(&l.lamprime) })
}

fn cmd_wlabels(a: &LevelArgs) -> Result<Report> {
    let ld = level_data(a)?;
    let labels = enumerate_wlabels(&ld)?;
    let b = check_bijection(&ld)?;
    let json = merge(
        level_json(&ld),
        json!({
            "central_charge": fmt_q(&central_charge_w(&ld)),
            "count": labels.len(),
            "labels": labels.iter().map(wlabel_json).collect::<Vec<_>>(),
            "bijection": b,
        }),
    );
    let mut pretty = format!("{}: {} labels, c = {}\n", ld.describe(), labels.len(), fmt_q(&central_charge_w(&ld)));
    for l in &labels {
        let _ = writeln!(pretty, "  {}", l.name());
    }
    let failure = (!(b.counts_match && b.image_matches))
        .then(|| "W̄ × I_{p,q} does not match the nondegenerate labels".to_string());
    Ok(Report { json, csv: None, pretty: Some(pretty), failure })
}

fn fusion_csv(f: &FusionTensor) -> String {
    let mut out = String::from("a,b,c,N\n");
    let n = f.dim();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = f.get(a, b, c);
                if v != 0 {
                    let _ = writeln!(out, "{a},{b},{c},{v}");
                }
            }
        }
    }
    out
}

fn fusion_pretty(f: &FusionTensor) -> String {
    let mut out = String::new();
    let n = f.dim();
    for a in 0..n {
        for b in a..n {
            let terms: Vec<String> = f
                .product(a, b)
                .into_iter()
                .map(|(c, m)| if m == 1 { f.labels[c].clone() } else { format!("{m}·{}", f.labels[c]) })
                .collect();
            let _ = writeln!(out, "{} × {} = {}", f.labels[a], f.labels[b], terms.join(" + "));
        }
    }
    let _ = writeln!(out, "max rounding error {:.3e}", f.max_rounding_error);
    out
}

fn cmd_fusion(a: &FusionArgs) -> Result<Report> {
    let f = if a.integrable {
        let rs = parse_type(&a.level.ty)?;
        let k = a
            .level
            .level
            .as_deref()
            .ok_or_else(|| Error::Parse("--integrable needs --level".into()))?
            .parse::<i128>()
            .map_err(|_| Error::InvalidLevel("integrable level must be a nonnegative integer".into()))?;
        if k < 0 {
            return Err(Error::InvalidLevel(format!("integrable level {k} is negative")));
        }
        integrable_fusion(&rs, k)?.1
    } else {
        w_fusion(&level_data(&a.level)?)?.1
    };
    Ok(Report { json: f.to_json(), csv: Some(fusion_csv(&f)), pretty: Some(fusion_pretty(&f)), failure: None })
}

fn cmd_factorize(a: &LevelArgs) -> Result<Report> {
    let ld = level_data(a)?;
    let r = check_fkw_factorization(&ld)?;
    let json = serde_json::to_value(&r).map_err(|e| Error::Inconsistent(e.to_string()))?;
    let pretty = format!(
        "{}: {} labels, {} mismatching entries, {}\n",
        ld.describe(),
        r.labels.len(),
        r.mismatches,
        if r.passed { "PASS" } else { "FAIL" }
    );
    let failure = (!r.passed).then(|| format!("factorised fusion rules: {} mismatches", r.mismatches));
    Ok(Report { json, csv: None, pretty: Some(pretty), failure })
}
