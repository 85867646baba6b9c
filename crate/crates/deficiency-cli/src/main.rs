mod report;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use deficiency::classical::{build_classical, power_expansion, Classical, ExpansionFamily};
use deficiency::expr::{apply_repeated, parse_test_function};
use deficiency::index::{polynomial_indices, power_indices, product_defect, DefectPair};
use deficiency::params::{parse_call, Param};
use deficiency::pde::decompose;
use deficiency::poly::{epsilon_safe, find_roots, halfplane_counts, perturbed_roots, RealPolynomial, Sign};
use deficiency::stirling::{jacobi_stirling_approx, to_f64, Family, StirlingTable};
use deficiency::verify::{self, Tolerances};
use deficiency::weyl::{deficiency_indices_at, Controls};
use num_complex::Complex64;
use report::{sig6, table, to_json, RunReport};
use serde_json::{json, Value};

/// Deficiency indices of operator powers and polynomials, with numerical
/// Weyl classification of the classical Sturm-Liouville expressions.
#[derive(Parser, Debug)]
#[command(name = "deficiency", version)]
struct Cli {
    /// Emit the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to `<dir>/<command>.json`.
    #[arg(long, global = true, env = "DEFICIENCY_REPORT_DIR", value_name = "DIR")]
    report_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Indices of a power, a real polynomial or a product.
    Indices(IndicesArgs),
    /// Roots of P and the half-plane split of the roots of P -/+ i eps.
    Roots(RootsArgs),
    /// Stirling-type numbers as exact fractions.
    Stirling(StirlingArgs),
    /// Lagrangian symmetric form of the m-th power of a classical expression.
    Expand(ExpandArgs),
    /// Evaluate an expression (or its power) on a test function.
    Apply(ApplyArgs),
    /// Weyl classification of both endpoints and the deficiency indices.
    Classify(ClassifyArgs),
    /// Channel decomposition of the Bessel-type partial differential operator.
    Pde(PdeArgs),
    /// Run the reproduction suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct IndicesArgs {
    /// Deficiency indices `a,b` of the operator (`inf` allowed).
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    pair: DefectPair,
    #[command(flatten)]
    operation: Operation,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Operation {
    /// Indices of the m-th power.
    #[arg(long, value_name = "M", value_parser = clap::value_parser!(u64).range(1..))]
    power: Option<u64>,
    /// Indices of P(S) for coefficients `a0,a1,…,am`.
    #[arg(long, value_name = "A0,A1,...", allow_hyphen_values = true)]
    poly: Option<RealPolynomial>,
    /// Defect numbers at a common point of regularity of the product with an
    /// operator whose defect numbers are `c,d` (or `c` for both).
    #[arg(long, value_name = "C,D")]
    product: Option<String>,
}

#[derive(Args, Debug)]
struct RootsArgs {
    /// Coefficients `a0,a1,…,am` of P.
    #[arg(long, value_name = "A0,A1,...", allow_hyphen_values = true)]
    poly: RealPolynomial,
    /// Perturbation size; defaults to the validated safe value.
    #[arg(long)]
    eps: Option<f64>,
    /// Safety factor of the default perturbation size.
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
}

#[derive(Args, Debug)]
struct StirlingArgs {
    /// `classical`, `legendre` or `jacobi(alpha,beta)`.
    #[arg(long, default_value = "classical")]
    family: String,
    /// Largest first index.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=200))]
    m: u32,
    /// Only the entries with this second index.
    #[arg(long)]
    j: Option<u32>,
    /// Print decimals instead of fractions.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    /// `legendre`, `laguerre(a)`, `hermite` or `jacobi(a,b)`.
    #[arg(long)]
    family: ExpansionFamily,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=40))]
    m: u32,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    /// Expression name, for instance `bessel_alpha(sqrt(33)/2)`.
    #[arg(long)]
    expr: Classical,
    /// Test function: `x^k`, `(1-x)^b`, `poly(a0,…)`, `log_one_minus_x(b,k)`.
    #[arg(long = "fn", value_name = "FUNCTION")]
    function: String,
    /// Comma-separated sample points.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    x: Vec<f64>,
    /// Apply the expression this many times.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=8))]
    times: u32,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Expression name, for instance `laguerre(1/2)` or `bessel_channel(3,1,1,0)`.
    expr: Classical,
    /// Spectral parameter `re,im` with nonzero imaginary part.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    z: String,
}

#[derive(Args, Debug)]
struct PdeArgs {
    /// Space dimension n.
    #[arg(long)]
    dim: u32,
    /// Angular cutoff L.
    #[arg(long = "L")]
    big_l: u32,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    alpha: Param,
    /// Largest power in the power table.
    #[arg(long, default_value_t = 1)]
    m: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Only claims whose id contains this text.
    #[arg(long)]
    filter: Option<String>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long, value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

struct Outcome {
    report: RunReport,
    text: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let json = to_json(&outcome.report);
    if let Some(dir) = &cli.report_dir {
        let path = dir.join(format!("{}.json", outcome.report.command));
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, &json)) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    print!("{}", if cli.json { &json } else { &outcome.text });
    ExitCode::from(outcome.report.exit_status as u8)
}

type Failure = Box<dyn std::error::Error>;

fn run(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Indices(a) => indices(a),
        Command::Roots(a) => roots(a),
        Command::Stirling(a) => stirling(a),
        Command::Expand(a) => expand(a),
        Command::Apply(a) => apply_cmd(a),
        Command::Classify(a) => classify(a),
        Command::Pde(a) => pde(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn plain(command: &str, parameters: Value, results: Value, text: String) -> Outcome {
    Outcome { report: RunReport::new(command, parameters, results, Vec::new()), text }
}

fn parse_pair_or_count(s: &str) -> Result<DefectPair, Failure> {
    if s.contains(',') {
        Ok(s.parse()?)
    } else {
        let d = s.trim().parse()?;
        Ok(DefectPair::new(d, d))
    }
}

fn indices(a: &IndicesArgs) -> Result<Outcome, Failure> {
    let op = &a.operation;
    let (operation, result) = if let Some(m) = op.power {
        (json!({"power": m}), power_indices(a.pair, m)?)
    } else if let Some(p) = &op.poly {
        (json!({"poly": p.coefficients()}), polynomial_indices(a.pair, p)?)
    } else {
        let other = parse_pair_or_count(op.product.as_deref().unwrap_or_default())?;
        let r =
            DefectPair::new(product_defect(a.pair.n_plus, other.n_plus), product_defect(a.pair.n_minus, other.n_minus));
        (json!({"product": other.to_string()}), r)
    };
    let parameters = json!({"pair": a.pair.to_string(), "operation": operation});
    let results = json!({"indices": result.to_string(), "n_plus": result.n_plus.to_string(), "n_minus": result.n_minus.to_string()});
    Ok(plain("indices", parameters, results, format!("{result}\n")))
}

fn half_plane(z: Complex64) -> &'static str {
    if z.im > 0.0 {
        "upper"
    } else if z.im < 0.0 {
        "lower"
    } else {
        "axis"
    }
}

fn roots(a: &RootsArgs) -> Result<Outcome, Failure> {
    let p = &a.poly;
    let base = find_roots(p, 1e-12)?;
    let eps = match a.eps {
        Some(e) => e,
        None => epsilon_safe(p, a.rho)?,
    };
    let mut text = format!("P = {p}\n\n");
    let rows: Vec<Vec<String>> = base.roots.iter().map(|z| vec![sig6(z.re), sig6(z.im)]).collect();
    text += &table(&["re", "im"], &rows);
    let mut shifted = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let counts = halfplane_counts(p, eps, sign)?;
        let r = perturbed_roots(p, eps, sign)?;
        let label = match sign {
            Sign::Plus => "P - i eps",
            Sign::Minus => "P + i eps",
        };
        let _ = writeln!(
            text,
            "\n{label}, eps = {}: {} upper, {} lower, {} on axis",
            sig6(eps),
            counts.in_upper,
            counts.in_lower,
            counts.on_axis
        );
        let rows: Vec<Vec<String>> =
            r.roots.iter().map(|z| vec![sig6(z.re), sig6(z.im), half_plane(*z).into()]).collect();
        text += &table(&["re", "im", "half-plane"], &rows);
        shifted.push(json!({
            "sign": sign,
            "counts": counts,
            "roots": r.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        }));
    }
    let parameters = json!({"poly": p.coefficients(), "eps": eps, "rho": a.rho});
    let results = json!({
        "roots": base.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "residual_bound": base.residual_bound,
        "perturbed": shifted,
    });
    Ok(plain("roots", parameters, results, text))
}

fn stirling(a: &StirlingArgs) -> Result<Outcome, Failure> {
    let (name, params) = parse_call(&a.family)?;
    let exact = |p: &Param| p.exact.clone();
    let family = match (name.as_str(), params.as_slice()) {
        ("classical", []) => Some(Family::Classical),
        ("legendre", []) => Some(Family::Legendre),
        ("jacobi", [x, y]) => match (exact(x), exact(y)) {
            (Some(alpha), Some(beta)) => Some(Family::Jacobi { alpha, beta }),
            _ => None,
        },
        _ => return Err(format!("unknown family `{}`", a.family).into()),
    };
    let in_range = |m: u32, j: u32| j <= m && a.j.is_none_or(|k| k == j);
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    match family {
        Some(f) => {
            let t = StirlingTable::build(f, a.m)?;
            for ((m, j), v) in t.entries() {
                if in_range(*m, *j) {
                    let shown = if a.decimal { sig6(to_f64(v)) } else { v.to_string() };
                    rows.push(vec![m.to_string(), j.to_string(), shown]);
                    entries.push(json!({"m": m, "j": j, "value": v.to_string(), "decimal": to_f64(v), "exact": true}));
                }
            }
        }
        None => {
            let (x, y) = (params[0].value, params[1].value);
            for m in 1..=a.m {
                for j in 1..=m {
                    if in_range(m, j) {
                        let v = jacobi_stirling_approx(m, j, x, y)?;
                        rows.push(vec![m.to_string(), j.to_string(), format!("~{}", sig6(v.value))]);
                        entries.push(json!({"m": m, "j": j, "decimal": v.value, "exact": false}));
                    }
                }
            }
        }
    }
    let parameters = json!({"family": a.family, "m": a.m, "j": a.j, "decimal": a.decimal});
    Ok(plain("stirling", parameters, json!({"entries": entries}), table(&["m", "j", "value"], &rows)))
}

fn expand(a: &ExpandArgs) -> Result<Outcome, Failure> {
    let e = power_expansion(&a.family, a.m)?;
    let mut text = format!("({})^{} = w^-1 sum_j (-1)^j c_j D^j W_j D^j,  w = {}\n\n", a.family, a.m, e.weight);
    let rows: Vec<Vec<String>> =
        e.terms.iter().map(|t| vec![t.j.to_string(), t.coefficient.to_string(), t.weight_power.to_string()]).collect();
    text += &table(&["j", "c_j", "W_j"], &rows);
    let parameters = json!({"family": a.family.to_string(), "m": a.m});
    Ok(plain("expand", parameters, serde_json::to_value(&e)?, text))
}

fn apply_cmd(a: &ApplyArgs) -> Result<Outcome, Failure> {
    let e = build_classical(&a.expr)?;
    let u = parse_test_function(&a.function)?;
    let values = apply_repeated(&e, &u, a.times as usize, &a.x)?;
    let rows: Vec<Vec<String>> = a.x.iter().zip(&values).map(|(x, v)| vec![sig6(*x), sig6(*v)]).collect();
    let text = format!("{}^{} applied to {}\n\n{}", a.expr, a.times, u.label(), table(&["x", "value"], &rows));
    let parameters = json!({"expr": a.expr.to_string(), "function": a.function, "times": a.times, "x": a.x});
    Ok(plain("apply", parameters, json!({"values": values}), text))
}

fn parse_z(s: &str) -> Result<Complex64, Failure> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let z = Complex64::new(re.trim().parse()?, im.trim().parse()?);
    if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(format!("z must be finite and non-real, got {s}").into());
    }
    Ok(z)
}

fn classify(a: &ClassifyArgs) -> Result<Outcome, Failure> {
    let z = parse_z(&a.z)?;
    let e = build_classical(&a.expr)?;
    let r = deficiency_indices_at(&e, z, &Controls::default())?;
    let mut rows = Vec::new();
    for c in [&r.left, &r.right] {
        let evidence = c
            .evidence
            .first()
            .map(|v| format!("rate {} +/- {}", sig6(v.fit.rate), sig6(v.fit.half_width)))
            .unwrap_or_else(|| "regular".into());
        rows.push(vec![
            format!("{:?}", c.side).to_lowercase(),
            sig6(c.endpoint.location),
            serde_json::to_value(c.kind)?.as_str().unwrap_or_default().to_string(),
            c.l2_solution_count.to_string(),
            evidence,
        ]);
    }
    let text = format!(
        "{} at z = {}\n\n{}\nindices {}  (d_a = {}, d_b = {}, order {})\n",
        a.expr,
        a.z,
        table(&["side", "endpoint", "verdict", "d", "evidence"], &rows),
        r.indices,
        r.left.l2_solution_count,
        r.right.l2_solution_count,
        2 * e.n()
    );
    let results = json!({
        "indices": r.indices.to_string(),
        "d_a": r.left.l2_solution_count,
        "d_b": r.right.l2_solution_count,
        "report": serde_json::to_value(&r)?,
    });
    Ok(plain("classify", json!({"expr": a.expr.to_string(), "z": [z.re, z.im]}), results, text))
}

fn pde(a: &PdeArgs) -> Result<Outcome, Failure> {
    let r = decompose(a.dim, a.big_l, a.alpha.clone(), a.m)?;
    let rows: Vec<Vec<String>> =
        r.channels.iter().map(|c| vec![c.l.to_string(), c.coefficient.to_string(), c.indices.to_string()]).collect();
    let mut text = format!("n = {}, L = {}, alpha = {}\n\n", a.dim, a.big_l, a.alpha);
    text += &table(&["l", "coefficient", "indices"], &rows);
    let _ = writeln!(text, "l >= {}: (0,0) each\n\ntotal {}", r.tail_from, r.total);
    for (m, p) in &r.powers {
        let _ = writeln!(text, "power {m}: {p}");
    }
    let parameters = json!({"dim": a.dim, "L": a.big_l, "alpha": a.alpha.to_string(), "m": a.m});
    Ok(plain("pde", parameters, serde_json::to_value(&r)?, text))
}

fn verify_cmd(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let mut tol = Tolerances::default();
    for t in &a.tol {
        let (name, value) = t.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{t}`"))?;
        tol.set(name.trim(), value.trim().parse()?)?;
    }
    let checks = verify::run(a.filter.as_deref(), tol);
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut text = if checks.is_empty() {
        String::new()
    } else {
        let rows: Vec<Vec<String>> = checks
            .iter()
            .map(|c| {
                vec![
                    c.claim.clone(),
                    c.case.clone(),
                    c.expected.clone(),
                    c.observed.clone(),
                    if c.pass { "pass" } else { "FAIL" }.into(),
                ]
            })
            .collect();
        table(&["claim", "case", "expected", "observed", "result"], &rows) + "\n"
    };
    if checks.is_empty() {
        text += "0 checks: no claim matches the filter\n";
    } else {
        let _ = writeln!(text, "{} checks, {} passed, {failed} failed", checks.len(), checks.len() - failed);
    }
    let parameters = json!({"filter": a.filter, "tolerances": tol});
    let results = json!({"total": checks.len(), "failed": failed});
    Ok(Outcome { report: RunReport::new("verify", parameters, results, checks), text })
}
