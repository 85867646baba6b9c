//! Acceptance criteria 1–10: one line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use deficiency::classical::build_classical;
use deficiency::index::{power_indices, DefectPair};
use deficiency::verify::{run, Check, Tolerances};
use deficiency::weyl::{deficiency_indices_minimal, Controls, DeficiencyReport};

const TOLERANCES: Tolerances =
    Tolerances { mfold: 1e-8, compose: 1e-12, transport: 1e-6, endpoint_map: 1e-10, solution: 1e-10 };

const MAX_CI_WIDTH: f64 = 0.2;

type TableResults = Vec<(&'static str, u64, Result<DefectPair, String>)>;
type Criterion = Box<dyn FnOnce(&mut TableResults) -> Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_checks(checks: &[Check], expected_count: usize) -> Outcome {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    let mut detail = format!("{} checks, {} failed", checks.len(), failed.len());
    for c in failed.iter().take(3) {
        detail += &format!("; {} [{}]: expected {}, observed {}", c.claim, c.case, c.expected, c.observed);
    }
    if checks.len() < expected_count {
        detail += &format!("; expected at least {expected_count} checks");
    }
    Outcome { pass: failed.is_empty() && checks.len() >= expected_count, detail }
}

fn claims(ids: &[&str], expected_count: usize) -> Outcome {
    let checks: Vec<Check> = ids.iter().flat_map(|id| run(Some(id), TOLERANCES)).collect();
    from_checks(&checks, expected_count)
}

fn within(limit: Duration, mut o: Outcome, took: Duration) -> Outcome {
    if took > limit {
        o.pass = false;
        o.detail += &format!("; runtime {took:.2?} exceeds {limit:?}");
    }
    o
}

/// `(name, n)` with displayed indices `(n, n)`.
fn table() -> Vec<(&'static str, u64)> {
    vec![
        ("legendre", 2),
        ("hermite", 0),
        ("laguerre(-1/2)", 1),
        ("laguerre(0)", 1),
        ("laguerre(1/2)", 1),
        ("laguerre(1)", 0),
        ("laguerre(2)", 0),
        ("bessel_gamma(0)", 1),
        ("bessel_gamma(1/2)", 1),
        ("bessel_gamma(0.99)", 1),
        ("bessel_gamma(1)", 0),
        ("bessel_gamma(2)", 0),
        ("jacobi(-1/2,-1/2)", 2),
        ("jacobi(-1/2,1/2)", 2),
        ("jacobi(-1/2,2)", 1),
        ("jacobi(1/2,-1/2)", 2),
        ("jacobi(1/2,1/2)", 2),
        ("jacobi(1/2,2)", 1),
        ("jacobi(2,-1/2)", 1),
        ("jacobi(2,1/2)", 1),
        ("jacobi(2,2)", 0),
    ]
}

fn widest_interval(r: &DeficiencyReport) -> f64 {
    [&r.left, &r.right].iter().flat_map(|c| c.evidence.iter()).map(|v| v.fit.ci_width()).fold(0.0, f64::max)
}

fn index_tables(results: &mut TableResults) -> Outcome {
    let controls = Controls::default();
    let mut bad = Vec::new();
    for (name, n) in table() {
        let r = build_classical(&name.parse().expect("catalog name"))
            .map_err(|e| e.to_string())
            .and_then(|e| deficiency_indices_minimal(&e, &controls).map_err(|e| e.to_string()));
        let observed = match &r {
            Ok(report) => {
                let w = widest_interval(report);
                if w >= MAX_CI_WIDTH {
                    bad.push(format!("{name}: confidence width {w:.3}"));
                }
                Ok(report.indices)
            }
            Err(e) => Err(e.clone()),
        };
        match &observed {
            Ok(p) if *p == DefectPair::finite(n, n) => {}
            Ok(p) => bad.push(format!("{name}: {p}, expected ({n},{n})")),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
        results.push((name, n, observed));
    }
    Outcome { pass: bad.is_empty(), detail: format!("{} expressions; {}", table().len(), summary(&bad)) }
}

fn summary(bad: &[String]) -> String {
    if bad.is_empty() {
        "all exact".into()
    } else {
        format!("{} mismatches: {}", bad.len(), bad.join("; "))
    }
}

/// Displayed m-th power indices: `2m` Legendre, `m` or `0` Laguerre and
/// Bessel, `0` Hermite, `{0, m, 2m}` Jacobi.
fn displayed_power(name: &str, m: u64) -> u64 {
    let below_one = |s: &str| s.starts_with('-') || s.starts_with("0") || s.starts_with("1/2");
    let args = |s: &str| s.split_once('(').map(|(_, r)| r.trim_end_matches(')').to_string()).unwrap_or_default();
    match name.split('(').next().unwrap() {
        "legendre" => 2 * m,
        "hermite" => 0,
        "laguerre" | "bessel_gamma" => {
            if below_one(&args(name)) {
                m
            } else {
                0
            }
        }
        "jacobi" => {
            let a = args(name);
            let (x, y) = a.split_once(',').unwrap();
            m * (below_one(x) as u64 + below_one(y) as u64)
        }
        other => panic!("no displayed powers for {other}"),
    }
}

fn power_formulas(results: &[(&'static str, u64, Result<DefectPair, String>)]) -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for (name, _, observed) in results {
        let Ok(base) = observed else {
            bad.push(format!("{name}: no base indices"));
            continue;
        };
        for m in 1..=5 {
            count += 1;
            let want = displayed_power(name, m);
            match power_indices(*base, m) {
                Ok(p) if p == DefectPair::finite(want, want) => {}
                Ok(p) => bad.push(format!("{name} m={m}: {p}, expected ({want},{want})")),
                Err(e) => bad.push(format!("{name} m={m}: {e}")),
            }
        }
    }
    for n in [1u64, 2] {
        for m in 1..=5 {
            count += 1;
            let p = power_indices(DefectPair::finite(2 * n, 2 * n), m).expect("finite");
            if p != DefectPair::finite(2 * m * n, 2 * m * n) {
                bad.push(format!("limit circle order {} m={m}: {p}", 2 * n));
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{count} cases; {}", summary(&bad)) }
}

fn main() -> ExitCode {
    let mut table_results = Vec::new();
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "limit-3 kernel counts",
            Box::new(|_| {
                let t = Instant::now();
                let o = claims(&["limit3"], 12);
                within(Duration::from_secs(1), o, t.elapsed())
            }),
        ),
        (
            "index tables",
            Box::new(|r| {
                let t = Instant::now();
                let o = index_tables(r);
                within(Duration::from_secs(60), o, t.elapsed())
            }),
        ),
        ("power formulas", Box::new(|r| power_formulas(r))),
        (
            "half-plane root counts and root shift",
            Box::new(|_| {
                let t = Instant::now();
                let o = claims(&["halfplane-counts", "root-shift"], 400);
                within(Duration::from_secs(30), o, t.elapsed())
            }),
        ),
        ("Stirling oracles", Box::new(|_| claims(&["stirling-recurrence", "jacobi-stirling-legendre"], 4))),
        (
            "m-fold operator oracle",
            Box::new(|_| {
                let t = Instant::now();
                let o = claims(&["mfold-oracle"], 18);
                within(Duration::from_secs(10), o, t.elapsed())
            }),
        ),
        ("composition identity", Box::new(|_| claims(&["compose-square"], 4))),
        ("Liouville-Green transport", Box::new(|_| claims(&["liouville-green"], 6))),
        (
            "PDE decomposition and channels",
            Box::new(|_| claims(&["pde-decomposition", "channel-crossval", "dirichlet"], 19)),
        ),
        ("solution facts", Box::new(|_| claims(&["solution-facts"], 6))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let o = f(&mut table_results);
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<40} {}  ({:.2?}) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed(),
            o.detail
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
