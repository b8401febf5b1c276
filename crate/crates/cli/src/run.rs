use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use leech_poincare::analytic::{
    coeff_csv, fourier_coeff, fourier_poincare_table, CoeffTable, FourierMethod,
};
use leech_poincare::geometry::{direct_poincare, Lorentz, SliceParams};
use leech_poincare::lattice::cache::Cache;
use leech_poincare::lattice::{e8, ii11, leech, short_vectors, GramLattice, LatticeVector, RealVector};
use leech_poincare::report::{rel_diff, EvalResult, TruncationPolicy};
use leech_poincare::sums::{
    dirichlet_j_partial, gauss_theta_brute, gauss_theta_closed_odd, hensel_fiber_check, j_brute, j_closed,
    jordan_totient, kloosterman,
};
use leech_poincare::verify::{generic_point, run_all, run_suite, SuiteReport, VerifyOptions};
use leech_poincare::{Complex64, Error, Result};

use crate::args::*;
use crate::envelope::{complex, envelope, to_csv, Outcome, Status};

/// Runs the command and prints its envelope; returns the exit code.
pub fn execute(cli: Cli) -> u8 {
    if cli.deterministic {
        std::env::set_var("RAYON_NUM_THREADS", "1");
    }
    let (op, params) = describe(&cli.command);
    let format = cli.format;
    let max_seconds = cli.max_seconds;
    if !(max_seconds > 0.0) || cli.max_cosets == 0 || cli.max_points == 0 {
        return finish(&op, &params, usage_outcome("budgets must be positive"), 0.0, format);
    }
    let start = Instant::now();
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(dispatch(&cli));
    });
    let outcome = match rx.recv_timeout(Duration::from_secs_f64(max_seconds)) {
        Ok(Ok(out)) => out,
        Ok(Err(e)) => error_outcome(&e),
        Err(mpsc::RecvTimeoutError::Disconnected) => Outcome::new(Value::Null)
            .status(Status::Error)
            .diagnostics(json!({ "error": "internal error: worker stopped without a result", "kind": "internal", "exitCode": 1 })),
        Err(mpsc::RecvTimeoutError::Timeout) => Outcome::new(Value::Null).status(Status::Partial).diagnostics(json!({
            "reason": "time budget exceeded",
            "elapsedSeconds": start.elapsed().as_secs_f64(),
            "tail": { "estimate": null, "kind": "no-tail-bound", "remaining": "stopped at the time budget" },
        })),
    };
    let code = finish(&op, &params, outcome, start.elapsed().as_secs_f64() * 1e3, format);
    // a timed-out worker may still be running
    std::process::exit(code as i32);
}

fn finish(op: &str, params: &Value, out: Outcome, runtime_ms: f64, format: Format) -> u8 {
    match format {
        Format::Json => println!("{}", envelope(op, params, &out, runtime_ms)),
        Format::Csv => print!("{}", to_csv(op, &out)),
    }
    if out.status == Status::Error {
        if let Some(msg) = out.diagnostics.get("error").and_then(Value::as_str) {
            eprintln!("poincare: {msg}");
        }
    }
    match (out.status, out.diagnostics.get("exitCode").and_then(Value::as_u64)) {
        (Status::Ok, _) => 0,
        (Status::Partial, _) => 3,
        (Status::Error, Some(c)) => c as u8,
        (Status::Error, None) => 1,
    }
}

fn usage_outcome(msg: &str) -> Outcome {
    Outcome::new(Value::Null)
        .status(Status::Error)
        .diagnostics(json!({ "error": msg, "kind": "usage", "exitCode": 2 }))
}

fn error_outcome(e: &Error) -> Outcome {
    match e {
        Error::Usage(_) => usage_outcome(&e.to_string()),
        Error::Resource { processed, required, .. } => Outcome::new(Value::Null).status(Status::Partial).diagnostics(json!({
            "error": e.to_string(),
            "kind": "resource",
            "processed": processed,
            "required": required,
            "tail": {
                "estimate": null,
                "kind": "no-tail-bound",
                "remaining": "enumeration stopped at the budget; rerun with a larger budget",
            },
        })),
        _ => Outcome::new(Value::Null)
            .status(Status::Error)
            .diagnostics(json!({ "error": e.to_string(), "kind": "internal", "exitCode": 1 })),
    }
}

/// Operation name and parameters as they appear in the envelope.
fn describe(cmd: &Command) -> (String, Value) {
    let (op, params) = match cmd {
        Command::Lattice(LatticeCmd::Info(l)) => ("lattice.info", json!({ "lattice": l.lattice })),
        Command::Lattice(LatticeCmd::Certify(l)) => ("lattice.certify", json!({ "lattice": l.lattice })),
        Command::Sums(s) => match s {
            SumsCmd::Kloosterman { a, b, n } => ("sums.kloosterman", json!({ "a": a, "b": b, "n": n })),
            SumsCmd::Jordan { k, n } => ("sums.jordan", json!({ "k": k, "n": n })),
            SumsCmd::Theta { lattice, q, c, method } => (
                "sums.theta",
                json!({ "lattice": lattice.lattice, "q": q, "c": c, "method": format!("{method:?}").to_lowercase() }),
            ),
            SumsCmd::J { lattice, lambda, n, d, method } => (
                "sums.j",
                json!({ "lattice": lattice.lattice, "lambda": lambda, "n": n, "d": d, "method": format!("{method:?}").to_lowercase() }),
            ),
            SumsCmd::Dirichlet { lattice, lambda, s, cutoff, exclude } => (
                "sums.dirichlet",
                json!({ "lattice": lattice.lattice, "lambda": lambda, "s": s, "cutoff": cutoff, "exclude": exclude }),
            ),
            SumsCmd::Hensel { lattice, p, q, d } => {
                ("sums.hensel", json!({ "lattice": lattice.lattice, "p": p, "q": q, "d": d }))
            }
        },
        Command::Geometry(GeometryCmd::Roots { n, center, radius_sq, .. }) => {
            ("geometry.roots", json!({ "n": n, "center": center, "radiusSq": radius_sq }))
        }
        Command::Geometry(GeometryCmd::Chamber { slice, v, radius_sq }) => (
            "geometry.chamber",
            json!({ "k": slice.k, "h": slice.h, "v": v, "radiusSq": radius_sq }),
        ),
        Command::Poincare(PoincareCmd::Coeff { slice, s, lambda, n_max }) => (
            "poincare.coeff",
            json!({ "k": slice.k, "h": slice.h, "s": s, "lambda": lambda, "nMax": n_max }),
        ),
        Command::Poincare(PoincareCmd::Eval { slice, s, v, method, policy }) => (
            "poincare.eval",
            json!({
                "k": slice.k, "h": slice.h, "s": s, "v": v,
                "method": format!("{method:?}").to_lowercase(),
                "nMax": policy.n_max, "tol": policy.tol, "lambdaRadiusSq": policy.lambda_radius_sq,
            }),
        ),
        Command::Verify(v) => ("verify", json!({ "suite": v.suite, "lattice": v.lattice, "qmax": v.qmax })),
        Command::Cache(c) => (
            match c {
                CacheCmd::List => "cache.list",
                CacheCmd::Clear => "cache.clear",
                CacheCmd::Verify => "cache.verify",
            },
            json!({}),
        ),
    };
    (op.to_string(), params)
}

fn lattice_by_name(name: &str) -> Result<GramLattice> {
    match name.to_ascii_lowercase().as_str() {
        "e8" => Ok(e8().clone()),
        "ii11" => Ok(ii11().clone()),
        "leech" => Ok(leech().clone()),
        "e8+ii11" => e8().direct_sum(ii11()),
        other => Err(Error::Usage(format!("unknown lattice {other}; expected e8, ii11, leech or e8+ii11"))),
    }
}

fn parse_lattice_vector(lattice: &GramLattice, text: &str) -> Result<LatticeVector> {
    if text.trim() == "0" {
        return Ok(lattice.zero());
    }
    let coords = text
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| Error::Usage(format!("bad coordinate {x:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    lattice.vector(coords)
}

fn parse_point(text: &str) -> Result<RealVector> {
    let l = leech();
    match text.trim() {
        "0" => l.real_vector(vec![0.0; 24]),
        "generic" => Ok(generic_point()),
        t => {
            let coords = t
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Usage(format!("bad coordinate {x:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            l.real_vector(coords)
        }
    }
}

fn parse_s(text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| Error::Usage(format!("bad value of s {x:?}: {e}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Usage(format!("s must be `re` or `re,im`, got {text:?}"))),
    }
}

fn cache_of(cli: &Cli) -> Cache {
    Cache::from_env_or(cli.cache_dir.as_deref())
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let budget = cli.max_cosets;
    match &cli.command {
        Command::Lattice(cmd) => lattice_cmd(cli, cmd),
        Command::Sums(cmd) => sums_cmd(cmd, budget),
        Command::Geometry(cmd) => geometry_cmd(cmd, cli.max_points),
        Command::Poincare(cmd) => poincare_cmd(cli, cmd, cli.max_points),
        Command::Verify(v) => {
            let opts = VerifyOptions { lattice: v.lattice.clone(), qmax: v.qmax, budget: budget.max(1 << 26) };
            let reports: Vec<SuiteReport> =
                if v.suite == "all" { run_all(&opts)? } else { vec![run_suite(&v.suite, &opts)?] };
            let passed = reports.iter().all(|r| r.passed);
            let mut csv = String::from("suite,criterion,passed,checks\n");
            for r in &reports {
                csv.push_str(&format!("{},{},{},{}\n", r.suite, r.criterion, r.passed, r.checks.len()));
            }
            let status = if passed { Status::Ok } else { Status::Error };
            let diag = if passed {
                json!({})
            } else {
                json!({ "error": "some checks failed", "kind": "integrity", "exitCode": 1 })
            };
            Ok(Outcome::new(serde_json::to_value(&reports)?).status(status).diagnostics(diag).csv(csv))
        }
        Command::Cache(cmd) => {
            let cache = cache_of(cli);
            match cmd {
                CacheCmd::List => Ok(Outcome::new(serde_json::to_value(cache.list()?)?)),
                CacheCmd::Clear => Ok(Outcome::new(json!({ "removed": cache.clear()? }))),
                CacheCmd::Verify => {
                    let entries = cache.verify()?;
                    let bad = entries.iter().filter(|e| !e.ok).count();
                    let out = Outcome::new(serde_json::to_value(&entries)?);
                    Ok(if bad == 0 {
                        out
                    } else {
                        out.status(Status::Error).diagnostics(json!({
                            "error": format!("{bad} corrupt cache entries"),
                            "kind": "integrity",
                            "exitCode": 1,
                        }))
                    })
                }
            }
        }
    }
}

fn lattice_cmd(cli: &Cli, cmd: &LatticeCmd) -> Result<Outcome> {
    match cmd {
        LatticeCmd::Info(l) => {
            let lat = lattice_by_name(&l.lattice)?;
            Ok(Outcome::new(serde_json::to_value(lat.descriptor())?))
        }
        LatticeCmd::Certify(l) => {
            let lat = lattice_by_name(&l.lattice)?;
            let cert = lat.certificates().clone();
            let mut diagnostics = json!({});
            if lat.is_positive_definite() && lat.name() == "Leech" {
                let cache = cache_of(cli);
                let shell = match cache.load_shell(&lat, 4)? {
                    Some(v) => {
                        diagnostics = json!({ "cacheHits": 1 });
                        v
                    }
                    None => {
                        let zero = lat.real_vector(vec![0.0; lat.rank()])?;
                        let v: Vec<LatticeVector> = short_vectors(&lat, &zero, 4.0, u64::MAX)?
                            .into_iter()
                            .filter(|x| lat.norm(x).map(|n| n == 4).unwrap_or(false))
                            .collect();
                        cache.store_shell(&lat, 4, &v)?;
                        diagnostics = json!({ "cacheHits": 0 });
                        v
                    }
                };
                if shell.len() != 196_560 {
                    return Err(Error::Integrity(format!("Leech norm-4 shell has {} vectors", shell.len())));
                }
            }
            Ok(Outcome::new(serde_json::to_value(cert)?).diagnostics(diagnostics))
        }
    }
}

fn sums_cmd(cmd: &SumsCmd, budget: u64) -> Result<Outcome> {
    match cmd {
        SumsCmd::Kloosterman { a, b, n } => {
            if *n == 0 {
                return Err(Error::Usage("n must be positive".into()));
            }
            let v = kloosterman(*a, *b, *n);
            Ok(Outcome::new(complex(v.value)).method("brute").terms(v.terms))
        }
        SumsCmd::Jordan { k, n } => {
            if *n == 0 {
                return Err(Error::Usage("n must be positive".into()));
            }
            let v = jordan_totient(*k, *n);
            Ok(Outcome::new(json!({ "re": v as f64, "im": 0.0 })).method("closed").diagnostics(json!({ "exact": v.to_string() })))
        }
        SumsCmd::Theta { lattice, q, c, method } => {
            let lat = lattice_by_name(&lattice.lattice)?;
            let v = match method {
                SumMethod::Brute => gauss_theta_brute(&lat, *q, *c, budget)?,
                SumMethod::Closed => gauss_theta_closed_odd(&lat, *q, *c)?,
            };
            Ok(Outcome::new(complex(v.value)).method(format!("{method:?}").to_lowercase()).terms(v.terms))
        }
        SumsCmd::J { lattice, lambda, n, d, method } => {
            let lat = lattice_by_name(&lattice.lattice)?;
            let l = parse_lattice_vector(&lat, lambda)?;
            let v = match method {
                SumMethod::Brute => j_brute(&lat, &l, *n, *d, budget)?,
                SumMethod::Closed => {
                    if *d != 1 {
                        return Err(Error::Usage("the closed form is for d = 1".into()));
                    }
                    j_closed(&lat, &l, *n)?
                }
            };
            Ok(Outcome::new(complex(v.value)).method(format!("{method:?}").to_lowercase()).terms(v.terms))
        }
        SumsCmd::Dirichlet { lattice, lambda, s, cutoff, exclude } => {
            let lat = lattice_by_name(&lattice.lattice)?;
            let l = parse_lattice_vector(&lat, lambda)?;
            let r = dirichlet_j_partial(&lat, &l, parse_s(s)?, *cutoff, exclude)?;
            Ok(eval_outcome(&r))
        }
        SumsCmd::Hensel { lattice, p, q, d } => {
            let lat = lattice_by_name(&lattice.lattice)?;
            let r = hensel_fiber_check(&lat, *p, *q, *d, budget)?;
            let out = Outcome::new(serde_json::to_value(&r)?);
            Ok(if r.holds {
                out
            } else {
                out.status(Status::Error).diagnostics(json!({
                    "error": "fiber sizes differ from p^(m-1)",
                    "kind": "integrity",
                    "exitCode": 1,
                }))
            })
        }
    }
}

fn geometry_cmd(cmd: &GeometryCmd, budget: u64) -> Result<Outcome> {
    let g = Lorentz::new(leech())?;
    match cmd {
        GeometryCmd::Roots { n, center, radius_sq, count_only } => {
            let c = parse_point(center)?;
            let roots = g.roots_of_height_near(*n, &c, *radius_sq, budget)?;
            let value = if *count_only {
                json!({ "count": roots.len() })
            } else {
                json!({ "count": roots.len(), "roots": roots.iter().map(|r| r.point()).collect::<Vec<_>>() })
            };
            Ok(Outcome::new(value).terms(roots.len() as u64))
        }
        GeometryCmd::Chamber { slice, v, radius_sq } => {
            let p = SliceParams::new(slice.k, slice.h)?;
            let m = g.chamber_margin(&parse_point(v)?, &p, *radius_sq)?;
            Ok(Outcome::new(json!({ "re": m, "im": 0.0 })))
        }
    }
}

fn eval_outcome(r: &EvalResult) -> Outcome {
    let status = if r.flags.iter().any(|f| f == "no-tail-bound") { Status::Partial } else { Status::Ok };
    Outcome::new(complex(r.value))
        .method(r.method.clone())
        .terms(r.terms)
        .status(status)
        .diagnostics(json!({
            "tail": r.tail,
            "flags": r.flags,
            "policy": r.policy,
            "heights": r.heights,
        }))
}

fn poincare_cmd(cli: &Cli, cmd: &PoincareCmd, budget: u64) -> Result<Outcome> {
    match cmd {
        PoincareCmd::Coeff { slice, s, lambda, n_max } => {
            let p = SliceParams::new(slice.k, slice.h)?;
            let s = parse_s(s)?;
            let policy = TruncationPolicy { n_max: *n_max, budget, ..Default::default() };
            let lat = leech();
            let rows = lambda
                .iter()
                .map(|t| fourier_coeff(lat, &parse_lattice_vector(lat, t)?, &p, s, &policy))
                .collect::<Result<Vec<_>>>()?;
            let csv = coeff_csv(&rows, lat)?;
            let value = if rows.len() == 1 { complex(rows[0].a) } else { serde_json::to_value(&rows)? };
            Ok(Outcome::new(value)
                .method("closed")
                .terms(rows.iter().fold(0u64, |t, r| t.saturating_add(r.terms_used)))
                .diagnostics(json!({ "coefficients": rows }))
                .csv(csv))
        }
        PoincareCmd::Eval { slice, s, v, method, policy } => {
            let p = SliceParams::new(slice.k, slice.h)?;
            let s = parse_s(s)?;
            let v = parse_point(v)?;
            if !(policy.tol > 0.0) || policy.n_max == 0 {
                return Err(Error::Usage("tol and n-max must be positive".into()));
            }
            let pol = TruncationPolicy {
                n_max: policy.n_max,
                lambda_radius_sq: policy.lambda_radius_sq,
                tol: policy.tol,
                budget,
                ..Default::default()
            };
            let fourier = |m: FourierMethod| -> Result<(EvalResult, usize)> {
                let cache = cache_of(cli);
                let table = CoeffTable::new(24, p, s, pol.n_max);
                let hits = table.load(&cache, leech()).unwrap_or(0);
                let r = fourier_poincare_table(&v, &table, &pol, m)?;
                table.store(&cache, leech())?;
                Ok((r, hits))
            };
            match method {
                EvalMethod::Direct => Ok(eval_outcome(&direct_poincare(leech(), &v, &p, s, &pol)?)),
                EvalMethod::Fourier | EvalMethod::FourierEnumerated => {
                    let m = if *method == EvalMethod::Fourier { FourierMethod::Shells } else { FourierMethod::Enumerated };
                    let (r, hits) = fourier(m)?;
                    let mut out = eval_outcome(&r);
                    out.diagnostics["cacheHits"] = json!(hits);
                    Ok(out)
                }
                EvalMethod::Both => {
                    let d = direct_poincare(leech(), &v, &p, s, &pol)?;
                    let (f, hits) = fourier(FourierMethod::Shells)?;
                    let rd = rel_diff(d.value, f.value);
                    Ok(Outcome::new(json!({
                        "direct": complex(d.value),
                        "fourier": complex(f.value),
                        "relDiff": rd,
                    }))
                    .method("both")
                    .terms(d.terms.saturating_add(f.terms))
                    .csv(format!(
                        "method,re,im\ndirect,{},{}\nfourier,{},{}\nrelDiff,{},0\n",
                        d.value.re, d.value.im, f.value.re, f.value.im, rd
                    ))
                    .diagnostics(json!({
                        "direct": { "tail": d.tail, "flags": d.flags, "policy": d.policy, "heights": d.heights },
                        "fourier": { "tail": f.tail, "flags": f.flags, "policy": f.policy },
                        "cacheHits": hits,
                    })))
                }
            }
        }
    }
}
