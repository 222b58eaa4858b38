//! `chebgf`: NDJSON reports on stdout, a human summary on stderr.
//! Exit status 0 on pass, 1 on a failed check, 2 on usage or input errors.

mod args;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::json;

use args::{ChiCmd, Cli, Command, Conjecture, FileConfig, Global, KibbleCmd, Kind, Lattice, QCmd, SpecArgs, Suite, VerifyCmd, WCmd};
use chebgf::chebyshev::ChebKind;
use chebgf::denominator::{build_w_recursive_with, build_w_with, printed, W_MAX};
use chebgf::error::Error;
use chebgf::genfun::{chi_closed, chi_series_oracle, GenSpec};
use chebgf::kibble::{
    kibble_closed_eval_with, kibble_denominator, kibble_denominator_symbolic, kibble_series_oracle_with, CorrMatrix,
    OracleConfig,
};
use chebgf::par::{with_jobs, Exec};
use chebgf::poly::{Assignment, Var};
use chebgf::qseries::{self, QContext};
use chebgf::verify::{self, VerifyConfig};

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Outcome = Result<bool, Failure>;

/// Resolved global settings: flags over config file over defaults.
struct Settings {
    seed: u64,
    jobs: Option<usize>,
    tol: Option<f64>,
    trials: Option<u64>,
    exec: Exec,
}

struct Out {
    lines: Vec<String>,
}

impl Out {
    fn emit<T: Serialize>(&mut self, v: &T) {
        let s = serde_json::to_string(v).expect("reports serialize");
        println!("{s}");
        self.lines.push(s);
    }
}

fn settings(g: &Global) -> Result<(Settings, Option<std::path::PathBuf>), Failure> {
    let file = match &g.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("--config {}: {e}", p.display())))?;
            toml::from_str::<FileConfig>(&text).map_err(|e| Failure::Usage(format!("--config {}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let jobs = g.jobs.or(file.jobs);
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let tol = g.tol.or(file.tol);
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
    }
    Ok((
        Settings {
            seed: g.seed.or(file.seed).unwrap_or(7),
            jobs,
            tol,
            trials: file.trials,
            exec: if jobs == Some(1) { Exec::Sequential } else { Exec::Parallel },
        },
        g.json.clone().or(file.json),
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (s, json_path) = match settings(&cli.global) {
        Ok(v) => v,
        Err(f) => return report_failure(f),
    };
    let mut out = Out { lines: Vec::new() };
    let outcome = with_jobs(s.jobs, || run(&cli.command, &s, &mut out));
    if let Some(p) = json_path {
        let mut text = out.lines.join("\n");
        text.push('\n');
        if let Err(e) = fs::File::create(&p).and_then(|mut f| f.write_all(text.as_bytes())) {
            eprintln!("error: --json {}: {e}", p.display());
            return ExitCode::from(2);
        }
    }
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification FAILED");
            ExitCode::from(1)
        }
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> ExitCode {
    match f {
        Failure::Usage(m) => eprintln!("usage error: {m}"),
        Failure::Engine(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(2)
}

fn run(cmd: &Command, s: &Settings, out: &mut Out) -> Outcome {
    match cmd {
        Command::W(c) => w_cmd(c, s, out),
        Command::Chi(c) => chi_cmd(c, s, out),
        Command::Kibble(c) => kibble_cmd(c, s, out),
        Command::Q(c) => q_cmd(c, s, out),
        Command::Verify(c) => verify_cmd(c, s, out),
    }
}

fn w_cmd(c: &WCmd, s: &Settings, out: &mut Out) -> Outcome {
    match c {
        WCmd::Build { n, recursive } => {
            let w = if *recursive { build_w_recursive_with(*n, s.exec)? } else { build_w_with(*n, s.exec)? };
            out.emit(&json!({ "command": "w build", "n": n, "poly": w.poly.to_json() }));
            eprintln!("w_{n}: {} terms", w.poly.len());
            Ok(true)
        }
        WCmd::Check { n_max } => {
            if *n_max == 0 || *n_max > W_MAX {
                return Err(Failure::Usage(format!("--n-max must lie in 1..={W_MAX}")));
            }
            let mut all = true;
            for n in 1..=*n_max {
                let w = build_w_with(n, s.exec)?.poly;
                let rec = build_w_recursive_with(n, s.exec)?.poly == w;
                let printed = match n {
                    1 => Some(printed::w1() == w),
                    2 => Some(printed::w2() == w),
                    3 => Some(printed::w3() == w),
                    _ => None,
                };
                let x_deg_ok = (1..=n as u8).all(|i| w.degree_in(Var::X(i)) == 1 << (n - 1));
                let rho_deg_ok = w.degree_in(Var::Rho) == 1 << n;
                let pass = rec && printed != Some(false) && x_deg_ok && rho_deg_ok;
                all &= pass;
                out.emit(&json!({
                    "command": "w check", "n": n, "recursive_matches": rec, "printed_matches": printed,
                    "x_degree_ok": x_deg_ok, "rho_degree_ok": rho_deg_ok, "pass": pass,
                }));
            }
            eprintln!("w check through n = {n_max}: {}", if all { "PASS" } else { "FAIL" });
            Ok(all)
        }
    }
}

fn parse_spec(a: &SpecArgs) -> Result<GenSpec, Failure> {
    let bad = |m: &str| Failure::Usage(format!("--spec: {m}"));
    let (k, n, t) = if let Some(text) = &a.spec {
        let (kn, t) = match text.split_once(':') {
            Some((kn, t)) => (kn, Some(t)),
            None => (text.as_str(), None),
        };
        let parts: Vec<&str> = kn.split(',').collect();
        if parts.len() != 2 {
            return Err(bad("expected `K,N` or `K,N:t1,...`"));
        }
        let k: usize = parts[0].trim().parse().map_err(|_| bad("K is not a count"))?;
        let n: usize = parts[1].trim().parse().map_err(|_| bad("N is not a count"))?;
        let t: Vec<i64> = match t {
            Some(t) => t
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| bad("shifts must be integers")))
                .collect::<Result<_, _>>()?,
            None => vec![0; k + n],
        };
        (k, n, t)
    } else {
        let k = a.k.ok_or_else(|| Failure::Usage("--k (or --spec) is required".into()))?;
        let n = a.n.ok_or_else(|| Failure::Usage("--n (or --spec) is required".into()))?;
        let t = if a.t.is_empty() { vec![0; k + n] } else { a.t.clone() };
        (k, n, t)
    };
    Ok(GenSpec::new(k, n, t)?)
}

fn point(xs: &[f64], rho: f64) -> Assignment<f64> {
    let mut at = Assignment::new().with(Var::Rho, rho);
    for (i, x) in xs.iter().enumerate() {
        at.set(Var::X(i as u8 + 1), *x);
    }
    at
}

fn chi_cmd(c: &ChiCmd, s: &Settings, out: &mut Out) -> Outcome {
    match c {
        ChiCmd::Build { spec } => {
            let spec = parse_spec(spec)?;
            let f = chi_closed(&spec)?;
            out.emit(&json!({
                "command": "chi build", "spec": spec,
                "numerator": f.numerator.to_json(), "denominator": f.denominator.to_json(),
            }));
            eprintln!("{}: numerator {} terms, denominator {} terms", spec.label(), f.numerator.len(), f.denominator.len());
            Ok(true)
        }
        ChiCmd::Eval { spec, x, rho, order } => {
            let spec = parse_spec(spec)?;
            if x.len() != spec.arity() {
                return Err(Failure::Usage(format!("--x needs {} values, got {}", spec.arity(), x.len())));
            }
            if !(rho.abs() < 1.0) || x.iter().any(|v| !(v.abs() <= 1.0)) {
                return Err(Failure::Engine(Error::Domain("need |x_i| <= 1 and |rho| < 1".into())));
            }
            let (value, bound) = chi_closed(&spec)?.compile().eval_f64(&point(x, *rho))?;
            let series = match order {
                Some(j) => Some(chi_series_oracle(&spec, x, *rho, *j)?),
                None => None,
            };
            out.emit(&json!({
                "command": "chi eval", "spec": spec, "x": x, "rho": rho,
                "value": value, "error_bound": bound, "series": series,
            }));
            eprintln!("{} = {value}", spec.label());
            Ok(true)
        }
        ChiCmd::Verify { spec, trials, rho_max, order } => {
            let spec = parse_spec(spec)?;
            let trials = s.trials.unwrap_or(*trials);
            let r = verify::chi_verify(&spec, trials, s.seed, *rho_max, *order, s.tol.unwrap_or(1e-8), s.exec)?;
            eprintln!("{}: max |err| {:.3e} -> {}", spec.label(), r.max_abs_err, if r.pass { "PASS" } else { "FAIL" });
            let pass = r.pass;
            out.emit(&r);
            Ok(pass)
        }
    }
}

fn kind(k: Kind) -> ChebKind {
    match k {
        Kind::T => ChebKind::T,
        Kind::U => ChebKind::U,
    }
}

fn oracle(cutoff: usize, lattice: Lattice, budget: Option<u128>) -> OracleConfig {
    let cfg = match lattice {
        Lattice::Box => OracleConfig::boxed(cutoff),
        Lattice::Simplex => OracleConfig::simplex(cutoff),
    };
    match budget {
        Some(b) => cfg.with_budget(b),
        None => cfg,
    }
}

fn kibble_cmd(c: &KibbleCmd, s: &Settings, out: &mut Out) -> Outcome {
    match c {
        KibbleCmd::Eval { kind: k, x, rho, cutoff, lattice, budget } => {
            let km = CorrMatrix::parse(rho)?;
            if x.len() != km.n {
                return Err(Failure::Usage(format!("--x needs {} values, got {}", km.n, x.len())));
            }
            if x.iter().any(|v| !(v.abs() <= 1.0)) {
                return Err(Failure::Engine(Error::Domain("need |x_i| <= 1".into())));
            }
            let alphas: Vec<f64> = x.iter().map(|v| v.acos()).collect();
            let closed = kibble_closed_eval_with(kind(*k), &alphas, &km, s.exec)?;
            let series = match cutoff {
                Some(c) => Some(kibble_series_oracle_with(kind(*k), x, &km, oracle(*c, *lattice, *budget), s.exec)?),
                None => None,
            };
            let def = km.definiteness();
            out.emit(&json!({
                "command": "kibble eval", "kind": format!("{:?}", kind(*k)), "x": x, "rho": km.values,
                "closed": closed, "oracle": series, "k_plus_i_positive_definite": def.positive_definite,
            }));
            eprintln!("f_{:?} = {closed}", kind(*k));
            Ok(true)
        }
        KibbleCmd::Verify { n, kind: k, trials, cutoff, lattice, rho_max, budget } => {
            let trials = s.trials.unwrap_or(*trials);
            let r = verify::kibble_verify(
                kind(*k),
                *n,
                trials,
                s.seed,
                *rho_max,
                oracle(*cutoff, *lattice, *budget),
                s.tol.unwrap_or(1e-7),
                s.exec,
            )?;
            eprintln!("kibble n = {n}: max |err| {:.3e} -> {}", r.max_abs_err, if r.pass { "PASS" } else { "FAIL" });
            let pass = r.pass;
            out.emit(&r);
            Ok(pass)
        }
        KibbleCmd::Denominator { n, rho } => {
            let poly = match rho {
                Some(r) => {
                    let km = CorrMatrix::parse(r)?;
                    if km.n != *n {
                        return Err(Failure::Usage(format!("--rho describes n = {}, not {n}", km.n)));
                    }
                    kibble_denominator(&km)?
                }
                None => kibble_denominator_symbolic(*n)?,
            };
            out.emit(&json!({ "command": "kibble denominator", "n": n, "poly": poly.to_json() }));
            eprintln!("V_{n}: {} terms", poly.len());
            Ok(true)
        }
    }
}

fn contexts(qs: &[String]) -> Result<Vec<QContext>, Failure> {
    qs.iter().map(|q| QContext::parse(q).map_err(Failure::from)).collect()
}

fn q_cmd(c: &QCmd, s: &Settings, out: &mut Out) -> Outcome {
    match c {
        QCmd::Check { suite, q, nmax } => {
            let mut all = true;
            for ctx in contexts(q)? {
                let pass = q_suite(*suite, &ctx, *nmax, s, out)?;
                eprintln!("q = {}: {:?} {}", ctx.label(), suite, if pass { "PASS" } else { "FAIL" });
                all &= pass;
            }
            Ok(all)
        }
        QCmd::Probe { conjecture, q, nmax, order } => {
            for ctx in contexts(q)? {
                match conjecture {
                    Conjecture::Beta => {
                        for n in 2..=*nmax {
                            let r = qseries::beta_probe(&ctx, n)?;
                            eprintln!("q = {} n = {n}: {} exponents {:?}", ctx.label(), r.verdict, r.exponents);
                            out.emit(&r);
                        }
                    }
                    Conjecture::CommonDenominator => {
                        for (h, t) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
                            let r = qseries::common_denominator_probe(&ctx, h, t, &vec![0; h + t], *order)?;
                            eprintln!(
                                "q = {} h={h} t={t}: nonzero orders {:?}",
                                ctx.label(),
                                r.nonzero_orders
                            );
                            out.emit(&r);
                        }
                    }
                }
            }
            Ok(true)
        }
    }
}

fn q_suite(suite: Suite, ctx: &QContext, nmax: usize, s: &Settings, out: &mut Out) -> Outcome {
    let qf = ctx.q_f64();
    Ok(match suite {
        Suite::Duality => {
            let r = qseries::duality_check(ctx, nmax)?;
            let pass = r.holds;
            out.emit(&r);
            pass
        }
        Suite::Idb => {
            let mut all = true;
            for n in 0..=nmax {
                for k in 0..=nmax {
                    let r = qseries::idb_check(ctx, n, k)?;
                    all &= r.holds;
                    out.emit(&r);
                }
            }
            all
        }
        Suite::Chi1t => {
            let tol = s.tol.unwrap_or(1e-9);
            let mut all = true;
            for t in 0..=nmax {
                for (x, rho) in [(-0.7, 0.3), (0.0, -0.4), (0.5, 0.45)] {
                    let r = qseries::chi1t_check(t, x, rho, qf, 80, 60)?;
                    all &= r.difference <= tol;
                    out.emit(&r);
                }
            }
            all
        }
        Suite::D => {
            let mut all = true;
            for n in 0..=nmax {
                let r = qseries::d_coeff(ctx, n)?;
                all &= r.lemma_holds && r.routes_agree;
                out.emit(&r);
            }
            all
        }
        Suite::D2 => {
            let mut all = true;
            for n in 0..=nmax {
                let r = qseries::d2_coeff(ctx, n)?;
                all &= r.routes_agree && r.printed_match != Some(false);
                out.emit(&r);
            }
            all
        }
        Suite::FinalIdentity => {
            let exact = qseries::final_identity_exact(ctx, nmax)?;
            out.emit(&json!({ "suite": "final-identity", "q": ctx.label(), "order": nmax, "exact_holds": exact }));
            let tol = s.tol.unwrap_or(1e-8);
            let mut all = exact;
            for (x, y, rho) in [(0.3, -0.6, 0.45), (-0.9, 0.2, -0.5), (0.75, 0.75, 0.3)] {
                let r = qseries::final_identity_numeric(x, y, rho, qf, 120)?;
                all &= r.difference <= tol;
                out.emit(&r);
            }
            all
        }
        Suite::Tn => {
            let tol = s.tol.unwrap_or(1e-8);
            let r = qseries::tn_construct(ctx, nmax)?;
            let pass = r.degenerate.is_empty() && r.hu_holds && r.gram.max_off_diagonal <= tol;
            out.emit(&r);
            pass
        }
        Suite::Moments => {
            let tol = s.tol.unwrap_or(1e-10);
            let mut all = true;
            for n in 0..=nmax {
                let m = qseries::ft_moment_u(ctx, n)?;
                let quad = qseries::ft_moment_u_quadrature(ctx, n, 128)?;
                let ok = (m.value_f64 - quad).abs() <= tol;
                all &= ok;
                out.emit(&json!({ "suite": "moments", "q": ctx.label(), "moment": m, "quadrature": quad, "pass": ok }));
            }
            all
        }
    })
}

fn verify_cmd(c: &VerifyCmd, s: &Settings, out: &mut Out) -> Outcome {
    match c {
        VerifyCmd::All { trials, criteria } => {
            let which: Vec<u8> = if criteria.is_empty() { verify::CRITERIA.to_vec() } else { criteria.clone() };
            if let Some(bad) = which.iter().find(|c| !(1..=9).contains(*c)) {
                return Err(Failure::Usage(format!("--criteria: no criterion {bad}")));
            }
            let cfg = VerifyConfig {
                seed: s.seed,
                exec: s.exec,
                trials: trials.or(s.trials),
                tol: s.tol,
            };
            let reports = verify::verify_all(&cfg, &which)?;
            let mut all = true;
            for r in &reports {
                eprintln!("{}", r.line());
                all &= r.pass;
                out.emit(r);
            }
            Ok(all)
        }
    }
}
