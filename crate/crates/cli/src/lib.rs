//! Command-line adapter over `k3degen_core`. Every subcommand parses its
//! input, calls the library, and prints one JSON report with sorted keys.
//!
//! Exit codes: 0 success, 1 bad input, 2 valid input that violates a
//! mathematical constraint.

mod fixtures;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use k3degen_core::arith::Prime;
use k3degen_core::autorders::{
    admissible_transcendental_charpolys_with_cap, candidate_status, nygaard_sigma0, order_decomposition,
    verify_het2_factorization, wild_prime_powers, CharSetting,
};
use k3degen_core::cyclotomic::{bounded_orders, factor_into_cyclotomics, CycloFactorization, CyclotomicError, IntPolynomial};
use k3degen_core::degeneration::{decide, moduli_dim, Constraints, DecisionStatus, Height, HodgeFieldClass};
use k3degen_core::dualcomplex::{ComplexAutomorphism, DeltaComplex, DualComplexError, VertexId};
use k3degen_core::elliptic::{analyze, FiberConfiguration};
use k3degen_core::lattice::Lattice;
use k3degen_core::sncfiber::{grw_dims, SncError, SncSurface};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CONSTRAINT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "k3degen", version, about = "Degenerations of K3 surfaces with non-symplectic automorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kulikov type, gr^W dimensions and E1 page of a combinatorial SNC fiber
    ClassifyFiber {
        /// JSON payload: a path, `-` for stdin, or inline JSON
        payload: String,
    },
    /// Kulikov types compatible with the given constraints
    AllowedTypes {
        #[arg(long)]
        m: Option<u64>,
        /// rational, imaginary_quadratic, cm_degree_gt2 or totally_real_degree_gt1
        #[arg(long)]
        field: Option<String>,
        /// 1..=10 or infinite
        #[arg(long)]
        height: Option<String>,
        /// characteristic of the fraction field
        #[arg(long = "char")]
        characteristic: Option<u64>,
    },
    /// Transcendental characteristic polynomials, or factoring and expanding
    Charpoly(CharpolyArgs),
    /// Wild prime powers, bounded orders and p-part decompositions
    Orders {
        #[arg(long, default_value_t = 21)]
        max_t: u64,
        /// also list all m with phi(m) <= BOUND
        #[arg(long)]
        bound: Option<u64>,
        /// split N = p^e n with p not dividing n (needs --p)
        #[arg(long)]
        decompose: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Artin invariants compatible with an automorphism of order m
    SsCheck {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        p: u64,
    },
    /// Homology, sphere recognition, orientation and orientation action
    Orient {
        payload: String,
        /// JSON automorphism with vertex, edge and triangle maps
        #[arg(long, conflicts_with = "vertex_map")]
        automorphism: Option<String>,
        /// JSON array: image of vertex i at position i
        #[arg(long)]
        vertex_map: Option<String>,
    },
    /// Euler number sum and trivial lattice rank of Kodaira fibers
    Euler {
        payload: String,
        #[arg(long = "char")]
        characteristic: Option<u64>,
    },
    /// Invariants of a lattice given by expression or Gram matrix
    Lattice {
        /// e.g. "U + U(11) + A10 + E8(-1)"
        #[arg(required_unless_present = "gram", conflicts_with = "gram")]
        expr: Option<String>,
        #[arg(long)]
        gram: Option<String>,
        /// moduli dimension for an automorphism of prime order P with this invariant lattice
        #[arg(long)]
        moduli_p: Option<u64>,
    },
    /// Run the bundled fixture corpus
    Fixtures {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CharpolyArgs {
    #[arg(long, conflicts_with_all = ["factor", "expand"], requires = "t_rank")]
    m: Option<u64>,
    /// char0, liftable, finite_height or finite_field
    #[arg(long, default_value = "char0")]
    setting: String,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    t_rank: Option<u32>,
    #[arg(long, default_value_t = k3degen_core::autorders::DEFAULT_T_RANK_CAP)]
    cap: u32,
    /// coefficient array, lowest degree first
    #[arg(long, conflicts_with = "expand")]
    factor: Option<String>,
    /// factorization as a map from m to multiplicity
    #[arg(long)]
    expand: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Invalid(e.to_string())
}

/// A finished command: exit code and the JSON report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { code: EXIT_OK, report }
    }

    fn violated(report: Value) -> Self {
        Outcome { code: EXIT_CONSTRAINT, report }
    }
}

fn load_payload(arg: &str, stdin: &mut dyn Read) -> Result<Value, CliError> {
    let text = if arg == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|source| CliError::Read { path: "stdin".into(), source })?;
        s
    } else if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|source| CliError::Read { path: arg.into(), source })?
    };
    Ok(serde_json::from_str(&text)?)
}

fn parse_json<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(invalid)
}

fn prime(p: u64) -> Result<Prime, CliError> {
    Prime::new(p).map_err(invalid)
}

fn with_summary(mut report: Value, summary: String) -> Value {
    report["summary"] = Value::String(summary);
    report
}

fn classify_fiber(payload: &str, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let input = load_payload(payload, stdin)?;
    let surface: SncSurface = parse_json(&input)?;
    let t = match surface.classify() {
        Ok(t) => t,
        Err(SncError::NotKulikov(reason)) => {
            let report = json!({
                "input": input,
                "error": {"kind": "not_kulikov", "reason": reason},
            });
            return Ok(Outcome::violated(with_summary(report, format!("not a Kulikov fiber: {reason}"))));
        }
        Err(e) => return Err(invalid(e)),
    };
    let grw = grw_dims(t);
    let cross = surface.crosscheck().map_err(invalid)?;
    let mut report = json!({
        "input": input,
        "type": t,
        "grw": grw,
        "crosscheck": cross,
        "all_checks_passed": cross.all_passed(),
    });
    match surface.e1_page() {
        Ok(page) => {
            report["e1"] = json!({
                "p_range": [-2, 2],
                "rows": page,
                "euler_characteristic": page.euler_characteristic(),
            });
        }
        Err(SncError::MissingBetti(c)) => report["e1_skipped"] = json!(format!("component {c} has no b2")),
        Err(e) => return Err(invalid(e)),
    }
    let summary = format!("type {t}, gr^W dims {:?}", grw.0);
    let report = with_summary(report, summary);
    Ok(if cross.all_passed() { Outcome::ok(report) } else { Outcome::violated(report) })
}

fn allowed_types(
    m: Option<u64>,
    field: Option<String>,
    height: Option<String>,
    characteristic: Option<u64>,
) -> Result<Outcome, CliError> {
    let field: Option<HodgeFieldClass> = field.map(|f| f.parse()).transpose().map_err(invalid)?;
    let height: Option<Height> = height.map(|h| h.parse()).transpose().map_err(invalid)?;
    let c = Constraints { m, field, height, char: characteristic };
    let d = decide(&c).map_err(invalid)?;
    let summary = match (&d.status, &d.allowed) {
        (DecisionStatus::Decided, Some(a)) => {
            format!("allowed types {a}{}", if d.conditional { " (conditional)" } else { "" })
        }
        _ => "outside the hypotheses of the classification".to_string(),
    };
    let mut report = serde_json::to_value(&d)?;
    report["input"] = serde_json::to_value(c)?;
    Ok(Outcome::ok(with_summary(report, summary)))
}

fn parse_setting(name: &str, p: Option<u64>) -> Result<CharSetting, CliError> {
    let need_p = || -> Result<Prime, CliError> { prime(p.ok_or_else(|| invalid(format!("setting {name} needs --p")))?) };
    Ok(match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "char0" | "0" => {
            if p.is_some() {
                return Err(invalid("setting char0 takes no --p"));
            }
            CharSetting::Char0
        }
        "liftable" => CharSetting::Liftable { p: need_p()? },
        "finite_height" => CharSetting::FiniteHeight { p: need_p()? },
        "finite_field" => CharSetting::FiniteField { p: need_p()? },
        other => return Err(invalid(format!("unknown setting {other:?}"))),
    })
}

fn factorization_json(f: &CycloFactorization) -> Value {
    json!({
        "factors": f,
        "text": f.to_string(),
        "degree": f.degree(),
        "status": candidate_status(f),
    })
}

fn charpoly(a: CharpolyArgs) -> Result<Outcome, CliError> {
    let mut stdin = io::empty();
    if let Some(arg) = &a.factor {
        let input = load_payload(arg, &mut stdin)?;
        let poly: IntPolynomial = parse_json(&input)?;
        if !poly.is_monic() {
            return Err(invalid(format!("polynomial {poly} is not monic")));
        }
        return Ok(match factor_into_cyclotomics(&poly) {
            Ok(f) => {
                let report = json!({
                    "input": {"factor": input},
                    "polynomial": poly.to_string(),
                    "factorization": factorization_json(&f),
                    "het2_degree_ok": verify_het2_factorization(&f),
                });
                Outcome::ok(with_summary(report, f.to_string()))
            }
            Err(CyclotomicError::NotCyclotomicProduct { remaining, degree }) => {
                let report = json!({
                    "input": {"factor": input},
                    "error": {"kind": "not_cyclotomic_product", "remaining": remaining, "degree": degree},
                });
                Outcome::violated(with_summary(report, format!("non-cyclotomic factor {remaining} remains")))
            }
            Err(e) => return Err(invalid(e)),
        });
    }
    if let Some(arg) = &a.expand {
        let input = load_payload(arg, &mut stdin)?;
        let f: CycloFactorization = parse_json(&input)?;
        if f.factors().contains_key(&0) {
            return Err(invalid("cyclotomic index 0"));
        }
        let poly = f.expand();
        let ok = verify_het2_factorization(&f);
        let report = json!({
            "input": {"expand": input},
            "factorization": factorization_json(&f),
            "coefficients": poly,
            "polynomial": poly.to_string(),
            "monic": poly.is_monic(),
            "round_trip": factor_into_cyclotomics(&poly).ok().as_ref() == Some(&f),
            "het2_degree_ok": ok,
        });
        return Ok(Outcome::ok(with_summary(report, format!("{f} has degree {}", f.degree()))));
    }
    let m = a.m.ok_or_else(|| invalid("give --m with --t-rank, --factor or --expand"))?;
    let t = a.t_rank.ok_or_else(|| invalid("--m needs --t-rank"))?;
    let setting = parse_setting(&a.setting, a.p)?;
    let list = admissible_transcendental_charpolys_with_cap(m, setting, t, a.cap).map_err(invalid)?;
    let candidates: Vec<Value> = list.iter().map(factorization_json).collect();
    let report = json!({
        "input": {"m": m, "setting": setting, "t_rank": t, "cap": a.cap},
        "candidates": candidates,
        "count": list.len(),
    });
    Ok(Outcome::ok(with_summary(report, format!("{} candidates for m = {m} in {setting}", list.len()))))
}

fn orders(max_t: u64, bound: Option<u64>, decompose: Option<u64>, p: Option<u64>) -> Result<Outcome, CliError> {
    let wild = wild_prime_powers(max_t).map_err(invalid)?;
    let mut report = json!({
        "input": {"max_t": max_t, "bound": bound, "decompose": decompose, "p": p},
        "wild_prime_powers": wild,
        "count": wild.len(),
    });
    if let Some(b) = bound {
        if b == 0 {
            return Err(invalid("--bound must be positive"));
        }
        report["bounded_orders"] = json!(bounded_orders(b));
    }
    match (decompose, p) {
        (Some(n), Some(p)) => {
            let (e, rest) = order_decomposition(n, prime(p)?).map_err(invalid)?;
            report["decomposition"] = json!({"e": e, "n": rest, "p_power": p.pow(e)});
        }
        (Some(_), None) => return Err(invalid("--decompose needs --p")),
        (None, Some(_)) => return Err(invalid("--p needs --decompose")),
        (None, None) => {}
    }
    Ok(Outcome::ok(with_summary(report, format!("{} wild prime powers with phi <= {max_t}", wild.len()))))
}

fn ss_check(m: u64, p: u64) -> Result<Outcome, CliError> {
    if m == 0 {
        return Err(invalid("--m must be positive"));
    }
    let sigma = nygaard_sigma0(m, prime(p)?);
    let report = json!({
        "input": {"m": m, "p": p},
        "sigma0": sigma,
        "supersingular_possible": !sigma.is_empty(),
    });
    let summary = if sigma.is_empty() {
        format!("no Artin invariant allows order {m} in characteristic {p}")
    } else {
        format!("Artin invariants {sigma:?} allow order {m} in characteristic {p}")
    };
    Ok(Outcome::ok(with_summary(report, summary)))
}

fn orient(
    payload: &str,
    automorphism: Option<String>,
    vertex_map: Option<String>,
    stdin: &mut dyn Read,
) -> Result<Outcome, CliError> {
    let input = load_payload(payload, stdin)?;
    let c: DeltaComplex = parse_json(&input)?;
    let mut echo = json!({"complex": input});
    let g = if let Some(a) = automorphism {
        let v = load_payload(&a, &mut io::empty())?;
        echo["automorphism"] = v.clone();
        let g: ComplexAutomorphism = parse_json(&v)?;
        g.validate(&c).map_err(invalid)?;
        Some(g)
    } else if let Some(vm) = vertex_map {
        let v = load_payload(&vm, &mut io::empty())?;
        echo["vertex_map"] = v.clone();
        let images: Vec<u32> = parse_json(&v)?;
        let verts: Vec<VertexId> = c.vertices().collect();
        if images.len() != verts.len() {
            return Err(invalid(format!("vertex map has {} entries for {} vertices", images.len(), verts.len())));
        }
        let map: BTreeMap<VertexId, VertexId> = verts.iter().zip(&images).map(|(&v, &w)| (v, VertexId(w))).collect();
        Some(ComplexAutomorphism::from_vertex_map(&c, map).map_err(invalid)?)
    } else {
        None
    };
    let mut report = json!({
        "input": echo,
        "homology": c.homology_dims(),
        "euler_characteristic": c.euler_characteristic(),
        "sphere": c.is_sphere_triangulation(),
    });
    let orientation = match c.orient() {
        Ok(o) => o,
        Err(e @ (DualComplexError::NonOrientable | DualComplexError::NotClosed { .. } | DualComplexError::NotConnected | DualComplexError::NoTriangles)) => {
            let kind = if matches!(e, DualComplexError::NonOrientable) { "non_orientable" } else { "not_closed_surface" };
            report["error"] = json!({"kind": kind, "message": e.to_string()});
            return Ok(Outcome::violated(with_summary(report, e.to_string())));
        }
        Err(e) => return Err(invalid(e)),
    };
    report["orientation"] = json!(orientation);
    let mut summary = format!("orientable, homology {:?}", c.homology_dims());
    if let Some(g) = g {
        let a = c.orientation_action(&g).map_err(invalid)?;
        report["orientation_action"] = json!(a);
        summary.push_str(&format!(", orientation action {a:+}"));
    }
    Ok(Outcome::ok(with_summary(report, summary)))
}

fn euler(payload: &str, characteristic: Option<u64>, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    let input = load_payload(payload, stdin)?;
    let config: FiberConfiguration = parse_json(&input)?;
    if let Some(p) = characteristic {
        if p != 0 && !k3degen_core::arith::is_prime(p) {
            return Err(invalid(format!("characteristic {p} is neither 0 nor a prime")));
        }
    }
    let r = analyze(&config, characteristic);
    let summary = format!(
        "{config}: Euler sum {}, {}, trivial lattice rank {}",
        r.euler_sum,
        if r.is_k3 { "K3" } else { "not K3" },
        r.trivial_lattice_rank
    );
    let mut report = serde_json::to_value(&r)?;
    report["input"] = json!({"fibers": input, "char": characteristic});
    report["configuration"] = serde_json::to_value(&config)?;
    Ok(Outcome::ok(with_summary(report, summary)))
}

fn lattice(expr: Option<String>, gram: Option<String>, moduli_p: Option<u64>) -> Result<Outcome, CliError> {
    let (l, echo) = match (expr, gram) {
        (Some(e), None) => (e.parse::<Lattice>().map_err(invalid)?, json!({"expr": e})),
        (None, Some(g)) => {
            let v = load_payload(&g, &mut io::empty())?;
            (parse_json::<Lattice>(&v)?, json!({"gram": v}))
        }
        _ => return Err(invalid("give an expression or --gram")),
    };
    let sig = l.signature();
    let mut report = json!({
        "input": echo,
        "gram": l,
        "rank": l.rank(),
        "det": l.det().to_string(),
        "signature": [sig.positive, sig.negative, sig.zero],
        "is_even": l.is_even(),
    });
    if let Ok(d) = i64::try_from(l.det()) {
        report["det"] = json!(d);
    }
    let mut summary = format!("rank {}, det {}, signature ({}, {}, {})", l.rank(), l.det(), sig.positive, sig.negative, sig.zero);
    if let Some(p) = moduli_p {
        report["input"]["moduli_p"] = json!(p);
        let rank = u32::try_from(l.rank()).map_err(invalid)?;
        match moduli_dim(p, rank) {
            Ok(d) => {
                report["moduli_dim"] = json!(d);
                summary.push_str(&format!(", moduli dimension {d} for p = {p}"));
            }
            Err(e) => {
                report["error"] = json!({"kind": "moduli", "message": e.to_string()});
                return Ok(Outcome::violated(with_summary(report, e.to_string())));
            }
        }
    }
    Ok(Outcome::ok(with_summary(report, summary)))
}

fn dispatch(cmd: Command, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    match cmd {
        Command::ClassifyFiber { payload } => classify_fiber(&payload, stdin),
        Command::AllowedTypes { m, field, height, characteristic } => allowed_types(m, field, height, characteristic),
        Command::Charpoly(a) => charpoly(a),
        Command::Orders { max_t, bound, decompose, p } => orders(max_t, bound, decompose, p),
        Command::SsCheck { m, p } => ss_check(m, p),
        Command::Orient { payload, automorphism, vertex_map } => orient(&payload, automorphism, vertex_map, stdin),
        Command::Euler { payload, characteristic } => euler(&payload, characteristic, stdin),
        Command::Lattice { expr, gram, moduli_p } => lattice(expr, gram, moduli_p),
        Command::Fixtures { dir } => fixtures::run_corpus(dir),
    }
}

/// Runs one command line (without the program name) in-process.
pub fn execute(args: &[String], stdin: &mut dyn Read) -> Result<Outcome, clap::Error> {
    let cli = Cli::try_parse_from(std::iter::once("k3degen".to_string()).chain(args.iter().cloned()))?;
    Ok(match dispatch(cli.command, stdin) {
        Ok(o) => o,
        Err(e) => Outcome {
            code: EXIT_INPUT,
            report: json!({
                "input": {"argv": args},
                "error": {"kind": "input", "message": e.to_string()},
                "summary": format!("input error: {e}"),
            }),
        },
    })
}

pub fn render(report: &Value) -> String {
    serde_json::to_string_pretty(report).expect("JSON values always serialize")
}

/// Entry point: `argv` includes the program name.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).skip(1).collect();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(&args, &mut io::stdin(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(args: &[String], stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(args, stdin) {
        Ok(o) => {
            let _ = writeln!(out, "{}", render(&o.report));
            if o.code != EXIT_OK {
                if let Some(s) = o.report.get("summary").and_then(Value::as_str) {
                    let _ = writeln!(err, "k3degen: {s}");
                }
            }
            o.code
        }
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_INPUT,
            };
            let _ = write!(err, "{}", e.render());
            code
        }
    }
}
