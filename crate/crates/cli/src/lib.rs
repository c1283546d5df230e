//! Front end for the `dpalg` binary: expression language, JSON output and
//! the subcommands.

pub mod eval;
pub mod json;
pub mod parse;

use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpalg_core::beck::{verify_beck_axioms, UModule};
use dpalg_core::coeff::{cartan_congruence_residue, gcd_middle_binomials, prime_power, primes_up_to, Ring};
use dpalg_core::dpcore::{divided_power, AlgebraSpec, DPElement, DPMonomial};
use dpalg_core::envelope::{phi_of, EnvelopeElement, PhiMonomial};
use dpalg_core::kahler::{
    indecomposables, omega_free_basis, phi_inversion, remark_identities, universal_derivation, OmegaElement,
    OmegaModule,
};
use dpalg_core::laws::{check_dp_axioms, random_element, FreeDp, LawRecord, Report, Status};
use dpalg_core::oracle::{verify_indecomposables, verify_main_theorem, InvariantFactors, SliceComparison};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

pub use eval::{eval, EvalError};
pub use parse::{parse, ParseError, TermAst};

pub const CARTAN: &str = "cartan_congruence";
pub const GCD_LEMMA: &str = "gcd_of_middle_binomials";
pub const INVERSION: &str = "phi_inversion";
pub const NEGATIVE_CONTROL: &str = "corrupted_phi_table_detected";

#[derive(Debug, Parser)]
#[command(name = "dpalg", about = "Divided power algebras, their Kähler differentials and indecomposables")]
struct Cli {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct AlgebraArgs {
    /// Base ring: `z` or `zmod=M`.
    #[arg(long, global = true, default_value = "z", value_parser = parse_ring)]
    ring: Ring,
    /// Number of generators (default 1, or the length of --weights).
    #[arg(long, global = true)]
    gens: Option<usize>,
    /// Comma-separated generator weights.
    #[arg(long, global = true, value_delimiter = ',')]
    weights: Option<Vec<u64>>,
    /// Drop everything of weight above this.
    #[arg(long, global = true, default_value_t = 6)]
    trunc: u64,
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random samples per law for the sampled checks.
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the canonical form of an expression.
    Normalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Apply the n-th divided power.
    Gamma {
        n: u64,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Apply the universal derivation.
    Diff {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Closed-form basis of the module of differentials, by weight.
    OmegaBasis,
    /// Closed-form indecomposables A/A^2, by weight.
    Indec,
    /// Compare I/I^2 and A/A^2 against their closed forms.
    OracleOmega,
    /// Run a named property suite.
    Check { suite: Suite },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Axioms,
    Congruence,
    Gcd,
    Inversion,
    Beck,
    Remark54,
}

fn parse_ring(s: &str) -> Result<Ring, String> {
    if s == "z" {
        return Ok(Ring::Integers);
    }
    let m = s.strip_prefix("zmod=").ok_or_else(|| format!("expected `z` or `zmod=M`, got `{s}`"))?;
    let m: u64 = m.parse().map_err(|_| format!("bad modulus `{m}`"))?;
    Ring::integers_mod(m).map_err(|e| e.to_string())
}

/// Result of one invocation: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn checked(passed: bool, stdout: String) -> Outcome {
        Outcome { code: if passed { 0 } else { 1 }, stdout, stderr: String::new() }
    }

    fn usage(stderr: String) -> Outcome {
        Outcome { code: 2, stdout: String::new(), stderr }
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome::usage(text),
            };
        }
    };
    let a = &cli.algebra;
    let spec = match build_spec(a) {
        Ok(spec) => spec,
        Err(msg) => return Outcome::usage(format!("error: {msg}\n")),
    };
    match &cli.command {
        Command::Normalize { expr } => with_element(&spec, expr, |e| show_element(a.json, &e)),
        Command::Gamma { n, expr } => {
            if *n == 0 {
                return Outcome::usage("error: exponent must be >= 1\n".into());
            }
            with_element(&spec, expr, |e| show_element(a.json, &divided_power(*n, &e)))
        }
        Command::Diff { expr } => with_element(&spec, expr, |e| show_omega(a.json, &universal_derivation(&e))),
        Command::OmegaBasis => Outcome::ok(omega_basis(&spec, a.json)),
        Command::Indec => Outcome::ok(indec(&spec, a.json)),
        Command::OracleOmega => oracle_omega(&spec, a),
        Command::Check { suite } => {
            let report = run_suite(*suite, &spec, a.samples, a.seed);
            let text = if a.json {
                pretty(&json!({
                    "suite": format!("{suite:?}").to_lowercase(),
                    "seed": a.seed,
                    "passed": report.passed(),
                    "laws": report.records,
                }))
            } else {
                let mut s = law_lines(&report, "");
                s.push_str(if report.passed() { "all laws hold\n" } else { "check failed\n" });
                s
            };
            Outcome::checked(report.passed(), text)
        }
    }
}

fn build_spec(a: &AlgebraArgs) -> Result<Arc<AlgebraSpec>, String> {
    let weights = match (&a.weights, a.gens) {
        (Some(w), Some(k)) if w.len() != k => {
            return Err(format!("--weights lists {} weights but --gens is {k}", w.len()));
        }
        (Some(w), _) => w.clone(),
        (None, k) => vec![1; k.unwrap_or(1)],
    };
    AlgebraSpec::new(a.ring.clone(), weights, a.trunc).map_err(|e| e.to_string())
}

fn with_element(spec: &Arc<AlgebraSpec>, expr: &str, f: impl FnOnce(DPElement) -> String) -> Outcome {
    let ast = match parse(expr, spec.generator_count()) {
        Ok(ast) => ast,
        Err(e) => {
            let caret = " ".repeat(expr[..e.offset.min(expr.len())].chars().count());
            return Outcome::usage(format!("error: {e}\n  {expr}\n  {caret}^\n"));
        }
    };
    match eval(&ast, spec) {
        Ok(e) => Outcome::ok(f(e)),
        Err(e) => Outcome::usage(format!("error: {e}\n")),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn show_element(as_json: bool, e: &DPElement) -> String {
    if as_json {
        pretty(&serde_json::to_value(json::element_json(e).expect("modulus fits")).expect("serializable"))
    } else {
        format!("{e}\n")
    }
}

fn show_omega(as_json: bool, w: &OmegaElement) -> String {
    if as_json {
        pretty(&serde_json::to_value(json::omega_json(w).expect("modulus fits")).expect("serializable"))
    } else {
        format!("{w}\n")
    }
}

fn factors_json(f: &InvariantFactors) -> Value {
    json!(f.0.iter().map(|d| d.to_string()).collect::<Vec<_>>())
}

fn order_text(order: &BigInt) -> String {
    if order.is_zero() {
        "free".into()
    } else {
        format!("order {order}")
    }
}

fn header(spec: &AlgebraSpec) -> Value {
    json!({
        "ring": json::ring_json(spec.ring()).expect("modulus fits"),
        "weights": spec.generator_weights(),
        "trunc": spec.truncation(),
    })
}

fn monomial_json(m: &DPMonomial) -> Value {
    json!(m.factors().iter().map(|&(i, e)| (i + 1, e)).collect::<Vec<_>>())
}

fn phi_value(phi: PhiMonomial) -> Value {
    match phi {
        PhiMonomial::Unit => json!("unit"),
        PhiMonomial::Phi { p, e } => json!([p, e]),
    }
}

fn omega_basis(spec: &Arc<AlgebraSpec>, as_json: bool) -> String {
    let ring = spec.ring();
    let slices = omega_free_basis(spec);
    if as_json {
        let mut out = header(spec);
        out["slices"] = slices
            .iter()
            .map(|s| {
                let elements: Vec<Value> = s
                    .elements
                    .iter()
                    .map(|e| {
                        json!({
                            "label": e.to_string(),
                            "dx": e.generator + 1,
                            "phi": phi_value(e.phi),
                            "coeff": e.coeff.as_ref().map(monomial_json),
                            "order": e.order(ring).to_string(),
                        })
                    })
                    .collect();
                json!({
                    "weight": s.weight,
                    "invariant_factors": factors_json(&s.invariant_factors(ring)),
                    "elements": elements,
                })
            })
            .collect();
        return pretty(&out);
    }
    let mut s = String::new();
    for slice in &slices {
        let _ = writeln!(s, "weight {}: {}", slice.weight, slice.invariant_factors(ring));
        for e in &slice.elements {
            let _ = writeln!(s, "  {e}  {}", order_text(&e.order(ring)));
        }
    }
    s
}

fn gamma_label(generator: usize, n: u64) -> String {
    if n == 1 {
        format!("x{}", generator + 1)
    } else {
        format!("g{n}(x{})", generator + 1)
    }
}

fn indec(spec: &Arc<AlgebraSpec>, as_json: bool) -> String {
    let q = indecomposables(spec);
    let weights = 1..=spec.truncation();
    if as_json {
        let mut out = header(spec);
        out["slices"] = weights
            .map(|w| {
                let summands: Vec<Value> = q
                    .at_weight(w)
                    .iter()
                    .map(|s| {
                        let n = w / spec.generator_weight(s.generator);
                        json!({
                            "label": gamma_label(s.generator, n),
                            "generator": s.generator + 1,
                            "order": q.ring.effective_annihilator(&s.annihilator).to_string(),
                        })
                    })
                    .collect();
                json!({"weight": w, "invariant_factors": factors_json(&q.invariant_factors(w)), "summands": summands})
            })
            .collect();
        return pretty(&out);
    }
    let mut s = String::new();
    for w in weights {
        let _ = writeln!(s, "weight {w}: {}", q.invariant_factors(w));
        for summand in q.at_weight(w) {
            let n = w / spec.generator_weight(summand.generator);
            let order = q.ring.effective_annihilator(&summand.annihilator);
            let _ = writeln!(s, "  {}  {}", gamma_label(summand.generator, n), order_text(&order));
        }
    }
    s
}

fn slices_json(slices: &[SliceComparison]) -> Value {
    slices
        .iter()
        .map(|c| {
            json!({
                "weight": c.weight,
                "oracle": factors_json(&c.oracle),
                "closed_form": factors_json(&c.closed_form),
                "equal": c.equal(),
            })
        })
        .collect()
}

fn slice_lines(slices: &[SliceComparison]) -> String {
    let mut s = String::new();
    for c in slices {
        let verdict = if c.equal() { "equal" } else { "DIFFERENT" };
        let _ = writeln!(s, "  weight {}: oracle {}, closed form {}, {verdict}", c.weight, c.oracle, c.closed_form);
    }
    s
}

fn law_line(r: &LawRecord) -> String {
    match (&r.status, &r.counterexample) {
        (Status::Pass, _) => format!("pass {} (checked {})", r.law, r.checked),
        (Status::Fail, Some(c)) => format!("FAIL {}: {c}", r.law),
        (Status::Fail, None) => format!("FAIL {}", r.law),
    }
}

fn law_lines(report: &Report, indent: &str) -> String {
    report.records.iter().map(|r| format!("{indent}{}\n", law_line(r))).collect()
}

fn oracle_omega(spec: &Arc<AlgebraSpec>, a: &AlgebraArgs) -> Outcome {
    let theorem = verify_main_theorem(spec, a.samples.min(50), a.seed);
    let indec = verify_indecomposables(spec);
    let passed = theorem.passed() && indec.passed();
    let text = if a.json {
        let mut out = header(spec);
        out["main_theorem"] = json!({
            "passed": theorem.passed(),
            "slices": slices_json(&theorem.slices),
            "laws": theorem.laws.records,
        });
        out["indecomposables"] = json!({"passed": indec.passed(), "slices": slices_json(&indec.slices)});
        out["passed"] = json!(passed);
        pretty(&out)
    } else {
        let mut s = String::from("I/I^2 against U(A) (x) V:\n");
        s.push_str(&slice_lines(&theorem.slices));
        s.push_str(&law_lines(&theorem.laws, "  "));
        s.push_str("A/A^2 against U(0) (x) V:\n");
        s.push_str(&slice_lines(&indec.slices));
        s.push_str(if passed { "verified\n" } else { "MISMATCH\n" });
        s
    };
    Outcome::checked(passed, text)
}

/// Runs one named suite on `spec`. `congruence` and `gcd` ignore the algebra.
pub fn run_suite(suite: Suite, spec: &Arc<AlgebraSpec>, samples: usize, seed: u64) -> Report {
    match suite {
        Suite::Axioms => {
            let alg = FreeDp { spec: spec.clone() };
            check_dp_axioms(&alg, samples, seed, spec.truncation().max(2), |rng| random_element(spec, rng))
        }
        Suite::Congruence => {
            let mut report = Report::new();
            for p in primes_up_to(13) {
                for k in 1..=40 {
                    let r = cartan_congruence_residue(k, p).expect("p is prime");
                    report.check(CARTAN, r.value().is_one(), || format!("k = {k}, p = {p}, residue {r}"));
                }
            }
            report
        }
        Suite::Gcd => {
            let mut report = Report::new();
            for n in 2..=64 {
                let expected = prime_power(n).map_or(1, |(p, _)| p);
                let g = gcd_middle_binomials(n);
                report.check(GCD_LEMMA, g == BigInt::from(expected), || format!("n = {n}: gcd {g}, expected {expected}"));
            }
            report
        }
        Suite::Inversion => {
            let mut report = Report::new();
            for i in 0..spec.generator_count() {
                let x = DPElement::generator(spec, i);
                for n in 1..=spec.truncation() / spec.generator_weight(i) {
                    let expected = match phi_of(n) {
                        Some(phi) => OmegaElement::term(i, EnvelopeElement::phi(spec, phi)),
                        None => OmegaElement::zero(spec),
                    };
                    let got = phi_inversion(n, &x);
                    report.check(INVERSION, got == expected, || format!("n = {n}, x{}: got {got}", i + 1));
                }
            }
            report
        }
        Suite::Beck => {
            let mut report = Report::new();
            for (k, m) in sample_modules(spec).iter().enumerate() {
                report.merge(verify_beck_axioms(m, samples, seed.wrapping_add(k as u64)));
            }
            if let Some(bad) = corrupted_module(spec) {
                let caught = !verify_beck_axioms(&bad, samples, seed).passed();
                report.check(NEGATIVE_CONTROL, caught, || "phi acting on a free summand went unnoticed".into());
            }
            report
        }
        Suite::Remark54 => remark_identities(spec),
    }
}

/// Modules used by the `beck` suite: cyclic ones, the torsion mixture
/// `R + R/2 + R/3`, a truncated `U(0) (x) V` and `Omega` itself.
pub fn sample_modules(spec: &Arc<AlgebraSpec>) -> Vec<UModule> {
    let free = UModule::cyclic(spec, 0, &[]);
    let two = UModule::cyclic(spec, 2, &[(2, 1)]);
    let three = UModule::cyclic(spec, 3, &[(3, 1)]);
    let mixture = free.direct_sum(&two).and_then(|m| m.direct_sum(&three)).expect("same algebra");
    let rank = spec.generator_count();
    vec![free, two, three, mixture, UModule::trivial_u0(spec, rank, spec.truncation()), OmegaModule::new(spec).module]
}

/// `R` with `phi_p` acting as the identity, for a prime `p` that is not a
/// zero divisor killing `R`; `phi_p` of a free element must be `p`-torsion,
/// so this breaks the axioms. `None` if every small prime divides the modulus.
pub fn corrupted_module(spec: &Arc<AlgebraSpec>) -> Option<UModule> {
    let p = primes_up_to(7).into_iter().find(|&p| match spec.ring().modulus() {
        None => true,
        Some(m) => !(m % BigInt::from(p)).is_zero(),
    })?;
    Some(UModule::cyclic(spec, 0, &[(p, 1)]))
}
