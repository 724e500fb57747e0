use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use homcard::acceptance::{self, AcceptanceConfig};
use homcard::arith::{self, format_ratio, Rational};
use homcard::groups::{self, brute_force_commuting_tuples, chi_bg, hkr_chi};
use homcard::mahler::{self, certify_continuity, mahler_extrapolate};
use homcard::resolutions::{self, SimplicialCardinalitySeq};
use homcard::series::{self, TruncatedSeries};
use homcard::{Budget, Evaluator, FiniteGroup, SpaceExpr};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "homcard", version, about = "Exact chi-sequences, l-adic extrapolation and homotopy cardinalities")]
struct Cli {
    /// Working prime.
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// Prime for l-adic valuations.
    #[arg(long, global = true, default_value_t = 2)]
    l: u64,
    /// Largest index computed.
    #[arg(long = "N", global = true, default_value_t = 12)]
    n_max: usize,
    /// Enumeration cap (overrides CC_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = acceptance::DEFAULT_SEED)]
    seed: u64,
    /// Accept l not dividing p - 1.
    #[arg(long, global = true)]
    allow_any_l: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Bar,
    Cech,
    Iterbar,
    Simpgroup,
    Wbar,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// chi_n(X).
    Chi {
        /// Space as inline JSON or a file path.
        #[arg(long)]
        space: String,
        #[arg(long)]
        n: u32,
    },
    /// lambda_X(0..N) and its Mahler coefficients.
    Sequence {
        #[arg(long)]
        space: String,
    },
    /// Continuity certificate and extrapolation to -1 with target |X|.
    Extrapolate {
        #[arg(long)]
        space: String,
    },
    /// Closed form, table and p-typical cardinality for BG.
    GroupChi {
        /// Spec such as "D4" or "C3xS3", inline JSON table, or a file path.
        #[arg(long)]
        group: String,
    },
    /// Coefficients of sum_m chi_n(B Sigma_m) x^m.
    Sym {
        #[arg(long)]
        n: i64,
        #[arg(long = "M", default_value_t = 12)]
        m: usize,
    },
    /// Coefficients of sum_m |B Sigma_m|_p x^m.
    SymCard {
        #[arg(long = "M", default_value_t = 12)]
        m: usize,
    },
    /// Skeleton table and convergence report of a resolution.
    Resolve {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Group order for bar, cech, iterbar.
        #[arg(long, default_value_t = 3)]
        g: u64,
        /// |X| for cech, e.g. "1/3".
        #[arg(long, default_value = "1")]
        card: String,
        /// Iteration depth for iterbar.
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Moore complex orders for simpgroup and wbar, e.g. "1,3".
        #[arg(long, value_delimiter = ',')]
        moore: Vec<u64>,
    },
    /// Runs the acceptance suite.
    VerifyAll,
}

struct Ctx {
    p: u64,
    l: u64,
    n_max: usize,
    budget: Budget,
    format: Format,
    seed: u64,
    allow_any_l: bool,
}

impl Ctx {
    fn evaluator(&self) -> Result<Evaluator> {
        Ok(Evaluator::new(self.p)?.with_budget(self.budget))
    }

    fn check_l(&self, p: Option<u64>) -> Result<()> {
        arith::ensure_prime(self.l)?;
        if let Some(p) = p {
            if !self.allow_any_l && (p - 1) % self.l != 0 {
                bail!(
                    "l = {} does not divide p - 1 = {}; pass --allow-any-l to proceed",
                    self.l,
                    p - 1
                );
            }
        }
        Ok(())
    }
}

/// Inline JSON when it parses, otherwise a file path.
fn read_json_arg(arg: &str) -> Result<Value> {
    let trimmed = arg.trim();
    if let Ok(v) = serde_json::from_str::<Value>(trimmed) {
        return Ok(v);
    }
    if matches!(trimmed, "Point" | "Empty") {
        return Ok(Value::String(trimmed.into()));
    }
    let path = Path::new(trimmed);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {trimmed}"))?;
        return serde_json::from_str(&text).with_context(|| format!("parsing {trimmed}"));
    }
    bail!("{trimmed:?} is neither valid JSON nor a readable file")
}

fn read_space(arg: &str) -> Result<SpaceExpr> {
    Ok(SpaceExpr::from_json(&read_json_arg(arg)?)?)
}

fn read_group(arg: &str) -> Result<FiniteGroup> {
    if let Ok(g) = FiniteGroup::from_spec(arg.trim()) {
        return Ok(g);
    }
    Ok(FiniteGroup::from_json(&read_json_arg(arg)?)?)
}

fn ratio(x: &Rational) -> Value {
    Value::String(format_ratio(x))
}

// A closed pipe (`| head`) is not an error worth reporting.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json(v: &Value) {
    emit(&serde_json::to_string_pretty(v).expect("json"));
}

fn print_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) {
    let mut out = header.join(",");
    for row in rows {
        out.push('\n');
        out.push_str(&row.join(","));
    }
    emit(&out);
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Printed status: whether every check passed.
type Status = bool;

fn cmd_chi(ctx: &Ctx, space: &str, n: u32) -> Result<Status> {
    let x = read_space(space)?;
    let value = ctx.evaluator()?.chi(&x, n)?;
    match ctx.format {
        Format::Json => print_json(&json!({
            "space": x.to_json(), "p": ctx.p, "n": n, "chi": ratio(&value),
        })),
        Format::Csv => print_csv(&["n", "chi"], [vec![n.to_string(), value.to_string()]]),
    }
    Ok(true)
}

fn cmd_sequence(ctx: &Ctx, space: &str) -> Result<Status> {
    let x = read_space(space)?;
    let ev = ctx.evaluator()?;
    let seq = ev.sequence(&x)?;
    let xs = seq.prefix(ctx.n_max + 1)?;
    let xbar = arith::inverse_binomial_transform(&xs);
    match ctx.format {
        Format::Json => print_json(&json!({
            "space": x.to_json(),
            "p": ctx.p,
            "d": seq.degree(),
            "closed_form": seq.closed().map(|e| e.to_json()),
            "lambda": xs.iter().map(ratio).collect::<Vec<_>>(),
            "xbar": xbar.iter().map(ratio).collect::<Vec<_>>(),
        })),
        Format::Csv => print_csv(
            &["n", "lambda", "xbar"],
            xs.iter()
                .zip(&xbar)
                .enumerate()
                .map(|(n, (a, b))| vec![n.to_string(), a.to_string(), b.to_string()]),
        ),
    }
    Ok(true)
}

fn cmd_extrapolate(ctx: &Ctx, space: &str) -> Result<Status> {
    if ctx.p == 2 {
        return Err(homcard::Error::EvenPrime(2).into());
    }
    ctx.check_l(Some(ctx.p))?;
    let x = read_space(space)?;
    let ev = ctx.evaluator()?;
    let validation = x.validate_p_small(ctx.p);
    let seq = ev.sequence(&x)?;
    let card = ev.cardinality(&x)?;
    let cert = certify_continuity(&seq, ctx.l, ctx.n_max)?;
    let report = mahler_extrapolate(&seq, ctx.l, ctx.n_max, Some(card.clone()))?;
    let passed = cert.passed() && report.passed();
    match ctx.format {
        Format::Json => print_json(&json!({
            "space": x.to_json(),
            "p": ctx.p,
            "validation": validation,
            "target": ratio(&card),
            "certificate": cert,
            "report": report.to_json(),
        })),
        Format::Csv => {
            let xbar = arith::inverse_binomial_transform(&seq.prefix(ctx.n_max + 1)?);
            print_csv(
                &["n", "xbar", "v_xbar", "bound", "partial", "v_partial_minus_target"],
                (0..=ctx.n_max).map(|n| {
                    vec![
                        n.to_string(),
                        xbar[n].to_string(),
                        cert.valuations[n].1.to_string(),
                        mahler::divisibility_bound(n, cert.d, cert.slack).to_string(),
                        report.partials[n].to_string(),
                        report.target_valuations[n].to_string(),
                    ]
                }),
            )
        }
    }
    Ok(passed)
}

fn cmd_group_chi(ctx: &Ctx, spec: &str) -> Result<Status> {
    let g = read_group(spec)?;
    let p = arith::ensure_prime(ctx.p)?;
    let closed = hkr_chi(&g, p, &ctx.budget)?;
    let by_moebius = groups::p_typical_cardinality_by_moebius(&g, p, &ctx.budget)?;
    let by_counting = groups::p_typical_cardinality_by_counting(&g, p);
    let mut ok = by_moebius == by_counting && closed.extrapolate_minus_one() == by_counting;
    let mut rows = Vec::new();
    for n in 0..=ctx.n_max {
        let counted = arith::big(chi_bg(&g, p, n, &ctx.budget)?);
        let formula = closed.eval(n as i64);
        // the enumeration oracle runs only while it fits the budget
        let brute = brute_force_commuting_tuples(&g, p, n, &ctx.budget)
            .ok()
            .map(arith::big);
        ok &= counted == formula && brute.as_ref().is_none_or(|b| *b == counted);
        rows.push((n, counted, formula, brute));
    }
    match ctx.format {
        Format::Json => print_json(&json!({
            "group": g.display_name(),
            "order": g.order(),
            "p": p,
            "closed_form": closed.to_json(),
            "closed_form_text": closed.to_string(),
            "table": rows.iter().map(|(n, c, f, b)| json!({
                "n": n, "chi": ratio(c), "closed_form": ratio(f), "brute_force": b.as_ref().map(ratio),
            })).collect::<Vec<_>>(),
            "p_typical_cardinality": ratio(&by_moebius),
            "p_typical_by_counting": ratio(&by_counting),
            "consistent": ok,
        })),
        Format::Csv => print_csv(
            &["n", "chi", "closed_form", "brute_force"],
            rows.iter().map(|(n, c, f, b)| {
                vec![
                    n.to_string(),
                    c.to_string(),
                    f.to_string(),
                    b.as_ref().map_or_else(String::new, ToString::to_string),
                ]
            }),
        ),
    }
    Ok(ok)
}

fn print_series(ctx: &Ctx, s: &TruncatedSeries, meta: Value) {
    match ctx.format {
        Format::Json => {
            let mut v = meta;
            v["coefficients"] = s.coeffs().iter().map(ratio).collect();
            print_json(&v);
        }
        Format::Csv => print_csv(
            &["m", "coefficient"],
            s.coeffs()
                .iter()
                .enumerate()
                .map(|(m, c)| vec![m.to_string(), c.to_string()]),
        ),
    }
}

fn cmd_sym(ctx: &Ctx, n: i64, m: usize) -> Result<Status> {
    let s = series::chi_symmetric_gen_fun(ctx.p, n, m)?;
    print_series(ctx, &s, json!({"p": ctx.p, "n": n, "M": m}));
    Ok(true)
}

fn cmd_sym_card(ctx: &Ctx, m: usize) -> Result<Status> {
    let s = series::sym_cardinality_series(ctx.p, m)?;
    let ok = (0..=m).all(|k| *s.coeff(k) == series::sym_cardinality_product(ctx.p, k as u64));
    print_series(ctx, &s, json!({"p": ctx.p, "M": m, "matches_product": ok}));
    Ok(ok)
}

fn cmd_resolve(ctx: &Ctx, kind: Kind, g: u64, card: &str, d: u32, moore: &[u64]) -> Result<Status> {
    if g == 0 {
        bail!("--g must be positive");
    }
    let seq: SimplicialCardinalitySeq = match kind {
        Kind::Bar => resolutions::bar_sequence(g),
        Kind::Cech => resolutions::cech_sequence(arith::parse_ratio(card)?, g),
        Kind::Iterbar => {
            if d == 0 {
                bail!("--d must be at least 1");
            }
            resolutions::iterated_bar_sequence(g, d)
        }
        Kind::Simpgroup | Kind::Wbar => {
            if moore.is_empty() {
                bail!("--moore is required for {kind:?}");
            }
            let r = resolutions::simplicial_group_sequences(moore)?;
            if kind == Kind::Simpgroup {
                r.bar
            } else {
                r.wbar
            }
        }
    };
    ctx.check_l(seq.p)?;
    let report = resolutions::resolution_convergence(&seq, ctx.l, ctx.n_max, None)?;
    match ctx.format {
        Format::Json => print_json(&serde_json::to_value(&report)?),
        Format::Csv => print_csv(
            &["n", "x", "xbar", "sk", "valuation"],
            report.rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.x.to_string(),
                    r.xbar.to_string(),
                    r.sk.to_string(),
                    r.valuation.to_string(),
                ]
            }),
        ),
    }
    Ok(report.passed())
}

fn cmd_verify_all(ctx: &Ctx) -> Result<Status> {
    let cfg = AcceptanceConfig {
        seed: ctx.seed,
        budget: ctx.budget,
        ..AcceptanceConfig::default()
    };
    let outcomes = acceptance::run_all(&cfg);
    let ok = outcomes.iter().all(|o| o.passed);
    match ctx.format {
        Format::Json => print_json(&json!({
            "seed": ctx.seed,
            "passed": ok,
            "criteria": outcomes,
        })),
        Format::Csv => print_csv(
            &["id", "name", "status", "elapsed_ms", "detail"],
            outcomes.iter().map(|o| {
                vec![
                    o.id.to_string(),
                    csv_field(o.name),
                    if o.passed { "pass" } else { "fail" }.to_string(),
                    o.elapsed_ms.to_string(),
                    csv_field(&o.detail),
                ]
            }),
        ),
    }
    if !ok {
        if let Some(first) = outcomes.iter().find(|o| !o.passed) {
            eprintln!("first failure: {}", first.line());
        }
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<Status> {
    let budget = match cli.budget {
        Some(cap) => Budget::from_env().with_enumeration(cap),
        None => Budget::from_env(),
    };
    let ctx = Ctx {
        p: cli.p,
        l: cli.l,
        n_max: cli.n_max,
        budget,
        format: cli.format,
        seed: cli.seed,
        allow_any_l: cli.allow_any_l,
    };
    match &cli.command {
        Command::Chi { space, n } => cmd_chi(&ctx, space, *n),
        Command::Sequence { space } => cmd_sequence(&ctx, space),
        Command::Extrapolate { space } => cmd_extrapolate(&ctx, space),
        Command::GroupChi { group } => cmd_group_chi(&ctx, group),
        Command::Sym { n, m } => cmd_sym(&ctx, *n, *m),
        Command::SymCard { m } => cmd_sym_card(&ctx, *m),
        Command::Resolve { kind, g, card, d, moore } => cmd_resolve(&ctx, *kind, *g, card, *d, moore),
        Command::VerifyAll => cmd_verify_all(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
