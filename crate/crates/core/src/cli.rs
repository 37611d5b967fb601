//! The `ordagg` command line. Every command is a function of its arguments,
//! input files and seed; [`run`] returns the bytes to print and the exit code
//! instead of printing, so the commands can be tested in-process.
//!
//! Exit codes: 0 for membership (or no violation found), 1 when a witness is
//! found (or a witness fails to replay), 2 for input errors.
//!
//! Size caps can be lowered or raised through the environment:
//! `ORDAGG_MAX_ARITY`, `ORDAGG_MAX_ITEMS` (orbit listings),
//! `ORDAGG_MAX_CN_ARITY` and `ORDAGG_MAX_CELLS` (tables).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{discrete_representative, is_smooth, table_predicates, Chain, ChainEmbedding, DiscreteTable, MAX_TABLE_CELLS};
use crate::document::{ReportDocument, Subject, TableDocument};
use crate::error::{Error, Result};
use crate::functions::{parse_function, Aggregator};
use crate::lattice::{enumerate_cn_capped, MAX_CN_ARITY};
use crate::meaningfulness::ranges::{ComparisonForm, GShape};
use crate::meaningfulness::witness::{ReplayTarget, Witness};
use crate::meaningfulness::{
    check_cm_independent, check_cm_single, check_order_invariant, comparison_witness_through, decompose_nondecreasing, falsify_cm,
    falsify_invariance, CmMode, Family, OrderInvariantForm,
};
use crate::orbits::{enumerate_orbits_capped, enumerate_strong_orbits, MAX_ENUM_ARITY, MAX_ENUM_ITEMS};
use crate::scale::{IntervalSpec, PlBijection};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TRIALS: usize = 1000;
/// Random bijections used to spot-check an order invariant form in `classify`.
pub const SPOT_CHECKS: usize = 16;

/// Name and version line heading every report.
pub fn tool_line() -> String {
    format!("ordagg {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Parser, Debug)]
#[command(name = "ordagg", version, about = "Meaningful aggregation on ordinal scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    All,
    Oi,
    Cm1,
    Cmi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Inv,
    Cm1,
    Cmi,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the orbits of E^n in canonical order.
    Orbits {
        n: usize,
        interval: IntervalSpec,
        /// List strong orbits (independent transformations per coordinate).
        #[arg(long)]
        strong: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the nonconstant nondecreasing set functions on [n].
    EnumerateCn {
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Classify a table document.
    Classify {
        table: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        family: FamilyArg,
        /// Interval shape; overrides the table's `interval:` line.
        #[arg(long)]
        interval: Option<IntervalSpec>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Prefer comparison witnesses involving the joint pattern of two
        /// cells, written `a1,a2/b1,b2` in ranks.
        #[arg(long)]
        focus: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the discrete representative of a function on a chain of k ranks.
    Represent {
        function: String,
        k: usize,
        interval: IntervalSpec,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Search for a violation of invariance or comparison meaningfulness.
    Falsify {
        function: String,
        #[arg(long, value_enum, default_value = "inv")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "open")]
        interval: IntervalSpec,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Replay the witnesses stored in a report.
    VerifyWitness { report: PathBuf },
}

/// Output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, code: i32) -> Self {
        Outcome { stdout, stderr: String::new(), code }
    }
}

fn env_cap<T: std::str::FromStr>(name: &str, default: T) -> T {
    std::env::var(name).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(default)
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { Outcome::ok(text, 0) } else { Outcome { stdout: String::new(), stderr: text, code } };
        }
    };
    match dispatch(cli.command) {
        Ok(o) => o,
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: 2 },
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Orbits { n, interval, strong, format } => cmd_orbits(n, interval, strong, format == Format::Json),
        Command::EnumerateCn { n, format } => cmd_enumerate_cn(n, format == Format::Json),
        Command::Classify { table, family, interval, seed, focus, format } => {
            let doc = TableDocument::parse(&read(&table)?)?;
            let families = match family {
                FamilyArg::All => vec![Family::OrderInvariant, Family::CmSingle, Family::CmIndependent],
                FamilyArg::Oi => vec![Family::OrderInvariant],
                FamilyArg::Cm1 => vec![Family::CmSingle],
                FamilyArg::Cmi => vec![Family::CmIndependent],
            };
            let options = ClassifyOptions {
                families,
                interval,
                seed,
                lenient: family == FamilyArg::All,
                focus: focus.as_deref().map(parse_focus).transpose()?,
            };
            let (report, code) = cmd_classify(doc, &options)?;
            Ok(Outcome::ok(render(&report, format), code))
        }
        Command::Represent { function, k, interval, format } => {
            let doc = cmd_represent(&function, k, interval)?;
            Ok(Outcome::ok(if format == Format::Json { doc.to_json() } else { doc.to_text() }, 0))
        }
        Command::Falsify { function, mode, trials, seed, interval, format } => {
            let (report, code) = cmd_falsify(&function, mode_family(mode), trials, seed, interval)?;
            Ok(Outcome::ok(render(&report, format), code))
        }
        Command::VerifyWitness { report } => {
            let report = ReportDocument::parse(&read(&report)?)?;
            let (text, code) = cmd_verify_witness(&report)?;
            Ok(Outcome::ok(text, code))
        }
    }
}

fn mode_family(m: ModeArg) -> Family {
    match m {
        ModeArg::Inv => Family::OrderInvariant,
        ModeArg::Cm1 => Family::CmSingle,
        ModeArg::Cmi => Family::CmIndependent,
    }
}

fn render(report: &ReportDocument, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    }
}

/// Orbit listing followed by `count: N`.
pub fn cmd_orbits_text(n: usize, e: IntervalSpec, strong: bool) -> Result<String> {
    Ok(cmd_orbits(n, e, strong, false)?.stdout)
}

fn cmd_orbits(n: usize, e: IntervalSpec, strong: bool, json: bool) -> Result<Outcome> {
    let max_arity = env_cap("ORDAGG_MAX_ARITY", MAX_ENUM_ARITY);
    let max_items = env_cap("ORDAGG_MAX_ITEMS", MAX_ENUM_ITEMS);
    let lines: Vec<String> = if strong {
        if n > max_arity {
            return Err(Error::SizeLimit(format!("orbit enumeration is capped at n = {max_arity}, got {n}")));
        }
        let levels = 1 + e.boundary_count() as u128;
        let count = levels.checked_pow(n as u32).unwrap_or(u128::MAX);
        if count > max_items {
            return Err(Error::SizeLimit(format!("{count} strong orbits exceed the limit of {max_items}")));
        }
        enumerate_strong_orbits(n, e)?.iter().map(ToString::to_string).collect()
    } else {
        enumerate_orbits_capped(n, e, max_arity, max_items)?.iter().map(ToString::to_string).collect()
    };
    Ok(Outcome::ok(listing(lines, json), 0))
}

fn listing(lines: Vec<String>, json: bool) -> String {
    if json {
        let v = serde_json::json!({ "count": lines.len(), "items": lines });
        return serde_json::to_string_pretty(&v).expect("listing serialises") + "\n";
    }
    let mut out = String::new();
    for l in &lines {
        let _ = writeln!(out, "{l}");
    }
    let _ = writeln!(out, "count: {}", lines.len());
    out
}

fn cmd_enumerate_cn(n: usize, json: bool) -> Result<Outcome> {
    let cap = env_cap("ORDAGG_MAX_CN_ARITY", MAX_CN_ARITY);
    let lines = enumerate_cn_capped(n, cap)?.iter().map(ToString::to_string).collect();
    Ok(Outcome::ok(listing(lines, json), 0))
}

/// Discrete representative of a named or min-true-set function.
pub fn cmd_represent(spec: &str, k: usize, e: IntervalSpec) -> Result<TableDocument> {
    let f = parse_function(spec)?;
    let cells = (k as u128).checked_pow(f.arity() as u32).unwrap_or(u128::MAX);
    let cap = env_cap("ORDAGG_MAX_CELLS", MAX_TABLE_CELLS) as u128;
    if cells > cap {
        return Err(Error::SizeLimit(format!("{cells} cells exceed the limit of {cap}")));
    }
    let table = discrete_representative(f.as_ref(), Chain::new(k)?, e)?;
    Ok(TableDocument::new(table).with_interval(e))
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn g_line<K: ToString>(family: Family, form: &ComparisonForm<K>, out: &mut Vec<(String, String)>) {
    for c in &form.classes {
        let value = match &c.shape {
            GShape::Constant { value } => format!("const {value}"),
            GShape::Monotone { coordinate, increasing, samples } => {
                let pts: Vec<String> = samples.iter().map(|(r, v)| format!("{r}:{v}")).collect();
                let dir = if *increasing { "increasing" } else { "decreasing" };
                format!("{dir} in x{} [{}]", coordinate + 1, pts.join(" "))
            }
        };
        let value = match c.group {
            Some(g) => format!("{value} group {}", g + 1),
            None => value,
        };
        out.push((format!("{family} {}", c.class.to_string()), value));
    }
    if let Some(g) = &form.g_classes {
        out.push((format!("{family} g-classes"), g.len().to_string()));
    }
}

/// Replays an order invariant form through random bijections of the
/// canonical embedding: `F(φ f(a)) = φ f(G(a))` on every cell.
fn spot_check(table: &DiscreteTable, form: &OrderInvariantForm, e: IntervalSpec, seed: u64) -> Result<bool> {
    let k = table.uniform_size().expect("order invariant tables are uniform");
    let base = ChainEmbedding::canonical(Chain::new(k)?, e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..SPOT_CHECKS {
        let phi = PlBijection::random_with(&mut rng, 1 + t % 4);
        let emb = base.transformed(&phi);
        for (a, &g) in table.cells().zip(table.entries()) {
            let x: Vec<_> = a.iter().map(|&r| emb.value(r).clone()).collect();
            if &form.eval(&x)? != emb.value(g) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn with_labels(mut w: Witness, doc: &TableDocument) -> Witness {
    if doc.input_labels.is_some() && !w.cells.is_empty() {
        let cells: Vec<String> = w.cells.iter().map(|c| doc.cell_label(c)).collect();
        w.observed = format!("{} [labelled cells: {}]", w.observed, cells.join(" "));
    }
    w
}

/// Parses `a1,a2/b1,b2`.
pub fn parse_focus(s: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let cell = |c: &str| -> Result<Vec<usize>> {
        c.split(',')
            .map(|r| r.trim().parse().map_err(|_| Error::Precondition(format!("bad rank {r:?} in --focus"))))
            .collect()
    };
    let (a, b) = s.split_once('/').ok_or_else(|| Error::Precondition("--focus expects `a1,a2/b1,b2`".into()))?;
    Ok((cell(a)?, cell(b)?))
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub families: Vec<Family>,
    /// Overrides the document's interval.
    pub interval: Option<IntervalSpec>,
    pub seed: u64,
    /// Report families whose preconditions fail as `n/a` instead of failing.
    pub lenient: bool,
    pub focus: Option<(Vec<usize>, Vec<usize>)>,
}

impl ClassifyOptions {
    pub fn new(families: Vec<Family>) -> Self {
        ClassifyOptions { families, interval: None, seed: DEFAULT_SEED, lenient: false, focus: None }
    }
}

/// Classifies a table for the requested families.
pub fn cmd_classify(doc: TableDocument, options: &ClassifyOptions) -> Result<(ReportDocument, i32)> {
    let ClassifyOptions { families, interval, seed, lenient, focus } = options;
    let (seed, lenient) = (*seed, *lenient);
    let e = interval
        .or(doc.interval)
        .ok_or_else(|| Error::Precondition("declare the interval shape with `interval:` or --interval".into()))?;
    let cap = env_cap("ORDAGG_MAX_CELLS", MAX_TABLE_CELLS);
    if doc.table.len() > cap {
        return Err(Error::SizeLimit(format!("{} cells exceed the limit of {cap}", doc.table.len())));
    }
    let table = &doc.table;
    let mut verdicts = Vec::new();
    let mut decomposition = Vec::new();
    let mut witnesses = Vec::new();
    let mut members = Vec::new();
    let mut all_member = true;
    for &family in families {
        let applicable = match family {
            Family::OrderInvariant => table.uniform_size().is_some(),
            Family::CmSingle => table.common_input_size().is_some(),
            Family::CmIndependent => true,
        };
        if !applicable {
            if lenient {
                verdicts.push((family.to_string(), "n/a".to_string()));
                continue;
            }
            return Err(Error::ChainMismatch(format!("{family} does not apply to a table on these chains")));
        }
        let mut spot = None;
        let witness = match family {
            Family::OrderInvariant => match check_order_invariant(table, e)? {
                crate::meaningfulness::Verdict::Member(form) => {
                    for (o, v) in &form.entries {
                        decomposition.push((format!("{family} {o}"), v.to_string()));
                    }
                    let ok = spot_check(table, &form, e, seed)?;
                    spot = Some(format!("{SPOT_CHECKS} bijections, {}", if ok { "ok" } else { "failed" }));
                    None
                }
                crate::meaningfulness::Verdict::Witness(w) => Some(w),
            },
            Family::CmSingle => match check_cm_single(table, e)? {
                crate::meaningfulness::Verdict::Member(form) => {
                    g_line(family, &form, &mut decomposition);
                    None
                }
                crate::meaningfulness::Verdict::Witness(w) => Some(w),
            },
            Family::CmIndependent => match check_cm_independent(table, e)? {
                crate::meaningfulness::Verdict::Member(form) => {
                    g_line(family, &form, &mut decomposition);
                    None
                }
                crate::meaningfulness::Verdict::Witness(w) => Some(w),
            },
        };
        let witness = match (witness, focus, family) {
            (Some(w), Some((a, b)), Family::CmSingle | Family::CmIndependent) => {
                let mode = if family == Family::CmSingle { CmMode::Single } else { CmMode::Independent };
                Some(comparison_witness_through(table, e, mode, a, b)?.unwrap_or(w))
            }
            (w, _, _) => w,
        };
        verdicts.push((family.to_string(), yes_no(witness.is_none())));
        if let Some(s) = spot {
            verdicts.push(("spot-check".to_string(), s));
        }
        match witness {
            Some(w) => {
                all_member = false;
                witnesses.push(with_labels(w, &doc));
            }
            None => members.push(family),
        }
    }
    let monotone = crate::chain::nondecreasing_violation(table).is_none();
    verdicts.push(("nondecreasing".to_string(), yes_no(monotone)));
    if let Ok(p) = table_predicates(table) {
        verdicts.push(("idempotent".to_string(), yes_no(p.idempotent)));
        verdicts.push(("internal".to_string(), yes_no(p.internal)));
        verdicts.push(("symmetric".to_string(), yes_no(p.symmetric)));
        verdicts.push(("self-dual".to_string(), yes_no(p.self_dual)));
    }
    verdicts.push(("smooth".to_string(), yes_no(is_smooth(table).is_none())));
    verdicts.push(("surjective".to_string(), yes_no(table.is_surjective())));
    if monotone {
        for &family in &members {
            let d = decompose_nondecreasing(table, family, e)?;
            for entry in &d.entries {
                let value = match &entry.gamma {
                    Some(g) => {
                        let pts: Vec<String> = g.iter().map(|(r, v)| format!("{r}:{v}")).collect();
                        format!("{} gamma [{}]", entry.xi, pts.join(" "))
                    }
                    None => entry.xi.to_string(),
                };
                decomposition.push((format!("xi {family} {}", entry.class), value));
            }
            decomposition.push((format!("xi {family} interior-nonconstant"), yes_no(d.interior_nonconstant)));
        }
    }
    let report = ReportDocument {
        tool: tool_line(),
        command: "classify".into(),
        interval: e,
        settings: vec![("seed".into(), seed.to_string())],
        verdicts,
        decomposition,
        witnesses,
        subject: Subject::Table(doc.with_interval(e)),
    };
    Ok((report, if all_member { 0 } else { 1 }))
}

/// Runs a falsifier; exit code 1 when a witness was found.
pub fn cmd_falsify(spec: &str, family: Family, trials: usize, seed: u64, e: IntervalSpec) -> Result<(ReportDocument, i32)> {
    let f = parse_function(spec)?;
    let witness = match family {
        Family::OrderInvariant => falsify_invariance(f.as_ref(), e, trials, seed)?,
        Family::CmSingle => falsify_cm(f.as_ref(), e, CmMode::Single, trials, seed)?,
        Family::CmIndependent => falsify_cm(f.as_ref(), e, CmMode::Independent, trials, seed)?,
    };
    let verdict = if witness.is_some() { "witness" } else { "no violation in budget" };
    let code = i32::from(witness.is_some());
    let report = ReportDocument {
        tool: tool_line(),
        command: "falsify".into(),
        interval: e,
        settings: vec![("seed".into(), seed.to_string()), ("trials".into(), trials.to_string())],
        verdicts: vec![(family.to_string(), verdict.to_string())],
        decomposition: vec![],
        witnesses: witness.into_iter().collect(),
        subject: Subject::Function(spec.to_string()),
    };
    Ok((report, code))
}

/// Replays every witness of a report. Exit code 0 when all are confirmed.
pub fn cmd_verify_witness(report: &ReportDocument) -> Result<(String, i32)> {
    if report.witnesses.is_empty() {
        return Ok(("no witness to verify\n".into(), 1));
    }
    let function: Option<Box<dyn Aggregator>> = match &report.subject {
        Subject::Function(spec) => Some(parse_function(spec)?),
        Subject::Table(_) => None,
    };
    let mut out = String::new();
    let mut all = true;
    for w in &report.witnesses {
        let target = match (&function, &report.subject) {
            (Some(f), _) => ReplayTarget::Function(f.as_ref()),
            (None, Subject::Table(doc)) => ReplayTarget::Table(&doc.table),
            _ => unreachable!("subject is a function or a table"),
        };
        let confirmed = w.replay(target, report.interval)?;
        all &= confirmed;
        let _ = writeln!(out, "{}: {}", w.kind.as_str(), if confirmed { "confirmed" } else { "not confirmed" });
    }
    Ok((out, if all { 0 } else { 1 }))
}
