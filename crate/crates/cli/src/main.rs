use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Serialize;

use onerel::cayley::build_ball;
use onerel::decide::{
    decide_with, find_witness, Decision, Outcome, SearchOptions, SearchOutcome, SearchReport,
    TraceEntry, Verdict, Witness,
};
use onerel::groupring::{fox_derivative, GroupRingElement};
use onerel::intlin::h1_of_presentation;
use onerel::magnus::build_solver;
use onerel::{Alphabet, DecideError, Presentation, ReducedWord, ResourceBudget};

const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(
    name = "onerel",
    version,
    about = "Residual rational solvability of one-relator groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether ⟨gens | rel⟩ is residually ℚ-solvable
    Decide(SearchArgs),
    /// Find the witness r and k for the relator
    Witness(SearchArgs),
    /// Word problem: is --word trivial in ⟨gens | rel⟩?
    Wp(WordArgs),
    /// Is --word in the normal closure of --rel?
    NcMember(WordArgs),
    /// Ball of the given radius in the Cayley graph of ⟨gens | rel⟩
    Ball(BallArgs),
    /// Fox derivative of --word with respect to --gen
    Fox(FoxArgs),
    /// First homology of ⟨gens | rel⟩
    H1(H1Args),
}

#[derive(Args)]
struct PresentationArgs {
    /// Generator letters, e.g. `ab`; inverses are written in upper case
    #[arg(long)]
    gens: Option<String>,
    /// Relator word
    #[arg(long)]
    rel: Option<String>,
    /// File with lines `gens: <letters>` and `rel: <word>`
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, env = "ONEREL_BUDGET_DEPTH", default_value_t = 64)]
    budget_depth: usize,
    #[arg(long, env = "ONEREL_BUDGET_LENGTH", default_value_t = 1_000_000)]
    budget_length: usize,
    #[arg(long, env = "ONEREL_BUDGET_CALLS", default_value_t = 10_000_000)]
    budget_calls: u64,
}

impl BudgetArgs {
    fn budget(&self) -> ResourceBudget {
        ResourceBudget {
            max_depth: self.budget_depth,
            max_length: self.budget_length,
            max_calls: self.budget_calls,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    pres: PresentationArgs,
    /// Longest candidate r; below |rel| a YES verdict becomes inconclusive
    #[arg(long)]
    max_r_len: Option<usize>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct WordArgs {
    #[command(flatten)]
    pres: PresentationArgs,
    #[arg(long)]
    word: String,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BallArgs {
    #[command(flatten)]
    pres: PresentationArgs,
    #[arg(long)]
    radius: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FoxArgs {
    #[command(flatten)]
    pres: PresentationArgs,
    #[arg(long)]
    word: String,
    /// Generator to differentiate by
    #[arg(long)]
    gen: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct H1Args {
    #[command(flatten)]
    pres: PresentationArgs,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Internal(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

impl PresentationArgs {
    fn load(&self) -> Result<Presentation, Failure> {
        let (mut gens, mut rel) = (None, None);
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                match line.split_once(':') {
                    Some(("gens", v)) => gens = Some(v.trim().to_string()),
                    Some(("rel", v)) => rel = Some(v.trim().to_string()),
                    _ => return Err(usage(format!("{}: bad line `{line}`", path.display()))),
                }
            }
        }
        let gens = self
            .gens
            .clone()
            .or(gens)
            .ok_or_else(|| usage("missing --gens"))?;
        let rel = self.rel.clone().or(rel).unwrap_or_default();
        Presentation::parse(&gens, &rel).map_err(usage)
    }
}

fn parse_word(s: &str, a: &Alphabet) -> Result<ReducedWord, Failure> {
    ReducedWord::parse(s, a).map_err(usage)
}

fn emit<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Decide(a) => run_decide(&a),
        Command::Witness(a) => run_witness(&a),
        Command::Wp(a) => run_wp(&a, "wp"),
        Command::NcMember(a) => run_wp(&a, "nc-member"),
        Command::Ball(a) => run_ball(&a),
        Command::Fox(a) => run_fox(&a),
        Command::H1(a) => run_h1(&a),
    }
}

#[derive(Serialize)]
struct QuotientOut {
    gens: String,
    rel: String,
}

#[derive(Serialize)]
struct TraceOut {
    candidate: String,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<i64>,
    oracle_calls: u64,
}

#[derive(Serialize)]
struct BudgetOut {
    max_depth: usize,
    max_length: usize,
    max_calls: u64,
    oracle_calls: u64,
    candidates: usize,
    passing: usize,
    max_r_len: usize,
    bounded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize, Default)]
struct WitnessOut {
    r: Option<String>,
    k: Option<i64>,
    k_sign_folded: Option<bool>,
    conjugator: Option<String>,
    max_quotient: Option<QuotientOut>,
}

#[derive(Serialize)]
struct DecideOut {
    verdict: &'static str,
    #[serde(flatten)]
    witness: WitnessOut,
    trace: Vec<TraceOut>,
    budget_report: BudgetOut,
}

fn trace_out(trace: &[TraceEntry], a: &Alphabet) -> Vec<TraceOut> {
    trace
        .iter()
        .map(|t| {
            let (outcome, k) = match &t.outcome {
                Outcome::NotInNormalClosure => ("not-in-normal-closure", None),
                Outcome::ChainMismatch => ("chain-mismatch", None),
                Outcome::Passed { k, .. } => ("passed", Some(*k)),
                Outcome::Exhausted(_) => ("budget-exceeded", None),
            };
            TraceOut {
                candidate: t.candidate.to_text(a),
                outcome,
                k,
                oracle_calls: t.oracle_calls,
            }
        })
        .collect()
}

fn budget_out(
    b: ResourceBudget,
    report: &SearchReport,
    bounded: bool,
    reason: Option<String>,
) -> BudgetOut {
    BudgetOut {
        max_depth: b.max_depth,
        max_length: b.max_length,
        max_calls: b.max_calls,
        oracle_calls: report.oracle_calls,
        candidates: report.candidates,
        passing: report.passing,
        max_r_len: report.max_r_len,
        bounded,
        reason,
    }
}

fn witness_out(w: Option<&Witness>, a: &Alphabet) -> WitnessOut {
    let Some(w) = w else {
        return WitnessOut::default();
    };
    WitnessOut {
        r: Some(w.r.to_text(a)),
        k: Some(w.k),
        k_sign_folded: Some(w.k_sign_folded),
        conjugator: Some(w.conjugator.to_text(a)),
        max_quotient: Some(QuotientOut {
            gens: a.letters(),
            rel: w.max_quotient(a).relator.to_text(a),
        }),
    }
}

fn search_options(a: &SearchArgs) -> SearchOptions {
    SearchOptions {
        max_r_len: a.max_r_len,
        threads: a.threads.max(1),
    }
}

fn decide_error(e: DecideError) -> Failure {
    Failure::Internal(e.to_string())
}

fn run_decide(args: &SearchArgs) -> Result<u8, Failure> {
    let p = args.pres.load()?;
    let budget = args.budget.budget();
    let d: Decision = decide_with(&p.relator, &p.alphabet, budget, &search_options(args))
        .map_err(decide_error)?;
    let (verdict, code, wit, reason) = match &d.verdict {
        Verdict::ResiduallyQSolvable(w) => ("YES", 0, Some(w), None),
        Verdict::NotResiduallyQSolvable(w) => ("NO", 1, Some(w), None),
        Verdict::Inconclusive { reason, witness } => {
            ("INCONCLUSIVE", 2, witness.as_ref(), Some(reason.clone()))
        }
    };
    let a = &p.alphabet;
    let out = DecideOut {
        verdict,
        witness: witness_out(wit, a),
        trace: trace_out(&d.trace, a),
        budget_report: budget_out(budget, &d.report, d.bounded, reason),
    };
    if args.json {
        emit(&out);
    } else {
        print_search(&out);
    }
    Ok(code)
}

fn run_witness(args: &SearchArgs) -> Result<u8, Failure> {
    let p = args.pres.load()?;
    let budget = args.budget.budget();
    let core = p.relator.cyclic_core();
    let bounded = args.max_r_len.is_some_and(|m| m < core.len());
    let s = find_witness(&p.relator, &p.alphabet, budget, &search_options(args))
        .map_err(decide_error)?;
    let (verdict, code, wit, reason) = match &s.outcome {
        SearchOutcome::Found(w) => ("FOUND", 0, Some(w), None),
        SearchOutcome::NoneFound => ("NONE", 1, None, None),
        SearchOutcome::Inconclusive(e) => (
            "INCONCLUSIVE",
            2,
            None,
            Some(format!("budget exceeded: {e}")),
        ),
    };
    let a = &p.alphabet;
    let out = DecideOut {
        verdict,
        witness: witness_out(wit, a),
        trace: trace_out(&s.trace, a),
        budget_report: budget_out(budget, &s.report, bounded, reason),
    };
    if args.json {
        emit(&out);
    } else {
        print_search(&out);
    }
    Ok(code)
}

fn print_search(out: &DecideOut) {
    let row = |k: &str, v: &str| println!("{k:<14}{v}");
    row("verdict", out.verdict);
    let w = &out.witness;
    if let (Some(r), Some(k)) = (&w.r, w.k) {
        row("r", if r.is_empty() { "1" } else { r });
        row("k", &k.to_string());
        if let Some(c) = w.conjugator.as_deref().filter(|c| !c.is_empty()) {
            row("conjugator", c);
        }
    }
    if let Some(q) = &w.max_quotient {
        row("max quotient", &format!("<{} | {}>", q.gens, q.rel));
    }
    let b = &out.budget_report;
    row(
        "candidates",
        &format!("{} examined, {} passing", b.candidates, b.passing),
    );
    row("oracle calls", &b.oracle_calls.to_string());
    if b.bounded {
        row("search", &format!("bounded at length {}", b.max_r_len));
    }
    if let Some(reason) = &b.reason {
        row("reason", reason);
    }
}

#[derive(Serialize)]
struct WpOut {
    result: &'static str,
    word: String,
    rel: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget_report: Option<WpBudget>,
}

#[derive(Serialize)]
struct WpBudget {
    max_depth: usize,
    max_length: usize,
    max_calls: u64,
    exhausted: String,
}

fn run_wp(args: &WordArgs, name: &str) -> Result<u8, Failure> {
    let p = args.pres.load()?;
    let w = parse_word(&args.word, &p.alphabet)?;
    let budget = args.budget.budget();
    let answer = build_solver(&p, budget).and_then(|s| s.is_trivial(&w));
    let (result, code, report) = match answer {
        Ok(true) if name == "wp" => ("trivial", 0, None),
        Ok(true) => ("member", 0, None),
        Ok(false) if name == "wp" => ("nontrivial", 1, None),
        Ok(false) => ("non-member", 1, None),
        Err(e) => (
            "inconclusive",
            2,
            Some(WpBudget {
                max_depth: budget.max_depth,
                max_length: budget.max_length,
                max_calls: budget.max_calls,
                exhausted: e.0.to_string(),
            }),
        ),
    };
    let out = WpOut {
        result,
        word: w.to_text(&p.alphabet),
        rel: p.relator.to_text(&p.alphabet),
        budget_report: report,
    };
    if args.json {
        emit(&out);
    } else {
        println!("{result}");
        if let Some(b) = &out.budget_report {
            println!("budget exceeded: {}", b.exhausted);
        }
    }
    Ok(code)
}

#[derive(Serialize)]
struct BallOut {
    radius: usize,
    vertices: Vec<String>,
    edges: Vec<(usize, String, usize)>,
}

fn run_ball(args: &BallArgs) -> Result<u8, Failure> {
    let p = args.pres.load()?;
    let a = &p.alphabet;
    let ball = match build_ball(&p.relator, a, args.radius, args.budget.budget()) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{e}");
            return Ok(2);
        }
    };
    let out = BallOut {
        radius: ball.radius,
        vertices: ball.vertices.iter().map(|v| v.to_text(a)).collect(),
        edges: ball
            .edges
            .iter()
            .map(|&(s, g, t)| (s, a.names()[g].clone(), t))
            .collect(),
    };
    if args.json {
        emit(&out);
    } else {
        println!("{} vertices, {} edges", out.vertices.len(), out.edges.len());
        for (i, v) in out.vertices.iter().enumerate() {
            println!("{i:>6}  {}", if v.is_empty() { "1" } else { v });
        }
        for (s, g, t) in &out.edges {
            println!("{s:>6} --{g}--> {t}");
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct FoxOut {
    word: String,
    gen: String,
    terms: Vec<(i64, String)>,
}

fn run_fox(args: &FoxArgs) -> Result<u8, Failure> {
    let p = args.pres.load()?;
    let a = &p.alphabet;
    let w = parse_word(&args.word, a)?;
    let s = a
        .index_of(&args.gen)
        .ok_or_else(|| usage(format!("unknown generator `{}`", args.gen)))?;
    let d: GroupRingElement = fox_derivative(&w, s, a).map_err(usage)?;
    let terms = d
        .terms()
        .map(|(g, c)| {
            let c = c
                .to_integer()
                .to_i64()
                .ok_or_else(|| Failure::Internal("coefficient out of range".into()))?;
            Ok((c, g.to_text(a)))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    if args.json {
        emit(&FoxOut {
            word: w.to_text(a),
            gen: args.gen.clone(),
            terms,
        });
    } else {
        println!("{}", d.display(a));
    }
    Ok(0)
}

#[derive(Serialize)]
struct H1Out {
    betti: usize,
    torsion: Vec<u64>,
}

fn run_h1(args: &H1Args) -> Result<u8, Failure> {
    let p = args.pres.load()?;
    let h = h1_of_presentation(&p);
    let torsion = h
        .torsion
        .iter()
        .map(|d| {
            d.to_u64()
                .ok_or_else(|| Failure::Internal("torsion out of range".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = H1Out {
        betti: h.betti,
        torsion,
    };
    if args.json {
        emit(&out);
    } else {
        let mut parts = vec![format!("Z^{}", h.betti)];
        parts.extend(out.torsion.iter().map(|d| format!("Z/{d}")));
        println!("{}", parts.join(" + "));
    }
    Ok(0)
}
