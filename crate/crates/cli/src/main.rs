//! `ptsem`: command-line front end to the workbench.
//!
//! Exit codes are a stable contract: 0 positive, 1 negative, 2 input error,
//! 3 budget exceeded.

mod gallery;
mod render;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use ptsem_core::bases::{parse_base, Base, ExtensionBounds};
use ptsem_core::generate::{generator_base, DerivationGenerator, GenConfig};
use ptsem_core::proofs::{check_derivation, proof_from_json, proof_to_json, to_dot};
use ptsem_core::prover::{decide, DecideOptions, ProverError};
use ptsem_core::reduction::{is_canonical, normalize_traced, ReductionError, DEFAULT_STEP_BUDGET};
use ptsem_core::semantics::{
    check_clause_coherence, entails, supports, supports_clausal, CoherenceConfig, SemanticsError,
    SemanticsMode, SupportOracle, WorkingAlphabet,
};
use ptsem_core::syntax::{parse_formula, parse_sequent, SyntaxError};
use ptsem_core::{Argument, Atom, CalculusMode, Level, Rule, Sequent};

#[derive(Parser)]
#[command(name = "ptsem", version, about = "Proof-theoretic semantics workbench")]
struct Cli {
    /// Prover node budget (also read from PTSEM_BUDGET); step budget for `normalize`.
    #[arg(long, global = true, env = "PTSEM_BUDGET")]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print it in canonical form.
    Parse { text: String },
    /// Decide `Γ : φ` in NJ plus base rules.
    Prove(ProveArgs),
    /// Normalise a proof document.
    Normalize(NormalizeArgs),
    /// Decide base support `Γ ⊩_B φ`.
    Support(SupportArgs),
    /// Decide entailment (support in the empty base).
    Entail(EntailArgs),
    /// Cross-check the semantic judgments over small bases and sequents.
    Sweep(SweepArgs),
    /// Print a seeded random derivation with detours (proof document).
    Generate(GenerateArgs),
    /// Run the built-in gallery of worked examples.
    Examples,
}

#[derive(Args)]
struct ProveArgs {
    /// `f1, f2 : g`; the left side may be empty.
    sequent: String,
    #[arg(long)]
    base: Option<PathBuf>,
    /// Minimal logic: no ⊥-elimination.
    #[arg(long)]
    no_efq: bool,
    /// Write the witness derivation here (proof document).
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Write the countermodel here (JSON).
    #[arg(long)]
    countermodel: Option<PathBuf>,
    /// World bound for the countermodel search.
    #[arg(long, default_value_t = 4)]
    worlds: usize,
    /// Print the witness as Graphviz instead of text.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct NormalizeArgs {
    proof: PathBuf,
    /// Check the input against this base (default: the base rules it uses).
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long)]
    trace: bool,
    /// Exit 1 unless the result is canonical (detour-free).
    #[arg(long)]
    assert_canonical: bool,
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct AlphabetArgs {
    #[arg(long, default_value = "ptv")]
    mode: SemanticsMode,
    /// Declared atoms, comma separated.
    #[arg(long, value_delimiter = ',')]
    alphabet: Option<Vec<String>>,
    /// Fresh atoms added to the working alphabet.
    #[arg(long)]
    reserve: Option<usize>,
}

impl AlphabetArgs {
    fn working(&self) -> anyhow::Result<WorkingAlphabet> {
        let declared = self.alphabet.as_ref().map(|a| atoms(a)).transpose()?;
        Ok(WorkingAlphabet::with_default_reserve(declared, self.reserve))
    }
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value_t = 1)]
    max_rules: usize,
    #[arg(long, default_value_t = 1)]
    max_premises: usize,
    #[arg(long, default_value_t = 0)]
    max_hyps: usize,
}

impl BoundArgs {
    fn bounds(&self, level: Level) -> ExtensionBounds {
        ExtensionBounds {
            max_rules: self.max_rules,
            max_premises: self.max_premises,
            max_hyps: self.max_hyps,
            level,
        }
    }
}

#[derive(Args)]
struct SupportArgs {
    sequent: String,
    #[arg(long)]
    base: Option<PathBuf>,
    #[command(flatten)]
    alphabet: AlphabetArgs,
    /// Also run the bounded clause evaluator.
    #[arg(long)]
    clausal: bool,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Write a witness derivation here when one exists.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Args)]
struct EntailArgs {
    sequent: String,
    #[command(flatten)]
    alphabet: AlphabetArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "ptv")]
    mode: SemanticsMode,
    #[arg(long, value_delimiter = ',', default_value = "p")]
    alphabet: Vec<String>,
    #[arg(long, default_value_t = 0)]
    reserve: usize,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Rules the clause evaluator may add on top of a swept base.
    #[arg(long, default_value_t = 2)]
    extra_rules: usize,
    /// Rules satisfaction checks may add on top of a base.
    #[arg(long, default_value_t = 1)]
    sat_extra: u32,
    /// Connectives per formula in the exhaustive sweep.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Context formulas per sequent.
    #[arg(long, default_value_t = 1)]
    context: usize,
    /// Random sequents per base on top of the exhaustive ones.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    sample_depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deliberately break the support decision (harness self-test).
    #[arg(long)]
    inject_fault: bool,
    /// Write one base file per violation into this directory.
    #[arg(long)]
    emit_counterexamples: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Only closed derivations.
    #[arg(long)]
    closed: bool,
    #[arg(long, default_value_t = 5)]
    fuel: usize,
}

/// Why a command could not produce a verdict.
enum Failure {
    Input(anyhow::Error),
    Budget(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e: anyhow::Error = e.into();
        if let Some(b) = budget_message(&e) {
            return Failure::Budget(b);
        }
        Failure::Input(e)
    }
}

fn budget_message(e: &anyhow::Error) -> Option<String> {
    for cause in e.chain() {
        if let Some(ProverError::Budget(_)) = cause.downcast_ref::<ProverError>() {
            return Some(cause.to_string());
        }
        if let Some(SemanticsError::Prover(p)) = cause.downcast_ref::<SemanticsError>() {
            return Some(p.to_string());
        }
        if let Some(ReductionError::Budget(_)) = cause.downcast_ref::<ReductionError>() {
            return Some(cause.to_string());
        }
    }
    None
}

/// `true` for a positive verdict.
type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(b) = cli.budget {
        // the prover reads its default budget from the environment
        std::env::set_var("PTSEM_BUDGET", b.to_string());
    }
    let outcome = match cli.command {
        Command::Parse { text } => cmd_parse(&text),
        Command::Prove(a) => cmd_prove(&a),
        Command::Normalize(a) => cmd_normalize(&a, cli.budget),
        Command::Support(a) => cmd_support(&a),
        Command::Entail(a) => cmd_entail(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Examples => gallery::run(&mut std::io::stdout().lock()).map_err(Failure::from),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("budget exceeded: {m}");
            ExitCode::from(3)
        }
    }
}

fn atoms(names: &[String]) -> anyhow::Result<BTreeSet<Atom>> {
    names
        .iter()
        .map(|n| n.trim())
        .filter(|n| !n.is_empty())
        .map(|n| Atom::new(n).map_err(|e| anyhow!("alphabet: {e}")))
        .collect()
}

fn syntax_error(input: &str, e: &SyntaxError) -> anyhow::Error {
    match e.offset() {
        Some(o) => anyhow!("{e}\n  {input}\n  {:o$}^", ""),
        None => anyhow!("{e}"),
    }
}

fn read_sequent(text: &str) -> Result<Sequent, Failure> {
    parse_sequent(text).map_err(|e| Failure::Input(syntax_error(text, &e)))
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_base(path: Option<&Path>, level: Level) -> anyhow::Result<Base> {
    let Some(path) = path else {
        return Ok(Base::empty(level));
    };
    let text = read(path)?;
    let base = parse_base(&text, None).with_context(|| format!("in {}", path.display()))?;
    Ok(if level == Level::Two { base.lifted() } else { base })
}

/// Base for a semantic mode: level-2 files are rejected in PtV mode.
fn mode_base(path: Option<&Path>, mode: SemanticsMode) -> anyhow::Result<Base> {
    let base = read_base(path, mode.level())?;
    if base.level() > mode.level() {
        return Err(anyhow!(
            "{} has level-2 rules; use --mode sandqvist",
            path.map_or("base".into(), |p| p.display().to_string())
        ));
    }
    Ok(base)
}

fn cmd_parse(text: &str) -> Outcome {
    let f = parse_formula(text).map_err(|e| Failure::Input(syntax_error(text, &e)))?;
    println!("{f}");
    Ok(true)
}

fn cmd_prove(a: &ProveArgs) -> Outcome {
    let s = read_sequent(&a.sequent)?;
    let base = read_base(a.base.as_deref(), Level::One)?;
    let mode = if a.no_efq { CalculusMode::NoEfq } else { CalculusMode::Efq };
    let opts = DecideOptions {
        witness: true,
        countermodel: true,
        bound: a.worlds,
    };
    let v = decide(&base, &s.context, &s.extract, mode, opts)?;
    if v.decided {
        println!("provable: {s}");
        let w = v.witness.expect("witness requested");
        if a.dot {
            print!("{}", to_dot(&w));
        } else {
            print!("{w}");
        }
        if let Some(path) = &a.witness {
            write(path, &proof_to_json(&w))?;
        }
    } else {
        println!("not provable: {s}");
        match &v.countermodel {
            Some(m) => {
                print!("{}", render::countermodel(m));
                if let Some(path) = &a.countermodel {
                    write(path, &(serde_json::to_string_pretty(m)? + "\n"))?;
                }
            }
            None => println!("no countermodel within {} worlds", a.worlds),
        }
    }
    Ok(v.decided)
}

fn used_base(a: &Argument) -> Base {
    fn collect(a: &Argument, out: &mut Vec<ptsem_core::AtomicRule>) {
        if let Rule::Base(r) = &a.rule {
            out.push(r.clone());
        }
        for p in &a.premises {
            collect(p, out);
        }
    }
    let mut rules = Vec::new();
    collect(a, &mut rules);
    let level = rules.iter().map(|r| r.level()).max().unwrap_or(Level::One);
    Base::new(level, rules).expect("level is the maximum rule level")
}

fn cmd_normalize(a: &NormalizeArgs, budget: Option<u64>) -> Outcome {
    let text = read(&a.proof)?;
    let arg = proof_from_json(&text).with_context(|| format!("in {}", a.proof.display()))?;
    let base = match &a.base {
        Some(p) => read_base(Some(p), Level::One)?,
        None => used_base(&arg),
    };
    check_derivation(&arg, &base, CalculusMode::Efq)
        .map_err(|d| anyhow!("{}: ill-formed derivation: {d}", a.proof.display()))?;
    let steps = budget.map_or(DEFAULT_STEP_BUDGET, |b| b as usize);
    let (normal, trace) = normalize_traced(&arg, steps)?;
    if a.trace {
        for line in &trace {
            println!("{line}");
        }
    }
    if a.dot {
        print!("{}", to_dot(&normal));
    } else {
        print!("{}", proof_to_json(&normal));
    }
    if a.assert_canonical && !is_canonical(&normal) {
        eprintln!("result is not canonical");
        return Ok(false);
    }
    Ok(true)
}

fn cmd_support(a: &SupportArgs) -> Outcome {
    let s = read_sequent(&a.sequent)?;
    let mode = a.alphabet.mode;
    let base = mode_base(a.base.as_deref(), mode)?;
    let alphabet = a.alphabet.working()?;
    let held = supports(&base, &s.context, &s.extract, mode, &alphabet)?;
    println!("{} ({mode}): {s}", if held { "supported" } else { "not supported" });
    if a.clausal {
        let bounds = a.bounds.bounds(mode.level());
        let v = supports_clausal(&base, &s.context, &s.extract, mode, bounds, &alphabet)?;
        println!("clausal: {v}");
    }
    if let Some(path) = &a.witness {
        let atoms = alphabet.resolve(&base, s.context.iter().chain([&s.extract]));
        let w = SupportOracle::new(&base, mode, &atoms)?.witness(&s.context, &s.extract)?;
        match w {
            Some(w) => write(path, &proof_to_json(&w))?,
            None => eprintln!("no witness derivation; nothing written"),
        }
    }
    Ok(held)
}

fn cmd_entail(a: &EntailArgs) -> Outcome {
    let s = read_sequent(&a.sequent)?;
    let mode = a.alphabet.mode;
    let held = entails(&s.context, &s.extract, mode, &a.alphabet.working()?)?;
    println!("{} ({mode}): {s}", if held { "entailed" } else { "not entailed" });
    Ok(held)
}

fn cmd_sweep(a: &SweepArgs) -> Outcome {
    let config = CoherenceConfig {
        mode: a.mode,
        alphabet: atoms(&a.alphabet)?,
        reserve: a.reserve,
        bases: a.bounds.bounds(a.mode.level()),
        extra_rules: a.extra_rules,
        sat_extra: a.sat_extra,
        depth: a.depth,
        context: a.context,
        samples: a.samples,
        sample_depth: a.sample_depth,
        seed: a.seed,
        inject_fault: a.inject_fault,
        budget: ptsem_core::prover::default_budget(),
    };
    let report = check_clause_coherence(&config)?;
    print!("{}", report.render());
    if let Some(dir) = &a.emit_counterexamples {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, v) in report.violations.iter().enumerate() {
            write(&dir.join(format!("violation-{:04}.b", i + 1)), &v.counterexample_file())?;
        }
    }
    Ok(report.is_clean())
}

fn cmd_generate(a: &GenerateArgs) -> Outcome {
    let config = GenConfig {
        closed: a.closed,
        fuel: a.fuel.max(1),
        ..Default::default()
    };
    let d = DerivationGenerator::new(a.seed, generator_base(), config).derivation();
    print!("{}", proof_to_json(&d));
    Ok(true)
}
