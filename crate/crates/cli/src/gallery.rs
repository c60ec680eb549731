//! Worked examples: each prints its certificates and a list of checks.
//! The output is golden-tested, so keep it deterministic.

use std::collections::BTreeSet;
use std::io::Write;

use ptsem_core::bases::{parse_base, Base, ExtensionBounds};
use ptsem_core::proofs::check_derivation;
use ptsem_core::prover::{decide, derivation_for, DecideOptions};
use ptsem_core::reduction::{normalize_traced, DEFAULT_STEP_BUDGET};
use ptsem_core::semantics::{entails, satisfies, supports, SemanticsMode, WorkingAlphabet};
use ptsem_core::syntax::{parse_formula, parse_sequent};
use ptsem_core::{Argument, Atom, CalculusMode, Formula, Level, Rule, Sequent};

use crate::render;

struct Gallery<'w, W: Write> {
    out: &'w mut W,
    failed: usize,
}

impl<W: Write> Gallery<'_, W> {
    fn check(&mut self, what: &str, ok: bool) -> std::io::Result<()> {
        if !ok {
            self.failed += 1;
        }
        writeln!(self.out, "  [{}] {what}", if ok { "ok" } else { "FAILED" })
    }

    fn block(&mut self, title: &str, body: &str) -> std::io::Result<()> {
        writeln!(self.out, "  {title}:")?;
        for line in body.lines() {
            writeln!(self.out, "    {line}")?;
        }
        Ok(())
    }
}

fn f(s: &str) -> Formula {
    parse_formula(s).expect("gallery formulas parse")
}

fn seq(s: &str) -> Sequent {
    parse_sequent(s).expect("gallery sequents parse")
}

fn uses_bot_e(a: &Argument) -> bool {
    a.uses_rule(&|r| matches!(r, Rule::BotE))
}

fn pq() -> WorkingAlphabet {
    WorkingAlphabet::new([Atom::named("p"), Atom::named("q")], 0)
}

/// Runs the gallery; `Ok(false)` if some check failed.
pub fn run(out: &mut impl Write) -> anyhow::Result<bool> {
    let mut g = Gallery { out, failed: 0 };
    conjunction_detour(&mut g)?;
    disjunctive_syllogism(&mut g)?;
    efq_argument(&mut g)?;
    bot_imp_bot(&mut g)?;
    writeln!(g.out, "{} check(s) failed", g.failed)?;
    Ok(g.failed == 0)
}

fn conjunction_detour<W: Write>(g: &mut Gallery<'_, W>) -> anyhow::Result<()> {
    let s = seq("p, q : p");
    writeln!(g.out, "== conjunction-detour: {s} ==")?;
    let pair = Argument::node(Rule::AndI, f("p & q"), vec![Argument::assume(f("p")), Argument::assume(f("q"))]);
    let detour = Argument::node(Rule::AndE1, f("p"), vec![pair]);
    g.block("argument", &detour.to_string())?;
    let (normal, trace) = normalize_traced(&detour, DEFAULT_STEP_BUDGET)?;
    g.block("trace", &trace.join("\n"))?;
    g.block("normal form", &normal.to_string())?;
    g.check("one reduction step", trace.len() == 1)?;
    g.check("normal form is the left subproof", normal == Argument::assume(f("p")))?;
    let empty = Base::empty(Level::One);
    let valid = satisfies(
        &detour,
        &empty,
        &s.context,
        &s.extract,
        SemanticsMode::PtV,
        &pq(),
        ExtensionBounds::level1(1, 1),
    )?;
    g.check("the detour is a valid argument in the empty base", valid)?;
    Ok(())
}

fn disjunctive_syllogism<W: Write>(g: &mut Gallery<'_, W>) -> anyhow::Result<()> {
    let s = seq("p | q, ~p : q");
    writeln!(g.out, "== disjunctive-syllogism: {s} ==")?;
    let empty = Base::empty(Level::One);
    let alphabet = WorkingAlphabet::default();
    for mode in [SemanticsMode::PtV, SemanticsMode::Sandqvist] {
        let base = Base::empty(mode.level());
        let held = supports(&base, &s.context, &s.extract, mode, &alphabet)?;
        g.check(&format!("supported in the empty base ({mode})"), held)?;
    }
    let w = derivation_for(&empty, &s.context, &s.extract, CalculusMode::Efq)?
        .ok_or_else(|| anyhow::anyhow!("no witness"))?;
    g.block("prover witness", &w.to_string())?;
    g.check("witness ends with OrE", w.rule == Rule::OrE)?;
    g.check("witness uses BotE in one case", uses_bot_e(&w))?;
    g.check("witness checks in the empty base", check_derivation(&w, &empty, CalculusMode::Efq).is_ok())?;
    // the hand-written derivation: ∨E over p|q, ⊥E from p and ~p on the left
    let left = Argument::node(
        Rule::BotE,
        f("q"),
        vec![Argument::node(
            Rule::ImpE,
            f("bot"),
            vec![Argument::hypothesis(f("p"), 1), Argument::assume(f("~p"))],
        )],
    );
    let hand = Argument::binder(
        Rule::OrE,
        f("q"),
        vec![Argument::assume(f("p | q")), left, Argument::hypothesis(f("q"), 2)],
        vec![None, Some(1), Some(2)],
    );
    g.check("hand-written derivation checks", check_derivation(&hand, &empty, CalculusMode::Efq).is_ok())?;
    for mode in [SemanticsMode::PtV, SemanticsMode::Sandqvist] {
        let base = Base::empty(mode.level());
        let bounds = ExtensionBounds {
            max_rules: 1,
            max_premises: 1,
            max_hyps: 1,
            level: mode.level(),
        };
        let valid = satisfies(&hand, &base, &s.context, &s.extract, mode, &pq(), bounds)?;
        g.check(&format!("hand-written derivation is valid ({mode})"), valid)?;
    }
    let minimal = decide(
        &empty,
        &s.context,
        &s.extract,
        CalculusMode::NoEfq,
        DecideOptions {
            countermodel: true,
            ..Default::default()
        },
    )?;
    g.check("not derivable without BotE", !minimal.decided)?;
    if let Some(m) = &minimal.countermodel {
        g.block("minimal-logic countermodel", &render::countermodel(m))?;
        g.check(
            "countermodel refutes the sequent",
            m.refutes(&empty, &s.context, &s.extract, CalculusMode::NoEfq),
        )?;
    }
    Ok(())
}

fn efq_argument<W: Write>(g: &mut Gallery<'_, W>) -> anyhow::Result<()> {
    let s = seq("p, p -> bot : bot");
    writeln!(g.out, "== efq-argument: {s} ==")?;
    let empty = Base::empty(Level::One);
    let w = derivation_for(&empty, &s.context, &s.extract, CalculusMode::Efq)?
        .ok_or_else(|| anyhow::anyhow!("no witness"))?;
    g.block("prover witness", &w.to_string())?;
    g.check("provable by ImpE", w.rule == Rule::ImpE)?;
    for mode in [SemanticsMode::PtV, SemanticsMode::Sandqvist] {
        let held = entails(&s.context, &s.extract, mode, &pq())?;
        g.check(&format!("entailed ({mode})"), held)?;
    }
    // with p and p→⊥ both supported, ⊥ must be: in Sandqvist mode that is
    // only the case in bases deriving every atom of the alphabet
    let none = BTreeSet::new();
    let bot = Formula::Bot;
    for (text, expected) in [("", false), ("=> p\n", false), ("=> p\n=> q\n", true)] {
        let base = parse_base(text, Some(Level::Two))?;
        let held = supports(&base, &none, &bot, SemanticsMode::Sandqvist, &pq())?;
        let name = if text.is_empty() { "{}".to_string() } else { format!("{{{}}}", text.trim().replace('\n', ", ")) };
        let verdict = if expected { "supports" } else { "does not support" };
        g.check(&format!("over {{p, q}}, base {name} {verdict} : bot (sandqvist)"), held == expected)?;
    }
    let pq_axioms = parse_base("=> p\n=> q\n", None)?;
    let held = supports(&pq_axioms, &none, &bot, SemanticsMode::PtV, &pq())?;
    g.check("base {=> p, => q} does not support : bot (ptv)", !held)?;
    Ok(())
}

fn bot_imp_bot<W: Write>(g: &mut Gallery<'_, W>) -> anyhow::Result<()> {
    writeln!(g.out, "== bot-imp-bot: : bot -> bot ==")?;
    let a = Argument::binder(
        Rule::ImpI,
        f("bot -> bot"),
        vec![Argument::hypothesis(f("bot"), 1)],
        vec![Some(1)],
    );
    g.block("argument", &a.to_string())?;
    let empty = Base::empty(Level::One);
    let none = BTreeSet::new();
    let bounds = ExtensionBounds::level1(1, 1);
    let sat = |arg: &Argument, phi: &Formula| satisfies(arg, &empty, &none, phi, SemanticsMode::PtV, &pq(), bounds);
    g.check("closed argument for bot -> bot is valid", sat(&a, &f("bot -> bot"))?)?;
    g.check("its premise, bot alone, is not a valid argument for : bot", !sat(&Argument::assume(f("bot")), &f("bot"))?)?;
    Ok(())
}
