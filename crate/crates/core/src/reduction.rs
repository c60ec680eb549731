//! Detour elimination: direct I/E detours for ∧, →, ∨ plus the permutative
//! conversions that push an elimination through the minor premises of ∨E and
//! through ⊥E.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::proofs::{path_string, Argument, Path, ProofError, Rule};

pub const DEFAULT_STEP_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
    Imp,
    Bot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetourKind {
    Direct,
    Permutative,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DetourSite {
    pub path: Path,
    pub connective: Connective,
    pub kind: DetourKind,
}

impl DetourSite {
    pub fn kind_name(&self) -> &'static str {
        match (self.connective, self.kind) {
            (Connective::And, DetourKind::Direct) => "and-detour",
            (Connective::Imp, DetourKind::Direct) => "imp-detour",
            (Connective::Or, DetourKind::Direct) => "or-detour",
            (Connective::Or, DetourKind::Permutative) => "or-permutation",
            (Connective::Bot, _) => "bot-permutation",
            (c, k) => unreachable!("no site of kind {c:?}/{k:?}"),
        }
    }
}

impl fmt::Display for DetourSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.kind_name(), path_string(&self.path))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("no detour at {}", path_string(.0))]
    InvalidSite(Path),
    #[error("step budget of {0} exceeded")]
    Budget(usize),
    #[error(transparent)]
    Malformed(#[from] ProofError),
}

fn site_at(a: &Argument) -> Option<(Connective, DetourKind)> {
    let major = a.premises.get(a.rule.major_premise()?)?;
    match (&a.rule, &major.rule) {
        (Rule::AndE1 | Rule::AndE2, Rule::AndI) => Some((Connective::And, DetourKind::Direct)),
        (Rule::ImpE, Rule::ImpI) => Some((Connective::Imp, DetourKind::Direct)),
        (Rule::OrE, Rule::OrI1 | Rule::OrI2) => Some((Connective::Or, DetourKind::Direct)),
        (_, Rule::OrE) => Some((Connective::Or, DetourKind::Permutative)),
        (_, Rule::BotE) => Some((Connective::Bot, DetourKind::Permutative)),
        _ => None,
    }
}

/// All detour sites, leftmost-innermost first (post-order).
pub fn find_detours(a: &Argument) -> Vec<DetourSite> {
    fn go(a: &Argument, path: &mut Path, out: &mut Vec<DetourSite>) {
        for (i, p) in a.premises.iter().enumerate() {
            path.push(i);
            go(p, path, out);
            path.pop();
        }
        if let Some((connective, kind)) = site_at(a) {
            out.push(DetourSite {
                path: path.clone(),
                connective,
                kind,
            });
        }
    }
    let mut out = Vec::new();
    go(a, &mut Vec::new(), &mut out);
    out
}

fn first_detour(a: &Argument) -> Option<DetourSite> {
    fn go(a: &Argument, path: &mut Path) -> Option<DetourSite> {
        for (i, p) in a.premises.iter().enumerate() {
            path.push(i);
            let found = go(p, path);
            path.pop();
            if found.is_some() {
                return found;
            }
        }
        site_at(a).map(|(connective, kind)| DetourSite {
            path: path.clone(),
            connective,
            kind,
        })
    }
    go(a, &mut Vec::new())
}

pub fn is_canonical(a: &Argument) -> bool {
    first_detour(a).is_none()
}

pub fn ends_with_intro(a: &Argument) -> bool {
    a.rule.is_intro()
}

/// Contracts the redex rooted at `n`. `n` must have unique binder labels so
/// that moving subtrees cannot capture.
fn contract(n: &Argument) -> Option<Argument> {
    let m_idx = n.rule.major_premise()?;
    let major = &n.premises[m_idx];
    Some(match (&n.rule, &major.rule) {
        (Rule::AndE1, Rule::AndI) => major.premises[0].clone(),
        (Rule::AndE2, Rule::AndI) => major.premises[1].clone(),
        (Rule::ImpE, Rule::ImpI) => {
            let body = &major.premises[0];
            match major.slot(0) {
                Some(l) => body.substitute_label(l, &n.premises[0]),
                None => body.clone(),
            }
        }
        (Rule::OrE, Rule::OrI1 | Rule::OrI2) => {
            let k = if major.rule == Rule::OrI1 { 1 } else { 2 };
            let branch = &n.premises[k];
            match n.slot(k) {
                Some(l) => branch.substitute_label(l, &major.premises[0]),
                None => branch.clone(),
            }
        }
        (_, Rule::OrE) => {
            let push = |branch: &Argument| {
                let mut r = n.clone();
                r.premises[m_idx] = branch.clone();
                r
            };
            Argument {
                conclusion: n.conclusion.clone(),
                rule: Rule::OrE,
                premises: vec![
                    major.premises[0].clone(),
                    push(&major.premises[1]),
                    push(&major.premises[2]),
                ],
                label: None,
                discharges: major.discharges.clone(),
            }
        }
        (_, Rule::BotE) => Argument::node(
            Rule::BotE,
            n.conclusion.clone(),
            vec![major.premises[0].clone()],
        ),
        _ => return None,
    })
}

/// One contraction at `site`; the result is canonically relabelled.
pub fn reduce_step(a: &Argument, site: &DetourSite) -> Result<Argument, ReductionError> {
    let unique = a.canonical()?;
    let node = unique
        .at(&site.path)
        .ok_or_else(|| ReductionError::InvalidSite(site.path.clone()))?;
    if site_at(node) != Some((site.connective, site.kind)) {
        return Err(ReductionError::InvalidSite(site.path.clone()));
    }
    let contractum = contract(node).ok_or_else(|| ReductionError::InvalidSite(site.path.clone()))?;
    Ok(unique.replace_at(&site.path, contractum).canonical()?)
}

/// Leftmost-innermost normalisation with a step budget.
pub fn normalize(a: &Argument, budget: usize) -> Result<Argument, ReductionError> {
    normalize_with(a, budget, |_, _| {})
}

/// As [`normalize`], also returning one `step k: <kind> at <path>` line per step.
pub fn normalize_traced(
    a: &Argument,
    budget: usize,
) -> Result<(Argument, Vec<String>), ReductionError> {
    let mut trace = Vec::new();
    let out = normalize_with(a, budget, |k, site| {
        trace.push(format!("step {k}: {site}"));
    })?;
    Ok((out, trace))
}

fn normalize_with(
    a: &Argument,
    budget: usize,
    mut on_step: impl FnMut(usize, &DetourSite),
) -> Result<Argument, ReductionError> {
    let mut cur = a.canonical()?;
    let mut steps = 0;
    while let Some(site) = first_detour(&cur) {
        if steps == budget {
            return Err(ReductionError::Budget(budget));
        }
        steps += 1;
        on_step(steps, &site);
        let node = cur.at(&site.path).expect("site found in tree");
        let contractum = contract(node).expect("site is a redex");
        cur = cur.replace_at(&site.path, contractum).canonical()?;
    }
    Ok(cur)
}

/// Every normal form reachable by some reduction sequence, up to α-equivalence.
/// Exponential; meant for small arguments. Gives up (returns `None`) once more
/// than `limit` distinct terms have been visited.
pub fn all_normal_forms(a: &Argument, limit: usize) -> Option<BTreeSet<String>> {
    let start = a.canonical().ok()?;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut normal = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(t) = stack.pop() {
        let key = crate::proofs::proof_to_json(&t);
        if !seen.insert(key.clone()) {
            continue;
        }
        if seen.len() > limit {
            return None;
        }
        let sites = find_detours(&t);
        if sites.is_empty() {
            normal.insert(key);
            continue;
        }
        for s in &sites {
            stack.push(reduce_step(&t, s).ok()?);
        }
    }
    Some(normal)
}
