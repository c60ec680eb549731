//! Proof exchange document: pretty-printed JSON, one object per node.
//!
//! ```json
//! {
//!   "rule": "imp-i",
//!   "conclusion": "p -> p",
//!   "discharges": [1],
//!   "premises": [{ "rule": "assume", "conclusion": "p", "label": 1 }]
//! }
//! ```
//!
//! `rule` may be omitted on import; it is then inferred from the conclusions
//! and the import fails if more than one NJ rule fits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Argument, Label, Rule};
use crate::bases::parse_rule;
use crate::syntax::{parse_formula, Formula};

#[derive(Debug, Error)]
pub enum ProofFormatError {
    #[error("malformed proof document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("at {path}: {message}")]
    Node { path: String, message: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Node {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base_rule: Option<String>,
    conclusion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    discharges: Vec<Option<Label>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<Node>,
}

fn to_node(a: &Argument) -> Node {
    Node {
        rule: Some(a.rule.name().to_string()),
        base_rule: match &a.rule {
            Rule::Base(r) => Some(r.to_string()),
            _ => None,
        },
        conclusion: a.conclusion.to_string(),
        label: a.label,
        discharges: a.discharges.clone(),
        premises: a.premises.iter().map(to_node).collect(),
    }
}

pub fn proof_to_json(a: &Argument) -> String {
    let mut s = serde_json::to_string_pretty(&to_node(a)).expect("proof nodes serialize");
    s.push('\n');
    s
}

pub fn proof_from_json(text: &str) -> Result<Argument, ProofFormatError> {
    let node: Node = serde_json::from_str(text)?;
    from_node(&node, &mut Vec::new())
}

fn from_node(n: &Node, path: &mut Vec<usize>) -> Result<Argument, ProofFormatError> {
    let err = |path: &Vec<usize>, message: String| ProofFormatError::Node {
        path: super::path_string(path),
        message,
    };
    let conclusion =
        parse_formula(&n.conclusion).map_err(|e| err(path, format!("conclusion: {e}")))?;
    let mut premises = Vec::with_capacity(n.premises.len());
    for (i, p) in n.premises.iter().enumerate() {
        path.push(i);
        premises.push(from_node(p, path)?);
        path.pop();
    }
    let rule = match n.rule.as_deref() {
        Some("base") => {
            let text = n
                .base_rule
                .as_deref()
                .ok_or_else(|| err(path, "`base` node without `base_rule`".into()))?;
            Rule::Base(parse_rule(text).map_err(|e| err(path, e.message))?)
        }
        Some(name) => {
            if n.base_rule.is_some() {
                return Err(err(path, "`base_rule` on a non-base node".into()));
            }
            rule_by_name(name).ok_or_else(|| err(path, format!("unknown rule `{name}`")))?
        }
        None => infer_rule(&conclusion, &premises, n.label.is_some())
            .map_err(|m| err(path, m))?,
    };
    Ok(Argument {
        conclusion,
        rule,
        premises,
        label: n.label,
        discharges: n.discharges.clone(),
    })
}

fn rule_by_name(name: &str) -> Option<Rule> {
    Some(match name {
        "assume" => Rule::Assume,
        "and-i" => Rule::AndI,
        "and-e1" => Rule::AndE1,
        "and-e2" => Rule::AndE2,
        "or-i1" => Rule::OrI1,
        "or-i2" => Rule::OrI2,
        "or-e" => Rule::OrE,
        "imp-i" => Rule::ImpI,
        "imp-e" => Rule::ImpE,
        "bot-e" => Rule::BotE,
        _ => return None,
    })
}

/// Rule inference for bare formula trees: the NJ rules whose schema fits.
fn infer_rule(concl: &Formula, premises: &[Argument], labelled: bool) -> Result<Rule, String> {
    let c: Vec<&Formula> = premises.iter().map(|p| &p.conclusion).collect();
    let mut fits = Vec::new();
    match c.as_slice() {
        [] => fits.push(Rule::Assume),
        [a] => {
            if matches!(a, Formula::And(l, _) if **l == *concl) {
                fits.push(Rule::AndE1);
            }
            if matches!(a, Formula::And(_, r) if **r == *concl) {
                fits.push(Rule::AndE2);
            }
            if matches!(concl, Formula::Or(l, _) if **l == **a) {
                fits.push(Rule::OrI1);
            }
            if matches!(concl, Formula::Or(_, r) if **r == **a) {
                fits.push(Rule::OrI2);
            }
            if matches!(concl, Formula::Imp(_, b) if **b == **a) {
                fits.push(Rule::ImpI);
            }
            if **a == Formula::Bot {
                fits.push(Rule::BotE);
            }
        }
        [a, b] => {
            if *concl == Formula::and((*a).clone(), (*b).clone()) {
                fits.push(Rule::AndI);
            }
            if matches!(b, Formula::Imp(x, y) if **x == **a && **y == *concl) {
                fits.push(Rule::ImpE);
            }
        }
        [Formula::Or(..), b, d] if *b == concl && *d == concl => fits.push(Rule::OrE),
        _ => {}
    }
    if labelled && fits != [Rule::Assume] {
        return Err("only assumptions carry labels".into());
    }
    match fits.len() {
        1 => Ok(fits.pop().unwrap()),
        0 => Err(format!("no rule concludes `{concl}` from the given premises")),
        _ => {
            let names: Vec<&str> = fits.iter().map(Rule::name).collect();
            Err(format!("ambiguous rule for `{concl}`: {}", names.join(", ")))
        }
    }
}

/// Graphviz rendering; edges point from premise to conclusion.
pub fn to_dot(a: &Argument) -> String {
    fn escape(s: &str) -> String {
        s.replace('\\', "\\\\").replace('"', "\\\"")
    }
    fn go(a: &Argument, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        let mut label = a.conclusion.to_string();
        if let Some(l) = a.label {
            label = format!("[{label}]^{l}");
        }
        let tag = match &a.rule {
            Rule::Assume => String::new(),
            Rule::Base(r) => format!("\\n{}", escape(&r.to_string())),
            r => format!("\\n{}", r.name()),
        };
        out.push_str(&format!("  n{id} [label=\"{}{tag}\"];\n", escape(&label)));
        for p in &a.premises {
            let child = go(p, next, out);
            out.push_str(&format!("  n{child} -> n{id};\n"));
        }
        id
    }
    let mut out = String::from("digraph proof {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    go(a, &mut 0, &mut out);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::tests::{conjunction_detour, disjunctive_syllogism, f};
    use super::*;
    use crate::bases::parse_base;

    #[test]
    fn round_trip_is_bit_exact() {
        for a in [conjunction_detour(), disjunctive_syllogism()] {
            let text = proof_to_json(&a);
            let back = proof_from_json(&text).unwrap();
            assert_eq!(back, a);
            assert_eq!(proof_to_json(&back), text);
        }
    }

    #[test]
    fn base_rules_round_trip() {
        let base = parse_base("(p > q) => c\np => q\n", None).unwrap();
        let w = crate::bases::derivation_in_base(&base, &Default::default(), &crate::Atom::named("c")).unwrap();
        let text = proof_to_json(&w);
        assert!(text.contains("\"base_rule\": \"(p > q) => c\""));
        assert_eq!(proof_from_json(&text).unwrap(), w);
    }

    #[test]
    fn document_shape() {
        let text = proof_to_json(&conjunction_detour());
        let expected = r#"{
  "rule": "and-e1",
  "conclusion": "p",
  "premises": [
    {
      "rule": "and-i",
      "conclusion": "p & q",
      "premises": [
        {
          "rule": "assume",
          "conclusion": "p"
        },
        {
          "rule": "assume",
          "conclusion": "q"
        }
      ]
    }
  ]
}
"#;
        assert_eq!(text, expected);
    }

    #[test]
    fn bare_tree_inference() {
        let text = r#"{"conclusion": "p", "premises": [{"conclusion": "p & q",
            "premises": [{"conclusion": "p"}, {"conclusion": "q"}]}]}"#;
        assert_eq!(proof_from_json(text).unwrap(), conjunction_detour());
        // p | p from p: both ∨I rules fit
        let amb = r#"{"conclusion": "p | p", "premises": [{"conclusion": "p"}]}"#;
        let e = proof_from_json(amb).unwrap_err().to_string();
        assert!(e.contains("ambiguous"), "{e}");
    }

    #[test]
    fn malformed_documents() {
        assert!(proof_from_json("{").is_err());
        assert!(proof_from_json(r#"{"rule": "magic", "conclusion": "p"}"#).is_err());
        assert!(proof_from_json(r#"{"rule": "assume", "conclusion": "p &"}"#).is_err());
        assert!(proof_from_json(r#"{"rule": "assume", "conclusion": "p", "extra": 1}"#).is_err());
    }

    #[test]
    fn dot_output() {
        let d = to_dot(&disjunctive_syllogism());
        assert!(d.starts_with("digraph proof {"));
        assert_eq!(d.matches(" -> n").count(), 6);
        assert!(d.contains(&f("p | q").to_string()));
    }
}
