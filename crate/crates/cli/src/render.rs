use ptsem_core::prover::KripkeModel;

/// One line per world: `w1 > w0: {p, q}`, the root first.
pub fn countermodel(m: &KripkeModel) -> String {
    let mut out = format!(
        "countermodel: {} world{}{}\n",
        m.worlds(),
        if m.worlds() == 1 { "" } else { "s" },
        if m.base_closed { ", base-closed" } else { "" }
    );
    for w in 0..m.worlds() {
        let mut atoms: Vec<String> = m.valuation[w].iter().map(|a| a.to_string()).collect();
        if m.bot.contains(&w) {
            atoms.push("bot".into());
        }
        let above = m.parent[w].map_or(String::new(), |p| format!(" > w{p}"));
        out.push_str(&format!("  w{w}{above}: {{{}}}\n", atoms.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ptsem_core::Atom;

    #[test]
    fn renders_worlds_in_order() {
        let m = KripkeModel {
            parent: vec![None, Some(0)],
            valuation: vec![Default::default(), [Atom::named("p")].into_iter().collect()],
            bot: vec![],
            base_closed: true,
        };
        assert_eq!(countermodel(&m), "countermodel: 2 worlds, base-closed\n  w0: {}\n  w1 > w0: {p}\n");
    }
}
