use super::*;
use crate::grammar::tests::lower_src;
use crate::lr::{build_lr, LrOptions};

#[path = "../../tests/common/oracle.rs"]
mod oracle;

const CALC: &str = include_str!("../../fixtures/calc.lang");

fn noprec() -> String {
    let start = CALC.find("    prec {").unwrap();
    let end = start + CALC[start..].find("    }\n").unwrap() + 6;
    let mut s = CALC.to_string();
    s.replace_range(start..end, "");
    s
}

fn setup(src: &str, k: usize) -> (crate::grammar::Cfg, LrAutomaton) {
    let l = lower_src(src);
    let a = build_lr(&l.cfg, k, LrOptions::default()).unwrap();
    (l.cfg, a)
}

/// Nondeterministic replay over all admissible actions: can the parser be in
/// `target` with `la` pending after reading `prefix`?
fn replay_reaches(cfg: &crate::grammar::Cfg, a: &LrAutomaton, prefix: &[u32], la: &[u32], target: StateId) -> bool {
    let mut acts: HashMap<(StateId, Vec<u32>), Vec<LrAction>> = HashMap::new();
    for (s, st) in a.states.iter().enumerate() {
        for (&l, &x) in &st.actions {
            acts.insert((s as StateId, a.lookaheads[l as usize].clone()), vec![x]);
        }
    }
    for c in &a.conflicts {
        acts.insert((c.state, a.lookaheads[c.la as usize].clone()), c.actions.iter().map(|x| x.0).collect());
    }
    let mut input: Vec<u32> = prefix.to_vec();
    input.extend(la);
    let k = a.k;
    // (stack, position)
    let mut work: Vec<(Vec<StateId>, usize)> = a.starts.iter().map(|&s| (vec![s], 0)).collect();
    let mut seen = HashSet::new();
    while let Some((stack, pos)) = work.pop() {
        if !seen.insert((stack.clone(), pos)) || stack.len() > 64 {
            continue;
        }
        let top = *stack.last().unwrap();
        if pos == prefix.len() && top == target {
            return true;
        }
        let mut look: Vec<u32> = input[pos.min(input.len())..].iter().take(k).copied().collect();
        while look.len() < k {
            look.push(Terminals::END);
        }
        for x in acts.get(&(top, look.clone())).cloned().unwrap_or_default() {
            match x {
                LrAction::Shift(t) if pos < prefix.len() => {
                    let mut s = stack.clone();
                    s.push(t);
                    work.push((s, pos + 1));
                }
                LrAction::Reduce(p) => {
                    let prod = cfg.prod(p);
                    if stack.len() <= prod.rhs.len() {
                        continue;
                    }
                    let mut s = stack.clone();
                    s.truncate(stack.len() - prod.rhs.len());
                    let cl = a.prod_class[p as usize];
                    if let Some(&t) = a.states[*s.last().unwrap() as usize].trans.get(&GSym::N(prod.lhs, cl)) {
                        s.push(t);
                        work.push((s, pos));
                    }
                }
                _ => {}
            }
        }
    }
    false
}

#[test]
fn calc_noprec_exemplar() {
    let (cfg, a) = setup(&noprec(), 1);
    let t = Tracer::new(&cfg, &a);
    let exs: Vec<ConflictExemplar> = t.trace_all().into_iter().map(|r| r.unwrap()).collect();
    let row_terms = |e: &ConflictExemplar| -> Vec<String> {
        e.rows
            .iter()
            .filter_map(|r| match r {
                PrefixRow::Sym { terminals, .. } => Some(terminals.join(" ")),
                PrefixRow::Recur(_) => None,
            })
            .collect()
    };
    let plus = exs
        .iter()
        .find(|e| {
            e.action_left == "Reduce(Expr -> Expr X0 Expr)" && e.lookahead == ["`+`"] && row_terms(e) == ["id", "`+`", "id"]
        })
        .expect("binop conflict on +");
    assert_eq!(plus.action_right, "Shift");
    assert!(matches!(&plus.rows[1], PrefixRow::Sym { symbol, .. } if symbol == "X0=(`+` | `-`)"));
    assert_eq!(plus.completion_left[0], "`+`");
    assert_eq!(plus.completion_right[0], "`+`");
    let report = render_conflict_report(&exs);
    assert!(report.lines().any(|l| l.contains("Reduce(Expr -> Expr X0 Expr)") && l.contains("Shift")));
    assert!(report.contains(&format!("===== LR conflict 1 of {}", exs.len())));
    println!("{}", render_conflict_report(std::slice::from_ref(plus)));
}

#[test]
fn lrk_exemplar() {
    let (cfg, a) = setup(crate::lr::tests::LRK, 1);
    let t = Tracer::new(&cfg, &a);
    let ex = t.trace(&a.conflicts[0]).unwrap();
    assert!(ex.rows.is_empty());
    assert_eq!(ex.lookahead, ["`a`"]);
    assert_eq!(ex.action_left, "Reduce(A -> eps)");
    assert_eq!(ex.action_right, "Shift");
    assert_eq!(ex.completion_left, ["`a`"]);
    assert_eq!(ex.completion_right, ["`a`", "`a`"]);
}

#[test]
fn empty_report() {
    assert_eq!(render_conflict_report(&[]), "");
}

#[test]
fn exemplars_are_sound_and_derivable() {
    let src = noprec();
    for k in [1, 2] {
        let (cfg, a) = setup(&src, k);
        let t = Tracer::new(&cfg, &a);
        let rec = oracle::Recognizer::new(&cfg);
        assert!(!a.conflicts.is_empty());
        for site in &a.conflicts {
            let ex = t.trace(site).unwrap();
            let la = &a.lookaheads[site.la as usize];
            assert!(replay_reaches(&cfg, &a, &ex.prefix_terms, la, site.state), "k={k} state {}", site.state);
            // Every nonterminal row derives its terminal row within its goto class.
            let (_, path) = t.shortest_path(site.state).unwrap();
            for (g, _) in path {
                if let Some(GSym::N(n, cl)) = g {
                    let sent = t.shortest().class_sentence(n, cl).unwrap();
                    assert!(rec.derives_class(n, &a.classes[cl as usize], sent));
                }
            }
            // Both completions make whole sentences.
            let start = cfg.nt_id(&ex.start).unwrap();
            for comp in [&ex.completion_left, &ex.completion_right] {
                let mut all = ex.prefix_terms.clone();
                for name in comp {
                    all.push(cfg.terminals.iter().find(|(_, x)| x.to_string() == *name).unwrap().0);
                }
                assert!(rec.accepts(start, &all), "{:?}", comp);
            }
        }
    }
}
