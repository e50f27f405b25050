use std::collections::BTreeSet;

use proptest::prelude::*;
use scg_core::derive::{apply_step, decide_membership, enumerate, find_applications, replay, successors};
use scg_core::geffert::{
    apply_geffert_step, enumerate_geffert, find_geffert_trace, geffert_successors, has_geffert_shape,
    GeffertGrammar, GeffertRule, GeffertStep,
};
use scg_core::{
    lemma1, lemma1_expected_lengths, transform, CountingState, EnumerationBounds, GrammarBuilder,
    MembershipVerdict, Origin, ScatteredContextGrammar, ShowcaseParams, Sym,
};

const NTS: [&str; 3] = ["S", "X", "Y"];
const TS: [&str; 2] = ["a", "b"];
const ALL: [&str; 5] = ["S", "X", "Y", "a", "b"];

type RawProduction = (Vec<usize>, Vec<Vec<usize>>);

fn raw_production(max_width: usize, min_component: usize) -> impl Strategy<Value = RawProduction> {
    (1..=max_width).prop_flat_map(move |w| {
        (
            prop::collection::vec(0..NTS.len(), w),
            prop::collection::vec(prop::collection::vec(0..ALL.len(), min_component..=2), w),
        )
    })
}

fn build(raw: &[RawProduction]) -> ScatteredContextGrammar {
    let mut b = GrammarBuilder::new(NTS, TS, "S").unwrap();
    for (lhs, rhs) in raw {
        b.add_production(lhs.iter().map(|&i| NTS[i]), rhs.iter().map(|c| c.iter().map(|&i| ALL[i])))
            .unwrap();
    }
    b.build()
}

fn grammar(min_component: usize) -> impl Strategy<Value = ScatteredContextGrammar> {
    prop::collection::vec(raw_production(4, min_component), 1..5).prop_map(|raw| build(&raw))
}

fn form(g: &ScatteredContextGrammar, raw: &[usize]) -> Vec<Sym> {
    raw.iter().map(|&i| g.lookup(ALL[i]).unwrap()).collect()
}

/// Every strictly increasing position tuple whose symbols spell `lhs`.
fn brute_force(form: &[Sym], lhs: &[Sym]) -> Vec<Vec<usize>> {
    fn go(form: &[Sym], lhs: &[Sym], from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == lhs.len() {
            out.push(cur.clone());
            return;
        }
        for p in from..form.len() {
            if form[p] == lhs[cur.len()] {
                cur.push(p);
                go(form, lhs, p + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(form, lhs, 0, &mut Vec::new(), &mut out);
    out
}

fn geffert_grammar() -> impl Strategy<Value = GeffertGrammar> {
    let u = prop::collection::vec(prop::sample::select(vec!["A", "C"]), 0..3);
    let v = prop::collection::vec(prop::sample::select(vec!["B", "D"]), 0..3);
    let rule = prop_oneof![
        (u.clone(), prop::sample::select(vec!["a", "b"])).prop_map(|(u, a)| {
            let mut r = u;
            r.extend(["S'", a]);
            r
        }),
        (u, v).prop_map(|(u, v)| {
            let mut r = u;
            r.push("S'");
            r.extend(v);
            r
        }),
    ];
    prop::collection::vec(rule, 0..4).prop_map(|rules| {
        let mut g = GeffertGrammar::new(["a", "b"]).unwrap();
        for r in rules {
            g.add_rhs(&r).unwrap();
        }
        g.add_rhs::<&str>(&[]).unwrap();
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_agree_with_brute_force(
        g in grammar(0),
        raw in prop::collection::vec(0..ALL.len(), 0..=12),
    ) {
        let f = form(&g, &raw);
        for (i, p) in g.productions().iter().enumerate() {
            let got: Vec<Vec<usize>> = find_applications(&g, &f, i).into_iter().map(|s| s.positions).collect();
            prop_assert_eq!(got, brute_force(&f, p.lhs()));
        }
    }

    #[test]
    fn step_length_bookkeeping(
        g in grammar(0),
        raw in prop::collection::vec(0..ALL.len(), 0..=10),
    ) {
        let f = form(&g, &raw);
        for (i, p) in g.productions().iter().enumerate() {
            for step in find_applications(&g, &f, i) {
                let out = apply_step(&g, &f, &step).unwrap();
                let rhs: usize = p.rhs().iter().map(Vec::len).sum();
                prop_assert_eq!(out.len(), f.len() - p.width() + rhs);
            }
        }
    }

    #[test]
    fn nonerasing_successors_never_shrink(
        g in grammar(1),
        raw in prop::collection::vec(0..ALL.len(), 0..=10),
    ) {
        let f = form(&g, &raw);
        for (_, out) in successors(&g, &f) {
            prop_assert!(out.len() >= f.len());
        }
    }

    #[test]
    fn enumeration_is_deterministic(g in grammar(0)) {
        let bounds = EnumerationBounds::new(6).with_max_forms(2_000);
        prop_assert_eq!(enumerate(&g, &bounds), enumerate(&g, &bounds));
    }

    #[test]
    fn nonerasing_enumeration_is_exhaustive_or_budgeted(g in grammar(1)) {
        let bounds = EnumerationBounds::new(6).with_max_depth(usize::MAX).with_max_forms(5_000);
        let lang = enumerate(&g, &bounds);
        prop_assert_eq!(lang.exhaustive, lang.visited_forms < 5_000);
    }

    #[test]
    fn member_traces_replay_to_the_word(g in grammar(1)) {
        let bounds = EnumerationBounds::new(6).with_max_forms(5_000);
        let lang = enumerate(&g, &bounds);
        for word in lang.words.iter().take(3) {
            let verdict = decide_membership(&g, word.tokens(), &bounds).unwrap();
            let MembershipVerdict::Member(trace) = verdict else {
                return Err(TestCaseError::fail(format!("{word} not found again")));
            };
            let end = replay(&g, &trace).unwrap();
            prop_assert_eq!(g.render_symbols(&end), word.to_string());
        }
    }

    #[test]
    fn encoding_is_a_homomorphism(
        src in geffert_grammar(),
        x in prop::collection::vec(1usize..7, 0..8),
        y in prop::collection::vec(1usize..7, 0..8),
    ) {
        let out = transform(&src).unwrap();
        let syms = |v: &[usize]| -> Vec<Sym> { v.iter().map(|&i| src.symbols()[i].clone()).map(|s| src.lookup(s.name()).unwrap()).collect() };
        let (x, y) = (syms(&x), syms(&y));
        let xy: Vec<Sym> = x.iter().chain(&y).copied().collect();
        let mut joined = out.encoding.encode(&x).unwrap();
        joined.extend(out.encoding.encode(&y).unwrap());
        prop_assert_eq!(out.encoding.encode(&xy).unwrap(), joined);
        for &s in &xy {
            let image = out.encoding.image(s).unwrap();
            prop_assert_eq!(image.len(), if src.is_terminal(s) { 4 } else { 3 });
        }
    }

    #[test]
    fn transform_metrics_and_widths(src in geffert_grammar()) {
        let out = transform(&src).unwrap();
        let m = out.grammar.metrics();
        let cf_rules = src.rules().iter().filter(|r| **r != GeffertRule::Erase).count();
        prop_assert_eq!(m.nonterminal_count, 3);
        prop_assert_eq!(m.width, 9);
        prop_assert_eq!(m.production_count - m.non_cf_production_count, 1);
        prop_assert_eq!(m.production_count, 6 + cf_rules);
        let s = out.grammar.lookup("S").unwrap();
        for (p, origin) in out.grammar.productions().iter().zip(&out.provenance) {
            let lhs_s = p.lhs().iter().filter(|&&x| x == s).count();
            let rhs_s: usize = p.rhs().iter().flatten().filter(|&&x| x == s).count();
            let (width, counts) = match origin {
                Origin::Init => (1, (1, 3)),
                Origin::AppendTerminal { .. } | Origin::Bilateral { .. } => (3, (3, 3)),
                Origin::Final => (4, (3, 0)),
                _ => (9, (3, 3)),
            };
            prop_assert_eq!(p.width(), width);
            prop_assert_eq!((lhs_s, rhs_s), counts);
        }
    }

    #[test]
    fn counting_invariant_on_random_walks(
        src in geffert_grammar(),
        choices in prop::collection::vec(any::<usize>(), 0..40),
    ) {
        let out = transform(&src).unwrap();
        let g = &out.grammar;
        let mut f = vec![g.start()];
        let mut cs = CountingState::default();
        for c in choices {
            let next = successors(g, &f);
            if next.is_empty() {
                break;
            }
            let (step, child) = &next[c % next.len()];
            cs = cs.after(out.provenance[step.production]);
            f = child.to_vec();
            prop_assert!(out.check_counting(&f, cs), "fails at {}", g.render_symbols(&f));
        }
    }

    #[test]
    fn simulation_replays_to_the_source_word(src in geffert_grammar()) {
        let out = transform(&src).unwrap();
        let bounds = EnumerationBounds::new(10).with_max_forms(20_000);
        let words = enumerate_geffert(&src, &bounds).words_up_to(3);
        for word in words.iter().take(4) {
            let trace = find_geffert_trace(&src, word.tokens(), &bounds).unwrap().unwrap();
            let sim = out.simulate(&trace).unwrap();
            let end = replay(&out.grammar, &sim).unwrap();
            prop_assert_eq!(out.grammar.render_symbols(&end), word.to_string());
        }
    }

    #[test]
    fn geffert_forms_keep_their_shape(
        src in geffert_grammar(),
        choices in prop::collection::vec(any::<usize>(), 0..40),
    ) {
        let sp = src.s_prime();
        let mut f = vec![sp];
        for c in choices {
            let next = geffert_successors(&src, &f);
            if next.is_empty() {
                break;
            }
            let (step, child) = &next[c % next.len()];
            prop_assert_eq!(&apply_geffert_step(&src, &f, *step).unwrap(), child);
            let terminals = |x: &[Sym]| x.iter().filter(|&&s| src.is_terminal(s)).count();
            match step {
                GeffertStep::ApplyCf { .. } => prop_assert!(terminals(child) >= terminals(&f)),
                _ => prop_assert_eq!(child.len() + 2, f.len()),
            }
            f = child.to_vec();
            prop_assert!(has_geffert_shape(&f));
            prop_assert!(f.iter().filter(|&&s| s == sp).count() <= 1);
        }
    }
}

#[test]
fn lemma1_lengths_match_the_closed_form() {
    for (k, l) in [(2, 2), (2, 3), (3, 2)] {
        let p = ShowcaseParams::new(k, l).unwrap();
        let lang = enumerate(&lemma1(p), &EnumerationBounds::new(24));
        assert!(lang.exhaustive);
        for max_len in [1, 5, 10, 20] {
            let lengths: BTreeSet<u64> = lang.words_up_to(max_len).iter().map(|w| w.len() as u64).collect();
            assert_eq!(lengths, lemma1_expected_lengths(p, max_len as u64), "k={k} l={l} max_len={max_len}");
        }
        let lengths: BTreeSet<u64> = lang.words.iter().map(|w| w.len() as u64).collect();
        assert_eq!(lengths, lemma1_expected_lengths(p, 20));
    }
}
