//! Two concrete grammars: `{a^n b^n c^n : n ≥ 1}` and the twelve-nonterminal family
//! generating `{a^(l^(k^n)) : n ≥ 0}`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::grammar::{GrammarBuilder, ScatteredContextGrammar};

/// Largest `l^(k^2)` accepted, so that `(S) -> (a^(l^(k^2)))` stays small.
pub const MAX_B3_LENGTH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ShowcaseError {
    #[error("k and l must be at least 2 (got k={k}, l={l})")]
    TooSmall { k: u64, l: u64 },
    #[error("l^(k^2) exceeds {MAX_B3_LENGTH} (k={k}, l={l})")]
    TooLarge { k: u64, l: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShowcaseParams {
    k: u64,
    l: u64,
}

impl ShowcaseParams {
    pub fn new(k: u64, l: u64) -> Result<Self, ShowcaseError> {
        if k < 2 || l < 2 {
            return Err(ShowcaseError::TooSmall { k, l });
        }
        let fits = k
            .checked_mul(k)
            .and_then(|e| u32::try_from(e).ok())
            .and_then(|e| l.checked_pow(e))
            .is_some_and(|n| n <= MAX_B3_LENGTH);
        if !fits {
            return Err(ShowcaseError::TooLarge { k, l });
        }
        Ok(ShowcaseParams { k, l })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> u64 {
        self.l
    }
}

/// `(S) -> (ABC)`, `(A,B,C) -> (aA,bB,cC)`, `(A,B,C) -> (a,b,c)`.
pub fn example1() -> ScatteredContextGrammar {
    let mut b = GrammarBuilder::new(["S", "A", "B", "C"], ["a", "b", "c"], "S").expect("valid alphabet");
    b.add("S", &["A B C"]).expect("valid production");
    b.add("A B C", &["a A", "b B", "c C"]).expect("valid production");
    b.add("A B C", &["a", "b", "c"]).expect("valid production");
    b.build()
}

fn rep(sym: &str, n: u64) -> String {
    let mut s = String::new();
    for i in 0..n {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(sym);
    }
    s
}

fn cat(parts: &[&str]) -> String {
    let parts: Vec<&str> = parts.iter().copied().filter(|p| !p.is_empty()).collect();
    parts.join(" ")
}

pub const LEMMA1_NONTERMINALS: [&str; 12] = ["S", "A", "A'", "A''", "B", "C", "X", "X2", "X3", "Y", "Z", "Z'"];

/// Twelve nonterminals, fourteen productions: three direct `S -> a^...` shortcuts, the
/// initial step, five productions counting in base `k`, then five turning `B`s into `a`s.
pub fn lemma1(p: ShowcaseParams) -> ScatteredContextGrammar {
    let (k, l) = (p.k, p.l);
    let a = |n: u64| rep("a", n);
    let l_k = l.pow(k as u32);
    let l_kk = l.pow((k * k) as u32);

    let mut g = GrammarBuilder::new(LEMMA1_NONTERMINALS, ["a"], "S").expect("valid alphabet");
    let mut add = |lhs: &str, rhs: &[&str]| {
        g.add(lhs, rhs).expect("valid production");
    };
    add("S", &[&a(l)]);
    add("S", &[&a(l_k)]);
    add("S", &[&a(l_kk)]);
    add(
        "S",
        &[&cat(&["A''", &rep("A", l - 1), "X2", &rep("B", k * k - 3), "A'", &rep("C", k * k - 1), "X Y"])],
    );
    add("A' C X Y", &[&rep("B", k - 1), "A'", "X", &cat(&[&rep("C", k), "Y"])]);
    add("A' X Y", &[&rep("B", k - 1), "A'", &cat(&[&rep("C", k - 1), "X Y"])]);
    add("A' X Y", &["Z", "Z", "Y"]);
    add("Z C Z Y", &["Z", &rep("B", k - 1), "Z", "Y"]);
    add("Z Z Y", &["B", &rep("B", k - 1), "X3"]);
    add("A'' A X2 X3", &[&a(l - 1), "A''", &cat(&["X2", &rep("A", l)]), "X3"]);
    add("A'' X2 B X3", &[&a(l - 1), "A''", &cat(&[&rep("A", l - 1), "X2"]), "X3"]);
    add("A'' X2 X3", &["Z'", "Z'", "X3"]);
    add("Z' A Z' X3", &["Z'", &a(l - 1), "Z'", "X3"]);
    add("Z' Z' X3", &["a", &a(l - 1), &a(l - 1)]);
    g.build()
}

/// `{ l^(k^n) : n ≥ 0 } ∩ [0, max_len]`.
pub fn lemma1_expected_lengths(p: ShowcaseParams, max_len: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut exp = 1u64;
    loop {
        let value = u32::try_from(exp).ok().and_then(|e| p.l.checked_pow(e));
        match value {
            Some(v) if v <= max_len => {
                out.insert(v);
            }
            _ => break,
        }
        match exp.checked_mul(p.k) {
            Some(e) => exp = e,
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::{self, decide_membership, MembershipVerdict};
    use crate::form::SententialForm;
    use crate::search::EnumerationBounds;
    use crate::symbol::Sym;
    use alloc::format;
    use alloc::vec;

    fn params(k: u64, l: u64) -> ShowcaseParams {
        ShowcaseParams::new(k, l).unwrap()
    }

    #[test]
    fn params_range() {
        assert_eq!(ShowcaseParams::new(1, 2), Err(ShowcaseError::TooSmall { k: 1, l: 2 }));
        assert_eq!(ShowcaseParams::new(2, 1), Err(ShowcaseError::TooSmall { k: 2, l: 1 }));
        assert!(ShowcaseParams::new(2, 8).is_ok());
        assert_eq!(ShowcaseParams::new(2, 9), Err(ShowcaseError::TooLarge { k: 2, l: 9 }));
        assert!(ShowcaseParams::new(3, 2).is_ok());
        assert_eq!(ShowcaseParams::new(4, 2), Err(ShowcaseError::TooLarge { k: 4, l: 2 }));
        assert!(ShowcaseParams::new(u64::MAX, 2).is_err());
    }

    #[test]
    fn example1_shape() {
        let g = example1();
        let m = g.metrics();
        assert_eq!((m.nonterminal_count, m.production_count, m.width), (4, 3, 3));
        assert!(!g.is_erasing());
        let v = decide_membership(&g, &["a", "a", "b", "c"], &EnumerationBounds::default()).unwrap();
        assert_eq!(v, MembershipVerdict::NotMemberExhaustive);
    }

    #[test]
    fn lemma1_productions() {
        let g = lemma1(params(2, 2));
        assert_eq!(format!("{}", g.display_production(2)), format!("(S) -> ({})", rep("a", 16)));
        assert_eq!(
            format!("{}", g.display_production(3)),
            "(S) -> (A'' A X2 B A' C C C X Y)"
        );
        assert_eq!(
            format!("{}", g.display_production(4)),
            "(A', C, X, Y) -> (B, A', X, C C Y)"
        );
        assert_eq!(
            format!("{}", g.display_production(13)),
            "(Z', Z', X3) -> (a, a, a)"
        );
        let g = lemma1(params(2, 3));
        assert_eq!(format!("{}", g.display_production(0)), "(S) -> (a a a)");
        for (k, l) in [(2, 2), (2, 3), (3, 2), (2, 8)] {
            let g = lemma1(params(k, l));
            let m = g.metrics();
            assert_eq!(
                (m.nonterminal_count, m.production_count, m.non_cf_production_count, m.width),
                (12, 14, 10, 4)
            );
            assert!(!m.is_erasing);
        }
    }

    #[test]
    fn expected_lengths() {
        let set = |v: &[u64]| v.iter().copied().collect::<BTreeSet<u64>>();
        assert_eq!(lemma1_expected_lengths(params(2, 2), 20), set(&[2, 4, 16]));
        assert_eq!(lemma1_expected_lengths(params(2, 2), 300), set(&[2, 4, 16, 256]));
        assert_eq!(lemma1_expected_lengths(params(3, 2), 20), set(&[2, 8]));
        assert_eq!(lemma1_expected_lengths(params(2, 3), 1), set(&[]));
        assert_eq!(lemma1_expected_lengths(params(2, 2), u64::MAX).len(), 6);
    }

    /// Applies production `index` at its first match.
    fn apply_first(g: &ScatteredContextGrammar, form: &SententialForm, index: usize) -> SententialForm {
        let step = derive::find_applications(g, form, index)
            .into_iter()
            .next()
            .unwrap_or_else(|| panic!("production {index} does not apply"));
        derive::apply_step(g, form, &step).unwrap()
    }

    /// `a^(l^(m-1)-l) A'' A^(l^(m-1)-1) X2 B^(k^n-m) X3`
    fn stage_form(g: &ScatteredContextGrammar, p: ShowcaseParams, kn: u64, m: u64) -> Vec<Sym> {
        let lm = p.l.pow((m - 1) as u32);
        let text = cat(&[&rep("a", lm - p.l), "A''", &rep("A", lm - 1), "X2", &rep("B", kn - m), "X3"]);
        text.split_whitespace().map(|t| g.lookup(t).unwrap()).collect()
    }

    #[test]
    fn second_stage_closed_form() {
        let p = params(2, 2);
        let g = lemma1(p);
        let kn = 8;
        let mut form = SententialForm::new(vec![g.start()]);
        for index in [3, 6, 7, 7, 7, 8] {
            form = apply_first(&g, &form, index);
        }
        assert_eq!(form.as_slice(), stage_form(&g, p, kn, 2).as_slice());
        for m in 2..kn {
            for _ in 0..p.l.pow((m - 1) as u32) - 1 {
                form = apply_first(&g, &form, 9);
            }
            form = apply_first(&g, &form, 10);
            assert_eq!(form.as_slice(), stage_form(&g, p, kn, m + 1).as_slice(), "m = {}", m + 1);
        }
        form = apply_first(&g, &form, 11);
        while !derive::find_applications(&g, &form, 12).is_empty() {
            form = apply_first(&g, &form, 12);
        }
        form = apply_first(&g, &form, 13);
        let a = g.lookup("a").unwrap();
        assert_eq!(form.as_slice(), vec![a; 256].as_slice());
    }
}
