//! Detection of forms that can never derive a terminal word.
//!
//! Rewriting happens in place, so everything that will ever stand to the left of an
//! occurrence descends from what stands there now. An occurrence of `X` is rewritable only
//! if some production has `X` at index `j` with its other left-hand symbols derivable on the
//! matching sides. A form holding an occurrence that fails this test is dead, as is a form
//! whose nonterminal counts cannot be balanced out (see `parikh`).

use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::grammar::ScatteredContextGrammar;
use crate::parikh::CountBound;
use crate::symbol::Sym;

pub(crate) struct Liveness {
    nonterminals: usize,
    /// Nonterminals derivable from each nonterminal, itself included.
    reach: Vec<u128>,
    /// Per nonterminal, the (left, right) context sets of each lhs slot it fills.
    needs: Vec<Vec<(u128, u128)>>,
    suffix: RefCell<Vec<u128>>,
    counts: Option<CountBound>,
    scratch: RefCell<Vec<i64>>,
}

impl Liveness {
    /// `None` when the grammar has more nonterminals than fit a mask.
    pub fn new(g: &ScatteredContextGrammar) -> Option<Self> {
        let n = g.nonterminals().len();
        if n > 128 {
            return None;
        }
        let bit = |s: Sym| if s.index() < n { 1u128 << s.index() } else { 0 };
        let mut reach: Vec<u128> = (0..n).map(|i| 1u128 << i).collect();
        let mut needs = vec![Vec::new(); n];
        for p in g.productions() {
            for (j, (&x, rhs)) in p.lhs().iter().zip(p.rhs()).enumerate() {
                reach[x.index()] |= rhs.iter().fold(0, |m, &s| m | bit(s));
                let left = p.lhs()[..j].iter().fold(0, |m, &s| m | bit(s));
                let right = p.lhs()[j + 1..].iter().fold(0, |m, &s| m | bit(s));
                needs[x.index()].push((left, right));
            }
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                let mut m = reach[i];
                for (j, r) in reach.iter().enumerate() {
                    if m & (1 << j) != 0 {
                        m |= r;
                    }
                }
                if m != reach[i] {
                    reach[i] = m;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Some(Liveness {
            nonterminals: n,
            reach,
            needs,
            suffix: RefCell::new(Vec::new()),
            counts: CountBound::new(g),
            scratch: RefCell::new(Vec::new()),
        })
    }

    fn reach_of(&self, s: Sym) -> u128 {
        if s.index() < self.nonterminals {
            self.reach[s.index()]
        } else {
            0
        }
    }

    pub fn is_live(&self, form: &[Sym]) -> bool {
        if let Some(c) = &self.counts {
            if c.rules_out(form, &mut self.scratch.borrow_mut()) {
                return false;
            }
        }
        // Left contexts alone settle most dead forms without the suffix pass.
        let mut left = 0u128;
        for &s in form {
            if s.index() < self.nonterminals && !self.needs[s.index()].iter().any(|&(l, _)| l & !left == 0) {
                return false;
            }
            left |= self.reach_of(s);
        }
        let mut suffix = self.suffix.borrow_mut();
        suffix.clear();
        suffix.resize(form.len() + 1, 0);
        for p in (0..form.len()).rev() {
            suffix[p] = suffix[p + 1] | self.reach_of(form[p]);
        }
        let mut left = 0u128;
        for (p, &s) in form.iter().enumerate() {
            if s.index() < self.nonterminals {
                let right = suffix[p + 1];
                let ok = self.needs[s.index()]
                    .iter()
                    .any(|&(l, r)| l & !left == 0 && r & !right == 0);
                if !ok {
                    return false;
                }
            }
            left |= self.reach_of(s);
        }
        true
    }
}
