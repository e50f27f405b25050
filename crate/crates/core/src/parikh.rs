//! A counting test for dead forms.
//!
//! Let `Δ_p` be the change in nonterminal counts caused by production `p`. If a form `x`
//! derives a terminal word using production `p` exactly `c_p` times, then
//! `N(x) + Σ c_p Δ_p = 0`. For any weight vector `ψ` with `ψ·Δ_p >= 0` for every `p`, this
//! forces `ψ·N(x) <= 0`. A form with `ψ·N(x) > 0` for some such `ψ` is therefore dead.
//!
//! Generators of the cone `{ψ : ψ·Δ_p >= 0}` are computed once by intersecting half-spaces
//! one at a time. Any subset of the cone gives a sound test, so generators are dropped
//! rather than risk overflow or unbounded growth.

use alloc::vec;
use alloc::vec::Vec;

use crate::grammar::ScatteredContextGrammar;
use crate::symbol::Sym;

const MAX_GENERATORS: usize = 512;

pub(crate) struct CountBound {
    nonterminals: usize,
    /// Weight vectors `ψ` in the cone, excluding those orthogonal to every nonterminal.
    weights: Vec<Vec<i64>>,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn normalize(mut v: Vec<i128>) -> Option<Vec<i128>> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 {
        return None;
    }
    for x in &mut v {
        *x /= g;
    }
    Some(v)
}

fn dot(a: &[i128], b: &[i128]) -> Option<i128> {
    a.iter().zip(b).try_fold(0i128, |acc, (&x, &y)| acc.checked_add(x.checked_mul(y)?))
}

impl CountBound {
    pub fn new(g: &ScatteredContextGrammar) -> Option<Self> {
        let n = g.nonterminals().len();
        let deltas: Vec<Vec<i128>> = g
            .productions()
            .iter()
            .map(|p| {
                let mut d = vec![0i128; n];
                for &s in p.lhs() {
                    d[s.index()] -= 1;
                }
                for &s in p.rhs().iter().flatten() {
                    if s.index() < n {
                        d[s.index()] += 1;
                    }
                }
                d
            })
            .collect();

        // The whole space, as the cone generated by ±e_i.
        let mut gens: Vec<Vec<i128>> = Vec::with_capacity(2 * n);
        for i in 0..n {
            for sign in [1, -1] {
                let mut e = vec![0i128; n];
                e[i] = sign;
                gens.push(e);
            }
        }
        for a in &deltas {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut next = Vec::new();
            for g in gens {
                match dot(a, &g) {
                    Some(0) => next.push(g),
                    Some(v) if v > 0 => {
                        pos.push((v, g.clone()));
                        next.push(g);
                    }
                    Some(v) => neg.push((v, g)),
                    None => {}
                }
            }
            'outer: for (vp, p) in &pos {
                for (vn, q) in &neg {
                    if next.len() >= MAX_GENERATORS {
                        break 'outer;
                    }
                    // vp * q - vn * p lies on the hyperplane and inside the previous cone.
                    let combined: Option<Vec<i128>> = p
                        .iter()
                        .zip(q)
                        .map(|(&x, &y)| vp.checked_mul(y)?.checked_sub(vn.checked_mul(x)?))
                        .collect();
                    if let Some(v) = combined.and_then(normalize) {
                        next.push(v);
                    }
                }
            }
            next.sort();
            next.dedup();
            gens = next;
        }

        let weights: Vec<Vec<i64>> = gens
            .into_iter()
            .filter_map(|g| g.into_iter().map(|x| i64::try_from(x).ok()).collect())
            .collect();
        (!weights.is_empty()).then_some(CountBound { nonterminals: n, weights })
    }

    /// True when the nonterminal counts of `form` rule out every terminal word.
    pub fn rules_out(&self, form: &[Sym], counts: &mut Vec<i64>) -> bool {
        counts.clear();
        counts.resize(self.nonterminals, 0);
        for &s in form {
            if s.index() < self.nonterminals {
                counts[s.index()] += 1;
            }
        }
        self.weights.iter().any(|w| {
            w.iter()
                .zip(counts.iter())
                .fold(0i128, |acc, (&x, &c)| acc + x as i128 * c as i128)
                > 0
        })
    }
}
