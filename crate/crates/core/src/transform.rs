//! Construction of a three-nonterminal scattered context grammar `({S, A, B}, T, P, S)` from a
//! Geffert normal form grammar, with every production rewriting at most nine symbols.
//!
//! The five Geffert nonterminals are encoded over `{A, B}` by the homomorphism
//! `A -> ABB`, `B -> BBA`, `C -> BAB`, `D -> BAB`, `a -> AaBB`. A sentential form of the
//! constructed grammar keeps three `S` markers; the context-free part of a Geffert derivation
//! grows around the middle `S`, encoded terminals are then moved behind the last `S` one by
//! one, and finally each `AB -> λ` / `CD -> λ` erasure is replayed on the outermost encoded
//! pair around the middle `S`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::derive::{self, ApplyError, DerivationStep, DerivationTrace};
use crate::form::{SententialForm, Trace};
use crate::geffert::{self, GeffertGrammar, GeffertReplayError, GeffertRule, GeffertStep, GeffertTrace, RuleIssue};
use crate::grammar::{GrammarBuilder, ScatteredContextGrammar};
use crate::symbol::Sym;

/// Where a production of the constructed grammar comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// `(S) -> (SBBASABBSA)`
    Init,
    /// `(S,S,S) -> (S, h(u) S h(a), S)` for source rule `rule`.
    AppendTerminal { rule: usize },
    /// `(S,S,S) -> (S, h(u) S h(v), S)` for source rule `rule`.
    Bilateral { rule: usize },
    /// Simulates `AB -> λ`.
    EraseAb,
    /// Simulates `CD -> λ`.
    EraseCd,
    /// Moves one encoded unit behind the last `S`, keeping the `SBBA` marker.
    UnpackKeep,
    /// Moves the last encoded unit and drops the marker.
    UnpackDrop,
    /// `(S,S,S,A) -> (λ,λ,λ,λ)`
    Final,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Init => f.write_str("init"),
            Origin::AppendTerminal { rule } => write!(f, "cf-a {rule}"),
            Origin::Bilateral { rule } => write!(f, "cf-v {rule}"),
            Origin::EraseAb => f.write_str("erase-ab"),
            Origin::EraseCd => f.write_str("erase-cd"),
            Origin::UnpackKeep => f.write_str("unpack-keep"),
            Origin::UnpackDrop => f.write_str("unpack-drop"),
            Origin::Final => f.write_str("final"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("source grammar is not in Geffert normal form: {}", .0.first().map(|i| i.to_string()).unwrap_or_default())]
    InvalidSource(Vec<RuleIssue>),
    #[error("terminal `{0}` clashes with a nonterminal of the constructed grammar")]
    NameClash(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` cannot be encoded")]
pub struct EncodeError(pub String);

/// The homomorphism `h`, from Geffert symbols to symbols of the constructed grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingTable {
    images: Vec<Option<Vec<Sym>>>,
    names: Vec<String>,
}

impl EncodingTable {
    fn new(source: &GeffertGrammar, target: &ScatteredContextGrammar) -> Self {
        let s = |n: &str| target.lookup(n).expect("constructed grammar declares S, A, B");
        let (a, b) = (s("A"), s("B"));
        let images = source
            .symbols()
            .iter()
            .map(|sym| match sym.name() {
                geffert::S_PRIME => None,
                "A" => Some(vec![a, b, b]),
                "B" => Some(vec![b, b, a]),
                "C" | "D" => Some(vec![b, a, b]),
                t => Some(vec![a, s(t), b, b]),
            })
            .collect();
        EncodingTable {
            images,
            names: source.symbols().iter().map(|s| s.name().to_string()).collect(),
        }
    }

    pub fn image(&self, sym: Sym) -> Option<&[Sym]> {
        self.images.get(sym.index())?.as_deref()
    }

    /// `h(s)`, symbol by symbol.
    pub fn encode(&self, s: &[Sym]) -> Result<Vec<Sym>, EncodeError> {
        let mut out = Vec::with_capacity(4 * s.len());
        for &sym in s {
            let image = self
                .image(sym)
                .ok_or_else(|| EncodeError(self.names.get(sym.index()).cloned().unwrap_or_default()))?;
            out.extend_from_slice(image);
        }
        Ok(out)
    }
}

/// Applications of the `Init` and `Final` productions along a derivation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CountingState {
    pub i: usize,
    pub j: usize,
}

impl CountingState {
    pub fn after(self, origin: Origin) -> Self {
        match origin {
            Origin::Init => CountingState { i: self.i + 1, ..self },
            Origin::Final => CountingState { j: self.j + 1, ..self },
            _ => self,
        }
    }
}

/// Checks `|x|_B = 2k`, `|x|_A = k + i - j` and `|x|_S = 1 + 2i - 3j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingCheck {
    s: Sym,
    a: Sym,
    b: Sym,
}

impl CountingCheck {
    /// Needs nonterminals named `S`, `A` and `B`.
    pub fn for_grammar(g: &ScatteredContextGrammar) -> Option<Self> {
        let nt = |n: &str| g.lookup(n).filter(|&s| !g.is_terminal(s));
        Some(CountingCheck {
            s: nt("S")?,
            a: nt("A")?,
            b: nt("B")?,
        })
    }

    pub fn holds(&self, form: &[Sym], cs: CountingState) -> bool {
        let (mut s, mut a, mut b) = (0i64, 0i64, 0i64);
        for &x in form {
            if x == self.s {
                s += 1;
            } else if x == self.a {
                a += 1;
            } else if x == self.b {
                b += 1;
            }
        }
        if b % 2 != 0 {
            return false;
        }
        let (k, i, j) = (b / 2, cs.i as i64, cs.j as i64);
        a == k + i - j && s == 1 + 2 * i - 3 * j
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformOutput {
    pub grammar: ScatteredContextGrammar,
    /// Origin of each production, by production index.
    pub provenance: Vec<Origin>,
    pub encoding: EncodingTable,
    source: GeffertGrammar,
    /// Production simulating each source rule; `None` for `S' -> λ`.
    rule_production: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimulateError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("source trace does not replay: {0}")]
    SourceReplay(#[from] GeffertReplayError),
    #[error("source trace does not start from S'")]
    BadStart,
    #[error("source trace does not end in a terminal word")]
    NotTerminal,
    #[error("simulation reached an unexpected form at step {step}: {reason}")]
    Structure { step: usize, reason: &'static str },
    #[error("simulated step {step} is invalid: {source}")]
    Step { step: usize, source: ApplyError },
}

const ERASE_AB: [&str; 9] = ["S", "A", "B", "B", "S", "B", "B", "A", "S"];
const ERASE_CD: [&str; 9] = ["S", "B", "A", "B", "S", "B", "A", "B", "S"];
const UNPACK: [&str; 9] = ["S", "B", "B", "A", "S", "A", "B", "B", "S"];
const SHIFT: [&str; 9] = ["", "", "", "S", "S", "S", "", "", ""];
const SHIFT_KEEP: [&str; 9] = ["", "", "", "S B B A", "S", "S", "", "", ""];

pub fn transform(g: &GeffertGrammar) -> Result<TransformOutput, TransformError> {
    let report = geffert::validate_geffert(g);
    if !report.is_valid() {
        return Err(TransformError::InvalidSource(report.issues));
    }
    let terminals: Vec<&str> = g.terminals().iter().map(|t| t.name()).collect();
    if let Some(t) = terminals.iter().find(|t| ["S", "A", "B"].contains(t)) {
        return Err(TransformError::NameClash(t.to_string()));
    }
    let mut builder = GrammarBuilder::new(["S", "A", "B"], &terminals, "S")
        .expect("terminals are valid, distinct, and disjoint from {S, A, B}");
    let skeleton = builder.clone().build();
    let encoding = EncodingTable::new(g, &skeleton);
    let h = |syms: &[Sym]| -> Vec<String> {
        let encoded = encoding.encode(syms).expect("validated rules encode");
        encoded.iter().map(|&s| skeleton.name(s).to_string()).collect()
    };

    let mut provenance = Vec::new();
    let mut rule_production = vec![None; g.rules().len()];
    let mut add = |builder: &mut GrammarBuilder, lhs: &[&str], rhs: &[Vec<String>], origin: Origin| {
        let index = builder
            .add_production(lhs.iter().copied(), rhs.iter().map(|c| c.iter().map(String::as_str)))
            .expect("constructed productions use declared symbols");
        provenance.push(origin);
        index
    };
    let words = |parts: &[&str]| -> Vec<Vec<String>> {
        parts
            .iter()
            .map(|p| p.split_whitespace().map(String::from).collect())
            .collect()
    };

    add(&mut builder, &["S"], &words(&["S B B A S A B B S A"]), Origin::Init);
    let cf_rhs = |u: &[Sym], right: &[Sym]| -> Vec<Vec<String>> {
        let mut middle = h(u);
        middle.push("S".into());
        middle.extend(h(right));
        vec![vec!["S".into()], middle, vec!["S".into()]]
    };
    for (i, rule) in g.rules().iter().enumerate() {
        if let GeffertRule::AppendTerminal { u, a } = rule {
            rule_production[i] = Some(add(&mut builder, &["S", "S", "S"], &cf_rhs(u, &[*a]), Origin::AppendTerminal { rule: i }));
        }
    }
    for (i, rule) in g.rules().iter().enumerate() {
        if let GeffertRule::Bilateral { u, v } = rule {
            rule_production[i] = Some(add(&mut builder, &["S", "S", "S"], &cf_rhs(u, v), Origin::Bilateral { rule: i }));
        }
    }
    add(&mut builder, &ERASE_AB, &words(&SHIFT), Origin::EraseAb);
    add(&mut builder, &ERASE_CD, &words(&SHIFT), Origin::EraseCd);
    add(&mut builder, &UNPACK, &words(&SHIFT_KEEP), Origin::UnpackKeep);
    add(&mut builder, &UNPACK, &words(&SHIFT), Origin::UnpackDrop);
    add(&mut builder, &["S", "S", "S", "A"], &words(&["", "", "", ""]), Origin::Final);

    Ok(TransformOutput {
        grammar: builder.build(),
        provenance,
        encoding,
        source: g.clone(),
        rule_production,
    })
}

/// Builds `transform(g)` and simulates `trace` in it.
pub fn simulate(g: &GeffertGrammar, trace: &GeffertTrace) -> Result<DerivationTrace, SimulateError> {
    let out = transform(g)?;
    out.simulate(trace)
}

impl TransformOutput {
    pub fn source(&self) -> &GeffertGrammar {
        &self.source
    }

    /// Index of the unique production with origin `origin`.
    pub fn production_of(&self, origin: Origin) -> Option<usize> {
        self.provenance.iter().position(|&o| o == origin)
    }

    pub fn rule_production(&self, rule: usize) -> Option<usize> {
        self.rule_production.get(rule).copied().flatten()
    }

    pub fn counting_check(&self) -> CountingCheck {
        CountingCheck::for_grammar(&self.grammar).expect("constructed grammar declares S, A, B")
    }

    pub fn check_counting(&self, form: &[Sym], cs: CountingState) -> bool {
        self.counting_check().holds(form, cs)
    }

    /// Replays a successful Geffert derivation in the constructed grammar.
    ///
    /// `Init` first, then one rule production per context-free step in source order. Encoded
    /// terminals are moved right to left by `UnpackKeep`, closed by `UnpackDrop`; then one
    /// erasure production per erasure step, last erasure first, and `Final`.
    pub fn simulate(&self, trace: &GeffertTrace) -> Result<DerivationTrace, SimulateError> {
        let src = &self.source;
        if trace.start.as_slice() != [src.s_prime()] {
            return Err(SimulateError::BadStart);
        }
        let word = geffert::replay_geffert(src, trace)?;
        if !word.iter().all(|&s| src.is_terminal(s)) {
            return Err(SimulateError::NotTerminal);
        }

        let g = &self.grammar;
        let s = g.lookup("S").expect("declared");
        let a = g.lookup("A").expect("declared");
        let b = g.lookup("B").expect("declared");
        let prod = |o: Origin| self.production_of(o).expect("every fixed production exists");

        let mut sim = Simulation {
            grammar: g,
            form: SententialForm::new(vec![s]),
            trace: Trace::new(SententialForm::new(vec![s])),
        };
        sim.apply(prod(Origin::Init), vec![0])?;

        for step in &trace.steps {
            if let GeffertStep::ApplyCf { rule, .. } = *step {
                if let Some(p) = self.rule_production(rule) {
                    let markers = sim.markers(s)?;
                    sim.apply(p, markers.to_vec())?;
                }
            }
        }

        let units = word.len();
        for n in 0..=units {
            let [first, middle, last] = sim.markers(s)?;
            if first != 0 {
                return Err(sim.structure("leading marker is not at the front"));
            }
            let f = sim.form.as_slice();
            let unit_a = match last.checked_sub(3).map(|p| f[p]) {
                Some(x) if x == a => last - 3,
                Some(_) if last >= 4 && f[last - 4] == a => last - 4,
                _ => return Err(sim.structure("no encoded unit before the last marker")),
            };
            if f[last - 1] != b || f[last - 2] != b {
                return Err(sim.structure("encoded unit does not end in BB"));
            }
            let origin = if n == units { Origin::UnpackDrop } else { Origin::UnpackKeep };
            sim.apply(prod(origin), vec![0, 1, 2, 3, middle, unit_a, last - 2, last - 1, last])?;
        }

        for step in trace.steps.iter().rev() {
            let origin = match step {
                GeffertStep::EraseAb { .. } => Origin::EraseAb,
                GeffertStep::EraseCd { .. } => Origin::EraseCd,
                GeffertStep::ApplyCf { .. } => continue,
            };
            let [first, middle, last] = sim.markers(s)?;
            if first != 0 || last < 3 {
                return Err(sim.structure("erasure markers out of place"));
            }
            sim.apply(prod(origin), vec![0, 1, 2, 3, middle, last - 3, last - 2, last - 1, last])?;
        }

        let [first, middle, last] = sim.markers(s)?;
        let end = sim
            .form
            .iter()
            .rposition(|&x| x == a)
            .ok_or_else(|| sim.structure("no trailing A"))?;
        sim.apply(prod(Origin::Final), vec![first, middle, last, end])?;
        Ok(sim.trace)
    }
}

struct Simulation<'g> {
    grammar: &'g ScatteredContextGrammar,
    form: SententialForm,
    trace: DerivationTrace,
}

impl Simulation<'_> {
    fn apply(&mut self, production: usize, positions: Vec<usize>) -> Result<(), SimulateError> {
        let step = DerivationStep::new(production, positions);
        self.form = derive::apply_step(self.grammar, &self.form, &step).map_err(|source| SimulateError::Step {
            step: self.trace.len() + 1,
            source,
        })?;
        self.trace.steps.push(step);
        Ok(())
    }

    fn structure(&self, reason: &'static str) -> SimulateError {
        SimulateError::Structure {
            step: self.trace.len() + 1,
            reason,
        }
    }

    /// Positions of the three `S` markers.
    fn markers(&self, s: Sym) -> Result<[usize; 3], SimulateError> {
        let found: Vec<usize> = self
            .form
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == s)
            .map(|(i, _)| i)
            .collect();
        <[usize; 3]>::try_from(found).map_err(|_| self.structure("form does not hold exactly three S"))
    }
}
