//! Line-oriented text formats: grammar files, Geffert files, derivation traces and
//! provenance sidecars. `#` starts a comment; `@` is the empty string.

use std::fmt::Write as _;

use scg_core::derive::{DerivationStep, DerivationTrace};
use scg_core::geffert::{self, GeffertError, GeffertGrammar, GeffertStep, GeffertTrace};
use scg_core::{GrammarBuilder, GrammarError, Origin, ScatteredContextGrammar, SententialForm, Sym, Trace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected format tag `scg` or `geffert`")]
    MissingTag,
    #[error("expected format tag `{0}`")]
    WrongTag(&'static str),
    #[error("`{0}` given twice")]
    DuplicateHeader(&'static str),
    #[error("missing `{0}` line")]
    MissingHeader(&'static str),
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Geffert(#[from] GeffertError),
    #[error("rule is not in Geffert normal form: {0}")]
    Shape(String),
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("bad number `{0}`")]
    Number(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, kind: impl Into<ParseErrorKind>) -> ParseError {
    ParseError { line, kind: kind.into() }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

/// Non-blank lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Tokens of one string; `@` alone is the empty string.
fn tokens(s: &str) -> Result<Vec<&str>, String> {
    let t: Vec<&str> = s.split_whitespace().collect();
    match t.as_slice() {
        ["@"] => Ok(Vec::new()),
        t if t.contains(&"@") => Err(format!("`@` mixed with symbols in `{s}`")),
        _ => Ok(t),
    }
}

/// Either kind of grammar file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrammarFile {
    Scg(ScatteredContextGrammar),
    Geffert(GeffertGrammar),
}

pub fn parse_any(text: &str) -> Result<GrammarFile, ParseError> {
    match lines(text).next() {
        Some((_, "scg")) => parse_grammar(text).map(GrammarFile::Scg),
        Some((_, "geffert")) => parse_geffert(text).map(GrammarFile::Geffert),
        Some((line, _)) => Err(err(line, ParseErrorKind::MissingTag)),
        None => Err(err(1, ParseErrorKind::MissingTag)),
    }
}

struct Headers<'a> {
    nonterminals: Option<Vec<&'a str>>,
    terminals: Option<Vec<&'a str>>,
    start: Option<&'a str>,
}

fn header<'a>(line: usize, key: &'static str, value: &'a str, slot: &mut Option<Vec<&'a str>>) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(err(line, ParseErrorKind::DuplicateHeader(key)));
    }
    *slot = Some(value.split_whitespace().collect());
    Ok(())
}

/// Splits `(x, y, z)` into its components.
fn components(line: usize, s: &str) -> Result<Vec<&str>, ParseError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| syntax(line, format!("expected `( ... )`, found `{}`", s.trim())))?;
    Ok(inner.split(',').map(str::trim).collect())
}

pub fn parse_grammar(text: &str) -> Result<ScatteredContextGrammar, ParseError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, "scg")) => {}
        Some((line, _)) => return Err(err(line, ParseErrorKind::WrongTag("scg"))),
        None => return Err(err(1, ParseErrorKind::WrongTag("scg"))),
    }
    let mut h = Headers {
        nonterminals: None,
        terminals: None,
        start: None,
    };
    let mut builder: Option<GrammarBuilder> = None;
    let mut last_line = 1;
    for (line, l) in it {
        last_line = line;
        if let Some(rest) = l.strip_prefix("prod") {
            let b = match &mut builder {
                Some(b) => b,
                None => builder.insert(start_builder(line, &h)?),
            };
            let (lhs, rhs) = rest
                .split_once("->")
                .ok_or_else(|| syntax(line, "expected `->`"))?;
            let lhs = components(line, lhs)?;
            let rhs = components(line, rhs)?;
            let lhs: Vec<&str> = lhs
                .into_iter()
                .map(|c| match c.split_whitespace().collect::<Vec<_>>().as_slice() {
                    [] | ["@"] => Ok(""),
                    [t] => Ok(*t),
                    _ => Err(syntax(line, format!("left-hand component `{c}` is not one symbol"))),
                })
                .collect::<Result<_, _>>()?;
            let rhs: Vec<Vec<&str>> = rhs
                .into_iter()
                .map(|c| tokens(c).map_err(|m| syntax(line, m)))
                .collect::<Result<_, _>>()?;
            b.add_production(lhs, rhs).map_err(|e| err(line, e))?;
            continue;
        }
        if builder.is_some() {
            return Err(syntax(line, "header after the first production"));
        }
        let (key, value) = l
            .split_once(':')
            .ok_or_else(|| syntax(line, format!("unrecognized line `{l}`")))?;
        match key.trim() {
            "nonterminals" => header(line, "nonterminals", value, &mut h.nonterminals)?,
            "terminals" => header(line, "terminals", value, &mut h.terminals)?,
            "start" => {
                if h.start.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateHeader("start")));
                }
                match value.split_whitespace().collect::<Vec<_>>().as_slice() {
                    [s] => h.start = Some(s),
                    _ => return Err(syntax(line, "`start` takes exactly one symbol")),
                }
            }
            other => return Err(syntax(line, format!("unknown header `{other}`"))),
        }
    }
    match builder {
        Some(b) => Ok(b.build()),
        None => Ok(start_builder(last_line, &h)?.build()),
    }
}

fn start_builder(line: usize, h: &Headers) -> Result<GrammarBuilder, ParseError> {
    let nts = h
        .nonterminals
        .as_ref()
        .ok_or(err(line, ParseErrorKind::MissingHeader("nonterminals")))?;
    let ts = h
        .terminals
        .as_ref()
        .ok_or(err(line, ParseErrorKind::MissingHeader("terminals")))?;
    let start = h.start.ok_or(err(line, ParseErrorKind::MissingHeader("start")))?;
    GrammarBuilder::new(nts, ts, start).map_err(|e| err(line, e))
}

pub fn render_grammar(g: &ScatteredContextGrammar) -> String {
    let names = |syms: &[scg_core::Symbol]| -> String {
        syms.iter().map(|s| format!(" {}", s.name())).collect()
    };
    let mut out = String::from("scg\n");
    let _ = writeln!(out, "nonterminals:{}", names(g.nonterminals()));
    let _ = writeln!(out, "terminals:{}", names(g.terminals()));
    let _ = writeln!(out, "start: {}", g.name(g.start()));
    for i in 0..g.productions().len() {
        let _ = writeln!(out, "prod {}", g.display_production(i));
    }
    out
}

pub fn parse_geffert(text: &str) -> Result<GeffertGrammar, ParseError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, "geffert")) => {}
        Some((line, _)) => return Err(err(line, ParseErrorKind::WrongTag("geffert"))),
        None => return Err(err(1, ParseErrorKind::WrongTag("geffert"))),
    }
    let mut grammar: Option<GeffertGrammar> = None;
    let mut rule_lines = Vec::new();
    let mut last_line = 1;
    for (line, l) in it {
        last_line = line;
        if let Some(rest) = l.strip_prefix("prod") {
            let g = grammar
                .as_mut()
                .ok_or(err(line, ParseErrorKind::MissingHeader("terminals")))?;
            let (lhs, rhs) = rest
                .split_once("->")
                .ok_or_else(|| syntax(line, "expected `->`"))?;
            if lhs.trim() != geffert::S_PRIME {
                return Err(syntax(line, format!("left-hand side must be {}", geffert::S_PRIME)));
            }
            let rhs = tokens(rhs).map_err(|m| syntax(line, m))?;
            g.add_rhs(&rhs).map_err(|e| err(line, e))?;
            rule_lines.push(line);
            continue;
        }
        let (key, value) = l
            .split_once(':')
            .ok_or_else(|| syntax(line, format!("unrecognized line `{l}`")))?;
        if key.trim() != "terminals" {
            return Err(syntax(line, format!("unknown header `{}`", key.trim())));
        }
        if grammar.is_some() {
            return Err(err(line, ParseErrorKind::DuplicateHeader("terminals")));
        }
        grammar = Some(GeffertGrammar::new(value.split_whitespace()).map_err(|e| err(line, e))?);
    }
    let g = grammar.ok_or(err(last_line, ParseErrorKind::MissingHeader("terminals")))?;
    if let Some(issue) = geffert::validate_geffert(&g).issues.into_iter().next() {
        return Err(err(rule_lines[issue.rule], ParseErrorKind::Shape(issue.message)));
    }
    Ok(g)
}

pub fn render_geffert(g: &GeffertGrammar) -> String {
    let mut out = String::from("geffert\nterminals:");
    for t in g.terminals() {
        out.push(' ');
        out.push_str(t.name());
    }
    out.push('\n');
    for i in 0..g.rules().len() {
        let _ = writeln!(out, "prod {}", g.render_rule(i));
    }
    out
}

fn parse_start(
    line: usize,
    value: &str,
    lookup: impl Fn(&str) -> Option<Sym>,
) -> Result<SententialForm, ParseError> {
    let toks = tokens(value).map_err(|m| syntax(line, m))?;
    toks.iter()
        .map(|t| lookup(t).ok_or_else(|| err(line, ParseErrorKind::Undeclared(t.to_string()))))
        .collect::<Result<Vec<_>, _>>()
        .map(SententialForm::new)
}

fn number(line: usize, s: &str) -> Result<usize, ParseError> {
    s.parse().map_err(|_| err(line, ParseErrorKind::Number(s.to_string())))
}

/// 1-based text position to 0-based index.
fn position(line: usize, s: &str) -> Result<usize, ParseError> {
    match number(line, s)? {
        0 => Err(syntax(line, "positions start at 1")),
        p => Ok(p - 1),
    }
}

fn parse_trace_with<S>(
    text: &str,
    lookup: impl Fn(&str) -> Option<Sym>,
    mut step: impl FnMut(usize, &str) -> Result<S, ParseError>,
) -> Result<Trace<S>, ParseError> {
    let mut it = lines(text);
    let (line, first) = it.next().ok_or(err(1, ParseErrorKind::MissingHeader("start")))?;
    let value = first
        .strip_prefix("start:")
        .ok_or(err(line, ParseErrorKind::MissingHeader("start")))?;
    let mut trace = Trace::new(parse_start(line, value, lookup)?);
    for (line, l) in it {
        trace.steps.push(step(line, l)?);
    }
    Ok(trace)
}

/// `start: <tok> ...` followed by `step <production> @ <pos> ...` lines; positions are 1-based.
pub fn parse_trace(g: &ScatteredContextGrammar, text: &str) -> Result<DerivationTrace, ParseError> {
    parse_trace_with(text, |t| g.lookup(t), |line, l| {
        let rest = l
            .strip_prefix("step")
            .ok_or_else(|| syntax(line, "expected `step <production> @ <positions>`"))?;
        let (p, positions) = rest
            .split_once('@')
            .ok_or_else(|| syntax(line, "expected `@`"))?;
        let positions = positions
            .split_whitespace()
            .map(|s| position(line, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DerivationStep::new(number(line, p.trim())?, positions))
    })
}

pub fn render_trace(g: &ScatteredContextGrammar, trace: &DerivationTrace) -> String {
    let mut out = format!("start: {}\n", g.render_symbols(&trace.start));
    for step in &trace.steps {
        let _ = writeln!(out, "{step}");
    }
    out
}

/// Geffert traces use `cf <rule> @ <pos>`, `erase-ab @ <pos>` and `erase-cd @ <pos>`.
pub fn parse_geffert_trace(g: &GeffertGrammar, text: &str) -> Result<GeffertTrace, ParseError> {
    parse_trace_with(text, |t| g.lookup(t), |line, l| {
        let (head, pos) = l
            .split_once('@')
            .ok_or_else(|| syntax(line, "expected `@`"))?;
        let position = position(line, pos.trim())?;
        match head.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["cf", rule] => Ok(GeffertStep::ApplyCf {
                rule: number(line, rule)?,
                position,
            }),
            ["erase-ab"] => Ok(GeffertStep::EraseAb { position }),
            ["erase-cd"] => Ok(GeffertStep::EraseCd { position }),
            _ => Err(syntax(line, format!("unknown step `{}`", head.trim()))),
        }
    })
}

pub fn render_geffert_trace(g: &GeffertGrammar, trace: &GeffertTrace) -> String {
    let mut out = format!("start: {}\n", g.render_symbols(&trace.start));
    for step in &trace.steps {
        let _ = writeln!(out, "{step}");
    }
    out
}

/// One `<production>: <origin>` line per production.
pub fn render_provenance(origins: &[Origin]) -> String {
    origins
        .iter()
        .enumerate()
        .map(|(i, o)| format!("{i}: {o}\n"))
        .collect()
}

pub fn parse_provenance(text: &str) -> Result<Vec<Origin>, ParseError> {
    let mut out = Vec::new();
    for (line, l) in lines(text) {
        let (index, origin) = l
            .split_once(':')
            .ok_or_else(|| syntax(line, "expected `<production>: <origin>`"))?;
        if number(line, index.trim())? != out.len() {
            return Err(syntax(line, format!("expected production {}", out.len())));
        }
        let origin = match origin.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["init"] => Origin::Init,
            ["cf-a", r] => Origin::AppendTerminal { rule: number(line, r)? },
            ["cf-v", r] => Origin::Bilateral { rule: number(line, r)? },
            ["erase-ab"] => Origin::EraseAb,
            ["erase-cd"] => Origin::EraseCd,
            ["unpack-keep"] => Origin::UnpackKeep,
            ["unpack-drop"] => Origin::UnpackDrop,
            ["final"] => Origin::Final,
            _ => return Err(syntax(line, format!("unknown origin `{}`", origin.trim()))),
        };
        out.push(origin);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = "scg
# a^n b^n c^n
nonterminals: S A B C
terminals: a b c
start: S
prod (S) -> (A B C)
prod (A, B, C) -> (a A, b B, c C)
prod (A, B, C) -> (a, b, c)
";

    #[test]
    fn example1_round_trip() {
        let g = parse_grammar(EXAMPLE1).unwrap();
        assert_eq!(g, scg_core::example1());
        assert_eq!(g.metrics().width, 3);
        assert_eq!(parse_grammar(&render_grammar(&g)).unwrap(), g);
    }

    #[test]
    fn erasing_component() {
        let g = parse_grammar("scg\nnonterminals: S\nterminals:\nstart: S\nprod (S) -> (@)\n").unwrap();
        assert!(g.productions()[0].is_erasing());
        assert_eq!(render_grammar(&g), "scg\nnonterminals: S\nterminals:\nstart: S\nprod (S) -> (@)\n");
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_grammar("scg\nnonterminals: S\nterminals: a\nstart: S\nprod (S) -> (a X)\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert_eq!(e.kind, ParseErrorKind::Grammar(GrammarError::UndeclaredSymbol("X".into())));
        let e = parse_grammar("scg\nnonterminals: S\nterminals: a\nstart: S\nprod (S, @) -> (a, a)\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Grammar(GrammarError::EmptyLhsComponent));
        let e = parse_grammar("scg\nnonterminals: S\nterminals: a\nstart: a\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_grammar("scg\nnonterminals: S\nprod (S) -> (S)\n").unwrap_err();
        assert_eq!((e.line, e.kind), (3, ParseErrorKind::MissingHeader("terminals")));
        let e = parse_grammar("scg\nnonterminals: S\nterminals: a\nstart: S\nprod (S) (a)\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert_eq!(parse_any("grammar\n").unwrap_err().kind, ParseErrorKind::MissingTag);
    }

    #[test]
    fn geffert_files() {
        let text = "geffert\nterminals: a\nprod S' -> A S' a\nprod S' -> S' B\nprod S' -> @\n";
        let g = parse_geffert(text).unwrap();
        assert_eq!(g.rules().len(), 3);
        assert_eq!(render_geffert(&g), text);
        let e = parse_geffert("geffert\nterminals: a\nprod S' -> @\nprod S' -> B S' a\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::Shape(_)));
        assert!(matches!(parse_any(text), Ok(GrammarFile::Geffert(_))));
    }

    #[test]
    fn trace_round_trip() {
        let g = scg_core::example1();
        let text = "start: S\nstep 0 @ 1\nstep 2 @ 1 2 3\n";
        let t = parse_trace(&g, text).unwrap();
        assert_eq!(t.steps[1], DerivationStep::new(2, vec![0, 1, 2]));
        assert_eq!(render_trace(&g, &t), text);
        assert!(parse_trace(&g, "start: S\nstep 0 @ 0\n").is_err());
        assert_eq!(parse_trace(&g, "start: Q\n").unwrap_err().kind, ParseErrorKind::Undeclared("Q".into()));
    }

    #[test]
    fn geffert_trace_round_trip() {
        let g = parse_geffert("geffert\nterminals: a\nprod S' -> A S' a\nprod S' -> S' B\nprod S' -> @\n").unwrap();
        let text = "start: S'\ncf 0 @ 1\ncf 1 @ 2\ncf 2 @ 2\nerase-ab @ 1\n";
        let t = parse_geffert_trace(&g, text).unwrap();
        assert_eq!(t.steps[3], GeffertStep::EraseAb { position: 0 });
        assert_eq!(render_geffert_trace(&g, &t), text);
    }

    #[test]
    fn provenance_round_trip() {
        let origins = [
            Origin::Init,
            Origin::AppendTerminal { rule: 0 },
            Origin::Bilateral { rule: 1 },
            Origin::EraseAb,
            Origin::EraseCd,
            Origin::UnpackKeep,
            Origin::UnpackDrop,
            Origin::Final,
        ];
        let text = render_provenance(&origins);
        assert!(text.starts_with("0: init\n1: cf-a 0\n2: cf-v 1\n"));
        assert_eq!(parse_provenance(&text).unwrap(), origins);
    }
}
