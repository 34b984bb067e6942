//! Line-based text format and DOT export.
//!
//! ```text
//! # sample machine
//! irmia Q
//! inputs a, c, d, f
//! outputs b, e, g
//! states q0*, q1, q2, _PHI!
//! must q0 ?a q1
//! may  q1 ?f q0
//! may  q6 tau q4
//! ```
//!
//! `*` marks the initial state, `!` the failure state; when no `!` state
//! is declared a fresh isolated `_PHI` is added. Direction sigils must
//! agree with the declared alphabet. Names containing separators are
//! double-quoted. Serialization is canonical and byte-stable: states in
//! declaration order, transitions ordered by source, label, target.

use std::fmt;

use crate::model::{
    IrMia, Label, Modality, RawEdge, RawIrMia, RawLabel, ValidationReport,
    DEFAULT_FAILURE_NAME, TAU_NAME,
};

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: action `{action}` used as {used} but declared as {declared}")]
    DirectionMismatch { line: usize, action: String, used: String, declared: String },
    #[error("invalid automaton:\n{0}")]
    Invalid(ValidationReport),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Split a line into tokens; double-quoted tokens may contain separators.
fn tokens(line: usize, text: &str) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() || c == ',' {
            chars.next();
            continue;
        }
        if c == '#' {
            break;
        }
        if c == '"' {
            chars.next();
            let mut tok = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => tok.push(ch),
                    None => return Err(syntax(line, "unterminated quoted name")),
                }
            }
            // Suffix markers may follow a quoted name.
            while let Some(&m) = chars.peek() {
                if m == '*' || m == '!' {
                    tok.push(m);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == ',' || ch == '#' {
                    break;
                }
                tok.push(ch);
                chars.next();
            }
            out.push(tok);
        }
    }
    Ok(out)
}

/// Parse the text format into a checked automaton. The result is fully
/// valid; violations are reported as [`ParseError::Invalid`].
pub fn parse(text: &str) -> Result<IrMia, ParseError> {
    let raw = parse_raw(text)?;
    IrMia::from_raw(&raw).map_err(ParseError::Invalid)
}

/// Parse without validating, for inspection of ill-formed descriptions.
pub fn parse_raw(text: &str) -> Result<RawIrMia, ParseError> {
    let mut raw = RawIrMia::default();
    let mut have_name = false;
    let mut have_states = false;
    let mut failure: Option<String> = None;
    let mut initial: Option<String> = None;

    for (i, line_text) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(line, line_text)?;
        if toks.is_empty() {
            continue;
        }
        match toks[0].as_str() {
            "irmia" => {
                if have_name {
                    return Err(syntax(line, "duplicate `irmia` line"));
                }
                if toks.len() != 2 {
                    return Err(syntax(line, "expected `irmia <name>`"));
                }
                raw.name = toks[1].clone();
                have_name = true;
            }
            "inputs" => {
                if !raw.inputs.is_empty() {
                    return Err(syntax(line, "duplicate `inputs` line"));
                }
                raw.inputs = toks[1..].to_vec();
            }
            "outputs" => {
                if !raw.outputs.is_empty() {
                    return Err(syntax(line, "duplicate `outputs` line"));
                }
                raw.outputs = toks[1..].to_vec();
            }
            "states" => {
                if have_states {
                    return Err(syntax(line, "duplicate `states` line"));
                }
                have_states = true;
                for tok in &toks[1..] {
                    let mut name = tok.clone();
                    loop {
                        if let Some(s) = name.strip_suffix('!') {
                            name = s.to_string();
                            if failure.replace(name.clone()).is_some() {
                                return Err(syntax(line, "more than one failure state"));
                            }
                        } else if let Some(s) = name.strip_suffix('*') {
                            name = s.to_string();
                            if initial.replace(name.clone()).is_some() {
                                return Err(syntax(line, "more than one initial state"));
                            }
                        } else {
                            break;
                        }
                    }
                    raw.states.push(name);
                }
            }
            "must" | "may" => {
                if toks.len() != 4 {
                    return Err(syntax(line, "expected `<modality> <source> <label> <target>`"));
                }
                let modality =
                    if toks[0] == "must" { Modality::Must } else { Modality::MayOnly };
                let label_tok = &toks[2];
                let label = if label_tok == TAU_NAME {
                    RawLabel::Tau
                } else if let Some(a) = label_tok.strip_prefix('?') {
                    check_direction(line, a, "input", &raw)?;
                    RawLabel::Input(a.to_string())
                } else if let Some(a) = label_tok.strip_prefix('!') {
                    check_direction(line, a, "output", &raw)?;
                    RawLabel::Output(a.to_string())
                } else {
                    return Err(syntax(
                        line,
                        format!("label `{label_tok}` needs a `?`/`!` sigil or `tau`"),
                    ));
                };
                raw.edges.push(RawEdge {
                    source: toks[1].clone(),
                    label,
                    target: toks[3].clone(),
                    modality,
                });
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    if !have_name {
        return Err(syntax(0, "missing `irmia <name>` line"));
    }
    if !have_states {
        return Err(syntax(0, "missing `states` line"));
    }
    raw.initial = initial.ok_or_else(|| syntax(0, "no state marked `*` as initial"))?;
    raw.failure = match failure {
        Some(f) => f,
        None => {
            let f = crate::model::fresh_name(&raw.states, DEFAULT_FAILURE_NAME);
            raw.states.push(f.clone());
            f
        }
    };
    Ok(raw)
}

fn check_direction(
    line: usize,
    action: &str,
    used: &str,
    raw: &RawIrMia,
) -> Result<(), ParseError> {
    let declared = if raw.inputs.iter().any(|a| a == action) {
        "input"
    } else if raw.outputs.iter().any(|a| a == action) {
        "output"
    } else {
        return Err(syntax(line, format!("undeclared action `{action}`")));
    };
    if declared != used {
        return Err(ParseError::DirectionMismatch {
            line,
            action: action.to_string(),
            used: used.to_string(),
            declared: declared.to_string(),
        });
    }
    Ok(())
}

fn needs_quotes(name: &str) -> bool {
    name.is_empty()
        || name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '"' | '#' | '?' | '!' | '*'))
        || name == TAU_NAME
}

fn quoted(name: &str) -> String {
    if needs_quotes(name) {
        format!("\"{name}\"")
    } else {
        name.to_string()
    }
}

fn label_sort_key(e: &RawEdge, raw: &RawIrMia) -> (u8, usize, String) {
    match &e.label {
        RawLabel::Input(n) => {
            (0, raw.inputs.iter().position(|a| a == n).unwrap_or(usize::MAX), n.clone())
        }
        RawLabel::Output(n) => {
            (1, raw.outputs.iter().position(|a| a == n).unwrap_or(usize::MAX), n.clone())
        }
        RawLabel::Tau => (2, 0, String::new()),
    }
}

/// Canonical serialization; parsing it back reproduces the automaton with
/// identical naming, and serializing a parsed canonical file is
/// byte-identical.
pub fn serialize(aut: &IrMia) -> String {
    let raw = aut.to_raw();
    let mut out = String::new();
    out.push_str(&format!("irmia {}\n", quoted(&raw.name)));
    let list = |names: &[String]| names.iter().map(|n| quoted(n)).collect::<Vec<_>>().join(", ");
    out.push_str(&format!("inputs {}\n", list(&raw.inputs)));
    out.push_str(&format!("outputs {}\n", list(&raw.outputs)));
    let states = raw
        .states
        .iter()
        .map(|s| {
            let mut t = quoted(s);
            if *s == raw.initial {
                t.push('*');
            }
            if *s == raw.failure {
                t.push('!');
            }
            t
        })
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("states {}\n", states));

    let state_pos =
        |n: &str| raw.states.iter().position(|s| s == n).unwrap_or(usize::MAX);
    let mut edges = raw.edges.clone();
    edges.sort_by_key(|e| {
        (state_pos(&e.source), label_sort_key(e, &raw), state_pos(&e.target), e.modality)
    });
    for e in &edges {
        let label = match &e.label {
            RawLabel::Input(n) => format!("?{}", n),
            RawLabel::Output(n) => format!("!{}", n),
            RawLabel::Tau => TAU_NAME.to_string(),
        };
        let m = if e.modality == Modality::Must { "must" } else { "may" };
        out.push_str(&format!("{} {} {} {}\n", m, quoted(&e.source), label, quoted(&e.target)));
    }
    out
}

/// DOT rendering following the usual drawing conventions: solid edges are
/// mandatory, dashed ones optional, the failure state is double-circled,
/// the initial state gets an entry arrow, and the internal action renders
/// as a tau symbol.
pub fn to_dot(aut: &IrMia) -> String {
    let mut out = String::new();
    let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
    out.push_str(&format!("digraph \"{}\" {{\n", esc(aut.name())));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  __start [shape=point, label=\"\"];\n");
    for (i, name) in aut.state_names().iter().enumerate() {
        let shape = if i == aut.failure().0 { "doublecircle" } else { "circle" };
        out.push_str(&format!("  n{} [label=\"{}\", shape={}];\n", i, esc(name), shape));
    }
    out.push_str(&format!("  __start -> n{};\n", aut.initial().0));
    for e in aut.edges() {
        let label = match e.label {
            Label::Tau => "\u{3c4}".to_string(),
            l => esc(&aut.render_label(l)),
        };
        let style = if e.modality == Modality::Must { "solid" } else { "dashed" };
        out.push_str(&format!(
            "  n{} -> n{} [label=\"{}\", style={}];\n",
            e.source.0, e.target.0, label, style
        ));
    }
    out.push_str("}\n");
    out
}

impl fmt::Display for IrMia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}
