//! Hand-built fixture automata for unit tests. The integration tests load
//! the same machines from the corpus files instead, which keeps the parser
//! and these builders as two independent routes to the same data.

use std::collections::BTreeSet;

use crate::model::*;

/// Compact builder: `states` is space separated with `*` marking the
/// initial and `!` the failure state; each edge is
/// `(modality, source, label, target)` with `?`/`!`/`tau` label sigils.
pub fn build(
    name: &str,
    inputs: &str,
    outputs: &str,
    states: &str,
    edges: &[(&str, &str, &str, &str)],
) -> IrMia {
    let mut raw = RawIrMia {
        name: name.to_string(),
        inputs: split(inputs),
        outputs: split(outputs),
        ..Default::default()
    };
    let mut initial = None;
    let mut failure = None;
    for tok in states.split_whitespace() {
        let mut name = tok.to_string();
        if let Some(stripped) = name.strip_suffix('!') {
            name = stripped.to_string();
            failure = Some(name.clone());
        } else if let Some(stripped) = name.strip_suffix('*') {
            name = stripped.to_string();
            initial = Some(name.clone());
        }
        raw.states.push(name);
    }
    let failure = failure.unwrap_or_else(|| {
        raw.states.push(DEFAULT_FAILURE_NAME.to_string());
        DEFAULT_FAILURE_NAME.to_string()
    });
    raw.initial = initial.expect("one state must be marked with *");
    raw.failure = failure;
    for &(m, src, label, dst) in edges {
        let modality = match m {
            "must" => Modality::Must,
            "may" => Modality::MayOnly,
            other => panic!("bad modality {other}"),
        };
        let label = if label == "tau" {
            RawLabel::Tau
        } else if let Some(a) = label.strip_prefix('?') {
            RawLabel::Input(a.to_string())
        } else if let Some(a) = label.strip_prefix('!') {
            RawLabel::Output(a.to_string())
        } else {
            panic!("bad label {label}");
        };
        raw.edges.push(RawEdge {
            source: src.to_string(),
            label,
            target: dst.to_string(),
            modality,
        });
    }
    IrMia::from_raw(&raw).unwrap_or_else(|r| panic!("fixture {name} invalid: {r}"))
}

fn split(s: &str) -> Vec<String> {
    s.split_whitespace().map(|t| t.to_string()).collect()
}

pub fn trace(aut: &IrMia, text: &str) -> SuspensionTrace {
    text.split_whitespace()
        .map(|t| aut.obs_by_name(t).unwrap_or_else(|| panic!("unknown symbol {t}")))
        .collect()
}

pub fn ids_to_names(aut: &IrMia, set: &BTreeSet<StateId>) -> Vec<String> {
    set.iter().map(|&s| aut.state_name(s).to_string()).collect()
}

/// Specification Q of the running three-variant example: nondeterministic
/// on input a, optional outputs g and e, optional input f.
pub fn sample_spec() -> IrMia {
    build(
        "Q",
        "a c d f",
        "b e g",
        "q0* q1 q2 q3 q4 q5 _PHI!",
        &[
            ("must", "q0", "?a", "q1"),
            ("must", "q0", "?a", "q5"),
            ("may", "q1", "?f", "q0"),
            ("must", "q1", "?c", "q2"),
            ("must", "q2", "?d", "q3"),
            ("may", "q3", "!g", "q2"),
            ("may", "q3", "!e", "q4"),
            ("must", "q4", "!e", "q0"),
            ("must", "q2", "?c", "q5"),
            ("must", "q5", "!b", "q0"),
        ],
    )
}

/// Variant that refuses f, makes g mandatory, weakens e, accepts a stray d,
/// and inserts an internal step after the first e.
pub fn sample_impl_loose() -> IrMia {
    build(
        "Qp",
        "a c d f",
        "b e g",
        "q0* q1 q2 q3 q4 q5 q6 _PHI!",
        &[
            ("must", "q0", "?a", "q1"),
            ("must", "q0", "?a", "q5"),
            ("must", "q1", "?f", "_PHI"),
            ("must", "q1", "?c", "q2"),
            ("must", "q2", "?d", "q3"),
            ("must", "q3", "!g", "q2"),
            ("may", "q3", "!e", "q6"),
            ("may", "q6", "tau", "q4"),
            ("may", "q4", "?d", "q4"),
            ("may", "q4", "!e", "q0"),
            ("must", "q2", "?c", "q5"),
            ("must", "q5", "!b", "q0"),
        ],
    )
}

/// Variant that refuses f and drops the optional e branch entirely.
pub fn sample_impl_strict() -> IrMia {
    build(
        "Qpp",
        "a c d f",
        "b e g",
        "q0* q1 q2 q3 q5 _PHI!",
        &[
            ("must", "q0", "?a", "q1"),
            ("must", "q0", "?a", "q5"),
            ("must", "q1", "?f", "_PHI"),
            ("must", "q1", "?c", "q2"),
            ("must", "q2", "?d", "q3"),
            ("must", "q3", "!g", "q2"),
            ("must", "q2", "?c", "q5"),
            ("must", "q5", "!b", "q0"),
        ],
    )
}

/// Implementation that chatters b forever and optionally accepts a.
pub fn chatter_impl() -> IrMia {
    build(
        "chatter_impl",
        "a",
        "b",
        "q0* q1 _PHI!",
        &[
            ("must", "q0", "!b", "q0"),
            ("may", "q0", "?a", "q1"),
            ("must", "q1", "!b", "q1"),
        ],
    )
}

/// Specification with the same chatter loop and a left unspecified.
pub fn chatter_spec() -> IrMia {
    build("chatter_spec", "a", "b", "q0* _PHI!", &[("must", "q0", "!b", "q0")])
}

/// Conformance/refinement incomparability, first pair: conforming but not
/// refining.
pub fn inc_i1() -> IrMia {
    build(
        "i1",
        "i",
        "o op",
        "q0* q1 q2 q3 q4 q5 q6 _PHI!",
        &[
            ("may", "q0", "!o", "q1"),
            ("must", "q1", "?i", "q2"),
            ("must", "q2", "!o", "q3"),
            ("may", "q2", "!op", "q4"),
            ("may", "q0", "!o", "q5"),
            ("must", "q5", "?i", "q6"),
        ],
    )
}

pub fn inc_s1() -> IrMia {
    build(
        "s1",
        "i",
        "o op",
        "q0* q1 q2 q3 q4 q5 q6 _PHI!",
        &[
            ("may", "q0", "!o", "q1"),
            ("must", "q1", "?i", "q2"),
            ("must", "q2", "!o", "q3"),
            ("may", "q0", "!o", "q4"),
            ("must", "q4", "?i", "q5"),
            ("may", "q5", "!op", "q6"),
        ],
    )
}

/// Second pair: refining but not conforming.
pub fn inc_i2() -> IrMia {
    build(
        "i2",
        "i",
        "o op",
        "q0* q1 q2 q3 q4 q5 q6 _PHI!",
        &[
            ("may", "q0", "!o", "q1"),
            ("must", "q1", "?i", "q2"),
            ("may", "q2", "!o", "q3"),
            ("may", "q0", "!o", "q4"),
            ("must", "q4", "?i", "q5"),
            ("may", "q5", "!op", "q6"),
        ],
    )
}

pub fn inc_s2() -> IrMia {
    build(
        "s2",
        "i",
        "o op",
        "q0* q1 q2 q3 q4 _PHI!",
        &[
            ("may", "q0", "!o", "q1"),
            ("must", "q1", "?i", "q2"),
            ("may", "q2", "!o", "q3"),
            ("may", "q0", "!o", "q4"),
        ],
    )
}

/// Mandatory a, optional b: conforms in the may sense but not modally.
pub fn converse_impl() -> IrMia {
    build(
        "conv_i",
        "",
        "a b",
        "q0* q1 q2 _PHI!",
        &[("must", "q0", "!a", "q1"), ("may", "q0", "!b", "q2")],
    )
}

pub fn converse_spec() -> IrMia {
    build(
        "conv_s",
        "",
        "a b",
        "q0* q1 q2 _PHI!",
        &[("must", "q0", "!a", "q1"), ("must", "q0", "!b", "q2")],
    )
}

/// Input completion example: q1 lacks a mandatory edge for a.
pub fn completion_source() -> IrMia {
    build(
        "cmpl",
        "a",
        "b",
        "q0* q1 _PHI!",
        &[
            ("must", "q0", "!b", "q1"),
            ("may", "q1", "!b", "q0"),
            ("must", "q0", "?a", "q0"),
        ],
    )
}

pub fn completion_result() -> IrMia {
    build(
        "cmpl_done",
        "a",
        "b",
        "q0* q1 chi omega _PHI!",
        &[
            ("must", "q0", "!b", "q1"),
            ("may", "q1", "!b", "q0"),
            ("must", "q0", "?a", "q0"),
            ("must", "q1", "?a", "chi"),
            ("must", "chi", "tau", "omega"),
            ("must", "chi", "?a", "chi"),
            ("must", "omega", "?a", "omega"),
            ("may", "omega", "?a", "chi"),
            ("may", "omega", "!b", "chi"),
        ],
    )
}

/// Divisor D of the multicast composition example.
pub fn divisor_d() -> IrMia {
    build(
        "D",
        "b f",
        "a",
        "d0* d1 _PHI!",
        &[
            ("must", "d0", "!a", "d1"),
            ("must", "d1", "?b", "d0"),
            ("may", "d1", "?f", "d0"),
        ],
    )
}

/// Literal multicast composition of `sample_spec` with `divisor_d`. The
/// drawn version of this machine omits the stalled pair `(q0,d1)` that the
/// product rules produce; see the composition tests.
pub fn multicast_composed_literal() -> IrMia {
    build(
        "Pp",
        "c d f",
        "a b e g",
        "(q0,d0)* (q1,d1) (q2,d1) (q3,d1) (q4,d1) (q5,d1) (q0,d1) _PHI!",
        &[
            ("must", "(q0,d0)", "!a", "(q1,d1)"),
            ("must", "(q0,d0)", "!a", "(q5,d1)"),
            ("may", "(q1,d1)", "?f", "(q0,d0)"),
            ("must", "(q1,d1)", "?c", "(q2,d1)"),
            ("must", "(q2,d1)", "?d", "(q3,d1)"),
            ("may", "(q3,d1)", "!g", "(q2,d1)"),
            ("may", "(q3,d1)", "!e", "(q4,d1)"),
            ("must", "(q4,d1)", "!e", "(q0,d1)"),
            ("must", "(q2,d1)", "?c", "(q5,d1)"),
            ("must", "(q5,d1)", "!b", "(q0,d0)"),
        ],
    )
}

/// The same composition as it is usually drawn: the stalled pair collapsed
/// away, i.e. the e loop returns to the initial state.
pub fn multicast_composed_drawn() -> IrMia {
    build(
        "Pp_drawn",
        "c d f",
        "a b e g",
        "q0* q1 q2 q3 q4 q5 _PHI!",
        &[
            ("must", "q0", "!a", "q1"),
            ("must", "q0", "!a", "q5"),
            ("may", "q1", "?f", "q0"),
            ("must", "q1", "?c", "q2"),
            ("must", "q2", "?d", "q3"),
            ("may", "q3", "!g", "q2"),
            ("may", "q3", "!e", "q4"),
            ("must", "q4", "!e", "q0"),
            ("must", "q2", "?c", "q5"),
            ("must", "q5", "!b", "q0"),
        ],
    )
}

/// Dividend P for the quotient example: like the drawn composition but with
/// the a edges optional.
pub fn quotient_dividend() -> IrMia {
    build(
        "P",
        "c d f",
        "a b e g",
        "q0* q1 q2 q3 q4 q5 _PHI!",
        &[
            ("may", "q0", "!a", "q1"),
            ("may", "q0", "!a", "q5"),
            ("may", "q1", "?f", "q0"),
            ("must", "q1", "?c", "q2"),
            ("must", "q2", "?d", "q3"),
            ("may", "q3", "!g", "q2"),
            ("may", "q3", "!e", "q4"),
            ("must", "q4", "!e", "q0"),
            ("must", "q2", "?c", "q5"),
            ("must", "q5", "!b", "q0"),
        ],
    )
}

/// Decompositionality counterexample: one optional output divided by a
/// mandatory one.
pub fn decomp_i() -> IrMia {
    build("dec_i", "", "a", "q0* q1 _PHI!", &[("may", "q0", "!a", "q1")])
}
pub fn decomp_s() -> IrMia {
    build("dec_s", "", "a", "q0* q1 _PHI!", &[("must", "q0", "!a", "q1")])
}
pub fn decomp_ci() -> IrMia {
    build("dec_ci", "", "a", "q0* q1 _PHI!", &[("must", "q0", "!a", "q1")])
}
pub fn decomp_cs() -> IrMia {
    build("dec_cs", "", "a", "q0* q1 _PHI!", &[("must", "q0", "!a", "q1")])
}
/// Expected quotient shape on both sides: a mandatory input a.
pub fn decomp_quotient_expected() -> IrMia {
    build("dec_q", "a", "", "p0* p1 _PHI!", &[("must", "p0", "?a", "p1")])
}

/// Vending machine case study: refined implementation, implementation, and
/// specification.
pub fn vending_refined() -> IrMia {
    build(
        "vend_ref",
        "euro2 euro1 coffee tea cups",
        "change error cup",
        "q0* q1 q2 q3 q4 q5 _PHI!",
        &[
            ("must", "q0", "?euro2", "q1"),
            ("must", "q0", "?euro1", "_PHI"),
            ("must", "q1", "?euro1", "_PHI"),
            ("must", "q1", "!change", "q2"),
            ("must", "q2", "?coffee", "q3"),
            ("must", "q2", "?tea", "q4"),
            ("must", "q2", "?cups", "q5"),
            ("must", "q3", "!error", "q5"),
            ("must", "q4", "!cup", "q0"),
        ],
    )
}

pub fn vending_impl() -> IrMia {
    build(
        "vend_impl",
        "euro2 euro1 coffee tea cups",
        "change error cup",
        "q0* q1 q2 q3 q4 q5 _PHI!",
        &[
            ("must", "q0", "?euro2", "q1"),
            ("must", "q0", "?euro1", "_PHI"),
            ("must", "q1", "?euro1", "_PHI"),
            ("must", "q1", "!change", "q2"),
            ("must", "q2", "?coffee", "q3"),
            ("must", "q2", "?tea", "q4"),
            ("must", "q2", "?cups", "q5"),
            ("may", "q3", "!error", "q5"),
            ("may", "q4", "!error", "q5"),
            ("must", "q4", "!cup", "q0"),
        ],
    )
}

pub fn vending_spec() -> IrMia {
    build(
        "vend_spec",
        "euro2 euro1 coffee tea cups",
        "change error cup",
        "q0* q1 q2 q3 q4 q5 _PHI!",
        &[
            ("must", "q0", "?euro2", "q1"),
            ("may", "q0", "?euro1", "q2"),
            ("must", "q1", "!change", "q2"),
            ("must", "q2", "?coffee", "q3"),
            ("must", "q2", "?tea", "q4"),
            ("must", "q2", "?cups", "q5"),
            ("may", "q3", "!error", "q5"),
            ("may", "q4", "!error", "q5"),
            ("may", "q3", "!cup", "q0"),
            ("must", "q4", "!cup", "q0"),
        ],
    )
}

/// Coin component P of the composition case study.
pub fn coin_p() -> IrMia {
    build(
        "coinP",
        "cup retry",
        "euro1",
        "a* b _PHI!",
        &[("must", "a", "!euro1", "b"), ("must", "b", "?cup", "a")],
    )
}

/// Beverage machine Q of the composition case study.
pub fn machine_q() -> IrMia {
    build(
        "machQ",
        "euro1 size coffee tea",
        "cup reset retry",
        "p* q r s t u _PHI!",
        &[
            ("must", "p", "?euro1", "q"),
            ("must", "q", "?size", "r"),
            ("must", "r", "?coffee", "s"),
            ("may", "s", "!reset", "t"),
            ("may", "t", "!retry", "p"),
            ("must", "r", "?tea", "u"),
            ("must", "u", "!cup", "p"),
        ],
    )
}

pub fn coin_machine_product_multicast() -> IrMia {
    build(
        "prodPQ",
        "coffee size tea",
        "cup euro1 reset retry",
        "(a,p)* (b,q) (b,r) (b,s) (b,t) (b,u) _PHI!",
        &[
            ("must", "(a,p)", "!euro1", "(b,q)"),
            ("must", "(b,q)", "?size", "(b,r)"),
            ("must", "(b,r)", "?coffee", "(b,s)"),
            ("may", "(b,s)", "!reset", "(b,t)"),
            ("must", "(b,r)", "?tea", "(b,u)"),
            ("must", "(b,u)", "!cup", "(a,p)"),
        ],
    )
}

pub fn coin_machine_composed_multicast() -> IrMia {
    build(
        "compPQ",
        "coffee size tea",
        "cup euro1 reset retry",
        "(a,p)* (b,q) (b,r) (b,u) _PHI!",
        &[
            ("must", "(a,p)", "!euro1", "(b,q)"),
            ("must", "(b,q)", "?size", "(b,r)"),
            ("must", "(b,r)", "?tea", "(b,u)"),
            ("must", "(b,u)", "!cup", "(a,p)"),
        ],
    )
}

pub fn coin_machine_product_hiding() -> IrMia {
    build(
        "prodPQh",
        "coffee size tea",
        "reset",
        "(a,p)* (b,q) (b,r) (b,s) (b,t) (b,u) _PHI!",
        &[
            ("must", "(a,p)", "tau", "(b,q)"),
            ("must", "(b,q)", "?size", "(b,r)"),
            ("must", "(b,r)", "?coffee", "(b,s)"),
            ("may", "(b,s)", "!reset", "(b,t)"),
            ("must", "(b,r)", "?tea", "(b,u)"),
            ("must", "(b,u)", "tau", "(a,p)"),
        ],
    )
}

pub fn coin_machine_composed_hiding() -> IrMia {
    build(
        "compPQh",
        "coffee size tea",
        "reset",
        "(a,p)* (b,q) (b,r) (b,u) _PHI!",
        &[
            ("must", "(a,p)", "tau", "(b,q)"),
            ("must", "(b,q)", "?size", "(b,r)"),
            ("must", "(b,r)", "?tea", "(b,u)"),
            ("must", "(b,u)", "tau", "(a,p)"),
        ],
    )
}

/// Dividend for the synthesis example: the composed machine with the coin
/// output optional.
pub fn synth_dividend() -> IrMia {
    build(
        "synthP",
        "coffee size tea",
        "cup euro1 reset retry",
        "(a,p)* (b,q) (b,r) (b,u) _PHI!",
        &[
            ("may", "(a,p)", "!euro1", "(b,q)"),
            ("must", "(b,q)", "?size", "(b,r)"),
            ("must", "(b,r)", "?tea", "(b,u)"),
            ("must", "(b,u)", "!cup", "(a,p)"),
        ],
    )
}

pub fn synth_divisor() -> IrMia {
    build(
        "synthD",
        "cup retry",
        "euro1",
        "a* b _PHI!",
        &[("may", "a", "!euro1", "b"), ("must", "b", "?cup", "a")],
    )
}

pub fn synth_quotient_expected() -> IrMia {
    build(
        "synthQ",
        "euro1 coffee size tea",
        "cup reset retry",
        "p* q r u _PHI!",
        &[
            ("must", "p", "?euro1", "q"),
            ("must", "q", "?size", "r"),
            ("must", "r", "?tea", "u"),
            ("must", "u", "!cup", "p"),
        ],
    )
}

/// Conjunction example operands: two vending machine views over a common
/// alphabet.
pub fn brew_q() -> IrMia {
    build(
        "brewQ",
        "euro1 pound1 size tea coffee hotwater",
        "cup reset retry water",
        "p* q r s u _PHI!",
        &[
            ("may", "p", "?euro1", "q"),
            ("may", "p", "?pound1", "q"),
            ("must", "q", "?size", "r"),
            ("must", "r", "?tea", "u"),
            ("must", "u", "!cup", "p"),
            ("may", "r", "?hotwater", "s"),
        ],
    )
}

pub fn brew_r() -> IrMia {
    build(
        "brewR",
        "euro1 pound1 size tea coffee hotwater",
        "cup reset retry water",
        "p* q r s t v _PHI!",
        &[
            ("must", "p", "?euro1", "q"),
            ("must", "p", "?pound1", "_PHI"),
            ("must", "q", "?size", "r"),
            ("must", "r", "?coffee", "s"),
            ("may", "s", "!reset", "t"),
            ("may", "t", "!retry", "p"),
            ("may", "r", "?hotwater", "v"),
            ("must", "v", "!water", "v"),
        ],
    )
}

/// Literal conjunctive product of `brew_q` and `brew_r`. Once one operand
/// is off in its demonic state the pair mirrors the other operand, so the
/// product carries a copy of each operand's loop alongside the shared
/// core; drawings of this machine usually collapse those copies.
pub fn brew_product_literal() -> IrMia {
    build(
        "brewQR",
        "euro1 pound1 size tea coffee hotwater",
        "cup reset retry water",
        "(p,p)* (q,q) (r,r) (u,Rd) (Qd,s) (s,v) (p,Rd) (q,Rd) (r,Rd) (s,Rd) (Qd,t) (Qd,p) (Qd,q) (Qd,r) (Qd,v) _PHI!",
        &[
            ("must", "(p,p)", "?euro1", "(q,q)"),
            ("must", "(p,p)", "?pound1", "_PHI"),
            ("must", "(q,q)", "?size", "(r,r)"),
            ("must", "(r,r)", "?tea", "(u,Rd)"),
            ("must", "(r,r)", "?coffee", "(Qd,s)"),
            ("may", "(r,r)", "?hotwater", "(s,v)"),
            ("must", "(u,Rd)", "!cup", "(p,Rd)"),
            ("may", "(p,Rd)", "?euro1", "(q,Rd)"),
            ("may", "(p,Rd)", "?pound1", "(q,Rd)"),
            ("must", "(q,Rd)", "?size", "(r,Rd)"),
            ("must", "(r,Rd)", "?tea", "(u,Rd)"),
            ("may", "(r,Rd)", "?hotwater", "(s,Rd)"),
            ("may", "(Qd,s)", "!reset", "(Qd,t)"),
            ("may", "(Qd,t)", "!retry", "(Qd,p)"),
            ("must", "(Qd,p)", "?euro1", "(Qd,q)"),
            ("must", "(Qd,p)", "?pound1", "_PHI"),
            ("must", "(Qd,q)", "?size", "(Qd,r)"),
            ("must", "(Qd,r)", "?coffee", "(Qd,s)"),
            ("may", "(Qd,r)", "?hotwater", "(Qd,v)"),
            ("must", "(Qd,v)", "!water", "(Qd,v)"),
        ],
    )
}

/// Literal conjunction: the inconsistent pair `(s,v)` is removed, and the
/// hotwater input that only led there becomes refused; everything else
/// survives.
pub fn brew_conjunction_literal() -> IrMia {
    build(
        "brewQandR",
        "euro1 pound1 size tea coffee hotwater",
        "cup reset retry water",
        "(p,p)* (q,q) (r,r) (u,Rd) (Qd,s) (p,Rd) (q,Rd) (r,Rd) (s,Rd) (Qd,t) (Qd,p) (Qd,q) (Qd,r) (Qd,v) _PHI!",
        &[
            ("must", "(p,p)", "?euro1", "(q,q)"),
            ("must", "(p,p)", "?pound1", "_PHI"),
            ("must", "(q,q)", "?size", "(r,r)"),
            ("must", "(r,r)", "?tea", "(u,Rd)"),
            ("must", "(r,r)", "?coffee", "(Qd,s)"),
            ("must", "(r,r)", "?hotwater", "_PHI"),
            ("must", "(u,Rd)", "!cup", "(p,Rd)"),
            ("may", "(p,Rd)", "?euro1", "(q,Rd)"),
            ("may", "(p,Rd)", "?pound1", "(q,Rd)"),
            ("must", "(q,Rd)", "?size", "(r,Rd)"),
            ("must", "(r,Rd)", "?tea", "(u,Rd)"),
            ("may", "(r,Rd)", "?hotwater", "(s,Rd)"),
            ("may", "(Qd,s)", "!reset", "(Qd,t)"),
            ("may", "(Qd,t)", "!retry", "(Qd,p)"),
            ("must", "(Qd,p)", "?euro1", "(Qd,q)"),
            ("must", "(Qd,p)", "?pound1", "_PHI"),
            ("must", "(Qd,q)", "?size", "(Qd,r)"),
            ("must", "(Qd,r)", "?coffee", "(Qd,s)"),
            ("may", "(Qd,r)", "?hotwater", "(Qd,v)"),
            ("must", "(Qd,v)", "!water", "(Qd,v)"),
        ],
    )
}

/// Demonic-state example: P has behavior after an input that Q leaves
/// unspecified; the conjunction follows P through demonic pairs.
pub fn demon_p() -> IrMia {
    build(
        "demP",
        "i ip",
        "o",
        "p1* p2 p3 p4 p5 _PHI!",
        &[
            ("may", "p1", "?i", "p2"),
            ("must", "p2", "?ip", "p3"),
            ("may", "p2", "!o", "p4"),
            ("may", "p1", "!o", "p5"),
        ],
    )
}

pub fn demon_q() -> IrMia {
    build("demQ", "i ip", "o", "q1* _PHI!", &[])
}

pub fn demon_conjunction_expected() -> IrMia {
    build(
        "demPQ",
        "i ip",
        "o",
        "(p1,q1)* (p2,Qd) (p3,Qd) (p4,Qd) _PHI!",
        &[
            ("may", "(p1,q1)", "?i", "(p2,Qd)"),
            ("must", "(p2,Qd)", "?ip", "(p3,Qd)"),
            ("may", "(p2,Qd)", "!o", "(p4,Qd)"),
        ],
    )
}

/// Everything the golden corpus contains, keyed by file stem.
pub fn corpus_fixtures() -> Vec<(&'static str, IrMia)> {
    vec![
        ("sample_spec", sample_spec()),
        ("sample_impl_strict", sample_impl_strict()),
        ("sample_impl_loose", sample_impl_loose()),
        ("chatter_impl", chatter_impl()),
        ("chatter_spec", chatter_spec()),
        ("inc_i1", inc_i1()),
        ("inc_s1", inc_s1()),
        ("inc_i2", inc_i2()),
        ("inc_s2", inc_s2()),
        ("converse_impl", converse_impl()),
        ("converse_spec", converse_spec()),
        ("completion_source", completion_source()),
        ("completion_done", completion_result()),
        ("divisor_d", divisor_d()),
        ("multicast_composed_literal", multicast_composed_literal()),
        ("multicast_composed_drawn", multicast_composed_drawn()),
        ("quotient_dividend", quotient_dividend()),
        ("decomp_i", decomp_i()),
        ("decomp_s", decomp_s()),
        ("decomp_ci", decomp_ci()),
        ("decomp_cs", decomp_cs()),
        ("decomp_quotient", decomp_quotient_expected()),
        ("vending_refined", vending_refined()),
        ("vending_impl", vending_impl()),
        ("vending_spec", vending_spec()),
        ("coin_p", coin_p()),
        ("machine_q", machine_q()),
        ("coin_machine_product_multicast", coin_machine_product_multicast()),
        ("coin_machine_composed_multicast", coin_machine_composed_multicast()),
        ("coin_machine_product_hiding", coin_machine_product_hiding()),
        ("coin_machine_composed_hiding", coin_machine_composed_hiding()),
        ("synth_dividend", synth_dividend()),
        ("synth_divisor", synth_divisor()),
        ("synth_quotient", synth_quotient_expected()),
        ("brew_q", brew_q()),
        ("brew_r", brew_r()),
        ("brew_product", brew_product_literal()),
        ("brew_conjunction", brew_conjunction_literal()),
        ("demon_p", demon_p()),
        ("demon_q", demon_q()),
        ("demon_conjunction", demon_conjunction_expected()),
    ]
}

#[cfg(test)]
mod corpus {
    use super::*;

    /// Regenerates the golden corpus: `cargo test -p irmia --lib
    /// corpus::regenerate -- --ignored`.
    #[test]
    #[ignore]
    fn regenerate() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
        std::fs::create_dir_all(&dir).unwrap();
        for (name, aut) in corpus_fixtures() {
            std::fs::write(dir.join(format!("{name}.irmia")), crate::iofmt::serialize(&aut))
                .unwrap();
        }
    }

    /// The committed corpus stays in sync with the fixtures.
    #[test]
    fn corpus_matches_fixtures() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
        for (name, aut) in corpus_fixtures() {
            let path = dir.join(format!("{name}.irmia"));
            let text = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("missing corpus file {name}.irmia: {e}"));
            assert_eq!(text, crate::iofmt::serialize(&aut), "{name}.irmia is stale");
        }
    }
}
