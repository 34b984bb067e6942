//! Quotient: synthesize the unknown communication partner. Dividing a
//! composed specification by one known component yields the interface the
//! missing component must satisfy, inverting multicast composition.
//!
//! Both operands must be free of internal steps and the divisor must be
//! may-deterministic. The pseudo-quotient pairs dividend and divisor
//! states; pruning then removes the impossible pairs: those whose
//! mandatory shared behavior the divisor cannot follow, and everything
//! that must reach such a pair.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{
    Gamma, IrMia, Label, Modality, RawEdge, RawIrMia, RawLabel, StateId, ValidationReport,
};

/// Violated requirement of a quotient pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairViolation {
    DividendHasTau,
    DivisorHasTau,
    DivisorNotMayDeterministic { state: String, action: String },
    AlphabetNotContained { action: String },
    OutputsNotContained { action: String },
    DividendEmpty,
    DivisorEmpty,
}

impl std::fmt::Display for PairViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairViolation::DividendHasTau => write!(f, "dividend has internal steps"),
            PairViolation::DivisorHasTau => write!(f, "divisor has internal steps"),
            PairViolation::DivisorNotMayDeterministic { state, action } => {
                write!(f, "divisor is nondeterministic at `{state}` on `{action}`")
            }
            PairViolation::AlphabetNotContained { action } => {
                write!(f, "divisor action `{action}` is not in the dividend alphabet")
            }
            PairViolation::OutputsNotContained { action } => {
                write!(f, "divisor output `{action}` is not a dividend output")
            }
            PairViolation::DividendEmpty => write!(f, "dividend has no transitions"),
            PairViolation::DivisorEmpty => write!(f, "divisor has no transitions"),
        }
    }
}

/// Check the quotient-pair requirements; empty means the quotient is
/// applicable.
pub fn quotient_pair_check(p: &IrMia, d: &IrMia) -> Vec<PairViolation> {
    let mut v = Vec::new();
    if p.edges().iter().any(|e| e.label.is_tau()) {
        v.push(PairViolation::DividendHasTau);
    }
    if d.edges().iter().any(|e| e.label.is_tau()) {
        v.push(PairViolation::DivisorHasTau);
    }
    let mut seen: BTreeMap<(StateId, Label), StateId> = BTreeMap::new();
    for e in d.edges() {
        if e.label.is_tau() {
            continue;
        }
        if let Some(&t) = seen.get(&(e.source, e.label)) {
            if t != e.target {
                v.push(PairViolation::DivisorNotMayDeterministic {
                    state: d.state_name(e.source).to_string(),
                    action: d.label_name(e.label).to_string(),
                });
            }
        } else {
            seen.insert((e.source, e.label), e.target);
        }
    }
    let alpha_p: BTreeSet<&String> = p.inputs().iter().chain(p.outputs()).collect();
    for a in d.inputs().iter().chain(d.outputs()) {
        if !alpha_p.contains(a) {
            v.push(PairViolation::AlphabetNotContained { action: a.clone() });
        }
    }
    for a in d.outputs() {
        if !p.outputs().contains(a) {
            v.push(PairViolation::OutputsNotContained { action: a.clone() });
        }
    }
    if p.edges().is_empty() {
        v.push(PairViolation::DividendEmpty);
    }
    if d.edges().is_empty() {
        v.push(PairViolation::DivisorEmpty);
    }
    v
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum QuotientError {
    #[error("not a quotient pair: {0:?}")]
    NotAQuotientPair(Vec<PairViolation>),
}

/// Pseudo-quotient over dividend/divisor state pairs. Inputs of the
/// result are the dividend inputs plus the divisor outputs; outputs are
/// the dividend outputs minus the divisor outputs.
#[derive(Clone, Debug)]
pub struct PseudoQuotient {
    pub automaton: IrMia,
    /// Operand pair behind each state; the last state is the failure pair.
    pub pairs: Vec<(StateId, StateId)>,
}

pub fn pseudo_quotient(p: &IrMia, d: &IrMia) -> Result<PseudoQuotient, QuotientError> {
    let violations = quotient_pair_check(p, d);
    if !violations.is_empty() {
        return Err(QuotientError::NotAQuotientPair(violations));
    }

    let alpha_d: BTreeSet<&str> = d.inputs().iter().chain(d.outputs()).map(|s| s.as_str()).collect();
    let out_d: BTreeSet<&str> = d.outputs().iter().map(|s| s.as_str()).collect();
    let in_d: BTreeSet<&str> = d.inputs().iter().map(|s| s.as_str()).collect();
    let out_p: BTreeSet<&str> = p.outputs().iter().map(|s| s.as_str()).collect();

    let mut inputs: Vec<String> = p.inputs().to_vec();
    for o in d.outputs() {
        if !inputs.contains(o) {
            inputs.push(o.clone());
        }
    }
    let outputs: Vec<String> =
        p.outputs().iter().filter(|o| !out_d.contains(o.as_str())).cloned().collect();
    let input_set: BTreeSet<String> = inputs.iter().cloned().collect();
    let is_input = move |n: &str| input_set.contains(n);

    let d_step = |q: StateId, name: &str, gamma: Gamma| -> Option<StateId> {
        d.edges_from(q)
            .find(|e| d.label_name(e.label) == name && (gamma == Gamma::May || e.modality == Modality::Must))
            .map(|e| e.target)
    };

    let start = (p.initial(), d.initial());
    let failure = (p.failure(), d.failure());
    let mut index: BTreeMap<(StateId, StateId), usize> = BTreeMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut queue = VecDeque::new();
    let intern = |pr: (StateId, StateId),
                      index: &mut BTreeMap<(StateId, StateId), usize>,
                      pairs: &mut Vec<(StateId, StateId)>,
                      queue: &mut VecDeque<(StateId, StateId)>| {
        *index.entry(pr).or_insert_with(|| {
            pairs.push(pr);
            queue.push_back(pr);
            pairs.len() - 1
        })
    };
    intern(start, &mut index, &mut pairs, &mut queue);

    let mut edges: Vec<(usize, String, usize, Modality)> = Vec::new();
    while let Some((ps, ds)) = queue.pop_front() {
        if (ps, ds) == failure || ps == p.failure() {
            continue;
        }
        let src = index[&(ps, ds)];
        for e in p.edges_from(ps) {
            let name = p.label_name(e.label).to_string();
            if e.target == p.failure() {
                // Refusal in the dividend: kept unless the divisor refuses
                // the action as well.
                if d_step(ds, &name, Gamma::Must) != Some(d.failure()) {
                    let t = intern(failure, &mut index, &mut pairs, &mut queue);
                    edges.push((src, name, t, e.modality));
                }
                continue;
            }
            if !alpha_d.contains(name.as_str()) {
                let t = intern((e.target, ds), &mut index, &mut pairs, &mut queue);
                edges.push((src, name, t, e.modality));
                continue;
            }
            // Shared action: the divisor must be able to follow.
            let d_must = d_step(ds, &name, Gamma::Must).filter(|&t| t != d.failure());
            let d_may = d_step(ds, &name, Gamma::May).filter(|&t| t != d.failure());
            match e.modality {
                Modality::Must => {
                    if let Some(dt) = d_must {
                        let t = intern((e.target, dt), &mut index, &mut pairs, &mut queue);
                        edges.push((src, name.clone(), t, Modality::Must));
                    }
                }
                Modality::MayOnly => {
                    if let Some(dt) = d_must {
                        let t = intern((e.target, dt), &mut index, &mut pairs, &mut queue);
                        edges.push((src, name.clone(), t, Modality::MayOnly));
                    }
                }
            }
            if let Some(dt) = d_may {
                // An allowed pair of steps: allowed in the quotient unless
                // the action would pair a dividend output with a divisor
                // input elsewhere than a result input; a divisor output
                // met by an allowed dividend step becomes mandatory, since
                // composition needs the matching input to be mandatory.
                let blocked = out_p.contains(name.as_str()) && in_d.contains(name.as_str());
                if out_d.contains(name.as_str()) {
                    let t = intern((e.target, dt), &mut index, &mut pairs, &mut queue);
                    edges.push((src, name.clone(), t, Modality::Must));
                } else if !blocked {
                    let t = intern((e.target, dt), &mut index, &mut pairs, &mut queue);
                    edges.push((src, name.clone(), t, Modality::MayOnly));
                }
            }
        }
    }
    let fail_idx = intern(failure, &mut index, &mut pairs, &mut queue);

    let mut raw = RawIrMia {
        name: format!("({}/{})", p.name(), d.name()),
        inputs,
        outputs,
        ..Default::default()
    };
    for &(x, y) in &pairs {
        raw.states.push(format!("({},{})", p.state_name(x), d.state_name(y)));
    }
    raw.initial = raw.states[index[&start]].clone();
    raw.failure = raw.states[fail_idx].clone();
    for (src, name, tgt, modality) in edges {
        raw.edges.push(RawEdge {
            source: raw.states[src].clone(),
            label: if is_input(&name) {
                RawLabel::Input(name)
            } else {
                RawLabel::Output(name)
            },
            target: raw.states[tgt].clone(),
            modality,
        });
    }
    let automaton = IrMia::from_raw(&raw)
        .unwrap_or_else(|r| panic!("pseudo-quotient of a quotient pair is valid: {r}"));
    Ok(PseudoQuotient { automaton, pairs })
}

/// Rule that put a pair into the impossible set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImpossibleRule {
    /// Mandatory shared dividend behavior the divisor cannot follow.
    MissingDivisorMust,
    /// The dividend refuses a shared action the divisor may produce.
    RefusedDivisorOutput,
    /// A mandatory step reaches an impossible pair.
    MustReachClosure,
}

impl std::fmt::Display for ImpossibleRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ImpossibleRule::MissingDivisorMust => write!(f, "G1"),
            ImpossibleRule::RefusedDivisorOutput => write!(f, "G2"),
            ImpossibleRule::MustReachClosure => write!(f, "G3"),
        }
    }
}

/// Impossible pairs of a pseudo-quotient, in discovery order.
pub fn impossible_states(
    pq: &PseudoQuotient,
    p: &IrMia,
    d: &IrMia,
) -> Vec<(usize, ImpossibleRule)> {
    let alpha_d: BTreeSet<&str> =
        d.inputs().iter().chain(d.outputs()).map(|s| s.as_str()).collect();
    let out_d: BTreeSet<&str> = d.outputs().iter().map(|s| s.as_str()).collect();
    let mut result: Vec<(usize, ImpossibleRule)> = Vec::new();
    let mut in_g = vec![false; pq.pairs.len()];
    for (idx, &(ps, ds)) in pq.pairs.iter().enumerate() {
        if ps == p.failure() {
            continue;
        }
        let mut hit = None;
        for e in p.edges_from(ps) {
            if e.modality != Modality::Must {
                continue;
            }
            let name = p.label_name(e.label);
            if !alpha_d.contains(name) {
                continue;
            }
            if e.target != p.failure() {
                // G1: the divisor lacks the matching mandatory step.
                let followed = d.edges_from(ds).any(|de| {
                    de.modality == Modality::Must && d.label_name(de.label) == name
                });
                if !followed {
                    hit = Some(ImpossibleRule::MissingDivisorMust);
                    break;
                }
            } else if out_d.contains(name)
                && d.edges_from(ds).any(|de| d.label_name(de.label) == name)
            {
                // G2: vacuous for well-formed operands, since refused
                // actions are dividend inputs and divisor outputs are
                // dividend outputs; kept for completeness.
                hit = Some(ImpossibleRule::RefusedDivisorOutput);
                break;
            }
        }
        if let Some(rule) = hit {
            in_g[idx] = true;
            result.push((idx, rule));
        }
    }
    // G3: mandatory steps into the impossible set.
    loop {
        let mut changed = false;
        for s in 0..pq.pairs.len() {
            if in_g[s] {
                continue;
            }
            let reaches = pq
                .automaton
                .edges_from(StateId(s))
                .any(|e| e.modality == Modality::Must && in_g[e.target.0]);
            if reaches {
                in_g[s] = true;
                result.push((s, ImpossibleRule::MustReachClosure));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    result
}

#[derive(Clone, Debug)]
pub struct QuotientResult {
    pub defined: bool,
    /// Present when defined.
    pub automaton: Option<IrMia>,
    pub impossible: Vec<(String, ImpossibleRule)>,
    pub precondition_report: Vec<PairViolation>,
    pub validation: ValidationReport,
}

/// Full quotient: pseudo-quotient, then deletion of impossible pairs and
/// unreachable states. Undefined when the preconditions fail or the
/// initial pair is impossible.
pub fn quotient(p: &IrMia, d: &IrMia) -> QuotientResult {
    let pq = match pseudo_quotient(p, d) {
        Ok(pq) => pq,
        Err(QuotientError::NotAQuotientPair(precondition_report)) => {
            return QuotientResult {
                defined: false,
                automaton: None,
                impossible: Vec::new(),
                precondition_report,
                validation: ValidationReport::default(),
            }
        }
    };
    let g = impossible_states(&pq, p, d);
    let impossible: Vec<(String, ImpossibleRule)> = g
        .iter()
        .map(|&(s, r)| (pq.automaton.state_name(StateId(s)).to_string(), r))
        .collect();
    let g_set: BTreeSet<usize> = g.iter().map(|&(s, _)| s).collect();
    if g_set.contains(&0) {
        return QuotientResult {
            defined: false,
            automaton: None,
            impossible,
            precondition_report: Vec::new(),
            validation: ValidationReport::default(),
        };
    }
    let aut = &pq.automaton;
    let g_names: BTreeSet<String> =
        g_set.iter().map(|&s| aut.state_name(StateId(s)).to_string()).collect();
    let mut raw = aut.to_raw();
    raw.states.retain(|s| !g_names.contains(s));
    raw.edges.retain(|e| !g_names.contains(&e.source) && !g_names.contains(&e.target));
    let (kept, _) = crate::compose::reachable_restriction(&raw);
    let validation = crate::model::validate(&kept);
    let automaton =
        IrMia::from_raw(&kept).unwrap_or_else(|r| panic!("quotient pruning preserves validity: {r}"));
    QuotientResult {
        defined: true,
        automaton: Some(automaton),
        impossible,
        precondition_report: Vec::new(),
        validation,
    }
}
