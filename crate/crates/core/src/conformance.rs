//! Input/output conformance over suspension traces.
//!
//! A suspension trace records inputs, outputs, observed quiescence
//! (`delta`) and observed refusals (`phi`). Both conformance checks
//! compare observation sets after common traces:
//!
//! * condition 1: after every trace of the specification, the allowed
//!   observations of the implementation are allowed by the specification;
//! * condition 2: after every trace of the implementation, the mandatory
//!   observations of the specification are mandatory in the
//!   implementation.
//!
//! The trace sets are infinite but regular, so the checks run on the
//! determinized suspension automata of both sides and explore their
//! product breadth-first; a violation therefore comes with a shortest
//! witness trace.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{
    check_same_alphabets, fresh_name, ActionId, Gamma, IrMia, Modality, Obs, OutSet, RawEdge,
    RawLabel, RelationError, StateId, SuspensionTrace,
};

/// Deterministic automaton over inputs, outputs, `delta` and `phi` whose
/// language is the set of allowed suspension traces of the source
/// automaton. Macro-state 0 is the weak closure of the initial state.
#[derive(Clone, Debug)]
pub struct SuspensionAutomaton {
    pub macro_states: Vec<BTreeSet<StateId>>,
    pub edges: Vec<BTreeMap<Obs, usize>>,
    pub out_may: Vec<OutSet>,
    pub out_must: Vec<OutSet>,
}

impl SuspensionAutomaton {
    pub fn initial(&self) -> usize {
        0
    }
    pub fn step(&self, from: usize, sym: Obs) -> Option<usize> {
        self.edges[from].get(&sym).copied()
    }
}

/// All observation symbols of an automaton in canonical order: inputs,
/// outputs, `delta`, `phi`.
fn symbols(aut: &IrMia) -> Vec<Obs> {
    let mut syms: Vec<Obs> = (0..aut.inputs().len()).map(|a| Obs::In(ActionId(a))).collect();
    syms.extend((0..aut.outputs().len()).map(|a| Obs::Out(ActionId(a))));
    syms.push(Obs::Delta);
    syms.push(Obs::Phi);
    syms
}

/// Subset construction over the allowed transition relation, with `delta`
/// and `phi` treated as self-loops at quiescent and failure-marked states.
pub fn suspension_automaton(aut: &IrMia) -> SuspensionAutomaton {
    let syms = symbols(aut);
    let initial = aut.weak_closure(aut.initial(), Gamma::May);
    let mut index: BTreeMap<BTreeSet<StateId>, usize> = BTreeMap::new();
    let mut macro_states = vec![initial.clone()];
    index.insert(initial.clone(), 0);
    let mut edges: Vec<BTreeMap<Obs, usize>> = vec![BTreeMap::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(m) = queue.pop_front() {
        for &sym in &syms {
            let set = macro_states[m].clone();
            let next = aut.after(&set, &[sym], Gamma::May);
            if next.is_empty() {
                continue;
            }
            let target = *index.entry(next.clone()).or_insert_with(|| {
                macro_states.push(next.clone());
                edges.push(BTreeMap::new());
                queue.push_back(macro_states.len() - 1);
                macro_states.len() - 1
            });
            edges[m].insert(sym, target);
        }
    }
    let out_may = macro_states.iter().map(|s| aut.out_set(s, Gamma::May)).collect();
    let out_must = macro_states.iter().map(|s| aut.out_set(s, Gamma::Must)).collect();
    SuspensionAutomaton { macro_states, edges, out_may, out_must }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformanceVerdict {
    pub holds: bool,
    pub counterexample: Option<SuspensionTrace>,
    /// 1: excess allowed observation, 2: missing mandatory observation.
    pub violated_condition: Option<u8>,
    pub offending_observation: Option<Obs>,
}

impl ConformanceVerdict {
    fn pass() -> ConformanceVerdict {
        ConformanceVerdict {
            holds: true,
            counterexample: None,
            violated_condition: None,
            offending_observation: None,
        }
    }
}

fn check_input_enabled(imp: &IrMia) -> Result<(), RelationError> {
    for s in (0..imp.state_count()).map(StateId) {
        if s == imp.failure() {
            continue;
        }
        for a in (0..imp.inputs().len()).map(ActionId) {
            if !imp.has_weak(s, crate::model::Label::Input(a), Gamma::May) {
                return Err(RelationError::NotInputEnabled {
                    state: imp.state_name(s).to_string(),
                    input: imp.inputs()[a.0].clone(),
                });
            }
        }
    }
    Ok(())
}

/// Observation translation between equal alphabets with possibly different
/// declaration orders; symbols are driven by the implementation side.
fn obs_to_spec(imp: &IrMia, spec: &IrMia, o: Obs) -> Obs {
    match o {
        Obs::In(a) => spec.obs_by_name(&imp.inputs()[a.0]).unwrap(),
        Obs::Out(a) => spec.obs_by_name(&imp.outputs()[a.0]).unwrap(),
        Obs::Delta => Obs::Delta,
        Obs::Phi => Obs::Phi,
    }
}

fn translate_out(imp: &IrMia, spec: &IrMia, set: &OutSet) -> OutSet {
    OutSet {
        observations: set.observations.iter().map(|&o| obs_to_spec(imp, spec, o)).collect(),
    }
}

/// Modal conformance: both conditions, decided on the product of the two
/// suspension automata. The implementation must be weak may-input-enabled.
pub fn irioco(imp: &IrMia, spec: &IrMia) -> Result<ConformanceVerdict, RelationError> {
    check_same_alphabets(imp, spec)?;
    check_input_enabled(imp)?;
    Ok(product_check(imp, spec, true))
}

/// `irioco` without the input-enabledness precondition, for operands that
/// deliberately leave inputs unspecified.
pub fn irioco_assuming_enabled(
    imp: &IrMia,
    spec: &IrMia,
) -> Result<ConformanceVerdict, RelationError> {
    check_same_alphabets(imp, spec)?;
    Ok(product_check(imp, spec, true))
}

/// Plain may-conformance: condition 1 alone, over the allowed transition
/// relations.
pub fn ioco_may(imp: &IrMia, spec: &IrMia) -> Result<ConformanceVerdict, RelationError> {
    check_same_alphabets(imp, spec)?;
    check_input_enabled(imp)?;
    Ok(product_check(imp, spec, false))
}

/// `ioco_may` without the input-enabledness precondition.
pub fn ioco_may_assuming_enabled(
    imp: &IrMia,
    spec: &IrMia,
) -> Result<ConformanceVerdict, RelationError> {
    check_same_alphabets(imp, spec)?;
    Ok(product_check(imp, spec, false))
}

fn product_check(imp: &IrMia, spec: &IrMia, both_conditions: bool) -> ConformanceVerdict {
    let sa_i = suspension_automaton(imp);
    let sa_s = suspension_automaton(spec);
    let syms = symbols(imp);

    // Breadth-first over pairs reached by a common trace. A violation
    // needs a non-empty set on both sides (an empty side contributes an
    // empty observation set and an absent trace), and empty sets never
    // recover, so only both-live pairs are explored.
    let start = (sa_i.initial(), sa_s.initial());
    let mut parent: BTreeMap<(usize, usize), ((usize, usize), Obs)> = BTreeMap::new();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((mi, ms)) = queue.pop_front() {
        // Condition 2 first: a missing mandatory observation is reported
        // in preference to an excess allowed one at the same trace. A
        // trace all of whose runs ended in a refusal mandates nothing
        // further (the failure state suspends subsequent behavior); the
        // refusal itself is justified or rejected by condition 1.
        let imp_live = sa_i.macro_states[mi].iter().any(|&s| s != imp.failure());
        if both_conditions && imp_live {
            let imp_out_must = translate_out(imp, spec, &sa_i.out_must[mi]);
            if let Some(missing) = sa_s.out_must[ms].first_excess(&imp_out_must) {
                return fail(imp, spec, &parent, (mi, ms), 2, missing);
            }
        }
        let imp_out_may = translate_out(imp, spec, &sa_i.out_may[mi]);
        if let Some(excess) = imp_out_may.first_excess(&sa_s.out_may[ms]) {
            return fail(imp, spec, &parent, (mi, ms), 1, excess);
        }
        for &sym in &syms {
            let ni = sa_i.step(mi, sym);
            let ns = sa_s.step(ms, obs_to_spec(imp, spec, sym));
            if let (Some(ni), Some(ns)) = (ni, ns) {
                if seen.insert((ni, ns)) {
                    parent.insert((ni, ns), ((mi, ms), sym));
                    queue.push_back((ni, ns));
                }
            }
        }
    }
    ConformanceVerdict::pass()
}

fn fail(
    imp: &IrMia,
    spec: &IrMia,
    parent: &BTreeMap<(usize, usize), ((usize, usize), Obs)>,
    at: (usize, usize),
    condition: u8,
    offending: Obs,
) -> ConformanceVerdict {
    let mut trace = Vec::new();
    let mut cur = at;
    while let Some(&(prev, sym)) = parent.get(&cur) {
        trace.push(sym);
        cur = prev;
    }
    trace.reverse();
    // Offending observations from condition 2 live in the specification's
    // action space; report them in the implementation's.
    let offending = if condition == 2 { obs_to_spec(spec, imp, offending) } else { offending };
    ConformanceVerdict {
        holds: false,
        counterexample: Some(trace),
        violated_condition: Some(condition),
        offending_observation: Some(offending),
    }
}

/// Specification transformation used when relating conformance and
/// refinement: every state whose outputs are all optional gains an
/// optional internal step into a fresh state with no outputs, making
/// quiescence an explicitly allowed observation there.
pub fn build_unifying_spec(spec: &IrMia) -> IrMia {
    let mut raw = spec.to_raw();
    let quiet = fresh_name(&raw.states, "_QUIET");
    let mut touched = false;
    for s in (0..spec.state_count()).map(StateId) {
        if s == spec.failure() {
            continue;
        }
        let weak_may_out = spec
            .init_set(s, Gamma::May)
            .iter()
            .any(|o| matches!(o, Obs::Out(_)));
        let weak_must_out = spec
            .init_set(s, Gamma::Must)
            .iter()
            .any(|o| matches!(o, Obs::Out(_)));
        if weak_may_out && !weak_must_out {
            raw.edges.push(RawEdge {
                source: spec.state_name(s).to_string(),
                label: RawLabel::Tau,
                target: quiet.clone(),
                modality: Modality::MayOnly,
            });
            touched = true;
        }
    }
    if touched {
        raw.states.push(quiet);
    }
    IrMia::from_raw(&raw).expect("adding internal steps to a fresh sink preserves validity")
}
