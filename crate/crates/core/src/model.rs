//! Core automaton model: modal interface automata with an explicit failure
//! state for refused inputs.
//!
//! An automaton has disjoint input and output alphabets, an internal action
//! `tau`, two transition modalities (mandatory `must` edges, which are also
//! allowed, and optional `may`-only edges), and one distinguished failure
//! state. The failure state is a sink: it is only ever entered through
//! mandatory input edges, which model the refusal of a critical input.
//!
//! Observations during testing extend the alphabet with two symbols:
//! `delta` (quiescence, the observable absence of outputs) and `phi` (the
//! observable refusal of an input). Both come in a may and a must flavor,
//! mirroring the two transition relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Reserved spelling of the internal action in the text format.
pub const TAU_NAME: &str = "tau";
/// Reserved spelling of the quiescence observation.
pub const DELTA_NAME: &str = "delta";
/// Reserved spelling of the refusal observation.
pub const PHI_NAME: &str = "phi";
/// Name given to an implicitly created failure state.
pub const DEFAULT_FAILURE_NAME: &str = "_PHI";

/// Index of a state, in declaration order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub usize);

/// Index of an action within its direction's declaration list.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ActionId(pub usize);

/// Edge label: a declared input, a declared output, or the internal action.
///
/// The ordering (inputs, then outputs, then tau, each in declaration order)
/// fixes the canonical edge order used everywhere.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    Input(ActionId),
    Output(ActionId),
    Tau,
}

impl Label {
    pub fn is_input(&self) -> bool {
        matches!(self, Label::Input(_))
    }
    pub fn is_output(&self) -> bool {
        matches!(self, Label::Output(_))
    }
    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }
}

/// Stored modality of an edge. A `Must` edge belongs to both transition
/// relations; a `MayOnly` edge belongs to the may relation alone. Keeping a
/// single tag per edge makes syntactic consistency (every mandatory edge is
/// also allowed) hold by construction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Modality {
    Must,
    MayOnly,
}

/// Query modality: which transition relation to read. `May` is the full
/// edge set, `Must` only the mandatory edges.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Gamma {
    May,
    Must,
}

impl Gamma {
    fn admits(&self, m: Modality) -> bool {
        match self {
            Gamma::May => true,
            Gamma::Must => m == Modality::Must,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub source: StateId,
    pub label: Label,
    pub target: StateId,
    pub modality: Modality,
}

/// Observation symbol of suspension traces: a visible action, quiescence,
/// or refusal. Ordering: inputs, outputs, delta, phi.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Obs {
    In(ActionId),
    Out(ActionId),
    Delta,
    Phi,
}

/// A finite trace over inputs, outputs, `delta` and `phi`.
pub type SuspensionTrace = Vec<Obs>;

/// Observation set after a trace: a subset of the outputs plus `delta` and
/// `phi`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OutSet {
    pub observations: BTreeSet<Obs>,
}

impl OutSet {
    pub fn is_subset(&self, other: &OutSet) -> bool {
        self.observations.is_subset(&other.observations)
    }

    /// First observation present here but missing from `other`.
    pub fn first_excess(&self, other: &OutSet) -> Option<Obs> {
        self.observations
            .iter()
            .find(|o| !other.observations.contains(*o))
            .copied()
    }
}

/// Raw, unchecked automaton description, as read from a file or assembled
/// by an operator. Everything is by name; `validate` reports violations and
/// `IrMia::from_raw` converts to the checked form.
#[derive(Clone, Debug, Default)]
pub struct RawIrMia {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub failure: String,
    pub edges: Vec<RawEdge>,
}

#[derive(Clone, Debug)]
pub struct RawEdge {
    pub source: String,
    pub label: RawLabel,
    pub target: String,
    pub modality: Modality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawLabel {
    Input(String),
    Output(String),
    Tau,
}

impl RawLabel {
    pub fn name(&self) -> &str {
        match self {
            RawLabel::Input(n) | RawLabel::Output(n) => n,
            RawLabel::Tau => TAU_NAME,
        }
    }
}

/// One well-formedness violation. The clause numbers follow the defining
/// conditions of the model: outputs and the internal action never touch the
/// failure state (1), mandatory edges are also allowed (3, unviolatable
/// here by construction), input edges into the failure state are mandatory
/// (4), and a refused input admits no alternative edge (5). Strong
/// convergence (no cycles of optional internal steps) is reported
/// separately, as are structural problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownState { name: String, context: String },
    DuplicateState { name: String },
    EmptyStateSet,
    ReservedName { name: String, context: String },
    AlphabetOverlap { name: String },
    UnknownAction { name: String },
    FailureHasOutgoing { edge: String },
    Clause1OutputOrTauAtFailure { edge: String },
    Clause4OptionalRefusal { edge: String },
    Clause5RefusalNotExclusive { state: String, action: String },
    MayTauCycle { states: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownState { name, context } => {
                write!(f, "unknown state `{name}` ({context})")
            }
            Violation::DuplicateState { name } => write!(f, "duplicate state `{name}`"),
            Violation::EmptyStateSet => write!(f, "no states declared"),
            Violation::ReservedName { name, context } => {
                write!(f, "reserved name `{name}` used as {context}")
            }
            Violation::AlphabetOverlap { name } => {
                write!(f, "action `{name}` declared as both input and output")
            }
            Violation::UnknownAction { name } => write!(f, "undeclared action `{name}`"),
            Violation::FailureHasOutgoing { edge } => {
                write!(f, "clause 1: failure state has outgoing edge {edge}")
            }
            Violation::Clause1OutputOrTauAtFailure { edge } => {
                write!(f, "clause 1: output/tau edge touches failure state: {edge}")
            }
            Violation::Clause4OptionalRefusal { edge } => {
                write!(f, "clause 4: optional input edge into failure state: {edge}")
            }
            Violation::Clause5RefusalNotExclusive { state, action } => {
                write!(
                    f,
                    "clause 5: state `{state}` refuses input `{action}` but also has a non-failure edge for it"
                )
            }
            Violation::MayTauCycle { states } => {
                write!(f, "divergence: cycle of optional tau steps through {}", states.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "ok")
        } else {
            for v in &self.violations {
                writeln!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Input-enabledness classification: does every non-failure state accept
/// every input, strongly (single step) or weakly (through internal steps),
/// in the may or must relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InputEnabledness {
    pub weak_may: bool,
    pub strong_may: bool,
    pub weak_must: bool,
    pub strong_must: bool,
}

/// Checked automaton. Construction via [`IrMia::from_raw`] guarantees the
/// structural invariants; all operations on this type are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrMia {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    states: Vec<String>,
    initial: StateId,
    failure: StateId,
    edges: Vec<Edge>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

/// Validate a raw description. An empty report means `from_raw` will accept
/// it. Violations are data, not errors: callers inspect the report.
pub fn validate(raw: &RawIrMia) -> ValidationReport {
    let mut violations = Vec::new();
    if raw.states.is_empty() {
        violations.push(Violation::EmptyStateSet);
    }

    let mut seen = BTreeSet::new();
    for s in &raw.states {
        if !seen.insert(s.clone()) {
            violations.push(Violation::DuplicateState { name: s.clone() });
        }
    }

    let reserved = [TAU_NAME, DELTA_NAME, PHI_NAME];
    let mut input_set = BTreeSet::new();
    for a in &raw.inputs {
        if reserved.contains(&a.as_str()) {
            violations.push(Violation::ReservedName { name: a.clone(), context: "input".into() });
        }
        input_set.insert(a.clone());
    }
    let mut output_set = BTreeSet::new();
    for a in &raw.outputs {
        if reserved.contains(&a.as_str()) {
            violations.push(Violation::ReservedName { name: a.clone(), context: "output".into() });
        }
        if input_set.contains(a) {
            violations.push(Violation::AlphabetOverlap { name: a.clone() });
        }
        output_set.insert(a.clone());
    }

    let state_index: BTreeMap<&str, usize> =
        raw.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    for (which, name) in [("initial state", &raw.initial), ("failure state", &raw.failure)] {
        if !state_index.contains_key(name.as_str()) {
            violations.push(Violation::UnknownState { name: name.clone(), context: which.into() });
        }
    }

    for e in &raw.edges {
        let desc = || format!("{} {} {}", e.source, e.label.name(), e.target);
        for endpoint in [&e.source, &e.target] {
            if !state_index.contains_key(endpoint.as_str()) {
                violations.push(Violation::UnknownState {
                    name: endpoint.clone(),
                    context: format!("edge {}", desc()),
                });
            }
        }
        match &e.label {
            RawLabel::Input(n) => {
                if !input_set.contains(n) {
                    violations.push(Violation::UnknownAction { name: n.clone() });
                }
            }
            RawLabel::Output(n) => {
                if !output_set.contains(n) {
                    violations.push(Violation::UnknownAction { name: n.clone() });
                }
            }
            RawLabel::Tau => {}
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    // Structural clauses, now that names resolve.
    let failure = raw.failure.as_str();
    for e in &raw.edges {
        let desc = format!("{} {} {}", e.source, e.label.name(), e.target);
        if e.source == failure {
            violations.push(Violation::FailureHasOutgoing { edge: desc.clone() });
            continue;
        }
        match &e.label {
            RawLabel::Input(_) => {
                if e.target == failure && e.modality == Modality::MayOnly {
                    violations.push(Violation::Clause4OptionalRefusal { edge: desc });
                }
            }
            RawLabel::Output(_) | RawLabel::Tau => {
                if e.target == failure {
                    violations.push(Violation::Clause1OutputOrTauAtFailure { edge: desc });
                }
            }
        }
    }

    // Clause 5: a refused input admits no other edge from the same state.
    let mut refusals: BTreeSet<(String, String)> = BTreeSet::new();
    for e in &raw.edges {
        if let RawLabel::Input(n) = &e.label {
            if e.target == failure && e.modality == Modality::Must {
                refusals.insert((e.source.clone(), n.clone()));
            }
        }
    }
    let mut flagged: BTreeSet<(String, String)> = BTreeSet::new();
    for e in &raw.edges {
        if let RawLabel::Input(n) = &e.label {
            if e.target != failure && refusals.contains(&(e.source.clone(), n.clone())) {
                let key = (e.source.clone(), n.clone());
                if flagged.insert(key) {
                    violations.push(Violation::Clause5RefusalNotExclusive {
                        state: e.source.clone(),
                        action: n.clone(),
                    });
                }
            }
        }
    }

    // Strong convergence: no cycle of optional tau edges. Mandatory tau
    // edges are also in the may relation, so every tau edge participates.
    let n = raw.states.len();
    let mut tau_succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &raw.edges {
        if e.label == RawLabel::Tau {
            tau_succ[state_index[e.source.as_str()]].push(state_index[e.target.as_str()]);
        }
    }
    if let Some(cycle) = find_cycle(&tau_succ) {
        violations.push(Violation::MayTauCycle {
            states: cycle.into_iter().map(|i| raw.states[i].clone()).collect(),
        });
    }

    ValidationReport { violations }
}

fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut mark = vec![Mark::White; succ.len()];
    let mut stack = Vec::new();
    fn visit(
        v: usize,
        succ: &[Vec<usize>],
        mark: &mut [Mark],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        mark[v] = Mark::Grey;
        stack.push(v);
        for &w in &succ[v] {
            match mark[w] {
                Mark::Grey => {
                    let at = stack.iter().position(|&x| x == w).unwrap();
                    return Some(stack[at..].to_vec());
                }
                Mark::White => {
                    if let Some(c) = visit(w, succ, mark, stack) {
                        return Some(c);
                    }
                }
                Mark::Black => {}
            }
        }
        stack.pop();
        mark[v] = Mark::Black;
        None
    }
    for v in 0..succ.len() {
        if mark[v] == Mark::White {
            if let Some(c) = visit(v, succ, &mut mark, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

impl IrMia {
    /// Convert a raw description into a checked automaton, requiring full
    /// validity including strong convergence.
    pub fn from_raw(raw: &RawIrMia) -> Result<IrMia, ValidationReport> {
        Self::from_raw_inner(raw, true)
    }

    /// Like [`IrMia::from_raw`], but tolerates divergence (cycles of
    /// optional internal steps). Used by operators whose output can
    /// legitimately diverge, such as hiding; the caller reports it.
    pub fn from_raw_divergent_ok(raw: &RawIrMia) -> Result<IrMia, ValidationReport> {
        Self::from_raw_inner(raw, false)
    }

    fn from_raw_inner(raw: &RawIrMia, require_convergence: bool) -> Result<IrMia, ValidationReport> {
        let mut report = validate(raw);
        if !require_convergence {
            report.violations.retain(|v| !matches!(v, Violation::MayTauCycle { .. }));
        }
        if !report.is_empty() {
            return Err(report);
        }

        let state_index: BTreeMap<&str, usize> =
            raw.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let input_index: BTreeMap<&str, usize> =
            raw.inputs.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let output_index: BTreeMap<&str, usize> =
            raw.outputs.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

        let mut edges: BTreeSet<(StateId, Label, StateId, Modality)> = BTreeSet::new();
        for e in &raw.edges {
            let label = match &e.label {
                RawLabel::Input(n) => Label::Input(ActionId(input_index[n.as_str()])),
                RawLabel::Output(n) => Label::Output(ActionId(output_index[n.as_str()])),
                RawLabel::Tau => Label::Tau,
            };
            edges.insert((
                StateId(state_index[e.source.as_str()]),
                label,
                StateId(state_index[e.target.as_str()]),
                e.modality,
            ));
        }
        // Drop may-only duplicates of must edges: the must edge already
        // belongs to both relations.
        let canonical: Vec<Edge> = edges
            .iter()
            .filter(|(s, l, t, m)| {
                *m == Modality::Must || !edges.contains(&(*s, *l, *t, Modality::Must))
            })
            .map(|&(source, label, target, modality)| Edge { source, label, target, modality })
            .collect();

        let n = raw.states.len();
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for (i, e) in canonical.iter().enumerate() {
            outgoing[e.source.0].push(i);
            incoming[e.target.0].push(i);
        }

        Ok(IrMia {
            name: raw.name.clone(),
            inputs: raw.inputs.clone(),
            outputs: raw.outputs.clone(),
            states: raw.states.clone(),
            initial: StateId(state_index[raw.initial.as_str()]),
            failure: StateId(state_index[raw.failure.as_str()]),
            edges: canonical,
            outgoing,
            incoming,
        })
    }

    pub fn to_raw(&self) -> RawIrMia {
        RawIrMia {
            name: self.name.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            states: self.states.clone(),
            initial: self.states[self.initial.0].clone(),
            failure: self.states[self.failure.0].clone(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    source: self.states[e.source.0].clone(),
                    label: match e.label {
                        Label::Input(a) => RawLabel::Input(self.inputs[a.0].clone()),
                        Label::Output(a) => RawLabel::Output(self.outputs[a.0].clone()),
                        Label::Tau => RawLabel::Tau,
                    },
                    target: self.states[e.target.0].clone(),
                    modality: e.modality,
                })
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }
    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }
    pub fn state_names(&self) -> &[String] {
        &self.states
    }
    pub fn state_count(&self) -> usize {
        self.states.len()
    }
    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }
    pub fn initial(&self) -> StateId {
        self.initial
    }
    pub fn failure(&self) -> StateId {
        self.failure
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn label_name(&self, l: Label) -> &str {
        match l {
            Label::Input(a) => &self.inputs[a.0],
            Label::Output(a) => &self.outputs[a.0],
            Label::Tau => TAU_NAME,
        }
    }

    /// Render a label with its direction sigil (`?a`, `!b`, `tau`).
    pub fn render_label(&self, l: Label) -> String {
        match l {
            Label::Input(a) => format!("?{}", self.inputs[a.0]),
            Label::Output(a) => format!("!{}", self.outputs[a.0]),
            Label::Tau => TAU_NAME.to_string(),
        }
    }

    /// Render an observation symbol (`a`, `delta`, `phi`) as used in
    /// counterexample traces.
    pub fn render_obs(&self, o: Obs) -> String {
        match o {
            Obs::In(a) => self.inputs[a.0].clone(),
            Obs::Out(a) => self.outputs[a.0].clone(),
            Obs::Delta => DELTA_NAME.to_string(),
            Obs::Phi => PHI_NAME.to_string(),
        }
    }

    /// Render an observation with a direction sigil (`?a`, `!b`, `delta`).
    pub fn render_obs_sigil(&self, o: Obs) -> String {
        match o {
            Obs::In(a) => format!("?{}", self.inputs[a.0]),
            Obs::Out(a) => format!("!{}", self.outputs[a.0]),
            Obs::Delta => DELTA_NAME.to_string(),
            Obs::Phi => PHI_NAME.to_string(),
        }
    }

    pub fn render_trace(&self, trace: &[Obs]) -> String {
        trace.iter().map(|&o| self.render_obs(o)).collect::<Vec<_>>().join("\u{b7}")
    }

    pub fn obs_by_name(&self, name: &str) -> Option<Obs> {
        if name == DELTA_NAME {
            return Some(Obs::Delta);
        }
        if name == PHI_NAME {
            return Some(Obs::Phi);
        }
        if let Some(i) = self.inputs.iter().position(|a| a == name) {
            return Some(Obs::In(ActionId(i)));
        }
        self.outputs.iter().position(|a| a == name).map(|i| Some(Obs::Out(ActionId(i))))?
    }

    pub fn edges_from(&self, s: StateId) -> impl Iterator<Item = &Edge> {
        self.outgoing[s.0].iter().map(move |&i| &self.edges[i])
    }
    pub fn edges_into(&self, s: StateId) -> impl Iterator<Item = &Edge> {
        self.incoming[s.0].iter().map(move |&i| &self.edges[i])
    }

    /// Strong single-step successors of `s` under `label` in relation `gamma`.
    pub fn strong_step(&self, s: StateId, label: Label, gamma: Gamma) -> BTreeSet<StateId> {
        self.edges_from(s)
            .filter(|e| e.label == label && gamma.admits(e.modality))
            .map(|e| e.target)
            .collect()
    }

    pub fn has_strong(&self, s: StateId, label: Label, gamma: Gamma) -> bool {
        self.edges_from(s).any(|e| e.label == label && gamma.admits(e.modality))
    }

    /// Reflexive-transitive closure under tau edges of the given relation.
    pub fn weak_closure(&self, s: StateId, gamma: Gamma) -> BTreeSet<StateId> {
        self.closure_of(&BTreeSet::from([s]), gamma)
    }

    pub fn closure_of(&self, set: &BTreeSet<StateId>, gamma: Gamma) -> BTreeSet<StateId> {
        let mut out = set.clone();
        let mut work: Vec<StateId> = set.iter().copied().collect();
        while let Some(s) = work.pop() {
            for e in self.edges_from(s) {
                if e.label == Label::Tau && gamma.admits(e.modality) && out.insert(e.target) {
                    work.push(e.target);
                }
            }
        }
        out
    }

    /// Weak step: tau closure, one strong `label` step, tau closure.
    pub fn weak_step_set(
        &self,
        set: &BTreeSet<StateId>,
        label: Label,
        gamma: Gamma,
    ) -> BTreeSet<StateId> {
        let pre = self.closure_of(set, gamma);
        let mut mid = BTreeSet::new();
        for &s in &pre {
            mid.extend(self.strong_step(s, label, gamma));
        }
        self.closure_of(&mid, gamma)
    }

    /// Weak visible-step targets from a single state.
    pub fn weak_step(&self, s: StateId, label: Label, gamma: Gamma) -> BTreeSet<StateId> {
        self.weak_step_set(&BTreeSet::from([s]), label, gamma)
    }

    pub fn has_weak(&self, s: StateId, label: Label, gamma: Gamma) -> bool {
        !self.weak_step(s, label, gamma).is_empty()
    }

    /// Weakly enabled visible actions of `s`, plus `phi` when `s` is the
    /// failure state.
    pub fn init_set(&self, s: StateId, gamma: Gamma) -> BTreeSet<Obs> {
        let mut out = BTreeSet::new();
        let closure = self.weak_closure(s, gamma);
        let mut reach: BTreeSet<Label> = BTreeSet::new();
        for &q in &closure {
            for e in self.edges_from(q) {
                if gamma.admits(e.modality) && e.label != Label::Tau {
                    reach.insert(e.label);
                }
            }
        }
        for l in reach {
            match l {
                Label::Input(a) => {
                    out.insert(Obs::In(a));
                }
                Label::Output(a) => {
                    out.insert(Obs::Out(a));
                }
                Label::Tau => {}
            }
        }
        if s == self.failure {
            out.insert(Obs::Phi);
        }
        out
    }

    /// Quiescence predicate. A state is may-quiescent when it has no weakly
    /// mandatory output (it may become quiescent under refinement), and
    /// must-quiescent when it has no weakly allowed output at all. The
    /// failure state is never quiescent.
    pub fn quiescent(&self, s: StateId, gamma: Gamma) -> bool {
        if s == self.failure {
            return false;
        }
        let inner = match gamma {
            Gamma::May => Gamma::Must,
            Gamma::Must => Gamma::May,
        };
        self.init_set(s, inner).iter().all(|o| matches!(o, Obs::In(_)))
    }

    /// Failure predicate. Must-failure holds exactly at the failure state;
    /// may-failure additionally at any state with an incoming optional
    /// input edge (that input may be refused under refinement), regardless
    /// of which trace reached the state.
    pub fn failure_pred(&self, s: StateId, gamma: Gamma) -> bool {
        if s == self.failure {
            return true;
        }
        match gamma {
            Gamma::Must => false,
            Gamma::May => self
                .edges_into(s)
                .any(|e| e.label.is_input() && e.modality == Modality::MayOnly),
        }
    }

    fn obs_step(&self, set: &BTreeSet<StateId>, sym: Obs, gamma: Gamma) -> BTreeSet<StateId> {
        match sym {
            Obs::In(a) => self.weak_step_set(set, Label::Input(a), gamma),
            Obs::Out(a) => self.weak_step_set(set, Label::Output(a), gamma),
            Obs::Delta => {
                let pre = self.closure_of(set, gamma);
                let kept: BTreeSet<StateId> =
                    pre.into_iter().filter(|&q| self.quiescent(q, gamma)).collect();
                self.closure_of(&kept, gamma)
            }
            Obs::Phi => {
                let pre = self.closure_of(set, gamma);
                let kept: BTreeSet<StateId> =
                    pre.into_iter().filter(|&q| self.failure_pred(q, gamma)).collect();
                self.closure_of(&kept, gamma)
            }
        }
    }

    /// States weakly reachable from `src` via the suspension trace, where
    /// `delta` and `phi` are self-loops at states satisfying the respective
    /// predicate. An unreachable trace yields the empty set.
    pub fn after(&self, src: &BTreeSet<StateId>, trace: &[Obs], gamma: Gamma) -> BTreeSet<StateId> {
        let mut cur = self.closure_of(src, gamma);
        for &sym in trace {
            if cur.is_empty() {
                break;
            }
            cur = self.obs_step(&cur, sym, gamma);
        }
        cur
    }

    /// Observation set of a state set: strong single-step outputs of the
    /// members, plus quiescence and failure markers.
    pub fn out_set(&self, src: &BTreeSet<StateId>, gamma: Gamma) -> OutSet {
        let mut observations = BTreeSet::new();
        for &s in src {
            for e in self.edges_from(s) {
                if gamma.admits(e.modality) {
                    if let Label::Output(a) = e.label {
                        observations.insert(Obs::Out(a));
                    }
                }
            }
            if self.quiescent(s, gamma) {
                observations.insert(Obs::Delta);
            }
            if self.failure_pred(s, gamma) {
                observations.insert(Obs::Phi);
            }
        }
        OutSet { observations }
    }

    pub fn input_enabledness(&self) -> InputEnabledness {
        let mut r = InputEnabledness {
            weak_may: true,
            strong_may: true,
            weak_must: true,
            strong_must: true,
        };
        for s in 0..self.states.len() {
            let s = StateId(s);
            if s == self.failure {
                continue;
            }
            for a in 0..self.inputs.len() {
                let l = Label::Input(ActionId(a));
                r.strong_may &= self.has_strong(s, l, Gamma::May);
                r.strong_must &= self.has_strong(s, l, Gamma::Must);
                r.weak_may &= self.has_weak(s, l, Gamma::May);
                r.weak_must &= self.has_weak(s, l, Gamma::Must);
            }
        }
        r
    }

    /// Input completion that adds two chaos states. Every state lacking a
    /// mandatory edge for some input (and lacking a mandatory internal
    /// step) gains a mandatory edge for that input into the first chaos
    /// state, from which every behavior stays allowed but nothing further
    /// is required. The result is weak must-input-enabled.
    ///
    /// Requires every state with an optional internal step to also have a
    /// mandatory one; otherwise completion could lose weak enabledness
    /// under refinement.
    pub fn demonic_completion(&self) -> Result<IrMia, CompletionError> {
        for s in 0..self.states.len() {
            let s = StateId(s);
            if self.has_strong(s, Label::Tau, Gamma::May) && !self.has_strong(s, Label::Tau, Gamma::Must)
            {
                return Err(CompletionError::OptionalTauWithoutMandatory {
                    state: self.states[s.0].clone(),
                });
            }
        }
        let mut raw = self.to_raw();
        let chaos = fresh_name(&raw.states, "_CHI");
        let omega = fresh_name_excluding(&raw.states, "_OMEGA", &chaos);
        for s in 0..self.states.len() {
            let s = StateId(s);
            if s == self.failure {
                continue;
            }
            if self.has_strong(s, Label::Tau, Gamma::Must) {
                continue;
            }
            for (a, name) in self.inputs.iter().enumerate() {
                if !self.has_strong(s, Label::Input(ActionId(a)), Gamma::Must) {
                    raw.edges.push(RawEdge {
                        source: self.states[s.0].clone(),
                        label: RawLabel::Input(name.clone()),
                        target: chaos.clone(),
                        modality: Modality::Must,
                    });
                }
            }
        }
        raw.states.push(chaos.clone());
        raw.states.push(omega.clone());
        raw.edges.push(RawEdge {
            source: chaos.clone(),
            label: RawLabel::Tau,
            target: omega.clone(),
            modality: Modality::Must,
        });
        for name in &self.inputs {
            for st in [&chaos, &omega] {
                raw.edges.push(RawEdge {
                    source: st.clone(),
                    label: RawLabel::Input(name.clone()),
                    target: st.clone(),
                    modality: Modality::Must,
                });
            }
            raw.edges.push(RawEdge {
                source: omega.clone(),
                label: RawLabel::Input(name.clone()),
                target: chaos.clone(),
                modality: Modality::MayOnly,
            });
        }
        for name in &self.outputs {
            raw.edges.push(RawEdge {
                source: omega.clone(),
                label: RawLabel::Output(name.clone()),
                target: chaos.clone(),
                modality: Modality::MayOnly,
            });
        }
        Ok(IrMia::from_raw(&raw).expect("completion preserves validity"))
    }

    /// States reachable from the initial state over all edges.
    pub fn reachable(&self) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut work = vec![self.initial];
        while let Some(s) = work.pop() {
            for e in self.edges_from(s) {
                if seen.insert(e.target) {
                    work.push(e.target);
                }
            }
        }
        seen
    }
}

pub(crate) fn fresh_name(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|s| s == base) {
        return base.to_string();
    }
    let mut i = 1;
    loop {
        let cand = format!("{base}_{i}");
        if !taken.iter().any(|s| s == &cand) {
            return cand;
        }
        i += 1;
    }
}

fn fresh_name_excluding(taken: &[String], base: &str, also: &str) -> String {
    if base != also && !taken.iter().any(|s| s == base) {
        return base.to_string();
    }
    let mut i = 1;
    loop {
        let cand = format!("{base}_{i}");
        if cand != also && !taken.iter().any(|s| s == &cand) {
            return cand;
        }
        i += 1;
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum CompletionError {
    #[error("state `{state}` has an optional tau step without a mandatory one")]
    OptionalTauWithoutMandatory { state: String },
}

/// Errors shared by the binary relations (refinement, conformance).
#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("alphabet mismatch: {detail}")]
    AlphabetMismatch { detail: String },
    #[error("implementation is not weak may-input-enabled (state `{state}` misses input `{input}`)")]
    NotInputEnabled { state: String, input: String },
}

pub(crate) fn check_same_alphabets(a: &IrMia, b: &IrMia) -> Result<(), RelationError> {
    let ia: BTreeSet<_> = a.inputs().iter().collect();
    let ib: BTreeSet<_> = b.inputs().iter().collect();
    let oa: BTreeSet<_> = a.outputs().iter().collect();
    let ob: BTreeSet<_> = b.outputs().iter().collect();
    if ia != ib {
        return Err(RelationError::AlphabetMismatch {
            detail: format!("inputs {:?} vs {:?}", ia, ib),
        });
    }
    if oa != ob {
        return Err(RelationError::AlphabetMismatch {
            detail: format!("outputs {:?} vs {:?}", oa, ob),
        });
    }
    Ok(())
}
