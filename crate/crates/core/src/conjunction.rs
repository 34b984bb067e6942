//! Conjunction of two automata over a common alphabet: the coarsest
//! interface admitting exactly the implementations shared by both
//! operands.
//!
//! Inputs unspecified on one side pair the other side with a demonic
//! state, which allows every output and specifies no input: after an
//! unspecified input, that operand imposes nothing. Pairs where one
//! operand mandates behavior the other cannot allow, or whose combination
//! would require a disjunctive mandatory transition, are inconsistent and
//! pruned together with everything that must reach them; an inconsistent
//! initial pair makes the conjunction undefined.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{
    check_same_alphabets, ActionId, Gamma, IrMia, Label, Modality, RawEdge, RawIrMia, RawLabel,
    RelationError, StateId, ValidationReport,
};

/// One side of a product pair: an operand state or the operand's demonic
/// state.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Side {
    Real(StateId),
    Demonic,
}

impl Side {
    fn name(&self, aut: &IrMia) -> String {
        match self {
            Side::Real(s) => aut.state_name(*s).to_string(),
            Side::Demonic => format!("{}_d", aut.name()),
        }
    }
}

struct Operand<'a> {
    aut: &'a IrMia,
    /// Input/output ids translated from the shared name space.
    input_of: Vec<ActionId>,
    output_of: Vec<ActionId>,
}

impl<'a> Operand<'a> {
    fn new(aut: &'a IrMia, inputs: &[String], outputs: &[String]) -> Operand<'a> {
        let input_of = inputs
            .iter()
            .map(|n| ActionId(aut.inputs().iter().position(|m| m == n).unwrap()))
            .collect();
        let output_of = outputs
            .iter()
            .map(|n| ActionId(aut.outputs().iter().position(|m| m == n).unwrap()))
            .collect();
        Operand { aut, input_of, output_of }
    }

    fn refuses(&self, s: Side, i: usize) -> bool {
        match s {
            Side::Real(s) => self
                .aut
                .strong_step(s, Label::Input(self.input_of[i]), Gamma::Must)
                .contains(&self.aut.failure()),
            Side::Demonic => false,
        }
    }

    fn may_input(&self, s: Side, i: usize) -> bool {
        match s {
            Side::Real(s) => self.aut.has_strong(s, Label::Input(self.input_of[i]), Gamma::May),
            Side::Demonic => false,
        }
    }

    /// Strong input edges, excluding refusals, with their modalities.
    fn input_edges(&self, s: Side, i: usize) -> Vec<(Side, Modality)> {
        match s {
            Side::Real(s) => self
                .aut
                .edges_from(s)
                .filter(|e| e.label == Label::Input(self.input_of[i]))
                .filter(|e| e.target != self.aut.failure())
                .map(|e| (Side::Real(e.target), e.modality))
                .collect(),
            Side::Demonic => Vec::new(),
        }
    }

    /// Strong input step then internal closure in the may relation,
    /// excluding the failure state.
    fn input_then_eps_may(&self, s: Side, i: usize) -> Vec<Side> {
        match s {
            Side::Real(s) => {
                let mut out = BTreeSet::new();
                for t in self.aut.strong_step(s, Label::Input(self.input_of[i]), Gamma::May) {
                    if t != self.aut.failure() {
                        out.extend(self.aut.weak_closure(t, Gamma::May));
                    }
                }
                out.remove(&self.aut.failure());
                out.into_iter().map(Side::Real).collect()
            }
            Side::Demonic => Vec::new(),
        }
    }

    /// Weak allowed output step; the demonic state loops on every output.
    fn weak_out_may(&self, s: Side, o: usize) -> Vec<Side> {
        match s {
            Side::Real(s) => self
                .aut
                .weak_step(s, Label::Output(self.output_of[o]), Gamma::May)
                .into_iter()
                .map(Side::Real)
                .collect(),
            Side::Demonic => vec![Side::Demonic],
        }
    }

    fn strong_must_out(&self, s: Side, o: usize) -> Vec<Side> {
        match s {
            Side::Real(s) => self
                .aut
                .strong_step(s, Label::Output(self.output_of[o]), Gamma::Must)
                .into_iter()
                .map(Side::Real)
                .collect(),
            Side::Demonic => Vec::new(),
        }
    }

    fn tau_edges(&self, s: Side) -> Vec<(Side, Modality)> {
        match s {
            Side::Real(s) => self
                .aut
                .edges_from(s)
                .filter(|e| e.label == Label::Tau)
                .map(|e| (Side::Real(e.target), e.modality))
                .collect(),
            Side::Demonic => Vec::new(),
        }
    }

    /// Allowed nondeterminism on an action: two strong allowed edges with
    /// distinct targets.
    fn may_nondeterministic(&self, s: Side, l: Option<Label>) -> bool {
        let Side::Real(s) = s else { return false };
        match l {
            Some(l) => self.aut.strong_step(s, l, Gamma::May).len() > 1,
            None => self.aut.strong_step(s, Label::Tau, Gamma::May).len() > 1,
        }
    }

    fn has_strong_must(&self, s: Side, l: Option<Label>) -> bool {
        let Side::Real(s) = s else { return false };
        match l {
            Some(l) => self.aut.has_strong(s, l, Gamma::Must),
            None => self.aut.has_strong(s, Label::Tau, Gamma::Must),
        }
    }

    fn label_in(&self, i: usize) -> Label {
        Label::Input(self.input_of[i])
    }
    fn label_out(&self, o: usize) -> Label {
        Label::Output(self.output_of[o])
    }

    fn weak_may_out_enabled(&self, s: Side, o: usize) -> bool {
        !self.weak_out_may(s, o).is_empty()
    }
}

/// Conjunctive product over pairs of operand states extended with demonic
/// states; the last state is the fresh joint failure state.
#[derive(Clone, Debug)]
pub struct ConjunctiveProduct {
    pub automaton: IrMia,
    pairs: Vec<Option<(Side, Side)>>,
}

pub fn conjunctive_product(a: &IrMia, b: &IrMia) -> Result<ConjunctiveProduct, RelationError> {
    check_same_alphabets(a, b)?;
    let inputs: Vec<String> = a.inputs().to_vec();
    let outputs: Vec<String> = a.outputs().to_vec();
    let left = Operand::new(a, &inputs, &outputs);
    let right = Operand::new(b, &inputs, &outputs);

    let start = (Side::Real(a.initial()), Side::Real(b.initial()));
    let mut index: BTreeMap<(Side, Side), usize> = BTreeMap::new();
    let mut pairs: Vec<(Side, Side)> = Vec::new();
    let mut queue = VecDeque::new();
    let intern = |p: (Side, Side),
                      index: &mut BTreeMap<(Side, Side), usize>,
                      pairs: &mut Vec<(Side, Side)>,
                      queue: &mut VecDeque<(Side, Side)>| {
        *index.entry(p).or_insert_with(|| {
            pairs.push(p);
            queue.push_back(p);
            pairs.len() - 1
        })
    };
    intern(start, &mut index, &mut pairs, &mut queue);

    // (source, label, Some(target) | None for failure, modality)
    let mut edges: Vec<(usize, RawLabel, Option<usize>, Modality)> = Vec::new();
    while let Some((x, y)) = queue.pop_front() {
        let src = index[&(x, y)];
        for (i, name) in inputs.iter().enumerate() {
            // Refusals on either side propagate to the joint failure
            // state; operand validity makes them mandatory.
            if left.refuses(x, i) || right.refuses(y, i) {
                edges.push((src, RawLabel::Input(name.clone()), None, Modality::Must));
                continue;
            }
            let x_may = left.may_input(x, i);
            let y_may = right.may_input(y, i);
            if x_may && !y_may {
                for (t, m) in left.input_edges(x, i) {
                    let tgt = intern((t, Side::Demonic), &mut index, &mut pairs, &mut queue);
                    edges.push((src, RawLabel::Input(name.clone()), Some(tgt), m));
                }
            } else if y_may && !x_may {
                for (t, m) in right.input_edges(y, i) {
                    let tgt = intern((Side::Demonic, t), &mut index, &mut pairs, &mut queue);
                    edges.push((src, RawLabel::Input(name.clone()), Some(tgt), m));
                }
            } else if x_may && y_may {
                let xs = left.input_then_eps_may(x, i);
                let ys = right.input_then_eps_may(y, i);
                for &xt in &xs {
                    for &yt in &ys {
                        let tgt = intern((xt, yt), &mut index, &mut pairs, &mut queue);
                        edges.push((src, RawLabel::Input(name.clone()), Some(tgt), Modality::MayOnly));
                    }
                }
                // A mandatory step on either side makes the joint step
                // mandatory.
                for (xt, m) in left.input_edges(x, i) {
                    if m == Modality::Must {
                        for &yt in &ys {
                            let tgt = intern((xt, yt), &mut index, &mut pairs, &mut queue);
                            edges.push((src, RawLabel::Input(name.clone()), Some(tgt), Modality::Must));
                        }
                    }
                }
                for (yt, m) in right.input_edges(y, i) {
                    if m == Modality::Must {
                        for &xt in &xs {
                            let tgt = intern((xt, yt), &mut index, &mut pairs, &mut queue);
                            edges.push((src, RawLabel::Input(name.clone()), Some(tgt), Modality::Must));
                        }
                    }
                }
            }
        }
        for (o, name) in outputs.iter().enumerate() {
            let xs = left.weak_out_may(x, o);
            let ys = right.weak_out_may(y, o);
            // Allowed on both sides: allowed jointly.
            for &xt in &xs {
                for &yt in &ys {
                    let tgt = intern((xt, yt), &mut index, &mut pairs, &mut queue);
                    edges.push((src, RawLabel::Output(name.clone()), Some(tgt), Modality::MayOnly));
                }
            }
            // Mandatory on one side and weakly allowed on the other:
            // mandatory jointly.
            for xt in left.strong_must_out(x, o) {
                for &yt in &ys {
                    let tgt = intern((xt, yt), &mut index, &mut pairs, &mut queue);
                    edges.push((src, RawLabel::Output(name.clone()), Some(tgt), Modality::Must));
                }
            }
            for yt in right.strong_must_out(y, o) {
                for &xt in &xs {
                    let tgt = intern((xt, yt), &mut index, &mut pairs, &mut queue);
                    edges.push((src, RawLabel::Output(name.clone()), Some(tgt), Modality::Must));
                }
            }
        }
        // Internal steps interleave one side at a time.
        for (t, m) in left.tau_edges(x) {
            let tgt = intern((t, y), &mut index, &mut pairs, &mut queue);
            edges.push((src, RawLabel::Tau, Some(tgt), m));
        }
        for (t, m) in right.tau_edges(y) {
            let tgt = intern((x, t), &mut index, &mut pairs, &mut queue);
            edges.push((src, RawLabel::Tau, Some(tgt), m));
        }
    }

    let mut raw = RawIrMia {
        name: format!("({}&{})", a.name(), b.name()),
        inputs,
        outputs,
        ..Default::default()
    };
    for &(x, y) in &pairs {
        raw.states.push(format!("({},{})", x.name(a), y.name(b)));
    }
    let failure_name = crate::model::fresh_name(&raw.states, "_PHI");
    raw.states.push(failure_name.clone());
    raw.initial = raw.states[0].clone();
    raw.failure = failure_name.clone();
    for (src, label, tgt, modality) in edges {
        raw.edges.push(RawEdge {
            source: raw.states[src].clone(),
            label,
            target: match tgt {
                Some(t) => raw.states[t].clone(),
                None => failure_name.clone(),
            },
            modality,
        });
    }
    let automaton = IrMia::from_raw(&raw)
        .unwrap_or_else(|r| panic!("conjunctive product of valid operands is valid: {r}"));
    let pairs = pairs.into_iter().map(Some).chain([None]).collect();
    Ok(ConjunctiveProduct { automaton, pairs })
}

/// Rule that marked a pair inconsistent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InconsistencyRule {
    /// F1/F2: a mandatory output one side cannot allow.
    MandatoryOutputForbidden,
    /// F3/F4: a mandatory input one side refuses.
    MandatoryInputRefused,
    /// F5/F6: allowed nondeterminism meeting a mandatory transition would
    /// need a disjunctive target set.
    DisjunctiveTargetNeeded,
    /// F7: a mandatory step reaches an inconsistent pair.
    MustReachClosure,
}

impl std::fmt::Display for InconsistencyRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InconsistencyRule::MandatoryOutputForbidden => write!(f, "F1/F2"),
            InconsistencyRule::MandatoryInputRefused => write!(f, "F3/F4"),
            InconsistencyRule::DisjunctiveTargetNeeded => write!(f, "F5/F6"),
            InconsistencyRule::MustReachClosure => write!(f, "F7"),
        }
    }
}

/// Inconsistent pairs of a conjunctive product, in discovery order.
pub fn inconsistent_states(
    prod: &ConjunctiveProduct,
    a: &IrMia,
    b: &IrMia,
) -> Vec<(usize, InconsistencyRule)> {
    let inputs: Vec<String> = a.inputs().to_vec();
    let outputs: Vec<String> = a.outputs().to_vec();
    let left = Operand::new(a, &inputs, &outputs);
    let right = Operand::new(b, &inputs, &outputs);

    let mut result = Vec::new();
    let mut in_f = vec![false; prod.pairs.len()];
    for (idx, pair) in prod.pairs.iter().enumerate() {
        let Some((x, y)) = *pair else { continue };
        let mut hit = None;
        for o in 0..outputs.len() {
            let x_must = !left.strong_must_out(x, o).is_empty();
            let y_must = !right.strong_must_out(y, o).is_empty();
            if (x_must && !right.weak_may_out_enabled(y, o))
                || (y_must && !left.weak_may_out_enabled(x, o))
            {
                hit = Some(InconsistencyRule::MandatoryOutputForbidden);
                break;
            }
        }
        if hit.is_none() {
            for i in 0..inputs.len() {
                let x_requires = !left.input_edges(x, i).iter().all(|(_, m)| *m == Modality::MayOnly)
                    && !left.refuses(x, i);
                let y_requires = !right.input_edges(y, i).iter().all(|(_, m)| *m == Modality::MayOnly)
                    && !right.refuses(y, i);
                if (x_requires && right.refuses(y, i)) || (y_requires && left.refuses(x, i)) {
                    hit = Some(InconsistencyRule::MandatoryInputRefused);
                    break;
                }
            }
        }
        if hit.is_none() {
            // Pairs of labels over the shared alphabet, in each operand's
            // own id space; `None` is the internal action.
            let mut labels: Vec<(Option<Label>, Option<Label>)> = (0..inputs.len())
                .map(|i| (Some(left.label_in(i)), Some(right.label_in(i))))
                .collect();
            labels.extend(
                (0..outputs.len()).map(|o| (Some(left.label_out(o)), Some(right.label_out(o)))),
            );
            labels.push((None, None));
            for (la, lb) in labels {
                if (left.may_nondeterministic(x, la) && right.has_strong_must(y, lb))
                    || (right.may_nondeterministic(y, lb) && left.has_strong_must(x, la))
                {
                    hit = Some(InconsistencyRule::DisjunctiveTargetNeeded);
                    break;
                }
            }
        }
        if let Some(rule) = hit {
            in_f[idx] = true;
            result.push((idx, rule));
        }
    }
    // F7: mandatory product steps into the inconsistent set.
    loop {
        let mut changed = false;
        for s in 0..prod.pairs.len() {
            if in_f[s] || prod.pairs[s].is_none() {
                continue;
            }
            let reaches = prod
                .automaton
                .edges_from(StateId(s))
                .any(|e| e.modality == Modality::Must && in_f[e.target.0]);
            if reaches {
                in_f[s] = true;
                result.push((s, InconsistencyRule::MustReachClosure));
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
pub struct ConjunctionResult {
    pub defined: bool,
    /// Present when defined.
    pub automaton: Option<IrMia>,
    pub inconsistent: Vec<(String, InconsistencyRule)>,
    pub validation: ValidationReport,
}

/// Conjunction: the product pruned of inconsistent pairs; undefined when
/// the initial pair is inconsistent.
pub fn conjoin(a: &IrMia, b: &IrMia) -> Result<ConjunctionResult, RelationError> {
    let prod = conjunctive_product(a, b)?;
    let f = inconsistent_states(&prod, a, b);
    let aut = &prod.automaton;
    let inconsistent: Vec<(String, InconsistencyRule)> =
        f.iter().map(|&(s, r)| (aut.state_name(StateId(s)).to_string(), r)).collect();
    let f_set: BTreeSet<usize> = f.iter().map(|&(s, _)| s).collect();
    if f_set.contains(&0) {
        return Ok(ConjunctionResult {
            defined: false,
            automaton: None,
            inconsistent,
            validation: ValidationReport::default(),
        });
    }
    let f_names: BTreeSet<String> =
        f_set.iter().map(|&s| aut.state_name(StateId(s)).to_string()).collect();
    let mut raw = aut.to_raw();
    raw.states.retain(|s| !f_names.contains(s));
    // Inconsistent pairs disappear with their edges. An input all of whose
    // targets were inconsistent becomes refused: a common refinement
    // cannot implement it, and refinement does not permit dropping inputs
    // outright. (Mandatory edges into the set never survive to this
    // point: their sources are inconsistent by closure.)
    let mut dead_input_slots: BTreeSet<(String, String)> = BTreeSet::new();
    raw.edges.retain(|e| {
        if f_names.contains(&e.source) {
            return false;
        }
        if f_names.contains(&e.target) {
            if let RawLabel::Input(n) = &e.label {
                dead_input_slots.insert((e.source.clone(), n.clone()));
            }
            return false;
        }
        true
    });
    for (source, input) in dead_input_slots {
        let still_there = raw
            .edges
            .iter()
            .any(|e| e.source == source && e.label == RawLabel::Input(input.clone()));
        if !still_there {
            raw.edges.push(RawEdge {
                source,
                label: RawLabel::Input(input),
                target: raw.failure.clone(),
                modality: Modality::Must,
            });
        }
    }
    let (kept, _) = crate::compose::reachable_restriction(&raw);
    let validation = crate::model::validate(&kept);
    let automaton = IrMia::from_raw(&kept)
        .unwrap_or_else(|r| panic!("conjunction pruning preserves validity: {r}"));
    Ok(ConjunctionResult { defined: true, automaton: Some(automaton), inconsistent, validation })
}
