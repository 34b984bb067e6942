//! Parallel product and composition, in a multicast variant that keeps
//! synchronized outputs observable and a hiding variant that turns them
//! into internal steps, plus the standalone hiding operator.
//!
//! Composition happens in two steps: the raw product over state pairs, and
//! pruning. Pruning removes illegal pairs (where one side emits a shared
//! output the other cannot accept, or may refuse), everything that can
//! reach an illegal pair autonomously through allowed outputs or internal
//! steps, and all inputs leading into illegal pairs; edges into pairs
//! containing an operand failure state are redirected to the fresh joint
//! failure state.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{
    Gamma, IrMia, Label, Modality, RawEdge, RawIrMia, RawLabel, StateId, ValidationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComposeMode {
    Multicast,
    Hiding,
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("operands share output actions: {actions:?}")]
    SharedOutputs { actions: Vec<String> },
    #[error("hiding composition requires disjoint inputs, shared: {actions:?}")]
    SharedInputs { actions: Vec<String> },
    #[error("labels are not outputs of the automaton: {labels:?}")]
    LabelsNotOutputs { labels: Vec<String> },
}

/// Check composability; `Ok` means the product is defined.
pub fn composable(a: &IrMia, b: &IrMia, mode: ComposeMode) -> Result<(), ComposeError> {
    let oa: BTreeSet<&String> = a.outputs().iter().collect();
    let ob: BTreeSet<&String> = b.outputs().iter().collect();
    let shared_out: Vec<String> = oa.intersection(&ob).map(|s| s.to_string()).collect();
    if !shared_out.is_empty() {
        return Err(ComposeError::SharedOutputs { actions: shared_out });
    }
    if mode == ComposeMode::Hiding {
        let ia: BTreeSet<&String> = a.inputs().iter().collect();
        let ib: BTreeSet<&String> = b.inputs().iter().collect();
        let shared_in: Vec<String> = ia.intersection(&ib).map(|s| s.to_string()).collect();
        if !shared_in.is_empty() {
            return Err(ComposeError::SharedInputs { actions: shared_in });
        }
    }
    Ok(())
}

/// Raw product: reachable state pairs plus the fresh joint failure state.
#[derive(Clone, Debug)]
pub struct Product {
    pub automaton: IrMia,
    /// Operand pair behind each product state; `None` for the fresh
    /// failure state.
    pub pairs: Vec<Option<(StateId, StateId)>>,
    pub mode: ComposeMode,
}

fn pair_name(a: &IrMia, b: &IrMia, p: StateId, q: StateId) -> String {
    format!("({},{})", a.state_name(p), b.state_name(q))
}

/// Build the reachable parallel product. Exclusive actions interleave,
/// shared actions synchronize (mandatory only when mandatory on both
/// sides), and a shared input that one side requires while the other
/// leaves it completely unspecified is refused by the product. Pairs
/// containing an operand failure state are terminal.
pub fn parallel_product(a: &IrMia, b: &IrMia, mode: ComposeMode) -> Result<Product, ComposeError> {
    composable(a, b, mode)?;

    let in_a: BTreeSet<&str> = a.inputs().iter().map(|s| s.as_str()).collect();
    let in_b: BTreeSet<&str> = b.inputs().iter().map(|s| s.as_str()).collect();
    let out_a: BTreeSet<&str> = a.outputs().iter().map(|s| s.as_str()).collect();
    let out_b: BTreeSet<&str> = b.outputs().iter().map(|s| s.as_str()).collect();
    let alpha_a: BTreeSet<&str> = in_a.union(&out_a).copied().collect();
    let alpha_b: BTreeSet<&str> = in_b.union(&out_b).copied().collect();
    let shared: BTreeSet<&str> = alpha_a.intersection(&alpha_b).copied().collect();

    let mut inputs: Vec<String> = Vec::new();
    for n in a.inputs().iter().chain(b.inputs()) {
        if !out_a.contains(n.as_str()) && !out_b.contains(n.as_str()) && !inputs.contains(n) {
            inputs.push(n.clone());
        }
    }
    let mut outputs: Vec<String> = Vec::new();
    for n in a.outputs().iter().chain(b.outputs()) {
        let hidden = mode == ComposeMode::Hiding && shared.contains(n.as_str());
        if !hidden && !outputs.contains(n) {
            outputs.push(n.clone());
        }
    }
    let input_set: BTreeSet<String> = inputs.iter().cloned().collect();
    let is_input = move |n: &str| input_set.contains(n);

    let mut raw = RawIrMia {
        name: format!("({}|{})", a.name(), b.name()),
        inputs,
        outputs,
        ..Default::default()
    };

    let start = (a.initial(), b.initial());
    let mut index: BTreeMap<(StateId, StateId), usize> = BTreeMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let failure_name = crate::model::fresh_name(&[], "_PHI");
    let mut queue = VecDeque::new();
    let intern = |p: (StateId, StateId),
                      index: &mut BTreeMap<(StateId, StateId), usize>,
                      pairs: &mut Vec<(StateId, StateId)>,
                      queue: &mut VecDeque<(StateId, StateId)>| {
        *index.entry(p).or_insert_with(|| {
            pairs.push(p);
            queue.push_back(p);
            pairs.len() - 1
        })
    };
    intern(start, &mut index, &mut pairs, &mut queue);

    let mut edges: Vec<(usize, RawLabel, Option<usize>, Modality)> = Vec::new();
    while let Some((p, q)) = queue.pop_front() {
        if p == a.failure() || q == b.failure() {
            continue;
        }
        let src = index[&(p, q)];
        // Interleaving and synchronization, driven from the left operand.
        for e in a.edges_from(p) {
            let name = a.label_name(e.label).to_string();
            if e.label == Label::Tau || !shared.contains(name.as_str()) {
                let t = intern((e.target, q), &mut index, &mut pairs, &mut queue);
                let label = match e.label {
                    Label::Tau => RawLabel::Tau,
                    Label::Input(_) => RawLabel::Input(name),
                    Label::Output(_) => RawLabel::Output(name),
                };
                edges.push((src, label, Some(t), e.modality));
            } else {
                for e2 in b.edges_from(q) {
                    if b.label_name(e2.label) != name || e2.label == Label::Tau {
                        continue;
                    }
                    let t = intern((e.target, e2.target), &mut index, &mut pairs, &mut queue);
                    let m = if e.modality == Modality::Must && e2.modality == Modality::Must {
                        Modality::Must
                    } else {
                        Modality::MayOnly
                    };
                    let label = if mode == ComposeMode::Hiding {
                        RawLabel::Tau
                    } else if is_input(&name) {
                        RawLabel::Input(name.clone())
                    } else {
                        RawLabel::Output(name.clone())
                    };
                    edges.push((src, label, Some(t), m));
                }
            }
        }
        // Right-exclusive actions and internal steps.
        for e in b.edges_from(q) {
            let name = b.label_name(e.label).to_string();
            if e.label == Label::Tau || !shared.contains(name.as_str()) {
                let t = intern((p, e.target), &mut index, &mut pairs, &mut queue);
                let label = match e.label {
                    Label::Tau => RawLabel::Tau,
                    Label::Input(_) => RawLabel::Input(name),
                    Label::Output(_) => RawLabel::Output(name),
                };
                edges.push((src, label, Some(t), e.modality));
            }
        }
        // Refusal of a shared input that one side requires and the other
        // leaves unspecified.
        for name in shared.iter().filter(|n| in_a.contains(*n) && in_b.contains(*n)) {
            let la = Label::Input(crate::model::ActionId(
                a.inputs().iter().position(|n| n == name).unwrap(),
            ));
            let lb = Label::Input(crate::model::ActionId(
                b.inputs().iter().position(|n| n == name).unwrap(),
            ));
            let a_must = a.has_strong(p, la, Gamma::Must);
            let a_may = a.has_strong(p, la, Gamma::May);
            let b_must = b.has_strong(q, lb, Gamma::Must);
            let b_may = b.has_strong(q, lb, Gamma::May);
            if (a_must && !b_may) || (b_must && !a_may) {
                edges.push((src, RawLabel::Input(name.to_string()), None, Modality::Must));
            }
        }
    }

    for &(p, q) in &pairs {
        raw.states.push(pair_name(a, b, p, q));
    }
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

    let automaton = IrMia::from_raw_divergent_ok(&raw)
        .unwrap_or_else(|r| panic!("product of valid operands is structurally valid: {r}"));
    let pairs = pairs.into_iter().map(Some).chain([None]).collect();
    Ok(Product { automaton, pairs, mode })
}

/// Why a product state was pruned or an edge removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneReason {
    /// One of the four direct error conditions, with the shared action.
    NewError { bullet: u8, action: String },
    /// Reaches an illegal state through allowed outputs/internal steps.
    ErrorReachClosure,
    /// Input edges removed because some allowed input step leads into an
    /// illegal state.
    InputEdgeRemoval { action: String },
    Unreachable,
}

impl std::fmt::Display for PruneReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PruneReason::NewError { bullet, action } => {
                write!(f, "new-error bullet {bullet} ({action})")
            }
            PruneReason::ErrorReachClosure => write!(f, "error-reach closure"),
            PruneReason::InputEdgeRemoval { action } => {
                write!(f, "input-edge-removal ({action})")
            }
            PruneReason::Unreachable => write!(f, "unreachable"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneEvent {
    pub state: String,
    pub reason: PruneReason,
}

/// Illegal state pairs of a product, in discovery order: direct errors
/// first (product state order), then closure additions.
pub fn illegal_states(product: &Product, a: &IrMia, b: &IrMia) -> Vec<(usize, PruneReason)> {
    let aut = &product.automaton;
    let out_a: BTreeSet<&str> = a.outputs().iter().map(|s| s.as_str()).collect();
    let out_b: BTreeSet<&str> = b.outputs().iter().map(|s| s.as_str()).collect();
    let alpha_a: BTreeSet<&str> = a
        .inputs()
        .iter()
        .chain(a.outputs())
        .map(|s| s.as_str())
        .collect();
    let alpha_b: BTreeSet<&str> =
        b.inputs().iter().chain(b.outputs()).map(|s| s.as_str()).collect();

    let label_of = |aut: &IrMia, name: &str| -> Option<Label> {
        if let Some(i) = aut.inputs().iter().position(|n| n == name) {
            Some(Label::Input(crate::model::ActionId(i)))
        } else {
            aut.outputs()
                .iter()
                .position(|n| n == name)
                .map(|i| Label::Output(crate::model::ActionId(i)))
        }
    };

    let mut errors: Vec<(usize, PruneReason)> = Vec::new();
    let mut in_e = vec![false; aut.state_count()];
    for (idx, pair) in product.pairs.iter().enumerate() {
        let Some((p, q)) = *pair else { continue };
        if p == a.failure() || q == b.failure() {
            continue;
        }
        let mut found: Option<(u8, String)> = None;
        for name in alpha_a.intersection(&alpha_b) {
            let la = label_of(a, name).unwrap();
            let lb = label_of(b, name).unwrap();
            // Shared output of one side that the other cannot promise to
            // take, or may explicitly refuse.
            if out_a.contains(name) && a.has_strong(p, la, Gamma::May) {
                if !b.has_weak(q, lb, Gamma::Must) {
                    found = Some((1, name.to_string()));
                    break;
                }
                if b.strong_step(q, lb, Gamma::May).contains(&b.failure()) {
                    found = Some((3, name.to_string()));
                    break;
                }
            }
            if out_b.contains(name) && b.has_strong(q, lb, Gamma::May) {
                if !a.has_weak(p, la, Gamma::Must) {
                    found = Some((2, name.to_string()));
                    break;
                }
                if a.strong_step(p, la, Gamma::May).contains(&a.failure()) {
                    found = Some((4, name.to_string()));
                    break;
                }
            }
        }
        if let Some((bullet, action)) = found {
            errors.push((idx, PruneReason::NewError { bullet, action }));
            in_e[idx] = true;
        }
    }

    // Closure: anything that can reach an illegal state autonomously,
    // through allowed output or internal steps.
    loop {
        let mut changed = false;
        for s in 0..aut.state_count() {
            if in_e[s] || product.pairs[s].is_none() {
                continue;
            }
            let reaches = aut
                .edges_from(StateId(s))
                .any(|e| !e.label.is_input() && in_e[e.target.0]);
            if reaches {
                in_e[s] = true;
                errors.push((s, PruneReason::ErrorReachClosure));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    errors
}

#[derive(Clone, Debug)]
pub struct CompositionResult {
    pub automaton: IrMia,
    pub compatible: bool,
    pub pruning_report: Vec<PruneEvent>,
    pub mode: ComposeMode,
    /// Validation of the result; non-empty only when hiding produced
    /// divergence (a cycle of optional internal steps).
    pub validation: ValidationReport,
}

/// Parallel composition: the product pruned of illegal pairs.
pub fn parallel_compose(
    a: &IrMia,
    b: &IrMia,
    mode: ComposeMode,
) -> Result<CompositionResult, ComposeError> {
    let product = parallel_product(a, b, mode)?;
    let aut = &product.automaton;
    let errors = illegal_states(&product, a, b);
    let mut report: Vec<PruneEvent> = errors
        .iter()
        .map(|(s, reason)| PruneEvent {
            state: aut.state_name(StateId(*s)).to_string(),
            reason: reason.clone(),
        })
        .collect();
    let in_e: BTreeSet<usize> = errors.iter().map(|(s, _)| *s).collect();

    if in_e.contains(&0) {
        // Incompatible: fresh initial state with no incident edges, plus
        // the joint failure state.
        let raw = RawIrMia {
            name: aut.name().to_string(),
            inputs: aut.inputs().to_vec(),
            outputs: aut.outputs().to_vec(),
            states: vec![aut.state_name(StateId(0)).to_string(), "_PHI".to_string()],
            initial: aut.state_name(StateId(0)).to_string(),
            failure: "_PHI".to_string(),
            edges: vec![],
        };
        return Ok(CompositionResult {
            automaton: IrMia::from_raw(&raw).expect("edgeless automaton is valid"),
            compatible: false,
            pruning_report: report,
            mode,
            validation: ValidationReport::default(),
        });
    }

    let mut raw = aut.to_raw();
    let failure_name = raw.failure.clone();
    let is_err = |name: &str, aut: &IrMia, in_e: &BTreeSet<usize>| {
        aut.state_id(name).map_or(false, |s| in_e.contains(&s.0))
    };

    // Remove every input edge from non-illegal states that have some
    // allowed input step into an illegal state.
    let mut drop_inputs: BTreeSet<(String, String)> = BTreeSet::new();
    for e in &raw.edges {
        if let RawLabel::Input(n) = &e.label {
            if !is_err(&e.source, aut, &in_e) && is_err(&e.target, aut, &in_e) {
                drop_inputs.insert((e.source.clone(), n.clone()));
            }
        }
    }
    for (state, action) in &drop_inputs {
        report.push(PruneEvent {
            state: state.clone(),
            reason: PruneReason::InputEdgeRemoval { action: action.clone() },
        });
    }
    raw.edges.retain(|e| match &e.label {
        RawLabel::Input(n) => !drop_inputs.contains(&(e.source.clone(), n.clone())),
        _ => true,
    });

    // Delete illegal states with their incident edges.
    raw.edges
        .retain(|e| !is_err(&e.source, aut, &in_e) && !is_err(&e.target, aut, &in_e));
    let err_names: BTreeSet<String> =
        in_e.iter().map(|&s| aut.state_name(StateId(s)).to_string()).collect();
    raw.states.retain(|s| !err_names.contains(s));

    // Redirect edges into pairs containing an operand failure state. Such
    // pairs arise from synchronizing with a refusal; the surviving edges
    // are input-labeled and the joint refusal is mandatory.
    let failure_pairs: BTreeSet<String> = product
        .pairs
        .iter()
        .enumerate()
        .filter_map(|(i, p)| match p {
            Some((x, y)) if *x == a.failure() || *y == b.failure() => {
                Some(aut.state_name(StateId(i)).to_string())
            }
            _ => None,
        })
        .collect();
    for e in &mut raw.edges {
        if failure_pairs.contains(&e.target) {
            debug_assert!(matches!(e.label, RawLabel::Input(_)));
            e.target = failure_name.clone();
            e.modality = Modality::Must;
        }
    }

    // Drop unreachable states (the failure state stays).
    let (kept, dropped) = reachable_restriction(&raw);
    for name in dropped {
        report.push(PruneEvent { state: name, reason: PruneReason::Unreachable });
    }
    let automaton = IrMia::from_raw_divergent_ok(&kept)
        .unwrap_or_else(|r| panic!("pruning preserves structural validity: {r}"));
    let validation = crate::model::validate(&kept);
    Ok(CompositionResult {
        automaton,
        compatible: true,
        pruning_report: report,
        mode,
        validation,
    })
}

/// Restrict a raw automaton to the states reachable from its initial
/// state, keeping the failure state; returns the restriction and the
/// dropped state names.
pub(crate) fn reachable_restriction(raw: &RawIrMia) -> (RawIrMia, Vec<String>) {
    let mut reach: BTreeSet<&str> = BTreeSet::from([raw.initial.as_str()]);
    loop {
        let mut changed = false;
        for e in &raw.edges {
            if reach.contains(e.source.as_str()) && reach.insert(e.target.as_str()) {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut kept = raw.clone();
    let mut dropped = Vec::new();
    kept.states.retain(|s| {
        let keep = reach.contains(s.as_str()) || s == &raw.failure;
        if !keep {
            dropped.push(s.clone());
        }
        keep
    });
    kept.edges.retain(|e| {
        reach.contains(e.source.as_str())
            && (reach.contains(e.target.as_str()) || e.target == raw.failure)
    });
    (kept, dropped)
}

#[derive(Clone, Debug)]
pub struct HideResult {
    pub automaton: IrMia,
    /// Non-empty when hiding created divergence.
    pub validation: ValidationReport,
}

/// Relabel the given output actions as internal steps and drop them from
/// the output alphabet. Modalities are preserved. The result can be
/// divergent; the validation report says so.
pub fn hide(aut: &IrMia, labels: &[String]) -> Result<HideResult, ComposeError> {
    let missing: Vec<String> =
        labels.iter().filter(|l| !aut.outputs().contains(l)).cloned().collect();
    if !missing.is_empty() {
        return Err(ComposeError::LabelsNotOutputs { labels: missing });
    }
    let mut raw = aut.to_raw();
    raw.outputs.retain(|o| !labels.contains(o));
    for e in &mut raw.edges {
        if let RawLabel::Output(n) = &e.label {
            if labels.contains(n) {
                e.label = RawLabel::Tau;
            }
        }
    }
    let validation = crate::model::validate(&raw);
    let automaton = IrMia::from_raw_divergent_ok(&raw)
        .unwrap_or_else(|r| panic!("hiding preserves structural validity: {r}"));
    Ok(HideResult { automaton, validation })
}
