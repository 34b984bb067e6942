//! Independent brute-force checkers and seeded instance generators. The
//! checkers recompute everything from first principles on each query and
//! exist to cross-validate the fixpoint and determinization algorithms;
//! the generators drive the property suites.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conformance::ConformanceVerdict;
use crate::model::{
    check_same_alphabets, ActionId, Gamma, IrMia, Label, Modality, Obs, RawEdge, RawIrMia,
    RawLabel, RelationError, StateId, SuspensionTrace,
};
use crate::refinement::RefinementVerdict;

/// All suspension trace symbols of an automaton in canonical order.
fn symbols(aut: &IrMia) -> Vec<Obs> {
    let mut syms: Vec<Obs> = (0..aut.inputs().len()).map(|a| Obs::In(ActionId(a))).collect();
    syms.extend((0..aut.outputs().len()).map(|a| Obs::Out(ActionId(a))));
    syms.push(Obs::Delta);
    syms.push(Obs::Phi);
    syms
}

/// Exactly the suspension traces of length at most `depth`, by direct
/// recursive expansion without determinization.
pub fn enum_straces(aut: &IrMia, depth: usize, gamma: Gamma) -> BTreeSet<SuspensionTrace> {
    let mut out = BTreeSet::new();
    let init = aut.after(&BTreeSet::from([aut.initial()]), &[], gamma);
    let syms = symbols(aut);
    fn walk(
        aut: &IrMia,
        set: &BTreeSet<StateId>,
        prefix: &mut SuspensionTrace,
        left: usize,
        syms: &[Obs],
        gamma: Gamma,
        out: &mut BTreeSet<SuspensionTrace>,
    ) {
        out.insert(prefix.clone());
        if left == 0 {
            return;
        }
        for &sym in syms {
            let next = aut.after(set, &[sym], gamma);
            if next.is_empty() {
                continue;
            }
            prefix.push(sym);
            walk(aut, &next, prefix, left - 1, syms, gamma, out);
            prefix.pop();
        }
    }
    walk(aut, &init, &mut Vec::new(), depth, &syms, gamma, &mut out);
    out
}

/// Bounded conformance check: both conditions verified for every common
/// trace up to `depth`, recomputing reach sets from scratch. Breadth-first,
/// so a reported counterexample is shortest.
pub fn irioco_bounded(
    imp: &IrMia,
    spec: &IrMia,
    depth: usize,
) -> Result<ConformanceVerdict, RelationError> {
    check_same_alphabets(imp, spec)?;
    let syms = symbols(imp);
    let to_spec = |o: Obs| match o {
        Obs::In(a) => spec.obs_by_name(&imp.inputs()[a.0]).unwrap(),
        Obs::Out(a) => spec.obs_by_name(&imp.outputs()[a.0]).unwrap(),
        other => other,
    };
    let start = (
        imp.after(&BTreeSet::from([imp.initial()]), &[], Gamma::May),
        spec.after(&BTreeSet::from([spec.initial()]), &[], Gamma::May),
    );
    let mut queue = VecDeque::from([(start.0, start.1, Vec::new())]);
    while let Some((si, ss, trace)) = queue.pop_front() {
        if si.iter().any(|&s| s != imp.failure()) {
            let out_i = imp.out_set(&si, Gamma::Must);
            let out_s = spec.out_set(&ss, Gamma::Must);
            let missing = out_s
                .observations
                .iter()
                .find(|&&o| {
                    !out_i
                        .observations
                        .iter()
                        .any(|&oi| to_spec(oi) == o)
                })
                .copied();
            if let Some(o) = missing {
                // Report in the implementation's action space.
                let o = match o {
                    Obs::In(a) => imp.obs_by_name(&spec.inputs()[a.0]).unwrap(),
                    Obs::Out(a) => imp.obs_by_name(&spec.outputs()[a.0]).unwrap(),
                    other => other,
                };
                return Ok(ConformanceVerdict {
                    holds: false,
                    counterexample: Some(trace),
                    violated_condition: Some(2),
                    offending_observation: Some(o),
                });
            }
        }
        if !ss.is_empty() {
            let out_i = imp.out_set(&si, Gamma::May);
            let out_s = spec.out_set(&ss, Gamma::May);
            let excess = out_i
                .observations
                .iter()
                .find(|&&o| !out_s.observations.contains(&to_spec(o)))
                .copied();
            if let Some(o) = excess {
                return Ok(ConformanceVerdict {
                    holds: false,
                    counterexample: Some(trace),
                    violated_condition: Some(1),
                    offending_observation: Some(o),
                });
            }
        }
        if trace.len() == depth {
            continue;
        }
        for &sym in &syms {
            let ni = imp.after(&si, &[sym], Gamma::May);
            let ns = spec.after(&ss, &[to_spec(sym)], Gamma::May);
            if ni.is_empty() && ns.is_empty() {
                continue;
            }
            let mut t = trace.clone();
            t.push(sym);
            queue.push_back((ni, ns, t));
        }
    }
    Ok(ConformanceVerdict {
        holds: true,
        counterexample: None,
        violated_condition: None,
        offending_observation: None,
    })
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("pair space too large for brute force: {pairs} pairs")]
    SizeBound { pairs: usize },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// Independent refinement decision. Small instances enumerate candidate
/// relations outright; larger ones (up to the size bound) run a naive
/// filter that recomputes every weak step on every pass.
pub fn refines_bruteforce(imp: &IrMia, spec: &IrMia) -> Result<RefinementVerdict, OracleError> {
    check_same_alphabets(imp, spec).map_err(OracleError::Relation)?;
    let pairs = imp.state_count() * spec.state_count();
    if pairs > 400 {
        return Err(OracleError::SizeBound { pairs });
    }
    if pairs <= 16 {
        return Ok(refines_subset_enum(imp, spec));
    }
    Ok(refines_naive_filter(imp, spec))
}

fn clause_ok(
    imp: &IrMia,
    spec: &IrMia,
    p: StateId,
    q: StateId,
    member: &dyn Fn(StateId, StateId) -> bool,
) -> bool {
    if p == imp.failure() {
        return true;
    }
    if q == spec.failure() {
        return false;
    }
    let imp_label = |l: Label| -> Label {
        match l {
            Label::Input(a) => Label::Input(ActionId(
                imp.inputs().iter().position(|n| n == &spec.inputs()[a.0]).unwrap(),
            )),
            Label::Output(a) => Label::Output(ActionId(
                imp.outputs().iter().position(|n| n == &spec.outputs()[a.0]).unwrap(),
            )),
            Label::Tau => Label::Tau,
        }
    };
    let spec_label = |l: Label| -> Label {
        match l {
            Label::Input(a) => Label::Input(ActionId(
                spec.inputs().iter().position(|n| n == &imp.inputs()[a.0]).unwrap(),
            )),
            Label::Output(a) => Label::Output(ActionId(
                spec.outputs().iter().position(|n| n == &imp.outputs()[a.0]).unwrap(),
            )),
            Label::Tau => Label::Tau,
        }
    };
    let input_then_eps = |aut: &IrMia, s: StateId, l: Label, g: Gamma| -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        for t in aut.strong_step(s, l, g) {
            out.extend(aut.weak_closure(t, g));
        }
        out
    };
    // Clause 2
    for e in spec.edges_from(q) {
        if e.modality == Modality::Must && e.label.is_input() && e.target != spec.failure() {
            let l = imp_label(e.label);
            let ok = input_then_eps(imp, p, l, Gamma::Must)
                .iter()
                .any(|&p2| p2 != imp.failure() && member(p2, e.target));
            if !ok {
                return false;
            }
        }
    }
    // Clause 3
    for e in spec.edges_from(q) {
        if e.modality == Modality::Must && !e.label.is_input() {
            let l = imp_label(e.label);
            let targets = match l {
                Label::Tau => imp.weak_closure(p, Gamma::Must),
                l => imp.weak_step(p, l, Gamma::Must),
            };
            if !targets.iter().any(|&p2| member(p2, e.target)) {
                return false;
            }
        }
    }
    // Clause 4
    for e in imp.edges_from(p) {
        if e.label.is_input() {
            let l = spec_label(e.label);
            if !spec.has_strong(q, l, Gamma::May) {
                continue;
            }
            let ok = input_then_eps(spec, q, l, Gamma::May)
                .iter()
                .any(|&q2| member(e.target, q2));
            if !ok {
                return false;
            }
        }
    }
    // Clause 5
    for e in spec.edges_from(q) {
        if e.label.is_input() {
            let l = imp_label(e.label);
            let ok = input_then_eps(imp, p, l, Gamma::May)
                .iter()
                .any(|&p2| member(p2, e.target));
            if !ok {
                return false;
            }
        }
    }
    // Clause 6
    for e in imp.edges_from(p) {
        if !e.label.is_input() {
            let l = spec_label(e.label);
            let targets = match l {
                Label::Tau => spec.weak_closure(q, Gamma::May),
                l => spec.weak_step(q, l, Gamma::May),
            };
            if !targets.iter().any(|&q2| member(e.target, q2)) {
                return false;
            }
        }
    }
    true
}

fn verdict(holds: bool, witness: Option<BTreeSet<(StateId, StateId)>>) -> RefinementVerdict {
    RefinementVerdict { holds, witness, counterexample: None }
}

/// Enumerate all pair subsets containing the initial pair and test each
/// against the clauses directly.
fn refines_subset_enum(imp: &IrMia, spec: &IrMia) -> RefinementVerdict {
    let np = imp.state_count();
    let nq = spec.state_count();
    let all: Vec<(StateId, StateId)> = (0..np)
        .flat_map(|p| (0..nq).map(move |q| (StateId(p), StateId(q))))
        .collect();
    let init_bit = all
        .iter()
        .position(|&(p, q)| p == imp.initial() && q == spec.initial())
        .unwrap();
    let n = all.len();
    for mask in 0u32..(1u32 << n) {
        if mask & (1 << init_bit) == 0 {
            continue;
        }
        let member = |p: StateId, q: StateId| -> bool {
            p == imp.failure()
                || all
                    .iter()
                    .position(|&x| x == (p, q))
                    .map_or(false, |i| mask & (1 << i) != 0)
        };
        let valid = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .all(|i| clause_ok(imp, spec, all[i].0, all[i].1, &member));
        if valid {
            let witness = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| all[i])
                .collect();
            return verdict(true, Some(witness));
        }
    }
    verdict(false, None)
}

/// Keep deleting violating pairs from the full candidate set, recomputing
/// every step on every pass.
fn refines_naive_filter(imp: &IrMia, spec: &IrMia) -> RefinementVerdict {
    let np = imp.state_count();
    let nq = spec.state_count();
    let mut rel: BTreeSet<(StateId, StateId)> = (0..np)
        .flat_map(|p| (0..nq).map(move |q| (StateId(p), StateId(q))))
        .collect();
    loop {
        let snapshot = rel.clone();
        let member = |p: StateId, q: StateId| snapshot.contains(&(p, q));
        let next: BTreeSet<(StateId, StateId)> = snapshot
            .iter()
            .filter(|&&(p, q)| clause_ok(imp, spec, p, q, &member))
            .copied()
            .collect();
        let done = next == rel;
        rel = next;
        if done {
            break;
        }
    }
    let holds = rel.contains(&(imp.initial(), spec.initial()));
    verdict(holds, if holds { Some(rel) } else { None })
}

/// Target input-enabledness of generated automata.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnablednessGoal {
    StrongMay,
    StrongMust,
}

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Inclusive range for the number of ordinary states.
    pub states: (usize, usize),
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    /// Probability of an edge per state/action slot.
    pub edge_prob: f64,
    /// Probability that a generated edge is mandatory.
    pub must_bias: f64,
    /// Probability of refusing an otherwise unspecified input.
    pub refusal_prob: f64,
    /// Probability of an internal step per state (always mandatory, and
    /// always forward in declaration order, so divergence cannot arise).
    pub tau_prob: f64,
    /// At most one edge per state/action slot.
    pub deterministic: bool,
    pub enabledness: Option<EnablednessGoal>,
    /// Inputs that must never be refused (used by the composition suites).
    pub no_refusal_inputs: Vec<String>,
}

impl GeneratorConfig {
    pub fn small(seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            seed,
            states: (2, 5),
            input_names: vec!["a".into(), "b".into()],
            output_names: vec!["x".into(), "y".into()],
            edge_prob: 0.55,
            must_bias: 0.6,
            refusal_prob: 0.15,
            tau_prob: 0.15,
            deterministic: false,
            enabledness: None,
            no_refusal_inputs: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible generator configuration: {reason}")]
    Infeasible { reason: String },
}

/// Seeded random automaton; the same configuration always yields the same
/// machine, and the result always validates.
pub fn random_irmia(cfg: &GeneratorConfig) -> Result<IrMia, GenError> {
    if cfg.states.0 == 0 || cfg.states.0 > cfg.states.1 {
        return Err(GenError::Infeasible { reason: "empty state range".into() });
    }
    for p in [cfg.edge_prob, cfg.must_bias, cfg.refusal_prob, cfg.tau_prob] {
        if !(0.0..=1.0).contains(&p) {
            return Err(GenError::Infeasible { reason: format!("probability {p} out of range") });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = rng.gen_range(cfg.states.0..=cfg.states.1);
    let mut raw = RawIrMia {
        name: format!("gen{}", cfg.seed),
        inputs: cfg.input_names.clone(),
        outputs: cfg.output_names.clone(),
        states: (0..n).map(|i| format!("s{i}")).collect(),
        ..Default::default()
    };
    raw.initial = "s0".into();
    raw.states.push("_PHI".into());
    raw.failure = "_PHI".into();

    let push = |raw: &mut RawIrMia, src: usize, label: RawLabel, tgt: &str, must: bool| {
        raw.edges.push(RawEdge {
            source: format!("s{src}"),
            label,
            target: tgt.to_string(),
            modality: if must { Modality::Must } else { Modality::MayOnly },
        });
    };

    for s in 0..n {
        for input in &cfg.input_names {
            let refusable = !cfg.no_refusal_inputs.contains(input);
            if rng.gen_bool(cfg.edge_prob) {
                let fanout = if cfg.deterministic || rng.gen_bool(0.7) { 1 } else { 2 };
                for _ in 0..fanout {
                    let t = rng.gen_range(0..n);
                    let must = rng.gen_bool(cfg.must_bias);
                    push(&mut raw, s, RawLabel::Input(input.clone()), &format!("s{t}"), must);
                }
            } else if refusable && rng.gen_bool(cfg.refusal_prob) {
                push(&mut raw, s, RawLabel::Input(input.clone()), "_PHI", true);
            }
        }
        for output in &cfg.output_names {
            if rng.gen_bool(cfg.edge_prob) {
                let fanout = if cfg.deterministic || rng.gen_bool(0.7) { 1 } else { 2 };
                for _ in 0..fanout {
                    let t = rng.gen_range(0..n);
                    let must = rng.gen_bool(cfg.must_bias);
                    push(&mut raw, s, RawLabel::Output(output.clone()), &format!("s{t}"), must);
                }
            }
        }
        // Internal steps only go forward in declaration order.
        if s + 1 < n && rng.gen_bool(cfg.tau_prob) {
            let t = rng.gen_range(s + 1..n);
            push(&mut raw, s, RawLabel::Tau, &format!("s{t}"), true);
        }
    }

    if let Some(goal) = cfg.enabledness {
        for s in 0..n {
            for input in cfg.input_names.clone() {
                let covered = raw.edges.iter().any(|e| {
                    e.source == format!("s{s}")
                        && e.label == RawLabel::Input(input.clone())
                        && (goal == EnablednessGoal::StrongMay || e.modality == Modality::Must)
                });
                if !covered {
                    let refused = raw.edges.iter().any(|e| {
                        e.source == format!("s{s}")
                            && e.label == RawLabel::Input(input.clone())
                            && e.target == raw.failure
                    });
                    if !refused {
                        let t = rng.gen_range(0..n);
                        let must = goal == EnablednessGoal::StrongMust;
                        push(&mut raw, s, RawLabel::Input(input.clone()), &format!("s{t}"), must);
                    }
                }
            }
        }
    }

    let aut = IrMia::from_raw(&raw)
        .unwrap_or_else(|r| panic!("generator produced an invalid automaton: {r}"));
    match cfg.enabledness {
        Some(EnablednessGoal::StrongMay) => debug_assert!(aut.input_enabledness().strong_may),
        Some(EnablednessGoal::StrongMust) => debug_assert!(aut.input_enabledness().strong_must),
        None => {}
    }
    Ok(aut)
}

/// Refinement-preserving mutation: the result always refines the input
/// (asserted). Mutations promote optional edges, drop optional outputs,
/// refuse optional inputs, implement unspecified inputs, and insert
/// mandatory internal steps behind existing edges.
pub fn random_refinement(aut: &IrMia, seed: u64) -> IrMia {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    let mut raw = aut.to_raw();
    let rounds = rng.gen_range(1..=3);
    for round in 0..rounds {
        let kind = rng.gen_range(0..5);
        match kind {
            0 => promote_optional(&mut raw, &mut rng),
            1 => drop_optional_output(&mut raw, &mut rng),
            2 => refuse_optional_input(&mut raw, &mut rng),
            3 => add_unspecified_input(&mut raw, &mut rng),
            _ => insert_internal_step(&mut raw, &mut rng, round),
        }
    }
    let refined = IrMia::from_raw(&raw)
        .unwrap_or_else(|r| panic!("refinement mutation broke validity: {r}"));
    debug_assert!(
        crate::refinement::refines(&refined, aut).expect("same alphabets").holds,
        "mutation of {} is not a refinement",
        aut.name()
    );
    refined
}

fn promote_optional(raw: &mut RawIrMia, rng: &mut ChaCha8Rng) {
    let idx: Vec<usize> = raw
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.modality == Modality::MayOnly)
        .map(|(i, _)| i)
        .collect();
    if let Some(&i) = pick(&idx, rng) {
        raw.edges[i].modality = Modality::Must;
    }
}

fn drop_optional_output(raw: &mut RawIrMia, rng: &mut ChaCha8Rng) {
    let idx: Vec<usize> = raw
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            e.modality == Modality::MayOnly && !matches!(e.label, RawLabel::Input(_))
        })
        .map(|(i, _)| i)
        .collect();
    if let Some(&i) = pick(&idx, rng) {
        raw.edges.remove(i);
    }
}

fn refuse_optional_input(raw: &mut RawIrMia, rng: &mut ChaCha8Rng) {
    // Only inputs whose edges at a state are all optional can be refused.
    let mut slots: Vec<(String, String)> = Vec::new();
    for e in &raw.edges {
        if let RawLabel::Input(n) = &e.label {
            let key = (e.source.clone(), n.clone());
            if !slots.contains(&key) {
                let all_optional = raw.edges.iter().all(|d| {
                    d.source != key.0
                        || d.label != RawLabel::Input(key.1.clone())
                        || d.modality == Modality::MayOnly
                });
                if all_optional {
                    slots.push(key);
                }
            }
        }
    }
    if let Some((state, input)) = pick(&slots, rng).cloned() {
        raw.edges.retain(|e| {
            e.source != state || e.label != RawLabel::Input(input.clone())
        });
        raw.edges.push(RawEdge {
            source: state,
            label: RawLabel::Input(input),
            target: raw.failure.clone(),
            modality: Modality::Must,
        });
    }
}

fn add_unspecified_input(raw: &mut RawIrMia, rng: &mut ChaCha8Rng) {
    let mut slots: Vec<(String, String)> = Vec::new();
    for s in &raw.states {
        if *s == raw.failure {
            continue;
        }
        for i in &raw.inputs {
            let specified = raw
                .edges
                .iter()
                .any(|e| &e.source == s && e.label == RawLabel::Input(i.clone()));
            if !specified {
                slots.push((s.clone(), i.clone()));
            }
        }
    }
    if let Some((state, input)) = pick(&slots, rng).cloned() {
        let choice = rng.gen_range(0..3);
        let ordinary: Vec<String> =
            raw.states.iter().filter(|s| **s != raw.failure).cloned().collect();
        let (target, modality) = match choice {
            0 => (ordinary[rng.gen_range(0..ordinary.len())].clone(), Modality::MayOnly),
            1 => (ordinary[rng.gen_range(0..ordinary.len())].clone(), Modality::Must),
            _ => (raw.failure.clone(), Modality::Must),
        };
        raw.edges.push(RawEdge { source: state, label: RawLabel::Input(input), target, modality });
    }
}

fn insert_internal_step(raw: &mut RawIrMia, rng: &mut ChaCha8Rng, round: usize) {
    // Only behind edges whose target has no inputs: inputs must stay
    // strongly enabled under refinement, so they cannot move behind an
    // internal step, and the intermediate state would otherwise be forced
    // to match them.
    let input_free = |state: &str| {
        !raw.edges
            .iter()
            .any(|e| e.source == state && matches!(e.label, RawLabel::Input(_)))
    };
    let idx: Vec<usize> = raw
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            e.label != RawLabel::Tau && e.target != raw.failure && input_free(&e.target)
        })
        .map(|(i, _)| i)
        .collect();
    let Some(&i) = pick(&idx, rng) else { return };
    let fresh = crate::model::fresh_name(&raw.states, &format!("_t{round}"));
    let old_target = raw.edges[i].target.clone();
    raw.edges[i].target = fresh.clone();
    raw.edges.push(RawEdge {
        source: fresh.clone(),
        label: RawLabel::Tau,
        target: old_target,
        modality: Modality::Must,
    });
    raw.states.push(fresh);
}

fn pick<'a, T>(items: &'a [T], rng: &mut ChaCha8Rng) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.gen_range(0..items.len())])
    }
}

/// Conformance-preserving loosening: the input always conforms to the
/// result, and also refines it (both asserted by the callers' suites).
/// Two mutations are safe against the quiescence and refusal
/// observations: allowing extra outputs into a chaos sink, and demoting a
/// mandatory output whose source keeps another mandatory output (so no
/// state becomes newly may-quiescent).
pub fn random_relaxation(aut: &IrMia, seed: u64) -> IrMia {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0c0a_50e5);
    let mut raw = aut.to_raw();
    let rounds = rng.gen_range(1..=3);
    let mut chaos: Option<String> = None;
    for _ in 0..rounds {
        if rng.gen_bool(0.5) {
            // Demote a mandatory output at a state that keeps at least one
            // other strong mandatory output.
            let idx: Vec<usize> = raw
                .edges
                .iter()
                .enumerate()
                .filter(|(i, e)| {
                    e.modality == Modality::Must
                        && matches!(e.label, RawLabel::Output(_))
                        && raw.edges.iter().enumerate().any(|(j, d)| {
                            j != *i
                                && d.source == e.source
                                && d.modality == Modality::Must
                                && matches!(d.label, RawLabel::Output(_))
                        })
                })
                .map(|(i, _)| i)
                .collect();
            if let Some(&i) = pick(&idx, &mut rng) {
                raw.edges[i].modality = Modality::MayOnly;
            }
        } else if !raw.outputs.is_empty() {
            // Extra allowed output into the chaos sink.
            let z = chaos
                .get_or_insert_with(|| crate::model::fresh_name(&raw.states, "_CHAOS"))
                .clone();
            let sources: Vec<String> = raw
                .states
                .iter()
                .filter(|s| **s != raw.failure && **s != z)
                .cloned()
                .collect();
            let source = sources[rng.gen_range(0..sources.len())].clone();
            let o = raw.outputs[rng.gen_range(0..raw.outputs.len())].clone();
            raw.edges.push(RawEdge {
                source,
                label: RawLabel::Output(o),
                target: z.clone(),
                modality: Modality::MayOnly,
            });
        }
    }
    if let Some(z) = chaos {
        if raw.edges.iter().any(|e| e.target == z) {
            for o in raw.outputs.clone() {
                raw.edges.push(RawEdge {
                    source: z.clone(),
                    label: RawLabel::Output(o),
                    target: z.clone(),
                    modality: Modality::MayOnly,
                });
            }
            raw.states.push(z);
        }
    }
    let relaxed = IrMia::from_raw(&raw)
        .unwrap_or_else(|r| panic!("relaxation mutation broke validity: {r}"));
    debug_assert!(
        crate::conformance::irioco_assuming_enabled(aut, &relaxed).expect("same alphabets").holds,
        "relaxation of {} lost conformance",
        aut.name()
    );
    relaxed
}
