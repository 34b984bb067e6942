//! Modal refinement between two automata over the same alphabets.
//!
//! A relation between implementation and specification states witnesses
//! refinement when, at every related pair with a non-failure
//! implementation state:
//!
//! 1. the specification state is not the failure state;
//! 2. a mandatory specification input is matched by a strong mandatory
//!    input step (then internal mandatory steps) to a non-failure state;
//! 3. a mandatory specification output or internal step is matched weakly
//!    in the must relation;
//! 4. an allowed implementation input that the specification also enables
//!    is matched by an allowed specification step;
//! 5. an allowed specification input is matched by an allowed
//!    implementation step, possibly into the failure state (the input is
//!    then refused);
//! 6. an allowed implementation output or internal step is matched weakly
//!    in the may relation.
//!
//! The check computes the largest such relation by pruning the full
//! candidate set to a fixpoint. Pairs whose implementation side is the
//! failure state satisfy everything trivially and are never pruned.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    check_same_alphabets, ActionId, Gamma, IrMia, Label, Modality, RelationError, StateId,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementCounterexample {
    pub impl_state: String,
    pub spec_state: String,
    /// Violated clause, 1 through 6.
    pub clause: u8,
    /// Rendered offending action (`?a`, `!b`, `tau`), absent for clause 1.
    pub action: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RefinementVerdict {
    pub holds: bool,
    /// The largest refinement relation, when the check succeeds.
    pub witness: Option<BTreeSet<(StateId, StateId)>>,
    pub counterexample: Option<RefinementCounterexample>,
}

struct Steps {
    /// Strong step then internal closure, per modality: the arrow shape of
    /// the input clauses.
    input_then_eps: [Vec<BTreeMap<ActionId, BTreeSet<StateId>>>; 2],
    /// Fully weak steps for outputs, per modality.
    weak_out: [Vec<BTreeMap<ActionId, BTreeSet<StateId>>>; 2],
    /// Internal closure, per modality.
    eps: [Vec<BTreeSet<StateId>>; 2],
}

fn slot(gamma: Gamma) -> usize {
    match gamma {
        Gamma::May => 0,
        Gamma::Must => 1,
    }
}

impl Steps {
    fn new(aut: &IrMia) -> Steps {
        let n = aut.state_count();
        let mut input_then_eps = [vec![BTreeMap::new(); n], vec![BTreeMap::new(); n]];
        let mut weak_out = [vec![BTreeMap::new(); n], vec![BTreeMap::new(); n]];
        let mut eps = [vec![BTreeSet::new(); n], vec![BTreeSet::new(); n]];
        for (g, gamma) in [(0, Gamma::May), (1, Gamma::Must)] {
            for s in (0..n).map(StateId) {
                eps[g][s.0] = aut.weak_closure(s, gamma);
                for a in (0..aut.inputs().len()).map(ActionId) {
                    let strong = aut.strong_step(s, Label::Input(a), gamma);
                    if !strong.is_empty() {
                        let mut targets = BTreeSet::new();
                        for t in strong {
                            targets.extend(aut.weak_closure(t, gamma));
                        }
                        input_then_eps[g][s.0].insert(a, targets);
                    }
                }
                for a in (0..aut.outputs().len()).map(ActionId) {
                    let weak = aut.weak_step(s, Label::Output(a), gamma);
                    if !weak.is_empty() {
                        weak_out[g][s.0].insert(a, weak);
                    }
                }
            }
        }
        Steps { input_then_eps, weak_out, eps }
    }

    fn input_step(&self, s: StateId, a: ActionId, gamma: Gamma) -> Option<&BTreeSet<StateId>> {
        self.input_then_eps[slot(gamma)][s.0].get(&a)
    }
    fn weak_hat(&self, s: StateId, l: Label, gamma: Gamma) -> Option<&BTreeSet<StateId>> {
        match l {
            Label::Output(a) => self.weak_out[slot(gamma)][s.0].get(&a),
            Label::Tau => Some(&self.eps[slot(gamma)][s.0]),
            Label::Input(_) => None,
        }
    }
}

/// Translation of action ids between two automata with equal alphabets but
/// possibly different declaration orders.
struct ActionBridge {
    spec_to_imp_in: Vec<ActionId>,
    spec_to_imp_out: Vec<ActionId>,
    imp_to_spec_in: Vec<ActionId>,
    imp_to_spec_out: Vec<ActionId>,
}

impl ActionBridge {
    fn new(imp: &IrMia, spec: &IrMia) -> ActionBridge {
        let pos = |names: &[String], n: &str| {
            ActionId(names.iter().position(|m| m == n).expect("alphabets checked equal"))
        };
        ActionBridge {
            spec_to_imp_in: spec.inputs().iter().map(|n| pos(imp.inputs(), n)).collect(),
            spec_to_imp_out: spec.outputs().iter().map(|n| pos(imp.outputs(), n)).collect(),
            imp_to_spec_in: imp.inputs().iter().map(|n| pos(spec.inputs(), n)).collect(),
            imp_to_spec_out: imp.outputs().iter().map(|n| pos(spec.outputs(), n)).collect(),
        }
    }
    fn to_imp(&self, l: Label) -> Label {
        match l {
            Label::Input(a) => Label::Input(self.spec_to_imp_in[a.0]),
            Label::Output(a) => Label::Output(self.spec_to_imp_out[a.0]),
            Label::Tau => Label::Tau,
        }
    }
    fn to_spec(&self, l: Label) -> Label {
        match l {
            Label::Input(a) => Label::Input(self.imp_to_spec_in[a.0]),
            Label::Output(a) => Label::Output(self.imp_to_spec_out[a.0]),
            Label::Tau => Label::Tau,
        }
    }
}

/// A clause violation at a pair: which clause, the offending action
/// (implementation-side label), and the witness pairs the clause demanded.
/// The violation means every demanded pair was already pruned (or there
/// were none at all).
struct Fault {
    clause: u8,
    label: Option<Label>,
    demanded: Vec<(StateId, StateId)>,
}

/// Decide whether `imp` refines `spec`, returning the largest witness
/// relation or a counterexample pair with the violated clause.
pub fn refines(imp: &IrMia, spec: &IrMia) -> Result<RefinementVerdict, RelationError> {
    check_same_alphabets(imp, spec)?;
    let bridge = ActionBridge::new(imp, spec);

    let np = imp.state_count();
    let nq = spec.state_count();
    let steps_p = Steps::new(imp);
    let steps_q = Steps::new(spec);

    let idx = |p: StateId, q: StateId| p.0 * nq + q.0;
    let mut alive = vec![true; np * nq];
    // prune_time[pair] = sequence number of its removal; time 0 is
    // reserved for the clause 1 exclusions below.
    let mut prune_time = vec![usize::MAX; np * nq];
    let mut fault: Vec<Option<Fault>> = (0..np * nq).map(|_| None).collect();

    for p in (0..np).map(StateId) {
        if p != imp.failure() {
            let i = idx(p, spec.failure());
            alive[i] = false;
            prune_time[i] = 0;
            fault[i] = Some(Fault { clause: 1, label: None, demanded: Vec::new() });
        }
    }

    let mut clock = 1;
    loop {
        let mut changed = false;
        for p in (0..np).map(StateId) {
            if p == imp.failure() {
                continue;
            }
            for q in (0..nq).map(StateId) {
                let i = idx(p, q);
                if !alive[i] {
                    continue;
                }
                if let Some(f) =
                    violation(imp, spec, p, q, &steps_p, &steps_q, &alive, idx, &bridge)
                {
                    alive[i] = false;
                    prune_time[i] = clock;
                    clock += 1;
                    fault[i] = Some(f);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let initial = (imp.initial(), spec.initial());
    if alive[idx(initial.0, initial.1)] {
        let witness: BTreeSet<(StateId, StateId)> = (0..np)
            .flat_map(|p| (0..nq).map(move |q| (StateId(p), StateId(q))))
            .filter(|&(p, q)| alive[idx(p, q)])
            .collect();
        return Ok(RefinementVerdict { holds: true, witness: Some(witness), counterexample: None });
    }

    // Root-cause descent: from the initial pair, follow the demanded
    // witness pair that survived longest, until a pair fails with nothing
    // demanded at all. Prune times strictly decrease, so this terminates.
    let mut cur = initial;
    loop {
        let f = fault[idx(cur.0, cur.1)].as_ref().expect("pruned pair has a fault");
        let next = f
            .demanded
            .iter()
            .max_by_key(|&&(p, q)| prune_time[idx(p, q)])
            .copied();
        match next {
            Some(n) if prune_time[idx(n.0, n.1)] < prune_time[idx(cur.0, cur.1)] => cur = n,
            _ => break,
        }
    }
    let f = fault[idx(cur.0, cur.1)].as_ref().unwrap();
    Ok(RefinementVerdict {
        holds: false,
        witness: None,
        counterexample: Some(RefinementCounterexample {
            impl_state: imp.state_name(cur.0).to_string(),
            spec_state: spec.state_name(cur.1).to_string(),
            clause: f.clause,
            action: f.label.map(|l| imp.render_label(l)),
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn violation(
    imp: &IrMia,
    spec: &IrMia,
    p: StateId,
    q: StateId,
    steps_p: &Steps,
    steps_q: &Steps,
    alive: &[bool],
    idx: impl Fn(StateId, StateId) -> usize,
    bridge: &ActionBridge,
) -> Option<Fault> {
    let ok = |p2: StateId, q2: StateId| alive[idx(p2, q2)];

    // Clause 2: mandatory specification inputs.
    for e in spec.edges_from(q) {
        if e.modality != Modality::Must || e.target == spec.failure() {
            continue;
        }
        if let Label::Input(a_spec) = e.label {
            let a = bridge.spec_to_imp_in[a_spec.0];
            let demanded: Vec<_> = steps_p
                .input_step(p, a, Gamma::Must)
                .map(|ts| {
                    ts.iter()
                        .filter(|&&p2| p2 != imp.failure())
                        .map(|&p2| (p2, e.target))
                        .collect()
                })
                .unwrap_or_default();
            if !demanded.iter().any(|&(p2, q2)| ok(p2, q2)) {
                return Some(Fault { clause: 2, label: Some(Label::Input(a)), demanded });
            }
        }
    }

    // Clause 3: mandatory specification outputs and internal steps.
    for e in spec.edges_from(q) {
        if e.modality != Modality::Must || e.label.is_input() {
            continue;
        }
        let l = bridge.to_imp(e.label);
        let demanded: Vec<_> = steps_p
            .weak_hat(p, l, Gamma::Must)
            .map(|ts| ts.iter().map(|&p2| (p2, e.target)).collect())
            .unwrap_or_default();
        if !demanded.iter().any(|&(p2, q2)| ok(p2, q2)) {
            return Some(Fault { clause: 3, label: Some(l), demanded });
        }
    }

    // Clause 4: allowed implementation inputs the specification enables.
    for e in imp.edges_from(p) {
        if let Label::Input(a) = e.label {
            let a_spec = match bridge.to_spec(e.label) {
                Label::Input(a) => a,
                _ => unreachable!(),
            };
            if !spec.has_strong(q, Label::Input(a_spec), Gamma::May) {
                continue;
            }
            let demanded: Vec<_> = steps_q
                .input_step(q, a_spec, Gamma::May)
                .map(|ts| ts.iter().map(|&q2| (e.target, q2)).collect())
                .unwrap_or_default();
            if !demanded.iter().any(|&(p2, q2)| ok(p2, q2)) {
                return Some(Fault { clause: 4, label: Some(Label::Input(a)), demanded });
            }
        }
    }

    // Clause 5: allowed specification inputs.
    for e in spec.edges_from(q) {
        if let Label::Input(a_spec) = e.label {
            let a = bridge.spec_to_imp_in[a_spec.0];
            let demanded: Vec<_> = steps_p
                .input_step(p, a, Gamma::May)
                .map(|ts| ts.iter().map(|&p2| (p2, e.target)).collect())
                .unwrap_or_default();
            if !demanded.iter().any(|&(p2, q2)| ok(p2, q2)) {
                return Some(Fault { clause: 5, label: Some(Label::Input(a)), demanded });
            }
        }
    }

    // Clause 6: allowed implementation outputs and internal steps.
    for e in imp.edges_from(p) {
        if e.label.is_input() {
            continue;
        }
        let l_spec = bridge.to_spec(e.label);
        let demanded: Vec<_> = steps_q
            .weak_hat(q, l_spec, Gamma::May)
            .map(|ts| ts.iter().map(|&q2| (e.target, q2)).collect())
            .unwrap_or_default();
        if !demanded.iter().any(|&(p2, q2)| ok(p2, q2)) {
            return Some(Fault { clause: 6, label: Some(e.label), demanded });
        }
    }

    None
}
