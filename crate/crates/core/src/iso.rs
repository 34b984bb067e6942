//! Isomorphism on checked automata: a state bijection preserving initial
//! and failure states, alphabets, edge labels and modalities. Used to
//! compare operator outputs against expected machines and in the
//! associativity suites.

use std::collections::BTreeMap;

use crate::model::{IrMia, Label, Modality, StateId};

/// Signature key for one edge as seen from a state: direction-tagged label
/// name plus modality. Self loops are tracked separately so they prune
/// harder.
type EdgeKey = (u8, String, Modality, bool);

fn label_key(aut: &IrMia, l: Label) -> (u8, String) {
    match l {
        Label::Input(_) => (0, aut.label_name(l).to_string()),
        Label::Output(_) => (1, aut.label_name(l).to_string()),
        Label::Tau => (2, String::new()),
    }
}

fn signature(aut: &IrMia, s: StateId) -> (Vec<EdgeKey>, Vec<EdgeKey>, bool, bool) {
    let mut out: Vec<EdgeKey> = aut
        .edges_from(s)
        .map(|e| {
            let (d, n) = label_key(aut, e.label);
            (d, n, e.modality, e.source == e.target)
        })
        .collect();
    out.sort();
    let mut inc: Vec<EdgeKey> = aut
        .edges_into(s)
        .map(|e| {
            let (d, n) = label_key(aut, e.label);
            (d, n, e.modality, e.source == e.target)
        })
        .collect();
    inc.sort();
    (out, inc, s == aut.initial(), s == aut.failure())
}

/// Returns a state bijection witnessing isomorphism, as a map from states
/// of `a` to states of `b`, or `None`. The search assigns states of `a` in
/// declaration order and tries candidates from `b` in declaration order,
/// so the returned bijection is deterministic; for identical automata it
/// is the identity.
pub fn isomorphic(a: &IrMia, b: &IrMia) -> Option<BTreeMap<StateId, StateId>> {
    if a.state_count() != b.state_count() || a.edges().len() != b.edges().len() {
        return None;
    }
    let same_set = |x: &[String], y: &[String]| {
        let mut x: Vec<_> = x.to_vec();
        let mut y: Vec<_> = y.to_vec();
        x.sort();
        y.sort();
        x == y
    };
    if !same_set(a.inputs(), b.inputs()) || !same_set(a.outputs(), b.outputs()) {
        return None;
    }

    let n = a.state_count();
    let sig_a: Vec<_> = (0..n).map(|i| signature(a, StateId(i))).collect();
    let sig_b: Vec<_> = (0..n).map(|i| signature(b, StateId(i))).collect();

    // Adjacency keyed by (label direction, name, modality) for the
    // incremental consistency check.
    let adj = |aut: &IrMia| -> BTreeMap<(usize, u8, String, Modality), Vec<usize>> {
        let mut m: BTreeMap<(usize, u8, String, Modality), Vec<usize>> = BTreeMap::new();
        for e in aut.edges() {
            let (d, name) = label_key(aut, e.label);
            m.entry((e.source.0, d, name, e.modality)).or_default().push(e.target.0);
        }
        for v in m.values_mut() {
            v.sort_unstable();
        }
        m
    };
    let adj_a = adj(a);
    let adj_b = adj(b);

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn consistent(
        map: &[usize],
        adj_a: &BTreeMap<(usize, u8, String, Modality), Vec<usize>>,
        adj_b: &BTreeMap<(usize, u8, String, Modality), Vec<usize>>,
        just: usize,
    ) -> bool {
        // Every a-edge between already-mapped states must exist in b with
        // the same key, and symmetrically by cardinality (edge counts are
        // equal overall and the final check covers the rest).
        for ((src, d, name, m), targets) in adj_a {
            if map[*src] == usize::MAX {
                continue;
            }
            if *src != just && !targets.contains(&just) {
                continue;
            }
            let image = adj_b.get(&(map[*src], *d, name.clone(), *m));
            for &t in targets {
                if map[t] != usize::MAX && !image.map_or(false, |v| v.contains(&map[t])) {
                    return false;
                }
            }
        }
        true
    }

    fn assign(
        i: usize,
        n: usize,
        sig_a: &[(Vec<EdgeKey>, Vec<EdgeKey>, bool, bool)],
        sig_b: &[(Vec<EdgeKey>, Vec<EdgeKey>, bool, bool)],
        adj_a: &BTreeMap<(usize, u8, String, Modality), Vec<usize>>,
        adj_b: &BTreeMap<(usize, u8, String, Modality), Vec<usize>>,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] || sig_a[i] != sig_b[cand] {
                continue;
            }
            map[i] = cand;
            used[cand] = true;
            if consistent(map, adj_a, adj_b, i)
                && assign(i + 1, n, sig_a, sig_b, adj_a, adj_b, map, used)
            {
                return true;
            }
            map[i] = usize::MAX;
            used[cand] = false;
        }
        false
    }

    if !assign(0, n, &sig_a, &sig_b, &adj_a, &adj_b, &mut map, &mut used) {
        return None;
    }

    // Full edge check: the set of mapped a-edges must equal b's edge set.
    let mut mapped: Vec<(usize, u8, String, Modality, usize)> = a
        .edges()
        .iter()
        .map(|e| {
            let (d, name) = label_key(a, e.label);
            (map[e.source.0], d, name, e.modality, map[e.target.0])
        })
        .collect();
    mapped.sort();
    let mut bs: Vec<(usize, u8, String, Modality, usize)> = b
        .edges()
        .iter()
        .map(|e| {
            let (d, name) = label_key(b, e.label);
            (e.source.0, d, name, e.modality, e.target.0)
        })
        .collect();
    bs.sort();
    if mapped != bs {
        return None;
    }

    Some(map.into_iter().enumerate().map(|(i, j)| (StateId(i), StateId(j))).collect())
}
