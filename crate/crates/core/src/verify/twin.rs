//! Twin-plant verifiers. All of them are polynomial in the model size.
//!
//! Current-state detectability needs more than the off-diagonal-cycle test.
//! A cycle through an off-diagonal pair always refutes detectability, but
//! an ambiguous estimate can also recur when every twin-plant cycle is
//! diagonal: with `1 -a-> 1`, `1 -a-> 2`, `2 -b-> 2` the estimate `{1,2}`
//! repeats on `a*` although the pair (1,2) has no synchronized successor.
//! In that situation a recurring ambiguous estimate contains exactly one
//! state `z` that loops on the recurring observation, and two distinct
//! states reached from `z` by the same observation. So the second test
//! starts three copies at a diagonal cycle pair (z,z): `z` follows
//! synchronized edges inside its own twin-plant component while the
//! remaining two copies follow twin-plant moves with the same observation.
//! Detectability is refuted iff those two copies can separate. Pumping the
//! loop of `z` then yields infinitely many ambiguous estimates, and
//! conversely a recurring ambiguous estimate yields such a separation.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automaton::StateId;
use crate::error::Result;
use crate::estimate::Estimator;
use crate::graph::{Digraph, Scc};
use crate::twin::{PairEvent, TwinPlant};
use crate::verdict::{TwinBranch, TwinCycle, TwinPairWitness, Verdict, Witness};

use super::{prognosis_spec, require_unobservable_faults, spec_pairs};

fn prefix_to(tp: &TwinPlant, dg: &Digraph<PairEvent>, v: usize) -> Vec<PairEvent> {
    dg.bfs(tp.initial().iter().copied())
        .path_to(v)
        .expect("twin-plant pairs are accessible")
        .1
}

fn pairs_of(tp: &TwinPlant, nodes: &[usize]) -> Vec<(StateId, StateId)> {
    nodes.iter().map(|&n| tp.pair(n)).collect()
}

/// Distinguishability against the model's spec pairs.
pub fn distinguishability(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let t = spec_pairs(est.model())?.clone();
    Ok(distinguishability_with(est, &t))
}

/// Violated iff a reachable twin-plant pair lies in `t`.
pub fn distinguishability_with(est: &Estimator, t: &BTreeSet<(StateId, StateId)>) -> Verdict {
    let tp = est.twin();
    let best = (0..tp.len())
        .filter(|&i| t.contains(&tp.pair(i)))
        .min_by_key(|&i| tp.pair(i));
    match best {
        None => Verdict::Holds,
        Some(i) => Verdict::Violated(Witness::TwinPair(TwinPairWitness {
            pair: tp.pair(i),
            path: prefix_to(tp, &tp.digraph(), i),
        })),
    }
}

/// Prognosability through the twin-plant distinguishability check.
pub fn prognosability(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let t = prognosis_spec(est.model())?;
    Ok(distinguishability_with(est, &t))
}

/// Current-state detectability (see the module documentation).
pub fn detectability_current(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let tp = est.twin();
    let dg = tp.digraph();
    let scc = dg.scc();
    let off_diagonal = (0..tp.len())
        .filter(|&i| {
            let (a, b) = tp.pair(i);
            a != b && scc.on_cycle(i)
        })
        .min_by_key(|&i| tp.pair(i));
    if let Some(v) = off_diagonal {
        let (nodes, cycle) = dg.shortest_cycle_through(v, |_| true).expect("on cycle");
        return Ok(Verdict::Violated(Witness::TwinCycle(TwinCycle {
            prefix: prefix_to(tp, &dg, v),
            cycle,
            nodes: pairs_of(tp, &nodes),
            branch: None,
        })));
    }
    let mut loops: Vec<usize> = (0..tp.len())
        .filter(|&i| {
            let (a, b) = tp.pair(i);
            a == b && scc.on_cycle(i)
        })
        .collect();
    loops.sort_by_key(|&i| tp.pair(i));
    for z in loops {
        if let Some(w) = separation_from(tp, &dg, &scc, z) {
            return Ok(Verdict::Violated(Witness::TwinCycle(w)));
        }
    }
    Ok(Verdict::Holds)
}

/// Searches triples (loop node, branch node) from (z, z). Returns a witness
/// whose branch ends in an off-diagonal pair.
fn separation_from(
    tp: &TwinPlant,
    dg: &Digraph<PairEvent>,
    scc: &Scc,
    z: usize,
) -> Option<TwinCycle> {
    type Node = (usize, usize);
    // parent: previous node, loop edge taken (if any), branch edge taken
    let mut parent: HashMap<Node, Option<(Node, Option<PairEvent>, PairEvent)>> = HashMap::new();
    let mut queue = VecDeque::from([(z, z)]);
    parent.insert((z, z), None);
    let mut hits: Vec<Node> = Vec::new();
    while let Some((l, b)) = queue.pop_front() {
        let (b1, b2) = tp.pair(b);
        if b1 != b2 {
            hits.push((l, b));
            continue;
        }
        let mut push = |next: Node, via: Option<PairEvent>, ev: PairEvent| {
            if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(next) {
                slot.insert(Some(((l, b), via, ev)));
                queue.push_back(next);
            }
        };
        for &(ev, b_next) in tp.successors(b) {
            match ev {
                PairEvent::Both(e) => {
                    for &(lev, l_next) in tp.successors(l) {
                        if lev == PairEvent::Both(e) && scc.same(l_next, z) {
                            push((l_next, b_next), Some(lev), ev);
                        }
                    }
                }
                _ => push((l, b_next), None, ev),
            }
        }
    }
    let &(l_end, b_end) = hits.iter().min_by_key(|(_, b)| tp.pair(*b))?;

    let mut loop_nodes = vec![l_end];
    let mut loop_labels = Vec::new();
    let mut branch_nodes = vec![b_end];
    let mut branch_labels = Vec::new();
    let mut cur = (l_end, b_end);
    while let Some(Some((prev, via, ev))) = parent.get(&cur).cloned() {
        if let Some(lev) = via {
            loop_labels.push(lev);
            loop_nodes.push(prev.0);
        }
        branch_labels.push(ev);
        branch_nodes.push(prev.1);
        cur = prev;
    }
    loop_nodes.reverse();
    loop_labels.reverse();
    branch_nodes.reverse();
    branch_labels.reverse();

    // Close the loop walk back to z inside z's component.
    let (mut nodes, mut cycle) = (loop_nodes, loop_labels);
    if cycle.is_empty() {
        let (n, c) = dg
            .shortest_cycle_through(z, |v| scc.same(v, z))
            .expect("z lies on a cycle");
        nodes = n;
        cycle = c;
    } else if l_end != z {
        let back = dg
            .bfs_filtered([l_end], |_, _, w| scc.same(w, z))
            .path_to(z)
            .expect("same component");
        nodes.extend(back.0.into_iter().skip(1));
        cycle.extend(back.1);
    }
    Some(TwinCycle {
        prefix: prefix_to(tp, dg, z),
        cycle,
        nodes: pairs_of(tp, &nodes),
        branch: Some(TwinBranch {
            path: branch_labels,
            nodes: pairs_of(tp, &branch_nodes),
        }),
    })
}

/// Diagnosability: violated iff a reachable twin-plant cycle stays within
/// X_N × X_F. When the unobservable-cycle assumption is waived the cycle must
/// also contain a move other than a left-only unobservable move.
pub fn diagnosability(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let g = est.model();
    require_unobservable_faults(g)?;
    let xf = g.fault_states().expect("checked").clone();
    let tp = est.twin();
    let dg = tp.digraph();
    let keep: Vec<bool> = (0..tp.len())
        .map(|i| {
            let (a, b) = tp.pair(i);
            !xf.contains(&a) && xf.contains(&b)
        })
        .collect();
    let scc = dg.scc_filtered(|v| keep[v]);
    let caveat = est.a2_waived();

    // With the caveat, a component qualifies only through an internal edge
    // that is not a left-only unobservable move.
    let progress_edge = |v: usize| -> Option<(usize, PairEvent, usize)> {
        (0..tp.len())
            .filter(|&u| scc.same(u, v))
            .flat_map(|u| tp.successors(u).iter().map(move |&(ev, w)| (u, ev, w)))
            .find(|&(_, ev, w)| scc.same(w, v) && !matches!(ev, PairEvent::Left(_)))
    };
    let best = (0..tp.len())
        .filter(|&v| keep[v] && scc.on_cycle(v))
        .filter(|&v| !caveat || progress_edge(v).is_some())
        .min_by_key(|&v| tp.pair(v));
    let Some(v) = best else {
        return Ok(Verdict::Holds);
    };
    let (nodes, cycle) = if caveat {
        let (u, ev, w) = progress_edge(v).expect("filtered");
        let scc = &scc;
        let inside = move |_: usize, _: &PairEvent, x: usize| scc.same(x, v);
        let (mut nodes, mut labels) = dg
            .bfs_filtered([v], inside)
            .path_to(u)
            .expect("same component");
        let back = dg
            .bfs_filtered([w], inside)
            .path_to(v)
            .expect("same component");
        labels.push(ev);
        labels.extend(back.1);
        nodes.extend(back.0);
        (nodes, labels)
    } else {
        dg.shortest_cycle_through(v, |x| keep[x]).expect("on cycle")
    };
    Ok(Verdict::Violated(Witness::TwinCycle(TwinCycle {
        prefix: prefix_to(tp, &dg, v),
        cycle,
        nodes: pairs_of(tp, &nodes),
        branch: None,
    })))
}
