//! Independent replay of witnesses.
//!
//! Trace witnesses are re-run through the estimator; cycle witnesses are
//! walked edge by edge in the structure they claim to live in. A witness
//! passes only if it is structurally valid and actually exhibits a violation
//! of the property it was produced for.

use std::collections::BTreeSet;

use crate::automaton::{project, EventId, StateId, StateSet};
use crate::estimate::{EstimateKind, Estimator};
use crate::twin::PairEvent;
use crate::verdict::{
    DiagnoserCycle, LassoWitness, ObserverCycle, ObserverVariant, RunLassoWitness, TwinCycle,
    Witness,
};

use super::{prognosis_spec, Property};

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cat(a: &[EventId], b: &[EventId]) -> Vec<EventId> {
    a.iter().chain(b).copied().collect()
}

/// Replays `witness` and checks that it demonstrates a violation of
/// `property` on the estimator's model.
pub fn check(est: &Estimator, property: Property, witness: &Witness) -> Check {
    let g = est.model();
    match (property, witness) {
        (Property::DetectabilityCurrent, Witness::ObserverCycle(c))
            if c.variant == ObserverVariant::Forward =>
        {
            observer_cycle(est, c)?;
            ensure(c.estimates.iter().any(|q| q.len() > 1), || {
                "no ambiguous estimate on the cycle".into()
            })
        }
        (Property::DetectabilityCurrent, Witness::TwinCycle(c)) => {
            twin_cycle(est, c)?;
            let off = |p: &(StateId, StateId)| p.0 != p.1;
            match &c.branch {
                None => ensure(c.nodes.iter().any(off), || "cycle is diagonal".into()),
                Some(b) => ensure(b.nodes.last().is_some_and(off), || {
                    "branch does not separate".into()
                }),
            }
        }
        (Property::DetectabilityCurrent, Witness::Lasso(l)) if l.kind == EstimateKind::Current => {
            lasso(est, l)?;
            let e = est
                .current(&cat(&l.stem, &l.tail))
                .map_err(|e| e.to_string())?;
            ensure(e.states.len() > 1, || {
                "estimate on the loop is a singleton".into()
            })
        }
        (Property::DetectabilityInitial, Witness::ObserverCycle(c))
            if c.variant == ObserverVariant::Augmented =>
        {
            observer_cycle(est, c)?;
            ensure(c.estimates.iter().any(|q| q.len() > 1), || {
                "no ambiguous initial estimate on the cycle".into()
            })
        }
        (Property::DetectabilityInitial, Witness::Lasso(l)) if l.kind == EstimateKind::Initial => {
            lasso(est, l)?;
            let e = est
                .initial_aug(&cat(&l.stem, &l.cycle))
                .map_err(|e| e.to_string())?;
            ensure(e.states.len() > 1, || {
                "initial estimate is a singleton".into()
            })
        }
        (Property::DetectabilityDelayed { k1, k2 }, Witness::Smoothing(w)) => {
            smoothing(est, w)?;
            ensure(w.alpha.len() >= k1 && w.beta.len() >= k2, || {
                "observations shorter than the delays".into()
            })?;
            ensure(w.delayed().len() > 1, || {
                "delayed estimate is a singleton".into()
            })
        }
        (Property::Diagnosability, Witness::DiagnoserCycle(c)) => diagnoser_cycle(est, c),
        (Property::Diagnosability, Witness::TwinCycle(c)) => {
            twin_cycle(est, c)?;
            let xf = g.fault_states().ok_or("no fault partition")?;
            ensure(
                c.nodes
                    .iter()
                    .all(|(a, b)| !xf.contains(a) && xf.contains(b)),
                || "cycle leaves X_N × X_F".into(),
            )
        }
        (Property::Diagnosability, Witness::RunLasso(r)) => run_lasso(est, r),
        (Property::Distinguishability | Property::Prognosability, w) => {
            let t = if property == Property::Prognosability {
                prognosis_spec(g).map_err(|e| e.to_string())?
            } else {
                g.spec_pairs().cloned().ok_or("no spec pairs")?
            };
            pair_in_estimate(est, property, &t, w)
        }
        (Property::OpacityCurrent, Witness::Observation(w)) if w.kind == EstimateKind::Current => {
            let e = est.current(&w.trace).map_err(|e| e.to_string())?;
            ensure(e.states == w.estimate, || "estimate does not replay".into())?;
            ensure(e.states.is_subset(g.secret().ok_or("no secret")?), || {
                "estimate is not inside the secret".into()
            })
        }
        (Property::OpacityInitial, Witness::Observation(w)) if w.kind == EstimateKind::Initial => {
            let e = est.initial_aug(&w.trace).map_err(|e| e.to_string())?;
            ensure(e.states == w.estimate, || "estimate does not replay".into())?;
            ensure(
                !e.states.is_empty() && e.states.is_subset(g.secret().ok_or("no secret")?),
                || "initial estimate is not inside the secret".into(),
            )
        }
        (Property::OpacityInfinite, Witness::Smoothing(w)) => {
            smoothing(est, w)?;
            let d = w.delayed();
            ensure(
                !d.is_empty() && d.is_subset(g.secret().ok_or("no secret")?),
                || "delayed estimate is not inside the secret".into(),
            )
        }
        (p, w) => Err(format!("witness kind {:?} does not apply to {p}", w.kind())),
    }
}

fn observer_cycle(est: &Estimator, c: &ObserverCycle) -> Check {
    ensure(!c.cycle.is_empty(), || "empty cycle".into())?;
    ensure(c.estimates.len() == c.cycle.len() + 1, || {
        "length mismatch".into()
    })?;
    ensure(c.estimates.first() == c.estimates.last(), || {
        "cycle is not closed".into()
    })?;
    let (obs, start) = match c.variant {
        ObserverVariant::Forward => {
            let obs = est.observer();
            (obs, obs.walk(obs.initial(), &c.prefix))
        }
        ObserverVariant::Augmented => {
            let obs = &est.augmented().observer;
            (obs, obs.walk(obs.initial(), &c.prefix))
        }
    };
    let start = start.map_err(|_| "prefix is not generable".to_string())?;
    let end = obs
        .walk(start, &c.cycle)
        .map_err(|_| "cycle is not generable".to_string())?;
    ensure(start == end, || "cycle does not return to its start".into())?;
    for i in 0..=c.cycle.len() {
        let trace = cat(&c.prefix, &c.cycle[..i]);
        let e = match c.variant {
            ObserverVariant::Forward => est.current(&trace),
            ObserverVariant::Augmented => est.initial_aug(&trace),
        }
        .map_err(|e| e.to_string())?;
        ensure(e.states == c.estimates[i], || {
            format!("estimate {i} does not replay")
        })?;
    }
    Ok(())
}

fn diagnoser_cycle(est: &Estimator, c: &DiagnoserCycle) -> Check {
    let g = est.model();
    let xf = g.fault_states().ok_or("no fault partition")?;
    ensure(!c.cycle.is_empty(), || "empty cycle".into())?;
    ensure(c.nodes.len() == c.cycle.len() + 1, || {
        "length mismatch".into()
    })?;
    ensure(c.nodes.first() == c.nodes.last(), || {
        "cycle is not closed".into()
    })?;
    let reached = g
        .extended_step(g.initial(), &c.prefix)
        .map_err(|e| e.to_string())?;
    let (x0, q0) = &c.nodes[0];
    ensure(reached.contains(x0), || {
        "prefix does not reach the cycle".into()
    })?;
    let obs = project(&c.prefix, g.alphabet()).map_err(|e| e.to_string())?;
    let e = est.current(&obs).map_err(|e| e.to_string())?;
    ensure(&e.states == q0, || {
        "estimate at the cycle does not replay".into()
    })?;
    for (i, &ev) in c.cycle.iter().enumerate() {
        let (x, q) = &c.nodes[i];
        let (y, r) = &c.nodes[i + 1];
        ensure(g.successors(*x, ev).is_some_and(|s| s.contains(y)), || {
            format!("step {i} is not a transition of the model")
        })?;
        let expect = if g.alphabet().is_observable(ev) {
            g.observable_step(q, ev)
        } else {
            q.clone()
        };
        ensure(&expect == r, || format!("step {i} is not an observer move"))?;
    }
    ensure(
        c.nodes
            .iter()
            .any(|(x, q)| xf.contains(x) && !q.is_subset(xf)),
        || "cycle is not indeterminate".into(),
    )
}

fn twin_step(
    est: &Estimator,
    from: (StateId, StateId),
    ev: PairEvent,
) -> BTreeSet<(StateId, StateId)> {
    let g = est.model();
    let succ = |x: StateId, e: EventId| g.successors(x, e).cloned().unwrap_or_default();
    let a = g.alphabet();
    match ev {
        PairEvent::Both(e) if a.is_observable(e) => succ(from.0, e)
            .iter()
            .flat_map(|&y1| succ(from.1, e).into_iter().map(move |y2| (y1, y2)))
            .collect(),
        PairEvent::Left(e) if !a.is_observable(e) => {
            succ(from.0, e).into_iter().map(|y| (y, from.1)).collect()
        }
        PairEvent::Right(e) if !a.is_observable(e) => {
            succ(from.1, e).into_iter().map(|y| (from.0, y)).collect()
        }
        _ => BTreeSet::new(),
    }
}

fn twin_path(
    est: &Estimator,
    start: (StateId, StateId),
    path: &[PairEvent],
    nodes: &[(StateId, StateId)],
) -> Check {
    ensure(nodes.len() == path.len() + 1, || "length mismatch".into())?;
    ensure(nodes[0] == start, || "path starts elsewhere".into())?;
    for (i, &ev) in path.iter().enumerate() {
        ensure(twin_step(est, nodes[i], ev).contains(&nodes[i + 1]), || {
            format!("step {i} is not a twin-plant move")
        })?;
    }
    Ok(())
}

fn twin_reach(est: &Estimator, path: &[PairEvent]) -> BTreeSet<(StateId, StateId)> {
    let g = est.model();
    let mut cur: BTreeSet<_> = g
        .initial()
        .iter()
        .flat_map(|&a| g.initial().iter().map(move |&b| (a, b)))
        .collect();
    for &ev in path {
        cur = cur.iter().flat_map(|&p| twin_step(est, p, ev)).collect();
    }
    cur
}

fn twin_cycle(est: &Estimator, c: &TwinCycle) -> Check {
    ensure(!c.cycle.is_empty(), || "empty cycle".into())?;
    ensure(c.nodes.first() == c.nodes.last(), || {
        "cycle is not closed".into()
    })?;
    ensure(twin_reach(est, &c.prefix).contains(&c.nodes[0]), || {
        "prefix does not reach the cycle".into()
    })?;
    twin_path(est, c.nodes[0], &c.cycle, &c.nodes)?;
    if let Some(b) = &c.branch {
        twin_path(est, c.nodes[0], &b.path, &b.nodes)?;
        let loop_obs: Vec<EventId> = c.cycle.iter().filter_map(|e| e.observation()).collect();
        let branch_obs: Vec<EventId> = b.path.iter().filter_map(|e| e.observation()).collect();
        ensure(!loop_obs.is_empty(), || "cycle shows no observation".into())?;
        let pumped = loop_obs.iter().cycle().take(branch_obs.len());
        ensure(branch_obs.iter().eq(pumped), || {
            "branch observation does not follow the cycle".into()
        })?;
        ensure(c.nodes.iter().all(|(a, b)| a == b), || {
            "loop is not diagonal".into()
        })?;
    }
    Ok(())
}

fn smoothing(est: &Estimator, w: &crate::verdict::SmoothingWitness) -> Check {
    let cur = est.current(&w.alpha).map_err(|e| e.to_string())?;
    ensure(cur.states == w.current, || {
        "current estimate does not replay".into()
    })?;
    ensure(est.reversed_estimate(&w.beta) == w.reversed, || {
        "reversed estimate does not replay".into()
    })?;
    let d = est.delayed(&w.alpha, &w.beta).map_err(|e| e.to_string())?;
    ensure(d.states == w.delayed(), || {
        "delayed estimate does not replay".into()
    })
}

fn lasso(est: &Estimator, l: &LassoWitness) -> Check {
    ensure(!l.cycle.is_empty(), || "empty loop".into())?;
    ensure(
        l.cycle.starts_with(&l.tail) && l.tail.len() < l.cycle.len(),
        || "tail is not a proper prefix of the loop".into(),
    )?;
    let pumped = cat(&l.stem, &l.cycle);
    let same = match l.kind {
        EstimateKind::Initial => {
            let aug = &est.augmented().observer;
            let a = aug.walk(aug.initial(), &l.stem);
            let b = aug.walk(aug.initial(), &pumped);
            a.is_ok() && a == b
        }
        _ => {
            let a = est.locate(&l.stem).map_err(|e| e.to_string())?;
            let b = est.locate(&pumped).map_err(|e| e.to_string())?;
            a == b
        }
    };
    ensure(same, || "loop changes the estimate".into())
}

fn run_lasso(est: &Estimator, r: &RunLassoWitness) -> Check {
    let g = est.model();
    let xf = g.fault_states().ok_or("no fault partition")?;
    ensure(!r.cycle.is_empty(), || "empty loop".into())?;
    ensure(xf.contains(&r.state), || "loop state is not faulty".into())?;
    let reached = g
        .extended_step(g.initial(), &r.stem)
        .map_err(|e| e.to_string())?;
    ensure(reached.contains(&r.state), || {
        "stem does not reach the loop".into()
    })?;
    let back = g
        .extended_step(&StateSet::from([r.state]), &r.cycle)
        .map_err(|e| e.to_string())?;
    ensure(back.contains(&r.state), || "loop does not return".into())?;
    let a = project(&r.stem, g.alphabet()).map_err(|e| e.to_string())?;
    let b = project(&cat(&r.stem, &r.cycle), g.alphabet()).map_err(|e| e.to_string())?;
    ensure(b.len() > a.len(), || "loop is unobservable".into())?;
    let ea = est.current(&a).map_err(|e| e.to_string())?;
    let eb = est.current(&b).map_err(|e| e.to_string())?;
    ensure(ea == eb, || "loop changes the estimate".into())?;
    ensure(!ea.states.is_subset(xf), || {
        "estimate is certain of the fault".into()
    })
}

fn pair_in_estimate(
    est: &Estimator,
    property: Property,
    t: &BTreeSet<(StateId, StateId)>,
    w: &Witness,
) -> Check {
    let g = est.model();
    match w {
        Witness::StatePair(p) => {
            let e = est.current(&p.trace).map_err(|e| e.to_string())?;
            ensure(e.states == p.estimate, || "estimate does not replay".into())?;
            ensure(t.contains(&p.pair), || {
                "pair is not in the specification".into()
            })?;
            ensure(
                e.states.contains(&p.pair.0) && e.states.contains(&p.pair.1),
                || "pair is not inside the estimate".into(),
            )
        }
        Witness::TwinPair(p) => {
            ensure(twin_reach(est, &p.path).contains(&p.pair), || {
                "path does not reach the pair".into()
            })?;
            ensure(t.contains(&p.pair), || {
                "pair is not in the specification".into()
            })
        }
        Witness::Run(r) if property == Property::Prognosability => {
            // Every prefix leaves the fault uncertain, yet the string reaches a
            // boundary state.
            let boundary = crate::fault::boundary_states(g).map_err(|e| e.to_string())?;
            let indicators = crate::fault::indicator_states(g).map_err(|e| e.to_string())?;
            let end = g
                .extended_step(g.initial(), &r.string)
                .map_err(|e| e.to_string())?;
            ensure(end.iter().any(|x| boundary.contains(x)), || {
                "string does not reach a boundary state".into()
            })?;
            let (_, xn) = crate::fault::fault_annotations(g).map_err(|e| e.to_string())?;
            for k in 0..=r.string.len() {
                let obs = project(&r.string[..k], g.alphabet()).map_err(|e| e.to_string())?;
                let e = est.current(&obs).map_err(|e| e.to_string())?;
                ensure(
                    !e.states.intersection(&xn).all(|x| indicators.contains(x)),
                    || format!("prefix of length {k} already predicts the fault"),
                )?;
            }
            Ok(())
        }
        other => Err(format!(
            "witness kind {:?} does not apply to {property}",
            other.kind()
        )),
    }
}
