//! Constructive search for a C1 descendant of a non-coregular setting.
//!
//! After RI–RIII reduction pick a factor that is not one of the coregular
//! shapes. If its largest dimension is at least 2, the local quiver of
//! `(α − ε_v) + ε_v` has two one-dimensional vertices with at least two
//! arrows each way. Otherwise either some primitive cycle misses a vertex,
//! and gluing its vertex set gives a smaller non-coregular local quiver, or
//! every cycle is Hamiltonian and the quiver is a cycle with multiplied
//! edges, which contracts onto C1.

use serde::Serialize;

use super::{coregular_shape, TargetName, Witness};
use crate::cycles::primitive_cycles;
use crate::error::{Error, Result};
use crate::local::{glue_at, local_quiver, Decomposition};
use crate::quiver::QuiverSetting;
use crate::reductions::{reduce_with, ri_at, ri_ok, ReduceOptions};
use crate::trace::{ReductionTrace, StepKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ObstructionOutcome {
    /// Every reduced factor is coregular.
    NoObstruction,
    Witness(Witness),
    Inconclusive { reason: String },
}

fn extend(trace: &mut ReductionTrace, more: &ReductionTrace) {
    for s in more.steps() {
        trace.push(s.kind.clone(), s.before.clone(), s.after.clone(), s.free_vars);
    }
}

fn push_step(trace: &mut ReductionTrace, kind: StepKind, before: &QuiverSetting) -> Result<QuiverSetting> {
    let (after, free) = kind.apply(before)?;
    trace.push(kind, before.clone(), after.clone(), free);
    Ok(after)
}

/// Deletes loops and surplus arrows of a two-vertex setting so that exactly
/// two arrows remain each way. `None` if either direction has fewer than two.
fn cut_to_c1(trace: &mut ReductionTrace, q: &QuiverSetting) -> Result<Option<QuiverSetting>> {
    if q.vertex_count() != 2 || q.arrow_multiplicity(0, 1) < 2 || q.arrow_multiplicity(1, 0) < 2 {
        return Ok(None);
    }
    let mut kept = [0u32; 2];
    let mut drop = Vec::new();
    for a in q.arrows() {
        if a.is_loop() || kept[a.source] == 2 {
            drop.push(a.id.clone());
        } else {
            kept[a.source] += 1;
        }
    }
    if drop.is_empty() {
        return Ok(Some(q.clone()));
    }
    let kind = StepKind::Subquiver {
        drop_arrows: drop,
        drop_vertices: Vec::new(),
    };
    Ok(Some(push_step(trace, kind, q)?))
}

enum Found {
    Trace(ReductionTrace),
    Nothing,
    Stuck(String),
}

fn search(prefix: ReductionTrace, current: &QuiverSetting) -> Result<Found> {
    let outcome = reduce_with(current, &ReduceOptions::invariant_ring())?;
    let Some(factor) = outcome.factors.iter().find(|f| coregular_shape(&f.terminal).is_none()) else {
        return Ok(Found::Nothing);
    };
    let mut trace = prefix;
    extend(&mut trace, &factor.trace);
    let t = factor.terminal.clone();
    let max_dim = (0..t.vertex_count()).map(|v| t.dim(v)).max().unwrap_or(0);

    if max_dim >= 2 {
        for v in (0..t.vertex_count()).filter(|&v| t.dim(v) == max_dim) {
            let rest: Vec<u32> = (0..t.vertex_count())
                .map(|w| t.dim(w) - u32::from(w == v))
                .collect();
            let single: Vec<u32> = (0..t.vertex_count()).map(|w| u32::from(w == v)).collect();
            let d = Decomposition::from_vectors(&t, &[(1, rest), (1, single)]);
            let Ok(local) = local_quiver(&t, &d) else { continue };
            let mut attempt = trace.clone();
            attempt.push(StepKind::Local { decomposition: d }, t.clone(), local.clone(), 0);
            if cut_to_c1(&mut attempt, &local)?.is_some() {
                return Ok(Found::Trace(attempt));
            }
        }
        return Ok(Found::Stuck(
            "no (α − ε_v) + ε_v local quiver contains two arrows each way".into(),
        ));
    }

    let n = t.vertex_count();
    if n == 2 {
        return Ok(match cut_to_c1(&mut trace, &t)? {
            Some(_) => Found::Trace(trace),
            None => Found::Stuck("reduced two-vertex factor lacks a double arrow".into()),
        });
    }
    let cycles = primitive_cycles(&t)?;
    if let Some(c) = cycles.iter().find(|c| c.len() < n) {
        let glued = glue_at(&t, &c.vertices)?;
        let kind = StepKind::Glue {
            vertices: c.vertices.iter().map(|&v| t.vertex(v).id.clone()).collect(),
        };
        trace.push(kind, t.clone(), glued.clone(), 0);
        return Ok(match search(trace, &glued)? {
            Found::Nothing => {
                return Err(Error::Inconsistent(
                    "gluing a non-Hamiltonian cycle gave a coregular local quiver".into(),
                ))
            }
            other => other,
        });
    }

    // every cycle is Hamiltonian: arrows run parallel to one cyclic order
    let Some(h) = cycles.first() else {
        return Ok(Found::Stuck("reduced factor has no cycles".into()));
    };
    let order: Vec<usize> = h.arrows.iter().map(|&a| t.arrow(a).source).collect();
    let next_of = |u: usize| order[(order.iter().position(|&x| x == u).expect("on cycle") + 1) % n];
    let (u0, u1, u2) = (order[0], order[1], order[2]);
    let mut kept = vec![0u32; n];
    let mut drop = Vec::new();
    for a in t.arrows() {
        if a.target != next_of(a.source) {
            return Ok(Found::Stuck("arrow off the Hamiltonian cycle".into()));
        }
        let quota = if a.source == u0 || a.source == u1 { 2 } else { 1 };
        if kept[a.source] < quota {
            kept[a.source] += 1;
        } else {
            drop.push(a.id.clone());
        }
    }
    let kind = StepKind::Subquiver {
        drop_arrows: drop,
        drop_vertices: Vec::new(),
    };
    let mut q = push_step(&mut trace, kind, &t)?;
    let keep = [t.vertex(u1).id.clone(), t.vertex(u2).id.clone()];
    let mut removals: Vec<usize> = vec![u0];
    removals.extend(order.iter().skip(3).rev());
    for u in removals {
        let id = t.vertex(u).id.clone();
        debug_assert!(!keep.contains(&id));
        let idx = q.vertex_index(id.as_str())?;
        if !ri_ok(&q, idx) {
            return Ok(Found::Stuck(format!("RI does not apply at {id}")));
        }
        let next = ri_at(&q, idx);
        trace.push(StepKind::Ri { vertex: id }, q.clone(), next.clone(), 0);
        q = next;
    }
    Ok(Found::Trace(trace))
}

/// A replayable witness ending at C1, or `NoObstruction` when every reduced
/// factor is one of the coregular shapes.
pub fn coregular_obstruction(q: &QuiverSetting) -> Result<ObstructionOutcome> {
    let found = match search(ReductionTrace::new(), q) {
        Ok(f) => f,
        Err(Error::Resource { what, cap }) => {
            return Ok(ObstructionOutcome::Inconclusive {
                reason: format!("resource limit while {what} (cap {cap})"),
            })
        }
        Err(e) => return Err(e),
    };
    Ok(match found {
        Found::Nothing => ObstructionOutcome::NoObstruction,
        Found::Stuck(reason) => ObstructionOutcome::Inconclusive { reason },
        Found::Trace(trace) => {
            let witness = Witness {
                target: TargetName::C1,
                start: q.clone(),
                trace,
            };
            witness.verify(false)?;
            ObstructionOutcome::Witness(witness)
        }
    })
}
