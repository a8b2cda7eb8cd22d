//! Reduction traces: the ordered record of rewriting and descendant steps
//! taken from an input setting. A trace is a certificate. [`ReductionTrace::replay`]
//! re-applies every step from its parameters and checks the recorded
//! snapshots.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::local::{self, Decomposition};
use crate::quiver::{ArrowId, QuiverSetting, VertexId};
use crate::reductions;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum StepKind {
    Ri { vertex: VertexId },
    Rii { vertex: VertexId, loops: u32 },
    Riii { vertex: VertexId },
    Riv { first: VertexId, second: VertexId },
    /// Local quiver of a one-dimensional setting: glue a strongly connected
    /// vertex subset.
    Glue { vertices: Vec<VertexId> },
    /// Local quiver for an explicit decomposition of the dimension vector.
    Local { decomposition: Decomposition },
    /// Pass to a subquiver by deleting arrows, then vertices (with their
    /// remaining arrows).
    Subquiver {
        drop_arrows: Vec<ArrowId>,
        drop_vertices: Vec<VertexId>,
    },
    /// Keep one prime factor, given by its arrows (or its single vertex).
    PrimeSplit {
        arrows: Vec<ArrowId>,
        vertices: Vec<VertexId>,
    },
    /// Keep one strongly connected component.
    SccSplit { vertices: Vec<VertexId> },
}

impl StepKind {
    pub fn label(&self) -> &'static str {
        match self {
            StepKind::Ri { .. } => "RI",
            StepKind::Rii { .. } => "RII",
            StepKind::Riii { .. } => "RIII",
            StepKind::Riv { .. } => "RIV",
            StepKind::Glue { .. } => "GLUE",
            StepKind::Local { .. } => "LOCAL",
            StepKind::Subquiver { .. } => "SUBQUIVER",
            StepKind::PrimeSplit { .. } => "PRIME-SPLIT",
            StepKind::SccSplit { .. } => "SCC-SPLIT",
        }
    }

    /// Applies the step to `q`, returning the new setting and the number of
    /// free variables split off.
    pub fn apply(&self, q: &QuiverSetting) -> Result<(QuiverSetting, u32)> {
        match self {
            StepKind::Ri { vertex } => Ok((reductions::apply_ri(q, vertex.as_str())?, 0)),
            StepKind::Rii { vertex, loops } => {
                let (next, k) = reductions::apply_rii(q, vertex.as_str())?;
                if k != *loops {
                    return Err(Error::Inconsistent(format!(
                        "RII at {vertex} removed {k} loops, trace says {loops}"
                    )));
                }
                Ok((next, k))
            }
            StepKind::Riii { vertex } => reductions::apply_riii(q, vertex.as_str()),
            StepKind::Riv { first, second } => Ok((
                reductions::apply_riv(q, first.as_str(), second.as_str())?,
                0,
            )),
            StepKind::Glue { vertices } => {
                let names: Vec<&str> = vertices.iter().map(VertexId::as_str).collect();
                Ok((local::glue_subquiver(q, &names)?, 0))
            }
            StepKind::Local { decomposition } => Ok((local::local_quiver(q, decomposition)?, 0)),
            StepKind::Subquiver {
                drop_arrows,
                drop_vertices,
            } => {
                let arrows = drop_arrows
                    .iter()
                    .map(|a| q.arrow_index(a.as_str()))
                    .collect::<Result<Vec<_>>>()?;
                let trimmed = q.without_arrows(&arrows);
                let gone = drop_vertices
                    .iter()
                    .map(|v| trimmed.vertex_index(v.as_str()))
                    .collect::<Result<Vec<_>>>()?;
                let keep: Vec<usize> = (0..trimmed.vertex_count())
                    .filter(|v| !gone.contains(v))
                    .collect();
                Ok((trimmed.induced_on(&keep), 0))
            }
            StepKind::PrimeSplit { arrows, vertices } => {
                Ok((q.induced_subquiver(arrows, vertices)?, 0))
            }
            StepKind::SccSplit { vertices } => {
                let idx = vertices
                    .iter()
                    .map(|v| q.vertex_index(v.as_str()))
                    .collect::<Result<Vec<_>>>()?;
                Ok((q.induced_on(&idx), 0))
            }
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = self.label();
        match self {
            StepKind::Ri { vertex } | StepKind::Riii { vertex } => write!(f, "{label}({vertex})"),
            StepKind::Rii { vertex, loops } => {
                let s = if *loops == 1 { "" } else { "s" };
                write!(f, "{label}({vertex}, {loops} loop{s})")
            }
            StepKind::Riv { first, second } => write!(f, "{label}({first},{second})"),
            StepKind::Glue { vertices } | StepKind::SccSplit { vertices } => {
                write!(f, "{label}({})", join(vertices))
            }
            StepKind::Local { decomposition } => write!(f, "{label}({decomposition})"),
            StepKind::Subquiver {
                drop_arrows,
                drop_vertices,
            } => write!(f, "{label}(-[{}]; -[{}])", join(drop_arrows), join(drop_vertices)),
            StepKind::PrimeSplit { arrows, vertices } => {
                if arrows.is_empty() {
                    write!(f, "{label}({})", join(vertices))
                } else {
                    write!(f, "{label}({})", join(arrows))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub before: QuiverSetting,
    pub after: QuiverSetting,
    pub free_vars: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    steps: Vec<Step>,
}

impl ReductionTrace {
    pub fn new() -> Self {
        ReductionTrace::default()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends a step. Snapshots must chain.
    pub fn push(&mut self, kind: StepKind, before: QuiverSetting, after: QuiverSetting, free_vars: u32) {
        debug_assert!(self.steps.last().is_none_or(|s| s.after == before));
        debug_assert!(
            free_vars == 0 || matches!(kind, StepKind::Rii { .. } | StepKind::Riii { .. })
        );
        self.steps.push(Step {
            kind,
            before,
            after,
            free_vars,
        });
    }

    /// Copy with one more step.
    pub(crate) fn extended(&self, kind: StepKind, before: &QuiverSetting, after: &QuiverSetting, free_vars: u32) -> Self {
        let mut next = self.clone();
        next.push(kind, before.clone(), after.clone(), free_vars);
        next
    }

    pub fn free_vars(&self) -> u32 {
        self.steps.iter().map(|s| s.free_vars).sum()
    }

    pub fn last_setting(&self) -> Option<&QuiverSetting> {
        self.steps.last().map(|s| &s.after)
    }

    /// Re-applies every step to `start`, checking each recorded snapshot.
    /// Returns the final setting.
    pub fn replay(&self, start: &QuiverSetting) -> Result<QuiverSetting> {
        let mut current = start.clone();
        for (i, step) in self.steps.iter().enumerate() {
            if step.before != current {
                return Err(Error::Inconsistent(format!(
                    "step {} ({}) starts from a different setting",
                    i + 1,
                    step.kind
                )));
            }
            let (next, free) = step.kind.apply(&current)?;
            if next != step.after || free != step.free_vars {
                return Err(Error::Inconsistent(format!(
                    "step {} ({}) does not reproduce its recorded result",
                    i + 1,
                    step.kind
                )));
            }
            current = next;
        }
        Ok(current)
    }

    /// One step per line.
    pub fn to_text(&self) -> String {
        self.steps
            .iter()
            .map(|s| format!("{}\n", s.kind))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_detects_tampering() {
        let q = QuiverSetting::oriented_cycle(2);
        let kind = StepKind::Ri { vertex: "v1".into() };
        let (after, _) = kind.apply(&q).unwrap();
        let mut trace = ReductionTrace::new();
        trace.push(kind, q.clone(), after.clone(), 0);
        assert_eq!(trace.replay(&q).unwrap(), after);

        let mut forged = ReductionTrace::new();
        forged.push(StepKind::Ri { vertex: "v1".into() }, q.clone(), q.clone(), 0);
        assert!(matches!(forged.replay(&q), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn text_lines() {
        let k = StepKind::Rii {
            vertex: "w".into(),
            loops: 4,
        };
        assert_eq!(k.to_string(), "RII(w, 4 loops)");
        let k = StepKind::Riv {
            first: "v1".into(),
            second: "v2".into(),
        };
        assert_eq!(k.to_string(), "RIV(v1,v2)");
    }
}
