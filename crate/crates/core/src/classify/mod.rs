//! Verdicts with certificates: coregularity, complete intersection, and
//! searches for forbidden descendants.

mod descendants;
mod obstruction;
mod random;

use std::fmt;

use serde::Serialize;

pub use descendants::{find_forbidden_descendant, DescendantOptions, SearchOutcome};
pub use obstruction::{coregular_obstruction, ObstructionOutcome};
pub use random::{random_setting, Constraints, DimSpec};

use crate::cycles::f_value;
use crate::error::{Error, Result};
use crate::quiver::{contains_subquiver, is_isomorphic, QuiverSetting};
use crate::reductions::{reduce_with, ReduceOptions, ReductionOutcome};
use crate::toric::{min_generators, GeneratorReport};
use crate::trace::ReductionTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TargetName {
    G1,
    G2,
    C1,
    #[serde(rename = "COREG-A")]
    CoregA,
    #[serde(rename = "COREG-B")]
    CoregB,
    #[serde(rename = "COREG-C")]
    CoregC,
}

impl TargetName {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "G1" => Some(TargetName::G1),
            "G2" => Some(TargetName::G2),
            "C1" => Some(TargetName::C1),
            "COREG-A" => Some(TargetName::CoregA),
            "COREG-B" => Some(TargetName::CoregB),
            "COREG-C" => Some(TargetName::CoregC),
            _ => None,
        }
    }
}

impl fmt::Display for TargetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetName::G1 => "G1",
            TargetName::G2 => "G2",
            TargetName::C1 => "C1",
            TargetName::CoregA => "COREG-A",
            TargetName::CoregB => "COREG-B",
            TargetName::CoregC => "COREG-C",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetQuiver {
    pub name: TargetName,
    pub setting: QuiverSetting,
}

impl TargetQuiver {
    /// The target with its smallest representative; COREG-A and COREG-B
    /// use dimension 2 here, see [`coreg_a`] and [`coreg_b`] for others.
    pub fn new(name: TargetName) -> Self {
        let setting = match name {
            TargetName::G1 => g1(),
            TargetName::G2 => g2(),
            TargetName::C1 => c1(),
            TargetName::CoregA => coreg_a(2),
            TargetName::CoregB => coreg_b(2),
            TargetName::CoregC => coreg_c(),
        };
        TargetQuiver { name, setting }
    }
}

/// Three arrows one way and two the other between two one-dimensional vertices.
pub fn g1() -> QuiverSetting {
    QuiverSetting::unit(2, &[(0, 1), (0, 1), (0, 1), (1, 0), (1, 0)]).expect("valid")
}

/// Oriented triangle with every side doubled.
pub fn g2() -> QuiverSetting {
    QuiverSetting::unit(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 0)]).expect("valid")
}

/// Two arrows each way between two one-dimensional vertices.
pub fn c1() -> QuiverSetting {
    QuiverSetting::unit(2, &[(0, 1), (0, 1), (1, 0), (1, 0)]).expect("valid")
}

/// One vertex of dimension `k`, no arrows.
pub fn coreg_a(k: u32) -> QuiverSetting {
    QuiverSetting::with_dims(&[k], &[]).expect("k > 0")
}

/// One vertex of dimension `k` with one loop.
pub fn coreg_b(k: u32) -> QuiverSetting {
    QuiverSetting::with_dims(&[k], &[(0, 0)]).expect("k > 0")
}

/// One vertex of dimension 2 with two loops.
pub fn coreg_c() -> QuiverSetting {
    QuiverSetting::with_dims(&[2], &[(0, 0), (0, 0)]).expect("valid")
}

/// Which coregular shape `q` is, if any.
pub fn coregular_shape(q: &QuiverSetting) -> Option<TargetName> {
    if q.vertex_count() != 1 {
        return None;
    }
    match (q.arrow_count(), q.dim(0)) {
        (0, _) => Some(TargetName::CoregA),
        (1, _) => Some(TargetName::CoregB),
        (2, 2) => Some(TargetName::CoregC),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Reduction(ReductionOutcome),
    Generators { report: GeneratorReport, f: i64 },
    Descendant(Witness),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub answer: bool,
    pub certificate: Certificate,
}

/// A descendant of `start`, reached by replaying `trace`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub target: TargetName,
    pub start: QuiverSetting,
    pub trace: ReductionTrace,
}

impl Witness {
    /// Replays the trace and checks that it ends at the target (up to
    /// isomorphism, or containing it as a subquiver when `as_subquiver`).
    pub fn verify(&self, as_subquiver: bool) -> Result<QuiverSetting> {
        let end = self.trace.replay(&self.start)?;
        let target = TargetQuiver::new(self.target).setting;
        let ok = if as_subquiver {
            contains_subquiver(&end, &target)
        } else {
            is_isomorphic(&end, &target)
        };
        if !ok {
            return Err(Error::Inconsistent(format!(
                "witness trace does not end at {}",
                self.target
            )));
        }
        Ok(end)
    }
}

/// Coregularity through RI–RIII reduction: every reduced factor must be one
/// of the three coregular shapes. For one-dimensional settings the answer is
/// checked against `F = 0` on every strongly connected component.
pub fn is_coregular(q: &QuiverSetting) -> Result<Verdict> {
    let outcome = reduce_with(q, &ReduceOptions::invariant_ring())?;
    let answer = outcome.terminals().all(|t| coregular_shape(t).is_some());
    if q.is_unit() {
        let mut by_f = true;
        for comp in q.strongly_connected_components() {
            by_f &= f_value(&comp)? == 0;
        }
        if by_f != answer {
            return Err(Error::Inconsistent(format!(
                "reduction says coregular = {answer}, F says {by_f}"
            )));
        }
    }
    Ok(Verdict {
        answer,
        certificate: Certificate::Reduction(outcome),
    })
}

/// Complete intersection through RI, RII and RIV reduction with splitting:
/// true iff every terminal factor is a single vertex without arrows.
pub fn is_ci(q: &QuiverSetting) -> Result<Verdict> {
    if !q.is_unit() {
        return Err(Error::domain("the complete intersection decider needs dimension vector (1,...,1)"));
    }
    let outcome = reduce_with(q, &ReduceOptions::default())?;
    Ok(Verdict {
        answer: outcome.all_points(),
        certificate: Certificate::Reduction(outcome),
    })
}

/// Complete intersection through generator counting on a strongly connected
/// one-dimensional setting.
pub fn is_ci_by_generators(q: &QuiverSetting) -> Result<Verdict> {
    let report = min_generators(q)?;
    let f = f_value(q)?;
    Ok(Verdict {
        answer: report.total as i64 == f,
        certificate: Certificate::Generators { report, f },
    })
}
