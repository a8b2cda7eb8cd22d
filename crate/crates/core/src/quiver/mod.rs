//! Quiver settings: a directed multigraph (loops and parallel arrows allowed)
//! together with a strictly positive dimension vector.
//!
//! Vertices and arrows carry stable string ids. Operations that rewrite a
//! setting mint fresh ids and record where they came from, so arrow multisets
//! and cycles keep referring to arrows unambiguously even among parallel ones.
//! Internally everything is index based; indices are only meaningful for the
//! setting they were taken from.

mod decompose;
pub mod dot;
mod iso;
pub mod text;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use iso::{canonical_form, contains_subquiver, is_isomorphic, CanonicalForm};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexId(String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ArrowId(String);

macro_rules! string_id {
    ($name:ident) => {
        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }
    };
}

string_id!(VertexId);
string_id!(ArrowId);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Vertex {
    pub id: VertexId,
    pub dim: u32,
    /// Original vertices that were merged into this one. A fresh vertex is
    /// its own provenance.
    pub provenance: BTreeSet<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Arrow {
    pub id: ArrowId,
    /// Index of the source vertex in the owning setting.
    pub source: usize,
    /// Index of the target vertex in the owning setting.
    pub target: usize,
    /// Arrows this one was built from: empty for original arrows, the
    /// (incoming, outgoing) pair for arrows composed by vertex removal, the
    /// replaced arrow for loop removal at a higher-dimensional vertex.
    pub parents: Vec<ArrowId>,
}

impl Arrow {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A genuine quiver setting. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuiverSetting {
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Returns `base` if unused, otherwise `base_2`, `base_3`, ...
pub(crate) fn fresh_name(taken: &HashSet<String>, base: &str) -> String {
    if !taken.contains(base) {
        return base.to_owned();
    }
    (2..)
        .map(|k| format!("{base}_{k}"))
        .find(|cand| !taken.contains(cand))
        .expect("unbounded counter")
}

impl QuiverSetting {
    pub fn empty() -> Self {
        QuiverSetting {
            vertices: Vec::new(),
            arrows: Vec::new(),
        }
    }

    /// Validates and assembles a setting from raw parts.
    pub fn from_parts(vertices: Vec<Vertex>, arrows: Vec<Arrow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in &vertices {
            if !valid_name(v.id.as_str()) {
                return Err(Error::domain(format!("invalid vertex id {:?}", v.id.as_str())));
            }
            if v.dim == 0 {
                return Err(Error::domain(format!(
                    "vertex {} has dimension 0; delete it before building the setting",
                    v.id
                )));
            }
            if !seen.insert(v.id.as_str()) {
                return Err(Error::domain(format!("duplicate vertex id {}", v.id)));
            }
        }
        let mut seen = HashSet::new();
        for a in &arrows {
            if !valid_name(a.id.as_str()) {
                return Err(Error::domain(format!("invalid arrow id {:?}", a.id.as_str())));
            }
            if a.source >= vertices.len() || a.target >= vertices.len() {
                return Err(Error::domain(format!("arrow {} has a dangling endpoint", a.id)));
            }
            if !seen.insert(a.id.as_str()) {
                return Err(Error::domain(format!("duplicate arrow id {}", a.id)));
            }
        }
        Ok(QuiverSetting { vertices, arrows })
    }

    /// Used by rewriting code that builds parts known to be consistent.
    pub(crate) fn from_parts_unchecked(vertices: Vec<Vertex>, arrows: Vec<Arrow>) -> Self {
        debug_assert!(QuiverSetting::from_parts(vertices.clone(), arrows.clone()).is_ok());
        QuiverSetting { vertices, arrows }
    }

    /// Setting with vertices `v1..vn` of the given dimensions and arrows
    /// `a1..am` between 0-based vertex indices.
    pub fn with_dims(dims: &[u32], arrows: &[(usize, usize)]) -> Result<Self> {
        let vertices = dims
            .iter()
            .enumerate()
            .map(|(i, &dim)| Vertex::fresh(format!("v{}", i + 1), dim))
            .collect();
        let arrows = arrows
            .iter()
            .enumerate()
            .map(|(k, &(s, t))| Arrow {
                id: ArrowId(format!("a{}", k + 1)),
                source: s,
                target: t,
                parents: Vec::new(),
            })
            .collect();
        QuiverSetting::from_parts(vertices, arrows)
    }

    /// Setting with `n` one-dimensional vertices.
    pub fn unit(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        QuiverSetting::with_dims(&vec![1; n], arrows)
    }

    /// The oriented cycle on `k` one-dimensional vertices.
    pub fn oriented_cycle(k: usize) -> Self {
        let arrows: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        QuiverSetting::unit(k, &arrows).expect("well-formed cycle")
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.id.as_str() == id)
            .ok_or_else(|| Error::domain(format!("unknown vertex {id}")))
    }

    pub fn arrow_index(&self, id: &str) -> Result<usize> {
        self.arrows
            .iter()
            .position(|a| a.id.as_str() == id)
            .ok_or_else(|| Error::domain(format!("unknown arrow {id}")))
    }

    pub fn vertex(&self, idx: usize) -> &Vertex {
        &self.vertices[idx]
    }

    pub fn arrow(&self, idx: usize) -> &Arrow {
        &self.arrows[idx]
    }

    pub fn dim(&self, idx: usize) -> u32 {
        self.vertices[idx].dim
    }

    /// The dimension vector as signed integers, in vertex order.
    pub fn dims(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| i64::from(v.dim)).collect()
    }

    /// True when every vertex has dimension one.
    pub fn is_unit(&self) -> bool {
        self.vertices.iter().all(|v| v.dim == 1)
    }

    /// `ε_v`: one at `idx`, zero elsewhere.
    pub fn unit_vector(&self, idx: usize) -> Vec<i64> {
        let mut e = vec![0; self.vertices.len()];
        e[idx] = 1;
        e
    }

    /// The Ringel form `Σ_v β(v)γ(v) − Σ_ρ β(s(ρ))γ(t(ρ))`.
    pub fn ringel_form(&self, beta: &[i64], gamma: &[i64]) -> Result<i64> {
        let n = self.vertices.len();
        if beta.len() != n || gamma.len() != n {
            return Err(Error::domain(format!(
                "dimension vectors of length {} and {} for a setting with {n} vertices",
                beta.len(),
                gamma.len()
            )));
        }
        let diag: i64 = beta.iter().zip(gamma).map(|(b, g)| b * g).sum();
        let off: i64 = self
            .arrows
            .iter()
            .map(|a| beta[a.source] * gamma[a.target])
            .sum();
        Ok(diag - off)
    }

    /// `χ(α, α)` for the setting's own dimension vector.
    pub fn euler_form(&self) -> i64 {
        let alpha = self.dims();
        self.ringel_form(&alpha, &alpha).expect("aligned vectors")
    }

    pub fn in_degree(&self, idx: usize) -> u32 {
        self.arrows.iter().filter(|a| a.target == idx).count() as u32
    }

    pub fn out_degree(&self, idx: usize) -> u32 {
        self.arrows.iter().filter(|a| a.source == idx).count() as u32
    }

    pub fn loop_count(&self, idx: usize) -> u32 {
        self.arrows
            .iter()
            .filter(|a| a.source == idx && a.target == idx)
            .count() as u32
    }

    /// Number of arrows `from -> to`.
    pub fn arrow_multiplicity(&self, from: usize, to: usize) -> u32 {
        self.arrows
            .iter()
            .filter(|a| a.source == from && a.target == to)
            .count() as u32
    }

    /// (in-degree, out-degree); a loop counts toward both.
    pub fn degrees(&self, v: &str) -> Result<(u32, u32)> {
        let idx = self.vertex_index(v)?;
        Ok((self.in_degree(idx), self.out_degree(idx)))
    }

    /// Successor lists (with repetition for parallel arrows), loops excluded.
    pub(crate) fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.vertices.len()];
        for a in &self.arrows {
            if !a.is_loop() {
                succ[a.source].push(a.target);
            }
        }
        succ
    }

    /// Outgoing arrow indices per vertex, loops included.
    pub(crate) fn out_arrows(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (k, a) in self.arrows.iter().enumerate() {
            out[a.source].push(k);
        }
        out
    }

    pub(crate) fn taken_vertex_names(&self) -> HashSet<String> {
        self.vertices.iter().map(|v| v.id.0.clone()).collect()
    }

    pub(crate) fn taken_arrow_names(&self) -> HashSet<String> {
        self.arrows.iter().map(|a| a.id.0.clone()).collect()
    }

    /// True when the setting is a single vertex without arrows.
    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1 && self.arrows.is_empty()
    }

    /// Sub-setting on the given arrows and vertices (endpoints of kept arrows
    /// are always kept). Vertex and arrow order follow the parent.
    pub(crate) fn restrict(&self, arrows: &[usize], vertices: &[usize]) -> QuiverSetting {
        let mut keep_v = vec![false; self.vertices.len()];
        let mut keep_a = vec![false; self.arrows.len()];
        for &k in arrows {
            keep_a[k] = true;
            keep_v[self.arrows[k].source] = true;
            keep_v[self.arrows[k].target] = true;
        }
        for &v in vertices {
            keep_v[v] = true;
        }
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut new_vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep_v[i] {
                remap[i] = new_vertices.len();
                new_vertices.push(v.clone());
            }
        }
        let new_arrows = self
            .arrows
            .iter()
            .enumerate()
            .filter(|(k, _)| keep_a[*k])
            .map(|(_, a)| Arrow {
                source: remap[a.source],
                target: remap[a.target],
                ..a.clone()
            })
            .collect();
        QuiverSetting::from_parts_unchecked(new_vertices, new_arrows)
    }

    /// The full sub-setting induced on a vertex subset.
    pub(crate) fn induced_on(&self, vertices: &[usize]) -> QuiverSetting {
        let mut inside = vec![false; self.vertices.len()];
        for &v in vertices {
            inside[v] = true;
        }
        let arrows: Vec<usize> = (0..self.arrows.len())
            .filter(|&k| inside[self.arrows[k].source] && inside[self.arrows[k].target])
            .collect();
        self.restrict(&arrows, vertices)
    }

    /// Keeps the listed arrows, their endpoints, and any extra listed vertices.
    pub fn induced_subquiver<A, V>(&self, keep_arrows: &[A], extra_vertices: &[V]) -> Result<Self>
    where
        A: AsRef<str>,
        V: AsRef<str>,
    {
        let arrows = keep_arrows
            .iter()
            .map(|a| self.arrow_index(a.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let vertices = extra_vertices
            .iter()
            .map(|v| self.vertex_index(v.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.restrict(&arrows, &vertices))
    }

    /// Copy with the dimension vector replaced. Entries must be positive.
    pub fn with_dimension_vector(&self, dims: &[u32]) -> Result<Self> {
        if dims.len() != self.vertices.len() {
            return Err(Error::domain("dimension vector length mismatch"));
        }
        let vertices = self
            .vertices
            .iter()
            .zip(dims)
            .map(|(v, &d)| Vertex { dim: d, ..v.clone() })
            .collect();
        QuiverSetting::from_parts(vertices, self.arrows.clone())
    }

    /// Copy without the given arrows.
    pub(crate) fn without_arrows(&self, drop: &[usize]) -> QuiverSetting {
        let mut arrows = self.arrows.clone();
        let mut drop = drop.to_vec();
        drop.sort_unstable();
        for k in drop.into_iter().rev() {
            arrows.remove(k);
        }
        QuiverSetting::from_parts_unchecked(self.vertices.clone(), arrows)
    }

    /// Sum of vertex dimensions; handy as a size measure.
    pub fn total_dimension(&self) -> u64 {
        self.vertices.iter().map(|v| u64::from(v.dim)).sum()
    }
}

impl Vertex {
    pub fn fresh(id: impl Into<String>, dim: u32) -> Self {
        let id = VertexId::new(id);
        Vertex {
            provenance: BTreeSet::from([id.clone()]),
            id,
            dim,
        }
    }
}

impl Arrow {
    pub fn new(id: impl Into<String>, source: usize, target: usize) -> Self {
        Arrow {
            id: ArrowId::new(id),
            source,
            target,
            parents: Vec::new(),
        }
    }
}

impl fmt::Display for QuiverSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::serialize(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn g1() -> QuiverSetting {
        QuiverSetting::unit(2, &[(0, 1), (0, 1), (0, 1), (1, 0), (1, 0)]).unwrap()
    }

    #[test]
    fn ringel_form_examples() {
        let two_cycle = QuiverSetting::oriented_cycle(2);
        assert_eq!(two_cycle.euler_form(), 0);

        let dim_two_loop = QuiverSetting::with_dims(&[2], &[(0, 0)]).unwrap();
        assert_eq!(dim_two_loop.euler_form(), 0);

        assert_eq!(g1().euler_form(), -3);
    }

    #[test]
    fn ringel_form_rejects_mismatched_vectors() {
        let q = QuiverSetting::oriented_cycle(3);
        assert!(matches!(q.ringel_form(&[1, 1], &[1, 1, 1]), Err(Error::Domain(_))));
    }

    #[test]
    fn degree_examples() {
        let tri = QuiverSetting::oriented_cycle(3);
        for v in ["v1", "v2", "v3"] {
            assert_eq!(tri.degrees(v).unwrap(), (1, 1));
        }
        assert_eq!(g1().degrees("v1").unwrap(), (2, 3));
        let two_loops = QuiverSetting::unit(1, &[(0, 0), (0, 0)]).unwrap();
        assert_eq!(two_loops.degrees("v1").unwrap(), (2, 2));
        assert!(two_loops.degrees("nope").is_err());
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            QuiverSetting::with_dims(&[1, 0], &[]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn induced_subquiver_examples() {
        let g = g1();
        let c1 = g.induced_subquiver(&["a2", "a3", "a4", "a5"], &[] as &[&str]).unwrap();
        assert_eq!(c1.arrow_count(), 4);
        assert_eq!(c1.arrow_multiplicity(0, 1), 2);
        assert_eq!(c1.arrow_multiplicity(1, 0), 2);

        let all: Vec<_> = g.arrows().iter().map(|a| a.id.as_str()).collect();
        assert_eq!(g.induced_subquiver(&all, &[] as &[&str]).unwrap(), g);

        let none = g.induced_subquiver(&[] as &[&str], &[] as &[&str]).unwrap();
        assert!(none.is_empty());

        assert!(g.induced_subquiver(&["zz"], &[] as &[&str]).is_err());
    }

    #[test]
    fn unit_euler_form_is_vertices_minus_arrows() {
        let q = QuiverSetting::unit(4, &[(0, 1), (1, 2), (2, 0), (2, 2), (3, 1), (1, 3)]).unwrap();
        assert_eq!(q.euler_form(), 4 - 6);
    }
}
