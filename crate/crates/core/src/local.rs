//! Local quivers and simple-representation tests.
//!
//! For a semisimple point `S_1^{a_1} ⊕ … ⊕ S_k^{a_k}` with `dim S_i = β_i`
//! the local quiver has one vertex per simple factor, of dimension `a_i`, and
//! `δ_ij − χ(β_i, β_j)` arrows from factor `i` to factor `j`. For
//! one-dimensional settings this is the same as gluing strongly connected
//! vertex subsets together.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quiver::{fresh_name, Arrow, QuiverSetting, Vertex, VertexId};

fn is_oriented_cycle(q: &QuiverSetting) -> bool {
    let n = q.vertex_count();
    n >= 2
        && q.arrow_count() == n
        && (0..n).all(|v| q.in_degree(v) == 1 && q.out_degree(v) == 1)
        && q.is_strongly_connected()
}

/// Whether simple representations of the setting's dimension vector exist.
pub fn has_simple_rep(q: &QuiverSetting) -> bool {
    if q.is_empty() {
        return false;
    }
    let special = q.is_point()
        || (q.vertex_count() == 1 && q.arrow_count() == 1)
        || is_oriented_cycle(q);
    if special {
        return q.is_unit();
    }
    if !q.is_strongly_connected() {
        return false;
    }
    let alpha = q.dims();
    (0..q.vertex_count()).all(|v| {
        let e = q.unit_vector(v);
        q.ringel_form(&e, &alpha).expect("aligned") <= 0 && q.ringel_form(&alpha, &e).expect("aligned") <= 0
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimpleClassKind {
    Unique,
    Infinite,
}

pub fn simple_class_count_kind(q: &QuiverSetting) -> Result<SimpleClassKind> {
    if !has_simple_rep(q) {
        return Err(Error::domain("the setting has no simple representations"));
    }
    Ok(if q.is_point() {
        SimpleClassKind::Unique
    } else {
        SimpleClassKind::Infinite
    })
}

/// `1 − χ(α, α)`, the dimension of the quotient variety.
pub fn iss_dimension(q: &QuiverSetting) -> Result<u64> {
    if !has_simple_rep(q) {
        return Err(Error::domain("the setting has no simple representations"));
    }
    let d = 1 - q.euler_form();
    u64::try_from(d).map_err(|_| Error::Inconsistent(format!("negative quotient dimension {d}")))
}

/// Glue a strongly connected vertex subset (given by index) of a
/// one-dimensional setting into one vertex. Arrows inside the subset become
/// loops; arrow ids are kept.
pub(crate) fn glue_at(q: &QuiverSetting, subset: &[usize]) -> Result<QuiverSetting> {
    if !q.is_unit() {
        return Err(Error::domain("gluing is defined for one-dimensional settings"));
    }
    let members: BTreeSet<usize> = subset.iter().copied().collect();
    if members.is_empty() || members.len() != subset.len() {
        return Err(Error::domain("glue needs a non-empty set of distinct vertices"));
    }
    if members.iter().any(|&v| v >= q.vertex_count()) {
        return Err(Error::domain("glue subset refers to a missing vertex"));
    }
    let list: Vec<usize> = members.iter().copied().collect();
    if !q.induced_on(&list).is_strongly_connected() {
        return Err(Error::Precondition(
            "glued vertices must span a strongly connected subquiver".into(),
        ));
    }
    if list.len() == 1 {
        return Ok(q.clone());
    }

    let first = list[0];
    let mut taken: HashSet<String> = q.taken_vertex_names();
    for &v in &list {
        taken.remove(q.vertex(v).id.as_str());
    }
    let base: Vec<&str> = list.iter().map(|&v| q.vertex(v).id.as_str()).collect();
    let name = fresh_name(&taken, &base.join("_"));
    let provenance: BTreeSet<VertexId> = list
        .iter()
        .flat_map(|&v| q.vertex(v).provenance.iter().cloned())
        .collect();

    let mut remap = vec![0usize; q.vertex_count()];
    let mut vertices = Vec::new();
    for (i, v) in q.vertices().iter().enumerate() {
        if i == first {
            remap[i] = vertices.len();
            vertices.push(Vertex {
                id: name.as_str().into(),
                dim: 1,
                provenance: provenance.clone(),
            });
        } else if !members.contains(&i) {
            remap[i] = vertices.len();
            vertices.push(v.clone());
        }
    }
    for &v in &list {
        remap[v] = remap[first];
    }
    let arrows = q
        .arrows()
        .iter()
        .map(|a| Arrow {
            source: remap[a.source],
            target: remap[a.target],
            ..a.clone()
        })
        .collect();
    Ok(QuiverSetting::from_parts_unchecked(vertices, arrows))
}

/// The setting with every loop at a one-dimensional vertex removed.
pub fn strip_unit_loops(q: &QuiverSetting) -> QuiverSetting {
    let drop: Vec<usize> = (0..q.arrow_count())
        .filter(|&a| q.arrow(a).is_loop() && q.dim(q.arrow(a).source) == 1)
        .collect();
    q.without_arrows(&drop)
}

/// Local quiver obtained by gluing the named vertices of a one-dimensional
/// setting.
pub fn glue_subquiver<S: AsRef<str>>(q: &QuiverSetting, subset: &[S]) -> Result<QuiverSetting> {
    let idx = subset
        .iter()
        .map(|v| q.vertex_index(v.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    glue_at(q, &idx)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionPart {
    pub multiplicity: u32,
    /// Nonzero entries of `β_i`.
    pub dims: Vec<(VertexId, u32)>,
}

/// `α = Σ a_i β_i`; equal `β_i` listed more than once stand for distinct
/// simple factors of the same dimension vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub parts: Vec<DecompositionPart>,
}

impl Decomposition {
    /// Builds a decomposition from dimension vectors aligned with `q`.
    pub fn from_vectors(q: &QuiverSetting, parts: &[(u32, Vec<u32>)]) -> Self {
        Decomposition {
            parts: parts
                .iter()
                .map(|(a, beta)| DecompositionPart {
                    multiplicity: *a,
                    dims: beta
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b > 0)
                        .map(|(v, &b)| (q.vertex(v).id.clone(), b))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Parses `mult <a> dims <v>=<k>,...`, one part per line, `#` comments.
    pub fn parse(input: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for (i, raw) in input.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |column: usize, message: &str| Error::Parse {
                line: i + 1,
                column,
                message: message.to_owned(),
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [kw_mult, mult, kw_dims, entries @ ..] = tokens.as_slice() else {
                return Err(err(1, "expected `mult <a> dims <v>=<k>,...`"));
            };
            if *kw_mult != "mult" || *kw_dims != "dims" || entries.is_empty() {
                return Err(err(1, "expected `mult <a> dims <v>=<k>,...`"));
            }
            let multiplicity: u32 = mult.parse().map_err(|_| err(6, "bad multiplicity"))?;
            let mut dims = Vec::new();
            for entry in entries.join("").split(',').filter(|e| !e.is_empty()) {
                let (v, k) = entry.split_once('=').ok_or_else(|| err(1, "expected <v>=<k>"))?;
                let k: u32 = k.trim().parse().map_err(|_| err(1, "bad dimension"))?;
                if k > 0 {
                    dims.push((VertexId::new(v.trim()), k));
                }
            }
            parts.push(DecompositionPart { multiplicity, dims });
        }
        Ok(Decomposition { parts })
    }

    fn resolve(&self, q: &QuiverSetting) -> Result<Vec<(u32, Vec<i64>)>> {
        self.parts
            .iter()
            .map(|p| {
                let mut beta = vec![0i64; q.vertex_count()];
                for (v, k) in &p.dims {
                    let idx = q
                        .vertex_index(v.as_str())
                        .map_err(|_| Error::Validation(format!("unknown vertex {v}")))?;
                    beta[idx] += i64::from(*k);
                }
                Ok((p.multiplicity, beta))
            })
            .collect()
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let dims: Vec<String> = p.dims.iter().map(|(v, k)| format!("{v}={k}")).collect();
            write!(f, "{}*[{}]", p.multiplicity, dims.join(","))?;
        }
        Ok(())
    }
}

/// Sub-setting on the support of `beta`, with `beta` as its dimension vector.
pub(crate) fn support_setting(q: &QuiverSetting, beta: &[i64]) -> QuiverSetting {
    let support: Vec<usize> = (0..q.vertex_count()).filter(|&v| beta[v] > 0).collect();
    let sub = q.induced_on(&support);
    let dims: Vec<u32> = support.iter().map(|&v| beta[v] as u32).collect();
    sub.with_dimension_vector(&dims).expect("positive support dims")
}

/// Local quiver for an explicit decomposition. Validates every clause first.
pub fn local_quiver(q: &QuiverSetting, decomposition: &Decomposition) -> Result<QuiverSetting> {
    let parts = decomposition.resolve(q)?;
    if parts.is_empty() {
        return Err(Error::Validation("no parts".into()));
    }
    let mut total = vec![0i64; q.vertex_count()];
    for (i, (a, beta)) in parts.iter().enumerate() {
        if *a == 0 {
            return Err(Error::Validation(format!("part {} has multiplicity 0", i + 1)));
        }
        if beta.iter().all(|&b| b == 0) {
            return Err(Error::Validation(format!("part {} is the zero vector", i + 1)));
        }
        for (t, b) in total.iter_mut().zip(beta) {
            *t += i64::from(*a) * b;
        }
    }
    if total != q.dims() {
        return Err(Error::Validation(
            "multiplicities times parts do not sum to the dimension vector".into(),
        ));
    }
    for (i, (_, beta)) in parts.iter().enumerate() {
        let sub = support_setting(q, beta);
        if !has_simple_rep(&sub) {
            return Err(Error::Validation(format!(
                "part {} admits no simple representation",
                i + 1
            )));
        }
        let repeated = parts.iter().enumerate().any(|(j, (_, other))| j != i && other == beta);
        if repeated && simple_class_count_kind(&sub)? == SimpleClassKind::Unique {
            return Err(Error::Validation(format!(
                "part {} is listed more than once but has a unique simple class",
                i + 1
            )));
        }
    }

    let mut taken = HashSet::new();
    let mut vertices = Vec::new();
    for ((a, beta), part) in parts.iter().zip(&decomposition.parts) {
        let base: Vec<&str> = part.dims.iter().map(|(v, _)| v.as_str()).collect();
        let name = fresh_name(&taken, &base.join("_"));
        taken.insert(name.clone());
        let provenance = (0..q.vertex_count())
            .filter(|&v| beta[v] > 0)
            .flat_map(|v| q.vertex(v).provenance.iter().cloned())
            .collect();
        vertices.push(Vertex {
            id: name.as_str().into(),
            dim: *a,
            provenance,
        });
    }
    let mut arrows = Vec::new();
    for (i, (_, bi)) in parts.iter().enumerate() {
        for (j, (_, bj)) in parts.iter().enumerate() {
            let delta = i64::from(i == j);
            let count = delta - q.ringel_form(bi, bj)?;
            if count < 0 {
                return Err(Error::Inconsistent(format!(
                    "negative arrow count {count} between parts {} and {}",
                    i + 1,
                    j + 1
                )));
            }
            for _ in 0..count {
                arrows.push(Arrow::new(format!("e{}", arrows.len() + 1), i, j));
            }
        }
    }
    QuiverSetting::from_parts(vertices, arrows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::is_isomorphic;

    fn g2() -> QuiverSetting {
        QuiverSetting::unit(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 0)]).unwrap()
    }

    #[test]
    fn simple_rep_examples() {
        let sc = QuiverSetting::unit(3, &[(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        assert!(has_simple_rep(&sc));
        assert!(has_simple_rep(&QuiverSetting::oriented_cycle(4)));
        assert!(!has_simple_rep(&QuiverSetting::unit(2, &[(0, 1)]).unwrap()));

        let one_loop_dim2 = QuiverSetting::with_dims(&[2], &[(0, 0)]).unwrap();
        assert!(!has_simple_rep(&one_loop_dim2));
        let two_loops_dim2 = QuiverSetting::with_dims(&[2], &[(0, 0), (0, 0)]).unwrap();
        assert!(has_simple_rep(&two_loops_dim2));
        let bare_dim2 = QuiverSetting::with_dims(&[2], &[]).unwrap();
        assert!(!has_simple_rep(&bare_dim2));
    }

    #[test]
    fn class_kind_examples() {
        assert_eq!(simple_class_count_kind(&QuiverSetting::unit(1, &[]).unwrap()).unwrap(), SimpleClassKind::Unique);
        assert_eq!(simple_class_count_kind(&QuiverSetting::oriented_cycle(2)).unwrap(), SimpleClassKind::Infinite);
        let two_loops_dim2 = QuiverSetting::with_dims(&[2], &[(0, 0), (0, 0)]).unwrap();
        assert_eq!(simple_class_count_kind(&two_loops_dim2).unwrap(), SimpleClassKind::Infinite);
        assert!(simple_class_count_kind(&QuiverSetting::unit(2, &[(0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn iss_dimension_examples() {
        assert_eq!(iss_dimension(&QuiverSetting::oriented_cycle(5)).unwrap(), 1);
        let g1 = QuiverSetting::unit(2, &[(0, 1), (0, 1), (0, 1), (1, 0), (1, 0)]).unwrap();
        assert_eq!(iss_dimension(&g1).unwrap(), 4);
        assert_eq!(iss_dimension(&QuiverSetting::unit(1, &[]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn glue_examples() {
        let tri = QuiverSetting::oriented_cycle(3);
        let err = glue_subquiver(&tri, &["v1", "v2"]).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));

        // triangle with the reverse arrow v2 -> v1 so that {v1, v2} is strongly connected
        let q = QuiverSetting::unit(3, &[(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let glued = glue_subquiver(&q, &["v1", "v2"]).unwrap();
        assert_eq!(glued.vertex_count(), 2);
        assert_eq!(glued.loop_count(0), 2);
        assert_eq!(glued.arrow_multiplicity(0, 1), 1);
        assert_eq!(glued.arrow_multiplicity(1, 0), 1);

        assert_eq!(glue_subquiver(&tri, &["v2"]).unwrap(), tri);
    }

    #[test]
    fn glue_g2_pair() {
        // {v1, v2} is not strongly connected in G2; glue {v1, v2, v3}'s
        // two-vertex images through a local quiver of a 2-cycle instead
        assert!(glue_subquiver(&g2(), &["v1", "v2"]).is_err());
        let whole = glue_subquiver(&g2(), &["v1", "v2", "v3"]).unwrap();
        assert_eq!(whole.vertex_count(), 1);
        assert_eq!(whole.loop_count(0), 6);
    }

    #[test]
    fn glue_keeps_arrow_ids() {
        let q = QuiverSetting::unit(4, &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 0), (0, 0)]).unwrap();
        let glued = glue_subquiver(&q, &["v1", "v2"]).unwrap();
        let before: Vec<_> = q.arrows().iter().map(|a| a.id.clone()).collect();
        let after: Vec<_> = glued.arrows().iter().map(|a| a.id.clone()).collect();
        assert_eq!(before, after);
        assert_eq!(glued.vertex(0).provenance.len(), 2);
    }

    #[test]
    fn local_quiver_split_of_two_loops() {
        // one vertex of dim 2 with two loops, point ε + ε
        let q = QuiverSetting::with_dims(&[2], &[(0, 0), (0, 0)]).unwrap();
        let d = Decomposition::from_vectors(&q, &[(1, vec![1]), (1, vec![1])]);
        let local = local_quiver(&q, &d).unwrap();
        assert_eq!(local.vertex_count(), 2);
        assert!(local.is_unit());
        assert_eq!(local.loop_count(0), 2);
        assert_eq!(local.loop_count(1), 2);
        assert_eq!(local.arrow_multiplicity(0, 1), 1);
        assert_eq!(local.arrow_multiplicity(1, 0), 1);
    }

    #[test]
    fn local_quiver_whole_part() {
        let q = QuiverSetting::unit(2, &[(0, 1), (0, 1), (0, 1), (1, 0), (1, 0)]).unwrap();
        let d = Decomposition::from_vectors(&q, &[(1, vec![1, 1])]);
        let local = local_quiver(&q, &d).unwrap();
        assert_eq!(local.vertex_count(), 1);
        assert_eq!(local.loop_count(0) as i64, 1 - q.euler_form());
    }

    #[test]
    fn local_quiver_matches_gluing() {
        let q = QuiverSetting::unit(3, &[(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let d = Decomposition::from_vectors(&q, &[(1, vec![1, 1, 0]), (1, vec![0, 0, 1])]);
        let local = local_quiver(&q, &d).unwrap();
        let glued = glue_subquiver(&q, &["v1", "v2"]).unwrap();
        // gluing keeps both internal arrows as loops; the formula keeps 1 + 2 − 2
        assert_eq!(glued.loop_count(0), 2);
        assert_eq!(local.loop_count(0), 1);
        assert!(is_isomorphic(&strip_unit_loops(&local), &strip_unit_loops(&glued)));
    }

    #[test]
    fn local_quiver_validation() {
        let q = QuiverSetting::oriented_cycle(3);
        // singletons of a loopless cycle have unique simples; each listed once is fine
        let singles = Decomposition::from_vectors(&q, &[(1, vec![1, 0, 0]), (1, vec![0, 1, 0]), (1, vec![0, 0, 1])]);
        let local = local_quiver(&q, &singles).unwrap();
        assert!(is_isomorphic(&local, &q));

        let short = Decomposition::from_vectors(&q, &[(1, vec![1, 1, 0])]);
        assert!(matches!(local_quiver(&q, &short), Err(Error::Validation(_))));

        let bare = QuiverSetting::with_dims(&[2], &[]).unwrap();
        let twice = Decomposition::from_vectors(&bare, &[(1, vec![1]), (1, vec![1])]);
        assert!(matches!(local_quiver(&bare, &twice), Err(Error::Validation(_))));
        let doubled = Decomposition::from_vectors(&bare, &[(2, vec![1])]);
        let point = local_quiver(&bare, &doubled).unwrap();
        assert_eq!(point.vertex_count(), 1);
        assert_eq!(point.dim(0), 2);
        assert_eq!(point.arrow_count(), 0);

        let unsimple = Decomposition::from_vectors(&q, &[(1, vec![1, 1, 0]), (1, vec![0, 0, 1])]);
        assert!(matches!(local_quiver(&q, &unsimple), Err(Error::Validation(_))));
    }

    #[test]
    fn decomposition_file_format() {
        let q = QuiverSetting::with_dims(&[2, 1], &[(0, 0), (0, 0), (0, 1), (1, 0)]).unwrap();
        let d = Decomposition::parse("# split\nmult 1 dims v1=1, v2=1\nmult 1 dims v1=1\n").unwrap();
        assert_eq!(d.parts.len(), 2);
        let local = local_quiver(&q, &d).unwrap();
        assert_eq!(local.vertex_count(), 2);
        assert!(Decomposition::parse("mult x dims v1=1").is_err());
        assert!(Decomposition::parse("dims v1=1").is_err());
    }
}
