//! Primitive cycles, arrow multisets and partitions of multisets into cycles.
//!
//! A primitive cycle is a closed walk that visits no vertex twice; parallel
//! arrows give distinct cycles and a loop is a cycle of length one.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quiver::{ArrowId, QuiverSetting};

pub const DEFAULT_CYCLE_CAP: u64 = 1_000_000;
pub const DEFAULT_PARTITION_CAP: u64 = 1_000_000;

/// Multiplicity per arrow, indexed by the arrow's position in its setting.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowMultiset(Vec<u32>);

impl ArrowMultiset {
    pub fn zero(arrow_count: usize) -> Self {
        ArrowMultiset(vec![0; arrow_count])
    }

    pub fn from_arrows(arrow_count: usize, arrows: &[usize]) -> Self {
        let mut m = Self::zero(arrow_count);
        for &a in arrows {
            m.0[a] += 1;
        }
        m
    }

    /// Builds a multiset from arrow ids of `q`.
    pub fn from_ids<S: AsRef<str>>(q: &QuiverSetting, ids: &[S]) -> Result<Self> {
        let idx = ids
            .iter()
            .map(|a| q.arrow_index(a.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_arrows(q.arrow_count(), &idx))
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        ArrowMultiset(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, arrow: usize) -> u32 {
        self.0[arrow]
    }

    pub fn arrow_count(&self) -> usize {
        self.0.len()
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }

    pub fn plus(&self, other: &Self) -> Self {
        ArrowMultiset(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other`, or `None` unless `other ≤ self`.
    pub fn minus(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(ArrowMultiset)
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Sorted `(arrow id, multiplicity)` pairs for the nonzero entries.
    pub fn to_pairs(&self, q: &QuiverSetting) -> Vec<(ArrowId, u32)> {
        let mut pairs: Vec<(ArrowId, u32)> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(a, &m)| (q.arrow(a).id.clone(), m))
            .collect();
        pairs.sort();
        pairs
    }

    pub fn describe(&self, q: &QuiverSetting) -> String {
        let parts: Vec<String> = self
            .to_pairs(q)
            .into_iter()
            .map(|(a, m)| if m == 1 { a.to_string() } else { format!("{a}^{m}") })
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimitiveCycle {
    /// Arrow indices in travel order, rotated so the smallest comes first.
    #[serde(skip)]
    pub arrows: Vec<usize>,
    /// Sorted vertex indices.
    #[serde(skip)]
    pub vertices: Vec<usize>,
    #[serde(rename = "arrows")]
    pub ids: Vec<ArrowId>,
}

impl PrimitiveCycle {
    pub(crate) fn from_walk(q: &QuiverSetting, walk: &[usize]) -> Self {
        let start = (0..walk.len()).min_by_key(|&i| walk[i]).unwrap_or(0);
        let mut arrows = walk[start..].to_vec();
        arrows.extend_from_slice(&walk[..start]);
        let mut vertices: Vec<usize> = arrows.iter().map(|&a| q.arrow(a).source).collect();
        vertices.sort_unstable();
        let ids = arrows.iter().map(|&a| q.arrow(a).id.clone()).collect();
        PrimitiveCycle { arrows, vertices, ids }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn multiset(&self, arrow_count: usize) -> ArrowMultiset {
        ArrowMultiset::from_arrows(arrow_count, &self.arrows)
    }
}

impl fmt::Display for PrimitiveCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<&str> = self.ids.iter().map(ArrowId::as_str).collect();
        write!(f, "({})", ids.join(" "))
    }
}

/// A multiset of primitive cycles, sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CyclePartition {
    pub cycles: Vec<PrimitiveCycle>,
}

impl fmt::Display for CyclePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cycles.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn primitive_cycles(q: &QuiverSetting) -> Result<Vec<PrimitiveCycle>> {
    primitive_cycles_capped(q, DEFAULT_CYCLE_CAP)
}

/// Enumerates every primitive cycle, rooting each at its smallest vertex.
/// Fails once more than `cap` cycles have been found.
pub fn primitive_cycles_capped(q: &QuiverSetting, cap: u64) -> Result<Vec<PrimitiveCycle>> {
    let n = q.vertex_count();
    let out_arrows = q.out_arrows();
    let mut found = Vec::new();
    let mut on_path = vec![false; n];
    let mut walk = Vec::new();

    struct Search<'a> {
        q: &'a QuiverSetting,
        out: &'a [Vec<usize>],
        root: usize,
        cap: u64,
    }

    fn extend(
        s: &Search<'_>,
        v: usize,
        on_path: &mut [bool],
        walk: &mut Vec<usize>,
        found: &mut Vec<PrimitiveCycle>,
    ) -> Result<()> {
        for &a in &s.out[v] {
            let w = s.q.arrow(a).target;
            if w == s.root {
                walk.push(a);
                found.push(PrimitiveCycle::from_walk(s.q, walk));
                walk.pop();
                if found.len() as u64 > s.cap {
                    return Err(Error::Resource {
                        what: "enumerating primitive cycles",
                        cap: s.cap,
                    });
                }
            } else if w > s.root && !on_path[w] {
                on_path[w] = true;
                walk.push(a);
                extend(s, w, on_path, walk, found)?;
                walk.pop();
                on_path[w] = false;
            }
        }
        Ok(())
    }

    for root in 0..n {
        let s = Search {
            q,
            out: &out_arrows,
            root,
            cap,
        };
        on_path[root] = true;
        extend(&s, root, &mut on_path, &mut walk, &mut found)?;
        on_path[root] = false;
    }
    found.sort();
    Ok(found)
}

/// `F(Q) = |C| + |V| − |A| − 1` for a strongly connected one-dimensional
/// setting.
pub fn f_value(q: &QuiverSetting) -> Result<i64> {
    if !q.is_unit() {
        return Err(Error::domain("F is defined for one-dimensional settings"));
    }
    if !q.is_strongly_connected() {
        return Err(Error::domain("F is defined for strongly connected settings"));
    }
    let c = primitive_cycles(q)?.len() as i64;
    Ok(c + q.vertex_count() as i64 - q.arrow_count() as i64 - 1)
}

fn check_domain(q: &QuiverSetting, u: &ArrowMultiset) -> Result<()> {
    if u.arrow_count() != q.arrow_count() {
        return Err(Error::domain("multiset does not belong to this setting"));
    }
    Ok(())
}

/// Every vertex has equal in- and out-degree with respect to `u`.
pub fn is_eulerian(q: &QuiverSetting, u: &ArrowMultiset) -> Result<bool> {
    check_domain(q, u)?;
    let mut balance = vec![0i64; q.vertex_count()];
    for (a, &m) in u.counts().iter().enumerate() {
        let arrow = q.arrow(a);
        balance[arrow.source] -= i64::from(m);
        balance[arrow.target] += i64::from(m);
    }
    Ok(balance.iter().all(|&b| b == 0))
}

/// Whether `u` is exactly the arrow set of one primitive cycle.
pub fn is_primitive_cycle_multiset(q: &QuiverSetting, u: &ArrowMultiset) -> bool {
    if u.is_zero() || u.counts().iter().any(|&m| m > 1) {
        return false;
    }
    let arrows: Vec<usize> = (0..u.arrow_count()).filter(|&a| u.get(a) == 1).collect();
    let mut next = vec![None; q.vertex_count()];
    for &a in &arrows {
        let s = q.arrow(a).source;
        if next[s].is_some() {
            return false;
        }
        next[s] = Some(a);
    }
    // follow the walk from the first arrow; it must close after using all arrows
    let start = q.arrow(arrows[0]).source;
    let mut v = start;
    for step in 0..arrows.len() {
        let Some(a) = next[v] else { return false };
        v = q.arrow(a).target;
        if v == start {
            return step + 1 == arrows.len();
        }
    }
    false
}

/// Part-count filter for [`partitions_into_cycles`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartCount {
    Any,
    AtMost(usize),
    Exactly(usize),
    AtLeast(usize),
}

impl PartCount {
    fn admits(self, k: usize) -> bool {
        match self {
            PartCount::Any => true,
            PartCount::AtMost(m) => k <= m,
            PartCount::Exactly(m) => k == m,
            PartCount::AtLeast(m) => k >= m,
        }
    }

    fn may_grow_past(self, k: usize) -> bool {
        match self {
            PartCount::AtMost(m) | PartCount::Exactly(m) => k < m,
            _ => true,
        }
    }
}

/// Partitions of `u` as sorted index lists into `cycles`. Each step takes a
/// cycle through the least remaining arrow; while that arrow stays the pivot
/// the chosen indices are nondecreasing, so every multiset appears once.
pub(crate) fn partitions_with(
    cycles: &[PrimitiveCycle],
    multisets: &[ArrowMultiset],
    u: &ArrowMultiset,
    filter: PartCount,
    cap: u64,
    limit: Option<usize>,
) -> Result<Vec<Vec<usize>>> {
    struct Ctx<'a> {
        multisets: &'a [ArrowMultiset],
        through: Vec<Vec<usize>>,
        filter: PartCount,
        cap: u64,
        limit: Option<usize>,
        visited: u64,
    }

    fn go(
        ctx: &mut Ctx<'_>,
        rest: &ArrowMultiset,
        chosen: &mut Vec<usize>,
        last: Option<(usize, usize)>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<bool> {
        ctx.visited += 1;
        if ctx.visited > ctx.cap {
            return Err(Error::Resource {
                what: "enumerating cycle partitions",
                cap: ctx.cap,
            });
        }
        let Some(pivot) = rest.counts().iter().position(|&m| m > 0) else {
            if ctx.filter.admits(chosen.len()) {
                let mut p = chosen.clone();
                p.sort_unstable();
                out.push(p);
                return Ok(ctx.limit.is_some_and(|l| out.len() >= l));
            }
            return Ok(false);
        };
        if !ctx.filter.may_grow_past(chosen.len()) {
            return Ok(false);
        }
        let floor = match last {
            Some((p, i)) if p == pivot => i,
            _ => 0,
        };
        let candidates: Vec<usize> = ctx.through[pivot]
            .iter()
            .copied()
            .filter(|&c| c >= floor)
            .collect();
        for c in candidates {
            if let Some(next) = rest.minus(&ctx.multisets[c]) {
                chosen.push(c);
                let stop = go(ctx, &next, chosen, Some((pivot, c)), out)?;
                chosen.pop();
                if stop {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    let mut through = vec![Vec::new(); u.arrow_count()];
    for (i, c) in cycles.iter().enumerate() {
        if u.contains(&multisets[i]) {
            for &a in &c.arrows {
                through[a].push(i);
            }
        }
    }
    let mut ctx = Ctx {
        multisets,
        through,
        filter,
        cap,
        limit,
        visited: 0,
    };
    let mut out = Vec::new();
    go(&mut ctx, u, &mut Vec::new(), None, &mut out)?;
    out.sort();
    Ok(out)
}

/// All partitions of an Eulerian multiset into primitive cycles, in sorted
/// order.
pub fn partitions_into_cycles(
    q: &QuiverSetting,
    u: &ArrowMultiset,
    filter: PartCount,
) -> Result<Vec<CyclePartition>> {
    if !is_eulerian(q, u)? {
        return Err(Error::domain("multiset is not Eulerian"));
    }
    let cycles = primitive_cycles(q)?;
    let sets: Vec<ArrowMultiset> = cycles.iter().map(|c| c.multiset(q.arrow_count())).collect();
    let raw = partitions_with(&cycles, &sets, u, filter, DEFAULT_PARTITION_CAP, None)?;
    let mut parts: Vec<CyclePartition> = raw
        .into_iter()
        .map(|p| CyclePartition {
            cycles: p.into_iter().map(|i| cycles[i].clone()).collect(),
        })
        .collect();
    parts.sort();
    Ok(parts)
}

/// Two cycles intersect trivially when they are vertex-disjoint or meet in a
/// single directed path. A cycle intersects itself trivially.
pub fn trivially_intersecting(c1: &PrimitiveCycle, c2: &PrimitiveCycle) -> bool {
    if c1 == c2 {
        return true;
    }
    let v1: BTreeSet<usize> = c1.vertices.iter().copied().collect();
    let shared_vertices = c2.vertices.iter().filter(|v| v1.contains(v)).count();
    if shared_vertices == 0 {
        return true;
    }
    let a1: BTreeSet<usize> = c1.arrows.iter().copied().collect();
    let shared_arrows = c2.arrows.iter().filter(|a| a1.contains(a)).count();
    // shared arrows form vertex-disjoint paths on the shared vertices
    shared_arrows + 1 == shared_vertices
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> QuiverSetting {
        QuiverSetting::unit(2, &[(0, 1), (0, 1), (0, 1), (1, 0), (1, 0)]).unwrap()
    }

    fn g2() -> QuiverSetting {
        QuiverSetting::unit(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 0)]).unwrap()
    }

    fn c1() -> QuiverSetting {
        QuiverSetting::unit(2, &[(0, 1), (0, 1), (1, 0), (1, 0)]).unwrap()
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(primitive_cycles(&QuiverSetting::oriented_cycle(5)).unwrap().len(), 1);
        assert_eq!(primitive_cycles(&g1()).unwrap().len(), 6);
        assert_eq!(primitive_cycles(&g2()).unwrap().len(), 8);
        assert_eq!(primitive_cycles(&c1()).unwrap().len(), 4);
        let loops = QuiverSetting::unit(1, &[(0, 0), (0, 0)]).unwrap();
        assert_eq!(primitive_cycles(&loops).unwrap().len(), 2);
    }

    #[test]
    fn cycle_cap_is_an_error() {
        let err = primitive_cycles_capped(&g1(), 5).unwrap_err();
        assert!(matches!(err, Error::Resource { cap: 5, .. }));
    }

    #[test]
    fn canonical_rotation() {
        let q = QuiverSetting::unit(3, &[(1, 2), (2, 0), (0, 1)]).unwrap();
        let cycles = primitive_cycles(&q).unwrap();
        assert_eq!(cycles[0].arrows, vec![0, 1, 2]);
        assert_eq!(cycles[0].to_string(), "(a1 a2 a3)");
    }

    #[test]
    fn f_values() {
        assert_eq!(f_value(&QuiverSetting::oriented_cycle(4)).unwrap(), 0);
        assert_eq!(f_value(&g1()).unwrap(), 2);
        assert_eq!(f_value(&g2()).unwrap(), 4);
        assert_eq!(f_value(&c1()).unwrap(), 1);
        assert!(f_value(&QuiverSetting::unit(2, &[(0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn eulerian_examples() {
        let q = g1();
        let cycles = primitive_cycles(&q).unwrap();
        let m = q.arrow_count();
        assert!(is_eulerian(&q, &cycles[0].multiset(m)).unwrap());
        assert!(!is_eulerian(&q, &ArrowMultiset::from_arrows(m, &[0])).unwrap());
        let sum = cycles[0].multiset(m).plus(&cycles[3].multiset(m));
        assert!(is_eulerian(&q, &sum).unwrap());
        assert!(is_eulerian(&q, &ArrowMultiset::zero(3)).is_err());
    }

    #[test]
    fn primitive_multiset_recognition() {
        let q = c1();
        assert!(is_primitive_cycle_multiset(&q, &ArrowMultiset::from_arrows(4, &[0, 2])));
        assert!(!is_primitive_cycle_multiset(&q, &ArrowMultiset::from_arrows(4, &[0, 1, 2, 3])));
        assert!(!is_primitive_cycle_multiset(&q, &ArrowMultiset::from_arrows(4, &[0, 0, 2, 2])));
        assert!(!is_primitive_cycle_multiset(&q, &ArrowMultiset::zero(4)));
    }

    #[test]
    fn c1_partitions() {
        let q = c1();
        let all = ArrowMultiset::from_ids(&q, &["a1", "a2", "a3", "a4"]).unwrap();
        let parts = partitions_into_cycles(&q, &all, PartCount::Any).unwrap();
        let text: Vec<String> = parts.iter().map(ToString::to_string).collect();
        assert_eq!(text, ["(a1 a3) (a2 a4)", "(a1 a4) (a2 a3)"]);
    }

    #[test]
    fn single_and_doubled_cycle() {
        let q = QuiverSetting::oriented_cycle(3);
        let c = ArrowMultiset::from_arrows(3, &[0, 1, 2]);
        assert_eq!(partitions_into_cycles(&q, &c, PartCount::Any).unwrap().len(), 1);
        let parts = partitions_into_cycles(&q, &c.plus(&c), PartCount::Any).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].cycles.len(), 2);
    }

    #[test]
    fn part_count_filters() {
        // two loops and a 2-cycle through the same vertex
        let q = QuiverSetting::unit(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let all = ArrowMultiset::from_arrows(4, &[0, 1, 2, 3]);
        assert_eq!(partitions_into_cycles(&q, &all, PartCount::Any).unwrap().len(), 1);
        assert_eq!(partitions_into_cycles(&q, &all, PartCount::Exactly(3)).unwrap().len(), 1);
        assert!(partitions_into_cycles(&q, &all, PartCount::AtMost(2)).unwrap().is_empty());
        assert!(partitions_into_cycles(&q, &ArrowMultiset::from_arrows(4, &[1]), PartCount::Any).is_err());
    }

    #[test]
    fn trivial_intersections() {
        let q = c1();
        let cycles = primitive_cycles(&q).unwrap();
        let by_text = |s: &str| cycles.iter().find(|c| c.to_string() == s).unwrap().clone();
        assert!(!trivially_intersecting(&by_text("(a1 a3)"), &by_text("(a2 a4)")));
        assert!(trivially_intersecting(&by_text("(a1 a3)"), &by_text("(a1 a4)")));

        let eight = QuiverSetting::unit(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap();
        let cs = primitive_cycles(&eight).unwrap();
        assert!(trivially_intersecting(&cs[0], &cs[1]));

        let disjoint = QuiverSetting::unit(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let cs = primitive_cycles(&disjoint).unwrap();
        assert!(trivially_intersecting(&cs[0], &cs[1]));
    }
}
