//! Minimal generating sets for the ideal of relations among primitive cycles
//! of a one-dimensional setting.
//!
//! A binomial relation lives on an Eulerian arrow multiset `U`. Partitions of
//! `U` fall into classes linked by shared cycles, and `E(U)` is the number of
//! classes minus one. Classes are computed on cycles: `c ∼ d` when a chain of
//! cycles joins them with every consecutive sum inside `U`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cycles::{
    is_eulerian, is_primitive_cycle_multiset, partitions_with, primitive_cycles, ArrowMultiset,
    CyclePartition, PartCount, PrimitiveCycle, DEFAULT_PARTITION_CAP,
};
use crate::error::{Error, Result};
use crate::quiver::{ArrowId, QuiverSetting};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleStrength {
    Strong,
    Weak,
}

/// Strong when `U − c` is a single primitive cycle.
pub fn classify_cycle(q: &QuiverSetting, u: &ArrowMultiset, c: &PrimitiveCycle) -> Result<CycleStrength> {
    if u.arrow_count() != q.arrow_count() {
        return Err(Error::domain("multiset does not belong to this setting"));
    }
    let rest = u
        .minus(&c.multiset(q.arrow_count()))
        .ok_or_else(|| Error::domain(format!("cycle {c} is not contained in the multiset")))?;
    Ok(if is_primitive_cycle_multiset(q, &rest) {
        CycleStrength::Strong
    } else {
        CycleStrength::Weak
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut x = x;
        while self.0[x] != root {
            let next = self.0[x];
            self.0[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.0.len() {
            let r = self.find(x);
            groups.entry(r).or_default().push(x);
        }
        groups.into_values().collect()
    }
}

/// Cycles of a setting with their multisets, computed once.
pub struct CycleTable {
    pub cycles: Vec<PrimitiveCycle>,
    pub multisets: Vec<ArrowMultiset>,
}

impl CycleTable {
    pub fn new(q: &QuiverSetting) -> Result<Self> {
        let cycles = primitive_cycles(q)?;
        let multisets = cycles.iter().map(|c| c.multiset(q.arrow_count())).collect();
        Ok(CycleTable { cycles, multisets })
    }

    fn inside(&self, u: &ArrowMultiset) -> Vec<usize> {
        (0..self.cycles.len()).filter(|&i| u.contains(&self.multisets[i])).collect()
    }

    /// `∼_U` classes as index lists into the table.
    fn class_indices(&self, u: &ArrowMultiset) -> Vec<Vec<usize>> {
        let inside = self.inside(u);
        let mut uf = UnionFind::new(inside.len());
        for (x, &i) in inside.iter().enumerate() {
            let Some(rest) = u.minus(&self.multisets[i]) else { continue };
            for (y, &j) in inside.iter().enumerate().skip(x + 1) {
                if rest.contains(&self.multisets[j]) {
                    uf.union(x, y);
                }
            }
        }
        uf.classes()
            .into_iter()
            .map(|class| class.into_iter().map(|x| inside[x]).collect())
            .collect()
    }
}

fn eulerian_or_err(q: &QuiverSetting, u: &ArrowMultiset) -> Result<()> {
    if !is_eulerian(q, u)? {
        return Err(Error::domain("multiset is not Eulerian"));
    }
    Ok(())
}

/// The `∼_U` classes of the primitive cycles contained in `U`.
pub fn sim_u_classes(q: &QuiverSetting, u: &ArrowMultiset) -> Result<Vec<Vec<PrimitiveCycle>>> {
    eulerian_or_err(q, u)?;
    let table = CycleTable::new(q)?;
    Ok(table
        .class_indices(u)
        .into_iter()
        .map(|class| class.into_iter().map(|i| table.cycles[i].clone()).collect())
        .collect())
}

/// `E(U)`: number of `∼_U` classes minus one. The empty multiset gives 0.
pub fn e_value(q: &QuiverSetting, u: &ArrowMultiset) -> Result<u64> {
    eulerian_or_err(q, u)?;
    e_value_in(&CycleTable::new(q)?, u)
}

pub(crate) fn e_value_in(table: &CycleTable, u: &ArrowMultiset) -> Result<u64> {
    if u.is_zero() {
        return Ok(0);
    }
    let classes = table.class_indices(u).len() as u64;
    if classes == 0 {
        return Err(Error::domain("multiset has no partition into primitive cycles"));
    }
    Ok(classes - 1)
}

/// `E(U)` computed on partitions instead: components of the graph whose nodes
/// are the partitions of `U`, joined when they share a cycle, minus one.
pub fn fiber_e_value(q: &QuiverSetting, u: &ArrowMultiset) -> Result<u64> {
    eulerian_or_err(q, u)?;
    if u.is_zero() {
        return Ok(0);
    }
    let table = CycleTable::new(q)?;
    let parts = partitions_with(&table.cycles, &table.multisets, u, PartCount::Any, DEFAULT_PARTITION_CAP, None)?;
    if parts.is_empty() {
        return Err(Error::domain("multiset has no partition into primitive cycles"));
    }
    let mut uf = UnionFind::new(parts.len());
    let mut first_with: BTreeMap<usize, usize> = BTreeMap::new();
    for (p, part) in parts.iter().enumerate() {
        for &c in part {
            match first_with.get(&c) {
                Some(&other) => uf.union(p, other),
                None => {
                    first_with.insert(c, p);
                }
            }
        }
    }
    Ok(uf.classes().len() as u64 - 1)
}

/// True when all cycles weak in `U` lie in one `∼_U` class.
pub fn weak_cycle_check(q: &QuiverSetting, u: &ArrowMultiset) -> Result<bool> {
    eulerian_or_err(q, u)?;
    let table = CycleTable::new(q)?;
    Ok(weak_check_in(q, &table, u))
}

fn weak_check_in(q: &QuiverSetting, table: &CycleTable, u: &ArrowMultiset) -> bool {
    let mut class_of_weak = None;
    for (k, class) in table.class_indices(u).iter().enumerate() {
        for &i in class {
            let rest = u.minus(&table.multisets[i]).expect("cycle inside U");
            if !is_primitive_cycle_multiset(q, &rest) {
                match class_of_weak {
                    None => class_of_weak = Some(k),
                    Some(c) if c != k => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinomialRelation {
    pub lhs: CyclePartition,
    pub rhs: CyclePartition,
    pub multiset: Vec<(ArrowId, u32)>,
    /// Total arrow count of the multiset; cycle variables have degree equal
    /// to their length.
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultisetEntry {
    #[serde(skip)]
    pub multiset: ArrowMultiset,
    #[serde(rename = "multiset")]
    pub arrows: Vec<(ArrowId, u32)>,
    /// Number of partitions of `U` into two primitive cycles.
    pub strong_partitions: u32,
    pub has_weak_partition: bool,
    pub e_value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorReport {
    pub cycle_count: usize,
    pub per_multiset: Vec<MultisetEntry>,
    pub total: u64,
    pub generators: Vec<BinomialRelation>,
}

fn partition_of(table: &CycleTable, idx: &[usize]) -> CyclePartition {
    let mut cycles: Vec<PrimitiveCycle> = idx.iter().map(|&i| table.cycles[i].clone()).collect();
    cycles.sort();
    CyclePartition { cycles }
}

/// Minimal number of generators of the ideal of relations, with the chain of
/// strong binomials realising it. Candidate multisets are the sums of two
/// primitive cycles.
pub fn min_generators(q: &QuiverSetting) -> Result<GeneratorReport> {
    if !q.is_unit() {
        return Err(Error::domain("generator counts are implemented for one-dimensional settings"));
    }
    if !q.is_strongly_connected() {
        return Err(Error::domain("generator counts need a strongly connected setting"));
    }
    let table = CycleTable::new(q)?;
    let n = table.cycles.len();
    let mut pairs: BTreeMap<ArrowMultiset, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let u = table.multisets[i].plus(&table.multisets[j]);
            pairs.entry(u).or_default().push((i, j));
        }
    }
    let groups: Vec<(ArrowMultiset, Vec<(usize, usize)>)> = pairs.into_iter().collect();
    let computed = groups
        .par_iter()
        .map(|(u, two)| multiset_generators(q, &table, u, two))
        .collect::<Result<Vec<_>>>()?;

    let mut per_multiset = Vec::new();
    let mut generators = Vec::new();
    for (entry, gens) in computed {
        per_multiset.push(entry);
        generators.extend(gens);
    }
    let total = per_multiset.iter().map(|e| e.e_value).sum();
    Ok(GeneratorReport {
        cycle_count: n,
        per_multiset,
        total,
        generators,
    })
}

fn multiset_generators(
    q: &QuiverSetting,
    table: &CycleTable,
    u: &ArrowMultiset,
    two: &[(usize, usize)],
) -> Result<(MultisetEntry, Vec<BinomialRelation>)> {
    let inside = table.inside(u);
    let mut strong: Vec<usize> = two.iter().flat_map(|&(i, j)| [i, j]).collect();
    strong.sort_unstable();
    strong.dedup();
    let weak = inside.iter().find(|i| strong.binary_search(i).is_err()).copied();
    let k = two.len() as u64;
    let e = k - 1 + u64::from(weak.is_some());

    let arrows = u.to_pairs(q);
    let degree = u.total();
    let mut partitions: Vec<CyclePartition> = two.iter().map(|&(i, j)| partition_of(table, &[i, j])).collect();
    partitions.sort();
    let mut gens: Vec<BinomialRelation> = partitions
        .windows(2)
        .map(|w| BinomialRelation {
            lhs: w[0].clone(),
            rhs: w[1].clone(),
            multiset: arrows.clone(),
            degree,
        })
        .collect();
    if let Some(w) = weak {
        let rest = u.minus(&table.multisets[w]).expect("cycle inside U");
        let found = partitions_with(&table.cycles, &table.multisets, &rest, PartCount::Any, DEFAULT_PARTITION_CAP, Some(1))?;
        let Some(mut tail) = found.into_iter().next() else {
            return Err(Error::Inconsistent("complement of a cycle in an Eulerian multiset has no partition".into()));
        };
        tail.push(w);
        gens.push(BinomialRelation {
            lhs: partitions.last().expect("k ≥ 1").clone(),
            rhs: partition_of(table, &tail),
            multiset: arrows.clone(),
            degree,
        });
    }
    Ok((
        MultisetEntry {
            multiset: u.clone(),
            arrows,
            strong_partitions: k as u32,
            has_weak_partition: weak.is_some(),
            e_value: e,
        },
        gens,
    ))
}

/// Complete intersection test: the minimal generator count equals `F(Q)`.
pub fn is_ci_toric(q: &QuiverSetting) -> Result<bool> {
    let report = min_generators(q)?;
    let f = q.vertex_count() as i64 - q.arrow_count() as i64 - 1 + report.cycle_count as i64;
    Ok(report.total as i64 == f)
}

/// Every multiset that is a sum of two primitive cycles, deduplicated.
pub fn two_cycle_sums(q: &QuiverSetting) -> Result<Vec<ArrowMultiset>> {
    let table = CycleTable::new(q)?;
    let mut sums = Vec::new();
    for i in 0..table.cycles.len() {
        for j in i..table.cycles.len() {
            sums.push(table.multisets[i].plus(&table.multisets[j]));
        }
    }
    sums.sort();
    sums.dedup();
    Ok(sums)
}

/// Checks, for every two-cycle sum `U` of `q`, that the cycle-class and
/// fiber-graph values of `E(U)` agree and that all weak cycles are
/// equivalent. Returns the first offending multiset.
pub fn section_consistency(q: &QuiverSetting) -> Result<Option<(ArrowMultiset, String)>> {
    let table = CycleTable::new(q)?;
    for u in two_cycle_sums(q)? {
        let by_cycles = e_value_in(&table, &u)?;
        let by_fiber = fiber_e_value(q, &u)?;
        if by_cycles != by_fiber {
            return Ok(Some((u, format!("E by cycles {by_cycles}, by fiber graph {by_fiber}"))));
        }
        if !weak_check_in(q, &table, &u) {
            return Ok(Some((u, "weak cycles fall into more than one class".into())));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::partitions_into_cycles;

    fn g1() -> QuiverSetting {
        QuiverSetting::unit(2, &[(0, 1), (0, 1), (0, 1), (1, 0), (1, 0)]).unwrap()
    }

    fn g2() -> QuiverSetting {
        QuiverSetting::unit(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 0)]).unwrap()
    }

    fn c1() -> QuiverSetting {
        QuiverSetting::unit(2, &[(0, 1), (0, 1), (1, 0), (1, 0)]).unwrap()
    }

    fn cycle(q: &QuiverSetting, text: &str) -> PrimitiveCycle {
        primitive_cycles(q).unwrap().into_iter().find(|c| c.to_string() == text).unwrap()
    }

    #[test]
    fn strength_examples() {
        let q = c1();
        let all = ArrowMultiset::from_arrows(4, &[0, 1, 2, 3]);
        assert_eq!(classify_cycle(&q, &all, &cycle(&q, "(a1 a3)")).unwrap(), CycleStrength::Strong);
        let c = cycle(&q, "(a1 a3)");
        assert_eq!(classify_cycle(&q, &c.multiset(4), &c).unwrap(), CycleStrength::Weak);
        assert!(classify_cycle(&q, &cycle(&q, "(a2 a4)").multiset(4), &c).is_err());

        let g = g2();
        let all = ArrowMultiset::from_arrows(6, &[0, 1, 2, 3, 4, 5]);
        for c in primitive_cycles(&g).unwrap() {
            assert_eq!(classify_cycle(&g, &all, &c).unwrap(), CycleStrength::Strong);
        }
    }

    #[test]
    fn class_examples() {
        let q = c1();
        let all = ArrowMultiset::from_arrows(4, &[0, 1, 2, 3]);
        assert_eq!(sim_u_classes(&q, &all).unwrap().len(), 2);
        assert_eq!(e_value(&q, &all).unwrap(), 1);
        assert_eq!(fiber_e_value(&q, &all).unwrap(), 1);

        let disjoint = QuiverSetting::unit(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let both = ArrowMultiset::from_arrows(4, &[0, 1, 2, 3]);
        assert_eq!(sim_u_classes(&disjoint, &both).unwrap().len(), 1);
        assert_eq!(e_value(&disjoint, &both).unwrap(), 0);

        let c = cycle(&q, "(a1 a3)").multiset(4);
        assert_eq!(sim_u_classes(&q, &c).unwrap().len(), 1);
        assert_eq!(e_value(&q, &c).unwrap(), 0);
    }

    #[test]
    fn g1_sub_multiset_has_two_classes() {
        let q = g1();
        // a1 + a2 + b1 + b2 with a_i : v1 -> v2 and b_k : v2 -> v1
        let u = ArrowMultiset::from_arrows(5, &[0, 1, 3, 4]);
        assert_eq!(e_value(&q, &u).unwrap(), 1);
        assert_eq!(fiber_e_value(&q, &u).unwrap(), 1);
    }

    #[test]
    fn generator_totals() {
        assert_eq!(min_generators(&QuiverSetting::oriented_cycle(4)).unwrap().total, 0);
        let report = min_generators(&c1()).unwrap();
        assert_eq!(report.total, 1);
        assert_eq!(report.generators.len(), 1);
        assert_eq!(report.generators[0].lhs.to_string(), "(a1 a3) (a2 a4)");
        assert_eq!(report.generators[0].rhs.to_string(), "(a1 a4) (a2 a3)");
        assert_eq!(report.generators[0].degree, 4);
        assert_eq!(min_generators(&g1()).unwrap().total, 3);
        assert_eq!(min_generators(&g2()).unwrap().total, 9);
    }

    #[test]
    fn generator_count_matches_chain_length() {
        for q in [g1(), g2(), c1()] {
            let report = min_generators(&q).unwrap();
            assert_eq!(report.total as usize, report.generators.len());
            for g in &report.generators {
                assert_ne!(g.lhs, g.rhs);
            }
        }
    }

    #[test]
    fn ci_examples() {
        assert!(is_ci_toric(&c1()).unwrap());
        assert!(!is_ci_toric(&g1()).unwrap());
        assert!(!is_ci_toric(&g2()).unwrap());
        assert!(is_ci_toric(&QuiverSetting::oriented_cycle(6)).unwrap());
    }

    #[test]
    fn weak_cycles_examples() {
        let q = c1();
        assert!(weak_cycle_check(&q, &ArrowMultiset::from_arrows(4, &[0, 1, 2, 3])).unwrap());
        let three = QuiverSetting::unit(6, &[(0, 1), (1, 0), (2, 3), (3, 2), (4, 5), (5, 4)]).unwrap();
        assert!(weak_cycle_check(&three, &ArrowMultiset::from_arrows(6, &[0, 1, 2, 3, 4, 5])).unwrap());
    }

    #[test]
    fn consistency_on_targets() {
        for q in [g1(), g2(), c1()] {
            assert_eq!(section_consistency(&q).unwrap(), None);
        }
    }

    #[test]
    fn trivial_intersection_matches_e_value() {
        for q in [g1(), g2(), c1()] {
            let cycles = primitive_cycles(&q).unwrap();
            let m = q.arrow_count();
            for c in &cycles {
                for d in &cycles {
                    let u = c.multiset(m).plus(&d.multiset(m));
                    let trivial = e_value(&q, &u).unwrap() == 0
                        && partitions_into_cycles(&q, &u, PartCount::Any).unwrap().len() == 1;
                    assert_eq!(crate::cycles::trivially_intersecting(c, d), trivial, "{c} {d}");
                }
            }
        }
    }
}
