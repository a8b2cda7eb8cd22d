//! Breadth-first search over descendants of a one-dimensional setting.
//!
//! Moves: RI at any applicable vertex, deleting one arrow (one per parallel
//! class, keeping each nontrivial strongly connected remainder), and gluing a
//! strongly connected vertex subset. Every move is followed by stripping
//! loops with RII, so states are loopless. None of the moves increases the
//! number of arrows, which bounds the search from below by the smallest
//! target.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{TargetName, TargetQuiver, Witness};
use crate::error::{Error, Result};
use crate::local::glue_at;
use crate::quiver::{canonical_form, CanonicalForm, QuiverSetting};
use crate::reductions::{ri_at, ri_ok, rii_at, rii_ok};
use crate::trace::{ReductionTrace, Step, StepKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescendantOptions {
    /// Maximum number of distinct states visited.
    pub budget: usize,
    /// Largest vertex subset glued in one move.
    pub max_glue: usize,
}

impl Default for DescendantOptions {
    fn default() -> Self {
        DescendantOptions {
            budget: 100_000,
            max_glue: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found(Witness),
    /// The move graph was exhausted without reaching a target.
    NoneFound { explored: usize },
    /// The state budget ran out first.
    Inconclusive { explored: usize },
}

fn step(kind: StepKind, before: &QuiverSetting, after: QuiverSetting, free_vars: u32) -> Step {
    Step {
        kind,
        before: before.clone(),
        after,
        free_vars,
    }
}

/// Appends RII steps until no one-dimensional vertex has a loop.
fn strip_loops(steps: &mut Vec<Step>, mut q: QuiverSetting) -> QuiverSetting {
    while let Some(v) = (0..q.vertex_count()).find(|&v| rii_ok(&q, v)) {
        let (next, k) = rii_at(&q, v);
        let kind = StepKind::Rii {
            vertex: q.vertex(v).id.clone(),
            loops: k,
        };
        steps.push(step(kind, &q, next.clone(), k));
        q = next;
    }
    q
}

/// Restrictions of `trimmed` to each strongly connected component with at
/// least two vertices, as subquiver steps from `q`.
fn keep_components(q: &QuiverSetting, drop_arrows: Vec<usize>) -> Vec<Vec<Step>> {
    let trimmed = q.without_arrows(&drop_arrows);
    let comps = trimmed.scc_vertex_sets();
    comps
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|comp| {
            let inside: BTreeSet<usize> = comp.iter().copied().collect();
            let drop_vertices = (0..trimmed.vertex_count())
                .filter(|v| !inside.contains(v))
                .map(|v| trimmed.vertex(v).id.clone())
                .collect();
            let kind = StepKind::Subquiver {
                drop_arrows: drop_arrows.iter().map(|&a| q.arrow(a).id.clone()).collect(),
                drop_vertices,
            };
            vec![step(kind, q, trimmed.induced_on(comp), 0)]
        })
        .collect()
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn moves(q: &QuiverSetting, opts: &DescendantOptions) -> Vec<Vec<Step>> {
    let n = q.vertex_count();
    let mut out = Vec::new();

    for v in 0..n {
        if n > 1 && ri_ok(q, v) {
            let kind = StepKind::Ri {
                vertex: q.vertex(v).id.clone(),
            };
            out.push(vec![step(kind, q, ri_at(q, v), 0)]);
        }
    }

    // one representative per parallel class: the last arrow of the class
    let mut last_of_class: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, a) in q.arrows().iter().enumerate() {
        last_of_class.insert((a.source, a.target), i);
    }
    let mut reps: Vec<usize> = last_of_class.into_values().collect();
    reps.sort_unstable();
    for a in reps {
        out.extend(keep_components(q, vec![a]));
    }

    for size in 2..=opts.max_glue.min(n.saturating_sub(1)) {
        for subset in subsets(n, size) {
            if !q.induced_on(&subset).is_strongly_connected() {
                continue;
            }
            let glued = glue_at(q, &subset).expect("strongly connected subset");
            let kind = StepKind::Glue {
                vertices: subset.iter().map(|&v| q.vertex(v).id.clone()).collect(),
            };
            out.push(vec![step(kind, q, glued, 0)]);
        }
    }

    for steps in &mut out {
        let last = steps.last().expect("non-empty move").after.clone();
        strip_loops(steps, last);
    }
    out
}

struct Node {
    parent: Option<usize>,
    steps: Vec<Step>,
}

fn non_loop_arrows(q: &QuiverSetting) -> usize {
    q.arrows().iter().filter(|a| !a.is_loop()).count()
}

/// Searches for a descendant isomorphic to one of `targets`. The returned
/// witness replays from `q`. `NoneFound` is only reported when every
/// reachable state has been explored.
pub fn find_forbidden_descendant(
    q: &QuiverSetting,
    targets: &[TargetName],
    opts: &DescendantOptions,
) -> Result<SearchOutcome> {
    if !q.is_unit() {
        return Err(Error::domain("the descendant search needs dimension vector (1,...,1)"));
    }
    if targets.is_empty() {
        return Err(Error::domain("no targets given"));
    }
    let wanted: HashMap<CanonicalForm, TargetName> = targets
        .iter()
        .map(|&t| (canonical_form(&TargetQuiver::new(t).setting), t))
        .collect();
    let min_arrows = targets
        .iter()
        .map(|&t| non_loop_arrows(&TargetQuiver::new(t).setting))
        .min()
        .unwrap_or(0);
    let min_vertices = targets
        .iter()
        .map(|&t| TargetQuiver::new(t).setting.vertex_count())
        .min()
        .unwrap_or(1);
    let viable = |s: &QuiverSetting| s.vertex_count() >= min_vertices && non_loop_arrows(s) >= min_arrows;

    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    let mut frontier: Vec<(usize, QuiverSetting)> = Vec::new();

    let witness = |nodes: &[Node], mut at: usize, target: TargetName| {
        let mut chain = Vec::new();
        loop {
            chain.push(at);
            match nodes[at].parent {
                Some(p) => at = p,
                None => break,
            }
        }
        let mut trace = ReductionTrace::new();
        for &i in chain.iter().rev() {
            for s in &nodes[i].steps {
                trace.push(s.kind.clone(), s.before.clone(), s.after.clone(), s.free_vars);
            }
        }
        SearchOutcome::Found(Witness {
            target,
            start: q.clone(),
            trace,
        })
    };

    // the start, split into its nontrivial strongly connected components
    let mut opening = Vec::new();
    let start = strip_loops(&mut opening, q.clone());
    let starts: Vec<Vec<Step>> = if start.is_strongly_connected() {
        vec![opening]
    } else {
        keep_components(&start, Vec::new())
            .into_iter()
            .map(|mut s| {
                let mut all = opening.clone();
                all.append(&mut s);
                all
            })
            .collect()
    };
    for steps in starts {
        let state = steps.last().map_or_else(|| start.clone(), |s| s.after.clone());
        let form = canonical_form(&state);
        if !seen.insert(form.clone()) {
            continue;
        }
        nodes.push(Node { parent: None, steps });
        let id = nodes.len() - 1;
        if let Some(&t) = wanted.get(&form) {
            return Ok(witness(&nodes, id, t));
        }
        if viable(&state) {
            frontier.push((id, state));
        }
    }

    while !frontier.is_empty() {
        let expanded: Vec<Vec<(Vec<Step>, QuiverSetting, CanonicalForm)>> = frontier
            .par_iter()
            .map(|(_, state)| {
                moves(state, opts)
                    .into_iter()
                    .filter_map(|steps| {
                        let end = steps.last().expect("non-empty move").after.clone();
                        viable(&end).then(|| {
                            let form = canonical_form(&end);
                            (steps, end, form)
                        })
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for ((parent, _), children) in frontier.iter().zip(expanded) {
            for (steps, end, form) in children {
                if !seen.insert(form.clone()) {
                    continue;
                }
                nodes.push(Node {
                    parent: Some(*parent),
                    steps,
                });
                let id = nodes.len() - 1;
                if let Some(&t) = wanted.get(&form) {
                    return Ok(witness(&nodes, id, t));
                }
                if seen.len() >= opts.budget {
                    return Ok(SearchOutcome::Inconclusive { explored: seen.len() });
                }
                next.push((id, end));
            }
        }
        frontier = next;
    }
    Ok(SearchOutcome::NoneFound { explored: seen.len() })
}
