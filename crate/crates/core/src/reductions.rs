//! The reduction calculus RI–RIV and the driver that applies it to a fixed
//! point.
//!
//! * RI removes a loopless vertex `v` with `χ(α, ε_v) ≥ 0` or `χ(ε_v, α) ≥ 0`,
//!   composing every incoming arrow with every outgoing one.
//! * RII strips the loops of a one-dimensional vertex; each loop is a free
//!   variable.
//! * RIII removes the single loop of a vertex of dimension `k ≥ 2` whose only
//!   other outgoing (or incoming) arrow meets a one-dimensional vertex. That
//!   arrow is replaced by `k` parallel copies and the loop contributes `k`
//!   free variables.
//! * RIV glues a connected pair `(v1, v2)` of a one-dimensional setting when
//!   there are exactly two paths each way, or exactly one path in some
//!   direction. It preserves the complete-intersection property only.
//!
//! The driver splits into strongly connected components and prime factors
//! after every step, then tries RII, RI, RIII, RIV in that order at the
//! lowest vertex index where one applies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::local;
use crate::quiver::{fresh_name, Arrow, QuiverSetting, Vertex};
use crate::trace::{ReductionTrace, StepKind};

pub const DEFAULT_PATH_BUDGET: u64 = 10_000_000;

/// RI test at a vertex index.
pub(crate) fn ri_ok(q: &QuiverSetting, v: usize) -> bool {
    if q.loop_count(v) > 0 {
        return false;
    }
    let alpha = q.dims();
    let e = q.unit_vector(v);
    q.ringel_form(&alpha, &e).expect("aligned") >= 0 || q.ringel_form(&e, &alpha).expect("aligned") >= 0
}

pub fn ri_applicable(q: &QuiverSetting, v: &str) -> Result<bool> {
    Ok(ri_ok(q, q.vertex_index(v)?))
}

pub(crate) fn ri_at(q: &QuiverSetting, v: usize) -> QuiverSetting {
    let incoming: Vec<usize> = (0..q.arrow_count()).filter(|&k| q.arrow(k).target == v).collect();
    let outgoing: Vec<usize> = (0..q.arrow_count()).filter(|&k| q.arrow(k).source == v).collect();
    let remap = |x: usize| if x > v { x - 1 } else { x };

    let mut vertices: Vec<Vertex> = q.vertices().to_vec();
    vertices.remove(v);
    let mut arrows: Vec<Arrow> = q
        .arrows()
        .iter()
        .filter(|a| a.source != v && a.target != v)
        .map(|a| Arrow {
            source: remap(a.source),
            target: remap(a.target),
            ..a.clone()
        })
        .collect();
    let mut taken = q.taken_arrow_names();
    for &i in &incoming {
        for &j in &outgoing {
            let (a, b) = (q.arrow(i), q.arrow(j));
            let name = fresh_name(&taken, &format!("{}_{}", a.id, b.id));
            taken.insert(name.clone());
            arrows.push(Arrow {
                id: name.as_str().into(),
                source: remap(a.source),
                target: remap(b.target),
                parents: vec![a.id.clone(), b.id.clone()],
            });
        }
    }
    QuiverSetting::from_parts_unchecked(vertices, arrows)
}

pub fn apply_ri(q: &QuiverSetting, v: &str) -> Result<QuiverSetting> {
    let idx = q.vertex_index(v)?;
    if !ri_ok(q, idx) {
        return Err(Error::reduction("RI", format!("vertex {v} has a loop or both Ringel values are negative")));
    }
    Ok(ri_at(q, idx))
}

pub(crate) fn rii_at(q: &QuiverSetting, v: usize) -> (QuiverSetting, u32) {
    let loops: Vec<usize> = (0..q.arrow_count())
        .filter(|&k| q.arrow(k).source == v && q.arrow(k).target == v)
        .collect();
    (q.without_arrows(&loops), loops.len() as u32)
}

pub(crate) fn rii_ok(q: &QuiverSetting, v: usize) -> bool {
    q.dim(v) == 1 && q.loop_count(v) > 0
}

/// Removes the loops of a one-dimensional vertex; returns the new setting and
/// the number of free variables split off.
pub fn apply_rii(q: &QuiverSetting, v: &str) -> Result<(QuiverSetting, u32)> {
    let idx = q.vertex_index(v)?;
    if q.dim(idx) != 1 {
        return Err(Error::reduction("RII", format!("vertex {v} has dimension {}", q.dim(idx))));
    }
    if q.loop_count(idx) == 0 {
        return Err(Error::reduction("RII", format!("vertex {v} has no loops")));
    }
    Ok(rii_at(q, idx))
}

/// Which side of the vertex carries the single non-loop arrow in RIII.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RiiiSide {
    Outgoing,
    Incoming,
}

fn riii_side(q: &QuiverSetting, v: usize) -> Option<RiiiSide> {
    if q.dim(v) < 2 || q.loop_count(v) != 1 {
        return None;
    }
    let alpha = q.dims();
    let e = q.unit_vector(v);
    if q.ringel_form(&e, &alpha).expect("aligned") == -1 {
        Some(RiiiSide::Outgoing)
    } else if q.ringel_form(&alpha, &e).expect("aligned") == -1 {
        Some(RiiiSide::Incoming)
    } else {
        None
    }
}

pub(crate) fn riii_ok(q: &QuiverSetting, v: usize) -> bool {
    riii_side(q, v).is_some()
}

pub fn riii_applicable(q: &QuiverSetting, v: &str) -> Result<bool> {
    Ok(riii_ok(q, q.vertex_index(v)?))
}

pub(crate) fn riii_at(q: &QuiverSetting, v: usize) -> Option<(QuiverSetting, u32)> {
    let side = riii_side(q, v)?;
    let k = q.dim(v);
    let through = (0..q.arrow_count()).find(|&i| {
        let a = q.arrow(i);
        !a.is_loop()
            && match side {
                RiiiSide::Outgoing => a.source == v,
                RiiiSide::Incoming => a.target == v,
            }
    })?;
    let mut taken = q.taken_arrow_names();
    let mut arrows = Vec::new();
    for (i, a) in q.arrows().iter().enumerate() {
        if a.source == v && a.target == v {
            continue;
        }
        if i != through {
            arrows.push(a.clone());
            continue;
        }
        for copy in 1..=k {
            let name = fresh_name(&taken, &format!("{}_{copy}", a.id));
            taken.insert(name.clone());
            arrows.push(Arrow {
                id: name.as_str().into(),
                source: a.source,
                target: a.target,
                parents: vec![a.id.clone()],
            });
        }
    }
    Some((QuiverSetting::from_parts_unchecked(q.vertices().to_vec(), arrows), k))
}

pub fn apply_riii(q: &QuiverSetting, v: &str) -> Result<(QuiverSetting, u32)> {
    let idx = q.vertex_index(v)?;
    riii_at(q, idx).ok_or_else(|| {
        Error::reduction(
            "RIII",
            format!("vertex {v} needs dimension ≥ 2, exactly one loop, and a single arrow to or from a one-dimensional vertex"),
        )
    })
}

/// Number of directed paths `from -> to` visiting no vertex twice. Parallel
/// arrows give distinct paths.
pub(crate) fn paths_between(q: &QuiverSetting, from: usize, to: usize, budget: u64) -> Result<u64> {
    let out = q.out_arrows();
    let mut visited = vec![false; q.vertex_count()];
    let mut expansions = 0u64;

    fn dfs(
        q: &QuiverSetting,
        out: &[Vec<usize>],
        u: usize,
        to: usize,
        visited: &mut [bool],
        expansions: &mut u64,
        budget: u64,
    ) -> Result<u64> {
        if u == to {
            return Ok(1);
        }
        *expansions += 1;
        if *expansions > budget {
            return Err(Error::Resource {
                what: "counting simple paths",
                cap: budget,
            });
        }
        visited[u] = true;
        let mut total = 0;
        for &k in &out[u] {
            let w = q.arrow(k).target;
            if !visited[w] {
                total += dfs(q, out, w, to, visited, expansions, budget)?;
            }
        }
        visited[u] = false;
        Ok(total)
    }

    dfs(q, &out, from, to, &mut visited, &mut expansions, budget)
}

pub fn count_simple_paths(q: &QuiverSetting, from: &str, to: &str) -> Result<u64> {
    let (f, t) = (q.vertex_index(from)?, q.vertex_index(to)?);
    if f == t {
        return Err(Error::domain("path endpoints must differ"));
    }
    paths_between(q, f, t, DEFAULT_PATH_BUDGET)
}

pub(crate) fn riv_ok(q: &QuiverSetting, v1: usize, v2: usize, budget: u64) -> Result<bool> {
    if v1 == v2 || q.arrow_multiplicity(v1, v2) == 0 || q.arrow_multiplicity(v2, v1) == 0 {
        return Ok(false);
    }
    let there = paths_between(q, v1, v2, budget)?;
    let back = paths_between(q, v2, v1, budget)?;
    Ok((there == 2 && back == 2) || there == 1 || back == 1)
}

pub fn riv_applicable(q: &QuiverSetting, v1: &str, v2: &str) -> Result<bool> {
    if !q.is_unit() {
        return Err(Error::domain("RIV is only defined for one-dimensional settings"));
    }
    riv_ok(q, q.vertex_index(v1)?, q.vertex_index(v2)?, DEFAULT_PATH_BUDGET)
}

/// Glues the connected pair; the arrows between them stay as loops.
pub fn apply_riv(q: &QuiverSetting, v1: &str, v2: &str) -> Result<QuiverSetting> {
    if !riv_applicable(q, v1, v2)? {
        return Err(Error::reduction("RIV", format!("({v1},{v2}) is not a connected pair with the required path counts")));
    }
    local::glue_subquiver(q, &[v1, v2])
}

/// Which steps the driver may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    pub ri: bool,
    pub rii: bool,
    pub riii: bool,
    /// Only ever applied to factors whose vertices all have dimension one.
    pub riv: bool,
    pub path_budget: u64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            ri: true,
            rii: true,
            riii: true,
            riv: true,
            path_budget: DEFAULT_PATH_BUDGET,
        }
    }
}

impl ReduceOptions {
    /// RI–RIII: the steps that preserve the invariant ring up to free variables.
    pub fn invariant_ring() -> Self {
        ReduceOptions {
            riv: false,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedFactor {
    /// Steps from the input to `terminal`, splits included.
    pub trace: ReductionTrace,
    pub terminal: QuiverSetting,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionOutcome {
    pub factors: Vec<ReducedFactor>,
    /// Free variables split off by RII and RIII steps, each counted once.
    pub free_vars: u32,
}

impl ReductionOutcome {
    pub fn terminals(&self) -> impl Iterator<Item = &QuiverSetting> {
        self.factors.iter().map(|f| &f.terminal)
    }

    /// True when every terminal factor is a single vertex without arrows.
    pub fn all_points(&self) -> bool {
        self.terminals().all(QuiverSetting::is_point)
    }
}

/// The first applicable step at `q` under `opts`, with its result.
pub(crate) fn next_step(
    q: &QuiverSetting,
    opts: &ReduceOptions,
) -> Result<Option<(StepKind, QuiverSetting, u32)>> {
    let n = q.vertex_count();
    if opts.rii {
        if let Some(v) = (0..n).find(|&v| rii_ok(q, v)) {
            let (next, k) = rii_at(q, v);
            let kind = StepKind::Rii {
                vertex: q.vertex(v).id.clone(),
                loops: k,
            };
            return Ok(Some((kind, next, k)));
        }
    }
    if opts.ri && n > 1 {
        if let Some(v) = (0..n).find(|&v| ri_ok(q, v)) {
            let kind = StepKind::Ri {
                vertex: q.vertex(v).id.clone(),
            };
            return Ok(Some((kind, ri_at(q, v), 0)));
        }
    }
    if opts.riii {
        for v in 0..n {
            if let Some((next, k)) = riii_at(q, v) {
                let kind = StepKind::Riii {
                    vertex: q.vertex(v).id.clone(),
                };
                return Ok(Some((kind, next, k)));
            }
        }
    }
    if opts.riv && q.is_unit() {
        for v1 in 0..n {
            for v2 in v1 + 1..n {
                if riv_ok(q, v1, v2, opts.path_budget)? {
                    let next = local::glue_at(q, &[v1, v2])?;
                    let kind = StepKind::Riv {
                        first: q.vertex(v1).id.clone(),
                        second: q.vertex(v2).id.clone(),
                    };
                    return Ok(Some((kind, next, 0)));
                }
            }
        }
    }
    Ok(None)
}

/// Splits `q` into strongly connected components, or failing that into
/// prime factors. Returns `None` when `q` is already strongly connected and
/// prime.
pub(crate) fn split(q: &QuiverSetting) -> Option<Vec<(StepKind, QuiverSetting)>> {
    let comps = q.scc_vertex_sets();
    if comps.len() > 1 {
        return Some(
            comps
                .iter()
                .map(|c| {
                    let kind = StepKind::SccSplit {
                        vertices: c.iter().map(|&v| q.vertex(v).id.clone()).collect(),
                    };
                    (kind, q.induced_on(c))
                })
                .collect(),
        );
    }
    if q.arrow_count() == 0 {
        return None;
    }
    let primes = q.prime_arrow_sets();
    if primes.len() > 1 {
        return Some(
            primes
                .iter()
                .map(|arrows| {
                    let kind = StepKind::PrimeSplit {
                        arrows: arrows.iter().map(|&k| q.arrow(k).id.clone()).collect(),
                        vertices: Vec::new(),
                    };
                    (kind, q.restrict(arrows, &[]))
                })
                .collect(),
        );
    }
    None
}

/// Applies splits and the permitted steps until none applies to any factor.
/// Loops at one-dimensional vertices are stripped before splitting.
pub fn reduce_with(q: &QuiverSetting, opts: &ReduceOptions) -> Result<ReductionOutcome> {
    fn go(
        q: QuiverSetting,
        trace: ReductionTrace,
        opts: &ReduceOptions,
        out: &mut Vec<ReducedFactor>,
        free: &mut u32,
    ) -> Result<()> {
        let mut q = q;
        let mut trace = trace;
        loop {
            // loops at unit vertices would otherwise split off one prime
            // factor each
            if opts.rii {
                if let Some(v) = (0..q.vertex_count()).find(|&v| rii_ok(&q, v)) {
                    let (next, k) = rii_at(&q, v);
                    let kind = StepKind::Rii {
                        vertex: q.vertex(v).id.clone(),
                        loops: k,
                    };
                    *free += k;
                    trace.push(kind, q, next.clone(), k);
                    q = next;
                    continue;
                }
            }
            if let Some(parts) = split(&q) {
                for (kind, part) in parts {
                    let t = trace.extended(kind, &q, &part, 0);
                    go(part, t, opts, out, free)?;
                }
                return Ok(());
            }
            match next_step(&q, opts)? {
                Some((kind, next, k)) => {
                    *free += k;
                    trace.push(kind, q, next.clone(), k);
                    q = next;
                }
                None => {
                    out.push(ReducedFactor { trace, terminal: q });
                    return Ok(());
                }
            }
        }
    }

    let mut factors = Vec::new();
    let mut free_vars = 0;
    if !q.is_empty() {
        go(q.clone(), ReductionTrace::new(), opts, &mut factors, &mut free_vars)?;
    }
    Ok(ReductionOutcome { factors, free_vars })
}

/// Full reduction with every step enabled.
pub fn reduce_fully(q: &QuiverSetting) -> Result<ReductionOutcome> {
    reduce_with(q, &ReduceOptions::default())
}
