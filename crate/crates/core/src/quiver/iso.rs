//! Isomorphism of quiver settings up to vertex relabelling. Arrow ids are
//! ignored; arrows count with multiplicity between each ordered vertex pair.

use std::collections::BTreeMap;

use super::QuiverSetting;

/// A complete isomorphism invariant: two settings have equal canonical forms
/// iff they are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(Vec<u32>);

fn multiplicity_matrix(q: &QuiverSetting) -> Vec<Vec<u32>> {
    let n = q.vertex_count();
    let mut m = vec![vec![0u32; n]; n];
    for a in q.arrows() {
        m[a.source][a.target] += 1;
    }
    m
}

/// Colour refinement seeded with (dim, loops, in-degree, out-degree). The
/// resulting colours are isomorphism invariant ranks.
fn refined_colours(q: &QuiverSetting, m: &[Vec<u32>]) -> Vec<usize> {
    let n = q.vertex_count();
    let seed: Vec<(u32, u32, u32, u32)> = (0..n)
        .map(|v| (q.dim(v), m[v][v], q.in_degree(v), q.out_degree(v)))
        .collect();
    let mut colours = rank(&seed);
    // colour, then (neighbour colour, multiplicity) out and in
    type Signature = (usize, Vec<(usize, u32)>, Vec<(usize, u32)>);
    loop {
        let sig: Vec<Signature> = (0..n)
            .map(|v| {
                let mut out: Vec<(usize, u32)> = (0..n)
                    .filter(|&w| w != v && m[v][w] > 0)
                    .map(|w| (colours[w], m[v][w]))
                    .collect();
                let mut inc: Vec<(usize, u32)> = (0..n)
                    .filter(|&w| w != v && m[w][v] > 0)
                    .map(|w| (colours[w], m[w][v]))
                    .collect();
                out.sort_unstable();
                inc.sort_unstable();
                (colours[v], out, inc)
            })
            .collect();
        let next = rank(&sig);
        let classes = |c: &[usize]| c.iter().copied().max().map_or(0, |x| x + 1);
        if classes(&next) == classes(&colours) {
            return next;
        }
        colours = next;
    }
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut distinct: Vec<K> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    let index: BTreeMap<&K, usize> = distinct.iter().enumerate().map(|(i, k)| (k, i)).collect();
    keys.iter().map(|k| index[k]).collect()
}

pub fn canonical_form(q: &QuiverSetting) -> CanonicalForm {
    let n = q.vertex_count();
    let m = multiplicity_matrix(q);
    let colours = refined_colours(q, &m);
    // positions are filled class by class in colour order
    let mut slots: Vec<usize> = colours.clone();
    slots.sort_unstable();

    let mut best: Option<Vec<u32>> = None;
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];

    fn search(
        pos: usize,
        slots: &[usize],
        colours: &[usize],
        m: &[Vec<u32>],
        order: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Option<Vec<u32>>,
    ) {
        let n = slots.len();
        if pos == n {
            let code: Vec<u32> = order
                .iter()
                .flat_map(|&i| order.iter().map(move |&j| m[i][j]))
                .collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        for v in 0..n {
            if used[v] || colours[v] != slots[pos] {
                continue;
            }
            used[v] = true;
            order.push(v);
            search(pos + 1, slots, colours, m, order, used, best);
            order.pop();
            used[v] = false;
        }
    }

    search(0, &slots, &colours, &m, &mut order, &mut used, &mut best);
    let mut code = vec![n as u32];
    let mut dims: Vec<(usize, u32)> = (0..n).map(|v| (colours[v], q.dim(v))).collect();
    dims.sort_unstable();
    code.extend(dims.iter().map(|&(_, d)| d));
    code.extend(best.unwrap_or_default());
    CanonicalForm(code)
}

/// True iff some vertex bijection preserves dimensions and the number of
/// arrows between every ordered vertex pair.
pub fn is_isomorphic(a: &QuiverSetting, b: &QuiverSetting) -> bool {
    if a.vertex_count() != b.vertex_count() || a.arrow_count() != b.arrow_count() {
        return false;
    }
    let mut da: Vec<u32> = a.vertices().iter().map(|v| v.dim).collect();
    let mut db: Vec<u32> = b.vertices().iter().map(|v| v.dim).collect();
    da.sort_unstable();
    db.sort_unstable();
    da == db && canonical_form(a) == canonical_form(b)
}

/// True iff `pattern` embeds into `host`: an injective vertex map preserving
/// dimensions with at least as many host arrows between every image pair.
pub fn contains_subquiver(host: &QuiverSetting, pattern: &QuiverSetting) -> bool {
    let hm = multiplicity_matrix(host);
    let pm = multiplicity_matrix(pattern);
    let p = pattern.vertex_count();
    let mut image = vec![usize::MAX; p];
    let mut used = vec![false; host.vertex_count()];

    fn extend(
        i: usize,
        host: &QuiverSetting,
        pattern: &QuiverSetting,
        hm: &[Vec<u32>],
        pm: &[Vec<u32>],
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == image.len() {
            return true;
        }
        for h in 0..host.vertex_count() {
            if used[h] || host.dim(h) != pattern.dim(i) {
                continue;
            }
            let fits = (0..i).all(|j| {
                hm[h][image[j]] >= pm[i][j] && hm[image[j]][h] >= pm[j][i]
            }) && hm[h][h] >= pm[i][i];
            if !fits {
                continue;
            }
            image[i] = h;
            used[h] = true;
            if extend(i + 1, host, pattern, hm, pm, image, used) {
                return true;
            }
            used[h] = false;
        }
        false
    }

    extend(0, host, pattern, &hm, &pm, &mut image, &mut used)
}
