//! Strongly connected components and connected-sum (prime) decomposition.

use super::QuiverSetting;
use crate::error::{Error, Result};

impl QuiverSetting {
    /// Forward reachability from `start`, ignoring arrow multiplicities.
    pub(crate) fn reachable_from(&self, start: usize) -> Vec<bool> {
        let succ = self.successors();
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &w in &succ[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Vertex sets of the strongly connected components, each sorted and the
    /// list ordered by smallest member.
    pub(crate) fn scc_vertex_sets(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let reach: Vec<Vec<bool>> = (0..n).map(|v| self.reachable_from(v)).collect();
        let mut assigned = vec![false; n];
        let mut comps = Vec::new();
        for v in 0..n {
            if assigned[v] {
                continue;
            }
            let comp: Vec<usize> = (v..n).filter(|&w| reach[v][w] && reach[w][v]).collect();
            for &w in &comp {
                assigned[w] = true;
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.vertex_count() > 0 && self.scc_vertex_sets().len() == 1
    }

    /// Induced sub-settings on the strongly connected components. Arrows
    /// running between distinct components are dropped.
    pub fn strongly_connected_components(&self) -> Vec<QuiverSetting> {
        self.scc_vertex_sets()
            .iter()
            .map(|c| self.induced_on(c))
            .collect()
    }

    /// Blocks of the underlying undirected multigraph, as arrow index sets.
    /// Every loop is a block of its own.
    fn blocks(&self) -> Vec<Vec<usize>> {
        struct Dfs<'a> {
            adj: &'a [Vec<(usize, usize)>],
            disc: Vec<usize>,
            low: Vec<usize>,
            time: usize,
            stack: Vec<usize>,
            blocks: Vec<Vec<usize>>,
        }

        impl Dfs<'_> {
            fn visit(&mut self, u: usize, parent_edge: Option<usize>) {
                self.time += 1;
                self.disc[u] = self.time;
                self.low[u] = self.time;
                for &(w, e) in &self.adj[u] {
                    if Some(e) == parent_edge {
                        continue;
                    }
                    if self.disc[w] == 0 {
                        self.stack.push(e);
                        self.visit(w, Some(e));
                        self.low[u] = self.low[u].min(self.low[w]);
                        if self.low[w] >= self.disc[u] {
                            let mut block = Vec::new();
                            while let Some(f) = self.stack.pop() {
                                block.push(f);
                                if f == e {
                                    break;
                                }
                            }
                            self.blocks.push(block);
                        }
                    } else if self.disc[w] < self.disc[u] {
                        self.stack.push(e);
                        self.low[u] = self.low[u].min(self.disc[w]);
                    }
                }
            }
        }

        let n = self.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for (k, a) in self.arrows().iter().enumerate() {
            if !a.is_loop() {
                adj[a.source].push((a.target, k));
                adj[a.target].push((a.source, k));
            }
        }
        let mut dfs = Dfs {
            adj: &adj,
            disc: vec![0; n],
            low: vec![0; n],
            time: 0,
            stack: Vec::new(),
            blocks: Vec::new(),
        };
        for v in 0..n {
            if dfs.disc[v] == 0 {
                dfs.visit(v, None);
            }
        }
        let mut blocks = dfs.blocks;
        for (k, a) in self.arrows().iter().enumerate() {
            if a.is_loop() {
                blocks.push(vec![k]);
            }
        }
        blocks
    }

    /// Arrow sets of the prime factors: blocks glued back together wherever
    /// they meet in a vertex of dimension at least two.
    pub(crate) fn prime_arrow_sets(&self) -> Vec<Vec<usize>> {
        let blocks = self.blocks();
        let mut parent: Vec<usize> = (0..blocks.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut owner: Vec<Option<usize>> = vec![None; self.vertex_count()];
        for (b, block) in blocks.iter().enumerate() {
            for &k in block {
                let a = self.arrow(k);
                for v in [a.source, a.target] {
                    if self.dim(v) < 2 {
                        continue;
                    }
                    match owner[v] {
                        None => owner[v] = Some(b),
                        Some(o) => {
                            let (ro, rb) = (find(&mut parent, o), find(&mut parent, b));
                            parent[ro] = rb;
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_of = vec![usize::MAX; blocks.len()];
        for (b, block) in blocks.iter().enumerate() {
            let r = find(&mut parent, b);
            if group_of[r] == usize::MAX {
                group_of[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[group_of[r]].extend_from_slice(block);
        }
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.sort();
        groups
    }

    /// Maximal decomposition into prime factors glued at vertices of
    /// dimension one. A cut vertex appears in every factor containing it.
    pub fn prime_decomposition(&self) -> Result<Vec<QuiverSetting>> {
        if !self.is_strongly_connected() {
            return Err(Error::Precondition(
                "prime decomposition needs a strongly connected setting".into(),
            ));
        }
        if self.arrow_count() == 0 {
            return Ok(vec![self.clone()]);
        }
        Ok(self
            .prime_arrow_sets()
            .iter()
            .map(|arrows| self.restrict(arrows, &[]))
            .collect())
    }
}
