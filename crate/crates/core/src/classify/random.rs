//! Seeded random settings for property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quiver::QuiverSetting;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DimSpec {
    #[default]
    Unit,
    /// Uniform dimensions in `1..=d`.
    UpTo(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constraints {
    pub strongly_connected: bool,
    pub loopless: bool,
    /// Every vertex has in- and out-degree at least 2.
    pub min_degree_2: bool,
    pub dims: DimSpec,
    pub attempts: u32,
}

impl Default for Constraints {
    fn default() -> Self {
        Constraints {
            strongly_connected: false,
            loopless: false,
            min_degree_2: false,
            dims: DimSpec::Unit,
            attempts: 10_000,
        }
    }
}

impl Constraints {
    pub fn strongly_connected() -> Self {
        Constraints {
            strongly_connected: true,
            ..Self::default()
        }
    }

    /// Strongly connected, loopless, all degrees at least 2.
    pub fn reduced() -> Self {
        Constraints {
            strongly_connected: true,
            loopless: true,
            min_degree_2: true,
            ..Self::default()
        }
    }

    fn holds(&self, q: &QuiverSetting) -> bool {
        (!self.strongly_connected || q.is_strongly_connected())
            && (!self.loopless || q.arrows().iter().all(|a| !a.is_loop()))
            && (!self.min_degree_2
                || (0..q.vertex_count()).all(|v| q.in_degree(v) >= 2 && q.out_degree(v) >= 2))
    }
}

fn permutation(rng: &mut ChaCha8Rng, n: usize, derangement: bool) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        p.shuffle(rng);
        if !derangement || p.iter().enumerate().all(|(i, &j)| i != j) {
            return p;
        }
    }
}

/// A deterministic random setting with `n` vertices and `m` arrows.
/// Rejection-samples until the constraints hold; settings with minimum
/// degree 2 start from two random permutations so that the condition holds
/// by construction.
pub fn random_setting(seed: u64, n: usize, m: usize, constraints: &Constraints) -> Result<QuiverSetting> {
    if n == 0 {
        return Err(Error::Generation("vertex count must be positive".into()));
    }
    if constraints.min_degree_2 && m < 2 * n {
        return Err(Error::Generation(format!(
            "minimum degree 2 needs at least {} arrows",
            2 * n
        )));
    }
    if constraints.loopless && n == 1 && m > 0 {
        return Err(Error::Generation("a single vertex cannot carry loopless arrows".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..constraints.attempts {
        let mut arrows = Vec::with_capacity(m);
        if constraints.min_degree_2 {
            for _ in 0..2 {
                let p = permutation(&mut rng, n, constraints.loopless);
                arrows.extend(p.into_iter().enumerate());
            }
        }
        while arrows.len() < m {
            let s = rng.gen_range(0..n);
            let t = rng.gen_range(0..n);
            if constraints.loopless && s == t {
                continue;
            }
            arrows.push((s, t));
        }
        let dims: Vec<u32> = match constraints.dims {
            DimSpec::Unit => vec![1; n],
            DimSpec::UpTo(d) => (0..n).map(|_| rng.gen_range(1..=d.max(1))).collect(),
        };
        let q = QuiverSetting::with_dims(&dims, &arrows)?;
        if constraints.holds(&q) {
            return Ok(q);
        }
    }
    Err(Error::Generation(format!(
        "no setting with {n} vertices and {m} arrows met the constraints in {} attempts",
        constraints.attempts
    )))
}
