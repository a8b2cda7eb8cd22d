//! Seeded corpora and the cross-checking properties run over them.
//!
//! Each property draws one setting per seed, checks it, and on failure
//! shrinks the setting greedily by deleting arrows while the failure
//! persists. Seeds are checked in parallel and reported in seed order.

use std::fmt;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{
    coregular_obstruction, find_forbidden_descendant, is_ci, is_coregular, random_setting, Constraints,
    DescendantOptions, DimSpec, ObstructionOutcome, SearchOutcome, TargetName,
};
use crate::cycles::f_value;
use crate::error::{Error, Result};
use crate::local::{glue_at, glue_subquiver, local_quiver, strip_unit_loops, Decomposition};
use crate::quiver::{is_isomorphic, QuiverSetting};
use crate::reductions::{ri_at, ri_ok, rii_at, rii_ok, riv_ok, DEFAULT_PATH_BUDGET};
use crate::toric::{is_ci_toric, min_generators, section_consistency};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// Reduction decider agrees with generator counting.
    CiAgreement,
    /// Descendant witnesses replay and only occur for non-C.I. settings.
    DescendantSoundness,
    /// Both computations of `E(U)` agree and weak cycles are equivalent.
    SectionFive,
    /// Reduced settings have `F ≥ 1`.
    CoregularCorrection,
    /// C.I. status, `F = 0` and `gens − F` survive every RI, RII, RIV step.
    ReductionInvariance,
    /// RI–RIII decider agrees with the constructive obstruction.
    CoregularAgreement,
    /// Composite settings classify as the conjunction of their factors.
    DecompositionLaws,
    /// Gluing agrees with the local quiver formula up to loops.
    GlueAgreement,
}

pub const ALL_PROPERTIES: [Property; 8] = [
    Property::CiAgreement,
    Property::DescendantSoundness,
    Property::SectionFive,
    Property::CoregularCorrection,
    Property::ReductionInvariance,
    Property::CoregularAgreement,
    Property::DecompositionLaws,
    Property::GlueAgreement,
];

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::CiAgreement => "ci-agreement",
            Property::DescendantSoundness => "descendant-soundness",
            Property::SectionFive => "section-five",
            Property::CoregularCorrection => "coregular-correction",
            Property::ReductionInvariance => "reduction-invariance",
            Property::CoregularAgreement => "coregular-agreement",
            Property::DecompositionLaws => "decomposition-laws",
            Property::GlueAgreement => "glue-agreement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ALL_PROPERTIES.into_iter().find(|p| p.name() == s)
    }

    /// Corpus shape used by default for this property.
    pub fn default_config(self) -> CorpusConfig {
        let base = CorpusConfig {
            seeds: 0..200,
            max_vertices: 6,
            max_arrows: 12,
            max_dim: 1,
            budget: DescendantOptions::default().budget,
        };
        match self {
            Property::CoregularAgreement => CorpusConfig {
                seeds: 0..100,
                max_vertices: 4,
                max_arrows: 8,
                max_dim: 3,
                ..base
            },
            Property::DecompositionLaws => CorpusConfig { seeds: 0..100, ..base },
            _ => base,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusConfig {
    pub seeds: Range<u64>,
    pub max_vertices: usize,
    pub max_arrows: usize,
    /// Largest vertex dimension for general-dimension corpora.
    pub max_dim: u32,
    /// State budget of the descendant search.
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum Check {
    Pass,
    Fail(String),
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub seed: u64,
    pub message: String,
    /// The shrunk failing setting in `.qv` form.
    pub setting: String,
    pub reproduce: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub first_failure: Option<Counterexample>,
}

impl PropertyReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

fn seeded(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

/// A strongly connected setting with sizes drawn from the seed. The arrow
/// count grows until the sampler succeeds.
fn strongly_connected_case(seed: u64, cfg: &CorpusConfig, dims: DimSpec) -> Result<QuiverSetting> {
    let mut rng = seeded(seed, 1);
    let n = rng.gen_range(1..=cfg.max_vertices.max(1));
    let low = if n == 1 { 0 } else { n };
    let high = cfg.max_arrows.max(low);
    let m0 = rng.gen_range(low..=high);
    let constraints = Constraints {
        dims,
        ..Constraints::strongly_connected()
    };
    let mut last = None;
    for m in m0..=high {
        match random_setting(seed, n, m, &constraints) {
            Ok(q) => return Ok(q),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Generation("empty arrow range".into())))
}

fn reduced_case(seed: u64, cfg: &CorpusConfig) -> Result<QuiverSetting> {
    let mut rng = seeded(seed, 2);
    let top = (cfg.max_arrows / 2).clamp(2, cfg.max_vertices.max(2));
    let n = rng.gen_range(2..=top);
    let m = rng.gen_range(2 * n..=cfg.max_arrows.max(2 * n));
    random_setting(seed, n, m, &Constraints::reduced())
}

/// Glues vertex `vb` of `b` onto vertex `va` of `a`.
pub fn connected_sum(a: &QuiverSetting, va: usize, b: &QuiverSetting, vb: usize) -> Result<QuiverSetting> {
    if a.dim(va) != 1 || b.dim(vb) != 1 {
        return Err(Error::domain("connected sums are taken at one-dimensional vertices"));
    }
    let na = a.vertex_count();
    let place = |w: usize| match w.cmp(&vb) {
        std::cmp::Ordering::Equal => va,
        std::cmp::Ordering::Less => na + w,
        std::cmp::Ordering::Greater => na + w - 1,
    };
    let mut dims: Vec<u32> = (0..na).map(|v| a.dim(v)).collect();
    dims.extend((0..b.vertex_count()).filter(|&w| w != vb).map(|w| b.dim(w)));
    let mut arrows: Vec<(usize, usize)> = a.arrows().iter().map(|x| (x.source, x.target)).collect();
    arrows.extend(b.arrows().iter().map(|x| (place(x.source), place(x.target))));
    QuiverSetting::with_dims(&dims, &arrows)
}

/// Disjoint union of `a` and `b` with one arrow from `a` to `b`.
pub fn bridged_union(a: &QuiverSetting, b: &QuiverSetting) -> Result<QuiverSetting> {
    let na = a.vertex_count();
    let mut dims: Vec<u32> = (0..na).map(|v| a.dim(v)).collect();
    dims.extend((0..b.vertex_count()).map(|w| b.dim(w)));
    let mut arrows: Vec<(usize, usize)> = a.arrows().iter().map(|x| (x.source, x.target)).collect();
    arrows.extend(b.arrows().iter().map(|x| (na + x.source, na + x.target)));
    arrows.push((0, na));
    QuiverSetting::with_dims(&dims, &arrows)
}

fn composite_case(seed: u64, cfg: &CorpusConfig) -> Result<QuiverSetting> {
    let mut rng = seeded(seed, 3);
    let small = CorpusConfig {
        max_vertices: (cfg.max_vertices / 2).max(2),
        max_arrows: (cfg.max_arrows / 2).max(3),
        ..cfg.clone()
    };
    let dims = if seed % 4 == 3 { DimSpec::UpTo(2) } else { DimSpec::Unit };
    let mut a = strongly_connected_case(seed, &small, dims)?;
    let mut b = strongly_connected_case(seed.wrapping_add(1_000_003), &small, dims)?;
    if rng.gen_bool(0.5) {
        a = a.with_dimension_vector(&force_first_unit(&a))?;
        b = b.with_dimension_vector(&force_first_unit(&b))?;
        connected_sum(&a, 0, &b, 0)
    } else {
        bridged_union(&a, &b)
    }
}

fn force_first_unit(q: &QuiverSetting) -> Vec<u32> {
    (0..q.vertex_count()).map(|v| if v == 0 { 1 } else { q.dim(v) }).collect()
}

/// The setting a property examines for `seed`.
pub fn generate(property: Property, seed: u64, cfg: &CorpusConfig) -> Result<QuiverSetting> {
    match property {
        Property::CoregularCorrection => reduced_case(seed, cfg),
        Property::CoregularAgreement => strongly_connected_case(seed, cfg, DimSpec::UpTo(cfg.max_dim.max(1))),
        Property::DecompositionLaws => composite_case(seed, cfg),
        _ => strongly_connected_case(seed, cfg, DimSpec::Unit),
    }
}

fn fail(msg: impl Into<String>) -> Result<Check> {
    Ok(Check::Fail(msg.into()))
}

fn deficiency(q: &QuiverSetting) -> Result<(bool, bool, i64)> {
    let gens = min_generators(q)?.total as i64;
    let f = f_value(q)?;
    Ok((gens == f, f == 0, gens - f))
}

/// Every applicable RI, RII and RIV step from `q`, with its result.
pub fn applicable_steps(q: &QuiverSetting) -> Result<Vec<(String, QuiverSetting)>> {
    let n = q.vertex_count();
    let mut out = Vec::new();
    for v in 0..n {
        let name = q.vertex(v).id.clone();
        if n > 1 && ri_ok(q, v) {
            out.push((format!("RI({name})"), ri_at(q, v)));
        }
        if rii_ok(q, v) {
            out.push((format!("RII({name})"), rii_at(q, v).0));
        }
    }
    if q.is_unit() {
        for v1 in 0..n {
            for v2 in v1 + 1..n {
                if riv_ok(q, v1, v2, DEFAULT_PATH_BUDGET)? {
                    let name = format!("RIV({},{})", q.vertex(v1).id, q.vertex(v2).id);
                    out.push((name, glue_at(q, &[v1, v2])?));
                }
            }
        }
    }
    Ok(out)
}

fn ci_and_coregular_of_factors(q: &QuiverSetting) -> Result<(bool, bool, i64, u64)> {
    let mut ci = true;
    let mut coregular = true;
    let mut f_sum = 0;
    let mut gens_sum = 0;
    for comp in q.strongly_connected_components() {
        for factor in comp.prime_decomposition()? {
            coregular &= is_coregular(&factor)?.answer;
            if factor.is_unit() {
                ci &= is_ci_toric(&factor)?;
                f_sum += f_value(&factor)?;
                gens_sum += min_generators(&factor)?.total;
            }
        }
    }
    Ok((ci, coregular, f_sum, gens_sum))
}

/// Checks `property` on one setting.
pub fn check(property: Property, q: &QuiverSetting, cfg: &CorpusConfig) -> Result<Check> {
    match property {
        Property::CiAgreement => {
            let by_reduction = is_ci(q)?.answer;
            let by_generators = is_ci_toric(q)?;
            if by_reduction != by_generators {
                return fail(format!("reduction says C.I. = {by_reduction}, generator count says {by_generators}"));
            }
            Ok(Check::Pass)
        }
        Property::DescendantSoundness => {
            let ci = is_ci(q)?.answer;
            let opts = DescendantOptions {
                budget: cfg.budget,
                ..DescendantOptions::default()
            };
            match find_forbidden_descendant(q, &[TargetName::G1, TargetName::G2], &opts)? {
                SearchOutcome::Found(w) => {
                    if let Err(e) = w.verify(false) {
                        return fail(format!("witness does not replay: {e}"));
                    }
                    if ci {
                        return fail(format!("{} descendant found for a C.I. setting", w.target));
                    }
                    Ok(Check::Pass)
                }
                SearchOutcome::NoneFound { .. } => Ok(Check::Pass),
                SearchOutcome::Inconclusive { explored } => {
                    Ok(Check::Inconclusive(format!("budget exhausted after {explored} states")))
                }
            }
        }
        Property::SectionFive => match section_consistency(q)? {
            None => Ok(Check::Pass),
            Some((u, msg)) => fail(format!("{msg} at U = {}", u.describe(q))),
        },
        Property::CoregularCorrection => {
            let f = f_value(q)?;
            if f < 1 {
                return fail(format!("F = {f}"));
            }
            Ok(Check::Pass)
        }
        Property::ReductionInvariance => {
            let before = deficiency(q)?;
            for (name, after) in applicable_steps(q)? {
                let now = deficiency(&after)?;
                if now.0 != before.0 || now.1 != before.1 {
                    return fail(format!(
                        "{name} changed (C.I., F = 0) from ({}, {}) to ({}, {})",
                        before.0, before.1, now.0, now.1
                    ));
                }
                if now.2 != before.2 {
                    return fail(format!("{name} changed gens − F from {} to {}", before.2, now.2));
                }
            }
            Ok(Check::Pass)
        }
        Property::CoregularAgreement => {
            let verdict = is_coregular(q)?.answer;
            match coregular_obstruction(q)? {
                ObstructionOutcome::NoObstruction if !verdict => fail("not coregular but no obstruction found"),
                ObstructionOutcome::Witness(_) if verdict => fail("coregular but a C1 witness was found"),
                ObstructionOutcome::Inconclusive { reason } => Ok(Check::Inconclusive(reason)),
                _ => Ok(Check::Pass),
            }
        }
        Property::DecompositionLaws => {
            let (ci_parts, coregular_parts, f_sum, gens_sum) = ci_and_coregular_of_factors(q)?;
            let coregular = is_coregular(q)?.answer;
            if coregular != coregular_parts {
                return fail(format!("coregular {coregular}, factors give {coregular_parts}"));
            }
            if q.is_unit() {
                let ci = is_ci(q)?.answer;
                if ci != ci_parts {
                    return fail(format!("C.I. {ci}, factors give {ci_parts}"));
                }
                if q.is_strongly_connected() {
                    let f = f_value(q)?;
                    let gens = min_generators(q)?.total;
                    if f != f_sum || gens != gens_sum {
                        return fail(format!("F {f} vs {f_sum} over factors, gens {gens} vs {gens_sum}"));
                    }
                }
            }
            Ok(Check::Pass)
        }
        Property::GlueAgreement => {
            let cycles = crate::cycles::primitive_cycles(q)?;
            for c in cycles.iter().filter(|c| c.len() >= 2) {
                let names: Vec<&str> = c.vertices.iter().map(|&v| q.vertex(v).id.as_str()).collect();
                let glued = glue_subquiver(q, &names)?;
                let mut parts = vec![(1, (0..q.vertex_count()).map(|v| u32::from(c.vertices.contains(&v))).collect())];
                for v in (0..q.vertex_count()).filter(|v| !c.vertices.contains(v)) {
                    parts.push((1, (0..q.vertex_count()).map(|w| u32::from(w == v)).collect()));
                }
                let d = Decomposition::from_vectors(q, &parts);
                let local = local_quiver(q, &d)?;
                if !is_isomorphic(&strip_unit_loops(&glued), &strip_unit_loops(&local)) {
                    return fail(format!("gluing {c} disagrees with the local quiver formula"));
                }
            }
            Ok(Check::Pass)
        }
    }
}

fn check_or_error(property: Property, q: &QuiverSetting, cfg: &CorpusConfig) -> Check {
    match check(property, q, cfg) {
        Ok(c) => c,
        Err(Error::Resource { what, cap }) => Check::Inconclusive(format!("resource limit while {what} (cap {cap})")),
        Err(e) => Check::Fail(format!("error: {e}")),
    }
}

/// Deletes arrows one at a time while the property keeps failing.
pub fn minimize(property: Property, q: &QuiverSetting, cfg: &CorpusConfig) -> QuiverSetting {
    let mut current = q.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for a in (0..current.arrow_count()).rev() {
            let smaller = current.without_arrows(&[a]);
            if matches!(check(property, &smaller, cfg), Ok(Check::Fail(_))) {
                current = smaller;
                changed = true;
                break;
            }
        }
    }
    current
}

/// Runs `property` over the corpus described by `cfg`.
pub fn run(property: Property, cfg: &CorpusConfig) -> PropertyReport {
    let results: Vec<(u64, Option<QuiverSetting>, Check)> = cfg
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| match generate(property, seed, cfg) {
            Ok(q) => {
                let c = check_or_error(property, &q, cfg);
                (seed, Some(q), c)
            }
            Err(e) => (seed, None, Check::Fail(format!("generation: {e}"))),
        })
        .collect();

    let mut report = PropertyReport {
        property,
        checked: results.len(),
        passed: 0,
        failed: 0,
        inconclusive: 0,
        first_failure: None,
    };
    for (seed, q, c) in results {
        match c {
            Check::Pass => report.passed += 1,
            Check::Inconclusive(_) => report.inconclusive += 1,
            Check::Fail(message) => {
                report.failed += 1;
                if report.first_failure.is_none() {
                    let shrunk = q.map(|q| minimize(property, &q, cfg));
                    report.first_failure = Some(Counterexample {
                        seed,
                        message,
                        setting: shrunk.map(|s| s.to_string()).unwrap_or_default(),
                        reproduce: format!("qv corpus --property {} --seed {seed} --count 1", property.name()),
                    });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{c1, g1};

    fn small(property: Property) -> CorpusConfig {
        CorpusConfig {
            seeds: 0..12,
            ..property.default_config()
        }
    }

    #[test]
    fn small_corpora_pass() {
        for p in [
            Property::CiAgreement,
            Property::SectionFive,
            Property::CoregularCorrection,
            Property::CoregularAgreement,
            Property::DecompositionLaws,
            Property::GlueAgreement,
        ] {
            let r = run(p, &small(p));
            assert!(r.ok(), "{p}: {:?}", r.first_failure);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = Property::CiAgreement.default_config();
        for seed in 0..5 {
            assert_eq!(
                generate(Property::CiAgreement, seed, &cfg).unwrap(),
                generate(Property::CiAgreement, seed, &cfg).unwrap()
            );
        }
    }

    #[test]
    fn composites() {
        let sum = connected_sum(&c1(), 0, &g1(), 1).unwrap();
        assert_eq!(sum.vertex_count(), 3);
        assert_eq!(sum.arrow_count(), 9);
        assert_eq!(sum.prime_decomposition().unwrap().len(), 2);
        let bridged = bridged_union(&c1(), &g1()).unwrap();
        assert_eq!(bridged.strongly_connected_components().len(), 2);
    }

    #[test]
    fn minimization_keeps_failure() {
        // a property that fails whenever the setting has more than 3 arrows
        let q = g1();
        let cfg = small(Property::CoregularCorrection);
        // F ≥ 1 fails once the setting is a plain cycle
        let cycle = QuiverSetting::unit(2, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        assert!(matches!(check(Property::CoregularCorrection, &cycle, &cfg), Ok(Check::Fail(_))));
        let shrunk = minimize(Property::CoregularCorrection, &cycle, &cfg);
        assert!(shrunk.arrow_count() <= 3);
        assert!(matches!(check(Property::CoregularCorrection, &q, &cfg), Ok(Check::Pass)));
    }
}
