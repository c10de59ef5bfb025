//! Slope stability of toric sheaves: the slope formula over ray degrees,
//! the finite candidate set of test subspaces (meet/join closure of the
//! filtration spaces), stability verdicts and polystable decompositions.

use std::collections::HashSet;

use num::{One, Zero};

use crate::error::Error;
use crate::fan::Fan;
use crate::intersection::{IntersectionEngine, InvariantDivisor};
use crate::rat::{Int, Rat};
use crate::sheaf::ToricSheaf;
use crate::subspace::Subspace;
use crate::Result;

pub const DEFAULT_CANDIDATE_CAP: usize = 10_000;

/// deg_L(D_rho) for every ray of the fan.
pub fn ray_degrees(fan: &Fan, l: &InvariantDivisor) -> Result<Vec<Rat>> {
    let mut engine = IntersectionEngine::new(fan)?;
    (0..fan.ray_count())
        .map(|i| engine.degree(&InvariantDivisor::prime(i), l))
        .collect()
}

/// Slope = -(1/rank) sum of iota_rho * deg_L(D_rho). The value is exact
/// whether or not L is ample; verdicts only carry their usual meaning for
/// ample (or pulled-back nef) polarisations.
pub fn slope(s: &ToricSheaf, l: &InvariantDivisor) -> Result<Rat> {
    let degs = ray_degrees(s.fan(), l)?;
    Ok(slope_from_degrees(s, &degs))
}

pub fn slope_from_degrees(s: &ToricSheaf, degs: &[Rat]) -> Rat {
    let (iotas, _) = s.iota_vector();
    weighted_slope(&iotas, degs, s.rank())
}

fn weighted_slope(iotas: &[i64], degs: &[Rat], rank: usize) -> Rat {
    let total: Rat = iotas
        .iter()
        .zip(degs)
        .map(|(&i, d)| Rat::from_integer(Int::from(i)) * d)
        .sum();
    -total / Rat::from_integer(Int::from(rank as i64))
}

/// Slope of the subsheaf induced by F, against precomputed ray degrees.
pub fn subspace_slope(s: &ToricSheaf, f: &Subspace, degs: &[Rat]) -> Result<Rat> {
    let iotas = subspace_iotas(s, f)?;
    Ok(weighted_slope(&iotas, degs, f.dim()))
}

/// iota_rho of the induced filtration F ∩ E(i), per ray.
pub fn subspace_iotas(s: &ToricSheaf, f: &Subspace) -> Result<Vec<i64>> {
    if f.is_zero() {
        return Err(Error::ZeroSubspace);
    }
    s.filtrations()
        .iter()
        .map(|filt| {
            let mut acc = 0i64;
            let mut prev = 0usize;
            for (level, space) in filt.jumps() {
                let d = f.intersect(space)?.dim();
                if d > prev {
                    acc += level * (d as i64 - prev as i64);
                    prev = d;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// The finite set of test subspaces: all proper nonzero filtration spaces,
/// closed under pairwise intersection, then under pairwise sum. The cap
/// turns pathological growth into an error instead of silence.
pub fn candidate_subspaces(s: &ToricSheaf, cap: usize) -> Result<Vec<Subspace>> {
    let mut set: HashSet<Subspace> = HashSet::new();
    for filt in s.filtrations() {
        for space in filt.proper_spaces() {
            set.insert(space.clone());
        }
    }
    closure_step(&mut set, cap, |a, b| a.intersect(b))?;
    closure_step(&mut set, cap, |a, b| a.sum(b))?;
    let mut out: Vec<Subspace> = set.into_iter().collect();
    out.sort();
    Ok(out)
}

fn closure_step(
    set: &mut HashSet<Subspace>,
    cap: usize,
    op: impl Fn(&Subspace, &Subspace) -> Result<Subspace>,
) -> Result<()> {
    let mut frontier: Vec<Subspace> = set.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut fresh = Vec::new();
        let all: Vec<Subspace> = set.iter().cloned().collect();
        for a in &frontier {
            for b in &all {
                let c = op(a, b)?;
                if c.is_zero() || c.is_full() || set.contains(&c) {
                    continue;
                }
                if set.len() + fresh.len() >= cap {
                    return Err(Error::CandidateOverflow(cap));
                }
                fresh.push(c.clone());
                set.insert(c);
            }
        }
        frontier = fresh;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityStatus {
    Stable,
    StrictlySemistable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub status: StabilityStatus,
    /// Slope of the sheaf itself.
    pub slope: Rat,
    /// A slope-maximising proper subspace (absent only for rank one).
    pub witness: Option<Subspace>,
    /// All candidates attaining the maximal candidate slope.
    pub maximizers: Vec<Subspace>,
    /// That maximal candidate slope, when rank >= 2.
    pub max_candidate_slope: Option<Rat>,
}

pub fn stability_verdict(s: &ToricSheaf, l: &InvariantDivisor) -> Result<StabilityVerdict> {
    stability_verdict_with_cap(s, l, DEFAULT_CANDIDATE_CAP)
}

pub fn stability_verdict_with_cap(
    s: &ToricSheaf,
    l: &InvariantDivisor,
    cap: usize,
) -> Result<StabilityVerdict> {
    let degs = ray_degrees(s.fan(), l)?;
    let mu = slope_from_degrees(s, &degs);
    if s.rank() == 1 {
        return Ok(StabilityVerdict {
            status: StabilityStatus::Stable,
            slope: mu,
            witness: None,
            maximizers: Vec::new(),
            max_candidate_slope: None,
        });
    }
    let candidates = test_subspaces(s, cap)?;
    let mut best: Option<Rat> = None;
    let mut maximizers: Vec<Subspace> = Vec::new();
    for f in &candidates {
        let mu_f = subspace_slope(s, f, &degs)?;
        match &best {
            Some(b) if mu_f < *b => {}
            Some(b) if mu_f == *b => maximizers.push(f.clone()),
            _ => {
                best = Some(mu_f);
                maximizers = vec![f.clone()];
            }
        }
    }
    let best = best.expect("rank >= 2 always has at least one test subspace");
    let status = if best < mu {
        StabilityStatus::Stable
    } else if best == mu {
        StabilityStatus::StrictlySemistable
    } else {
        StabilityStatus::Unstable
    };
    Ok(StabilityVerdict {
        status,
        slope: mu,
        witness: maximizers.first().cloned(),
        maximizers,
        max_candidate_slope: Some(best),
    })
}

/// Candidate subspaces, with a fallback for sheaves whose filtrations are
/// all single jumps: there every proper subspace has the same slope, so a
/// single representative line suffices.
pub fn test_subspaces(s: &ToricSheaf, cap: usize) -> Result<Vec<Subspace>> {
    let mut candidates = candidate_subspaces(s, cap)?;
    if candidates.is_empty() && s.rank() >= 2 {
        let mut row = vec![Rat::zero(); s.rank()];
        row[0] = Rat::one();
        candidates.push(Subspace::from_rows(s.rank(), vec![row])?);
    }
    Ok(candidates)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Summands(Vec<ToricSheaf>),
    NotPolystable { status: StabilityStatus },
}

/// Splits a sheaf into stable equal-slope summands when the candidate
/// search finds a compatible direct-sum decomposition; conservative in
/// that complements are only sought among candidate subspaces (plus the
/// echelon complement).
pub fn polystable_decomposition(s: &ToricSheaf, l: &InvariantDivisor) -> Result<Decomposition> {
    polystable_decomposition_with_cap(s, l, DEFAULT_CANDIDATE_CAP)
}

pub fn polystable_decomposition_with_cap(
    s: &ToricSheaf,
    l: &InvariantDivisor,
    cap: usize,
) -> Result<Decomposition> {
    let verdict = stability_verdict_with_cap(s, l, cap)?;
    match verdict.status {
        StabilityStatus::Stable => Ok(Decomposition::Summands(vec![s.clone()])),
        StabilityStatus::Unstable => Ok(Decomposition::NotPolystable {
            status: verdict.status,
        }),
        StabilityStatus::StrictlySemistable => {
            let degs = ray_degrees(s.fan(), l)?;
            let mut pool: Vec<Subspace> = test_subspaces(s, cap)?
                .into_iter()
                .filter(|f| {
                    subspace_slope(s, f, &degs)
                        .map(|m| m == verdict.slope)
                        .unwrap_or(false)
                })
                .collect();
            pool.sort_by_key(|f| f.dim());
            for f in &pool {
                let mut complements: Vec<Subspace> = pool
                    .iter()
                    .filter(|g| g.dim() + f.dim() == s.rank())
                    .cloned()
                    .collect();
                complements.push(f.echelon_complement());
                for g in complements {
                    if g.is_zero() || !f.intersect(&g)?.is_zero() {
                        continue;
                    }
                    if !split_is_compatible(s, f, &g)? {
                        continue;
                    }
                    if subspace_slope(s, &g, &degs)? != verdict.slope {
                        continue;
                    }
                    let left = polystable_decomposition_with_cap(&s.induced_subsheaf(f)?, l, cap)?;
                    let right =
                        polystable_decomposition_with_cap(&s.induced_subsheaf(&g)?, l, cap)?;
                    if let (Decomposition::Summands(mut a), Decomposition::Summands(b)) =
                        (left, right)
                    {
                        a.extend(b);
                        return Ok(Decomposition::Summands(a));
                    }
                }
            }
            Ok(Decomposition::NotPolystable {
                status: verdict.status,
            })
        }
    }
}

/// E(i) = (F ∩ E(i)) ⊕ (G ∩ E(i)) for all rays and jump levels.
fn split_is_compatible(s: &ToricSheaf, f: &Subspace, g: &Subspace) -> Result<bool> {
    for filt in s.filtrations() {
        for (_, space) in filt.jumps() {
            let df = f.intersect(space)?.dim();
            let dg = g.intersect(space)?.dim();
            if df + dg != space.dim() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
