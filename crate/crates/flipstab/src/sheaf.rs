//! Families of filtrations describing torus-equivariant reflexive sheaves:
//! one bounded increasing filtration of a fixed rational vector space per
//! ray of the fan. Constructors for the standard examples, direct sums,
//! induced subsheaves, the per-ray jump statistics entering the slope
//! formula, characteristic functions and the logarithmic condition.

use std::sync::Arc;

use num::One;

use crate::error::Error;
use crate::fan::Fan;
use crate::intersection::InvariantDivisor;
use crate::lattice::LatticeVector;
use crate::rat::{Int, Rat};
use crate::subspace::Subspace;
use crate::Result;

/// A bounded increasing filtration stored as its jump list: strictly
/// increasing levels with strictly increasing spaces, ending at the full
/// ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    jumps: Vec<(i64, Subspace)>,
}

impl Filtration {
    pub fn new(jumps: Vec<(i64, Subspace)>) -> Result<Self> {
        if jumps.is_empty() {
            return Err(Error::InvalidFiltration("no jumps".into()));
        }
        let ambient = jumps[0].1.ambient_dim();
        for w in jumps.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidFiltration(format!(
                    "levels must strictly increase, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
            if !(w[1].1.contains(&w[0].1) && w[1].1.dim() > w[0].1.dim()) {
                return Err(Error::InvalidFiltration(format!(
                    "jump spaces fail strict inclusion at level {}",
                    w[1].0
                )));
            }
        }
        if jumps[0].1.is_zero() {
            return Err(Error::InvalidFiltration(
                "first jump space must be nonzero".into(),
            ));
        }
        let last = &jumps.last().unwrap().1;
        if !last.is_full() {
            return Err(Error::InvalidFiltration(format!(
                "last space has dimension {}, expected the full {}",
                last.dim(),
                ambient
            )));
        }
        Ok(Filtration { jumps })
    }

    pub fn single_jump(ambient: usize, level: i64) -> Self {
        Filtration {
            jumps: vec![(level, Subspace::full(ambient))],
        }
    }

    pub fn jumps(&self) -> &[(i64, Subspace)] {
        &self.jumps
    }

    pub fn ambient_dim(&self) -> usize {
        self.jumps[0].1.ambient_dim()
    }

    /// E(i): the largest jump space with level <= i, zero below the first.
    pub fn space_at(&self, i: i64) -> Subspace {
        let mut current = Subspace::zero(self.ambient_dim());
        for (level, space) in &self.jumps {
            if *level <= i {
                current = space.clone();
            } else {
                break;
            }
        }
        current
    }

    /// Whether the filtration is a single jump from zero to everything,
    /// returning its level.
    pub fn single_jump_level(&self) -> Option<i64> {
        if self.jumps.len() == 1 {
            Some(self.jumps[0].0)
        } else {
            None
        }
    }

    /// sum over i of i * (dim E(i) - dim E(i-1)).
    pub fn iota(&self) -> i64 {
        let mut acc = 0i64;
        let mut prev = 0usize;
        for (level, space) in &self.jumps {
            acc += level * (space.dim() as i64 - prev as i64);
            prev = space.dim();
        }
        acc
    }

    /// Jump list of (F, F ∩ E(i)), in coordinates of the subspace F.
    pub fn restricted_to(&self, f: &Subspace) -> Result<Filtration> {
        let mut jumps: Vec<(i64, Subspace)> = Vec::new();
        for (level, space) in &self.jumps {
            let meet = f.intersect(space)?;
            if meet.is_zero() {
                continue;
            }
            if jumps.last().map_or(0, |(_, s)| s.dim()) < meet.dim() {
                jumps.push((*level, in_coordinates(&meet, f)?));
            }
        }
        Filtration::new(jumps)
    }

    pub fn proper_spaces(&self) -> impl Iterator<Item = &Subspace> {
        self.jumps
            .iter()
            .map(|(_, s)| s)
            .filter(|s| !s.is_zero() && !s.is_full())
    }
}

/// Rewrites a subspace of the ambient space contained in `frame` in the
/// coordinates given by the rows of `frame`.
fn in_coordinates(space: &Subspace, frame: &Subspace) -> Result<Subspace> {
    let rows = space
        .basis()
        .iter()
        .map(|v| {
            frame
                .coordinates_of(v)
                .ok_or_else(|| Error::Other("vector outside the frame subspace".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Subspace::from_rows(frame.dim(), rows)
}

/// A toric sheaf presented by its family of filtrations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricSheaf {
    fan: Arc<Fan>,
    rank: usize,
    filtrations: Vec<Filtration>,
}

impl ToricSheaf {
    pub fn new(fan: Arc<Fan>, rank: usize, filtrations: Vec<Filtration>) -> Result<Self> {
        if filtrations.len() != fan.ray_count() {
            return Err(Error::InvalidFiltration(format!(
                "expected one filtration per ray ({}), got {}",
                fan.ray_count(),
                filtrations.len()
            )));
        }
        for f in &filtrations {
            if f.ambient_dim() != rank {
                return Err(Error::InvalidFiltration(format!(
                    "filtration ambient dimension {} does not match rank {rank}",
                    f.ambient_dim()
                )));
            }
        }
        Ok(ToricSheaf {
            fan,
            rank,
            filtrations,
        })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn filtration(&self, ray: usize) -> &Filtration {
        &self.filtrations[ray]
    }

    pub fn filtrations(&self) -> &[Filtration] {
        &self.filtrations
    }

    /// The tangent sheaf: Span(u_rho) at level -1, everything at 0.
    pub fn tangent(fan: Arc<Fan>) -> Self {
        let n = fan.rank();
        let filtrations = fan
            .rays()
            .iter()
            .map(|u| {
                Filtration::new(vec![
                    (-1, Subspace::line(u).expect("rays are nonzero")),
                    (0, Subspace::full(n)),
                ])
                .expect("well formed")
            })
            .collect();
        ToricSheaf {
            fan,
            rank: n,
            filtrations,
        }
    }

    /// The logarithmic variant: rays in delta get a single full jump at 0.
    pub fn log_tangent(fan: Arc<Fan>, delta: &[usize]) -> Self {
        let n = fan.rank();
        let filtrations = fan
            .rays()
            .iter()
            .enumerate()
            .map(|(i, u)| {
                if delta.contains(&i) {
                    Filtration::single_jump(n, 0)
                } else {
                    Filtration::new(vec![
                        (-1, Subspace::line(u).expect("rays are nonzero")),
                        (0, Subspace::full(n)),
                    ])
                    .expect("well formed")
                }
            })
            .collect();
        ToricSheaf {
            fan,
            rank: n,
            filtrations,
        }
    }

    /// The rank-one sheaf with first Chern class D: a single jump at level
    /// -a_rho per ray. Requires integer coefficients.
    pub fn rank_one(fan: Arc<Fan>, d: &InvariantDivisor) -> Result<Self> {
        let mut filtrations = Vec::new();
        for i in 0..fan.ray_count() {
            let c = d.coeff(i);
            if !c.denom().is_one() {
                return Err(Error::NonIntegerCoefficient(i));
            }
            let a: i64 = c
                .numer()
                .try_into()
                .map_err(|_| Error::NonIntegerCoefficient(i))?;
            filtrations.push(Filtration::single_jump(1, -a));
        }
        Ok(ToricSheaf {
            fan,
            rank: 1,
            filtrations,
        })
    }

    pub fn structure(fan: Arc<Fan>) -> Self {
        Self::rank_one(fan, &InvariantDivisor::zero()).expect("zero divisor is integral")
    }

    /// Blockwise direct sum of two sheaves on the same fan.
    pub fn direct_sum(&self, other: &ToricSheaf) -> Result<ToricSheaf> {
        if self.fan != other.fan {
            return Err(Error::FanMismatch);
        }
        let rank = self.rank + other.rank;
        let mut filtrations = Vec::new();
        for (fa, fb) in self.filtrations.iter().zip(&other.filtrations) {
            let mut levels: Vec<i64> = fa
                .jumps()
                .iter()
                .chain(fb.jumps())
                .map(|(l, _)| *l)
                .collect();
            levels.sort_unstable();
            levels.dedup();
            let mut jumps = Vec::new();
            let mut prev_dim = 0usize;
            for l in levels {
                let a = fa.space_at(l);
                let b = fb.space_at(l);
                if a.dim() + b.dim() > prev_dim {
                    prev_dim = a.dim() + b.dim();
                    jumps.push((l, block_sum(&a, &b, self.rank, other.rank)?));
                }
            }
            filtrations.push(Filtration::new(jumps)?);
        }
        ToricSheaf::new(self.fan.clone(), rank, filtrations)
    }

    /// Per-ray jump statistic iota and the first Chern class
    /// c1 = -sum iota_rho D_rho.
    pub fn iota_vector(&self) -> (Vec<i64>, InvariantDivisor) {
        let iotas: Vec<i64> = self.filtrations.iter().map(|f| f.iota()).collect();
        let c1 = InvariantDivisor::from_coeffs(
            iotas
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, -Rat::from_integer(Int::from(v)))),
        );
        (iotas, c1)
    }

    pub fn c1(&self) -> InvariantDivisor {
        self.iota_vector().1
    }

    /// The saturated subsheaf induced by a subspace: filtrations
    /// F ∩ E(i), renormalised. F = E returns the sheaf itself.
    pub fn induced_subsheaf(&self, f: &Subspace) -> Result<ToricSheaf> {
        if f.is_zero() {
            return Err(Error::ZeroSubspace);
        }
        if f.ambient_dim() != self.rank {
            return Err(Error::AmbientMismatch(f.ambient_dim(), self.rank));
        }
        if f.is_full() {
            return Ok(self.clone());
        }
        let filtrations = self
            .filtrations
            .iter()
            .map(|filt| filt.restricted_to(f))
            .collect::<Result<Vec<_>>>()?;
        ToricSheaf::new(self.fan.clone(), f.dim(), filtrations)
    }

    /// dim of the intersection of the filtration spaces at the pairings
    /// <m, u_rho>, one value per maximal cone.
    pub fn characteristic_function(&self, m: &LatticeVector) -> Vec<usize> {
        self.fan
            .max_cones()
            .iter()
            .map(|c| {
                let mut acc = Subspace::full(self.rank);
                for i in c.ray_indices() {
                    let level: i64 = self
                        .fan
                        .ray(i)
                        .dot_int(&m.0)
                        .try_into()
                        .expect("pairing fits i64");
                    acc = acc
                        .intersect(&self.filtrations[i].space_at(level))
                        .expect("same ambient");
                }
                acc.dim()
            })
            .collect()
    }

    /// Logarithmic condition along delta: a single full jump at each
    /// listed ray.
    pub fn is_logarithmic_along(&self, delta: &[usize]) -> bool {
        delta
            .iter()
            .all(|&i| self.filtrations[i].single_jump_level().is_some())
    }
}

fn block_sum(a: &Subspace, b: &Subspace, dim_a: usize, dim_b: usize) -> Result<Subspace> {
    let total = dim_a + dim_b;
    let mut rows = Vec::new();
    for r in a.basis() {
        let mut row = r.clone();
        row.resize(total, Rat::from_integer(Int::from(0)));
        rows.push(row);
    }
    for r in b.basis() {
        let mut row = vec![Rat::from_integer(Int::from(0)); dim_a];
        row.extend(r.iter().cloned());
        rows.push(row);
    }
    Subspace::from_rows(total, rows)
}
