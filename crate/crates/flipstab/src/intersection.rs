//! Intersection numbers of invariant Q-divisors on complete simplicial
//! toric varieties, degrees against a polarisation, and Q-Cartier /
//! nef / ample classification via support functions.
//!
//! Products of n distinct rays are read off directly: 1/mult(sigma) when
//! the rays span a cone, 0 otherwise. Repeated rays are eliminated by
//! substituting one occurrence of D_rho through the divisor-of-character
//! relation for a functional dual to rho inside a maximal cone containing
//! the whole support of the monomial; that choice strictly reduces the
//! number of repeated factors, so the recursion terminates.

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use crate::error::Error;
use crate::fan::{analyze_fan, Cone, Fan};
use crate::lattice::sublattice_index;
use crate::linalg::solve;
use crate::rat::{Int, Rat};
use crate::Result;

/// A torus-invariant Q-divisor: one rational coefficient per ray
/// (absent = 0).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InvariantDivisor {
    coeffs: BTreeMap<usize, Rat>,
}

impl InvariantDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (usize, Rat)>) -> Self {
        let mut d = InvariantDivisor::default();
        for (i, c) in coeffs {
            d.set(i, c);
        }
        d
    }

    /// The prime divisor D_rho.
    pub fn prime(ray: usize) -> Self {
        Self::from_coeffs([(ray, Rat::one())])
    }

    pub fn set(&mut self, ray: usize, c: Rat) {
        if c.is_zero() {
            self.coeffs.remove(&ray);
        } else {
            self.coeffs.insert(ray, c);
        }
    }

    pub fn coeff(&self, ray: usize) -> Rat {
        self.coeffs.get(&ray).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Rat> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_ray(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scaled(&self, k: &Rat) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(&i, c)| (i, c * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&i, c) in &other.coeffs {
            let v = out.coeff(i) + c;
            out.set(i, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&-Rat::one()))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.denom().is_one())
    }
}

/// The divisor of the character function for m in M_Q: coefficients
/// <m, u_rho> over all rays. Linearly equivalent to zero.
pub fn divisor_of_character(fan: &Fan, m: &[Rat]) -> InvariantDivisor {
    InvariantDivisor::from_coeffs(
        fan.rays()
            .iter()
            .enumerate()
            .map(|(i, u)| (i, u.dot_rat(m))),
    )
}

/// Which maximal cone to pick when several contain the support of a
/// monomial; exposed so that tests can force two distinct reduction paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReductionStrategy {
    #[default]
    FirstCone,
    LastCone,
}

pub struct IntersectionEngine<'a> {
    fan: &'a Fan,
    strategy: ReductionStrategy,
    cone_sets: Vec<Vec<usize>>,
    mults: Vec<Int>,
    /// Dual basis rows per maximal cone: dual[k][j] pairs to 1 with the
    /// j-th ray of cone k and to 0 with its other rays.
    duals: Vec<Vec<Vec<Rat>>>,
    memo: HashMap<Vec<usize>, Rat>,
}

impl<'a> IntersectionEngine<'a> {
    pub fn new(fan: &'a Fan) -> Result<Self> {
        Self::with_strategy(fan, ReductionStrategy::default())
    }

    pub fn with_strategy(fan: &'a Fan, strategy: ReductionStrategy) -> Result<Self> {
        let report = analyze_fan(fan);
        if !report.is_valid {
            return Err(Error::InvalidFan(
                report.diagnostic.unwrap_or_else(|| "invalid".into()),
            ));
        }
        if !report.is_simplicial {
            return Err(Error::NotSimplicial);
        }
        if !report.is_complete {
            return Err(Error::NotComplete);
        }
        let mut cone_sets = Vec::new();
        let mut mults = Vec::new();
        let mut duals = Vec::new();
        for c in fan.max_cones() {
            let rays: Vec<usize> = c.ray_indices().collect();
            mults.push(sublattice_index(&fan.cone_vectors(c))?);
            let rows: Vec<Vec<Rat>> = rays.iter().map(|&i| fan.ray(i).to_rat_row()).collect();
            let mut cone_duals = Vec::new();
            for j in 0..rays.len() {
                let rhs: Vec<Rat> = (0..rays.len())
                    .map(|i| if i == j { Rat::one() } else { Rat::zero() })
                    .collect();
                let m = solve(&rows, &rhs).ok_or(Error::NotSimplicial)?;
                cone_duals.push(m);
            }
            duals.push(cone_duals);
            cone_sets.push(rays);
        }
        Ok(IntersectionEngine {
            fan,
            strategy,
            cone_sets,
            mults,
            duals,
            memo: HashMap::new(),
        })
    }

    pub fn fan(&self) -> &Fan {
        self.fan
    }

    /// Intersection number of n invariant divisors.
    pub fn product(&mut self, divisors: &[InvariantDivisor]) -> Result<Rat> {
        let n = self.fan.rank();
        if divisors.len() != n {
            return Err(Error::DivisorCount {
                expected: n,
                got: divisors.len(),
            });
        }
        for d in divisors {
            if let Some(i) = d.max_ray() {
                if i >= self.fan.ray_count() {
                    return Err(Error::RayIndex(i));
                }
            }
        }
        // multilinear expansion into ray monomials
        let mut total = Rat::zero();
        let mut monomial = vec![0usize; n];
        self.expand(divisors, 0, &mut monomial, &Rat::one(), &mut total);
        Ok(total)
    }

    /// Degree of D with respect to L: the product D . L^(n-1).
    pub fn degree(&mut self, d: &InvariantDivisor, l: &InvariantDivisor) -> Result<Rat> {
        let mut factors = vec![d.clone()];
        factors.extend(std::iter::repeat_n(
            l.clone(),
            self.fan.rank().saturating_sub(1),
        ));
        self.product(&factors)
    }

    fn expand(
        &mut self,
        divisors: &[InvariantDivisor],
        k: usize,
        monomial: &mut Vec<usize>,
        coeff: &Rat,
        total: &mut Rat,
    ) {
        if k == divisors.len() {
            let mut key = monomial.clone();
            key.sort_unstable();
            let v = self.eval_monomial(&key);
            *total += coeff * v;
            return;
        }
        for (&ray, c) in divisors[k].coeffs() {
            if c.is_zero() {
                continue;
            }
            monomial[k] = ray;
            let next = coeff * c;
            self.expand(divisors, k + 1, monomial, &next, total);
        }
    }

    /// Value of a sorted ray-index monomial (with multiplicities) of
    /// length n.
    fn eval_monomial(&mut self, key: &[usize]) -> Rat {
        if let Some(v) = self.memo.get(key) {
            return v.clone();
        }
        let mut support: Vec<usize> = key.to_vec();
        support.dedup();
        let enclosing = self.cone_with_support(&support);
        let value = match enclosing {
            None => Rat::zero(),
            Some(cone_idx) => {
                if support.len() == key.len() {
                    // squarefree: the support spans a maximal cone
                    Rat::new(Int::one(), self.mults[cone_idx].clone())
                } else {
                    self.reduce_repeated(key, cone_idx)
                }
            }
        };
        self.memo.insert(key.to_vec(), value.clone());
        value
    }

    fn cone_with_support(&self, support: &[usize]) -> Option<usize> {
        let hit = |rays: &Vec<usize>| support.iter().all(|r| rays.contains(r));
        match self.strategy {
            ReductionStrategy::FirstCone => self.cone_sets.iter().position(hit),
            ReductionStrategy::LastCone => self.cone_sets.iter().rposition(hit),
        }
    }

    fn reduce_repeated(&mut self, key: &[usize], cone_idx: usize) -> Rat {
        // ray with the highest remaining multiplicity (smallest index on ties)
        let mut best = key[0];
        let mut best_count = 0usize;
        let mut i = 0;
        while i < key.len() {
            let j = key[i..]
                .iter()
                .position(|&r| r != key[i])
                .map_or(key.len(), |p| i + p);
            let count = j - i;
            if count > best_count {
                best = key[i];
                best_count = count;
            }
            i = j;
        }
        debug_assert!(best_count >= 2);
        let pos_in_cone = self.cone_sets[cone_idx]
            .iter()
            .position(|&r| r == best)
            .expect("support inside cone");
        let dual = self.duals[cone_idx][pos_in_cone].clone();
        // D_best ~ -sum over rays outside the cone of <m, u_rho> D_rho
        let mut acc = Rat::zero();
        for ray in 0..self.fan.ray_count() {
            if self.cone_sets[cone_idx].contains(&ray) {
                continue;
            }
            let pairing = self.fan.ray(ray).dot_rat(&dual);
            if pairing.is_zero() {
                continue;
            }
            let mut sub_key: Vec<usize> = key.to_vec();
            let pos = sub_key.iter().position(|&r| r == best).expect("present");
            sub_key[pos] = ray;
            sub_key.sort_unstable();
            acc += -pairing * self.eval_monomial(&sub_key);
        }
        acc
    }
}

/// Convenience wrapper building a throwaway engine.
pub fn intersection_number(fan: &Fan, divisors: &[InvariantDivisor]) -> Result<Rat> {
    IntersectionEngine::new(fan)?.product(divisors)
}

pub fn degree(fan: &Fan, d: &InvariantDivisor, l: &InvariantDivisor) -> Result<Rat> {
    IntersectionEngine::new(fan)?.degree(d, l)
}

/// Per-maximal-cone linear data of a Q-Cartier divisor: a point m_sigma of
/// M_Q with <m_sigma, u_rho> = -a_rho on the rays of sigma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierData {
    pub cone_points: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CartierAmple {
    NotQCartier {
        cone: usize,
    },
    QCartier {
        data: CartierData,
        nef: bool,
        ample: bool,
    },
}

impl CartierAmple {
    pub fn is_ample(&self) -> bool {
        matches!(self, CartierAmple::QCartier { ample: true, .. })
    }

    pub fn is_nef(&self) -> bool {
        matches!(self, CartierAmple::QCartier { nef: true, .. })
    }
}

/// Q-Cartier test plus nef/ample classification of a divisor on a complete
/// fan, by convexity of its support function across walls. The support
/// function takes value -a_rho on u_rho; the divisor is nef (ample) iff
/// for every maximal cone sigma and every ray rho outside sigma,
/// <m_sigma, u_rho> >= -a_rho (respectively >).
pub fn cartier_and_ample(fan: &Fan, d: &InvariantDivisor) -> Result<CartierAmple> {
    let report = analyze_fan(fan);
    if !report.is_valid {
        return Err(Error::InvalidFan(
            report.diagnostic.unwrap_or_else(|| "invalid".into()),
        ));
    }
    if !report.is_complete {
        return Err(Error::NotComplete);
    }
    if let Some(i) = d.max_ray() {
        if i >= fan.ray_count() {
            return Err(Error::RayIndex(i));
        }
    }
    let mut points = Vec::new();
    for (k, c) in fan.max_cones().iter().enumerate() {
        let rays: Vec<usize> = c.ray_indices().collect();
        let rows: Vec<Vec<Rat>> = rays.iter().map(|&i| fan.ray(i).to_rat_row()).collect();
        let rhs: Vec<Rat> = rays.iter().map(|&i| -d.coeff(i)).collect();
        match solve(&rows, &rhs) {
            Some(m) => points.push(m),
            None => return Ok(CartierAmple::NotQCartier { cone: k }),
        }
    }
    let mut nef = true;
    let mut ample = true;
    for (k, c) in fan.max_cones().iter().enumerate() {
        for ray in 0..fan.ray_count() {
            if c.contains_ray(ray) {
                continue;
            }
            let lhs = fan.ray(ray).dot_rat(&points[k]);
            let rhs = -d.coeff(ray);
            if lhs < rhs {
                nef = false;
                ample = false;
            } else if lhs == rhs {
                ample = false;
            }
        }
    }
    Ok(CartierAmple::QCartier {
        data: CartierData {
            cone_points: points,
        },
        nef,
        ample,
    })
}

/// Checks that a set of ray indices spans a cone of the fan (used by tests
/// and the sheaf layer).
pub fn spans_cone(fan: &Fan, rays: &[usize]) -> bool {
    fan.has_cone(&Cone::new(rays.iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;
    use crate::rat::{rat, rat_int};

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    fn example_rays() -> Vec<LatticeVector> {
        vec![
            lv(&[-1, -1, -1]),
            lv(&[1, 0, 0]),
            lv(&[1, 1, -1]),
            lv(&[0, 1, 0]),
            lv(&[0, 0, 1]),
        ]
    }

    fn fan_x() -> Fan {
        Fan::new(
            3,
            example_rays(),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 3],
                vec![0, 3, 4],
                vec![0, 4, 1],
                vec![1, 2, 4],
                vec![2, 3, 4],
            ],
        )
        .unwrap()
    }

    fn fan_xprime() -> Fan {
        Fan::new(
            3,
            example_rays(),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 3],
                vec![0, 3, 4],
                vec![0, 4, 1],
                vec![1, 2, 3],
                vec![1, 3, 4],
            ],
        )
        .unwrap()
    }

    fn fan_x0() -> Fan {
        Fan::new(
            3,
            example_rays(),
            vec![
                vec![1, 2, 3, 4],
                vec![0, 1, 2],
                vec![0, 2, 3],
                vec![0, 3, 4],
                vec![0, 4, 1],
            ],
        )
        .unwrap()
    }

    fn fan_p2() -> Fan {
        Fan::new(
            2,
            vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap()
    }

    fn d(i: usize) -> InvariantDivisor {
        InvariantDivisor::prime(i)
    }

    #[test]
    fn character_divisors_give_linear_equivalences() {
        let fan = fan_x();
        // m = e3: -D0 - D2 + D4, so D4 ~ D0 + D2
        let e3 = divisor_of_character(&fan, &[rat_int(0), rat_int(0), rat_int(1)]);
        assert_eq!(e3.coeff(0), rat_int(-1));
        assert_eq!(e3.coeff(2), rat_int(-1));
        assert_eq!(e3.coeff(4), rat_int(1));
        assert_eq!(e3.coeff(1), rat_int(0));
        assert_eq!(e3.coeff(3), rat_int(0));
        // m = e1: -D0 + D1 + D2, so D1 ~ D0 - D2
        let e1 = divisor_of_character(&fan, &[rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(e1.coeff(0), rat_int(-1));
        assert_eq!(e1.coeff(1), rat_int(1));
        assert_eq!(e1.coeff(2), rat_int(1));
        // m = 0: zero divisor
        let z = divisor_of_character(&fan, &[rat_int(0), rat_int(0), rat_int(0)]);
        assert!(z.is_zero());
    }

    #[test]
    fn example_intersection_numbers_on_x() {
        let fan = fan_x();
        let mut e = IntersectionEngine::new(&fan).unwrap();
        assert_eq!(e.product(&[d(1), d(0), d(0)]).unwrap(), rat(1, 2));
        assert_eq!(e.product(&[d(2), d(2), d(2)]).unwrap(), rat(-3, 4));
        assert_eq!(e.product(&[d(1), d(3), d(0)]).unwrap(), rat_int(0));
    }

    #[test]
    fn example_intersection_numbers_on_xprime() {
        let fan = fan_xprime();
        let mut e = IntersectionEngine::new(&fan).unwrap();
        assert_eq!(e.product(&[d(2), d(2), d(2)]).unwrap(), rat(1, 4));
        assert_eq!(e.product(&[d(4), d(2), d(2)]).unwrap(), rat_int(0));
    }

    #[test]
    fn engine_rejects_bad_inputs() {
        assert!(matches!(
            IntersectionEngine::new(&fan_x0()),
            Err(Error::NotSimplicial)
        ));
        let incomplete = Fan::new(2, vec![lv(&[1, 0]), lv(&[0, 1])], vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            IntersectionEngine::new(&incomplete),
            Err(Error::NotComplete)
        ));
        let fan = fan_x();
        let mut e = IntersectionEngine::new(&fan).unwrap();
        assert!(matches!(
            e.product(&[d(0), d(1)]),
            Err(Error::DivisorCount {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn degrees_with_respect_to_d0() {
        let fan = fan_x();
        let mut e = IntersectionEngine::new(&fan).unwrap();
        assert_eq!(e.degree(&d(2), &d(0)).unwrap(), rat(1, 4));
        assert_eq!(e.degree(&d(4), &d(0)).unwrap(), rat_int(1));
        // principal divisors have degree zero
        let m = [rat(2, 3), rat_int(-1), rat(5, 7)];
        let principal = divisor_of_character(&fan, &m);
        assert_eq!(e.degree(&principal, &d(0)).unwrap(), rat_int(0));
    }

    #[test]
    fn reduction_path_independence() {
        let fan = fan_x();
        let mut first =
            IntersectionEngine::with_strategy(&fan, ReductionStrategy::FirstCone).unwrap();
        let mut last =
            IntersectionEngine::with_strategy(&fan, ReductionStrategy::LastCone).unwrap();
        for combo in [
            vec![d(0), d(0), d(0)],
            vec![d(2), d(2), d(2)],
            vec![d(4), d(4), d(4)],
            vec![d(1), d(2), d(2)],
            vec![d(0), d(4), d(4)],
        ] {
            assert_eq!(
                first.product(&combo).unwrap(),
                last.product(&combo).unwrap()
            );
        }
    }

    #[test]
    fn adding_principal_divisor_leaves_products_unchanged() {
        let fan = fan_x();
        let mut e = IntersectionEngine::new(&fan).unwrap();
        let principal = divisor_of_character(&fan, &[rat_int(1), rat(1, 2), rat_int(-2)]);
        let shifted = d(2).add(&principal);
        assert_eq!(
            e.product(&[shifted.clone(), d(0), d(4)]).unwrap(),
            e.product(&[d(2), d(0), d(4)]).unwrap()
        );
        assert_eq!(
            e.product(&[shifted.clone(), shifted.clone(), d(0)])
                .unwrap(),
            e.product(&[d(2), d(2), d(0)]).unwrap()
        );
    }

    #[test]
    fn cartier_and_ample_classification() {
        // D0 on the non-simplicial base fan is Cartier and ample
        let base = fan_x0();
        let r = cartier_and_ample(&base, &d(0)).unwrap();
        assert!(r.is_ample());
        // pulled back to the subdivided fan it is nef but not ample
        let fan = fan_x();
        let r = cartier_and_ample(&fan, &d(0)).unwrap();
        assert!(r.is_nef() && !r.is_ample());
        // anticanonical divisor on the projective plane is ample
        let p2 = fan_p2();
        let anti = d(0).add(&d(1)).add(&d(2));
        assert!(cartier_and_ample(&p2, &anti).unwrap().is_ample());
    }

    #[test]
    fn classical_anticanonical_degrees() {
        // (-K)^2 = 9 on the projective plane
        let p2 = fan_p2();
        let anti = d(0).add(&d(1)).add(&d(2));
        let mut e = IntersectionEngine::new(&p2).unwrap();
        assert_eq!(e.product(&[anti.clone(), anti.clone()]).unwrap(), rat_int(9));
        // (-K)^3 = 48 on the triple product of projective lines
        let rays = vec![
            lv(&[1, 0, 0]),
            lv(&[-1, 0, 0]),
            lv(&[0, 1, 0]),
            lv(&[0, -1, 0]),
            lv(&[0, 0, 1]),
            lv(&[0, 0, -1]),
        ];
        let mut cones = Vec::new();
        for x in [0usize, 1] {
            for y in [2usize, 3] {
                for z in [4usize, 5] {
                    cones.push(vec![x, y, z]);
                }
            }
        }
        let cube = Fan::new(3, rays, cones).unwrap();
        let anti = (0..6).fold(InvariantDivisor::zero(), |acc, i| acc.add(&d(i)));
        let mut e = IntersectionEngine::new(&cube).unwrap();
        assert_eq!(
            e.product(&[anti.clone(), anti.clone(), anti]).unwrap(),
            rat_int(48)
        );
    }

    #[test]
    fn non_cartier_divisor_detected() {
        // on the base fan, D2 alone has no linear data on the big cone
        let base = fan_x0();
        let r = cartier_and_ample(&base, &d(2)).unwrap();
        assert!(matches!(r, CartierAmple::NotQCartier { .. }));
    }
}
