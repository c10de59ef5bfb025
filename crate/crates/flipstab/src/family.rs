//! The one-parameter polarisation families attached to a flip: pullback
//! of the base polarisation plus or minus eps times the distinguished
//! divisor. Slopes and degrees become exact polynomials in eps, which
//! drive the small-eps stability verdicts, the first-order classifier
//! across the flip, and the polystability-preservation test for the
//! logarithmic subcategories.

use num::{One, Signed, Zero};

use crate::epspoly::EpsPoly;
use crate::error::Error;
use crate::fan::Fan;
use crate::flip::FlipData;
use crate::intersection::{cartier_and_ample, IntersectionEngine, InvariantDivisor};
use crate::linalg::solve;
use crate::rat::{Int, Rat};
use crate::sheaf::ToricSheaf;
use crate::stability::{
    ray_degrees, stability_verdict_with_cap, subspace_iotas, test_subspaces, StabilityStatus,
    StabilityVerdict, DEFAULT_CANDIDATE_CAP,
};
use crate::subspace::Subspace;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    XPrime,
}

impl Side {
    /// Sign of the eps term: pullback minus eps D_+ on X, plus on X'.
    fn sign(self) -> i64 {
        match self {
            Side::X => -1,
            Side::XPrime => 1,
        }
    }
}

/// Supremum of the ample range of the family (open interval from zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmpleRangeSup {
    Bounded(Rat),
    Unbounded,
}

impl AmpleRangeSup {
    pub fn min_with(self, other: AmpleRangeSup) -> AmpleRangeSup {
        match (self, other) {
            (AmpleRangeSup::Unbounded, b) => b,
            (a, AmpleRangeSup::Unbounded) => a,
            (AmpleRangeSup::Bounded(a), AmpleRangeSup::Bounded(b)) => {
                AmpleRangeSup::Bounded(a.min(b))
            }
        }
    }

    pub fn bounded(&self) -> Option<&Rat> {
        match self {
            AmpleRangeSup::Bounded(r) => Some(r),
            AmpleRangeSup::Unbounded => None,
        }
    }
}

/// One side of the flip with its polarisation family. Degree polynomials
/// of the prime divisors are precomputed at construction.
#[derive(Debug, Clone)]
pub struct PolarisationFamily {
    flip: FlipData,
    l0: InvariantDivisor,
    side: Side,
    ray_degree_polys: Vec<EpsPoly>,
}

fn binomial(n: usize, k: usize) -> Int {
    let mut num = Int::one();
    let mut den = Int::one();
    for i in 0..k {
        num *= Int::from((n - i) as i64);
        den *= Int::from((i + 1) as i64);
    }
    num / den
}

impl PolarisationFamily {
    /// Requires the base polarisation to be ample on the base fan.
    pub fn new(flip: &FlipData, l0: &InvariantDivisor, side: Side) -> Result<Self> {
        if !cartier_and_ample(flip.base_fan(), l0)?.is_ample() {
            return Err(Error::NotAmple);
        }
        let fan: &Fan = match side {
            Side::X => flip.x_fan(),
            Side::XPrime => flip.xprime_fan(),
        };
        let n = fan.rank();
        let mut engine = IntersectionEngine::new(fan)?;
        let sign = Rat::from_integer(Int::from(side.sign()));
        let mut ray_degree_polys = Vec::new();
        for ray in 0..fan.ray_count() {
            let mut coeffs = Vec::new();
            let mut sign_pow = Rat::one();
            for k in 0..n {
                // D_rho . D_+^k . (pullback L0)^(n-1-k), with multiplicity
                let mut factors = vec![InvariantDivisor::prime(ray)];
                factors.extend(std::iter::repeat_n(flip.d_plus().clone(), k));
                factors.extend(std::iter::repeat_n(l0.clone(), n - 1 - k));
                let value = engine.product(&factors)?;
                coeffs.push(Rat::from_integer(binomial(n - 1, k)) * &sign_pow * value);
                sign_pow *= &sign;
            }
            ray_degree_polys.push(EpsPoly::from_coeffs(coeffs));
        }
        Ok(PolarisationFamily {
            flip: flip.clone(),
            l0: l0.clone(),
            side,
            ray_degree_polys,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn flip(&self) -> &FlipData {
        &self.flip
    }

    pub fn fan(&self) -> &std::sync::Arc<Fan> {
        match self.side {
            Side::X => self.flip.x_fan(),
            Side::XPrime => self.flip.xprime_fan(),
        }
    }

    /// The family divisor at a concrete parameter value.
    pub fn divisor_at(&self, eps: &Rat) -> InvariantDivisor {
        let sign = Rat::from_integer(Int::from(self.side.sign()));
        self.l0.add(&self.flip.d_plus().scaled(&(sign * eps)))
    }

    /// Degree polynomial of the prime divisor at a ray.
    pub fn epsilon_degree(&self, ray: usize) -> Result<&EpsPoly> {
        self.ray_degree_polys.get(ray).ok_or(Error::RayIndex(ray))
    }

    /// Slope polynomial of a sheaf on this side's fan.
    pub fn epsilon_slope(&self, s: &ToricSheaf) -> Result<EpsPoly> {
        if **s.fan() != **self.fan() {
            return Err(Error::FanMismatch);
        }
        let (iotas, _) = s.iota_vector();
        Ok(self.weighted_slope_poly(&iotas, s.rank()))
    }

    /// Slope polynomial of the subsheaf induced by a subspace.
    pub fn epsilon_slope_of_subspace(&self, s: &ToricSheaf, f: &Subspace) -> Result<EpsPoly> {
        if **s.fan() != **self.fan() {
            return Err(Error::FanMismatch);
        }
        let iotas = subspace_iotas(s, f)?;
        Ok(self.weighted_slope_poly(&iotas, f.dim()))
    }

    fn weighted_slope_poly(&self, iotas: &[i64], rank: usize) -> EpsPoly {
        let mut acc = EpsPoly::zero();
        for (poly, &iota) in self.ray_degree_polys.iter().zip(iotas) {
            if iota != 0 {
                acc = acc.add(&poly.scaled(&Rat::from_integer(Int::from(-iota))));
            }
        }
        acc.scaled(&Rat::new(Int::one(), Int::from(rank as i64)))
    }

    /// Largest eps_max such that the family divisor is ample for all
    /// 0 < eps < eps_max, from the per-wall strict convexity inequalities
    /// (each affine linear in eps).
    pub fn ample_epsilon_range(&self) -> Result<AmpleRangeSup> {
        let fan = self.fan();
        let sign = Rat::from_integer(Int::from(self.side.sign()));
        let a0 = &self.l0;
        let a1 = self.flip.d_plus().scaled(&sign);
        let mut sup = AmpleRangeSup::Unbounded;
        for c in fan.max_cones() {
            let rays: Vec<usize> = c.ray_indices().collect();
            let rows: Vec<Vec<Rat>> = rays.iter().map(|&i| fan.ray(i).to_rat_row()).collect();
            let rhs0: Vec<Rat> = rays.iter().map(|&i| -a0.coeff(i)).collect();
            let rhs1: Vec<Rat> = rays.iter().map(|&i| -a1.coeff(i)).collect();
            let m0 = solve(&rows, &rhs0).ok_or(Error::NotQCartier)?;
            let m1 = solve(&rows, &rhs1).ok_or(Error::NotQCartier)?;
            for ray in 0..fan.ray_count() {
                if c.contains_ray(ray) {
                    continue;
                }
                // <m_sigma(eps), u> + a_u(eps) = c0 + c1 eps must stay > 0
                let c0 = fan.ray(ray).dot_rat(&m0) + a0.coeff(ray);
                let c1 = fan.ray(ray).dot_rat(&m1) + a1.coeff(ray);
                if c0.is_negative() || (c0.is_zero() && !c1.is_positive()) {
                    return Err(Error::NoPositiveEpsRange(format!(
                        "wall inequality fails at ray {ray} for arbitrarily small eps"
                    )));
                }
                if c1.is_negative() {
                    let root = -c0 / c1;
                    sup = sup.min_with(AmpleRangeSup::Bounded(root));
                }
            }
        }
        if let AmpleRangeSup::Bounded(b) = &sup {
            if !b.is_positive() {
                return Err(Error::NoPositiveEpsRange("empty interval".into()));
            }
        }
        Ok(sup)
    }
}

/// A stability verdict valid on a certified open interval (0, threshold).
#[derive(Debug, Clone)]
pub struct SmallEpsVerdict {
    pub status: StabilityStatus,
    pub witness: Option<Subspace>,
    /// Verdict (and all slope-difference signs) hold on (0, threshold).
    pub threshold: AmpleRangeSup,
    pub slope_poly: EpsPoly,
}

/// Verdict for all sufficiently small eps > 0: each candidate subspace is
/// compared through the lowest-order nonzero coefficient of the difference
/// of slope polynomials; the certified threshold keeps every comparison
/// sign-stable and stays inside the ample range.
pub fn small_eps_verdict(pf: &PolarisationFamily, s: &ToricSheaf) -> Result<SmallEpsVerdict> {
    small_eps_verdict_with_cap(pf, s, DEFAULT_CANDIDATE_CAP)
}

pub fn small_eps_verdict_with_cap(
    pf: &PolarisationFamily,
    s: &ToricSheaf,
    cap: usize,
) -> Result<SmallEpsVerdict> {
    if **s.fan() != **pf.fan() {
        return Err(Error::FanMismatch);
    }
    let slope_poly = pf.epsilon_slope(s)?;
    let mut threshold = pf.ample_epsilon_range()?;
    if s.rank() == 1 {
        return Ok(SmallEpsVerdict {
            status: StabilityStatus::Stable,
            witness: None,
            threshold,
            slope_poly,
        });
    }
    let mut status = StabilityStatus::Stable;
    let mut witness: Option<Subspace> = None;
    for f in test_subspaces(s, cap)? {
        let diff = pf.epsilon_slope_of_subspace(s, &f)?.sub(&slope_poly);
        match diff.sign_near_zero() {
            1 => {
                if !matches!(status, StabilityStatus::Unstable) {
                    status = StabilityStatus::Unstable;
                    witness = Some(f.clone());
                }
            }
            0 if matches!(status, StabilityStatus::Stable) => {
                status = StabilityStatus::StrictlySemistable;
                witness = Some(f.clone());
            }
            _ => {}
        }
        if let Some(bound) = diff.positive_root_lower_bound() {
            threshold = threshold.min_with(AmpleRangeSup::Bounded(bound));
        }
    }
    Ok(SmallEpsVerdict {
        status,
        witness,
        threshold,
        slope_poly,
    })
}

/// Outcome of the first-order comparison across the flip.
#[derive(Debug, Clone)]
pub enum FlipCase {
    /// Stable pushforward: stable on both sides.
    BothStable,
    /// Unstable pushforward: unstable on both sides.
    BothUnstable,
    /// Semistable with every first-order candidate strictly above the
    /// sheaf: stable on X, unstable on X'.
    StableOnXUnstableOnXPrime,
    /// Semistable with every first-order candidate strictly below the
    /// sheaf: unstable on X, stable on X'.
    UnstableOnXStableOnXPrime,
    /// Ties in the first-order term: settled by the small-eps verdicts.
    FirstOrderInconclusive {
        x_side: SmallEpsVerdict,
        xprime_side: SmallEpsVerdict,
    },
}

#[derive(Debug, Clone)]
pub struct ClassifierReport {
    /// Verdict of the pushforward against the pulled-back base
    /// polarisation (equal slopes by the projection formula).
    pub base_verdict: StabilityVerdict,
    /// c1(S) . D_+ . (pullback L0)^(n-2) / rank(S).
    pub first_order_sheaf: Rat,
    /// Same quantity for every equal-slope candidate subsheaf.
    pub first_order_candidates: Vec<(Subspace, Rat)>,
    pub case: FlipCase,
}

/// The classifier: reads the constant term off the pushforward verdict and
/// settles the strictly semistable case by the first-order coefficients
/// over the equal-slope candidate set (a superset of the Jordan-Hoelder
/// subsheaves, so the strict conclusions are sound).
pub fn classify_flip(
    fd: &FlipData,
    l0: &InvariantDivisor,
    s: &ToricSheaf,
) -> Result<ClassifierReport> {
    classify_flip_with_cap(fd, l0, s, DEFAULT_CANDIDATE_CAP)
}

pub fn classify_flip_with_cap(
    fd: &FlipData,
    l0: &InvariantDivisor,
    s: &ToricSheaf,
    cap: usize,
) -> Result<ClassifierReport> {
    if **s.fan() != **fd.x_fan() {
        return Err(Error::FanMismatch);
    }
    if !cartier_and_ample(fd.base_fan(), l0)?.is_ample() {
        return Err(Error::NotAmple);
    }
    let base_verdict = stability_verdict_with_cap(s, l0, cap)?;
    let n = fd.x_fan().rank();
    let mut engine = IntersectionEngine::new(fd.x_fan())?;
    let mut first_order = |c1: &InvariantDivisor, rank: usize| -> Result<Rat> {
        let mut factors = vec![c1.clone(), fd.d_plus().clone()];
        factors.extend(std::iter::repeat_n(l0.clone(), n - 2));
        Ok(engine.product(&factors)? / Rat::from_integer(Int::from(rank as i64)))
    };
    let q_sheaf = first_order(&s.c1(), s.rank())?;

    let case = match base_verdict.status {
        StabilityStatus::Stable => FlipCase::BothStable,
        StabilityStatus::Unstable => FlipCase::BothUnstable,
        StabilityStatus::StrictlySemistable => {
            let mut candidates = Vec::new();
            for f in &base_verdict.maximizers {
                let sub = s.induced_subsheaf(f)?;
                candidates.push((f.clone(), first_order(&sub.c1(), sub.rank())?));
            }
            if candidates.iter().all(|(_, q)| q_sheaf < *q) {
                return Ok(ClassifierReport {
                    base_verdict,
                    first_order_sheaf: q_sheaf,
                    first_order_candidates: candidates,
                    case: FlipCase::StableOnXUnstableOnXPrime,
                });
            }
            if candidates.iter().all(|(_, q)| q_sheaf > *q) {
                return Ok(ClassifierReport {
                    base_verdict,
                    first_order_sheaf: q_sheaf,
                    first_order_candidates: candidates,
                    case: FlipCase::UnstableOnXStableOnXPrime,
                });
            }
            let pf_x = PolarisationFamily::new(fd, l0, Side::X)?;
            let pf_xp = PolarisationFamily::new(fd, l0, Side::XPrime)?;
            let s_prime = crate::flip::flip_functor(fd, s)?;
            let case = FlipCase::FirstOrderInconclusive {
                x_side: small_eps_verdict_with_cap(&pf_x, s, cap)?,
                xprime_side: small_eps_verdict_with_cap(&pf_xp, &s_prime, cap)?,
            };
            return Ok(ClassifierReport {
                base_verdict,
                first_order_sheaf: q_sheaf,
                first_order_candidates: candidates,
                case,
            });
        }
    };
    Ok(ClassifierReport {
        base_verdict,
        first_order_sheaf: q_sheaf,
        first_order_candidates: Vec::new(),
        case,
    })
}

/// Result of the degree-proportionality test for the logarithmic
/// subcategory along delta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogPreservation {
    /// Proportionality holds; the ratio is None when no ray constrains it
    /// (delta covers every ray, a vacuous check).
    Preserves { ratio: Option<Rat> },
    /// A pair of rays with incompatible degree ratios; the rank-one-sum
    /// test sheaf built from the pair separates the two sides.
    Fails { witness: (usize, usize) },
}

/// Polystability preservation for the logarithmic subcategory along delta:
/// holds iff the degrees of the prime divisors away from delta are
/// proportional across the two sides, with a positive constant.
pub fn log_preservation_check(
    fd: &FlipData,
    delta: &[usize],
    alpha: &InvariantDivisor,
    alpha_prime: &InvariantDivisor,
) -> Result<LogPreservation> {
    if !cartier_and_ample(fd.x_fan(), alpha)?.is_ample() {
        return Err(Error::NotAmple);
    }
    if !cartier_and_ample(fd.xprime_fan(), alpha_prime)?.is_ample() {
        return Err(Error::NotAmple);
    }
    let degs_x = ray_degrees(fd.x_fan(), alpha)?;
    let degs_xp = ray_degrees(fd.xprime_fan(), alpha_prime)?;
    let free: Vec<usize> = (0..fd.x_fan().ray_count())
        .filter(|i| !delta.contains(i))
        .collect();
    if free.is_empty() {
        return Ok(LogPreservation::Preserves { ratio: None });
    }
    for i in 0..free.len() {
        for j in i + 1..free.len() {
            let (a, b) = (free[i], free[j]);
            if &degs_x[a] * &degs_xp[b] != &degs_x[b] * &degs_xp[a] {
                return Ok(LogPreservation::Fails { witness: (a, b) });
            }
        }
    }
    let pivot = free[0];
    Ok(LogPreservation::Preserves {
        ratio: Some(&degs_x[pivot] / &degs_xp[pivot]),
    })
}

/// The rank-one-sum test sheaf attached to a witness pair: twice the
/// common denominator of the two degrees clears all coefficients to
/// integers, and the two summands have equal slope against alpha.
pub fn log_witness_sheaf(
    fd: &FlipData,
    alpha: &InvariantDivisor,
    pair: (usize, usize),
) -> Result<ToricSheaf> {
    let degs = ray_degrees(fd.x_fan(), alpha)?;
    let (r1, r2) = pair;
    let d = crate::rat::common_denominator(&[degs[r1].clone(), degs[r2].clone()]);
    let scale = Rat::from_integer(d);
    let a = InvariantDivisor::from_coeffs([(r1, &degs[r2] * &scale)]);
    let b = InvariantDivisor::from_coeffs([(r2, &degs[r1] * &scale)]);
    let left = ToricSheaf::rank_one(fd.x_fan().clone(), &a)?;
    let right = ToricSheaf::rank_one(fd.x_fan().clone(), &b)?;
    left.direct_sum(&right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::Cone;
    use crate::flip::{build_flip, validate_flipping_cone};
    use crate::lattice::LatticeVector;
    use crate::rat::{rat, rat_int};
    use std::sync::Arc;

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    fn base_fan() -> Arc<Fan> {
        Arc::new(
            Fan::new(
                3,
                vec![
                    lv(&[-1, -1, -1]),
                    lv(&[1, 0, 0]),
                    lv(&[1, 1, -1]),
                    lv(&[0, 1, 0]),
                    lv(&[0, 0, 1]),
                ],
                vec![
                    vec![1, 2, 3, 4],
                    vec![0, 1, 2],
                    vec![0, 2, 3],
                    vec![0, 3, 4],
                    vec![0, 4, 1],
                ],
            )
            .unwrap(),
        )
    }

    fn example_flip() -> FlipData {
        let base = base_fan();
        let fc = validate_flipping_cone(&base, &Cone::new([1, 2, 3, 4])).unwrap();
        build_flip(&base, &fc).unwrap()
    }

    fn l0() -> InvariantDivisor {
        InvariantDivisor::prime(0)
    }

    fn poly(cs: &[Rat]) -> EpsPoly {
        EpsPoly::from_coeffs(cs.to_vec())
    }

    #[test]
    fn degree_polynomials_on_x() {
        let fd = example_flip();
        let pf = PolarisationFamily::new(&fd, &l0(), Side::X).unwrap();
        assert_eq!(
            pf.epsilon_degree(1).unwrap(),
            &poly(&[rat(1, 2), rat_int(-3), rat(9, 2)])
        );
        assert_eq!(
            pf.epsilon_degree(2).unwrap(),
            &poly(&[rat(1, 4), rat(1, 2), rat(-15, 4)])
        );
        assert_eq!(
            pf.epsilon_degree(4).unwrap(),
            &poly(&[rat_int(1), rat_int(-2), rat_int(-3)])
        );
        assert_eq!(
            pf.epsilon_degree(0).unwrap(),
            &poly(&[rat(3, 4), rat(-5, 2), rat(3, 4)])
        );
    }

    #[test]
    fn degree_polynomials_on_xprime() {
        let fd = example_flip();
        let pf = PolarisationFamily::new(&fd, &l0(), Side::XPrime).unwrap();
        assert_eq!(
            pf.epsilon_degree(1).unwrap(),
            &poly(&[rat(1, 2), rat_int(3), rat(1, 2)])
        );
        assert_eq!(
            pf.epsilon_degree(2).unwrap(),
            &poly(&[rat(1, 4), rat(-1, 2), rat(1, 4)])
        );
        assert_eq!(
            pf.epsilon_degree(4).unwrap(),
            &poly(&[rat_int(1), rat_int(2), rat_int(1)])
        );
        assert_eq!(
            pf.epsilon_degree(0).unwrap(),
            &poly(&[rat(3, 4), rat(5, 2), rat(3, 4)])
        );
    }

    #[test]
    fn slope_polynomials_of_the_tangent_sheaf() {
        let fd = example_flip();
        let pf = PolarisationFamily::new(&fd, &l0(), Side::X).unwrap();
        let t = ToricSheaf::tangent(fd.x_fan().clone());
        assert_eq!(
            pf.epsilon_slope(&t).unwrap(),
            poly(&[rat_int(1), rat(-10, 3), rat_int(1)])
        );
        let f1 = Subspace::line(&lv(&[0, 0, 1])).unwrap();
        assert_eq!(
            pf.epsilon_slope_of_subspace(&t, &f1).unwrap(),
            poly(&[rat_int(1), rat_int(-2), rat_int(-3)])
        );

        let pf2 = PolarisationFamily::new(&fd, &l0(), Side::XPrime).unwrap();
        let t2 = crate::flip::flip_functor(&fd, &t).unwrap();
        assert_eq!(
            pf2.epsilon_slope(&t2).unwrap(),
            poly(&[rat_int(1), rat(10, 3), rat_int(1)])
        );
        assert_eq!(
            pf2.epsilon_slope_of_subspace(&t2, &f1).unwrap(),
            poly(&[rat_int(1), rat_int(2), rat_int(1)])
        );
    }

    #[test]
    fn ample_ranges_of_both_sides() {
        let fd = example_flip();
        let pf_x = PolarisationFamily::new(&fd, &l0(), Side::X).unwrap();
        let range_x = pf_x.ample_epsilon_range().unwrap();
        assert_eq!(range_x, AmpleRangeSup::Bounded(rat(1, 3)));
        let pf_xp = PolarisationFamily::new(&fd, &l0(), Side::XPrime).unwrap();
        assert_eq!(
            pf_xp.ample_epsilon_range().unwrap(),
            AmpleRangeSup::Bounded(rat_int(1))
        );
        // ample strictly inside, nef-not-ample at the bound
        let eps_max = range_x.bounded().unwrap().clone();
        let half = &eps_max / rat_int(2);
        let at_half = cartier_and_ample(fd.x_fan(), &pf_x.divisor_at(&half)).unwrap();
        assert!(at_half.is_ample());
        let at_max = cartier_and_ample(fd.x_fan(), &pf_x.divisor_at(&eps_max)).unwrap();
        assert!(at_max.is_nef() && !at_max.is_ample());
        // scaling the base polarisation scales the range
        let scaled = l0().scaled(&rat_int(3));
        let pf_scaled = PolarisationFamily::new(&fd, &scaled, Side::X).unwrap();
        assert_eq!(
            pf_scaled.ample_epsilon_range().unwrap(),
            AmpleRangeSup::Bounded(rat_int(1))
        );
    }

    #[test]
    fn small_eps_verdicts_across_the_flip() {
        let fd = example_flip();
        let t = ToricSheaf::tangent(fd.x_fan().clone());
        let pf_x = PolarisationFamily::new(&fd, &l0(), Side::X).unwrap();
        let vx = small_eps_verdict(&pf_x, &t).unwrap();
        assert_eq!(vx.status, StabilityStatus::Unstable);
        let f1 = Subspace::line(&lv(&[0, 0, 1])).unwrap();
        assert_eq!(vx.witness, Some(f1));
        let thr = vx.threshold.bounded().expect("bounded").clone();
        assert!(thr.is_positive() && thr <= rat(1, 3));

        let pf_xp = PolarisationFamily::new(&fd, &l0(), Side::XPrime).unwrap();
        let t2 = crate::flip::flip_functor(&fd, &t).unwrap();
        let vxp = small_eps_verdict(&pf_xp, &t2).unwrap();
        assert_eq!(vxp.status, StabilityStatus::Stable);

        // rank one: stable with the full ample range as threshold
        let o = ToricSheaf::structure(fd.x_fan().clone());
        let vo = small_eps_verdict(&pf_x, &o).unwrap();
        assert_eq!(vo.status, StabilityStatus::Stable);
        assert_eq!(vo.threshold, AmpleRangeSup::Bounded(rat(1, 3)));
    }

    #[test]
    fn classifier_on_the_example() {
        let fd = example_flip();
        let t = ToricSheaf::tangent(fd.x_fan().clone());
        let report = classify_flip(&fd, &l0(), &t).unwrap();
        assert_eq!(
            report.base_verdict.status,
            StabilityStatus::StrictlySemistable
        );
        assert_eq!(report.first_order_sheaf, rat(5, 3));
        assert_eq!(report.first_order_candidates.len(), 2);
        for (_, q) in &report.first_order_candidates {
            assert_eq!(q, &rat_int(1));
        }
        assert!(matches!(report.case, FlipCase::UnstableOnXStableOnXPrime));
    }

    #[test]
    fn classifier_trivial_cases() {
        let fd = example_flip();
        // rank-one sheaves have stable pushforward
        let o = ToricSheaf::structure(fd.x_fan().clone());
        let report = classify_flip(&fd, &l0(), &o).unwrap();
        assert!(matches!(report.case, FlipCase::BothStable));
        // an unstable direct sum stays unstable
        let d4 = InvariantDivisor::prime(4);
        let od = ToricSheaf::rank_one(fd.x_fan().clone(), &d4).unwrap();
        let sum = o.direct_sum(&od).unwrap();
        let report = classify_flip(&fd, &l0(), &sum).unwrap();
        assert!(matches!(report.case, FlipCase::BothUnstable));
    }

    #[test]
    fn classifier_reports_first_order_ties() {
        // O + O: semistable pushforward, every first-order term ties, and
        // the small-eps verdicts keep both sides strictly semistable
        let fd = example_flip();
        let o = ToricSheaf::structure(fd.x_fan().clone());
        let oo = o.direct_sum(&o).unwrap();
        let report = classify_flip(&fd, &l0(), &oo).unwrap();
        assert_eq!(
            report.base_verdict.status,
            StabilityStatus::StrictlySemistable
        );
        match report.case {
            FlipCase::FirstOrderInconclusive {
                x_side,
                xprime_side,
            } => {
                assert_eq!(x_side.status, StabilityStatus::StrictlySemistable);
                assert_eq!(xprime_side.status, StabilityStatus::StrictlySemistable);
            }
            other => panic!("expected a first-order tie, got {other:?}"),
        }
    }

    #[test]
    fn log_preservation_fails_for_empty_delta() {
        let fd = example_flip();
        let eps1 = rat(1, 10);
        let pf_x = PolarisationFamily::new(&fd, &l0(), Side::X).unwrap();
        let pf_xp = PolarisationFamily::new(&fd, &l0(), Side::XPrime).unwrap();
        let alpha = pf_x.divisor_at(&eps1);
        let alpha_prime = pf_xp.divisor_at(&eps1);
        match log_preservation_check(&fd, &[], &alpha, &alpha_prime).unwrap() {
            LogPreservation::Fails { witness } => {
                let sheaf = log_witness_sheaf(&fd, &alpha, witness).unwrap();
                assert_eq!(sheaf.rank(), 2);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn log_preservation_with_all_but_one_ray() {
        let fd = example_flip();
        let eps1 = rat(1, 10);
        let pf_x = PolarisationFamily::new(&fd, &l0(), Side::X).unwrap();
        let pf_xp = PolarisationFamily::new(&fd, &l0(), Side::XPrime).unwrap();
        let alpha = pf_x.divisor_at(&eps1);
        let alpha_prime = pf_xp.divisor_at(&eps1);
        match log_preservation_check(&fd, &[0, 1, 2, 3], &alpha, &alpha_prime).unwrap() {
            LogPreservation::Preserves { ratio: Some(c) } => {
                // deg ratios of D4: (1 - 2e - 3e^2)/(1 + 2e + e^2) at 1/10
                assert_eq!(c, rat(77, 121));
                assert!(c.is_positive());
            }
            other => panic!("expected preservation, got {other:?}"),
        }
        // vacuous case: every ray in delta
        match log_preservation_check(&fd, &[0, 1, 2, 3, 4], &alpha, &alpha_prime).unwrap() {
            LogPreservation::Preserves { ratio: None } => {}
            other => panic!("expected vacuous preservation, got {other:?}"),
        }
    }
}
