//! Flipping cones and the fans on both sides of a toric flip: validation
//! of the wall relation, construction of the two simplicial refinements,
//! the exceptional-locus report with the quotient Fano fan, and the flip
//! functor on sheaves.

use std::sync::Arc;

use num::{Signed, Zero};

use crate::error::Error;
use crate::fan::{analyze_fan, Cone, Fan};
use crate::intersection::{cartier_and_ample, InvariantDivisor};
use crate::lattice::{apply_projection, primitive_vector, span_coordinates, LatticeVector};
use crate::linalg::{kernel, solve};
use crate::rat::{Int, Rat};
use crate::sheaf::ToricSheaf;
use crate::subspace::Subspace;
use crate::Result;

/// A full-dimensional cone on n+1 primitive generators carrying a single
/// wall relation sum b_i nu_i = 0 with at least two positive and two
/// negative coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlippingCone {
    /// Sorted fan ray indices of nu_1..nu_{n+1}.
    ray_indices: Vec<usize>,
    /// Wall relation coefficients, parallel to `ray_indices`, primitive,
    /// sign-normalised so the smallest ray index carrying a nonzero
    /// coefficient sits on the negative side.
    relation: Vec<Int>,
    j_plus: Vec<usize>,
    j_minus: Vec<usize>,
    j_zero: Vec<usize>,
}

impl FlippingCone {
    pub fn ray_indices(&self) -> &[usize] {
        &self.ray_indices
    }

    pub fn relation(&self) -> &[Int] {
        &self.relation
    }

    /// Positions (into `ray_indices`) of the positive coefficients.
    pub fn j_plus(&self) -> &[usize] {
        &self.j_plus
    }

    pub fn j_minus(&self) -> &[usize] {
        &self.j_minus
    }

    pub fn j_zero(&self) -> &[usize] {
        &self.j_zero
    }

    pub fn j_plus_rays(&self) -> Vec<usize> {
        self.j_plus.iter().map(|&p| self.ray_indices[p]).collect()
    }

    pub fn j_minus_rays(&self) -> Vec<usize> {
        self.j_minus.iter().map(|&p| self.ray_indices[p]).collect()
    }

    pub fn j_zero_rays(&self) -> Vec<usize> {
        self.j_zero.iter().map(|&p| self.ray_indices[p]).collect()
    }
}

/// Validates a maximal cone of the base fan as a flipping cone and derives
/// its wall relation and index sets.
pub fn validate_flipping_cone(base: &Fan, c: &Cone) -> Result<FlippingCone> {
    let n = base.rank();
    if !base.max_cones().iter().any(|m| m == c) {
        return Err(Error::ConeNotInFan);
    }
    if c.len() != n + 1 {
        return Err(Error::NotFlippingCone(format!(
            "expected {} generators, got {}",
            n + 1,
            c.len()
        )));
    }
    let ray_indices: Vec<usize> = c.ray_indices().collect();
    let gens: Vec<LatticeVector> = ray_indices.iter().map(|&i| base.ray(i).clone()).collect();
    // relations live in the kernel of the matrix whose columns are the nu_i
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|coord| {
            gens.iter()
                .map(|g| Rat::from_integer(g.0[coord].clone()))
                .collect()
        })
        .collect();
    let relations = kernel(&rows, n + 1);
    if relations.len() != 1 {
        if relations.is_empty() {
            return Err(Error::NotFlippingCone("no wall relation".into()));
        }
        return Err(Error::NotFlippingCone(
            "wall relation not unique (cone is not full-dimensional)".into(),
        ));
    }
    let geom = crate::geom::ConeGeom::new(&gens);
    if geom.dim != n {
        return Err(Error::NotFlippingCone(
            "cone is not full-dimensional".into(),
        ));
    }
    if !geom.is_strictly_convex() {
        return Err(Error::NotFlippingCone("cone is not strictly convex".into()));
    }
    // clear denominators and make the coefficients primitive
    let den = crate::rat::common_denominator(&relations[0]);
    let ints: Vec<Int> = relations[0]
        .iter()
        .map(|r| r.numer() * (&den / r.denom()))
        .collect();
    let mut relation = primitive_vector(&LatticeVector(ints))?.0;
    // deterministic orientation: the first nonzero coefficient is negative
    if let Some(first) = relation.iter().find(|b| !b.is_zero()) {
        if first.is_positive() {
            for b in relation.iter_mut() {
                *b = -b.clone();
            }
        }
    }
    let j_plus: Vec<usize> = (0..relation.len())
        .filter(|&i| relation[i].is_positive())
        .collect();
    let j_minus: Vec<usize> = (0..relation.len())
        .filter(|&i| relation[i].is_negative())
        .collect();
    let j_zero: Vec<usize> = (0..relation.len())
        .filter(|&i| relation[i].is_zero())
        .collect();
    if j_plus.len() < 2 || j_minus.len() < 2 {
        return Err(Error::NotFlippingCone("condition 3".into()));
    }
    Ok(FlippingCone {
        ray_indices,
        relation,
        j_plus,
        j_minus,
        j_zero,
    })
}

/// The base fan, both simplicial refinements, the flipping-cone datum and
/// the distinguished divisor D_+ shared by all three.
#[derive(Debug, Clone)]
pub struct FlipData {
    base: Arc<Fan>,
    x: Arc<Fan>,
    xprime: Arc<Fan>,
    fc: FlippingCone,
    d_plus: InvariantDivisor,
}

impl FlipData {
    pub fn base_fan(&self) -> &Arc<Fan> {
        &self.base
    }

    pub fn x_fan(&self) -> &Arc<Fan> {
        &self.x
    }

    pub fn xprime_fan(&self) -> &Arc<Fan> {
        &self.xprime
    }

    pub fn flipping_cone(&self) -> &FlippingCone {
        &self.fc
    }

    pub fn d_plus(&self) -> &InvariantDivisor {
        &self.d_plus
    }
}

/// Builds the two sides of the flip: the refinement of the flipping cone
/// on each side drops one generator on the opposite index set, everything
/// away from the flipping cone is shared. Checks that both results are
/// complete simplicial fans and that -D_+ (resp. D_+) is relatively ample
/// over the flipping cone on the X (resp. X') side.
pub fn build_flip(base: &Arc<Fan>, fc: &FlippingCone) -> Result<FlipData> {
    let sigma0: Vec<usize> = fc.ray_indices().to_vec();
    let outside: Vec<Vec<usize>> = base
        .max_cones()
        .iter()
        .filter(|c| c.ray_set().iter().copied().collect::<Vec<_>>() != sigma0)
        .map(|c| c.ray_indices().collect())
        .collect();
    for (k, c) in outside.iter().enumerate() {
        let vecs: Vec<LatticeVector> = c.iter().map(|&i| base.ray(i).clone()).collect();
        if crate::linalg::rank(&vecs.iter().map(|v| v.to_rat_row()).collect::<Vec<_>>()) != c.len()
        {
            return Err(Error::FlipStructure(format!(
                "base fan is not simplicial outside the flipping cone (cone {k})"
            )));
        }
    }
    let subdivision = |drop_positions: &[usize]| -> Vec<Vec<usize>> {
        drop_positions
            .iter()
            .map(|&p| {
                sigma0
                    .iter()
                    .enumerate()
                    .filter(|(q, _)| *q != p)
                    .map(|(_, &r)| r)
                    .collect()
            })
            .collect()
    };
    let mut x_cones = outside.clone();
    x_cones.extend(subdivision(fc.j_minus()));
    let mut xp_cones = outside;
    xp_cones.extend(subdivision(fc.j_plus()));

    let mut validated = Vec::new();
    for (name, cones) in [("X", x_cones), ("X'", xp_cones)] {
        let fan = Fan::new(base.rank(), base.rays().to_vec(), cones)?;
        let report = analyze_fan(&fan);
        if !(report.is_valid && report.is_simplicial && report.is_complete) {
            return Err(Error::FlipStructure(format!(
                "side {name} is not a complete simplicial fan: {}",
                report.diagnostic.unwrap_or_else(|| "see report".into())
            )));
        }
        validated.push(Arc::new(fan));
    }
    let xprime = validated.pop().expect("two fans");
    let x = validated.pop().expect("two fans");

    let d_plus = fc
        .j_plus_rays()
        .iter()
        .fold(InvariantDivisor::zero(), |acc, &r| {
            acc.add(&InvariantDivisor::prime(r))
        });

    check_relative_ampleness(
        &x,
        fc,
        &d_plus.scaled(&-Rat::from_integer(Int::from(1))),
        fc.j_minus(),
    )?;
    check_relative_ampleness(&xprime, fc, &d_plus, fc.j_plus())?;

    Ok(FlipData {
        base: base.clone(),
        x,
        xprime,
        fc: fc.clone(),
        d_plus,
    })
}

/// Strict convexity of the support function of `d` across the interior
/// walls of the subdivision of the flipping cone: for the cone missing
/// generator i, the linear data must dominate strictly at that generator.
fn check_relative_ampleness(
    fan: &Fan,
    fc: &FlippingCone,
    d: &InvariantDivisor,
    drop_positions: &[usize],
) -> Result<()> {
    for &p in drop_positions {
        let cone_rays: Vec<usize> = fc
            .ray_indices()
            .iter()
            .enumerate()
            .filter(|(q, _)| *q != p)
            .map(|(_, &r)| r)
            .collect();
        let rows: Vec<Vec<Rat>> = cone_rays.iter().map(|&i| fan.ray(i).to_rat_row()).collect();
        let rhs: Vec<Rat> = cone_rays.iter().map(|&i| -d.coeff(i)).collect();
        let m = solve(&rows, &rhs)
            .ok_or_else(|| Error::FlipStructure("no linear data on a subdivision cone".into()))?;
        let dropped_ray = fc.ray_indices()[p];
        let lhs = fan.ray(dropped_ray).dot_rat(&m);
        if lhs <= -d.coeff(dropped_ray) {
            return Err(Error::FlipStructure(
                "distinguished divisor is not relatively ample over the flipping cone".into(),
            ));
        }
    }
    Ok(())
}

/// Dimensions of the exceptional loci and the quotient Fano fan of the
/// contracted fibers.
#[derive(Debug, Clone)]
pub struct ExceptionalData {
    /// dim V(sigma_{J+}) inside X.
    pub dim_exceptional_x: usize,
    /// dim V(sigma_{J-}) inside X'.
    pub dim_exceptional_xprime: usize,
    /// dim V(sigma_{J- u J+}) inside the base.
    pub dim_contracted_base: usize,
    /// The fan of the contracted fibers in the quotient lattice.
    pub fiber_fan: Fan,
    pub fiber_dim: usize,
    pub fiber_ray_count: usize,
}

pub fn exceptional_data(fd: &FlipData) -> Result<ExceptionalData> {
    let n = fd.base_fan().rank();
    let fc = fd.flipping_cone();
    let jp = fc.j_plus_rays();
    let jm = fc.j_minus_rays();

    if !fd.x_fan().has_cone(&Cone::new(jp.iter().copied())) {
        return Err(Error::FlipStructure("sigma_{J+} is not a cone of X".into()));
    }
    if !fd.xprime_fan().has_cone(&Cone::new(jm.iter().copied())) {
        return Err(Error::FlipStructure(
            "sigma_{J-} is not a cone of X'".into(),
        ));
    }

    let gens = |rays: &[usize]| -> Vec<LatticeVector> {
        rays.iter().map(|&i| fd.base_fan().ray(i).clone()).collect()
    };
    let jp_gens = gens(&jp);
    let jm_gens = gens(&jm);
    if Subspace::span_of(&jp_gens)?.dim() != jp.len()
        || Subspace::span_of(&jm_gens)?.dim() != jm.len()
    {
        return Err(Error::FlipStructure(
            "extremal cones are not simplicial".into(),
        ));
    }

    // coordinates on the lattice of the span of sigma_{J- u J+}
    let mut join_gens = jm_gens.clone();
    join_gens.extend(jp_gens.iter().cloned());
    let (r_join, coords) = span_coordinates(&join_gens, n);
    if r_join != jp.len() + jm.len() - 1 {
        return Err(Error::FlipStructure(
            "wall relation does not cut one dimension".into(),
        ));
    }
    let in_join = |v: &LatticeVector| apply_projection(&coords, v);
    // quotient by the sublattice of sigma_{J-}
    let jm_in_join: Vec<LatticeVector> = jm_gens.iter().map(&in_join).collect();
    let (r_minus, proj) = crate::lattice::quotient_projection(&jm_in_join, r_join);
    if r_minus != jm.len() {
        return Err(Error::FlipStructure(
            "sigma_{J-} is degenerate in the quotient".into(),
        ));
    }
    let fiber_dim = r_join - r_minus;

    let mut fiber_rays: Vec<LatticeVector> = Vec::new();
    for g in &jp_gens {
        let img = apply_projection(&proj, &in_join(g));
        if img.is_zero() {
            return Err(Error::FlipStructure(
                "a J+ generator dies in the quotient".into(),
            ));
        }
        let img = primitive_vector(&img)?;
        if fiber_rays.contains(&img) {
            return Err(Error::FlipStructure(
                "J+ generators collapse in the quotient".into(),
            ));
        }
        fiber_rays.push(img);
    }
    let fiber_ray_count = fiber_rays.len();
    let cones: Vec<Vec<usize>> = (0..fiber_ray_count)
        .map(|drop| (0..fiber_ray_count).filter(|&i| i != drop).collect())
        .collect();
    let fiber_fan = Fan::new(fiber_dim, fiber_rays, cones)?;
    let report = analyze_fan(&fiber_fan);
    if !(report.is_valid && report.is_complete && report.is_simplicial) {
        return Err(Error::FlipStructure(
            "fiber fan is not complete and simplicial".into(),
        ));
    }
    if fiber_dim != jp.len() - 1 {
        return Err(Error::FlipStructure(
            "fiber dimension is not |J+| - 1".into(),
        ));
    }
    // the anticanonical divisor of the fibers must be ample (Q-Fano)
    let anti = (0..fiber_ray_count).fold(InvariantDivisor::zero(), |acc, i| {
        acc.add(&InvariantDivisor::prime(i))
    });
    if !cartier_and_ample(&fiber_fan, &anti)?.is_ample() {
        return Err(Error::FlipStructure(
            "fiber anticanonical class is not ample".into(),
        ));
    }

    Ok(ExceptionalData {
        dim_exceptional_x: n - jp.len(),
        dim_exceptional_xprime: n - jm.len(),
        dim_contracted_base: fc.j_zero().len(),
        fiber_fan,
        fiber_dim,
        fiber_ray_count,
    })
}

/// The flip functor: identical rank and filtrations, re-hosted on the
/// other side's fan. Invariant on every per-ray statistic.
pub fn flip_functor(fd: &FlipData, s: &ToricSheaf) -> Result<ToricSheaf> {
    if **s.fan() != **fd.x_fan() {
        return Err(Error::FanMismatch);
    }
    ToricSheaf::new(fd.xprime_fan().clone(), s.rank(), s.filtrations().to_vec())
}

/// Same functor in the other direction.
pub fn flip_functor_inverse(fd: &FlipData, s: &ToricSheaf) -> Result<ToricSheaf> {
    if **s.fan() != **fd.xprime_fan() {
        return Err(Error::FanMismatch);
    }
    ToricSheaf::new(fd.x_fan().clone(), s.rank(), s.filtrations().to_vec())
}
