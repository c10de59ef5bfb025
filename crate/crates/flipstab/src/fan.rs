//! Fans of rational strictly convex cones: validation, simpliciality and
//! completeness reports, cone multiplicities and star/quotient fans of
//! orbit closures.
//!
//! Rays are stored once and globally indexed; cones reference ray indices.
//! Across a flip the three fans share the same ray list, which makes the
//! shared indexing natural.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::geom::ConeGeom;
use crate::lattice::{
    apply_projection, is_primitive, primitive_vector, quotient_projection, sublattice_index,
    LatticeVector,
};
use crate::rat::Int;
use crate::Result;

/// A cone of a fan, identified by the sorted set of its ray indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    rays: BTreeSet<usize>,
}

impl Cone {
    pub fn new(rays: impl IntoIterator<Item = usize>) -> Self {
        Cone {
            rays: rays.into_iter().collect(),
        }
    }

    pub fn ray_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.rays.iter().copied()
    }

    pub fn ray_set(&self) -> &BTreeSet<usize> {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn contains_ray(&self, i: usize) -> bool {
        self.rays.contains(&i)
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        self.rays.is_subset(&other.rays)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Cone>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanReport {
    pub is_valid: bool,
    pub is_simplicial: bool,
    pub is_complete: bool,
    pub ray_count: usize,
    pub max_cone_count: usize,
    pub diagnostic: Option<String>,
}

/// The projection N -> N/N_sigma used to build star fans; acts on columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    pub dropped_dim: usize,
    pub matrix: Vec<Vec<Int>>,
}

impl QuotientMap {
    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        apply_projection(&self.matrix, v)
    }
}

impl Fan {
    /// Structural construction checks; geometric validity is the job of
    /// [`analyze_fan`].
    pub fn new(rank: usize, rays: Vec<LatticeVector>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        for (i, r) in rays.iter().enumerate() {
            if r.dim() != rank {
                return Err(Error::InvalidFan(format!(
                    "ray {i} has {} coordinates, expected {rank}",
                    r.dim()
                )));
            }
            if !is_primitive(r) {
                return Err(Error::InvalidFan(format!("ray {i} not primitive")));
            }
            if rays[..i].contains(r) {
                return Err(Error::InvalidFan(format!("ray {i} repeats an earlier ray")));
            }
        }
        let mut used = vec![false; rays.len()];
        let mut cones = Vec::new();
        for (k, c) in max_cones.iter().enumerate() {
            if c.is_empty() && rank > 0 {
                return Err(Error::InvalidFan(format!("maximal cone {k} is empty")));
            }
            for &i in c {
                if i >= rays.len() {
                    return Err(Error::RayIndex(i));
                }
                used[i] = true;
            }
            let cone = Cone::new(c.iter().copied());
            if cone.len() != c.len() {
                return Err(Error::InvalidFan(format!(
                    "maximal cone {k} repeats a ray index"
                )));
            }
            cones.push(cone);
        }
        if rank == 0 && cones.is_empty() {
            cones.push(Cone::new([]));
        }
        if cones.is_empty() {
            return Err(Error::InvalidFan("no maximal cones".into()));
        }
        if let Some(i) = used.iter().position(|u| !u) {
            if rank > 0 {
                return Err(Error::InvalidFan(format!(
                    "ray {i} belongs to no maximal cone"
                )));
            }
        }
        Ok(Fan {
            rank,
            rays,
            max_cones: cones,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn cone_vectors(&self, c: &Cone) -> Vec<LatticeVector> {
        c.ray_indices().map(|i| self.rays[i].clone()).collect()
    }

    pub fn cone_geom(&self, c: &Cone) -> ConeGeom {
        ConeGeom::new(&self.cone_vectors(c))
    }

    /// Whether the given ray set spans a cone of the fan. For simplicial
    /// fans the subset test is exact; in general the set must also span a
    /// face of the enclosing maximal cone.
    pub fn has_cone(&self, c: &Cone) -> bool {
        self.max_cones.iter().any(|m| {
            if !c.is_subset_of(m) {
                return false;
            }
            let geom = self.cone_geom(m);
            if geom.dim == m.len() {
                true // simplicial: every subset of rays spans a face
            } else {
                geom.has_face(&self.cone_vectors(c))
            }
        })
    }

    /// Maximal cones containing the given cone as a face.
    pub fn max_cones_containing(&self, c: &Cone) -> Vec<usize> {
        self.max_cones
            .iter()
            .enumerate()
            .filter(|(_, m)| {
                c.is_subset_of(m) && {
                    let geom = self.cone_geom(m);
                    geom.dim == m.len() || geom.has_face(&self.cone_vectors(c))
                }
            })
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn analyze_fan(fan: &Fan) -> FanReport {
    let mut report = FanReport {
        is_valid: true,
        is_simplicial: true,
        is_complete: false,
        ray_count: fan.ray_count(),
        max_cone_count: fan.max_cones().len(),
        diagnostic: None,
    };
    if fan.rank() == 0 {
        report.is_complete = fan.max_cones().len() == 1;
        return report;
    }

    let geoms: Vec<ConeGeom> = fan.max_cones().iter().map(|c| fan.cone_geom(c)).collect();

    for (k, g) in geoms.iter().enumerate() {
        if !g.is_strictly_convex() {
            report.is_valid = false;
            report.diagnostic = Some(format!("maximal cone {k} is not strictly convex"));
            return report;
        }
        if g.dim != fan.max_cones()[k].len() {
            report.is_simplicial = false;
        }
    }

    // pairwise intersections must be common proper faces
    for i in 0..geoms.len() {
        for j in i + 1..geoms.len() {
            if geoms[i].gens.iter().all(|g| geoms[j].contains(g))
                || geoms[j].gens.iter().all(|g| geoms[i].contains(g))
            {
                report.is_valid = false;
                report.diagnostic = Some(format!("maximal cone {i} is contained in cone {j}"));
                return report;
            }
            let meet = geoms[i].intersect(&geoms[j]);
            if !geoms[i].has_face(&meet) || !geoms[j].has_face(&meet) {
                report.is_valid = false;
                report.diagnostic = Some(format!(
                    "cones {i} and {j} do not intersect in a common face"
                ));
                return report;
            }
        }
    }

    // completeness: full-dimensional cones with every facet shared by
    // exactly one other maximal cone
    let mut facet_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut full_dimensional = true;
    for (k, g) in geoms.iter().enumerate() {
        if g.dim != fan.rank() {
            full_dimensional = false;
            continue;
        }
        let cone_rays: Vec<usize> = fan.max_cones()[k].ray_indices().collect();
        for f in &g.facets {
            let mut key: Vec<usize> = f.gens_on.iter().map(|&g_i| cone_rays[g_i]).collect();
            key.sort_unstable();
            *facet_count.entry(key).or_insert(0) += 1;
        }
    }
    report.is_complete =
        full_dimensional && facet_count.values().all(|&c| c == 2) && !facet_count.is_empty();
    report
}

/// Multiplicity of a simplicial cone: the index of the sublattice spanned
/// by its primitive generators inside the lattice of its span.
pub fn multiplicity(fan: &Fan, c: &Cone) -> Result<Int> {
    sublattice_index(&fan.cone_vectors(c))
}

/// The star of a cone as a fan in the quotient lattice N/N_sigma, together
/// with the projection. Models the orbit closure V(sigma).
pub fn star_quotient_fan(fan: &Fan, c: &Cone) -> Result<(Fan, QuotientMap)> {
    let containing = fan.max_cones_containing(c);
    if containing.is_empty() {
        return Err(Error::ConeNotInFan);
    }
    let gens = fan.cone_vectors(c);
    let (dropped, proj) = quotient_projection(&gens, fan.rank());
    let new_rank = fan.rank() - dropped;

    let mut star_rays: Vec<LatticeVector> = Vec::new();
    let mut star_cones: Vec<Vec<usize>> = Vec::new();
    for &mi in &containing {
        let mut image_cone: BTreeSet<usize> = BTreeSet::new();
        for ri in fan.max_cones()[mi].ray_indices() {
            if c.contains_ray(ri) {
                continue;
            }
            let img = apply_projection(&proj, fan.ray(ri));
            if img.is_zero() {
                return Err(Error::InvalidFan(format!(
                    "ray {ri} of a cone containing the centre projects to zero"
                )));
            }
            let img = primitive_vector(&img)?;
            let idx = match star_rays.iter().position(|r| *r == img) {
                Some(i) => i,
                None => {
                    star_rays.push(img);
                    star_rays.len() - 1
                }
            };
            image_cone.insert(idx);
        }
        let image_cone: Vec<usize> = image_cone.into_iter().collect();
        if !star_cones.contains(&image_cone) {
            star_cones.push(image_cone);
        }
    }
    let star = Fan::new(new_rank, star_rays, star_cones)?;
    Ok((
        star,
        QuotientMap {
            dropped_dim: dropped,
            matrix: proj,
        },
    ))
}
