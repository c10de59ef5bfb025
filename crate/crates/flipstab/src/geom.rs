//! Exact polyhedral cone geometry: facet enumeration from generators,
//! strict convexity, membership and pairwise intersection. Cones here are
//! tiny (a handful of generators in rank <= 5), so brute force over
//! generator subsets is the right tool.

use std::collections::HashSet;

use num::{Signed, Zero};

use crate::lattice::{primitive_vector, LatticeVector};
use crate::linalg::{kernel, rank};
use crate::rat::{Int, Rat};

#[derive(Debug, Clone)]
pub struct Facet {
    /// Linear form, >= 0 on the cone, = 0 exactly on this facet.
    pub normal: Vec<Rat>,
    /// Indices (into the generator list) of the generators on the facet.
    pub gens_on: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ConeGeom {
    pub gens: Vec<LatticeVector>,
    pub dim: usize,
    /// Linear forms vanishing on the span of the cone.
    pub span_normals: Vec<Vec<Rat>>,
    pub facets: Vec<Facet>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl ConeGeom {
    pub fn new(gens_in: &[LatticeVector]) -> Self {
        let mut gens: Vec<LatticeVector> = Vec::new();
        for g in gens_in {
            if !g.is_zero() && !gens.contains(g) {
                gens.push(g.clone());
            }
        }
        let ambient = gens_in.first().map_or(0, |g| g.dim());
        let rows: Vec<Vec<Rat>> = gens.iter().map(|g| g.to_rat_row()).collect();
        let dim = rank(&rows);
        let span_normals = kernel(&rows, ambient);
        let facets = enumerate_facets(&gens, dim, ambient);
        ConeGeom {
            gens,
            dim,
            span_normals,
            facets,
        }
    }

    /// A cone is strictly convex iff its lineality space is trivial.
    pub fn is_strictly_convex(&self) -> bool {
        if self.gens.is_empty() {
            return true;
        }
        let ambient = self.gens[0].dim();
        let mut forms: Vec<Vec<Rat>> = self.span_normals.clone();
        forms.extend(self.facets.iter().map(|f| f.normal.clone()));
        rank(&forms) == ambient
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        let xr = x.to_rat_row();
        self.span_normals
            .iter()
            .all(|w| crate::linalg::dot(w, &xr).is_zero())
            && self
                .facets
                .iter()
                .all(|f| !crate::linalg::dot(&f.normal, &xr).is_negative())
    }

    /// Generating set of the intersection with another cone, via double
    /// description against the other cone's half-space description.
    pub fn intersect(&self, other: &ConeGeom) -> Vec<LatticeVector> {
        let mut gens = self.gens.clone();
        for w in &other.span_normals {
            gens = dd_cut(&gens, w, true);
        }
        for f in &other.facets {
            gens = dd_cut(&gens, &f.normal, false);
        }
        gens
    }

    /// Whether Cone(sub) is a face of this cone. `sub` must be a subset of
    /// the cone (e.g. an intersection with another cone).
    pub fn has_face(&self, sub: &[LatticeVector]) -> bool {
        // facets whose hyperplane contains all of `sub`
        let tight: Vec<&Facet> = self
            .facets
            .iter()
            .filter(|f| {
                sub.iter()
                    .all(|c| crate::linalg::dot(&f.normal, &c.to_rat_row()).is_zero())
            })
            .collect();
        // generators of the smallest face containing `sub`
        let face_gens: Vec<&LatticeVector> = self
            .gens
            .iter()
            .enumerate()
            .filter(|(i, _)| tight.iter().all(|f| f.gens_on.contains(i)))
            .map(|(_, g)| g)
            .collect();
        if face_gens.is_empty() {
            return sub.is_empty();
        }
        if sub.is_empty() {
            return false;
        }
        let sub_geom = ConeGeom::new(sub);
        face_gens.iter().all(|g| sub_geom.contains(g))
    }
}

fn enumerate_facets(gens: &[LatticeVector], dim: usize, ambient: usize) -> Vec<Facet> {
    let mut facets: Vec<Facet> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    if dim == 0 {
        return facets;
    }
    for subset in combinations(gens.len(), dim - 1) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| gens[i].to_rat_row()).collect();
        if rank(&rows) + 1 != dim {
            continue;
        }
        // a normal vanishing on the subset but not on the whole span
        let k = kernel(&rows, ambient);
        let Some(mut w) = k.into_iter().find(|w| {
            gens.iter()
                .any(|g| !crate::linalg::dot(w, &g.to_rat_row()).is_zero())
        }) else {
            continue;
        };
        let evals: Vec<Rat> = gens
            .iter()
            .map(|g| crate::linalg::dot(&w, &g.to_rat_row()))
            .collect();
        if evals.iter().all(|e| !e.is_negative()) {
            // orientation fine
        } else if evals.iter().all(|e| !e.is_positive()) {
            for x in w.iter_mut() {
                *x = -x.clone();
            }
        } else {
            continue; // not a supporting hyperplane
        }
        let gens_on: Vec<usize> = gens
            .iter()
            .enumerate()
            .filter(|(_, g)| crate::linalg::dot(&w, &g.to_rat_row()).is_zero())
            .map(|(i, _)| i)
            .collect();
        if seen.insert(gens_on.clone()) {
            facets.push(Facet { normal: w, gens_on });
        }
    }
    facets
}

/// One double-description step: restrict the cone generated by `gens` to
/// {x : w·x = 0} (eq) or {x : w·x >= 0}. Returns a generating set of the
/// result, primitivised and deduplicated (possibly redundant).
fn dd_cut(gens: &[LatticeVector], w: &[Rat], eq: bool) -> Vec<LatticeVector> {
    let evals: Vec<Rat> = gens
        .iter()
        .map(|g| crate::linalg::dot(w, &g.to_rat_row()))
        .collect();
    let mut out: Vec<LatticeVector> = Vec::new();
    let push = |v: LatticeVector, out: &mut Vec<LatticeVector>| {
        if !v.is_zero() {
            let p = primitive_vector(&v).expect("nonzero");
            if !out.contains(&p) {
                out.push(p);
            }
        }
    };
    for (g, e) in gens.iter().zip(&evals) {
        if e.is_zero() || (!eq && e.is_positive()) {
            push(g.clone(), &mut out);
        }
    }
    for (i, ei) in evals.iter().enumerate() {
        if !ei.is_positive() {
            continue;
        }
        for (j, ej) in evals.iter().enumerate() {
            if !ej.is_negative() {
                continue;
            }
            // ei * g_j - ej * g_i lies on the hyperplane and in the cone
            let combo = rational_combination(ei, &gens[j], &(-ej.clone()), &gens[i]);
            push(combo, &mut out);
        }
    }
    out
}

fn rational_combination(a: &Rat, v: &LatticeVector, b: &Rat, w: &LatticeVector) -> LatticeVector {
    let den = num::integer::lcm(a.denom().clone(), b.denom().clone());
    let ai: Int = a.numer() * (&den / a.denom());
    let bi: Int = b.numer() * (&den / b.denom());
    v.scaled(&ai).add(&w.scaled(&bi))
}
