//! Rational subspaces of a fixed ambient space in a canonical reduced
//! form: two subspaces are equal as sets iff their representations are
//! identical, which lets us deduplicate candidate sets by hashing.

use num::{One, Signed, Zero};

use crate::error::Error;
use crate::lattice::LatticeVector;
use crate::linalg::{kernel, rref};
use crate::rat::{Int, Rat};
use crate::Result;

/// Canonical form: reduced row echelon basis, every row scaled to primitive
/// integer entries with positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Rat>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                (0..ambient)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        Subspace { ambient, rows }
    }

    pub fn from_rows(ambient: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        for r in &rows {
            if r.len() != ambient {
                return Err(Error::AmbientMismatch(r.len(), ambient));
            }
        }
        let mut m = rows;
        rref(&mut m);
        for row in m.iter_mut() {
            canonical_scale(row);
        }
        Ok(Subspace { ambient, rows: m })
    }

    pub fn span_of(vectors: &[LatticeVector]) -> Result<Self> {
        let ambient = vectors.first().map_or(0, |v| v.dim());
        Self::from_rows(ambient, vectors.iter().map(|v| v.to_rat_row()).collect())
    }

    pub fn line(v: &LatticeVector) -> Result<Self> {
        Self::from_rows(v.dim(), vec![v.to_rat_row()])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn contains_vector(&self, v: &[Rat]) -> bool {
        // reduce v against the echelon basis and check the residue is zero
        let mut v = v.to_vec();
        for row in &self.rows {
            let lead = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if !v[lead].is_zero() {
                let f = &v[lead] / &row[lead];
                for j in 0..self.ambient {
                    let sub = &f * &row[j];
                    v[j] = &v[j] - sub;
                }
            }
        }
        v.iter().all(|x| x.is_zero())
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains_vector(r))
    }

    /// Basis of the space of linear forms vanishing on this subspace.
    pub fn normals(&self) -> Vec<Vec<Rat>> {
        kernel(&self.rows, self.ambient)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(self.ambient, other.ambient));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace::from_rows(self.ambient, rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(self.ambient, other.ambient));
        }
        let mut forms = self.normals();
        forms.extend(other.normals());
        Subspace::from_rows(self.ambient, kernel(&forms, self.ambient))
    }

    /// Coordinates of a vector with respect to this subspace's basis rows,
    /// or None when the vector lies outside.
    pub fn coordinates_of(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        // solve x * rows = v by transposing into a column system
        let transposed: Vec<Vec<Rat>> = (0..self.ambient)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        crate::linalg::solve(&transposed, v)
    }

    /// Complement spanned by the standard basis vectors away from the
    /// pivot columns. Not canonical geometry, but a valid direct summand.
    pub fn echelon_complement(&self) -> Subspace {
        let pivots: Vec<usize> = self
            .rows
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect();
        let rows = (0..self.ambient)
            .filter(|c| !pivots.contains(c))
            .map(|c| {
                (0..self.ambient)
                    .map(|j| if j == c { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        Subspace::from_rows(self.ambient, rows).expect("complement rows are well formed")
    }
}

fn canonical_scale(row: &mut [Rat]) {
    let mut den = Int::one();
    for x in row.iter() {
        den = num::integer::lcm(den, x.denom().clone());
    }
    let mut num_gcd = Int::zero();
    for x in row.iter() {
        num_gcd = num::integer::gcd(num_gcd, (x.numer() * &den / x.denom()).abs());
    }
    if num_gcd.is_zero() {
        return;
    }
    let lead_positive = row
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.numer().is_positive())
        .unwrap_or(true);
    let mut scale = Rat::new(den, num_gcd);
    if !lead_positive {
        scale = -scale;
    }
    for x in row.iter_mut() {
        *x = &*x * &scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;
    use crate::rat::rat_int;

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    fn span(vs: &[&[i64]]) -> Subspace {
        Subspace::span_of(&vs.iter().map(|v| lv(v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn canonical_representation_is_set_equality() {
        // Span(u0,u2,u4) = Span(u0,u2) = Span(u2,u4): all are {x1 = x2}
        let a = span(&[&[-1, -1, -1], &[1, 1, -1], &[0, 0, 1]]);
        let b = span(&[&[-1, -1, -1], &[1, 1, -1]]);
        let c = span(&[&[1, 1, -1], &[0, 0, 1]]);
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn sum_of_dependent_lines_has_dim_two() {
        // u0 = -u2 - 2 u4, so the three lines only span a plane
        let u0 = span(&[&[-1, -1, -1]]);
        let u2 = span(&[&[1, 1, -1]]);
        let u4 = span(&[&[0, 0, 1]]);
        let s = u0.sum(&u2).unwrap().sum(&u4).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn intersect_planes() {
        let a = span(&[&[1, 0, 0], &[0, 1, 0]]);
        let b = span(&[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), span(&[&[0, 1, 0]]));
    }

    #[test]
    fn sum_with_zero_is_identity() {
        let v = span(&[&[2, 1, 0], &[0, 0, 3]]);
        let z = Subspace::zero(3);
        assert_eq!(v.sum(&z).unwrap(), v);
        assert_eq!(v.intersect(&Subspace::full(3)).unwrap(), v);
    }

    #[test]
    fn ambient_mismatch_is_rejected() {
        let a = span(&[&[1, 0]]);
        let b = span(&[&[1, 0, 0]]);
        assert!(a.sum(&b).is_err());
        assert!(a.intersect(&b).is_err());
    }

    #[test]
    fn modular_dimension_law() {
        // dim(A∩B) + dim(A+B) = dim A + dim B on a mix of cases
        let cases = [
            (
                span(&[&[1, 0, 0], &[0, 1, 0]]),
                span(&[&[0, 1, 0], &[0, 0, 1]]),
            ),
            (span(&[&[1, 2, 3]]), span(&[&[2, 4, 6]])),
            (span(&[&[1, 1, 0]]), span(&[&[0, 1, 1], &[1, 0, -1]])),
            (Subspace::zero(3), span(&[&[5, -1, 2]])),
        ];
        for (a, b) in cases {
            let meet = a.intersect(&b).unwrap().dim();
            let join = a.sum(&b).unwrap().dim();
            assert_eq!(meet + join, a.dim() + b.dim());
        }
    }

    #[test]
    fn echelon_complement_is_direct_summand() {
        let a = span(&[&[1, 1, 0], &[0, 0, 1]]);
        let c = a.echelon_complement();
        assert_eq!(a.dim() + c.dim(), 3);
        assert!(a.intersect(&c).unwrap().is_zero());
        assert!(a.sum(&c).unwrap().is_full());
        let v = span(&[&[3, 5, 7]]);
        assert!(v.contains_vector(&[rat_int(6), rat_int(10), rat_int(14)]));
        assert!(!v.contains_vector(&[rat_int(1), rat_int(0), rat_int(0)]));
    }
}
