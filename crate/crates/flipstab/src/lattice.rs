//! Integer lattice vectors, primitivisation, Smith-style normal forms and
//! sublattice indices. All arithmetic is arbitrary-precision.

use num::{Integer, One, Signed, Zero};

use crate::error::Error;
use crate::rat::{Int, Rat};
use crate::Result;

/// A point of the cocharacter lattice N (or any Z^n in context).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<Int>);

impl LatticeVector {
    pub fn new(coords: Vec<Int>) -> Self {
        LatticeVector(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![Int::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn to_rat_row(&self) -> Vec<Rat> {
        self.0
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect()
    }

    pub fn dot_rat(&self, m: &[Rat]) -> Rat {
        debug_assert_eq!(self.dim(), m.len());
        self.0
            .iter()
            .zip(m)
            .map(|(c, x)| Rat::from_integer(c.clone()) * x)
            .sum()
    }

    pub fn dot_int(&self, m: &[Int]) -> Int {
        debug_assert_eq!(self.dim(), m.len());
        self.0.iter().zip(m).map(|(c, x)| c * x).sum()
    }

    pub fn scaled(&self, k: &Int) -> Self {
        LatticeVector(self.0.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Divides out the gcd of the coordinates, keeping the ray direction.
pub fn primitive_vector(v: &LatticeVector) -> Result<LatticeVector> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let mut g = Int::zero();
    for c in &v.0 {
        g = g.gcd(c);
    }
    Ok(LatticeVector(v.0.iter().map(|c| c / &g).collect()))
}

pub fn is_primitive(v: &LatticeVector) -> bool {
    !v.is_zero() && primitive_vector(v).map(|p| p == *v).unwrap_or(false)
}

fn abs_cmp_lt(a: &Int, b: &Int) -> bool {
    a.abs() < b.abs()
}

/// Diagonalises an integer matrix by unimodular row and column operations,
/// tracking the right transform V (so that the result equals U·A·V).
/// Returns the diagonal entries (one per pivot) and V.
pub fn diagonalize_with_right_transform(a: &mut [Vec<Int>]) -> (Vec<Int>, Vec<Vec<Int>>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut v: Vec<Vec<Int>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing submatrix becomes the pivot
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| abs_cmp_lt(&a[i][j], &a[pi][pj]))
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
        }
        let mut clean = true;
        for i in t + 1..rows {
            if !a[i][t].is_zero() {
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in t..cols {
                        let sub = &q * &a[t][j];
                        a[i][j] = &a[i][j] - sub;
                    }
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..cols {
            if !a[t][j].is_zero() {
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for i in 0..rows {
                        let sub = &q * &a[i][t];
                        a[i][j] = &a[i][j] - sub;
                    }
                    for i in 0..cols {
                        let sub = &q * &v[i][t];
                        v[i][j] = &v[i][j] - sub;
                    }
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue; // remainders got smaller; re-pick the pivot
        }
        t += 1;
    }
    let d = (0..t).map(|i| a[i][i].abs()).collect();
    (d, v)
}

/// Index of the sublattice generated by the vectors inside the saturation
/// (span ∩ Z^n) of their span. Equals |det| for a full-rank square set.
pub fn sublattice_index(vectors: &[LatticeVector]) -> Result<Int> {
    if vectors.is_empty() {
        return Ok(Int::one());
    }
    let mut a: Vec<Vec<Int>> = vectors.iter().map(|v| v.0.clone()).collect();
    let (d, _) = diagonalize_with_right_transform(&mut a);
    if d.len() < vectors.len() {
        return Err(Error::NotSimplicial);
    }
    Ok(d.iter().product())
}

/// Projection Z^n -> Z^(n-r) with kernel the saturation of the span of the
/// given vectors. The matrix acts on column vectors.
pub fn quotient_projection(vectors: &[LatticeVector], dim: usize) -> (usize, Vec<Vec<Int>>) {
    let mut a: Vec<Vec<Int>> = vectors.iter().map(|v| v.0.clone()).collect();
    let (d, v) = diagonalize_with_right_transform(&mut a);
    let r = d.len();
    // coordinates of x in the adapted basis are x·V; drop the first r
    let proj: Vec<Vec<Int>> = (r..dim)
        .map(|j| (0..dim).map(|i| v[i][j].clone()).collect())
        .collect();
    (r, proj)
}

pub fn apply_projection(proj: &[Vec<Int>], x: &LatticeVector) -> LatticeVector {
    LatticeVector(proj.iter().map(|row| x.dot_int(row)).collect())
}

/// Coordinates on the saturation lattice (span ∩ Z^n) of the given
/// vectors: an r x n integer matrix sending a point of the saturation to
/// its coordinates in an adapted basis of Z^n.
pub fn span_coordinates(vectors: &[LatticeVector], dim: usize) -> (usize, Vec<Vec<Int>>) {
    let mut a: Vec<Vec<Int>> = vectors.iter().map(|v| v.0.clone()).collect();
    let (d, v) = diagonalize_with_right_transform(&mut a);
    let r = d.len();
    let coords: Vec<Vec<Int>> = (0..r)
        .map(|j| (0..dim).map(|i| v[i][j].clone()).collect())
        .collect();
    (r, coords)
}
