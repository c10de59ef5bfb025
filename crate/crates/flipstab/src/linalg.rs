//! Dense exact linear algebra over the rationals: row reduction, kernels
//! and linear solves. Matrices are plain row vectors; sizes here are tiny.

use num::{One, Zero};

use crate::rat::Rat;

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-place reduced row echelon form. Returns the pivot columns; the rank
/// is their count. Zero rows are moved to the bottom.
pub fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &lead;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let sub = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right kernel {x : A x = 0} of the matrix with the given rows.
pub fn kernel(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    for &f in &free {
        let mut v = vec![Rat::zero(); ncols];
        v[f] = Rat::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -m[i][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Any solution of A x = b, or None when the system is inconsistent.
pub fn solve(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![Rat::zero(); ncols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][ncols].clone();
    }
    Some(x)
}

/// Multiplies the matrix (rows) by a column vector.
pub fn mat_vec(rows: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    rows.iter().map(|r| dot(r, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat_int(x)).collect())
            .collect()
    }

    #[test]
    fn rref_and_rank() {
        let mut a = m(&[&[2, 4], &[1, 2], &[0, 1]]);
        let pivots = rref(&mut a);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(a, m(&[&[1, 0], &[0, 1]]));
        assert_eq!(rank(&m(&[&[1, 2, 3], &[2, 4, 6]])), 1);
    }

    #[test]
    fn kernel_basis() {
        // x + y + z = 0 has a 2-dimensional kernel
        let k = kernel(&m(&[&[1, 1, 1]]), 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(&m(&[&[1, 1, 1]])[0], v).is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[rat_int(3), rat_int(1)]).unwrap();
        assert_eq!(x, vec![rat_int(2), rat_int(1)]);
        // inconsistent: x + y = 0 and x + y = 1
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[rat_int(0), rat_int(1)]).is_none());
        // underdetermined systems return some solution
        let x = solve(&m(&[&[1, 1, 1]]), &[rat_int(2)]).unwrap();
        assert_eq!(dot(&m(&[&[1, 1, 1]])[0], &x), rat(2, 1));
    }
}
