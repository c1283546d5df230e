//! Exact integer linear algebra: Smith and Hermite normal forms, lattice
//! membership and integer kernels. Dense, single-threaded, no floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// A dense integer matrix with optional row and column labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub entries: Vec<Vec<BigInt>>,
    pub cols: usize,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl IntegerMatrix {
    pub fn new(entries: Vec<Vec<BigInt>>, cols: usize) -> IntegerMatrix {
        assert!(entries.iter().all(|r| r.len() == cols), "ragged matrix");
        let row_labels = (0..entries.len()).map(|i| format!("r{i}")).collect();
        let col_labels = (0..cols).map(|j| format!("c{j}")).collect();
        IntegerMatrix { entries, cols, row_labels, col_labels }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> IntegerMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        IntegerMatrix::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), cols)
    }

    pub fn identity(n: usize) -> IntegerMatrix {
        IntegerMatrix::new(
            (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect(),
            n,
        )
    }

    pub fn with_labels(mut self, row_labels: Vec<String>, col_labels: Vec<String>) -> IntegerMatrix {
        assert_eq!(row_labels.len(), self.entries.len());
        assert_eq!(col_labels.len(), self.cols);
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        self
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    /// `M v` for a column vector `v`.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.entries.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Invariant factors of a finitely generated abelian group, in canonical
/// form: torsion orders `> 1` forming a divisibility chain, followed by one
/// `0` per free summand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantFactors(pub Vec<BigInt>);

impl InvariantFactors {
    /// The cokernel of the relation rows inside `Z^ncols`.
    pub fn cokernel(relations: &[Vec<BigInt>], ncols: usize) -> InvariantFactors {
        let reduced = hermite_rows(relations.to_vec(), ncols);
        let diagonal = smith_normal_form(&IntegerMatrix::new(reduced, ncols));
        let free = ncols - diagonal.len();
        InvariantFactors::from_parts(diagonal, free)
    }

    /// `(+)_i Z/d_i` with `d_i = 0` meaning `Z`.
    pub fn from_orders(orders: &[BigInt]) -> InvariantFactors {
        let n = orders.len();
        let rows: Vec<Vec<BigInt>> = orders
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = d.clone();
                r
            })
            .collect();
        InvariantFactors::cokernel(&rows, n)
    }

    fn from_parts(diagonal: Vec<BigInt>, free: usize) -> InvariantFactors {
        let mut out: Vec<BigInt> = diagonal.into_iter().filter(|d| !d.is_one()).collect();
        out.extend(std::iter::repeat_n(BigInt::zero(), free));
        InvariantFactors(out)
    }

    pub fn free_rank(&self) -> usize {
        self.0.iter().filter(|d| d.is_zero()).count()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.0.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Nonzero diagonal of the Smith normal form, `d_1 | d_2 | ...`, all positive.
pub fn smith_normal_form(m: &IntegerMatrix) -> Vec<BigInt> {
    let mut a = m.entries.clone();
    let rows = a.len();
    let cols = m.cols;
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let Some((pi, pj)) = min_abs_position(&a, t..rows, t..cols) else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    row_axpy(&mut a, i, t, &q);
                    dirty |= !a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    col_axpy(&mut a, j, t, &q);
                    dirty |= !a[t][j].is_zero();
                }
            }
            if dirty {
                let in_col = (t..rows).filter(|&i| !a[i][t].is_zero()).map(|i| (i, t));
                let in_row = (t..cols).filter(|&j| !a[t][j].is_zero()).map(|j| (t, j));
                let (i, j) = in_col.chain(in_row).min_by_key(|&(i, j)| a[i][j].abs()).unwrap();
                a.swap(t, i);
                swap_cols(&mut a, t, j);
                continue;
            }
            let pivot = a[t][t].clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    // fold row i into the pivot row and redo the elimination
                    let minus_one = BigInt::from(-1);
                    row_axpy(&mut a, t, i, &minus_one);
                }
                None => break,
            }
        }
        t += 1;
    }
    (0..t).map(|i| a[i][i].abs()).collect()
}

fn min_abs_position(
    a: &[Vec<BigInt>],
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if a[i][j].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
                if a[i][j].abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

// row[i] -= q * row[k]
fn row_axpy(a: &mut [Vec<BigInt>], i: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (src, dst) = if i < k {
        let (lo, hi) = a.split_at_mut(k);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[k], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

// col[j] -= q * col[k]
fn col_axpy(a: &mut [Vec<BigInt>], j: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        if !row[k].is_zero() {
            let delta = q * &row[k];
            row[j] -= delta;
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// Reduced row echelon basis (Hermite normal form) of the lattice spanned by
/// `generators` in `Z^ncols`: positive pivots, entries above each pivot in
/// `[0, pivot)`. Canonical, so equal lattices give equal outputs.
pub fn hermite_rows(generators: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = generators.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let rank = echelonize(&mut rows, ncols);
    rows.truncate(rank);
    rows
}

/// Row-reduces `rows` using pivots in the first `limit` columns only. Returns
/// the number of pivot rows, which come first; the remaining rows vanish on
/// the first `limit` columns.
fn echelonize(rows: &mut [Vec<BigInt>], limit: usize) -> usize {
    let mut pivot_row = 0;
    for col in 0..limit {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            let best = (pivot_row..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by_key(|&i| rows[i][col].abs());
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut clean = true;
            for i in pivot_row + 1..rows.len() {
                if !rows[i][col].is_zero() {
                    let q = &rows[i][col] / &rows[pivot_row][col];
                    row_axpy(rows, i, pivot_row, &q);
                    clean &= rows[i][col].is_zero();
                }
            }
            if clean {
                if rows[pivot_row][col].is_negative() {
                    for x in rows[pivot_row].iter_mut() {
                        *x = -&*x;
                    }
                }
                let pivot = rows[pivot_row][col].clone();
                for i in 0..pivot_row {
                    let q = rows[i][col].div_floor(&pivot);
                    row_axpy(rows, i, pivot_row, &q);
                }
                pivot_row += 1;
                break;
            }
        }
    }
    pivot_row
}

fn pivot_of(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Coordinates of `v` in a Hermite basis, or `None` if `v` is not in the
/// lattice.
pub fn coordinates(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let p = pivot_of(row).expect("basis rows are nonzero");
        let (q, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
        }
        coords.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}

pub fn contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    coordinates(basis, v).is_some()
}

/// A basis (in Hermite form) of `{v in Z^cols : M v = 0}`.
pub fn kernel(m: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let r = m.rows();
    let c = m.cols;
    let mut aug: Vec<Vec<BigInt>> = (0..c)
        .map(|j| {
            let mut row: Vec<BigInt> = (0..r).map(|i| m.entries[i][j].clone()).collect();
            row.extend((0..c).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let rank = echelonize(&mut aug, r);
    let ker: Vec<Vec<BigInt>> = aug[rank..].iter().map(|row| row[r..].to_vec()).collect();
    hermite_rows(ker, c)
}

/// A basis of `{v in Z^cols : M v = 0 mod modulus}`.
pub fn kernel_mod(m: &IntegerMatrix, modulus: &BigInt) -> Vec<Vec<BigInt>> {
    let r = m.rows();
    let c = m.cols;
    let entries = m
        .entries
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out = row.clone();
            out.extend((0..r).map(|k| if k == i { -modulus.clone() } else { BigInt::zero() }));
            out
        })
        .collect();
    let lifted = kernel(&IntegerMatrix::new(entries, c + r));
    hermite_rows(lifted.into_iter().map(|v| v[..c].to_vec()).collect(), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_normal_form(&IntegerMatrix::from_i64(&[vec![2, -2]])), big(&[2]));
        assert_eq!(smith_normal_form(&IntegerMatrix::identity(3)), big(&[1, 1, 1]));
        let d = smith_normal_form(&IntegerMatrix::from_i64(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(d, big(&[1, 6]));
        assert_eq!(&d[0] * &d[1], BigInt::from(6));
        assert!(smith_normal_form(&IntegerMatrix::from_i64(&[vec![0, 0]])).is_empty());
    }

    #[test]
    fn cokernels() {
        // weight-2 relations of the rank-one presentation: Z + Z/2
        let rel = vec![big(&[2, 0, -2]), big(&[-1, -1, 1]), big(&[0, 2, 0])];
        assert_eq!(InvariantFactors::cokernel(&rel, 3), InvariantFactors(big(&[2, 0])));
        assert_eq!(InvariantFactors::from_orders(&big(&[0, 2, 3])), InvariantFactors(big(&[6, 0])));
        assert_eq!(InvariantFactors::from_orders(&big(&[1, 1])), InvariantFactors(vec![]));
        assert_eq!(InvariantFactors::from_orders(&big(&[0, 2, 3])).to_string(), "Z/6 + Z");
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(vec![big(&[2, 4]), big(&[0, 6])], 2);
        let b = hermite_rows(vec![big(&[2, -2]), big(&[4, 14]), big(&[2, 4])], 2);
        assert_eq!(a, b);
        assert_eq!(a, vec![big(&[2, 4]), big(&[0, 6])]);
        assert!(contains(&a, &big(&[2, 10])));
        assert!(!contains(&a, &big(&[1, 0])));
        assert_eq!(coordinates(&a, &big(&[4, 14])), Some(big(&[2, 1])));
    }

    #[test]
    fn kernels() {
        let fold = IntegerMatrix::from_i64(&[vec![1, 1]]);
        assert_eq!(kernel(&fold), vec![big(&[1, -1])]);
        let fold2 = IntegerMatrix::from_i64(&[vec![1, 2, 1]]);
        let k = kernel(&fold2);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(fold2.apply(v).iter().all(Zero::is_zero));
        }
        // mod 2, 2x + 4y = 0 holds everywhere
        let k = kernel_mod(&IntegerMatrix::from_i64(&[vec![2, 4]]), &BigInt::from(2));
        assert_eq!(k, vec![big(&[1, 0]), big(&[0, 1])]);
        let k = kernel_mod(&IntegerMatrix::from_i64(&[vec![1, 3]]), &BigInt::from(6));
        assert_eq!(k, vec![big(&[3, 1]), big(&[0, 2])]);
    }

    fn det(m: &[Vec<BigInt>]) -> BigInt {
        // Laplace expansion; fine for 4x4
        if m.len() == 1 {
            return m[0][0].clone();
        }
        let mut total = BigInt::zero();
        for j in 0..m.len() {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = &m[0][j] * det(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    proptest! {
        #[test]
        fn smith_product_is_abs_det(entries in proptest::collection::vec(-9i64..=9, 16)) {
            let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let m = IntegerMatrix::from_i64(&rows);
            let d = det(&m.entries);
            let diag = smith_normal_form(&m);
            if d.is_zero() {
                prop_assert!(diag.len() < 4);
            } else {
                prop_assert_eq!(diag.len(), 4);
                prop_assert_eq!(diag.iter().product::<BigInt>(), d.abs());
            }
            for w in diag.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }

        #[test]
        fn kernel_vectors_vanish(entries in proptest::collection::vec(-5i64..=5, 12)) {
            let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let m = IntegerMatrix::from_i64(&rows);
            let k = kernel(&m);
            let rank = smith_normal_form(&m).len();
            prop_assert_eq!(k.len(), 4 - rank);
            for v in &k {
                prop_assert!(m.apply(v).iter().all(Zero::is_zero));
            }
        }
    }
}
