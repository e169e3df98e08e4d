//! Dense integer matrices with the exact normal forms used for lattice
//! arithmetic: row Hermite form, Smith form, kernels and unimodular solving.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A dense `rows x cols` matrix over the integers, row major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(|&x| x == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }

    /// row[a] += k * row[b]
    fn add_mul_row(&mut self, a: usize, b: usize, k: i64) {
        if k == 0 {
            return;
        }
        for j in 0..self.cols {
            let v = self[(b, j)];
            self[(a, j)] = self[(a, j)].checked_add(k.checked_mul(v).expect("overflow")).expect("overflow");
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] = out[(r, c)]
                        .checked_add(a.checked_mul(other[(k, c)]).expect("overflow"))
                        .expect("overflow");
                }
            }
        }
        out
    }

    pub fn mul_row_vec(&self, v: &[i64]) -> Vec<i64> {
        // v * self, for a row vector v of length self.rows
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let mut out = vec![0i64; self.cols];
        for (r, &vr) in v.iter().enumerate() {
            if vr == 0 {
                continue;
            }
            for c in 0..self.cols {
                out[c] = out[c].checked_add(vr.checked_mul(self[(r, c)]).expect("overflow")).expect("overflow");
            }
        }
        out
    }

    /// Row Hermite normal form together with a unimodular transform:
    /// returns `(h, u)` with `u * self == h`, the nonzero rows of `h`
    /// linearly independent, pivots positive, and entries above each pivot
    /// reduced into `[0, pivot)`.
    pub fn hermite(&self) -> (Mat, Mat) {
        let mut h = self.clone();
        let mut u = Mat::identity(self.rows);
        let mut pivot_row = 0;
        for col in 0..h.cols {
            // find a row at or below pivot_row with nonzero entry in col
            let Some(_) = (pivot_row..h.rows).find(|&r| h[(r, col)] != 0) else {
                continue;
            };
            // euclidean elimination below the pivot
            loop {
                let mut best: Option<usize> = None;
                for r in pivot_row..h.rows {
                    if h[(r, col)] != 0
                        && best.map_or(true, |b| h[(r, col)].abs() < h[(b, col)].abs())
                    {
                        best = Some(r);
                    }
                }
                let b = best.unwrap();
                h.swap_rows(pivot_row, b);
                u.swap_rows(pivot_row, b);
                let p = h[(pivot_row, col)];
                let mut done = true;
                for r in pivot_row + 1..h.rows {
                    let q = h[(r, col)].div_euclid(p);
                    h.add_mul_row(r, pivot_row, -q);
                    u.add_mul_row(r, pivot_row, -q);
                    if h[(r, col)] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h[(pivot_row, col)] < 0 {
                h.negate_row(pivot_row);
                u.negate_row(pivot_row);
            }
            // reduce entries above the pivot
            let p = h[(pivot_row, col)];
            for r in 0..pivot_row {
                let q = h[(r, col)].div_euclid(p);
                h.add_mul_row(r, pivot_row, -q);
                u.add_mul_row(r, pivot_row, -q);
            }
            pivot_row += 1;
            if pivot_row == h.rows {
                break;
            }
        }
        (h, u)
    }

    /// Nonzero rows of the Hermite form: a canonical basis of the row lattice.
    pub fn hermite_basis(&self) -> Mat {
        let (h, _) = self.hermite();
        let rows: Vec<Vec<i64>> = (0..h.rows).filter(|&r| !h.is_zero_row(r)).map(|r| h.row(r).to_vec()).collect();
        if rows.is_empty() {
            Mat::zero(0, self.cols)
        } else {
            Mat::from_rows(rows)
        }
    }

    pub fn rank(&self) -> usize {
        self.hermite_basis().rows
    }

    /// Basis of `{ x : x * self == 0 }` as rows of a matrix.
    pub fn left_kernel(&self) -> Mat {
        let (h, u) = self.hermite();
        let rows: Vec<Vec<i64>> = (0..h.rows).filter(|&r| h.is_zero_row(r)).map(|r| u.row(r).to_vec()).collect();
        if rows.is_empty() {
            Mat::zero(0, self.rows)
        } else {
            Mat::from_rows(rows)
        }
    }

    /// Solve `x * self == b` over the integers.
    pub fn solve_left(&self, b: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(b.len(), self.cols, "dimension mismatch");
        let (h, u) = self.hermite();
        let mut target = b.to_vec();
        let mut coeffs = vec![0i64; h.rows];
        for r in 0..h.rows {
            if h.is_zero_row(r) {
                break;
            }
            let pivot_col = (0..h.cols).find(|&c| h[(r, c)] != 0).unwrap();
            let p = h[(r, pivot_col)];
            if target[pivot_col] % p != 0 {
                return None;
            }
            let q = target[pivot_col] / p;
            coeffs[r] = q;
            for c in 0..h.cols {
                target[c] -= q * h[(r, c)];
            }
        }
        if target.iter().any(|&x| x != 0) {
            return None;
        }
        Some(u.mul_row_vec(&coeffs))
    }

    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let (h, u) = self.hermite();
        // det(u) = ±1; recover its sign by permutation-free expansion on h
        let det_h: i64 = (0..self.rows).map(|i| h[(i, i)]).product();
        det_h * unimodular_sign(&u)
    }

    /// Inverse of a unimodular matrix (det ±1). Panics otherwise.
    pub fn unimodular_inverse(&self) -> Mat {
        assert_eq!(self.rows, self.cols);
        let (h, u) = self.hermite();
        assert_eq!(h, Mat::identity(self.rows), "matrix is not unimodular");
        u
    }

    /// Elementary divisors (Smith normal form diagonal), nonzero entries only.
    pub fn elementary_divisors(&self) -> Vec<i64> {
        let mut m = self.clone();
        let mut divs = Vec::new();
        let mut top = 0usize;
        let mut left = 0usize;
        while top < m.rows && left < m.cols {
            // find smallest nonzero entry in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for r in top..m.rows {
                for c in left..m.cols {
                    if m[(r, c)] != 0
                        && best.map_or(true, |(br, bc)| m[(r, c)].abs() < m[(br, bc)].abs())
                    {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else { break };
            m.swap_rows(top, br);
            swap_cols(&mut m, left, bc);
            // clear row and column; restart if a remainder shows up
            let mut clean = true;
            let p = m[(top, left)];
            for r in top + 1..m.rows {
                let q = m[(r, left)].div_euclid(p);
                m.add_mul_row(r, top, -q);
                if m[(r, left)] != 0 {
                    clean = false;
                }
            }
            for c in left + 1..m.cols {
                let q = m[(top, c)].div_euclid(p);
                add_mul_col(&mut m, c, left, -q);
                if m[(top, c)] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // entry must divide the rest of the block
            let p = m[(top, left)].abs();
            let mut divides_all = true;
            'scan: for r in top + 1..m.rows {
                for c in left + 1..m.cols {
                    if m[(r, c)] % p != 0 {
                        // fold the offending row in and redo this pivot
                        m.add_mul_row(top, r, 1);
                        divides_all = false;
                        break 'scan;
                    }
                }
            }
            if !divides_all {
                continue;
            }
            divs.push(p);
            top += 1;
            left += 1;
        }
        divs
    }
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for r in 0..m.rows {
        m.data.swap(r * m.cols + a, r * m.cols + b);
    }
}

fn add_mul_col(m: &mut Mat, a: usize, b: usize, k: i64) {
    if k == 0 {
        return;
    }
    for r in 0..m.rows {
        let v = m[(r, b)];
        m[(r, a)] = m[(r, a)].checked_add(k.checked_mul(v).expect("overflow")).expect("overflow");
    }
}

/// Sign of the determinant of a unimodular integer matrix.
fn unimodular_sign(u: &Mat) -> i64 {
    // fraction-free elimination over the rationals is overkill at this size;
    // expand by permutation after reducing with exact row operations
    let mut m = u.clone();
    let n = m.rows;
    let mut sign = 1i64;
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| m[(r, col)] != 0) else { return 0 };
        if pr != col {
            m.swap_rows(col, pr);
            sign = -sign;
        }
        // euclidean-reduce below (row ops do not change |det|)
        loop {
            let mut done = true;
            for r in col + 1..n {
                if m[(r, col)] != 0 {
                    done = false;
                    if m[(r, col)].abs() < m[(col, col)].abs() {
                        m.swap_rows(col, r);
                        sign = -sign;
                    }
                    let q = m[(r, col)] / m[(col, col)];
                    m.add_mul_row(r, col, -q);
                }
            }
            if done {
                break;
            }
        }
        if m[(col, col)] < 0 {
            sign = -sign;
            m.negate_row(col);
        }
    }
    sign
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = i64;
    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_of_identity() {
        let m = Mat::identity(3);
        let (h, u) = m.hermite();
        assert_eq!(h, Mat::identity(3));
        assert_eq!(u, Mat::identity(3));
    }

    #[test]
    fn hermite_canonicalizes_row_order() {
        let a = Mat::from_rows(vec![vec![0, 2], vec![3, 1]]);
        let b = Mat::from_rows(vec![vec![3, 1], vec![0, 2]]);
        assert_eq!(a.hermite_basis(), b.hermite_basis());
    }

    #[test]
    fn transform_reproduces_hermite() {
        let m = Mat::from_rows(vec![vec![4, 6, 2], vec![6, 9, 3], vec![2, 0, 8]]);
        let (h, u) = m.hermite();
        assert_eq!(u.mul(&m), h);
    }

    #[test]
    fn solve_left_exact_and_refused() {
        let m = Mat::from_rows(vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(m.solve_left(&[2, -2]), Some(vec![1, -1]));
        assert_eq!(m.solve_left(&[1, 1]), None);
    }

    #[test]
    fn kernel_annihilates() {
        let m = Mat::from_rows(vec![vec![1, 2], vec![2, 4], vec![0, 1]]);
        let k = m.left_kernel();
        assert_eq!(k.rows(), 1);
        assert_eq!(k.mul(&m), Mat::zero(1, 2));
    }

    #[test]
    fn det_matches_cofactor_on_small_cases() {
        let m = Mat::from_rows(vec![vec![2, 1], vec![7, 4]]);
        assert_eq!(m.det(), 1);
        let m = Mat::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(m.det(), -1);
        let m = Mat::from_rows(vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(m.det(), 6);
    }

    #[test]
    fn unimodular_inverse_round_trip() {
        let m = Mat::from_rows(vec![vec![2, 1], vec![1, 1]]);
        let inv = m.unimodular_inverse();
        assert_eq!(m.mul(&inv), Mat::identity(2));
    }

    #[test]
    fn elementary_divisors_examples() {
        let m = Mat::from_rows(vec![vec![2, 0], vec![0, 6]]);
        assert_eq!(m.elementary_divisors(), vec![2, 6]);
        let m = Mat::from_rows(vec![vec![2, 3]]);
        assert_eq!(m.elementary_divisors(), vec![1]);
        let m = Mat::from_rows(vec![vec![4, 0], vec![0, 6]]);
        assert_eq!(m.elementary_divisors(), vec![2, 12]);
    }
}
