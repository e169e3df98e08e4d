//! Sublattices of Z^n in canonical Hermite form: membership, intersection,
//! sum, and the elementary-divisor invariants used by the isomorphism engine.

use crate::error::GogError;
use crate::matrix::Mat;
use serde::{Deserialize, Serialize};

/// A sublattice of Z^n, stored as the canonical row Hermite basis. Two
/// lattices are equal as subgroups of Z^n iff the stored bases are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Lattice {
    ambient: usize,
    basis: Mat,
}

impl Lattice {
    /// Lattice spanned by the given vectors.
    pub fn span(ambient: usize, vectors: Vec<Vec<i64>>) -> Result<Lattice, GogError> {
        for v in &vectors {
            if v.len() != ambient {
                return Err(GogError::Dimension(format!(
                    "vector of length {} in ambient rank {ambient}",
                    v.len()
                )));
            }
        }
        let m = if vectors.is_empty() { Mat::zero(0, ambient) } else { Mat::from_rows(vectors) };
        Ok(Lattice { ambient, basis: m.hermite_basis() })
    }

    pub fn full(ambient: usize) -> Lattice {
        Lattice { ambient, basis: Mat::identity(ambient) }
    }

    pub fn trivial(ambient: usize) -> Lattice {
        Lattice { ambient, basis: Mat::zero(0, ambient) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<i64>> {
        self.basis.row_vecs()
    }

    pub fn is_full(&self) -> bool {
        self.basis == Mat::identity(self.ambient)
    }

    /// Integer coefficients of `v` over the stored basis, or a definite
    /// refusal when `v` is not in the lattice.
    pub fn membership(&self, v: &[i64]) -> Result<Option<Vec<i64>>, GogError> {
        if v.len() != self.ambient {
            return Err(GogError::Dimension(format!(
                "vector of length {} in ambient rank {}",
                v.len(),
                self.ambient
            )));
        }
        if self.basis.rows() == 0 {
            return Ok(if v.iter().all(|&x| x == 0) { Some(vec![]) } else { None });
        }
        Ok(self.basis.solve_left(v))
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        matches!(self.membership(v), Ok(Some(_)))
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis_rows().iter().all(|row| self.contains(row))
    }

    /// Canonical residue of `v` modulo the lattice: reduce by each Hermite
    /// pivot in turn. Two vectors have equal residues iff they lie in the
    /// same coset.
    pub fn coset_residue(&self, v: &[i64]) -> Vec<i64> {
        let mut out = v.to_vec();
        for r in 0..self.basis.rows() {
            let row = self.basis.row(r);
            let pivot_col = row.iter().position(|&x| x != 0).unwrap();
            let q = out[pivot_col].div_euclid(row[pivot_col]);
            for c in 0..self.ambient {
                out[c] -= q * row[c];
            }
        }
        out
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice, GogError> {
        if self.ambient != other.ambient {
            return Err(GogError::Dimension("intersect with different ambient ranks".into()));
        }
        if self.rank() == 0 || other.rank() == 0 {
            return Ok(Lattice::trivial(self.ambient));
        }
        // rows of the stacked matrix [A; B]: kernel elements (x, y) satisfy
        // x·A = -y·B, so x·A runs over the intersection
        let mut stacked = self.basis_rows();
        stacked.extend(other.basis_rows());
        let stacked = Mat::from_rows(stacked);
        let kernel = stacked.left_kernel();
        let mut vectors = Vec::new();
        for k in 0..kernel.rows() {
            let x = &kernel.row(k)[..self.basis.rows()];
            vectors.push(self.basis.mul_row_vec(x));
        }
        Lattice::span(self.ambient, vectors)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice, GogError> {
        if self.ambient != other.ambient {
            return Err(GogError::Dimension("sum with different ambient ranks".into()));
        }
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Lattice::span(self.ambient, rows)
    }

    /// Elementary divisors of the inclusion into Z^n; an isomorphism
    /// invariant of the pair (Z^n, L) under GL_n(Z).
    pub fn elementary_divisors(&self) -> Vec<i64> {
        self.basis.elementary_divisors()
    }

    /// Image of the lattice under `v ↦ v·U`.
    pub fn transform(&self, u: &Mat) -> Result<Lattice, GogError> {
        if u.rows() != self.ambient {
            return Err(GogError::Dimension("transform matrix of wrong shape".into()));
        }
        let vectors = self.basis_rows().iter().map(|r| u.mul_row_vec(r)).collect();
        Lattice::span(u.cols(), vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(ambient: usize, rows: &[&[i64]]) -> Lattice {
        Lattice::span(ambient, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Brute-force membership oracle over coefficient boxes.
    fn brute_member(basis: &[&[i64]], v: &[i64], bound: i64) -> bool {
        fn rec(basis: &[&[i64]], acc: Vec<i64>, idx: usize, v: &[i64], bound: i64) -> bool {
            if idx == basis.len() {
                return acc == v;
            }
            for c in -bound..=bound {
                let next: Vec<i64> =
                    acc.iter().zip(basis[idx]).map(|(a, b)| a + c * b).collect();
                if rec(basis, next, idx + 1, v, bound) {
                    return true;
                }
            }
            false
        }
        rec(basis, vec![0; v.len()], 0, v, bound)
    }

    /// Brute-force intersection by scanning a coordinate box.
    fn brute_intersect(a: &Lattice, b: &Lattice, bound: i64) -> Vec<Vec<i64>> {
        let n = a.ambient_rank();
        let mut points = Vec::new();
        let mut v = vec![-bound; n];
        loop {
            if a.contains(&v) && b.contains(&v) {
                points.push(v.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return points;
                }
                v[i] += 1;
                if v[i] <= bound {
                    break;
                }
                v[i] = -bound;
                i += 1;
            }
        }
    }

    #[test]
    fn membership_examples() {
        let l = lat(2, &[&[2, 0], &[0, 2]]);
        assert_eq!(l.membership(&[1, 1]).unwrap(), None);
        assert_eq!(l.membership(&[2, -2]).unwrap(), Some(vec![1, -1]));
        let l = lat(2, &[&[2, 1]]);
        assert_eq!(l.membership(&[4, 2]).unwrap(), Some(vec![2]));
        assert!(l.membership(&[1, 2, 3]).is_err());
    }

    #[test]
    fn membership_coefficients_reproduce_vector() {
        let l = lat(3, &[&[1, 2, 0], &[0, 3, 1]]);
        for v in [[1, 2, 0], [1, 5, 1], [2, 7, 1]] {
            if let Some(c) = l.membership(&v).unwrap() {
                let rebuilt = l.basis().mul_row_vec(&c);
                assert_eq!(rebuilt, v.to_vec());
            }
        }
    }

    #[test]
    fn membership_agrees_with_brute_force() {
        let basis: Vec<&[i64]> = vec![&[2, 1, 0], &[0, 3, 1]];
        let l = lat(3, &basis);
        for x in -4..=4i64 {
            for y in -4..=4i64 {
                for z in -2..=2i64 {
                    let v = [x, y, z];
                    let got = l.contains(&v);
                    let want = brute_member(&basis, &v, 8);
                    assert_eq!(got, want, "disagree on {v:?}");
                }
            }
        }
    }

    #[test]
    fn intersect_derived_example() {
        // frozen from the brute-force oracle over [-12, 12]^2
        let a = lat(2, &[&[2, 0], &[0, 1]]);
        let b = lat(2, &[&[1, 0], &[0, 3]]);
        let expect = lat(2, &[&[2, 0], &[0, 3]]);
        assert_eq!(a.intersect(&b).unwrap(), expect);
        let brute = brute_intersect(&a, &b, 12);
        for p in &brute {
            assert!(expect.contains(p));
        }
    }

    #[test]
    fn intersect_with_full_is_identity() {
        let l = lat(2, &[&[2, 1]]);
        assert_eq!(Lattice::full(2).intersect(&l).unwrap(), l);
    }

    #[test]
    fn intersect_nested_cyclic() {
        let a = lat(2, &[&[2, 3]]);
        let b = lat(2, &[&[4, 6]]);
        assert_eq!(a.intersect(&b).unwrap(), b);
    }

    #[test]
    fn intersect_agrees_with_brute_force_small() {
        let cases = vec![
            (lat(2, &[&[1, 2], &[0, 5]]), lat(2, &[&[3, 0], &[0, 1]])),
            (lat(2, &[&[2, 0]]), lat(2, &[&[3, 0]])),
            (lat(3, &[&[1, 0, 0], &[0, 2, 0]]), lat(3, &[&[0, 1, 0], &[0, 0, 2]])),
        ];
        for (a, b) in cases {
            let meet = a.intersect(&b).unwrap();
            let bound = 5;
            for p in brute_intersect(&a, &b, bound) {
                assert!(meet.contains(&p), "missing {p:?}");
            }
            for row in meet.basis_rows() {
                assert!(a.contains(&row) && b.contains(&row), "extra {row:?}");
            }
        }
    }

    #[test]
    fn coset_residue_separates_cosets() {
        let l = lat(2, &[&[2, 0], &[0, 3]]);
        assert_eq!(l.coset_residue(&[5, 7]), l.coset_residue(&[1, 1]));
        assert_ne!(l.coset_residue(&[1, 0]), l.coset_residue(&[0, 1]));
    }

    #[test]
    fn divisors_distinguish_index_two() {
        let a = lat(2, &[&[2, 0]]);
        let b = lat(2, &[&[1, 0]]);
        assert_ne!(a.elementary_divisors(), b.elementary_divisors());
    }
}
