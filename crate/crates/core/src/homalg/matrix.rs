use std::collections::BTreeMap;
use std::fmt;

use crate::error::{bail, Result};
use crate::rings::{LRing, Poly, Scalar};

/// Sparse vector: index to nonzero entry.
pub type SVec = BTreeMap<usize, Poly>;

pub fn svec_add_assign(v: &mut SVec, i: usize, x: &Poly) {
    if x.is_zero() {
        return;
    }
    match v.get_mut(&i) {
        Some(e) => {
            let s = &*e + x;
            if s.is_zero() {
                v.remove(&i);
            } else {
                *e = s;
            }
        }
        None => {
            v.insert(i, x.clone());
        }
    }
}

pub fn svec_add(a: &SVec, b: &SVec) -> SVec {
    let mut out = a.clone();
    for (i, x) in b {
        svec_add_assign(&mut out, *i, x);
    }
    out
}

pub fn svec_neg(a: &SVec) -> SVec {
    a.iter().map(|(i, x)| (*i, -x)).collect()
}

pub fn svec_scale(a: &SVec, c: &Poly) -> SVec {
    a.iter().map(|(i, x)| (*i, x * c)).filter(|(_, x)| !x.is_zero()).collect()
}

/// Row-sparse matrix with Laurent polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: LRing,
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Poly>>,
}

impl Matrix {
    pub fn zeros(ring: LRing, rows: usize, cols: usize) -> Self {
        Matrix { ring, rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(ring: LRing, n: usize) -> Self {
        Matrix::scalar(ring, n, &ring.one())
    }

    pub fn scalar(ring: LRing, n: usize, c: &Poly) -> Self {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, usize, Poly)>>(
        ring: LRing,
        rows: usize,
        cols: usize,
        entries: I,
    ) -> Result<Self> {
        let mut m = Matrix::zeros(ring, rows, cols);
        for (r, c, p) in entries {
            if r >= rows || c >= cols {
                bail!(Structural, "entry ({r},{c}) outside a {rows}x{cols} matrix");
            }
            if p.ring() != ring {
                bail!(Structural, "entry ring {} differs from matrix ring {}", p.ring(), ring);
            }
            m.add_at(r, c, &p);
        }
        Ok(m)
    }

    pub fn from_ints(ring: LRing, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(ring, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, ring.int(v));
            }
        }
        m
    }

    pub fn from_polys(ring: LRing, rows: usize, cols: usize, entries: Vec<Vec<Poly>>) -> Self {
        let mut m = Matrix::zeros(ring, rows, cols);
        for (i, row) in entries.into_iter().enumerate() {
            for (j, p) in row.into_iter().enumerate() {
                m.set(i, j, p);
            }
        }
        m
    }

    pub fn ring(&self) -> LRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Poly> {
        &self.data[i]
    }

    pub fn get(&self, r: usize, c: usize) -> Poly {
        self.data[r].get(&c).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn get_ref(&self, r: usize, c: usize) -> Option<&Poly> {
        self.data[r].get(&c)
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if p.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, p);
        }
    }

    pub fn add_at(&mut self, r: usize, c: usize, p: &Poly) {
        svec_add_assign(&mut self.data[r], c, p);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        self.data.iter().enumerate().flat_map(|(i, row)| row.iter().map(move |(j, p)| (i, *j, p)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            bail!(Structural, "cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols);
        }
        if self.ring != other.ring {
            bail!(Structural, "ring mismatch: {} vs {}", self.ring, other.ring);
        }
        let mut out = Matrix::zeros(self.ring, self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = SVec::new();
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    svec_add_assign(&mut acc, *j, &(a * b));
                }
            }
            out.data[i] = acc;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.checked_mul(other).expect("matrix product")
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        if self.dims() != other.dims() || self.ring != other.ring {
            bail!(Structural, "cannot add {}x{} and {}x{}", self.rows, self.cols, other.rows, other.cols);
        }
        let mut out = self.clone();
        for (i, row) in other.data.iter().enumerate() {
            for (j, p) in row {
                out.add_at(i, *j, p);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.checked_add(other).expect("matrix sum")
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &Poly) -> Matrix {
        self.map(|p| p * c)
    }

    pub fn scale_int(&self, c: i64) -> Matrix {
        match c {
            1 => self.clone(),
            -1 => self.neg(),
            _ => self.scale(&self.ring.int(c)),
        }
    }

    pub fn map<F: Fn(&Poly) -> Poly>(&self, f: F) -> Matrix {
        let data = self
            .data
            .iter()
            .map(|row| row.iter().map(|(j, p)| (*j, f(p))).filter(|(_, p)| !p.is_zero()).collect())
            .collect();
        Matrix { ring: self.ring, rows: self.rows, cols: self.cols, data }
    }

    pub fn try_map<F: Fn(&Poly) -> Result<Poly>>(&self, ring: LRing, f: F) -> Result<Matrix> {
        let mut out = Matrix::zeros(ring, self.rows, self.cols);
        for (i, j, p) in self.entries() {
            let q = f(p)?;
            if q.ring() != ring {
                bail!(Structural, "mapped entry lives in {} not {}", q.ring(), ring);
            }
            out.set(i, j, q);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.ring, self.cols, self.rows);
        for (i, j, p) in self.entries() {
            out.set(j, i, p.clone());
        }
        out
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = self.ring.zero();
            for (j, a) in row {
                if let Some(x) = v.get(j) {
                    acc = &acc + &(a * x);
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    /// Adds `sign * block` with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Matrix, sign: i64) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for (i, j, p) in block.entries() {
            let q = if sign == 1 { p.clone() } else if sign == -1 { -p } else { p * &self.ring.int(sign) };
            self.add_at(r0 + i, c0 + j, &q);
        }
    }

    pub fn submatrix(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(self.ring, rows, cols);
        for i in 0..rows {
            for (j, p) in self.data[r0 + i].range(c0..c0 + cols) {
                out.set(i, j - c0, p.clone());
            }
        }
        out
    }

    /// Entries as constant scalars; fails if any entry involves variables.
    pub fn to_scalars(&self) -> Result<Vec<Vec<Scalar>>> {
        let mut out = vec![vec![Scalar::from_integer(0.into()); self.cols]; self.rows];
        for (i, j, p) in self.entries() {
            match p.constant_value() {
                Some(c) => out[i][j] = c,
                None => bail!(Unsupported, "entry {p} is not a constant"),
            }
        }
        Ok(out)
    }

    pub fn from_scalars(ring: LRing, rows: usize, cols: usize, s: &[Vec<Scalar>]) -> Matrix {
        let mut out = Matrix::zeros(ring, rows, cols);
        for (i, row) in s.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.set(i, j, Poly::constant(ring, c.clone()));
            }
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::CoeffRing;

    #[test]
    fn product_and_transpose() {
        let r = LRing::new(CoeffRing::Integers, 0);
        let a = Matrix::from_ints(r, &[vec![1, 2], vec![3, 4]]);
        let b = Matrix::from_ints(r, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b), Matrix::from_ints(r, &[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.transpose().transpose(), a);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn blocks() {
        let r = LRing::new(CoeffRing::Integers, 0);
        let mut m = Matrix::zeros(r, 3, 3);
        m.add_block(1, 1, &Matrix::identity(r, 2), -1);
        assert_eq!(m.get(2, 2), r.int(-1));
        assert_eq!(m.submatrix(1, 2, 1, 2), Matrix::identity(r, 2).neg());
    }
}
