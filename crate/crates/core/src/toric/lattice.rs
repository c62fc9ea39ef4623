use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{bail, Result};
use crate::homalg::{field_nullspace, field_rank, smith_normal_form, Matrix};
use crate::rings::{int, CoeffRing, LRing, Scalar};

pub type IVec = Vec<i64>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[i64], k: i64) -> IVec {
    a.iter().map(|x| x * k).collect()
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(a: &[i64]) -> IVec {
    let g = a.iter().fold(0i64, |g, x| g.gcd(x));
    if g == 0 {
        a.to_vec()
    } else {
        a.iter().map(|x| x / g).collect()
    }
}

fn to_scalars(rows: &[IVec]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

/// Clears denominators and makes the vector primitive.
fn integral(v: &[Scalar]) -> IVec {
    let l = v.iter().fold(num_bigint::BigInt::one(), |l, x| l.lcm(x.denom()));
    let w: Vec<i64> = v.iter().map(|x| (x * Scalar::from_integer(l.clone())).to_integer().to_i64().expect("small entries")).collect();
    primitive(&w)
}

pub fn rank(rows: &[IVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    field_rank(CoeffRing::Rationals, &to_scalars(rows)).expect("field")
}

/// A basis of the rational kernel of `rows`, as primitive integer vectors.
pub fn rational_kernel(rows: &[IVec], n: usize) -> Vec<IVec> {
    if rows.is_empty() {
        return (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    }
    field_nullspace(CoeffRing::Rationals, &to_scalars(rows), n).expect("field").iter().map(|v| integral(v)).collect()
}

fn int_matrix(rows: &[IVec], cols: usize) -> Matrix {
    let z = LRing::new(CoeffRing::Integers, 0);
    if rows.is_empty() {
        return Matrix::zeros(z, 0, cols);
    }
    Matrix::from_ints(z, rows)
}

fn matrix_ints(m: &Matrix) -> Result<Vec<IVec>> {
    let s = m.to_scalars()?;
    s.iter()
        .map(|r| r.iter().map(|x| CoeffRing::Integers.to_i64(x).ok_or_else(|| crate::Error::Domain("entry too large".into()))).collect())
        .collect()
}

/// A basis of `{v ∈ Z^n : rows · v = 0}`.
pub fn integer_kernel(rows: &[IVec], n: usize) -> Result<Vec<IVec>> {
    if rows.is_empty() || rows.iter().all(|r| r.iter().all(|&x| x == 0)) {
        return Ok(rational_kernel(&[], n));
    }
    let snf = smith_normal_form(&int_matrix(rows, n))?;
    let v = matrix_ints(&snf.v)?;
    let r = snf.diag.len();
    Ok((r..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect())
}

pub fn det(cols: &[IVec]) -> Scalar {
    let n = cols.len();
    let mut m: Vec<Vec<Scalar>> = (0..n).map(|i| cols.iter().map(|c| int(c[i])).collect()).collect();
    let mut d = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Scalar::zero() };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c].clone();
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    d
}

pub fn is_unimodular(cols: &[IVec]) -> bool {
    det(cols).abs().is_one()
}

/// The inverse of an integer matrix given by rows, if it is integral.
pub fn int_inverse(rows: &[IVec]) -> Option<Vec<IVec>> {
    let n = rows.len();
    let mut m: Vec<Vec<Scalar>> =
        rows.iter().enumerate().map(|(i, r)| r.iter().map(|&x| int(x)).chain((0..n).map(|j| int(i64::from(i == j)))).collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(p, c);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    m.iter().map(|r| r[n..].iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()).collect()
}

pub fn mat_vec(rows: &[IVec], v: &[i64]) -> IVec {
    rows.iter().map(|r| dot(r, v)).collect()
}

/// A unimodular `q` (by rows) such that `q · b_j` is supported on the first
/// `u` coordinates for every column `b_j` of a saturated lattice basis.
pub fn adapted_coordinates(basis: &[IVec], n: usize) -> Result<Vec<IVec>> {
    if basis.is_empty() {
        return Ok(rational_kernel(&[], n));
    }
    let cols: Vec<IVec> = (0..n).map(|i| basis.iter().map(|b| b[i]).collect()).collect();
    let snf = smith_normal_form(&int_matrix(&cols, basis.len()))?;
    if snf.diag.len() != basis.len() || snf.diag.iter().any(|d| !d.abs().is_one()) {
        bail!(Domain, "the sublattice is not saturated");
    }
    matrix_ints(&snf.u)
}
