use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{Matrix, SVec};
use crate::error::{bail, Result};
use crate::rings::{CoeffRing, LRing, Poly, Scalar};

/// `u · a · v = s` with `s` diagonal, `diag` its nonzero entries in divisibility order.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    pub diag: Vec<Scalar>,
}

type Dense = Vec<Vec<Scalar>>;

fn size(r: CoeffRing, a: &Scalar) -> BigInt {
    match r {
        CoeffRing::Integers => a.numer().abs(),
        _ => BigInt::one(),
    }
}

fn divrem(r: CoeffRing, a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
    match r {
        CoeffRing::Integers => {
            let (q, m) = a.numer().div_mod_floor(b.numer());
            (Scalar::from_integer(q), Scalar::from_integer(m))
        }
        _ => (r.divide(a, b).expect("field division"), Scalar::zero()),
    }
}

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

struct Work<'a> {
    r: CoeffRing,
    a: &'a mut Dense,
    u: Option<Dense>,
    v: Option<Dense>,
}

impl Work<'_> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= q row_t
    fn row_op(&mut self, i: usize, t: usize, q: &Scalar) {
        let r = self.r;
        fn go(r: CoeffRing, m: &mut Dense, i: usize, t: usize, q: &Scalar) {
            let (src, dst) = if i < t {
                let (lo, hi) = m.split_at_mut(t);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[t], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d = r.sub(d, &r.mul(q, s));
                }
            }
        }
        go(r, self.a, i, t, q);
        if let Some(u) = &mut self.u {
            go(r, u, i, t, q);
        }
    }

    /// col_j -= q col_t
    fn col_op(&mut self, j: usize, t: usize, q: &Scalar) {
        let r = self.r;
        fn go(r: CoeffRing, m: &mut Dense, j: usize, t: usize, q: &Scalar) {
            for row in m.iter_mut() {
                if !row[t].is_zero() {
                    row[j] = r.sub(&row[j], &r.mul(q, &row[t]));
                }
            }
        }
        go(r, self.a, j, t, q);
        if let Some(v) = &mut self.v {
            go(r, v, j, t, q);
        }
    }

    fn scale_row(&mut self, i: usize, c: &Scalar) {
        let r = self.r;
        for x in self.a[i].iter_mut() {
            *x = r.mul(x, c);
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = r.mul(x, c);
            }
        }
    }
}

fn reduce(r: CoeffRing, a: &mut Dense, rows: usize, cols: usize, track: bool) -> (Vec<Scalar>, Option<Dense>, Option<Dense>) {
    let mut w = Work { r, a, u: track.then(|| identity(rows)), v: track.then(|| identity(cols)) };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &w.a[i][j];
                if !x.is_zero() {
                    let s = size(r, x);
                    if best.as_ref().map_or(true, |b| s < b.2) {
                        let unit = s.is_one();
                        best = Some((i, j, s));
                        if unit {
                            break;
                        }
                    }
                }
            }
            if best.as_ref().map_or(false, |b| b.2.is_one()) {
                break;
            }
        }
        let Some((pi, pj, _)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let p = w.a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let (q, rem) = divrem(r, &w.a[i][t], &p);
                    w.row_op(i, t, &q);
                    clean &= rem.is_zero();
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let (q, rem) = divrem(r, &w.a[t][j], &p);
                    w.col_op(j, t, &q);
                    clean &= rem.is_zero();
                }
            }
            if !clean {
                let mut best: Option<(usize, usize, BigInt)> = None;
                for i in t..rows {
                    let x = &w.a[i][t];
                    if !x.is_zero() && best.as_ref().map_or(true, |b| size(r, x) < b.2) {
                        best = Some((i, t, size(r, x)));
                    }
                }
                for j in t..cols {
                    let x = &w.a[t][j];
                    if !x.is_zero() && best.as_ref().map_or(true, |b| size(r, x) < b.2) {
                        best = Some((t, j, size(r, x)));
                    }
                }
                let (bi, bj, _) = best.expect("nonzero pivot line");
                w.swap_rows(t, bi);
                w.swap_cols(t, bj);
                continue;
            }
            if r == CoeffRing::Integers {
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !divrem(r, &w.a[i][j], &p).1.is_zero()));
                if let Some(i) = bad {
                    let minus_one = Scalar::from_integer(BigInt::from(-1));
                    w.row_op(t, i, &minus_one);
                    continue;
                }
            }
            break;
        }
        let p = w.a[t][t].clone();
        let unit = match r {
            CoeffRing::Integers => Scalar::from_integer(if p.is_negative() { BigInt::from(-1) } else { BigInt::one() }),
            _ => r.inv(&p).expect("field pivot"),
        };
        if !unit.is_one() {
            w.scale_row(t, &unit);
        }
        diag.push(w.a[t][t].clone());
        t += 1;
    }
    (diag, w.u, w.v)
}

fn require_pid(m: &Matrix) -> Result<CoeffRing> {
    if m.ring().nvars != 0 {
        bail!(Unsupported, "Smith normal form over {} (Laurent ring)", m.ring());
    }
    let r = m.ring().coeff;
    r.require_pid()?;
    Ok(r)
}

pub fn smith_normal_form(m: &Matrix) -> Result<Snf> {
    let r = require_pid(m)?;
    let (rows, cols) = m.dims();
    let mut a = m.to_scalars()?;
    let (diag, u, v) = reduce(r, &mut a, rows, cols, true);
    let ring = m.ring();
    Ok(Snf {
        s: Matrix::from_scalars(ring, rows, cols, &a),
        u: Matrix::from_scalars(ring, rows, rows, &u.unwrap()),
        v: Matrix::from_scalars(ring, cols, cols, &v.unwrap()),
        diag,
    })
}

/// Nonzero diagonal entries of the Smith form (no transforms).
pub fn invariant_factors(m: &Matrix) -> Result<Vec<Scalar>> {
    let r = require_pid(m)?;
    let (rows, cols) = m.dims();
    if m.is_zero() {
        return Ok(Vec::new());
    }
    let mut a = m.to_scalars()?;
    Ok(reduce(r, &mut a, rows, cols, false).0)
}

pub fn rank(m: &Matrix) -> Result<usize> {
    Ok(invariant_factors(m)?.len())
}

/// Reusable solver for `a x = b` over a PID.
#[derive(Clone, Debug)]
pub struct Solver {
    ring: LRing,
    snf: Snf,
}

impl Solver {
    pub fn new(a: &Matrix) -> Result<Self> {
        Ok(Solver { ring: a.ring(), snf: smith_normal_form(a)? })
    }

    /// Some `x` with `a x = b`, or `None` when no solution exists over the ring.
    pub fn solve(&self, b: &SVec) -> Option<SVec> {
        let r = self.ring.coeff;
        let ub = self.snf.u.apply(b);
        let mut y = SVec::new();
        for (i, val) in &ub {
            let c = val.constant_value().expect("constant entries");
            match self.snf.diag.get(*i) {
                Some(s) => {
                    let q = r.divide(&c, s)?;
                    if !q.is_zero() {
                        y.insert(*i, Poly::constant(self.ring, q));
                    }
                }
                None => return None,
            }
        }
        Some(self.snf.v.apply(&y))
    }
}

pub fn solve(a: &Matrix, b: &SVec) -> Result<Option<SVec>> {
    Ok(Solver::new(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> LRing {
        LRing::new(CoeffRing::Integers, 0)
    }

    #[test]
    fn hand_example() {
        let a = Matrix::from_ints(z(), &[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&a).unwrap();
        assert_eq!(s.s, Matrix::from_ints(z(), &[vec![2, 0], vec![0, 4]]));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.s);
    }

    #[test]
    fn degenerate_cases() {
        let i = Matrix::identity(z(), 3);
        assert_eq!(smith_normal_form(&i).unwrap().s, i);
        let o = Matrix::zeros(z(), 2, 3);
        assert!(smith_normal_form(&o).unwrap().s.is_zero());
    }

    #[test]
    fn composite_modulus_rejected() {
        let r = LRing::new(CoeffRing::IntegersMod(6), 0);
        assert!(smith_normal_form(&Matrix::identity(r, 1)).is_err());
    }

    #[test]
    fn solving() {
        let a = Matrix::from_ints(z(), &[vec![2, 0], vec![0, 3]]);
        let b: SVec = [(0, z().int(4)), (1, z().int(3))].into_iter().collect();
        let x = solve(&a, &b).unwrap().unwrap();
        assert_eq!(a.apply(&x), b);
        let b2: SVec = [(0, z().int(1))].into_iter().collect();
        assert!(solve(&a, &b2).unwrap().is_none());
    }
}
