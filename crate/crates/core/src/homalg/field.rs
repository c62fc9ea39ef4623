use num_traits::Zero;

use crate::error::{bail, Result};
use crate::rings::{CoeffRing, Scalar};

/// Row echelon form over a field; returns the pivot columns.
fn echelon(k: CoeffRing, m: &mut [Vec<Scalar>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = k.inv(&m[r][c]).expect("nonzero element of a field");
        for x in m[r].iter_mut() {
            *x = k.mul(x, &inv);
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = k.mul(&f, &m[r][j]);
                    m[i][j] = k.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

fn require_field(k: CoeffRing) -> Result<()> {
    if !k.is_field() {
        bail!(Unsupported, "{k} is not a field");
    }
    Ok(())
}

/// Rank of a dense matrix given by rows.
pub fn field_rank(k: CoeffRing, rows: &[Vec<Scalar>]) -> Result<usize> {
    require_field(k)?;
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m = rows.to_vec();
    Ok(echelon(k, &mut m, cols).len())
}

/// A basis of `{v : M v = 0}` for a dense `rows x cols` matrix.
pub fn field_nullspace(k: CoeffRing, rows: &[Vec<Scalar>], cols: usize) -> Result<Vec<Vec<Scalar>>> {
    require_field(k)?;
    let mut m = rows.to_vec();
    let pivots = echelon(k, &mut m, cols);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![k.zero(); cols];
        v[free] = k.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = k.neg(&m[r][free]);
        }
        out.push(v);
    }
    Ok(out)
}
