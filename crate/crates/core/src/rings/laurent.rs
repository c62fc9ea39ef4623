use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::coeff::{format_scalar, int, CoeffRing, Scalar};
use crate::error::{bail, Error, Result};

pub type Exponent = Vec<i64>;

/// The Laurent polynomial ring `R[x1^±, ..., xn^±]`; `nvars == 0` is `R` itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LRing {
    pub coeff: CoeffRing,
    pub nvars: usize,
}

impl LRing {
    pub fn new(coeff: CoeffRing, nvars: usize) -> Self {
        LRing { coeff, nvars }
    }

    pub fn base(&self) -> LRing {
        LRing::new(self.coeff, 0)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(*self)
    }

    pub fn one(&self) -> Poly {
        Poly::one(*self)
    }

    pub fn int(&self, v: i64) -> Poly {
        Poly::constant(*self, int(v))
    }

    pub fn var(&self, k: usize) -> Poly {
        Poly::var(*self, k)
    }

    pub fn parse(&self, s: &str) -> Result<Poly> {
        Poly::parse(*self, s)
    }
}

impl fmt::Display for LRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nvars == 0 {
            return write!(f, "{}", self.coeff);
        }
        write!(f, "{}[", self.coeff)?;
        for i in 0..self.nvars {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "x{}^±", i + 1)?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: LRing,
    terms: BTreeMap<Exponent, Scalar>,
}

impl Poly {
    pub fn zero(ring: LRing) -> Self {
        Poly { ring, terms: BTreeMap::new() }
    }

    pub fn one(ring: LRing) -> Self {
        Poly::constant(ring, Scalar::one())
    }

    pub fn constant(ring: LRing, c: Scalar) -> Self {
        Poly::monomial(ring, vec![0; ring.nvars], c)
    }

    pub fn monomial(ring: LRing, exp: Exponent, c: Scalar) -> Self {
        assert_eq!(exp.len(), ring.nvars, "exponent length mismatch");
        let c = ring.coeff.reduce(c);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { ring, terms }
    }

    /// The variable `x_{k+1}` (zero-based index `k`).
    pub fn var(ring: LRing, k: usize) -> Self {
        assert!(k < ring.nvars, "variable index out of range");
        let mut e = vec![0; ring.nvars];
        e[k] = 1;
        Poly::monomial(ring, e, Scalar::one())
    }

    /// Builds a polynomial from arbitrary terms, reducing and collecting.
    pub fn from_terms<I: IntoIterator<Item = (Exponent, Scalar)>>(ring: LRing, it: I) -> Result<Self> {
        let mut p = Poly::zero(ring);
        for (e, c) in it {
            if e.len() != ring.nvars {
                bail!(Structural, "exponent {:?} has length {} in {}", e, e.len(), ring);
            }
            let c = ring.coeff.normalize(c)?;
            p.add_term(e, &c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let r = self.ring.coeff;
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = r.add(o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ring(&self) -> LRing {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Exponent, Scalar> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map_or(false, |c| c.is_one())
    }

    /// The value of a polynomial with support in `{0}`, if it is one.
    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&a| a == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn coeff_of(&self, e: &[i64]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    fn check_same(&self, other: &Poly) -> Result<()> {
        if self.ring != other.ring {
            bail!(Structural, "ring mismatch: {} vs {}", self.ring, other.ring);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let r = self.ring.coeff;
        let mut out = Poly::zero(self.ring);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, &r.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let r = self.ring.coeff;
        let c = r.reduce(c.clone());
        if c.is_zero() {
            return Poly::zero(self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| (e.clone(), r.mul(a, &c)))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        Poly { ring: self.ring, terms }
    }

    pub fn shift(&self, by: &[i64]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a + b).collect(), c.clone()))
            .collect();
        Poly { ring: self.ring, terms }
    }

    /// Returns the term if `self` is a single monomial with unit coefficient.
    pub fn is_monomial_unit(&self) -> Option<(Exponent, Scalar)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        self.ring.coeff.is_unit(c).then(|| (e.clone(), c.clone()))
    }

    pub fn inverse_if_monomial_unit(&self) -> Option<Poly> {
        let (e, c) = self.is_monomial_unit()?;
        let ci = self.ring.coeff.inv(&c)?;
        Some(Poly::monomial(self.ring, e.iter().map(|a| -a).collect(), ci))
    }

    /// Ring homomorphism `L -> K` sending `x_i` to `point[i]`, with `K` the
    /// specialisation target of the coefficient ring.
    pub fn specialize(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.ring.nvars {
            bail!(Structural, "point has {} coordinates, ring has {} variables", point.len(), self.ring.nvars);
        }
        let k = self.ring.coeff.specialization_target();
        let mut pts = Vec::with_capacity(point.len());
        for p in point {
            let p = k.normalize(p.clone())?;
            if !k.is_unit(&p) {
                bail!(Domain, "coordinate {} is not invertible in {}", format_scalar(&p), k);
            }
            pts.push(p);
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (p, &a) in pts.iter().zip(e) {
                t = k.mul(&t, &pow_scalar(k, p, a));
            }
            acc = k.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Evaluation inside the coefficient ring; every coordinate must be a unit of it.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.ring.nvars {
            bail!(Structural, "point has {} coordinates, ring has {} variables", point.len(), self.ring.nvars);
        }
        let r = self.ring.coeff;
        let mut pts = Vec::with_capacity(point.len());
        for p in point {
            let p = r.normalize(p.clone())?;
            if !r.is_unit(&p) {
                bail!(Domain, "coordinate {} is not a unit of {}", format_scalar(&p), r);
            }
            pts.push(p);
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (p, &a) in pts.iter().zip(e) {
                t = r.mul(&t, &pow_scalar(r, p, a));
            }
            acc = r.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Evaluates the leading `point.len()` variables (at units of the
    /// coefficient ring) and drops them from the ring.
    pub fn evaluate_leading(&self, point: &[Scalar]) -> Result<Poly> {
        let k = point.len();
        if k > self.ring.nvars {
            bail!(Structural, "cannot evaluate {k} variables in {}", self.ring);
        }
        let r = self.ring.coeff;
        for p in point {
            if !r.is_unit(&r.normalize(p.clone())?) {
                bail!(Domain, "coordinate {} is not a unit of {}", format_scalar(p), r);
            }
        }
        let target = LRing::new(r, self.ring.nvars - k);
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (p, &a) in point.iter().zip(e) {
                t = r.mul(&t, &pow_scalar(r, &r.reduce(p.clone()), a));
            }
            out.add_term(e[k..].to_vec(), &t);
        }
        Ok(out)
    }

    /// Substitutes `x_{k+1} = c`, keeping the variable count.
    pub fn substitute(&self, k: usize, c: &Scalar) -> Poly {
        let r = self.ring.coeff;
        let mut out = Poly::zero(self.ring);
        for (e, a) in &self.terms {
            let mut e2 = e.clone();
            let v = r.mul(a, &pow_scalar(r, c, e[k]));
            e2[k] = 0;
            out.add_term(e2, &v);
        }
        out
    }

    /// The difference quotient `(p - p|_{x_{k+1}=c}) / (x_{k+1} - c)` for a unit `c`.
    pub fn divided_difference(&self, k: usize, c: &Scalar) -> Result<Poly> {
        let r = self.ring.coeff;
        let ci = r
            .inv(c)
            .ok_or_else(|| Error::Domain(format!("{} is not a unit", format_scalar(c))))?;
        let mut out = Poly::zero(self.ring);
        for (e, a) in &self.terms {
            let m = e[k];
            let mut e2 = e.clone();
            if m > 0 {
                for i in 0..m {
                    e2[k] = i;
                    out.add_term(e2.clone(), &r.mul(a, &pow_scalar(r, c, m - 1 - i)));
                }
            } else if m < 0 {
                let mm = -m;
                for i in 1..=mm {
                    e2[k] = -i;
                    let v = r.mul(a, &pow_scalar(r, &ci, mm + 1 - i));
                    out.add_term(e2.clone(), &r.neg(&v));
                }
            }
        }
        Ok(out)
    }

    /// Re-embeds into `target`, sending variable `i` to variable `var_map[i]`.
    pub fn embed(&self, target: LRing, var_map: &[usize]) -> Result<Poly> {
        if var_map.len() != self.ring.nvars {
            bail!(Structural, "variable map has wrong length");
        }
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.nvars];
            for (i, &a) in e.iter().enumerate() {
                let j = var_map[i];
                if j >= target.nvars {
                    bail!(Structural, "variable x{} out of range in {}", j + 1, target);
                }
                e2[j] += a;
            }
            out.add_term(e2, &target.coeff.normalize(c.clone())?);
        }
        Ok(out)
    }

    /// Scalar extension `R -> L` for a polynomial with no variables.
    pub fn lift(&self, target: LRing) -> Result<Poly> {
        self.embed(target, &(0..self.ring.nvars).collect::<Vec<_>>())
    }

    pub fn change_coeff(&self, coeff: CoeffRing) -> Result<Poly> {
        let ring = LRing::new(coeff, self.ring.nvars);
        Poly::from_terms(ring, self.terms.iter().map(|(e, c)| (e.clone(), c.clone())))
    }

    pub fn parse(ring: LRing, s: &str) -> Result<Poly> {
        parse_poly(ring, s)
    }
}

pub fn pow_scalar(r: CoeffRing, c: &Scalar, e: i64) -> Scalar {
    let base = if e < 0 { r.inv(c).expect("power of non-unit") } else { c.clone() };
    let mut acc = r.one();
    let mut b = base;
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc = r.mul(&acc, &b);
        }
        b = r.mul(&b, &b);
        n >>= 1;
    }
    acc
}

impl<'a> Add for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.checked_add(rhs).expect("ring mismatch in addition")
    }
}

impl<'a> Sub for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.checked_add(&-rhs).expect("ring mismatch in subtraction")
    }
}

impl<'a> Mul for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.checked_mul(rhs).expect("ring mismatch in multiplication")
    }
}

impl<'a> Neg for &'a Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let r = self.ring.coeff;
        Poly {
            ring: self.ring,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), r.neg(c))).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| if x == 1 { format!("x{}", j + 1) } else { format!("x{}^{}", j + 1, x) })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", format_scalar(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", format_scalar(&a))?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

fn parse_poly(ring: LRing, s: &str) -> Result<Poly> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        bail!(Parse, "empty polynomial");
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0i32;
    let mut prev: Option<char> = None;
    for ch in src.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && prev != Some('^') {
            if !cur.is_empty() {
                pieces.push((neg, std::mem::take(&mut cur)));
                neg = false;
            }
            if ch == '-' {
                neg = !neg;
            }
        } else {
            cur.push(ch);
        }
        prev = Some(ch);
    }
    if cur.is_empty() {
        bail!(Parse, "dangling sign in {s:?}");
    }
    pieces.push((neg, cur));

    let mut p = Poly::zero(ring);
    for (neg, body) in pieces {
        let (e, c) = parse_term(ring, &body)?;
        let c = if neg { ring.coeff.neg(&c) } else { c };
        p.add_term(e, &c);
    }
    Ok(p)
}

fn parse_var(ring: LRing, name: &str) -> Result<usize> {
    let idx = match name {
        "x" if ring.nvars <= 3 => 0,
        "y" => 1,
        "z" => 2,
        _ => {
            let digits = name
                .strip_prefix('x')
                .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
            let i: usize = digits.parse().map_err(|_| Error::Parse(format!("unknown variable {name:?}")))?;
            if i == 0 {
                bail!(Parse, "variables are numbered from 1");
            }
            i - 1
        }
    };
    if idx >= ring.nvars {
        bail!(Parse, "variable {name:?} out of range for {}", ring);
    }
    Ok(idx)
}

fn parse_term(ring: LRing, body: &str) -> Result<(Exponent, Scalar)> {
    let mut e = vec![0i64; ring.nvars];
    let mut c = ring.coeff.one();
    for factor in body.split('*') {
        if factor.is_empty() {
            bail!(Parse, "empty factor in {body:?}");
        }
        let first = factor.chars().next().unwrap();
        if first.is_ascii_digit() {
            let v = ring.coeff.parse_scalar(factor)?;
            c = ring.coeff.mul(&c, &v);
            continue;
        }
        let (name, pw) = match factor.split_once('^') {
            Some((n, p)) => {
                let p = p.trim_start_matches('(').trim_end_matches(')');
                let v: i64 = p.parse().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
                (n, v)
            }
            None => (factor, 1),
        };
        let k = parse_var(ring, name)?;
        e[k] += pw;
    }
    Ok((e, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zx(n: usize) -> LRing {
        LRing::new(CoeffRing::Integers, n)
    }

    #[test]
    fn product_example() {
        let r = zx(1);
        let a = r.parse("1 - x").unwrap();
        let b = r.parse("1 + x + x^2").unwrap();
        assert_eq!(&a * &b, r.parse("1 - x^3").unwrap());
        assert_eq!(&a * &r.one(), a);
        assert!((&a * &r.zero()).is_zero());
    }

    #[test]
    fn printing() {
        let r = zx(2);
        assert_eq!(r.parse("x1 - 1").unwrap().to_string(), "-1 + x1");
        assert_eq!(r.parse("1-2*x1").unwrap().to_string(), "1 - 2*x1");
        assert_eq!(r.parse("x2^-1*x1^2 + 3").unwrap().to_string(), "3 + x1^2*x2^-1");
        assert_eq!(r.zero().to_string(), "0");
        let q = LRing::new(CoeffRing::Rationals, 1);
        assert_eq!(q.parse("3/4*x1").unwrap().to_string(), "3/4*x1");
        assert_eq!(q.parse("-x1^(-2)").unwrap().to_string(), "-x1^-2");
    }

    #[test]
    fn parse_errors() {
        let r = zx(1);
        assert!(r.parse("y").is_err());
        assert!(r.parse("1 +").is_err());
        assert!(r.parse("1/2").is_err());
    }

    #[test]
    fn specialisation() {
        let r = zx(2);
        let p = r.parse("x + y").unwrap();
        assert_eq!(p.specialize(&[int(2), int(3)]).unwrap(), int(5));
        let u = r.parse("x*x^-1").unwrap();
        assert_eq!(u.specialize(&[int(7), int(-3)]).unwrap(), int(1));
        let one_var = zx(1).parse("1 - x").unwrap();
        assert_eq!(one_var.specialize(&[int(1)]).unwrap(), int(0));
        assert!(one_var.specialize(&[int(0)]).is_err());
        let f5 = LRing::new(CoeffRing::IntegersMod(5), 1).parse("x").unwrap();
        assert!(f5.specialize(&[int(5)]).is_err());
    }

    #[test]
    fn monomial_units() {
        let q = LRing::new(CoeffRing::Rationals, 1);
        assert_eq!(q.parse("-2*x").unwrap().is_monomial_unit(), Some((vec![1], int(-2))));
        assert_eq!(zx(1).parse("-2*x").unwrap().is_monomial_unit(), None);
        assert_eq!(zx(1).parse("1 + x").unwrap().is_monomial_unit(), None);
    }

    #[test]
    fn divided_difference_identity() {
        let r = zx(1);
        let p = r.parse("3*x^-2 - x + 5*x^3").unwrap();
        let dd = p.divided_difference(0, &int(1)).unwrap();
        let lhs = &dd * &r.parse("x - 1").unwrap();
        let rhs = &p - &p.substitute(0, &int(1));
        assert_eq!(lhs, rhs);
    }
}
