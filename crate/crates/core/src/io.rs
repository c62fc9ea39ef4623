//! JSON documents for complexes, cubes, fans and multicomplex windows.
//!
//! Matrices are stored sparsely as `[row, col, "entry"]` triples, with
//! entries in the polynomial syntax printed by `Poly`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cubes::{SpecialCube, Subset};
use crate::error::{bail, Error, Result};
use crate::homalg::{FreeComplex, GradedMap, Matrix, Op};
use crate::multicomplex::{MultiComplex, SumTot};
use crate::rings::{CoeffRing, LRing};
use crate::tori::Witness;
use crate::toric::{Fan, IVec};

pub fn to_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json")
}

pub fn parse(s: &str) -> Result<Value> {
    Ok(serde_json::from_str(s)?)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::Parse(format!("{what} is not an integer")))
}

fn as_obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse(format!("{what} is not an object")))
}

fn key_i64(k: &str) -> Result<i64> {
    k.trim().parse().map_err(|_| Error::Parse(format!("bad integer key {k:?}")))
}

pub fn matrix_entries(m: &Matrix) -> Value {
    Value::Array(m.entries().map(|(r, c, p)| json!([r, c, p.to_string()])).collect())
}

pub fn parse_entries(ring: LRing, rows: usize, cols: usize, v: &Value) -> Result<Matrix> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("matrix entries must be a list".into()))?;
    let mut m = Matrix::zeros(ring, rows, cols);
    for e in arr {
        let t = e.as_array().filter(|t| t.len() == 3).ok_or_else(|| Error::Parse("entries are [row, col, value]".into()))?;
        let (r, c) = (as_i64(&t[0], "row")?, as_i64(&t[1], "column")?);
        if r < 0 || c < 0 || r as usize >= rows || c as usize >= cols {
            bail!(Parse, "entry ({r}, {c}) outside a {rows}×{cols} matrix");
        }
        let p = match &t[2] {
            Value::String(s) => ring.parse(s)?,
            Value::Number(x) => ring.parse(&x.to_string())?,
            _ => bail!(Parse, "matrix entry must be a string or an integer"),
        };
        m.add_at(r as usize, c as usize, &p);
    }
    Ok(m)
}

fn ring_json(ring: LRing) -> (Value, Value) {
    (json!(ring.coeff.to_string()), json!(ring.nvars))
}

pub fn parse_ring(v: &Value) -> Result<LRing> {
    let coeff = CoeffRing::parse(field(v, "ring")?.as_str().ok_or_else(|| Error::Parse("ring must be a string".into()))?)?;
    let n = v.get("variables").map(|x| as_i64(x, "variables")).transpose()?.unwrap_or(0);
    if n < 0 {
        bail!(Parse, "negative variable count");
    }
    Ok(LRing::new(coeff, n as usize))
}

pub fn graded_to_json(g: &GradedMap, src: &FreeComplex) -> Value {
    let mut blocks = Map::new();
    for &l in src.ranks().keys() {
        if let Some(m) = g.block(l) {
            if !m.is_zero() {
                blocks.insert(l.to_string(), matrix_entries(m));
            }
        }
    }
    json!({ "degree": g.degree, "blocks": blocks })
}

/// A graded self-map of `c`; block `ℓ` maps `c^ℓ -> c^{ℓ+degree}`.
pub fn graded_from_json(v: &Value, c: &FreeComplex) -> Result<GradedMap> {
    graded_between(v, c, c)
}

pub fn graded_between(v: &Value, src: &FreeComplex, tgt: &FreeComplex) -> Result<GradedMap> {
    let ring = tgt.ring();
    let degree = as_i64(field(v, "degree")?, "degree")?;
    let mut g = GradedMap::zero(ring, degree);
    if let Some(b) = v.get("blocks") {
        for (k, e) in as_obj(b, "blocks")? {
            let l = key_i64(k)?;
            g.set_block(l, parse_entries(ring, tgt.rank(l + degree), src.rank(l), e)?);
        }
    }
    Ok(g)
}

pub fn complex_to_json(c: &FreeComplex) -> Value {
    let (ring, vars) = ring_json(c.ring());
    let degrees: Map<String, Value> = c.ranks().iter().map(|(l, r)| (l.to_string(), json!(r))).collect();
    let mut diff = Map::new();
    for &l in c.ranks().keys() {
        let m = c.differential(l);
        if !m.is_zero() {
            diff.insert(l.to_string(), matrix_entries(&m));
        }
    }
    json!({ "ring": ring, "variables": vars, "degrees": degrees, "differential": diff })
}

pub fn complex_from_json(v: &Value) -> Result<FreeComplex> {
    let ring = parse_ring(v)?;
    let mut ranks = BTreeMap::new();
    for (k, r) in as_obj(field(v, "degrees")?, "degrees")? {
        let r = as_i64(r, "rank")?;
        if r < 0 {
            bail!(Parse, "negative rank");
        }
        if r > 0 {
            ranks.insert(key_i64(k)?, r as usize);
        }
    }
    let rank = |l: i64| ranks.get(&l).copied().unwrap_or(0);
    let mut d = GradedMap::zero(ring, 1);
    if let Some(diff) = v.get("differential") {
        for (k, e) in as_obj(diff, "differential")? {
            let l = key_i64(k)?;
            d.set_block(l, parse_entries(ring, rank(l + 1), rank(l), e)?);
        }
    }
    FreeComplex::new(ring, ranks, d)
}

pub fn cube_to_json(s: &SpecialCube) -> Value {
    let f: Map<String, Value> = s.f.iter().enumerate().map(|(k, g)| ((k + 1).to_string(), graded_to_json(g, &s.complex))).collect();
    let h: Map<String, Value> = s.h.iter().map(|(a, g)| (a.to_string(), graded_to_json(g, &s.complex))).collect();
    json!({ "n": s.n, "complex": complex_to_json(&s.complex), "f": f, "H": h })
}

pub fn cube_from_json(v: &Value) -> Result<SpecialCube> {
    let n = as_i64(field(v, "n")?, "n")?;
    if !(0..=20).contains(&n) {
        bail!(Parse, "cube dimension {n} out of range");
    }
    let complex = complex_from_json(field(v, "complex")?)?;
    let fobj = v.get("f").map(|x| as_obj(x, "f")).transpose()?;
    let mut f = Vec::with_capacity(n as usize);
    for k in 1..=n {
        let g = match fobj.and_then(|o| o.get(&k.to_string())) {
            Some(x) => graded_from_json(x, &complex)?,
            None => GradedMap::zero(complex.ring(), 0),
        };
        f.push(g);
    }
    let mut h = BTreeMap::new();
    if let Some(hobj) = v.get("H") {
        for (k, x) in as_obj(hobj, "H")? {
            let s: Subset = k.trim().parse().map_err(|_| Error::Parse(format!("bad subset bitmask {k:?}")))?;
            h.insert(s, graded_from_json(x, &complex)?);
        }
    }
    SpecialCube::new(complex, f, h)
}

#[derive(Serialize, Deserialize)]
struct FanDoc {
    n: usize,
    cones: Vec<Vec<IVec>>,
}

pub fn fan_to_json(f: &Fan) -> Value {
    serde_json::to_value(FanDoc { n: f.n, cones: f.cones.iter().map(|c| c.gens.clone()).collect() }).expect("json")
}

pub fn fan_from_json(v: &Value) -> Result<Fan> {
    let doc: FanDoc = serde_json::from_value(v.clone())?;
    Fan::new(doc.n, doc.cones)
}

/// `{"ring", "variables", "dirs", "modules": [{"pos", "rank"}], "d": [{"dir", "from", "entries"}]}`,
/// with directions numbered from 1.
pub fn multicomplex_to_json(e: &MultiComplex) -> Value {
    let (ring, vars) = ring_json(e.ring);
    let modules: Vec<Value> = e.ranks.iter().map(|(p, r)| json!({ "pos": p, "rank": r })).collect();
    let mut d = vec![];
    for (i, di) in e.d.iter().enumerate() {
        for (p, m) in di {
            if !m.is_zero() {
                d.push(json!({ "dir": i + 1, "from": p, "entries": matrix_entries(m) }));
            }
        }
    }
    json!({ "ring": ring, "variables": vars, "dirs": e.dirs, "modules": modules, "d": d })
}

pub fn multicomplex_from_json(v: &Value) -> Result<MultiComplex> {
    let ring = parse_ring(v)?;
    let dirs = as_i64(field(v, "dirs")?, "dirs")? as usize;
    let mut e = MultiComplex::new(dirs, ring);
    let pos = |x: &Value| -> Result<Vec<i64>> {
        let p: Vec<i64> = serde_json::from_value(x.clone())?;
        if p.len() != dirs {
            bail!(Parse, "position {p:?} has the wrong length");
        }
        Ok(p)
    };
    for m in field(v, "modules")?.as_array().ok_or_else(|| Error::Parse("modules must be a list".into()))? {
        let r = as_i64(field(m, "rank")?, "rank")?;
        e.set_module(pos(field(m, "pos")?)?, r.max(0) as usize);
    }
    if let Some(ds) = v.get("d") {
        for x in ds.as_array().ok_or_else(|| Error::Parse("d must be a list".into()))? {
            let i = as_i64(field(x, "dir")?, "dir")?;
            if i < 1 || i as usize > dirs {
                bail!(Parse, "direction {i} out of range");
            }
            let from = pos(field(x, "from")?)?;
            let to = crate::multicomplex::step(&from, i as usize - 1, 1);
            let m = parse_entries(ring, e.rank(&to), e.rank(&from), field(x, "entries")?)?;
            e.set_d(i as usize - 1, from, m)?;
        }
    }
    Ok(e)
}

/// The totalisation of a window together with the positions it sums over.
pub fn sum_tot_to_json(s: &SumTot) -> Value {
    let positions: Map<String, Value> = s.positions.iter().map(|(l, ps)| (l.to_string(), json!(ps))).collect();
    json!({ "complex": complex_to_json(&s.complex), "positions": positions })
}

/// Data `(C, D, α, β, G, h_1, ..., h_n)` for the derived cube.
#[derive(Clone, Debug)]
pub struct WitnessData {
    pub name: String,
    pub c: FreeComplex,
    pub d: FreeComplex,
    pub alpha: Op,
    pub beta: Op,
    pub g: Op,
    pub h: Vec<Op>,
    /// Set for the built-in witnesses, where `C` is finite over `R` and `h_k = x_k`.
    pub witness: Option<Witness>,
}

impl WitnessData {
    pub fn input(&self) -> crate::cubes::DerivedInput<'_> {
        crate::cubes::DerivedInput {
            c: &self.c,
            d: &self.d,
            alpha: &self.alpha,
            beta: &self.beta,
            g: &self.g,
            h: self.h.iter().map(|x| x as &dyn crate::homalg::LinearOp).collect(),
        }
    }
}

/// Either `{"builtin": "x-1" | "x-1,y-1", "ring": …}` or
/// `{"c", "d", "alpha", "beta", "G", "h": [...]}` with all maps linear over
/// the common ring of `C` and `D`.
pub fn witness_from_json(v: &Value) -> Result<WitnessData> {
    if let Some(b) = v.get("builtin") {
        let coeff = CoeffRing::parse(field(v, "ring")?.as_str().ok_or_else(|| Error::Parse("ring must be a string".into()))?)?;
        let w = match b.as_str().map(|s| s.replace(' ', "")) {
            Some(s) if s == "x-1" => Witness::one_variable(coeff),
            Some(s) if s == "x-1,y-1" || s == "(x-1,y-1)" => Witness::two_variable(coeff),
            _ => bail!(Parse, "unknown built-in witness {b}"),
        };
        let h = (0..w.nvars()).map(|k| w.h(k)).collect();
        return Ok(WitnessData {
            name: w.name.clone(),
            c: w.c.clone(),
            d: w.d.clone(),
            alpha: w.alpha.clone(),
            beta: w.beta.clone(),
            g: w.g.clone(),
            h,
            witness: Some(w),
        });
    }
    let c = complex_from_json(field(v, "c")?)?;
    let d = complex_from_json(field(v, "d")?)?;
    if c.ring() != d.ring() {
        bail!(Parse, "C and D must be over the same ring in a matrix witness");
    }
    let alpha = graded_between(field(v, "alpha")?, &c, &d)?;
    let beta = graded_between(field(v, "beta")?, &d, &c)?;
    let g = graded_between(field(v, "G")?, &d, &d)?;
    let mut h = vec![];
    if let Some(hs) = v.get("h") {
        for x in hs.as_array().ok_or_else(|| Error::Parse("h must be a list".into()))? {
            h.push(Op::Mat(graded_between(x, &d, &d)?));
        }
    }
    Ok(WitnessData {
        name: v.get("name").and_then(|x| x.as_str()).unwrap_or("witness").to_string(),
        c,
        d,
        alpha: Op::Mat(alpha),
        beta: Op::Mat(beta),
        g: Op::Mat(g),
        h,
        witness: None,
    })
}
