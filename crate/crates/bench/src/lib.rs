use novtor::cubes::{derive_cube, SpecialCube};
use novtor::gen::{random_instance, GenParams};
use novtor::homalg::{FreeComplex, GradedMap, Matrix};
use novtor::rings::{CoeffRing, LRing};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn derived_cube(coeff: CoeffRing, n: usize, seed: u64) -> SpecialCube {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    derive_cube(&random_instance(&mut rng, &GenParams::new(coeff, n)).input(), 0).expect("derived cube")
}

/// `L --f--> L` in degrees 0, 1 over `coeff[x]`.
pub fn one_var(coeff: CoeffRing, f: &str) -> FreeComplex {
    let l = LRing::new(coeff, 1);
    FreeComplex::two_term(0, Matrix::from_polys(l, 1, 1, vec![vec![l.parse(f).unwrap()]])).unwrap()
}

/// Koszul complex of `(f, g)` over `coeff[x, y]`.
pub fn koszul_pair(coeff: CoeffRing, f: &str, g: &str) -> FreeComplex {
    let l = LRing::new(coeff, 2);
    let (f, g) = (l.parse(f).unwrap(), l.parse(g).unwrap());
    let d0 = Matrix::from_polys(l, 2, 1, vec![vec![f.clone()], vec![g.clone()]]);
    let d1 = Matrix::from_polys(l, 1, 2, vec![vec![-g, f]]);
    let d = GradedMap::from_blocks(l, 1, [(0, d0), (1, d1)]);
    FreeComplex::new(l, [(0, 1), (1, 2), (2, 1)].into_iter().collect(), d).unwrap()
}
