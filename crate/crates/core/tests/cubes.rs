use std::collections::BTreeMap;

use novtor::cubes::*;
use novtor::gen::{random_graded, random_instance, GenParams};
use novtor::homalg::{identity_map, FreeComplex, GradedMap, Matrix, Op};
use novtor::rings::{CoeffRing, LRing};
use novtor::tori::Witness;
use novtor::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn d_i(b: &[usize], i: usize) -> Vec<usize> {
    let mut out = b.to_vec();
    out.remove(i - 1);
    out
}

/// `[B:A]` by searching all increasing index sequences with
/// `A = d_{i_1} ... d_{i_k}(B)`, asserting the decomposition is unique.
fn incidence_oracle(b: Subset, a: Subset) -> i64 {
    if a & !b != 0 {
        return 0;
    }
    if a == b {
        return 1;
    }
    let be = elements(b);
    let k = be.len() - elements(a).len();
    let mut found = vec![];
    for mask in 0u32..(1 << be.len()) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let idx: Vec<usize> = (1..=be.len()).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        // d_{i_k} is applied first
        let mut s = be.clone();
        for &i in idx.iter().rev() {
            s = d_i(&s, i);
        }
        if from_elements(&s) == a {
            found.push(idx);
        }
    }
    assert_eq!(found.len(), 1, "B={b} A={a}");
    let sum: usize = found[0].iter().sum();
    if (k + sum) % 2 == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn incidence_examples() {
    assert_eq!(total_incidence(from_elements(&[2, 5]), from_elements(&[2, 5])), 1);
    assert_eq!(total_incidence(from_elements(&[1, 2]), from_elements(&[3])), 0);
    assert_eq!(total_incidence(from_elements(&[1, 2]), 0), -1);
    assert_eq!(total_incidence(from_elements(&[1, 2, 3]), from_elements(&[1, 3])), -1);
}

#[test]
fn incidence_matches_oracle_and_closed_forms_up_to_eight() {
    for b in all_subsets(8) {
        let nb = card(b);
        let empty = if nb % 4 < 2 { 1 } else { -1 };
        assert_eq!(total_incidence(b, 0), empty, "B={b}");
        for z in elements(b) {
            let below = elements(b).iter().filter(|&&x| x < z).count();
            assert_eq!(total_incidence(b, b & !singleton(z)), sign(below));
        }
        for a in subsets_of(b) {
            assert_eq!(incidence_by_pairs(b, a), total_incidence(b, a), "B={b} A={a}");
            if nb <= 6 {
                assert_eq!(incidence_oracle(b, a), total_incidence(b, a), "B={b} A={a}");
            }
        }
    }
    assert_eq!(total_incidence(from_elements(&[1]), from_elements(&[1, 2])), 0);
}

#[test]
fn simplicial_sign_identity() {
    for a in all_subsets(6) {
        for x in 1..=6 {
            for y in 1..=6 {
                let (sx, sy) = (singleton(x), singleton(y));
                if x == y || a & (sx | sy) != 0 {
                    continue;
                }
                let top = a | sx | sy;
                let lhs = total_incidence(top, a | sx) * total_incidence(a | sx, a);
                let rhs = -total_incidence(top, a | sy) * total_incidence(a | sy, a);
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn incidence_independent_of_middle_set() {
    for b in all_subsets(6) {
        for a in subsets_of(b) {
            for z in 1..=6 {
                let sz = singleton(z);
                if b & sz != 0 {
                    continue;
                }
                let eps = total_incidence(b | sz, a | sz) * total_incidence(b, a);
                for s in subsets_of(b).into_iter().filter(|&s| is_subset(a, s)) {
                    let up = total_incidence(b | sz, s | sz) * total_incidence(s | sz, a | sz);
                    let down = total_incidence(b, s) * total_incidence(s, a);
                    assert_eq!(up, eps * down, "B={b} S={s} A={a} z={z}");
                }
            }
        }
    }
}

fn zmod5(n: usize, seed: u64) -> SpecialCube {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::IntegersMod(5), n));
    derive_cube(&inst.input(), 0).unwrap()
}

fn check_blocks(cube: &SpecialCube, expected: &[(Subset, Subset, i64, Subset)]) {
    let t = cube.totalise().unwrap();
    let c = &cube.complex;
    let (lo, hi) = t.complex.bounds().unwrap();
    for l in lo - 1..=hi + 1 {
        for b in all_subsets(cube.n) {
            for a in all_subsets(cube.n) {
                let got = t.block(l, b, a);
                let want = expected.iter().find(|(bb, aa, _, _)| *bb == b && *aa == a);
                let rows = c.rank(l + 1 - card(b) as i64);
                let cols = c.rank(l - card(a) as i64);
                let m = match want {
                    None => Matrix::zeros(c.ring(), rows, cols),
                    Some(&(_, _, s, map)) => {
                        cube.map_for(map).block_or_zero(l - card(a) as i64, rows, cols).scale_int(s)
                    }
                };
                assert_eq!(got, m, "degree {l}, block ({b},{a})");
            }
        }
    }
}

#[test]
fn mapping_cone_matrix() {
    let cube = zmod5(1, 3);
    // [[d, 0], [f1, -d]]
    check_blocks(&cube, &[(0, 0, 1, 0), (1, 0, 1, 1), (1, 1, -1, 0)]);
}

#[test]
fn square_matrix() {
    for seed in 0..6 {
        let cube = zmod5(2, seed);
        // [[d], [f1, -d], [f2, 0, -d], [-H, -f2, f1, d]]
        check_blocks(
            &cube,
            &[
                (0, 0, 1, 0),
                (1, 0, 1, 1),
                (1, 1, -1, 0),
                (2, 0, 1, 2),
                (2, 2, -1, 0),
                (3, 0, -1, 3),
                (3, 1, -1, 2),
                (3, 2, 1, 1),
                (3, 3, 1, 0),
            ],
        );
    }
}

#[test]
fn wrong_homotopy_sign_breaks_square() {
    let mut flipped = 0;
    for seed in 0..40 {
        let cube = zmod5(2, seed);
        let f = &cube.f;
        let commutator = f[0].compose(&f[1]).sub(&f[1].compose(&f[0]));
        if commutator.is_zero() {
            continue;
        }
        assert!(is_cube(&cube.expand()));
        let mut h = cube.h.clone();
        let hn = cube.map_for(3).neg();
        h.insert(3, hn);
        let bad = SpecialCube::new(cube.complex.clone(), cube.f.clone(), h).unwrap();
        let dd = d_squared(&bad.expand());
        assert!(dd.contains_key(&(3, 0)), "seed {seed}");
        assert_eq!(verify_special(&bad).first_failure, Some(3));
        flipped += 1;
    }
    assert!(flipped >= 5, "only {flipped} non-commuting instances");
}

#[test]
fn zero_maps_give_zero_total_differential() {
    let r = LRing::new(CoeffRing::Integers, 0);
    let c = FreeComplex::concentrated(r, 0, 2);
    let zero = GradedMap::zero(r, 0);
    let cube = trivial_cube(&c, vec![zero.clone(), zero]).unwrap();
    let t = cube.totalise().unwrap();
    assert!(t.complex.d().is_zero());
    assert_eq!(t.complex.ranks(), &[(0, 2), (1, 4), (2, 2)].into_iter().collect());
}

#[test]
fn single_complex_diagram() {
    let r = LRing::new(CoeffRing::Integers, 0);
    let c = FreeComplex::two_term(0, Matrix::from_ints(r, &[vec![3]])).unwrap();
    let f = NDiagram::new(0, vec![c.clone()], BTreeMap::new()).unwrap();
    assert!(d_squared(&f).is_empty());
    assert_eq!(totalise(&f).unwrap().complex, c);
}

#[test]
fn diagram_degree_mismatch_is_rejected() {
    let r = LRing::new(CoeffRing::Integers, 0);
    let c = FreeComplex::concentrated(r, 0, 1);
    let maps = [((1, 0), GradedMap::zero(r, 1))].into_iter().collect();
    let e = NDiagram::new(1, vec![c.clone(), c], maps).unwrap_err();
    assert!(matches!(e, Error::Structural(_)));
}

#[test]
fn trivial_cubes() {
    let l = LRing::new(CoeffRing::Integers, 2);
    let c = FreeComplex::concentrated(l, 0, 1);
    let fx = GradedMap::from_blocks(l, 0, [(0, Matrix::scalar(l, 1, &l.var(0)))]);
    let fy = GradedMap::from_blocks(l, 0, [(0, Matrix::scalar(l, 1, &l.var(1)))]);
    let cube = trivial_cube(&c, vec![fx.clone(), fy]).unwrap();
    assert!(verify_special(&cube).is_cube());
    assert!(is_cube(&cube.expand()));
    let one = trivial_cube(&c, vec![fx]).unwrap();
    let t = one.totalise().unwrap();
    assert_eq!(t.complex.differential(0).get(0, 0), l.var(0));

    let id = identity_map(&c);
    assert!(verify_special(&trivial_cube(&c, vec![id.clone(), id.clone(), id]).unwrap()).is_cube());

    let r = LRing::new(CoeffRing::Integers, 0);
    let c2 = FreeComplex::concentrated(r, 0, 2);
    let a = GradedMap::from_blocks(r, 0, [(0, Matrix::from_ints(r, &[vec![0, 1], vec![0, 0]]))]);
    let b = GradedMap::from_blocks(r, 0, [(0, Matrix::from_ints(r, &[vec![0, 0], vec![1, 0]]))]);
    let e = trivial_cube(&c2, vec![a.clone(), b.clone()]).unwrap_err();
    assert!(matches!(e, Error::Contract(_)));
    assert!(e.to_string().contains("f_1 and f_2"));
    let raw = SpecialCube::new(c2, vec![a, b], BTreeMap::new()).unwrap();
    assert_eq!(verify_special(&raw).first_failure, Some(3));
    assert!(!is_cube(&raw.expand()));
}

#[test]
fn missing_homotopies_default_to_zero() {
    let cube = zmod5(3, 9);
    let mut h = cube.h.clone();
    h.remove(&7);
    let partial = SpecialCube::new(cube.complex.clone(), cube.f.clone(), h).unwrap();
    assert!(partial.map_for(7).is_zero());
    assert_eq!(partial.map_for(7).degree, -2);
    let diagram = partial.expand();
    assert!(diagram.h(7, 0).is_zero());
    assert_eq!(diagram.complexes.len(), 8);
}

#[test]
fn derived_from_identity_is_trivial() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::IntegersMod(5), n));
        let id = identity_map(&inst.d);
        let zero = GradedMap::zero(inst.d.ring(), -1);
        let input = DerivedInput {
            c: &inst.d,
            d: &inst.d,
            alpha: &id,
            beta: &id,
            g: &zero,
            h: inst.h.iter().map(|x| x as &dyn novtor::homalg::LinearOp).collect(),
        };
        let derived = derive_cube(&input, 0).unwrap();
        assert_eq!(derived, trivial_cube(&inst.d, inst.h.clone()).unwrap());
    }
}

#[test]
fn derived_cube_of_x_minus_one() {
    for coeff in [CoeffRing::Integers, CoeffRing::Rationals, CoeffRing::IntegersMod(7)] {
        let w = Witness::one_variable(coeff);
        let hs: Vec<Op> = vec![w.h(0)];
        let check = w.input(&hs).check(3).unwrap();
        assert!(!check.exact && check.window == 3 && check.vectors > 0);
        let cube = derive_cube(&w.input(&hs), 3).unwrap();
        assert!(verify_special(&cube).is_cube());
        // β x α on C = R[-1] is evaluation of x at 1
        let f = cube.f[0].block(1).unwrap();
        assert_eq!(f.get(0, 0), LRing::new(coeff, 0).one());
    }
}

#[test]
fn broken_homotopy_identity_is_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::Integers, 1));
    let mut bad = inst.clone();
    for l in bad.d.degrees() {
        if bad.d.rank(l - 1) > 0 {
            let mut m = bad.g.block_or_zero(l, bad.d.rank(l - 1), bad.d.rank(l));
            m.add_at(0, 0, &bad.d.ring().one());
            bad.g.set_block(l, m);
            break;
        }
    }
    let err = derive_cube(&bad.input(), 0).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
}

#[test]
fn derived_cubes_up_to_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for coeff in [CoeffRing::Integers, CoeffRing::IntegersMod(5)] {
        for n in 1..=4 {
            let reps = if n == 4 { 3 } else { 8 };
            for _ in 0..reps {
                let inst = random_instance(&mut rng, &GenParams::new(coeff, n));
                let cube = derive_cube(&inst.input(), 0).unwrap();
                let rep = verify_special(&cube);
                assert!(rep.is_cube(), "{coeff} n={n}: {:?}", rep.first_failure);
                assert!(d_squared(&expand_special(&cube)).is_empty());
                assert!(cube.totalise().unwrap().complex.check_complex());
            }
        }
    }
}

fn perturbed(seed: u64) -> SpecialCube {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let coeff = if rng.gen_bool(0.5) { CoeffRing::Integers } else { CoeffRing::IntegersMod(5) };
    let inst = random_instance(&mut rng, &GenParams::new(coeff, n));
    let cube = derive_cube(&inst.input(), 0).unwrap();
    if rng.gen_bool(0.4) {
        return cube;
    }
    let c = &cube.complex;
    let s: Subset = rng.gen_range(1..1u32 << n);
    let mut f = cube.f.clone();
    let mut h = cube.h.clone();
    let deg = 1 - card(s) as i64;
    let noise = random_graded(&mut rng, c, c, deg, 0.3);
    match card(s) {
        1 => f[elements(s)[0] - 1] = f[elements(s)[0] - 1].add(&noise),
        _ => {
            let old = cube.map_for(s);
            h.insert(s, old.add(&noise));
        }
    }
    SpecialCube::new(c.clone(), f, h).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verify_special_agrees_with_d_squared(seed in any::<u64>()) {
        let cube = perturbed(seed);
        prop_assert_eq!(verify_special(&cube).is_cube(), d_squared(&cube.expand()).is_empty());
    }

    #[test]
    fn filtration_is_compatible(seed in any::<u64>()) {
        let cube = perturbed(seed);
        let f = cube.expand();
        prop_assume!(is_cube(&f));
        let full = totalise(&f).unwrap();
        let n = cube.n as i64;
        let f0 = filtration(&f, 0).unwrap();
        prop_assert_eq!(&f0.sub.complex, &full.complex);
        prop_assert!(filtration(&f, n + 1).unwrap().sub.complex.is_zero());
        prop_assert_eq!(filtration(&f, n + 7).unwrap().k, cube.n + 1);
        prop_assert_eq!(filtration(&f, -3).unwrap().k, 0);
        let top = filtration(&f, n).unwrap();
        prop_assert_eq!(&top.sub.complex, &cube.complex.shift(-n));
        for k in 0..=n + 1 {
            let fk = filtration(&f, k).unwrap();
            prop_assert!(fk.sub.complex.check_complex());
            prop_assert_eq!(&fk.quotient.complex, &fk.expected_quotient);
            // Tot_k carries the restriction of D(F)
            if let Some((lo, hi)) = fk.sub.complex.bounds() {
                for l in lo..=hi {
                    for &b in &fk.sub.layout.members {
                        for &a in &fk.sub.layout.members {
                            prop_assert_eq!(fk.sub.block(l, b, a), full.block(l, b, a));
                        }
                    }
                }
            }
            // and is closed under D(F): nothing leaves to smaller subsets
            for l in full.complex.degrees() {
                for &a in &fk.sub.layout.members {
                    for b in all_subsets(cube.n).filter(|&b| (card(b) as i64) < k) {
                        prop_assert!(full.block(l, b, a).is_zero());
                    }
                }
            }
        }
    }
}
