use std::collections::BTreeMap;

use novtor::cubes::{all_subsets, card, derive_cube, subsets_of, total_incidence, trivial_cube, verify_special, OpComplex};
use novtor::gen::{random_instance, unit_points, GenParams, Instance};
use novtor::homalg::{cohomology, identity_map, is_acyclic, FreeComplex, GradedMap, Matrix, Op};
use novtor::rings::{int, CoeffRing, LRing};
use novtor::tori::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ops(i: &Instance) -> (OpComplex, OpComplex, Op, Op, Op, Vec<Op>) {
    (
        OpComplex::from(&i.c),
        OpComplex::from(&i.d),
        Op::Mat(i.alpha.clone()),
        Op::Mat(i.beta.clone()),
        Op::Mat(i.g.clone()),
        i.h.iter().cloned().map(Op::Mat).collect(),
    )
}

#[test]
fn pleasant_identity_up_to_six() {
    for b in all_subsets(6) {
        for a in subsets_of(b) {
            for z in 1..=6usize {
                let zb = 1u32 << (z - 1);
                if b & zb == 0 || a & zb != 0 {
                    continue;
                }
                let s = if (card(b) - card(a)) % 2 == 0 { 1 } else { -1 };
                let lhs = total_incidence(b, b & !zb) * total_incidence(b & !zb, a)
                    + s * total_incidence(b, a | zb) * total_incidence(a | zb, a);
                assert_eq!(lhs, 0, "B={b} A={a} z={z}");
            }
        }
    }
}

#[test]
fn torus_of_random_derived_cubes_is_special() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=2 {
        for _ in 0..10 {
            let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::IntegersMod(5), n));
            let cube = derive_cube(&inst.input(), 0).unwrap();
            let t = mapping_torus(&cube).unwrap();
            assert!(verify_special(&t.extended).is_cube());
            assert!(t.complex().check_complex());
        }
    }
}

#[test]
fn torus_of_trivial_cube_has_twisted_maps() {
    let r = LRing::new(CoeffRing::Integers, 0);
    let c = FreeComplex::two_term(0, Matrix::from_ints(r, &[vec![2]])).unwrap();
    let three = identity_map(&c).scale_int(3);
    let t = mapping_torus(&trivial_cube(&c, vec![three]).unwrap()).unwrap();
    let l = LRing::new(CoeffRing::Integers, 1);
    let f = &t.extended.f[0];
    assert_eq!(f.block(0).unwrap(), &Matrix::from_polys(l, 1, 1, vec![vec![l.parse("3 - x").unwrap()]]));
}

#[test]
fn mather_identities_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (coeff, n) in [(CoeffRing::IntegersMod(5), 1), (CoeffRing::IntegersMod(5), 2), (CoeffRing::Integers, 2), (CoeffRing::IntegersMod(5), 3)] {
        for _ in 0..4 {
            let inst = random_instance(&mut rng, &GenParams::new(coeff, n));
            let (c, d, a, b, g, h) = ops(&inst);
            let ab = Op::compose(vec![a.clone(), b.clone()]);
            let m = mather_m(&d, &ab, &g, &h, 0).unwrap();
            assert!(m.check.exact);
            let l = mather_l(&c, &d, &a, &b, &g, &h, 0).unwrap();
            mather_k(&d, &ab, &g, &h, 0).unwrap();
            mather_j(&c, &d, &a, &b, &g, &h, 0).unwrap();
            if n <= 2 {
                assert!(is_acyclic(&m.cone().unwrap()).unwrap());
                assert!(is_acyclic(&l.cone().unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn mather_m_with_zero_homotopy_is_identity() {
    let r = LRing::new(CoeffRing::Integers, 0);
    let d = FreeComplex::two_term(0, Matrix::from_ints(r, &[vec![3]])).unwrap();
    let id = Op::Mat(identity_map(&d));
    let h = vec![Op::Mat(identity_map(&d).scale_int(2))];
    let m = mather_m(&OpComplex::from(&d), &id, &Op::Mat(GradedMap::zero(r, -1)), &h, 0).unwrap();
    let g = m.graded().unwrap();
    let tot = m.source_complex().unwrap();
    assert_eq!(g, identity_map(&tot));
}

#[test]
fn mather_on_one_variable_witness() {
    let w = Witness::one_variable(CoeffRing::Integers);
    let h = vec![w.h(0)];
    let (c, d) = (OpComplex::from(&w.c), OpComplex::from(&w.d));
    let l = mather_l(&c, &d, &w.alpha, &w.beta, &w.g, &h, 3).unwrap();
    assert!(!l.check.exact);
    let ab = Op::compose(vec![w.alpha.clone(), w.beta.clone()]);
    mather_m(&d, &ab, &w.g, &h, 3).unwrap();
    mather_k(&d, &ab, &w.g, &h, 2).unwrap();
    mather_j(&c, &d, &w.alpha, &w.beta, &w.g, &h, 2).unwrap();
}

#[test]
fn witness_hypotheses() {
    for w in [Witness::one_variable(CoeffRing::Integers), Witness::two_variable(CoeffRing::Integers)] {
        let chk = w.check(3).unwrap();
        assert!(!chk.exact);
    }
}

#[test]
fn domination_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let w = Witness::one_variable(CoeffRing::Integers);
    let dw = domination_witness(&w, &[0], 2).unwrap();
    let l = LRing::new(CoeffRing::Integers, 1);
    assert_eq!(dw.torus.complex().ranks(), &[(1, 1), (2, 1)].into_iter().collect::<BTreeMap<_, _>>());
    assert_eq!(dw.torus.complex().differential(1), Matrix::from_polys(l, 1, 1, vec![vec![l.parse("1 - x").unwrap()]]));
    let pts = unit_points(&mut rng, CoeffRing::Integers, 1, 20, &[]);
    assert_eq!(compare_specialised(&w, &dw, &pts).unwrap(), None);
    assert_eq!(compare_specialised(&w, &dw, &[vec![int(1)]]).unwrap(), None);

    let empty = domination_witness(&w, &[], 2).unwrap();
    assert_eq!(empty.torus.complex(), &w.c);

    let w2 = Witness::two_variable(CoeffRing::Integers);
    let dw2 = domination_witness(&w2, &[0, 1], 1).unwrap();
    let pts = unit_points(&mut rng, CoeffRing::Integers, 2, 20, &[]);
    assert_eq!(compare_specialised(&w2, &dw2, &pts).unwrap(), None);
    assert_eq!(compare_specialised(&w2, &dw2, &[vec![int(1), int(1)]]).unwrap(), None);
}

#[test]
fn koszul_slices() {
    for n in 1..=3usize {
        let k = koszul(CoeffRing::Integers, n).unwrap();
        assert!(k.complex.check_complex());
        let ranks: Vec<usize> = (0..=n as i64).map(|l| k.complex.rank(l)).collect();
        let binom: Vec<usize> = (0..=n).map(|j| (0..j).fold(1, |acc, i| acc * (n - i) / (i + 1))).collect();
        assert_eq!(ranks, binom);
        let mut exps = vec![vec![]];
        for _ in 0..n {
            exps = exps.into_iter().flat_map(|e: Vec<i64>| (-1..=2).map(move |a| [e.clone(), vec![a]].concat())).collect();
        }
        for m in exps {
            let h = cohomology(&koszul_slice(&k, &m).unwrap()).unwrap();
            for (l, x) in &h.degrees {
                assert!(x.torsion.is_empty());
                let want = if *l == n as i64 && m.iter().all(|&a| a == 0) { 1 } else { 0 };
                assert_eq!(x.free_rank, want, "n={n} m={m:?} l={l}");
            }
        }
    }
}

#[test]
fn psi_is_a_quasi_isomorphism_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 1..=2usize {
        let l = LRing::new(CoeffRing::Integers, n);
        let d = FreeComplex::concentrated(l, 0, 1);
        let psi = build_psi(&d).unwrap();
        assert!(psi.is_cochain_map().unwrap());
        let pts = unit_points(&mut rng, CoeffRing::Integers, n, 20, &[]);
        assert!(psi.spot_check(&pts, 1).unwrap().passed());
    }
    let w = Witness::one_variable(CoeffRing::Integers);
    let psi = build_psi(&w.d).unwrap();
    assert!(psi.is_cochain_map().unwrap());
    let pts = unit_points(&mut rng, CoeffRing::Integers, 1, 20, &[]);
    assert!(psi.spot_check(&pts, 2).unwrap().passed());
}

#[test]
fn wrong_homotopy_breaks_mather_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut failures = 0;
    for _ in 0..10 {
        let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::IntegersMod(5), 1));
        let (_, d, a, b, _, h) = ops(&inst);
        if inst.g.is_zero() {
            continue;
        }
        let ab = Op::compose(vec![a, b]);
        let bad = Op::Mat(inst.g.scale_int(2));
        if let Err(e) = mather_m(&d, &ab, &bad, &h, 0) {
            assert!(matches!(e, novtor::Error::Internal(_)));
            failures += 1;
        }
    }
    assert!(failures > 0);
}

#[test]
fn windowed_check_detects_missing_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let l = LRing::new(CoeffRing::Integers, 1);
    let mut psi = build_psi(&FreeComplex::concentrated(l, 0, 1)).unwrap();
    psi.target = FreeComplex::zero(l);
    let pts = unit_points(&mut rng, CoeffRing::Integers, 1, 3, &[]);
    assert!(!psi.spot_check(&pts, 1).unwrap().passed());
}
