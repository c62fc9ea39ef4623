use novtor::findom::*;
use novtor::gen::random_contractible;
use novtor::homalg::{FreeComplex, GradedMap, Matrix, Op};
use novtor::io;
use novtor::rings::{CoeffRing, LRing, Poly};
use novtor::tori::{koszul, Witness};
use novtor::toric::{Cone, Fan};
use novtor::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn one_var(coeff: CoeffRing, f: &str) -> FreeComplex {
    let l = LRing::new(coeff, 1);
    FreeComplex::two_term(0, Matrix::from_polys(l, 1, 1, vec![vec![l.parse(f).unwrap()]])).unwrap()
}

/// `Tot Triv(L; f_1, ..., f_n)` over `L = coeff[x_1^±, ..., x_n^±]`.
fn koszul_of(coeff: CoeffRing, fs: &[&str]) -> FreeComplex {
    let l = LRing::new(coeff, fs.len());
    let k = koszul(coeff, fs.len()).unwrap().complex;
    let polys: Vec<Poly> = fs.iter().map(|f| l.parse(f).unwrap()).collect();
    // substitute x_i ↦ f_i in the entries
    k.map_entries(l, |p| {
        let mut out = l.zero();
        for (e, c) in p.terms() {
            let mut t = Poly::constant(l, c.clone());
            for (i, &a) in e.iter().enumerate() {
                for _ in 0..a {
                    t = &t * &polys[i];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    })
    .unwrap()
}

#[test]
fn ranicki_examples() {
    let r = ranicki_test(&one_var(CoeffRing::Integers, "x - 1"), DEFAULT_ORDER).unwrap();
    assert_eq!(r.conclusion, Conclusion::FinitelyDominatedCertified);
    assert_eq!(r.cones.len(), 2);

    let r = ranicki_test(&one_var(CoeffRing::Integers, "1 - 2*x"), DEFAULT_ORDER).unwrap();
    assert_eq!(r.conclusion, Conclusion::NotFinitelyDominatedCertified);
    // the failing ring is the completion in x^{-1}, where -2x would have to lead
    let bad: Vec<_> = r.cones.iter().filter(|c| c.report.verdict.is_nonacyclic()).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].dual.gens, vec![vec![-1]]);

    let r = ranicki_test(&one_var(CoeffRing::Rationals, "1 - 2*x"), DEFAULT_ORDER).unwrap();
    assert_eq!(r.conclusion, Conclusion::FinitelyDominatedCertified);

    let two = koszul_of(CoeffRing::Integers, &["x - 1", "y - 1"]);
    assert!(matches!(ranicki_test(&two, 8), Err(Error::Structural(_))));
}

#[test]
fn toric_examples() {
    let xy = koszul_of(CoeffRing::Integers, &["x - 1", "y - 1"]);
    let r = toric_findom_test(&DominationInput::new(xy, Fan::standard(2))).unwrap();
    assert_eq!(r.cones.len(), 8);
    assert!(r.cones.iter().all(|c| c.report.verdict.is_acyclic()));
    assert_eq!(r.conclusion, Conclusion::FinitelyDominatedCertified);

    let bad = koszul_of(CoeffRing::Integers, &["1 - 2*x", "y - 1"]);
    let r = toric_findom_test(&DominationInput::new(bad.clone(), Fan::standard(2))).unwrap();
    assert_eq!(r.conclusion, Conclusion::NotFinitelyDominatedCertified);
    assert!(r.cones.iter().any(|c| c.report.verdict.is_nonacyclic() && c.dual.dim() == 2));

    // over Q the same complex is finitely dominated
    let q = bad.change_coeff(CoeffRing::Rationals).unwrap();
    let r = toric_findom_test(&DominationInput::new(q, Fan::standard(2))).unwrap();
    assert_eq!(r.conclusion, Conclusion::FinitelyDominatedCertified);

    let zero = FreeComplex::zero(LRing::new(CoeffRing::Integers, 2));
    let r = toric_findom_test(&DominationInput::new(zero, Fan::standard(2))).unwrap();
    assert_eq!(r.conclusion, Conclusion::FinitelyDominatedCertified);
}

#[test]
fn fan_preconditions() {
    let d = one_var(CoeffRing::Integers, "x - 1");
    let half = Fan::new(1, vec![vec![], vec![vec![1]]]).unwrap();
    let e = toric_findom_test(&DominationInput::new(d.clone(), half)).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)));
    assert!(e.to_string().contains("\"complete\":false"));
    let e = toric_findom_test(&DominationInput::new(d, Fan::standard(2))).unwrap_err();
    assert!(matches!(e, Error::Structural(_)));
}

#[test]
fn ranicki_agrees_with_line_fan() {
    let cases = [
        (CoeffRing::Integers, "x - 1"),
        (CoeffRing::Integers, "1 - 2*x"),
        (CoeffRing::Integers, "2 - x"),
        (CoeffRing::Integers, "3 + x^2"),
        (CoeffRing::Integers, "1 - x + x^3"),
        (CoeffRing::Integers, "2"),
        (CoeffRing::Rationals, "1 - 2*x"),
        (CoeffRing::Rationals, "x^-1 - 3*x"),
        (CoeffRing::IntegersMod(5), "1 + 2*x"),
        (CoeffRing::IntegersMod(5), "0"),
    ];
    for (coeff, f) in cases {
        let d = one_var(coeff, f);
        let a = ranicki_test(&d, DEFAULT_ORDER).unwrap();
        let b = toric_findom_test(&DominationInput::new(d, line_fan())).unwrap();
        assert_eq!(a, b, "{coeff} {f}");
    }
    // L/(2 - x) = Z[1/2] is not finitely generated
    let r = ranicki_test(&one_var(CoeffRing::Integers, "2 - x"), DEFAULT_ORDER).unwrap();
    assert_eq!(r.conclusion, Conclusion::NotFinitelyDominatedCertified);
    let r = ranicki_test(&one_var(CoeffRing::Integers, "1 - x + x^3"), DEFAULT_ORDER).unwrap();
    assert_eq!(r.conclusion, Conclusion::FinitelyDominatedCertified);
    let r = ranicki_test(&one_var(CoeffRing::IntegersMod(5), "0"), DEFAULT_ORDER).unwrap();
    assert_eq!(r.conclusion, Conclusion::NotFinitelyDominatedCertified);
}

/// `D = (L --1--> L)`, `C = 0`, `α = β = 0`, `G = -1`.
fn contractible_witness() -> Witness {
    let l = LRing::new(CoeffRing::Integers, 1);
    let d = FreeComplex::two_term(0, Matrix::identity(l, 1)).unwrap();
    let g = GradedMap::from_blocks(l, -1, [(1, Matrix::identity(l, 1).neg())]);
    Witness {
        name: "contractible".into(),
        c: FreeComplex::zero(LRing::new(CoeffRing::Integers, 0)),
        d,
        alpha: Op::zero(0),
        beta: Op::zero(0),
        g: Op::Mat(g),
    }
}

#[test]
fn witness_consequences() {
    let w = Witness::one_variable(CoeffRing::Integers);
    let input = DominationInput { d: w.d.clone(), witness: Some(w), fan: line_fan(), order: DEFAULT_ORDER };
    let rep = verify_findom_consequences(&input, &[vec![0], vec![]]).unwrap();
    assert!(rep.passed);
    assert!(rep.mismatch.is_none());
    assert!(rep.first_orthant.verdict.is_acyclic());
    assert_eq!(rep.fan_cones.len(), 2);
    assert_eq!(rep.subspaces.len(), 2);
    // over the zero subspace the witness complex is C itself
    assert_eq!(rep.subspaces[1].ranks, [(1, 1)].into_iter().collect());
    assert_eq!(rep.subspaces[0].ranks, [(1, 1), (2, 1)].into_iter().collect());

    let w2 = Witness::two_variable(CoeffRing::Integers);
    let input = DominationInput { d: w2.d.clone(), witness: Some(w2), fan: Fan::standard(2), order: DEFAULT_ORDER };
    let rep = verify_findom_consequences(&input, &[vec![0], vec![1]]).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.fan_cones.len(), 8);
    assert!(rep.fan_cones.iter().all(|c| c.report.verdict.is_acyclic()));

    let w0 = contractible_witness();
    let input = DominationInput { d: w0.d.clone(), witness: Some(w0), fan: line_fan(), order: DEFAULT_ORDER };
    let rep = verify_findom_consequences(&input, &[vec![0]]).unwrap();
    assert!(rep.passed);
    assert!(rep.subspaces[0].ranks.values().all(|&r| r == 0));
}

#[test]
fn witness_preconditions() {
    let w = Witness::one_variable(CoeffRing::Integers);
    let other = one_var(CoeffRing::Integers, "x + 1");
    let input = DominationInput { d: other.clone(), witness: Some(w.clone()), fan: line_fan(), order: 8 };
    assert!(matches!(verify_findom_consequences(&input, &[]), Err(Error::Precondition(_))));
    let input = DominationInput::new(other, line_fan());
    assert!(matches!(verify_findom_consequences(&input, &[]), Err(Error::Precondition(_))));

    // a witness with a wrong homotopy is rejected
    let mut bad = w;
    bad.g = Op::zero(-1);
    let input = DominationInput { d: bad.d.clone(), witness: Some(bad), fan: line_fan(), order: 8 };
    assert!(matches!(verify_findom_consequences(&input, &[]), Err(Error::Contract(_))));
}

#[test]
fn witness_and_fan_test_never_disagree() {
    for coeff in [CoeffRing::Integers, CoeffRing::Rationals, CoeffRing::IntegersMod(3)] {
        for w in [Witness::one_variable(coeff), Witness::two_variable(coeff)] {
            let n = w.nvars();
            let fan = if n == 1 { line_fan() } else { Fan::standard(2) };
            let input = DominationInput { d: w.d.clone(), witness: Some(w), fan, order: DEFAULT_ORDER };
            let cons = verify_findom_consequences(&input, &[]).unwrap();
            let rep = toric_findom_test(&input).unwrap();
            assert!(cons.passed);
            assert_ne!(rep.conclusion, Conclusion::NotFinitelyDominatedCertified);
        }
    }
}

#[test]
fn contractible_complexes_are_dominated() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let c = random_contractible(&mut rng, CoeffRing::Integers, 3);
        let l = LRing::new(CoeffRing::Integers, 2);
        let d = c.extend_scalars(l).unwrap();
        let r = toric_findom_test(&DominationInput::new(d, Fan::standard(2))).unwrap();
        assert_eq!(r.conclusion, Conclusion::FinitelyDominatedCertified);
    }
}

#[test]
fn report_round_trip_and_determinism() {
    let d = koszul_of(CoeffRing::Integers, &["1 - 2*x", "y - 1"]);
    let input = DominationInput::new(d, Fan::standard(2));
    let a = toric_findom_test(&input).unwrap();
    let b = toric_findom_test(&input).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(FindomReport::from_json(&a.to_json()).unwrap(), a);
    assert!(FindomReport::from_json("{\"nvars\": 1}").is_err());
    assert_eq!(Conclusion::Inconclusive.exit_code(), 2);
    let s = summary(&a);
    assert!(s.ends_with("NotFinitelyDominatedCertified\n"));
}

#[test]
fn io_round_trips() {
    let d = koszul_of(CoeffRing::IntegersMod(7), &["x - 1", "3*y^-1 + x"]);
    let v = io::complex_to_json(&d);
    assert_eq!(io::complex_from_json(&v).unwrap(), d);
    let text = io::to_string(&v);
    assert_eq!(io::to_string(&io::parse(&text).unwrap()), text);

    let fan = Fan::standard(3);
    assert_eq!(io::fan_from_json(&io::fan_to_json(&fan)).unwrap(), fan);
    let cone = Cone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
    let back: Cone = serde_json::from_value(serde_json::to_value(&cone).unwrap()).unwrap();
    assert_eq!(back, cone);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inst = novtor::gen::random_instance(&mut rng, &novtor::gen::GenParams::new(CoeffRing::Integers, 3));
    let cube = novtor::cubes::derive_cube(&inst.input(), 0).unwrap();
    let v = io::cube_to_json(&cube);
    assert_eq!(io::cube_from_json(&v).unwrap(), cube);
    assert!(v["H"].as_object().unwrap().keys().all(|k| k.parse::<u32>().is_ok()));

    let bad = io::parse("{\"ring\": \"ZZ/6\", \"variables\": 1, \"degrees\": {\"0\": 1}, \"differential\": {\"0\": [[0, 0, \"x\"]]}}").unwrap();
    assert!(io::complex_from_json(&bad).is_err());
    assert!(matches!(io::parse("{"), Err(Error::Parse(_))));
}
