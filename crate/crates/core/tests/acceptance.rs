use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use novtor::cubes::*;
use novtor::findom::*;
use novtor::gen::{random_commuting_maps, random_contractible, random_instance, small_scalar, unit_points, GenParams, Instance};
use novtor::homalg::{cohomology, is_acyclic, FreeComplex, Matrix, Op, SVec};
use novtor::multicomplex::*;
use novtor::rings::{CoeffRing, LRing, Poly};
use novtor::tori::*;
use novtor::toric::{Fan, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn within(t: Instant, limit: Duration) -> Outcome {
    let e = t.elapsed();
    if e > limit {
        return Err(format!("took {:.2?}, limit {:.0?}", e, limit));
    }
    Ok(format!("{e:.2?}"))
}

fn sign_identities() -> Outcome {
    let t = Instant::now();
    let mut checks = 0usize;
    for b in all_subsets(6) {
        let nb = card(b);
        ensure!(total_incidence(b, 0) == if nb % 4 < 2 { 1 } else { -1 }, "[B:∅] closed form at B={b}");
        for z in elements(b) {
            let below = elements(b).iter().filter(|&&x| x < z).count();
            ensure!(total_incidence(b, b & !singleton(z)) == sign(below), "face closed form at B={b}, z={z}");
        }
        for a in subsets_of(b) {
            ensure!(incidence_by_pairs(b, a) == total_incidence(b, a), "pair count at B={b} A={a}");
            checks += 1;
            for z in 1..=6usize {
                let sz = singleton(z);
                if b & sz != 0 {
                    // (B, A) with z ∈ B∖A: the extended pleasant identity
                    if a & sz == 0 {
                        let s = sign(card(b) - card(a));
                        let lhs = total_incidence(b, b & !sz) * total_incidence(b & !sz, a)
                            + s * total_incidence(b, a | sz) * total_incidence(a | sz, a);
                        ensure!(lhs == 0, "pleasant identity at B={b} A={a} z={z}");
                        checks += 1;
                    }
                    continue;
                }
                let eps = total_incidence(b | sz, a | sz) * total_incidence(b, a);
                for s in subsets_of(b).into_iter().filter(|&s| is_subset(a, s)) {
                    let up = total_incidence(b | sz, s | sz) * total_incidence(s | sz, a | sz);
                    ensure!(up == eps * total_incidence(b, s) * total_incidence(s, a), "independence at B={b} S={s} A={a} z={z}");
                    checks += 1;
                }
            }
        }
    }
    for a in all_subsets(6) {
        for x in 1..=6 {
            for y in 1..=6 {
                let (sx, sy) = (singleton(x), singleton(y));
                if x == y || a & (sx | sy) != 0 {
                    continue;
                }
                let top = a | sx | sy;
                let lhs = total_incidence(top, a | sx) * total_incidence(a | sx, a);
                ensure!(lhs == -total_incidence(top, a | sy) * total_incidence(a | sy, a), "simplicial identity at A={a}");
                checks += 1;
            }
        }
    }
    let time = within(t, Duration::from_secs(5))?;
    Ok(format!("{checks} identities, {time}"))
}

fn derived(coeff: CoeffRing, n: usize, seed: u64) -> SpecialCube {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    derive_cube(&random_instance(&mut rng, &GenParams::new(coeff, n)).input(), 0).expect("derived cube")
}

fn blocks_match(cube: &SpecialCube, expected: &[(Subset, Subset, i64, Subset)]) -> Result<usize, String> {
    let t = cube.totalise().map_err(|e| e.to_string())?;
    let c = &cube.complex;
    let (lo, hi) = t.complex.bounds().ok_or("empty totalisation")?;
    let mut nonzero = 0;
    for l in lo - 1..=hi + 1 {
        for b in all_subsets(cube.n) {
            for a in all_subsets(cube.n) {
                let (rows, cols) = (c.rank(l + 1 - card(b) as i64), c.rank(l - card(a) as i64));
                let want = match expected.iter().find(|e| e.0 == b && e.1 == a) {
                    None => Matrix::zeros(c.ring(), rows, cols),
                    Some(&(_, _, s, m)) => cube.map_for(m).block_or_zero(l - card(a) as i64, rows, cols).scale_int(s),
                };
                let got = t.block(l, b, a);
                ensure!(got == want, "block ({b},{a}) in degree {l}");
                nonzero += usize::from(!got.is_zero());
            }
        }
    }
    Ok(nonzero)
}

fn printed_matrices() -> Outcome {
    let mut blocks = 0;
    let mut corners = 0;
    for seed in 0..10 {
        blocks += blocks_match(&derived(CoeffRing::IntegersMod(5), 1, seed), &[(0, 0, 1, 0), (1, 0, 1, 1), (1, 1, -1, 0)])?;
        let sq = derived(CoeffRing::Integers, 2, seed);
        corners += usize::from(!sq.map_for(3).is_zero());
        blocks += blocks_match(
            &sq,
            &[(0, 0, 1, 0), (1, 0, 1, 1), (1, 1, -1, 0), (2, 0, 1, 2), (2, 2, -1, 0), (3, 0, -1, 3), (3, 1, -1, 2), (3, 2, 1, 1), (3, 3, 1, 0)],
        )?;
    }
    ensure!(corners > 0, "no square with a nonzero homotopy was generated");
    Ok(format!("10 cones and 10 squares ({corners} with H ≠ 0), {blocks} nonzero blocks equal"))
}

fn derived_cube_theorem() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0BE);
    let mut count = 0;
    for n in 1..=4 {
        for (coeff, reps) in [(CoeffRing::IntegersMod(5), 200), (CoeffRing::Integers, 50)] {
            for i in 0..reps {
                let inst = random_instance(&mut rng, &GenParams::new(coeff, n));
                let cube = derive_cube(&inst.input(), 0).map_err(|e| format!("{coeff} n={n} #{i}: {e}"))?;
                ensure!(d_squared(&expand_special(&cube)).is_empty(), "D∘D ≠ 0 for {coeff} n={n} #{i}");
                count += 1;
            }
        }
    }
    let time = within(t, Duration::from_secs(60))?;
    Ok(format!("{count} cubes with D∘D = 0, {time}"))
}

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

fn mather_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3A7E);
    for i in 0..100 {
        let n = 1 + i % 3;
        let coeff = if i % 2 == 0 { CoeffRing::IntegersMod(5) } else { CoeffRing::Integers };
        let inst = random_instance(&mut rng, &GenParams::new(coeff, n));
        let (c, d, a, b, g, h) = ops(&inst);
        let ab = Op::compose(vec![a.clone(), b.clone()]);
        let tag = |m: &str, e: novtor::Error| format!("{m} on instance {i} ({coeff}, n={n}): {e}");
        for (name, r) in [
            ("M", mather_m(&d, &ab, &g, &h, 0)),
            ("L", mather_l(&c, &d, &a, &b, &g, &h, 0)),
            ("K", mather_k(&d, &ab, &g, &h, 0)),
            ("J", mather_j(&c, &d, &a, &b, &g, &h, 0)),
        ] {
            let m = r.map_err(|e| tag(name, e))?;
            ensure!(m.check.exact, "{name} check not exact on instance {i}");
        }
    }
    for i in 0..50 {
        let n = 1 + i % 2;
        let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::Integers, n));
        let (c, d, a, b, g, h) = ops(&inst);
        let ab = Op::compose(vec![a.clone(), b.clone()]);
        let m = mather_m(&d, &ab, &g, &h, 0).map_err(|e| e.to_string())?;
        let l = mather_l(&c, &d, &a, &b, &g, &h, 0).map_err(|e| e.to_string())?;
        for (name, x) in [("M", m), ("L", l)] {
            let cone = x.cone().map_err(|e| e.to_string())?;
            ensure!(is_acyclic(&cone).map_err(|e| e.to_string())?, "cone({name}) not acyclic on ZZ instance {i}");
        }
    }
    Ok("M, L, K, J exact on 100 instances; cone(M), cone(L) acyclic over ZZ on 50".into())
}

fn torus_by_tot() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7075);
    let mut blocks = 0;
    for i in 0..20 {
        let n = 1 + i % 2;
        let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::IntegersMod(5), n));
        let cube = derive_cube(&inst.input(), 0).map_err(|e| e.to_string())?;
        blocks += check_torus_by_tot(&cube, 2).map_err(|e| format!("cube {i} (n={n}): {e}"))?;
    }
    Ok(format!("20 cubes on [-2,2]^n, {blocks} blocks equal"))
}

fn koszul_psi() -> Outcome {
    for n in 1..=3usize {
        let k = koszul(CoeffRing::Integers, n).map_err(|e| e.to_string())?;
        let mut exps = vec![vec![]];
        for _ in 0..n {
            exps = exps.into_iter().flat_map(|e: Vec<i64>| (-1..=2).map(move |a| [e.clone(), vec![a]].concat())).collect();
        }
        for m in exps {
            let h = cohomology(&koszul_slice(&k, &m).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            for (l, x) in &h.degrees {
                let want = usize::from(*l == n as i64 && m.iter().all(|&a| a == 0));
                ensure!(x.free_rank == want && x.torsion.is_empty(), "Koszul n={n} slice {m:?} degree {l}");
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x951);
    let mut instances = vec![];
    for n in 1..=2usize {
        instances.push((FreeComplex::concentrated(LRing::new(CoeffRing::Integers, n), 0, 1), 1));
    }
    instances.push((Witness::one_variable(CoeffRing::Integers).d, 2));
    instances.push((Witness::two_variable(CoeffRing::Integers).d, 1));
    let count = instances.len();
    for (d, r) in instances {
        let n = d.ring().nvars;
        let psi = build_psi(&d).map_err(|e| e.to_string())?;
        ensure!(psi.is_cochain_map().map_err(|e| e.to_string())?, "ψ is not a cochain map (n={n})");
        let pts = unit_points(&mut rng, CoeffRing::Integers, n, 20, &[]);
        let sc = psi.spot_check(&pts, r).map_err(|e| e.to_string())?;
        ensure!(sc.passed(), "cone(ψ) not acyclic: {sc:?}");
    }
    Ok(format!("slices for n = 1, 2, 3; ψ on {count} complexes at 20 points each"))
}

fn random_cochain(rng: &mut ChaCha8Rng, e: &MultiComplex, w: &TruncationWindow, degree: i64) -> WindowCochain {
    let mut out = WindowCochain::new();
    for a in w.positions() {
        let mut b = a.clone();
        b.push(degree - a.iter().sum::<i64>());
        let v: SVec = (0..e.rank(&b))
            .filter_map(|i| {
                let s = small_scalar(rng, e.ring.coeff);
                (rng.gen_bool(0.7) && !num_traits::Zero::is_zero(&s)).then(|| (i, Poly::constant(e.ring, s)))
            })
            .collect();
        if !v.is_empty() {
            out.insert(a, v);
        }
    }
    out
}

fn contract_all(rng: &mut ChaCha8Rng, e: &MultiComplex, w: &TruncationWindow) -> Result<usize, String> {
    let degs: Vec<i64> = e.ranks.keys().map(|b| b.iter().sum()).collect();
    let (lo, hi) = (*degs.iter().min().ok_or("empty")?, *degs.iter().max().ok_or("empty")?);
    let mut hits = 0;
    for degree in lo..=hi + 1 {
        let b0 = random_cochain(rng, e, w, degree - 1);
        let c = window_differential(e, w, degree - 1, &b0);
        let b = contract_cocycle(e, w, degree, &c).map_err(|e| e.to_string())?;
        ensure!(window_differential(e, w, degree - 1, &b) == c, "d(b) ≠ c in degree {degree}");
        hits += usize::from(!c.is_empty());
    }
    Ok(hits)
}

fn constructive_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0C0);
    let mut hits = 0;
    for i in 0..100 {
        let (coeff, n) = match i % 4 {
            0 => (CoeffRing::Integers, 1),
            1 => (CoeffRing::IntegersMod(5), 1),
            2 => (CoeffRing::Integers, 2),
            _ => (CoeffRing::IntegersMod(3), 2),
        };
        let w = TruncationWindow { n, k0: -1, bound: 1 };
        let c = random_contractible(&mut rng, coeff, 3);
        let f = random_commuting_maps(&mut rng, &c, n);
        let cube = trivial_cube(&c, f).map_err(|e| e.to_string())?;
        let top = w.bound - (n as i64 - 1) * w.k0;
        let e = realize_l(&cube, &box_positions(n, w.k0 - 1, top + 1)).map_err(|e| e.to_string())?.multi;
        hits += contract_all(&mut rng, &e, &w).map_err(|e| format!("instance {i}: {e}"))?;
    }
    let wit = Witness::one_variable(CoeffRing::Integers);
    let hs = vec![wit.h(0)];
    let cube = derive_cube(&wit.input(&hs), 2).map_err(|e| e.to_string())?;
    let w = TruncationWindow { n: 1, k0: -2, bound: 3 };
    let e = realize_l(&cube, &box_positions(1, -3, 4)).map_err(|e| e.to_string())?.multi;
    let x = contract_all(&mut rng, &e, &w).map_err(|e| format!("(x-1) cube: {e}"))?;
    ensure!(x > 0, "no nonzero cocycle for the (x-1) cube");
    Ok(format!("100 random multicomplexes ({hits} nonzero cocycles) and the (x-1) cube ({x})"))
}

fn one_var(coeff: CoeffRing, f: &str) -> FreeComplex {
    let l = LRing::new(coeff, 1);
    FreeComplex::two_term(0, Matrix::from_polys(l, 1, 1, vec![vec![l.parse(f).unwrap()]])).unwrap()
}

fn ranicki() -> Outcome {
    let mut times = vec![];
    for (coeff, f, want) in [
        (CoeffRing::Integers, "x - 1", Conclusion::FinitelyDominatedCertified),
        (CoeffRing::Integers, "1 - 2*x", Conclusion::NotFinitelyDominatedCertified),
        (CoeffRing::Rationals, "1 - 2*x", Conclusion::FinitelyDominatedCertified),
    ] {
        let t = Instant::now();
        let r = ranicki_test(&one_var(coeff, f), DEFAULT_ORDER).map_err(|e| e.to_string())?;
        times.push(within(t, Duration::from_secs(1)).map_err(|e| format!("{f} over {coeff}: {e}"))?);
        ensure!(r.conclusion == want, "{f} over {coeff}: {:?}", r.conclusion);
        if want == Conclusion::NotFinitelyDominatedCertified {
            let w = r.cones.iter().find_map(|c| match &c.report.verdict {
                Verdict::NonacyclicCertified { witness } => Some(witness.clone()),
                _ => None,
            });
            let w = w.ok_or("no witness")?;
            ensure!(w.point == vec!["1/2".to_string()] && !w.cocycle.is_empty(), "unexpected witness {w:?}");
        }
    }
    Ok(format!("times {}", times.join(", ")))
}

fn koszul_of(coeff: CoeffRing, fs: [&str; 2]) -> FreeComplex {
    let l = LRing::new(coeff, 2);
    let (f, g) = (l.parse(fs[0]).unwrap(), l.parse(fs[1]).unwrap());
    let d0 = Matrix::from_polys(l, 2, 1, vec![vec![f.clone()], vec![g.clone()]]);
    let d1 = Matrix::from_polys(l, 1, 2, vec![vec![-g, f]]);
    let d = novtor::homalg::GradedMap::from_blocks(l, 1, [(0, d0), (1, d1)]);
    FreeComplex::new(l, [(0, 1), (1, 2), (2, 1)].into_iter().collect(), d).unwrap()
}

fn fan_tests() -> Outcome {
    let t = Instant::now();
    let good = toric_findom_test(&DominationInput::new(koszul_of(CoeffRing::Integers, ["x - 1", "y - 1"]), Fan::standard(2)))
        .map_err(|e| e.to_string())?;
    ensure!(good.cones.len() == 8 && good.cones.iter().all(|c| c.report.verdict.is_acyclic()), "(x-1, y-1): {:?}", good.conclusion);
    ensure!(good.conclusion == Conclusion::FinitelyDominatedCertified, "(x-1, y-1): {:?}", good.conclusion);
    let bad = toric_findom_test(&DominationInput::new(koszul_of(CoeffRing::Integers, ["1 - 2*x", "y - 1"]), Fan::standard(2)))
        .map_err(|e| e.to_string())?;
    ensure!(bad.conclusion == Conclusion::NotFinitelyDominatedCertified, "(1-2x, y-1): {:?}", bad.conclusion);
    let time = within(t, Duration::from_secs(30))?;
    Ok(format!("8/8 cones acyclic, negative case certified, {time}"))
}

fn forward_consequences() -> Outcome {
    let w = Witness::one_variable(CoeffRing::Integers);
    let input = DominationInput { d: w.d.clone(), witness: Some(w), fan: line_fan(), order: DEFAULT_ORDER };
    let rep = verify_findom_consequences(&input, &[vec![0]]).map_err(|e| e.to_string())?;
    ensure!(rep.first_orthant.verdict.is_acyclic(), "first orthant: {}", rep.first_orthant.verdict.name());
    ensure!(rep.passed, "consequences failed: mismatch {:?}", rep.mismatch);
    Ok(format!("first orthant {}, {} fan cones acyclic", rep.first_orthant.verdict.name(), rep.fan_cones.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("sign identities for N ≤ 6", sign_identities),
        ("printed cone and square matrices", printed_matrices),
        ("derived cubes satisfy D∘D = 0", derived_cube_theorem),
        ("comparison maps M, L, K, J", mather_identities),
        ("torus equals Tot of realization on windows", torus_by_tot),
        ("Koszul slices and ψ", koszul_psi),
        ("constructive contraction", constructive_contraction),
        ("one-variable desk tests", ranicki),
        ("two-variable fan tests", fan_tests),
        ("forward-direction consequences", forward_consequences),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let el = t.elapsed();
        match out {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{detail}] ({el:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({el:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
