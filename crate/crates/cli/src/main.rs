use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use novtor::cubes::{derive_cube, verify_special, OpComplex};
use novtor::findom::{toric_findom_test, verify_findom_consequences, DominationInput, DEFAULT_ORDER};
use novtor::homalg::{cohomology, Op};
use novtor::io;
use novtor::multicomplex::{realize_l, step, tr_tot, TruncationWindow};
use novtor::tori::{mapping_torus, mather_j, mather_k};
use novtor::toric::{dual_cone, nov_acyclicity_auto, Cone, IVec, Verdict};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "novtor", version, about = "Cubes, mapping tori and Novikov-ring tests for finite domination")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the cube identities of a special cube file.
    CheckCube { file: PathBuf },
    /// Build the derived cube from a witness file.
    Derive {
        file: PathBuf,
        /// Half-width of the monomial window used to check additive operators.
        #[arg(long, default_value_t = 2)]
        window: i64,
    },
    /// Totalise a special cube.
    Totalise { file: PathBuf },
    /// Mapping torus of a cube file, or of the derived cube of a witness file.
    Torus {
        file: PathBuf,
        /// Verify the comparison maps K and J (witness files only).
        #[arg(long)]
        check_mather: bool,
        #[arg(long, default_value_t = 1)]
        window: i64,
    },
    /// Cohomology of a complex over Z, Q or Z/p.
    Cohomology { file: PathBuf },
    /// Truncated product totalisation of the realization of a cube's mapping torus.
    TrTot {
        file: PathBuf,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        k0: i64,
        #[arg(long, default_value_t = 1)]
        bound: i64,
    },
    /// Acyclicity of a complex over the Novikov ring of a cone.
    NovikovTest {
        complex: PathBuf,
        /// Cone generators as JSON, e.g. "[[1,0],[0,1]]".
        #[arg(long)]
        cone: String,
        /// Treat the generators as a cone of the fan and test its dual.
        #[arg(long)]
        dual: bool,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: i64,
    },
    /// The fan criterion for finite domination.
    Findom {
        complex: PathBuf,
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: i64,
        /// A built-in domination witness to check consequences against.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

fn read_json(p: &Path) -> Result<Value> {
    let s = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    Ok(io::parse(&s)?)
}

fn emit(v: &Value) {
    println!("{}", io::to_string(v));
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::AcyclicCertified { .. } => 0,
        Verdict::NonacyclicCertified { .. } => 1,
        Verdict::Inconclusive { .. } => 2,
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::CheckCube { file } => {
            let cube = io::cube_from_json(&read_json(&file)?)?;
            let rep = verify_special(&cube);
            emit(&serde_json::to_value(&rep)?);
            match rep.first_failure {
                None => eprintln!("cube: all {} identities hold", rep.results.len()),
                Some(s) => eprintln!("not a cube: identity fails for S = {s}"),
            }
            Ok(if rep.is_cube() { 0 } else { 1 })
        }
        Cmd::Derive { file, window } => {
            let w = io::witness_from_json(&read_json(&file)?)?;
            let cube = derive_cube(&w.input(), window)?;
            emit(&io::cube_to_json(&cube));
            eprintln!("derived {}-cube with {} homotopies", cube.n, cube.h.len());
            Ok(0)
        }
        Cmd::Totalise { file } => {
            let cube = io::cube_from_json(&read_json(&file)?)?;
            let t = cube.totalise()?;
            let ok = t.complex.check_complex();
            emit(&json!({ "complex": io::complex_to_json(&t.complex), "members": t.layout.members, "d_squared_zero": ok }));
            eprintln!("Tot: ranks {:?}, d∘d = 0: {ok}", t.complex.ranks());
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Torus { file, check_mather, window } => {
            let v = read_json(&file)?;
            if v.get("n").is_some() {
                if check_mather {
                    bail!("--check-mather needs a witness file, not a cube file");
                }
                let t = mapping_torus(&io::cube_from_json(&v)?)?;
                let special = verify_special(&t.extended).is_cube();
                emit(&json!({ "torus": io::complex_to_json(t.complex()), "extended_is_cube": special }));
                eprintln!("torus: ranks {:?}", t.complex().ranks());
                return Ok(if special { 0 } else { 1 });
            }
            let w = io::witness_from_json(&v)?;
            let cube = derive_cube(&w.input(), window.max(1))?;
            let t = mapping_torus(&cube)?;
            let mut out = json!({ "torus": io::complex_to_json(t.complex()), "extended_is_cube": verify_special(&t.extended).is_cube() });
            let mut code = 0;
            if check_mather {
                let d = OpComplex::from(&w.d);
                let c = OpComplex::from(&w.c);
                let g = Op::compose(vec![w.alpha.clone(), w.beta.clone()]);
                let k = mather_k(&d, &g, &w.g, &w.h, window);
                let j = mather_j(&c, &d, &w.alpha, &w.beta, &w.g, &w.h, window);
                let status = |r: &novtor::Result<novtor::tori::MatherMap>| match r {
                    Ok(m) => json!({ "passed": true, "check": m.check }),
                    Err(e) => json!({ "passed": false, "error": e.to_string() }),
                };
                out["mather"] = json!({ "K": status(&k), "J": status(&j) });
                eprintln!("K: {}, J: {}", if k.is_ok() { "pass" } else { "FAIL" }, if j.is_ok() { "pass" } else { "FAIL" });
                if k.is_err() || j.is_err() {
                    code = 1;
                }
            }
            emit(&out);
            Ok(code)
        }
        Cmd::Cohomology { file } => {
            let c = io::complex_from_json(&read_json(&file)?)?;
            let h = cohomology(&c)?;
            emit(&serde_json::to_value(&h)?);
            eprintln!("acyclic: {}", h.is_acyclic());
            Ok(0)
        }
        Cmd::TrTot { file, k0, bound } => {
            let cube = io::cube_from_json(&read_json(&file)?)?;
            let w = TruncationWindow { n: cube.n, k0, bound };
            // one step beyond the window, so that outgoing differentials are recorded
            let mut positions: BTreeSet<Vec<i64>> = w.positions().into_iter().collect();
            for a in w.positions() {
                for i in 0..cube.n {
                    positions.insert(step(&a, i, 1));
                }
            }
            let r = realize_l(&cube, &positions.into_iter().collect::<Vec<_>>())?;
            let t = tr_tot(&r.multi, &w)?;
            emit(&json!({
                "window": w,
                "multicomplex": io::multicomplex_to_json(&r.multi),
                "tot": io::sum_tot_to_json(&t.tot),
                "outflow": t.outflow.iter().map(|(i, p)| json!({ "dir": i + 1, "from": p })).collect::<Vec<_>>(),
            }));
            eprintln!("window with {} positions, total ranks {:?}", w.positions().len(), t.tot.complex.ranks());
            Ok(0)
        }
        Cmd::NovikovTest { complex, cone, dual, order } => {
            let d = io::complex_from_json(&read_json(&complex)?)?;
            let gens: Vec<IVec> = serde_json::from_str(&cone).map_err(|e| anyhow!("bad --cone: {e}"))?;
            let c = Cone::new(d.ring().nvars, gens)?;
            let tau = if dual { dual_cone(&c)? } else { c };
            let rep = nov_acyclicity_auto(&d, &tau, order)?;
            emit(&serde_json::to_value(&rep)?);
            eprintln!("{} at order {}", rep.verdict.name(), rep.order);
            Ok(verdict_code(&rep.verdict))
        }
        Cmd::Findom { complex, fan, order, witness } => {
            let d = io::complex_from_json(&read_json(&complex)?)?;
            let fan = io::fan_from_json(&read_json(&fan)?)?;
            let mut input = DominationInput { d, witness: None, fan, order };
            let rep = toric_findom_test(&input)?;
            eprint!("{}", novtor::findom::summary(&rep));
            let code = rep.conclusion.exit_code() as u8;
            let Some(wf) = witness else {
                emit(&serde_json::to_value(&rep)?);
                return Ok(code);
            };
            let w = io::witness_from_json(&read_json(&wf)?)?;
            input.witness = Some(w.witness.ok_or_else(|| anyhow!("--witness takes a built-in witness file"))?);
            let cons = verify_findom_consequences(&input, &[])?;
            eprintln!("witness consequences: {}", if cons.passed { "pass" } else { "FAIL" });
            emit(&json!({ "findom": rep, "consequences": cons }));
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
