use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use zink_core::abelian::exact_at;
use zink_core::breuil_kisin::{bk_to_display, BkSetup, BkSpec};
use zink_core::bt::{
    etale_reference, mu_reference, torsion_points, BtOptions, DisplaySource, TestAlgebra,
};
use zink_core::frames::{Frame, FrameKind, SElem};
use zink_core::windows::{
    canonical_iso, lift_window_random, matrix, pairing_check, reduce_window, Window,
};
use zink_core::witt::{exponent_bound, u0, WittGroup, WittVector};
use zink_core::zink::{ff1, vv, VStabElement};
use zink_core::{DividedPowerStructure, FiniteAlgebra, Ideal, PdKind, RingSpec};

use crate::docs::{self, AlgebraDoc, BreuilDoc, DisplayDoc, LiftDoc, WindowDoc};
use crate::error::{config, CliError};

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    /// Wall time; kept out of the JSON so reports stay byte-identical.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
}

impl Report {
    fn new(command: &str, seed: u64, checks: Vec<Check>, result: Value) -> Report {
        let passed = checks.iter().all(|c| c.passed);
        Report { command: command.into(), seed, passed, checks, result }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {} ({:.3}s)\n", c.name, c.seconds));
            if let Some(ce) = &c.counterexample {
                out.push_str(&format!("     {ce}\n"));
            }
        }
        out.push_str(&format!("{}: {}\n", self.command, if self.passed { "passed" } else { "FAILED" }));
        out
    }
}

fn check(name: &str, f: impl FnOnce() -> Result<(), String>) -> Check {
    let start = Instant::now();
    let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err("panicked".to_string()));
    Check {
        name: name.into(),
        passed: r.is_ok(),
        counterexample: r.err(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn coords_json(x: &WittVector) -> Value {
    json!(x.coords())
}

fn int_coords(x: &WittVector) -> Result<Vec<u64>, CliError> {
    x.coords()
        .iter()
        .map(|c| c.first().copied().filter(|_| c.len() == 1).ok_or_else(|| config("ring is not Z/p^m")))
        .collect()
}

fn zmod(p: u64, m: u32) -> Result<Arc<FiniteAlgebra>, CliError> {
    FiniteAlgebra::integers_mod(p, m).map_err(config)
}

pub fn u0_cmd(p: u64, len: usize, precision: Option<u32>, seed: u64) -> Result<Report, CliError> {
    let m = precision.unwrap_or(12);
    let ring = zmod(p, m)?;
    let u = u0(&ring, len);
    let coords = int_coords(&u)?;
    let modulus = p.checked_pow(m).ok_or_else(|| config("p^precision overflows"))?;
    let signed: Vec<i64> =
        coords.iter().map(|c| if *c > modulus / 2 { *c as i64 - modulus as i64 } else { *c as i64 }).collect();
    let rhs = WittVector::from_int(&ring, p as i64, len + 1)
        .sub(&WittVector::teichmuller(&ring, &ring.from_int(p as i64), len + 1))
        .map_err(config)?;
    let checks = vec![check("v(u0) = p - [p]", || {
        ensure(u.verschiebung() == rhs, || "v(u0) differs from p - [p]".into())
    })];
    let result = json!({ "p": p, "len": len, "precision": m, "coords": coords, "signed": signed });
    Ok(Report::new("u0", seed, checks, result))
}

pub fn ghost_cmd(
    ring: Option<PathBuf>,
    p: u64,
    coords: &str,
    precision: Option<u32>,
    seed: u64,
) -> Result<Report, CliError> {
    let spec = match ring {
        Some(path) => docs::read::<RingSpec>(&path)?,
        None => RingSpec::from_json(&json!({ "p": p, "m": precision.unwrap_or(8) }).to_string()).map_err(config)?,
    };
    let r = docs::build_ring(&spec)?;
    let given: Vec<String> = serde_json::from_str(coords).map_err(|e| config(format!("--coords: {e}")))?;
    let x = docs::witt(&r, &spec, &given, given.len())?;
    let result = json!({ "ring": r.name(), "coords": coords_json(&x), "ghost": x.ghost() });
    Ok(Report::new("ghost", seed, Vec::new(), result))
}

fn default_rings() -> Result<Vec<Arc<FiniteAlgebra>>, CliError> {
    Ok(vec![
        zmod(2, 3)?,
        FiniteAlgebra::truncated_field_poly(2, 3).map_err(config)?,
        FiniteAlgebra::truncated_field_poly(3, 2).map_err(config)?,
    ])
}

fn witt_suite(rings: &[Arc<FiniteAlgebra>], rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut out = Vec::new();
    for ring in rings {
        let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
        out.push(check(&format!("witt ring axioms over {}", ring.name()), || {
            for _ in 0..20 {
                let x = WittVector::random(ring, 3, &mut r);
                let y = WittVector::random(ring, 3, &mut r);
                let z = WittVector::random(ring, 3, &mut r);
                let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
                let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
                ensure(lhs == rhs, || format!("distributivity fails at {x:?}, {y:?}, {z:?}"))?;
                ensure(x.add(&y).unwrap() == y.add(&x).unwrap(), || format!("x + y != y + x at {x:?}, {y:?}"))?;
            }
            Ok(())
        }));
        out.push(check(&format!("FV = p over {}", ring.name()), || {
            for _ in 0..20 {
                let x = WittVector::random(ring, 3, &mut r);
                let lhs = x.verschiebung().frobenius().truncate(3);
                ensure(lhs == x.scale(ring.p() as i64), || format!("FV(x) != p x at {x:?}"))?;
            }
            Ok(())
        }));
    }
    out
}

fn zink_suite(rings: &[Arc<FiniteAlgebra>], rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut out = Vec::new();
    for ring in rings {
        let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
        out.push(check(&format!("0 -> W -vv-> W -w0-> R exact over {}", ring.name()), || {
            let m = exponent_bound(ring, 3);
            let (w2, w3, r1) = (WittGroup::new(ring, 2, m), WittGroup::new(ring, 3, m), WittGroup::new(ring, 1, m));
            let v = w2.hom(&w3, vv);
            let w0 = w3.hom(&r1, |x| x.truncate(1));
            ensure(v.is_injective(w2.group(), w3.group()), || "vv is not injective".into())?;
            ensure(exact_at(w3.zpm(), &v, &w0, w3.group(), r1.group()), || "ker w0 != im vv".into())
        }));
        out.push(check(&format!("ff1 inverts vv over {}", ring.name()), || {
            for _ in 0..20 {
                let x = WittVector::random(ring, 3, &mut r);
                let back = ff1(&vv(&x)).map_err(|e| e.to_string())?;
                ensure(back == x, || format!("ff1(vv(x)) != x at {x:?}"))?;
            }
            Ok(())
        }));
        if ring.p() == 2 {
            out.push(check(&format!("v(1) in W(R) iff pR = 0 over {}", ring.name()), || {
                let v1 = WittVector::one(ring, 2).verschiebung();
                let inside = VStabElement::from_witt(&v1).map_err(|e| e.to_string())?.in_zink();
                let char_p = ring.is_zero(&ring.from_int(2));
                ensure(inside == char_p, || format!("membership {inside}, pR = 0 is {char_p}"))
            }));
        }
    }
    out
}

fn windows_suite(rings: &[Arc<FiniteAlgebra>], rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut out = Vec::new();
    for ring in rings {
        let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
        out.push(check(&format!("window identities over D_{}", ring.name()), || {
            let f = Arc::new(Frame::dieudonne(ring, 3).map_err(|e| e.to_string())?);
            for _ in 0..5 {
                let h = r.gen_range(1..=3);
                let w = Window::random(&f, h, r.gen_range(0..=h), &mut r);
                let fv = w.to_fv_module().check();
                ensure(fv.fv_is_theta && fv.vf_is_theta, || format!("F#V# != theta for {}", w.to_json()))?;
                ensure(w.is_bidual(), || format!("not bidual: {}", w.to_json()))?;
                let rep = pairing_check(&w, &w.dual(), &mut r, 3);
                ensure(rep.passed(), || format!("{rep:?}"))?;
            }
            Ok(())
        }));
    }
    out
}

fn bk_suite(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let spec = |vars: &[&str], sigma: &[&str]| BkSpec {
        p: 2,
        m: 4,
        a: 4,
        vars: vars.iter().map(|s| s.to_string()).collect(),
        e: "2 - x".into(),
        sigma: sigma.iter().map(|s| s.to_string()).collect(),
    };
    vec![
        check("kappa(E) = 2 - [2] and u = u0", || {
            let s = BkSetup::new(BkSpec::motivating(2, 12, 8)).map_err(|e| e.to_string())?;
            let base = s.base().clone();
            let units = s.units(4).map_err(|e| e.to_string())?;
            let want = WittVector::from_int(&base, 2, 4).sub(&WittVector::teichmuller(&base, &base.from_int(2), 4)).unwrap();
            ensure(units.kappa_e == want, || format!("kappa(E) = {:?}", units.kappa_e))?;
            ensure(units.u == u0(&base, 4).truncate(units.u.len()), || format!("u = {:?}", units.u))?;
            let rep = s.kappa_hom(4, FrameKind::Dieudonne).map_err(|e| e.to_string())?.check(&mut r, 20);
            ensure(rep.passed, || format!("{rep:?}"))
        }),
        check("nilpotence condition on three lifts", || {
            let cases = [spec(&["x"], &["x^2"]), spec(&["x", "y"], &["x^2 + 2*y", "y^2"]), spec(&["x"], &["x^2 + 2*x"])];
            let mut got = Vec::new();
            for c in cases {
                got.push(BkSetup::new(c).and_then(|s| s.nilpotence_condition()).map_err(|e| e.to_string())?.holds);
            }
            ensure(got == [true, true, false], || format!("got {got:?}"))
        }),
    ]
}

fn bt_suite(rings: &[Arc<FiniteAlgebra>]) -> Vec<Check> {
    let mut out = Vec::new();
    for ring in rings.iter().filter(|r| r.residue_field().rank() == 1 && r.log_size() <= 4) {
        out.push(check(&format!("BT(D) = mu_p over {}", ring.name()), || {
            let ta = TestAlgebra::over_itself(ring).map_err(|e| e.to_string())?;
            let got = torsion_points(&DisplaySource::unit(ring), &ta, 1, &BtOptions::default()).map_err(|e| e.to_string())?;
            let want = mu_reference(ring, 1);
            ensure(got.group == want, || format!("{} != {}", got.group, want))
        }));
        out.push(check(&format!("BT(etale) = Z/p over {}", ring.name()), || {
            let ta = TestAlgebra::over_itself(ring).map_err(|e| e.to_string())?;
            let got = torsion_points(&DisplaySource::etale(ring, 1), &ta, 1, &BtOptions::default()).map_err(|e| e.to_string())?;
            ensure(got.group == etale_reference(ring.p(), 1, 1), || got.group.to_string())
        }));
    }
    out
}

pub fn verify(suite: &str, ring: Option<PathBuf>, seed: u64) -> Result<Report, CliError> {
    let rings = match ring {
        Some(path) => vec![docs::build_ring(&docs::read::<RingSpec>(&path)?)?],
        None => default_rings()?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let all = suite == "all";
    let known = ["witt", "zink", "windows", "bk", "bt", "all"];
    if !known.contains(&suite) {
        return Err(config(format!("unknown suite '{suite}'; expected one of {known:?}")));
    }
    if all || suite == "witt" {
        checks.extend(witt_suite(&rings, &mut rng));
    }
    if all || suite == "zink" {
        checks.extend(zink_suite(&rings, &mut rng));
    }
    if all || suite == "windows" {
        checks.extend(windows_suite(&rings, &mut rng));
    }
    if all || suite == "bk" {
        checks.extend(bk_suite(&mut rng));
    }
    if all || suite == "bt" {
        checks.extend(bt_suite(&rings));
    }
    Ok(Report::new(&format!("verify {suite}"), seed, checks, Value::Null))
}

fn load_bk(path: &PathBuf, precision: Option<u32>) -> Result<BkSetup, CliError> {
    let mut spec: BkSpec = docs::read(path)?;
    if let Some(m) = precision {
        spec.m = m;
    }
    BkSetup::new(spec).map_err(config)
}

pub fn kappa(bk: PathBuf, len: usize, precision: Option<u32>, seed: u64) -> Result<Report, CliError> {
    let s = load_bk(&bk, precision)?;
    let units = s.units(len).map_err(config)?;
    let mut checks = vec![check("u is a unit", || ensure(units.u_is_unit, || "f1(kappa(E)) is not a unit".into()))];
    if let Some(rel) = units.relation {
        checks.push(check("uu u0 = u", || ensure(rel, || "relation fails".into())));
    }
    let result = json!({
        "base": s.base().name(),
        "len": len,
        "kappa_e": coords_json(&units.kappa_e),
        "u": coords_json(&units.u),
        "uu": units.uu.as_ref().map(coords_json),
    });
    Ok(Report::new("kappa", seed, checks, result))
}

pub fn nilpotence(bk: PathBuf, precision: Option<u32>, seed: u64) -> Result<Report, CliError> {
    let s = load_bk(&bk, precision)?;
    let rep = s.nilpotence_condition().map_err(config)?;
    let checks = vec![check("criteria agree", || {
        ensure(rep.delta_agrees, || "matrix and delta criteria disagree".into())
    })];
    Ok(Report::new("nilpotence", seed, checks, serde_json::to_value(&rep).map_err(config)?))
}

fn bt_options(precision: Option<u32>) -> BtOptions {
    let mut o = BtOptions::default();
    if let Some(e) = precision {
        o.extra_precision = e;
    }
    o
}

pub fn bt_points(
    display: PathBuf,
    algebra: Option<PathBuf>,
    n: u32,
    precision: Option<u32>,
    seed: u64,
) -> Result<Report, CliError> {
    let doc: DisplayDoc = docs::read(&display)?;
    let (src, spec) = doc.source(None)?;
    let ta = match algebra {
        Some(path) => docs::read::<AlgebraDoc>(&path)?.test_algebra(src.ring(), spec.as_ref())?,
        None => TestAlgebra::over_itself(src.ring()).map_err(config)?,
    };
    let opts = if matches!(doc, DisplayDoc::Breuil(_)) { BtOptions { cap: 3, ..bt_options(precision) } } else { bt_options(precision) };
    let pts = torsion_points(&src, &ta, n, &opts)?;
    let result = json!({
        "algebra": ta.ring().name(),
        "n": n,
        "group": pts.group.to_string(),
        "invariants": pts.group.invariants,
        "order": pts.group.order(),
        "attempts": pts.attempts,
    });
    Ok(Report::new("bt-points", seed, Vec::new(), result))
}

pub fn convert(bk: PathBuf, phi: Option<String>, n: u32, len: usize, precision: Option<u32>, seed: u64) -> Result<Report, CliError> {
    let spec: BkSpec = docs::read(&bk)?;
    let phi = match phi {
        Some(s) => Some(serde_json::from_str(&s).map_err(|e| config(format!("--phi: {e}")))?),
        None => None,
    };
    let doc = BreuilDoc { bk: spec, phi };
    let (setup, bw) = doc.load(precision)?;
    let w = bk_to_display(&setup, &bw, len + 1).map_err(config)?;
    let setup = Arc::new(setup);
    let src = DisplaySource::from_breuil(setup.clone(), bw)?;
    let ta = TestAlgebra::over_itself(setup.base()).map_err(config)?;
    let pts = torsion_points(&src, &ta, n, &BtOptions { cap: 3, ..Default::default() })?;
    let psi: Vec<Vec<Value>> = w.psi().iter().map(|r| r.iter().map(|x| coords_json(&x.witt().truncate(len))).collect()).collect();
    let result = json!({
        "display": {
            "base": setup.base().name(),
            "len": len,
            "height": w.height(),
            "dimension": w.dimension(),
            "rank_l": w.rank_l(),
            "psi": psi,
        },
        "bt": { "n": n, "group": pts.group.to_string(), "invariants": pts.group.invariants },
    });
    Ok(Report::new("convert", seed, Vec::new(), result))
}

pub fn dual(window: PathBuf, seed: u64) -> Result<Report, CliError> {
    let doc: WindowDoc = docs::read(&window)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = doc.window(&mut rng)?;
    let d = w.dual();
    let checks = vec![
        check("canonical map to the bidual", || ensure(w.is_bidual(), || "not an isomorphism".into())),
        check("pairing relations", || {
            let rep = pairing_check(&w, &d, &mut rng, 5);
            ensure(rep.passed(), || format!("{rep:?}"))
        }),
        check("duality commutes with (F#, V#)", || {
            ensure(d.to_fv_module().equals(&w.to_fv_module().dual()), || "mismatch".into())
        }),
    ];
    let result = json!({ "window": w.to_json(), "dual": d.to_json() });
    Ok(Report::new("dual", seed, checks, result))
}

pub fn lift(doc: PathBuf, seed: u64) -> Result<Report, CliError> {
    let doc: LiftDoc = docs::read(&doc)?;
    let spec = &doc.window.ring;
    let b = docs::build_ring(spec)?;
    let gens = doc.ideal.iter().map(|s| docs::parse(&b, spec, s)).collect::<Result<Vec<_>, _>>()?;
    let ideal = Ideal::new(&b, gens).map_err(config)?;
    let pd = DividedPowerStructure::new(ideal, PdKind::TrivialSquareZero).map_err(config)?;
    let len = doc.window.len;
    let rel = Arc::new(Frame::relative(&pd, len).map_err(config)?);
    let base = Arc::new(Frame::dieudonne(rel.quotient(), len).map_err(config)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proj = rel.projection().clone();
    let w = doc.window.window_over(&base, &mut rng, |x| x.map(&proj))?;
    let l1 = lift_window_random(&w, &rel, &mut rng).map_err(config)?;
    let l2 = lift_window_random(&w, &rel, &mut rng).map_err(config)?;
    let iso = canonical_iso(&l1, &l2).map_err(config)?;
    let checks = vec![
        check("lifts reduce to the window", || {
            let ok = [&l1, &l2].iter().all(|l| matrix::equal(&base, reduce_window(l, &base).psi(), w.psi()));
            ensure(ok, || "a lift does not reduce to the window".into())
        }),
        check("canonical isomorphism within its bound", || {
            ensure(iso.steps <= iso.bound, || format!("{} steps > bound {}", iso.steps, iso.bound))?;
            ensure(l1.is_isomorphism(&l2, &iso.matrix), || "not an isomorphism".into())
        }),
        check("isomorphism reduces to the identity", || {
            let red = matrix::map(&iso.matrix, |x| SElem::W(x.witt().map(&proj)));
            ensure(matrix::is_identity(&base, &red), || "reduction is not the identity".into())
        }),
    ];
    let result = json!({
        "base": w.to_json(),
        "lift": l1.to_json(),
        "iso_steps": iso.steps,
        "iso_bound": iso.bound,
    });
    Ok(Report::new("lift", seed, checks, result))
}
