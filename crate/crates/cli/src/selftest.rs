use crate::args::{Level, SelftestArgs};
use crate::commands::{aps_pipeline, trace_samples};
use crate::report::{CliError, Outcome};
use equispec::eta::{eta_hurwitz, eta_isotypic_zero, eta_zero_kroute, eta_zero_mellin, RoutePreference};
use equispec::exact::{format_rational, parse_rational, FiniteAbelianGroup};
use equispec::heat::{aps_consistency, fit_expansion, k_of_t, k_prime_identity_residual, mckean_singer, ApsData, HeatSamples};
use equispec::invariants::{
    dolbeault_index_cpn, euler_sphere, euler_table, lens_eta_exact, lens_sweep, torus_z4_action, LensInput,
    SphereAction, SphereCharacter,
};
use equispec::spectral::{
    build_circle_dirac, build_circle_laplacian, build_torus_laplacian, project_isotypic, weyl_fit,
    GradedSpectralModel, PairedLine,
};
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::json;
use std::collections::BTreeMap;
use std::f64::consts::PI;

const BUILTIN: &str = include_str!("golden.json");

#[derive(Deserialize)]
struct Golden {
    lens: Vec<LensCase>,
    torus_euler: BTreeMap<String, i64>,
    sphere: Vec<SphereCase>,
    dolbeault: Vec<DolbeaultCase>,
    eta_circle: Vec<EtaCase>,
}

#[derive(Deserialize)]
struct LensCase {
    m: u64,
    rotations: Vec<i64>,
    ell: i64,
    eta: String,
}

#[derive(Deserialize)]
struct SphereCase {
    n: u32,
    mode: String,
    rho: String,
    value: i64,
}

#[derive(Deserialize)]
struct DolbeaultCase {
    n: u32,
    j: u32,
    trivial: bool,
    value: i64,
}

#[derive(Deserialize)]
struct EtaCase {
    a: f64,
    eta0: f64,
}

struct Cases(Vec<(String, bool, String)>);

impl Cases {
    fn push(&mut self, name: impl Into<String>, result: Result<String, String>) {
        match result {
            Ok(detail) => self.0.push((name.into(), true, detail)),
            Err(detail) => self.0.push((name.into(), false, detail)),
        }
    }
}

fn ok_if(cond: bool, detail: String) -> Result<String, String> {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn golden_cases(golden: &Golden, cases: &mut Cases) {
    for c in &golden.lens {
        let name = format!("lens m={} rot={:?} ell={}", c.m, c.rotations, c.ell);
        cases.push(name, (|| {
            let want = parse_rational(&c.eta).ok_or_else(|| format!("golden value {:?} is not a rational", c.eta))?;
            let got = lens_eta_exact(&LensInput::new(c.m, c.ell, &c.rotations).map_err(err)?).map_err(err)?;
            ok_if(got == want, format!("got {}, expected {}", format_rational(&got), c.eta))
        })());
    }
    let table = euler_table(&torus_z4_action()).map_err(err);
    for (rho, want) in &golden.torus_euler {
        let result = match &table {
            Ok(t) => {
                let got = t.iter().find(|(k, _)| k.to_string() == *rho).map(|(_, v)| *v);
                ok_if(got == Some(*want), format!("got {got:?}, expected {want}"))
            }
            Err(e) => Err(e.clone()),
        };
        cases.push(format!("torus euler rho={rho}"), result);
    }
    for c in &golden.sphere {
        let name = format!("sphere n={} {} {}", c.n, c.mode, c.rho);
        cases.push(name, (|| {
            let mode = match c.mode.as_str() {
                "latitude" => SphereAction::Latitude,
                "antipodal" => SphereAction::Antipodal,
                other => return Err(format!("unknown mode {other:?}")),
            };
            let rho = match c.rho.as_str() {
                "trivial" => SphereCharacter::Trivial,
                "xi" => SphereCharacter::Xi,
                other => return Err(format!("unknown character {other:?}")),
            };
            let got = euler_sphere(c.n, mode, rho).map_err(err)?;
            ok_if(got == c.value, format!("got {got}, expected {}", c.value))
        })());
    }
    for c in &golden.dolbeault {
        let name = format!("dolbeault n={} j={} trivial={}", c.n, c.j, c.trivial);
        let result = dolbeault_index_cpn(c.n, c.j, c.trivial)
            .map_err(err)
            .and_then(|got| ok_if(got == c.value, format!("got {got}, expected {}", c.value)));
        cases.push(name, result);
    }
    for c in &golden.eta_circle {
        cases.push(format!("eta circle a={}", c.a), (|| {
            let model = build_circle_dirac(c.a, 1, 5.0).map_err(err)?;
            let h = eta_hurwitz(&model.progressions().expect("generated"), 0.0).map_err(err)?.value;
            ok_if((h - c.eta0).abs() <= 1e-12, format!("hurwitz {h}, expected {}", c.eta0))
        })());
    }
}

fn invariant_cases(cases: &mut Cases) {
    for a in [0.1, 0.25, 0.4] {
        cases.push(format!("route agreement a={a}"), (|| {
            let model = build_circle_dirac(a, 1, 5.0).map_err(err)?;
            let h = eta_hurwitz(&model.progressions().expect("generated"), 0.0).map_err(err)?.value;
            let m = eta_zero_mellin(&model).map_err(err)?.value;
            let k = eta_zero_kroute(&model, 0).map_err(err)?.value;
            let (dm, dk) = ((m - h).abs(), (k - h).abs());
            ok_if(dm <= 1e-6 && dk <= 1e-5, format!("mellin {dm:.1e}, kroute {dk:.1e}"))
        })());
    }
    for k in [2u64, 3, 4, 6] {
        cases.push(format!("isotypic sum k={k}"), (|| {
            let model = build_circle_dirac(0.25, k, 30.0).map_err(err)?;
            let total = eta_hurwitz(&model.progressions().expect("generated"), 0.0).map_err(err)?.value;
            let mut sum = 0.0;
            for rho in model.group().characters() {
                sum += eta_isotypic_zero(&model, &rho, RoutePreference::Auto).map_err(err)?.value;
            }
            ok_if((sum - total).abs() <= 1e-10, format!("sum {sum}, total {total}"))
        })());
    }
    cases.push("mckean-singer constancy", (|| {
        let paired = [1.0, 2.0, 3.0].iter().map(|&mu| PairedLine { mu, multiplicity: 1, isotypes: BTreeMap::new() }).collect();
        let graded =
            GradedSpectralModel::new(FiniteAbelianGroup::trivial(), 2, 1, paired, BTreeMap::new()).map_err(err)?;
        let values: Vec<f64> =
            [1e-3, 1e-2, 1e-1, 1.0, 10.0].iter().map(|&t| mckean_singer(&graded, t)).collect::<Result<_, _>>().map_err(err)?;
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        ok_if(spread <= 1e-12 && values[0].round() == 1.0, format!("spread {spread:.1e}"))
    })());
    cases.push("symmetric K vanishes", (|| {
        let model = build_circle_dirac(0.5, 1, 20.0).map_err(err)?;
        let k = k_of_t(&model, 0.3).map_err(err)?.value;
        ok_if(k == 0.0, format!("K(0.3) = {k:e}"))
    })());
    cases.push("K' identity", (|| {
        let model = build_circle_dirac(0.25, 1, 40.0).map_err(err)?;
        let mut worst = 0.0f64;
        for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
            worst = worst.max(k_prime_identity_residual(&model, t).map_err(err)?);
        }
        ok_if(worst <= 1e-7, format!("worst residual {worst:.1e}"))
    })());
    cases.push("aps algebraic", {
        let a = aps_consistency(&ApsData { index: 1, h: 0, eta_zero: -2.0, c0: 0.0 });
        let b = aps_consistency(&ApsData { index: 0, h: 2, eta_zero: -2.0, c0: 0.0 });
        ok_if(a == 0.0 && b == 0.0, format!("residuals {a}, {b}"))
    });
}

fn full_cases(cases: &mut Cases) {
    cases.push("lens sweep m<=12 n<=3", (|| {
        let entries = lens_sweep(12, 3).map_err(err)?;
        let mut worst = 0.0f64;
        let mut by_input: BTreeMap<(u64, Vec<u64>), Vec<_>> = BTreeMap::new();
        for e in &entries {
            let diff = (e.exact.to_f64().unwrap_or(f64::NAN) - e.numeric).abs();
            if !(diff <= 1e-10) {
                return Err(format!("{:?}: exact {} numeric {}", e.input, format_rational(&e.exact), e.numeric));
            }
            worst = worst.max(diff);
            by_input.entry((e.input.m(), e.input.rotations().to_vec())).or_default().push(e.exact.clone());
        }
        for ((m, rot), values) in &by_input {
            if !values[0].is_zero() {
                return Err(format!("m={m} rot={rot:?}: ell = 0 gives {}", format_rational(&values[0])));
            }
            // ell and m - ell agree up to the sign (-1)^n
            let odd = rot.len() % 2 == 1;
            for ell in 1..*m as usize {
                let mirror = &values[*m as usize - ell];
                let expected = if odd { -mirror.clone() } else { mirror.clone() };
                if values[ell] != expected {
                    return Err(format!("m={m} rot={rot:?}: ell {ell} and {} break the conjugation symmetry", *m as usize - ell));
                }
            }
        }
        Ok(format!("{} values, worst {worst:.1e}", entries.len()))
    })());
    let sqrt_pi = PI.sqrt();
    cases.push("heat fit planted", (|| {
        let s = HeatSamples::geometric(1e-4, 1e-1, 40, |t| Ok(3.0 / t.sqrt() + 2.0 * t.ln() + 5.0 + t.sqrt())).map_err(err)?;
        let fit = fit_expansion(&s, -1, 1, 1).map_err(err)?;
        let worst = [((-1, 0), 3.0), ((0, 1), 2.0), ((0, 0), 5.0), ((1, 0), 1.0)]
            .iter()
            .map(|&((i, j), w)| (fit.coeff(i, j).unwrap_or(f64::NAN) - w).abs())
            .fold(0.0, f64::max);
        ok_if(worst <= 1e-8, format!("worst {worst:.1e}"))
    })());
    for (k, want, label) in [(1u64, sqrt_pi, "circle"), (3, sqrt_pi / 3.0, "Z_3-invariant circle")] {
        cases.push(format!("heat fit {label}"), (|| {
            let mut model = build_circle_laplacian(k, 700.0).map_err(err)?;
            if k > 1 {
                model = project_isotypic(&model, &model.group().trivial_character()).map_err(err)?;
            }
            let (s, _) = trace_samples(&model, 1e-4, 1e-2, 40).map_err(|e| e.message)?;
            let fit = fit_expansion(&s, -1, 2, 1).map_err(err)?;
            let lead = fit.coeff(-1, 0).unwrap_or(f64::NAN);
            let logs = fit.max_log_coeff();
            ok_if((lead - want).abs() <= 1e-4 && logs < 1e-6, format!("leading {lead}, logs {logs:.1e}"))
        })());
    }
    cases.push("aps pipeline", (|| {
        let (data, _) = aps_pipeline(0.25).map_err(|e| e.message)?;
        let r = aps_consistency(&data);
        ok_if(r <= 1e-4, format!("residual {r:.1e}"))
    })());
    cases.push("weyl exponents", (|| {
        let torus = weyl_fit(&build_torus_laplacian(60.0).map_err(err)?).map_err(err)?.exponent;
        let circle = weyl_fit(&build_circle_dirac(0.25, 1, 500.0).map_err(err)?).map_err(err)?.exponent;
        ok_if((torus - 1.0).abs() <= 0.05 && (circle - 0.5).abs() <= 0.05, format!("torus {torus:.4}, circle {circle:.4}"))
    })());
}

pub fn run(args: &SelftestArgs) -> Result<Outcome, CliError> {
    let (source, text) = match &args.golden {
        Some(path) => (
            path.display().to_string(),
            std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("reading {}: {e}", path.display())))?,
        ),
        None => ("builtin".to_string(), BUILTIN.to_string()),
    };
    let mut cases = Cases(Vec::new());
    match serde_json::from_str::<Golden>(&text) {
        Ok(golden) => golden_cases(&golden, &mut cases),
        Err(e) => cases.push("golden file", Err(format!("cannot parse {source}: {e}"))),
    }
    invariant_cases(&mut cases);
    if args.level == Level::Full {
        full_cases(&mut cases);
    }
    let failed: Vec<String> = cases.0.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
    let rows: Vec<_> = cases
        .0
        .iter()
        .map(|(name, pass, detail)| json!({ "case": name, "status": if *pass { "pass" } else { "fail" }, "detail": detail }))
        .collect();
    let level = match args.level {
        Level::Fast => "fast",
        Level::Full => "full",
    };
    let mut out = Outcome::new(json!({
        "level": level,
        "passed": cases.0.len() - failed.len(),
        "failed": failed.len(),
        "cases": rows,
    }))
    .diag("golden", source);
    if !failed.is_empty() {
        out.failure = Some(CliError {
            status: crate::report::EXIT_NUMERIC,
            message: format!("{} selftest case(s) failed: {}", failed.len(), failed.join("; ")),
            failures: failed,
        });
    }
    Ok(out)
}
