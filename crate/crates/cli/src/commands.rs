use crate::args::*;
use crate::report::{CliError, Outcome};
use crate::selftest;
use equispec::eta::{
    alpha_trace, eta_hurwitz, eta_isotypic_zero, eta_series, eta_zero_kroute, eta_zero_mellin, EtaResult,
    RoutePreference,
};
use equispec::exact::{format_rational, rational_reconstruction, Character, FiniteAbelianGroup, IsotypeKey};
use equispec::heat::{
    aps_consistency, fit_expansion, heat_trace, k_of_t, k_prime_identity_residual, mckean_singer, ApsData,
    HeatSamples,
};
use equispec::invariants::{
    dolbeault_index_cpn, euler_from_action, euler_sphere, euler_table, lens_eta_exact, lens_eta_exact_all,
    lens_eta_numeric, lens_reality_residual, torus_z4_action, CohomologyAction, LensInput, SphereAction,
    SphereCharacter,
};
use equispec::spectral::{
    build_circle_dirac, build_circle_laplacian, build_torus_laplacian, counting_function, project_isotypic,
    weyl_fit, GradedSpectralModel, PairedLine, SpectralModel, Tail,
};
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::path::Path;

pub fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Eta(a) => eta(a),
        Command::LensEta(a) => lens_eta(a),
        Command::Euler(a) => euler(a),
        Command::Dolbeault(a) => dolbeault(a),
        Command::HeatFit(a) => heat_fit(a),
        Command::MckeanSinger(a) => mckean(a),
        Command::ApsCheck(a) => aps_check(a),
        Command::Weyl(a) => weyl(a),
        Command::Selftest(a) => selftest::run(a),
    }
}

fn require(cond: bool, message: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::validation(message))
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("reading {}: {e}", path.display())))
}

pub fn parse_character(text: &str, group: &FiniteAbelianGroup) -> Result<Character, CliError> {
    let key = IsotypeKey::parse_for(text, group)
        .ok_or_else(|| CliError::validation(format!("{text:?} is not a character of {:?}", group.orders())))?;
    Ok(group.character(key.0)?)
}

fn check_circle(a: f64, k: u64, cutoff: f64) -> Result<(), CliError> {
    require(a > 0.0 && a < 1.0, format!("--a must lie in (0, 1), got {a}"))?;
    require(k >= 1, "--k must be at least 1")?;
    require(cutoff.is_finite() && cutoff >= 1.0, format!("--cutoff must be at least 1, got {cutoff}"))
}

fn eta_report(result: &EtaResult) -> Outcome {
    let mut results = Map::new();
    if result.z == 0.0 {
        results.insert("eta0".into(), json!(result.value));
    } else {
        results.insert("eta".into(), json!(result.value));
        results.insert("z".into(), json!(result.z));
    }
    results.insert("route".into(), json!(result.route.to_string()));
    results.insert("estimated_error".into(), json!(result.estimated_error));
    let mut out = Outcome::new(Value::Object(results));
    for (k, v) in &result.diagnostics {
        out = out.diag(k, *v);
    }
    out
}

fn dirac_model(args: &EtaArgs) -> Result<SpectralModel, CliError> {
    match args.model {
        DiracModel::Circle => {
            let a = args.a.ok_or_else(|| CliError::validation("--model circle needs --a"))?;
            check_circle(a, args.k, args.cutoff)?;
            Ok(build_circle_dirac(a, args.k, args.cutoff)?)
        }
        DiracModel::File => {
            let path = args.file.as_ref().ok_or_else(|| CliError::validation("--model file needs --file"))?;
            let doc: Value = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::validation(format!("{} is not JSON: {e}", path.display())))?;
            let model = SpectralModel::from_json(&doc)?;
            model.require_dirac()?;
            Ok(model)
        }
    }
}

fn eta(args: &EtaArgs) -> Result<Outcome, CliError> {
    require(args.z.is_finite(), "--z must be finite")?;
    require(args.probe_t.iter().all(|&t| t.is_finite() && t > 0.0), "--probe-t values must be positive")?;
    let model = dirac_model(args)?;
    let hurwitz = |m: &SpectralModel, z: f64| match m.progressions() {
        Some(p) => Ok(eta_hurwitz(&p, z)?),
        None => Err(CliError::validation("the hurwitz route needs a generated model (--model circle)")),
    };
    let result = if args.z != 0.0 {
        require(
            matches!(args.route, RouteArg::Auto | RouteArg::Hurwitz | RouteArg::Series),
            "routes mellin and kroute evaluate z = 0 only",
        )?;
        require(args.h.is_none(), "--h applies to the kroute route only")?;
        let target = match &args.rho {
            Some(r) => project_isotypic(&model, &parse_character(r, model.group())?)?,
            None => model.clone(),
        };
        match args.route {
            RouteArg::Series => eta_series(&target, args.z)?,
            _ if target.families().is_some() => hurwitz(&target, args.z)?,
            _ => eta_series(&target, args.z)?,
        }
    } else if let (Some(r), None) = (&args.rho, args.h) {
        let rho = parse_character(r, model.group())?;
        let pref = match args.route {
            RouteArg::Auto => RoutePreference::Auto,
            RouteArg::Hurwitz => RoutePreference::Hurwitz,
            RouteArg::Mellin => RoutePreference::Mellin,
            RouteArg::Kroute => RoutePreference::Kroute,
            RouteArg::Series => RoutePreference::Series,
        };
        eta_isotypic_zero(&model, &rho, pref)?
    } else {
        let target = match &args.rho {
            Some(r) => project_isotypic(&model, &parse_character(r, model.group())?)?,
            None => model.clone(),
        };
        if args.h.is_some() {
            require(args.route == RouteArg::Kroute, "--h applies to the kroute route only")?;
        }
        match args.route {
            RouteArg::Hurwitz => hurwitz(&target, 0.0)?,
            RouteArg::Mellin => eta_zero_mellin(&target)?,
            RouteArg::Kroute => eta_zero_kroute(&target, args.h.unwrap_or(target.kernel().dim))?,
            RouteArg::Series => eta_series(&target, 0.0)?,
            RouteArg::Auto if target.families().is_some() => hurwitz(&target, 0.0)?,
            RouteArg::Auto if target.tail() == Tail::Finite => eta_series(&target, 0.0)?,
            RouteArg::Auto => eta_zero_mellin(&target)?,
        }
    };
    let mut out = eta_report(&result).diag("cutoff", model.cutoff());
    if !args.probe_t.is_empty() {
        let target = match &args.rho {
            Some(r) => project_isotypic(&model, &parse_character(r, model.group())?)?,
            None => model.clone(),
        };
        let mut probes = Vec::new();
        for &t in &args.probe_t {
            let alpha = alpha_trace(&target, t)?;
            let k = k_of_t(&target, t)?;
            let heat = heat_trace(&target, t)?;
            probes.push(json!({
                "t": t,
                "alpha": alpha.value,
                "alpha_tail_bound": alpha.tail_bound,
                "k": k.value,
                "k_tail_bound": k.tail_bound,
                "heat_trace": heat.value,
                "heat_tail_bound": heat.tail_bound,
                "k_prime_residual": k_prime_identity_residual(&target, t)?,
            }));
        }
        if let Value::Object(map) = &mut out.results {
            map.insert("probe".into(), Value::Array(probes));
        }
    }
    Ok(out)
}

fn lens_eta(args: &LensArgs) -> Result<Outcome, CliError> {
    let base = LensInput::new(args.m, args.ell.unwrap_or(0), &args.rot)?;
    let field_order = num_integer::lcm(args.m, 4);
    let den_bound = args.m * args.m;
    let reconstruct = |x: f64| rational_reconstruction(x, den_bound, 1e-9).map(|q| format_rational(&q));
    match args.ell {
        Some(_) => {
            let exact = lens_eta_exact(&base)?;
            let numeric = lens_eta_numeric(&base);
            let reality = lens_reality_residual(&base)?;
            let agreement = (numeric - exact.to_f64().unwrap_or(f64::NAN)).abs();
            let out = Outcome::new(json!({
                "input": base,
                "exact": format_rational(&exact),
                "numeric": numeric,
                "residual": reality.numeric,
                "exact_is_real": reality.exact_is_real,
                "agreement": agreement,
            }))
            .diag("field_order", field_order)
            .diag("reconstructed", reconstruct(numeric));
            Ok(check_lens(out, agreement, reality.numeric))
        }
        None => {
            let all = lens_eta_exact_all(&base)?;
            let mut rows = Vec::new();
            let mut worst = (0.0f64, 0.0f64);
            for (ell, exact) in all.iter().enumerate() {
                let input = LensInput::new(args.m, ell as i64, &args.rot)?;
                let numeric = lens_eta_numeric(&input);
                let reality = lens_reality_residual(&input)?;
                let agreement = (numeric - exact.to_f64().unwrap_or(f64::NAN)).abs();
                worst = (worst.0.max(agreement), worst.1.max(reality.numeric));
                rows.push(json!({
                    "ell": ell,
                    "exact": format_rational(exact),
                    "numeric": numeric,
                    "residual": reality.numeric,
                    "exact_is_real": reality.exact_is_real,
                }));
            }
            let out = Outcome::new(json!({
                "input": { "m": base.m(), "rotations": base.rotations() },
                "table": rows,
            }))
            .diag("field_order", field_order)
            .diag("max_agreement", worst.0)
            .diag("max_residual", worst.1);
            Ok(check_lens(out, worst.0, worst.1))
        }
    }
}

fn check_lens(mut out: Outcome, agreement: f64, residual: f64) -> Outcome {
    if !(agreement <= 1e-10 && residual <= 1e-12) {
        out.failure = Some(CliError::numeric(format!(
            "exact and numeric paths disagree: difference {agreement:e}, imaginary part {residual:e}"
        )));
    }
    out
}

#[derive(Deserialize)]
struct ActionDoc {
    order: u64,
    degrees: Vec<Vec<Vec<i64>>>,
}

fn table_json(table: &BTreeMap<IsotypeKey, i64>) -> Value {
    Value::Object(table.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn euler(args: &EulerArgs) -> Result<Outcome, CliError> {
    let action = match args.manifold {
        Manifold::Sphere => {
            let n = args.n.ok_or_else(|| CliError::validation("--manifold sphere needs --n"))?;
            let mode = args.mode.ok_or_else(|| CliError::validation("--manifold sphere needs --mode"))?;
            let mode = match mode {
                SphereMode::Latitude => SphereAction::Latitude,
                SphereMode::Antipodal => SphereAction::Antipodal,
            };
            let rhos: Vec<(&str, SphereCharacter)> = match args.rho.as_deref() {
                None => vec![("trivial", SphereCharacter::Trivial), ("xi", SphereCharacter::Xi)],
                Some("trivial") => vec![("trivial", SphereCharacter::Trivial)],
                Some("xi") => vec![("xi", SphereCharacter::Xi)],
                Some(other) => return Err(CliError::validation(format!("sphere characters are trivial and xi, got {other:?}"))),
            };
            let mut table = Map::new();
            for (name, rho) in rhos {
                table.insert(name.into(), json!(euler_sphere(n, mode, rho)?));
            }
            return Ok(Outcome::new(json!({ "n": n, "mode": format!("{mode:?}").to_lowercase(), "table": table })));
        }
        Manifold::Torus => {
            require(args.n.is_none() && args.mode.is_none(), "--n and --mode apply to spheres")?;
            torus_z4_action()
        }
        Manifold::Action => {
            let path = args.action_file.as_ref().ok_or_else(|| CliError::validation("--manifold action needs --action-file"))?;
            let doc: ActionDoc = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            CohomologyAction::from_integer_matrices(doc.order, &doc.degrees)?
        }
    };
    let group = FiniteAbelianGroup::cyclic(action.order())?;
    let mut results = Map::new();
    results.insert("order".into(), json!(action.order()));
    results.insert("betti".into(), json!(action.betti()));
    results.insert("euler_characteristic".into(), json!(action.euler_characteristic()));
    match &args.rho {
        Some(r) => {
            let rho = parse_character(r, &group)?;
            results.insert("rho".into(), json!(rho.key().to_string()));
            results.insert("value".into(), json!(euler_from_action(&action, &rho)?));
        }
        None => {
            let table = euler_table(&action)?;
            results.insert("sum".into(), json!(table.values().sum::<i64>()));
            results.insert("table".into(), table_json(&table));
        }
    }
    Ok(Outcome::new(Value::Object(results)))
}

fn dolbeault(args: &DolbeaultArgs) -> Result<Outcome, CliError> {
    require(args.n >= 1, "--n must be positive")?;
    let trivial = args.rho == Triviality::Trivial;
    match args.j {
        Some(j) => Ok(Outcome::new(json!({
            "n": args.n, "j": j, "trivial": trivial, "index": dolbeault_index_cpn(args.n, j, trivial)?,
        }))),
        None => {
            let table: Vec<i64> =
                (0..=args.n).map(|j| dolbeault_index_cpn(args.n, j, trivial)).collect::<Result<_, _>>()?;
            Ok(Outcome::new(json!({ "n": args.n, "trivial": trivial, "index_by_j": table })))
        }
    }
}

/// Heat-trace samples of a built-in model, with the largest tail bound seen.
pub fn trace_samples(
    model: &SpectralModel,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<(HeatSamples, f64), CliError> {
    let mut worst_tail = 0.0f64;
    let samples = HeatSamples::geometric(lo, hi, points, |t| {
        let v = heat_trace(model, t)?;
        worst_tail = worst_tail.max(v.tail_bound / v.value.abs().max(1.0));
        Ok(v.value)
    })?;
    Ok((samples, worst_tail))
}

fn heat_fit(args: &HeatFitArgs) -> Result<Outcome, CliError> {
    require(args.i_min <= args.i_max, "--i-min must not exceed --i-max")?;
    let (samples, mut diag) = match (&args.samples, args.model) {
        (Some(path), None) => {
            let file = std::fs::File::open(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            (HeatSamples::from_csv(file)?, Map::new())
        }
        (None, Some(kind)) => {
            require(args.t_range.len() == 2, "--t-range takes two values lo,hi")?;
            let (lo, hi) = (args.t_range[0], args.t_range[1]);
            require(lo > 0.0 && hi > lo && hi <= 1.0, format!("--t-range needs 0 < lo < hi <= 1, got {lo},{hi}"))?;
            let cutoff = args.cutoff.unwrap_or_else(|| (46.0 / lo).sqrt().ceil());
            let mut model = match kind {
                TraceModel::CircleLaplacian => {
                    require(args.k >= 1, "--k must be at least 1")?;
                    build_circle_laplacian(args.k, cutoff)?
                }
                TraceModel::Circle => {
                    check_circle(args.a, args.k, cutoff)?;
                    build_circle_dirac(args.a, args.k, cutoff)?
                }
                TraceModel::Torus => build_torus_laplacian(cutoff)?,
            };
            if let Some(r) = &args.rho {
                model = project_isotypic(&model, &parse_character(r, model.group())?)?;
            }
            let (samples, tail) = trace_samples(&model, lo, hi, args.points)?;
            if let Some(path) = &args.write_samples {
                let file = std::fs::File::create(path)
                    .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
                samples.to_csv(file)?;
            }
            let mut d = Map::new();
            d.insert("cutoff".into(), json!(cutoff));
            d.insert("relative_tail_bound".into(), json!(tail));
            (samples, d)
        }
        _ => return Err(CliError::validation("give exactly one of --samples and --model")),
    };
    let fit = fit_expansion(&samples, args.i_min, args.i_max, args.j_max)?;
    let mut results = fit.to_json();
    if let Value::Object(map) = &mut results {
        map.insert("leading".into(), json!(fit.coeff(args.i_min, 0)));
        map.insert("max_log_coeff".into(), json!(fit.max_log_coeff()));
    }
    let negligible: Vec<String> =
        fit.terms.iter().filter(|t| t.negligible).map(|t| format!("({}, {})", t.i, t.j)).collect();
    diag.insert("negligible_terms".into(), json!(negligible));
    diag.insert("samples".into(), json!(samples.points().len()));
    Ok(Outcome { results, diagnostics: diag, failure: None })
}

fn mckean(args: &McKeanArgs) -> Result<Outcome, CliError> {
    require(!args.t.is_empty(), "--t needs at least one time")?;
    let paired: Vec<PairedLine> =
        args.paired.iter().map(|&mu| PairedLine { mu, multiplicity: 1, isotypes: BTreeMap::new() }).collect();
    let graded =
        GradedSpectralModel::new(FiniteAbelianGroup::trivial(), args.plus_ker, args.minus_ker, paired, BTreeMap::new())?;
    let values: Vec<f64> = args.t.iter().map(|&t| mckean_singer(&graded, t)).collect::<Result<_, _>>()?;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let index = values[0].round() as i64;
    let rows: Vec<Value> = args.t.iter().zip(&values).map(|(t, v)| json!({ "t": t, "supertrace": v })).collect();
    let mut out = Outcome::new(json!({ "index": index, "spread": spread, "values": rows }))
        .diag("kernel_difference", graded.index());
    if spread > 1e-10 || index != graded.index() {
        out.failure = Some(CliError::numeric(format!(
            "supertrace not constant: spread {spread:e}, rounded {index}, kernels give {}",
            graded.index()
        )));
    }
    Ok(out)
}

/// Index data on a synthetic cylinder over the circle with shift `a`: the
/// supertrace of a graded model with kernels `(1, 0)` minus `K(t)`, fitted on
/// `[1e-4, 1e-1]`, supplies `c0`; the boundary eta comes from Hurwitz.
pub fn aps_pipeline(a: f64) -> Result<(ApsData, f64), CliError> {
    check_circle(a, 1, 700.0)?;
    let boundary = build_circle_dirac(a, 1, 700.0)?;
    let graded = GradedSpectralModel::new(
        FiniteAbelianGroup::trivial(),
        1,
        0,
        vec![PairedLine { mu: 1.0, multiplicity: 2, isotypes: BTreeMap::new() }],
        BTreeMap::new(),
    )?;
    let samples = HeatSamples::geometric(1e-4, 1e-1, 40, |t| Ok(mckean_singer(&graded, t)? - k_of_t(&boundary, t)?.value))?;
    let fit = fit_expansion(&samples, -2, 2, 0)?;
    let c0 = fit.coeff(0, 0).expect("constant term in basis");
    let eta = eta_hurwitz(&boundary.progressions().expect("generated model"), 0.0)?.value;
    let data = ApsData { index: graded.index(), h: 0, eta_zero: eta, c0 };
    Ok((data, fit.condition))
}

fn aps_check(args: &ApsArgs) -> Result<Outcome, CliError> {
    if args.pipeline {
        let (data, condition) = aps_pipeline(args.a)?;
        let residual = aps_consistency(&data);
        let mut out = Outcome::new(json!({
            "index": data.index, "h": data.h, "eta": data.eta_zero, "c0": data.c0, "residual": residual,
        }))
        .diag("fit_condition", condition)
        .diag("tolerance", args.tol);
        if !(residual <= args.tol) {
            out.failure = Some(CliError::numeric(format!("pipeline residual {residual:e} exceeds {:e}", args.tol)));
        }
        return Ok(out);
    }
    let (index, eta, c0) = (args.index.unwrap(), args.eta.unwrap(), args.c0.unwrap());
    require(eta.is_finite() && c0.is_finite(), "--eta and --c0 must be finite")?;
    let data = ApsData { index, h: args.h, eta_zero: eta, c0 };
    Ok(Outcome::new(json!({ "index": index, "h": args.h, "eta": eta, "c0": c0, "residual": aps_consistency(&data) })))
}

fn weyl(args: &WeylArgs) -> Result<Outcome, CliError> {
    require(args.cutoff.is_finite() && args.cutoff >= 1.0, "--cutoff must be at least 1")?;
    let model = match args.model {
        TraceModel::Torus => build_torus_laplacian(args.cutoff)?,
        TraceModel::Circle => {
            check_circle(args.a, args.k, args.cutoff)?;
            build_circle_dirac(args.a, args.k, args.cutoff)?
        }
        TraceModel::CircleLaplacian => build_circle_laplacian(args.k.max(1), args.cutoff)?,
    };
    let fit = weyl_fit(&model)?;
    let counts: Vec<Value> = args
        .count
        .iter()
        .map(|&t| Ok(json!({ "threshold": t, "count": counting_function(&model, t)? })))
        .collect::<Result<_, CliError>>()?;
    Ok(Outcome::new(json!({
        "exponent": fit.exponent,
        "constant": fit.constant,
        "predicted": model.manifold_dim() as f64 / 2.0,
        "counts": counts,
    }))
    .diag("points", fit.points)
    .diag("cutoff", model.cutoff()))
}
