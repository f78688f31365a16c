use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use tancurve::expr::SurfacePatch;
use tancurve::frame::{reparametrize_arclength, CurveSample, KAPPA_MIN};
use tancurve::geometry::{christoffel_cross_check, FormsBundle};
use tancurve::isometry::{
    invariance_report, second_form_relation, verify_metric_match, MetricMatch, PairKind,
};
use tancurve::tangent::{
    analyze_sample, decompose_position, trace_tangent_curve, SampleAnalysis, TraceOptions, TracedCurve,
    TANGENCY_TOL,
};

use crate::output::{json_num, to_json_text, Cell, Table};
use crate::scene::{Scene, TraceDef};
use crate::{svg, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Thm31,
    Thm32,
    Gauss,
    All,
}

pub struct Context<'a> {
    pub scene: &'a Scene,
    pub format: Option<Format>,
    pub h: Option<f64>,
    pub grid: Option<(usize, usize)>,
}

/// Result of a command: text for stdout plus files for `--out`.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub files: Vec<(String, String)>,
    pub failed: bool,
}

impl Report {
    fn single(name: String, text: String) -> Self {
        Report {
            stdout: text.clone(),
            files: vec![(name, text)],
            failed: false,
        }
    }
}

fn render(table: &Table, format: Format, extra: impl FnOnce(Value) -> Value) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json_text(&extra(table.to_json())),
    }
}

impl Context<'_> {
    fn fmt(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn samples_for(&self, name: &str, count: Option<usize>) -> Result<(String, Vec<CurveSample>), CliError> {
        let count = count.unwrap_or(self.scene.options.samples);
        if let Some(def) = self.scene.curves.get(name) {
            let patch = self.scene.surface(&def.surface)?;
            let samples = reparametrize_arclength(patch, &def.curve, count)?;
            return Ok((def.surface.clone(), samples));
        }
        if let Some(def) = self.scene.traces.get(name) {
            let mut opts = self.trace_options(def);
            opts.samples = Some(count);
            let patch = self.scene.surface(&def.surface)?;
            let traced = trace_tangent_curve(patch, def.seed, &opts)?;
            return Ok((def.surface.clone(), traced.samples));
        }
        Err(CliError::Load(format!("curve not found: {name}")))
    }

    fn trace_options(&self, def: &TraceDef) -> TraceOptions {
        let mut opts = def.options;
        if let Some(h) = self.h {
            opts.h = h;
        }
        opts
    }

    fn grid(&self) -> (usize, usize) {
        self.grid.unwrap_or(self.scene.options.grid)
    }
}

const FORMS_HEADER: [&str; 15] = [
    "surface", "u", "v", "E", "F", "G", "L", "M", "N", "Gamma1_11", "Gamma1_12", "Gamma1_22", "Gamma2_11",
    "Gamma2_12", "Gamma2_22",
];

pub fn forms(ctx: &Context, surface: &str, u: f64, v: f64) -> Result<Report, CliError> {
    let patch = ctx.scene.surface(surface)?;
    let b = FormsBundle::at(patch, u, v)?;
    let c = &b.christoffel;
    let mut t = Table::new(&FORMS_HEADER);
    t.push(&[
        Cell::Text(surface),
        u.into(),
        v.into(),
        b.first.e.value.into(),
        b.first.f.value.into(),
        b.first.g.value.into(),
        b.second.l.into(),
        b.second.m.into(),
        b.second.n.into(),
        c.get(0, 0, 0).into(),
        c.get(0, 0, 1).into(),
        c.get(0, 1, 1).into(),
        c.get(1, 0, 0).into(),
        c.get(1, 0, 1).into(),
        c.get(1, 1, 1).into(),
    ]);
    let format = ctx.fmt(Format::Csv);
    let text = render(&t, format, |rows| rows[0].clone());
    Ok(Report::single(format!("forms_{surface}.{}", format.ext()), text))
}

pub struct TraceRequest<'a> {
    pub name: Option<&'a str>,
    pub surface: Option<&'a str>,
    pub seed: Option<[f64; 2]>,
    pub max_steps: Option<usize>,
}

fn vertex_table(patch: &SurfacePatch, curve: &TracedCurve) -> Result<Table, CliError> {
    let mut t = Table::new(&["index", "s", "u", "v", "g", "lambda", "mu", "rho"]);
    for (i, p) in curve.vertices.iter().enumerate() {
        let d = decompose_position(patch, p[0], p[1])?;
        let f = FormsBundle::at(patch, p[0], p[1])?.first;
        let rho = d.lambda * d.lambda * f.e.value + 2.0 * d.lambda * d.mu * f.f.value + d.mu * d.mu * f.g.value;
        t.push(&[
            Cell::Int(i),
            curve.arc_length[i].into(),
            p[0].into(),
            p[1].into(),
            d.normal_component.into(),
            d.lambda.into(),
            d.mu.into(),
            rho.into(),
        ]);
    }
    Ok(t)
}

fn status_name(curve: &TracedCurve) -> &'static str {
    match curve.status {
        tancurve::tangent::TraceStatus::Closed => "closed",
        tancurve::tangent::TraceStatus::DomainExit => "domain-exit",
        tancurve::tangent::TraceStatus::MaxSteps => "max-steps",
    }
}

pub fn trace(ctx: &Context, req: &TraceRequest) -> Result<Report, CliError> {
    let scene = ctx.scene;
    let (label, surface, seed, mut opts) = match req.name {
        Some(name) => {
            let def = scene
                .traces
                .get(name)
                .ok_or_else(|| CliError::Load(format!("trace not found: {name}")))?;
            let seed = req.seed.unwrap_or(def.seed);
            (name.to_string(), req.surface.unwrap_or(&def.surface).to_string(), seed, ctx.trace_options(def))
        }
        None => {
            let surface = req
                .surface
                .ok_or_else(|| CliError::Load("trace needs a trace name or --surface and --seed".into()))?;
            let seed = req.seed.ok_or_else(|| CliError::Load("--seed is required with --surface".into()))?;
            let opts = TraceOptions {
                h: ctx.h.unwrap_or(scene.options.h),
                max_steps: scene.options.max_steps,
                samples: Some(scene.options.samples),
            };
            (surface.to_string(), surface.to_string(), seed, opts)
        }
    };
    if let Some(m) = req.max_steps {
        opts.max_steps = m;
    }
    let patch = scene.surface(&surface)?;
    let curve = trace_tangent_curve(patch, seed, &opts)?;
    let table = vertex_table(patch, &curve)?;
    let format = ctx.fmt(Format::Csv);
    let text = render(&table, format, |rows| {
        json!({
            "surface": surface,
            "seed": [json_num(seed[0]), json_num(seed[1])],
            "h": json_num(curve.h),
            "status": status_name(&curve),
            "closed": curve.closed,
            "length": json_num(curve.length),
            "max_g": json_num(curve.max_residual()),
            "vertices": rows,
        })
    });
    let plot = svg::trace_plot(patch.domain(), &curve.vertices, seed, curve.closed);
    Ok(Report {
        stdout: text.clone(),
        files: vec![
            (format!("trace_{label}.{}", format.ext()), text),
            (format!("trace_{label}.svg"), plot),
        ],
        failed: false,
    })
}

const THM31_HEADER: [&str; 19] = [
    "s",
    "u",
    "v",
    "g",
    "rho",
    "rho_direct",
    "rho_norm",
    "t_comp",
    "t_comp_direct",
    "n_comp",
    "n_comp_direct",
    "b_comp",
    "b_comp_direct",
    "b_comp_unnormalized",
    "kappa_g",
    "kappa_g_formula",
    "kappa_g_unnormalized",
    "a3",
    "max_residual",
];

fn analyses(patch: &SurfacePatch, samples: &[CurveSample]) -> Result<Vec<SampleAnalysis>, CliError> {
    samples
        .iter()
        .map(|s| analyze_sample(patch, s).map_err(CliError::from))
        .collect()
}

pub fn report_thm31(ctx: &Context, name: &str, samples: Option<usize>) -> Result<Report, CliError> {
    let (surface, samples) = ctx.samples_for(name, samples)?;
    let patch = ctx.scene.surface(&surface)?;
    let all = analyses(patch, &samples)?;
    let mut t = Table::new(&THM31_HEADER);
    let (mut max_g, mut max_res) = (0.0f64, 0.0f64);
    for a in &all {
        let r = &a.theorem31;
        let g = a.decomposition.normal_component;
        max_g = max_g.max(g.abs());
        max_res = max_res.max(r.max_residual());
        t.push(&[
            a.sample.s.into(),
            a.sample.u[0].into(),
            a.sample.v[0].into(),
            g.into(),
            r.rho.into(),
            r.rho_direct.into(),
            r.rho_norm.into(),
            r.t_comp.into(),
            r.t_comp_direct.into(),
            r.n_comp.into(),
            r.n_comp_direct.into(),
            r.b_comp.into(),
            r.b_comp_direct.into(),
            r.b_comp_unnormalized.into(),
            a.curvatures.kappa_g.into(),
            a.geodesic.normalized.into(),
            a.geodesic.unnormalized.into(),
            a.coeffs.a3_tangency.into(),
            r.max_residual().into(),
        ]);
    }
    let format = ctx.fmt(Format::Csv);
    let text = render(&t, format, |rows| {
        json!({
            "curve": name,
            "surface": surface,
            "tangent_position": max_g < TANGENCY_TOL,
            "max_g": json_num(max_g),
            "max_residual": json_num(max_res),
            "samples": rows,
        })
    });
    Ok(Report::single(format!("thm31_{name}.{}", format.ext()), text))
}

#[derive(Debug, Clone)]
struct Check {
    name: String,
    residual: f64,
    threshold: f64,
    asserted: bool,
}

impl Check {
    fn asserted(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
            asserted: true,
        }
    }

    fn empirical(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            asserted: false,
            ..Check::asserted(name, residual, threshold)
        }
    }

    fn holds(&self) -> bool {
        self.residual < self.threshold
    }

    fn status(&self) -> &'static str {
        match (self.asserted, self.holds()) {
            (true, true) => "pass",
            (true, false) => "fail",
            (false, true) => "empirical: holds",
            (false, false) => "empirical: fails",
        }
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn gauss_checks(ctx: &Context, checks: &mut Vec<Check>) {
    let opts = &ctx.scene.options;
    for (k, (name, patch)) in ctx.scene.surfaces.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
        let d = patch.domain();
        let (mut gauss, mut chr) = (0.0f64, 0.0f64);
        for _ in 0..opts.points {
            let u = rng.random_range(d.u.lo..d.u.hi);
            let v = rng.random_range(d.v.lo..d.v.hi);
            let Ok(b) = FormsBundle::at(patch, u, v) else { continue };
            gauss = gauss.max(b.gauss_residual());
            chr = chr.max(christoffel_cross_check(&b.first).unwrap_or(f64::NAN));
        }
        checks.push(Check::asserted(format!("gauss/{name}"), gauss, 1e-8));
        checks.push(Check::asserted(format!("christoffel/{name}"), chr, 1e-10));
    }
}

fn curve_checks(label: &str, all: &[SampleAnalysis], tangent_position: bool, checks: &mut Vec<Check>) {
    let coeff = max_of(all.iter().map(|a| {
        let c = &a.coeffs;
        (c.a1 - a.sample.u[1])
            .abs()
            .max((c.a2 - a.sample.v[1]).abs())
            .max((c.b3 - a.curvatures.kappa_n).abs())
    }));
    checks.push(Check::asserted(format!("coefficients/{label}"), coeff, 1e-8));
    let pyth = max_of(all.iter().filter_map(|a| {
        let f = a.frenet.as_ref().filter(|f| f.kappa > KAPPA_MIN)?;
        let k = &a.curvatures;
        Some((k.kappa_g.powi(2) + k.kappa_n.powi(2) - f.kappa.powi(2)).abs())
    }));
    checks.push(Check::asserted(format!("curvature_pythagoras/{label}"), pyth, 1e-8));
    let kg = max_of(all.iter().map(|a| (a.geodesic.normalized - a.curvatures.kappa_g).abs()));
    checks.push(Check::asserted(format!("geodesic_curvature/{label}"), kg, 1e-8));
    let kg_raw = max_of(all.iter().map(|a| {
        let w = a.forms.first.det().sqrt();
        (a.geodesic.unnormalized - a.curvatures.kappa_g * w).abs()
    }));
    checks.push(Check::asserted(format!("geodesic_curvature_unnormalized/{label}"), kg_raw, 1e-8));
    if !tangent_position {
        return;
    }
    let a3 = max_of(all.iter().map(|a| a.coeffs.a3_tangency.abs()));
    checks.push(Check::asserted(format!("tangency_coefficient/{label}"), a3, 1e-8));
    let res = max_of(all.iter().map(|a| a.theorem31.max_residual()));
    checks.push(Check::asserted(format!("position_components/{label}"), res, 1e-7));
    let weighted = max_of(all.iter().filter_map(|a| a.binormal.map(|b| b.metric_weighted)));
    checks.push(Check::asserted(format!("binormal_metric_weighted/{label}"), weighted, 1e-7));
    let plain = max_of(all.iter().filter_map(|a| a.binormal.map(|b| b.unnormalized_normal)));
    checks.push(Check::empirical(format!("binormal_unnormalized_normal/{label}"), plain, 1e-7));
}

fn thm31_checks(ctx: &Context, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let scene = ctx.scene;
    for (name, def) in &scene.traces {
        let patch = scene.surface(&def.surface)?;
        let traced = trace_tangent_curve(patch, def.seed, &ctx.trace_options(def))?;
        checks.push(Check::asserted(format!("trace_vertices/{name}"), traced.max_residual(), 1e-8));
        let all = analyses(patch, &traced.samples)?;
        curve_checks(name, &all, true, checks);
    }
    for (name, def) in &scene.curves {
        let patch = scene.surface(&def.surface)?;
        let samples = reparametrize_arclength(patch, &def.curve, scene.options.samples)?;
        let all = analyses(patch, &samples)?;
        let tangent = all.iter().all(|a| a.decomposition.normal_component.abs() < TANGENCY_TOL);
        curve_checks(name, &all, tangent, checks);
    }
    Ok(())
}

fn thm32_checks(ctx: &Context, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let (m, n) = ctx.grid();
    for (name, def) in &ctx.scene.pairs {
        let metric = verify_metric_match(&def.pair, m, n);
        checks.push(Check::asserted(format!("metric/{name}"), metric.max(), 1e-9));
        let rigid = def.pair.kind() == PairKind::RigidOriginFixing;
        let extrinsic = |label: String, residual: f64, threshold: f64| {
            if rigid {
                Check::asserted(label, residual, threshold)
            } else {
                Check::empirical(label, residual, threshold)
            }
        };
        for curve in &def.curves {
            let (_, samples) = ctx.samples_for(curve, None)?;
            let r = invariance_report(&def.pair, &samples)?;
            let label = format!("{name}/{curve}");
            checks.push(Check::asserted(format!("kappa_g_invariance/{label}"), r.max_kappa_g_residual, 1e-7));
            checks.push(extrinsic(format!("rho_invariance/{label}"), r.max_rho_residual, 1e-9));
            checks.push(extrinsic(format!("tangential_component/{label}"), r.max_t_residual, 1e-9));
            checks.push(extrinsic(
                format!("lambda_mu/{label}"),
                r.max_lambda_residual.max(r.max_mu_residual),
                1e-9,
            ));
            if r.source_max_g < TANGENCY_TOL {
                let threshold = if rigid { 1e-9 } else { TANGENCY_TOL };
                checks.push(extrinsic(format!("tangent_position_preserved/{label}"), r.target_max_g, threshold));
            }
            let mut premise = Vec::new();
            let mut any = Vec::new();
            for s in &samples {
                let rel = second_form_relation(&def.pair, s)?;
                any.push(rel.residual.abs());
                if rel.premise_holds {
                    premise.push(rel.residual.abs());
                }
            }
            let check = if premise.is_empty() {
                Check::empirical(format!("second_form_relation/{label}"), max_of(any), 1e-8)
            } else {
                Check::asserted(format!("second_form_relation/{label}"), max_of(premise), 1e-8)
            };
            checks.push(check);
        }
    }
    Ok(())
}

pub fn verify(ctx: &Context, target: Target) -> Result<Report, CliError> {
    let mut checks = Vec::new();
    if matches!(target, Target::Gauss | Target::All) {
        gauss_checks(ctx, &mut checks);
    }
    if matches!(target, Target::Thm31 | Target::All) {
        thm31_checks(ctx, &mut checks)?;
    }
    if matches!(target, Target::Thm32 | Target::All) {
        thm32_checks(ctx, &mut checks)?;
    }
    let failed = checks.iter().any(|c| c.asserted && !c.holds());
    let mut t = Table::new(&["check", "max_residual", "threshold", "asserted", "status"]);
    for c in &checks {
        t.push(&[
            Cell::Text(&c.name),
            c.residual.into(),
            c.threshold.into(),
            Cell::Text(if c.asserted { "true" } else { "false" }),
            Cell::Text(c.status()),
        ]);
    }
    let target_name = match target {
        Target::Thm31 => "thm31",
        Target::Thm32 => "thm32",
        Target::Gauss => "gauss",
        Target::All => "all",
    };
    let format = ctx.fmt(Format::Json);
    let text = match format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let list: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "max_residual": json_num(c.residual),
                        "threshold": json_num(c.threshold),
                        "asserted": c.asserted,
                        "status": c.status(),
                    })
                })
                .collect();
            to_json_text(&json!({
                "target": target_name,
                "scene": ctx.scene.origin,
                "passed": !failed,
                "checks": list,
            }))
        }
    };
    Ok(Report {
        failed,
        ..Report::single(format!("verify_{target_name}.{}", format.ext()), text)
    })
}

fn metric_json(m: &MetricMatch) -> Value {
    let mut map = Map::new();
    for (label, r) in MetricMatch::LABELS.iter().zip(m.residuals) {
        map.insert((*label).to_string(), json_num(r));
    }
    map.insert("nodes".into(), Value::from(m.nodes));
    map.insert("skipped".into(), Value::from(m.skipped.len()));
    Value::Object(map)
}

const ISOMETRY_HEADER: [&str; 17] = [
    "curve",
    "s",
    "u",
    "v",
    "rho",
    "rho_bar",
    "t_comp",
    "t_comp_bar",
    "kappa_g",
    "kappa_g_bar",
    "lambda",
    "lambda_bar",
    "mu",
    "mu_bar",
    "g",
    "g_bar",
    "second_form_residual",
];

pub fn isometry(ctx: &Context, pair_name: &str, samples: Option<usize>) -> Result<Report, CliError> {
    let def = ctx
        .scene
        .pairs
        .get(pair_name)
        .ok_or_else(|| CliError::Load(format!("pair not found: {pair_name}")))?;
    let (m, n) = ctx.grid();
    let metric = verify_metric_match(&def.pair, m, n);
    let mut table = Table::new(&ISOMETRY_HEADER);
    let mut summaries = BTreeMap::new();
    for curve in &def.curves {
        let (_, s) = ctx.samples_for(curve, samples)?;
        let r = invariance_report(&def.pair, &s)?;
        let mut second = Vec::with_capacity(s.len());
        for (x, sample) in r.samples.iter().zip(&s) {
            let rel = second_form_relation(&def.pair, sample)?;
            second.push(rel);
            table.push(&[
                Cell::Text(curve),
                x.s.into(),
                x.u.into(),
                x.v.into(),
                x.rho.into(),
                x.rho_bar.into(),
                x.t_comp.into(),
                x.t_comp_bar.into(),
                x.kappa_g.into(),
                x.kappa_g_bar.into(),
                x.lambda.into(),
                x.lambda_bar.into(),
                x.mu.into(),
                x.mu_bar.into(),
                x.g.into(),
                x.g_bar.into(),
                rel.residual.into(),
            ]);
        }
        summaries.insert(
            curve.clone(),
            json!({
                "samples": s.len(),
                "max_rho_residual": json_num(r.max_rho_residual),
                "max_t_residual": json_num(r.max_t_residual),
                "max_kappa_g_residual": json_num(r.max_kappa_g_residual),
                "max_lambda_residual": json_num(r.max_lambda_residual),
                "max_mu_residual": json_num(r.max_mu_residual),
                "source_max_g": json_num(r.source_max_g),
                "target_max_g": json_num(r.target_max_g),
                "tangent_position_preserved": r.tangent_position_preserved,
                "lambda_mu_match": r.lambda_mu_match(),
                "second_form_max_residual": json_num(max_of(second.iter().map(|x| x.residual.abs()))),
                "second_form_premise_samples": second.iter().filter(|x| x.premise_holds).count(),
            }),
        );
    }
    let format = ctx.fmt(Format::Json);
    let text = render(&table, format, |rows| {
        json!({
            "pair": pair_name,
            "kind": def.pair.kind().name(),
            "source": def.source,
            "target": def.target,
            "grid": format!("{m}x{n}"),
            "metric": metric_json(&metric),
            "curves": summaries,
            "samples": rows,
        })
    });
    Ok(Report::single(format!("isometry_{pair_name}.{}", format.ext()), text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::num;

    fn ctx(scene: &Scene) -> Context<'_> {
        Context {
            scene,
            format: None,
            h: None,
            grid: None,
        }
    }

    #[test]
    fn cone_forms_row() {
        let scene = Scene::builtin().unwrap();
        let r = forms(&ctx(&scene), "cone", 0.0, 1.0).unwrap();
        let mut lines = r.stdout.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let get = |k: &str| row[header.iter().position(|h| *h == k).unwrap()].parse::<f64>().unwrap();
        assert_eq!(get("E"), 1.0);
        assert_eq!(get("G"), 2.0);
        assert!((get("Gamma1_12") - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plane_symbols_vanish() {
        let scene = Scene::builtin().unwrap();
        let r = forms(&ctx(&scene), "plane", 0.3, -0.2).unwrap();
        let row = r.stdout.lines().nth(1).unwrap();
        let gammas: Vec<f64> = row.split(',').skip(9).map(|x| x.parse().unwrap()).collect();
        assert_eq!(gammas, vec![0.0; 6]);
    }

    #[test]
    fn empirical_checks_do_not_fail_verification() {
        let c = Check::empirical("x", 1.0, 1e-9);
        assert_eq!(c.status(), "empirical: fails");
        assert_eq!(Check::asserted("y", 0.0, 1e-9).status(), "pass");
        assert_eq!(num(c.threshold), "1.0000000000000001e-9");
    }
}
