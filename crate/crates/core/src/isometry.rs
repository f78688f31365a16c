//! Coordinate-matched isometric patch pairs: `φ̄ = f∘φ` on a shared
//! parameter domain.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, Domain, SurfacePatch};
use crate::frame::CurveSample;
use crate::geometry::{first_form, second_form, FirstForm};
use crate::tangent::{
    decompose_position, decomposition_path, frame_coefficients, geodesic_curvature_formula,
    tangency_residual, TANGENCY_TOL,
};

/// Registration threshold on every metric and metric-derivative residual.
pub const METRIC_TOL: f64 = 1e-9;

pub const REGISTRATION_GRID: usize = 20;

/// `|λ − λ̄|`, `|μ − μ̄|` below this count as equal coordinates.
pub const COORDINATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// `f` is an orthogonal linear map of space.
    RigidOriginFixing,
    /// Only the metric is shared.
    Intrinsic,
}

impl PairKind {
    pub fn name(self) -> &'static str {
        match self {
            PairKind::RigidOriginFixing => "rigid-origin-fixing",
            PairKind::Intrinsic => "intrinsic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "rigid-origin-fixing" | "rigid" => Some(PairKind::RigidOriginFixing),
            "intrinsic" => Some(PairKind::Intrinsic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsometryPair {
    source: SurfacePatch,
    target: SurfacePatch,
    domain: Domain,
    kind: PairKind,
}

impl IsometryPair {
    /// Rejects the pair unless all nine metric residuals stay below
    /// [`METRIC_TOL`] on a 20×20 grid of the shared domain.
    pub fn register(source: SurfacePatch, target: SurfacePatch, kind: PairKind) -> Result<Self> {
        let domain = source
            .domain()
            .intersect(target.domain())
            .ok_or_else(|| Error::PairRejected("parameter domains do not overlap".into()))?;
        let pair = Self {
            source,
            target,
            domain,
            kind,
        };
        let check = verify_metric_match(&pair, REGISTRATION_GRID, REGISTRATION_GRID);
        if check.nodes == check.skipped.len() {
            return Err(Error::PairRejected("no regular grid node in the shared domain".into()));
        }
        let (label, worst) = check.worst();
        if !(worst < METRIC_TOL) {
            return Err(Error::PairRejected(format!(
                "metric mismatch: max |{label} - {label}bar| = {worst:e}"
            )));
        }
        Ok(pair)
    }

    pub fn source(&self) -> &SurfacePatch {
        &self.source
    }

    pub fn target(&self) -> &SurfacePatch {
        &self.target
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatch {
    /// Max absolute residuals in the order of [`MetricMatch::LABELS`].
    pub residuals: [f64; 9],
    pub nodes: usize,
    /// Grid nodes where either patch is degenerate.
    pub skipped: Vec<[f64; 2]>,
}

impl MetricMatch {
    pub const LABELS: [&'static str; 9] = ["E", "F", "G", "E_u", "F_u", "G_u", "E_v", "F_v", "G_v"];

    pub fn max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, b| a.max(*b))
    }

    fn worst(&self) -> (&'static str, f64) {
        let mut best = (Self::LABELS[0], self.residuals[0]);
        for (l, r) in Self::LABELS.iter().zip(self.residuals) {
            if r > best.1 || r.is_nan() {
                best = (l, r);
            }
        }
        best
    }
}

fn metric_values(form: &FirstForm) -> [f64; 9] {
    let (e, f, g) = (&form.e, &form.f, &form.g);
    [e.value, f.value, g.value, e.d_u, f.d_u, g.d_u, e.d_v, f.d_v, g.d_v]
}

fn form_at(patch: &SurfacePatch, u: f64, v: f64) -> Result<FirstForm> {
    first_form(&eval_jet(patch, u, v)?)
}

/// Compares `E, F, G` and their first partials on an `m × n` grid.
pub fn verify_metric_match(pair: &IsometryPair, m: usize, n: usize) -> MetricMatch {
    let mut residuals = [0.0f64; 9];
    let mut skipped = Vec::new();
    let mut nodes = 0;
    for u in pair.domain.u.nodes(m) {
        for v in pair.domain.v.nodes(n) {
            nodes += 1;
            let (Ok(a), Ok(b)) = (form_at(&pair.source, u, v), form_at(&pair.target, u, v)) else {
                skipped.push([u, v]);
                continue;
            };
            for (r, (x, y)) in residuals
                .iter_mut()
                .zip(metric_values(&a).into_iter().zip(metric_values(&b)))
            {
                *r = r.max((x - y).abs());
            }
        }
    }
    MetricMatch {
        residuals,
        nodes,
        skipped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFormRelation {
    /// `u'²(LM̄ − L̄M) + v'²(MN̄ − M̄N) + u'v'(LN̄ − L̄N)`
    pub residual: f64,
    /// Both points tangent-position with equal `λ, μ`.
    pub premise_holds: bool,
}

pub fn second_form_relation(pair: &IsometryPair, sample: &CurveSample) -> Result<SecondFormRelation> {
    let (u, v) = (sample.u[0], sample.v[0]);
    let a = second_form(&eval_jet(&pair.source, u, v)?)?;
    let b = second_form(&eval_jet(&pair.target, u, v)?)?;
    let (us, vs) = (sample.u[1], sample.v[1]);
    let residual = us * us * (a.l * b.m - b.l * a.m)
        + vs * vs * (a.m * b.n - b.m * a.n)
        + us * vs * (a.l * b.n - b.l * a.n);
    let da = decompose_position(&pair.source, u, v)?;
    let db = decompose_position(&pair.target, u, v)?;
    let premise_holds = da.on_locus()
        && db.on_locus()
        && (da.lambda - db.lambda).abs() < COORDINATE_TOL
        && (da.mu - db.mu).abs() < COORDINATE_TOL;
    Ok(SecondFormRelation {
        residual,
        premise_holds,
    })
}

/// One sample evaluated on both surfaces; barred fields belong to the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceSample {
    pub s: f64,
    pub u: f64,
    pub v: f64,
    pub rho: f64,
    pub rho_bar: f64,
    pub t_comp: f64,
    pub t_comp_bar: f64,
    pub kappa_g: f64,
    pub kappa_g_bar: f64,
    pub lambda: f64,
    pub mu: f64,
    pub lambda_bar: f64,
    pub mu_bar: f64,
    pub g: f64,
    pub g_bar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub kind: PairKind,
    pub samples: Vec<InvarianceSample>,
    pub max_rho_residual: f64,
    pub max_t_residual: f64,
    pub max_kappa_g_residual: f64,
    pub max_lambda_residual: f64,
    pub max_mu_residual: f64,
    /// max `|g|` along the source curve
    pub source_max_g: f64,
    /// max `|ḡ|` along the image curve
    pub target_max_g: f64,
    pub tangent_position_preserved: bool,
}

impl InvarianceReport {
    pub fn lambda_mu_match(&self) -> bool {
        self.max_lambda_residual < COORDINATE_TOL && self.max_mu_residual < COORDINATE_TOL
    }
}

struct SideValues {
    rho: f64,
    t_comp: f64,
    kappa_g: f64,
    lambda: f64,
    mu: f64,
    g: f64,
}

fn side_values(patch: &SurfacePatch, sample: &CurveSample) -> Result<SideValues> {
    let (u, v) = (sample.u[0], sample.v[0]);
    let gamma = sample.position();
    let d = decompose_position(patch, u, v)?;
    let path = decomposition_path(patch, sample)?;
    let coeffs = frame_coefficients(patch, sample, &path)?;
    let form = form_at(patch, u, v)?;
    Ok(SideValues {
        rho: gamma.dot(&gamma),
        t_comp: sample.dgamma().dot(&gamma),
        kappa_g: geodesic_curvature_formula(&coeffs, &form).normalized,
        lambda: d.lambda,
        mu: d.mu,
        g: d.normal_component,
    })
}

/// Evaluates `ρ`, `⟨t,γ⟩`, `κ_g`, `λ`, `μ` and `g` on both surfaces along the
/// same `(u(s), v(s))`. Samples are taken on the source patch.
pub fn invariance_report(pair: &IsometryPair, samples: &[CurveSample]) -> Result<InvarianceReport> {
    let mut out = Vec::with_capacity(samples.len());
    for sample in samples {
        let a = side_values(&pair.source, sample)?;
        let b = side_values(&pair.target, &sample.transfer(&pair.target)?)?;
        out.push(InvarianceSample {
            s: sample.s,
            u: sample.u[0],
            v: sample.v[0],
            rho: a.rho,
            rho_bar: b.rho,
            t_comp: a.t_comp,
            t_comp_bar: b.t_comp,
            kappa_g: a.kappa_g,
            kappa_g_bar: b.kappa_g,
            lambda: a.lambda,
            mu: a.mu,
            lambda_bar: b.lambda,
            mu_bar: b.mu,
            g: a.g,
            g_bar: b.g,
        });
    }
    let max = |f: &dyn Fn(&InvarianceSample) -> f64| out.iter().map(f).fold(0.0, f64::max);
    let target_max_g = max(&|x| x.g_bar.abs());
    Ok(InvarianceReport {
        kind: pair.kind,
        max_rho_residual: max(&|x| (x.rho - x.rho_bar).abs()),
        max_t_residual: max(&|x| (x.t_comp - x.t_comp_bar).abs()),
        max_kappa_g_residual: max(&|x| (x.kappa_g - x.kappa_g_bar).abs()),
        max_lambda_residual: max(&|x| (x.lambda - x.lambda_bar).abs()),
        max_mu_residual: max(&|x| (x.mu - x.mu_bar).abs()),
        source_max_g: max(&|x| x.g.abs()),
        tangent_position_preserved: target_max_g < TANGENCY_TOL,
        target_max_g,
        samples: out,
    })
}

/// max `|φ̄·N̄|` along the image of the sampled source curve.
pub fn tangent_position_preservation(pair: &IsometryPair, samples: &[CurveSample]) -> Result<f64> {
    samples.iter().try_fold(0.0f64, |acc, s| {
        Ok(acc.max(tangency_residual(&pair.target, s.u[0], s.v[0])?.abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::frame::reparametrize_arclength;

    #[test]
    fn catenoid_helicoid_metrics_match() {
        let pair = IsometryPair::register(builtin::catenoid(), builtin::helicoid(), PairKind::Intrinsic).unwrap();
        let m = verify_metric_match(&pair, 20, 20);
        assert!(m.max() < 1e-10, "{:?}", m.residuals);
        assert!(m.skipped.is_empty());
        assert_eq!(m.nodes, 400);
    }

    #[test]
    fn identity_pair_is_exact() {
        let c = builtin::cone();
        let pair = IsometryPair::register(c.clone(), c.clone(), PairKind::RigidOriginFixing).unwrap();
        assert_eq!(verify_metric_match(&pair, 7, 5).max(), 0.0);
        let samples = reparametrize_arclength(&c, &builtin::cone_circle(1.2), 9).unwrap();
        let r = invariance_report(&pair, &samples).unwrap();
        assert_eq!(r.max_rho_residual, 0.0);
        assert_eq!(r.max_kappa_g_residual, 0.0);
        assert_eq!(r.max_lambda_residual, 0.0);
        for s in &samples {
            assert_eq!(second_form_relation(&pair, s).unwrap().residual, 0.0);
        }
        // the image is the source curve itself
        assert_eq!(tangent_position_preservation(&pair, &samples).unwrap(), r.source_max_g);
        assert!(r.source_max_g < 1e-15);
    }

    #[test]
    fn mismatched_metrics_are_rejected() {
        let err = IsometryPair::register(builtin::plane(), builtin::paraboloid(), PairKind::Intrinsic).unwrap_err();
        assert!(matches!(err, Error::PairRejected(_)));
    }

    #[test]
    fn rotated_cone_second_forms_agree() {
        let c = builtin::cone();
        let pair = IsometryPair::register(c.clone(), builtin::rotated_about_z(&c, 0.7), PairKind::RigidOriginFixing)
            .unwrap();
        for s in reparametrize_arclength(&c, &builtin::cone_ruling(0.4), 5).unwrap() {
            let rel = second_form_relation(&pair, &s).unwrap();
            assert!(rel.residual.abs() < 1e-10);
        }
    }

    #[test]
    fn plane_to_cylinder_breaks_tangent_position() {
        let pair = IsometryPair::register(builtin::plane(), builtin::cylinder(), PairKind::Intrinsic).unwrap();
        let samples = reparametrize_arclength(&builtin::plane(), &builtin::plane_circle(2.0), 20).unwrap();
        let r = invariance_report(&pair, &samples).unwrap();
        assert!(r.source_max_g < 1e-12);
        assert!(!r.tangent_position_preserved);
        for x in &r.samples {
            assert!((x.g_bar.abs() - 1.0).abs() < 1e-12);
        }
        assert!(r.max_kappa_g_residual < 1e-12);
        let rel = second_form_relation(&pair, &samples[3]).unwrap();
        assert!(!rel.premise_holds);
    }
}
