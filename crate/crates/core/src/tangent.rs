//! Position vector in the tangent basis, frame coefficients along a curve,
//! the closed-form components of the position vector, and tracing of
//! tangent-position curves as the zero set of `g(u, v) = φ·N̂`.
//!
//! Along a unit-speed curve the position splits as
//! `γ = λ φ_u + μ φ_v + ν N̂` with `ν = γ·N̂`. Differentiating gives
//! `γ' = A₁ φ_u + A₂ φ_v + A₃ N̂` and `γ'' = B₁ φ_u + B₂ φ_v + B₃ N̂`.
//! On a tangent-position curve `ν ≡ 0` and the `ν` terms below drop out;
//! elsewhere they keep `A₁ = u'`, `A₂ = v'`, `A₃ = 0` exact.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, SurfacePatch};
use crate::frame::{frenet, surface_curvatures, CurvatureReport, CurveSample, FrenetData};
use crate::geometry::{christoffel_jets, first_form, unit_normal, FirstForm, FormsBundle};
use crate::jet::{cross3, dot3, map3, scale3, Jet, Jet3};
use crate::Vec3;

/// `|g|` below this counts as being on the tangent-position locus.
pub const TANGENCY_TOL: f64 = 1e-8;

/// Corrector target for `|g|`.
pub const CORRECTOR_TOL: f64 = 1e-10;

pub const MAX_NEWTON: usize = 10;

/// `‖∇g‖` at or below this makes the locus singular.
pub const GRAD_MIN: f64 = 1e-8;

pub const DEFAULT_STEP: f64 = 0.01;

/// Closure is only tested after this many steps.
pub const MIN_CLOSURE_STEPS: usize = 10;

/// Bivariate jets of the moving frame `{φ_u, φ_v, N̂}` at a patch point.
///
/// With fourth-order patch jets, `phi` is valid to order 4, first partials
/// and the normal to order 3, second partials and `L, M, N` to order 2, and
/// the Christoffel symbols to order 2.
struct FrameJets {
    phi: Jet3,
    phi_u: Jet3,
    phi_v: Jet3,
    normal: Jet3,
    e: Jet,
    f: Jet,
    g: Jet,
    l: Jet,
    m: Jet,
    n: Jet,
    /// `[Γ₁₁, Γ₁₂, Γ₂₂]` as `[φ_u, φ_v]` components.
    gamma: [[Jet; 2]; 3],
}

impl FrameJets {
    fn at(patch: &SurfacePatch, u: f64, v: f64) -> Result<Self> {
        let phi = patch.jet(u, v)?;
        let phi_u = map3(&phi, Jet::d_x);
        let phi_v = map3(&phi, Jet::d_y);
        let phi_uu = map3(&phi_u, Jet::d_x);
        let phi_uv = map3(&phi_u, Jet::d_y);
        let phi_vv = map3(&phi_v, Jet::d_y);
        let raw = cross3(&phi_u, &phi_v);
        let norm2 = dot3(&raw, &raw);
        if !(norm2.value() > crate::geometry::DEGENERACY_THRESHOLD) {
            return Err(Error::DegeneratePoint { det: norm2.value() });
        }
        let normal = scale3(&raw, norm2.sqrt().recip());
        let e = dot3(&phi_u, &phi_u);
        let f = dot3(&phi_u, &phi_v);
        let g = dot3(&phi_v, &phi_v);
        Ok(Self {
            l: dot3(&phi_uu, &normal),
            m: dot3(&phi_uv, &normal),
            n: dot3(&phi_vv, &normal),
            gamma: christoffel_jets(&e, &f, &g),
            phi,
            phi_u,
            phi_v,
            normal,
            e,
            f,
            g,
        })
    }

    /// Jet of the tangency function `g = φ·N̂`, valid to order 3.
    fn tangency(&self) -> Jet {
        dot3(&self.phi, &self.normal)
    }
}

/// Jet of `g = φ·N̂` at `(u, v)`, valid to third order.
pub fn tangency_jet(patch: &SurfacePatch, u: f64, v: f64) -> Result<Jet> {
    Ok(FrameJets::at(patch, u, v)?.tangency())
}

/// `g(u, v) = φ(u, v)·N̂(u, v)`; zero exactly where the position vector lies
/// in the tangent plane.
pub fn tangency_residual(patch: &SurfacePatch, u: f64, v: f64) -> Result<f64> {
    let jet = eval_jet(patch, u, v)?;
    Ok(jet.value.dot(&unit_normal(&jet)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentDecomposition {
    pub lambda: f64,
    pub mu: f64,
    /// `γ·N̂`
    pub normal_component: f64,
    /// `‖γ − λφ_u − μφ_v − (γ·N̂)N̂‖`
    pub residual: f64,
}

impl TangentDecomposition {
    pub fn on_locus(&self) -> bool {
        self.normal_component.abs() < TANGENCY_TOL
    }
}

/// Solves `[E F; F G](λ, μ) = (φ·φ_u, φ·φ_v)` by 2×2 elimination.
pub fn decompose_position(patch: &SurfacePatch, u: f64, v: f64) -> Result<TangentDecomposition> {
    let jet = eval_jet(patch, u, v)?;
    let form = first_form(&jet)?;
    let normal = unit_normal(&jet)?;
    let p = jet.value;
    let (e, f, g) = (form.e.value, form.f.value, form.g.value);
    let det = form.det();
    let (bu, bv) = (p.dot(&jet.d_u), p.dot(&jet.d_v));
    let lambda = (g * bu - f * bv) / det;
    let mu = (e * bv - f * bu) / det;
    let nu = p.dot(&normal);
    let residual = (p - jet.d_u * lambda - jet.d_v * mu - normal * nu).norm();
    Ok(TangentDecomposition {
        lambda,
        mu,
        normal_component: nu,
        residual,
    })
}

/// `λ, μ, ν` and their first two arc-length derivatives along a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionPath {
    pub lambda: [f64; 3],
    pub mu: [f64; 3],
    pub nu: [f64; 3],
}

/// Arc-length jets of everything the frame coefficients consume.
struct PathJets {
    frame: FrameJets,
    du: Jet,
    dv: Jet,
}

impl PathJets {
    fn at(patch: &SurfacePatch, sample: &CurveSample) -> Result<Self> {
        let frame = FrameJets::at(patch, sample.u[0], sample.v[0])?;
        let [du, dv] = sample.parameter_jets();
        Ok(Self { frame, du, dv })
    }

    fn along(&self, j: &Jet) -> Jet {
        j.compose(&self.du, &self.dv)
    }

    fn along3(&self, j: &Jet3) -> Jet3 {
        map3(j, |c| self.along(c))
    }
}

fn decomposition_jets(p: &PathJets) -> [Jet; 3] {
    let f = &p.frame;
    let phi = p.along3(&f.phi);
    let phi_u = p.along3(&f.phi_u);
    let phi_v = p.along3(&f.phi_v);
    let (e, ff, g) = (p.along(&f.e), p.along(&f.f), p.along(&f.g));
    let inv_det = (e * g - ff * ff).recip();
    let (bu, bv) = (dot3(&phi, &phi_u), dot3(&phi, &phi_v));
    let lambda = (g * bu - ff * bv) * inv_det;
    let mu = (e * bv - ff * bu) * inv_det;
    let nu = dot3(&phi, &p.along3(&f.normal));
    [lambda, mu, nu]
}

/// `λ(s), μ(s), ν(s)` at a sample, differentiated through the Gram-system
/// solution with jets.
pub fn decomposition_path(patch: &SurfacePatch, sample: &CurveSample) -> Result<DecompositionPath> {
    let p = PathJets::at(patch, sample)?;
    let [l, m, n] = decomposition_jets(&p);
    let d = |j: &Jet| [j.deriv(0), j.deriv(1), j.deriv(2)];
    Ok(DecompositionPath {
        lambda: d(&l),
        mu: d(&m),
        nu: d(&n),
    })
}

/// Coefficients of `γ'` and `γ''` in the frame `{φ_u, φ_v, N̂}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a1_s: f64,
    pub a2_s: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    /// `u'λL + (v'λ + u'μ)M + v'μN`, the normal part of `γ'` contributed by
    /// `λ, μ` alone. Equals `A₃` on tangent-position curves.
    pub a3_tangency: f64,
}

pub fn frame_coefficients(
    patch: &SurfacePatch,
    sample: &CurveSample,
    path: &DecompositionPath,
) -> Result<FrameCoefficients> {
    let p = PathJets::at(patch, sample)?;
    let f = &p.frame;
    let lambda = Jet::from_derivatives(&path.lambda);
    let mu = Jet::from_derivatives(&path.mu);
    let nu = Jet::from_derivatives(&path.nu);
    let u1 = Jet::from_derivatives(&sample.u[1..]);
    let v1 = Jet::from_derivatives(&sample.v[1..]);
    let g = |row: usize, k: usize| p.along(&f.gamma[row][k]);
    let (e, ff, gg) = (p.along(&f.e), p.along(&f.f), p.along(&f.g));
    let (l, m, n) = (p.along(&f.l), p.along(&f.m), p.along(&f.n));

    // N̂' = w1 φ_u + w2 φ_v (Weingarten)
    let inv_det = (e * gg - ff * ff).recip();
    let w1 = (u1 * (ff * m - gg * l) + v1 * (ff * n - gg * m)) * inv_det;
    let w2 = (u1 * (ff * l - e * m) + v1 * (ff * m - e * n)) * inv_det;

    let mixed = v1 * lambda + u1 * mu;
    let a1 = lambda.d_x() + u1 * lambda * g(0, 0) + mixed * g(1, 0) + v1 * mu * g(2, 0) + nu * w1;
    let a2 = mu.d_x() + u1 * lambda * g(0, 1) + mixed * g(1, 1) + v1 * mu * g(2, 1) + nu * w2;
    let tangency = u1 * lambda * l + mixed * m + v1 * mu * n;
    let a3 = tangency + nu.d_x();

    let (a1_0, a2_0) = (a1.value(), a2.value());
    let (us, vs) = (sample.u[1], sample.v[1]);
    let sym = |row: usize, k: usize| f.gamma[row][k].value();
    let b1 = a1.deriv(1)
        + us * a1_0 * sym(0, 0)
        + (vs * a1_0 + us * a2_0) * sym(1, 0)
        + vs * sym(2, 0) * a2_0;
    let b2 = a2.deriv(1)
        + us * a1_0 * sym(0, 1)
        + (vs * a1_0 + us * a2_0) * sym(1, 1)
        + vs * sym(2, 1) * a2_0;
    let b3 = us * a1_0 * f.l.value() + (vs * a1_0 + us * a2_0) * f.m.value() + vs * a2_0 * f.n.value();

    Ok(FrameCoefficients {
        a1: a1_0,
        a2: a2_0,
        a3: a3.value(),
        a1_s: a1.deriv(1),
        a2_s: a2.deriv(1),
        b1,
        b2,
        b3,
        a3_tangency: tangency.value(),
    })
}

/// `λ(u'L + v'M) + μ(u'M + v'N)` at a sample, the product form of the
/// `λ/μ` ratio condition. Defined even where `u'M + v'N` vanishes.
pub fn ratio_identity_check(forms: &FormsBundle, sample: &CurveSample, decomp: &TangentDecomposition) -> f64 {
    let (us, vs) = (sample.u[1], sample.v[1]);
    let s = &forms.second;
    decomp.lambda * (us * s.l + vs * s.m) + decomp.mu * (us * s.m + vs * s.n)
}

/// Closed-form components of the position vector next to their direct
/// ambient dot products.
///
/// `rho` is the squared length `⟨γ, γ⟩`; `rho_norm` is `‖γ‖`. The binormal
/// component `b_comp` carries the `1/√(EG−F²)` factor that makes it the
/// component along the unit binormal; `b_comp_unnormalized` omits it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem31Report {
    pub rho: f64,
    pub rho_direct: f64,
    pub rho_norm: f64,
    pub t_comp: f64,
    pub t_comp_direct: f64,
    pub n_comp: Option<f64>,
    pub n_comp_direct: Option<f64>,
    pub b_comp: Option<f64>,
    pub b_comp_unnormalized: Option<f64>,
    pub b_comp_direct: Option<f64>,
}

impl Theorem31Report {
    /// `|closed − direct|` for ρ, ⟨t,γ⟩, ⟨n,γ⟩, ⟨b,γ⟩.
    pub fn residuals(&self) -> [Option<f64>; 4] {
        let diff = |a: Option<f64>, b: Option<f64>| Some((a? - b?).abs());
        [
            Some((self.rho - self.rho_direct).abs()),
            Some((self.t_comp - self.t_comp_direct).abs()),
            diff(self.n_comp, self.n_comp_direct),
            diff(self.b_comp, self.b_comp_direct),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().flatten().fold(0.0, |a, b| a.max(*b))
    }
}

pub fn theorem31_report(
    sample: &CurveSample,
    decomp: &TangentDecomposition,
    coeffs: &FrameCoefficients,
    form: &FirstForm,
    frenet: Option<&FrenetData>,
) -> Theorem31Report {
    let (lambda, mu) = (decomp.lambda, decomp.mu);
    let (e, f, g) = (form.e.value, form.f.value, form.g.value);
    let det = form.det();
    let c = coeffs;
    let gamma = sample.position();
    let rho = lambda * lambda * e + 2.0 * lambda * mu * f + mu * mu * g;
    let t_comp = lambda * c.a1 * e + (lambda * c.a2 + mu * c.a1) * f + mu * c.a2 * g;
    let mut report = Theorem31Report {
        rho,
        rho_direct: gamma.dot(&gamma),
        rho_norm: rho.max(0.0).sqrt(),
        t_comp,
        t_comp_direct: sample.dgamma().dot(&gamma),
        n_comp: None,
        n_comp_direct: None,
        b_comp: None,
        b_comp_unnormalized: None,
        b_comp_direct: None,
    };
    if let Some(fr) = frenet {
        let k = fr.kappa;
        report.n_comp = Some((lambda * c.b1 * e + (lambda * c.b2 + mu * c.b1) * f + mu * c.b2 * g) / k);
        report.n_comp_direct = Some(fr.n.dot(&gamma));
        let raw = (c.a1 * c.b3 * mu * (f * f - e * g) + c.a2 * c.b3 * lambda * (e * g - f * f)) / k;
        report.b_comp_unnormalized = Some(raw);
        report.b_comp = Some(raw / det.sqrt());
        report.b_comp_direct = Some(fr.b.dot(&gamma));
    }
    report
}

/// Binormal rebuilt from the frame coefficients, compared with `t × n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinormalCheck {
    /// `(A₁B₂−A₂B₁)(φ_u×φ_v) + A₁B₃(Fφ_u−Eφ_v) + A₂B₃(Gφ_u−Fφ_v)`,
    /// normalized, against `b`.
    pub unnormalized_normal: f64,
    /// Same with the normal term weighted by `(EG−F²) N̂`, which is exactly
    /// `κ√(EG−F²) b`.
    pub metric_weighted: f64,
}

pub fn binormal_formula_check(
    forms: &FormsBundle,
    coeffs: &FrameCoefficients,
    frenet: &FrenetData,
) -> BinormalCheck {
    let j = &forms.jet;
    let form = &forms.first;
    let (e, f, g) = (form.e.value, form.f.value, form.g.value);
    let c = coeffs;
    let tangential = (j.d_u * f - j.d_v * e) * (c.a1 * c.b3) + (j.d_u * g - j.d_v * f) * (c.a2 * c.b3);
    let cross = c.a1 * c.b2 - c.a2 * c.b1;
    let aligned = |x: Vec3| -> f64 {
        let norm = x.norm();
        if norm == 0.0 {
            return f64::INFINITY;
        }
        let x = x / norm;
        (x - frenet.b).norm().min((x + frenet.b).norm())
    };
    BinormalCheck {
        unnormalized_normal: aligned(j.d_u.cross(&j.d_v) * cross + tangential),
        metric_weighted: aligned(forms.second.normal * (cross * form.det()) + tangential),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicCurvature {
    /// `(B₁A₂ − B₂A₁)(F² − GE)`, built with the unnormalized normal.
    pub unnormalized: f64,
    /// `(A₁B₂ − A₂B₁)√(EG − F²)`, the geodesic curvature for the unit normal.
    pub normalized: f64,
}

/// The intrinsic expression for `κ_g`. Its unnormalized form equals
/// `+κ_g √(EG−F²)` with the normal oriented by `φ_u × φ_v`.
pub fn geodesic_curvature_formula(coeffs: &FrameCoefficients, form: &FirstForm) -> GeodesicCurvature {
    let c = coeffs;
    let (e, f, g) = (form.e.value, form.f.value, form.g.value);
    GeodesicCurvature {
        unnormalized: (c.b1 * c.a2 - c.b2 * c.a1) * (f * f - g * e),
        normalized: (c.a1 * c.b2 - c.a2 * c.b1) * form.det().sqrt(),
    }
}

/// Every per-sample quantity of this module in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleAnalysis {
    pub sample: CurveSample,
    pub forms: FormsBundle,
    pub decomposition: TangentDecomposition,
    pub path: DecompositionPath,
    pub coeffs: FrameCoefficients,
    pub frenet: Option<FrenetData>,
    pub curvatures: CurvatureReport,
    pub theorem31: Theorem31Report,
    pub geodesic: GeodesicCurvature,
    pub binormal: Option<BinormalCheck>,
    pub ratio_residual: f64,
}

pub fn analyze_sample(patch: &SurfacePatch, sample: &CurveSample) -> Result<SampleAnalysis> {
    let (u, v) = (sample.u[0], sample.v[0]);
    let forms = FormsBundle::at(patch, u, v)?;
    let decomposition = decompose_position(patch, u, v)?;
    let path = decomposition_path(patch, sample)?;
    let coeffs = frame_coefficients(patch, sample, &path)?;
    let frenet = match frenet(sample) {
        Ok(f) => Some(f),
        Err(Error::FrameUndefined { .. }) => None,
        Err(e) => return Err(e),
    };
    let curvatures = surface_curvatures(patch, sample)?;
    let theorem31 = theorem31_report(sample, &decomposition, &coeffs, &forms.first, frenet.as_ref());
    let geodesic = geodesic_curvature_formula(&coeffs, &forms.first);
    let binormal = frenet.as_ref().map(|f| binormal_formula_check(&forms, &coeffs, f));
    let ratio_residual = ratio_identity_check(&forms, sample, &decomposition);
    Ok(SampleAnalysis {
        sample: *sample,
        forms,
        decomposition,
        path,
        coeffs,
        frenet,
        curvatures,
        theorem31,
        geodesic,
        binormal,
        ratio_residual,
    })
}

// ---------------------------------------------------------------------------
// Tracing

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Predictor step in parameter units.
    pub h: f64,
    pub max_steps: usize,
    /// Number of unit-speed samples; defaults to the vertex count.
    pub samples: Option<usize>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            max_steps: 10_000,
            samples: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    Closed,
    DomainExit,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracedCurve {
    pub h: f64,
    pub vertices: Vec<[f64; 2]>,
    /// `|g|` at each vertex after correction.
    pub residuals: Vec<f64>,
    /// Arc length at each vertex.
    pub arc_length: Vec<f64>,
    /// Total length, including the closing segment of a closed curve.
    pub length: f64,
    pub closed: bool,
    pub status: TraceStatus,
    pub samples: Vec<CurveSample>,
    /// Unit parameter-space direction of travel at each vertex.
    directions: Vec<[f64; 2]>,
}

impl TracedCurve {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, b| a.max(*b))
    }
}

fn value_and_gradient(patch: &SurfacePatch, p: [f64; 2]) -> Result<(f64, [f64; 2], Jet)> {
    let g = tangency_jet(patch, p[0], p[1])?;
    Ok((g.value(), [g.partial(1, 0), g.partial(0, 1)], g))
}

fn norm2(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Newton along `∇g` from `start`; `None` if it does not reach
/// `CORRECTOR_TOL` within `MAX_NEWTON` steps.
fn newton_to_locus(patch: &SurfacePatch, start: [f64; 2]) -> Result<Option<[f64; 2]>> {
    let mut p = start;
    for _ in 0..=MAX_NEWTON {
        let (g, grad, _) = value_and_gradient(patch, p)?;
        if g.abs() < CORRECTOR_TOL {
            return Ok(Some(p));
        }
        let gn = grad[0] * grad[0] + grad[1] * grad[1];
        if gn.sqrt() <= GRAD_MIN {
            return Ok(None);
        }
        p = [p[0] - g * grad[0] / gn, p[1] - g * grad[1] / gn];
        if !patch.domain().contains(p[0], p[1]) {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Moves a seed onto the locus, classifying failures.
pub fn correct_seed(patch: &SurfacePatch, seed: [f64; 2]) -> Result<[f64; 2]> {
    let mut p = seed;
    let mut steps: Vec<[f64; 2]> = Vec::new();
    for iter in 0..=MAX_NEWTON {
        let (g, grad, jet) = value_and_gradient(patch, p)?;
        let gnorm = norm2(grad);
        if g.abs() < CORRECTOR_TOL || (iter == MAX_NEWTON && g.abs() < TANGENCY_TOL) {
            if gnorm <= GRAD_MIN {
                let hess = [jet.partial(2, 0), jet.partial(1, 1), jet.partial(0, 2)];
                if hess.iter().all(|h| h.abs() <= GRAD_MIN) {
                    return Err(Error::IdenticallyTangent { u: p[0], v: p[1] });
                }
                return Err(Error::SingularLocus { u: p[0], v: p[1] });
            }
            return Ok(p);
        }
        if iter == MAX_NEWTON || gnorm <= GRAD_MIN {
            break;
        }
        let gn = gnorm * gnorm;
        let step = [-g * grad[0] / gn, -g * grad[1] / gn];
        let next = [p[0] + step[0], p[1] + step[1]];
        if !patch.domain().contains(next[0], next[1]) {
            return Err(Error::NoSeed);
        }
        steps.push(step);
        p = next;
    }
    // Linear convergence of Newton signals a multiple root: extrapolate the
    // geometric tail and look for a critical point of g on the locus.
    if let [.., a, b] = steps.as_slice() {
        let r = norm2(*b) / norm2(*a);
        if r < 1.0 {
            let k = r / (1.0 - r);
            let limit = [p[0] + b[0] * k, p[1] + b[1] * k];
            if patch.domain().contains(limit[0], limit[1]) {
                if let Ok((g, grad, _)) = value_and_gradient(patch, limit) {
                    if g.abs() < TANGENCY_TOL && norm2(grad) <= GRAD_MIN {
                        return Err(Error::SingularLocus {
                            u: limit[0],
                            v: limit[1],
                        });
                    }
                }
            }
        }
    }
    Err(Error::NoSeed)
}

/// Predictor-corrector continuation of the locus `g = 0` from `seed`.
pub fn trace_tangent_curve(
    patch: &SurfacePatch,
    seed: [f64; 2],
    opts: &TraceOptions,
) -> Result<TracedCurve> {
    let domain = *patch.domain();
    let h = opts.h;
    let start = correct_seed(patch, seed)?;
    let mut vertices = vec![start];
    let mut residuals = vec![value_and_gradient(patch, start)?.0.abs()];
    let mut directions: Vec<[f64; 2]> = Vec::new();
    let mut status = TraceStatus::MaxSteps;
    let mut p = start;
    let mut prev_dir: Option<[f64; 2]> = None;

    for step in 1..=opts.max_steps {
        let (_, grad, _) = value_and_gradient(patch, p)?;
        let gnorm = norm2(grad);
        if gnorm <= GRAD_MIN {
            return Err(Error::SingularLocus { u: p[0], v: p[1] });
        }
        let mut dir = [-grad[1] / gnorm, grad[0] / gnorm];
        if let Some(prev) = prev_dir {
            if dir[0] * prev[0] + dir[1] * prev[1] < 0.0 {
                dir = [-dir[0], -dir[1]];
            }
        }
        directions.push(dir);
        prev_dir = Some(dir);

        let predicted = [p[0] + h * dir[0], p[1] + h * dir[1]];
        if !domain.contains(predicted[0], predicted[1]) {
            status = TraceStatus::DomainExit;
            break;
        }
        let Some(next) = newton_to_locus(patch, predicted)? else {
            return Err(Error::CorrectorFailed { step });
        };
        if !domain.contains(next[0], next[1]) {
            status = TraceStatus::DomainExit;
            break;
        }
        if step >= MIN_CLOSURE_STEPS && domain.distance(next, start) < 0.5 * h {
            status = TraceStatus::Closed;
            break;
        }
        residuals.push(value_and_gradient(patch, next)?.0.abs());
        vertices.push(next);
        p = next;
    }
    // direction at the last vertex
    while directions.len() < vertices.len() {
        let last = *directions.last().unwrap_or(&[1.0, 0.0]);
        directions.push(last);
    }

    let closed = status == TraceStatus::Closed;
    let (arc_length, length) = vertex_arc_lengths(patch, &vertices, &directions, closed)?;
    let mut curve = TracedCurve {
        h,
        vertices,
        residuals,
        arc_length,
        length,
        closed,
        status,
        samples: Vec::new(),
        directions,
    };
    let count = opts.samples.unwrap_or(curve.vertices.len());
    curve.samples = resample(patch, &curve, count)?;
    Ok(curve)
}

/// Arc-length derivatives of the locus through `p`, travelling along
/// `direction`, as `[u, u', u'', u''']` and `[v, ...]`.
///
/// Solved order by order from `g(p(s)) ≡ 0` and `‖γ'(s)‖² ≡ 1`.
pub fn locus_derivatives(
    patch: &SurfacePatch,
    p: [f64; 2],
    direction: [f64; 2],
) -> Result<([f64; 4], [f64; 4])> {
    let frame = FrameJets::at(patch, p[0], p[1])?;
    let g = frame.tangency();
    let grad = [g.partial(1, 0), g.partial(0, 1)];
    if norm2(grad) <= GRAD_MIN {
        return Err(Error::SingularLocus { u: p[0], v: p[1] });
    }
    let (e, f, gg) = (frame.e.value(), frame.f.value(), frame.g.value());
    let t = [-grad[1], grad[0]];
    let q = (e * t[0] * t[0] + 2.0 * f * t[0] * t[1] + gg * t[1] * t[1]).sqrt();
    let mut p1 = [t[0] / q, t[1] / q];
    if p1[0] * direction[0] + p1[1] * direction[1] < 0.0 {
        p1 = [-p1[0], -p1[1]];
    }
    let phi_u = Vec3::new(frame.phi_u[0].value(), frame.phi_u[1].value(), frame.phi_u[2].value());
    let phi_v = Vec3::new(frame.phi_v[0].value(), frame.phi_v[1].value(), frame.phi_v[2].value());
    let gamma1 = phi_u * p1[0] + phi_v * p1[1];
    let mut cu = [0.0, p1[0], 0.0, 0.0];
    let mut cv = [0.0, p1[1], 0.0, 0.0];
    for k in 2..=3 {
        let du = Jet::from_taylor(&cu);
        let dv = Jet::from_taylor(&cv);
        let r_g = g.compose(&du, &dv).coeff(k, 0);
        let phi = map3(&frame.phi, |c| c.compose(&du, &dv));
        let dphi = map3(&phi, Jet::d_x);
        let r_s = dot3(&dphi, &dphi).coeff(k - 1, 0);
        let kk = 2.0 * k as f64;
        let m = [[grad[0], grad[1]], [kk * gamma1.dot(&phi_u), kk * gamma1.dot(&phi_v)]];
        let rhs = [-r_g, -r_s];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        cu[k] = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
        cv[k] = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
    }
    let d = |c: [f64; 4]| [p[0] * 0.0 + c[0], c[1], 2.0 * c[2], 6.0 * c[3]];
    let mut u = d(cu);
    let mut v = d(cv);
    u[0] = p[0];
    v[0] = p[1];
    Ok((u, v))
}

fn taylor_eval(d: &[f64; 4], s: f64) -> f64 {
    d[0] + s * (d[1] + s * (d[2] / 2.0 + s * d[3] / 6.0))
}

/// Cumulative arc length at each vertex from chords corrected by the local
/// curvature, `Δs ≈ c (1 + κ²c²/24)`.
fn vertex_arc_lengths(
    patch: &SurfacePatch,
    vertices: &[[f64; 2]],
    directions: &[[f64; 2]],
    closed: bool,
) -> Result<(Vec<f64>, f64)> {
    let positions: Vec<Vec3> = vertices
        .iter()
        .map(|p| patch.position(p[0], p[1]))
        .collect::<Result<_>>()?;
    let kappa: Vec<f64> = vertices
        .iter()
        .zip(directions)
        .map(|(p, d)| {
            let (u, v) = locus_derivatives(patch, *p, *d)?;
            let sample = CurveSample::from_parameter_derivatives(patch, 0.0, 0.0, u, v)?;
            Ok(sample.ddgamma().norm())
        })
        .collect::<Result<_>>()?;
    let seg = |i: usize, j: usize| {
        let c = (positions[j] - positions[i]).norm();
        let k = 0.5 * (kappa[i] + kappa[j]);
        c * (1.0 + k * k * c * c / 24.0)
    };
    let mut s = vec![0.0; vertices.len()];
    for i in 1..vertices.len() {
        s[i] = s[i - 1] + seg(i - 1, i);
    }
    let mut total = *s.last().unwrap_or(&0.0);
    if closed && vertices.len() > 1 {
        total += seg(vertices.len() - 1, 0);
    }
    Ok((s, total))
}

/// Unit-speed samples equally spaced in arc length along a traced curve.
fn resample(patch: &SurfacePatch, curve: &TracedCurve, count: usize) -> Result<Vec<CurveSample>> {
    let n = curve.vertices.len();
    if n < 2 || count == 0 {
        return Ok(Vec::new());
    }
    let span = if curve.closed { curve.length } else { curve.arc_length[n - 1] };
    let denom = if curve.closed { count } else { count.max(2) - 1 };
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let target = span * k as f64 / denom as f64;
        while seg + 1 < n && curve.arc_length[seg + 1] <= target {
            seg += 1;
        }
        let base = curve.vertices[seg];
        let dir = curve.directions[seg];
        let offset = target - curve.arc_length[seg];
        let (u, v) = locus_derivatives(patch, base, dir)?;
        let guess = [taylor_eval(&u, offset), taylor_eval(&v, offset)];
        let point = newton_to_locus(patch, guess)?.ok_or(Error::CorrectorFailed { step: seg })?;
        let (u, v) = locus_derivatives(patch, point, dir)?;
        out.push(CurveSample::from_parameter_derivatives(patch, target, target, u, v)?);
    }
    Ok(out)
}
