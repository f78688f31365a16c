//! Unit-speed sampling of surface curves, Frenet frames and the
//! geodesic/normal split of the curvature vector.

use crate::error::{Error, Result};
use crate::expr::{chain_rule, eval_jet, Curve, SurfacePatch};
use crate::geometry::unit_normal;
use crate::jet::Jet;
use crate::Vec3;

/// Frenet frames are refused at or below this curvature.
pub const KAPPA_MIN: f64 = 1e-9;

/// Curves slower than this in their own parameter are irregular.
pub const MIN_SPEED: f64 = 1e-10;

/// Absolute tolerance of the arc-length quadrature.
pub const LENGTH_TOL: f64 = 1e-10;

/// Tolerance in `t` of the arc-length inversion.
pub const INVERSION_TOL: f64 = 1e-12;

/// A point of a unit-speed surface curve.
///
/// `u[k]`, `v[k]` are the k-th arc-length derivatives of the parameters and
/// `gamma[k]` the k-th arc-length derivative of the ambient point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub s: f64,
    pub t_param: f64,
    pub u: [f64; 4],
    pub v: [f64; 4],
    pub gamma: [Vec3; 4],
}

impl CurveSample {
    /// Builds a sample from arc-length derivatives of `(u, v)`.
    pub fn from_parameter_derivatives(
        patch: &SurfacePatch,
        s: f64,
        t_param: f64,
        u: [f64; 4],
        v: [f64; 4],
    ) -> Result<Self> {
        let jet = eval_jet(patch, u[0], v[0])?;
        Ok(Self {
            s,
            t_param,
            u,
            v,
            gamma: chain_rule(&jet, &u, &v),
        })
    }

    /// Same parameter curve, evaluated on another patch.
    pub fn transfer(&self, patch: &SurfacePatch) -> Result<Self> {
        Self::from_parameter_derivatives(patch, self.s, self.t_param, self.u, self.v)
    }

    pub fn position(&self) -> Vec3 {
        self.gamma[0]
    }

    pub fn dgamma(&self) -> Vec3 {
        self.gamma[1]
    }

    pub fn ddgamma(&self) -> Vec3 {
        self.gamma[2]
    }

    pub fn dddgamma(&self) -> Vec3 {
        self.gamma[3]
    }

    /// `(u(s), v(s))` as univariate jets in the arc-length offset, exact to
    /// third order.
    pub fn parameter_jets(&self) -> [Jet; 2] {
        [Jet::from_derivatives(&self.u), Jet::from_derivatives(&self.v)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub t: Vec3,
    pub n: Vec3,
    pub b: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub kappa_g: f64,
    pub kappa_n: f64,
}

fn simpson_step<F>(
    f: &mut F,
    (a, fa): (f64, f64),
    (b, fb): (f64, f64),
    (m, fm): (f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, (a, fa), (m, fm), (lm, flm), left, 0.5 * tol, depth - 1)?
        + simpson_step(f, (m, fm), (b, fb), (rm, frm), right, 0.5 * tol, depth - 1)?)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute `tol`.
///
/// The interval is first cut into a few panels so periodic integrands
/// cannot fool the initial error estimate.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    const PANELS: usize = 8;
    if a == b {
        return Ok(0.0);
    }
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    let mut x0 = a;
    let mut f0 = f(a)?;
    for k in 1..=PANELS {
        let x1 = if k == PANELS { b } else { a + h * k as f64 };
        let f1 = f(x1)?;
        let m = 0.5 * (x0 + x1);
        let fm = f(m)?;
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += simpson_step(&mut f, (x0, f0), (x1, f1), (m, fm), whole, tol / PANELS as f64, 40)?;
        x0 = x1;
        f0 = f1;
    }
    Ok(total)
}

/// Ambient speed `‖dγ/dt‖` of `curve` on `patch`.
pub fn speed(patch: &SurfacePatch, curve: &Curve, t: f64) -> Result<f64> {
    let [u, v] = curve.jets(t)?;
    if !patch.domain().contains(u.value(), v.value()) {
        return Err(Error::Domain {
            u: u.value(),
            v: v.value(),
        });
    }
    let g = patch.eval_on(&u, &v)?;
    let sigma = Vec3::new(g[0].deriv(1), g[1].deriv(1), g[2].deriv(1)).norm();
    if sigma <= MIN_SPEED {
        return Err(Error::IrregularCurve { t, speed: sigma });
    }
    Ok(sigma)
}

fn arc_length(patch: &SurfacePatch, curve: &Curve, a: f64, b: f64) -> Result<f64> {
    adaptive_simpson(|t| speed(patch, curve, t), a, b, LENGTH_TOL)
}

/// Total length `∫‖dγ/dt‖dt` over the curve interval.
pub fn curve_length(patch: &SurfacePatch, curve: &Curve) -> Result<f64> {
    let i = curve.interval();
    arc_length(patch, curve, i.lo, i.hi)
}

/// Unit-speed sample at curve parameter `t`, labelled with arc length `s`.
///
/// The arc-length map `s(t)` is expanded from the speed jet and reverted as a
/// series, then composed with `(u(t), v(t))`: no differencing anywhere.
pub fn sample_at_parameter(
    patch: &SurfacePatch,
    curve: &Curve,
    t: f64,
    s: f64,
) -> Result<CurveSample> {
    let [u, v] = curve.jets(t)?;
    if !patch.domain().contains(u.value(), v.value()) {
        return Err(Error::Domain {
            u: u.value(),
            v: v.value(),
        });
    }
    let g = patch.eval_on(&u, &v)?;
    let dg = [g[0].d_x(), g[1].d_x(), g[2].d_x()];
    let sigma = crate::jet::dot3(&dg, &dg).sqrt();
    let sigma0 = sigma.value();
    if !(sigma0 > MIN_SPEED) {
        return Err(Error::IrregularCurve { t, speed: sigma0 });
    }
    // s(t0 + k) - s(t0) = b1 k + b2 k² + b3 k³
    let b1 = sigma.coeff(0, 0);
    let b2 = sigma.coeff(1, 0) / 2.0;
    let b3 = sigma.coeff(2, 0) / 3.0;
    let a1 = 1.0 / b1;
    let a2 = -b2 / b1.powi(3);
    let a3 = (2.0 * b2 * b2 - b1 * b3) / b1.powi(5);
    let k_of_s = Jet::from_taylor(&[0.0, a1, a2, a3]);
    let zero = Jet::constant(0.0);
    let us = u.compose(&k_of_s, &zero);
    let vs = v.compose(&k_of_s, &zero);
    let d = |j: &Jet| [j.deriv(0), j.deriv(1), j.deriv(2), j.deriv(3)];
    CurveSample::from_parameter_derivatives(patch, s, t, d(&us), d(&vs))
}

/// Samples the curve at `count` points equally spaced in arc length,
/// endpoints included.
pub fn reparametrize_arclength(
    patch: &SurfacePatch,
    curve: &Curve,
    count: usize,
) -> Result<Vec<CurveSample>> {
    let count = count.max(2);
    let interval = *curve.interval();
    curve.check_inside(patch.domain(), 4 * count)?;
    let total = curve_length(patch, curve)?;
    let mut out = Vec::with_capacity(count);
    out.push(sample_at_parameter(patch, curve, interval.lo, 0.0)?);
    let (mut t_prev, mut s_prev) = (interval.lo, 0.0);
    for k in 1..count {
        let target = total * k as f64 / (count - 1) as f64;
        let t = if k == count - 1 {
            interval.hi
        } else {
            invert_arc_length(patch, curve, t_prev, s_prev, target, interval.hi)?
        };
        let s = if k == count - 1 { total } else { target };
        out.push(sample_at_parameter(patch, curve, t, s)?);
        t_prev = t;
        s_prev = s;
    }
    Ok(out)
}

/// Solves `s(t) = target` on `[t_prev, t_max]` by Newton with bisection
/// fallback, where `s(t_prev) = s_prev`.
fn invert_arc_length(
    patch: &SurfacePatch,
    curve: &Curve,
    t_prev: f64,
    s_prev: f64,
    target: f64,
    t_max: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (t_prev, t_max);
    let mut t = (t_prev + (target - s_prev) / speed(patch, curve, t_prev)?).clamp(lo, hi);
    for _ in 0..200 {
        let f = s_prev + arc_length(patch, curve, t_prev, t)? - target;
        if f == 0.0 {
            return Ok(t);
        }
        if f < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - f / speed(patch, curve, t)?;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        t = next;
        if step < INVERSION_TOL || hi - lo < INVERSION_TOL {
            return Ok(t);
        }
    }
    Ok(t)
}

pub fn frenet(sample: &CurveSample) -> Result<FrenetData> {
    let t = sample.dgamma();
    let dd = sample.ddgamma();
    let kappa = dd.norm();
    if !(kappa > KAPPA_MIN) {
        return Err(Error::FrameUndefined { kappa });
    }
    let n = dd / kappa;
    let b = t.cross(&n);
    let tau = t.cross(&dd).dot(&sample.dddgamma()) / (kappa * kappa);
    Ok(FrenetData { t, n, b, kappa, tau })
}

/// `κ_g = γ''·(N̂×γ')` and `κ_n = γ''·N̂`.
pub fn surface_curvatures(patch: &SurfacePatch, sample: &CurveSample) -> Result<CurvatureReport> {
    let jet = eval_jet(patch, sample.u[0], sample.v[0])?;
    let normal = unit_normal(&jet)?;
    let dd = sample.ddgamma();
    Ok(CurvatureReport {
        kappa_g: dd.dot(&normal.cross(&sample.dgamma())),
        kappa_n: dd.dot(&normal),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use std::f64::consts::PI;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let r = adaptive_simpson(|x: f64| Ok(x.sin()), 0.0, PI, 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-11);
        let r = adaptive_simpson(|x: f64| Ok((2.0 * x).cos() + 1.0), 0.0, 2.0 * PI, 1e-12).unwrap();
        assert!((r - 2.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn lengths() {
        let l = curve_length(&builtin::plane(), &builtin::plane_circle(1.0)).unwrap();
        assert!((l - 2.0 * PI).abs() < 1e-9);
        let l = curve_length(&builtin::cone(), &builtin::cone_ruling(0.4)).unwrap();
        assert!((l - 2.0_f64.sqrt()).abs() < 1e-9);
        let l = curve_length(&builtin::unit_sphere(), &builtin::latitude(2.0 * PI / 3.0)).unwrap();
        assert!((l - PI * 3.0_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn samples_are_unit_speed_and_evenly_spaced() {
        let samples =
            reparametrize_arclength(&builtin::catenoid(), &builtin::azimuth_circle(0.3), 17).unwrap();
        let ds = samples[1].s - samples[0].s;
        for w in samples.windows(2) {
            assert!((w[1].s - w[0].s - ds).abs() < 1e-9);
        }
        for s in &samples {
            assert!((s.dgamma().norm() - 1.0).abs() < 1e-12);
            assert!(s.dgamma().dot(&s.ddgamma()).abs() < 1e-12);
        }
    }

    #[test]
    fn nonuniform_parametrization_is_inverted() {
        // u = t^2 + t on the plane: speed 2t + 1
        use crate::expr::{Curve, Interval};
        let c = Curve::parse("(t^2 + t, 0.5)", Interval::new(0.0, 1.0).unwrap()).unwrap();
        let samples = reparametrize_arclength(&builtin::plane(), &c, 5).unwrap();
        assert!((samples[4].s - 2.0).abs() < 1e-10);
        for s in &samples {
            // u(s) = s exactly when the plane is traversed at unit speed from u = 0
            assert!((s.u[0] - s.s).abs() < 1e-10);
            assert!((s.u[1] - 1.0).abs() < 1e-12);
            assert!(s.u[2].abs() < 1e-12 && s.u[3].abs() < 1e-12);
        }
    }

    #[test]
    fn arc_length_derivatives_match_finite_differences() {
        let patch = builtin::offset_sphere();
        use crate::expr::{Curve, Interval};
        let c = Curve::parse("(1.5 + 0.3*sin(t), 2*t)", Interval::new(0.0, 2.0).unwrap()).unwrap();
        let t = 0.9;
        let base = sample_at_parameter(&patch, &c, t, 0.0).unwrap();
        // step in s ↔ step in t through the speed
        let h = 1e-4;
        let sig = speed(&patch, &c, t).unwrap();
        let at = |dt: f64| sample_at_parameter(&patch, &c, t + dt, 0.0).unwrap();
        let (p, m) = (at(h / sig), at(-h / sig));
        let fd2 = (p.gamma[1] - m.gamma[1]) / (2.0 * h);
        assert!((fd2 - base.gamma[2]).norm() < 1e-6);
        let fd3 = (p.gamma[2] - m.gamma[2]) / (2.0 * h);
        assert!((fd3 - base.gamma[3]).norm() < 1e-5);
    }

    #[test]
    fn irregular_curve_rejected() {
        use crate::expr::{Curve, Interval};
        let c = Curve::parse("(0.5, 0.5)", Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(
            reparametrize_arclength(&builtin::plane(), &c, 4),
            Err(Error::IrregularCurve { .. })
        ));
    }

    #[test]
    fn frenet_of_plane_circle() {
        let samples = reparametrize_arclength(&builtin::plane(), &builtin::plane_circle(2.0), 9).unwrap();
        for s in &samples {
            let f = frenet(s).unwrap();
            assert!((f.kappa - 0.5).abs() < 1e-12);
            assert!(f.tau.abs() < 1e-12);
            assert!((f.b - Vec3::z()).norm() < 1e-12);
            let c = surface_curvatures(&builtin::plane(), s).unwrap();
            assert!((c.kappa_g - 0.5).abs() < 1e-12);
            assert!(c.kappa_n.abs() < 1e-12);
        }
    }

    #[test]
    fn straight_ruling_has_no_frame() {
        let samples = reparametrize_arclength(&builtin::cone(), &builtin::cone_ruling(0.2), 4).unwrap();
        assert!(matches!(frenet(&samples[1]), Err(Error::FrameUndefined { .. })));
    }

    #[test]
    fn helix_on_cylinder() {
        let samples =
            reparametrize_arclength(&builtin::cylinder(), &builtin::cylinder_helix(), 7).unwrap();
        for s in &samples {
            let f = frenet(s).unwrap();
            assert!((f.kappa - 0.5).abs() < 1e-12);
            assert!((f.tau - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_latitude_curvatures() {
        let theta = 2.0 * PI / 3.0;
        let patch = builtin::unit_sphere();
        let samples = reparametrize_arclength(&patch, &builtin::latitude(theta), 9).unwrap();
        for s in &samples {
            let c = surface_curvatures(&patch, s).unwrap();
            assert!((c.kappa_g.abs() - 1.0 / 3.0_f64.sqrt()).abs() < 1e-12);
            assert!((c.kappa_n.abs() - 1.0).abs() < 1e-12);
            // outward normal: the curvature vector points inward
            assert!(c.kappa_n < 0.0);
        }
        let great = reparametrize_arclength(&patch, &builtin::latitude(PI / 2.0), 9).unwrap();
        for s in &great {
            let c = surface_curvatures(&patch, s).unwrap();
            assert!(c.kappa_g.abs() < 1e-9);
            assert!((c.kappa_n.abs() - 1.0).abs() < 1e-12);
        }
    }
}
