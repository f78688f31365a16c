//! Built-in test surfaces and curves with known closed-form geometry.

use std::f64::consts::PI;

use crate::expr::{Curve, Domain, Interval, SurfacePatch};

fn interval(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).expect("built-in interval")
}

fn patch(text: &str, domain: Domain) -> SurfacePatch {
    SurfacePatch::parse(text, domain).expect("built-in surface")
}

fn curve(text: &str, lo: f64, hi: f64) -> Curve {
    Curve::parse(text, interval(lo, hi)).expect("built-in curve")
}

/// Colatitude `θ ∈ (0, π)` first, azimuth `ψ` second (periodic).
fn sphere_domain() -> Domain {
    Domain::new(interval(0.05, PI - 0.05), interval(-PI, PI)).with_periodic(false, true)
}

fn azimuth_domain(vlo: f64, vhi: f64) -> Domain {
    Domain::new(interval(-PI, PI), interval(vlo, vhi)).with_periodic(true, false)
}

/// `(u, v, 0)`
pub fn plane() -> SurfacePatch {
    patch("(u, v, 0)", Domain::new(interval(-5.0, 5.0), interval(-5.0, 5.0)))
}

/// `(v cos u, v sin u, v)`, a cone through the origin.
pub fn cone() -> SurfacePatch {
    cone_with_domain(0.2, 3.0)
}

pub fn cone_with_domain(vlo: f64, vhi: f64) -> SurfacePatch {
    patch("(v*cos(u), v*sin(u), v)", azimuth_domain(vlo, vhi))
}

/// Unit sphere centered at the origin.
pub fn unit_sphere() -> SurfacePatch {
    patch("(sin(u)*cos(v), sin(u)*sin(v), cos(u))", sphere_domain())
}

/// Unit sphere centered at `(0, 0, 2)`; its tangent-position locus is the
/// circle of colatitude `2π/3`.
pub fn offset_sphere() -> SurfacePatch {
    patch("(sin(u)*cos(v), sin(u)*sin(v), 2 + cos(u))", sphere_domain())
}

/// `(cosh v cos u, cosh v sin u, v)`
pub fn catenoid() -> SurfacePatch {
    patch("(cosh(v)*cos(u), cosh(v)*sin(u), v)", azimuth_domain(-1.5, 1.5))
}

/// `(sinh v cos u, sinh v sin u, u)`, isometric to the catenoid in shared
/// coordinates.
pub fn helicoid() -> SurfacePatch {
    patch(
        "(sinh(v)*cos(u), sinh(v)*sin(u), u)",
        Domain::new(interval(-PI, PI), interval(-1.5, 1.5)),
    )
}

/// Unit cylinder `(cos u, sin u, v)`.
pub fn cylinder() -> SurfacePatch {
    patch("(cos(u), sin(u), v)", azimuth_domain(-5.0, 5.0))
}

/// `(u, v, u² + v²)`
pub fn paraboloid() -> SurfacePatch {
    patch("(u, v, u^2 + v^2)", Domain::new(interval(-2.0, 2.0), interval(-2.0, 2.0)))
}

/// The surface rotated by `angle` about the z-axis, same parameters.
pub fn rotated_about_z(surface: &SurfacePatch, angle: f64) -> SurfacePatch {
    let [x, y, z] = surface
        .components()
        .clone()
        .map(|e| e.to_string_with(&crate::expr::SURFACE_VARS));
    let (s, c) = angle.sin_cos();
    let text = format!(
        "(({c:?})*{x} - ({s:?})*{y}, ({s:?})*{x} + ({c:?})*{y}, {z})"
    );
    patch(&text, *surface.domain())
}

/// Counterclockwise circle of radius `r` about the origin of the plane.
pub fn plane_circle(r: f64) -> Curve {
    curve(&format!("({r:?}*cos(t), {r:?}*sin(t))"), 0.0, 2.0 * PI)
}

/// Parallel `v = v0` of the cone.
pub fn cone_circle(v0: f64) -> Curve {
    curve(&format!("(t, {v0:?})"), -PI, PI)
}

/// Ruling `u = u0`, `v ∈ [1, 2]` of the cone.
pub fn cone_ruling(u0: f64) -> Curve {
    curve(&format!("({u0:?}, t)"), 1.0, 2.0)
}

/// Circle of constant colatitude on either sphere.
pub fn latitude(theta: f64) -> Curve {
    curve(&format!("({theta:?}, t)"), -PI, PI)
}

/// Meridian through the poles region, a geodesic of the unit sphere.
pub fn meridian(psi: f64) -> Curve {
    curve(&format!("(t, {psi:?})"), 0.3, PI - 0.3)
}

/// Parallel `v = v0` of the catenoid or helicoid.
pub fn azimuth_circle(v0: f64) -> Curve {
    curve(&format!("(t, {v0:?})"), -PI + 0.01, PI - 0.01)
}

/// `(t, t)` on the unit cylinder is the helix `(cos t, sin t, t)`.
pub fn cylinder_helix() -> Curve {
    curve("(t, t)", -2.0, 2.0)
}
