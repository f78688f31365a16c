//! Parsed surface patches and parameter curves, evaluated with exact jets.

mod ast;
mod parse;

pub use ast::{BinOp, Expr, Func};
pub use parse::{parse_components, parse_expr};

use crate::error::{Error, Result};
use crate::jet::{Jet, Jet3};
use crate::Vec3;

pub const SURFACE_VARS: [&str; 2] = ["u", "v"];
pub const CURVE_VARS: [&str; 1] = ["t"];

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Eval(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// Evenly spaced nodes including both endpoints.
    pub fn nodes(&self, count: usize) -> impl Iterator<Item = f64> + '_ {
        let n = count.max(2);
        (0..n).map(move |k| self.lo + self.width() * k as f64 / (n - 1) as f64)
    }
}

/// Parameter rectangle of a patch. A periodic axis accepts any value; its
/// interval only fixes the period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u: Interval,
    pub v: Interval,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl Domain {
    pub fn new(u: Interval, v: Interval) -> Self {
        Self {
            u,
            v,
            periodic_u: false,
            periodic_v: false,
        }
    }

    pub fn with_periodic(mut self, periodic_u: bool, periodic_v: bool) -> Self {
        self.periodic_u = periodic_u;
        self.periodic_v = periodic_v;
        self
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        (self.periodic_u || self.u.contains(u)) && (self.periodic_v || self.v.contains(v))
    }

    /// Parameter-space distance, measured modulo the period on periodic axes.
    pub fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let wrap = |d: f64, periodic: bool, period: f64| {
            if periodic {
                let r = d.rem_euclid(period);
                r.min(period - r)
            } else {
                d.abs()
            }
        };
        let du = wrap(a[0] - b[0], self.periodic_u, self.u.width());
        let dv = wrap(a[1] - b[1], self.periodic_v, self.v.width());
        du.hypot(dv)
    }

    pub fn intersect(&self, other: &Domain) -> Option<Domain> {
        Some(Domain {
            u: self.u.intersect(&other.u)?,
            v: self.v.intersect(&other.v)?,
            periodic_u: self.periodic_u && other.periodic_u,
            periodic_v: self.periodic_v && other.periodic_v,
        })
    }
}

/// Position and partial derivatives of a patch at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2Surface {
    pub value: Vec3,
    pub d_u: Vec3,
    pub d_v: Vec3,
    pub d_uu: Vec3,
    pub d_uv: Vec3,
    pub d_vv: Vec3,
    pub d_uuu: Vec3,
    pub d_uuv: Vec3,
    pub d_uvv: Vec3,
    pub d_vvv: Vec3,
}

impl Jet2Surface {
    pub fn from_jets(jets: &Jet3) -> Self {
        let p = |i, j| Vec3::new(jets[0].partial(i, j), jets[1].partial(i, j), jets[2].partial(i, j));
        Self {
            value: p(0, 0),
            d_u: p(1, 0),
            d_v: p(0, 1),
            d_uu: p(2, 0),
            d_uv: p(1, 1),
            d_vv: p(0, 2),
            d_uuu: p(3, 0),
            d_uuv: p(2, 1),
            d_uvv: p(1, 2),
            d_vvv: p(0, 3),
        }
    }
}

/// An analytic map `(u, v) ↦ ℝ³` over a parameter domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    components: [Expr; 3],
    source: String,
    domain: Domain,
}

impl SurfacePatch {
    /// Parses `"(x(u,v), y(u,v), z(u,v))"`.
    pub fn parse(text: &str, domain: Domain) -> Result<Self> {
        let comps = parse_components(text, &SURFACE_VARS)?;
        let components: [Expr; 3] = comps.try_into().map_err(|c: Vec<Expr>| {
            Error::Arity(format!("a surface needs 3 components, got {}", c.len()))
        })?;
        Ok(Self {
            components,
            source: text.trim().to_string(),
            domain,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.components
    }

    /// Canonical fully parenthesized text of the patch.
    pub fn canonical_text(&self) -> String {
        let c: Vec<String> = self
            .components
            .iter()
            .map(|e| e.to_string_with(&SURFACE_VARS))
            .collect();
        format!("({})", c.join(", "))
    }

    /// Evaluates the patch on arbitrary input jets (no domain check).
    pub fn eval_on(&self, u: &Jet, v: &Jet) -> Result<Jet3> {
        let vars = [*u, *v];
        Ok([
            self.components[0].eval_jet(&vars)?,
            self.components[1].eval_jet(&vars)?,
            self.components[2].eval_jet(&vars)?,
        ])
    }

    /// Full bivariate Taylor jet of the patch at `(u, v)`.
    pub fn jet(&self, u: f64, v: f64) -> Result<Jet3> {
        if !self.domain.contains(u, v) {
            return Err(Error::Domain { u, v });
        }
        self.eval_on(&Jet::var_x(u), &Jet::var_y(v))
    }

    pub fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        if !self.domain.contains(u, v) {
            return Err(Error::Domain { u, v });
        }
        let j = self.eval_on(&Jet::constant(u), &Jet::constant(v))?;
        Ok(Vec3::new(j[0].value(), j[1].value(), j[2].value()))
    }
}

/// Evaluates all partials of `patch` up to order 3 at `(u, v)`.
pub fn eval_jet(patch: &SurfacePatch, u: f64, v: f64) -> Result<Jet2Surface> {
    Ok(Jet2Surface::from_jets(&patch.jet(u, v)?))
}

/// A curve `t ↦ (u(t), v(t))` in the parameter domain of a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    u: Expr,
    v: Expr,
    interval: Interval,
    source: String,
}

/// Parameter point of a curve with its derivatives in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub t: f64,
    /// `u, u', u'', u'''`
    pub u: [f64; 4],
    /// `v, v', v'', v'''`
    pub v: [f64; 4],
}

impl Curve {
    /// Parses `"(u(t), v(t))"` over `[t0, t1]`.
    pub fn parse(text: &str, interval: Interval) -> Result<Self> {
        let comps = parse_components(text, &CURVE_VARS)?;
        let [u, v]: [Expr; 2] = comps.try_into().map_err(|c: Vec<Expr>| {
            Error::Arity(format!("a curve needs 2 components, got {}", c.len()))
        })?;
        Ok(Self {
            u,
            v,
            interval,
            source: text.trim().to_string(),
        })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Univariate jets of `u(t)` and `v(t)`.
    pub fn jets(&self, t: f64) -> Result<[Jet; 2]> {
        if !self.interval.contains(t) {
            return Err(Error::Domain { u: t, v: f64::NAN });
        }
        let vars = [Jet::var_x(t)];
        Ok([self.u.eval_jet(&vars)?, self.v.eval_jet(&vars)?])
    }

    /// Checks by sampling that the curve stays inside `domain`.
    pub fn check_inside(&self, domain: &Domain, samples: usize) -> Result<()> {
        for t in self.interval.nodes(samples) {
            let vars = [Jet::constant(t)];
            let u = self.u.eval_jet(&vars)?.value();
            let v = self.v.eval_jet(&vars)?.value();
            if !domain.contains(u, v) {
                return Err(Error::Domain { u, v });
            }
        }
        Ok(())
    }
}

pub fn eval_curve_jet(curve: &Curve, t: f64) -> Result<CurveJet> {
    let [u, v] = curve.jets(t)?;
    let d = |j: &Jet| [j.deriv(0), j.deriv(1), j.deriv(2), j.deriv(3)];
    Ok(CurveJet { t, u: d(&u), v: d(&v) })
}

/// Ambient `γ, γ', γ'', γ'''` of a surface curve by the multivariate chain
/// rule, from the patch partials and the parameter derivatives.
pub fn chain_rule(jet: &Jet2Surface, u: &[f64; 4], v: &[f64; 4]) -> [Vec3; 4] {
    let (u1, u2, u3) = (u[1], u[2], u[3]);
    let (v1, v2, v3) = (v[1], v[2], v[3]);
    let d1 = jet.d_u * u1 + jet.d_v * v1;
    let d2 = jet.d_uu * (u1 * u1)
        + jet.d_uv * (2.0 * u1 * v1)
        + jet.d_vv * (v1 * v1)
        + jet.d_u * u2
        + jet.d_v * v2;
    let d3 = jet.d_uuu * (u1 * u1 * u1)
        + jet.d_uuv * (3.0 * u1 * u1 * v1)
        + jet.d_uvv * (3.0 * u1 * v1 * v1)
        + jet.d_vvv * (v1 * v1 * v1)
        + jet.d_uu * (3.0 * u1 * u2)
        + jet.d_uv * (3.0 * (u2 * v1 + u1 * v2))
        + jet.d_vv * (3.0 * v1 * v2)
        + jet.d_u * u3
        + jet.d_v * v3;
    [jet.value, d1, d2, d3]
}
