//! Fundamental forms, unit normal and Christoffel symbols at a patch point.
//!
//! The unit normal is always `φ_u × φ_v` normalized; the signs of `L, M, N`
//! and of every curvature built on them follow that orientation.

use crate::error::{Error, Result};
use crate::expr::{eval_jet, Jet2Surface, SurfacePatch};
use crate::jet::Jet;
use crate::Vec3;

/// `EG - F²` at or below this is treated as a degenerate point.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// A metric coefficient with its first and second partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricCoeff {
    pub value: f64,
    pub d_u: f64,
    pub d_v: f64,
    pub d_uu: f64,
    pub d_uv: f64,
    pub d_vv: f64,
}

impl MetricCoeff {
    /// Second-order Taylor jet in `(u, v)` around the evaluation point.
    pub fn to_jet(&self) -> Jet {
        Jet::from_partials(&[
            (0, 0, self.value),
            (1, 0, self.d_u),
            (0, 1, self.d_v),
            (2, 0, self.d_uu),
            (1, 1, self.d_uv),
            (0, 2, self.d_vv),
        ])
    }
}

/// First fundamental form `E, F, G` and derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstForm {
    pub e: MetricCoeff,
    pub f: MetricCoeff,
    pub g: MetricCoeff,
}

impl FirstForm {
    pub fn det(&self) -> f64 {
        self.e.value * self.g.value - self.f.value * self.f.value
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.e.value, self.f.value], [self.f.value, self.g.value]]
    }

    /// Length of a parameter-space vector in this metric.
    pub fn norm(&self, a: [f64; 2]) -> f64 {
        (self.e.value * a[0] * a[0] + 2.0 * self.f.value * a[0] * a[1] + self.g.value * a[1] * a[1])
            .sqrt()
    }
}

/// Second fundamental form `L, M, N` with the unit normal that fixes its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondForm {
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub normal: Vec3,
}

/// Christoffel symbol `Γᵏᵢⱼ` with its parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Symbol {
    pub value: f64,
    pub d_u: f64,
    pub d_v: f64,
}

/// The six Christoffel symbols of a 2D metric.
///
/// `uu[k]` is `Γᵏ₁₁`, `uv[k]` is `Γᵏ₁₂ = Γᵏ₂₁` and `vv[k]` is `Γᵏ₂₂`, with
/// `k = 0` for the `φ_u` component and `k = 1` for `φ_v`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Christoffel {
    pub uu: [Symbol; 2],
    pub uv: [Symbol; 2],
    pub vv: [Symbol; 2],
}

impl Christoffel {
    /// `Γᵏᵢⱼ` with 0-based indices.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.symbol(k, i, j).value
    }

    pub fn symbol(&self, k: usize, i: usize, j: usize) -> Symbol {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.uu[k],
            (0, 1) => self.uv[k],
            _ => self.vv[k],
        }
    }

    pub fn values(&self) -> [[[f64; 2]; 2]; 2] {
        let mut out = [[[0.0; 2]; 2]; 2];
        for (k, ok) in out.iter_mut().enumerate() {
            for (i, oi) in ok.iter_mut().enumerate() {
                for (j, x) in oi.iter_mut().enumerate() {
                    *x = self.get(k, i, j);
                }
            }
        }
        out
    }
}

fn check_regular(det: f64) -> Result<()> {
    if det.is_nan() || det <= DEGENERACY_THRESHOLD {
        Err(Error::DegeneratePoint { det })
    } else {
        Ok(())
    }
}

pub fn first_form(jet: &Jet2Surface) -> Result<FirstForm> {
    let (pu, pv) = (jet.d_u, jet.d_v);
    let (puu, puv, pvv) = (jet.d_uu, jet.d_uv, jet.d_vv);
    let (puuu, puuv, puvv, pvvv) = (jet.d_uuu, jet.d_uuv, jet.d_uvv, jet.d_vvv);
    let e = MetricCoeff {
        value: pu.dot(&pu),
        d_u: 2.0 * puu.dot(&pu),
        d_v: 2.0 * puv.dot(&pu),
        d_uu: 2.0 * (puuu.dot(&pu) + puu.dot(&puu)),
        d_uv: 2.0 * (puuv.dot(&pu) + puu.dot(&puv)),
        d_vv: 2.0 * (puvv.dot(&pu) + puv.dot(&puv)),
    };
    let f = MetricCoeff {
        value: pu.dot(&pv),
        d_u: puu.dot(&pv) + pu.dot(&puv),
        d_v: puv.dot(&pv) + pu.dot(&pvv),
        d_uu: puuu.dot(&pv) + 2.0 * puu.dot(&puv) + pu.dot(&puuv),
        d_uv: puuv.dot(&pv) + puu.dot(&pvv) + puv.dot(&puv) + pu.dot(&puvv),
        d_vv: puvv.dot(&pv) + 2.0 * puv.dot(&pvv) + pu.dot(&pvvv),
    };
    let g = MetricCoeff {
        value: pv.dot(&pv),
        d_u: 2.0 * puv.dot(&pv),
        d_v: 2.0 * pvv.dot(&pv),
        d_uu: 2.0 * (puuv.dot(&pv) + puv.dot(&puv)),
        d_uv: 2.0 * (puvv.dot(&pv) + puv.dot(&pvv)),
        d_vv: 2.0 * (pvvv.dot(&pv) + pvv.dot(&pvv)),
    };
    let form = FirstForm { e, f, g };
    check_regular(form.det())?;
    Ok(form)
}

pub fn unit_normal(jet: &Jet2Surface) -> Result<Vec3> {
    let n = jet.d_u.cross(&jet.d_v);
    check_regular(n.norm_squared())?;
    Ok(n / n.norm())
}

pub fn second_form(jet: &Jet2Surface) -> Result<SecondForm> {
    let normal = unit_normal(jet)?;
    Ok(SecondForm {
        l: jet.d_uu.dot(&normal),
        m: jet.d_uv.dot(&normal),
        n: jet.d_vv.dot(&normal),
        normal,
    })
}

/// Christoffel symbols from the explicit `E, F, G` formulas, evaluated on
/// jets so the result carries derivatives one order below its inputs.
///
/// Returns `[Γ₁₁, Γ₁₂, Γ₂₂]`, each as `[φ_u component, φ_v component]`.
pub fn christoffel_jets(e: &Jet, f: &Jet, g: &Jet) -> [[Jet; 2]; 3] {
    let (eu, ev) = (e.d_x(), e.d_y());
    let (fu, fv) = (f.d_x(), f.d_y());
    let (gu, gv) = (g.d_x(), g.d_y());
    let half_inv = ((*e * *g - *f * *f) * 2.0).recip();
    [
        [
            (*g * eu - *f * fu * 2.0 + *f * ev) * half_inv,
            (*e * fu * 2.0 - *e * ev - *f * eu) * half_inv,
        ],
        [
            (*g * ev - *f * gu) * half_inv,
            (*e * gu - *f * ev) * half_inv,
        ],
        [
            (*g * fv * 2.0 - *g * gu - *f * gv) * half_inv,
            (*e * gv - *f * fv * 2.0 + *f * gu) * half_inv,
        ],
    ]
}

pub fn christoffel(form: &FirstForm) -> Result<Christoffel> {
    check_regular(form.det())?;
    let jets = christoffel_jets(&form.e.to_jet(), &form.f.to_jet(), &form.g.to_jet());
    let sym = |j: &Jet| Symbol {
        value: j.value(),
        d_u: j.partial(1, 0),
        d_v: j.partial(0, 1),
    };
    Ok(Christoffel {
        uu: [sym(&jets[0][0]), sym(&jets[0][1])],
        uv: [sym(&jets[1][0]), sym(&jets[1][1])],
        vv: [sym(&jets[2][0]), sym(&jets[2][1])],
    })
}

/// Index-form oracle `Γᵏᵢⱼ = ½ gᵏˡ (∂ᵢ gⱼₗ + ∂ⱼ gᵢₗ − ∂ₗ gᵢⱼ)`, returned as
/// `[k][i][j]`.
pub fn christoffel_metric_formula(form: &FirstForm) -> Result<[[[f64; 2]; 2]; 2]> {
    let det = form.det();
    check_regular(det)?;
    let g = form.matrix();
    let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    // dg[l][i][j] = ∂_l g_ij
    let dg = [
        [[form.e.d_u, form.f.d_u], [form.f.d_u, form.g.d_u]],
        [[form.e.d_v, form.f.d_v], [form.f.d_v, form.g.d_v]],
    ];
    let mut out = [[[0.0; 2]; 2]; 2];
    for (k, ok) in out.iter_mut().enumerate() {
        for (i, oi) in ok.iter_mut().enumerate() {
            for (j, x) in oi.iter_mut().enumerate() {
                *x = (0..2)
                    .map(|l| 0.5 * inv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum();
            }
        }
    }
    Ok(out)
}

/// Largest disagreement between the explicit and index-form symbols.
pub fn christoffel_cross_check(form: &FirstForm) -> Result<f64> {
    let explicit = christoffel(form)?.values();
    let oracle = christoffel_metric_formula(form)?;
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((explicit[k][i][j] - oracle[k][i][j]).abs());
            }
        }
    }
    Ok(worst)
}

/// Residuals `φ_ij − Γ¹ᵢⱼ φ_u − Γ²ᵢⱼ φ_v − (form coeff) N̂` for `uu, uv, vv`.
pub fn gauss_equation_residual(
    jet: &Jet2Surface,
    second: &SecondForm,
    chr: &Christoffel,
) -> [Vec3; 3] {
    let expand = |k: [Symbol; 2], c: f64| jet.d_u * k[0].value + jet.d_v * k[1].value + second.normal * c;
    [
        jet.d_uu - expand(chr.uu, second.l),
        jet.d_uv - expand(chr.uv, second.m),
        jet.d_vv - expand(chr.vv, second.n),
    ]
}

/// Everything `geometry` knows about one patch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormsBundle {
    pub u: f64,
    pub v: f64,
    pub jet: Jet2Surface,
    pub first: FirstForm,
    pub second: SecondForm,
    pub christoffel: Christoffel,
}

impl FormsBundle {
    pub fn at(patch: &SurfacePatch, u: f64, v: f64) -> Result<Self> {
        let jet = eval_jet(patch, u, v)?;
        let first = first_form(&jet)?;
        let second = second_form(&jet)?;
        let christoffel = christoffel(&first)?;
        Ok(Self {
            u,
            v,
            jet,
            first,
            second,
            christoffel,
        })
    }

    /// Largest absolute component of the three Gauss-equation residuals.
    pub fn gauss_residual(&self) -> f64 {
        gauss_equation_residual(&self.jet, &self.second, &self.christoffel)
            .iter()
            .map(|r| r.amax())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    const TOL: f64 = 1e-12;

    #[test]
    fn plane_forms_vanish() {
        let p = builtin::plane();
        let b = FormsBundle::at(&p, 0.4, -1.3).unwrap();
        assert_eq!((b.first.e.value, b.first.f.value, b.first.g.value), (1.0, 0.0, 1.0));
        assert_eq!(b.first.e.d_u, 0.0);
        assert_eq!((b.second.l, b.second.m, b.second.n), (0.0, 0.0, 0.0));
        assert_eq!(b.christoffel.values(), [[[0.0; 2]; 2]; 2]);
        assert_eq!(b.gauss_residual(), 0.0);
    }

    #[test]
    fn cone_forms() {
        // E = v², F = 0, G = 2 at v = 1; N̂ = (cos u, sin u, -1)/√2
        let p = builtin::cone();
        let b = FormsBundle::at(&p, 0.0, 1.0).unwrap();
        assert!((b.first.e.value - 1.0).abs() < TOL);
        assert!(b.first.f.value.abs() < TOL);
        assert!((b.first.g.value - 2.0).abs() < TOL);
        assert!((b.first.e.d_v - 2.0).abs() < TOL);
        assert!((b.second.l + 0.5_f64.sqrt()).abs() < TOL);
        assert!(b.second.m.abs() < TOL);
        assert!(b.second.n.abs() < TOL);
        let c = b.christoffel;
        assert!((c.get(0, 0, 1) - 1.0).abs() < TOL);
        assert!((c.get(1, 0, 0) + 0.5).abs() < TOL);
        for (k, i, j) in [(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)] {
            assert!(c.get(k, i, j).abs() < TOL, "Γ{k}{i}{j}");
        }
    }

    #[test]
    fn catenoid_is_conformal() {
        let p = builtin::catenoid();
        let b = FormsBundle::at(&p, 0.0, 0.5).unwrap();
        let ch2 = 0.5_f64.cosh().powi(2);
        assert!((b.first.e.value - ch2).abs() < TOL);
        assert!((b.first.g.value - ch2).abs() < TOL);
        assert!(b.first.f.value.abs() < TOL);
    }

    #[test]
    fn unit_sphere_second_form() {
        let p = builtin::unit_sphere();
        let b = FormsBundle::at(&p, std::f64::consts::FRAC_PI_2, 0.3).unwrap();
        assert!((b.second.l.abs() - 1.0).abs() < TOL);
        assert!((b.second.n.abs() - 1.0).abs() < TOL);
        assert!(b.second.m.abs() < TOL);
        // φ_θ × φ_ψ points outward for the colatitude-first parametrization
        assert!((b.second.normal - b.jet.value).norm() < TOL);
        assert!(b.second.l < 0.0);
    }

    #[test]
    fn sphere_theta_psi_symbol_is_cot() {
        let p = builtin::unit_sphere();
        let theta = std::f64::consts::FRAC_PI_3;
        let b = FormsBundle::at(&p, theta, 0.0).unwrap();
        let oracle = christoffel_metric_formula(&b.first).unwrap();
        // Γ^ψ_{θψ} = cot θ
        assert!((oracle[1][0][1] - 1.0 / 3.0_f64.sqrt()).abs() < 1e-12);
        assert!((b.christoffel.get(1, 0, 1) - oracle[1][0][1]).abs() < 1e-12);
        // Γ^θ_{ψψ} = -sin θ cos θ
        assert!((b.christoffel.get(0, 1, 1) + theta.sin() * theta.cos()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_point_detected() {
        // cone apex
        let p = builtin::cone_with_domain(-1.0, 1.0);
        let jet = eval_jet(&p, 0.3, 0.0).unwrap();
        assert!(matches!(first_form(&jet), Err(Error::DegeneratePoint { .. })));
        assert!(matches!(second_form(&jet), Err(Error::DegeneratePoint { .. })));
    }

    #[test]
    fn symbol_derivatives_match_finite_differences() {
        let p = builtin::catenoid();
        let (u, v, h) = (0.4, 0.35, 1e-5);
        let at = |u, v| FormsBundle::at(&p, u, v).unwrap().christoffel;
        let c = at(u, v);
        let (cp, cm) = (at(u + h, v), at(u - h, v));
        let (dp, dm) = (at(u, v + h), at(u, v - h));
        for k in 0..2 {
            for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                let s = c.symbol(k, i, j);
                let fd_u = (cp.get(k, i, j) - cm.get(k, i, j)) / (2.0 * h);
                let fd_v = (dp.get(k, i, j) - dm.get(k, i, j)) / (2.0 * h);
                assert!((s.d_u - fd_u).abs() < 1e-8, "d_u Γ{k}{i}{j}");
                assert!((s.d_v - fd_v).abs() < 1e-8, "d_v Γ{k}{i}{j}");
            }
        }
    }

    #[test]
    fn swapping_parameters_flips_orientation() {
        use crate::expr::{Domain, Interval};
        let d = Domain::new(Interval::new(-3.0, 3.0).unwrap(), Interval::new(0.5, 2.0).unwrap());
        let cone = SurfacePatch::parse("(v*cos(u), v*sin(u), v)", d).unwrap();
        let swapped_domain = Domain::new(d.v, d.u);
        let swapped = SurfacePatch::parse("(u*cos(v), u*sin(v), u)", swapped_domain).unwrap();
        let a = FormsBundle::at(&cone, 0.7, 1.3).unwrap();
        let b = FormsBundle::at(&swapped, 1.3, 0.7).unwrap();
        assert!((a.second.normal + b.second.normal).norm() < TOL);
        assert!((a.second.l + b.second.n).abs() < TOL);
        assert!((a.second.m + b.second.m).abs() < TOL);
        assert!((a.second.n + b.second.l).abs() < TOL);
        assert!((a.first.e.value - b.first.g.value).abs() < TOL);
        assert!((a.first.f.value - b.first.f.value).abs() < TOL);
        // Γᵏᵢⱼ relabels with every index swapped
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let x = a.christoffel.get(k, i, j);
                    let y = b.christoffel.get(1 - k, 1 - i, 1 - j);
                    assert!((x - y).abs() < TOL);
                }
            }
        }
    }
}
