//! Scene files: named surfaces, curves, traces and isometry pairs in TOML.
//!
//! ```toml
//! [options]
//! h = 0.01
//! samples = 32
//! grid = "20x20"
//!
//! [surface.cone]
//! expr = "(v*cos(u), v*sin(u), v)"
//! u = ["-pi", "pi"]
//! v = [0.2, 3.0]
//! periodic = ["u"]
//!
//! [curve.cone_circle]
//! surface = "cone"
//! expr = "(t, 1.5)"
//! t = ["-pi", "pi"]
//!
//! [trace.circle]
//! surface = "offset_sphere"
//! seed = [2.0, 0.0]
//!
//! [pair.flat]
//! source = "plane"
//! target = "cylinder"
//! kind = "intrinsic"
//! curves = ["plane_circle"]
//! ```
//!
//! Bounds are numbers or constant expressions in the surface grammar.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use tancurve::expr::{parse_expr, Curve, Domain, Interval, SurfacePatch};
use tancurve::isometry::{IsometryPair, PairKind};
use tancurve::tangent::{TraceOptions, DEFAULT_STEP};
use toml::Spanned;

use crate::CliError;

pub const BUILTIN_NAME: &str = "<builtin>";
pub const BUILTIN: &str = include_str!("../scenes/builtin.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    #[serde(default)]
    options: RawOptions,
    #[serde(default)]
    surface: BTreeMap<String, RawSurface>,
    #[serde(default)]
    curve: BTreeMap<String, RawCurve>,
    #[serde(default)]
    trace: BTreeMap<String, RawTrace>,
    #[serde(default)]
    pair: BTreeMap<String, RawPair>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    h: Option<f64>,
    max_steps: Option<usize>,
    samples: Option<usize>,
    grid: Option<Spanned<String>>,
    points: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Bound {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    expr: Spanned<String>,
    u: Spanned<[Bound; 2]>,
    v: Spanned<[Bound; 2]>,
    #[serde(default)]
    periodic: Vec<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    surface: Spanned<String>,
    expr: Spanned<String>,
    t: Spanned<[Bound; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrace {
    surface: Spanned<String>,
    seed: [f64; 2],
    h: Option<f64>,
    max_steps: Option<usize>,
    samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    source: Spanned<String>,
    target: Spanned<String>,
    kind: Spanned<String>,
    #[serde(default)]
    curves: Vec<Spanned<String>>,
}

/// Run options shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub h: f64,
    pub max_steps: usize,
    pub samples: usize,
    pub grid: (usize, usize),
    /// random points per surface for identity checks
    pub points: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            max_steps: 10_000,
            samples: 32,
            grid: (20, 20),
            points: 100,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurveDef {
    pub surface: String,
    pub curve: Curve,
}

#[derive(Debug, Clone)]
pub struct TraceDef {
    pub surface: String,
    pub seed: [f64; 2],
    pub options: TraceOptions,
}

#[derive(Debug, Clone)]
pub struct PairDef {
    pub source: String,
    pub target: String,
    pub pair: IsometryPair,
    /// curve or trace names hosted on the source surface
    pub curves: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub origin: String,
    pub options: Options,
    pub surfaces: BTreeMap<String, SurfacePatch>,
    pub curves: BTreeMap<String, CurveDef>,
    pub traces: BTreeMap<String, TraceDef>,
    pub pairs: BTreeMap<String, PairDef>,
}

pub fn parse_grid(text: &str) -> Option<(usize, usize)> {
    let (m, n) = text.split_once(['x', 'X'])?;
    let m: usize = m.trim().parse().ok()?;
    let n: usize = n.trim().parse().ok()?;
    (m >= 2 && n >= 2).then_some((m, n))
}

struct Loader<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Loader<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn error(&self, span: Range<usize>, msg: impl std::fmt::Display) -> CliError {
        CliError::Load(format!("{}:{}: {msg}", self.origin, self.line(span)))
    }

    fn bound(&self, b: &Bound, span: Range<usize>) -> Result<f64, CliError> {
        match b {
            Bound::Number(x) => Ok(*x),
            Bound::Text(t) => parse_expr(t, &[])
                .and_then(|e| e.eval_constant())
                .map_err(|e| self.error(span, format!("bound `{t}`: {e}"))),
        }
    }

    fn interval(&self, raw: &Spanned<[Bound; 2]>) -> Result<Interval, CliError> {
        let span = raw.span();
        let [lo, hi] = raw.get_ref();
        let (lo, hi) = (self.bound(lo, span.clone())?, self.bound(hi, span.clone())?);
        Interval::new(lo, hi).map_err(|e| self.error(span, e))
    }

    fn resolve<'m, T>(
        &self,
        map: &'m BTreeMap<String, T>,
        what: &str,
        name: &Spanned<String>,
    ) -> Result<&'m T, CliError> {
        map.get(name.get_ref())
            .ok_or_else(|| self.error(name.span(), format!("{what} not found: {}", name.get_ref())))
    }
}

impl Scene {
    pub fn builtin() -> Result<Self, CliError> {
        Self::from_str(BUILTIN, BUILTIN_NAME)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Load(format!("{}: {e}", path.display())))?;
        Self::from_str(&text, &path.display().to_string())
    }

    pub fn from_str(text: &str, origin: &str) -> Result<Self, CliError> {
        let raw: RawScene = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0);
            CliError::Load(format!("{origin}:{line}: {}", e.message()))
        })?;
        let ld = Loader { origin, text };

        let mut options = Options::default();
        let ro = &raw.options;
        options.h = ro.h.unwrap_or(options.h);
        options.max_steps = ro.max_steps.unwrap_or(options.max_steps);
        options.samples = ro.samples.unwrap_or(options.samples);
        options.points = ro.points.unwrap_or(options.points);
        options.seed = ro.seed.unwrap_or(options.seed);
        if let Some(g) = &ro.grid {
            options.grid = parse_grid(g.get_ref())
                .ok_or_else(|| ld.error(g.span(), format!("grid must look like 20x20, got `{}`", g.get_ref())))?;
        }

        let mut surfaces = BTreeMap::new();
        for (name, s) in &raw.surface {
            let mut periodic = (false, false);
            for axis in &s.periodic {
                match axis.get_ref().as_str() {
                    "u" => periodic.0 = true,
                    "v" => periodic.1 = true,
                    other => return Err(ld.error(axis.span(), format!("unknown axis `{other}`"))),
                }
            }
            let domain = Domain::new(ld.interval(&s.u)?, ld.interval(&s.v)?).with_periodic(periodic.0, periodic.1);
            let patch = SurfacePatch::parse(s.expr.get_ref(), domain)
                .map_err(|e| ld.error(s.expr.span(), format!("surface `{name}`: {e}")))?;
            surfaces.insert(name.clone(), patch);
        }

        let mut curves = BTreeMap::new();
        for (name, c) in &raw.curve {
            let patch = ld.resolve(&surfaces, "surface", &c.surface)?;
            let curve = Curve::parse(c.expr.get_ref(), ld.interval(&c.t)?)
                .map_err(|e| ld.error(c.expr.span(), format!("curve `{name}`: {e}")))?;
            curve
                .check_inside(patch.domain(), 64)
                .map_err(|e| ld.error(c.expr.span(), format!("curve `{name}`: {e}")))?;
            curves.insert(
                name.clone(),
                CurveDef {
                    surface: c.surface.get_ref().clone(),
                    curve,
                },
            );
        }

        let mut traces = BTreeMap::new();
        for (name, t) in &raw.trace {
            ld.resolve(&surfaces, "surface", &t.surface)?;
            traces.insert(
                name.clone(),
                TraceDef {
                    surface: t.surface.get_ref().clone(),
                    seed: t.seed,
                    options: TraceOptions {
                        h: t.h.unwrap_or(options.h),
                        max_steps: t.max_steps.unwrap_or(options.max_steps),
                        samples: Some(t.samples.unwrap_or(options.samples)),
                    },
                },
            );
        }

        let mut pairs = BTreeMap::new();
        for (name, p) in &raw.pair {
            let source = ld.resolve(&surfaces, "surface", &p.source)?;
            let target = ld.resolve(&surfaces, "surface", &p.target)?;
            let kind = PairKind::from_name(p.kind.get_ref())
                .ok_or_else(|| ld.error(p.kind.span(), format!("unknown pair kind `{}`", p.kind.get_ref())))?;
            let mut names = Vec::new();
            for c in &p.curves {
                let host = match (curves.get(c.get_ref()), traces.get(c.get_ref())) {
                    (Some(def), _) => &def.surface,
                    (None, Some(def)) => &def.surface,
                    (None, None) => return Err(ld.error(c.span(), format!("curve not found: {}", c.get_ref()))),
                };
                if host != p.source.get_ref() {
                    return Err(ld.error(
                        c.span(),
                        format!("curve `{}` lives on `{host}`, not on the pair source", c.get_ref()),
                    ));
                }
                names.push(c.get_ref().clone());
            }
            let pair = IsometryPair::register(source.clone(), target.clone(), kind)
                .map_err(|e| ld.error(p.kind.span(), format!("pair `{name}`: {e}")))?;
            pairs.insert(
                name.clone(),
                PairDef {
                    source: p.source.get_ref().clone(),
                    target: p.target.get_ref().clone(),
                    pair,
                    curves: names,
                },
            );
        }

        Ok(Scene {
            origin: origin.to_string(),
            options,
            surfaces,
            curves,
            traces,
            pairs,
        })
    }

    pub fn surface(&self, name: &str) -> Result<&SurfacePatch, CliError> {
        self.surfaces
            .get(name)
            .ok_or_else(|| CliError::Load(format!("surface not found: {name}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_scene_loads() {
        let scene = Scene::builtin().unwrap();
        assert!(scene.surfaces.contains_key("cone"));
        assert!(scene.traces.contains_key("offset_circle"));
        assert_eq!(scene.pairs.len(), 3);
    }

    #[test]
    fn unresolved_names_report_their_line() {
        let text = "[surface.p]\nexpr = \"(u, v, 0)\"\nu = [0, 1]\nv = [0, 1]\n\n[curve.c]\nsurface = \"q\"\nexpr = \"(t, t)\"\nt = [0, 1]\n";
        let err = Scene::from_str(text, "scene.toml").unwrap_err().to_string();
        assert_eq!(err, "scene.toml:7: surface not found: q");
    }

    #[test]
    fn bad_expression_reports_its_line() {
        let text = "[surface.p]\nu = [0, 1]\nv = [0, \"pi\"]\nexpr = \"(u, v, w)\"\n";
        let err = Scene::from_str(text, "s.toml").unwrap_err().to_string();
        assert!(err.starts_with("s.toml:4: surface `p`: unknown identifier `w`"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = Scene::from_str("[options]\nh = \n", "x.toml").unwrap_err().to_string();
        assert!(err.starts_with("x.toml:2:"), "{err}");
    }

    #[test]
    fn rejected_pair_is_a_load_error() {
        let text = "[surface.a]\nexpr = \"(u, v, 0)\"\nu = [0, 1]\nv = [0, 1]\n[surface.b]\nexpr = \"(2*u, v, 0)\"\nu = [0, 1]\nv = [0, 1]\n[pair.x]\nsource = \"a\"\ntarget = \"b\"\nkind = \"intrinsic\"\n";
        let err = Scene::from_str(text, "p.toml").unwrap_err().to_string();
        assert!(err.contains("p.toml:12: pair `x`: isometry pair rejected"), "{err}");
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("20x20"), Some((20, 20)));
        assert_eq!(parse_grid("3X7"), Some((3, 7)));
        assert_eq!(parse_grid("1x5"), None);
        assert_eq!(parse_grid("20"), None);
    }
}
