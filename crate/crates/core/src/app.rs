//! Run configuration and the scan / mesh / verify commands shared by the
//! command-line tool and the bindings.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify, ClassificationReport, Tag};
use crate::curves::catalog::{catalog, catalog_pair};
use crate::curves::FramedCurve;
use crate::error::{Error, Result};
use crate::mesh::{mesh_csv, mesh_obj};
use crate::report::to_json;
use crate::surface::{
    distinct_images, find_singular_points, singular_points_csv, Condition, Dependence, ScanOptions, SelfSign,
    SingularPoint, TranslationSurface,
};
use crate::tolerances::Tolerances;
use crate::verify::{run_suites, summary_text, Suite};

pub const MIN_GRID: usize = 16;
/// Spatial radius under which two images of singular points coincide.
pub const IMAGE_MERGE_RADIUS: f64 = 1e-6;

/// A curve given as `@name` (catalog) or as an expression in one variable,
/// with an optional frame `frenet` or `ν1; ν2`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CurveInput {
    pub curve: String,
    pub frame: Option<String>,
}

impl CurveInput {
    pub fn new(curve: impl Into<String>, frame: Option<String>) -> Self {
        CurveInput { curve: curve.into(), frame }
    }

    fn build(&self, name: &str, domain: (f64, f64), tol: &Tolerances) -> Result<FramedCurve> {
        match self.curve.trim().strip_prefix('@') {
            Some(entry) => {
                if self.frame.is_some() {
                    return Err(Error::Input(format!("catalog curve @{entry} carries its own frame")));
                }
                catalog(entry)
            }
            None => FramedCurve::from_exprs(name, &self.curve, self.frame.as_deref(), domain, tol.curve_checks()),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceInput {
    /// `x = γ(u) + γ̃(v)`.
    Pair { a: CurveInput, b: CurveInput },
    /// A catalog pair (`s0`, `s1p`, `s1m`).
    Named { name: String },
    /// `x± = (γ(u) ± γ(v)) / 2`.
    SelfTranslation { curve: CurveInput, sign: SelfSign },
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Obj,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj" => Ok(OutputFormat::Obj),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Input(format!("unknown format `{other}` (obj, csv)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub surface: SurfaceInput,
    /// `[u0, u1, v0, v1]`; defaults to the curve domains.
    pub window: Option<[f64; 4]>,
    pub grid: usize,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub report: Option<PathBuf>,
    #[serde(skip)]
    pub locus: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Default window for expression curves without `--window`.
pub const DEFAULT_DOMAIN: (f64, f64) = (-2.0, 2.0);

impl RunConfig {
    pub fn new(surface: SurfaceInput) -> Self {
        RunConfig {
            surface,
            window: None,
            grid: 48,
            tolerances: Tolerances::default(),
            out: None,
            report: None,
            locus: None,
            format: OutputFormat::Obj,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.window {
            if !(w.iter().all(|x| x.is_finite()) && w[0] < w[1] && w[2] < w[3]) {
                return Err(Error::Input(format!("empty window {w:?}")));
            }
        }
        if self.grid < MIN_GRID {
            return Err(Error::Input(format!("grid must be at least {MIN_GRID}, got {}", self.grid)));
        }
        Ok(())
    }

    pub fn surface(&self) -> Result<TranslationSurface> {
        self.validate()?;
        let tol = &self.tolerances;
        let du = self.window.map_or(DEFAULT_DOMAIN, |w| (w[0], w[1]));
        let dv = self.window.map_or(DEFAULT_DOMAIN, |w| (w[2], w[3]));
        Ok(match &self.surface {
            SurfaceInput::Pair { a, b } => TranslationSurface::new(a.build("A", du, tol)?, b.build("B", dv, tol)?),
            SurfaceInput::Named { name } => {
                let (a, b) = catalog_pair(name)?;
                TranslationSurface::new(a, b)
            }
            SurfaceInput::SelfTranslation { curve, sign } => {
                let lo = du.0.min(dv.0);
                let hi = du.1.max(dv.1);
                TranslationSurface::self_translation(curve.build("C", (lo, hi), tol)?, *sign)
            }
        })
    }

    pub fn window_for(&self, s: &TranslationSurface) -> [f64; 4] {
        self.window.unwrap_or([s.a.domain.0, s.a.domain.1, s.b.domain.0, s.b.domain.1])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveEcho {
    pub name: String,
    pub gamma: String,
    pub frame: String,
    pub domain: (f64, f64),
    pub period: Option<f64>,
    pub arc_length: bool,
}

impl CurveEcho {
    fn of(c: &FramedCurve) -> Self {
        CurveEcho {
            name: c.name.clone(),
            gamma: c.describe_gamma(),
            frame: c.describe_frame(),
            domain: c.domain,
            period: c.period,
            arc_length: c.is_arc_length(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub surface: SurfaceInput,
    pub curve_a: CurveEcho,
    pub curve_b: CurveEcho,
    pub coefficients: (f64, f64),
    pub window: [f64; 4],
    pub grid: usize,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointEntry {
    pub u: f64,
    pub v: f64,
    pub canonical: Option<(f64, f64)>,
    pub image: [f64; 3],
    pub conditions: Vec<Condition>,
    pub dependence: Dependence,
    pub isolated: bool,
    pub residual: f64,
    pub case: Option<String>,
    pub verdict: Tag,
    pub classification: Option<ClassificationReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictCount {
    pub verdict: Tag,
    pub count: usize,
}

/// The machine-readable scan report.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReportDoc {
    pub tool: &'static str,
    pub version: &'static str,
    pub input: InputEcho,
    pub singular_points: Vec<PointEntry>,
    /// Distinct images of the isolated singular points.
    pub isolated_images: Vec<[f64; 3]>,
    pub image_merge_radius: f64,
    pub verdict_counts: Vec<VerdictCount>,
}

fn echo(cfg: &RunConfig, s: &TranslationSurface) -> InputEcho {
    InputEcho {
        surface: cfg.surface.clone(),
        curve_a: CurveEcho::of(&s.a),
        curve_b: CurveEcho::of(&s.b),
        coefficients: (s.coef_a, s.coef_b),
        window: cfg.window_for(s),
        grid: cfg.grid,
        tolerances: cfg.tolerances,
    }
}

fn entry(s: &TranslationSurface, p: &SingularPoint, tol: &Tolerances) -> Result<PointEntry> {
    let (classification, error) = match classify(s, p.u, p.v, tol) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(PointEntry {
        u: p.u,
        v: p.v,
        canonical: p.canonical,
        image: s.point(p.u, p.v)?,
        conditions: p.conditions.clone(),
        dependence: p.dependence,
        isolated: p.isolated,
        residual: p.residual,
        case: classification.as_ref().and_then(|r| r.case).map(|c| format!("{c:?}")),
        verdict: classification.as_ref().map_or(Tag::Unclassified, |r| r.verdict),
        classification,
        error,
    })
}

/// Singular points, their classification and the locus CSV.
pub fn scan(cfg: &RunConfig) -> Result<(ClassificationReportDoc, String)> {
    let s = cfg.surface()?;
    let tol = &cfg.tolerances;
    let mut opts = ScanOptions::new(cfg.window_for(&s), cfg.grid);
    opts.sing_tol = tol.sing;
    opts.dep_tol = tol.dep;
    let points = find_singular_points(&s, &opts)?;
    let entries: Vec<PointEntry> = points.par_iter().map(|p| entry(&s, p, tol)).collect::<Result<_>>()?;
    let isolated: Vec<(f64, f64)> = points.iter().filter(|p| p.isolated).map(|p| (p.u, p.v)).collect();
    let mut counts: Vec<VerdictCount> = Vec::new();
    for e in &entries {
        match counts.iter_mut().find(|c| c.verdict == e.verdict) {
            Some(c) => c.count += 1,
            None => counts.push(VerdictCount { verdict: e.verdict, count: 1 }),
        }
    }
    let doc = ClassificationReportDoc {
        tool: "transurf",
        version: env!("CARGO_PKG_VERSION"),
        input: echo(cfg, &s),
        singular_points: entries,
        isolated_images: distinct_images(&s, &isolated, IMAGE_MERGE_RADIUS)?,
        image_merge_radius: IMAGE_MERGE_RADIUS,
        verdict_counts: counts,
    };
    Ok((doc, singular_points_csv(&points)))
}

fn write_or_print(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes the report (`--report`, else stdout) and the locus CSV (`--out`).
pub fn cmd_scan(cfg: &RunConfig) -> Result<i32> {
    let (doc, csv) = scan(cfg)?;
    let mut json = to_json(&doc)?;
    json.push('\n');
    write_or_print(cfg.report.as_ref(), &json)?;
    if let Some(p) = cfg.out.as_ref().or(cfg.locus.as_ref()) {
        write_or_print(Some(p), &csv)?;
    }
    Ok(0)
}

/// Mesh text in the configured format.
pub fn mesh(cfg: &RunConfig) -> Result<String> {
    let s = cfg.surface()?;
    let w = cfg.window_for(&s);
    match cfg.format {
        OutputFormat::Obj => mesh_obj(&s, w, cfg.grid),
        OutputFormat::Csv => mesh_csv(&s, w, cfg.grid),
    }
}

/// Writes the mesh (`--out`, else stdout) and optionally the locus CSV.
pub fn cmd_mesh(cfg: &RunConfig) -> Result<i32> {
    let text = mesh(cfg)?;
    write_or_print(cfg.out.as_ref(), &text)?;
    if let Some(p) = &cfg.locus {
        let s = cfg.surface()?;
        let mut opts = ScanOptions::new(cfg.window_for(&s), cfg.grid);
        opts.sing_tol = cfg.tolerances.sing;
        opts.dep_tol = cfg.tolerances.dep;
        write_or_print(Some(p), &singular_points_csv(&find_singular_points(&s, &opts)?))?;
    }
    Ok(0)
}

/// Runs the named suites; exit code 1 when any check fails.
pub fn cmd_verify(suite: &str, tol: &Tolerances, report: Option<&PathBuf>) -> Result<i32> {
    let suites = Suite::parse_list(suite)?;
    let checks = run_suites(&suites, tol)?;
    print!("{}", summary_text(&checks));
    if let Some(p) = report {
        let mut json = to_json(&checks)?;
        json.push('\n');
        write_or_print(Some(p), &json)?;
    }
    Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s0_scan_finds_one_cross_cap() {
        let mut cfg = RunConfig::new(SurfaceInput::Named { name: "s0".into() });
        cfg.window = Some([-2.0, 2.0, -2.0, 2.0]);
        let (doc, csv) = scan(&cfg).unwrap();
        assert_eq!(doc.singular_points.len(), 1);
        assert_eq!(doc.singular_points[0].verdict, Tag::CrossCap);
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = RunConfig::new(SurfaceInput::Named { name: "s0".into() });
        cfg.window = Some([1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(cfg.surface(), Err(Error::Input(_))));
        cfg.window = None;
        cfg.grid = 8;
        assert!(cfg.surface().is_err());
        let cfg = RunConfig::new(SurfaceInput::Pair {
            a: CurveInput::new("(t, t^2", None),
            b: CurveInput::new("@s0_b", None),
        });
        assert!(cfg.surface().is_err());
    }

    #[test]
    fn expression_and_catalog_curves_mix() {
        let cfg = RunConfig::new(SurfaceInput::Pair {
            a: CurveInput::new("(u, u^2/2, 0)", Some("(-u/sqrt(1 + u^2), 1/sqrt(1 + u^2), 0); (0, 0, 1)".into())),
            b: CurveInput::new("@s0_b", None),
        });
        let s = cfg.surface().unwrap();
        assert_eq!(classify(&s, 0.0, 0.0, &cfg.tolerances).unwrap().verdict, Tag::CrossCap);
    }
}
