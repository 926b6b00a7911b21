//! Sweeps over the pole separation, the asymptotic fit, and report output.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::eig::{self, SpectrumSlice};
use crate::fem::{self, AssembledSystem, MagneticScheme};
use crate::geometry::{
    generate_mesh, mesh_quality, refine_uniform, DomainSpec, GradingPolicy, Mesh, Obstacle,
};
use crate::nodal::{self, NodalGraph, NodeKind};
use crate::potential::{gauge_double, PoleConfig};
use crate::{par, Error, Result};

/// Smallest |u_N(0)| for which the asymptotic law is tested.
pub const ORIGIN_VALUE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeChoice {
    EdgePhase,
    Quadrature,
}

impl SchemeChoice {
    pub fn scheme(self) -> MagneticScheme {
        match self {
            SchemeChoice::EdgePhase => MagneticScheme::EdgePhase,
            SchemeChoice::Quadrature => MagneticScheme::quadrature(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub domain: DomainSpec,
    /// Index of the studied eigenvalue, starting at 1.
    pub n: usize,
    /// Strictly decreasing pole half-distances.
    pub a_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    pub h_max: f64,
    /// Mesh size at the poles and the origin, relative to `a`.
    pub pole_h_ratio: f64,
    pub growth_ratio: f64,
    pub refinement_levels: usize,
    pub tol: f64,
    /// Relative eigenvalue gap required on the base mesh.
    pub gap_threshold: f64,
    pub scheme: SchemeChoice,
    pub output_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            domain: DomainSpec::unit_disk(),
            n: 1,
            a_values: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
            tau_values: vec![0.25, 0.5, 0.75],
            h_max: 0.1,
            pole_h_ratio: 0.05,
            growth_ratio: 1.2,
            refinement_levels: 0,
            tol: 1e-8,
            gap_threshold: 1e-2,
            scheme: SchemeChoice::EdgePhase,
            output_dir: PathBuf::from("ab-lab-out"),
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| Error::Config {
        line,
        message: format!("`{key}` expects a number, got `{v}`"),
    })
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(line, key, s)).collect()
}

impl SweepConfig {
    /// Parses `key = value` lines; `#` starts a comment and unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = SweepConfig::default();
        let mut kind = String::from("disk");
        let mut radius = 1.0;
        let mut segments = crate::geometry::DEFAULT_DISK_SEGMENTS;
        let mut polygon: Option<Vec<[f64; 2]>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |message: String| Error::Config { line, message };
            match key {
                "domain" => kind = value.to_string(),
                "radius" => radius = parse_f64(line, key, value)?,
                "boundary_segments" => {
                    segments = value
                        .parse()
                        .map_err(|_| bad(format!("`{key}` expects an integer")))?;
                }
                "polygon" => {
                    let pts = value
                        .split(';')
                        .map(|p| {
                            let xs: Vec<f64> = p
                                .split_whitespace()
                                .map(|s| parse_f64(line, key, s))
                                .collect::<Result<_>>()?;
                            match xs[..] {
                                [x, y] => Ok([x, y]),
                                _ => Err(bad(
                                    "polygon vertices are `x y` pairs separated by `;`".into()
                                )),
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    polygon = Some(pts);
                }
                "n" => {
                    c.n = value
                        .parse()
                        .map_err(|_| bad(format!("`{key}` expects an integer")))?
                }
                "a_values" => c.a_values = parse_list(line, key, value)?,
                "tau_values" => c.tau_values = parse_list(line, key, value)?,
                "h_max" => c.h_max = parse_f64(line, key, value)?,
                "pole_h_ratio" => c.pole_h_ratio = parse_f64(line, key, value)?,
                "growth_ratio" => c.growth_ratio = parse_f64(line, key, value)?,
                "refinement_levels" => {
                    c.refinement_levels = value
                        .parse()
                        .map_err(|_| bad(format!("`{key}` expects an integer")))?;
                }
                "tol" => c.tol = parse_f64(line, key, value)?,
                "gap_threshold" => c.gap_threshold = parse_f64(line, key, value)?,
                "scheme" => {
                    c.scheme = match value {
                        "edge_phase" => SchemeChoice::EdgePhase,
                        "quadrature" => SchemeChoice::Quadrature,
                        _ => return Err(bad(format!("unknown scheme `{value}`"))),
                    }
                }
                "output_dir" => c.output_dir = PathBuf::from(value),
                _ => return Err(bad(format!("unknown key `{key}`"))),
            }
        }
        c.domain = match kind.as_str() {
            "disk" => DomainSpec::disk(radius, segments)?,
            "polygon" => DomainSpec::polygon(polygon.ok_or_else(|| Error::Config {
                line: 0,
                message: "`domain = polygon` needs a `polygon` key".into(),
            })?)?,
            other => {
                return Err(Error::Config {
                    line: 0,
                    message: format!("unknown domain `{other}`"),
                })
            }
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.a_values.is_empty() || self.a_values.iter().any(|&a| !(a > 0.0)) {
            return bad("a_values must be positive");
        }
        if self.a_values.windows(2).any(|w| w[1] >= w[0]) {
            return bad("a_values must be strictly decreasing");
        }
        if self.tau_values.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return bad("tau_values must lie in (0, 1)");
        }
        if !(self.h_max > 0.0
            && self.pole_h_ratio > 0.0
            && self.tol > 0.0
            && self.gap_threshold > 0.0)
        {
            return bad("mesh sizes and tolerances must be positive");
        }
        if !(self.growth_ratio > 1.0 && self.growth_ratio <= 2.0) {
            return bad("growth_ratio must lie in (1, 2]");
        }
        Ok(())
    }

    fn grading(&self, centers: Vec<[f64; 2]>, a: f64) -> GradingPolicy {
        GradingPolicy::new(
            centers,
            (self.pole_h_ratio * a).min(self.h_max),
            self.growth_ratio,
        )
    }

    fn mesh(&self, poles: Option<[[f64; 2]; 2]>, slit: Option<&Obstacle>, a: f64) -> Result<Mesh> {
        let mut centers = vec![[0.0, 0.0]];
        if let Some(p) = poles {
            centers.extend(p);
        }
        let g = self.grading(centers, a);
        let mut m = generate_mesh(&self.domain, poles, slit, self.h_max, Some(&g))?;
        for _ in 0..self.refinement_levels {
            m = refine_uniform(&m);
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundEntry {
    pub tau: f64,
    pub value: Option<f64>,
    /// Largest entry of `G − I` for the Gram matrix of the test functions.
    pub gram_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    pub h_min: f64,
    pub h_max: f64,
    pub min_angle: f64,
}

impl MeshStats {
    fn of(m: &Mesh) -> Self {
        let q = mesh_quality(m);
        Self {
            vertices: m.vertex_count(),
            triangles: m.triangle_count(),
            h_min: q.h_min,
            h_max: q.h_max,
            min_angle: q.min_angle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub a: f64,
    pub lambda_n: Option<f64>,
    pub lambda_n_a: Option<f64>,
    pub u_n0: Option<f64>,
    pub lambda_slit_nodal: Option<f64>,
    pub lambda_slit_segment: Option<f64>,
    pub upper_bounds: Vec<UpperBoundEntry>,
    pub d_a: Option<f64>,
    pub log_ratio: Option<f64>,
    pub single_arc: Option<bool>,
    pub pole_degrees: Option<[usize; 2]>,
    pub euler_residual: Option<i64>,
    pub parity_violations: Option<usize>,
    pub conjugation_residual: Option<f64>,
    pub laplacian_residual: Option<f64>,
    pub magnetic_residual: Option<f64>,
    pub mesh: Option<MeshStats>,
    /// Stage failures, in pipeline order.
    pub failures: Vec<String>,
}

impl SweepRecord {
    /// A record with every measurement missing.
    pub fn new(a: f64, taus: &[f64]) -> Self {
        Self {
            a,
            lambda_n: None,
            lambda_n_a: None,
            u_n0: None,
            lambda_slit_nodal: None,
            lambda_slit_segment: None,
            upper_bounds: taus
                .iter()
                .map(|&tau| UpperBoundEntry {
                    tau,
                    value: None,
                    gram_deviation: None,
                })
                .collect(),
            d_a: None,
            log_ratio: None,
            single_arc: None,
            pole_degrees: None,
            euler_residual: None,
            parity_violations: None,
            conjugation_residual: None,
            laplacian_residual: None,
            magnetic_residual: None,
            mesh: None,
            failures: Vec::new(),
        }
    }

    pub fn upper_bound(&self, tau: f64) -> Option<f64> {
        self.upper_bounds
            .iter()
            .find(|u| u.tau == tau)
            .and_then(|u| u.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub predicted: f64,
    pub relative_error: f64,
    /// `(a, y − slope·x)` for each fitted record.
    pub residuals: Vec<(f64, f64)>,
}

/// Everything produced by one sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub fit: Option<FitResult>,
    pub fit_error: Option<String>,
    /// Nodal graph and mesh per `a`, for plotting.
    pub nodal: Vec<(f64, NodalGraph, Mesh)>,
}

fn lowest(system: &AssembledSystem, n: usize, tol: f64) -> Result<SpectrumSlice> {
    eig::solve_lowest(system, n, tol)
}

/// Checks that `λ_N` is simple and `u_N(0)` is not small, on a mesh without poles.
pub fn check_preconditions(config: &SweepConfig) -> Result<(f64, f64)> {
    config.validate()?;
    let a = config.a_values[0];
    let mesh = config.mesh(None, None, a)?;
    let lap = fem::assemble_laplacian(&mesh)?;
    if lap.dim() <= config.n {
        return Err(Error::Precondition(
            "mesh too coarse for the requested eigenvalue".into(),
        ));
    }
    let slice = lowest(&lap, config.n, config.tol)?;
    let k = config.n - 1;
    let gap = slice.relative_gap(k);
    if !(gap >= config.gap_threshold) {
        return Err(Error::Precondition(format!(
            "eigenvalue {} is not simple: relative gap {gap:.2e} below {:.1e}",
            config.n, config.gap_threshold
        )));
    }
    let mut pair = slice.pairs[k].clone();
    let origin = mesh.marked.origin.ok_or(Error::OriginEliminated)?;
    let dof = lap.dof_map[origin].ok_or(Error::OriginEliminated)?;
    eig::fix_sign(&mut pair, dof);
    let u0 = eig::value_at_origin(&pair, &lap, Some(origin))?;
    if u0.abs() < ORIGIN_VALUE_THRESHOLD {
        return Err(Error::Precondition(format!(
            "u_{}(0) = {u0:.2e} is below {ORIGIN_VALUE_THRESHOLD:e}; the asymptotic law does not apply",
            config.n
        )));
    }
    Ok((slice.pairs[k].lambda, u0))
}

/// Full pipeline for one pole separation.
pub fn run_single(config: &SweepConfig, a: f64) -> (SweepRecord, Option<(NodalGraph, Mesh)>) {
    let mut rec = SweepRecord::new(a, &config.tau_values);
    let mut plot = None;
    let outcome = single_inner(config, a, &mut rec, &mut plot);
    if let Err(e) = outcome {
        rec.failures.push(e.to_string());
    }
    (rec, plot)
}

fn single_inner(
    config: &SweepConfig,
    a: f64,
    rec: &mut SweepRecord,
    plot: &mut Option<(NodalGraph, Mesh)>,
) -> Result<()> {
    let k = config.n - 1;
    let cfg = PoleConfig::new(a)?;
    let poles = cfg.poles();
    let mesh = config.mesh(Some(poles), None, a)?;
    rec.mesh = Some(MeshStats::of(&mesh));

    let lap = fem::assemble_laplacian(&mesh)?;
    let mut lap_slice = lowest(&lap, config.n, config.tol)?;
    let origin = mesh.marked.origin;
    if let Some(dof) = origin.and_then(|o| lap.dof_map[o]) {
        for p in lap_slice.pairs.iter_mut() {
            eig::fix_sign(p, dof);
        }
    }
    rec.lambda_n = Some(lap_slice.pairs[k].lambda);
    rec.laplacian_residual = Some(lap_slice.pairs[k].residual);
    rec.u_n0 = Some(eig::value_at_origin(&lap_slice.pairs[k], &lap, origin)?);

    let mag = fem::assemble_magnetic(&mesh, &cfg, &config.scheme.scheme())?;
    let mag_slice = lowest(&mag, config.n, config.tol)?;
    let lambda_a = mag_slice.pairs[k].lambda;
    rec.lambda_n_a = Some(lambda_a);
    rec.magnetic_residual = Some(mag_slice.pairs[k].residual);

    for (entry, &tau) in rec.upper_bounds.iter_mut().zip(&config.tau_values) {
        match bounds::upper_bound(&mesh, &mag, &lap, &lap_slice, &cfg, tau) {
            Ok(v) => entry.value = Some(v),
            Err(e) => rec
                .failures
                .push(format!("upper bound at tau = {tau}: {e}")),
        }
        if let Ok(basis) = bounds::build_test_basis(&mesh, &lap, &lap_slice, &cfg, tau) {
            let g = bounds::gram_matrix(&basis, &mag);
            let dev = g
                .iter()
                .enumerate()
                .flat_map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(move |(j, x)| (x - if i == j { 1.0 } else { 0.0 }).norm())
                })
                .fold(0.0, f64::max);
            entry.gram_deviation = Some(dev);
        }
    }

    let gauge: Vec<Complex64> = mag
        .free_vertices
        .iter()
        .map(|&v| gauge_double(&cfg, mesh.vertices[v]))
        .collect::<Result<_>>()?;
    let aligned = eig::make_magnetic_real(&mag_slice, k, &gauge, &mag.m)?;
    rec.conjugation_residual = Some(aligned.conjugation_residual);

    if config.domain.is_reflection_symmetric() {
        let seg = Obstacle::segment(poles[0], poles[1]);
        match config.mesh(Some(poles), Some(&seg), a).and_then(|m| {
            let sys = fem::assemble_laplacian(&m)?;
            lowest(&sys, config.n, config.tol)
        }) {
            Ok(s) => rec.lambda_slit_segment = Some(s.pairs[k].lambda),
            Err(e) => rec.failures.push(format!("segment slit: {e}")),
        }
    }

    let w = mag.to_vertex_values(&aligned.pair.vector);
    let graph = nodal::extract_nodal_set(&mesh, &w, &cfg)?;
    rec.euler_residual = Some(graph.euler_check());
    rec.parity_violations = Some(graph.parity_violations().len());
    let pole_degree = |p: [f64; 2]| {
        graph
            .nodes
            .iter()
            .find(|n| n.kind == NodeKind::Pole && n.position == p)
            .map_or(0, |n| n.degree)
    };
    rec.pole_degrees = Some([pole_degree(poles[0]), pole_degree(poles[1])]);
    let stats = nodal::nodal_stats(&graph, &cfg);
    *plot = Some((graph.clone(), mesh));
    let stats = stats?;
    rec.d_a = Some(stats.d_a);
    rec.log_ratio = Some(stats.log_ratio);
    rec.single_arc = Some(stats.single_arc);

    let curve = nodal::export_curve(&graph, &cfg)?;
    let slit_mesh = config.mesh(Some(poles), Some(&curve), a)?;
    let slit = fem::assemble_laplacian(&slit_mesh)?;
    rec.lambda_slit_nodal = Some(lowest(&slit, config.n, config.tol)?.pairs[k].lambda);
    Ok(())
}

/// Runs every `a` (in parallel when enabled), then fits the asymptotic law.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    check_preconditions(config)?;
    let results = par::map(&config.a_values, |&a| run_single(config, a));
    let mut records = Vec::new();
    let mut nodal = Vec::new();
    for (r, p) in results {
        if let Some((g, m)) = p {
            nodal.push((r.a, g, m));
        }
        records.push(r);
    }
    let (fit, fit_error) = match fit_asymptotics(&records) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(SweepOutcome {
        records,
        fit,
        fit_error,
        nodal,
    })
}

/// Least-squares slope through the origin of `λ_N^a − λ_N` against `1/|log a|`,
/// over the smaller half of the `a` values (at least three).
pub fn fit_asymptotics(records: &[SweepRecord]) -> Result<FitResult> {
    let mut valid: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.lambda_n.is_some() && r.lambda_n_a.is_some() && r.u_n0.is_some() && r.a < 1.0)
        .collect();
    if valid.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "{} usable records, at least 3 needed",
            valid.len()
        )));
    }
    valid.sort_by(|x, y| x.a.total_cmp(&y.a));
    let take = valid.len().div_ceil(2).max(3);
    let used = &valid[..take];
    let xy: Vec<(f64, f64, f64)> = used
        .iter()
        .map(|r| {
            (
                r.a,
                1.0 / r.a.ln().abs(),
                r.lambda_n_a.unwrap() - r.lambda_n.unwrap(),
            )
        })
        .collect();
    let sxx: f64 = xy.iter().map(|p| p.1 * p.1).sum();
    let sxy: f64 = xy.iter().map(|p| p.1 * p.2).sum();
    let slope = sxy / sxx;
    let u0 = used.iter().map(|r| r.u_n0.unwrap()).sum::<f64>() / used.len() as f64;
    let predicted = 2.0 * PI * u0 * u0;
    Ok(FitResult {
        slope,
        predicted,
        relative_error: ((slope - predicted) / predicted).abs(),
        residuals: xy.iter().map(|&(a, x, y)| (a, y - slope * x)).collect(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

pub fn csv_header(taus: &[f64]) -> String {
    let mut h = String::from("a,lambda_N,lambda_N_a,u_N0,lambda_slit_nodal,lambda_slit_segment");
    for t in taus {
        let _ = write!(h, ",upper_bound_tau_{t}");
    }
    h.push_str(",d_a,log_ratio");
    h
}

pub fn to_csv(records: &[SweepRecord]) -> String {
    let taus: Vec<f64> = records
        .first()
        .map_or_else(Vec::new, |r| r.upper_bounds.iter().map(|u| u.tau).collect());
    let mut s = csv_header(&taus);
    s.push('\n');
    for r in records {
        let mut row = vec![
            format!("{}", r.a),
            fmt_opt(r.lambda_n),
            fmt_opt(r.lambda_n_a),
            fmt_opt(r.u_n0),
            fmt_opt(r.lambda_slit_nodal),
            fmt_opt(r.lambda_slit_segment),
        ];
        row.extend(r.upper_bounds.iter().map(|u| fmt_opt(u.value)));
        row.push(fmt_opt(r.d_a));
        row.push(fmt_opt(r.log_ratio));
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub records: Vec<SweepRecord>,
    pub fit: Option<FitResult>,
}

pub fn to_json(records: &[SweepRecord], fit: Option<&FitResult>) -> Result<String> {
    let report = JsonReport {
        records: records.to_vec(),
        fit: fit.cloned(),
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

pub fn from_json(text: &str) -> Result<JsonReport> {
    Ok(serde_json::from_str(text)?)
}

/// Plot of `λ_N^a − λ_N` against `1/|log a|` with the fitted and predicted lines.
pub fn to_svg(records: &[SweepRecord], fit: Option<&FitResult>) -> String {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| Some((1.0 / r.a.ln().abs(), r.lambda_n_a? - r.lambda_n?)))
        .collect();
    let xmax = pts.iter().map(|p| p.0).fold(0.0, f64::max).max(1e-3) * 1.1;
    let slopes = fit.map_or(vec![], |f| vec![f.slope, f.predicted]);
    let ymax = pts
        .iter()
        .map(|p| p.1)
        .chain(slopes.iter().map(|s| s * xmax))
        .fold(0.0, f64::max)
        .max(1e-3)
        * 1.05;
    let (w, h, m) = (640.0, 480.0, 50.0);
    let map = |x: f64, y: f64| {
        (
            m + x / xmax * (w - 2.0 * m),
            h - m - y / ymax * (h - 2.0 * m),
        )
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let (x0, y0) = map(0.0, 0.0);
    let (x1, y1) = map(xmax, ymax);
    let _ = writeln!(
        s,
        r##"<path class="axes" d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="#000"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">1/|log a|</text>"#,
        0.5 * w,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" transform="rotate(-90 14 {:.2})" text-anchor="middle">λ_N^a − λ_N</text>"#,
        0.5 * h,
        0.5 * h
    );
    if let Some(f) = fit {
        for (slope, color, label) in [
            (f.slope, "#c00", "fit"),
            (f.predicted, "#00c", "prediction"),
        ] {
            let (ex, ey) = map(xmax, slope * xmax);
            let _ = writeln!(
                s,
                r#"<line class="reference" data-label="{label}" x1="{x0:.2}" y1="{y0:.2}" x2="{ex:.2}" y2="{ey:.2}" stroke="{color}"/>"#
            );
        }
    }
    for (x, y) in pts {
        let (px, py) = map(x, y);
        let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="4"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

/// Writes the requested report files into `dir` and returns their paths.
pub fn emit_report(
    outcome: &SweepOutcome,
    dir: &Path,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>> {
    if outcome.records.is_empty() {
        return Err(Error::InvalidParameter("no records to report".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        written.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            ReportFormat::Csv => put("sweep.csv".into(), to_csv(&outcome.records))?,
            ReportFormat::Json => put(
                "sweep.json".into(),
                to_json(&outcome.records, outcome.fit.as_ref())?,
            )?,
            ReportFormat::Svg => {
                put(
                    "asymptotics.svg".into(),
                    to_svg(&outcome.records, outcome.fit.as_ref()),
                )?;
                for (a, g, m) in &outcome.nodal {
                    put(format!("nodal_a_{a}.svg"), g.to_svg(m))?;
                }
            }
        }
    }
    Ok(written)
}
