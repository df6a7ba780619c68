//! Scripted experiments: prefractal convergence towards the limiting
//! geometry, null-field decay for screens the field cannot see, the hole
//! effect on punctured solid screens, and the gap between the open- and
//! closed-convention discretisations.
//!
//! Every experiment is a pure function of its configuration: identical
//! configs give bit-identical CSV reports (timings are kept out of the CSV
//! and live only in the JSON envelope).

use crate::assembly::Problem;
use crate::error::{Error, Result};
use crate::geometry::{PrefractalFamily, RegionCells, ScreenPanelMesh, ScreenRegion};
use crate::io::fmt_f64;
use crate::potentials::scattered_field;
use crate::quadrature::QuadSpec;
use crate::solve::{solve_hard, solve_soft, DensitySolution, IncidentField};
use crate::specialfn::{Ambient, Wavenumber};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

fn default_obs_count() -> usize {
    16
}

fn default_obs_radius_factor() -> f64 {
    2.0
}

fn default_dof_cap() -> usize {
    8000
}

/// Configuration of a prefractal convergence run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub family: PrefractalFamily,
    pub problem: Problem,
    pub k: f64,
    pub incident: IncidentField,
    pub j_min: u32,
    pub j_max: u32,
    /// Mesh size rule h = feature_size / divisor; per-family default when
    /// absent.
    #[serde(default)]
    pub h_divisor: Option<f64>,
    /// Explicit observation points; defaults to a ring of `obs_count` points
    /// at `obs_radius_factor` x screen diameter.
    #[serde(default)]
    pub obs_points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_obs_count")]
    pub obs_count: usize,
    #[serde(default = "default_obs_radius_factor")]
    pub obs_radius_factor: f64,
    #[serde(default)]
    pub quad_order: Option<usize>,
    #[serde(default = "default_dof_cap")]
    pub dof_cap: usize,
}

impl ConvergeConfig {
    pub fn quad(&self) -> QuadSpec {
        match self.quad_order {
            None => QuadSpec::default(),
            Some(q) => QuadSpec::with_base_order(q),
        }
    }
}

/// Per-level observations of a convergence run.
#[derive(Debug, Clone, Serialize)]
pub struct LevelRow {
    pub j: u32,
    pub panels: usize,
    pub dofs: usize,
    pub h: f64,
    pub mesh_hash: String,
    pub solver_residual: f64,
    /// u^s_j at the observation points.
    pub field: Vec<[f64; 2]>,
    pub max_abs: f64,
    /// max over observation points of |u^s_j - u^s_{j-1}|.
    pub diff_prev: Option<f64>,
    /// mesh-error sanity: max |u^s_j(h) - u^s_j(2h)| at the observation
    /// points.
    pub h_sanity: f64,
    /// wall-clock; excluded from the CSV to keep reports bit-identical.
    pub elapsed_ms: f64,
}

/// Report of a prefractal convergence run.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub config: serde_json::Value,
    pub obs_points: Vec<Vec<f64>>,
    pub rows: Vec<LevelRow>,
}

impl ConvergenceReport {
    /// One CSV row per level; deterministic (no timings).
    pub fn to_csv(&self) -> String {
        let header = [
            "j", "panels", "dofs", "h", "max_abs", "diff_prev", "h_sanity",
            "solver_residual", "mesh_hash",
        ];
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.j.to_string(),
                    r.panels.to_string(),
                    r.dofs.to_string(),
                    fmt_f64(r.h),
                    fmt_f64(r.max_abs),
                    r.diff_prev.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(r.h_sanity),
                    fmt_f64(r.solver_residual),
                    r.mesh_hash.clone(),
                ]
            })
            .collect();
        crate::io::csv_document(&header, &rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "obs_points": self.obs_points,
            "rows": self.rows,
        })
    }
}

/// Default mesh-size divisor: fine enough that the conforming basis of the
/// problem is nonempty on every isolated cell (hat bases need interior
/// vertices: one refinement level on quads, two on triangles).
pub fn default_h_divisor(region: &ScreenRegion, problem: Problem) -> f64 {
    match &region.cells {
        RegionCells::Intervals(_) => 2.0,
        RegionCells::Polygons(polys) => {
            let any_tri = polys.iter().any(|p| p.vertices.len() == 3);
            match (problem, any_tri) {
                (Problem::Hard, true) => 4.0,
                (Problem::Soft, true) => 2.0,
                (_, false) => std::f64::consts::SQRT_2,
            }
        }
    }
}

/// Observation ring: `count` points at radius factor x diameter around the
/// screen centre; in 3D the ring lies in the (x1, x3) plane so it samples
/// both sides of the screen.
pub fn observation_ring(region: &ScreenRegion, count: usize, radius_factor: f64) -> Vec<Vec<f64>> {
    let (lo, hi) = region.bbox();
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let radius = radius_factor * region.diameter();
    (0..count)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / count as f64;
            match region.dimension() {
                Ambient::Two => vec![center[0] + radius * th.cos(), radius * th.sin()],
                Ambient::Three => vec![
                    center[0] + radius * th.cos(),
                    center[1],
                    radius * th.sin(),
                ],
            }
        })
        .collect()
}

/// Meshes a region at the given h, doubling h until the panel count fits the
/// cap.
fn mesh_capped(region: &ScreenRegion, mut h: f64, cap: usize) -> Result<Arc<ScreenPanelMesh>> {
    loop {
        let mesh = ScreenPanelMesh::build(region, h)?;
        if mesh.panel_count() <= cap {
            return Ok(Arc::new(mesh));
        }
        h *= 2.0;
    }
}

fn solve_problem(
    problem: Problem,
    mesh: &Arc<ScreenPanelMesh>,
    k: Wavenumber,
    field: &IncidentField,
    quad: QuadSpec,
) -> Result<DensitySolution> {
    match problem {
        Problem::Soft => solve_soft(mesh, k, field, quad),
        Problem::Hard => solve_hard(mesh, k, field, quad),
    }
}

fn field_at_obs(
    solution: &DensitySolution,
    obs: &[Vec<f64>],
    quad: &QuadSpec,
) -> Result<Vec<Complex64>> {
    Ok(scattered_field(solution, obs, quad)?.values)
}

/// Solves the family at each level and reports the Cauchy differences of the
/// scattered field at the observation points.
pub fn converge_prefractal(config: &ConvergeConfig) -> Result<ConvergenceReport> {
    if config.j_max < config.j_min {
        return Err(Error::InvalidParameter("j_max below j_min".into()));
    }
    let k = Wavenumber::new(config.k)?;
    let quad = config.quad();
    let first_region = config.family.region(config.j_min)?;
    let obs = match &config.obs_points {
        Some(p) => p.clone(),
        None => observation_ring(&first_region, config.obs_count, config.obs_radius_factor),
    };
    let mut rows: Vec<LevelRow> = Vec::new();
    let mut prev_field: Option<Vec<Complex64>> = None;
    for j in config.j_min..=config.j_max {
        let start = Instant::now();
        let region = config.family.region(j)?;
        let divisor = config
            .h_divisor
            .unwrap_or_else(|| default_h_divisor(&region, config.problem));
        let h = config.family.feature_size(j) / divisor;
        let mesh = mesh_capped(&region, h, config.dof_cap)?;
        let solution = solve_problem(config.problem, &mesh, k, &config.incident, quad)?;
        let values = field_at_obs(&solution, &obs, &quad)?;
        // mesh-error sanity column: same level at twice the mesh size
        let coarse_mesh = mesh_capped(&region, 2.0 * h, config.dof_cap)?;
        let coarse = solve_problem(config.problem, &coarse_mesh, k, &config.incident, quad)?;
        let coarse_values = field_at_obs(&coarse, &obs, &quad)?;
        let h_sanity = values
            .iter()
            .zip(&coarse_values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff_prev = prev_field.as_ref().map(|prev| {
            values
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        });
        rows.push(LevelRow {
            j,
            panels: mesh.panel_count(),
            dofs: solution.coefficients.len(),
            h: mesh.h(),
            mesh_hash: mesh.content_hash(),
            solver_residual: solution.residual,
            field: values.iter().map(|z| [z.re, z.im]).collect(),
            max_abs,
            diff_prev,
            h_sanity,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        prev_field = Some(values);
    }
    Ok(ConvergenceReport {
        config: serde_json::to_value(config)?,
        obs_points: obs,
        rows,
    })
}

/// Null-field report: convergence run plus the decay summary of |u^s_j|.
#[derive(Debug, Clone, Serialize)]
pub struct NullReport {
    pub convergence: ConvergenceReport,
    pub max_abs_per_level: Vec<f64>,
    pub initial_max: f64,
    pub final_max: f64,
    /// final / initial
    pub final_ratio: f64,
    pub strictly_decreasing: bool,
}

impl NullReport {
    pub fn to_csv(&self) -> String {
        self.convergence.to_csv()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "convergence": self.convergence.to_json(),
            "max_abs_per_level": self.max_abs_per_level,
            "initial_max": self.initial_max,
            "final_max": self.final_max,
            "final_ratio": self.final_ratio,
            "strictly_decreasing": self.strictly_decreasing,
        })
    }
}

/// Runs the convergence experiment and additionally asserts the decay of the
/// absolute field (the j → ∞ limit is u^s = 0 for null screens).
pub fn null_test(config: &ConvergeConfig) -> Result<NullReport> {
    let convergence = converge_prefractal(config)?;
    let max_abs: Vec<f64> = convergence.rows.iter().map(|r| r.max_abs).collect();
    let initial = *max_abs.first().unwrap_or(&0.0);
    let final_v = *max_abs.last().unwrap_or(&0.0);
    let strictly = max_abs.windows(2).all(|w| w[1] < w[0]);
    Ok(NullReport {
        convergence,
        max_abs_per_level: max_abs.clone(),
        initial_max: initial,
        final_max: final_v,
        final_ratio: if initial > 0.0 { final_v / initial } else { 0.0 },
        strictly_decreasing: strictly,
    })
}

// ---------------------------------------------------------------------------
// Hole effect
// ---------------------------------------------------------------------------

/// Configuration of the hole-effect experiment: the solid screen Γ₀ = [0,1]
/// against the punctured screen Γ₀ \ C_j (n = 2).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    pub lambda: f64,
    pub k: f64,
    pub incident: IncidentField,
    pub j_min: u32,
    pub j_max: u32,
    #[serde(default)]
    pub h_divisor: Option<f64>,
    #[serde(default = "default_obs_count")]
    pub obs_count: usize,
    #[serde(default = "default_obs_radius_factor")]
    pub obs_radius_factor: f64,
    #[serde(default)]
    pub quad_order: Option<usize>,
    #[serde(default = "default_dof_cap")]
    pub dof_cap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HoleRow {
    pub j: u32,
    pub h: f64,
    pub delta_soft: f64,
    pub delta_hard: f64,
    pub panels_punctured: usize,
    pub panels_solid: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HoleReport {
    pub config: serde_json::Value,
    pub obs_points: Vec<Vec<f64>>,
    pub rows: Vec<HoleRow>,
}

impl HoleReport {
    pub fn to_csv(&self) -> String {
        let header = ["j", "h", "delta_soft", "delta_hard", "panels_punctured", "panels_solid"];
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.j.to_string(),
                    fmt_f64(r.h),
                    fmt_f64(r.delta_soft),
                    fmt_f64(r.delta_hard),
                    r.panels_punctured.to_string(),
                    r.panels_solid.to_string(),
                ]
            })
            .collect();
        crate::io::csv_document(&header, &rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "obs_points": self.obs_points,
            "rows": self.rows,
        })
    }
}

/// For each level j, solves on the punctured screen Γ₀ \ C_j (hats vanish on
/// the hole boundaries) and on the solid Γ₀ at matching mesh size, and
/// reports δ_j = max over the observation points of the field difference,
/// for both the soft and the hard problem.
pub fn hole_effect(config: &HoleConfig) -> Result<HoleReport> {
    let k = Wavenumber::new(config.k)?;
    let quad = match config.quad_order {
        None => QuadSpec::default(),
        Some(q) => QuadSpec::with_base_order(q),
    };
    let solid = crate::geometry::unit_screen(Ambient::Two);
    let obs = observation_ring(&solid, config.obs_count, config.obs_radius_factor);
    let punctured_family =
        PrefractalFamily::SolidMinusCantor { lambda: config.lambda, dimension: Ambient::Two };
    let mut rows = Vec::new();
    for j in config.j_min..=config.j_max {
        let start = Instant::now();
        let (delta_soft, delta_hard, h_used, panels_p, panels_s) = if j == 0 {
            // no hole: identical screens by definition
            (0.0, 0.0, 0.0, 0, 0)
        } else {
            let punct = punctured_family.region(j)?;
            let divisor = config.h_divisor.unwrap_or(2.0);
            let h = punctured_family.feature_size(j) / divisor;
            let mesh_p = mesh_capped(&punct, h, config.dof_cap)?;
            let mesh_s = mesh_capped(&solid, h, config.dof_cap)?;
            let mut deltas = [0.0; 2];
            for (slot, problem) in [(0, Problem::Soft), (1, Problem::Hard)] {
                let sol_p = solve_problem(problem, &mesh_p, k, &config.incident, quad)?;
                let sol_s = solve_problem(problem, &mesh_s, k, &config.incident, quad)?;
                let f_p = field_at_obs(&sol_p, &obs, &quad)?;
                let f_s = field_at_obs(&sol_s, &obs, &quad)?;
                deltas[slot] = f_p
                    .iter()
                    .zip(&f_s)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
            }
            (
                deltas[0],
                deltas[1],
                h,
                mesh_p.panel_count(),
                mesh_s.panel_count(),
            )
        };
        rows.push(HoleRow {
            j,
            h: h_used,
            delta_soft,
            delta_hard,
            panels_punctured: panels_p,
            panels_solid: panels_s,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(HoleReport {
        config: serde_json::to_value(config)?,
        obs_points: obs,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Formulation gap
// ---------------------------------------------------------------------------

/// Configuration of the formulation-gap sweep: the open-conforming
/// discretisation of Γ₀ \ C_j against the closed-limit discretisation of Γ₀,
/// over a sweep of plane-wave directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapConfig {
    pub lambda: f64,
    pub k: f64,
    pub problem: Problem,
    pub j: u32,
    #[serde(default = "default_obs_count")]
    pub direction_count: usize,
    #[serde(default)]
    pub h_divisor: Option<f64>,
    #[serde(default = "default_obs_count")]
    pub obs_count: usize,
    #[serde(default = "default_obs_radius_factor")]
    pub obs_radius_factor: f64,
    #[serde(default)]
    pub quad_order: Option<usize>,
    #[serde(default = "default_dof_cap")]
    pub dof_cap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub direction: Vec<f64>,
    pub gap: f64,
    pub near_zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub config: serde_json::Value,
    pub obs_points: Vec<Vec<f64>>,
    pub rows: Vec<GapRow>,
    pub max_gap: f64,
}

impl GapReport {
    pub fn to_csv(&self) -> String {
        let header = ["d1", "d2", "gap", "near_zero"];
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.direction[0]),
                    fmt_f64(r.direction[1]),
                    fmt_f64(r.gap),
                    if r.near_zero { "1".into() } else { "0".into() },
                ]
            })
            .collect();
        crate::io::csv_document(&header, &rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "obs_points": self.obs_points,
            "rows": self.rows,
            "max_gap": self.max_gap,
        })
    }
}

/// Sweeps plane-wave directions and reports the field gap between the two
/// conforming discretisations, flagging directions of near-zero gap.
pub fn formulation_gap(config: &GapConfig) -> Result<GapReport> {
    if config.j < 1 {
        return Err(Error::InvalidParameter(
            "formulation gap needs a punctured screen (j >= 1)".into(),
        ));
    }
    let k = Wavenumber::new(config.k)?;
    let quad = match config.quad_order {
        None => QuadSpec::default(),
        Some(q) => QuadSpec::with_base_order(q),
    };
    let solid = crate::geometry::unit_screen(Ambient::Two);
    let obs = observation_ring(&solid, config.obs_count, config.obs_radius_factor);
    let punctured_family =
        PrefractalFamily::SolidMinusCantor { lambda: config.lambda, dimension: Ambient::Two };
    let punct = punctured_family.region(config.j)?;
    let divisor = config.h_divisor.unwrap_or(2.0);
    let h = punctured_family.feature_size(config.j) / divisor;
    let mesh_p = mesh_capped(&punct, h, config.dof_cap)?;
    let mesh_s = mesh_capped(&solid, h, config.dof_cap)?;
    // assemble once, sweep right-hand sides
    let sys_p = match config.problem {
        Problem::Soft => crate::assembly::assemble_single_layer(&mesh_p, k, quad)?,
        Problem::Hard => crate::assembly::assemble_hypersingular(&mesh_p, k, quad)?,
    };
    let sys_s = match config.problem {
        Problem::Soft => crate::assembly::assemble_single_layer(&mesh_s, k, quad)?,
        Problem::Hard => crate::assembly::assemble_hypersingular(&mesh_s, k, quad)?,
    };
    let mut rows = Vec::new();
    let mut max_gap: f64 = 0.0;
    let mut gaps = Vec::new();
    for i in 0..config.direction_count {
        let th = 2.0 * std::f64::consts::PI * i as f64 / config.direction_count as f64;
        let d = vec![th.cos(), th.sin()];
        let field = IncidentField::plane_wave(d.clone());
        let sol_p = crate::solve::solve_assembled(&sys_p, &field)?;
        let sol_s = crate::solve::solve_assembled(&sys_s, &field)?;
        let f_p = field_at_obs(&sol_p, &obs, &quad)?;
        let f_s = field_at_obs(&sol_s, &obs, &quad)?;
        let gap = f_p
            .iter()
            .zip(&f_s)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        max_gap = max_gap.max(gap);
        gaps.push((d, gap));
    }
    for (d, gap) in gaps {
        rows.push(GapRow { direction: d, gap, near_zero: gap <= 1e-4 * max_gap.max(1e-300) });
    }
    Ok(GapReport {
        config: serde_json::to_value(config)?,
        obs_points: obs,
        rows,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
    let good = serde_json::json!({
        "family": {"family": "cantor_middle_lambda", "lambda": 0.3333},
        "problem": "soft", "k": 5.0,
        "incident": {"type": "plane_wave", "direction": [0.0, -1.0]},
        "j_min": 2, "j_max": 4
    });
    let parsed: std::result::Result<crate::experiments::ConvergeConfig, _> =
        serde_json::from_value(good);
    assert!(parsed.is_ok(), "{:?}", parsed.err());
    let bad = serde_json::json!({
        "family": {"family": "cantor_middle_lambda", "lambda": 0.3333},
        "problem": "soft", "k": 5.0,
        "incident": {"type": "plane_wave", "direction": [0.0, -1.0]},
        "j_min": 2, "j_max": 4, "typo_key": 1
    });
    let parsed: std::result::Result<crate::experiments::ConvergeConfig, _> =
        serde_json::from_value(bad);
    assert!(parsed.is_err(), "unknown key accepted");
    let bad_inner = serde_json::json!({
        "family": {"family": "cantor_middle_lambda", "lambda": 0.3333, "lambada": 1},
        "problem": "soft", "k": 5.0,
        "incident": {"type": "plane_wave", "direction": [0.0, -1.0]},
        "j_min": 2, "j_max": 4
    });
    let parsed: std::result::Result<crate::experiments::ConvergeConfig, _> =
        serde_json::from_value(bad_inner);
    assert!(parsed.is_err(), "unknown inner key accepted");
}

    #[test]
    fn observation_ring_is_off_screen() {
        let region = crate::geometry::unit_screen(Ambient::Two);
        let ring = observation_ring(&region, 16, 2.0);
        assert_eq!(ring.len(), 16);
        for p in &ring {
            assert!(p[1].abs() > 1e-6, "ring point on the screen plane: {p:?}");
            let r = ((p[0] - 0.5).powi(2) + p[1].powi(2)).sqrt();
            assert!((r - 2.0).abs() < 1e-12);
        }
        let region3 = crate::geometry::unit_screen(Ambient::Three);
        let ring3 = observation_ring(&region3, 16, 2.0);
        for p in &ring3 {
            assert!(p[2].abs() > 1e-6);
            assert_eq!(p[1], 0.5);
        }
    }

    #[test]
    fn soft_cantor_convergence_quick() {
        // three coarse levels: Cauchy differences decrease
        let config = ConvergeConfig {
            family: PrefractalFamily::CantorMiddleLambda { lambda: 1.0 / 3.0 },
            problem: Problem::Soft,
            k: 5.0,
            incident: IncidentField::plane_wave(vec![0.0, -1.0]),
            j_min: 2,
            j_max: 4,
            h_divisor: None,
            obs_points: None,
            obs_count: 8,
            obs_radius_factor: 2.0,
            quad_order: None,
            dof_cap: 8000,
        };
        let report = converge_prefractal(&config).unwrap();
        assert_eq!(report.rows.len(), 3);
        let d1 = report.rows[1].diff_prev.unwrap();
        let d2 = report.rows[2].diff_prev.unwrap();
        assert!(d2 < d1, "differences not decreasing: {d1} vs {d2}");
        // CSV determinism: identical config, identical bytes
        let report2 = converge_prefractal(&config).unwrap();
        assert_eq!(report.to_csv(), report2.to_csv());
    }

    #[test]
    fn hole_effect_level_zero_is_exactly_zero() {
        let config = HoleConfig {
            lambda: 1.0 / 3.0,
            k: 10.0,
            incident: IncidentField::plane_wave(vec![0.0, -1.0]),
            j_min: 0,
            j_max: 1,
            h_divisor: None,
            obs_count: 8,
            obs_radius_factor: 2.0,
            quad_order: None,
            dof_cap: 8000,
        };
        let report = hole_effect(&config).unwrap();
        assert_eq!(report.rows[0].delta_soft, 0.0);
        assert_eq!(report.rows[0].delta_hard, 0.0);
        assert!(report.rows[1].delta_soft > 0.0);
    }

    #[test]
    fn gap_sweep_grazing_hard_is_flagged_zero() {
        let config = GapConfig {
            lambda: 1.0 / 3.0,
            k: 5.0,
            problem: Problem::Hard,
            j: 1,
            direction_count: 8,
            h_divisor: None,
            obs_count: 8,
            obs_radius_factor: 2.0,
            quad_order: None,
            dof_cap: 8000,
        };
        let report = formulation_gap(&config).unwrap();
        // directions 0 and pi are grazing (d_n = 0): both solutions vanish
        assert!(report.rows[0].near_zero, "grazing gap not flagged");
        assert!(report.rows[4].near_zero);
        assert!(report.max_gap > 0.0);
        // mirror symmetry of the gap for the symmetric screen:
        // d = (cos t, sin t) and (-cos t, sin t) give equal gaps
        let g1 = report.rows[1].gap;
        let g3 = report.rows[3].gap;
        assert!(
            (g1 - g3).abs() <= 1e-8 * g1.max(1e-300),
            "mirror directions gave different gaps: {g1} vs {g3}"
        );
    }
}
