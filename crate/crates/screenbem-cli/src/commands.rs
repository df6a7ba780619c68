//! Command runners: build the pipeline per subcommand and write outputs.

use crate::config::{
    parse_config, CliConvergeConfig, CliGapConfig, CliHoleConfig, FarfieldConfig, FieldConfig,
    FieldContentSpec, MeshConfig, ScreenSpec, SolveConfig,
};
use anyhow::{bail, Context};
use screenbem::experiments::{converge_prefractal, formulation_gap, hole_effect, null_test};
use screenbem::geometry::ScreenPanelMesh;
use screenbem::potentials::{far_field, regular_grid, scattered_field, total_field};
use screenbem::quadrature::QuadSpec;
use screenbem::solve::{solve_assembled, DensitySolution};
use screenbem::{Ambient, Wavenumber};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// CLI-level failure classes, mapped to exit codes in main.
#[derive(Debug)]
pub enum Failure {
    /// exit 2
    Config(anyhow::Error),
    /// exit 3
    Numerical(anyhow::Error),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Numerical(e) => write!(f, "numerical failure: {e:#}"),
        }
    }
}

fn classify(e: screenbem::Error) -> Failure {
    match e {
        screenbem::Error::QuadratureNonFinite { .. } | screenbem::Error::SingularMatrix { .. } => {
            Failure::Numerical(e.into())
        }
        other => Failure::Config(other.into()),
    }
}

pub type CmdResult = Result<(), Failure>;

fn config_err<T>(e: impl Into<anyhow::Error>) -> Result<T, Failure> {
    Err(Failure::Config(e.into()))
}

pub fn load_config_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))
        .map_err(Failure::Config)
}

fn write_output(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))
        .map_err(Failure::Config)?;
    let path = out_dir.join(name);
    std::fs::write(&path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Config)?;
    Ok(path)
}

fn build_mesh(
    screen: &ScreenSpec,
    h: Option<f64>,
    out_dir: &Path,
) -> Result<Arc<ScreenPanelMesh>, Failure> {
    match screen {
        ScreenSpec::MeshFile { path } => {
            let resolved = if Path::new(path).is_absolute() {
                PathBuf::from(path)
            } else {
                out_dir.join(path)
            };
            let text = std::fs::read_to_string(&resolved)
                .with_context(|| format!("cannot read mesh file {}", resolved.display()))
                .map_err(Failure::Config)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Failure::Config(e.into()))?;
            Ok(Arc::new(ScreenPanelMesh::from_json(&value).map_err(classify)?))
        }
        other => {
            let region = other.region().map_err(Failure::Config)?.expect("non-file screen");
            let h = match h {
                Some(h) => h,
                None => return config_err(anyhow::anyhow!("mesh size h required")),
            };
            Ok(Arc::new(ScreenPanelMesh::build(&region, h).map_err(classify)?))
        }
    }
}

fn quad_spec(config_order: Option<usize>, flag_order: Option<usize>) -> QuadSpec {
    match flag_order.or(config_order) {
        None => QuadSpec::default(),
        Some(q) => QuadSpec::with_base_order(q),
    }
}

pub fn run_mesh(text: &str, out_dir: &Path) -> CmdResult {
    let config: MeshConfig = parse_config(text).map_err(Failure::Config)?;
    let mesh = build_mesh(&config.screen, Some(config.h), out_dir)?;
    let name = config.out_name.as_deref().unwrap_or("mesh.json");
    let path = write_output(out_dir, name, &serde_json::to_string_pretty(&mesh.to_json()).unwrap())?;
    eprintln!(
        "mesh: {} panels, h = {:.6e}, hash {} -> {}",
        mesh.panel_count(),
        mesh.h(),
        mesh.content_hash(),
        path.display()
    );
    Ok(())
}

fn solve_inner(
    screen: &ScreenSpec,
    h: Option<f64>,
    k: f64,
    problem: screenbem::Problem,
    incident: &screenbem::solve::IncidentField,
    quad: QuadSpec,
    out_dir: &Path,
    dump_matrix: Option<&str>,
) -> Result<DensitySolution, Failure> {
    let mesh = build_mesh(screen, h, out_dir)?;
    let k = Wavenumber::new(k).map_err(classify)?;
    let system = match problem {
        screenbem::Problem::Soft => {
            screenbem::assembly::assemble_single_layer(&mesh, k, quad).map_err(classify)?
        }
        screenbem::Problem::Hard => {
            match screenbem::assembly::assemble_hypersingular(&mesh, k, quad) {
                Ok(sys) => sys,
                Err(screenbem::Error::EmptyBasis(_)) => {
                    // degenerate V+ = {0}: the zero solution
                    return screenbem::solve::solve_hard(&mesh, k, incident, quad)
                        .map_err(classify);
                }
                Err(e) => return Err(classify(e)),
            }
        }
    };
    if let Some(name) = dump_matrix {
        write_output(out_dir, name, &serde_json::to_string(&system.dump_json()).unwrap())?;
    }
    solve_assembled(&system, incident).map_err(classify)
}

pub fn run_solve(text: &str, out_dir: &Path, quad_flag: Option<usize>) -> CmdResult {
    let config: SolveConfig = parse_config(text).map_err(Failure::Config)?;
    let quad = quad_spec(config.quad_order, quad_flag);
    let solution = solve_inner(
        &config.screen,
        config.h,
        config.k,
        config.problem,
        &config.incident,
        quad,
        out_dir,
        config.dump_matrix.as_deref(),
    )?;
    let name = config.out_name.as_deref().unwrap_or("density.json");
    let path =
        write_output(out_dir, name, &serde_json::to_string_pretty(&solution.to_json()).unwrap())?;
    eprintln!(
        "solve: {} dofs, residual {:.3e} -> {}",
        solution.coefficients.len(),
        solution.residual,
        path.display()
    );
    Ok(())
}

pub fn run_field(text: &str, out_dir: &Path, quad_flag: Option<usize>) -> CmdResult {
    let config: FieldConfig = parse_config(text).map_err(Failure::Config)?;
    let quad = quad_spec(config.quad_order, quad_flag);
    let solution = solve_inner(
        &config.screen,
        config.h,
        config.k,
        config.problem,
        &config.incident,
        quad,
        out_dir,
        None,
    )?;
    let dim = solution.dim();
    let points: Vec<Vec<f64>> = match (&config.points, &config.grid) {
        (Some(p), None) => p.clone(),
        (None, Some(g)) => regular_grid(dim, g.lo, g.hi, g.n1, g.n2, g.offset),
        (Some(_), Some(_)) => {
            return config_err(anyhow::anyhow!("give either points or grid, not both"))
        }
        (None, None) => return config_err(anyhow::anyhow!("field needs points or a grid")),
    };
    let grid = match config.content {
        FieldContentSpec::Scattered => scattered_field(&solution, &points, &quad),
        FieldContentSpec::Total => total_field(&solution, &points, &quad),
    }
    .map_err(classify)?;
    let base = config.out_name.as_deref().unwrap_or("field");
    let csv_path = write_output(out_dir, &format!("{base}.csv"), &grid.to_csv(dim))?;
    write_output(
        out_dir,
        &format!("{base}.json"),
        &serde_json::to_string_pretty(&grid.to_json()).unwrap(),
    )?;
    eprintln!("field: {} points -> {}", points.len(), csv_path.display());
    Ok(())
}

pub fn run_farfield(text: &str, out_dir: &Path, quad_flag: Option<usize>) -> CmdResult {
    let config: FarfieldConfig = parse_config(text).map_err(Failure::Config)?;
    let quad = quad_spec(config.quad_order, quad_flag);
    let solution = solve_inner(
        &config.screen,
        config.h,
        config.k,
        config.problem,
        &config.incident,
        quad,
        out_dir,
        None,
    )?;
    let dim = solution.dim();
    let directions: Vec<Vec<f64>> = match &config.directions {
        Some(d) => d.clone(),
        None => (0..config.direction_count)
            .map(|i| {
                let th =
                    2.0 * std::f64::consts::PI * (i as f64 + 0.5) / config.direction_count as f64;
                match dim {
                    Ambient::Two => vec![th.cos(), th.sin()],
                    Ambient::Three => vec![th.cos(), 0.0, th.sin()],
                }
            })
            .collect(),
    };
    let pattern = far_field(&solution, &directions).map_err(classify)?;
    let name = config.out_name.as_deref().unwrap_or("farfield.csv");
    let path = write_output(out_dir, name, &pattern.to_csv(dim))?;
    eprintln!(
        "farfield: {} directions ({}) -> {}",
        directions.len(),
        pattern.convention,
        path.display()
    );
    Ok(())
}

pub fn run_converge(
    text: &str,
    out_dir: &Path,
    quad_flag: Option<usize>,
    null_mode: bool,
) -> CmdResult {
    let mut config: CliConvergeConfig = parse_config(text).map_err(Failure::Config)?;
    if quad_flag.is_some() {
        config.quad_order = quad_flag;
    }
    if null_mode {
        let report = null_test(&config).map_err(classify)?;
        write_output(out_dir, "null.csv", &report.to_csv())?;
        write_output(
            out_dir,
            "null.json",
            &serde_json::to_string_pretty(&report.to_json()).unwrap(),
        )?;
        eprintln!(
            "null: max|u^s| per level {:?}, final/initial = {:.4}",
            report.max_abs_per_level, report.final_ratio
        );
    } else {
        let report = converge_prefractal(&config).map_err(classify)?;
        write_output(out_dir, "converge.csv", &report.to_csv())?;
        write_output(
            out_dir,
            "converge.json",
            &serde_json::to_string_pretty(&report.to_json()).unwrap(),
        )?;
        let diffs: Vec<f64> = report.rows.iter().filter_map(|r| r.diff_prev).collect();
        eprintln!("converge: {} levels, Cauchy differences {:?}", report.rows.len(), diffs);
    }
    Ok(())
}

pub fn run_hole(text: &str, out_dir: &Path, quad_flag: Option<usize>) -> CmdResult {
    let mut config: CliHoleConfig = parse_config(text).map_err(Failure::Config)?;
    if quad_flag.is_some() {
        config.quad_order = quad_flag;
    }
    let report = hole_effect(&config).map_err(classify)?;
    write_output(out_dir, "hole.csv", &report.to_csv())?;
    write_output(
        out_dir,
        "hole.json",
        &serde_json::to_string_pretty(&report.to_json()).unwrap(),
    )?;
    let soft: Vec<f64> = report.rows.iter().map(|r| r.delta_soft).collect();
    let hard: Vec<f64> = report.rows.iter().map(|r| r.delta_hard).collect();
    eprintln!("hole: delta_soft {soft:?}, delta_hard {hard:?}");
    Ok(())
}

pub fn run_gap(text: &str, out_dir: &Path, quad_flag: Option<usize>) -> CmdResult {
    let mut config: CliGapConfig = parse_config(text).map_err(Failure::Config)?;
    if quad_flag.is_some() {
        config.quad_order = quad_flag;
    }
    let report = formulation_gap(&config).map_err(classify)?;
    write_output(out_dir, "gap.csv", &report.to_csv())?;
    write_output(out_dir, "gap.json", &serde_json::to_string_pretty(&report.to_json()).unwrap())?;
    let flagged = report.rows.iter().filter(|r| r.near_zero).count();
    eprintln!(
        "gap: max {:.4e} over {} directions, {} near-zero",
        report.max_gap,
        report.rows.len(),
        flagged
    );
    Ok(())
}

pub fn bail_if_both(_: ()) -> anyhow::Result<()> {
    bail!("unreachable")
}
