//! JSON config schemas for the CLI subcommands. Configs are strict: unknown
//! keys are rejected. Lines starting with `//` are stripped before parsing,
//! so the commented templates from --print-example are directly usable.

use screenbem::experiments::{ConvergeConfig, GapConfig, HoleConfig};
use screenbem::geometry::PrefractalFamily;
use screenbem::solve::IncidentField;
use screenbem::{Problem, ScreenRegion};
use serde::Deserialize;

/// Where the screen comes from: a prefractal family at a level, a plain unit
/// screen, or a mesh file produced by the mesh subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScreenSpec {
    Prefractal { family: PrefractalFamily, level: u32 },
    Unit { dimension: usize },
    MeshFile { path: String },
}

impl ScreenSpec {
    /// Builds the region (None for mesh files, which are loaded directly).
    pub fn region(&self) -> anyhow::Result<Option<ScreenRegion>> {
        match self {
            ScreenSpec::Prefractal { family, level } => Ok(Some(family.region(*level)?)),
            ScreenSpec::Unit { dimension } => {
                let dim = match dimension {
                    2 => screenbem::Ambient::Two,
                    3 => screenbem::Ambient::Three,
                    d => anyhow::bail!("unit screen dimension must be 2 or 3, got {d}"),
                };
                Ok(Some(screenbem::geometry::unit_screen(dim)))
            }
            ScreenSpec::MeshFile { .. } => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub screen: ScreenSpec,
    pub h: f64,
    /// Output file name inside --out (default mesh.json).
    #[serde(default)]
    pub out_name: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub screen: ScreenSpec,
    /// Mesh size; required unless the screen is a mesh file.
    #[serde(default)]
    pub h: Option<f64>,
    pub k: f64,
    pub problem: Problem,
    pub incident: IncidentField,
    #[serde(default)]
    pub quad_order: Option<usize>,
    /// Optional matrix dump file name inside --out.
    #[serde(default)]
    pub dump_matrix: Option<String>,
    #[serde(default)]
    pub out_name: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub n1: usize,
    pub n2: usize,
    /// In 3D the grid lies in the plane x2 = offset.
    #[serde(default)]
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldContentSpec {
    Scattered,
    Total,
}

fn default_content() -> FieldContentSpec {
    FieldContentSpec::Scattered
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub screen: ScreenSpec,
    #[serde(default)]
    pub h: Option<f64>,
    pub k: f64,
    pub problem: Problem,
    pub incident: IncidentField,
    #[serde(default)]
    pub quad_order: Option<usize>,
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_content")]
    pub content: FieldContentSpec,
    #[serde(default)]
    pub out_name: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarfieldConfig {
    pub screen: ScreenSpec,
    #[serde(default)]
    pub h: Option<f64>,
    pub k: f64,
    pub problem: Problem,
    pub incident: IncidentField,
    #[serde(default)]
    pub quad_order: Option<usize>,
    #[serde(default)]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_direction_count")]
    pub direction_count: usize,
    #[serde(default)]
    pub out_name: Option<String>,
}

fn default_direction_count() -> usize {
    36
}

/// Strips `//` comment lines, then parses strictly.
pub fn parse_config<T: serde::de::DeserializeOwned>(text: &str) -> anyhow::Result<T> {
    let stripped: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("//"))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(serde_json::from_str(&stripped)?)
}

pub fn example(subcommand: &str) -> &'static str {
    match subcommand {
        "mesh" => EXAMPLE_MESH,
        "solve" => EXAMPLE_SOLVE,
        "field" => EXAMPLE_FIELD,
        "farfield" => EXAMPLE_FARFIELD,
        "converge" => EXAMPLE_CONVERGE,
        "null" => EXAMPLE_NULL,
        "hole" => EXAMPLE_HOLE,
        "gap" => EXAMPLE_GAP,
        _ => unreachable!(),
    }
}

pub const EXAMPLE_MESH: &str = r#"// mesh: generate a screen and export the panel mesh as JSON.
// screen.kind: "prefractal" (family + level), "unit" (dimension 2 or 3),
// or "mesh_file" (path to a previously exported mesh).
// Families: cantor_middle_lambda {lambda}, cantor_dust {lambda},
// sierpinski_triangle, koch_snowflake_interior, swiss_cheese
// {dimension, epsilon, grid_margin}, solid_minus_cantor {lambda, dimension},
// solid_minus_swiss_cheese {...}, irregular_circles {circle_segments},
// grid_inner / grid_outer {base, base_level}.
{
  "screen": { "kind": "prefractal",
              "family": { "family": "sierpinski_triangle" },
              "level": 3 },
  "h": 0.0625,
  "out_name": "mesh.json"
}
"#;

pub const EXAMPLE_SOLVE: &str = r#"// solve: assemble and solve one scattering problem, export the density.
// problem: "soft" (Dirichlet, piecewise-constant basis) or "hard"
// (Neumann, interior hat basis). incident.type: "plane_wave" {direction}
// or "point_source" {location, amplitude = [re, im]}.
// dump_matrix: optional file name for the assembled matrix (JSON).
{
  "screen": { "kind": "unit", "dimension": 2 },
  "h": 0.015625,
  "k": 5.0,
  "problem": "soft",
  "incident": { "type": "plane_wave", "direction": [0.0, -1.0] },
  "out_name": "density.json"
}
"#;

pub const EXAMPLE_FIELD: &str = r#"// field: solve and evaluate the scattered or total field.
// Either give explicit "points" (length-n coordinates) or a "grid"
// {lo, hi, n1, n2, offset}; in 3D the grid spans (x1, x3) at x2 = offset.
// content: "scattered" or "total". Output: CSV plus a JSON envelope.
{
  "screen": { "kind": "unit", "dimension": 2 },
  "h": 0.03125,
  "k": 5.0,
  "problem": "soft",
  "incident": { "type": "plane_wave", "direction": [0.0, -1.0] },
  "grid": { "lo": [-1.0, -1.5], "hi": [2.0, 1.5], "n1": 60, "n2": 60 },
  "content": "total",
  "out_name": "field"
}
"#;

pub const EXAMPLE_FARFIELD: &str = r#"// farfield: solve and export the far-field pattern over unit directions.
// Directions default to a uniform sweep of direction_count angles (2D)
// or a ring in the (x1, x3) plane (3D).
{
  "screen": { "kind": "unit", "dimension": 2 },
  "h": 0.03125,
  "k": 5.0,
  "problem": "soft",
  "incident": { "type": "plane_wave", "direction": [0.0, -1.0] },
  "direction_count": 72,
  "out_name": "farfield.csv"
}
"#;

pub const EXAMPLE_CONVERGE: &str = r#"// converge: solve a prefractal family across levels j and report the
// Cauchy differences of the scattered field at an observation ring.
// h_divisor defaults per family/problem; obs ring: obs_count points at
// obs_radius_factor x screen diameter. Levels run j_min..=j_max.
{
  "family": { "family": "cantor_middle_lambda", "lambda": 0.3333333333333333 },
  "problem": "soft",
  "k": 5.0,
  "incident": { "type": "plane_wave", "direction": [0.0, -1.0] },
  "j_min": 2,
  "j_max": 6
}
"#;

pub const EXAMPLE_NULL: &str = r#"// null: convergence run plus decay summary of max |u^s_j| (the limiting
// field is zero for screens the boundary condition cannot see).
{
  "family": { "family": "sierpinski_triangle" },
  "problem": "hard",
  "k": 2.0,
  "incident": { "type": "plane_wave", "direction": [0.0, 0.0, -1.0] },
  "j_min": 1,
  "j_max": 4
}
"#;

pub const EXAMPLE_HOLE: &str = r#"// hole: compare the solid screen [0,1] against the punctured screen
// [0,1] minus the level-j Cantor set, for both problems, per level.
{
  "lambda": 0.3333333333333333,
  "k": 10.0,
  "incident": { "type": "plane_wave", "direction": [0.0, -1.0] },
  "j_min": 1,
  "j_max": 5
}
"#;

pub const EXAMPLE_GAP: &str = r#"// gap: sweep plane-wave directions and report the field gap between the
// open-conforming (punctured) and closed-limit (solid) discretisations.
{
  "lambda": 0.3333333333333333,
  "k": 5.0,
  "problem": "hard",
  "j": 3,
  "direction_count": 16
}
"#;

// re-exported for the command runners
pub type CliConvergeConfig = ConvergeConfig;
pub type CliHoleConfig = HoleConfig;
pub type CliGapConfig = GapConfig;
