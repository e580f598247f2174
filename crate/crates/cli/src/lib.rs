//! Batch commands behind the `tailor` binary.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;

use tailor_core::edit::{apply_op, ApplyOptions, ScriptRecord};
use tailor_core::flatten::{flatten_uniform, AsapMode, PanelSolve};
use tailor_core::geometry::Panel;
use tailor_core::io::{export_pattern_svg, load_document, parse_script, save_document};
use tailor_core::metrics::{area_ratio, boundary_points, hausdorff_loops, max_tangent_residual};
use tailor_core::GarmentDocument;

/// A failed command: process exit code and a one-line message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<GarmentDocument, CliError> {
    let text = read(path)?;
    load_document(&text).map_err(|e| CliError::input(format!("{}: {}: {e}", e.name(), e.entity())))
}

pub fn load_script(path: &Path) -> Result<Vec<ScriptRecord>, CliError> {
    let text = read(path)?;
    parse_script(&text).map_err(|e| CliError::input(format!("ParseError: {e}")))
}

/// Solver traces of one script op.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpTrace {
    /// 1-based position in the script.
    pub op: usize,
    pub kind: &'static str,
    pub solves: Vec<PanelSolve>,
}

/// Replays `script` on `doc`, stopping at the first failing op.
pub fn run_script(
    doc: &GarmentDocument,
    script: &[ScriptRecord],
    options: &ApplyOptions,
) -> Result<(GarmentDocument, Vec<OpTrace>), CliError> {
    let mut current = doc.clone();
    let mut traces = Vec::with_capacity(script.len());
    for (i, record) in script.iter().enumerate() {
        let outcome = apply_op(&current, &record.op, record.mirror, options).map_err(|e| CliError {
            code: 2,
            message: format!("op {}: {}", i + 1, e.name()),
        })?;
        traces.push(OpTrace {
            op: i + 1,
            kind: record.op.kind(),
            solves: outcome.solves,
        });
        current = outcome.doc;
    }
    Ok((current, traces))
}

#[derive(Debug, Clone, Default)]
pub struct ApplyFlags<'a> {
    pub trace: Option<&'a Path>,
    pub svg: Option<&'a Path>,
    pub asap: AsapMode,
}

pub fn cmd_apply(doc_path: &Path, script_path: &Path, out_path: &Path, flags: &ApplyFlags) -> Result<(), CliError> {
    let doc = load(doc_path)?;
    let script = load_script(script_path)?;
    let options = ApplyOptions {
        asap: flags.asap,
        ..Default::default()
    };
    let (out, traces) = run_script(&doc, &script, &options)?;
    write(out_path, &save_document(&out))?;
    if let Some(path) = flags.trace {
        let text = serde_json::to_string_pretty(&traces).expect("traces serialize");
        write(path, &(text + "\n"))?;
    }
    if let Some(path) = flags.svg {
        write(path, &export_pattern_svg(&out.panels, Some(&doc.panels), None))?;
    }
    Ok(())
}

/// Shape measures of one flattening of a panel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measures {
    /// Pattern area over the original panel's area.
    pub area_ratio: f64,
    /// Boundary Hausdorff distance to the original panel (cm).
    pub hausdorff: f64,
    /// Largest boundary tangent residual against the original chords; absent
    /// when the panel's vertices no longer match the original's.
    pub tangent_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelReport {
    pub index: usize,
    pub name: String,
    /// Name of the original panel compared against.
    pub original: String,
    /// The 2D pattern or its 3D drape differs from the original.
    pub affected: bool,
    pub scale_preserving: Measures,
    pub uniform: Measures,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub input_hash: String,
    pub output_hash: String,
    pub panels: Vec<PanelReport>,
}

fn original_for<'a>(name: &str, index: usize, originals: &'a [Panel]) -> &'a Panel {
    let stem = match name.rsplit_once('.') {
        Some((stem, k)) if k.parse::<usize>().is_ok() => stem,
        _ => name,
    };
    originals
        .iter()
        .find(|p| p.name == name)
        .or_else(|| originals.iter().find(|p| p.name == stem))
        .unwrap_or(&originals[index.min(originals.len() - 1)])
}

fn measures(coords: &[nalgebra::Point2<f64>], panel: &Panel, original: &Panel) -> Result<Measures, CliError> {
    let mut shaped = panel.clone();
    shaped.vertices = coords.to_vec();
    let same_vertices = panel.corr == original.corr;
    let tangent_residual = if same_vertices {
        Some(max_tangent_residual(original, coords).map_err(|e| CliError::input(format!("{}: {e}", e.name())))?)
    } else {
        None
    };
    Ok(Measures {
        area_ratio: area_ratio(&shaped, original),
        hausdorff: hausdorff_loops(&boundary_points(&shaped), &boundary_points(original)),
        tangent_residual,
    })
}

/// Applies `script`, then measures every panel flattened both ways against
/// the original pattern. The uniform flattening starts from the
/// scale-preserving pattern so both share a placement.
pub fn compare(
    doc: &GarmentDocument,
    script: &[ScriptRecord],
    options: &ApplyOptions,
) -> Result<(GarmentDocument, CompareReport), CliError> {
    let (out, _) = run_script(doc, script, options)?;
    let mut panels = Vec::with_capacity(out.panels.len());
    for (index, panel) in out.panels.iter().enumerate() {
        let original = original_for(&panel.name, index, &doc.panels);
        let drape = panel.submesh(&out.garment);
        let affected = panel != original || drape != original.submesh(&doc.garment);
        let uniform = flatten_uniform(&drape, Some(&panel.vertices), &options.solver)
            .map_err(|e| CliError::input(format!("{}: panel {index}: {e}", e.name())))?;
        panels.push(PanelReport {
            index,
            name: panel.name.clone(),
            original: original.name.clone(),
            affected,
            scale_preserving: measures(&panel.vertices, panel, original)?,
            uniform: measures(&uniform.coords, panel, original)?,
        });
    }
    let report = CompareReport {
        input_hash: doc.hash(),
        output_hash: out.hash(),
        panels,
    };
    Ok((out, report))
}

pub fn cmd_compare(doc_path: &Path, script_path: &Path, out_path: &Path, asap: AsapMode) -> Result<CompareReport, CliError> {
    let doc = load(doc_path)?;
    let script = load_script(script_path)?;
    let options = ApplyOptions {
        asap,
        ..Default::default()
    };
    let (_, report) = compare(&doc, &script, &options)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    write(out_path, &(text + "\n"))?;
    Ok(report)
}

/// Loads `doc_path`, binds `127.0.0.1:port` and serves until interrupted.
pub async fn cmd_serve(doc_path: &Path, port: u16) -> Result<(), CliError> {
    let doc = load(doc_path)?;
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
        .await
        .map_err(|e| CliError::input(format!("cannot bind 127.0.0.1:{port}: {e}")))?;
    let state = tailor_service::AppState::default();
    let id = state.insert(doc).await;
    let addr = listener.local_addr().map_err(|e| CliError::input(e.to_string()))?;
    println!("serving http://{addr} session {id}");
    tailor_service::serve_router(listener, tailor_service::router(state), async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
    .map_err(|e| CliError::input(e.to_string()))
}
