//! Library side of the command-line tool. Each command returns the files it
//! wants written and the text it wants printed; nothing here touches the
//! filesystem.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::autovec::{median_residual, residual_sample, AutomorphicField, AutovecError, FieldError, PlanarField, VectorField};
use crate::config::{Config, ConfigError, FieldDef};
use crate::flowlab::{find_zeros, integrate, poincare_hopf_check, FlowError, Rect};
use crate::heegaard::{
    compose_word, corollary_check, feasible_genera, h1_from_gluing, parse_word, presentation_block, sample_interior,
    witness, CurveId, HeegaardError, IndexSet, SampleOptions,
};
use crate::moebius::{MoebiusError, MoebiusMap};
use crate::portrait::{render_svg, PortraitSpec};
use crate::surgery::{connect_inventories, sum3_check, verify_inventory, Sum3Inventory, SumPlan, SurfaceInventory, SurgeryError};
use crate::C64;

/// Failure of a command, split by exit status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommandError {
    /// Bad arguments, config or input files (exit status 2).
    #[error("{0}")]
    Input(String),
    /// A numerical procedure failed (exit status 3).
    #[error("{0}")]
    Numerical(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Input(_) => 2,
            CommandError::Numerical(_) => 3,
        }
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<FlowError> for CommandError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::InvalidArgument(_) => CommandError::Input(e.to_string()),
            _ => CommandError::Numerical(e.to_string()),
        }
    }
}

impl From<AutovecError> for CommandError {
    fn from(e: AutovecError) -> Self {
        match e {
            AutovecError::Moebius(MoebiusError::BallTooLarge { .. }) => CommandError::Numerical(e.to_string()),
            _ => CommandError::Input(e.to_string()),
        }
    }
}

impl From<SurgeryError> for CommandError {
    fn from(e: SurgeryError) -> Self {
        match e {
            SurgeryError::DiscContainsZero { .. } | SurgeryError::BlendDegenerate { .. } | SurgeryError::Flow(_) => {
                CommandError::Numerical(e.to_string())
            }
            _ => CommandError::Input(e.to_string()),
        }
    }
}

impl From<HeegaardError> for CommandError {
    fn from(e: HeegaardError) -> Self {
        match e {
            HeegaardError::Overflow | HeegaardError::NotSymplectic => CommandError::Numerical(e.to_string()),
            _ => CommandError::Input(e.to_string()),
        }
    }
}

impl From<FieldError> for CommandError {
    fn from(e: FieldError) -> Self {
        CommandError::Numerical(e.to_string())
    }
}

/// Files to write (name relative to the output directory, contents) and
/// text for standard output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub stdout: String,
}

impl Output {
    fn file(mut self, name: String, contents: String) -> Self {
        self.files.push((name, contents));
        self
    }

    fn say(mut self, line: impl Into<String>) -> Self {
        self.stdout.push_str(&line.into());
        self.stdout.push('\n');
        self
    }
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn point(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// A planar field built from the configuration.
pub enum Field {
    Automorphic(AutomorphicField<f64>),
    Planar(PlanarField<f64>),
}

impl VectorField<f64> for Field {
    fn eval(&self, z: C64) -> Result<C64, FieldError> {
        match self {
            Field::Automorphic(f) => f.eval(z),
            Field::Planar(f) => f.eval(z),
        }
    }
}

pub fn build_field(cfg: &Config, name: &str) -> Result<Field, CommandError> {
    match cfg.field(name)? {
        FieldDef::Automorphic(a) => Ok(Field::Automorphic(a.build(a.truncation, &cfg.tolerances)?)),
        FieldDef::Planar(p) => Ok(Field::Planar(p.clone())),
        other => Err(ConfigError::WrongKind {
            name: name.to_string(),
            expected: "automorphic or planar",
            found: other.kind(),
        }
        .into()),
    }
}

#[derive(Debug, Clone, Serialize)]
struct GeneratorResidual {
    generator: String,
    median_residual: f64,
    median_residual_previous: Option<f64>,
    ratio: Option<f64>,
}

/// Convergence report for an automorphic field: per-generator median
/// equivariance residual at the configured truncation `L` and at `L - 1`.
pub fn cmd_synth(cfg: &Config, name: &str) -> Result<Output, CommandError> {
    let def = match cfg.field(name)? {
        FieldDef::Automorphic(a) => a,
        other => {
            return Err(ConfigError::WrongKind {
                name: name.to_string(),
                expected: "automorphic",
                found: other.kind(),
            }
            .into())
        }
    };
    let l = def.truncation;
    let points = residual_sample::<f64>();
    let field = def.build(l, &cfg.tolerances)?;
    let previous = if l > 0 { Some(def.build(l - 1, &cfg.tolerances)?) } else { None };
    let gens = def.generators()?;

    let mut rows = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let now = median_residual(&field, g, &points)?;
        let before = previous.as_ref().map(|p| median_residual(p, g, &points)).transpose()?;
        rows.push(GeneratorResidual {
            generator: format!("T{}", i + 1),
            median_residual: now,
            median_residual_previous: before,
            ratio: before.map(|b| now / b),
        });
    }
    let identity = median_residual(&field, &MoebiusMap::identity(), &points)?;
    let report = json!({
        "field": name,
        "truncation": l,
        "ball_size": field.ball().len(),
        "ball_size_previous": previous.as_ref().map(|p| p.ball().len()),
        "identity_residual": identity,
        "generators": rows,
        "sample_points": points.iter().map(|z| point(*z)).collect::<Vec<_>>(),
    });
    let mut out = Output::default().file(format!("synth_{name}.json"), to_json(&report));
    for r in &rows {
        out = out.say(format!(
            "{}: median residual {:.3e} at L={l}{}",
            r.generator,
            r.median_residual,
            r.median_residual_previous
                .map(|b| format!(", {b:.3e} at L={}", l - 1))
                .unwrap_or_default()
        ));
    }
    Ok(out)
}

/// Field values at the given points; unevaluable points are reported, not
/// fatal.
pub fn cmd_eval(cfg: &Config, name: &str, points: &[C64]) -> Result<Output, CommandError> {
    let field = build_field(cfg, name)?;
    let rows: Vec<_> = points
        .iter()
        .map(|&z| match field.eval(z) {
            Ok(v) => json!({ "point": point(z), "value": point(v) }),
            Err(e) => json!({ "point": point(z), "error": e.to_string() }),
        })
        .collect();
    let text = to_json(&json!({ "field": name, "values": rows }));
    Ok(Output {
        stdout: text.clone(),
        ..Default::default()
    }
    .file(format!("eval_{name}.json"), text))
}

pub fn cmd_flow(
    cfg: &Config,
    name: &str,
    from: C64,
    time: f64,
    h0: f64,
    region: Option<&str>,
) -> Result<Output, CommandError> {
    let field = build_field(cfg, name)?;
    let mut opts = cfg.tolerances.integrator();
    opts.region = region.map(|r| cfg.region(r)).transpose()?;
    let tr = integrate(&field, from, time, h0, &opts)?;
    let (t, end) = tr.end();
    let summary = json!({
        "field": name,
        "start": point(from),
        "t_end": time,
        "termination": tr.termination,
        "final_time": t,
        "final_point": point(end),
        "samples": tr.samples.len(),
    });
    Ok(Output::default()
        .file(format!("flow_{name}.csv"), tr.to_csv())
        .file(format!("flow_{name}.json"), to_json(&summary))
        .say(format!("{:?} at t = {t} ({}, {})", tr.termination, end.re, end.im)))
}

pub fn cmd_zeros(cfg: &Config, name: &str, region: &str, grid: usize, chi: Option<i64>) -> Result<Output, CommandError> {
    let field = build_field(cfg, name)?;
    let rect = cfg.region(region)?;
    let scan = find_zeros(&field, &rect, grid, &cfg.tolerances.zeros())?;
    let audit = chi.map(|c| poincare_hopf_check(&scan.zeros, c));
    let report = json!({
        "field": name,
        "region": rect,
        "grid": grid,
        "zeros": scan.zeros,
        "diagnostics": scan.diagnostics,
        "poincare_hopf": audit,
    });
    let mut out = Output::default()
        .file(format!("zeros_{name}.csv"), scan.to_csv())
        .file(format!("zeros_{name}.json"), to_json(&report));
    for z in &scan.zeros {
        out = out.say(format!("({:.9}, {:.9}) index {:+}", z.location.re, z.location.im, z.winding_index));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct PortraitArgs {
    pub grid: usize,
    pub seeds: usize,
    pub arrows: usize,
    pub width: u32,
    pub height: u32,
}

impl Default for PortraitArgs {
    fn default() -> Self {
        Self {
            grid: 64,
            seeds: 12,
            arrows: 16,
            width: 800,
            height: 600,
        }
    }
}

fn portrait_files<F: VectorField<f64>>(
    cfg: &Config,
    field: &F,
    rect: Rect<f64>,
    args: &PortraitArgs,
    stem: &str,
) -> Result<(Output, Vec<crate::flowlab::ZeroRecord<f64>>), CommandError> {
    let spec = PortraitSpec {
        region: rect,
        seeds: args.seeds,
        arrows: args.arrows,
        width: args.width,
        height: args.height,
    };
    let scan = find_zeros(field, &rect, args.grid, &cfg.tolerances.zeros())?;
    let svg = render_svg(field, &spec, &scan.zeros)?;
    let out = Output::default()
        .file(format!("{stem}.svg"), svg)
        .file(format!("{stem}_zeros.json"), to_json(&json!({ "region": rect, "zeros": scan.zeros })))
        .say(format!("{} zeros marked", scan.zeros.len()));
    Ok((out, scan.zeros))
}

pub fn cmd_portrait(cfg: &Config, name: &str, region: &str, args: &PortraitArgs) -> Result<Output, CommandError> {
    let field = build_field(cfg, name)?;
    let rect = cfg.region(region)?;
    Ok(portrait_files(cfg, &field, rect, args, &format!("portrait_{name}"))?.0)
}

/// Input of the `surgery` command: either two inventories and a plan, or a
/// 3-manifold sum.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeryFile {
    #[serde(default)]
    pub inv1: Option<SurfaceInventory>,
    #[serde(default)]
    pub inv2: Option<SurfaceInventory>,
    #[serde(default)]
    pub plan: Option<SumPlan>,
    #[serde(default)]
    pub sum3: Option<Sum3Request>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sum3Request {
    pub a: Sum3Inventory,
    pub b: Sum3Inventory,
    #[serde(default)]
    pub removed: Option<[i64; 2]>,
    #[serde(default)]
    pub twist: bool,
}

pub fn cmd_surgery(plan_json: &str) -> Result<Output, CommandError> {
    let file: SurgeryFile =
        serde_json::from_str(plan_json).map_err(|e| CommandError::Input(format!("plan file: {e}")))?;
    match file {
        SurgeryFile {
            inv1: Some(a),
            inv2: Some(b),
            plan: Some(plan),
            sum3: None,
        } => {
            let result = connect_inventories(&a, &b, &plan)?;
            let audit = verify_inventory(&result);
            let report = json!({ "result": result, "audit": audit });
            Ok(Output::default().file("surgery.json".into(), to_json(&report)).say(format!(
                "genus {} ({}), {} equilibria, index sum {} = chi {}: {}",
                result.genus,
                if result.orientable { "orientable" } else { "nonorientable" },
                result.equilibria.len(),
                audit.index_sum,
                audit.chi.map_or("-".into(), |c| c.to_string()),
                if audit.pass { "pass" } else { "FAIL" }
            )))
        }
        SurgeryFile {
            inv1: None,
            inv2: None,
            plan: None,
            sum3: Some(req),
        } => {
            let result = sum3_check(&req.a, &req.b, req.removed.map(|[i, j]| (i, j)), req.twist)?;
            let text = serde_json::to_string(&result.marker).expect("marker serializes");
            Ok(Output::default()
                .file("surgery.json".into(), to_json(&json!({ "sum3": result })))
                .say(format!("index sum {}, special set {}", result.index_sum(), text.trim_matches('"'))))
        }
        _ => Err(CommandError::Input(
            "plan file needs either inv1, inv2 and plan, or sum3".into(),
        )),
    }
}

#[derive(Debug, Clone, Default)]
pub struct HeegaardArgs {
    /// Comma-separated indices; an empty string is the empty set.
    pub indices: Option<String>,
    pub hyperbolic: Option<usize>,
    pub genus: Option<u32>,
    pub twists: Option<String>,
}

fn parse_indices(s: &str) -> Result<Vec<i64>, CommandError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CommandError::Input(format!("bad index {t:?}"))))
        .collect()
}

fn format_set(s: &BTreeSet<u32>) -> String {
    format!("{{{}}}", s.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
}

pub fn cmd_heegaard(args: &HeegaardArgs) -> Result<Output, CommandError> {
    match (&args.indices, &args.twists) {
        (Some(text), None) => {
            let indices = parse_indices(text)?;
            let set = match args.hyperbolic {
                Some(h) => IndexSet::new(indices, h)?,
                None => IndexSet::from_indices(indices),
            };
            let genera = feasible_genera(&set)?;
            let mut checked: BTreeSet<u32> = genera.clone();
            checked.extend(args.genus);
            let rows: Vec<_> = checked
                .iter()
                .map(|&p| {
                    json!({
                        "genus": p,
                        "feasible": genera.contains(&p),
                        "witness": witness(&set, p),
                        "hyperbolic_bound": 2 * (i64::from(p) - 1).max(0),
                        "corollary": corollary_check(&set, p),
                    })
                })
                .collect();
            let report = json!({
                "indices": set.indices,
                "hyperbolic": set.hyperbolic,
                "feasible_genera": genera,
                "checks": rows,
            });
            Ok(Output::default().file("heegaard.json".into(), to_json(&report)).say(format_set(&genera)))
        }
        (None, Some(text)) => {
            let word = parse_word(text)?;
            let genus = match args.genus {
                Some(g) => g,
                None => word
                    .iter()
                    .map(|l| match l.curve {
                        CurveId::Alpha(i) | CurveId::Beta(i) => i,
                        CurveId::Gamma(i) => i + 1,
                    })
                    .max()
                    .unwrap_or(1),
            };
            let m = compose_word(&word, genus)?;
            let group = h1_from_gluing(&m)?;
            let report = json!({
                "genus": genus,
                "word": word.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                "matrix": m.entries,
                "presentation": presentation_block(&m),
                "h1": group,
                "h1_text": group.to_string(),
            });
            Ok(Output::default().file("heegaard.json".into(), to_json(&report)).say(group.to_string()))
        }
        _ => Err(CommandError::Input("give exactly one of --indices and --twists".into())),
    }
}

pub fn cmd_extend3(cfg: &Config, name: &str, samples: usize, seed: u64) -> Result<Output, CommandError> {
    let def = match cfg.field(name)? {
        FieldDef::Sphere(s) => s,
        other => {
            return Err(ConfigError::WrongKind {
                name: name.to_string(),
                expected: "sphere",
                found: other.kind(),
            }
            .into())
        }
    };
    let field = def.build()?;
    let opts = SampleOptions {
        samples,
        seed,
        ..SampleOptions::default()
    };
    let report = sample_interior(&field, &opts)?;
    let boundary = match &report.boundary {
        Some(b) => format!("boundary zeros match within {:.1e}: {}", b.max_mismatch, if b.pass { "pass" } else { "FAIL" }),
        None => "surface field vanishes identically".to_string(),
    };
    Ok(Output::default()
        .file(format!("extend3_{name}.json"), to_json(&json!({ "field": name, "report": report })))
        .say(format!("{} samples, {} interior hits outside r = {}", samples, report.interior_hits, opts.origin_radius))
        .say(boundary))
}

/// The pendulum `θ̇ = ω, ω̇ = -sin θ` on `[-4, 4] × [-3, 3]`: zeros, their
/// indices, the per-period index sum and a portrait.
pub fn cmd_demo_pendulum(cfg: &Config) -> Result<Output, CommandError> {
    let field = PlanarField::Pendulum { k: 1.0 };
    let rect = Rect::new(-4.0, 4.0, -3.0, 3.0)?;
    let (out, zeros) = portrait_files(cfg, &field, rect, &PortraitArgs::default(), "demo_pendulum")?;
    // one period of θ, [-π, π), covers the Klein-bottle quotient's equilibria
    let strip: Vec<_> = zeros
        .iter()
        .filter(|z| z.location.re >= -std::f64::consts::PI - 1e-6 && z.location.re < std::f64::consts::PI - 1e-6)
        .cloned()
        .collect();
    let audit = poincare_hopf_check(&strip, 0);
    let report = json!({ "zeros": zeros, "strip_zeros": strip, "strip_audit": audit });
    let mut out = out.file("demo_pendulum.json".into(), to_json(&report));
    for z in &zeros {
        out = out.say(format!("({:.9}, {:.9}) index {:+}", z.location.re, z.location.im, z.winding_index));
    }
    Ok(out.say(format!("index sum over one period: {} (chi = 0)", audit.index_sum)))
}
