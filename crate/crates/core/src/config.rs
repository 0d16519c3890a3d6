//! TOML configuration: named fields and regions, tolerance overrides and the
//! output directory.
//!
//! ```toml
//! out = "out"
//!
//! [tolerances]
//! zero_tol = 1e-8
//!
//! [fields.genus2]
//! type = "automorphic"
//! truncation = 3
//!
//! [fields.pendulum]
//! type = "planar"
//! kind = "pendulum"
//! k = 1.0
//!
//! [fields.dipole]
//! type = "sphere"
//! coefficients = [[0, 0], [0, 0], [1, 0]]
//!
//! [regions.strip]
//! x = [-4, 4]
//! y = [-3, 3]
//! ```
//!
//! Complex numbers are `[re, im]`; a generator is `[a, b, c, d]` for
//! `z ↦ (az + b)/(cz + d)`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autovec::{AutomorphicField, AutovecError, PlanarField, DEFAULT_RADIUS, KERNEL_POLE, POLE_GUARD};
use crate::flowlab::{FlowError, IntegratorOptions, Rect, WindingOptions, ZeroOptions, ZERO_TOL};
use crate::heegaard::{BallExtensionField, HeegaardError, Profile, SphereField};
use crate::moebius::{paper_generators, BallOptions, MoebiusMap, BALL_CAP, DEDUP_TOL};
use crate::surgery::TubeOptions;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("unknown region {0:?}")]
    UnknownRegion(String),
    #[error("field {name:?} is {found}, expected {expected}")]
    WrongKind { name: String, expected: &'static str, found: &'static str },
    #[error("unknown tolerance {0:?}")]
    UnknownTolerance(String),
    #[error("bad tolerance override {0:?}, expected NAME=VALUE")]
    BadOverride(String),
    #[error("field {name:?}: {reason}")]
    InvalidField { name: String, reason: String },
    #[error("region {name:?}: {reason}")]
    InvalidRegion { name: String, reason: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub fields: BTreeMap<String, FieldDef>,
    #[serde(default)]
    pub regions: BTreeMap<String, RegionDef>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldDef {
    Automorphic(AutomorphicDef),
    Planar(PlanarField<f64>),
    Sphere(SphereDef),
}

impl FieldDef {
    pub fn kind(&self) -> &'static str {
        match self {
            FieldDef::Automorphic(_) => "automorphic",
            FieldDef::Planar(_) => "planar",
            FieldDef::Sphere(_) => "sphere",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphicDef {
    /// Defaults to the genus-2 example group.
    #[serde(default)]
    pub generators: Option<Vec<[C64; 4]>>,
    #[serde(default = "default_s1")]
    pub s1: C64,
    #[serde(default = "default_s2")]
    pub s2: C64,
    #[serde(default = "default_weight")]
    pub weight: u32,
    /// Word-length truncation `L`.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_kernel_pole")]
    pub kernel_pole: C64,
}

fn default_s1() -> C64 {
    C64::new(-2.0, 3.0)
}
fn default_s2() -> C64 {
    C64::new(2.0, 3.0)
}
fn default_weight() -> u32 {
    2
}
fn default_truncation() -> usize {
    DEFAULT_RADIUS
}
fn default_kernel_pole() -> C64 {
    C64::new(KERNEL_POLE.0, KERNEL_POLE.1)
}

impl AutomorphicDef {
    pub fn generators(&self) -> Result<Vec<MoebiusMap<f64>>, AutovecError> {
        match &self.generators {
            None => Ok(paper_generators()),
            Some(g) => g
                .iter()
                .map(|[a, b, c, d]| MoebiusMap::new(*a, *b, *c, *d).map_err(AutovecError::from))
                .collect(),
        }
    }

    /// The field truncated at `truncation` (overriding the configured one).
    pub fn build(&self, truncation: usize, tol: &Tolerances) -> Result<AutomorphicField<f64>, AutovecError> {
        Ok(AutomorphicField::build(
            &self.generators()?,
            self.s1,
            self.s2,
            self.weight,
            truncation,
            self.kernel_pole,
            tol.ball(),
        )?
        .with_pole_guard(tol.pole_guard))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereDef {
    /// `ż = c0 + c1 z + c2 z²` in the chart from the north pole.
    pub coefficients: [C64; 3],
    /// Tangential profile, polynomial coefficients in `r`; default `r`.
    #[serde(default)]
    pub a: Option<Vec<f64>>,
    /// Radial profile; default `r(1 - r)`.
    #[serde(default)]
    pub b: Option<Vec<f64>>,
}

impl SphereDef {
    pub fn build(&self) -> Result<BallExtensionField<f64>, HeegaardError> {
        let [c0, c1, c2] = self.coefficients;
        let surface = SphereField::new(c0, c1, c2);
        let default = BallExtensionField::new(surface);
        let a = self.a.clone().map(Profile::new).unwrap_or(default.a);
        let b = self.b.clone().map(Profile::new).unwrap_or(default.b);
        BallExtensionField::with_profiles(surface, a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDef {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl RegionDef {
    pub fn rect(&self) -> Result<Rect<f64>, FlowError> {
        Rect::new(self.x[0], self.x[1], self.y[0], self.y[1])
    }
}

/// Tolerances shared by the analyses; every one can be overridden from the
/// config file or with `--tol NAME=VALUE`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub zero_tol: f64,
    pub pole_guard: f64,
    pub dedup_tol: f64,
    pub ball_cap: usize,
    pub max_disp: f64,
    pub min_step: f64,
    pub winding_agree: f64,
    pub integer_tol: f64,
    pub newton_damping: f64,
    pub blend_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let integ = IntegratorOptions::default();
        let wind = WindingOptions::default();
        Self {
            zero_tol: ZERO_TOL,
            pole_guard: POLE_GUARD,
            dedup_tol: DEDUP_TOL,
            ball_cap: BALL_CAP,
            max_disp: integ.max_disp,
            min_step: integ.min_step,
            winding_agree: wind.agree,
            integer_tol: wind.integer_tol,
            newton_damping: ZeroOptions::default().damping,
            blend_tol: TubeOptions::default().blend_tol,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 10] = [
        "zero_tol",
        "pole_guard",
        "dedup_tol",
        "ball_cap",
        "max_disp",
        "min_step",
        "winding_agree",
        "integer_tol",
        "newton_damping",
        "blend_tol",
    ];

    /// Applies `NAME=VALUE`.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadOverride(assignment.to_string());
        let (name, value) = assignment.split_once('=').ok_or_else(bad)?;
        let name = name.trim();
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        if !value.is_finite() || value <= 0.0 {
            return Err(bad());
        }
        match name {
            "zero_tol" => self.zero_tol = value,
            "pole_guard" => self.pole_guard = value,
            "dedup_tol" => self.dedup_tol = value,
            "ball_cap" => {
                if value.fract() != 0.0 {
                    return Err(bad());
                }
                self.ball_cap = value as usize;
            }
            "max_disp" => self.max_disp = value,
            "min_step" => self.min_step = value,
            "winding_agree" => self.winding_agree = value,
            "integer_tol" => self.integer_tol = value,
            "newton_damping" => self.newton_damping = value,
            "blend_tol" => self.blend_tol = value,
            _ => return Err(ConfigError::UnknownTolerance(name.to_string())),
        }
        Ok(())
    }

    pub fn ball(&self) -> BallOptions {
        BallOptions {
            dedup_tol: self.dedup_tol,
            cap: self.ball_cap,
        }
    }

    pub fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions {
            max_disp: self.max_disp,
            min_step: self.min_step,
            ..IntegratorOptions::default()
        }
    }

    pub fn winding(&self) -> WindingOptions {
        WindingOptions {
            agree: self.winding_agree,
            integer_tol: self.integer_tol,
            zero_tol: self.zero_tol,
            ..WindingOptions::default()
        }
    }

    pub fn zeros(&self) -> ZeroOptions {
        ZeroOptions {
            zero_tol: self.zero_tol,
            damping: self.newton_damping,
            winding: self.winding(),
            ..ZeroOptions::default()
        }
    }

    pub fn tube(&self) -> TubeOptions {
        TubeOptions {
            blend_tol: self.blend_tol,
            zeros: self.zeros(),
            ..TubeOptions::default()
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (name, r) in &self.regions {
            r.rect().map_err(|e| ConfigError::InvalidRegion {
                name: name.clone(),
                reason: e.to_string(),
            })?;
        }
        for (name, f) in &self.fields {
            let invalid = |reason: String| ConfigError::InvalidField {
                name: name.clone(),
                reason,
            };
            match f {
                FieldDef::Automorphic(a) => {
                    a.generators().map_err(|e| invalid(e.to_string()))?;
                    if a.weight < 2 {
                        return Err(invalid("weight must be at least 2".into()));
                    }
                }
                FieldDef::Sphere(s) => {
                    s.build().map_err(|e| invalid(e.to_string()))?;
                }
                FieldDef::Planar(PlanarField::Pendulum { k }) if !(*k > 0.0) => {
                    return Err(invalid("pendulum constant must be positive".into()));
                }
                FieldDef::Planar(_) => {}
            }
        }
        Ok(())
    }

    pub fn field(&self, name: &str) -> Result<&FieldDef, ConfigError> {
        self.fields.get(name).ok_or_else(|| ConfigError::UnknownField(name.to_string()))
    }

    pub fn region(&self, name: &str) -> Result<Rect<f64>, ConfigError> {
        let r = self.regions.get(name).ok_or_else(|| ConfigError::UnknownRegion(name.to_string()))?;
        r.rect().map_err(|e| ConfigError::InvalidRegion {
            name: name.to_string(),
            reason: e.to_string(),
        })
    }
}
