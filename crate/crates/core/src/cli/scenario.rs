//! JSON scenario files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "background": { "kind": "minkowski" },
//!   "worldline": { "kind": "circular", "radius": 1.0, "omega": 0.6 },
//!   "transport": {
//!     "kind": "vector",
//!     "initial": [0.0, 1.0, 0.0, 0.0],
//!     "orbits": 1.0,
//!     "step": 0.001,
//!     "alpha": 0.0
//!   },
//!   "frames": { "s_end": 2.0, "step": 0.01 },
//!   "momenta": { "mass": 1.0, "list": [[1.25, -0.75, 0.0, 0.0]] }
//! }
//! ```
//!
//! Spinor initial data are lists of `[re, im]` pairs. `alpha` is either a
//! number or a table of `[s, α]` pairs.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use super::CliError;
use crate::backgrounds::{Background, CanonicalWorldline, Minkowski, RindlerChart, SchwarzschildLike};
use crate::dirac_algebra::{Basis, DiracSpinor};
use crate::fermi::{Components, Gauge, TransportKind};
use crate::free_states::MassShellMomentum;
use crate::{Error, C64};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub schema_version: u32,
    pub background: BackgroundSpec,
    pub worldline: WorldlineSpec,
    /// The `background` and `worldline` sections as written, for metadata.
    pub background_json: Value,
    pub worldline_json: Value,
    pub transport: Option<TransportSpec>,
    pub frames: Option<FramesSpec>,
    pub momenta: Option<MomentaSpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    background: Value,
    worldline: Value,
    #[serde(default)]
    transport: Option<TransportSpec>,
    #[serde(default)]
    frames: Option<FramesSpec>,
    #[serde(default)]
    momenta: Option<MomentaSpec>,
    #[serde(default)]
    output: Option<OutputSpec>,
}

/// Selected by `"kind"`; the remaining keys are the parameters.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BackgroundSpec {
    Minkowski {},
    Schwarzschild { mass: f64 },
    Rindler { acceleration: f64 },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WorldlineSpec {
    Static {
        position: [f64; 3],
    },
    Circular {
        radius: f64,
        omega: f64,
        #[serde(default)]
        z: f64,
    },
    Rindler {
        acceleration: f64,
    },
}

/// Deserializes a `{"kind": k, ...params}` section as the variant `k` while
/// keeping field paths relative to `section`.
fn tagged<T: serde::de::DeserializeOwned>(v: &Value, section: &str) -> Result<T, CliError> {
    let obj = v.as_object().ok_or_else(|| invalid(section, "expected an object"))?;
    let kind_path = format!("{section}.kind");
    let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| invalid(&kind_path, "missing or not a string"))?;
    let mut params = obj.clone();
    params.remove("kind");
    let mut wrapped = serde_json::Map::new();
    wrapped.insert(kind.to_string(), Value::Object(params));
    serde_path_to_error::deserialize(Value::Object(wrapped)).map_err(|e| {
        let path = e.path().to_string();
        let message = e.into_inner().to_string();
        // Drop the leading variant segment and re-root under `section`.
        let rest = path.strip_prefix(kind).unwrap_or("");
        if message.starts_with("unknown variant") {
            invalid(&kind_path, message)
        } else if rest.is_empty() || path == "." {
            invalid(section, message)
        } else {
            invalid(&format!("{section}{rest}"), message)
        }
    })
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindSpec {
    Vector,
    TwoSpinor,
    FourSpinor,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportSpec {
    pub kind: KindSpec,
    pub initial: Value,
    /// Coordinate basis of four-spinor initial data.
    #[serde(default)]
    pub basis: Option<String>,
    #[serde(default)]
    pub s_start: f64,
    #[serde(default)]
    pub s_end: Option<f64>,
    /// Alternative to `s_end` for circular orbits: number of proper periods.
    #[serde(default)]
    pub orbits: Option<f64>,
    pub step: f64,
    #[serde(default)]
    pub alpha: Option<Value>,
    #[serde(default = "one")]
    pub sample_every: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesSpec {
    #[serde(default)]
    pub s_start: f64,
    #[serde(default)]
    pub s_end: Option<f64>,
    #[serde(default)]
    pub orbits: Option<f64>,
    pub step: f64,
    #[serde(default = "one")]
    pub sample_every: usize,
    #[serde(default)]
    pub basis: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentaSpec {
    pub mass: f64,
    /// Covector components `p_λ` in the local orthonormal frame.
    #[serde(default)]
    pub list: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: String,
}

fn one() -> usize {
    1
}

fn invalid(path: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid { path: path.to_string(), message: message.into() }
}

fn lib_error(path: &str, e: Error) -> CliError {
    invalid(path, e.to_string())
}

/// A transport request after validation.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub initial: Components,
    pub s_start: f64,
    pub s_end: f64,
    pub step: f64,
    pub gauge: Gauge,
    pub sample_every: usize,
}

/// A frames request after validation.
#[derive(Debug, Clone)]
pub struct FramesPlan {
    pub s_start: f64,
    pub s_end: f64,
    pub step: f64,
    pub sample_every: usize,
    pub basis: Basis,
    pub momenta: Vec<MassShellMomentum>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "$".to_string() } else { path };
            invalid(&path, e.into_inner().to_string())
        })?;
        let scn = Scenario {
            schema_version: raw.schema_version,
            background: tagged(&raw.background, "background")?,
            worldline: tagged(&raw.worldline, "worldline")?,
            background_json: raw.background,
            worldline_json: raw.worldline,
            transport: raw.transport,
            frames: raw.frames,
            momenta: raw.momenta,
            output: raw.output,
        };
        if scn.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCENARIO_SCHEMA_VERSION}", scn.schema_version),
            ));
        }
        scn.background()?;
        scn.worldline_in(scn.background()?.as_ref())?;
        Ok(scn)
    }

    pub fn background(&self) -> Result<Box<dyn Background>, CliError> {
        Ok(match self.background {
            BackgroundSpec::Minkowski {} => Box::new(Minkowski),
            BackgroundSpec::Schwarzschild { mass } => {
                Box::new(SchwarzschildLike::new(mass).map_err(|e| lib_error("background.mass", e))?)
            }
            BackgroundSpec::Rindler { acceleration } => {
                if !acceleration.is_finite() {
                    return Err(invalid("background.acceleration", "must be finite"));
                }
                Box::new(RindlerChart { acceleration })
            }
        })
    }

    pub fn worldline_in(&self, bg: &dyn Background) -> Result<CanonicalWorldline, CliError> {
        match self.worldline {
            WorldlineSpec::Static { position } => {
                if !position.iter().all(|x| x.is_finite()) {
                    return Err(invalid("worldline.position", "must be finite"));
                }
                CanonicalWorldline::static_in(bg, position).map_err(|e| lib_error("worldline.position", e))
            }
            WorldlineSpec::Circular { radius, omega, z } => {
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(invalid("worldline.radius", "must be positive"));
                }
                CanonicalWorldline::circular_in(bg, radius, omega, z).map_err(|e| match e {
                    Error::InvalidParameter { name, reason } if name == "omega" => invalid("worldline.omega", reason),
                    Error::InvalidParameter { name, reason } if name == "background" => {
                        invalid("background.kind", reason)
                    }
                    other => lib_error("worldline", other),
                })
            }
            WorldlineSpec::Rindler { acceleration } => {
                if !matches!(self.background, BackgroundSpec::Minkowski {}) {
                    return Err(invalid(
                        "worldline.kind",
                        "the rindler worldline is defined in the inertial chart of a minkowski background",
                    ));
                }
                CanonicalWorldline::rindler(acceleration).map_err(|e| lib_error("worldline.acceleration", e))
            }
        }
    }

    fn range(
        &self,
        section: &str,
        s_start: f64,
        s_end: Option<f64>,
        orbits: Option<f64>,
        wl: &CanonicalWorldline,
    ) -> Result<(f64, f64), CliError> {
        if !s_start.is_finite() {
            return Err(invalid(&format!("{section}.s_start"), "must be finite"));
        }
        let end = match (s_end, orbits) {
            (Some(_), Some(_)) => {
                return Err(invalid(&format!("{section}.orbits"), "give either s_end or orbits, not both"))
            }
            (Some(e), None) => e,
            (None, Some(n)) => {
                let period = wl
                    .proper_period()
                    .ok_or_else(|| invalid(&format!("{section}.orbits"), "orbits requires a circular worldline"))?;
                if !(n >= 0.0) || !n.is_finite() {
                    return Err(invalid(&format!("{section}.orbits"), "must be non-negative"));
                }
                s_start + n * period
            }
            (None, None) => return Err(invalid(&format!("{section}.s_end"), "missing s_end (or orbits)")),
        };
        if !end.is_finite() || end < s_start {
            return Err(invalid(&format!("{section}.s_end"), "must be finite and not before s_start"));
        }
        Ok((s_start, end))
    }

    pub fn transport_plan(&self, wl: &CanonicalWorldline) -> Result<TransportPlan, CliError> {
        let t = self
            .transport
            .as_ref()
            .ok_or_else(|| invalid("transport", "section is required for the transport command"))?;
        let (s_start, s_end) = self.range("transport", t.s_start, t.s_end, t.orbits, wl)?;
        if !(t.step > 0.0) || !t.step.is_finite() {
            return Err(invalid("transport.step", "must be positive"));
        }
        if t.sample_every == 0 {
            return Err(invalid("transport.sample_every", "must be at least 1"));
        }
        let basis = parse_basis(t.basis.as_deref(), "transport.basis")?;
        if t.basis.is_some() && t.kind != KindSpec::FourSpinor {
            return Err(invalid("transport.basis", "only four-spinor data carry a basis"));
        }
        let initial = parse_initial(&t.initial, t.kind, basis)?;
        let gauge = parse_alpha(t.alpha.as_ref())?;
        Ok(TransportPlan { initial, s_start, s_end, step: t.step, gauge, sample_every: t.sample_every })
    }

    pub fn frames_plan(&self, wl: &CanonicalWorldline) -> Result<FramesPlan, CliError> {
        let f = self.frames.as_ref().ok_or_else(|| invalid("frames", "section is required for the frames command"))?;
        let (s_start, s_end) = self.range("frames", f.s_start, f.s_end, f.orbits, wl)?;
        if !(f.step > 0.0) || !f.step.is_finite() {
            return Err(invalid("frames.step", "must be positive"));
        }
        if f.sample_every == 0 {
            return Err(invalid("frames.sample_every", "must be at least 1"));
        }
        let basis = parse_basis(f.basis.as_deref(), "frames.basis")?;
        let momenta = match &self.momenta {
            None => Vec::new(),
            Some(m) => {
                if !(m.mass > 0.0) || !m.mass.is_finite() {
                    return Err(invalid("momenta.mass", "must be positive"));
                }
                m.list
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        MassShellMomentum::new(nalgebra::Vector4::from(*p), m.mass)
                            .map_err(|e| lib_error(&format!("momenta.list[{i}]"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        Ok(FramesPlan { s_start, s_end, step: f.step, sample_every: f.sample_every, basis, momenta })
    }
}

fn parse_basis(b: Option<&str>, path: &str) -> Result<Basis, CliError> {
    match b {
        None => Ok(Basis::Weyl),
        Some(s) => s.parse().map_err(|e: Error| lib_error(path, e)),
    }
}

fn number(v: &Value, path: &str) -> Result<f64, CliError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(invalid(path, "expected a finite number")),
    }
}

fn complex(v: &Value, path: &str) -> Result<C64, CliError> {
    match v.as_array() {
        Some(a) if a.len() == 2 => {
            Ok(C64::new(number(&a[0], &format!("{path}[0]"))?, number(&a[1], &format!("{path}[1]"))?))
        }
        _ => Err(invalid(path, "expected a complex number as [re, im]")),
    }
}

fn parse_initial(v: &Value, kind: KindSpec, basis: Basis) -> Result<Components, CliError> {
    let path = "transport.initial";
    let arr = v.as_array().ok_or_else(|| invalid(path, "expected an array"))?;
    let want = match kind {
        KindSpec::Vector | KindSpec::FourSpinor => 4,
        KindSpec::TwoSpinor => 2,
    };
    if arr.len() != want {
        return Err(invalid(path, format!("expected {want} components, found {}", arr.len())));
    }
    let item = |i: usize| format!("{path}[{i}]");
    Ok(match kind {
        KindSpec::Vector => {
            let mut x = nalgebra::Vector4::zeros();
            for i in 0..4 {
                x[i] = number(&arr[i], &item(i))?;
            }
            Components::Vector(x)
        }
        KindSpec::TwoSpinor => {
            Components::TwoSpinor(nalgebra::Vector2::new(complex(&arr[0], &item(0))?, complex(&arr[1], &item(1))?))
        }
        KindSpec::FourSpinor => {
            let mut x = nalgebra::Vector4::zeros();
            for i in 0..4 {
                x[i] = complex(&arr[i], &item(i))?;
            }
            Components::FourSpinor(*DiracSpinor::from_coords(x, basis).weyl())
        }
    })
}

fn parse_alpha(v: Option<&Value>) -> Result<Gauge, CliError> {
    let path = "transport.alpha";
    let g = match v {
        None | Some(Value::Null) => Gauge::Constant(0.0),
        Some(Value::Number(_)) => Gauge::Constant(number(v.unwrap(), path)?),
        Some(Value::Array(rows)) => {
            let mut t = Vec::with_capacity(rows.len());
            for (i, r) in rows.iter().enumerate() {
                let p = format!("{path}[{i}]");
                match r.as_array() {
                    Some(pair) if pair.len() == 2 => {
                        t.push((number(&pair[0], &format!("{p}[0]"))?, number(&pair[1], &format!("{p}[1]"))?))
                    }
                    _ => return Err(invalid(&p, "expected an [s, alpha] pair")),
                }
            }
            Gauge::Table(t)
        }
        Some(_) => return Err(invalid(path, "expected a number or a table of [s, alpha] pairs")),
    };
    g.validate().map_err(|e| lib_error(path, e))?;
    Ok(g)
}

impl KindSpec {
    pub fn kind(self) -> TransportKind {
        match self {
            KindSpec::Vector => TransportKind::Vector,
            KindSpec::TwoSpinor => TransportKind::TwoSpinor,
            KindSpec::FourSpinor => TransportKind::FourSpinor,
        }
    }
}
