//! Run configuration: a strict JSON document validated before any
//! computation. Every error names the offending location as a JSON pointer.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use accel_moment::hamiltonians::{Kind, Term, TermFlags};
use accel_moment::numgrid::{CowGeometry, Grid1D, Method, PhysParams, RealizationContext};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub params: ParamsSection,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianSection>,
    #[serde(default)]
    pub evolution: Option<EvolutionSection>,
    #[serde(default)]
    pub initial_spin: Option<InitialSpin>,
    #[serde(default)]
    pub output: Option<OutputSection>,
    #[serde(default)]
    pub probe: Option<ProbeSection>,
    #[serde(default)]
    pub cow: Option<CowSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_points: usize,
    pub length_cm: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub m_g: f64,
    #[serde(default)]
    pub a_cms2: Option<f64>,
    #[serde(default)]
    pub g_cms2: Option<f64>,
    #[serde(default)]
    pub mu_a: f64,
    pub p_perp_gcms: [f64; 2],
    #[serde(default)]
    pub axis: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermName {
    RestMass,
    Potential,
    Kinetic,
    KineticRedshift,
    Spin,
    Tidal,
}

impl From<TermName> for Term {
    fn from(t: TermName) -> Term {
        match t {
            TermName::RestMass => Term::RestMass,
            TermName::Potential => Term::Potential,
            TermName::Kinetic => Term::Kinetic,
            TermName::KineticRedshift => Term::KineticRedshift,
            TermName::Spin => Term::Spin,
            TermName::Tidal => Term::Tidal,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    pub terms: Vec<TermName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    EigenExponential,
    CrankNicolson,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Method {
        match m {
            MethodName::EigenExponential => Method::EigenExponential,
            MethodName::CrankNicolson => Method::CrankNicolson,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub dt_s: f64,
    pub steps: usize,
    pub method: MethodName,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpin {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub theta0: Vec<f64>,
    #[serde(default = "default_members")]
    pub members: usize,
}

fn default_members() -> usize {
    32
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CowSection {
    pub geometries: Vec<GeometryEntry>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryEntry {
    pub height_difference_cm: f64,
    pub traversal_time_s: f64,
}

impl From<GeometryEntry> for CowGeometry {
    fn from(g: GeometryEntry) -> CowGeometry {
        CowGeometry { height_difference_cm: g.height_difference_cm, traversal_time_s: g.traversal_time_s }
    }
}

/// A problem at a JSON-pointer location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{}: {}", at, self.message)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Read(PathBuf, std::io::Error),
    Invalid(Vec<Issue>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read(p, e) => write!(f, "cannot read config {}: {}", p.display(), e),
            ConfigError::Invalid(issues) => {
                write!(f, "invalid config:")?;
                for i in issues {
                    write!(f, "\n  {}", i)?;
                }
                Ok(())
            }
        }
    }
}

fn issue(pointer: &str, message: impl Into<String>) -> Issue {
    Issue { pointer: pointer.to_string(), message: message.into() }
}

fn escape_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

/// Converts a serde path into a JSON pointer.
fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    path.iter()
        .filter_map(|seg| match seg {
            Segment::Seq { index } => Some(format!("/{}", index)),
            Segment::Map { key } => Some(format!("/{}", escape_token(key))),
            Segment::Enum { variant } => Some(format!("/{}", escape_token(variant))),
            Segment::Unknown => None,
        })
        .collect()
}

/// Parses and validates a configuration document.
pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        ConfigError::Invalid(vec![issue(&pointer, e.inner().to_string())])
    })?;
    let issues = cfg.issues();
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(issues))
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_path_buf(), e))?;
    parse(&text)
}

fn finite(out: &mut Vec<Issue>, pointer: &str, v: f64) -> bool {
    if v.is_finite() {
        true
    } else {
        out.push(issue(pointer, "must be a finite number"));
        false
    }
}

fn positive(out: &mut Vec<Issue>, pointer: &str, v: f64) {
    if finite(out, pointer, v) && v <= 0.0 {
        out.push(issue(pointer, format!("must be positive, got {}", v)));
    }
}

impl RunConfig {
    /// Semantic checks beyond the schema.
    fn issues(&self) -> Vec<Issue> {
        let mut out = Vec::new();
        if let Err(e) = Grid1D::new(self.grid.n_points, self.grid.length_cm) {
            out.push(issue("/grid", e.to_string()));
        }
        let p = &self.params;
        positive(&mut out, "/params/m_g", p.m_g);
        match (p.a_cms2, p.g_cms2) {
            (Some(a), None) => {
                finite(&mut out, "/params/a_cms2", a);
            }
            (None, Some(g)) => {
                finite(&mut out, "/params/g_cms2", g);
            }
            _ => out.push(issue("/params", "exactly one of a_cms2 and g_cms2 is required")),
        }
        finite(&mut out, "/params/mu_a", p.mu_a);
        for (k, v) in p.p_perp_gcms.iter().enumerate() {
            finite(&mut out, &format!("/params/p_perp_gcms/{}", k), *v);
        }
        if let Some(axis) = &p.axis {
            if axis != "z" {
                out.push(issue("/params/axis", format!("only \"z\" is supported, got {:?}", axis)));
            }
        }
        if let Some(h) = &self.hamiltonian {
            if h.terms.is_empty() {
                out.push(issue("/hamiltonian/terms", "at least one term is required"));
            }
            if p.a_cms2.is_some() && h.terms.contains(&TermName::Tidal) {
                out.push(issue("/hamiltonian/terms", "the tidal term exists only in the gravitational Hamiltonian"));
            }
        }
        if let Some(e) = &self.evolution {
            positive(&mut out, "/evolution/dt_s", e.dt_s);
            if e.steps == 0 {
                out.push(issue("/evolution/steps", "must be at least 1"));
            }
        }
        if let Some(s) = &self.initial_spin {
            if finite(&mut out, "/initial_spin/theta", s.theta) && !(0.0..=PI).contains(&s.theta) {
                out.push(issue("/initial_spin/theta", "must lie in [0, pi]"));
            }
            finite(&mut out, "/initial_spin/phi", s.phi);
        }
        if let Some(pr) = &self.probe {
            if pr.theta0.is_empty() {
                out.push(issue("/probe/theta0", "at least one angle is required"));
            }
            for (k, t) in pr.theta0.iter().enumerate() {
                let ptr = format!("/probe/theta0/{}", k);
                if finite(&mut out, &ptr, *t) && !(*t > 0.0 && *t < PI) {
                    out.push(issue(&ptr, "must lie strictly inside (0, pi)"));
                }
            }
            if pr.members == 0 {
                out.push(issue("/probe/members", "must be at least 1"));
            }
            if p.a_cms2.is_none() {
                out.push(issue("/params/a_cms2", "required by the probe section"));
            }
        }
        if let Some(c) = &self.cow {
            if c.geometries.is_empty() {
                out.push(issue("/cow/geometries", "at least one geometry is required"));
            }
            for (k, g) in c.geometries.iter().enumerate() {
                for (name, v) in [("height_difference_cm", g.height_difference_cm), ("traversal_time_s", g.traversal_time_s)] {
                    let ptr = format!("/cow/geometries/{}/{}", k, name);
                    if finite(&mut out, &ptr, v) && v < 0.0 {
                        out.push(issue(&ptr, "must be non-negative"));
                    }
                }
            }
        }
        out
    }

    pub fn kind(&self) -> Kind {
        if self.params.g_cms2.is_some() {
            Kind::Gravitational
        } else {
            Kind::Accelerational
        }
    }

    /// Selected terms; kinetic plus spin when the section is absent.
    pub fn flags(&self) -> TermFlags {
        match &self.hamiltonian {
            Some(h) => h.terms.iter().fold(TermFlags::none(), |f, t| f.with((*t).into(), true)),
            None => TermFlags::only(Term::Kinetic).with(Term::Spin, true),
        }
    }

    pub fn phys_params(&self) -> PhysParams {
        let p = &self.params;
        let mut params = PhysParams { m: p.m_g, ..PhysParams::neutron() }.with_mu_a(p.mu_a);
        if let Some(a) = p.a_cms2 {
            params = params.with_accel_z(a);
        }
        if let Some(g) = p.g_cms2 {
            params = params.with_gravity_z(g);
        }
        params
    }

    pub fn context(&self) -> Result<RealizationContext, accel_moment::numgrid::NumError> {
        let grid = Grid1D::new(self.grid.n_points, self.grid.length_cm)?;
        RealizationContext::new(grid, self.phys_params(), self.params.p_perp_gcms)
    }

    /// The field along `ẑ` felt by the spin term: `a_z`, or `−g_z`.
    pub fn field_z(&self) -> f64 {
        self.params.a_cms2.unwrap_or_else(|| -self.params.g_cms2.unwrap_or(0.0))
    }
}

/// Fails with a pointer to a section the subcommand needs.
pub fn require<'a, T>(section: &'a Option<T>, name: &str, command: &str) -> Result<&'a T, ConfigError> {
    section
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid(vec![issue(&format!("/{}", name), format!("section required by `{}`", command))]))
}
