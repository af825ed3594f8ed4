//! Surface gravities, the length scale `x_a = 4c²/(|1+μ_a| a)` of the
//! anomalous spin term, and the quark-commutator order-of-magnitude estimate.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Pinned cgs constants.
#[derive(Debug, Clone, Copy)]
pub struct Constants;

impl Constants {
    pub const C: f64 = 2.99792458e10;
    pub const G: f64 = 6.674e-8;
    pub const HBAR: f64 = 1.0546e-27;
    pub const NEUTRON_MASS: f64 = 1.6749e-24;
    pub const M_SUN: f64 = 1.989e33;
    pub const R_SUN: f64 = 6.957e10;
    /// One GeV in erg.
    pub const GEV: f64 = 1.6022e-3;
    pub const MEV: f64 = 1.6022e-6;
    /// Julian light year in cm.
    pub const LIGHT_YEAR: f64 = Self::C * 365.25 * 86400.0;
    /// Order of magnitude quoted for the quark commutator, cm/s².
    pub const QUARK_REFERENCE: f64 = 1e36;
}

const DEFAULT_CATALOG: &str = include_str!("../data/catalog.csv");
const CATALOG_HEADER: [&str; 3] = ["name", "mass_g", "radius_cm"];

#[derive(Debug, Error)]
pub enum AstroError {
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("|1 + mu_a| = 0: the length scale is infinite")]
    InfiniteScale,
    #[error("catalog line {line}: {msg}")]
    Catalog { line: u64, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn positive(what: &'static str, value: f64) -> Result<f64, AstroError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(AstroError::NonPositive { what, value })
    }
}

/// `G m / r²` in cm/s².
pub fn surface_gravity(mass_g: f64, radius_cm: f64) -> Result<f64, AstroError> {
    let m = positive("mass", mass_g)?;
    let r = positive("radius", radius_cm)?;
    Ok(Constants::G * m / (r * r))
}

/// Numerator `4c²` of the length scale.
pub fn length_scale_numerator() -> f64 {
    4.0 * Constants::C * Constants::C
}

/// `4c²/(|1+μ_a| a)` in cm.
pub fn length_scale(accel: f64, mu_a: f64) -> Result<f64, AstroError> {
    length_scale_abs(accel, (1.0 + mu_a).abs())
}

/// Same as [`length_scale`] with `|1+μ_a|` given directly.
pub fn length_scale_abs(accel: f64, one_plus_mu_abs: f64) -> Result<f64, AstroError> {
    let a = positive("acceleration", accel)?;
    if one_plus_mu_abs == 0.0 {
        return Err(AstroError::InfiniteScale);
    }
    let k = positive("|1 + mu_a|", one_plus_mu_abs)?;
    Ok(length_scale_numerator() / (k * a))
}

pub fn cm_to_light_years(cm: f64) -> f64 {
    cm / Constants::LIGHT_YEAR
}

/// `(2/3) F / m_q` with every conversion step recorded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarkEstimate {
    pub force_gev_per_cm: f64,
    pub quark_mass_mev: f64,
    pub force_dyn: f64,
    pub quark_mass_g: f64,
    pub value_cms2: f64,
    pub reference_cms2: f64,
    pub chain: Vec<String>,
}

pub fn quark_commutator_estimate(force_gev_per_cm: f64, quark_mass_mev: f64) -> Result<QuarkEstimate, AstroError> {
    let f = positive("force", force_gev_per_cm)?;
    let mq = positive("quark mass", quark_mass_mev)?;
    let force_dyn = f * Constants::GEV;
    let quark_mass_g = mq * Constants::MEV / (Constants::C * Constants::C);
    let value = 2.0 / 3.0 * force_dyn / quark_mass_g;
    let chain = vec![
        format!("F = {:e} GeV/cm x {:e} erg/GeV = {:e} dyn", f, Constants::GEV, force_dyn),
        format!(
            "m_q = {:e} MeV x {:e} erg/MeV / c^2 ({:e} cm^2/s^2) = {:e} g",
            mq,
            Constants::MEV,
            Constants::C * Constants::C,
            quark_mass_g
        ),
        format!("(2/3) F / m_q = {:e} cm/s^2", value),
        format!("quoted order of magnitude = {:e} cm/s^2", Constants::QUARK_REFERENCE),
    ];
    Ok(QuarkEstimate {
        force_gev_per_cm: f,
        quark_mass_mev: mq,
        force_dyn,
        quark_mass_g,
        value_cms2: value,
        reference_cms2: Constants::QUARK_REFERENCE,
        chain,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub name: String,
    pub mass_g: f64,
    pub radius_cm: f64,
}

impl Body {
    pub fn new(name: &str, mass_g: f64, radius_cm: f64) -> Result<Self, AstroError> {
        positive("mass", mass_g)?;
        positive("radius", radius_cm)?;
        Ok(Self { name: name.to_string(), mass_g, radius_cm })
    }

    pub fn surface_gravity(&self) -> Result<f64, AstroError> {
        surface_gravity(self.mass_g, self.radius_cm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalesRow {
    pub name: String,
    pub a_cms2: f64,
    pub x_a_cm: f64,
    pub x_a_ly: f64,
}

/// Parses a `name,mass_g,radius_cm` catalog. Errors carry the 1-based line.
pub fn parse_catalog<R: Read>(reader: R) -> Result<Vec<Body>, AstroError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header_err = |msg: String| AstroError::Catalog { line: 1, msg };
    let headers = rdr.headers().map_err(|e| header_err(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != CATALOG_HEADER {
        return Err(header_err(format!(
            "expected header `{}`, got `{}`",
            CATALOG_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut bodies = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| AstroError::Catalog {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let body: Body = record
            .deserialize(Some(&headers))
            .map_err(|e| AstroError::Catalog { line, msg: e.to_string() })?;
        Body::new(&body.name, body.mass_g, body.radius_cm)
            .map_err(|e| AstroError::Catalog { line, msg: e.to_string() })?;
        bodies.push(body);
    }
    Ok(bodies)
}

pub fn load_catalog<P: AsRef<Path>>(path: P) -> Result<Vec<Body>, AstroError> {
    parse_catalog(std::fs::File::open(path)?)
}

/// The Sun and a 1.5 solar-mass, 10 km neutron star.
pub fn default_catalog() -> Vec<Body> {
    parse_catalog(DEFAULT_CATALOG.as_bytes()).expect("embedded catalog is valid")
}

pub fn scales_table(bodies: &[Body], mu_a: f64) -> Result<Vec<ScalesRow>, AstroError> {
    bodies
        .iter()
        .map(|b| {
            let a = b.surface_gravity()?;
            let x = length_scale(a, mu_a)?;
            Ok(ScalesRow { name: b.name.clone(), a_cms2: a, x_a_cm: x, x_a_ly: cm_to_light_years(x) })
        })
        .collect()
}

/// CSV with header `name,a_cms2,x_a_cm,x_a_ly`.
pub fn write_scales_csv<W: Write>(rows: &[ScalesRow], writer: W) -> Result<(), AstroError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["name", "a_cms2", "x_a_cm", "x_a_ly"]).map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.name.clone(),
            format!("{:.16e}", r.a_cms2),
            format!("{:.16e}", r.x_a_cm),
            format!("{:.16e}", r.x_a_ly),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> AstroError {
    AstroError::Io(std::io::Error::other(e))
}
