//! Batch job specification: a line-oriented key/value config file.
//!
//! ```text
//! # five bodies, planar, equal-mass pairs
//! masses = 0.21 0.21 0.19 0.19 0.2
//! dimension = 2
//! runs = reduced
//! ```
//!
//! Masses are exact decimal strings converted to enclosing intervals and
//! then normalized so the sum encloses 1. Two special tokens cover the
//! mass relations used by the exceptional cases: `sqrt_crit` computes a
//! rigorous interval mass from the square-root relation
//! `1/√m = 1/√m₁ + 1/√m₂` on the two preceding masses, and a trailing
//! `rest` assigns the remainder to the last body.

use crate::interval::Interval;
use crate::model::{Dim, Masses};
use crate::search::RunSelection;

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid job: {0}")]
    Invalid(String),
}

/// Parsed and validated job description.
#[derive(Clone, Debug)]
pub struct JobSpec {
    /// Normalized interval masses.
    pub masses: Masses,
    pub dim: Dim,
    pub runs: RunSelection,
    pub min_box_width: f64,
    pub x_max: f64,
    pub max_boxes: u64,
    pub workers: Option<usize>,
    /// Identification group for counting; defaults to SO(2) in the plane
    /// and SO(3) in space.
    pub identify_so3: bool,
    pub ordering_constraints: bool,
}

pub fn parse_job(path: &std::path::Path) -> Result<JobSpec, JobError> {
    parse_job_str(&std::fs::read_to_string(path)?)
}

pub fn parse_job_str(text: &str) -> Result<JobSpec, JobError> {
    let mut masses: Option<Masses> = None;
    let mut dim = Dim::Two;
    let mut runs = RunSelection::SymmetryReduced;
    let mut min_box_width = 1e-10;
    let mut x_max = 2.5;
    let mut max_boxes = u64::MAX;
    let mut workers = None;
    let mut identify_so3: Option<bool> = None;
    let mut ordering_constraints = true;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| JobError::Parse { line: lineno + 1, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected `key = value`".into()))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "masses" => masses = Some(parse_masses(value).map_err(|m| err(m))?),
            "dimension" => {
                dim = match value {
                    "2" => Dim::Two,
                    "3" => Dim::Three,
                    other => return Err(err(format!("dimension must be 2 or 3, got {other}"))),
                }
            }
            "runs" => {
                runs = match value {
                    "reduced" | "symmetry-reduced" => RunSelection::SymmetryReduced,
                    "all" => RunSelection::All,
                    list => {
                        let idx: Result<Vec<usize>, _> =
                            list.split(',').map(|t| t.trim().parse::<usize>()).collect();
                        RunSelection::Explicit(
                            idx.map_err(|_| err(format!("bad run list {list:?}")))?,
                        )
                    }
                }
            }
            "min_box_width" => {
                min_box_width = value
                    .parse::<f64>()
                    .ok()
                    .filter(|w| *w > 0.0)
                    .ok_or_else(|| err("min_box_width must be a positive number".into()))?
            }
            "x_max" => {
                x_max = value
                    .parse::<f64>()
                    .ok()
                    .filter(|x| *x > 1.0)
                    .ok_or_else(|| err("x_max must exceed 1".into()))?
            }
            "max_boxes" => {
                max_boxes = value
                    .parse::<u64>()
                    .map_err(|_| err("max_boxes must be an integer".into()))?
            }
            "workers" => {
                workers = Some(
                    value
                        .parse::<usize>()
                        .ok()
                        .filter(|w| *w > 0)
                        .ok_or_else(|| err("workers must be a positive integer".into()))?,
                )
            }
            "identify" => {
                identify_so3 = match value {
                    "so2" | "SO2" | "SO(2)" => Some(false),
                    "so3" | "SO3" | "SO(3)" => Some(true),
                    other => return Err(err(format!("identify must be so2 or so3, got {other}"))),
                }
            }
            "ordering_constraints" => {
                ordering_constraints = match value {
                    "on" | "true" | "1" => true,
                    "off" | "false" | "0" => false,
                    other => return Err(err(format!("expected on/off, got {other}"))),
                }
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }

    let masses = masses.ok_or_else(|| JobError::Invalid("masses are required".into()))?;
    if let RunSelection::Explicit(list) = &runs {
        if list.iter().any(|&i| i >= masses.n()) {
            return Err(JobError::Invalid("run index out of range".into()));
        }
    }
    Ok(JobSpec {
        identify_so3: identify_so3.unwrap_or(dim == Dim::Three),
        masses,
        dim,
        runs,
        min_box_width,
        x_max,
        max_boxes,
        workers,
        ordering_constraints,
    })
}

/// Rigorous mass from the square-root relation `1/√m = 1/√a + 1/√b`.
pub fn sqrt_criterion_mass(a: Interval, b: Interval) -> Result<Interval, String> {
    if a.lo() <= 0.0 || b.lo() <= 0.0 {
        return Err("sqrt_crit needs two positive masses before it".into());
    }
    let ra = a.sqrt().map_err(|e| e.to_string())?.recip().map_err(|e| e.to_string())?;
    let rb = b.sqrt().map_err(|e| e.to_string())?.recip().map_err(|e| e.to_string())?;
    (ra + rb).square().recip().map_err(|e| e.to_string())
}

fn parse_masses(value: &str) -> Result<Masses, String> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err("need at least two masses".into());
    }
    let mut vals: Vec<Interval> = Vec::with_capacity(tokens.len());
    for (k, tok) in tokens.iter().enumerate() {
        match *tok {
            "sqrt_crit" => {
                if vals.len() < 2 {
                    return Err("sqrt_crit needs two masses before it".into());
                }
                vals.push(sqrt_criterion_mass(vals[0], vals[1])?);
            }
            "rest" => {
                if k + 1 != tokens.len() {
                    return Err("`rest` must be the last mass token".into());
                }
                let sum: Interval = vals.iter().copied().sum();
                let rest = Interval::ONE - sum;
                if rest.lo() <= 0.0 {
                    return Err("`rest` would not be positive".into());
                }
                vals.push(rest);
            }
            dec => {
                let m = Interval::enclosing_decimal(dec)
                    .ok_or_else(|| format!("bad mass literal {dec:?}"))?;
                if m.lo() <= 0.0 {
                    return Err(format!("mass {dec:?} must be positive"));
                }
                vals.push(m);
            }
        }
    }
    let m = Masses::new(vals).map_err(|e| e.to_string())?;
    Ok(m.normalize())
}
