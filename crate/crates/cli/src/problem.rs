//! Problem files: JSON with every scalar kept as its source text so rational
//! literals survive parsing and echoing unchanged.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use ssde_core::funcrep::SegmentedFunction;
use ssde_core::number::Number;
use ssde_core::piecemeal::{AffineGraphMap, Piecemealing};
use ssde_core::solver::{classic_transition, Order, SsdeProblem};

use crate::CliError;

pub const DEFAULT_GRID: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

/// A scalar as written: a JSON number or a string such as `"31/5"`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Number(serde_json::Number),
}

impl Scalar {
    pub fn text(&self) -> String {
        match self {
            Scalar::Text(s) => s.trim().to_string(),
            Scalar::Number(n) => n.to_string(),
        }
    }

    pub fn parse(&self, what: &str) -> Result<Number, CliError> {
        self.text()
            .parse::<Number>()
            .map_err(|e| CliError::Invalid(format!("{what}: {e}")))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MapRecord {
    pub a: Scalar,
    pub d: Scalar,
    pub e: Scalar,
    pub f: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Constant,
    Linear,
    OneMinusX,
    ClassicTransition,
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialRecord {
    #[serde(rename = "type")]
    pub kind: InitialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<Scalar>>,
}

/// The file as read, before validation.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub interval: [Scalar; 2],
    pub order: u32,
    pub y0: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yprime0: Option<Scalar>,
    pub maps: Vec<MapRecord>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub target_a: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("ParseError: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Pretty JSON with every scalar written as a string.
    pub fn echo(&self) -> String {
        let mut copy = self.clone();
        let as_text = |s: &mut Scalar| *s = Scalar::Text(s.text());
        copy.interval.iter_mut().for_each(as_text);
        as_text(&mut copy.y0);
        copy.yprime0.iter_mut().for_each(as_text);
        copy.target_a.iter_mut().for_each(as_text);
        copy.tol.iter_mut().for_each(as_text);
        for m in &mut copy.maps {
            for s in [&mut m.a, &mut m.d, &mut m.e, &mut m.f] {
                as_text(s);
            }
            m.c.iter_mut().for_each(as_text);
        }
        if let Some(init) = &mut copy.initial {
            init.coeffs.iter_mut().flatten().for_each(as_text);
        }
        serde_json::to_string_pretty(&copy).expect("problem files serialize")
    }
}

/// A validated problem plus the run settings taken from the file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub ssde: SsdeProblem,
    pub target_a: Option<Number>,
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
}

pub fn piecemealing(file: &ProblemFile) -> Result<Piecemealing, CliError> {
    let lo = file.interval[0].parse("interval")?;
    let hi = file.interval[1].parse("interval")?;
    if file.maps.is_empty() {
        return Err(CliError::Core(ssde_core::Error::EmptyPiecemealing));
    }
    let maps = file
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if let Some(c) = &m.c {
                let c = c.parse(&format!("maps[{i}].c"))?;
                if c.value() != 0.0 {
                    return Err(CliError::Invalid(format!(
                        "ShearError: maps[{i}].c = {c}; only c = 0 is function-preserving here"
                    )));
                }
            }
            Ok(AffineGraphMap::from_numbers(
                &m.a.parse(&format!("maps[{i}].a"))?,
                &m.d.parse(&format!("maps[{i}].d"))?,
                &m.e.parse(&format!("maps[{i}].e"))?,
                &m.f.parse(&format!("maps[{i}].f"))?,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Piecemealing::validate_numbers(&lo, &hi, maps)?)
}

impl Problem {
    pub fn from_file(file: ProblemFile) -> Result<Self, CliError> {
        let order = Order::try_from(file.order)?;
        let p = piecemealing(&file)?;
        let y0 = file.y0.parse("y0")?;
        let yprime0 = match (&file.yprime0, order) {
            (Some(s), _) => s.parse("yprime0")?,
            (None, Order::First) => Number::from_i64(0),
            (None, Order::Second) => {
                return Err(CliError::Invalid("order 2 problems need yprime0".into()))
            }
        };
        let target_a = file.target_a.as_ref().map(|s| s.parse("A")).transpose()?;
        let ssde = SsdeProblem::new(p, order, y0, yprime0, target_a.as_ref().map(Number::value))?;
        let tol = match &file.tol {
            Some(s) => s.parse("tol")?.value(),
            None => DEFAULT_TOL,
        };
        Ok(Problem {
            grid: file.grid.unwrap_or(DEFAULT_GRID),
            max_iter: file.max_iter.unwrap_or(DEFAULT_MAX_ITER),
            tol,
            target_a,
            ssde,
            file,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_file(ProblemFile::read(path)?)
    }

    /// The starting iterate named in the file, sampled on `m` sub-intervals
    /// per piece. Shapes other than `polynomial` use `t = (x − x_0)/w`.
    pub fn initial(&self, m: usize) -> Result<SegmentedFunction, CliError> {
        let grid = self.ssde.grid(m)?;
        let domain = grid.domain();
        let (lo, w) = (domain.lo(), domain.width());
        let record = self.file.initial.clone().unwrap_or(InitialRecord {
            kind: InitialKind::Constant,
            coeffs: None,
        });
        let coeffs = record
            .coeffs
            .iter()
            .flatten()
            .enumerate()
            .map(|(k, c)| c.parse(&format!("initial.coeffs[{k}]")).map(|n| n.value()))
            .collect::<Result<Vec<_>, _>>()?;
        let t = move |x: f64| (x - lo) / w;
        let f = match record.kind {
            InitialKind::Constant => {
                let c = match coeffs.first() {
                    Some(&c) => c,
                    None if self.ssde.order() == Order::First => self.ssde.admissible_a()? / w,
                    None => self.ssde.y0(),
                };
                SegmentedFunction::constant(&grid, c)
            }
            InitialKind::Linear => SegmentedFunction::sample(&grid, t)?,
            InitialKind::OneMinusX => SegmentedFunction::sample(&grid, |x| 1.0 - t(x))?,
            InitialKind::ClassicTransition => SegmentedFunction::sample(&grid, |x| classic_transition(t(x)))?,
            InitialKind::Polynomial => {
                if coeffs.is_empty() {
                    return Err(CliError::Invalid("polynomial initial iterate needs coeffs".into()));
                }
                SegmentedFunction::sample(&grid, |x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c))?
            }
        };
        Ok(f)
    }
}
