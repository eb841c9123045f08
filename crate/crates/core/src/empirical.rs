//! Country-level indicators mapped onto the model's variables: GDP per
//! capita as flow `f`, Gini index as `g`, gross savings as `lambda` and tax
//! revenue as `gamma`.
//!
//! Input is comma-separated with a `country,f,g,lambda,gamma` header. Empty
//! cells and dashes mean missing; lines starting with `#` are comments.

use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fitting::{fit_linear, FitResult, XYPoint};

pub const COLUMNS: [&str; 5] = ["country", "f", "g", "lambda", "gamma"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord {
    pub name: String,
    pub f: f64,
    pub g: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    /// Fields whose published value was rejected and treated as missing.
    pub invalid_fields: Vec<String>,
}

impl CountryRecord {
    pub fn is_complete(&self) -> bool {
        self.g.is_some() && self.lambda.is_some() && self.gamma.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryTable {
    pub records: Vec<CountryRecord>,
    /// Header columns that were not recognised and were skipped.
    pub ignored_columns: Vec<String>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "-" | "\u{2013}" | "\u{2014}")
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map(|p| p.line()).unwrap_or(0)
}

pub fn load_countries<R: Read>(source: R) -> Result<CountryTable> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { line: csv_line(&e).max(1), message: e.to_string() })?
        .clone();
    let mut index = [None; 5];
    let mut ignored_columns = Vec::new();
    for (pos, name) in headers.iter().enumerate() {
        let lower = name.to_ascii_lowercase();
        match COLUMNS.iter().position(|c| *c == lower) {
            Some(k) if index[k].is_none() => index[k] = Some(pos),
            Some(_) => {
                return Err(Error::Parse { line: 1, message: format!("duplicate column {name:?}") })
            }
            None => {
                log::warn!("ignoring unknown column {name:?}");
                ignored_columns.push(name.to_string());
            }
        }
    }
    let header_line = headers.position().map(|p| p.line()).unwrap_or(1);
    let mut cols = [0usize; 5];
    for (k, slot) in index.iter().enumerate() {
        cols[k] = slot.ok_or_else(|| Error::Parse {
            line: header_line,
            message: format!("missing column {:?}", COLUMNS[k]),
        })?;
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse { line: csv_line(&e), message: e.to_string() })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |message: String| Error::Parse { line, message };
        let number = |k: usize| -> Result<Option<f64>> {
            let cell = &row[cols[k]];
            if is_missing(cell) {
                return Ok(None);
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(format!("column {}: {cell:?} is not a number", COLUMNS[k])))?;
            if !v.is_finite() {
                return Err(parse_err(format!("column {}: {cell:?} is not finite", COLUMNS[k])));
            }
            Ok(Some(v))
        };

        let name = row[cols[0]].to_string();
        if name.is_empty() {
            return Err(parse_err("empty country name".into()));
        }
        let f = number(1)?.ok_or_else(|| parse_err(format!("{name}: f is missing")))?;
        if f < 0.0 {
            return Err(parse_err(format!("{name}: f = {f} is negative")));
        }
        let mut g = number(2)?;
        let lambda = number(3)?;
        let gamma = number(4)?;
        let mut invalid_fields = Vec::new();
        if let Some(v) = g {
            if v <= 0.0 {
                log::warn!("line {line}: {name} has g = {v}, treated as missing");
                invalid_fields.push("g".to_string());
                g = None;
            } else if v >= 1.0 {
                return Err(parse_err(format!("{name}: g = {v} outside (0, 1)")));
            }
        }
        for (label, v) in [("lambda", lambda), ("gamma", gamma)] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return Err(parse_err(format!("{name}: {label} = {v} outside [0, 1]")));
                }
            }
        }
        records.push(CountryRecord { name, f, g, lambda, gamma, invalid_fields });
    }
    Ok(CountryTable { records, ignored_columns })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GdpGroup {
    High,
    Middle,
    Low,
}

impl GdpGroup {
    pub const ALL: [GdpGroup; 3] = [GdpGroup::High, GdpGroup::Middle, GdpGroup::Low];

    pub fn as_str(&self) -> &'static str {
        match self {
            GdpGroup::High => "high",
            GdpGroup::Middle => "middle",
            GdpGroup::Low => "low",
        }
    }
}

impl fmt::Display for GdpGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedRecord {
    pub name: String,
    pub f: f64,
    pub g: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// `(1 - lambda) * gamma`
    pub x: f64,
    /// `f / f_max` over complete records.
    pub f_norm: f64,
    /// `f_norm / g`
    pub y: f64,
    /// Unset until [`classify_groups`] runs.
    pub group: Option<GdpGroup>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedTable {
    pub records: Vec<DerivedRecord>,
    /// Names of incomplete records that were left out.
    pub excluded: Vec<String>,
}

/// Derived columns for every complete record, in input order.
pub fn derive(records: &[CountryRecord]) -> Result<DerivedTable> {
    let complete: Vec<&CountryRecord> = records.iter().filter(|r| r.is_complete()).collect();
    let excluded = records
        .iter()
        .filter(|r| !r.is_complete())
        .map(|r| r.name.clone())
        .collect();
    let f_max = complete.iter().map(|r| r.f).fold(f64::NEG_INFINITY, f64::max);
    if complete.is_empty() {
        return Err(Error::EmptyInput("no complete country record".into()));
    }
    if !(f_max > 0.0) {
        return Err(invalid("every complete record has f = 0"));
    }
    let derived = complete
        .into_iter()
        .map(|r| {
            let (g, lambda, gamma) = (r.g.unwrap(), r.lambda.unwrap(), r.gamma.unwrap());
            let f_norm = r.f / f_max;
            DerivedRecord {
                name: r.name.clone(),
                f: r.f,
                g,
                lambda,
                gamma,
                x: (1.0 - lambda) * gamma,
                f_norm,
                y: f_norm / g,
                group: None,
            }
        })
        .collect();
    Ok(DerivedTable { records: derived, excluded })
}

/// `high` if `f >= high`, `low` if `f < low`, `middle` otherwise.
pub fn classify_groups(records: &[DerivedRecord], thresholds: (f64, f64)) -> Result<Vec<DerivedRecord>> {
    let (low, high) = thresholds;
    if !(low < high) {
        return Err(invalid(format!("thresholds must satisfy low < high, got ({low}, {high})")));
    }
    Ok(records
        .iter()
        .map(|r| {
            let group = if r.f >= high {
                GdpGroup::High
            } else if r.f < low {
                GdpGroup::Low
            } else {
                GdpGroup::Middle
            };
            DerivedRecord { group: Some(group), ..r.clone() }
        })
        .collect())
}

/// Linearly interpolated percentile (`q` in `[0, 1]`) of a non-empty sample.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// 33rd and 67th percentiles of `f`.
pub fn default_thresholds(records: &[DerivedRecord]) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no records to take percentiles of".into()));
    }
    let f: Vec<f64> = records.iter().map(|r| r.f).collect();
    Ok((percentile(&f, 0.33), percentile(&f, 0.67)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFit {
    pub group: GdpGroup,
    /// Fit of `y` against `ln x`; absent when the group cannot be fitted.
    pub fit: Option<FitResult>,
    /// Why `fit` is absent.
    pub unfittable: Option<String>,
    pub members: Vec<String>,
}

/// Per-group least squares of `y` on `ln x`. A group that cannot be fitted
/// is reported without a fit; the others proceed.
pub fn fit_groups(records: &[DerivedRecord]) -> Result<Vec<GroupFit>> {
    if let Some(r) = records.iter().find(|r| r.group.is_none()) {
        return Err(invalid(format!("{} has not been assigned a group", r.name)));
    }
    let mut fits = Vec::new();
    for group in GdpGroup::ALL {
        let members: Vec<&DerivedRecord> = records.iter().filter(|r| r.group == Some(group)).collect();
        if members.is_empty() {
            continue;
        }
        let points: Vec<XYPoint> = members
            .iter()
            .filter(|r| r.x > 0.0)
            .map(|r| XYPoint::new(r.x.ln(), r.y))
            .collect();
        let (fit, unfittable) = if points.len() < 2 {
            (None, Some(format!("{} member(s) with x > 0, need at least 2", points.len())))
        } else {
            match fit_linear(&points) {
                Ok(fit) => (Some(fit), None),
                Err(e) => (None, Some(e.to_string())),
            }
        };
        fits.push(GroupFit {
            group,
            fit,
            unfittable,
            members: members.iter().map(|r| r.name.clone()).collect(),
        });
    }
    Ok(fits)
}
