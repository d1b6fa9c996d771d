//! File-format and spec-string parsing shared by the CLI and the fuzz
//! targets: matrix CSV (headerless), data CSV (header required), two-column
//! tables, nu-measure JSON, and the copula / measure spec mini-grammars.
//!
//! Everything here takes untrusted input and must fail with an error, never
//! a panic.

use serde::Deserialize;
use thiserror::Error;

use crate::compatibility::KappaMatrix;
use crate::concordance::NuMeasure;
use crate::copulas::Copula;
use crate::distributions::{ConcordanceInducing, StepQuantile};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("parse error at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("parse error: {0}")]
    Invalid(String),
}

fn invalid<E: std::fmt::Display>(e: E) -> ParseError {
    ParseError::Invalid(e.to_string())
}

/// Parse a headerless comma-separated square matrix and validate it as a
/// kappa-matrix.
pub fn parse_matrix_csv(input: &[u8]) -> Result<KappaMatrix, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| ParseError::Malformed {
            line,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| ParseError::Malformed {
                    line,
                    message: format!("`{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    let d = rows.len();
    if d == 0 {
        return Err(ParseError::Invalid("matrix file is empty".into()));
    }
    let mut data = Vec::with_capacity(d * d);
    for (idx, row) in rows.into_iter().enumerate() {
        if row.len() != d {
            return Err(ParseError::Malformed {
                line: idx + 1,
                message: format!("expected {d} columns for a {d}x{d} matrix, found {}", row.len()),
            });
        }
        data.extend(row);
    }
    KappaMatrix::new(d, data).map_err(invalid)
}

/// A parsed data file: named numeric columns.
#[derive(Clone, Debug)]
pub struct DataTable {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl DataTable {
    pub fn column(&self, name: &str) -> Result<&[f64], ParseError> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| {
                ParseError::Invalid(format!(
                    "no column named `{name}` (available: {})",
                    self.headers.join(", ")
                ))
            })
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Parse a data CSV with a mandatory header row and numeric cells.
pub fn parse_data_csv(input: &[u8]) -> Result<DataTable, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| ParseError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(ParseError::Invalid("data file needs a header row".into()));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // header occupies line 1
        let record = record.map_err(|e| ParseError::Malformed {
            line,
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(ParseError::Malformed {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    headers.len(),
                    record.len()
                ),
            });
        }
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let value = field.parse::<f64>().map_err(|_| ParseError::Malformed {
                line,
                message: format!("`{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(ParseError::Malformed {
                    line,
                    message: "data values must be finite".into(),
                });
            }
            col.push(value);
        }
    }
    if columns[0].is_empty() {
        return Err(ParseError::Invalid("data file has no rows".into()));
    }
    Ok(DataTable { headers, columns })
}

/// Parse a headerless two-column CSV of (probability node, value) rows.
pub fn parse_table_csv(input: &[u8]) -> Result<Vec<(f64, f64)>, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| ParseError::Malformed {
            line,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() != 2 {
            return Err(ParseError::Malformed {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let p = record[0]
            .parse::<f64>()
            .map_err(|_| ParseError::Malformed {
                line,
                message: format!("`{}` is not a number", &record[0]),
            })?;
        let v = record[1]
            .parse::<f64>()
            .map_err(|_| ParseError::Malformed {
                line,
                message: format!("`{}` is not a number", &record[1]),
            })?;
        rows.push((p, v));
    }
    if rows.is_empty() {
        return Err(ParseError::Invalid("table file is empty".into()));
    }
    Ok(rows)
}

/// A nu-measure as specified in JSON; the density-table variant carries an
/// unresolved file path.
#[derive(Clone, Debug, PartialEq)]
pub enum NuSource {
    Atoms(Vec<(f64, f64)>),
    GiniDensity,
    DensityTablePath(String),
}

#[derive(Deserialize)]
struct NuJson {
    atoms: Option<Vec<(f64, f64)>>,
    density: Option<String>,
    density_table: Option<String>,
}

/// Parse the nu-measure JSON: `{"atoms":[[p,w],...]}`, `{"density":"gini"}`,
/// or `{"density_table":"path.csv"}`.
pub fn parse_nu_json(text: &str) -> Result<NuSource, ParseError> {
    let parsed: NuJson = serde_json::from_str(text).map_err(invalid)?;
    let mut sources = Vec::new();
    if let Some(atoms) = parsed.atoms {
        sources.push(NuSource::Atoms(atoms));
    }
    if let Some(name) = parsed.density {
        if name != "gini" {
            return Err(ParseError::Invalid(format!(
                "unknown builtin density `{name}` (supported: gini)"
            )));
        }
        sources.push(NuSource::GiniDensity);
    }
    if let Some(path) = parsed.density_table {
        sources.push(NuSource::DensityTablePath(path));
    }
    match sources.len() {
        1 => Ok(sources.pop().unwrap()),
        0 => Err(ParseError::Invalid(
            "nu-measure JSON needs one of `atoms`, `density`, `density_table`".into(),
        )),
        _ => Err(ParseError::Invalid(
            "nu-measure JSON must specify exactly one of `atoms`, `density`, `density_table`"
                .into(),
        )),
    }
}

/// Resolve a parsed nu-source into a validated measure; `load` supplies the
/// bytes behind a density-table path.
pub fn resolve_nu_source<L>(source: &NuSource, load: L) -> Result<NuMeasure, ParseError>
where
    L: FnOnce(&str) -> Result<Vec<u8>, String>,
{
    match source {
        NuSource::Atoms(atoms) => NuMeasure::atoms(atoms.clone()).map_err(invalid),
        NuSource::GiniDensity => Ok(NuMeasure::gini_density()),
        NuSource::DensityTablePath(path) => {
            let bytes = load(path).map_err(ParseError::Invalid)?;
            let rows = parse_table_csv(&bytes)?;
            let (probs, densities) = rows.into_iter().unzip();
            NuMeasure::density_table(probs, densities).map_err(invalid)
        }
    }
}

/// Parse a copula spec string.
///
/// Grammar: `independence`, `comonotone`, `countermonotone`,
/// `gaussian:RHO`, or a convex mixture `W*SPEC+W*SPEC+...` such as
/// `0.5*gaussian:0.3+0.5*comonotone`.
pub fn parse_copula_spec(s: &str) -> Result<Copula, ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseError::Invalid("empty copula spec".into()));
    }
    let terms = split_mixture_terms(s);
    if terms.len() == 1 && !terms[0].contains('*') {
        return parse_copula_atom(terms[0]);
    }
    let mut components = Vec::with_capacity(terms.len());
    for term in terms {
        let (weight, atom) = term.split_once('*').ok_or_else(|| {
            ParseError::Invalid(format!(
                "mixture component `{term}` must look like WEIGHT*COPULA"
            ))
        })?;
        let w = weight
            .trim()
            .parse::<f64>()
            .map_err(|_| ParseError::Invalid(format!("`{weight}` is not a weight")))?;
        components.push((w, parse_copula_atom(atom)?));
    }
    Copula::mixture(components).map_err(invalid)
}

/// Split on '+' separators that start a new weighted term, leaving signs
/// inside parameters (e.g. `gaussian:+0.5`) alone.
fn split_mixture_terms(s: &str) -> Vec<&str> {
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'+' && i > start {
            let prev = bytes[i - 1];
            if prev != b':' && prev != b'*' && prev != b'+' {
                terms.push(&s[start..i]);
                start = i + 1;
            }
        }
    }
    terms.push(&s[start..]);
    terms
}

fn parse_copula_atom(s: &str) -> Result<Copula, ParseError> {
    let s = s.trim();
    let (name, param) = match s.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p.trim())),
        None => (s, None),
    };
    match (name, param) {
        ("independence" | "indep" | "pi", None) => Ok(Copula::Independence),
        ("comonotone" | "m", None) => Ok(Copula::Comonotone),
        ("countermonotone" | "w", None) => Ok(Copula::Countermonotone),
        ("gaussian" | "normal", Some(p)) => {
            let rho = p
                .parse::<f64>()
                .map_err(|_| ParseError::Invalid(format!("`{p}` is not a correlation")))?;
            Copula::gaussian(rho).map_err(invalid)
        }
        ("gaussian" | "normal", None) => Err(ParseError::Invalid(
            "gaussian copula needs a correlation, e.g. gaussian:-0.5".into(),
        )),
        _ => Err(ParseError::Invalid(format!(
            "unknown copula `{s}` (expected independence, comonotone, countermonotone, \
             gaussian:RHO, or a mixture W*SPEC+W*SPEC)"
        ))),
    }
}

/// A measure spec as written on the command line; generalized Gini and
/// tabulated transforms carry unresolved references.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSource {
    Spearman,
    Blomqvist,
    BetaP(f64),
    Gini,
    /// Requires a nu-measure supplied separately (`--nu`).
    GeneralizedGini,
    GTransformed(GSource),
}

#[derive(Clone, Debug, PartialEq)]
pub enum GSource {
    Uniform,
    Gaussian,
    ThreePoint(f64),
    /// Two-column CSV with the quantile table.
    TablePath(String),
}

/// Parse a measure spec string: `spearman`, `blomqvist`, `beta:P`, `gini`,
/// `ggini`, `gtrans:uniform`, `gtrans:gaussian`, `gtrans:threepoint:P`, or
/// `gtrans:@table.csv`.
pub fn parse_measure_spec(s: &str) -> Result<MeasureSource, ParseError> {
    let s = s.trim();
    match s {
        "spearman" | "rho" => return Ok(MeasureSource::Spearman),
        "blomqvist" | "beta" => return Ok(MeasureSource::Blomqvist),
        "gini" | "gamma" => return Ok(MeasureSource::Gini),
        "ggini" => return Ok(MeasureSource::GeneralizedGini),
        _ => {}
    }
    if let Some(p) = s.strip_prefix("beta:") {
        let p = p
            .trim()
            .parse::<f64>()
            .map_err(|_| ParseError::Invalid(format!("`{p}` is not a beta parameter")))?;
        if !(p > 0.0 && p <= 0.5) {
            return Err(ParseError::Invalid(format!(
                "beta parameter must lie in (0, 1/2], got {p}"
            )));
        }
        return Ok(MeasureSource::BetaP(p));
    }
    if let Some(g) = s.strip_prefix("gtrans:") {
        let g = g.trim();
        let source = match g {
            "uniform" => GSource::Uniform,
            "gaussian" | "normal" => GSource::Gaussian,
            _ => {
                if let Some(p) = g.strip_prefix("threepoint:") {
                    let p = p.trim().parse::<f64>().map_err(|_| {
                        ParseError::Invalid(format!("`{p}` is not a three-point parameter"))
                    })?;
                    if !(p > 0.0 && p <= 0.5) {
                        return Err(ParseError::Invalid(format!(
                            "three-point parameter must lie in (0, 1/2], got {p}"
                        )));
                    }
                    GSource::ThreePoint(p)
                } else if let Some(path) = g.strip_prefix('@') {
                    if path.is_empty() {
                        return Err(ParseError::Invalid(
                            "gtrans:@ needs a table path".into(),
                        ));
                    }
                    GSource::TablePath(path.to_string())
                } else {
                    return Err(ParseError::Invalid(format!(
                        "unknown transform `{g}` (expected uniform, gaussian, threepoint:P, \
                         or @table.csv)"
                    )));
                }
            }
        };
        return Ok(MeasureSource::GTransformed(source));
    }
    Err(ParseError::Invalid(format!(
        "unknown measure `{s}` (expected spearman, blomqvist, beta:P, gini, ggini, or gtrans:...)"
    )))
}

/// Resolve a transform source into a distribution; `load` supplies the
/// bytes behind a table path.
pub fn resolve_g_source<L>(source: &GSource, load: L) -> Result<ConcordanceInducing, ParseError>
where
    L: FnOnce(&str) -> Result<Vec<u8>, String>,
{
    match source {
        GSource::Uniform => Ok(ConcordanceInducing::Uniform01),
        GSource::Gaussian => Ok(ConcordanceInducing::StandardGaussian),
        GSource::ThreePoint(p) => ConcordanceInducing::three_point(*p).map_err(invalid),
        GSource::TablePath(path) => {
            let bytes = load(path).map_err(ParseError::Invalid)?;
            let rows = parse_table_csv(&bytes)?;
            let (probs, values) = rows.into_iter().unzip();
            Ok(ConcordanceInducing::Tabulated(
                StepQuantile::new(probs, values).map_err(invalid)?,
            ))
        }
    }
}

/// Full-precision decimal rendering: 17 significant digits round-trips f64.
pub fn format_machine(x: f64) -> String {
    format!("{x:.16e}")
}

/// Human-readable rendering at 4 decimals.
pub fn format_human(x: f64) -> String {
    format!("{x:.4}")
}
