//! Parameter scans, oracle comparisons and scaling fits behind the `kitaev`
//! binary. Every table is written as CSV with a header row, `\n` line endings
//! and floats printed with 17 significant digits, so identical runs produce
//! byte-identical files and every value survives a round trip.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use thiserror::Error;

use kitaev_core::entropy::{block_entropy_at, block_entropy_curve_with, EntropyMethod};
use kitaev_core::{compare_entropies, ChainParams, ComparisonReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] kitaev_core::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanAxis {
    #[value(name = "block_len")]
    BlockLen,
    #[value(name = "h_field")]
    HField,
    #[value(name = "jy_over_jx")]
    JyOverJx,
}

impl ScanAxis {
    pub fn column(self) -> &'static str {
        match self {
            Self::BlockLen => "block_len",
            Self::HField => "h_field",
            Self::JyOverJx => "jy_over_jx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Parity {
    #[default]
    All,
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, l: usize) -> bool {
        match self {
            Self::All => true,
            Self::Even => l.is_multiple_of(2),
            Self::Odd => l % 2 == 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    #[default]
    Correlation,
    CrossBlock,
}

impl From<Method> for EntropyMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Correlation => EntropyMethod::Correlation,
            Method::CrossBlock => EntropyMethod::CrossBlock,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanRange {
    Stepped { start: f64, stop: f64, step: f64 },
    List(Vec<f64>),
}

impl ScanRange {
    /// Points `start + i·step` up to `stop` inclusive (with a relative slack
    /// so that e.g. `2.0` is reached from `-2.0` in steps of `0.05`).
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            Self::List(v) => v.clone(),
            &Self::Stepped { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
                    return usage("scan range must be finite");
                }
                if step <= 0.0 {
                    return usage(format!("scan step must be positive, got {step}"));
                }
                if stop < start {
                    return usage(format!("scan range is empty: {start} > {stop}"));
                }
                let count = ((stop - start) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
                (0..count).map(|i| start + i as f64 * step).collect()
            }
        };
        if values.is_empty() {
            return usage("scan range is empty");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return usage("scan values must be finite");
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub axis: ScanAxis,
    pub params: ChainParams,
    pub range: ScanRange,
    /// Applies to the `block_len` axis only.
    pub parity: Parity,
    /// Block length held fixed along the `h_field` and `jy_over_jx` axes.
    pub block_len: Option<usize>,
    pub method: EntropyMethod,
}

impl ScanSpec {
    /// Block lengths of a `block_len` scan after parity filtering.
    fn block_lens(&self) -> Result<Vec<usize>> {
        let n = self.params.n_sites();
        let mut lens = Vec::new();
        for v in self.range.values()? {
            if v.fract() != 0.0 {
                return usage(format!("block length must be an integer, got {v}"));
            }
            if v < 1.0 || v > (n - 1) as f64 {
                return usage(format!("block length must lie in [1, {}], got {v}", n - 1));
            }
            let l = v as usize;
            if self.parity.admits(l) {
                lens.push(l);
            }
        }
        if lens.is_empty() {
            return usage("no block lengths left after the parity filter");
        }
        Ok(lens)
    }

    fn fixed_block(&self) -> Result<usize> {
        let n = self.params.n_sites();
        match self.block_len {
            Some(l) if l >= 1 && l < n => Ok(l),
            Some(l) => usage(format!("block length must lie in [1, {}], got {l}", n - 1)),
            None => usage(format!("--block-size is required for the {} axis", self.axis.column())),
        }
    }

    /// Validates the spec without computing anything.
    pub fn validate(&self) -> Result<()> {
        match self.axis {
            ScanAxis::BlockLen => self.block_lens().map(|_| ()),
            _ => {
                self.fixed_block()?;
                self.range.values().map(|_| ())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub axis_value: f64,
    pub entropy_bits: f64,
}

/// Entropies along the scan axis, in axis order.
pub fn compute_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    match spec.axis {
        ScanAxis::BlockLen => {
            let lens = spec.block_lens()?;
            Ok(block_entropy_curve_with(&spec.params, &lens, spec.method)?
                .into_iter()
                .map(|(l, e)| ScanRow { axis_value: l as f64, entropy_bits: e })
                .collect())
        }
        ScanAxis::HField | ScanAxis::JyOverJx => {
            let l = spec.fixed_block()?;
            let jx = spec.params.j_x();
            spec.range
                .values()?
                .into_par_iter()
                .map(|v| {
                    let p = match spec.axis {
                        ScanAxis::HField => spec.params.with_h_field(v)?,
                        _ => spec.params.with_couplings(jx, v * jx)?,
                    };
                    let e = block_entropy_at(&p, l, spec.method)?;
                    Ok(ScanRow { axis_value: v, entropy_bits: e })
                })
                .collect()
        }
    }
}

/// Header plus rows of numbers; integer columns are printed without exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub integer_columns: Vec<bool>,
}

impl Table {
    pub fn new(header: &[&str], integer_columns: &[bool]) -> Self {
        assert_eq!(header.len(), integer_columns.len());
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            integer_columns: integer_columns.to_vec(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table<W: Write>(out: W, table: &Table) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        if row.len() != table.header.len() {
            return usage(format!("row has {} fields, header has {}", row.len(), table.header.len()));
        }
        let fields = row.iter().zip(&table.integer_columns).map(|(&x, &int)| {
            if int && x.fract() == 0.0 && x.abs() < 9.0e15 {
                format!("{}", x as i64)
            } else {
                format_float(x)
            }
        });
        w.write_record(fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a table written by [`write_table`]. Columns whose every field is an
/// integer literal are flagged as integer columns.
pub fn read_table<R: Read>(input: R) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut integer_columns = vec![true; header.len()];
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(record.len());
        for (j, field) in record.iter().enumerate() {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("row {}: cannot parse {field:?} as a number", line + 1)))?;
            if field.contains(['.', 'e', 'E']) || field.contains("inf") || field.contains("NaN") {
                integer_columns[j] = false;
            }
            row.push(x);
        }
        rows.push(row);
    }
    Ok(Table { header, rows, integer_columns })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    read_table(File::open(path)?)
}

fn write_to_path(path: &Path, table: &Table) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    write_table(&mut file, table)?;
    file.flush()?;
    Ok(())
}

pub fn scan_table(spec: &ScanSpec, rows: &[ScanRow]) -> Table {
    let mut t = Table::new(&[spec.axis.column(), "entropy_bits"], &[spec.axis == ScanAxis::BlockLen, false]);
    t.rows = rows.iter().map(|r| vec![r.axis_value, r.entropy_bits]).collect();
    t
}

/// Computes the scan and writes it as CSV.
pub fn run_scan(spec: &ScanSpec, output: &Path) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    let rows = compute_scan(spec)?;
    write_to_path(output, &scan_table(spec, &rows))?;
    Ok(rows)
}

pub fn compare_table(report: &ComparisonReport) -> Table {
    let mut t = Table::new(&["L", "fast", "oracle", "abs_diff"], &[true, false, false, false]);
    t.rows = report.rows.iter().map(|r| vec![r.block_len as f64, r.fast, r.oracle, r.abs_diff]).collect();
    t
}

/// Fast entropies against exact diagonalization, written as CSV.
pub fn run_compare(params: &ChainParams, blocks: &[usize], output: Option<&Path>) -> Result<ComparisonReport> {
    if blocks.is_empty() {
        return usage("at least one block length is required");
    }
    let report = compare_entropies(params, blocks).map_err(|e| match e {
        kitaev_core::Error::Size { .. } | kitaev_core::Error::Parameter(_) => CliError::Usage(e.to_string()),
        other => CliError::Core(other),
    })?;
    let table = compare_table(&report);
    match output {
        Some(path) => write_to_path(path, &table)?,
        None => write_table(io::stdout().lock(), &table)?,
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Bits per doubling of `L`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
    pub points: usize,
}

/// Least-squares fit of `E` against `log₂ L` over the points of `curve`
/// inside `window` (inclusive) that pass the parity filter.
pub fn fit_log_slope(curve: &[(usize, f64)], window: (usize, usize), parity: Parity) -> Result<FitResult> {
    const MIN_POINTS: usize = 4;
    let (lo, hi) = window;
    if lo == 0 || hi < lo {
        return usage(format!("invalid fit window [{lo}, {hi}]"));
    }
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(l, _)| *l >= lo && *l <= hi && parity.admits(*l))
        .map(|&(l, e)| ((l as f64).log2(), e))
        .collect();
    if pts.len() < MIN_POINTS {
        return usage(format!("fit needs at least {MIN_POINTS} points in [{lo}, {hi}], got {}", pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return usage("fit window holds a single distinct block length");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult { slope, intercept, r_squared, window, points: pts.len() })
}

/// Reads a `block_len` scan back into `(L, E)` pairs.
pub fn curve_from_table(t: &Table) -> Result<Vec<(usize, f64)>> {
    let ls = t.column("block_len").ok_or_else(|| CliError::Usage("input has no block_len column".into()))?;
    let es = t.column("entropy_bits").ok_or_else(|| CliError::Usage("input has no entropy_bits column".into()))?;
    ls.into_iter()
        .zip(es)
        .map(|(l, e)| {
            if l.fract() != 0.0 || l < 1.0 {
                usage(format!("block length {l} is not a positive integer"))
            } else {
                Ok((l as usize, e))
            }
        })
        .collect()
}
