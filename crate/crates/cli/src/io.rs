//! CSV formats read and written by the pipeline.
//!
//! All files are comma separated with a header row; lines starting with `#`
//! are comments. Floats are written in shortest round-trip form, so output
//! is byte-identical for identical inputs.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use squeeze_core::envelope::Snlf;
use squeeze_core::grid::UNIFORMITY_TOL;
use squeeze_core::langevin::PhaseSweep;
use squeeze_core::phase::PhaseComparison;
use squeeze_core::spectrum::{NoiseTrace, SqueezingSpectrum};
use squeeze_core::units::linear_to_db;
use squeeze_core::{Frequency, UniformGrid};

pub const TRACE_HEADER: [&str; 3] = ["delta_mhz", "noise_min_db", "noise_max_db"];
pub const SPECTRUM_HEADER: [&str; 2] = ["omega_mhz", "noise_db"];
pub const SNLF_HEADER: [&str; 3] = ["delta_mhz", "snlf_mhz", "snlf_plus_delta_mhz"];
pub const COMPARE_HEADER: [&str; 5] = ["omega_mhz", "n_min_db", "n_locked_db", "optimal_phase_rad", "dphi_rad"];
pub const SWEEP_HEADER: [&str; 3] = ["delta_mhz", "phase_rad", "shift_rad"];

/// Numeric rows of a table with the 1-based line each came from.
struct Table {
    rows: Vec<(usize, Vec<f64>)>,
}

fn read_table(reader: impl Read, header: &[&str], allow_nan: bool) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let found = rdr.headers().context("cannot read header row")?.clone();
    let cols = header
        .iter()
        .map(|name| {
            found
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| anyhow!("missing column `{name}` (header is `{}`)", found.iter().collect::<Vec<_>>().join(",")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.context("malformed CSV row")?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let values = cols
            .iter()
            .zip(header)
            .map(|(&c, name)| {
                let raw = rec.get(c).ok_or_else(|| anyhow!("line {line}: missing value for `{name}`"))?;
                let v: f64 = raw.parse().map_err(|_| anyhow!("line {line}: cannot parse `{raw}` in `{name}`"))?;
                if v.is_infinite() || (v.is_nan() && !allow_nan) {
                    bail!("line {line}: non-finite `{raw}` in `{name}`");
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, values));
    }
    if rows.is_empty() {
        bail!("table has no data rows");
    }
    Ok(Table { rows })
}

fn check_increasing(rows: &[(usize, Vec<f64>)], what: &str) -> Result<()> {
    for w in rows.windows(2) {
        if !(w[1].1[0] > w[0].1[0]) {
            bail!("line {}: {what} {} does not increase (previous {})", w[1].0, w[1].1[0], w[0].1[0]);
        }
    }
    Ok(())
}

fn writer(w: impl Write, comments: &[&str]) -> Result<csv::Writer<impl Write>> {
    let mut w = w;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    Ok(csv::Writer::from_writer(w))
}

/// Reads a noise trace recorded at analysis frequency `analysis_mhz`.
pub fn read_noise_trace(reader: impl Read, analysis_mhz: f64) -> Result<NoiseTrace> {
    let table = read_table(reader, &TRACE_HEADER, false)?;
    let rows = &table.rows;
    check_increasing(rows, "detuning")?;
    if rows.len() >= 2 {
        let (first, last) = (rows[0].1[0], rows[rows.len() - 1].1[0]);
        let step = (last - first) / (rows.len() - 1) as f64;
        for (i, (line, v)) in rows.iter().enumerate() {
            let expect = first + step * i as f64;
            if (v[0] - expect).abs() > UNIFORMITY_TOL * step.abs().max(1.0) * (rows.len() as f64) {
                bail!("line {line}: detuning {} MHz breaks the uniform {step} MHz spacing", v[0]);
            }
        }
    }
    for (line, v) in rows {
        if v[1] > v[2] {
            bail!("line {line}: noise_min_db {} exceeds noise_max_db {}", v[1], v[2]);
        }
    }
    let points: Vec<f64> = rows.iter().map(|r| r.1[0]).collect();
    let grid = if points.len() == 1 {
        UniformGrid::new(points[0], 1.0, 1)?
    } else {
        UniformGrid::from_points(&points)?
    };
    let lo: Vec<f64> = rows.iter().map(|r| r.1[1]).collect();
    let hi: Vec<f64> = rows.iter().map(|r| r.1[2]).collect();
    let trace = NoiseTrace::from_db(
        grid,
        &lo,
        &hi,
        Frequency::analysis(analysis_mhz)?,
    )?;
    Ok(trace)
}

/// dB values pass through a logarithm on the way out, so they are rounded to
/// 1e-12 dB to keep rewritten files byte-stable.
fn db_text(v: f64) -> String {
    let t = format!("{v:.12}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.into() }
}

pub fn load_noise_trace(path: &Path, analysis_mhz: f64) -> Result<NoiseTrace> {
    let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_noise_trace(file, analysis_mhz).with_context(|| format!("invalid noise trace {}", path.display()))
}

/// Writes the min/max channels in dB.
pub fn write_noise_trace(trace: &NoiseTrace, w: impl Write, comments: &[&str]) -> Result<()> {
    let mut w = writer(w, comments)?;
    w.write_record(TRACE_HEADER)?;
    for (i, x) in trace.grid().points().enumerate() {
        w.write_record([
            x.to_string(),
            db_text(linear_to_db(trace.n_min()[i])?),
            db_text(linear_to_db(trace.n_max()[i])?),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum(s: &SqueezingSpectrum, w: impl Write) -> Result<()> {
    let mut w = writer(w, &[&format!("delta_mhz = {}", s.delta().value())])?;
    w.write_record(SPECTRUM_HEADER)?;
    for (o, n) in s.omega().iter().zip(s.noise_db()) {
        w.write_record([o.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum(reader: impl Read, delta_mhz: f64) -> Result<SqueezingSpectrum> {
    let table = read_table(reader, &SPECTRUM_HEADER, false)?;
    check_increasing(&table.rows, "analysis frequency")?;
    let (omega, noise) = table.rows.into_iter().map(|(_, v)| (v[0], v[1])).unzip();
    Ok(SqueezingSpectrum::new(omega, noise, Frequency::mhz(delta_mhz)?)?)
}

/// One row of the shot-noise-limit-frequency table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnlfRow {
    pub delta_mhz: f64,
    pub snlf: Snlf,
}

impl SnlfRow {
    pub fn snlf_mhz(&self) -> f64 {
        self.snlf.frequency().map_or(f64::NAN, |f| f.value())
    }

    pub fn snlf_plus_delta(&self) -> f64 {
        self.snlf_mhz() + self.delta_mhz
    }
}

/// Rows without a crossing are written as `nan`.
pub fn write_snlf_table(rows: &[SnlfRow], w: impl Write) -> Result<()> {
    let mut w = writer(w, &[])?;
    w.write_record(SNLF_HEADER)?;
    for r in rows {
        let text = |v: f64| if v.is_nan() { "nan".to_string() } else { v.to_string() };
        w.write_record([r.delta_mhz.to_string(), text(r.snlf_mhz()), text(r.snlf_plus_delta())])?;
    }
    w.flush()?;
    Ok(())
}

/// `(delta, snlf, snlf + delta)` triples; `nan` marks rows with no crossing.
pub fn read_snlf_table(reader: impl Read) -> Result<Vec<(f64, f64, f64)>> {
    let table = read_table(reader, &SNLF_HEADER, true)?;
    table
        .rows
        .into_iter()
        .map(|(line, v)| {
            if v[0].is_nan() {
                bail!("line {line}: delta_mhz must be a number");
            }
            let consistent = (v[1].is_nan() && v[2].is_nan()) || (v[1] + v[0] - v[2]).abs() <= 1e-9 * (1.0 + v[2].abs());
            if !consistent {
                bail!("line {line}: snlf_plus_delta_mhz {} does not equal snlf_mhz + delta_mhz", v[2]);
            }
            Ok((v[0], v[1], v[2]))
        })
        .collect()
}

pub fn write_phase_comparison(c: &PhaseComparison, w: impl Write) -> Result<()> {
    let mut w = writer(
        w,
        &[
            &format!("delta_mhz = {}", c.delta.value()),
            &format!("lock_phase_rad = {}", c.lock.phase.0),
        ],
    )?;
    w.write_record(COMPARE_HEADER)?;
    for i in 0..c.omega.len() {
        w.write_record([
            c.omega[i].to_string(),
            db_text(linear_to_db(c.n_min[i])?),
            db_text(linear_to_db(c.n_locked[i])?),
            c.optimal_phase[i].to_string(),
            c.dphi[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns of a phase-comparison file, in dB and radians.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub omega: Vec<f64>,
    pub n_min_db: Vec<f64>,
    pub n_locked_db: Vec<f64>,
    pub optimal_phase: Vec<f64>,
    pub dphi: Vec<f64>,
}

pub fn read_phase_comparison(reader: impl Read) -> Result<ComparisonTable> {
    let table = read_table(reader, &COMPARE_HEADER, false)?;
    check_increasing(&table.rows, "analysis frequency")?;
    let col = |j: usize| table.rows.iter().map(|r| r.1[j]).collect::<Vec<_>>();
    Ok(ComparisonTable { omega: col(0), n_min_db: col(1), n_locked_db: col(2), optimal_phase: col(3), dphi: col(4) })
}

pub fn write_phase_sweep(s: &PhaseSweep, w: impl Write) -> Result<()> {
    let mut w = writer(w, &[&format!("initial_phase_rad = {}", s.phi0)])?;
    w.write_record(SWEEP_HEADER)?;
    for (i, shift) in s.shift().into_iter().enumerate() {
        w.write_record([s.delta[i].to_string(), s.phase[i].to_string(), shift.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_phase_sweep(reader: impl Read) -> Result<PhaseSweep> {
    let table = read_table(reader, &SWEEP_HEADER, false)?;
    check_increasing(&table.rows, "detuning")?;
    let (first_line, first) = (&table.rows[0].0, &table.rows[0].1);
    let phi0 = first[1] - first[2];
    for (line, v) in &table.rows {
        if ((v[1] - v[2]) - phi0).abs() > 1e-9 * (1.0 + phi0.abs()) {
            bail!("line {line}: phase_rad − shift_rad differs from the initial phase on line {first_line}");
        }
    }
    Ok(PhaseSweep {
        delta: table.rows.iter().map(|r| r.1[0]).collect(),
        phase: table.rows.iter().map(|r| r.1[1]).collect(),
        phi0,
    })
}
