//! CSV tables for plotting: η across triple overlaps, the winding of `qg` around an
//! annulus, phase deviation against switch-point position, and small summaries.

use std::f64::consts::PI;
use std::path::Path;

use crate::cochain::{coboundary, Cochain, CochainValues};
use crate::cohomology::BettiReport;
use crate::collation::LoopTransition;
use crate::cover::CoverageReport;
use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::nerve::Nerve;
use crate::worldline::SweepReport;

/// Rows of plot data under a fixed header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Writes the table as CSV. A table without rows still gets its header.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes `table` to `path` as CSV.
pub fn emit_figure_data(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    table.write_csv(std::fs::File::create(path)?)
}

fn simplex_label(s: &[usize]) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
}

/// Key–value summary of a report.
pub fn summary_table(entries: &[(&str, f64)]) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in entries {
        t.push(vec![k.to_string(), v.to_string()]);
    }
    t
}

/// `η = δg` at every sample of every triple overlap.
pub fn eta_scan(transitions: &Cochain, nerve: &Nerve) -> Result<Table> {
    let mut t = Table::new(&["simplex", "component", "theta", "phi", "eta"]);
    if nerve.dimension() < 2 {
        return Ok(t);
    }
    let eta = coboundary(transitions, nerve)?;
    let CochainValues::Samples(fs) = eta.values() else {
        return Err(Error::invalid(
            "an η scan needs sampled transition functions",
        ));
    };
    for (i, (f, s)) in fs.iter().zip(nerve.simplices(2)).enumerate() {
        let labels = &nerve.samples(2, i).labels;
        for ((p, v), label) in f.samples(nerve, 2, i).zip(labels) {
            t.push(vec![
                simplex_label(s),
                label.to_string(),
                p.theta.to_string(),
                p.phi.to_string(),
                v.to_string(),
            ]);
        }
    }
    Ok(t)
}

/// `g` and `qg` once around an annular overlap, closed by the row at angle 2π, where
/// `qg` reaches `2πn`.
pub fn winding_scan(lt: &LoopTransition, q: f64) -> Table {
    let mut t = Table::new(&["angle", "g", "qg"]);
    let closing = (!lt.values.is_empty()).then_some((2.0 * PI, lt.period));
    for (a, g) in lt
        .angle
        .iter()
        .copied()
        .zip(lt.values.iter().copied())
        .chain(closing)
    {
        t.push(vec![a.to_string(), g.to_string(), (q * g).to_string()]);
    }
    t
}

/// Phase deviation against switch-point position, one row per switch point per trial.
pub fn sweep_scan(report: &SweepReport) -> Table {
    let mut t = Table::new(&[
        "trial",
        "junction",
        "theta",
        "phi",
        "offset",
        "action",
        "phase_deviation",
        "shift",
        "residual",
    ]);
    for trial in &report.trials {
        for (j, (p, offset)) in trial.switch_points.iter().zip(&trial.offsets).enumerate() {
            t.push(vec![
                trial.trial.to_string(),
                j.to_string(),
                p[0].to_string(),
                p[1].to_string(),
                offset.to_string(),
                trial.action.to_string(),
                trial.phase_deviation.to_string(),
                trial.shift.to_string(),
                trial.residual.to_string(),
            ]);
        }
    }
    t
}

pub fn betti_table(report: &BettiReport) -> Table {
    let mut t = Table::new(&["degree", "betti", "torsion"]);
    for (p, (b, tor)) in report.betti.iter().zip(&report.torsion).enumerate() {
        let torsion = tor.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
        t.push(vec![p.to_string(), b.to_string(), torsion]);
    }
    t
}

pub fn coverage_table(report: &CoverageReport) -> Table {
    let mut t = Table::new(&["simplex", "samples", "components"]);
    for o in &report.overlap_component_counts {
        t.push(vec![
            simplex_label(&o.simplex),
            o.samples.to_string(),
            o.components.to_string(),
        ]);
    }
    t
}

/// Witness point of every simplex of the nerve.
pub fn witness_table(nerve: &Nerve) -> Table {
    let mut t = Table::new(&["dimension", "simplex", "theta", "phi"]);
    for p in 0..=nerve.dimension() {
        for (i, s) in nerve.simplices(p).iter().enumerate() {
            let w: SpherePoint = nerve.witness_point(p, i);
            t.push(vec![
                p.to_string(),
                simplex_label(s),
                w.theta.to_string(),
                w.phi.to_string(),
            ]);
        }
    }
    t
}
