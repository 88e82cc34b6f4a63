use super::{
    assemble, energy_surrogate, prolong, solve, AssemblyOptions, EnergyGram, SolveStatus,
    WaveContext,
};
use crate::surface::{build_mesh, PiecewisePlaneSurface};
use crate::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use std::time::Instant;

/// One solved configuration of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub p: usize,
    pub n: usize,
    pub h: f64,
    pub k: f64,
    pub status: SolveStatus,
    pub residual: f64,
    pub symmetry_defect: f64,
    /// Energy of the difference to the reference solution.
    pub difference_to_finest: f64,
    /// Energy of the difference to the latest earlier row whose space is
    /// contained in this one.
    pub difference_to_previous: Option<f64>,
    pub previous: Option<usize>,
    pub assembly_seconds: f64,
}

impl ConvergenceRow {
    pub fn is_nested_in(&self, other: &ConvergenceRow) -> bool {
        self.level <= other.level && self.p <= other.p
    }
}

/// Solves every `(level, p)` in `configs` and compares the solutions inside
/// the space of `reference`, which must contain all of them.
pub fn convergence_study(
    surface: &PiecewisePlaneSurface,
    wave: &WaveContext,
    configs: &[(usize, usize)],
    reference: (usize, usize),
    options: AssemblyOptions,
) -> Result<Vec<ConvergenceRow>> {
    if let Some(&(l, p)) = configs
        .iter()
        .find(|&&(l, p)| l > reference.0 || p > reference.1)
    {
        return Err(Error::Configuration(format!(
            "configuration ({l},{p}) is not contained in the reference ({},{})",
            reference.0, reference.1
        )));
    }
    let (_, fine) = build_mesh(surface, reference.0, reference.1)?;
    let fine_system = assemble(&fine, wave, options)?;
    let fine_report = solve(&fine_system);
    let Some(fine_solution) = fine_report
        .solution
        .filter(|_| fine_report.status == SolveStatus::Solved)
    else {
        return Err(Error::Degeneracy(
            "the reference system could not be solved".into(),
        ));
    };
    let gram = EnergyGram::new(&fine, options)?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut prolonged: Vec<Option<DVector<Complex64>>> = Vec::new();
    for &(level, p) in configs {
        let start = Instant::now();
        let (mesh, space) = build_mesh(surface, level, p)?;
        let system = assemble(&space, wave, options)?;
        let assembly_seconds = start.elapsed().as_secs_f64();
        let report = solve(&system);
        let up = match (&report.solution, report.status) {
            (Some(u), SolveStatus::Solved) => Some(prolong(&space, u, &fine)?),
            _ => None,
        };
        let mut row = ConvergenceRow {
            level,
            p,
            n: space.dim(),
            h: mesh.h(),
            k: wave.k(),
            status: report.status,
            residual: report.relative_residual,
            symmetry_defect: system.symmetry_defect(),
            difference_to_finest: f64::NAN,
            difference_to_previous: None,
            previous: None,
            assembly_seconds,
        };
        if let Some(u) = &up {
            row.difference_to_finest = energy_surrogate(&(u - &fine_solution), &gram);
            row.previous = rows
                .iter()
                .rposition(|r| r.is_nested_in(&row) && (r.level, r.p) != (level, p));
            if let Some(i) = row.previous {
                if let Some(v) = &prolonged[i] {
                    row.difference_to_previous = Some(energy_surrogate(&(u - v), &gram));
                }
            }
        }
        rows.push(row);
        prolonged.push(up);
    }
    Ok(rows)
}

/// Whether every successive difference is smaller than the one before it
/// along its chain.
pub fn differences_decrease(rows: &[ConvergenceRow]) -> bool {
    rows.iter()
        .all(|r| match (r.previous, r.difference_to_previous) {
            (Some(i), Some(d)) => rows[i]
                .difference_to_previous
                .is_none_or(|before| d < before),
            _ => true,
        })
}
