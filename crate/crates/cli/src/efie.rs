//! EFIE experiments on piecewise-plane surfaces.

use crate::config::{Convergence, EfieSolve, SurfaceSource};
use crate::output::{num, opt, Report, Table};
use hpbem::efie::{
    assemble, convergence_study, differences_decrease, solve, solve_matrix, AssemblyOptions,
    SolveStatus, WaveContext, DEFAULT_DENSE_LIMIT,
};
use hpbem::surface::{build_mesh, PiecewisePlaneSurface};
use hpbem::Error;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-8;
pub const MANUFACTURED_TOL: f64 = 1e-8;

const COLUMNS: [&str; 7] = [
    "N",
    "h",
    "p",
    "k",
    "residual",
    "energy_surrogate_of_difference_to_finest",
    "assembly_seconds",
];

pub fn load_surface(source: &SurfaceSource) -> Result<PiecewisePlaneSurface, Error> {
    match source {
        SurfaceSource::Screen => Ok(PiecewisePlaneSurface::unit_square_screen()),
        SurfaceSource::Cube => Ok(PiecewisePlaneSurface::unit_cube()),
        SurfaceSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Configuration(format!("cannot read {}: {e}", path.display()))
            })?;
            PiecewisePlaneSurface::parse(&text)
        }
    }
}

/// Plane wave travelling along `-z`, polarized along `x`.
pub fn default_wave(k: f64) -> Result<WaveContext, Error> {
    WaveContext::new(k, [0.0, 0.0, -1.0], [1.0, 0.0, 0.0])
}

fn seconds(v: f64, timing: bool) -> String {
    if timing {
        num(v)
    } else {
        "-".into()
    }
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Solved => "solved",
        SolveStatus::Singular => "singular",
        SolveStatus::TooLarge => "too_large",
    }
}

pub fn efie_solve(c: &EfieSolve, timing: bool) -> Result<Report, Error> {
    let mut header = COLUMNS.to_vec();
    header.extend(["L", "status", "symmetry_defect"]);
    let mut rep = Report {
        table: Table::new(&header),
        ..Default::default()
    };
    let surface = load_surface(&c.source)?;
    let wave = default_wave(c.wavenumber)?;
    let options = AssemblyOptions {
        quad_order: c.quad_order,
        ..Default::default()
    };
    let start = Instant::now();
    let (mesh, space) = build_mesh(&surface, c.level, c.degree)?;
    let system = assemble(&space, &wave, options)?;
    let elapsed = start.elapsed().as_secs_f64();
    let report = solve(&system);
    let symmetry = system.symmetry_defect();
    rep.table.push(vec![
        space.dim().to_string(),
        num(mesh.h()),
        c.degree.to_string(),
        num(c.wavenumber),
        num(report.relative_residual),
        "-".into(),
        seconds(elapsed, timing),
        c.level.to_string(),
        status_name(report.status).into(),
        num(symmetry),
    ]);
    rep.check(report.status == SolveStatus::Solved, || {
        format!("system not solved: {}", status_name(report.status))
    });
    rep.check(report.relative_residual <= RESIDUAL_TOL, || {
        format!("residual {:.3e}", report.relative_residual)
    });
    rep.check(symmetry <= SYMMETRY_TOL, || {
        format!("symmetry defect {symmetry:.3e}")
    });
    rep.plot.add(
        "relative residual",
        vec![(space.dim() as f64, report.relative_residual)],
    );
    Ok(rep)
}

/// Relative error of recovering random coefficients `c` from `A c`.
fn manufactured_error(
    surface: &PiecewisePlaneSurface,
    wave: &WaveContext,
    (level, p): (usize, usize),
    options: AssemblyOptions,
    rng: &mut ChaCha8Rng,
) -> Result<f64, Error> {
    let (_, space) = build_mesh(surface, level, p)?;
    let system = assemble(&space, wave, options)?;
    let c = DVector::from_fn(space.dim(), |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let b = &system.matrix * &c;
    let r = solve_matrix(&system.matrix, &b, DEFAULT_DENSE_LIMIT);
    Ok(match r.solution {
        Some(u) if r.status == SolveStatus::Solved => (&u - &c).norm() / c.norm(),
        _ => f64::INFINITY,
    })
}

pub fn convergence(c: &Convergence, seed: u64, timing: bool) -> Result<Report, Error> {
    let mut header = COLUMNS.to_vec();
    header.extend([
        "L",
        "status",
        "symmetry_defect",
        "manufactured_error",
        "difference_to_previous",
    ]);
    let mut rep = Report {
        table: Table::new(&header),
        ..Default::default()
    };
    let surface = load_surface(&c.source)?;
    let wave = default_wave(c.wavenumber)?;
    let options = AssemblyOptions {
        quad_order: c.quad_order,
        ..Default::default()
    };
    let rows = convergence_study(&surface, &wave, &c.configs, c.reference, options)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4);
    let mut points = Vec::new();
    for r in &rows {
        let m = manufactured_error(&surface, &wave, (r.level, r.p), options, &mut rng)?;
        rep.table.push(vec![
            r.n.to_string(),
            num(r.h),
            r.p.to_string(),
            num(r.k),
            num(r.residual),
            num(r.difference_to_finest),
            seconds(r.assembly_seconds, timing),
            r.level.to_string(),
            status_name(r.status).into(),
            num(r.symmetry_defect),
            num(m),
            opt(r.difference_to_previous),
        ]);
        let tag = format!("L={} p={}", r.level, r.p);
        rep.check(r.status == SolveStatus::Solved, || {
            format!("{tag}: {}", status_name(r.status))
        });
        rep.check(r.residual <= RESIDUAL_TOL, || {
            format!("{tag}: residual {:.3e}", r.residual)
        });
        rep.check(r.symmetry_defect <= SYMMETRY_TOL, || {
            format!("{tag}: symmetry defect {:.3e}", r.symmetry_defect)
        });
        rep.check(m <= MANUFACTURED_TOL, || {
            format!("{tag}: manufactured error {m:.3e}")
        });
        points.push((r.n as f64, r.difference_to_finest));
    }
    rep.check(differences_decrease(&rows), || {
        "energy differences between successive refinements do not decrease".into()
    });
    rep.plot.add(
        "energy surrogate of the difference to the reference",
        points,
    );
    Ok(rep)
}
