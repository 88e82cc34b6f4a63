//! Experiments on the reference square and on single charts.

use crate::config::{Commute, Fracform, Infsup, Piola, Stability};
use crate::output::{num, Report, Table};
use hpbem::fracform::{
    expand, expand_edge, expand_polynomial, fd_oracle, ip_tilde_hm12_k, FracKind, FracWeightTable,
    ModeKind, DEFAULT_TRUNCATION,
};
use hpbem::interp::fields::{CornerGradient, CornerHarmonic, TrigField};
use hpbem::interp::{
    infsup_closed_form, infsup_constant, loglog_slope, proj_l2_with_points, stability_scan, Blend,
    DivInterpolator, DivNorm, InterpOptions, TildeHm12Projector, VectorField,
};
use hpbem::refelem::{normal_trace, rt_basis, Edge, QuadratureRule, RTFunction, TensorPolynomial};
use hpbem::surface::{add, cross, dot, piola_divergence, piola_push, scale, ChartMap, Vec3};
use hpbem::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub const INFSUP_TOL: f64 = 1e-8;
pub const COMMUTE_M12_TOL: f64 = 1e-8;
pub const COMMUTE_L2_TOL: f64 = 1e-9;
pub const REPRODUCTION_TOL: f64 = 1e-10;
pub const EXTENSION_TOL: f64 = 1e-9;
pub const SLOPE_TOL: f64 = 0.3;
pub const ORACLE_TOL: f64 = 0.05;
pub const MEAN_TOL: f64 = 1e-10;
pub const PIOLA_TOL: f64 = 1e-12;

/// Independent random streams per experiment part.
fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn infsup(c: Infsup) -> Result<Report, Error> {
    let mut rep = Report {
        table: Table::new(&["p", "computed", "closed_form", "abs_err"]),
        ..Default::default()
    };
    let mut points = Vec::new();
    for p in c.pmin..=c.pmax {
        match infsup_constant(p) {
            Ok(r) => {
                rep.table.push(vec![
                    p.to_string(),
                    num(r.computed),
                    num(r.closed_form),
                    num(r.abs_err()),
                ]);
                rep.check(r.abs_err() <= INFSUP_TOL, || {
                    format!("infsup p={p}: abs_err {:.3e}", r.abs_err())
                });
                points.push((p as f64, r.computed));
            }
            Err(Error::TrivialBubbleSpace) => {
                rep.table.push(vec![
                    p.to_string(),
                    "trivial space".into(),
                    num(infsup_closed_form(p)),
                    "-".into(),
                ]);
            }
            Err(e) => return Err(e),
        }
    }
    rep.plot.add("computed inf-sup constant", points);
    Ok(rep)
}

fn random_terms(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 4]> {
    (0..n)
        .map(|_| {
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.0..2.0 * PI),
            ]
        })
        .collect()
}

fn random_field(rng: &mut ChaCha8Rng) -> TrigField {
    TrigField {
        first: random_terms(rng, 2),
        second: random_terms(rng, 2),
    }
}

fn rel(a: &TensorPolynomial, b: &TensorPolynomial) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm().max(1e-300)
}

pub fn commute_check(c: Commute, seed: u64) -> Result<Report, Error> {
    let mut rep = Report {
        table: Table::new(&["check", "p", "case", "residual", "threshold"]),
        ..Default::default()
    };
    let mut field_rng = rng(seed, 0);
    let fields: Vec<TrigField> = (0..c.fields)
        .map(|_| random_field(&mut field_rng))
        .collect();
    let mut coeff_rng = rng(seed, 1);
    let options = InterpOptions {
        truncation: c.truncation,
        ..InterpOptions::default()
    };
    let quadratic = InterpOptions {
        blend: Blend::Quadratic,
        ..options
    };
    let mut worst = Vec::new();
    for p in c.pmin..=c.pmax {
        let m12 = DivInterpolator::new(p, DivNorm::TildeHm12, options)?;
        let l2 = DivInterpolator::new(p, DivNorm::L2, options)?;
        let quad = DivInterpolator::new(p, DivNorm::TildeHm12, quadratic)?;
        let proj = TildeHm12Projector::new(p - 1, c.truncation)?;
        let mut max_m12 = 0.0f64;
        let push = |rep: &mut Report, check: &str, case: String, r: f64, tol: f64| {
            rep.table.push(vec![
                check.into(),
                p.to_string(),
                case.clone(),
                num(r),
                num(tol),
            ]);
            rep.check(r <= tol, || {
                format!("{check} p={p} {case}: {r:.3e} > {tol:.0e}")
            });
        };
        for (i, u) in fields.iter().enumerate() {
            let div = |x: f64, y: f64| u.divergence(x, y);
            let a = m12.interpolate(u)?;
            let r = rel(&a.total.divergence(), &proj.project(div)?);
            max_m12 = max_m12.max(r);
            push(
                &mut rep,
                "commute_m12",
                format!("field{i}"),
                r,
                COMMUTE_M12_TOL,
            );
            let b = l2.interpolate(u)?.total.divergence();
            let r = rel(&b, &proj_l2_with_points(div, p - 1, 2 * p + 16));
            push(
                &mut rep,
                "commute_l2",
                format!("field{i}"),
                r,
                COMMUTE_L2_TOL,
            );
            let d = a
                .total
                .sub(&quad.interpolate(u)?.total)
                .max_abs_coefficient();
            push(&mut rep, "extension", format!("field{i}"), d, EXTENSION_TOL);
        }
        let v = rt_basis(p)?.iter().fold(RTFunction::zero(p)?, |acc, f| {
            acc.add(&f.scaled(coeff_rng.random_range(-1.0..1.0)))
        });
        let d = m12.interpolate(&v)?.total.sub(&v).max_abs_coefficient();
        push(
            &mut rep,
            "reproduction",
            "random_rt".into(),
            d,
            REPRODUCTION_TOL,
        );
        worst.push((p as f64, max_m12));
    }
    rep.plot.add("largest commuting-diagram residual", worst);
    Ok(rep)
}

pub fn interp_stability(c: Stability) -> Result<Report, Error> {
    let mut rep = Report {
        table: Table::new(&[
            "family",
            "p",
            "l2_norm",
            "div_norm",
            "total",
            "fitted_slope",
            "threshold",
        ]),
        ..Default::default()
    };
    let ps: Vec<usize> = (c.pmin..=c.pmax).collect();
    let xs: Vec<f64> = ps.iter().map(|&p| p as f64).collect();
    let options = InterpOptions {
        quadrature_points: Some(c.quadrature_points),
        ..InterpOptions::default()
    };
    let g = CornerGradient {
        delta: c.delta,
        alpha: c.alpha,
    };
    let h = CornerHarmonic { delta: c.delta };
    for (name, u) in [
        ("corner_gradient", &g as &dyn VectorField),
        ("corner_harmonic", &h),
    ] {
        let rows = stability_scan(u, &ps, options)?;
        let ys: Vec<f64> = rows.iter().map(|r| r.total).collect();
        let slope = loglog_slope(&xs, &ys);
        for r in &rows {
            rep.table.push(vec![
                name.into(),
                r.p.to_string(),
                num(r.l2_norm),
                num(r.div_norm),
                num(r.total),
                num(slope),
                num(SLOPE_TOL),
            ]);
        }
        rep.check(slope <= SLOPE_TOL, || {
            format!("{name}: slope {slope:.3} > {SLOPE_TOL}")
        });
        rep.plot.add(name, xs.iter().copied().zip(ys).collect());
    }
    Ok(rep)
}

pub const ORACLE_GRIDS: [usize; 3] = [16, 32, 64];

type Scalar2 = Box<dyn Fn(f64, f64) -> f64>;

/// Smooth test functions checked against the oracle, with the form they
/// belong to.
pub fn oracle_cases() -> Vec<(FracKind, &'static str, Scalar2)> {
    let sqrt2 = 2f64.sqrt();
    vec![
        (
            FracKind::Hm12K,
            "sine11",
            Box::new(|x: f64, y: f64| 2.0 * (PI * x).sin() * (PI * y).sin()),
        ),
        (
            FracKind::TildeH12K,
            "sine11",
            Box::new(|x: f64, y: f64| 2.0 * (PI * x).sin() * (PI * y).sin()),
        ),
        (FracKind::TildeHm12K, "one", Box::new(|_: f64, _: f64| 1.0)),
        (
            FracKind::TildeHm12K,
            "cosine10",
            Box::new(move |x: f64, _: f64| sqrt2 * (PI * x).cos()),
        ),
        (
            FracKind::TildeH12Edge,
            "edge_sine1",
            Box::new(move |s: f64, _: f64| sqrt2 * (PI * s).sin()),
        ),
    ]
}

fn spectral(kind: FracKind, f: &dyn Fn(f64, f64) -> f64, m: usize) -> Result<f64, Error> {
    if kind == FracKind::TildeH12Edge {
        let e = expand_edge(|s| f(s, 0.0), Edge::Bottom, m)?;
        FracWeightTable::new(kind, m).inner_edge(&e, &e)
    } else {
        let s = expand(f, kind.modes(), m)?;
        FracWeightTable::new(kind, m).inner(&s, &s)
    }
}

pub fn fracform_check(c: Fracform, seed: u64) -> Result<Report, Error> {
    let mut rep = Report {
        table: Table::new(&[
            "check",
            "kind",
            "mode",
            "m",
            "spectral",
            "oracle_n16",
            "oracle_n32",
            "oracle_n64",
            "rel_err",
            "threshold",
        ]),
        ..Default::default()
    };
    for (kind, mode, f) in oracle_cases() {
        let exact = spectral(kind, &f, c.truncation)?;
        let values = ORACLE_GRIDS
            .iter()
            .map(|&n| fd_oracle(kind, &f, &f, n))
            .collect::<Result<Vec<f64>, Error>>()?;
        let errs: Vec<f64> = values
            .iter()
            .map(|v| (v - exact).abs() / exact.abs())
            .collect();
        let mut row = vec![
            "oracle".into(),
            kind.name().into(),
            mode.into(),
            c.truncation.to_string(),
            num(exact),
        ];
        row.extend(values.iter().map(|v| num(*v)));
        row.push(num(errs[2]));
        row.push(num(ORACLE_TOL));
        rep.table.push(row);
        let label = format!("{} {mode}", kind.name());
        rep.check(errs[2] <= ORACLE_TOL, || {
            format!("oracle {label}: {:.3e} > {ORACLE_TOL}", errs[2])
        });
        let monotone = errs.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-8);
        rep.check(monotone, || {
            format!("oracle {label}: errors {errs:?} do not decrease")
        });
        rep.plot.add(
            label,
            ORACLE_GRIDS.iter().map(|&n| n as f64).zip(errs).collect(),
        );
    }
    let mut r = rng(seed, 2);
    let one = expand_polynomial(
        &TensorPolynomial::constant(1.0),
        ModeKind::Cosine,
        DEFAULT_TRUNCATION,
    )?;
    for i in 0..c.polynomials {
        let d = r.random_range(0..=c.max_degree);
        let coeffs: Vec<f64> = (0..(d + 1) * (d + 1))
            .map(|_| r.random_range(-1.0..1.0))
            .collect();
        let u = TensorPolynomial::new(d, d, coeffs)?;
        let s = expand_polynomial(&u, ModeKind::Cosine, DEFAULT_TRUNCATION)?;
        let lhs = ip_tilde_hm12_k(&s, &one)?;
        let err = (lhs - u.integral()).abs() / (1.0 + u.l2_norm());
        rep.table.push(vec![
            "mean_reduction".into(),
            FracKind::TildeHm12K.name().into(),
            format!("poly{i}_deg{d}"),
            DEFAULT_TRUNCATION.to_string(),
            num(lhs),
            "-".into(),
            "-".into(),
            "-".into(),
            num(err),
            num(MEAN_TOL),
        ]);
        rep.check(err <= MEAN_TOL, || {
            format!("mean reduction poly{i}: {err:.3e}")
        });
    }
    Ok(rep)
}

/// Charts used by `piola-check`: a warped bilinear chart and a planar
/// non-affine one.
pub fn piola_charts() -> Result<Vec<(&'static str, ChartMap)>, Error> {
    Ok(vec![
        (
            "warped",
            ChartMap::new([
                [0.1, 0.0, 0.2],
                [1.3, 0.2, 0.5],
                [1.1, 1.0, 0.9],
                [-0.1, 1.2, 0.6],
            ])?,
        ),
        (
            "planar",
            ChartMap::new([
                [0.0, 0.0, 0.0],
                [1.2, 0.1, 0.0],
                [1.05, 0.95, 0.0],
                [-0.1, 1.1, 0.0],
            ])?,
        ),
    ])
}

/// `DT G^{-1} grad phi`, the surface gradient of `phi` transported by the chart.
fn surface_gradient(chart: &ChartMap, phi: &TensorPolynomial, xi: [f64; 2]) -> Vec3 {
    let (d1, d2) = chart.jacobian(xi);
    let g = phi.eval_with_gradient(xi[0], xi[1]).1;
    let (g11, g12, g22) = (dot(d1, d1), dot(d1, d2), dot(d2, d2));
    let det = g11 * g22 - g12 * g12;
    let a = (g22 * g[0] - g12 * g[1]) / det;
    let b = (g11 * g[1] - g12 * g[0]) / det;
    add(scale(d1, a), scale(d2, b))
}

/// Length-weighted outward conormal at parameter `s` of a side.
fn conormal(chart: &ChartMap, e: Edge, s: f64) -> (Vec3, [f64; 2]) {
    let xi = e.point(s);
    let (d1, d2) = chart.jacobian(xi);
    let t = e.tangent();
    let tangent = add(scale(d1, t[0]), scale(d2, t[1]));
    (cross(tangent, chart.normal(xi)), xi)
}

pub fn piola_check(c: Piola, seed: u64) -> Result<Report, Error> {
    let mut rep = Report {
        table: Table::new(&[
            "check",
            "chart",
            "sample",
            "value",
            "reference",
            "abs_err",
            "threshold",
        ]),
        ..Default::default()
    };
    let mut r = rng(seed, 3);
    let p = c.degree;
    let rule = QuadratureRule::gauss(p + 8);
    let mut errors = Vec::new();
    for (name, chart) in piola_charts()? {
        for sample in 0..c.samples {
            let phi_c: Vec<f64> = (0..(p + 1) * (p + 1))
                .map(|_| r.random_range(-1.0..1.0))
                .collect();
            let phi = TensorPolynomial::new(p, p, phi_c)?;
            let q_c: Vec<f64> = (0..hpbem::refelem::rt_dim(p))
                .map(|_| r.random_range(-1.0..1.0))
                .collect();
            let q = RTFunction::from_vector(p, &q_c)?;
            let mut push = |rep: &mut Report, check: &str, value: f64, reference: f64| {
                let err = (value - reference).abs() / (1.0 + reference.abs());
                rep.table.push(vec![
                    check.into(),
                    name.into(),
                    sample.to_string(),
                    num(value),
                    num(reference),
                    num(err),
                    num(PIOLA_TOL),
                ]);
                rep.check(err <= PIOLA_TOL, || {
                    format!("{check} {name} sample {sample}: {err:.3e}")
                });
                errors.push(err);
            };
            let reference =
                rule.integrate_2d(|x, y| phi.eval(x, y) * VectorField::divergence(&q, x, y));
            let area = rule.integrate_2d(|x, y| {
                let xi = [x, y];
                dot(
                    surface_gradient(&chart, &phi, xi),
                    piola_push(&chart, &q, xi),
                ) * chart.area_element(xi)
            });
            let mut boundary = 0.0;
            for e in Edge::ALL {
                boundary += rule.integrate(|s| {
                    let (nu, xi) = conormal(&chart, e, s);
                    phi.eval(xi[0], xi[1]) * dot(piola_push(&chart, &q, xi), nu)
                });
                let flux = rule.integrate(|s| {
                    let (nu, xi) = conormal(&chart, e, s);
                    dot(piola_push(&chart, &q, xi), nu)
                });
                push(
                    &mut rep,
                    &format!("flux_{e:?}").to_lowercase(),
                    flux,
                    normal_trace(&q, e).integral(),
                );
            }
            push(&mut rep, "pairing_by_parts", boundary - area, reference);
            let direct = rule.integrate_2d(|x, y| {
                phi.eval(x, y) * piola_divergence(&chart, &q, [x, y]) * chart.area_element([x, y])
            });
            push(&mut rep, "pairing_direct", direct, reference);
        }
    }
    rep.plot.add(
        "relative defect per check",
        errors
            .iter()
            .enumerate()
            .map(|(i, e)| (i as f64, *e))
            .collect(),
    );
    Ok(rep)
}
