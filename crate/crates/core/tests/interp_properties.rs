use hpbem::interp::fields::{CornerGradient, CornerHarmonic, TrigField, TrigScalar};
use hpbem::interp::*;
use hpbem::refelem::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

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

#[test]
fn commuting_diagrams_on_random_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let fields: Vec<TrigField> = (0..20).map(|_| random_field(&mut rng)).collect();
    for p in 1..=6 {
        let m12 = DivInterpolator::new(p, DivNorm::TildeHm12, InterpOptions::default()).unwrap();
        let l2 = DivInterpolator::new(p, DivNorm::L2, InterpOptions::default()).unwrap();
        let proj = TildeHm12Projector::new(p - 1, 64).unwrap();
        for u in &fields {
            let div = |x: f64, y: f64| u.divergence(x, y);
            let a = m12.interpolate(u).unwrap().total.divergence();
            assert!(rel(&a, &proj.project(div).unwrap()) <= 1e-8, "m12 p={p}");
            let b = l2.interpolate(u).unwrap().total.divergence();
            let want = proj_l2_with_points(div, p - 1, 2 * p + 16);
            assert!(rel(&b, &want) <= 1e-9, "l2 p={p}");
        }
    }
}

#[test]
fn fluxes_and_discrete_curl_freeness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in 1..=6 {
        let it = DivInterpolator::new(p, DivNorm::TildeHm12, InterpOptions::default()).unwrap();
        let u = random_field(&mut rng);
        let r = it.interpolate(&u).unwrap();
        let rule = QuadratureRule::gauss(40);
        for e in Edge::ALL {
            let n = e.normal();
            let flux = rule.integrate(|s| {
                let x = e.point(s);
                let v = u.value(x[0], x[1]);
                let w = r.u1.eval(x[0], x[1]);
                (v[0] - w[0]) * n[0] + (v[1] - w[1]) * n[1]
            });
            assert!(flux.abs() <= 1e-10);
        }
        let up = rt_projection(&u, p, 40);
        for phi in scalar_bubble_basis(p) {
            let c = scalar_curl(&phi);
            assert!(r.total.sub(&up).dot(&c).abs() <= 1e-10);
        }
    }
}

#[test]
fn polynomial_reproduction_and_extension_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for p in 1..=6 {
        let basis = rt_basis(p).unwrap();
        let v = basis.iter().fold(RTFunction::zero(p).unwrap(), |acc, f| {
            acc.add(&f.scaled(rng.random_range(-1.0..1.0)))
        });
        let lin = DivInterpolator::new(p, DivNorm::TildeHm12, InterpOptions::default()).unwrap();
        assert!(
            lin.interpolate(&v)
                .unwrap()
                .total
                .sub(&v)
                .max_abs_coefficient()
                <= 1e-10
        );
        let quad = DivInterpolator::new(
            p,
            DivNorm::TildeHm12,
            InterpOptions {
                blend: Blend::Quadratic,
                ..InterpOptions::default()
            },
        )
        .unwrap();
        let u = random_field(&mut rng);
        let a = lin.interpolate(&u).unwrap().total;
        let b = quad.interpolate(&u).unwrap().total;
        assert!(a.sub(&b).max_abs_coefficient() <= 1e-9);
    }
}

#[test]
fn idempotency_of_scalar_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in 1..=6 {
        let c: Vec<f64> = (0..(p + 1) * (p + 1))
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let q = TensorPolynomial::new(p, p, c).unwrap();
        assert!(
            proj_l2(|x, y| q.eval(x, y), p)
                .sub(&q)
                .max_abs_coefficient()
                <= 1e-10
        );
        assert!(
            proj_tilde_hm12(|x, y| q.eval(x, y), p)
                .unwrap()
                .sub(&q)
                .max_abs_coefficient()
                <= 1e-10
        );
        assert!(
            interp_h1(&q, p, InterpOptions::default())
                .unwrap()
                .sub(&q)
                .max_abs_coefficient()
                <= 1e-10
        );
    }
}

#[test]
fn left_square_on_random_potentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in 1..=6 {
        let f = TrigScalar {
            terms: random_terms(&mut rng, 3),
        };
        let a = interp_div_l2(&Curl(&f), p).unwrap().total;
        let b = scalar_curl(&interp_h1(&f, p, InterpOptions::default()).unwrap()).raised(p);
        assert!(a.sub(&b).l2_norm() <= 1e-9 * b.l2_norm());
    }
}

#[test]
fn worked_examples() {
    let u = hpbem::interp::FnVector {
        value: |x: f64, _| [x.powi(3), 0.0],
        divergence: |x: f64, _| 3.0 * x * x,
    };
    let d = interp_div_l2(&u, 2).unwrap().total.divergence();
    let want = proj_l2(|x, _| 3.0 * x * x, 1);
    assert!(d.sub(&want).max_abs_coefficient() < 1e-12);

    let bub = TensorPolynomial::project(4, 4, 6, |x, y| x * y * (1.0 - x) * (1.0 - y));
    let c = scalar_curl(&bub);
    let d = interp_div_l2(&c, 3).unwrap().total.divergence();
    assert!(d.max_abs_coefficient() < 1e-12);

    let s = hpbem::interp::FnVector {
        value: |x: f64, y: f64| [(PI * x).sin() * (PI * y).sin(), 0.0],
        divergence: |x: f64, y: f64| PI * (PI * x).cos() * (PI * y).sin(),
    };
    let d = interp_div_m12(&s, 4).unwrap().total.divergence();
    let want = proj_tilde_hm12(|x, y| PI * (PI * x).cos() * (PI * y).sin(), 3).unwrap();
    assert!(d.sub(&want).max_abs_coefficient() < 1e-8);
}

#[test]
fn l2_stability_factor_on_curl_free_bubbles() {
    // u = grad(cos(a pi x) cos(b pi y)) has zero normal trace and no curl
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)] {
        let u = hpbem::interp::FnVector {
            value: move |x: f64, y: f64| {
                [
                    -a * PI * (a * PI * x).sin() * (b * PI * y).cos(),
                    -b * PI * (a * PI * x).cos() * (b * PI * y).sin(),
                ]
            },
            divergence: move |x: f64, y: f64| {
                -(a * a + b * b) * PI * PI * (a * PI * x).cos() * (b * PI * y).cos()
            },
        };
        for p in 2..=6 {
            let r = interp_div_l2(&u, p).unwrap().total;
            let up = rt_projection(&u, p, 60);
            let bub = rt_bubble_basis(p).unwrap();
            let g = DMatrix::from_fn(bub.len(), bub.len(), |i, j| bub[i].dot(&bub[j]));
            let rhs = DVector::from_fn(bub.len(), |i, _| bub[i].dot(&up));
            let c = g.cholesky().unwrap().solve(&rhs);
            let best_fit = bub
                .iter()
                .zip(c.iter())
                .fold(RTFunction::zero(p).unwrap(), |acc, (f, w)| {
                    acc.add(&f.scaled(*w))
                });
            let rule = QuadratureRule::gauss(60);
            let err = |w: &RTFunction| {
                rule.integrate_2d(|x, y| {
                    let (v, z) = (u.value(x, y), w.eval(x, y));
                    (v[0] - z[0]).powi(2) + (v[1] - z[1]).powi(2)
                })
                .sqrt()
            };
            let (e, best) = (err(&r), err(&best_fit));
            assert!(e <= 5.0 * (p as f64).sqrt() * best, "p={p} {e} {best}");
        }
    }
}

#[test]
fn inverse_inequality_growth() {
    let ps: Vec<usize> = (2..=10).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let sup: Vec<f64> = ps
        .iter()
        .map(|&p| {
            let pr = TildeHm12Projector::new(p, 64).unwrap();
            let min = pr.gram().clone().symmetric_eigenvalues().min();
            let sampled = (0..50)
                .map(|_| {
                    let c: Vec<f64> = (0..(p + 1) * (p + 1))
                        .map(|_| rng.random_range(-1.0..1.0))
                        .collect();
                    let v = TensorPolynomial::new(p, p, c).unwrap();
                    v.l2_norm() / pr.norm(&v)
                })
                .fold(0.0f64, f64::max);
            let s = (1.0 / min).sqrt();
            assert!(sampled <= s * (1.0 + 1e-12));
            s
        })
        .collect();
    let xs: Vec<f64> = ps.iter().map(|&p| p as f64).collect();
    let slope = loglog_slope(&xs, &sup);
    assert!(slope <= 1.3, "{slope}");
}

#[test]
fn stability_scan_on_corner_fields() {
    let ps: Vec<usize> = (2..=10).collect();
    let xs: Vec<f64> = ps.iter().map(|&p| p as f64).collect();
    let opts = InterpOptions {
        quadrature_points: Some(64),
        ..InterpOptions::default()
    };
    let g = CornerGradient {
        delta: 0.05,
        alpha: 2.0 / 3.0,
    };
    let h = CornerHarmonic { delta: 0.05 };
    for u in [&g as &dyn VectorField, &h] {
        let rows = stability_scan(u, &ps, opts).unwrap();
        let ys: Vec<f64> = rows.iter().map(|r| r.total).collect();
        assert!(loglog_slope(&xs, &ys) <= 0.3);
    }
}
