use hpbem::fracform::{expand, expand_edge, fd_oracle, FracKind, FracWeightTable};
use hpbem::refelem::Edge;
use std::f64::consts::PI;

fn spectral(kind: FracKind, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let m = 32;
    if kind == FracKind::TildeH12Edge {
        let e = expand_edge(|s| f(s, 0.0), Edge::Bottom, m).unwrap();
        FracWeightTable::new(kind, m).inner_edge(&e, &e).unwrap()
    } else {
        let s = expand(f, kind.modes(), m).unwrap();
        FracWeightTable::new(kind, m).inner(&s, &s).unwrap()
    }
}

#[test]
fn oracle_converges_to_spectral_values() {
    let sine11 = |x: f64, y: f64| 2.0 * (PI * x).sin() * (PI * y).sin();
    let cos10 = |x: f64, _: f64| 2f64.sqrt() * (PI * x).cos();
    let one = |_: f64, _: f64| 1.0;
    let edge1 = |s: f64, _: f64| 2f64.sqrt() * (PI * s).sin();
    let cases: Vec<(FracKind, &dyn Fn(f64, f64) -> f64)> = vec![
        (FracKind::Hm12K, &sine11),
        (FracKind::TildeH12K, &sine11),
        (FracKind::TildeHm12K, &one),
        (FracKind::TildeHm12K, &cos10),
        (FracKind::TildeH12Edge, &edge1),
    ];
    for (kind, f) in cases {
        let exact = spectral(kind, f);
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| (fd_oracle(kind, f, f, n).unwrap() - exact).abs() / exact)
            .collect();
        eprintln!("{} {exact} {errs:?}", kind.name());
        assert!(errs[2] <= 0.05);
        for w in errs.windows(2) {
            assert!(w[1] < w[0] || w[1] < 1e-8);
        }
    }
}
