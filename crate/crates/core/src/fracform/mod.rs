//! Fractional Sobolev inner products on the reference square and its edges.
//!
//! Each inner product is defined through a harmonic extension into the cube
//! `K x (0,1)` (or into `K` for edges). Separation of variables makes them
//! diagonal on the mode functions
//!
//! * sine: `s_m(x) = sqrt(2) sin(m pi x)`, `m >= 1`,
//! * cosine: `c_0 = 1`, `c_m(x) = sqrt(2) cos(m pi x)`, `m >= 1`,
//!
//! with weights depending on `lambda = pi sqrt(m^2 + n^2)`:
//!
//! | kind          | modes  | weight                                  |
//! |---------------|--------|-----------------------------------------|
//! | `TildeH12K`   | sine   | `lambda coth lambda`                    |
//! | `Hm12K`       | sine   | `tanh lambda / lambda`                  |
//! | `TildeHm12K`  | cosine | `1` at `(0,0)`, else `tanh lambda / lambda` |
//! | `TildeH12Edge`| sine   | `m pi coth(m pi)`                       |
//!
//! [`fd_oracle`] solves the extension problems directly with finite
//! differences.

mod oracle;
mod transform;

pub use oracle::fd_oracle;
pub use transform::{
    cosine_transform_matrix, expand, expand_edge, expand_polynomial, expand_with_points,
    sine_transform_matrix,
};

use crate::{Error, Result};
use std::f64::consts::PI;

/// Default number of modes per direction.
pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Sine,
    Cosine,
}

impl ModeKind {
    fn first(self) -> usize {
        match self {
            ModeKind::Sine => 1,
            ModeKind::Cosine => 0,
        }
    }

    /// Number of modes per direction at truncation `m`.
    pub fn count(self, m: usize) -> usize {
        match self {
            ModeKind::Sine => m,
            ModeKind::Cosine => m + 1,
        }
    }

    /// Value of mode `m` at `x`.
    pub fn eval(self, m: usize, x: f64) -> f64 {
        match (self, m) {
            (ModeKind::Cosine, 0) => 1.0,
            (ModeKind::Cosine, _) => 2f64.sqrt() * (m as f64 * PI * x).cos(),
            (ModeKind::Sine, _) => 2f64.sqrt() * (m as f64 * PI * x).sin(),
        }
    }
}

/// The four inner products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FracKind {
    TildeH12K,
    Hm12K,
    TildeHm12K,
    TildeH12Edge,
}

impl FracKind {
    pub const ALL: [FracKind; 4] = [
        FracKind::TildeH12K,
        FracKind::Hm12K,
        FracKind::TildeHm12K,
        FracKind::TildeH12Edge,
    ];

    pub fn modes(self) -> ModeKind {
        match self {
            FracKind::TildeHm12K => ModeKind::Cosine,
            _ => ModeKind::Sine,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FracKind::TildeH12K => "tildeH12_K",
            FracKind::Hm12K => "Hm12_K",
            FracKind::TildeHm12K => "tildeHm12_K",
            FracKind::TildeH12Edge => "tildeH12_edge",
        }
    }

    /// Diagonal weight of mode `(m, n)`; `n` is ignored for edges.
    pub fn weight(self, m: usize, n: usize) -> f64 {
        match self {
            FracKind::TildeH12K => {
                let l = lambda(m, n);
                l / l.tanh()
            }
            FracKind::Hm12K => {
                let l = lambda(m, n);
                l.tanh() / l
            }
            FracKind::TildeHm12K => {
                if m == 0 && n == 0 {
                    1.0
                } else {
                    let l = lambda(m, n);
                    l.tanh() / l
                }
            }
            FracKind::TildeH12Edge => {
                let l = m as f64 * PI;
                l / l.tanh()
            }
        }
    }
}

impl std::str::FromStr for FracKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FracKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Configuration(format!("unknown inner-product kind `{s}`")))
    }
}

fn lambda(m: usize, n: usize) -> f64 {
    PI * ((m * m + n * n) as f64).sqrt()
}

/// Truncated 2D sine or cosine expansion on `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    kind: ModeKind,
    truncation: usize,
    coefficients: Vec<f64>,
}

impl ModeSpectrum {
    pub fn new(kind: ModeKind, truncation: usize, coefficients: Vec<f64>) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::Configuration("truncation must be at least 1".into()));
        }
        let c = kind.count(truncation);
        if coefficients.len() != c * c {
            return Err(Error::KindMismatch(format!(
                "{} coefficients for {kind:?} truncation {truncation}",
                coefficients.len()
            )));
        }
        Ok(Self {
            kind,
            truncation,
            coefficients,
        })
    }

    pub fn zeros(kind: ModeKind, truncation: usize) -> Self {
        let c = kind.count(truncation);
        Self {
            kind,
            truncation,
            coefficients: vec![0.0; c * c],
        }
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn index(&self, m: usize, n: usize) -> usize {
        let f = self.kind.first();
        (m - f) * self.kind.count(self.truncation) + (n - f)
    }

    /// Coefficient of mode `(m, n)`.
    pub fn get(&self, m: usize, n: usize) -> f64 {
        let f = self.kind.first();
        if m < f || n < f || m > self.truncation || n > self.truncation {
            return 0.0;
        }
        self.coefficients[self.index(m, n)]
    }

    /// `(m, n, coefficient)` for every stored mode.
    pub fn modes(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let f = self.kind.first();
        let c = self.kind.count(self.truncation);
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i / c + f, i % c + f, v))
    }

    /// Sum of squared coefficients.
    pub fn parseval(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| s * c).collect(),
            ..self.clone()
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.kind != other.kind || self.truncation != other.truncation {
            return Err(Error::KindMismatch(format!(
                "{:?}/{} against {:?}/{}",
                self.kind, self.truncation, other.kind, other.truncation
            )));
        }
        Ok(())
    }
}

/// Truncated sine expansion `sum_m u_m sqrt(2) sin(m pi s)` on an edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeModeSpectrum {
    edge: crate::refelem::Edge,
    coefficients: Vec<f64>,
}

impl EdgeModeSpectrum {
    pub fn new(edge: crate::refelem::Edge, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Configuration("truncation must be at least 1".into()));
        }
        Ok(Self { edge, coefficients })
    }

    pub fn edge(&self) -> crate::refelem::Edge {
        self.edge
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len()
    }

    /// Coefficients of modes `1..=M`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn parseval(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * ModeKind::Sine.eval(i + 1, s))
            .sum()
    }
}

/// Diagonal weights of one inner product at one truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct FracWeightTable {
    kind: FracKind,
    truncation: usize,
    weights: Vec<f64>,
}

impl FracWeightTable {
    pub fn new(kind: FracKind, truncation: usize) -> Self {
        let weights = match kind {
            FracKind::TildeH12Edge => (1..=truncation).map(|m| kind.weight(m, 0)).collect(),
            _ => {
                let mk = kind.modes();
                let f = mk.first();
                let c = mk.count(truncation);
                (0..c * c)
                    .map(|i| kind.weight(i / c + f, i % c + f))
                    .collect()
            }
        };
        Self {
            kind,
            truncation,
            weights,
        }
    }

    pub fn kind(&self) -> FracKind {
        self.kind
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Weights in the storage order of the matching spectrum.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn pair(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a)
            .zip(b)
            .map(|((w, x), y)| w * x * y)
            .sum()
    }

    /// Inner product of two surface spectra.
    pub fn inner(&self, u: &ModeSpectrum, v: &ModeSpectrum) -> Result<f64> {
        if self.kind == FracKind::TildeH12Edge {
            return Err(Error::KindMismatch(
                "edge weights applied to a surface spectrum".into(),
            ));
        }
        u.check(v)?;
        if u.kind != self.kind.modes() || u.truncation != self.truncation {
            return Err(Error::KindMismatch(format!(
                "{} needs {:?} modes at truncation {}, got {:?}/{}",
                self.kind.name(),
                self.kind.modes(),
                self.truncation,
                u.kind,
                u.truncation
            )));
        }
        Ok(self.pair(&u.coefficients, &v.coefficients))
    }

    /// Inner product of two edge spectra.
    pub fn inner_edge(&self, u: &EdgeModeSpectrum, v: &EdgeModeSpectrum) -> Result<f64> {
        if self.kind != FracKind::TildeH12Edge {
            return Err(Error::KindMismatch(
                "surface weights applied to an edge spectrum".into(),
            ));
        }
        if u.truncation() != self.truncation || v.truncation() != self.truncation {
            return Err(Error::KindMismatch(
                "edge spectra of different truncation".into(),
            ));
        }
        Ok(self.pair(&u.coefficients, &v.coefficients))
    }
}

fn surface_ip(kind: FracKind, u: &ModeSpectrum, v: &ModeSpectrum) -> Result<f64> {
    FracWeightTable::new(kind, u.truncation).inner(u, v)
}

/// Inner product of tilde H^{1/2}(K) on sine spectra.
pub fn ip_tilde_h12_k(u: &ModeSpectrum, v: &ModeSpectrum) -> Result<f64> {
    surface_ip(FracKind::TildeH12K, u, v)
}

/// Inner product of H^{-1/2}(K) on sine spectra.
pub fn ip_hm12_k(u: &ModeSpectrum, v: &ModeSpectrum) -> Result<f64> {
    surface_ip(FracKind::Hm12K, u, v)
}

/// Inner product of tilde H^{-1/2}(K) on cosine spectra.
pub fn ip_tilde_hm12_k(u: &ModeSpectrum, v: &ModeSpectrum) -> Result<f64> {
    surface_ip(FracKind::TildeHm12K, u, v)
}

/// Inner product of tilde H^{1/2} on an edge.
pub fn ip_tilde_h12_edge(u: &EdgeModeSpectrum, v: &EdgeModeSpectrum) -> Result<f64> {
    FracWeightTable::new(FracKind::TildeH12Edge, u.truncation()).inner_edge(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_positive_and_monotone() {
        let m = 12;
        for kind in [FracKind::TildeH12K, FracKind::Hm12K, FracKind::TildeHm12K] {
            let f = kind.modes().first();
            for a in f..=m {
                for b in f..=m {
                    let w = kind.weight(a, b);
                    assert!(w > 0.0 && w.is_finite());
                    if a < m {
                        let next = kind.weight(a + 1, b);
                        match kind {
                            FracKind::TildeH12K => assert!(next > w),
                            _ => assert!(next < w),
                        }
                    }
                }
            }
        }
        assert_eq!(FracKind::TildeHm12K.weight(0, 0), 1.0);
        for m in 1..50 {
            assert!(FracKind::TildeH12Edge.weight(m + 1, 0) > FracKind::TildeH12Edge.weight(m, 0));
        }
    }

    #[test]
    fn dual_weights_multiply_to_one() {
        for m in 1..30 {
            for n in 1..30 {
                let p = FracKind::TildeH12K.weight(m, n) * FracKind::Hm12K.weight(m, n);
                assert!((p - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hm12_weights_below_one() {
        for m in 1..40 {
            for n in 1..40 {
                assert!(FracKind::Hm12K.weight(m, n) < 1.0);
            }
        }
    }

    #[test]
    fn closed_form_values() {
        let l = PI * 2f64.sqrt();
        assert!((FracKind::TildeH12K.weight(1, 1) - l / l.tanh()).abs() < 1e-14);
        assert!((FracKind::TildeH12K.weight(1, 1) - 4.44411).abs() < 1e-5);
        assert!((FracKind::Hm12K.weight(1, 1) - 0.22502).abs() < 1e-5);
        assert!((FracKind::TildeHm12K.weight(1, 0) - 0.31712).abs() < 1e-5);
        assert!((FracKind::TildeH12Edge.weight(1, 0) - 3.15334).abs() < 1e-5);
    }

    #[test]
    fn spectrum_indexing() {
        let mut c = vec![0.0; 9];
        c[5] = 2.0;
        let s = ModeSpectrum::new(ModeKind::Cosine, 2, c).unwrap();
        assert_eq!(s.get(1, 2), 2.0);
        assert_eq!(s.get(3, 0), 0.0);
        let modes: Vec<_> = s.modes().filter(|m| m.2 != 0.0).collect();
        assert_eq!(modes, vec![(1, 2, 2.0)]);
        let mut c = vec![0.0; 4];
        c[2] = 1.0;
        let s = ModeSpectrum::new(ModeKind::Sine, 2, c).unwrap();
        assert_eq!(s.get(2, 1), 1.0);
        assert!(ModeSpectrum::new(ModeKind::Sine, 2, vec![0.0; 9]).is_err());
    }

    #[test]
    fn kind_mismatch_rejected() {
        let a = ModeSpectrum::zeros(ModeKind::Sine, 4);
        let b = ModeSpectrum::zeros(ModeKind::Cosine, 4);
        assert!(matches!(
            ip_tilde_h12_k(&a, &b),
            Err(Error::KindMismatch(_))
        ));
        assert!(matches!(
            ip_tilde_hm12_k(&a, &a),
            Err(Error::KindMismatch(_))
        ));
        assert!(ip_hm12_k(&a, &ModeSpectrum::zeros(ModeKind::Sine, 5)).is_err());
        let e = EdgeModeSpectrum::new(crate::refelem::Edge::Bottom, vec![1.0; 3]).unwrap();
        let f = EdgeModeSpectrum::new(crate::refelem::Edge::Bottom, vec![1.0; 4]).unwrap();
        assert!(ip_tilde_h12_edge(&e, &f).is_err());
        assert!(FracWeightTable::new(FracKind::Hm12K, 3)
            .inner_edge(&e, &e)
            .is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in FracKind::ALL {
            assert_eq!(k.name().parse::<FracKind>().unwrap(), k);
        }
        assert!("bogus".parse::<FracKind>().is_err());
    }
}
