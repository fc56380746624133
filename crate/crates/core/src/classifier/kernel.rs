use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::FEATURE_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Linear,
    Polynomial,
    Rbf,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Linear => "linear",
            KernelKind::Polynomial => "poly",
            KernelKind::Rbf => "rbf",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(KernelKind::Linear),
            "poly" | "polynomial" => Ok(KernelKind::Polynomial),
            "rbf" => Ok(KernelKind::Rbf),
            other => Err(Error::InvalidParameter(format!("unknown kernel {other:?}"))),
        }
    }
}

/// Kernel and soft-margin parameters.
///
/// * linear: `<x, y>`
/// * polynomial: `(gamma * <x, y> + coef0)^degree`
/// * rbf: `exp(-gamma * |x - y|^2)`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub kind: KernelKind,
    pub degree: u32,
    pub gamma: f64,
    pub coef0: f64,
    pub c: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            kind: KernelKind::Polynomial,
            degree: 3,
            gamma: 1.0 / FEATURE_DIM as f64,
            coef0: 1.0,
            c: 1.0,
        }
    }
}

impl KernelParams {
    pub fn linear(c: f64) -> Self {
        KernelParams {
            kind: KernelKind::Linear,
            c,
            ..Default::default()
        }
    }

    pub fn polynomial(degree: u32, gamma: f64, coef0: f64, c: f64) -> Self {
        KernelParams {
            kind: KernelKind::Polynomial,
            degree,
            gamma,
            coef0,
            c,
        }
    }

    pub fn rbf(gamma: f64, c: f64) -> Self {
        KernelParams {
            kind: KernelKind::Rbf,
            gamma,
            c,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidParameter("degree must be >= 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter("gamma must be positive".into()));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter("C must be positive".into()));
        }
        if !self.coef0.is_finite() {
            return Err(Error::InvalidParameter("coef0 must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Linear => dot(x, y),
            KernelKind::Polynomial => (self.gamma * dot(x, y) + self.coef0).powi(self.degree as i32),
            KernelKind::Rbf => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-self.gamma * d2).exp()
            }
        }
    }
}

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        let (x, y) = ([1.0, 2.0], [3.0, -1.0]);
        assert_eq!(KernelParams::linear(1.0).eval(&x, &y), 1.0);
        assert_eq!(KernelParams::polynomial(2, 0.5, 1.0, 1.0).eval(&x, &y), 2.25);
        let k = KernelParams::rbf(0.1, 1.0).eval(&x, &y);
        assert!((k - (-1.3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(KernelParams::default().validate().is_ok());
        assert!(KernelParams::polynomial(0, 1.0, 0.0, 1.0).validate().is_err());
        assert!(KernelParams::rbf(0.0, 1.0).validate().is_err());
        assert!(KernelParams::linear(-1.0).validate().is_err());
    }

    #[test]
    fn kind_names() {
        for kind in [KernelKind::Linear, KernelKind::Polynomial, KernelKind::Rbf] {
            assert_eq!(kind.to_string().parse::<KernelKind>().unwrap(), kind);
        }
        assert!("sigmoid".parse::<KernelKind>().is_err());
    }
}
