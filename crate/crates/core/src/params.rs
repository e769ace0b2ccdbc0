use std::fmt;

use crate::error::{Error, Result};

/// Model parameters of the preferential-attachment graph: `m` edges per new
/// vertex and attachment offset `delta > -m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    m: usize,
    delta: f64,
    gamma: f64,
}

impl Params {
    pub fn new(m: usize, delta: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be a positive integer".into()));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be finite, got {delta}")));
        }
        if delta <= -(m as f64) {
            return Err(Error::InvalidParameter(format!(
                "delta must exceed -m (m={m}, delta={delta})"
            )));
        }
        let gamma = m as f64 / (2.0 * m as f64 + delta);
        Ok(Self { m, delta, gamma })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `m / (2m + delta)`, always in (0, 1).
    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Power-law exponent of the degree distribution, `3 + delta/m`.
    pub fn degree_exponent(&self) -> f64 {
        3.0 + self.delta / self.m as f64
    }

    /// Critical seed size `t^(1-gamma)`.
    pub fn critical_seed(&self, t: usize) -> f64 {
        (t as f64).powf(1.0 - self.gamma)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} delta={} gamma={}", self.m, self.delta, self.gamma)
    }
}

/// Validating constructor, kept as a free function for callers that think in
/// terms of operations rather than types.
pub fn make_params(m: usize, delta: f64) -> Result<Params> {
    Params::new(m, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(make_params(2, 0.0).unwrap().gamma(), 0.5);
        assert!((make_params(2, -1.0).unwrap().gamma() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_boundary() {
        assert!(matches!(make_params(1, -1.0), Err(Error::InvalidParameter(_))));
        assert!(make_params(0, 0.0).is_err());
        assert!(make_params(2, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn gamma_in_unit_interval(m in 1usize..20, frac in -0.999f64..10.0) {
            let delta = frac * m as f64;
            let p = Params::new(m, delta).unwrap();
            prop_assert!(p.gamma() > 0.0 && p.gamma() < 1.0);
            prop_assert_eq!(delta < 0.0, p.gamma() > 0.5);
        }
    }
}
