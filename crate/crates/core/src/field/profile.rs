//! One-dimensional radial profiles `f(z)` with derivatives up to second order.

use crate::error::{Error, Result};

/// `f(z)`, `f'(z)` and `f''(z)` at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// Shape of a radial field as a function of distance to its center.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `f(z) = exp(-z^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    /// `f(z) = -z`, i.e. minus the distance.
    LinearDecay,
    /// Natural cubic spline through tabulated samples.
    Tabulated(TabulatedProfile),
}

impl Profile {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian sigma must be positive, got {sigma}"
            )));
        }
        Ok(Profile::Gaussian { sigma })
    }

    /// Closed interval of abscissae where the profile is twice differentiable.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Profile::Gaussian { .. } | Profile::LinearDecay => (0.0, f64::INFINITY),
            Profile::Tabulated(table) => table.range(),
        }
    }

    /// Returns `None` outside [`Profile::domain`].
    pub fn eval(&self, z: f64) -> Option<ProfileValue> {
        let (lo, hi) = self.domain();
        if !(z >= lo && z <= hi) {
            return None;
        }
        Some(match self {
            Profile::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                let f = (-z * z / (2.0 * s2)).exp();
                ProfileValue {
                    f,
                    df: -z / s2 * f,
                    d2f: (z * z / (s2 * s2) - 1.0 / s2) * f,
                }
            }
            Profile::LinearDecay => ProfileValue {
                f: -z,
                df: -1.0,
                d2f: 0.0,
            },
            Profile::Tabulated(table) => table.eval(z),
        })
    }

    /// Inverse of a decreasing profile: the abscissa `z` with `f(z) = y`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let out_of_range = || Error::LevelOutOfRange { level: y };
        match self {
            Profile::Gaussian { sigma } => {
                if !(y > 0.0 && y <= 1.0) {
                    return Err(out_of_range());
                }
                Ok(sigma * (-2.0 * y.ln()).sqrt())
            }
            Profile::LinearDecay => {
                if y > 0.0 {
                    return Err(out_of_range());
                }
                Ok(-y)
            }
            Profile::Tabulated(table) => {
                let (mut lo, mut hi) = table.range();
                let (f_lo, f_hi) = (table.eval(lo).f, table.eval(hi).f);
                if !(y <= f_lo && y >= f_hi) {
                    return Err(out_of_range());
                }
                loop {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        return Ok(mid);
                    }
                    if table.eval(mid).f > y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
        }
    }
}

/// Natural cubic spline through `(z_i, f_i)`.
///
/// Values and first derivatives converge at `O(h^4)` / `O(h^3)` for smooth
/// data; second derivatives of the interpolant are only `O(h^2)` accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    z: Vec<f64>,
    f: Vec<f64>,
    /// Second derivatives of the spline at the knots.
    m: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(z: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if z.len() != f.len() || z.len() < 3 {
            return Err(Error::InvalidParameter(
                "tabulated profile needs at least 3 (z, f) pairs of equal length".into(),
            ));
        }
        if z.iter().chain(f.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "tabulated profile contains non-finite values".into(),
            ));
        }
        if z.windows(2).any(|w| w[1] <= w[0]) || z[0] < 0.0 {
            return Err(Error::InvalidParameter(
                "tabulated abscissae must be nonnegative and strictly increasing".into(),
            ));
        }
        let m = natural_spline_moments(&z, &f);
        Ok(Self { z, f, m })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.z[0], self.z[self.z.len() - 1])
    }

    fn eval(&self, z: f64) -> ProfileValue {
        let n = self.z.len();
        let i = self.z.partition_point(|&zi| zi <= z).clamp(1, n - 1) - 1;
        let h = self.z[i + 1] - self.z[i];
        let a = (self.z[i + 1] - z) / h;
        let b = (z - self.z[i]) / h;
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        let f = a * self.f[i]
            + b * self.f[i + 1]
            + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
        let df = (self.f[i + 1] - self.f[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * mi
            + (3.0 * b * b - 1.0) / 6.0 * h * mj;
        ProfileValue {
            f,
            df,
            d2f: a * mi + b * mj,
        }
    }
}

// Tridiagonal solve (Thomas algorithm) with zero end moments.
fn natural_spline_moments(z: &[f64], f: &[f64]) -> Vec<f64> {
    let n = z.len();
    let mut m = vec![0.0; n];
    let inner = n - 2;
    let mut diag = vec![0.0; inner];
    let mut upper = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for k in 0..inner {
        let i = k + 1;
        let h0 = z[i] - z[i - 1];
        let h1 = z[i + 1] - z[i];
        diag[k] = (h0 + h1) / 3.0;
        upper[k] = h1 / 6.0;
        rhs[k] = (f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0;
    }
    for k in 1..inner {
        let lower = (z[k + 1] - z[k]) / 6.0;
        let w = lower / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    for k in (0..inner).rev() {
        let next = if k + 1 < inner { m[k + 2] } else { 0.0 };
        m[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_inverse_round_trips() {
        let p = Profile::gaussian(2.0).unwrap();
        for &z in &[0.1, 1.0, 2.0, 5.0] {
            let y = p.eval(z).unwrap().f;
            assert!((p.inverse(y).unwrap() - z).abs() < 1e-12);
        }
        assert!(matches!(p.inverse(1.5), Err(Error::LevelOutOfRange { .. })));
        assert!(matches!(p.inverse(0.0), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn linear_inverse() {
        assert_eq!(Profile::LinearDecay.inverse(-3.0).unwrap(), 3.0);
        assert!(Profile::LinearDecay.inverse(0.5).is_err());
    }

    #[test]
    fn spline_reproduces_cubic_free_data_exactly_at_knots() {
        let z: Vec<f64> = (0..11).map(|i| 0.5 + 0.25 * i as f64).collect();
        let f: Vec<f64> = z.iter().map(|&z| (-z * z / 2.0).exp()).collect();
        let table = TabulatedProfile::new(z.clone(), f.clone()).unwrap();
        for (zi, fi) in z.iter().zip(&f) {
            assert!((table.eval(*zi).f - fi).abs() < 1e-14);
        }
        // Interior accuracy against the smooth function the table samples.
        let g = Profile::gaussian(1.0).unwrap();
        let mid = 1.6;
        let exact = g.eval(mid).unwrap();
        let approx = table.eval(mid);
        assert!((approx.f - exact.f).abs() < 1e-4);
        assert!((approx.df - exact.df).abs() < 1e-3);
        assert!((approx.d2f - exact.d2f).abs() < 2e-2);
    }

    #[test]
    fn tabulated_inverse_and_domain() {
        let z = vec![1.0, 2.0, 3.0, 4.0];
        let f = vec![4.0, 3.0, 2.0, 1.0];
        let p = Profile::Tabulated(TabulatedProfile::new(z, f).unwrap());
        assert!((p.inverse(2.5).unwrap() - 2.5).abs() < 1e-12);
        assert!(p.eval(0.5).is_none());
        assert!(p.inverse(5.0).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(TabulatedProfile::new(vec![1.0, 1.0, 2.0], vec![0.0; 3]).is_err());
        assert!(TabulatedProfile::new(vec![1.0, 2.0], vec![0.0; 2]).is_err());
    }
}
