// SPDX-License-Identifier: Apache-2.0

//! Closed-form target densities and differential equation residuals.
//!
//! The stochastic processes themselves are out of scope; only the time-t
//! slices of their densities enter as training targets. The two second
//! order differential equations come with a single boundary point carrying
//! a value and a derivative condition.

use crate::{Error, Real, Result};

/// Density of the Ornstein-Uhlenbeck process at time `t` started from a
/// point mass at `x_init`:
/// sqrt(nu / (pi (1 - e^{-2 nu t}) sigma^2)) exp{ -nu [x - mu - (x_init - mu) e^{-nu t}]^2 / ((1 - e^{-2 nu t}) sigma^2) }.
pub fn pdf_ou<T: Real>(x: T, t: T, mu: T, sigma: T, nu: T, x_init: T) -> T {
    let decay = (-nu * t).exp();
    let spread = (T::one() - (-T::of(2.0) * nu * t).exp()) * sigma * sigma;
    let mean = mu + (x_init - mu) * decay;
    let z = x - mean;
    (nu / (T::PI() * spread)).sqrt() * (-nu * z * z / spread).exp()
}

/// Density of geometric Brownian motion at time `t` (log-normal), `x > 0`:
/// exp{ -[ln(x / x_init) - (mu - sigma^2/2) t]^2 / (2 sigma^2 t) } / (sqrt(2 pi sigma^2 t) x).
pub fn pdf_gbm<T: Real>(x: T, t: T, mu: T, sigma: T, x_init: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let var = sigma * sigma * t;
    let z = (x / x_init).ln() - (mu - sigma * sigma / T::of(2.0)) * t;
    (-z * z / (T::of(2.0) * var)).exp() / ((T::of(2.0) * T::PI() * var).sqrt() * x)
}

/// Exponential density lambda e^{-lambda x} for x >= 0.
pub fn pdf_exponential<T: Real>(x: T, lambda: T) -> T {
    if x < T::zero() {
        return T::zero();
    }
    lambda * (-lambda * x).exp()
}

/// Bivariate normal density with means, standard deviations and correlation
/// coefficient rho.
#[allow(clippy::too_many_arguments)]
pub fn pdf_binormal<T: Real>(x: T, y: T, mu_x: T, mu_y: T, sigma_x: T, sigma_y: T, rho: T) -> T {
    let zx = (x - mu_x) / sigma_x;
    let zy = (y - mu_y) / sigma_y;
    let omr = T::one() - rho * rho;
    let expo = -(zx * zx + zy * zy - T::of(2.0) * rho * zx * zy) / (T::of(2.0) * omr);
    expo.exp() / (T::of(2.0) * T::PI() * omr.sqrt() * sigma_x * sigma_y)
}

/// Which differential equation a residual refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeKind {
    /// f'' + ((x - mu)/sigma^2) f' + f/sigma^2 = 0
    De1,
    /// f'' + ((2 sigma^2 - mu + ln x)/(sigma^2 x)) f' + f/(sigma^2 x^2) = 0
    De2,
}

impl DeKind {
    pub fn name(self) -> &'static str {
        match self {
            DeKind::De1 => "de1",
            DeKind::De2 => "de2",
        }
    }
}

/// Left-hand side of the chosen equation at the supplied function values.
pub fn de_residual<T: Real>(kind: DeKind, f: T, df: T, d2f: T, x: T, mu: T, sigma: T) -> Result<T> {
    let s2 = sigma * sigma;
    match kind {
        DeKind::De1 => Ok(d2f + (x - mu) / s2 * df + f / s2),
        DeKind::De2 => {
            if x <= T::zero() {
                return Err(Error::DomainViolation {
                    value: x.as_f64(),
                    upper: f64::INFINITY,
                });
            }
            Ok(d2f + (T::of(2.0) * s2 - mu + x.ln()) / (s2 * x) * df + f / (s2 * x * x))
        }
    }
}

/// Known analytic solution of the chosen equation.
pub fn de_analytic_solution<T: Real>(kind: DeKind, x: T, mu: T, sigma: T) -> T {
    let norm = (T::of(2.0) * T::PI() * sigma * sigma).sqrt();
    match kind {
        DeKind::De1 => {
            let u = (x - mu) / sigma;
            (-u * u / T::of(2.0)).exp() / norm
        }
        DeKind::De2 => {
            if x <= T::zero() {
                return T::zero();
            }
            let v = (x.ln() - mu) / sigma;
            (-v * v / T::of(2.0)).exp() / (norm * x)
        }
    }
}

/// First derivative of the analytic solution.
pub fn de_analytic_derivative<T: Real>(kind: DeKind, x: T, mu: T, sigma: T) -> T {
    let f = de_analytic_solution(kind, x, mu, sigma);
    match kind {
        DeKind::De1 => -(x - mu) / (sigma * sigma) * f,
        DeKind::De2 => {
            if x <= T::zero() {
                return T::zero();
            }
            let v = (x.ln() - mu) / sigma;
            -f * (v / sigma + T::one()) / x
        }
    }
}

/// Second derivative of the analytic solution.
pub fn de_analytic_second_derivative<T: Real>(kind: DeKind, x: T, mu: T, sigma: T) -> T {
    let f = de_analytic_solution(kind, x, mu, sigma);
    match kind {
        DeKind::De1 => {
            let u = (x - mu) / sigma;
            (u * u - T::one()) / (sigma * sigma) * f
        }
        DeKind::De2 => {
            if x <= T::zero() {
                return T::zero();
            }
            let vs = ((x.ln() - mu) / sigma) / sigma + T::one(); // v/sigma + 1
            f * (vs * vs + vs - T::one() / (sigma * sigma)) / (x * x)
        }
    }
}

/// Boundary point and conditions of a differential equation task.
#[derive(Clone, Copy, Debug)]
pub struct Boundary<T: Real> {
    pub point: T,
    pub value: T,
    pub derivative: T,
}

/// Boundary conditions stated with each equation: f(mu) = 1/sqrt(2 pi sigma^2)
/// with zero slope for the first, f(e^{mu - sigma^2}) = e^{sigma^2/2 - mu}/sqrt(2 pi sigma^2)
/// with zero slope for the second.
pub fn de_boundary<T: Real>(kind: DeKind, mu: T, sigma: T) -> Boundary<T> {
    let norm = (T::of(2.0) * T::PI() * sigma * sigma).sqrt();
    match kind {
        DeKind::De1 => Boundary {
            point: mu,
            value: T::one() / norm,
            derivative: T::zero(),
        },
        DeKind::De2 => Boundary {
            point: (mu - sigma * sigma).exp(),
            value: (sigma * sigma / T::of(2.0) - mu).exp() / norm,
            derivative: T::zero(),
        },
    }
}

/// A fully parameterized training target.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec<T: Real> {
    Ou {
        mu: T,
        sigma: T,
        nu: T,
        x_init: T,
        t: T,
    },
    Gbm {
        mu: T,
        sigma: T,
        x_init: T,
        t: T,
    },
    Exponential {
        lambda: T,
    },
    Binormal {
        mu_x: T,
        mu_y: T,
        sigma_x: T,
        sigma_y: T,
        rho: T,
    },
    De {
        kind: DeKind,
        mu: T,
        sigma: T,
    },
}

impl<T: Real> TargetSpec<T> {
    /// Validates the parameter domain (positivity and correlation range).
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| -> Result<()> {
            if v <= T::zero() {
                return Err(Error::InvalidTarget(format!("{name} must be positive")));
            }
            Ok(())
        };
        match self {
            TargetSpec::Ou { sigma, nu, t, .. } => {
                positive("sigma", *sigma)?;
                positive("nu", *nu)?;
                positive("t", *t)
            }
            TargetSpec::Gbm { sigma, t, x_init, .. } => {
                positive("sigma", *sigma)?;
                positive("t", *t)?;
                positive("x_init", *x_init)
            }
            TargetSpec::Exponential { lambda } => positive("lambda", *lambda),
            TargetSpec::Binormal {
                sigma_x,
                sigma_y,
                rho,
                ..
            } => {
                positive("sigma_x", *sigma_x)?;
                positive("sigma_y", *sigma_y)?;
                if rho.abs() >= T::one() {
                    return Err(Error::InvalidTarget(
                        "rho must lie strictly inside (-1, 1)".into(),
                    ));
                }
                Ok(())
            }
            TargetSpec::De { sigma, .. } => positive("sigma", *sigma),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TargetSpec::Ou { .. } => "ou",
            TargetSpec::Gbm { .. } => "gbm",
            TargetSpec::Exponential { .. } => "exponential",
            TargetSpec::Binormal { .. } => "binormal",
            TargetSpec::De { kind, .. } => kind.name(),
        }
    }

    pub fn is_bivariate(&self) -> bool {
        matches!(self, TargetSpec::Binormal { .. })
    }

    pub fn is_de(&self) -> bool {
        matches!(self, TargetSpec::De { .. })
    }

    /// Univariate density at `x`. The GBM target evaluates to zero at the
    /// grid point x = 0 (the density is stated for x > 0 only).
    pub fn density(&self, x: T) -> Result<T> {
        match *self {
            TargetSpec::Ou {
                mu,
                sigma,
                nu,
                x_init,
                t,
            } => Ok(pdf_ou(x, t, mu, sigma, nu, x_init)),
            TargetSpec::Gbm {
                mu,
                sigma,
                x_init,
                t,
            } => Ok(pdf_gbm(x, t, mu, sigma, x_init)),
            TargetSpec::Exponential { lambda } => Ok(pdf_exponential(x, lambda)),
            TargetSpec::De { kind, mu, sigma } => Ok(de_analytic_solution(kind, x, mu, sigma)),
            TargetSpec::Binormal { .. } => Err(Error::InvalidTarget(
                "binormal target is bivariate".into(),
            )),
        }
    }

    /// Bivariate density at `(x, y)`.
    pub fn density2(&self, x: T, y: T) -> Result<T> {
        match *self {
            TargetSpec::Binormal {
                mu_x,
                mu_y,
                sigma_x,
                sigma_y,
                rho,
            } => Ok(pdf_binormal(x, y, mu_x, mu_y, sigma_x, sigma_y, rho)),
            _ => Err(Error::InvalidTarget("target is univariate".into())),
        }
    }
}
