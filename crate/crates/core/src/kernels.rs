//! Compactly supported radial weight functions.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A radial weight `omega(r)` that vanishes for `r >= support_radius()`.
///
/// Implementations must be non-negative. Shepard weights only ever evaluate
/// the kernel at distances strictly inside the support.
pub trait RadialKernel: Send + Sync {
    fn weight(&self, r: f64) -> f64;
    fn support_radius(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// C2 Wendland function, `(1 - er)^4_+ (4er + 1)`.
    #[serde(rename = "w2")]
    WendlandC2,
    /// C4 Wendland function, `(1 - er)^6_+ (35(er)^2 + 18er + 3)`.
    #[serde(rename = "w4")]
    WendlandC4,
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::WendlandC2 => "w2",
            KernelFamily::WendlandC4 => "w4",
        })
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "w2" => Ok(KernelFamily::WendlandC2),
            "w4" => Ok(KernelFamily::WendlandC4),
            other => Err(Error::invalid(format!("unknown kernel `{other}` (expected w2 or w4)"))),
        }
    }
}

/// Wendland kernel with shape parameter `eps_shape` applied to the Euclidean
/// distance; the support radius is `1 / eps_shape`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightKernel {
    family: KernelFamily,
    eps_shape: f64,
}

impl WeightKernel {
    pub fn new(family: KernelFamily, eps_shape: f64) -> Result<Self> {
        if !(eps_shape.is_finite() && eps_shape > 0.0) {
            return Err(Error::invalid(format!("shape parameter must be positive, got {eps_shape}")));
        }
        Ok(WeightKernel { family, eps_shape })
    }

    /// Kernel using [`shape_parameter_for_level`].
    pub fn for_level(family: KernelFamily, level: u32) -> Result<Self> {
        Self::new(family, shape_parameter_for_level(level)?)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn eps_shape(&self) -> f64 {
        self.eps_shape
    }

    /// Kernel value with the same validation as the free functions.
    pub fn eval(&self, r: f64) -> Result<f64> {
        match self.family {
            KernelFamily::WendlandC2 => wendland_c2(r, self.eps_shape),
            KernelFamily::WendlandC4 => wendland_c4(r, self.eps_shape),
        }
    }
}

impl RadialKernel for WeightKernel {
    #[inline]
    fn weight(&self, r: f64) -> f64 {
        let s = self.eps_shape * r;
        match self.family {
            KernelFamily::WendlandC2 => c2_profile(s),
            KernelFamily::WendlandC4 => c4_profile(s),
        }
    }

    fn support_radius(&self) -> f64 {
        1.0 / self.eps_shape
    }
}

#[inline]
fn c2_profile(s: f64) -> f64 {
    if s >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - s;
    let u2 = u * u;
    u2 * u2 * (4.0 * s + 1.0)
}

#[inline]
fn c4_profile(s: f64) -> f64 {
    if s >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - s;
    let u3 = u * u * u;
    u3 * u3 * (35.0 * s * s + 18.0 * s + 3.0)
}

fn check_args(r: f64, eps_shape: f64) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::invalid(format!("kernel distance must be non-negative, got {r}")));
    }
    if !(eps_shape.is_finite() && eps_shape > 0.0) {
        return Err(Error::invalid(format!("shape parameter must be positive, got {eps_shape}")));
    }
    Ok(())
}

/// `(1 - eps r)^4_+ (4 eps r + 1)`.
pub fn wendland_c2(r: f64, eps_shape: f64) -> Result<f64> {
    check_args(r, eps_shape)?;
    Ok(c2_profile(eps_shape * r))
}

/// `(1 - eps r)^6_+ (35 (eps r)^2 + 18 eps r + 3)`.
pub fn wendland_c4(r: f64, eps_shape: f64) -> Result<f64> {
    check_args(r, eps_shape)?;
    Ok(c4_profile(eps_shape * r))
}

/// Level-dependent shape parameter `floor((2^l + 1) / 2) / sqrt(2)`.
pub fn shape_parameter_for_level(level: u32) -> Result<f64> {
    if level < 1 {
        return Err(Error::invalid("level must be at least 1"));
    }
    if level > 52 {
        return Err(Error::invalid("level above 52 is not representable"));
    }
    let n = (1u64 << level) + 1;
    Ok((n / 2) as f64 / SQRT_2)
}

/// Any radial function with a declared support radius.
pub struct CustomKernel<F> {
    profile: F,
    support: f64,
}

impl<F: Fn(f64) -> f64 + Send + Sync> CustomKernel<F> {
    /// `profile` is evaluated only for `0 <= r < support`.
    pub fn new(profile: F, support: f64) -> Result<Self> {
        if !(support.is_finite() && support > 0.0) {
            return Err(Error::invalid("support radius must be positive"));
        }
        Ok(CustomKernel { profile, support })
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> RadialKernel for CustomKernel<F> {
    fn weight(&self, r: f64) -> f64 {
        if r >= self.support {
            0.0
        } else {
            (self.profile)(r).max(0.0)
        }
    }

    fn support_radius(&self) -> f64 {
        self.support
    }
}
