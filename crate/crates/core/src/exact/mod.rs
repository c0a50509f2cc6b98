//! Brute-force evaluation of the hard-core and homomorphism partition functions.
//!
//! Everything here is deliberately simple enumeration; the series machinery
//! elsewhere in the crate is tested against it.

mod hardcore;
mod spin;

pub use hardcore::{IndPoly, MultivariateWeights};
pub(crate) use hardcore::independence_sum;
pub use spin::{Fields, OrientedEdgeMatrices, SpinMatrix};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for the enumerations. These are configuration, not constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    /// Largest vertex count accepted by the independent-set enumerations.
    pub max_vertices: usize,
    /// Largest number of colorings `q^{|V \ Lambda|}` a homomorphism sum may visit.
    pub max_colorings: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 40,
            max_colorings: 1 << 24,
        }
    }
}

/// Exact oracle with configurable limits. Cheap to copy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Oracle {
    pub limits: OracleLimits,
}

impl Oracle {
    pub fn new(limits: OracleLimits) -> Self {
        Oracle { limits }
    }
}

/// `|den| < 1e-12 (1 + |num|)` counts as a vanishing denominator.
pub fn near_zero_tolerance(numerator: Complex64) -> f64 {
    1e-12 * (1.0 + numerator.norm())
}

/// Divides, reporting a vanishing denominator with its modulus.
pub fn checked_ratio(num: Complex64, den: Complex64, at: Complex64) -> Result<Complex64> {
    if den.norm() < near_zero_tolerance(num) {
        Err(Error::NearZeroDenominator {
            modulus: den.norm(),
            at,
        })
    } else {
        Ok(num / den)
    }
}
