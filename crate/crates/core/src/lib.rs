//! Numerical workbench for Zagier L-series, the prime geodesic theorem on the
//! modular surface, smoothing windows, spectral exponential sums and
//! Kloosterman sums.
//!
//! Every quantity that can be computed two independent ways is exposed both
//! ways so the results can be cross-checked.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod averages;
pub mod cache;
pub mod error;
pub mod geodesics;
pub mod kloosterman;
pub mod quad;
pub mod smoothing;
pub mod specfun;
pub mod spectral;
pub mod sum;
pub mod zagier;

pub use arith::{DiscriminantDecomposition, FactoredInteger};
pub use averages::{DensityParams, ScanRecord};
pub use error::{Error, Result};
pub use geodesics::{FormClassData, PsiMethod, PsiResult};
pub use kloosterman::KloostermanValue;
pub use smoothing::{BumpKind, BumpSpec, WindowParams};
pub use spectral::{EigenvalueTable, TestFunctionParams};
pub use zagier::{CoefficientTable, LMethod, ZagierLValue};

/// Double-precision complex number. Non-finite results are reported as errors
/// and never stored.
pub type ComplexValue = num_complex::Complex64;

pub(crate) fn finite(z: ComplexValue, what: &'static str) -> Result<ComplexValue> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}
