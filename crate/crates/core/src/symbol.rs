use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::C64;
use std::sync::Arc;

/// Fourier multipliers used by the solvers and norms.
///
/// Symbols that are singular at the origin (`LambdaPow` with negative
/// exponent, the Leray projector `Q`) send the zero mode to zero; homogeneous
/// operators act modulo constants.
#[derive(Clone)]
pub enum Symbol {
    /// `i * xi_axis` (partial derivative).
    DerivAxis(usize),
    /// `|xi|^2` (that is, `-Laplacian`).
    MinusLaplacian,
    /// `|xi|^alpha`; `Lambda = sqrt(-Laplacian)` is `LambdaPow(1.0)`.
    LambdaPow(f64),
    /// `xi xi^T / |xi|^2`, the gradient-part projector.
    LerayQ,
    /// `Id - xi xi^T / |xi|^2`, the divergence-free projector.
    LerayP,
    /// Scalar radial multiplier `f(|xi|)` given as a callable.
    Radial(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Symbol::DerivAxis(a) => write!(f, "DerivAxis({a})"),
            Symbol::MinusLaplacian => write!(f, "MinusLaplacian"),
            Symbol::LambdaPow(a) => write!(f, "LambdaPow({a})"),
            Symbol::LerayQ => write!(f, "LerayQ"),
            Symbol::LerayP => write!(f, "LerayP"),
            Symbol::Radial(_) => write!(f, "Radial(..)"),
        }
    }
}

/// Apply a symbol coefficient-wise.
pub fn apply_symbol(field: &SpectralField, symbol: &Symbol) -> Result<SpectralField> {
    match symbol {
        Symbol::DerivAxis(axis) => {
            let grid = *field.grid();
            if *axis >= grid.dim() {
                return Err(Error::InvalidParameter(format!(
                    "axis {axis} out of range for dim {}",
                    grid.dim()
                )));
            }
            Ok(field.derivative(*axis))
        }
        Symbol::MinusLaplacian => Ok(apply_radial(field, |k| k * k)),
        Symbol::LambdaPow(alpha) => {
            let a = *alpha;
            Ok(apply_radial(field, move |k| {
                if k == 0.0 {
                    // zero-mode convention for homogeneous operators
                    if a == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    k.powf(a)
                }
            }))
        }
        Symbol::LerayQ => field.leray_decompose().map(|(_, q)| q),
        Symbol::LerayP => field.leray_decompose().map(|(p, _)| p),
        Symbol::Radial(f) => Ok(apply_radial(field, |k| f(k))),
    }
}

fn apply_radial(field: &SpectralField, f: impl Fn(f64) -> f64) -> SpectralField {
    let grid = *field.grid();
    let len = grid.len();
    let mut out = field.clone();
    for c in 0..field.components() {
        for idx in 0..len {
            let k = grid.k2(idx).sqrt();
            *out.coeff_mut(c, idx) = field.coeff(c, idx) * C64::new(f(k), 0.0);
        }
    }
    out
}
