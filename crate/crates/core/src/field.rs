use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;
use crate::C64;

/// A real periodic field stored as complex Fourier coefficients, possibly
/// vector-valued (`components >= 1`). Storage is component-major, with modes
/// in row-major order (last axis fastest).
///
/// Fields coming out of nonlinear products are dealiased, so coefficients
/// beyond the grid's dealias cube are exactly zero; conjugate symmetry holds
/// because every constructor starts from real physical samples (or preserves
/// it).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        assert!(components >= 1, "field needs at least one component");
        let coeffs = vec![C64::new(0.0, 0.0); components * grid.len()];
        SpectralField { grid, components, coeffs }
    }

    /// Build from raw coefficients (component-major).
    pub fn from_coeffs(grid: Grid, components: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != components * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "coefficient buffer has {} entries, expected {}",
                coeffs.len(),
                components * grid.len()
            )));
        }
        Ok(SpectralField { grid, components, coeffs })
    }

    /// Transform real physical samples (component-major) into a field.
    pub fn from_physical(grid: Grid, components: usize, values: &[f64]) -> Result<Self> {
        if values.len() != components * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "sample buffer has {} entries, expected {}",
                values.len(),
                components * grid.len()
            )));
        }
        let len = grid.len();
        let mut coeffs = vec![C64::new(0.0, 0.0); components * len];
        for c in 0..components {
            let slab = &mut coeffs[c * len..(c + 1) * len];
            for (slot, &v) in slab.iter_mut().zip(&values[c * len..(c + 1) * len]) {
                *slot = C64::new(v, 0.0);
            }
            fft::forward(slab, &grid);
        }
        Ok(SpectralField { grid, components, coeffs })
    }

    /// Evaluate a scalar function of the physical coordinates on the grid.
    pub fn from_fn(grid: Grid, components: usize, f: impl Fn(usize, [f64; 3]) -> f64) -> Self {
        let len = grid.len();
        let mut values = vec![0.0; components * len];
        for c in 0..components {
            for idx in 0..len {
                values[c * len + idx] = f(c, grid.point(idx));
            }
        }
        SpectralField::from_physical(grid, components, &values).expect("sized buffer")
    }

    pub fn grid(&self) -> &Grid {
        self.grid_ref()
    }

    #[inline]
    fn grid_ref(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    #[inline]
    pub fn coeff(&self, component: usize, idx: usize) -> C64 {
        self.coeffs[component * self.grid.len() + idx]
    }

    #[inline]
    pub fn coeff_mut(&mut self, component: usize, idx: usize) -> &mut C64 {
        let len = self.grid.len();
        &mut self.coeffs[component * len + idx]
    }

    pub fn component_slice(&self, component: usize) -> &[C64] {
        let len = self.grid.len();
        &self.coeffs[component * len..(component + 1) * len]
    }

    /// Extract one component as a scalar field.
    pub fn component_field(&self, component: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: 1,
            coeffs: self.component_slice(component).to_vec(),
        }
    }

    /// Stack scalar fields into one vector field.
    pub fn stack(parts: &[SpectralField]) -> Result<SpectralField> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty stack".into()))?;
        let grid = first.grid;
        let mut coeffs = Vec::with_capacity(parts.len() * grid.len());
        for p in parts {
            if p.grid != grid {
                return Err(Error::GridMismatch);
            }
            if p.components != 1 {
                return Err(Error::ComponentMismatch { expected: 1, got: p.components });
            }
            coeffs.extend_from_slice(&p.coeffs);
        }
        Ok(SpectralField { grid, components: parts.len(), coeffs })
    }

    /// Mean value (zero-mode coefficient) of a component.
    pub fn mean(&self, component: usize) -> f64 {
        self.coeff(component, 0).re
    }

    /// Real physical samples of all components (component-major).
    pub fn to_physical(&self) -> Vec<f64> {
        let len = self.grid.len();
        let mut out = vec![0.0; self.components * len];
        let mut work = vec![C64::new(0.0, 0.0); len];
        for c in 0..self.components {
            work.copy_from_slice(self.component_slice(c));
            fft::inverse(&mut work, &self.grid);
            for (slot, v) in out[c * len..(c + 1) * len].iter_mut().zip(&work) {
                *slot = v.re;
            }
        }
        out
    }

    /// Zero every coefficient outside the dealias cube. Idempotent.
    pub fn dealias(&mut self) {
        let len = self.grid.len();
        let grid = self.grid;
        for c in 0..self.components {
            let slab = &mut self.coeffs[c * len..(c + 1) * len];
            for (idx, v) in slab.iter_mut().enumerate() {
                if !grid.retained(idx) {
                    *v = C64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.coeffs.iter_mut() {
            *v *= factor;
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale(factor);
        self
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &SpectralField) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
        Ok(())
    }

    fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.components != other.components {
            return Err(Error::ComponentMismatch {
                expected: self.components,
                got: other.components,
            });
        }
        Ok(())
    }

    /// Parseval `L^2` norm over the box (all components).
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.volume() * sum).sqrt()
    }

    /// `L^p` norm of the pointwise Euclidean magnitude. `p = 2` is evaluated
    /// from coefficients (Parseval); `p = infinity` is the grid maximum;
    /// other `p` use collocation quadrature at the working resolution.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("L^p norm needs p >= 1, got {p}")));
        }
        if p == 2.0 {
            return Ok(self.l2_norm());
        }
        let len = self.grid.len();
        let phys = self.to_physical();
        let mag_sq = |idx: usize| -> f64 {
            (0..self.components).map(|c| phys[c * len + idx] * phys[c * len + idx]).sum()
        };
        if p.is_infinite() {
            let mut max = 0.0f64;
            for idx in 0..len {
                max = max.max(mag_sq(idx));
            }
            return Ok(max.sqrt());
        }
        let mut sum = 0.0;
        for idx in 0..len {
            sum += mag_sq(idx).powf(p / 2.0);
        }
        Ok((self.grid.cell_volume() * sum).powf(1.0 / p))
    }

    /// Largest magnitude among all coefficients; cheap NaN/blow-up probe.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Partial derivative along an axis (multiplier `i xi_axis`).
    pub fn derivative(&self, axis: usize) -> SpectralField {
        assert!(axis < self.grid.dim(), "axis {axis} out of range for dim {}", self.grid.dim());
        let len = self.grid.len();
        let mut out = self.clone();
        for c in 0..self.components {
            let slab = &mut out.coeffs[c * len..(c + 1) * len];
            for (idx, v) in slab.iter_mut().enumerate() {
                let xi = self.grid.wavevector(idx)[axis];
                *v *= C64::new(0.0, xi);
            }
        }
        out
    }

    /// Gradient of a scalar field as a `dim`-component field.
    pub fn gradient(&self) -> Result<SpectralField> {
        if self.components != 1 {
            return Err(Error::ComponentMismatch { expected: 1, got: self.components });
        }
        let parts: Vec<SpectralField> =
            (0..self.grid.dim()).map(|a| self.derivative(a)).collect();
        SpectralField::stack(&parts)
    }

    /// Divergence of a vector field (`components == dim`).
    pub fn divergence(&self) -> Result<SpectralField> {
        let dim = self.grid.dim();
        if self.components != dim {
            return Err(Error::ComponentMismatch { expected: dim, got: self.components });
        }
        let len = self.grid.len();
        let mut out = SpectralField::zeros(self.grid, 1);
        for idx in 0..len {
            let xi = self.grid.wavevector(idx);
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..dim {
                acc += C64::new(0.0, xi[a]) * self.coeff(a, idx);
            }
            out.coeffs[idx] = acc;
        }
        Ok(out)
    }

    /// Leray decomposition `u = Pu + Qu` with `div Pu = 0`, `Qu = grad(...)`.
    /// The zero mode stays entirely in the `P` part.
    pub fn leray_decompose(&self) -> Result<(SpectralField, SpectralField)> {
        let dim = self.grid.dim();
        if self.components != dim {
            return Err(Error::ComponentMismatch { expected: dim, got: self.components });
        }
        let len = self.grid.len();
        let mut p = self.clone();
        let mut q = SpectralField::zeros(self.grid, dim);
        for idx in 1..len {
            let xi = self.grid.wavevector(idx);
            let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if k2 == 0.0 {
                continue;
            }
            let mut dot = C64::new(0.0, 0.0);
            for a in 0..dim {
                dot += xi[a] * self.coeff(a, idx);
            }
            let t = dot / k2;
            for a in 0..dim {
                let qa = xi[a] * t;
                *q.coeff_mut(a, idx) = qa;
                *p.coeff_mut(a, idx) -= qa;
            }
        }
        Ok((p, q))
    }

    /// Pointwise physical product of two fields. Scalars multiply
    /// componentwise against any field; equal component counts multiply
    /// entrywise. The result is dealiased.
    pub fn pointwise_product(&self, other: &SpectralField) -> Result<SpectralField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let (scalar, vector) = if self.components == 1 {
            (self, other)
        } else if other.components == 1 {
            (other, self)
        } else if self.components == other.components {
            (self, other)
        } else {
            return Err(Error::ComponentMismatch {
                expected: self.components,
                got: other.components,
            });
        };
        let len = self.grid.len();
        let a = scalar.to_physical();
        let b = vector.to_physical();
        let m = vector.components;
        let mut values = vec![0.0; m * len];
        for c in 0..m {
            let ac = if scalar.components == 1 { 0 } else { c };
            for idx in 0..len {
                values[c * len + idx] = a[ac * len + idx] * b[c * len + idx];
            }
        }
        Ok(SpectralField::from_physical(self.grid, m, &values)?.dealiased())
    }
}

impl std::ops::Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs).expect("incompatible fields");
        out
    }
}

impl std::ops::Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs).expect("incompatible fields");
        out
    }
}
