use crate::error::{Error, Result};

/// Uniform periodic grid: `n` points per axis on a box of side `box_length`,
/// in `dim` dimensions.
///
/// Wavevector components are integer multiples of `2*pi/box_length`; modes
/// with any axis frequency beyond `dealias_fraction * pi * n / box_length`
/// are discarded after nonlinear products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    box_length: f64,
    dealias_fraction: f64,
}

impl Grid {
    /// Build a grid; `n` must be a power of two with `n >= 8`, `dim` in 1..=3.
    pub fn new(dim: usize, n: usize, box_length: f64, dealias_fraction: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {box_length}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Grid { dim, n, box_length, dealias_fraction })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Total number of grid points / spectral modes.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavevector spacing `2*pi/L`.
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_length
    }

    /// Grid spacing `L/n`.
    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Volume of the box, `L^dim`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Volume of one cell, `(L/n)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Largest retained integer frequency per axis.
    pub fn max_retained_index(&self) -> i64 {
        (self.dealias_fraction * self.n as f64 / 2.0 + 1e-9).floor() as i64
    }

    /// Integer frequencies `(m_0, m_1, m_2)` of the linear mode index
    /// (unused axes report zero). The layout is row-major with the last
    /// axis fastest.
    #[inline]
    pub fn freq_index(&self, mut idx: usize) -> [i64; 3] {
        let n = self.n;
        let half = (n / 2) as i64;
        let mut m = [0i64; 3];
        for axis in (0..self.dim).rev() {
            let i = (idx % n) as i64;
            idx /= n;
            m[axis] = if i < half { i } else { i - n as i64 };
        }
        m
    }

    /// Wavevector of a mode index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let dk = self.dk();
        let m = self.freq_index(idx);
        [m[0] as f64 * dk, m[1] as f64 * dk, m[2] as f64 * dk]
    }

    /// Squared wavevector magnitude of a mode index.
    #[inline]
    pub fn k2(&self, idx: usize) -> f64 {
        let xi = self.wavevector(idx);
        xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
    }

    /// Whether a mode survives dealiasing (per-axis cube criterion).
    #[inline]
    pub fn retained(&self, idx: usize) -> bool {
        let kmax = self.max_retained_index();
        let m = self.freq_index(idx);
        (0..self.dim).all(|a| m[a].abs() <= kmax)
    }

    /// Smallest nonzero retained wavevector magnitude.
    pub fn k_min(&self) -> f64 {
        self.dk()
    }

    /// Largest retained wavevector magnitude (corner of the dealias cube).
    pub fn k_max(&self) -> f64 {
        self.dk() * self.max_retained_index() as f64 * (self.dim as f64).sqrt()
    }

    /// Physical coordinates of a grid point index.
    pub fn point(&self, mut idx: usize) -> [f64; 3] {
        let n = self.n;
        let dx = self.dx();
        let mut x = [0.0; 3];
        for axis in (0..self.dim).rev() {
            x[axis] = (idx % n) as f64 * dx;
            idx /= n;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        assert!(Grid::new(0, 64, 1.0, 1.0).is_err());
        assert!(Grid::new(4, 64, 1.0, 1.0).is_err());
        assert!(Grid::new(1, 48, 1.0, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0, 1.0).is_err());
        assert!(Grid::new(1, 64, -1.0, 1.0).is_err());
        assert!(Grid::new(1, 64, 1.0, 0.0).is_err());
        assert!(Grid::new(1, 64, 1.0, 1.5).is_err());
    }

    #[test]
    fn wavevectors_span_expected_range() {
        // unit spacing on [0, 2pi): integer frequencies -32..31
        let g = Grid::new(1, 64, 2.0 * std::f64::consts::PI, 1.0).unwrap();
        assert!((g.dk() - 1.0).abs() < 1e-15);
        let mut freqs: Vec<i64> = (0..64).map(|i| g.freq_index(i)[0]).collect();
        freqs.sort_unstable();
        assert_eq!(freqs.first(), Some(&-32));
        assert_eq!(freqs.last(), Some(&31));
        assert!((0..64).all(|i| g.retained(i)));
    }

    #[test]
    fn dealias_cutoff_two_thirds() {
        let g = Grid::new(2, 128, 2.0 * std::f64::consts::PI, 2.0 / 3.0).unwrap();
        assert_eq!(g.max_retained_index(), 42);
    }

    #[test]
    fn spacing_scales_with_box() {
        let g = Grid::new(3, 8, std::f64::consts::PI, 1.0).unwrap();
        assert!((g.dk() - 2.0).abs() < 1e-15);
    }
}
