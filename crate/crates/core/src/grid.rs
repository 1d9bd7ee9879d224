//! Uniform radial mesh, channel constants and the quadratures used on them.
//!
//! The mesh excludes the origin: point `k` (zero based) sits at
//! `r = (k + 1) * step`. Every tabulated function in the crate lives on such a
//! mesh, and integrals implicitly include the segment `[0, step]` with the
//! integrand vanishing at the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of mesh points accepted by [`RadialGrid::new`].
pub const MIN_POINTS: usize = 100;

/// Default mesh step (fm).
pub const DEFAULT_STEP: f64 = 0.01;

/// Default outer radius (fm).
pub const DEFAULT_R_MAX: f64 = 35.0;

/// Uniform radial mesh `r_k = k * step`, `k = 1..=n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    step: f64,
    n_points: usize,
}

impl RadialGrid {
    /// Builds the mesh covering `(0, r_max]` with the given step. The last
    /// point is the largest multiple of `step` not exceeding `r_max`.
    pub fn new(step: f64, r_max: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidInput(format!("grid step must be positive, got {step}")));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidInput(format!("r_max must be positive, got {r_max}")));
        }
        // tolerate r_max / step landing a hair below an integer
        let n_points = (r_max / step + 1e-9).floor() as usize;
        Self::with_points(step, n_points)
    }

    pub fn with_points(step: f64, n_points: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidInput(format!("grid step must be positive, got {step}")));
        }
        if n_points < MIN_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_POINTS} points, got {n_points}"
            )));
        }
        Ok(Self { step, n_points })
    }

    #[inline]
    pub fn step(&self) -> f64 {
        self.step
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    #[inline]
    pub fn r_min(&self) -> f64 {
        self.step
    }

    #[inline]
    pub fn r_max(&self) -> f64 {
        self.r(self.n_points - 1)
    }

    /// Radius of the zero-based point `k`.
    #[inline]
    pub fn r(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.r(k))
    }

    /// Index of the grid point closest to `r`, clamped to the mesh.
    pub fn index_of(&self, r: f64) -> usize {
        let k = (r / self.step).round() as i64 - 1;
        k.clamp(0, self.n_points as i64 - 1) as usize
    }

    /// Same mesh extent with half the step.
    pub fn halved(&self) -> Self {
        Self {
            step: 0.5 * self.step,
            n_points: 2 * self.n_points,
        }
    }

    /// Trapezoidal integral of tabulated `f` over `[0, r_max]`, taking
    /// `f(0) = 0`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.n_points);
        let n = f.len();
        let interior: f64 = f[..n - 1].iter().sum();
        self.step * (interior + 0.5 * f[n - 1])
    }

    /// Composite Simpson integral over `[0, r_max]` with `f(0) = 0`. The
    /// mesh including the origin has `n_points + 1` nodes; an odd interval
    /// count is closed with a trapezoid on the last segment.
    pub fn integrate_simpson(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.n_points);
        let value = |j: usize| if j == 0 { 0.0 } else { f[j - 1] };
        let intervals = self.n_points;
        let even = intervals - intervals % 2;
        let mut acc = 0.0;
        for j in (0..even).step_by(2) {
            acc += value(j) + 4.0 * value(j + 1) + value(j + 2);
        }
        let mut total = acc * self.step / 3.0;
        if even < intervals {
            total += 0.5 * self.step * (value(even) + value(even + 1));
        }
        total
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::new(DEFAULT_STEP, DEFAULT_R_MAX).expect("default grid is valid")
    }
}

/// Kinematic constant of a two-body channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConstants {
    /// hbar^2 / 2mu in MeV fm^2.
    pub hbar2_over_2mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ChannelConstants {
    pub fn new(hbar2_over_2mu: f64) -> Result<Self> {
        if !(hbar2_over_2mu > 0.0) || !hbar2_over_2mu.is_finite() {
            return Err(Error::InvalidInput(format!(
                "hbar^2/2mu must be positive, got {hbar2_over_2mu}"
            )));
        }
        Ok(Self {
            hbar2_over_2mu,
            label: None,
        })
    }

    pub fn labelled(hbar2_over_2mu: f64, label: &str) -> Result<Self> {
        let mut c = Self::new(hbar2_over_2mu)?;
        c.label = Some(label.to_owned());
        Ok(c)
    }

    /// n-p channel.
    pub fn deuteron() -> Self {
        Self::labelled(41.47, "n-p").expect("valid constant")
    }

    /// n + 10Be channel.
    pub fn be11() -> Self {
        Self::labelled(22.81, "n-10Be").expect("valid constant")
    }

    /// alpha-alpha channel.
    pub fn alpha_alpha() -> Self {
        Self::labelled(10.375, "alpha-alpha").expect("valid constant")
    }

    /// hbar / sqrt(2 mu) in sqrt(MeV) fm.
    #[inline]
    pub fn hbar_over_sqrt_2mu(&self) -> f64 {
        self.hbar2_over_2mu.sqrt()
    }

    /// Wave number (fm^-1) for |E| in MeV.
    #[inline]
    pub fn wave_number(&self, energy: f64) -> f64 {
        (energy.abs() / self.hbar2_over_2mu).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_points_are_multiples_of_step() {
        let g = RadialGrid::new(0.01, 35.0).unwrap();
        assert_eq!(g.len(), 3500);
        assert_relative_eq!(g.r_min(), 0.01);
        assert_relative_eq!(g.r_max(), 35.0, epsilon = 1e-12);
        assert_relative_eq!(g.r(99), 1.0, epsilon = 1e-12);
        assert_eq!(g.index_of(1.0), 99);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(RadialGrid::new(0.0, 10.0).is_err());
        assert!(RadialGrid::new(0.1, 5.0).is_err());
        assert!(RadialGrid::new(-0.1, 35.0).is_err());
        assert!(ChannelConstants::new(0.0).is_err());
    }

    #[test]
    fn quadratures_integrate_polynomials() {
        let g = RadialGrid::new(0.01, 2.0).unwrap();
        let f: Vec<f64> = g.points().map(|r| r * r).collect();
        // int_0^2 r^2 = 8/3
        assert_relative_eq!(g.integrate(&f), 8.0 / 3.0, max_relative = 1e-4);
        assert_relative_eq!(g.integrate_simpson(&f), 8.0 / 3.0, max_relative = 1e-12);
        let odd = RadialGrid::with_points(0.01, 201).unwrap();
        let f: Vec<f64> = odd.points().collect();
        assert_relative_eq!(odd.integrate_simpson(&f), 0.5 * 2.01 * 2.01, max_relative = 1e-12);
    }

    #[test]
    fn halving_keeps_extent() {
        let g = RadialGrid::new(0.02, 10.0).unwrap();
        let h = g.halved();
        assert_relative_eq!(h.r_max(), g.r_max(), epsilon = 1e-12);
        assert_relative_eq!(h.step(), 0.01);
    }
}
