//! Radial potential families.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{ChannelConstants, RadialGrid};

/// A local radial potential in MeV.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `-V0 sech^2(beta r)` with `V0 = (hbar^2/2mu) A (A + 1) beta^2`.
    SechSquared {
        a_tilde: f64,
        beta: f64,
        hbar2_over_2mu: f64,
    },
    /// `-U0 exp(-alpha r^2)`.
    Gaussian { depth: f64, alpha: f64 },
    Tabulated(TabulatedPotential),
}

/// Potential values on a mesh plus the strength of its `1/r^2` origin law.
///
/// Near the origin `V(r) -> c (hbar^2/2mu) / r^2` with
/// `c = singular_coefficient = l(l+1)` for an effective `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    grid: RadialGrid,
    values: Vec<f64>,
    singular_coefficient: f64,
    hbar2_over_2mu: f64,
}

/// Compact, serializable description of a potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialDescriptor {
    SechSquared { a_tilde: f64, beta: f64, depth_mev: f64 },
    Gaussian { depth_mev: f64, alpha: f64 },
    Tabulated { singular_coefficient: f64, step_fm: f64, r_max_fm: f64 },
}

impl Potential {
    /// Validated sech^2 well.
    pub fn sech_squared(a_tilde: f64, beta: f64, channel: &ChannelConstants) -> Result<Self> {
        if !(a_tilde > 1.0) {
            return Err(Error::InvalidInput(format!(
                "sech^2 well needs A_tilde > 1 to bind, got {a_tilde}"
            )));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
        }
        Ok(Potential::SechSquared {
            a_tilde,
            beta,
            hbar2_over_2mu: channel.hbar2_over_2mu,
        })
    }

    pub fn gaussian(depth: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !depth.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gaussian needs finite depth and alpha > 0, got U0 = {depth}, alpha = {alpha}"
            )));
        }
        Ok(Potential::Gaussian { depth, alpha })
    }

    /// Potential at radius `r` (fm).
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
        }
        Ok(match self {
            Potential::SechSquared {
                a_tilde,
                beta,
                hbar2_over_2mu,
            } => {
                let depth = hbar2_over_2mu * a_tilde * (a_tilde + 1.0) * beta * beta;
                let x = beta * r;
                // sech^2 underflows gracefully instead of overflowing cosh
                let s = if x > 350.0 { 0.0 } else { 1.0 / x.cosh() };
                -depth * s * s
            }
            Potential::Gaussian { depth, alpha } => -depth * (-alpha * r * r).exp(),
            Potential::Tabulated(t) => t.evaluate(r),
        })
    }

    /// Values at every mesh point.
    pub fn sample(&self, grid: &RadialGrid) -> Vec<f64> {
        if let Potential::Tabulated(t) = self {
            if t.grid == *grid {
                return t.values.clone();
            }
            return grid.points().map(|r| t.evaluate(r)).collect();
        }
        grid.points()
            .map(|r| self.evaluate(r).expect("mesh radii are positive"))
            .collect()
    }

    /// Coefficient `c` of the `c (hbar^2/2mu) / r^2` origin law.
    pub fn singular_coefficient(&self) -> f64 {
        match self {
            Potential::Tabulated(t) => t.singular_coefficient,
            _ => 0.0,
        }
    }

    /// Exponent `p` of the regular solution `u ~ r^p`, `p = l + 1` with
    /// `l(l+1) = c`.
    pub fn origin_power(&self) -> f64 {
        origin_power_for(self.singular_coefficient())
    }

    /// Magnitude of the well minimum, used for default energy brackets.
    pub fn depth(&self, grid: &RadialGrid) -> f64 {
        match self {
            Potential::SechSquared {
                a_tilde,
                beta,
                hbar2_over_2mu,
            } => hbar2_over_2mu * a_tilde * (a_tilde + 1.0) * beta * beta,
            Potential::Gaussian { depth, .. } => depth.abs(),
            Potential::Tabulated(_) => {
                let min = self.sample(grid).into_iter().fold(0.0_f64, f64::min);
                -min
            }
        }
    }

    pub fn descriptor(&self) -> PotentialDescriptor {
        match self {
            Potential::SechSquared {
                a_tilde,
                beta,
                hbar2_over_2mu,
            } => PotentialDescriptor::SechSquared {
                a_tilde: *a_tilde,
                beta: *beta,
                depth_mev: hbar2_over_2mu * a_tilde * (a_tilde + 1.0) * beta * beta,
            },
            Potential::Gaussian { depth, alpha } => PotentialDescriptor::Gaussian {
                depth_mev: *depth,
                alpha: *alpha,
            },
            Potential::Tabulated(t) => PotentialDescriptor::Tabulated {
                singular_coefficient: t.singular_coefficient,
                step_fm: t.grid.step(),
                r_max_fm: t.grid.r_max(),
            },
        }
    }

    /// Writes `r_fm,V_MeV` rows on `grid`.
    pub fn write_csv<W: Write>(&self, grid: &RadialGrid, out: W) -> Result<()> {
        let values = self.sample(grid);
        let r: Vec<f64> = grid.points().collect();
        crate::io::write_columns(out, &["r_fm", "V_MeV"], &[&r, &values])
    }
}

pub(crate) fn origin_power_for(singular_coefficient: f64) -> f64 {
    let l = 0.5 * ((1.0 + 4.0 * singular_coefficient).sqrt() - 1.0);
    l + 1.0
}

impl TabulatedPotential {
    pub fn new(
        grid: RadialGrid,
        values: Vec<f64>,
        singular_coefficient: f64,
        channel: &ChannelConstants,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite potential value at r = {} fm",
                grid.r(k)
            )));
        }
        if !(singular_coefficient >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "singular coefficient must be non-negative, got {singular_coefficient}"
            )));
        }
        Ok(Self {
            grid,
            values,
            singular_coefficient,
            hbar2_over_2mu: channel.hbar2_over_2mu,
        })
    }

    /// Tabulates `f` on `grid`.
    pub fn from_fn(
        grid: RadialGrid,
        singular_coefficient: f64,
        channel: &ChannelConstants,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values, singular_coefficient, channel)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn singular_coefficient(&self) -> f64 {
        self.singular_coefficient
    }

    fn singular_law(&self, r: f64) -> f64 {
        self.singular_coefficient * self.hbar2_over_2mu / (r * r)
    }

    /// Linear interpolation between mesh points; below the first point the
    /// origin law plus the remainder frozen at `r_min`; beyond the mesh zero.
    pub fn evaluate(&self, r: f64) -> f64 {
        let h = self.grid.step();
        let r_min = self.grid.r_min();
        if r < r_min {
            let remainder = self.values[0] - self.singular_law(r_min);
            return self.singular_law(r) + remainder;
        }
        let r_max = self.grid.r_max();
        if r > r_max * (1.0 + 1e-12) {
            log::warn!("r = {r} fm is beyond the tabulation (r_max = {r_max} fm); using V = 0");
            return 0.0;
        }
        let x = r / h - 1.0;
        let k = (x.floor() as usize).min(self.values.len() - 2);
        let t = x - k as f64;
        (1.0 - t) * self.values[k] + t * self.values[k + 1]
    }
}

impl From<TabulatedPotential> for Potential {
    fn from(t: TabulatedPotential) -> Self {
        Potential::Tabulated(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn deuteron() -> Potential {
        Potential::sech_squared(3.146, 1.587, &ChannelConstants::deuteron()).unwrap()
    }

    #[test]
    fn sech_squared_reaches_minus_depth_at_origin() {
        let v = deuteron();
        let depth = 41.47 * 3.146 * 4.146 * 1.587 * 1.587;
        assert_relative_eq!(v.evaluate(1e-9).unwrap(), -depth, max_relative = 1e-12);
        assert_relative_eq!(v.depth(&RadialGrid::default()), depth, max_relative = 1e-12);
    }

    #[test]
    fn all_families_decay() {
        let g = RadialGrid::default();
        let tab = TabulatedPotential::from_fn(g, 0.0, &ChannelConstants::deuteron(), |r| {
            -10.0 * (-r).exp()
        })
        .unwrap();
        let all = [
            deuteron(),
            Potential::gaussian(122.694, 0.22).unwrap(),
            tab.into(),
        ];
        for v in &all {
            assert!(v.evaluate(500.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn tabulated_follows_singular_law_below_mesh() {
        let ch = ChannelConstants::deuteron();
        let g = RadialGrid::default();
        let tab =
            TabulatedPotential::from_fn(g, 6.0, &ch, |r| 6.0 * 41.47 / (r * r) - 50.0).unwrap();
        let r = g.step() / 10.0;
        let v = tab.evaluate(r);
        assert_relative_eq!(v, 6.0 * 41.47 / (r * r), max_relative = 0.01);
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let ch = ChannelConstants::deuteron();
        let g = RadialGrid::new(0.1, 20.0).unwrap();
        let tab = TabulatedPotential::from_fn(g, 0.0, &ch, |r| 2.0 * r - 1.0).unwrap();
        assert_relative_eq!(tab.evaluate(3.37), 5.74, epsilon = 1e-12);
        assert_eq!(tab.evaluate(25.0), 0.0);
    }

    #[test]
    fn evaluate_rejects_non_positive_radius() {
        assert!(deuteron().evaluate(0.0).is_err());
        assert!(deuteron().evaluate(-1.0).is_err());
    }

    #[test]
    fn construction_checks() {
        let ch = ChannelConstants::deuteron();
        assert!(Potential::sech_squared(0.9, 1.0, &ch).is_err());
        assert!(Potential::sech_squared(3.0, 0.0, &ch).is_err());
        let g = RadialGrid::default();
        let mut values = vec![0.0; g.len()];
        values[5] = f64::NAN;
        assert!(TabulatedPotential::new(g, values, 0.0, &ch).is_err());
    }

    #[test]
    fn origin_power_matches_effective_l() {
        assert_relative_eq!(origin_power_for(0.0), 1.0);
        assert_relative_eq!(origin_power_for(2.0), 2.0, epsilon = 1e-12);
        assert_relative_eq!(origin_power_for(6.0), 3.0, epsilon = 1e-12);
        assert_relative_eq!(origin_power_for(20.0), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = RadialGrid::new(0.1, 10.0).unwrap();
        let mut buf = Vec::new();
        deuteron().write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r_fm,V_MeV"));
        assert_eq!(lines.count(), g.len());
    }
}
