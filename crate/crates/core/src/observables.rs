//! Radii, s-wave phase shifts, zero-range transfer strengths and the
//! deep/shallow cross-section ratio.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{self, BoundState};
use crate::error::{Error, Result};
use crate::grid::{ChannelConstants, RadialGrid};
use crate::potential::Potential;

/// Default matching radius for phase shifts, fm.
pub const DEFAULT_MATCHING_RADIUS: f64 = 20.0;

/// Weight in front of `int r^2 u^2`: `1/4` when the radius is measured
/// from the centre of mass of two equal masses, `1` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateFactor {
    Quarter,
    Unit,
}

impl CoordinateFactor {
    pub fn weight(self) -> f64 {
        match self {
            CoordinateFactor::Quarter => 0.25,
            CoordinateFactor::Unit => 1.0,
        }
    }
}

impl std::str::FromStr for CoordinateFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "quarter" => Ok(CoordinateFactor::Quarter),
            "unit" => Ok(CoordinateFactor::Unit),
            other => Err(Error::Config(format!(
                "coordinate_factor must be `quarter` or `unit`, got `{other}`"
            ))),
        }
    }
}

/// `sqrt(f int r^2 u^2 dr)` for a normalized state; warns when the tail
/// at `r_max` is still significant.
pub fn rms_radius(state: &BoundState, factor: CoordinateFactor) -> f64 {
    let grid = &state.grid;
    let radius = rms_radius_unchecked(state, factor);
    let r_max = grid.r_max();
    let last = *state.u.last().unwrap_or(&0.0);
    if last * last * r_max.powi(3) > 1e-6 * radius * radius {
        log::warn!(
            "rms radius {radius:.4} fm: the wave function is still {last:.3e} at r_max = {r_max} fm; \
             enlarge the grid"
        );
    }
    radius
}

/// [`rms_radius`] without the truncation check, for inner loops.
pub(crate) fn rms_radius_unchecked(state: &BoundState, factor: CoordinateFactor) -> f64 {
    let grid = &state.grid;
    let integrand: Vec<f64> = grid.points().zip(&state.u).map(|(r, u)| r * r * u * u).collect();
    (factor.weight() * grid.integrate(&integrand)).sqrt()
}

/// Charge radius `sqrt(R_p^2 / 2 + R_rms^2 / 4)`.
pub fn charge_radius(r_proton: f64, r_rms: f64) -> f64 {
    (0.5 * r_proton * r_proton + 0.25 * r_rms * r_rms).sqrt()
}

/// Matter radius of a core of mass number `w` plus one nucleon:
/// `R_m^2 = w/(w+1) R_core^2 + w/(w+1)^2 R_rms^2`.
pub fn matter_radius(core_mass_number: f64, r_core: f64, r_rms: f64) -> f64 {
    let w = core_mass_number;
    (w / (w + 1.0) * r_core * r_core + w / ((w + 1.0) * (w + 1.0)) * r_rms * r_rms).sqrt()
}

/// s-wave phase shift in `(-pi/2, pi/2]` at energy `energy` > 0, from the
/// log-derivative of the regular solution at `r_match`.
pub fn phase_shift(
    potential: &Potential,
    channel: &ChannelConstants,
    grid: &RadialGrid,
    energy: f64,
    r_match: f64,
) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::InvalidInput(format!("phase shifts need E > 0, got {energy}")));
    }
    if !(r_match < grid.r_max() - 2.0 * grid.step() && r_match >= grid.r_min()) {
        return Err(Error::MatchingRadius {
            r_match,
            r_max: grid.r_max(),
        });
    }
    let v_match = potential.evaluate(r_match)?;
    if v_match.abs() >= 1e-6 {
        log::debug!("|V({r_match} fm)| = {:.3e} MeV at the matching radius", v_match.abs());
    }
    let solution = bound::solve_at_energy(potential, channel, grid, energy);
    let k_index = grid.index_of(r_match);
    let r = grid.r(k_index);
    let k = channel.wave_number(energy);
    // u = sin(kr + delta)  =>  kr + delta = atan2(k u, u')
    let (u, du) = (solution.u[k_index], solution.du[k_index]);
    Ok(principal(f64::atan2(k * u, du) - k * r))
}

/// Maps an angle onto `(-pi/2, pi/2]`.
fn principal(x: f64) -> f64 {
    let y = x - PI * (x / PI).round();
    if y <= -FRAC_PI_2 {
        y + PI
    } else {
        y
    }
}

/// Sampled `delta(E)` on one continuous branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftCurve {
    pub label: String,
    /// MeV, ascending.
    pub energies: Vec<f64>,
    /// Radians.
    pub deltas: Vec<f64>,
}

impl PhaseShiftCurve {
    /// Evaluates every energy in parallel, then removes the `pi` jumps in
    /// one ordered pass starting from the principal value at the lowest
    /// energy.
    pub fn sweep(
        label: &str,
        potential: &Potential,
        channel: &ChannelConstants,
        grid: &RadialGrid,
        energies: &[f64],
        r_match: f64,
    ) -> Result<Self> {
        if energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sweep energies must be strictly ascending".into()));
        }
        let raw = energies
            .par_iter()
            .map(|&e| phase_shift(potential, channel, grid, e, r_match))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            label: label.to_owned(),
            energies: energies.to_vec(),
            deltas: unwrap_branch(&raw),
        })
    }

    /// Largest `|delta_self - delta_other|` reduced modulo `pi`.
    pub fn max_difference_mod_pi(&self, other: &PhaseShiftCurve) -> Result<f64> {
        if self.energies != other.energies {
            return Err(Error::InvalidInput("curves sampled at different energies".into()));
        }
        Ok(self
            .deltas
            .iter()
            .zip(&other.deltas)
            .map(|(a, b)| principal(a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes `E_MeV,delta_rad,delta_deg` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let deg: Vec<f64> = self.deltas.iter().map(|d| d.to_degrees()).collect();
        crate::io::write_columns(
            out,
            &["E_MeV", "delta_rad", "delta_deg"],
            &[&self.energies, &self.deltas, &deg],
        )
    }
}

/// Nearest continuation: each value is shifted by the multiple of `pi`
/// that brings it closest to its predecessor.
pub fn unwrap_branch(raw: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(raw.len());
    for &x in raw {
        let y = match out.last() {
            Some(&prev) => x + PI * ((prev - x) / PI).round(),
            None => x,
        };
        out.push(y);
    }
    out
}

/// `E_min, E_min + step, ...` up to `E_max` inclusive, rounded to 1e-12 MeV
/// so that decimal steps print cleanly. Empty when `step` is not positive or the bounds
/// are reversed.
pub fn energy_sweep(e_min: f64, e_max: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || !(e_max >= e_min) || !(e_min > 0.0) {
        return Vec::new();
    }
    let count = ((e_max - e_min) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((e_min + i as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

/// Which description a transfer strength belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Description {
    Deep,
    Pep,
}

/// Zero-range strength `D0` and its square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferStrength {
    /// MeV fm^{3/2}, signed by the tail-positive convention of the state.
    pub d0: f64,
    /// MeV^2 fm^3.
    pub d0_squared: f64,
    pub provenance: Description,
}

impl TransferStrength {
    pub fn new(d0: f64, provenance: Description) -> Self {
        Self {
            d0,
            d0_squared: d0 * d0,
            provenance,
        }
    }
}

/// `D0 = sqrt(4 pi) int r V(r) u(r) dr` on the state's mesh.
///
/// The integrand behaves as `r^m` at the origin, with `m = 1 + p` for a
/// regular potential and `m = p - 1` under a `1/r^2` core, so the first
/// interval is integrated exactly as `f(r_1) r_1 / (m + 1)`.
pub fn zero_range_strength(potential: &Potential, state: &BoundState, provenance: Description) -> TransferStrength {
    let grid = &state.grid;
    let v = potential.sample(grid);
    let f: Vec<f64> = grid.points().zip(&v).zip(&state.u).map(|((r, v), u)| r * v * u).collect();
    let m = if potential.singular_coefficient() > 0.0 {
        state.origin_power - 1.0
    } else {
        state.origin_power + 1.0
    };
    let h = grid.step();
    let first = f[0] * h / (m + 1.0);
    let rest: f64 = f.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    let n = f.len();
    let tail = f[n.saturating_sub(10)..].iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if tail > 1e-8 {
        log::warn!("D0 integrand is {tail:.3e} near r_max = {} fm; not converged", grid.r_max());
    }
    TransferStrength::new((4.0 * PI).sqrt() * (first + rest), provenance)
}

/// `D0^2(deep) / D0^2(pep)`.
pub fn cross_section_ratio(deep: &TransferStrength, pep: &TransferStrength) -> Result<f64> {
    if pep.d0_squared == 0.0 {
        return Err(Error::InvalidInput("shallow-partner transfer strength is zero".into()));
    }
    Ok(deep.d0_squared / pep.d0_squared)
}

/// The same radius in the deep, intermediate and phase-equivalent
/// descriptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSet {
    pub deep: f64,
    pub intermediate: f64,
    pub pep: f64,
}

impl RadiusSet {
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            deep: f(self.deep),
            intermediate: f(self.intermediate),
            pep: f(self.pep),
        }
    }
}

/// Transfer strengths of both descriptions and their ratio input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferStrengths {
    pub deep: TransferStrength,
    pub pep: TransferStrength,
}

/// Phase-shift agreement summary of a removal chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseComparison {
    pub matching_radius_fm: f64,
    pub e_min_mev: f64,
    pub e_max_mev: f64,
    pub points: usize,
    /// `max |delta_pep - delta_deep| mod pi`, rad.
    pub max_difference_pep_rad: f64,
    /// `max |delta_intermediate - delta_deep| mod pi`, rad.
    pub max_difference_intermediate_rad: f64,
}

/// Machine-readable summary written by the `report` workflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub system: String,
    pub a_tilde: f64,
    pub beta_per_fm: f64,
    pub physical_energy_mev: f64,
    pub removed_energies_mev: Vec<f64>,
    pub rms_fm: RadiusSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charge_radius_fm: Option<RadiusSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matter_radius_fm: Option<RadiusSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer_strengths: Option<TransferStrengths>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_section_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_shifts: Option<PhaseComparison>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}
