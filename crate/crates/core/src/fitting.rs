//! Two-parameter fits of the sech^2 well to a binding energy and an rms
//! radius, plus the system presets the workflows run on.
//!
//! For a fixed node count the closed-form spectrum fixes `A_tilde` once
//! `beta` is chosen, so the fit reduces to a bisection on `beta` for the rms
//! radius.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bound::{self, BoundState};
use crate::error::{Error, Result};
use crate::grid::{ChannelConstants, RadialGrid};
use crate::observables::{self, CoordinateFactor};
use crate::potential::Potential;

/// Default `beta` search interval, fm^-1.
pub const DEFAULT_BETA_BRACKET: (f64, f64) = (0.2, 5.0);

const ENERGY_TOLERANCE: f64 = 1e-6;
const RMS_TOLERANCE: f64 = 1e-4;
const MAX_BISECTIONS: usize = 200;
const MONOTONICITY_SAMPLES: usize = 24;

/// `A_tilde = 2n + 1 + sqrt(-E / (hbar^2/2mu)) / beta`.
pub fn a_tilde_from_energy(energy: f64, beta: f64, channel: &ChannelConstants, n: usize) -> Result<f64> {
    if !(energy < 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need E < 0 and beta > 0, got E = {energy}, beta = {beta}"
        )));
    }
    Ok(2.0 * n as f64 + 1.0 + (-energy / channel.hbar2_over_2mu).sqrt() / beta)
}

/// How a preset obtains its well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresetParameters {
    /// Fitted to a binding energy (MeV) and rms radius (fm).
    Fitted { target_energy: f64, target_rms: f64 },
    /// Taken as given.
    Fixed { a_tilde: f64, beta: f64 },
}

/// Core of a one-nucleon halo system, for matter radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreInfo {
    pub mass_number: f64,
    pub rms_radius: f64,
}

/// A two-body system together with the grid it is solved on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemPreset {
    pub name: String,
    pub channel: ChannelConstants,
    pub parameters: PresetParameters,
    /// Node count of the physical state; the states below it are removed.
    pub physical_node_count: usize,
    pub coordinate_factor: CoordinateFactor,
    pub grid: RadialGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proton_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<CoreInfo>,
    /// Whether the system is the n-p vertex of a transfer reaction.
    #[serde(default)]
    pub transfer_vertex: bool,
    /// Literature `(A_tilde, beta)` to compare a fit against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_parameters: Option<(f64, f64)>,
}

impl SystemPreset {
    pub fn deuteron() -> Self {
        Self {
            name: "deuteron".into(),
            channel: ChannelConstants::deuteron(),
            parameters: PresetParameters::Fitted {
                target_energy: -2.226,
                target_rms: 1.95,
            },
            physical_node_count: 1,
            coordinate_factor: CoordinateFactor::Quarter,
            grid: RadialGrid::default(),
            proton_radius: Some(0.88),
            core: None,
            transfer_vertex: true,
            reference_parameters: Some((3.146, 1.587)),
        }
    }

    /// The halo tail needs a longer mesh than the default.
    pub fn be11() -> Self {
        Self {
            name: "be11".into(),
            channel: ChannelConstants::be11(),
            parameters: PresetParameters::Fitted {
                target_energy: -0.503,
                target_rms: 6.70,
            },
            physical_node_count: 1,
            coordinate_factor: CoordinateFactor::Unit,
            grid: RadialGrid::new(0.01, 100.0).expect("valid grid"),
            proton_radius: None,
            core: Some(CoreInfo {
                mass_number: 10.0,
                rms_radius: 2.3,
            }),
            transfer_vertex: false,
            reference_parameters: Some((3.124, 0.694)),
        }
    }

    pub fn alpha() -> Self {
        Self {
            name: "alpha".into(),
            channel: ChannelConstants::alpha_alpha(),
            parameters: PresetParameters::Fixed {
                a_tilde: 5.945,
                beta: 0.535,
            },
            physical_node_count: 2,
            coordinate_factor: CoordinateFactor::Quarter,
            grid: RadialGrid::default(),
            proton_radius: None,
            core: None,
            transfer_vertex: false,
            reference_parameters: None,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "deuteron" => Ok(Self::deuteron()),
            "be11" => Ok(Self::be11()),
            "alpha" => Ok(Self::alpha()),
            other => Err(Error::Config(format!(
                "unknown preset `{other}` (expected deuteron, be11 or alpha)"
            ))),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. Required keys:
    /// `hbar2_over_2mu`, `nodes`, `coordinate_factor` and either
    /// `target_energy` + `target_rms` or `a_tilde` + `beta`. Optional:
    /// `name`, `step`, `r_max`, `proton_radius`, `core_mass_number`,
    /// `core_rms`.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_owned();
            if map.insert(key.clone(), value.trim().to_owned()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        const KNOWN: [&str; 13] = [
            "name",
            "hbar2_over_2mu",
            "target_energy",
            "target_rms",
            "nodes",
            "coordinate_factor",
            "a_tilde",
            "beta",
            "step",
            "r_max",
            "proton_radius",
            "core_mass_number",
            "core_rms",
        ];
        if let Some(unknown) = map.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key `{unknown}`")));
        }
        let number = |key: &str| -> Result<Option<f64>> {
            map.get(key)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::Config(format!("`{key}` must be a number, got `{v}`")))
                })
                .transpose()
        };
        let required = |key: &str| -> Result<f64> {
            number(key)?.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
        };

        let name = map.get("name").cloned().unwrap_or_else(|| "custom".into());
        let channel = ChannelConstants::labelled(required("hbar2_over_2mu")?, &name)
            .map_err(|e| Error::Config(e.to_string()))?;
        let nodes = map
            .get("nodes")
            .ok_or_else(|| Error::Config("missing key `nodes`".into()))?
            .parse::<usize>()
            .map_err(|_| Error::Config("`nodes` must be a non-negative integer".into()))?;
        let coordinate_factor = map
            .get("coordinate_factor")
            .ok_or_else(|| Error::Config("missing key `coordinate_factor`".into()))?
            .parse()?;
        let parameters = match (number("target_energy")?, number("target_rms")?, number("a_tilde")?, number("beta")?) {
            (Some(e), Some(r), None, None) => {
                if !(e < 0.0) || !(r > 0.0) {
                    return Err(Error::Config(format!(
                        "need target_energy < 0 and target_rms > 0, got {e} and {r}"
                    )));
                }
                PresetParameters::Fitted {
                    target_energy: e,
                    target_rms: r,
                }
            }
            (None, None, Some(a_tilde), Some(beta)) => PresetParameters::Fixed { a_tilde, beta },
            _ => {
                return Err(Error::Config(
                    "give either target_energy and target_rms, or a_tilde and beta".into(),
                ))
            }
        };
        let defaults = RadialGrid::default();
        let grid = RadialGrid::new(
            number("step")?.unwrap_or(defaults.step()),
            number("r_max")?.unwrap_or(defaults.r_max()),
        )
        .map_err(|e| Error::Config(e.to_string()))?;
        let core = match (number("core_mass_number")?, number("core_rms")?) {
            (Some(mass_number), Some(rms_radius)) => Some(CoreInfo {
                mass_number,
                rms_radius,
            }),
            (None, None) => None,
            _ => return Err(Error::Config("core_mass_number and core_rms go together".into())),
        };
        Ok(Self {
            name,
            channel,
            parameters,
            physical_node_count: nodes,
            coordinate_factor,
            grid,
            proton_radius: number("proton_radius")?,
            core,
            transfer_vertex: false,
            reference_parameters: None,
        })
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_config(&text)
    }

    /// Replaces the mesh, keeping everything else.
    pub fn with_grid(mut self, grid: RadialGrid) -> Self {
        self.grid = grid;
        self
    }

    /// `(A_tilde, beta)`: fitted, or as given for fixed presets.
    pub fn resolve(&self) -> Result<(f64, f64, Option<FitResult>)> {
        match self.parameters {
            PresetParameters::Fixed { a_tilde, beta } => Ok((a_tilde, beta, None)),
            PresetParameters::Fitted { .. } => {
                let fit = fit_parameters(self, DEFAULT_BETA_BRACKET)?;
                Ok((fit.a_tilde, fit.beta, Some(fit)))
            }
        }
    }

    /// Physical state of the well `(a_tilde, beta)` on the preset mesh:
    /// closed form for `n <= 1`, numerical otherwise.
    pub fn physical_state(&self, a_tilde: f64, beta: f64) -> Result<BoundState> {
        let n = self.physical_node_count;
        if n <= 1 {
            bound::analytic_pt_state(a_tilde, beta, &self.channel, &self.grid, n)
        } else {
            let v = Potential::sech_squared(a_tilde, beta, &self.channel)?;
            bound::solve_bound_state(&v, &self.channel, &self.grid, n, bound::default_bracket(&v, &self.grid))
        }
    }
}

/// Differences between achieved and target values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResiduals {
    #[serde(rename = "energy_MeV")]
    pub energy_mev: f64,
    pub rms_fm: f64,
}

/// Outcome of [`fit_parameters`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub system: String,
    #[serde(rename = "A_tilde")]
    pub a_tilde: f64,
    #[serde(rename = "beta_per_fm")]
    pub beta: f64,
    pub nodes: usize,
    #[serde(rename = "achieved_energy_MeV")]
    pub achieved_energy: f64,
    #[serde(rename = "achieved_rms_fm")]
    pub achieved_rms: f64,
    pub residuals: FitResiduals,
    pub iterations: usize,
}

/// Fits `(A_tilde, beta)` so the physical state of `preset` has the target
/// energy and rms radius.
pub fn fit_parameters(preset: &SystemPreset, beta_bracket: (f64, f64)) -> Result<FitResult> {
    let (target_energy, target_rms) = match preset.parameters {
        PresetParameters::Fitted {
            target_energy,
            target_rms,
        } => (target_energy, target_rms),
        PresetParameters::Fixed { .. } => {
            return Err(Error::Config(format!(
                "preset `{}` has fixed parameters; use `spectrum` instead of `fit`",
                preset.name
            )))
        }
    };
    let (mut lo, mut hi) = beta_bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!("bad beta bracket [{lo}, {hi}]")));
    }
    let n = preset.physical_node_count;
    let rms_at = |beta: f64| -> Result<(f64, f64)> {
        let a_tilde = a_tilde_from_energy(target_energy, beta, &preset.channel, n)?;
        let state = preset.physical_state(a_tilde, beta).map_err(|e| match e {
            Error::NoSuchState { .. } | Error::EnergyBracket { .. } => Error::Precondition(format!(
                "no state with {n} nodes at beta = {beta} fm^-1 (A_tilde = {a_tilde}): {e}"
            )),
            other => other,
        })?;
        Ok((a_tilde, observables::rms_radius_unchecked(&state, preset.coordinate_factor)))
    };

    check_monotone(lo, hi, |b| rms_at(b).map(|x| x.1))?;

    let (_, rms_lo) = rms_at(lo)?;
    let (_, rms_hi) = rms_at(hi)?;
    if !(rms_lo >= target_rms && target_rms >= rms_hi) {
        return Err(Error::FitBracket {
            lo,
            hi,
            lo_rms: rms_lo,
            hi_rms: rms_hi,
            target: target_rms,
        });
    }
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS && hi - lo > 1e-14 * hi {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (_, rms) = rms_at(mid)?;
        if rms > target_rms {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    let (a_tilde, rms) = rms_at(beta)?;
    let energy = crate::poschl_teller::analytic_levels(a_tilde, beta, &preset.channel, n)?;
    let residuals = FitResiduals {
        energy_mev: energy - target_energy,
        rms_fm: rms - target_rms,
    };
    if residuals.energy_mev.abs() >= ENERGY_TOLERANCE || residuals.rms_fm.abs() >= RMS_TOLERANCE {
        return Err(Error::NoConvergence {
            what: "beta bisection",
            iterations,
        });
    }
    log::info!(
        "{}: A_tilde = {a_tilde:.6}, beta = {beta:.6} fm^-1 after {iterations} bisections",
        preset.name
    );
    Ok(FitResult {
        system: preset.name.clone(),
        a_tilde,
        beta,
        nodes: n,
        achieved_energy: energy,
        achieved_rms: rms,
        residuals,
        iterations,
    })
}

/// Samples the bracket on a geometric mesh and insists on a strictly
/// decreasing rms.
fn check_monotone(lo: f64, hi: f64, rms: impl Fn(f64) -> Result<f64>) -> Result<()> {
    let ratio = (hi / lo).powf(1.0 / (MONOTONICITY_SAMPLES - 1) as f64);
    let mut previous = f64::INFINITY;
    for i in 0..MONOTONICITY_SAMPLES {
        let beta = lo * ratio.powi(i as i32);
        let value = rms(beta)?;
        log::debug!("monotonicity probe: beta = {beta:.4} fm^-1, rms = {value:.6} fm");
        if !(value < previous) {
            return Err(Error::NonMonotone { beta });
        }
        previous = value;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poschl_teller::analytic_levels;

    #[test]
    fn energy_inversion() {
        let ch = ChannelConstants::deuteron();
        let a = a_tilde_from_energy(-2.226, 1.587, &ch, 1).unwrap();
        assert!((a - 3.146).abs() < 1e-3, "{a}");
        let back = analytic_levels(a, 1.587, &ch, 1).unwrap();
        assert!((back + 2.226).abs() < 1e-12);
        let threshold = a_tilde_from_energy(-1e-300, 0.8, &ch, 2).unwrap();
        assert!((threshold - 5.0).abs() < 1e-12);
        assert!(a_tilde_from_energy(1.0, 1.0, &ch, 0).is_err());
    }

    #[test]
    fn fixed_presets_refuse_to_fit() {
        let err = fit_parameters(&SystemPreset::alpha(), DEFAULT_BETA_BRACKET).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn narrow_bracket_is_reported() {
        let err = fit_parameters(&SystemPreset::deuteron(), (3.0, 5.0)).unwrap_err();
        match err {
            Error::FitBracket { lo_rms, hi_rms, .. } => assert!(lo_rms < 1.95 && hi_rms < lo_rms),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn config_round_trip() {
        let text = "\
# synthetic system
name = toy
hbar2_over_2mu = 41.47   # MeV fm^2
target_energy = -2.0
target_rms = 2.1
nodes = 1
coordinate_factor = quarter
r_max = 40
";
        let p = SystemPreset::parse_config(text).unwrap();
        assert_eq!(p.name, "toy");
        assert_eq!(p.physical_node_count, 1);
        assert_eq!(p.coordinate_factor, CoordinateFactor::Quarter);
        assert!((p.grid.r_max() - 40.0).abs() < 1e-9);
        assert_eq!(
            p.parameters,
            PresetParameters::Fitted {
                target_energy: -2.0,
                target_rms: 2.1
            }
        );
    }

    #[test]
    fn config_errors() {
        let base = "hbar2_over_2mu = 41.47\nnodes = 1\ncoordinate_factor = unit\n";
        assert!(SystemPreset::parse_config(base).is_err());
        assert!(SystemPreset::parse_config(&format!("{base}target_energy = -1\n")).is_err());
        assert!(SystemPreset::parse_config(&format!("{base}a_tilde = 3\nbeta = 1\ncolour = red\n")).is_err());
        assert!(SystemPreset::parse_config(&format!("{base}a_tilde = 3\nbeta = x\n")).is_err());
        assert!(SystemPreset::parse_config(&format!("{base}target_energy = 1\ntarget_rms = 2\n")).is_err());
        assert!(SystemPreset::parse_config("nodes 1").is_err());
        assert!(SystemPreset::parse_config(&format!("{base}a_tilde = 3\nbeta = 1\n")).is_ok());
        assert!(matches!(SystemPreset::by_name("he6"), Err(Error::Config(_))));
    }
}
