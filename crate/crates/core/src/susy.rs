//! Removal of the lowest bound state by two supersymmetric steps.
//!
//! With `psi` the normalized nodeless ground state at energy `E0` and
//! `I(r) = int_0^r psi^2`:
//!
//! ```text
//! V2 = V1 - 2 (hbar^2/2mu) (ln psi)''    same spectrum minus E0, different phases
//! V3 = V1 - 2 (hbar^2/2mu) (ln I)''      same spectrum minus E0, same phases
//! ```
//!
//! Both second derivatives are evaluated without numerical differentiation:
//! `(ln psi)'' = (V1 - E0)/(hbar^2/2mu) - y^2` with `y = psi'/psi`, and
//! `(ln I)'' = 2 psi psi' / I - (psi^2 / I)^2`. If the source behaves like
//! `c/r^2` at the origin with `c = l(l+1)`, `V2` carries
//! `(l+1)(l+2)` and `V3` carries `(l+2)(l+3)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bound::{self, BoundState};
use crate::error::{Error, Result};
use crate::grid::{ChannelConstants, RadialGrid};
use crate::potential::{Potential, TabulatedPotential};

/// Below this many mesh points the transformed potential is replaced by its
/// exact origin law plus a linearly extrapolated remainder.
const ORIGIN_POINTS: usize = 2;

/// Wave-function magnitude below which `psi'/psi` is taken from the
/// asymptotic decay instead of the mesh values.
const TINY: f64 = 1e-250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Intermediate,
    PhaseEquivalent,
}

/// One step of a removal chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SusyTransformRecord {
    pub source: Potential,
    pub removed_energy: f64,
    pub step_kind: StepKind,
    pub result: Potential,
    pub singular_coefficient: f64,
}

/// JSON sidecar of a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSidecar {
    #[serde(rename = "removed_energy_MeV")]
    pub removed_energy_mev: f64,
    pub step_kind: StepKind,
    pub singular_coefficient: f64,
}

impl SusyTransformRecord {
    pub fn sidecar(&self) -> RecordSidecar {
        RecordSidecar {
            removed_energy_mev: self.removed_energy,
            step_kind: self.step_kind,
            singular_coefficient: self.singular_coefficient,
        }
    }

    pub fn write_csv<W: Write>(&self, grid: &RadialGrid, out: W) -> Result<()> {
        self.result.write_csv(grid, out)
    }
}

fn check_ground(ground: &BoundState) -> Result<()> {
    if ground.nodes != 0 {
        return Err(Error::Precondition(format!(
            "the removed state must be nodeless, got {} nodes at E = {} MeV",
            ground.nodes, ground.energy
        )));
    }
    Ok(())
}

/// `psi'/psi` on the mesh, falling back to `-kappa` where `psi` has
/// underflowed.
fn log_derivative(ground: &BoundState) -> Vec<f64> {
    ground
        .u
        .iter()
        .zip(&ground.du)
        .map(|(&u, &du)| {
            if u.abs() < TINY {
                -ground.kappa
            } else {
                du / u
            }
        })
        .collect()
}

/// Cumulative `I(r_k) = int_0^{r_k} psi^2` by the Euler-Maclaurin
/// corrected trapezoid `T_k - (h^2/12) f1_k + (h^4/720) f3_k` with
/// `f = psi^2`, `f1 = 2 psi psi'` and `f3 = 8 Q psi psi' + 2 Q' psi^2`
/// from `psi'' = Q psi`. Both corrections vanish at the origin for
/// `psi ~ r^p`, `p >= 1`.
pub fn cumulative_norm(ground: &BoundState, source: &Potential, channel: &ChannelConstants) -> Vec<f64> {
    let grid = ground.grid;
    let h = grid.step();
    let c = channel.hbar2_over_2mu;
    let cs = source.singular_coefficient();
    let q: Vec<f64> = source.sample(&grid).iter().map(|v| (v - ground.energy) / c).collect();
    let dq = singular_aware_slope(&q, &grid, cs);
    let mut out = Vec::with_capacity(ground.u.len());
    let mut trap = 0.0;
    let mut prev = 0.0;
    for k in 0..ground.u.len() {
        let (u, du) = (ground.u[k], ground.du[k]);
        let f = u * u;
        trap += 0.5 * h * (prev + f);
        prev = f;
        let f1 = 2.0 * u * du;
        let f3 = 8.0 * q[k] * u * du + 2.0 * dq[k] * f;
        out.push(trap - h * h / 12.0 * f1 + h.powi(4) / 720.0 * f3);
    }
    out
}

/// `dQ/dr` for `Q = cs / r^2 + smooth`: the origin law exactly, the smooth
/// part by differences.
fn singular_aware_slope(q: &[f64], grid: &RadialGrid, cs: f64) -> Vec<f64> {
    let n = q.len();
    let h = grid.step();
    let smooth: Vec<f64> = (0..n).map(|k| q[k] - cs / grid.r(k).powi(2)).collect();
    (0..n)
        .map(|k| {
            let slope = if k == 0 {
                (smooth[1] - smooth[0]) / h
            } else if k == n - 1 {
                (smooth[n - 1] - smooth[n - 2]) / h
            } else {
                (smooth[k + 1] - smooth[k - 1]) / (2.0 * h)
            };
            slope - 2.0 * cs / grid.r(k).powi(3)
        })
        .collect()
}

/// `(ln I)''` from `psi`, `psi'` and `I`.
pub fn log_norm_curvature(ground: &BoundState, source: &Potential, channel: &ChannelConstants) -> Vec<f64> {
    let integral = cumulative_norm(ground, source, channel);
    ground
        .u
        .iter()
        .zip(&ground.du)
        .zip(&integral)
        .map(|((&u, &du), &i)| {
            let ratio = u * u / i;
            2.0 * u * du / i - ratio * ratio
        })
        .collect()
}

/// Overwrites the first mesh points with `c (hbar^2/2mu)/r^2` plus the
/// remainder extrapolated linearly from the next two points.
fn impose_origin_law(values: &mut [f64], grid: &RadialGrid, coefficient: f64, channel: &ChannelConstants) {
    let law = |k: usize| coefficient * channel.hbar2_over_2mu / grid.r(k).powi(2);
    let rem_a = values[ORIGIN_POINTS] - law(ORIGIN_POINTS);
    let rem_b = values[ORIGIN_POINTS + 1] - law(ORIGIN_POINTS + 1);
    let slope = rem_b - rem_a;
    for k in 0..ORIGIN_POINTS {
        let steps = ORIGIN_POINTS as f64 - k as f64;
        values[k] = law(k) + rem_a - steps * slope;
    }
}

fn tabulate(values: Vec<f64>, grid: &RadialGrid, coefficient: f64, channel: &ChannelConstants) -> Result<Potential> {
    let mut values = values;
    impose_origin_law(&mut values, grid, coefficient, channel);
    Ok(TabulatedPotential::new(*grid, values, coefficient, channel)?.into())
}

/// `V2 = 2 E0 - V1 + 2 (hbar^2/2mu) (psi'/psi)^2`.
pub fn build_intermediate(source: &Potential, ground: &BoundState, channel: &ChannelConstants) -> Result<Potential> {
    check_ground(ground)?;
    let grid = ground.grid;
    let c = channel.hbar2_over_2mu;
    let v1 = source.sample(&grid);
    let y = log_derivative(ground);
    let values = v1
        .iter()
        .zip(&y)
        .map(|(&v, &y)| 2.0 * ground.energy - v + 2.0 * c * y * y)
        .collect();
    let coefficient = source.singular_coefficient() + 2.0 * ground.origin_power;
    tabulate(values, &grid, coefficient, channel)
}

/// Phase-equivalent partner `V3 = V1 - 2 (hbar^2/2mu) (ln I)''`.
pub fn build_pep(source: &Potential, ground: &BoundState, channel: &ChannelConstants) -> Result<Potential> {
    check_ground(ground)?;
    let grid = ground.grid;
    let c = channel.hbar2_over_2mu;
    let v1 = source.sample(&grid);
    let curvature = log_norm_curvature(ground, source, channel);
    let values = v1
        .iter()
        .zip(&ground.u)
        .zip(&curvature)
        .map(|((&v, &u), &d2)| if u.abs() < TINY { v } else { v - 2.0 * c * d2 })
        .collect();
    let coefficient = source.singular_coefficient() + 2.0 * (2.0 * ground.origin_power + 1.0);
    tabulate(values, &grid, coefficient, channel)
}

/// Phase-equivalent partner via the regular solution `psi2` of `V2` at
/// `E0`: `V3 = V1 - 2 (hbar^2/2mu) (ln psi psi2)''
/// = V1 + 2 (hbar^2/2mu) (y2^2 - y^2)`.
pub fn build_pep_two_step(
    source: &Potential,
    intermediate: &Potential,
    ground: &BoundState,
    channel: &ChannelConstants,
) -> Result<Potential> {
    check_ground(ground)?;
    let grid = ground.grid;
    let c = channel.hbar2_over_2mu;
    let v1 = source.sample(&grid);
    let y1 = log_derivative(ground);
    let psi2 = bound::solve_at_energy(intermediate, channel, &grid, ground.energy);
    let values = (0..grid.len())
        .map(|k| {
            let y2 = psi2.log_derivative(k);
            v1[k] + 2.0 * c * (y2 * y2 - y1[k] * y1[k])
        })
        .collect();
    let coefficient = source.singular_coefficient() + 2.0 * (2.0 * ground.origin_power + 1.0);
    tabulate(values, &grid, coefficient, channel)
}

/// Solves the ground state of `source` and builds both partners.
pub fn remove_lowest(
    source: &Potential,
    channel: &ChannelConstants,
    grid: &RadialGrid,
) -> Result<(SusyTransformRecord, SusyTransformRecord)> {
    if bound::count_bound_states(source, channel, grid) == 0 {
        return Err(Error::TooManyRemovals {
            requested: 1,
            available: 0,
        });
    }
    let ground = bound::solve_bound_state(source, channel, grid, 0, bound::default_bracket(source, grid))?;
    remove_state(source, &ground, channel)
}

fn remove_state(
    source: &Potential,
    ground: &BoundState,
    channel: &ChannelConstants,
) -> Result<(SusyTransformRecord, SusyTransformRecord)> {
    let v2 = build_intermediate(source, ground, channel)?;
    let v3 = build_pep(source, ground, channel)?;
    let record = |kind, result: Potential| SusyTransformRecord {
        source: source.clone(),
        removed_energy: ground.energy,
        step_kind: kind,
        singular_coefficient: result.singular_coefficient(),
        result,
    };
    Ok((
        record(StepKind::Intermediate, v2),
        record(StepKind::PhaseEquivalent, v3),
    ))
}

/// Removes the `k` lowest states one after the other; each removal
/// contributes an intermediate and a phase-equivalent record, and the next
/// removal starts from the phase-equivalent result.
pub fn iterate_removals(
    source: &Potential,
    channel: &ChannelConstants,
    grid: &RadialGrid,
    k: usize,
) -> Result<Vec<SusyTransformRecord>> {
    let available = bound::count_bound_states(source, channel, grid);
    if k > available {
        return Err(Error::TooManyRemovals { requested: k, available });
    }
    let mut records = Vec::with_capacity(2 * k);
    let mut current = source.clone();
    for _ in 0..k {
        let (intermediate, pep) = remove_lowest(&current, channel, grid)?;
        current = pep.result.clone();
        records.push(intermediate);
        records.push(pep);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{count_bound_states, default_bracket, solve_bound_state};

    fn deuteron() -> (Potential, ChannelConstants, RadialGrid) {
        let ch = ChannelConstants::deuteron();
        (Potential::sech_squared(3.146, 1.587, &ch).unwrap(), ch, RadialGrid::default())
    }

    #[test]
    fn excited_ground_state_is_rejected() {
        let (v, ch, g) = deuteron();
        let excited = solve_bound_state(&v, &ch, &g, 1, default_bracket(&v, &g)).unwrap();
        assert!(matches!(build_intermediate(&v, &excited, &ch), Err(Error::Precondition(_))));
        assert!(matches!(build_pep(&v, &excited, &ch), Err(Error::Precondition(_))));
    }

    #[test]
    fn origin_laws_of_the_partners() {
        let (v, ch, g) = deuteron();
        let (r2, r3) = remove_lowest(&v, &ch, &g).unwrap();
        assert_eq!(r2.singular_coefficient, 2.0);
        assert_eq!(r3.singular_coefficient, 6.0);
        assert!((r2.removed_energy + 481.0).abs() < 1.0);
        let c = ch.hbar2_over_2mu;
        for (rec, coeff) in [(&r2, 2.0), (&r3, 6.0)] {
            for r in [0.02, 0.05] {
                let dv = rec.result.evaluate(r).unwrap() - v.evaluate(r).unwrap();
                let law = coeff * c / (r * r);
                assert!((dv - law).abs() / law < 0.02, "c = {coeff}, r = {r}: {dv} vs {law}");
            }
        }
    }

    #[test]
    fn partners_coincide_with_source_outside_the_core() {
        let (v, ch, g) = deuteron();
        let (r2, r3) = remove_lowest(&v, &ch, &g).unwrap();
        let v1 = v.sample(&g);
        // V3 - V1 falls off like psi^2 (exp(-2 kappa0 r)); V2 - V1 only like
        // sech^2(beta r), which is still 0.16 MeV at 5/beta
        for (rec, from) in [(&r3, 5.0 / 1.587), (&r2, 7.0 / 1.587)] {
            let vals = rec.result.sample(&g);
            for k in g.index_of(from)..g.len() {
                let diff = vals[k] - v1[k];
                assert!(diff.abs() < 0.01, "{:?} r = {}: {diff}", rec.step_kind, g.r(k));
            }
        }
    }

    #[test]
    fn curvature_matches_finite_differences_of_ln_i() {
        let (v, ch, g) = deuteron();
        let ground = solve_bound_state(&v, &ch, &g, 0, default_bracket(&v, &g)).unwrap();
        let integral = cumulative_norm(&ground, &v, &ch);
        let curvature = log_norm_curvature(&ground, &v, &ch);
        // mid-grid of the region where I still varies
        for r in [0.3, 0.6, 1.0] {
            let k = g.index_of(r);
            let h = g.step();
            let ln = |j: usize| integral[j].ln();
            let fd = (-ln(k + 2) + 16.0 * ln(k + 1) - 30.0 * ln(k) + 16.0 * ln(k - 1) - ln(k - 2))
                / (12.0 * h * h);
            assert!((fd - curvature[k]).abs() < 1e-5 * curvature[k].abs(), "r = {r}: {fd} vs {}", curvature[k]);
        }
    }

    #[test]
    fn single_state_potential_loses_all_bound_states() {
        let ch = ChannelConstants::be11();
        let g = RadialGrid::new(0.01, 60.0).unwrap();
        // A_tilde < 3: exactly one half-line state
        let v = Potential::sech_squared(2.4, 0.7, &ch).unwrap();
        assert_eq!(count_bound_states(&v, &ch, &g), 1);
        let (_, r3) = remove_lowest(&v, &ch, &g).unwrap();
        assert_eq!(count_bound_states(&r3.result, &ch, &g), 0);
        assert!(matches!(
            remove_lowest(&r3.result, &ch, &g),
            Err(Error::TooManyRemovals { available: 0, .. })
        ));
    }

    #[test]
    fn iteration_edge_cases() {
        let (v, ch, g) = deuteron();
        assert!(iterate_removals(&v, &ch, &g, 0).unwrap().is_empty());
        match iterate_removals(&v, &ch, &g, 3) {
            Err(Error::TooManyRemovals { requested: 3, available: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let once = iterate_removals(&v, &ch, &g, 1).unwrap();
        let (r2, r3) = remove_lowest(&v, &ch, &g).unwrap();
        assert_eq!(once, vec![r2, r3]);
    }

    #[test]
    fn sidecar_json_field_names() {
        let (v, ch, g) = deuteron();
        let (_, r3) = remove_lowest(&v, &ch, &g).unwrap();
        let json = serde_json::to_value(r3.sidecar()).unwrap();
        assert_eq!(json["step_kind"], "phase_equivalent");
        assert_eq!(json["singular_coefficient"], 6.0);
        assert!(json["removed_energy_MeV"].as_f64().unwrap() < -480.0);
    }
}
