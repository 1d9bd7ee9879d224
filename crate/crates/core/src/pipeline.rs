//! The fit, remove, observe chain for one system.

use serde::Serialize;

use crate::bound::{self, BoundState, BoundStateSummary};
use crate::error::{Error, Result};
use crate::fitting::{FitResult, SystemPreset};
use crate::observables::{
    self, Description, ObservableReport, PhaseComparison, PhaseShiftCurve, RadiusSet, TransferStrengths,
};
use crate::poschl_teller;
use crate::potential::Potential;
use crate::susy::{self, StepKind, SusyTransformRecord};

/// A deep well together with the partners obtained by removing every state
/// below the physical one.
#[derive(Debug, Clone)]
pub struct Chain {
    pub preset: SystemPreset,
    pub a_tilde: f64,
    pub beta: f64,
    pub fit: Option<FitResult>,
    pub source: Potential,
    pub records: Vec<SusyTransformRecord>,
    /// Physical state of the deep well.
    pub deep_state: BoundState,
    /// Ground state of the last intermediate partner.
    pub intermediate_state: BoundState,
    /// Ground state of the final phase-equivalent partner.
    pub pep_state: BoundState,
}

/// Levels of the three potentials of a chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChainSpectra {
    #[serde(rename = "analytic_MeV")]
    pub analytic: Vec<f64>,
    pub deep: Vec<BoundStateSummary>,
    pub intermediate: Vec<BoundStateSummary>,
    pub pep: Vec<BoundStateSummary>,
}

/// The three phase-shift curves of a chain.
#[derive(Debug, Clone)]
pub struct ChainPhaseShifts {
    pub deep: PhaseShiftCurve,
    pub intermediate: PhaseShiftCurve,
    pub pep: PhaseShiftCurve,
    pub r_match: f64,
}

impl ChainPhaseShifts {
    pub fn comparison(&self) -> Result<PhaseComparison> {
        let e = &self.deep.energies;
        Ok(PhaseComparison {
            matching_radius_fm: self.r_match,
            e_min_mev: e[0],
            e_max_mev: e[e.len() - 1],
            points: e.len(),
            max_difference_pep_rad: self.pep.max_difference_mod_pi(&self.deep)?,
            max_difference_intermediate_rad: self.intermediate.max_difference_mod_pi(&self.deep)?,
        })
    }
}

fn ground_state(potential: &Potential, preset: &SystemPreset) -> Result<BoundState> {
    bound::solve_bound_state(
        potential,
        &preset.channel,
        &preset.grid,
        0,
        bound::default_bracket(potential, &preset.grid),
    )
}

impl Chain {
    /// Fits (or takes) the parameters of `preset` and builds the chain.
    pub fn from_preset(preset: &SystemPreset) -> Result<Self> {
        let (a_tilde, beta, fit) = preset.resolve()?;
        Self::build(preset, a_tilde, beta, fit)
    }

    pub fn build(preset: &SystemPreset, a_tilde: f64, beta: f64, fit: Option<FitResult>) -> Result<Self> {
        let removals = preset.physical_node_count;
        if removals == 0 {
            return Err(Error::Config(format!(
                "preset `{}` has a nodeless physical state; there is nothing to remove",
                preset.name
            )));
        }
        let source = Potential::sech_squared(a_tilde, beta, &preset.channel)?;
        let records = susy::iterate_removals(&source, &preset.channel, &preset.grid, removals)?;
        let deep_state = bound::solve_bound_state(
            &source,
            &preset.channel,
            &preset.grid,
            removals,
            bound::default_bracket(&source, &preset.grid),
        )?;
        let last = |kind| {
            records
                .iter()
                .rev()
                .find(|r| r.step_kind == kind)
                .map(|r| r.result.clone())
                .expect("at least one removal")
        };
        let intermediate_state = ground_state(&last(StepKind::Intermediate), preset)?;
        let pep_state = ground_state(&last(StepKind::PhaseEquivalent), preset)?;
        Ok(Self {
            preset: preset.clone(),
            a_tilde,
            beta,
            fit,
            source,
            records,
            deep_state,
            intermediate_state,
            pep_state,
        })
    }

    fn last_result(&self, kind: StepKind) -> &Potential {
        &self
            .records
            .iter()
            .rev()
            .find(|r| r.step_kind == kind)
            .expect("at least one removal")
            .result
    }

    pub fn intermediate(&self) -> &Potential {
        self.last_result(StepKind::Intermediate)
    }

    pub fn pep(&self) -> &Potential {
        self.last_result(StepKind::PhaseEquivalent)
    }

    pub fn spectra(&self) -> Result<ChainSpectra> {
        let p = &self.preset;
        let summaries = |v: &Potential| -> Result<Vec<BoundStateSummary>> {
            Ok(bound::bound_spectrum(v, &p.channel, &p.grid)?
                .iter()
                .map(BoundState::summary)
                .collect())
        };
        let analytic = (0..poschl_teller::bound_state_count(self.a_tilde))
            .map(|n| poschl_teller::analytic_levels(self.a_tilde, self.beta, &p.channel, n))
            .collect::<Result<Vec<f64>>>()?;
        Ok(ChainSpectra {
            analytic,
            deep: summaries(&self.source)?,
            intermediate: summaries(self.intermediate())?,
            pep: summaries(self.pep())?,
        })
    }

    pub fn phase_shifts(&self, energies: &[f64], r_match: f64) -> Result<ChainPhaseShifts> {
        let p = &self.preset;
        let sweep = |label: &str, v: &Potential| {
            PhaseShiftCurve::sweep(label, v, &p.channel, &p.grid, energies, r_match)
        };
        Ok(ChainPhaseShifts {
            deep: sweep("deep", &self.source)?,
            intermediate: sweep("intermediate", self.intermediate())?,
            pep: sweep("pep", self.pep())?,
            r_match,
        })
    }

    pub fn transfer_strengths(&self) -> TransferStrengths {
        TransferStrengths {
            deep: observables::zero_range_strength(&self.source, &self.deep_state, Description::Deep),
            pep: observables::zero_range_strength(self.pep(), &self.pep_state, Description::Pep),
        }
    }

    pub fn rms_radii(&self) -> RadiusSet {
        let f = self.preset.coordinate_factor;
        RadiusSet {
            deep: observables::rms_radius(&self.deep_state, f),
            intermediate: observables::rms_radius(&self.intermediate_state, f),
            pep: observables::rms_radius(&self.pep_state, f),
        }
    }

    /// Everything the `report` workflow emits. An empty `energies` leaves
    /// out the phase-shift section.
    pub fn report(&self, energies: &[f64], r_match: f64) -> Result<(ObservableReport, Option<ChainPhaseShifts>)> {
        let p = &self.preset;
        let rms = self.rms_radii();
        let charge = p.proton_radius.map(|rp| rms.map(|r| observables::charge_radius(rp, r)));
        let matter = p
            .core
            .map(|core| rms.map(|r| observables::matter_radius(core.mass_number, core.rms_radius, r)));
        let (transfer, ratio) = if p.transfer_vertex {
            let t = self.transfer_strengths();
            let ratio = observables::cross_section_ratio(&t.deep, &t.pep)?;
            (Some(t), Some(ratio))
        } else {
            (None, None)
        };
        let phases = if energies.is_empty() {
            None
        } else {
            Some(self.phase_shifts(energies, r_match)?)
        };
        let report = ObservableReport {
            system: p.name.clone(),
            a_tilde: self.a_tilde,
            beta_per_fm: self.beta,
            physical_energy_mev: self.deep_state.energy,
            removed_energies_mev: self.records.iter().step_by(2).map(|r| r.removed_energy).collect(),
            rms_fm: rms,
            charge_radius_fm: charge,
            matter_radius_fm: matter,
            transfer_strengths: transfer,
            cross_section_ratio: ratio,
            phase_shifts: phases.as_ref().map(ChainPhaseShifts::comparison).transpose()?,
            notes: self.reference_notes()?,
        };
        Ok((report, phases))
    }

    /// Compares a fit against the literature parameters of the preset.
    fn reference_notes(&self) -> Result<Vec<String>> {
        let p = &self.preset;
        let (Some(fit), Some((a_ref, b_ref))) = (&self.fit, p.reference_parameters) else {
            return Ok(Vec::new());
        };
        let n = p.physical_node_count;
        let mut notes = vec![format!(
            "fitted A_tilde = {:.6}, beta = {:.6} fm^-1 reproduce E = {:.6} MeV and rms = {:.6} fm",
            fit.a_tilde, fit.beta, fit.achieved_energy, fit.achieved_rms
        )];
        match poschl_teller::analytic_levels(a_ref, b_ref, &p.channel, n) {
            Ok(e_ref) => {
                let state = p.physical_state(a_ref, b_ref)?;
                let rms_ref = observables::rms_radius_unchecked(&state, p.coordinate_factor);
                let mut line = format!(
                    "reference A_tilde = {a_ref}, beta = {b_ref} fm^-1 give E = {e_ref:.6} MeV and rms = {rms_ref:.6} fm"
                );
                if (e_ref - fit.achieved_energy).abs() > 1e-3 * fit.achieved_energy.abs().max(1.0) {
                    line.push_str(" (inconsistent with the target binding energy)");
                }
                notes.push(line);
            }
            Err(_) => notes.push(format!(
                "reference A_tilde = {a_ref}, beta = {b_ref} fm^-1 support no state with {n} nodes"
            )),
        }
        Ok(notes)
    }
}
