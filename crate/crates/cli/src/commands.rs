use std::io::Write;

use serde::Serialize;

use susy_pep::bound;
use susy_pep::fitting::{self, SystemPreset};
use susy_pep::io::format_value;
use susy_pep::observables::{self, ObservableReport, TransferStrength};
use susy_pep::pipeline::{Chain, ChainPhaseShifts};
use susy_pep::poschl_teller;
use susy_pep::susy::{self, RecordSidecar};
use susy_pep::{Error, Potential, RadialGrid, Result};

use crate::output::OutputDir;
use crate::{Command, Common, Sweep};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Fit(common) => fit(&common),
        Command::Spectrum(common) => spectrum(&common),
        Command::Partner { common, k } => partner(&common, k),
        Command::Report { common, sweep } => report(&common, sweep),
        Command::Phase { common, sweep } => phase(&common, sweep),
        Command::TransferRatio(common) => transfer_ratio(&common),
    }
}

fn load_preset(common: &Common) -> Result<SystemPreset> {
    let preset = match (&common.preset, &common.config) {
        (Some(name), None) => SystemPreset::by_name(name.key())?,
        (None, Some(path)) => SystemPreset::from_config_file(path)?,
        _ => return Err(Error::Config("give exactly one of --preset and --config".into())),
    };
    if common.step.is_none() && common.rmax.is_none() {
        return Ok(preset);
    }
    let step = common.step.unwrap_or(preset.grid.step());
    let r_max = common.rmax.unwrap_or(preset.grid.r_max());
    let grid = RadialGrid::new(step, r_max).map_err(|e| Error::Config(e.to_string()))?;
    Ok(preset.with_grid(grid))
}

fn energies(sweep: &Sweep) -> Result<Vec<f64>> {
    if sweep.estep == 0.0 {
        return Ok(Vec::new());
    }
    if !(sweep.emin > 0.0 && sweep.emax >= sweep.emin && sweep.estep > 0.0) {
        return Err(Error::Config(format!(
            "energy sweep needs 0 < emin <= emax and estep > 0, got {} {} {}",
            sweep.emin, sweep.emax, sweep.estep
        )));
    }
    Ok(observables::energy_sweep(sweep.emin, sweep.emax, sweep.estep))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    susy_pep::io::write_json(std::io::stdout().lock(), value)
}

fn fit(common: &Common) -> Result<()> {
    let preset = load_preset(common)?;
    let result = fitting::fit_parameters(&preset, fitting::DEFAULT_BETA_BRACKET)?;
    let mut out = OutputDir::create(&common.out, common.format)?;
    out.json("fit.json", &result)?;
    out.finish()?;
    print_json(&result)
}

#[derive(Serialize)]
struct Level {
    n: usize,
    #[serde(rename = "analytic_MeV")]
    analytic: f64,
    #[serde(rename = "numerical_MeV")]
    numerical: f64,
}

#[derive(Serialize)]
struct Spectrum {
    system: String,
    a_tilde: f64,
    beta_per_fm: f64,
    depth_mev: f64,
    levels: Vec<Level>,
}

fn spectrum(common: &Common) -> Result<()> {
    let preset = load_preset(common)?;
    let (a_tilde, beta, _) = preset.resolve()?;
    let v = Potential::sech_squared(a_tilde, beta, &preset.channel)?;
    let numerical = bound::bound_spectrum(&v, &preset.channel, &preset.grid)?;
    let levels = numerical
        .iter()
        .map(|s| {
            Ok(Level {
                n: s.nodes,
                analytic: poschl_teller::analytic_levels(a_tilde, beta, &preset.channel, s.nodes)?,
                numerical: s.energy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spectrum = Spectrum {
        system: preset.name.clone(),
        a_tilde,
        beta_per_fm: beta,
        depth_mev: poschl_teller::analytic_depth(a_tilde, beta, &preset.channel),
        levels,
    };
    let mut out = OutputDir::create(&common.out, common.format)?;
    out.csv("spectrum.csv", |buf| {
        writeln!(buf, "n,E_analytic_MeV,E_numerical_MeV")?;
        for l in &spectrum.levels {
            writeln!(buf, "{},{},{}", l.n, format_value(l.analytic), format_value(l.numerical))?;
        }
        Ok(())
    })?;
    out.json("spectrum.json", &spectrum)?;
    out.finish()?;
    print_json(&spectrum)
}

#[derive(Serialize)]
struct PartnerRecord {
    removal: usize,
    file: String,
    #[serde(flatten)]
    sidecar: RecordSidecar,
    #[serde(rename = "levels_MeV")]
    levels: Vec<f64>,
}

fn partner(common: &Common, k: Option<usize>) -> Result<()> {
    let preset = load_preset(common)?;
    let (a_tilde, beta, _) = preset.resolve()?;
    let k = k.unwrap_or(preset.physical_node_count);
    let grid = preset.grid;
    let source = Potential::sech_squared(a_tilde, beta, &preset.channel)?;
    let records = susy::iterate_removals(&source, &preset.channel, &grid, k)?;

    let mut out = OutputDir::create(&common.out, common.format)?;
    out.csv("V1.csv", |buf| source.write_csv(&grid, buf))?;
    let mut summary = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let removal = i / 2 + 1;
        let label = match record.step_kind {
            susy::StepKind::Intermediate => "V2",
            susy::StepKind::PhaseEquivalent => "V3",
        };
        let file = if k == 1 || removal == k {
            format!("{label}.csv")
        } else {
            format!("{label}_step{removal}.csv")
        };
        out.csv(&file, |buf| record.write_csv(&grid, buf))?;
        let levels = bound::bound_spectrum(&record.result, &preset.channel, &grid)?
            .iter()
            .map(|s| s.energy)
            .collect();
        summary.push(PartnerRecord {
            removal,
            file,
            sidecar: record.sidecar(),
            levels,
        });
    }
    out.json("records.json", &summary)?;
    out.finish()?;
    print_json(&summary)
}

fn write_phase_files(out: &mut OutputDir, phases: &ChainPhaseShifts) -> Result<()> {
    for curve in [&phases.deep, &phases.intermediate, &phases.pep] {
        out.csv(&format!("phase_{}.csv", curve.label), |buf| curve.write_csv(buf))?;
    }
    Ok(())
}

fn report(common: &Common, sweep: Sweep) -> Result<()> {
    let preset = load_preset(common)?;
    let energies = energies(&sweep)?;
    let chain = Chain::from_preset(&preset)?;
    let (report, phases): (ObservableReport, _) = chain.report(&energies, sweep.rmatch)?;

    let mut out = OutputDir::create(&common.out, common.format)?;
    if let Some(fit) = &chain.fit {
        out.json("fit.json", fit)?;
    }
    out.json("report.json", &report)?;
    out.csv("wavefunctions.csv", |buf| {
        let r: Vec<f64> = preset.grid.points().collect();
        susy_pep::io::write_columns(
            buf,
            &["r_fm", "u_deep", "u_intermediate", "u_pep"],
            &[&r, &chain.deep_state.u, &chain.intermediate_state.u, &chain.pep_state.u],
        )
    })?;
    if let Some(phases) = &phases {
        write_phase_files(&mut out, phases)?;
    }
    out.finish()?;
    print_json(&report)
}

fn phase(common: &Common, sweep: Sweep) -> Result<()> {
    let preset = load_preset(common)?;
    let energies = energies(&sweep)?;
    if energies.is_empty() {
        return Err(Error::Config("the phase command needs a non-empty energy sweep".into()));
    }
    let chain = Chain::from_preset(&preset)?;
    let phases = chain.phase_shifts(&energies, sweep.rmatch)?;
    let comparison = phases.comparison()?;
    let mut out = OutputDir::create(&common.out, common.format)?;
    write_phase_files(&mut out, &phases)?;
    out.json("phase.json", &comparison)?;
    out.finish()?;
    print_json(&comparison)
}

#[derive(Serialize)]
struct TransferSummary {
    system: String,
    deep: TransferStrength,
    pep: TransferStrength,
    ratio: f64,
}

fn transfer_ratio(common: &Common) -> Result<()> {
    let preset = load_preset(common)?;
    let chain = Chain::from_preset(&preset)?;
    let strengths = chain.transfer_strengths();
    let summary = TransferSummary {
        system: preset.name.clone(),
        ratio: observables::cross_section_ratio(&strengths.deep, &strengths.pep)?,
        deep: strengths.deep,
        pep: strengths.pep,
    };
    let mut out = OutputDir::create(&common.out, common.format)?;
    out.json("transfer.json", &summary)?;
    out.finish()?;
    print_json(&summary)
}
