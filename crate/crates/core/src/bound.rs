//! Radial bound states and fixed-energy regular solutions.
//!
//! Eigenvalues come from Numerov shooting: node counting of the outward
//! solution isolates the requested level, then bisection on the
//! log-derivative mismatch between the outward solution and an inward
//! solution started from `exp(-kappa r)` pins it down at the outermost
//! classical turning point.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ChannelConstants, RadialGrid};
use crate::numerov::{self, count_sign_changes};
use crate::poschl_teller;
use crate::potential::Potential;

/// Absolute energy resolution of the eigenvalue search (MeV).
pub const ENERGY_TOLERANCE: f64 = 1e-10;

const MAX_ITERATIONS: usize = 400;

/// Quadrature used to normalize bound states.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    Simpson,
}

impl Quadrature {
    pub fn integrate(self, grid: &RadialGrid, f: &[f64]) -> f64 {
        match self {
            Quadrature::Trapezoid => grid.integrate(f),
            Quadrature::Simpson => grid.integrate_simpson(f),
        }
    }
}

/// Normalized eigenstate with `u > 0` in the asymptotic tail.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    pub nodes: usize,
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    /// `du/dr` on the mesh.
    pub du: Vec<f64>,
    /// `sqrt(-E / (hbar^2/2mu))`.
    pub kappa: f64,
    /// `u ~ r^p` near the origin.
    pub origin_power: f64,
}

/// JSON summary of a bound state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateSummary {
    #[serde(rename = "energy_MeV")]
    pub energy_mev: f64,
    pub nodes: usize,
    pub kappa_per_fm: f64,
    pub norm_residual: f64,
}

impl BoundState {
    pub fn norm(&self) -> f64 {
        let sq: Vec<f64> = self.u.iter().map(|u| u * u).collect();
        self.grid.integrate(&sq)
    }

    pub fn summary(&self) -> BoundStateSummary {
        BoundStateSummary {
            energy_mev: self.energy,
            nodes: self.nodes,
            kappa_per_fm: self.kappa,
            norm_residual: self.norm() - 1.0,
        }
    }

    /// `-u'/u` at radius `r`.
    pub fn decay_rate_at(&self, r: f64) -> f64 {
        let k = self.grid.index_of(r);
        -self.du[k] / self.u[k]
    }

    /// Radii where `u` changes sign, located by linear interpolation.
    pub fn node_positions(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.u.len() - 1 {
            let (a, b) = (self.u[k], self.u[k + 1]);
            if a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0) {
                let t = a / (a - b);
                out.push(self.grid.r(k) + t * self.grid.step());
            }
        }
        out
    }

    /// `<self|other>` on the shared mesh.
    pub fn overlap(&self, other: &BoundState) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("states live on different grids".into()));
        }
        let prod: Vec<f64> = self.u.iter().zip(&other.u).map(|(a, b)| a * b).collect();
        Ok(self.grid.integrate(&prod))
    }

    /// Writes `r_fm,u` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let r: Vec<f64> = self.grid.points().collect();
        crate::io::write_columns(out, &["r_fm", "u"], &[&r, &self.u])
    }
}

/// Solution regular at the origin for a fixed energy, not normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularSolution {
    pub energy: f64,
    pub grid: RadialGrid,
    /// Stored values; the solution is `u * exp(log_scale)` with
    /// `u(r_1) = r_1^p (1 + a r_1^2)` before rescaling.
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub log_scale: f64,
    pub origin_power: f64,
}

impl RegularSolution {
    /// `u'/u` at mesh index `k`.
    pub fn log_derivative(&self, k: usize) -> f64 {
        self.du[k] / self.u[k]
    }

    pub fn nodes(&self) -> usize {
        count_sign_changes(&self.u)
    }
}

/// Strict sign changes of `u` over the mesh.
pub fn count_nodes(u: &[f64]) -> usize {
    count_sign_changes(u)
}

/// Default search window `[-1.05 depth, -1e-6]` MeV.
pub fn default_bracket(potential: &Potential, grid: &RadialGrid) -> (f64, f64) {
    let depth = potential.depth(grid).max(1e-3);
    (-1.05 * depth, -1e-6)
}

/// Potential sampled as `V / (hbar^2/2mu)` with the singular strength.
struct Problem {
    grid: RadialGrid,
    v_scaled: Vec<f64>,
    hbar2_over_2mu: f64,
    singular_coefficient: f64,
    origin_power: f64,
}

impl Problem {
    fn new(potential: &Potential, channel: &ChannelConstants, grid: &RadialGrid) -> Self {
        let c = channel.hbar2_over_2mu;
        Self {
            grid: *grid,
            v_scaled: potential.sample(grid).into_iter().map(|v| v / c).collect(),
            hbar2_over_2mu: c,
            singular_coefficient: potential.singular_coefficient(),
            origin_power: potential.origin_power(),
        }
    }

    fn q(&self, energy: f64) -> Vec<f64> {
        let e = energy / self.hbar2_over_2mu;
        self.v_scaled.iter().map(|v| v - e).collect()
    }

    fn outward(&self, q: &[f64], last: usize) -> numerov::Propagation {
        numerov::outward(q, self.grid.step(), self.singular_coefficient, self.origin_power, last)
    }

    /// Nodes of the outward solution over the whole mesh; equals the number
    /// of Dirichlet-box levels below `energy`.
    fn box_nodes(&self, energy: f64) -> usize {
        let q = self.q(energy);
        self.outward(&q, q.len() - 1).nodes
    }

    /// Outermost mesh index inside the classically allowed region.
    fn turning_point(&self, energy: f64) -> usize {
        let n = self.grid.len();
        let q = self.q(energy);
        let k = q.iter().rposition(|&x| x < 0.0).unwrap_or(n / 2);
        k.clamp(2, n - 4)
    }

    /// True when the eigenvalue with `target` nodes lies above `energy`.
    fn below_eigenvalue(&self, energy: f64, target: usize, m: usize) -> bool {
        let q = self.q(energy);
        let out = self.outward(&q, m + 1);
        let nodes = count_sign_changes(&out.u[..=m]);
        if nodes != target {
            return nodes < target;
        }
        let inw = numerov::inward(&q, self.grid.step(), m - 1);
        // a node outside the matching point means the energy has passed
        // into the next level's territory
        if inw.nodes > 0 {
            return false;
        }
        let h = self.grid.step();
        let y_out = numerov::derivative_at(&out.u, &q, h, m) / out.u[m];
        let y_in = numerov::derivative_at(&inw.u, &q, h, m) / inw.u[m];
        y_out > y_in
    }

    fn assemble(&self, energy: f64, m: usize, quadrature: Quadrature) -> BoundState {
        let q = self.q(energy);
        let h = self.grid.step();
        let n = q.len();
        let out = self.outward(&q, m + 1);
        let inw = numerov::inward(&q, h, m - 1);
        let scale_in = out.u[m] / inw.u[m];
        let mut u: Vec<f64> = (0..n)
            .map(|k| if k <= m { out.u[k] } else { inw.u[k] * scale_in })
            .collect();
        let kappa = (-energy / self.hbar2_over_2mu).max(0.0).sqrt();
        normalize(&self.grid, &mut u, quadrature);
        let du = numerov::derivative(&u, &q, h, self.singular_coefficient, self.origin_power, -kappa);
        BoundState {
            energy,
            nodes: count_sign_changes(&u),
            grid: self.grid,
            u,
            du,
            kappa,
            origin_power: self.origin_power,
        }
    }
}

fn normalize(grid: &RadialGrid, u: &mut [f64], quadrature: Quadrature) {
    let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
    let norm = quadrature.integrate(grid, &sq).sqrt();
    let sign = if u[u.len() - 1] < 0.0 { -1.0 } else { 1.0 };
    for x in u.iter_mut() {
        *x *= sign / norm;
    }
}

/// Finds the bound state with `target_nodes` interior nodes inside
/// `bracket = (lo, hi)` MeV.
pub fn solve_bound_state(
    potential: &Potential,
    channel: &ChannelConstants,
    grid: &RadialGrid,
    target_nodes: usize,
    bracket: (f64, f64),
) -> Result<BoundState> {
    solve_bound_state_with(potential, channel, grid, target_nodes, bracket, Quadrature::Trapezoid)
}

pub fn solve_bound_state_with(
    potential: &Potential,
    channel: &ChannelConstants,
    grid: &RadialGrid,
    target_nodes: usize,
    bracket: (f64, f64),
    quadrature: Quadrature,
) -> Result<BoundState> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(hi < 0.0) {
        return Err(Error::InvalidInput(format!(
            "energy bracket must satisfy lo < hi < 0, got [{lo}, {hi}]"
        )));
    }
    let problem = Problem::new(potential, channel, grid);

    let lo_nodes = problem.box_nodes(lo);
    let hi_nodes = problem.box_nodes(hi);
    if lo_nodes > target_nodes || hi_nodes <= target_nodes {
        return Err(Error::EnergyBracket {
            lo,
            hi,
            target: target_nodes,
            lo_nodes,
            hi_nodes,
        });
    }
    let (outer_lo, outer_hi) = (lo, hi);

    // isolate the level by node counting
    let mut iterations = 0;
    let (mut n_lo, mut n_hi) = (lo_nodes, hi_nodes);
    while !(n_lo == target_nodes && n_hi == target_nodes + 1) {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                what: "node-count bracketing",
                iterations,
            });
        }
        let mid = 0.5 * (lo + hi);
        let n_mid = problem.box_nodes(mid);
        if n_mid <= target_nodes {
            lo = mid;
            n_lo = n_mid;
        } else {
            hi = mid;
            n_hi = n_mid;
        }
    }

    let m = problem.turning_point(0.5 * (lo + hi));

    // the box level sits slightly above the true one; widen until the
    // matching predicate brackets it
    let mut width = (hi - lo).max(1e-6);
    while !problem.below_eigenvalue(lo, target_nodes, m) {
        lo = (lo - width).max(outer_lo);
        width *= 2.0;
        if lo <= outer_lo {
            lo = outer_lo;
            break;
        }
    }
    let mut width = (hi - lo).max(1e-6);
    while problem.below_eigenvalue(hi, target_nodes, m) {
        hi = (hi + width).min(outer_hi);
        width *= 2.0;
        if hi >= outer_hi {
            hi = outer_hi;
            break;
        }
    }
    if !problem.below_eigenvalue(lo, target_nodes, m) || problem.below_eigenvalue(hi, target_nodes, m) {
        return Err(Error::NoConvergence {
            what: "log-derivative matching",
            iterations: 0,
        });
    }

    let mut iterations = 0;
    while hi - lo > ENERGY_TOLERANCE {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                what: "log-derivative matching",
                iterations,
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if problem.below_eigenvalue(mid, target_nodes, m) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let state = problem.assemble(0.5 * (lo + hi), m, quadrature);
    if state.nodes != target_nodes {
        return Err(Error::NoConvergence {
            what: "eigenstate node check",
            iterations,
        });
    }
    Ok(state)
}

/// Every bound state in the default bracket, ordered by energy.
pub fn bound_spectrum(
    potential: &Potential,
    channel: &ChannelConstants,
    grid: &RadialGrid,
) -> Result<Vec<BoundState>> {
    let bracket = default_bracket(potential, grid);
    let problem = Problem::new(potential, channel, grid);
    let count = problem.box_nodes(bracket.1) - problem.box_nodes(bracket.0);
    let first = problem.box_nodes(bracket.0);
    (first..first + count)
        .map(|n| solve_bound_state(potential, channel, grid, n, bracket))
        .collect()
}

/// Number of bound states inside the default bracket.
pub fn count_bound_states(potential: &Potential, channel: &ChannelConstants, grid: &RadialGrid) -> usize {
    let (lo, hi) = default_bracket(potential, grid);
    let problem = Problem::new(potential, channel, grid);
    problem.box_nodes(hi).saturating_sub(problem.box_nodes(lo))
}

/// Regular solution at `energy` (either sign), integrated over the whole
/// mesh with log-scaling against overflow.
pub fn solve_at_energy(
    potential: &Potential,
    channel: &ChannelConstants,
    grid: &RadialGrid,
    energy: f64,
) -> RegularSolution {
    let problem = Problem::new(potential, channel, grid);
    let q = problem.q(energy);
    let h = grid.step();
    let prop = problem.outward(&q, q.len() - 1);
    let n = q.len();
    let tail = {
        let k = n - 2;
        numerov::derivative_at(&prop.u, &q, h, k) / prop.u[k]
    };
    let du = numerov::derivative(
        &prop.u,
        &q,
        h,
        problem.singular_coefficient,
        problem.origin_power,
        tail,
    );
    RegularSolution {
        energy,
        grid: *grid,
        u: prop.u,
        du,
        log_scale: prop.log_scale,
        origin_power: problem.origin_power,
    }
}

/// Closed-form sech^2 eigenstate for `n = 0, 1`, normalized on `grid`.
pub fn analytic_pt_state(
    a_tilde: f64,
    beta: f64,
    channel: &ChannelConstants,
    grid: &RadialGrid,
    n: usize,
) -> Result<BoundState> {
    let energy = poschl_teller::analytic_levels(a_tilde, beta, channel, n)?;
    let mut u = grid
        .points()
        .map(|r| poschl_teller::pt_wavefunction(a_tilde, beta, n, r))
        .collect::<Result<Vec<f64>>>()?;
    normalize(grid, &mut u, Quadrature::Trapezoid);
    let potential = Potential::sech_squared(a_tilde, beta, channel)?;
    let problem = Problem::new(&potential, channel, grid);
    let q = problem.q(energy);
    let kappa = (-energy / channel.hbar2_over_2mu).sqrt();
    let du = numerov::derivative(&u, &q, grid.step(), 0.0, 1.0, -kappa);
    Ok(BoundState {
        energy,
        nodes: count_sign_changes(&u),
        grid: *grid,
        u,
        du,
        kappa,
        origin_power: 1.0,
    })
}
