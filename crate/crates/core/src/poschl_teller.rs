//! Closed forms for the half-line sech^2 well `V(r) = -V0 sech^2(beta r)`.
//!
//! With `W(r) = A tanh(beta r)` and `a = beta hbar / sqrt(2 mu)` the partner
//! pair is
//!
//! ```text
//! V1(r; A) = A^2 - A (A + a) sech^2(beta r)
//! V2(r; A) = A^2 - A (A - a) sech^2(beta r)
//! ```
//!
//! and `V2(r; A) = V1(r; A - a) + A^2 - (A - a)^2`. Writing `A_tilde = A / a`,
//! the states of the original well that vanish at the origin are the odd
//! states of the full-line problem:
//!
//! ```text
//! E(n) = -(hbar^2/2mu) (A_tilde - 2n - 1)^2 beta^2,   depth = (hbar^2/2mu) A_tilde (A_tilde + 1) beta^2
//! ```

use crate::error::{Error, Result};
use crate::grid::ChannelConstants;

/// Energy (MeV) of the `n`-th half-line state.
pub fn analytic_levels(a_tilde: f64, beta: f64, channel: &ChannelConstants, n: usize) -> Result<f64> {
    let x = a_tilde - 2.0 * n as f64 - 1.0;
    if !(x > 0.0) {
        return Err(Error::NoSuchState { a_tilde, n });
    }
    Ok(-channel.hbar2_over_2mu * x * x * beta * beta)
}

/// Number of half-line bound states, i.e. the `n` with `A_tilde - 2n - 1 > 0`.
pub fn bound_state_count(a_tilde: f64) -> usize {
    if a_tilde <= 1.0 {
        return 0;
    }
    let m = ((a_tilde - 1.0) / 2.0).ceil() as usize;
    // exact odd-integer A_tilde puts the top state at threshold
    (0..=m).filter(|&n| a_tilde - 2.0 * n as f64 - 1.0 > 0.0).count()
}

/// Well depth `(hbar^2/2mu) A_tilde (A_tilde + 1) beta^2` in MeV.
pub fn analytic_depth(a_tilde: f64, beta: f64, channel: &ChannelConstants) -> f64 {
    channel.hbar2_over_2mu * a_tilde * (a_tilde + 1.0) * beta * beta
}

/// `beta hbar / sqrt(2 mu)` in sqrt(MeV).
#[inline]
pub fn strength_quantum(beta: f64, channel: &ChannelConstants) -> f64 {
    beta * channel.hbar_over_sqrt_2mu()
}

/// Superpotential strength `A` (sqrt MeV) reproducing depth `V0 = A (A + a)`.
pub fn strength_from_depth(depth: f64, beta: f64, channel: &ChannelConstants) -> f64 {
    let a = strength_quantum(beta, channel);
    -0.5 * a + 0.5 * (a * a + 4.0 * depth).sqrt()
}

/// Depth `A (A + a)` generated by strength `A`.
pub fn depth_from_strength(strength: f64, beta: f64, channel: &ChannelConstants) -> f64 {
    strength * (strength + strength_quantum(beta, channel))
}

#[inline]
pub(crate) fn sech(x: f64) -> f64 {
    let x = x.abs();
    let e = (-x).exp();
    2.0 * e / (1.0 + e * e)
}

/// The superpotential `W(r) = A tanh(beta r)` and the partner pair it
/// generates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpotentialPair {
    /// `A` in sqrt(MeV).
    pub strength: f64,
    pub beta: f64,
    quantum: f64,
}

impl SuperpotentialPair {
    pub fn new(strength: f64, beta: f64, channel: &ChannelConstants) -> Result<Self> {
        if !(strength > 0.0) || !(beta > 0.0) {
            return Err(Error::InvalidInput(format!(
                "superpotential needs A > 0 and beta > 0, got A = {strength}, beta = {beta}"
            )));
        }
        Ok(Self {
            strength,
            beta,
            quantum: strength_quantum(beta, channel),
        })
    }

    pub fn from_a_tilde(a_tilde: f64, beta: f64, channel: &ChannelConstants) -> Result<Self> {
        Self::new(a_tilde * strength_quantum(beta, channel), beta, channel)
    }

    pub fn a_tilde(&self) -> f64 {
        self.strength / self.quantum
    }

    pub fn superpotential(&self, r: f64) -> f64 {
        self.strength * (self.beta * r).tanh()
    }

    /// `W^2 - (hbar/sqrt(2mu)) W'`.
    pub fn v1(&self, r: f64) -> f64 {
        let s = sech(self.beta * r);
        self.strength * self.strength - self.strength * (self.strength + self.quantum) * s * s
    }

    /// `W^2 + (hbar/sqrt(2mu)) W'`.
    pub fn v2(&self, r: f64) -> f64 {
        let s = sech(self.beta * r);
        self.strength * self.strength - self.strength * (self.strength - self.quantum) * s * s
    }

    /// Partner with the strength lowered by one quantum.
    pub fn shifted(&self) -> Option<Self> {
        let strength = self.strength - self.quantum;
        (strength > 0.0).then_some(Self {
            strength,
            beta: self.beta,
            quantum: self.quantum,
        })
    }

    /// The r-independent remainder `A^2 - (A - a)^2`.
    pub fn remainder(&self) -> f64 {
        let lowered = self.strength - self.quantum;
        self.strength * self.strength - lowered * lowered
    }
}

/// `V2(r; A) - V1(r; A - a) - R(A)`; vanishes identically for the sech^2
/// family.
pub fn shape_invariance_residual(
    strength: f64,
    beta: f64,
    channel: &ChannelConstants,
    r: f64,
) -> Result<f64> {
    let pair = SuperpotentialPair::new(strength, beta, channel)?;
    let lowered = pair.shifted().ok_or_else(|| {
        Error::Precondition(format!(
            "A = {strength} does not exceed beta hbar/sqrt(2mu) = {}",
            strength_quantum(beta, channel)
        ))
    })?;
    Ok(pair.v2(r) - lowered.v1(r) - pair.remainder())
}

/// Unnormalized closed-form eigenfunctions for `n = 0, 1`:
///
/// ```text
/// n = 0:  tanh(x) sech^(A-1)(x)
/// n = 1:  tanh(x) sech^(A-3)(x) [ (2/3)(A - 1/2) tanh^2(x) - 1 ]
/// ```
///
/// with `x = beta r`, from the associated Legendre functions
/// `P_A^(A-1)(tanh x)` and `P_A^(A-3)(tanh x)`. The `n = 1` form is negative
/// at small `r` and positive in the tail.
pub fn pt_wavefunction(a_tilde: f64, beta: f64, n: usize, r: f64) -> Result<f64> {
    if a_tilde - 2.0 * n as f64 - 1.0 <= 0.0 {
        return Err(Error::NoSuchState { a_tilde, n });
    }
    let x = beta * r;
    let t = x.tanh();
    let s = sech(x);
    match n {
        0 => Ok(t * s.powf(a_tilde - 1.0)),
        1 => Ok(t * s.powf(a_tilde - 3.0) * ((2.0 / 3.0) * (a_tilde - 0.5) * t * t - 1.0)),
        _ => Err(Error::InvalidInput(format!(
            "closed form is available only for n = 0, 1 (got n = {n}); use the numerical solver"
        ))),
    }
}

/// Radius of the interior zero of the closed-form `n = 1` state.
pub fn pt_first_node(a_tilde: f64, beta: f64) -> Result<f64> {
    if a_tilde <= 3.0 {
        return Err(Error::NoSuchState { a_tilde, n: 1 });
    }
    let t = (3.0 / (2.0 * a_tilde - 1.0)).sqrt();
    Ok(t.atanh() / beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn deuteron_levels() {
        let ch = ChannelConstants::deuteron();
        let e1 = analytic_levels(3.146, 1.587, &ch, 1).unwrap();
        let e0 = analytic_levels(3.146, 1.587, &ch, 0).unwrap();
        assert!((e1 + 2.226).abs() < 2e-3, "{e1}");
        assert!((e0 + 481.0).abs() < 1.0, "{e0}");
        assert!(matches!(
            analytic_levels(3.146, 1.587, &ch, 2),
            Err(Error::NoSuchState { n: 2, .. })
        ));
    }

    #[test]
    fn threshold_state() {
        let ch = ChannelConstants::deuteron();
        let eps = 1e-4;
        let e = analytic_levels(1.0 + eps, 0.8, &ch, 0).unwrap();
        assert_relative_eq!(e, -41.47 * eps * eps * 0.64, max_relative = 1e-9);
        assert_eq!(bound_state_count(1.0), 0);
        assert_eq!(bound_state_count(3.0), 1);
        assert_eq!(bound_state_count(3.146), 2);
        assert_eq!(bound_state_count(5.945), 3);
    }

    #[test]
    fn depths() {
        let alpha = analytic_depth(5.945, 0.535, &ChannelConstants::alpha_alpha());
        assert!((alpha - 122.694).abs() / 122.694 < 5e-3, "{alpha}");
        assert_eq!(analytic_depth(0.0, 0.535, &ChannelConstants::alpha_alpha()), 0.0);
        let deut = analytic_depth(3.146, 1.587, &ChannelConstants::deuteron());
        assert!((deut - 1362.0).abs() < 1.0, "{deut}");
    }

    #[test]
    fn shape_invariance_holds_on_the_grid() {
        let ch = ChannelConstants::deuteron();
        let pair = SuperpotentialPair::from_a_tilde(3.146, 1.587, &ch).unwrap();
        let depth = analytic_depth(3.146, 1.587, &ch);
        for k in 1..=3500 {
            let r = 0.01 * k as f64;
            let res = shape_invariance_residual(pair.strength, 1.587, &ch, r).unwrap();
            assert!(res.abs() < 1e-10 * depth, "r = {r}: {res}");
        }
        let ch_a = ChannelConstants::alpha_alpha();
        let pair = SuperpotentialPair::from_a_tilde(5.945, 0.535, &ch_a).unwrap();
        assert!(shape_invariance_residual(pair.strength, 0.535, &ch_a, 1.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn shape_invariance_needs_room_for_the_shift() {
        let ch = ChannelConstants::deuteron();
        let a = strength_quantum(1.0, &ch);
        assert!(shape_invariance_residual(0.5 * a, 1.0, &ch, 1.0).is_err());
    }

    #[test]
    fn partner_v1_is_shifted_original_well() {
        let ch = ChannelConstants::deuteron();
        let pair = SuperpotentialPair::from_a_tilde(3.146, 1.587, &ch).unwrap();
        let depth = analytic_depth(3.146, 1.587, &ch);
        let a2 = pair.strength * pair.strength;
        for r in [0.1, 0.5, 2.0] {
            let s = sech(1.587 * r);
            assert_relative_eq!(pair.v1(r) - a2, -depth * s * s, max_relative = 1e-12);
        }
    }

    #[test]
    fn node_of_first_excited_state() {
        let r = pt_first_node(3.146, 1.587).unwrap();
        assert!(pt_wavefunction(3.146, 1.587, 1, r - 1e-6).unwrap() < 0.0);
        assert!(pt_wavefunction(3.146, 1.587, 1, r + 1e-6).unwrap() > 0.0);
        assert!(pt_wavefunction(3.146, 1.587, 2, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn depth_strength_round_trip(depth in 1.0f64..2000.0, beta in 0.2f64..5.0) {
            let ch = ChannelConstants::deuteron();
            let a = strength_from_depth(depth, beta, &ch);
            prop_assert!(a > 0.0);
            let back = depth_from_strength(a, beta, &ch);
            prop_assert!(((back - depth) / depth).abs() < 1e-12);
        }

        #[test]
        fn levels_increase_with_n(a_tilde in 1.01f64..12.0, beta in 0.2f64..3.0) {
            let ch = ChannelConstants::be11();
            let count = bound_state_count(a_tilde);
            let levels: Vec<f64> = (0..count)
                .map(|n| analytic_levels(a_tilde, beta, &ch, n).unwrap())
                .collect();
            prop_assert!(levels.iter().all(|&e| e < 0.0));
            prop_assert!(levels.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(analytic_levels(a_tilde, beta, &ch, count).is_err());
        }
    }
}
