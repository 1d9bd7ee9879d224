//! Numerov propagation of `u'' = Q(r) u` on the uniform mesh.
//!
//! `Q_k = (V(r_k) - E) / (hbar^2/2mu)` already contains any `c / r^2` origin
//! term. Outward runs start from the Frobenius form
//! `u = r^p (1 + a r^2)` with `a = Q_rem(0) / (2 (2p + 1))`, where
//! `Q_rem = Q - c / r^2`.

/// Magnitude at which an integration rescales everything computed so far.
const RESCALE_AT: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

#[derive(Debug, Clone)]
pub(crate) struct Propagation {
    /// Values for indices `0..=last` (outward) or `first..n` (inward); other
    /// entries are zero.
    pub u: Vec<f64>,
    /// Natural log of the factor dividing out rescalings: true `u` equals
    /// `u * exp(log_scale)`.
    pub log_scale: f64,
    /// Strict sign changes over the propagated range.
    pub nodes: usize,
}

pub(crate) fn series_coefficient(q: &[f64], h: f64, singular_coefficient: f64, p: f64) -> f64 {
    let r1 = h;
    let q_rem = q[0] - singular_coefficient / (r1 * r1);
    q_rem / (2.0 * (2.0 * p + 1.0))
}

#[inline]
fn start_value(r: f64, p: f64, a: f64) -> f64 {
    r.powf(p) * (1.0 + a * r * r)
}

struct SignTracker {
    last: f64,
    changes: usize,
}

impl SignTracker {
    fn new() -> Self {
        Self { last: 0.0, changes: 0 }
    }

    #[inline]
    fn push(&mut self, x: f64) {
        if x == 0.0 {
            return;
        }
        if self.last != 0.0 && (x > 0.0) != (self.last > 0.0) {
            self.changes += 1;
        }
        self.last = x;
    }
}

/// Outward integration from the origin through index `last` (inclusive).
pub(crate) fn outward(q: &[f64], h: f64, singular_coefficient: f64, p: f64, last: usize) -> Propagation {
    let n = q.len();
    assert!(last < n && last >= 1);
    let a = series_coefficient(q, h, singular_coefficient, p);
    let mut u = vec![0.0; n];
    u[0] = start_value(h, p, a);
    u[1] = start_value(2.0 * h, p, a);
    let mut signs = SignTracker::new();
    signs.push(u[0]);
    signs.push(u[1]);
    let h2 = h * h / 12.0;
    let mut log_scale = 0.0;
    for k in 1..last {
        let next = (2.0 * (1.0 + 5.0 * h2 * q[k]) * u[k] - (1.0 - h2 * q[k - 1]) * u[k - 1])
            / (1.0 - h2 * q[k + 1]);
        u[k + 1] = next;
        signs.push(next);
        if next.abs() > RESCALE_AT {
            for v in &mut u[..=k + 1] {
                *v *= RESCALE_BY;
            }
            log_scale -= RESCALE_BY.ln();
        }
    }
    Propagation {
        u,
        log_scale,
        nodes: signs.changes,
    }
}

/// Inward integration from the last mesh point down to index `first`,
/// starting from the decaying exponential `exp(-kappa r)` with
/// `kappa = sqrt(Q)` at the outer edge.
pub(crate) fn inward(q: &[f64], h: f64, first: usize) -> Propagation {
    let n = q.len();
    assert!(first + 2 <= n);
    let kappa = q[n - 1].max(0.0).sqrt();
    let mut u = vec![0.0; n];
    u[n - 1] = 1.0;
    u[n - 2] = (kappa * h).exp();
    let mut signs = SignTracker::new();
    signs.push(u[n - 1]);
    signs.push(u[n - 2]);
    let h2 = h * h / 12.0;
    let mut log_scale = 0.0;
    let mut k = n - 2;
    while k > first {
        let prev = (2.0 * (1.0 + 5.0 * h2 * q[k]) * u[k] - (1.0 - h2 * q[k + 1]) * u[k + 1])
            / (1.0 - h2 * q[k - 1]);
        u[k - 1] = prev;
        signs.push(prev);
        if prev.abs() > RESCALE_AT {
            for v in &mut u[k - 1..] {
                *v *= RESCALE_BY;
            }
            log_scale -= RESCALE_BY.ln();
        }
        k -= 1;
    }
    Propagation {
        u,
        log_scale,
        nodes: signs.changes,
    }
}

/// Numerov three-point derivative at interior index `k`:
/// `u'_k = [u_{k+1}(1 - h^2 Q_{k+1}/6) - u_{k-1}(1 - h^2 Q_{k-1}/6)] / 2h`.
#[inline]
pub(crate) fn derivative_at(u: &[f64], q: &[f64], h: f64, k: usize) -> f64 {
    let h6 = h * h / 6.0;
    (u[k + 1] * (1.0 - h6 * q[k + 1]) - u[k - 1] * (1.0 - h6 * q[k - 1])) / (2.0 * h)
}

/// Numerov derivative on the doubled stencil `k +- 2`.
#[inline]
fn derivative_wide_at(u: &[f64], q: &[f64], h: f64, k: usize) -> f64 {
    let h6 = 4.0 * h * h / 6.0;
    (u[k + 2] * (1.0 - h6 * q[k + 2]) - u[k - 2] * (1.0 - h6 * q[k - 2])) / (4.0 * h)
}

/// Derivative of a solution on the whole mesh: the Richardson combination
/// `(16 D(h) - D(2h)) / 15` of the Numerov formula in the interior, the
/// plain formula next to the ends, the Frobenius log-derivative
/// `p/r + 2 a r / (1 + a r^2)` at the first point and
/// `tail_log_derivative * u` at the last.
pub(crate) fn derivative(
    u: &[f64],
    q: &[f64],
    h: f64,
    singular_coefficient: f64,
    p: f64,
    tail_log_derivative: f64,
) -> Vec<f64> {
    let n = u.len();
    let mut du = vec![0.0; n];
    let a = series_coefficient(q, h, singular_coefficient, p);
    let r1 = h;
    du[0] = u[0] * (p / r1 + 2.0 * a * r1 / (1.0 + a * r1 * r1));
    du[1] = derivative_at(u, q, h, 1);
    for k in 2..n - 2 {
        du[k] = (16.0 * derivative_at(u, q, h, k) - derivative_wide_at(u, q, h, k)) / 15.0;
    }
    du[n - 2] = derivative_at(u, q, h, n - 2);
    du[n - 1] = tail_log_derivative * u[n - 1];
    du
}

/// Strict sign changes of `u`, ignoring exact zeros.
pub fn count_sign_changes(u: &[f64]) -> usize {
    let mut s = SignTracker::new();
    for &x in u {
        s.push(x);
    }
    s.changes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle_outward_is_sine() {
        // u'' = -k^2 u  ->  sin(kr)
        let h = 0.001;
        let k = 2.0;
        let q = vec![-k * k; 10_000];
        let prop = outward(&q, h, 0.0, 1.0, q.len() - 1);
        let scale = prop.u[99] / (k * 0.1).sin();
        for idx in [500usize, 4000, 9000] {
            let r = (idx + 1) as f64 * h;
            let expect = scale * (k * r).sin();
            assert!((prop.u[idx] - expect).abs() < 1e-9 * scale.abs(), "{idx}");
        }
    }

    #[test]
    fn inward_decays_and_rescales() {
        let h = 0.01;
        let q = vec![25.0; 20_000];
        let prop = inward(&q, h, 0);
        assert_eq!(prop.nodes, 0);
        assert!(prop.log_scale > 0.0);
        let d = derivative_at(&prop.u, &q, h, 10_000) / prop.u[10_000];
        assert!((d + 5.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn sign_changes_ignore_zeros() {
        assert_eq!(count_sign_changes(&[1.0, 0.0, -1.0, 0.0, 0.0, -2.0, 3.0]), 2);
        assert_eq!(count_sign_changes(&[0.0, 0.0]), 0);
    }
}
