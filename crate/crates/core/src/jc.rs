//! Single-cavity Jaynes-Cummings algebra.
//!
//! A cavity of frequency `omega` holds a two-level atom with transition energy
//! `epsilon`, coupled with strength `beta`. Within the `n`-excitation manifold
//! `{|g,n>, |e,n-1>}` the Hamiltonian is the 2x2 matrix
//!
//! ```text
//! [[ n*omega,     beta*sqrt(n)              ],
//!  [ beta*sqrt(n), (n-1)*omega + epsilon    ]]
//! ```
//!
//! whose eigenvectors are the dressed states `|-,n>` and `|+,n>`.

use crate::error::{invalid, Result};
use crate::Error;

/// Physical constants of one cavity (energy units, hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteParams {
    omega: f64,
    epsilon: f64,
    beta: f64,
}

impl SiteParams {
    pub fn new(omega: f64, epsilon: f64, beta: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        if !epsilon.is_finite() {
            return Err(invalid("epsilon", "must be finite"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(invalid("beta", "must be finite and > 0"));
        }
        Ok(Self {
            omega,
            epsilon,
            beta,
        })
    }

    /// Site with detuning `delta = omega - epsilon`.
    pub fn with_detuning(omega: f64, delta: f64, beta: f64) -> Result<Self> {
        Self::new(omega, omega - delta, beta)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.omega - self.epsilon
    }

    /// Shift cavity and atom by the same constant (the gauge shift).
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            omega: self.omega + c,
            epsilon: self.epsilon + c,
            beta: self.beta,
        }
    }

    /// Generalized Rabi frequency `chi(n) = sqrt(n beta^2 + delta^2 / 4)`.
    pub fn rabi(&self, n: u32) -> f64 {
        rabi_chi(n, self)
    }

    /// `E_{|-,n>} - n*omega`: the lower dressed energy with the photon ladder
    /// removed. Zero for the empty cavity `|g,0>`.
    pub fn lower_offset(&self, n: u32) -> f64 {
        if n == 0 {
            0.0
        } else {
            -self.rabi(n) - 0.5 * self.delta()
        }
    }

    /// Grand energy `E_{|-,n>} - mu*n` of a cavity frozen in `|-,n>`.
    pub fn lower_grand_energy(&self, n: u32, mu: f64) -> f64 {
        f64::from(n) * (self.omega - mu) + self.lower_offset(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Lower,
    Upper,
}

/// A Jaynes-Cummings eigenstate `c_g |g,n> + c_e |e,n-1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedState {
    pub n: u32,
    pub branch: Branch,
    pub c_g: f64,
    pub c_e: f64,
    pub energy: f64,
}

pub fn rabi_chi(n: u32, site: &SiteParams) -> f64 {
    let d = site.delta();
    libm::sqrt(f64::from(n) * site.beta * site.beta + 0.25 * d * d)
}

/// Dressed state `|branch, n>`.
///
/// `n = 0` has only `|g,0>`; it is returned as the lower branch with unit
/// ground amplitude and zero energy whatever `branch` was requested.
pub fn dressed_state(n: u32, branch: Branch, site: &SiteParams) -> DressedState {
    if n == 0 {
        return DressedState {
            n,
            branch: Branch::Lower,
            c_g: 1.0,
            c_e: 0.0,
            energy: 0.0,
        };
    }
    let chi = site.rabi(n);
    let half_delta = 0.5 * site.delta();
    let nb2 = f64::from(n) * site.beta * site.beta;
    let coupling = site.beta * libm::sqrt(f64::from(n));

    // Excited amplitude before normalization: -delta/2 -+ chi. The product of
    // the two roots is -n beta^2, which rescues the branch that cancels.
    let excited = match branch {
        Branch::Lower if half_delta >= 0.0 => -(half_delta + chi),
        Branch::Lower => -nb2 / (chi - half_delta),
        Branch::Upper if half_delta <= 0.0 => chi - half_delta,
        Branch::Upper => nb2 / (chi + half_delta),
    };
    let norm = libm::hypot(coupling, excited);
    let energy = match branch {
        Branch::Lower => f64::from(n) * site.omega - chi - half_delta,
        Branch::Upper => f64::from(n) * site.omega + chi - half_delta,
    };
    DressedState {
        n,
        branch,
        c_g: coupling / norm,
        c_e: excited / norm,
        energy,
    }
}

/// Zero-hopping ground filling: the `n` minimizing `E_{|-,n>} - mu*n` over
/// `0..=n_max`, ties going to the smaller `n`.
///
/// Fails when the minimizer is `n_max` itself, since the true minimum may lie
/// beyond the search bound.
pub fn atomic_limit_filling(site: &SiteParams, mu: f64, n_max: u32) -> Result<u32> {
    if !mu.is_finite() {
        return Err(invalid("mu", "must be finite"));
    }
    let mut best = 0;
    let mut best_energy = site.lower_grand_energy(0, mu);
    for n in 1..=n_max {
        let e = site.lower_grand_energy(n, mu);
        if e < best_energy {
            best = n;
            best_energy = e;
        }
    }
    if best == n_max {
        return Err(Error::FillingTruncated { n_max });
    }
    Ok(best)
}

/// Search bound used by callers that do not pick their own.
pub const DEFAULT_FILLING_SEARCH: u32 = 20;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn resonant(omega: f64) -> SiteParams {
        SiteParams::with_detuning(omega, 0.0, 1.0).unwrap()
    }

    /// The 2x2 block of the JC Hamiltonian in the n-excitation manifold.
    fn manifold(site: &SiteParams, n: u32) -> [[f64; 2]; 2] {
        let nf = f64::from(n);
        let off = site.beta() * nf.sqrt();
        [
            [nf * site.omega(), off],
            [off, (nf - 1.0) * site.omega() + site.epsilon()],
        ]
    }

    #[test]
    fn rabi_frequency_examples() {
        let s = resonant(3.0);
        assert_eq!(rabi_chi(1, &s), 1.0);
        let s = SiteParams::with_detuning(0.0, 1.0, 1.0).unwrap();
        assert_eq!(rabi_chi(2, &s), 1.5);
        let s = SiteParams::with_detuning(0.0, 2.0, 1.0).unwrap();
        assert_eq!(rabi_chi(0, &s), 1.0);
    }

    #[test]
    fn rejects_bad_coupling() {
        assert!(SiteParams::new(0.0, 0.0, 0.0).is_err());
        assert!(SiteParams::new(0.0, 0.0, -1.0).is_err());
        assert!(SiteParams::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn resonant_lower_state() {
        let d = dressed_state(1, Branch::Lower, &resonant(5.0));
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(d.c_g, r, epsilon = 1e-15);
        assert_abs_diff_eq!(d.c_e, -r, epsilon = 1e-15);
        assert_abs_diff_eq!(d.energy, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_cavity_convention() {
        let s = SiteParams::with_detuning(2.0, 0.7, 0.3).unwrap();
        for branch in [Branch::Lower, Branch::Upper] {
            let d = dressed_state(0, branch, &s);
            assert_eq!((d.c_g, d.c_e, d.energy), (1.0, 0.0, 0.0));
            assert_eq!(d.branch, Branch::Lower);
        }
    }

    #[test]
    fn large_detuning_limit() {
        let s = SiteParams::with_detuning(0.0, 100.0, 1.0).unwrap();
        let d = dressed_state(1, Branch::Lower, &s);
        assert!((d.c_e.abs() - 1.0).abs() < 1e-3);
        assert_abs_diff_eq!(d.c_g, 1.0 / 100.0, epsilon = 1e-5);

        // Cross-check against a direct 2x2 eigenvector: the lower eigenvalue
        // lambda satisfies (H00 - lambda) c_g + H01 c_e = 0.
        let h = manifold(&s, 1);
        let tr = h[0][0] + h[1][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let lambda = 0.5 * tr - (0.25 * tr * tr - det).sqrt();
        let (vg, ve) = (h[0][1], lambda - h[0][0]);
        let norm = vg.hypot(ve);
        let sign = if vg / norm * d.c_g < 0.0 { -1.0 } else { 1.0 };
        assert_abs_diff_eq!(d.c_g, sign * vg / norm, epsilon = 1e-10);
        assert_abs_diff_eq!(d.c_e, sign * ve / norm, epsilon = 1e-10);
        assert_abs_diff_eq!(d.energy, lambda, epsilon = 1e-10);
    }

    #[test]
    fn filling_examples() {
        let s = resonant(0.0);
        assert_eq!(atomic_limit_filling(&s, -0.5, 20).unwrap(), 1);
        assert_eq!(atomic_limit_filling(&s, -1.5, 20).unwrap(), 0);
        let edge = 1.0 - 2f64.sqrt();
        assert_eq!(atomic_limit_filling(&s, edge + 0.01, 20).unwrap(), 2);
    }

    #[test]
    fn filling_ties_prefer_smaller() {
        // (mu - omega) = -beta is the exact 0/1 degeneracy at resonance.
        let s = resonant(0.0);
        assert_eq!(atomic_limit_filling(&s, -1.0, 20).unwrap(), 0);
    }

    #[test]
    fn filling_truncation_is_reported() {
        let s = resonant(0.0);
        assert_eq!(
            atomic_limit_filling(&s, 0.5, 20),
            Err(Error::FillingTruncated { n_max: 20 })
        );
    }

    proptest! {
        #[test]
        fn dressed_states_are_normalized_eigenvectors(
            n in 1u32..40,
            delta in -50.0f64..50.0,
            beta in 0.05f64..5.0,
            omega in -10.0f64..10.0,
            upper in any::<bool>(),
        ) {
            let s = SiteParams::with_detuning(omega, delta, beta).unwrap();
            let branch = if upper { Branch::Upper } else { Branch::Lower };
            let d = dressed_state(n, branch, &s);
            prop_assert!((d.c_g * d.c_g + d.c_e * d.c_e - 1.0).abs() < 1e-12);
            let h = manifold(&s, n);
            let r0 = h[0][0] * d.c_g + h[0][1] * d.c_e - d.energy * d.c_g;
            let r1 = h[1][0] * d.c_g + h[1][1] * d.c_e - d.energy * d.c_e;
            let scale = 1.0 + h[0][0].abs().max(h[1][1].abs()) + h[0][1].abs();
            prop_assert!(r0.abs() < 1e-12 * scale, "r0 = {r0}");
            prop_assert!(r1.abs() < 1e-12 * scale, "r1 = {r1}");
        }

        #[test]
        fn lower_branch_below_upper(n in 1u32..40, delta in -5.0f64..5.0, beta in 0.1f64..3.0) {
            let s = SiteParams::with_detuning(1.0, delta, beta).unwrap();
            let lo = dressed_state(n, Branch::Lower, &s).energy;
            let hi = dressed_state(n, Branch::Upper, &s).energy;
            prop_assert!(lo <= hi);
        }

        #[test]
        fn filling_is_gauge_invariant(
            mu_rel in -3.0f64..-0.2,
            delta in -2.0f64..2.0,
            c in -100.0f64..100.0,
        ) {
            let s = SiteParams::with_detuning(0.0, delta, 1.0).unwrap();
            let a = atomic_limit_filling(&s, mu_rel, 60);
            let b = atomic_limit_filling(&s.shifted(c), mu_rel + c, 60);
            prop_assert_eq!(a, b);
        }
    }
}
