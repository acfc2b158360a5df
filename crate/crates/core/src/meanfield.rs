//! Single-site mean-field decoupling with a real order parameter `psi`.
//!
//! Basis index `2 n + a` for `|g,n>` (`a = 0`) and `|e,n>` (`a = 1`),
//! `0 <= n <= n_max`. Hopping enters only through `z * kappa`.

use alloc::vec::Vec;

use nalgebra::DMatrix;

#[cfg(feature = "rayon")]
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::jc::{dressed_state, Branch, SiteParams};
use crate::linalg::symmetric_ground;
use crate::optimize::{bisect_predicate, golden_section};

pub const DEFAULT_N_MAX: u32 = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfProblem {
    site: SiteParams,
    kappa: f64,
    mu: f64,
    z: u32,
    n_max: u32,
}

impl MfProblem {
    pub fn new(site: SiteParams, kappa: f64, mu: f64, z: u32, n_max: u32) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(invalid("kappa", "hopping must be finite and >= 0"));
        }
        if !mu.is_finite() {
            return Err(invalid("mu", "must be finite"));
        }
        if z == 0 {
            return Err(invalid("z", "coordination number must be >= 1"));
        }
        if n_max == 0 {
            return Err(invalid("n_max", "photon cutoff must be >= 1"));
        }
        Ok(Self {
            site,
            kappa,
            mu,
            z,
            n_max,
        })
    }

    pub fn site(&self) -> &SiteParams {
        &self.site
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn z(&self) -> u32 {
        self.z
    }
    pub fn n_max(&self) -> u32 {
        self.n_max
    }
    pub fn dim(&self) -> usize {
        2 * (self.n_max as usize + 1)
    }

    /// `z * kappa`, the only combination the decoupled problem sees.
    pub fn z_kappa(&self) -> f64 {
        f64::from(self.z) * self.kappa
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.site, kappa, self.mu, self.z, self.n_max)
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.site, self.kappa, mu, self.z, self.n_max)
    }
}

/// Decoupled single-site Hamiltonian at order parameter `psi`, including the
/// constant `z kappa psi^2`.
pub fn mf_hamiltonian(problem: &MfProblem, psi: f64) -> DMatrix<f64> {
    let dim = problem.dim();
    let s = &problem.site;
    let mu = problem.mu;
    let zk = problem.z_kappa();
    let shift = zk * psi * psi;
    let drive = -zk * psi;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for n in 0..=problem.n_max as usize {
        let nf = n as f64;
        let g = 2 * n;
        let e = g + 1;
        h[(g, g)] = nf * (s.omega() - mu) + shift;
        h[(e, e)] = nf * (s.omega() - mu) + (s.epsilon() - mu) + shift;
        if n >= 1 {
            // beta (sigma+ a + sigma- a^dagger): |g,n> <-> |e,n-1>.
            let c = s.beta() * libm::sqrt(nf);
            h[(g, e - 2)] = c;
            h[(e - 2, g)] = c;
        }
        if n < problem.n_max as usize {
            let c = drive * libm::sqrt(nf + 1.0);
            for a in 0..2 {
                h[(g + a, g + 2 + a)] = c;
                h[(g + 2 + a, g + a)] = c;
            }
        }
    }
    h
}

/// Ground state of the decoupled Hamiltonian at a fixed `psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct MfGround {
    pub energy: f64,
    /// `<a>` in the ground state (real, gauge fixed by `psi >= 0`).
    pub mean_a: f64,
    /// Weight of the `n = n_max` photon states.
    pub top_occupancy: f64,
}

pub fn mf_ground(problem: &MfProblem, psi: f64) -> Result<MfGround> {
    let (energy, v) = symmetric_ground(mf_hamiltonian(problem, psi), "mean-field ground state")?;
    let n_max = problem.n_max as usize;
    let mut mean_a = 0.0;
    for n in 0..n_max {
        let c = libm::sqrt(n as f64 + 1.0);
        for a in 0..2 {
            mean_a += c * v[2 * n + a] * v[2 * n + 2 + a];
        }
    }
    let top_occupancy = v[2 * n_max] * v[2 * n_max] + v[2 * n_max + 1] * v[2 * n_max + 1];
    Ok(MfGround {
        energy,
        mean_a,
        top_occupancy,
    })
}

/// Ground energy only, without the eigenvector.
pub fn mf_energy(problem: &MfProblem, psi: f64) -> Result<f64> {
    let values = mf_hamiltonian(problem, psi).symmetric_eigenvalues();
    values
        .iter()
        .copied()
        .reduce(f64::min)
        .filter(|e| e.is_finite())
        .ok_or_else(|| Error::NoConvergence {
            context: "mean-field eigenvalues".into(),
            residual: f64::NAN,
        })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfOptions {
    /// Upper end of the `psi` search interval.
    pub psi_max: f64,
    pub scan_points: usize,
    /// Bracket width at which golden-section search hands over to the
    /// stationarity polish. Energies are flat to round-off well before 1e-8.
    pub golden_tol: f64,
    /// Final tolerance on `psi*`.
    pub psi_tol: f64,
    /// Allowed `|<a> - psi*|` for the result to count as converged.
    pub stationarity_tol: f64,
    /// Largest allowed weight at the photon cutoff.
    pub truncation_tol: f64,
    /// `psi*` above this counts as superfluid.
    pub psi_threshold: f64,
    /// Bisection tolerance on `kappa`, in units of `beta`.
    pub kappa_tol: f64,
}

impl Default for MfOptions {
    fn default() -> Self {
        Self {
            psi_max: 2.0,
            scan_points: 41,
            golden_tol: 1e-7,
            psi_tol: 1e-10,
            stationarity_tol: 1e-6,
            truncation_tol: 1e-10,
            psi_threshold: 1e-6,
            kappa_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfResult {
    pub psi_star: f64,
    pub ground_energy: f64,
    /// Ground energy at `psi = 0`.
    pub energy_at_zero: f64,
    pub mean_a: f64,
    /// `|<a> - psi*| <= stationarity_tol`.
    pub converged: bool,
    pub evaluations: usize,
}

/// Minimize the decoupled ground energy over `psi` in `[0, psi_max]`.
///
/// A coarse scan brackets the minimum and golden-section search refines it.
/// `psi* = 0` unless the refined point lies below `psi = 0` by more than the
/// eigensolver's energy resolution.
pub fn mf_order_parameter(problem: &MfProblem, opts: &MfOptions) -> Result<MfResult> {
    if opts.scan_points < 3 || !(opts.psi_max.is_finite() && opts.psi_max > 0.0) {
        return Err(invalid("psi_max", "need psi_max > 0 and at least 3 scan points"));
    }
    let mut evaluations = 0usize;
    let mut energy = |psi: f64| -> Result<f64> {
        evaluations += 1;
        mf_energy(problem, psi)
    };

    let e0 = energy(0.0)?;
    let (psi_star, ground_energy) = if problem.z_kappa() == 0.0 {
        (0.0, e0)
    } else {
        let step = opts.psi_max / (opts.scan_points - 1) as f64;
        let mut best = (0usize, e0);
        for i in 1..opts.scan_points {
            let e = energy(i as f64 * step)?;
            if e < best.1 {
                best = (i, e);
            }
        }
        if best.0 == opts.scan_points - 1 {
            return Err(Error::MinimumNotBracketed {
                psi_max: opts.psi_max,
            });
        }
        let lo = best.0.saturating_sub(1) as f64 * step;
        let hi = (best.0 + 1) as f64 * step;
        let m = golden_section(&mut energy, lo, hi, opts.golden_tol)?;
        if m.value < e0 - energy_resolution(problem) {
            let psi = polish_stationary(problem, m.x, opts.psi_tol, &mut evaluations)?;
            (psi, mf_ground(problem, psi)?.energy)
        } else {
            (0.0, e0)
        }
    };

    let g = mf_ground(problem, psi_star)?;
    evaluations += 1;
    if g.top_occupancy > opts.truncation_tol {
        return Err(Error::Truncation {
            occupancy: g.top_occupancy,
            n_max: problem.n_max,
        });
    }
    Ok(MfResult {
        psi_star,
        ground_energy,
        energy_at_zero: e0,
        mean_a: g.mean_a,
        converged: (g.mean_a - psi_star).abs() <= opts.stationarity_tol,
        evaluations,
    })
}

/// Refine a golden-section estimate on `<a>(psi) - psi`, which is
/// proportional to `-dE/dpsi` and so resolves the minimum to round-off where
/// the energy itself is flat. Returns `psi` unchanged if no sign change is
/// found nearby.
fn polish_stationary(
    problem: &MfProblem,
    psi: f64,
    tol: f64,
    evaluations: &mut usize,
) -> Result<f64> {
    let mut residual = |p: f64| -> Result<f64> {
        *evaluations += 1;
        Ok(mf_ground(problem, p)?.mean_a - p)
    };
    let mut delta = 1e-7 * psi.max(1.0);
    for _ in 0..12 {
        let lo = (psi - delta).max(0.5 * psi);
        let hi = psi + delta;
        if residual(lo)? > 0.0 && residual(hi)? < 0.0 {
            let (a, b) = bisect_predicate(|p| Ok(residual(p)? < 0.0), lo, hi, 1e-3 * tol)?;
            return Ok(0.5 * (a + b));
        }
        delta *= 4.0;
    }
    Ok(psi)
}

/// Round-off scale of a ground energy of the decoupled Hamiltonian.
fn energy_resolution(problem: &MfProblem) -> f64 {
    let h = mf_hamiltonian(problem, 0.0);
    let scale = libm::sqrt(h.iter().map(|x| x * x).sum::<f64>());
    64.0 * f64::EPSILON * scale
}

fn is_superfluid(problem: &MfProblem, opts: &MfOptions) -> Result<bool> {
    Ok(mf_order_parameter(problem, opts)?.psi_star > opts.psi_threshold)
}

/// Critical hopping at chemical potential `mu`: bisection for the onset of
/// `psi* > psi_threshold`.
///
/// Fails with [`Error::NoTransition`] when `psi*` is already above threshold
/// at `kappa = kappa_tol`.
pub fn mf_critical_kappa(
    site: &SiteParams,
    z: u32,
    mu: f64,
    n_max: u32,
    opts: &MfOptions,
) -> Result<f64> {
    let base = MfProblem::new(*site, 0.0, mu, z, n_max)?;
    let tol = opts.kappa_tol * site.beta();
    let pred = |kappa: f64| is_superfluid(&base.with_kappa(kappa)?, opts);
    if pred(tol)? {
        return Err(Error::NoTransition { mu });
    }
    let mut lo = tol;
    let mut hi = 0.01 * site.beta();
    let mut doublings = 0;
    while !pred(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 40 {
            return Err(Error::BracketFailure { lo, hi });
        }
    }
    let (lo, hi) = bisect_predicate(pred, lo, hi, tol)?;
    Ok(0.5 * (lo + hi))
}

/// `kappa_c(mu)` on a chemical-potential axis; `None` where there is no
/// transition.
#[derive(Debug, Clone, PartialEq)]
pub struct MfBoundary {
    pub z: u32,
    pub mu: Vec<f64>,
    pub kappa_c: Vec<Option<f64>>,
}

pub fn mf_boundary(
    site: &SiteParams,
    z: u32,
    mu_axis: &[f64],
    n_max: u32,
    opts: &MfOptions,
) -> Result<MfBoundary> {
    let point = |&mu: &f64| match mf_critical_kappa(site, z, mu, n_max, opts) {
        Ok(k) => Ok(Some(k)),
        Err(Error::NoTransition { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    #[cfg(feature = "rayon")]
    let kappa_c = mu_axis.par_iter().map(point).collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "rayon"))]
    let kappa_c = mu_axis.iter().map(point).collect::<Result<Vec<_>>>()?;
    Ok(MfBoundary {
        z,
        mu: mu_axis.to_vec(),
        kappa_c,
    })
}

/// Zero-hopping edges `(mu_lower, mu_upper)` of lobe `n >= 1`, with the empty
/// cavity at energy zero.
pub fn atomic_lobe_edges(site: &SiteParams, n: u32) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::UnboundedLobe);
    }
    let energy = |m: u32| site.lower_grand_energy(m, 0.0);
    Ok((energy(n) - energy(n - 1), energy(n + 1) - energy(n)))
}

/// Mean-field edges `(mu_lower, mu_upper)` of lobe `n >= 1` at fixed hopping,
/// by bisection in `mu` between the lobe centre and its zero-hopping edges.
pub fn mf_lobe_edges(
    site: &SiteParams,
    z: u32,
    kappa: f64,
    n: u32,
    n_max: u32,
    mu_tol: f64,
    opts: &MfOptions,
) -> Result<(f64, f64)> {
    let (a_lo, a_hi) = atomic_lobe_edges(site, n)?;
    let centre = 0.5 * (a_lo + a_hi);
    let base = MfProblem::new(*site, kappa, centre, z, n_max)?;
    let sf = |mu: f64| is_superfluid(&base.with_mu(mu)?, opts);
    if sf(centre)? {
        return Err(Error::LobeClosed {
            mu_lower: centre,
            mu_upper: centre,
        });
    }
    let (_, upper) = bisect_predicate(sf, centre, a_hi, mu_tol)?;
    // Mirror the lower half so the predicate still runs false -> true.
    let (_, neg_lower) = bisect_predicate(|m: f64| sf(-m), -centre, -a_lo, mu_tol)?;
    Ok((-neg_lower, upper))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfTip {
    pub mu: f64,
    pub kappa: f64,
}

/// Largest `kappa_c(mu)` within lobe `n`, found by golden-section search on `mu`.
pub fn mf_lobe_tip(
    site: &SiteParams,
    z: u32,
    n: u32,
    n_max: u32,
    mu_tol: f64,
    opts: &MfOptions,
) -> Result<MfTip> {
    let (a_lo, a_hi) = atomic_lobe_edges(site, n)?;
    let margin = 0.05 * (a_hi - a_lo);
    let m = golden_section(
        |mu| Ok(-mf_critical_kappa(site, z, mu, n_max, opts)?),
        a_lo + margin,
        a_hi - margin,
        mu_tol,
    )?;
    Ok(MfTip {
        mu: m.x,
        kappa: -m.value,
    })
}

/// Second-order coefficient of the decoupled energy in `psi` at `psi = 0`:
/// `E(psi) = E(0) + z kappa psi^2 [1 - z kappa * susceptibility] + O(psi^4)`.
/// The Mott state is unstable once `z kappa * susceptibility > 1`.
///
/// Evaluated from the dressed spectrum around the zero-hopping ground state
/// with filling `n`, independently of [`mf_hamiltonian`].
pub fn mf_susceptibility(site: &SiteParams, n: u32, mu: f64) -> f64 {
    let ground = dressed_state(n, Branch::Lower, site);
    let e0 = site.lower_grand_energy(n, mu);
    let mut total = 0.0;
    // <m| a^dagger |ground> and <m| a |ground> for the dressed states m in the
    // neighbouring manifolds.
    let nf = f64::from(n);
    for branch in [Branch::Lower, Branch::Upper] {
        let up = dressed_state(n + 1, branch, site);
        let e_up = up.energy - f64::from(n + 1) * mu;
        let amp = up.c_g * ground.c_g * libm::sqrt(nf + 1.0) + up.c_e * ground.c_e * libm::sqrt(nf);
        total += amp * amp / (e_up - e0);
        if n >= 1 {
            let down = dressed_state(n - 1, branch, site);
            if n == 1 && branch == Branch::Upper {
                continue;
            }
            let e_down = down.energy - f64::from(n - 1) * mu;
            let amp = down.c_g * ground.c_g * libm::sqrt(nf)
                + if n >= 2 {
                    down.c_e * ground.c_e * libm::sqrt(nf - 1.0)
                } else {
                    0.0
                };
            total += amp * amp / (e_down - e0);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn site(delta: f64) -> SiteParams {
        SiteParams::with_detuning(0.0, delta, 1.0).unwrap()
    }

    fn problem(delta: f64, kappa: f64, mu: f64) -> MfProblem {
        MfProblem::new(site(delta), kappa, mu, 2, DEFAULT_N_MAX).unwrap()
    }

    #[test]
    fn hamiltonian_is_symmetric_with_ladder_structure() {
        let p = problem(0.3, 0.05, -0.5);
        let h = mf_hamiltonian(&p, 0.7);
        assert_eq!(h, h.transpose());
        let drive = -2.0 * 0.05 * 0.7;
        // <g,n+1| a^dagger |g,n> = sqrt(n+1).
        assert_abs_diff_eq!(h[(2 * 3, 2 * 4)], drive * 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(2 * 3 + 1, 2 * 4 + 1)], drive * 2.0, epsilon = 1e-15);
        assert_eq!(h[(2 * 3, 2 * 4 + 1)], 0.0);
        assert_abs_diff_eq!(h[(2 * 4, 2 * 3 + 1)], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_psi_ground_is_atomic_minimum() {
        for mu in [-1.5, -0.5, -0.35, -0.29] {
            let p = problem(0.0, 0.1, mu);
            let e = mf_ground(&p, 0.0).unwrap().energy;
            let best = (0..20)
                .map(|n| site(0.0).lower_grand_energy(n, mu))
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(e, best, epsilon = 1e-12);
        }
    }

    #[test]
    fn no_hopping_gives_no_order() {
        let r = mf_order_parameter(&problem(0.0, 0.0, -0.5), &MfOptions::default()).unwrap();
        assert_eq!(r.psi_star, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn deep_mott_has_no_order() {
        let r = mf_order_parameter(&problem(0.0, 0.001, -0.5), &MfOptions::default()).unwrap();
        assert_eq!(r.psi_star, 0.0);
        assert_eq!(r.ground_energy, r.energy_at_zero);
    }

    #[test]
    fn superfluid_side_is_stationary() {
        let r = mf_order_parameter(&problem(0.0, 0.12, -0.5), &MfOptions::default()).unwrap();
        assert!(r.psi_star > 0.1, "{r:?}");
        assert!(r.ground_energy < r.energy_at_zero);
        assert!(r.converged, "{r:?}");
    }

    #[test]
    fn unbounded_hopping_is_an_error() {
        // z kappa > omega - mu: the coherent-state energy falls without bound
        // and the minimum runs into the search limit or the photon cutoff.
        let r = mf_order_parameter(&problem(0.0, 1.0, -0.5), &MfOptions::default());
        assert!(
            matches!(r, Err(Error::MinimumNotBracketed { .. } | Error::Truncation { .. })),
            "{r:?}"
        );
    }

    #[test]
    fn critical_kappa_matches_susceptibility() {
        for (delta, mu) in [(0.0, -0.7), (0.0, -0.5), (1.0, -0.3), (0.0, -0.36)] {
            let n = crate::jc::atomic_limit_filling(&site(delta), mu, 20).unwrap();
            let expected = 1.0 / (2.0 * mf_susceptibility(&site(delta), n, mu));
            let kc = mf_critical_kappa(&site(delta), 2, mu, DEFAULT_N_MAX, &MfOptions::default())
                .unwrap();
            assert_abs_diff_eq!(kc, expected, epsilon = 3e-6);
        }
    }

    #[test]
    fn critical_kappa_halves_with_doubled_z() {
        let opts = MfOptions::default();
        let a = mf_critical_kappa(&site(0.0), 2, -0.6, DEFAULT_N_MAX, &opts).unwrap();
        let b = mf_critical_kappa(&site(0.0), 4, -0.6, DEFAULT_N_MAX, &opts).unwrap();
        assert_abs_diff_eq!(a, 2.0 * b, epsilon = 3e-6);
    }

    #[test]
    fn boundary_reports_missing_transition_at_edge() {
        let edge = 1.0 - 2f64.sqrt();
        let b = mf_boundary(&site(0.0), 2, &[edge, -0.6], DEFAULT_N_MAX, &MfOptions::default())
            .unwrap();
        assert_eq!(b.kappa_c[0], None);
        assert!(b.kappa_c[1].unwrap() > 0.0);
    }

    #[test]
    fn atomic_edges() {
        let (lo, hi) = atomic_lobe_edges(&site(0.0), 1).unwrap();
        assert_abs_diff_eq!(lo, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 1.0 - 2f64.sqrt(), epsilon = 1e-15);
        let (lo, _) = atomic_lobe_edges(&site(1.0), 1).unwrap();
        assert_abs_diff_eq!(lo, -0.5 - 5f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn lobe_edges_shrink_toward_centre() {
        let (a_lo, a_hi) = atomic_lobe_edges(&site(0.0), 1).unwrap();
        let (lo, hi) =
            mf_lobe_edges(&site(0.0), 2, 0.01, 1, DEFAULT_N_MAX, 1e-9, &MfOptions::default())
                .unwrap();
        assert!(a_lo < lo && lo < hi && hi < a_hi, "{lo} {hi}");
        // Each edge satisfies the critical condition.
        for mu in [lo, hi] {
            let chi = mf_susceptibility(&site(0.0), 1, mu);
            assert_abs_diff_eq!(2.0 * 0.01 * chi, 1.0, epsilon = 1e-3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn order_depends_on_z_kappa_only(kappa in 0.0f64..0.1, mu in -1.2f64..-0.45) {
            let opts = MfOptions::default();
            let a = mf_order_parameter(&MfProblem::new(site(0.0), kappa, mu, 2, 25).unwrap(), &opts).unwrap();
            let b = mf_order_parameter(&MfProblem::new(site(0.0), 2.0 * kappa, mu, 1, 25).unwrap(), &opts).unwrap();
            prop_assert!((a.psi_star - b.psi_star).abs() <= 1e-10);
        }

        #[test]
        fn variational_bound(kappa in 0.0f64..0.1, mu in -1.2f64..-0.45, delta in -1.0f64..1.0) {
            let r = mf_order_parameter(&problem(delta, kappa, mu), &MfOptions::default()).unwrap();
            prop_assert!(r.psi_star >= 0.0);
            prop_assert!(r.ground_energy <= r.energy_at_zero);
        }

        #[test]
        fn cutoff_is_converged(kappa in 0.0f64..0.1, mu in -1.2f64..-0.45) {
            let opts = MfOptions::default();
            let a = mf_order_parameter(&MfProblem::new(site(0.0), kappa, mu, 2, 20).unwrap(), &opts).unwrap();
            let b = mf_order_parameter(&MfProblem::new(site(0.0), kappa, mu, 2, 25).unwrap(), &opts).unwrap();
            prop_assert!((a.psi_star - b.psi_star).abs() < 1e-8, "{} {}", a.psi_star, b.psi_star);
        }

        #[test]
        fn energy_shifts_with_gauge(kappa in 0.0f64..0.1, mu in -1.2f64..-0.45, c in -10.0f64..10.0) {
            let opts = MfOptions::default();
            let a = mf_order_parameter(&problem(0.2, kappa, mu), &opts).unwrap();
            let shifted = MfProblem::new(site(0.2).shifted(c), kappa, mu + c, 2, DEFAULT_N_MAX).unwrap();
            let b = mf_order_parameter(&shifted, &opts).unwrap();
            prop_assert!((a.ground_energy - b.ground_energy).abs() < 1e-10);
            prop_assert!((a.psi_star - b.psi_star).abs() < 1e-6);
        }
    }
}
