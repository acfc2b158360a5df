//! One-polariton and one-hole Bloch blocks for a periodic 1D chain of cavities.
//!
//! Every cavity `r` of the unit cell sits in the lower dressed state
//! `|-,n_r>`. A block basis state puts one extra excitation (particle sector)
//! or one missing excitation (hole sector) on a single cavity, expressed in
//! the bare states `|g,.>`, `|e,.>` of that cavity's shifted manifold. Photon
//! hopping between neighbours `r`, `s` couples these states through the
//! rank-1 matrix `-kappa * v_r v_s^T`, where `v` is the [`hop_vector`] of the
//! background state.
//!
//! Energies are measured relative to the Mott background and include the
//! grand-canonical `-mu N` term, so a negative lowest band signals that adding
//! a particle (hole) lowers the grand energy.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::jc::{dressed_state, Branch, SiteParams};
use crate::linalg::hermitian_eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Particle,
    Hole,
}

impl Sector {
    pub fn name(self) -> &'static str {
        match self {
            Sector::Particle => "particle",
            Sector::Hole => "hole",
        }
    }
}

/// A periodic unit cell: per-site constants and background fillings, with a
/// single hopping rate and chemical potential shared by all sites.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    sites: Vec<SiteParams>,
    fillings: Vec<u32>,
    kappa: f64,
    mu: f64,
}

impl UnitCell {
    pub fn new(sites: Vec<SiteParams>, fillings: Vec<u32>, kappa: f64, mu: f64) -> Result<Self> {
        if sites.is_empty() {
            return Err(invalid("sites", "unit cell needs at least one site"));
        }
        if sites.len() != fillings.len() {
            return Err(invalid(
                "fillings",
                format!("{} fillings for {} sites", fillings.len(), sites.len()),
            ));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(invalid("kappa", "must be finite and >= 0"));
        }
        if !mu.is_finite() {
            return Err(invalid("mu", "must be finite"));
        }
        Ok(Self {
            sites,
            fillings,
            kappa,
            mu,
        })
    }

    pub fn uniform(site: SiteParams, filling: u32, kappa: f64, mu: f64) -> Result<Self> {
        Self::new(alloc::vec![site], alloc::vec![filling], kappa, mu)
    }

    pub fn sites(&self) -> &[SiteParams] {
        &self.sites
    }

    pub fn fillings(&self) -> &[u32] {
        &self.fillings
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self {
            kappa,
            ..self.clone()
        }
    }

    /// Same cell with every energy shifted by `c` (cavities, atoms and `mu`).
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            sites: self.sites.iter().map(|s| s.shifted(c)).collect(),
            fillings: self.fillings.clone(),
            kappa: self.kappa,
            mu: self.mu + c,
        }
    }

    /// Grand energy of the Mott background per cell, `sum_r E_{|-,n_r>} - mu n_r`.
    pub fn background_energy(&self) -> f64 {
        self.sites
            .iter()
            .zip(&self.fillings)
            .map(|(s, &n)| s.lower_grand_energy(n, self.mu))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BareState {
    /// `|g, .>`: atom in its ground state.
    Ground,
    /// `|e, .>`: atom excited.
    Excited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub site: usize,
    pub state: BareState,
}

/// Hermitian Bloch block at one crystal momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochBlock {
    pub k: f64,
    pub sector: Sector,
    pub matrix: DMatrix<Complex64>,
    pub labels: Vec<BasisLabel>,
}

impl BlochBlock {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Matrix elements of the photon operator between the background `|-,n>` and
/// the bare states of the shifted manifold.
///
/// Particle: `<g,n+1| a^+ |-,n>`, `<e,n| a^+ |-,n>` = `(c_g sqrt(n+1), c_e sqrt(n))`.
/// Hole: `<g,n-1| a |-,n>`, `<e,n-2| a |-,n>` = `(c_g sqrt(n), c_e sqrt(n-1))`,
/// with the excited component absent when `n = 1`.
pub fn hop_vector(site: &SiteParams, n: u32, sector: Sector) -> Result<Vec<f64>> {
    let d = dressed_state(n, Branch::Lower, site);
    let nf = f64::from(n);
    match sector {
        Sector::Particle => Ok(alloc::vec![
            d.c_g * libm::sqrt(nf + 1.0),
            d.c_e * libm::sqrt(nf)
        ]),
        Sector::Hole => match n {
            0 => Err(invalid("filling", "hole needs a background filling >= 1")),
            1 => Ok(alloc::vec![d.c_g]),
            _ => Ok(alloc::vec![
                d.c_g * libm::sqrt(nf),
                d.c_e * libm::sqrt(nf - 1.0)
            ]),
        },
    }
}

/// Number of block states a site contributes.
pub fn local_dim(n: u32, sector: Sector) -> usize {
    match (sector, n) {
        (Sector::Particle, _) => 2,
        (Sector::Hole, 0) => 0,
        (Sector::Hole, 1) => 1,
        (Sector::Hole, _) => 2,
    }
}

/// Onsite block of one site, relative to its background grand energy.
///
/// Particle: `H_JC` on `{|g,n+1>, |e,n>}` minus `mu (n+1)` minus
/// `E_{|-,n>} - mu n`. Hole: the same on `{|g,n-1>, |e,n-2>}`.
fn onsite(site: &SiteParams, n: u32, mu: f64, sector: Sector) -> ([f64; 2], f64, usize) {
    let detuning = site.delta();
    let offset = site.lower_offset(n);
    match sector {
        Sector::Particle => {
            let base = site.omega() - mu - offset;
            let coupling = site.beta() * libm::sqrt(f64::from(n) + 1.0);
            ([base, base - detuning], coupling, 2)
        }
        Sector::Hole => {
            let base = mu - site.omega() - offset;
            let dim = local_dim(n, Sector::Hole);
            let coupling = if dim == 2 {
                site.beta() * libm::sqrt(f64::from(n) - 1.0)
            } else {
                0.0
            };
            ([base, base - detuning], coupling, dim)
        }
    }
}

/// Assemble the Bloch block of `cell` at crystal momentum `k` (per unit cell).
///
/// Sites `s` and `s+1` of the same cell couple with phase 1; the last site
/// couples to site 0 of the next cell with phase `e^{ik}` (and `e^{-ik}` for
/// the reverse hop). For a one-site cell both hops land on the diagonal and
/// combine to `2 cos k`.
pub fn build_block(cell: &UnitCell, sector: Sector, k: f64) -> Result<BlochBlock> {
    let m = cell.len();
    let mut offsets = Vec::with_capacity(m + 1);
    let mut labels = Vec::new();
    let mut hops: Vec<Vec<f64>> = Vec::with_capacity(m);
    offsets.push(0);
    for (r, (site, &n)) in cell.sites.iter().zip(&cell.fillings).enumerate() {
        let d = local_dim(n, sector);
        for state in [BareState::Ground, BareState::Excited].into_iter().take(d) {
            labels.push(BasisLabel { site: r, state });
        }
        offsets.push(offsets[r] + d);
        hops.push(if d == 0 {
            Vec::new()
        } else {
            hop_vector(site, n, sector)?
        });
    }
    let dim = labels.len();
    if dim == 0 {
        return Err(Error::EmptyHoleSector);
    }

    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (r, (site, &n)) in cell.sites.iter().zip(&cell.fillings).enumerate() {
        let (diag, coupling, d) = onsite(site, n, cell.mu, sector);
        let o = offsets[r];
        for i in 0..d {
            h[(o + i, o + i)] += Complex64::new(diag[i], 0.0);
        }
        if d == 2 {
            h[(o, o + 1)] += Complex64::new(coupling, 0.0);
            h[(o + 1, o)] += Complex64::new(coupling, 0.0);
        }
    }

    // (row site, column site, Bloch phase) for every directed hop.
    let kappa = cell.kappa;
    let forward = Complex64::new(libm::cos(k), libm::sin(k));
    let add_hop = |h: &mut DMatrix<Complex64>, r: usize, s: usize, phase: Complex64| {
        let (vr, vs) = (&hops[r], &hops[s]);
        for (i, &a) in vr.iter().enumerate() {
            for (j, &b) in vs.iter().enumerate() {
                h[(offsets[r] + i, offsets[s] + j)] += phase * (-kappa * a * b);
            }
        }
    };
    for r in 0..m.saturating_sub(1) {
        add_hop(&mut h, r, r + 1, Complex64::new(1.0, 0.0));
        add_hop(&mut h, r + 1, r, Complex64::new(1.0, 0.0));
    }
    add_hop(&mut h, m - 1, 0, forward);
    add_hop(&mut h, 0, m - 1, forward.conj());

    let deviation = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if deviation > 1e-14 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(BlochBlock {
        k,
        sector,
        matrix: h,
        labels,
    })
}

/// Ascending eigenvalues of a Bloch block.
pub fn diagonalize(block: &BlochBlock) -> Result<Vec<f64>> {
    let context = format!("{} block, k = {}", block.sector.name(), block.k);
    hermitian_eigenvalues(&block.matrix, &context)
}

/// Lowest band energy of `cell` at momentum `k`.
pub fn lowest_energy(cell: &UnitCell, sector: Sector, k: f64) -> Result<f64> {
    let e = diagonalize(&build_block(cell, sector, k)?)?;
    Ok(e[0])
}

/// Closed-form extra-polariton branches `(E_-, E_+)` of a uniform chain at
/// filling `n`, with the dispersion functions
/// `h = (n + c_g^2) kappa cos k` and
/// `g = {4(n+1) sqrt(n) beta c_e c_g + [(n+1) c_g^2 - n c_e^2] delta} kappa cos k`.
///
/// Uses `chi(0) = |delta|/2` literally, so at `n = 0` with `delta > 0` the
/// result is offset from the block eigenvalues by `delta`.
pub fn closed_form_particle(
    n: u32,
    k: f64,
    site: &SiteParams,
    kappa: f64,
    mu: f64,
) -> (f64, f64) {
    let d = dressed_state(n, Branch::Lower, site);
    let nf = f64::from(n);
    let delta = site.delta();
    let hop = kappa * libm::cos(k);
    let h = (nf + d.c_g * d.c_g) * hop;
    let g = (4.0 * (nf + 1.0) * libm::sqrt(nf) * site.beta() * d.c_e * d.c_g
        + ((nf + 1.0) * d.c_g * d.c_g - nf * d.c_e * d.c_e) * delta)
        * hop;
    let chi_next = site.rabi(n + 1);
    let centre = site.omega() - mu + site.rabi(n) - h;
    let root = libm::sqrt((h * h - g + chi_next * chi_next).max(0.0));
    (centre - root, centre + root)
}

/// Closed-form hole branches `(E_-, E_+)` of a uniform chain at filling
/// `n >= 1`, with `h' = (n - c_e^2) kappa cos k` and
/// `g' = {4(n-1) sqrt(n) beta c_e c_g + [n c_g^2 - (n-1) c_e^2] delta} kappa cos k`.
///
/// At `n = 1` only one of the two branches is a physical hole state (the one
/// carrying the `k` dependence); see [`closed_form_single_hole`].
pub fn closed_form_hole(
    n: u32,
    k: f64,
    site: &SiteParams,
    kappa: f64,
    mu: f64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(invalid("filling", "hole needs a background filling >= 1"));
    }
    let d = dressed_state(n, Branch::Lower, site);
    let nf = f64::from(n);
    let delta = site.delta();
    let hop = kappa * libm::cos(k);
    let h = (nf - d.c_e * d.c_e) * hop;
    let g = (4.0 * (nf - 1.0) * libm::sqrt(nf) * site.beta() * d.c_e * d.c_g
        + (nf * d.c_g * d.c_g - (nf - 1.0) * d.c_e * d.c_e) * delta)
        * hop;
    let chi_prev = site.rabi(n - 1);
    let centre = mu - site.omega() + site.rabi(n) - h;
    let root = libm::sqrt((h * h - g + chi_prev * chi_prev).max(0.0));
    Ok((centre - root, centre + root))
}

/// The physical member of the `n = 1` closed-form hole pair.
///
/// With no excited state below `|g,0>` the hole block is 1x1; the closed form
/// still returns two roots, one of which is the `k`-independent value
/// `mu - omega + chi(1) - delta/2`. The other root is the hole band.
pub fn closed_form_single_hole(k: f64, site: &SiteParams, kappa: f64, mu: f64) -> f64 {
    let (lo, hi) = closed_form_hole(1, k, site, kappa, mu).expect("n = 1 is valid");
    let flat = mu - site.omega() + site.rabi(1) - 0.5 * site.delta();
    if (lo - flat).abs() <= (hi - flat).abs() {
        hi
    } else {
        lo
    }
}

/// Sampled band structure: `energies[i]` holds the ascending eigenvalues at
/// `k[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub sector: Sector,
    pub k: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
}

impl Band {
    pub fn branches(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    /// Minimum of the lowest branch over the sampled momenta.
    pub fn minimum(&self) -> f64 {
        self.energies
            .iter()
            .map(|e| e[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// `count` evenly spaced momenta covering `[-pi, pi]` inclusive.
/// Symmetric under `k -> -k`; hits `0` exactly when `count` is odd.
pub fn k_grid(count: usize) -> Vec<f64> {
    let half = (count - 1) as f64;
    (0..count).map(|i| PI * (2.0 * i as f64 - half) / half).collect()
}

pub fn sample_band(cell: &UnitCell, sector: Sector, k_count: usize) -> Result<Band> {
    if k_count < 2 {
        return Err(invalid("k_points", "need at least 2 momenta"));
    }
    let k = k_grid(k_count);
    let energies = k
        .iter()
        .map(|&q| diagonalize(&build_block(cell, sector, q)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Band {
        sector,
        k,
        energies,
    })
}
