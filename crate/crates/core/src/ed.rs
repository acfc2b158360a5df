//! Exact diagonalization of finite chains at fixed total excitation number.
//!
//! A cavity state is coded `2 p + a` (`p` photons, atom `a`); a basis state is
//! the code sequence over sites, enumerated in lexicographic order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

#[cfg(feature = "rayon")]
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::jc::SiteParams;
use crate::linalg::{lanczos_lowest, symmetric_eigenvalues, LanczosOptions, SymmetricOperator};

/// Sectors up to this dimension are solved densely.
pub const DENSE_LIMIT: usize = 400;
pub const DEFAULT_NONZERO_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Periodic; bonds `(r, r+1 mod M)`. At `M = 2` both bonds join the same
    /// pair, doubling the hopping.
    Ring,
    Open,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Ring => "ring",
            Boundary::Open => "open",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    sites: Vec<SiteParams>,
    kappa: f64,
    boundary: Boundary,
}

impl Chain {
    pub fn new(sites: Vec<SiteParams>, kappa: f64, boundary: Boundary) -> Result<Self> {
        if sites.len() < 2 {
            return Err(invalid("cavities", "need at least 2 cavities"));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(invalid("kappa", "hopping must be finite and >= 0"));
        }
        Ok(Self {
            sites,
            kappa,
            boundary,
        })
    }

    pub fn uniform(site: SiteParams, m: usize, kappa: f64, boundary: Boundary) -> Result<Self> {
        Self::new(vec![site; m], kappa, boundary)
    }

    pub fn sites(&self) -> &[SiteParams] {
        &self.sites
    }
    pub fn len(&self) -> usize {
        self.sites.len()
    }
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.sites.clone(), kappa, self.boundary)
    }

    /// Site order reversed.
    pub fn reversed(&self) -> Self {
        let mut sites = self.sites.clone();
        sites.reverse();
        Self { sites, ..*self }
    }

    /// Directed-free bond list; each bond carries hopping both ways.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let m = self.sites.len();
        match self.boundary {
            Boundary::Ring => (0..m).map(|r| (r, (r + 1) % m)).collect(),
            Boundary::Open => (0..m - 1).map(|r| (r, r + 1)).collect(),
        }
    }
}

fn excitations(code: u8) -> u32 {
    u32::from(code / 2) + u32::from(code % 2)
}

/// Basis of the sector with `n` total excitations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    m: usize,
    n: u32,
    n_max: u32,
    /// Row-major codes, `m` per state.
    codes: Vec<u8>,
}

impl SectorBasis {
    /// Every cavity may hold up to `n_max` photons.
    pub fn new(m: usize, n: u32, n_max: u32) -> Result<Self> {
        if m == 0 {
            return Err(invalid("cavities", "need at least 1 cavity"));
        }
        if n_max > 126 {
            return Err(invalid("n_max", "per-cavity photon cap must be <= 126"));
        }
        let top = (2 * n_max + 1) as u8;
        let mut codes = Vec::new();
        let mut current = vec![0u8; m];
        fill(&mut current, 0, n, top, &mut codes);
        Ok(Self { m, n, n_max, codes })
    }

    pub fn dim(&self) -> usize {
        self.codes.len() / self.m
    }
    pub fn cavities(&self) -> usize {
        self.m
    }
    pub fn excitations(&self) -> u32 {
        self.n
    }
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.codes[i * self.m..(i + 1) * self.m]
    }

    /// Photon count and atom flag of cavity `r` in state `i`.
    pub fn occupation(&self, i: usize, r: usize) -> (u32, u32) {
        let c = self.state(i)[r];
        (u32::from(c / 2), u32::from(c % 2))
    }

    pub fn index_of(&self, state: &[u8]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.dim());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.state(mid).cmp(state) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

fn fill(current: &mut [u8], r: usize, remaining: u32, top: u8, out: &mut Vec<u8>) {
    if r == current.len() {
        if remaining == 0 {
            out.extend_from_slice(current);
        }
        return;
    }
    for code in 0..=top {
        let e = excitations(code);
        // Excitations per code are nondecreasing.
        if e > remaining {
            break;
        }
        current[r] = code;
        fill(current, r + 1, remaining - e, top, out);
    }
    current[r] = 0;
}

/// Real symmetric matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn nonzeros(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = self.row_start[i]..self.row_start[i + 1];
        match self.cols[row.clone()].binary_search(&j) {
            Ok(p) => self.values[row.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for p in self.row_start[i]..self.row_start[i + 1] {
                d[(i, self.cols[p])] = self.values[p];
            }
        }
        d
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for p in self.row_start[i]..self.row_start[i + 1] {
                worst = worst.max((self.values[p] - self.get(self.cols[p], i)).abs());
            }
        }
        worst
    }
}

impl SymmetricOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_start[i]..self.row_start[i + 1] {
                acc += self.values[p] * x[self.cols[p]];
            }
            *o = acc;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub basis: SectorBasis,
    pub hamiltonian: CsrMatrix,
}

/// Canonical Hamiltonian (no chemical potential) restricted to `n`
/// excitations with per-cavity photon cap `n_max` (default `n`, which is exact).
pub fn build_sector(
    chain: &Chain,
    n: u32,
    n_max: Option<u32>,
    nonzero_cap: usize,
) -> Result<Sector> {
    let m = chain.len();
    let basis = SectorBasis::new(m, n, n_max.unwrap_or(n))?;
    let cap = basis.n_max;
    let bonds = chain.bonds();
    let dim = basis.dim();
    let mut row_start = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    let mut target = vec![0u8; m];
    row_start.push(0);

    for i in 0..dim {
        entries.clear();
        let state = basis.state(i);
        let mut diag = 0.0;
        for (r, &code) in state.iter().enumerate() {
            let (p, a) = (u32::from(code / 2), u32::from(code % 2));
            let s = &chain.sites[r];
            diag += f64::from(p) * s.omega() + f64::from(a) * s.epsilon();
        }
        entries.push((i, diag));

        let push = |target: &[u8], amp: f64, entries: &mut Vec<(usize, f64)>| -> Result<()> {
            let j = basis.index_of(target).ok_or(Error::SectorLeak {
                excitations: target.iter().map(|&c| excitations(c)).sum(),
            })?;
            entries.push((j, amp));
            Ok(())
        };

        // Jaynes-Cummings flips |p,g> <-> |p-1,e>.
        for (r, &code) in state.iter().enumerate() {
            let (p, a) = (code / 2, code % 2);
            let beta = chain.sites[r].beta();
            target.copy_from_slice(state);
            if a == 0 && p >= 1 {
                target[r] = 2 * (p - 1) + 1;
                push(&target, beta * libm::sqrt(f64::from(p)), &mut entries)?;
            } else if a == 1 && u32::from(p) < cap {
                target[r] = 2 * (p + 1);
                push(&target, beta * libm::sqrt(f64::from(p) + 1.0), &mut entries)?;
            }
        }

        // -kappa (a_r^dagger a_s + a_s^dagger a_r) on each bond.
        if chain.kappa != 0.0 {
            for &(r, s) in &bonds {
                for (to, from) in [(r, s), (s, r)] {
                    let (p_to, p_from) = (state[to] / 2, state[from] / 2);
                    if p_from == 0 || u32::from(p_to) >= cap {
                        continue;
                    }
                    target.copy_from_slice(state);
                    target[from] -= 2;
                    target[to] += 2;
                    let amp = -chain.kappa
                        * libm::sqrt(f64::from(p_from))
                        * libm::sqrt(f64::from(p_to) + 1.0);
                    push(&target, amp, &mut entries)?;
                }
            }
        }

        entries.sort_by_key(|e| e.0);
        let mut last: Option<usize> = None;
        for &(j, v) in entries.iter() {
            if last == Some(j) {
                *values.last_mut().expect("merged entry follows a pushed one") += v;
            } else {
                cols.push(j);
                values.push(v);
                last = Some(j);
            }
        }
        if values.len() > nonzero_cap {
            return Err(Error::DimensionOverflow {
                nonzeros: values.len(),
                cap: nonzero_cap,
            });
        }
        row_start.push(values.len());
    }

    Ok(Sector {
        basis,
        hamiltonian: CsrMatrix {
            dim,
            row_start,
            cols,
            values,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdOptions {
    pub dense_limit: usize,
    pub nonzero_cap: usize,
    pub lanczos: LanczosOptions,
}

impl Default for EdOptions {
    fn default() -> Self {
        Self {
            dense_limit: DENSE_LIMIT,
            nonzero_cap: DEFAULT_NONZERO_CAP,
            lanczos: LanczosOptions::default(),
        }
    }
}

/// Lowest eigenvalue of a sector.
pub fn sector_ground_energy(sector: &Sector, opts: &EdOptions) -> Result<f64> {
    let h = &sector.hamiltonian;
    if h.dim <= opts.dense_limit {
        let context = format!(
            "ED sector M={} N={}",
            sector.basis.m, sector.basis.n
        );
        let values = symmetric_eigenvalues(h.to_dense(), &context)?;
        Ok(values[0])
    } else {
        Ok(lanczos_lowest(h, &opts.lanczos)?.value)
    }
}

/// Canonical ground energy `E0(n)` of the chain.
pub fn ground_energy(chain: &Chain, n: u32, opts: &EdOptions) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    sector_ground_energy(&build_sector(chain, n, None, opts.nonzero_cap)?, opts)
}

/// Ground energies `E0(N)` for `N = 0..=n_top`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdSpectrum {
    pub boundary: Boundary,
    pub cavities: usize,
    pub kappa: f64,
    pub energies: Vec<f64>,
}

impl EdSpectrum {
    /// `N* = argmin_N [E0(N) - mu N]`, ties to the smaller `N`.
    pub fn optimal_filling(&self, mu: f64) -> u32 {
        let mut best = (0u32, self.energies[0]);
        for (n, &e) in self.energies.iter().enumerate().skip(1) {
            let g = e - mu * n as f64;
            if g < best.1 - mu * f64::from(best.0) {
                best = (n as u32, e);
            }
        }
        best.0
    }

    pub fn n_top(&self) -> u32 {
        (self.energies.len() - 1) as u32
    }
}

pub fn spectrum(chain: &Chain, n_top: u32, opts: &EdOptions) -> Result<EdSpectrum> {
    let ns: Vec<u32> = (0..=n_top).collect();
    #[cfg(feature = "rayon")]
    let energies = ns
        .par_iter()
        .map(|&n| ground_energy(chain, n, opts))
        .collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "rayon"))]
    let energies = ns
        .iter()
        .map(|&n| ground_energy(chain, n, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(EdSpectrum {
        boundary: chain.boundary,
        cavities: chain.len(),
        kappa: chain.kappa,
        energies,
    })
}

/// Mean excitation `N*(mu) / M` along a chemical-potential axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationCurve {
    pub mu: Vec<f64>,
    pub density: Vec<f64>,
    /// `N*` reached the largest sector computed; the true density may be higher.
    pub saturated: Vec<bool>,
}

pub fn mean_excitation_curve(spectrum: &EdSpectrum, mu_axis: &[f64]) -> ExcitationCurve {
    let m = spectrum.cavities as f64;
    let top = spectrum.n_top();
    let fillings: Vec<u32> = mu_axis.iter().map(|&mu| spectrum.optimal_filling(mu)).collect();
    ExcitationCurve {
        mu: mu_axis.to_vec(),
        density: fillings.iter().map(|&n| f64::from(n) / m).collect(),
        saturated: fillings.iter().map(|&n| n == top).collect(),
    }
}

/// Chemical potentials bounding the plateau at `target` excitations per
/// cavity: `E0(tM) - E0(tM-1)` and `E0(tM+1) - E0(tM)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauBoundary {
    pub boundary: Boundary,
    pub cavities: usize,
    pub target: u32,
    pub kappa: Vec<f64>,
    pub mu_lower: Vec<f64>,
    pub mu_upper: Vec<f64>,
}

pub fn plateau_edges(chain: &Chain, target: u32, opts: &EdOptions) -> Result<(f64, f64)> {
    if target == 0 {
        return Err(invalid("target", "plateau filling must be >= 1"));
    }
    let n = target * chain.len() as u32;
    let below = ground_energy(chain, n - 1, opts)?;
    let at = ground_energy(chain, n, opts)?;
    let above = ground_energy(chain, n + 1, opts)?;
    Ok((at - below, above - at))
}

pub fn plateau_boundaries(
    chain: &Chain,
    kappa_axis: &[f64],
    target: u32,
    opts: &EdOptions,
) -> Result<PlateauBoundary> {
    let edge = |&kappa: &f64| plateau_edges(&chain.with_kappa(kappa)?, target, opts);
    #[cfg(feature = "rayon")]
    let edges = kappa_axis.par_iter().map(edge).collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "rayon"))]
    let edges = kappa_axis.iter().map(edge).collect::<Result<Vec<_>>>()?;
    Ok(PlateauBoundary {
        boundary: chain.boundary,
        cavities: chain.len(),
        target,
        kappa: kappa_axis.to_vec(),
        mu_lower: edges.iter().map(|e| e.0).collect(),
        mu_upper: edges.iter().map(|e| e.1).collect(),
    })
}

/// All `2M` grand energies `E - mu` of the one-excitation sector, ascending.
pub fn single_excitation_spectrum(chain: &Chain, mu: f64) -> Result<Vec<f64>> {
    let sector = build_sector(chain, 1, None, DEFAULT_NONZERO_CAP)?;
    let mut values = symmetric_eigenvalues(sector.hamiltonian.to_dense(), "one-excitation sector")?;
    values.iter_mut().for_each(|v| *v -= mu);
    Ok(values)
}

/// [`single_excitation_spectrum`] on a ring.
pub fn ring_single_excitation_spectrum(
    sites: &[SiteParams],
    kappa: f64,
    mu: f64,
) -> Result<Vec<f64>> {
    single_excitation_spectrum(&Chain::new(sites.to_vec(), kappa, Boundary::Ring)?, mu)
}
