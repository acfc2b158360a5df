//! Mott lobes from the one-polariton / one-hole band minima.
//!
//! A background pattern is a Mott insulator at `(kappa, mu)` while both the
//! lowest particle band and the lowest hole band stay positive. The particle
//! band shifts as `-mu` and the hole band as `+mu` at fixed fillings, so each
//! lobe edge is a single band minimum evaluated at `mu = 0`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[cfg(feature = "rayon")]
use rayon::prelude::*;

use crate::bloch::{k_grid, lowest_energy, Sector, UnitCell};
use crate::error::{invalid, Error, Result};
use crate::jc::{atomic_limit_filling, SiteParams, DEFAULT_FILLING_SEARCH};

/// Momenta sampled when taking a band minimum.
pub const DEFAULT_K_POINTS: usize = 65;

/// A point is labelled Mott when its gap exceeds this many units of the
/// reference coupling.
pub const MOTT_THRESHOLD: f64 = 1e-9;

/// Lowest particle and hole excitation energies of a Mott background.
///
/// Raw values: negative means the background is unstable to that excitation.
/// `hole` is `None` when every site is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationGaps {
    pub particle: f64,
    pub hole: Option<f64>,
}

/// Type of the cheapest excitation: an extra polariton (n-type analog) or a
/// hole (p-type analog).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Carrier {
    Particle,
    Hole,
}

impl ExcitationGaps {
    pub fn raw_min(&self) -> f64 {
        self.hole.map_or(self.particle, |h| self.particle.min(h))
    }

    /// Gap clipped at zero.
    pub fn gap(&self) -> f64 {
        self.raw_min().max(0.0)
    }

    pub fn carrier(&self) -> Carrier {
        match self.hole {
            Some(h) if h < self.particle => Carrier::Hole,
            _ => Carrier::Particle,
        }
    }

    /// The same background at chemical potential `mu + dmu`.
    pub fn shift_mu(&self, dmu: f64) -> Self {
        Self {
            particle: self.particle - dmu,
            hole: self.hole.map(|h| h + dmu),
        }
    }
}

/// Minimum of the lowest band over `k_points` momenta spanning the zone.
pub fn band_minimum(cell: &UnitCell, sector: Sector, k_points: usize) -> Result<f64> {
    if k_points < 2 {
        return Err(invalid("k_points", "need at least 2 momenta"));
    }
    k_grid(k_points)
        .into_iter()
        .try_fold(f64::INFINITY, |acc, k| {
            Ok(acc.min(lowest_energy(cell, sector, k)?))
        })
}

pub fn excitation_gaps(cell: &UnitCell, k_points: usize) -> Result<ExcitationGaps> {
    let particle = band_minimum(cell, Sector::Particle, k_points)?;
    let hole = if cell.fillings().iter().all(|&n| n == 0) {
        None
    } else {
        Some(band_minimum(cell, Sector::Hole, k_points)?)
    };
    Ok(ExcitationGaps { particle, hole })
}

/// Chemical potentials bounding a lobe: the particle gap closes at
/// `mu_upper`, the hole gap at `mu_lower`. An all-empty background has no
/// lower edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobeEdges {
    pub mu_lower: Option<f64>,
    pub mu_upper: f64,
}

impl LobeEdges {
    /// `mu_upper - mu_lower`; infinite without a lower edge. Negative once the
    /// lobe has closed.
    pub fn width(&self) -> f64 {
        self.mu_lower.map_or(f64::INFINITY, |lo| self.mu_upper - lo)
    }
}

/// Lobe edges without the closed-lobe check.
pub fn lobe_edges(
    sites: &[SiteParams],
    fillings: &[u32],
    kappa: f64,
    k_points: usize,
) -> Result<LobeEdges> {
    let cell = UnitCell::new(sites.to_vec(), fillings.to_vec(), kappa, 0.0)?;
    let gaps = excitation_gaps(&cell, k_points)?;
    Ok(LobeEdges {
        mu_lower: gaps.hole.map(|h| -h),
        mu_upper: gaps.particle,
    })
}

/// Lobe edges at hopping `kappa`; fails with [`Error::LobeClosed`] past the tip.
pub fn lobe_boundary(
    sites: &[SiteParams],
    fillings: &[u32],
    kappa: f64,
    k_points: usize,
) -> Result<LobeEdges> {
    let edges = lobe_edges(sites, fillings, kappa, k_points)?;
    match edges.mu_lower {
        Some(lo) if edges.mu_upper < lo => Err(Error::LobeClosed {
            mu_lower: lo,
            mu_upper: edges.mu_upper,
        }),
        _ => Ok(edges),
    }
}

/// Lobe edges of one filling pattern traced over a hopping grid. Entries past
/// the tip are kept raw (`mu_upper < mu_lower`).
#[derive(Debug, Clone, PartialEq)]
pub struct LobeBoundary {
    pub fillings: Vec<u32>,
    pub kappa: Vec<f64>,
    pub mu_upper: Vec<f64>,
    pub mu_lower: Vec<Option<f64>>,
}

impl LobeBoundary {
    pub fn is_open(&self, i: usize) -> bool {
        self.mu_lower[i].map_or(true, |lo| self.mu_upper[i] >= lo)
    }
}

pub fn trace_lobe(
    sites: &[SiteParams],
    fillings: &[u32],
    kappa: &[f64],
    k_points: usize,
) -> Result<LobeBoundary> {
    let edges = kappa
        .iter()
        .map(|&kap| lobe_edges(sites, fillings, kap, k_points))
        .collect::<Result<Vec<_>>>()?;
    Ok(LobeBoundary {
        fillings: fillings.to_vec(),
        kappa: kappa.to_vec(),
        mu_upper: edges.iter().map(|e| e.mu_upper).collect(),
        mu_lower: edges.iter().map(|e| e.mu_lower).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipOptions {
    pub k_points: usize,
    /// Bisection stops when the bracket is this fraction of the tip hopping.
    pub rel_tol: f64,
    /// First trial hopping, in units of the reference coupling.
    pub initial_kappa: f64,
}

impl Default for TipOptions {
    fn default() -> Self {
        Self {
            k_points: DEFAULT_K_POINTS,
            rel_tol: 1e-8,
            initial_kappa: 0.01,
        }
    }
}

/// Hopping at which the lobe of `fillings` closes.
///
/// The width is bisected on `kappa`. Every sampled width is kept, and the
/// result is rejected if the samples are not monotone decreasing in `kappa`.
pub fn lobe_tip(sites: &[SiteParams], fillings: &[u32], opts: &TipOptions) -> Result<f64> {
    let beta = sites
        .first()
        .ok_or_else(|| invalid("sites", "unit cell needs at least one site"))?
        .beta();
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut width = |kappa: f64| -> Result<f64> {
        let w = lobe_edges(sites, fillings, kappa, opts.k_points)?.width();
        samples.push((kappa, w));
        Ok(w)
    };

    let w0 = width(0.0)?;
    if w0.is_infinite() {
        return Err(Error::UnboundedLobe);
    }
    if w0 <= 0.0 {
        let e = lobe_edges(sites, fillings, 0.0, opts.k_points)?;
        return Err(Error::LobeClosed {
            mu_lower: e.mu_lower.unwrap_or(f64::NEG_INFINITY),
            mu_upper: e.mu_upper,
        });
    }
    let mut lo = 0.0;
    let mut hi = opts.initial_kappa * beta;
    let mut doublings = 0;
    while width(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::BracketFailure { lo, hi });
        }
    }
    while hi - lo > opts.rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if width(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let slack = 1e-12 * beta;
    if let Some(w) = samples.windows(2).find(|w| w[1].1 > w[0].1 + slack) {
        return Err(Error::NonMonotoneWidth { kappa: w[1].0 });
    }
    Ok(0.5 * (lo + hi))
}

/// Per-site zero-hopping fillings at chemical potential `mu`.
///
/// For a two-site cell with detunings `delta_0`, `delta_1` this yields the
/// alternating patterns `|n>|n>`, `|n+1>|n>` (or `|n>|n+1>`), whichever
/// sublattice reaches its next lobe edge first.
pub fn doped_background(sites: &[SiteParams], mu: f64, n_max: u32) -> Result<Vec<u32>> {
    sites
        .iter()
        .map(|s| atomic_limit_filling(s, mu, n_max))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseLabel {
    /// Mott insulator with the given per-site background fillings.
    Mott(Vec<u32>),
    Superfluid,
    /// The point could not be evaluated.
    Failed(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub label: PhaseLabel,
    /// Raw gaps of the selected background; `None` for failed points.
    pub gaps: Option<ExcitationGaps>,
    /// Gap clipped at zero (zero exactly on superfluid points, NaN on failed
    /// ones).
    pub gap: f64,
}

impl PhasePoint {
    pub fn is_mott(&self) -> bool {
        matches!(self.label, PhaseLabel::Mott(_))
    }
}

/// Gap and phase over a `(kappa, mu)` grid, stored row-major with `kappa` as
/// the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub kappa: Vec<f64>,
    pub mu: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl PhaseGrid {
    pub fn get(&self, i_kappa: usize, i_mu: usize) -> &PhasePoint {
        &self.points[i_kappa * self.mu.len() + i_mu]
    }

    pub fn row(&self, i_kappa: usize) -> &[PhasePoint] {
        let n = self.mu.len();
        &self.points[i_kappa * n..(i_kappa + 1) * n]
    }

    /// Distinct Mott backgrounds appearing in row `i_kappa`.
    pub fn lobes_in_row(&self, i_kappa: usize) -> Vec<Vec<u32>> {
        let mut seen: Vec<Vec<u32>> = Vec::new();
        for p in self.row(i_kappa) {
            if let PhaseLabel::Mott(f) = &p.label {
                if !seen.contains(f) {
                    seen.push(f.clone());
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMapOptions {
    pub k_points: usize,
    /// Search bound for the zero-hopping filling.
    pub n_max: u32,
    /// Mott threshold in units of the reference coupling.
    pub threshold: f64,
}

impl Default for GapMapOptions {
    fn default() -> Self {
        Self {
            k_points: DEFAULT_K_POINTS,
            n_max: DEFAULT_FILLING_SEARCH,
            threshold: MOTT_THRESHOLD,
        }
    }
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(invalid(name, "axis is empty"));
    }
    if axis.iter().any(|x| !x.is_finite()) {
        return Err(invalid(name, "axis has non-finite values"));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "axis must be strictly increasing"));
    }
    Ok(())
}

fn gap_map_row(
    sites: &[SiteParams],
    kappa: f64,
    mu_axis: &[f64],
    opts: &GapMapOptions,
    beta: f64,
) -> Vec<PhasePoint> {
    // Gaps are exactly linear in mu at fixed fillings: solve each background
    // once at mu = 0 and shift.
    let mut cache: BTreeMap<Vec<u32>, Result<ExcitationGaps>> = BTreeMap::new();
    mu_axis
        .iter()
        .map(|&mu| {
            let fillings = match doped_background(sites, mu, opts.n_max) {
                Ok(f) => f,
                Err(e) => return failed(e),
            };
            let at_zero = cache
                .entry(fillings.clone())
                .or_insert_with(|| {
                    let cell = UnitCell::new(sites.to_vec(), fillings.clone(), kappa, 0.0)?;
                    excitation_gaps(&cell, opts.k_points)
                })
                .clone();
            match at_zero {
                Ok(g0) => {
                    let gaps = g0.shift_mu(mu);
                    let raw = gaps.raw_min();
                    if raw > opts.threshold * beta {
                        PhasePoint {
                            label: PhaseLabel::Mott(fillings),
                            gaps: Some(gaps),
                            gap: raw,
                        }
                    } else {
                        PhasePoint {
                            label: PhaseLabel::Superfluid,
                            gaps: Some(gaps),
                            gap: 0.0,
                        }
                    }
                }
                Err(e) => failed(e),
            }
        })
        .collect()
}

fn failed(e: Error) -> PhasePoint {
    PhasePoint {
        label: PhaseLabel::Failed(e),
        gaps: None,
        gap: f64::NAN,
    }
}

/// Gap map of the periodic chain whose unit cell has the given sites.
///
/// Each point takes its background from the zero-hopping rule. Points that
/// fail are recorded in the grid instead of aborting the sweep.
pub fn gap_map(
    sites: &[SiteParams],
    kappa_axis: &[f64],
    mu_axis: &[f64],
    opts: &GapMapOptions,
) -> Result<PhaseGrid> {
    check_axis("kappa", kappa_axis)?;
    check_axis("mu", mu_axis)?;
    if kappa_axis[0] < 0.0 {
        return Err(invalid("kappa", "hopping must be >= 0"));
    }
    let beta = sites
        .first()
        .ok_or_else(|| invalid("sites", "unit cell needs at least one site"))?
        .beta();

    #[cfg(feature = "rayon")]
    let rows: Vec<Vec<PhasePoint>> = kappa_axis
        .par_iter()
        .map(|&kappa| gap_map_row(sites, kappa, mu_axis, opts, beta))
        .collect();
    #[cfg(not(feature = "rayon"))]
    let rows: Vec<Vec<PhasePoint>> = kappa_axis
        .iter()
        .map(|&kappa| gap_map_row(sites, kappa, mu_axis, opts, beta))
        .collect();

    Ok(PhaseGrid {
        kappa: kappa_axis.to_vec(),
        mu: mu_axis.to_vec(),
        points: rows.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionReport {
    pub holds: bool,
    /// Largest distance in `mu` between the doped Mott region and the
    /// intersection of the tuned and detuned Mott regions.
    pub max_deviation: f64,
    pub mismatches: usize,
    /// `(kappa, deviation)` for every row checked.
    pub rows: Vec<(f64, f64)>,
}

/// Compare the doped Mott region with the intersection of the tuned and
/// detuned Mott regions, row by row for `kappa <= kappa_max`.
///
/// A mismatched point contributes its distance to the nearest point where the
/// intersection carries the doped label, so the deviation bounds how far the
/// symmetric difference reaches from the intersection's boundary.
pub fn intersection_check(
    tuned: &PhaseGrid,
    detuned: &PhaseGrid,
    doped: &PhaseGrid,
    kappa_max: f64,
    tolerance: f64,
) -> Result<IntersectionReport> {
    let same = |a: &PhaseGrid, b: &PhaseGrid| a.kappa == b.kappa && a.mu == b.mu;
    if !same(tuned, doped) || !same(detuned, doped) {
        return Err(Error::AxisMismatch);
    }
    let mu = &doped.mu;
    let mut rows = Vec::new();
    let mut mismatches = 0;
    let mut max_deviation = 0.0f64;
    for (i, &kappa) in doped.kappa.iter().enumerate() {
        if kappa > kappa_max {
            continue;
        }
        let a: Vec<bool> = doped.row(i).iter().map(PhasePoint::is_mott).collect();
        let b: Vec<bool> = tuned
            .row(i)
            .iter()
            .zip(detuned.row(i))
            .map(|(t, d)| t.is_mott() && d.is_mott())
            .collect();
        let nearest = |mask: &[bool], want: bool, j: usize| -> f64 {
            mask.iter()
                .enumerate()
                .filter(|&(_, &m)| m == want)
                .map(|(l, _)| (mu[l] - mu[j]).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let mut row_dev = 0.0f64;
        for j in 0..mu.len() {
            if a[j] != b[j] {
                mismatches += 1;
                let d = nearest(&b, a[j], j);
                row_dev = row_dev.max(d);
            }
        }
        rows.push((kappa, row_dev));
        max_deviation = max_deviation.max(row_dev);
    }
    Ok(IntersectionReport {
        holds: max_deviation <= tolerance,
        max_deviation,
        mismatches,
        rows,
    })
}

/// Location of a grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub i_kappa: usize,
    pub i_mu: usize,
    pub kappa: f64,
    pub mu: f64,
}

impl PhaseGrid {
    fn point(&self, i_kappa: usize, i_mu: usize) -> GridPoint {
        GridPoint {
            i_kappa,
            i_mu,
            kappa: self.kappa[i_kappa],
            mu: self.mu[i_mu],
        }
    }

    /// Mott points whose cheapest excitation is `carrier`. Empty backgrounds
    /// are skipped: they admit no hole, so the comparison is vacuous.
    pub fn carrier_points(&self, carrier: Carrier) -> Vec<GridPoint> {
        let n = self.mu.len();
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                p.is_mott() && p.gaps.is_some_and(|g| g.hole.is_some() && g.carrier() == carrier)
            })
            .map(|(idx, _)| self.point(idx / n, idx % n))
            .collect()
    }
}

/// The grid point where the doped gap exceeds both the tuned and the detuned
/// gap by the largest margin, with that margin. `None` if it never does.
pub fn find_gap_enhancement(
    tuned: &PhaseGrid,
    detuned: &PhaseGrid,
    doped: &PhaseGrid,
) -> Result<Option<(GridPoint, f64)>> {
    let same = |a: &PhaseGrid, b: &PhaseGrid| a.kappa == b.kappa && a.mu == b.mu;
    if !same(tuned, doped) || !same(detuned, doped) {
        return Err(Error::AxisMismatch);
    }
    let n = doped.mu.len();
    let mut best: Option<(GridPoint, f64)> = None;
    for (idx, p) in doped.points.iter().enumerate() {
        if !p.is_mott() {
            continue;
        }
        let (t, d) = (&tuned.points[idx], &detuned.points[idx]);
        if t.gap.is_nan() || d.gap.is_nan() {
            continue;
        }
        let excess = p.gap - t.gap.max(d.gap);
        if excess > 0.0 && best.map_or(true, |(_, e)| excess > e) {
            best = Some((doped.point(idx / n, idx % n), excess));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn site(delta: f64) -> SiteParams {
        SiteParams::with_detuning(0.0, delta, 1.0).unwrap()
    }

    fn chi(n: u32, delta: f64) -> f64 {
        (f64::from(n) + 0.25 * delta * delta).sqrt()
    }

    #[test]
    fn gaps_at_reference_point() {
        // Delta = 0, (mu - omega) = -0.5, kappa = 0.01, unit filling. The hole
        // band bottom is -0.5 + 1 - kappa. At k = 0 the particle block is
        // 1.5 + [[-2k, s], [s, -k]] with k = kappa, s = sqrt(2) (1 + kappa).
        let cell = UnitCell::uniform(site(0.0), 1, 0.01, -0.5).unwrap();
        let g = excitation_gaps(&cell, DEFAULT_K_POINTS).unwrap();
        assert_abs_diff_eq!(g.hole.unwrap(), 0.49, epsilon = 1e-13);
        let s = 2f64.sqrt() * 1.01;
        let expected = 1.5 - 0.015 - (0.005f64 * 0.005 + s * s).sqrt();
        assert_abs_diff_eq!(g.particle, expected, epsilon = 1e-13);
        let (lo, _) = crate::bloch::closed_form_particle(1, 0.0, &site(0.0), 0.01, -0.5);
        assert_abs_diff_eq!(g.particle, lo, epsilon = 1e-13);
        assert_abs_diff_eq!(g.particle, 0.0566355507, epsilon = 1e-10);
    }

    #[test]
    fn atomic_limit_gaps() {
        let centre = 0.5 * ((1.0 - 2f64.sqrt()) + -1.0);
        let cell = UnitCell::uniform(site(0.0), 1, 0.0, centre).unwrap();
        let g = excitation_gaps(&cell, DEFAULT_K_POINTS).unwrap();
        assert_abs_diff_eq!(g.particle, 1.0 - 2f64.sqrt() - centre, epsilon = 1e-14);
        assert_abs_diff_eq!(g.hole.unwrap(), centre + 1.0, epsilon = 1e-14);
        let edge = UnitCell::uniform(site(0.0), 1, 0.0, 1.0 - 2f64.sqrt()).unwrap();
        let g = excitation_gaps(&edge, DEFAULT_K_POINTS).unwrap();
        assert_abs_diff_eq!(g.particle, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn atomic_limit_lobe_edges() {
        for delta in [0.0, 1.0] {
            for n in 1..6 {
                let e = lobe_boundary(&[site(delta)], &[n], 0.0, DEFAULT_K_POINTS).unwrap();
                // The empty cavity sits at energy 0, i.e. chi(0) acts as -delta/2.
                let below = if n == 1 { -0.5 * delta } else { chi(n - 1, delta) };
                assert_abs_diff_eq!(e.mu_lower.unwrap(), below - chi(n, delta), epsilon = 1e-12);
                assert_abs_diff_eq!(e.mu_upper, chi(n, delta) - chi(n + 1, delta), epsilon = 1e-12);
            }
        }
        let e = lobe_boundary(&[site(0.0)], &[2], 0.0, DEFAULT_K_POINTS).unwrap();
        assert_abs_diff_eq!(e.mu_lower.unwrap(), 1.0 - 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(e.mu_upper, 2f64.sqrt() - 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn empty_lobe_has_no_lower_edge() {
        let e = lobe_boundary(&[site(0.0)], &[0], 0.05, DEFAULT_K_POINTS).unwrap();
        assert!(e.mu_lower.is_none());
        assert!(e.width().is_infinite());
        assert_eq!(
            lobe_tip(&[site(0.0)], &[0], &TipOptions::default()),
            Err(Error::UnboundedLobe)
        );
    }

    #[test]
    fn hopping_narrows_the_lobe() {
        let w0 = lobe_boundary(&[site(0.0)], &[1], 0.0, DEFAULT_K_POINTS).unwrap().width();
        let w = lobe_boundary(&[site(0.0)], &[1], 0.01, DEFAULT_K_POINTS).unwrap().width();
        assert!(w < w0);
        assert_abs_diff_eq!(w0, 2.0 - 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn closed_lobe_is_reported() {
        let r = lobe_boundary(&[site(0.0)], &[1], 1.0, DEFAULT_K_POINTS);
        assert!(matches!(r, Err(Error::LobeClosed { .. })));
    }

    #[test]
    fn tips_shrink_with_filling() {
        let opts = TipOptions::default();
        let t1 = lobe_tip(&[site(0.0)], &[1], &opts).unwrap();
        let t2 = lobe_tip(&[site(0.0)], &[2], &opts).unwrap();
        assert!(t1 > t2, "{t1} vs {t2}");
        // Width changes sign across the reported tip.
        let w = |k: f64| lobe_edges(&[site(0.0)], &[1], k, DEFAULT_K_POINTS).unwrap().width();
        assert!(w(t1 * (1.0 - 1e-6)) > 0.0);
        assert!(w(t1 * (1.0 + 1e-6)) < 0.0);
    }

    #[test]
    fn doped_backgrounds_alternate() {
        let sites = [site(0.0), site(1.0)];
        // n = 0 pair: the detuned site fills first.
        assert_eq!(doped_background(&sites, -1.3, 20).unwrap(), [0, 1]);
        assert_eq!(doped_background(&sites, -1.8, 20).unwrap(), [0, 0]);
        // n >= 1: the resonant site takes the extra excitation.
        for n in 1..4u32 {
            let lo0 = chi(n, 0.0) - chi(n + 1, 0.0);
            let lo1 = chi(n, 1.0) - chi(n + 1, 1.0);
            assert!(lo0 < lo1);
            let mu = 0.5 * (lo0 + lo1);
            assert_eq!(doped_background(&sites, mu, 40).unwrap(), [n + 1, n]);
            assert_eq!(doped_background(&sites, lo0 - 1e-3, 40).unwrap(), [n, n]);
        }
        // Upper edges of the empty lobe at kappa = 0.
        let resonant = lobe_boundary(&[site(0.0)], &[0], 0.0, 5).unwrap().mu_upper;
        let detuned = lobe_boundary(&[site(1.0)], &[0], 0.0, 5).unwrap().mu_upper;
        assert_abs_diff_eq!(resonant, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(detuned, -(0.5 + 5f64.sqrt() / 2.0), epsilon = 1e-15);
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn gap_map_labels_and_clipping() {
        let kappa = axis(0.0, 0.3, 7);
        let mu = axis(-1.2, -0.25, 40);
        let grid = gap_map(&[site(0.0)], &kappa, &mu, &GapMapOptions::default()).unwrap();
        for p in &grid.points {
            assert!(p.gap >= 0.0);
            assert_eq!(p.gap == 0.0, !p.is_mott());
        }
        // Beyond every tip the whole row is superfluid, except the n = 0 lobe
        // which never closes.
        let last = grid.kappa.len() - 1;
        for (j, p) in grid.row(last).iter().enumerate() {
            if let PhaseLabel::Mott(f) = &p.label {
                assert_eq!(f, &[0], "mu = {}", grid.mu[j]);
            }
        }
        // Nested lobes at zero hopping.
        assert_eq!(grid.lobes_in_row(0), [[0], [1], [2], [3], [4]]);
    }

    #[test]
    fn gap_map_rejects_bad_axes() {
        let opts = GapMapOptions::default();
        assert!(gap_map(&[site(0.0)], &[0.0, 0.0], &[-0.5], &opts).is_err());
        assert!(gap_map(&[site(0.0)], &[0.1], &[-0.4, -0.5], &opts).is_err());
        assert!(gap_map(&[site(0.0)], &[-0.1], &[-0.5], &opts).is_err());
    }

    #[test]
    fn gap_map_records_failures() {
        let grid = gap_map(&[site(0.0)], &[0.01], &[-0.5, 0.5], &GapMapOptions::default()).unwrap();
        assert!(grid.get(0, 0).is_mott());
        assert!(matches!(
            grid.get(0, 1).label,
            PhaseLabel::Failed(Error::FillingTruncated { .. })
        ));
        assert!(grid.get(0, 1).gap.is_nan());
    }

    #[test]
    fn intersection_is_exact_without_hopping() {
        let mu = axis(-1.7, -0.29, 400);
        let opts = GapMapOptions::default();
        let kappa = [0.0];
        let tuned = gap_map(&[site(0.0)], &kappa, &mu, &opts).unwrap();
        let detuned = gap_map(&[site(1.0)], &kappa, &mu, &opts).unwrap();
        let doped = gap_map(&[site(0.0), site(1.0)], &kappa, &mu, &opts).unwrap();
        let r = intersection_check(&tuned, &detuned, &doped, 1e-3, 1e-3).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_deviation, 0.0);
        assert_eq!(r.mismatches, 0);
    }

    #[test]
    fn intersection_rejects_mismatched_axes() {
        let opts = GapMapOptions::default();
        let a = gap_map(&[site(0.0)], &[0.0], &[-0.6, -0.5], &opts).unwrap();
        let b = gap_map(&[site(0.0)], &[0.0], &[-0.6, -0.4], &opts).unwrap();
        assert_eq!(
            intersection_check(&a, &a, &b, 1.0, 1e-3),
            Err(Error::AxisMismatch)
        );
    }

    fn synthetic(mott: &[bool]) -> PhaseGrid {
        PhaseGrid {
            kappa: vec![0.0],
            mu: (0..mott.len()).map(|j| j as f64 * 0.1).collect(),
            points: mott
                .iter()
                .map(|&m| PhasePoint {
                    label: if m { PhaseLabel::Mott(vec![1]) } else { PhaseLabel::Superfluid },
                    gaps: None,
                    gap: if m { 1.0 } else { 0.0 },
                })
                .collect(),
        }
    }

    #[test]
    fn intersection_deviation_is_distance_to_the_reference_boundary() {
        let t = [true, true, true, true, false, false, true, true, true, true];
        let everywhere = synthetic(&[true; 10]);
        let tuned = synthetic(&t);
        // Doped covers the superfluid window of the reference entirely.
        let r = intersection_check(&tuned, &everywhere, &everywhere, 1.0, 0.1 + 1e-12).unwrap();
        assert_eq!(r.mismatches, 2);
        assert_abs_diff_eq!(r.max_deviation, 0.1, epsilon = 1e-12);
        assert!(r.holds);
        // Doped boundary shifted by two points.
        let shifted = synthetic(&[true, true, false, false, false, false, true, true, true, true]);
        let r = intersection_check(&tuned, &everywhere, &shifted, 1.0, 0.1 + 1e-12).unwrap();
        assert_abs_diff_eq!(r.max_deviation, 0.2, epsilon = 1e-12);
        assert!(!r.holds);
    }

    proptest! {
        #[test]
        fn gaps_are_linear_in_mu(
            n in 1u32..5,
            delta in -1.0f64..1.0,
            kappa in 0.0f64..0.1,
            mu in -1.5f64..0.0,
        ) {
            let cell = UnitCell::uniform(site(delta), n, kappa, 0.0).unwrap();
            let g0 = excitation_gaps(&cell, 17).unwrap();
            let g = excitation_gaps(&cell.with_mu(mu), 17).unwrap();
            prop_assert!((g.particle - (g0.particle - mu)).abs() < 1e-12);
            prop_assert!((g.hole.unwrap() - (g0.hole.unwrap() + mu)).abs() < 1e-12);
        }

        #[test]
        fn resonant_lobes_nest(kappa in 0.0f64..0.02) {
            let widths: Vec<f64> = (1..5u32)
                .map(|n| lobe_edges(&[site(0.0)], &[n], kappa, 33).unwrap().width())
                .collect();
            prop_assert!(widths.windows(2).all(|w| w[0] > w[1]), "{widths:?}");
        }

        #[test]
        fn lobe_edges_shift_with_gauge(
            n in 1u32..4,
            kappa in 0.0f64..0.05,
            c in -20.0f64..20.0,
        ) {
            let s = site(0.4);
            let a = lobe_edges(&[s], &[n], kappa, 17).unwrap();
            let b = lobe_edges(&[s.shifted(c)], &[n], kappa, 17).unwrap();
            prop_assert!((b.mu_upper - c - a.mu_upper).abs() < 1e-10);
            prop_assert!((b.mu_lower.unwrap() - c - a.mu_lower.unwrap()).abs() < 1e-10);
        }
    }
}
