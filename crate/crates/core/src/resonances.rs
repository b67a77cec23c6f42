//! Dressed cavity resonances as complex zeros of the round-trip determinant.
//!
//! A zero `θ₀` gives the resonance frequency `Re θ₀/2π` and the full width
//! `2|Im θ₀|/2π`, both in free spectral ranges.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::cavity_network::{CavityConfig, DeterminantMode, DeterminantTerms};
use crate::error::{Error, Result};
use crate::parallel::{map_indices, Execution};

/// Central-difference step for `dD/dθ`, radians.
pub const DERIVATIVE_STEP: f64 = 1e-7;
pub const MAX_NEWTON_ITERATIONS: usize = 100;
/// Newton stops once the applied step is below this, radians.
pub const STEP_TOLERANCE: f64 = 1e-12;
/// Imaginary part given to real-axis seeds, radians.
pub const SEED_IMAG_OFFSET: f64 = -0.003;
/// Zeros closer than this in `θ` are the same zero.
pub const DEDUP_RADIUS: f64 = 1e-8;
/// Two tracked branches closer than this in `θ` have collided.
pub const COLLISION_RADIUS: f64 = 1e-6;
/// Default residual bound on `|D(θ₀)|`.
pub const DEFAULT_TOL_ROOT: f64 = 1e-10;
/// Default number of atom-phase points per `2π` for branch tracking.
pub const DEFAULT_TRACK_POINTS: usize = 512;
/// Detunings this close (FSR) to an extremum of the resonance locus snap to it.
pub const EDGE_TOLERANCE: f64 = 0.01;

/// One complex zero of the determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub theta_zero: Complex64,
    /// Centre frequency in FSR units.
    pub u0: f64,
    /// Full width at half maximum in FSR units.
    pub gamma_fwhm: f64,
    pub chi: f64,
    pub branch_id: usize,
}

impl Resonance {
    pub fn new(theta_zero: Complex64, chi: f64, branch_id: usize) -> Self {
        Self {
            theta_zero,
            u0: theta_zero.re / TAU,
            gamma_fwhm: linewidth(theta_zero),
            chi,
            branch_id,
        }
    }
}

/// FWHM `2|Im θ₀|/2π` in free spectral ranges.
pub fn linewidth(theta_zero: Complex64) -> f64 {
    theta_zero.im.abs() / PI
}

/// Analytic zero of the empty two-mirror cavity, `θ = 2πm − i·ln(1/(r1·r2))`.
pub fn empty_cavity_resonance(
    r1_intensity: f64,
    r2_intensity: f64,
    order_m: i64,
) -> Result<Resonance> {
    for (name, v) in [
        ("r1_intensity", r1_intensity),
        ("r2_intensity", r2_intensity),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(name, format!("must lie in [0, 1], got {v}")));
        }
    }
    let rr = (r1_intensity * r2_intensity).sqrt();
    let theta = Complex64::new(TAU * order_m as f64, rr.ln());
    Ok(Resonance::new(theta, 0.0, 0))
}

/// Grid of `log10(1/|D|²)` over real frequency and atom phase.
#[derive(Debug, Clone, PartialEq)]
pub struct DetMap {
    /// Frequencies in FSR units.
    pub u: Vec<f64>,
    pub chi: Vec<f64>,
    /// Row-major, one row per `chi` value.
    pub values: Vec<f64>,
    pub mode: DeterminantMode,
}

impl DetMap {
    pub fn value(&self, i_chi: usize, i_u: usize) -> f64 {
        self.values[i_chi * self.u.len() + i_u]
    }

    pub fn row(&self, i_chi: usize) -> &[f64] {
        let n = self.u.len();
        &self.values[i_chi * n..(i_chi + 1) * n]
    }

    /// Frequency of the strongest response in each row.
    pub fn ridge(&self) -> Vec<f64> {
        (0..self.chi.len())
            .map(|i| {
                let row = self.row(i);
                let (best, _) =
                    row.iter()
                        .enumerate()
                        .fold(
                            (0, f64::NEG_INFINITY),
                            |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc },
                        );
                self.u[best]
            })
            .collect()
    }
}

fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    let step = (range[1] - range[0]) / (n - 1) as f64;
    (0..n).map(|i| range[0] + step * i as f64).collect()
}

pub fn scan_det_map(
    cfg: &CavityConfig,
    u_range: [f64; 2],
    chi_range: [f64; 2],
    n_u: usize,
    n_chi: usize,
    mode: DeterminantMode,
) -> Result<DetMap> {
    scan_det_map_with(
        cfg,
        u_range,
        chi_range,
        n_u,
        n_chi,
        mode,
        Execution::default(),
    )
}

/// [`scan_det_map`] with an explicit execution strategy; rows are independent.
pub fn scan_det_map_with(
    cfg: &CavityConfig,
    u_range: [f64; 2],
    chi_range: [f64; 2],
    n_u: usize,
    n_chi: usize,
    mode: DeterminantMode,
    exec: Execution,
) -> Result<DetMap> {
    if n_u < 2 || n_chi < 2 {
        return Err(Error::invalid("grid", "need at least 2 points per axis"));
    }
    if !(u_range[1] > u_range[0]) || !(chi_range[1] > chi_range[0]) {
        return Err(Error::invalid("grid", "ranges must be non-empty"));
    }
    let u = linspace(u_range, n_u);
    let chi = linspace(chi_range, n_chi);
    let terms = cfg.determinant_terms();
    let rows = map_indices(exec, n_chi, |i| {
        u.iter()
            .map(|&uu| {
                let d = terms.evaluate(mode, Complex64::new(TAU * uu, 0.0), chi[i]);
                -d.norm_sqr().log10()
            })
            .collect::<Vec<f64>>()
    });
    Ok(DetMap {
        u,
        chi,
        values: rows.concat(),
        mode,
    })
}

/// Why a Newton polish gave up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolishFailure {
    /// Iteration limit reached; holds the last iterate.
    NoConvergence(Complex64),
    /// The derivative vanished or the iterate left the finite plane.
    Degenerate,
}

/// Damped Newton iteration on `D(θ)` at fixed `χ`, derivative by central difference.
pub fn polish_zero(
    terms: &DeterminantTerms,
    mode: DeterminantMode,
    chi: f64,
    seed: Complex64,
) -> std::result::Result<Complex64, PolishFailure> {
    let d = |theta: Complex64| terms.evaluate(mode, theta, chi);
    let mut theta = seed;
    let mut value = d(theta);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if value.norm() == 0.0 {
            return Ok(theta);
        }
        let h = DERIVATIVE_STEP;
        let slope = (d(theta + h) - d(theta - h)) / (2.0 * h);
        if slope.norm() == 0.0 || !slope.is_finite() {
            return Err(PolishFailure::Degenerate);
        }
        let full = value / slope;
        let mut scale = 1.0;
        let (mut next, mut next_value) = (theta - full, d(theta - full));
        while next_value.norm() > value.norm() && scale > 1e-6 {
            scale *= 0.5;
            next = theta - full * scale;
            next_value = d(next);
        }
        if !next.is_finite() {
            return Err(PolishFailure::Degenerate);
        }
        let moved = (next - theta).norm();
        theta = next;
        value = next_value;
        if moved < STEP_TOLERANCE {
            return Ok(theta);
        }
    }
    Err(PolishFailure::NoConvergence(theta))
}

/// Zeros found in a frequency window plus the seeds that did not converge.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResonanceSearch {
    pub resonances: Vec<Resonance>,
    /// Real-axis seed frequencies (FSR) whose polish failed or missed the tolerance.
    pub failed_seeds: Vec<f64>,
}

fn seed_grid_points(u_window: [f64; 2]) -> usize {
    ((u_window[1] - u_window[0]) * 1024.0).ceil().max(64.0) as usize + 1
}

/// Seeds from local minima of `|D|` along real `u`, each polished in complex `θ`.
pub fn find_resonances(
    cfg: &CavityConfig,
    mode: DeterminantMode,
    chi: f64,
    u_window: [f64; 2],
    tol_root: f64,
) -> Result<ResonanceSearch> {
    if !(u_window[1] > u_window[0]) {
        return Err(Error::invalid("u_window", "must be non-empty"));
    }
    if !(tol_root > 0.0) {
        return Err(Error::invalid("tol_root", "must be positive"));
    }
    let terms = cfg.determinant_terms();
    let us = linspace(u_window, seed_grid_points(u_window));
    let mags: Vec<f64> = us
        .iter()
        .map(|&u| {
            terms
                .evaluate(mode, Complex64::new(TAU * u, 0.0), chi)
                .norm()
        })
        .collect();
    let last = mags.len() - 1;
    let seeds = (0..=last).filter(|&i| {
        let left = if i == 0 { f64::INFINITY } else { mags[i - 1] };
        let right = if i == last {
            f64::INFINITY
        } else {
            mags[i + 1]
        };
        mags[i] < left && mags[i] <= right
    });

    let mut search = ResonanceSearch::default();
    let slack = 1e-9;
    for i in seeds {
        let seed = Complex64::new(TAU * us[i], SEED_IMAG_OFFSET);
        match polish_zero(&terms, mode, chi, seed) {
            Ok(theta) => {
                let residual = terms.evaluate(mode, theta, chi).norm();
                if residual > tol_root || theta.im > 0.0 {
                    search.failed_seeds.push(us[i]);
                    continue;
                }
                let u0 = theta.re / TAU;
                if u0 < u_window[0] - slack || u0 > u_window[1] + slack {
                    continue;
                }
                if search
                    .resonances
                    .iter()
                    .all(|r| (r.theta_zero - theta).norm() > DEDUP_RADIUS)
                {
                    search.resonances.push(Resonance::new(theta, chi, 0));
                }
            }
            Err(_) => search.failed_seeds.push(us[i]),
        }
    }
    search.resonances.sort_by(|a, b| a.u0.total_cmp(&b.u0));
    for (id, r) in search.resonances.iter_mut().enumerate() {
        r.branch_id = id;
    }
    Ok(search)
}

/// Continues `seed` along `chi_path`, re-polishing from the previous zero.
///
/// Fails with [`Error::LostLock`] when Newton diverges or the zero jumps by
/// more than a quarter free spectral range between steps.
pub fn track_branch(
    cfg: &CavityConfig,
    mode: DeterminantMode,
    chi_path: &[f64],
    seed: &Resonance,
) -> Result<Vec<Resonance>> {
    let terms = cfg.determinant_terms();
    let mut out = Vec::with_capacity(chi_path.len());
    let mut theta = seed.theta_zero;
    for &chi in chi_path {
        let next = polish_zero(&terms, mode, chi, theta).map_err(|_| Error::LostLock { chi })?;
        if (next - theta).norm() > PI / 2.0 || next.im > 0.0 {
            return Err(Error::LostLock { chi });
        }
        theta = next;
        out.push(Resonance::new(theta, chi, seed.branch_id));
    }
    Ok(out)
}

/// Two branches that met while being tracked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    pub chi: f64,
    pub branch_a: usize,
    pub branch_b: usize,
    pub theta: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BranchTracks {
    /// One track per seed, labelled by the seed's `branch_id`.
    pub branches: Vec<Vec<Resonance>>,
    pub collisions: Vec<Collision>,
}

/// Tracks several branches side by side and records where any two meet.
///
/// Zeros are compared modulo one free spectral range. Colliding branches keep
/// their own labels.
pub fn track_branches(
    cfg: &CavityConfig,
    mode: DeterminantMode,
    chi_path: &[f64],
    seeds: &[Resonance],
) -> Result<BranchTracks> {
    let branches = seeds
        .iter()
        .map(|s| track_branch(cfg, mode, chi_path, s))
        .collect::<Result<Vec<_>>>()?;
    let mut collisions = Vec::new();
    for a in 0..branches.len() {
        for b in a + 1..branches.len() {
            let mut touching = false;
            for (ra, rb) in branches[a].iter().zip(&branches[b]) {
                let mut diff = ra.theta_zero - rb.theta_zero;
                diff.re -= TAU * (diff.re / TAU).round();
                let close = diff.norm() < COLLISION_RADIUS;
                if close && !touching {
                    collisions.push(Collision {
                        chi: ra.chi,
                        branch_a: ra.branch_id,
                        branch_b: rb.branch_id,
                        theta: ra.theta_zero,
                    });
                }
                touching = close;
            }
        }
    }
    Ok(BranchTracks {
        branches,
        collisions,
    })
}

/// `n` atom phases evenly covering `[0, 2π)`.
pub fn chi_path(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// The branch nearest to `u` at `χ = 0` tracked once around a full atom-phase period.
pub fn track_period(
    cfg: &CavityConfig,
    mode: DeterminantMode,
    u: f64,
    n_points: usize,
) -> Result<Vec<Resonance>> {
    if n_points < 8 {
        return Err(Error::invalid(
            "n_points",
            "need at least 8 points per period",
        ));
    }
    let search = find_resonances(cfg, mode, 0.0, [u - 0.5, u + 0.5], DEFAULT_TOL_ROOT)?;
    let seed = search
        .resonances
        .iter()
        .min_by(|a, b| (a.u0 - u).abs().total_cmp(&(b.u0 - u).abs()))
        .copied()
        .ok_or(Error::LostLock { chi: 0.0 })?;
    track_branch(cfg, mode, &chi_path(n_points), &seed)
}

/// Atom phase at which the resonance sits at detuning `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantPosition {
    pub chi: f64,
    pub resonance: Resonance,
    /// Sign of `du0/dχ` at the crossing; zero when snapped to a locus edge.
    pub slope: i8,
}

/// Every atom phase in `[0, 2π)` where a resonance lies at `u`, sorted by `χ`.
///
/// If none exists but `u` lies within [`EDGE_TOLERANCE`] of the lowest or
/// highest point of the resonance locus, the extremal position is returned.
pub fn resonant_positions(
    cfg: &CavityConfig,
    mode: DeterminantMode,
    u: f64,
    n_points: usize,
) -> Result<Vec<ResonantPosition>> {
    let track = track_period(cfg, mode, u, n_points)?;
    let terms = cfg.determinant_terms();
    // offset from u, wrapped to the nearest copy of the resonance
    let offset = |r: &Resonance| {
        let x = r.u0 - u;
        x - x.round()
    };

    let mut out = Vec::new();
    let n = track.len();
    for i in 0..n {
        let a = &track[i];
        let (b, chi_b) = if i + 1 < n {
            (track[i + 1], track[i + 1].chi)
        } else {
            (track[0], TAU)
        };
        let (fa, fb) = (offset(a), offset(&b));
        if fa == 0.0 {
            out.push((a.chi, a.theta_zero, offset_slope(fa, fb)));
            continue;
        }
        if fa.signum() == fb.signum() || (fa - fb).abs() > 0.5 {
            continue;
        }
        // bisection on chi, polishing from the last bracket point
        let (mut lo, mut hi, mut flo) = (a.chi, chi_b, fa);
        let mut theta = a.theta_zero;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            theta =
                polish_zero(&terms, mode, mid, theta).map_err(|_| Error::LostLock { chi: mid })?;
            let fm = offset(&Resonance::new(theta, mid, 0));
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let chi = (0.5 * (lo + hi)).rem_euclid(TAU);
        let theta = polish_zero(&terms, mode, chi, theta).map_err(|_| Error::LostLock { chi })?;
        out.push((chi, theta, offset_slope(fa, fb)));
    }

    if out.is_empty() {
        let offsets: Vec<f64> = track.iter().map(offset).collect();
        // smallest positive offset: u sits just below the locus there
        let below = offsets
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, v)| v > 0.0)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let above = offsets
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, v)| v < 0.0)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let edge = match (below, above) {
            (Some((i, v)), _) if v <= EDGE_TOLERANCE => Some(i),
            (_, Some((i, v))) if -v <= EDGE_TOLERANCE => Some(i),
            _ => None,
        };
        let u_min = track.iter().map(|r| r.u0).fold(f64::INFINITY, f64::min);
        let u_max = track.iter().map(|r| r.u0).fold(f64::NEG_INFINITY, f64::max);
        return match edge {
            Some(i) => {
                let r = track[i];
                Ok(vec![ResonantPosition {
                    chi: r.chi,
                    resonance: Resonance::new(r.theta_zero, r.chi, 0),
                    slope: 0,
                }])
            }
            None => Err(Error::NoBranch { u, u_min, u_max }),
        };
    }

    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(id, (chi, theta, slope))| ResonantPosition {
            chi,
            resonance: Resonance::new(theta, chi, id),
            slope,
        })
        .collect())
}

fn offset_slope(fa: f64, fb: f64) -> i8 {
    if fb > fa {
        1
    } else if fb < fa {
        -1
    } else {
        0
    }
}
