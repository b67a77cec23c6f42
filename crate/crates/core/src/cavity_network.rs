//! Driven three-mirror network: left mirror, effective atomic mirror at `z_a`,
//! right mirror.
//!
//! All frequency dependence enters through two dimensionless phases: the
//! round-trip phase `θ = 2ωL/c` and the atom phase `χ = 2k·z_a`. Amplitudes
//! `E1`/`E3` are the right/left-going fields just left of the first site,
//! `E4`/`E2` the right/left-going fields on the far side of the stack, all
//! referenced to `z_a`.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::atomic_mirror::{
    bragg_phase, site_transfer_matrix, stack_coefficients, SiteCoupling, StackCoefficients,
    TransferMatrix,
};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `|D|` below which the boundary system is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-13;

/// Default number of samples between neighbouring sites.
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 32;

/// Default length of the free regions drawn on either side of the lattice, in wavelengths.
pub const DEFAULT_FREE_REGION_WAVES: f64 = 10.0;

/// Which determinant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeterminantMode {
    /// Full three-mirror determinant with atomic reflection.
    #[default]
    Full,
    /// Atomic reflection neglected; only the transmission phase survives.
    UniformGas,
}

impl std::str::FromStr for DeterminantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(DeterminantMode::Full),
            "uniform-gas" | "uniform_gas" => Ok(DeterminantMode::UniformGas),
            other => Err(Error::config(
                "mode",
                format!("expected full|uniform-gas, got `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for DeterminantMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DeterminantMode::Full => "full",
            DeterminantMode::UniformGas => "uniform-gas",
        })
    }
}

/// Dimensionless description of mirrors, atomic stack and atom position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    pub r1_intensity: f64,
    pub r2_intensity: f64,
    pub coupling: SiteCoupling,
    pub n_sites: u32,
    /// `χ = 2k·z_a`, kept in `[0, 2π)`.
    chi: f64,
    /// When set, complex `θ` also gives `χ` an imaginary part `Im θ · z_a/L`.
    pub za_over_l: Option<f64>,
}

impl CavityConfig {
    pub fn new(
        r1_intensity: f64,
        r2_intensity: f64,
        coupling: SiteCoupling,
        n_sites: u32,
        chi: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("r1_intensity", r1_intensity),
            ("r2_intensity", r2_intensity),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::invalid(name, format!("must lie in [0, 1), got {v}")));
            }
        }
        if n_sites == 0 {
            return Err(Error::invalid("n_sites", "must be at least 1"));
        }
        if !coupling.value().is_finite() {
            return Err(Error::invalid("lambda", "must be finite"));
        }
        if !chi.is_finite() {
            return Err(Error::invalid("chi", "must be finite"));
        }
        Ok(Self {
            r1_intensity,
            r2_intensity,
            coupling,
            n_sites,
            chi: chi.rem_euclid(TAU),
            za_over_l: None,
        })
    }

    pub fn with_za_over_l(mut self, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::invalid(
                "za_over_l",
                format!("must lie in (0, 1), got {ratio}"),
            ));
        }
        self.za_over_l = Some(ratio);
        Ok(self)
    }

    /// Same cavity with the atoms moved to phase `chi`.
    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi.rem_euclid(TAU);
        self
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// First-site position in wavelengths, `z_a/λ = χ/4π` in `[0, ½)`.
    pub fn za_over_wavelength(&self) -> f64 {
        self.chi / (2.0 * TAU)
    }

    pub fn r1(&self) -> f64 {
        self.r1_intensity.sqrt()
    }

    pub fn r2(&self) -> f64 {
        self.r2_intensity.sqrt()
    }

    pub fn t1(&self) -> Complex64 {
        I * (1.0 - self.r1_intensity).sqrt()
    }

    pub fn t2(&self) -> Complex64 {
        I * (1.0 - self.r2_intensity).sqrt()
    }

    pub fn stack(&self) -> StackCoefficients {
        stack_coefficients(self.coupling, self.n_sites).expect("n_sites validated at construction")
    }

    /// Atom phase used at a possibly complex round-trip phase.
    pub fn chi_at(&self, phase: RoundTripPhase) -> Complex64 {
        match self.za_over_l {
            Some(ratio) => Complex64::new(self.chi, ratio * phase.0.im),
            None => Complex64::new(self.chi, 0.0),
        }
    }

    /// Precomputed determinant pieces for repeated evaluation.
    pub fn determinant_terms(&self) -> DeterminantTerms {
        DeterminantTerms::new(self)
    }
}

/// Amplitudes of the two phase-locked drive beams.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveFields {
    pub e_left: Complex64,
    pub e_right: Complex64,
}

impl DriveFields {
    pub fn new(e_left: Complex64, e_right: Complex64) -> Self {
        Self { e_left, e_right }
    }

    pub fn left(amplitude: f64) -> Self {
        Self::new(Complex64::new(amplitude, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self::new(self.e_left * alpha, self.e_right * alpha)
    }
}

/// Steady-state amplitudes at the effective mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAmplitudes {
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
    pub e4: Complex64,
}

impl FieldAmplitudes {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }

    /// Largest residual of the four boundary conditions.
    pub fn residual(&self, cfg: &CavityConfig, drive: &DriveFields, phase: RoundTripPhase) -> f64 {
        let (a, rhs) = boundary_system(cfg, drive, phase);
        let x = Vector4::from(self.as_array());
        let r = a * x - rhs;
        r.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Round-trip phase `θ = 2ωL/c`; one free spectral range per `2π`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RoundTripPhase(pub Complex64);

impl RoundTripPhase {
    pub fn real(theta: f64) -> Self {
        Self(Complex64::new(theta, 0.0))
    }

    /// Phase at frequency `u` measured in free spectral ranges.
    pub fn from_fsr(u: f64) -> Self {
        Self::real(TAU * u)
    }

    pub fn fsr_units(&self) -> f64 {
        self.0.re / TAU
    }
}

/// The χ-independent and χ-dependent pieces of the determinant,
/// `D = 1 − a·e^{iχ} − (b·e^{−iχ} + c)·e^{iθ}`.
#[derive(Debug, Clone, Copy)]
pub struct DeterminantTerms {
    /// `r1·R→`
    pub left: Complex64,
    /// `r2·R←`
    pub right: Complex64,
    /// `r1·r2·(T² − R→R←)`
    pub through: Complex64,
    /// `r1·r2·e^{2iφ}` with `φ = arg T`
    pub uniform: Complex64,
    za_over_l: Option<f64>,
    chi: f64,
}

impl DeterminantTerms {
    fn new(cfg: &CavityConfig) -> Self {
        let s = cfg.stack();
        let r1 = cfg.r1();
        let r2 = cfg.r2();
        let phi = s.t.arg();
        Self {
            left: r1 * s.r_fwd,
            right: r2 * s.r_bwd,
            through: r1 * r2 * (s.t * s.t - s.r_fwd * s.r_bwd),
            uniform: Complex64::from_polar(r1 * r2, 2.0 * phi),
            za_over_l: cfg.za_over_l,
            chi: cfg.chi,
        }
    }

    #[inline]
    pub fn evaluate(&self, mode: DeterminantMode, theta: Complex64, chi: f64) -> Complex64 {
        let e_theta = (I * theta).exp();
        match mode {
            DeterminantMode::Full => {
                let chi_c = match self.za_over_l {
                    Some(ratio) => Complex64::new(chi, ratio * theta.im),
                    None => Complex64::new(chi, 0.0),
                };
                let e_chi = (I * chi_c).exp();
                Complex64::new(1.0, 0.0)
                    - self.right * e_theta / e_chi
                    - self.left * e_chi
                    - self.through * e_theta
            }
            DeterminantMode::UniformGas => Complex64::new(1.0, 0.0) - self.uniform * e_theta,
        }
    }

    /// Determinant at the configuration's own atom phase.
    #[inline]
    pub fn at(&self, mode: DeterminantMode, theta: Complex64) -> Complex64 {
        self.evaluate(mode, theta, self.chi)
    }
}

/// `D = 1 − r2·R←·e^{i(θ−χ)} − r1·R→·e^{iχ} − r1·r2·(T² − R→R←)·e^{iθ}`.
pub fn round_trip_determinant(cfg: &CavityConfig, phase: RoundTripPhase) -> Complex64 {
    cfg.determinant_terms().at(DeterminantMode::Full, phase.0)
}

/// `D = 1 − r1·r2·e^{i(θ + 2φ)}` with `φ = arg T`; independent of `χ`.
pub fn uniform_gas_determinant(cfg: &CavityConfig, phase: RoundTripPhase) -> Complex64 {
    cfg.determinant_terms()
        .at(DeterminantMode::UniformGas, phase.0)
}

/// Linear system `A·(E1, E2, E3, E4) = b` of the four boundary conditions.
pub fn boundary_system(
    cfg: &CavityConfig,
    drive: &DriveFields,
    phase: RoundTripPhase,
) -> (Matrix4<Complex64>, Vector4<Complex64>) {
    let s = cfg.stack();
    let theta = phase.0;
    let chi = cfg.chi_at(phase);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let right_trip = theta - chi;
    #[rustfmt::skip]
    let a = Matrix4::new(
        one,        zero,   -cfg.r1() * (I * chi).exp(), zero,
        zero,       one,    zero,                        -cfg.r2() * (I * right_trip).exp(),
        -s.r_fwd,   -s.t,   one,                         zero,
        -s.t,       -s.r_bwd, zero,                      one,
    );
    let b = Vector4::new(
        cfg.t1() * (I * chi * 0.5).exp() * drive.e_left,
        cfg.t2() * (I * right_trip * 0.5).exp() * drive.e_right,
        zero,
        zero,
    );
    (a, b)
}

/// Solves the boundary conditions for `E1…E4`.
pub fn solve_steady_state(
    cfg: &CavityConfig,
    drive: &DriveFields,
    phase: RoundTripPhase,
) -> Result<FieldAmplitudes> {
    let d = round_trip_determinant(cfg, phase);
    if d.norm() < SINGULAR_THRESHOLD {
        return Err(Error::NearSingular { det_abs: d.norm() });
    }
    let (a, b) = boundary_system(cfg, drive, phase);
    let x = a
        .lu()
        .solve(&b)
        .ok_or(Error::NearSingular { det_abs: d.norm() })?;
    Ok(FieldAmplitudes {
        e1: x[0],
        e2: x[1],
        e3: x[2],
        e4: x[3],
    })
}

/// One stretch of free propagation inside the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSegment {
    /// Start of the segment in wavelengths.
    pub z_start: f64,
    pub z_end: f64,
    /// Right-going amplitude at `z_start`.
    pub forward: Complex64,
    /// Left-going amplitude at `z_start`.
    pub backward: Complex64,
    pub envelope_max: f64,
    pub envelope_min: f64,
}

impl EnvelopeSegment {
    fn new(z_start: f64, z_end: f64, forward: Complex64, backward: Complex64) -> Self {
        let (f, b) = (forward.norm(), backward.norm());
        Self {
            z_start,
            z_end,
            forward,
            backward,
            envelope_max: f + b,
            envelope_min: (f - b).abs(),
        }
    }

    /// Field at `z` (wavelengths) inside the segment.
    pub fn field_at(&self, z: f64) -> Complex64 {
        let phase = TAU * (z - self.z_start);
        self.forward * Complex64::from_polar(1.0, phase)
            + self.backward * Complex64::from_polar(1.0, -phase)
    }
}

/// Knobs for [`field_envelope_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeOptions {
    pub samples_per_segment: usize,
    /// Length of each free region drawn beside the lattice, in wavelengths.
    pub free_region_waves: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self {
            samples_per_segment: DEFAULT_SAMPLES_PER_SEGMENT,
            free_region_waves: DEFAULT_FREE_REGION_WAVES,
        }
    }
}

/// Piecewise standing-wave field across the cavity.
///
/// Segments run left to right: the free region before the first site,
/// `n_sites − 1` inter-site gaps, then the free region after the last site.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeProfile {
    pub segments: Vec<EnvelopeSegment>,
    /// Site positions in wavelengths.
    pub site_z: Vec<f64>,
    /// Field at each site.
    pub site_field: Vec<Complex64>,
    pub samples_per_segment: usize,
    /// `(E4, E2)` reconstructed by propagating `(E1, E3)` through the stack.
    pub closure: (Complex64, Complex64),
    pub amplitudes: FieldAmplitudes,
}

impl EnvelopeProfile {
    /// Relative mismatch between the propagated and solved right-hand amplitudes.
    pub fn closure_error(&self) -> f64 {
        let a = &self.amplitudes;
        let scale =
            a.e1.norm()
                .max(a.e2.norm())
                .max(a.e3.norm())
                .max(a.e4.norm());
        if scale == 0.0 {
            return 0.0;
        }
        let err = (self.closure.0 - a.e4)
            .norm()
            .max((self.closure.1 - a.e2).norm());
        err / scale
    }

    fn lattice_segments(&self) -> &[EnvelopeSegment] {
        let n = self.segments.len();
        &self.segments[1..n - 1]
    }

    /// Mean `envelope_max` of the left free region over that of the right one.
    pub fn left_right_ratio(&self) -> f64 {
        let first = self.segments.first().expect("profile has free regions");
        let last = self.segments.last().expect("profile has free regions");
        first.envelope_max / last.envelope_max
    }

    /// Largest over smallest `envelope_max` across the lattice, free regions included.
    pub fn lattice_variation(&self) -> f64 {
        let (lo, hi) = self
            .segments
            .iter()
            .map(|s| s.envelope_max)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        hi / lo
    }

    /// `(min, max)` of `envelope_max` over the inter-site gaps only.
    pub fn lattice_envelope_range(&self) -> (f64, f64) {
        self.lattice_segments()
            .iter()
            .map(|s| s.envelope_max)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Uniform samples of the field, `samples_per_segment` per half wavelength.
    pub fn sample(&self) -> Vec<(f64, Complex64)> {
        let mut out = Vec::new();
        for seg in &self.segments {
            let len = seg.z_end - seg.z_start;
            let count = ((len / 0.5).ceil().max(1.0) as usize) * self.samples_per_segment.max(1);
            for j in 0..count {
                let z = seg.z_start + len * j as f64 / count as f64;
                out.push((z, seg.field_at(z)));
            }
        }
        if let Some(last) = self.segments.last() {
            out.push((last.z_end, last.field_at(last.z_end)));
        }
        out
    }
}

/// Envelope with default free-region length.
pub fn field_envelope(
    cfg: &CavityConfig,
    drive: &DriveFields,
    phase: RoundTripPhase,
    samples_per_segment: usize,
) -> Result<EnvelopeProfile> {
    let opts = EnvelopeOptions {
        samples_per_segment,
        ..EnvelopeOptions::default()
    };
    field_envelope_with(cfg, drive, phase, &opts)
}

/// Propagates `(E1, E3)` site by site through the lattice.
pub fn field_envelope_with(
    cfg: &CavityConfig,
    drive: &DriveFields,
    phase: RoundTripPhase,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeProfile> {
    if !(opts.free_region_waves > 0.0) {
        return Err(Error::invalid("free_region_waves", "must be positive"));
    }
    let amps = solve_steady_state(cfg, drive, phase)?;
    let n = cfg.n_sites as usize;
    let kd = bragg_phase(cfg.coupling);
    let spacing = kd / TAU;
    let za = cfg.za_over_wavelength();
    let pad = opts.free_region_waves;
    let site = site_transfer_matrix(cfg.coupling);
    let hop = TransferMatrix::propagation(kd);

    let mut segments = Vec::with_capacity(n + 1);
    let mut site_z = Vec::with_capacity(n);
    let mut site_field = Vec::with_capacity(n);

    let pad_phase = TAU * pad;
    segments.push(EnvelopeSegment::new(
        za - pad,
        za,
        amps.e1 * Complex64::from_polar(1.0, -pad_phase),
        amps.e3 * Complex64::from_polar(1.0, pad_phase),
    ));

    let (mut f, mut b) = (amps.e1, amps.e3);
    for l in 0..n {
        let z = za + l as f64 * spacing;
        site_z.push(z);
        site_field.push(f + b);
        (f, b) = site.apply(f, b);
        if l + 1 < n {
            segments.push(EnvelopeSegment::new(z, z + spacing, f, b));
            (f, b) = hop.apply(f, b);
        }
    }
    let z_last = za + (n - 1) as f64 * spacing;
    segments.push(EnvelopeSegment::new(z_last, z_last + pad, f, b));

    let extent = (n - 1) as f64 * kd;
    let closure = (
        f * Complex64::from_polar(1.0, -extent),
        b * Complex64::from_polar(1.0, extent),
    );

    Ok(EnvelopeProfile {
        segments,
        site_z,
        site_field,
        samples_per_segment: opts.samples_per_segment.max(1),
        closure,
        amplitudes: amps,
    })
}

/// Relative dipole potential `V = sign(Λ)·|E|²`, in units of `|Ω|` times drive units squared.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    pub site_z: Vec<f64>,
    pub site_v: Vec<f64>,
}

pub fn dipole_potential(env: &EnvelopeProfile, c: SiteCoupling) -> PotentialProfile {
    let sign = if c.value() > 0.0 {
        1.0
    } else if c.value() < 0.0 {
        -1.0
    } else {
        0.0
    };
    let (z, v) = env
        .sample()
        .into_iter()
        .map(|(z, e)| (z, sign * e.norm_sqr()))
        .unzip();
    PotentialProfile {
        z,
        v,
        site_z: env.site_z.clone(),
        site_v: env.site_field.iter().map(|e| sign * e.norm_sqr()).collect(),
    }
}

/// Phase of the stack transmission, `φ = arg T`.
pub fn transmission_phase(cfg: &CavityConfig) -> f64 {
    cfg.stack().t.arg()
}

/// Empty-cavity intracavity buildup `|t1|²/|1 − r1·r2·e^{iθ}|²` for a left drive.
pub fn airy_buildup(r1_intensity: f64, r2_intensity: f64, theta: f64) -> f64 {
    let rr = (r1_intensity * r2_intensity).sqrt();
    (1.0 - r1_intensity)
        / (Complex64::new(1.0, 0.0) - rr * Complex64::from_polar(1.0, theta)).norm_sqr()
}

/// Coefficient finesse `π·√(r1r2)/(1 − r1r2)` of the empty cavity.
pub fn empty_finesse(r1_intensity: f64, r2_intensity: f64) -> f64 {
    let rr = (r1_intensity * r2_intensity).sqrt();
    PI * rr.sqrt() / (1.0 - rr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn worked_example(chi: f64) -> CavityConfig {
        CavityConfig::new(0.99, 0.99, SiteCoupling(-9e-4), 1000, chi).unwrap()
    }

    fn empty(chi: f64) -> CavityConfig {
        CavityConfig::new(0.99, 0.99, SiteCoupling(0.0), 1000, chi).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(CavityConfig::new(1.0, 0.5, SiteCoupling(0.1), 3, 0.0).is_err());
        assert!(CavityConfig::new(0.5, -0.1, SiteCoupling(0.1), 3, 0.0).is_err());
        assert!(CavityConfig::new(0.5, 0.5, SiteCoupling(0.1), 0, 0.0).is_err());
        assert!(CavityConfig::new(0.5, 0.5, SiteCoupling(f64::NAN), 1, 0.0).is_err());
        let c = CavityConfig::new(0.5, 0.5, SiteCoupling(0.1), 3, 7.0).unwrap();
        assert!((c.chi() - (7.0 - TAU)).abs() < 1e-15);
        assert!(c.with_za_over_l(1.5).is_err());
    }

    #[test]
    fn empty_cavity_determinant() {
        let cfg = empty(1.3);
        for theta in [0.0, 0.4, 2.0] {
            let d = round_trip_determinant(&cfg, RoundTripPhase::real(theta));
            let expect = Complex64::new(1.0, 0.0) - 0.99 * Complex64::from_polar(1.0, theta);
            assert!((d - expect).norm() < 1e-15);
        }
        for m in -2..=2 {
            let d = round_trip_determinant(&cfg, RoundTripPhase::from_fsr(m as f64));
            assert!((d - 0.01).norm() < 1e-12, "m = {m}: {d}");
        }
    }

    #[test]
    fn uniform_gas_reduces_to_empty_without_atoms() {
        let cfg = empty(0.2);
        for theta in [0.0, 1.0, -2.5] {
            let p = RoundTripPhase::real(theta);
            assert!(
                (uniform_gas_determinant(&cfg, p) - round_trip_determinant(&cfg, p)).norm() < 1e-15
            );
        }
    }

    #[test]
    fn uniform_gas_is_chi_independent() {
        let p = RoundTripPhase::real(0.8);
        let a = uniform_gas_determinant(&worked_example(0.0), p);
        let b = uniform_gas_determinant(&worked_example(2.0), p);
        assert_eq!(a, b);
    }

    #[test]
    fn worked_example_transmission_phase() {
        // φ = −2N·atan Λ + atan(ΛN) for the closed form
        let expect = 2000.0 * (9e-4f64).atan() - (0.9f64).atan();
        let phi = transmission_phase(&worked_example(0.0));
        assert!((phi - expect).abs() < 1e-12, "{phi} vs {expect}");
    }

    #[test]
    fn empty_cavity_buildup_on_resonance() {
        let cfg = empty(0.7);
        let amps = solve_steady_state(&cfg, &DriveFields::left(1.0), RoundTripPhase::from_fsr(3.0))
            .unwrap();
        assert!(
            (amps.e1.norm_sqr() - 100.0).abs() < 1e-8,
            "{}",
            amps.e1.norm_sqr()
        );
    }

    #[test]
    fn zero_drive_gives_zero_field() {
        let amps = solve_steady_state(
            &worked_example(1.0),
            &DriveFields::default(),
            RoundTripPhase::real(0.3),
        )
        .unwrap();
        assert!(amps.as_array().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn near_singular_detected() {
        // empty-cavity zero at θ = −i·ln(1/r1r2)
        let theta = Complex64::new(0.0, (0.99f64).ln());
        let err = solve_steady_state(&empty(0.0), &DriveFields::left(1.0), RoundTripPhase(theta));
        assert!(matches!(err, Err(Error::NearSingular { .. })));
    }

    #[test]
    fn steady_state_is_linear() {
        let cfg = worked_example(2.2);
        let drive = DriveFields::new(Complex64::new(0.6, 0.1), Complex64::new(-0.3, 0.4));
        let alpha = Complex64::new(1.7, -0.8);
        let p = RoundTripPhase::real(-0.4);
        let a = solve_steady_state(&cfg, &drive, p).unwrap();
        let b = solve_steady_state(&cfg, &drive.scaled(alpha), p).unwrap();
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert!((x * alpha - y).norm() < 1e-10 * (1.0 + y.norm()));
        }
        assert!(a.residual(&cfg, &drive, p) < 1e-10 * a.e1.norm().max(a.e3.norm()));
    }

    #[test]
    fn transparent_envelope_is_flat() {
        let cfg = CavityConfig::new(0.99, 0.99, SiteCoupling(0.0), 50, 1.0).unwrap();
        let env = field_envelope(
            &cfg,
            &DriveFields::left(1.0),
            RoundTripPhase::from_fsr(0.3),
            32,
        )
        .unwrap();
        let first = env.segments[0].envelope_max;
        for s in &env.segments {
            assert!((s.envelope_max - first).abs() < 1e-10 * first);
        }
        assert!(env.closure_error() < 1e-12);
    }

    #[test]
    fn envelope_closes_and_is_continuous() {
        let cfg = worked_example(4.0);
        let env = field_envelope(
            &cfg,
            &DriveFields::left(1.0),
            RoundTripPhase::from_fsr(-0.2),
            8,
        )
        .unwrap();
        assert_eq!(env.segments.len(), 1001);
        assert_eq!(env.site_z.len(), 1000);
        assert!(env.closure_error() < 1e-9, "{}", env.closure_error());
        // |E| from either side of each site
        for (l, site) in env.site_z.iter().enumerate() {
            let left = env.segments[l].field_at(*site);
            let right = env.segments[l + 1].field_at(*site);
            assert!((left.norm() - right.norm()).abs() < 1e-9 * (1.0 + left.norm()));
            assert!((left - env.site_field[l]).norm() < 1e-9 * (1.0 + left.norm()));
        }
    }

    #[test]
    fn potential_scaling_and_sign() {
        let cfg = worked_example(1.0);
        let p = RoundTripPhase::from_fsr(-0.3);
        let env1 = field_envelope(&cfg, &DriveFields::left(1.0), p, 8).unwrap();
        let env2 = field_envelope(&cfg, &DriveFields::left(2.0), p, 8).unwrap();
        let v1 = dipole_potential(&env1, cfg.coupling);
        let v2 = dipole_potential(&env2, cfg.coupling);
        assert!(v1.v.iter().all(|&v| v <= 0.0));
        for (a, b) in v1.v.iter().zip(&v2.v) {
            assert!((4.0 * a - b).abs() <= 1e-9 * b.abs().max(1e-300));
        }
        let zero = field_envelope(&cfg, &DriveFields::default(), p, 8).unwrap();
        assert!(dipole_potential(&zero, cfg.coupling)
            .v
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn airy_helpers() {
        assert!((airy_buildup(0.99, 0.99, 0.0) - 100.0).abs() < 1e-9);
        assert!((empty_finesse(0.99, 0.99) - 312.58).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn boundary_determinant_equals_closed_form(
            r1 in 0.0f64..0.999, r2 in 0.0f64..0.999,
            lambda in -0.5f64..0.5, n in 1u32..3000,
            chi in 0.0f64..TAU, re in -10.0f64..10.0, im in -0.5f64..0.5,
        ) {
            let cfg = CavityConfig::new(r1, r2, SiteCoupling(lambda), n, chi).unwrap();
            let p = RoundTripPhase(Complex64::new(re, im));
            let (a, _) = boundary_system(&cfg, &DriveFields::default(), p);
            let lu = a.determinant();
            let d = round_trip_determinant(&cfg, p);
            prop_assert!((lu - d).norm() <= 1e-10 * d.norm().max(1.0));
        }

        #[test]
        fn lossless_stack_conserves_flux(
            lambda in -0.5f64..0.5, n in 1u32..2000, chi in 0.0f64..TAU, theta in -4.0f64..4.0,
            el in -1.0f64..1.0, er in -1.0f64..1.0,
        ) {
            let cfg = CavityConfig::new(0.99, 0.95, SiteCoupling(lambda), n, chi).unwrap();
            let drive = DriveFields::new(Complex64::new(el, 0.2), Complex64::new(er, -0.1));
            let a = solve_steady_state(&cfg, &drive, RoundTripPhase::real(theta)).unwrap();
            let inflow = a.e1.norm_sqr() + a.e2.norm_sqr();
            let outflow = a.e3.norm_sqr() + a.e4.norm_sqr();
            prop_assert!((inflow - outflow).abs() <= 1e-10 * inflow.max(1e-300));
        }

        #[test]
        fn observables_periodic_in_chi(chi in 0.0f64..TAU, theta in -3.0f64..3.0) {
            let p = RoundTripPhase::real(theta);
            let a = CavityConfig::new(0.99, 0.99, SiteCoupling(-9e-4), 1000, chi).unwrap();
            let b = CavityConfig::new(0.99, 0.99, SiteCoupling(-9e-4), 1000, chi + TAU).unwrap();
            let c = CavityConfig::new(0.99, 0.99, SiteCoupling(-9e-4), 1000, chi - 3.0 * TAU).unwrap();
            let d = round_trip_determinant(&a, p);
            prop_assert!((d - round_trip_determinant(&b, p)).norm() < 1e-12);
            prop_assert!((d - round_trip_determinant(&c, p)).norm() < 1e-12);
            let drive = DriveFields::left(1.0);
            let ea = solve_steady_state(&a, &drive, p).unwrap();
            let eb = solve_steady_state(&b, &drive, p).unwrap();
            prop_assert!((ea.e1.norm_sqr() - eb.e1.norm_sqr()).abs() < 1e-9 * ea.e1.norm_sqr());
        }
    }
}
