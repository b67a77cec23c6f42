//! Effective atomic mirror: a Bragg-spaced stack of delta-like atomic sheets.
//!
//! Every lattice site scatters like a thin dielectric sheet with dimensionless
//! strength `Λ`. The stack's coefficients come in two forms: the closed
//! expressions in [`stack_coefficients`] and the explicit transfer-matrix
//! product in [`stack_coefficients_bruteforce`], which serves as the oracle.
//!
//! Conventions: time dependence `e^{-iωt}`, forward waves `e^{+ikz}`, and every
//! coefficient is referenced to the position of the first site on both sides
//! of the stack.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// CODATA 2018 vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// CODATA 2018 reduced Planck constant, J s.
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical description of one lattice site in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Transition dipole moment, C m.
    pub dipole_moment: f64,
    /// Light wavelength, m.
    pub wavelength: f64,
    /// Signed detuning `ω − ω_a`, rad/s.
    pub detuning: f64,
    /// Transverse overlap between atomic density and beam profile, m⁻².
    pub overlap_a: f64,
    pub atoms_per_site: u32,
    pub vacuum_permittivity: f64,
    pub reduced_planck: f64,
}

impl PhysicalParams {
    pub fn new(
        dipole_moment: f64,
        wavelength: f64,
        detuning: f64,
        overlap_a: f64,
        atoms_per_site: u32,
    ) -> Self {
        Self {
            dipole_moment,
            wavelength,
            detuning,
            overlap_a,
            atoms_per_site,
            vacuum_permittivity: VACUUM_PERMITTIVITY,
            reduced_planck: REDUCED_PLANCK,
        }
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Effective Rabi frequency `Ω = 2℘²A / (ħΔ)`.
    pub fn rabi_frequency(&self) -> f64 {
        2.0 * self.dipole_moment * self.dipole_moment * self.overlap_a
            / (self.reduced_planck * self.detuning)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return Err(Error::invalid("wavelength", "must be positive and finite"));
        }
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(Error::invalid(
                "detuning",
                "must be nonzero and finite (far-detuned limit)",
            ));
        }
        if self.atoms_per_site == 0 {
            return Err(Error::invalid("atoms_per_site", "must be at least 1"));
        }
        if !self.dipole_moment.is_finite() || !self.overlap_a.is_finite() {
            return Err(Error::invalid(
                "dipole_moment",
                "dipole moment and overlap must be finite",
            ));
        }
        if !(self.vacuum_permittivity > 0.0) || !(self.reduced_planck > 0.0) {
            return Err(Error::invalid(
                "vacuum_permittivity",
                "physical constants must be positive",
            ));
        }
        Ok(())
    }
}

/// Dimensionless coupling `Λ` of one lattice site. Negative for red detuning.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct SiteCoupling(pub f64);

impl SiteCoupling {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::invalid("lambda", "must be finite"));
        }
        Ok(Self(lambda))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Scattering coefficients of an `n_sites` stack, referenced to the first site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackCoefficients {
    /// Reflection of a right-propagating field.
    pub r_fwd: Complex64,
    /// Reflection of a left-propagating field.
    pub r_bwd: Complex64,
    pub t: Complex64,
    pub n_sites: u32,
}

impl StackCoefficients {
    /// Largest componentwise complex deviation from `other`.
    pub fn max_deviation(&self, other: &StackCoefficients) -> f64 {
        [
            (self.r_fwd - other.r_fwd).norm(),
            (self.r_bwd - other.r_bwd).norm(),
            (self.t - other.t).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn reflectivity(&self) -> f64 {
        self.r_fwd.norm_sqr()
    }

    pub fn transmissivity(&self) -> f64 {
        self.t.norm_sqr()
    }
}

/// 2×2 matrix mapping `(forward, backward)` amplitudes on the left of an
/// element to those on its right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    /// Free propagation over a distance with phase `k·x`.
    pub fn propagation(phase: f64) -> Self {
        TransferMatrix {
            m11: Complex64::from_polar(1.0, phase),
            m12: Complex64::new(0.0, 0.0),
            m21: Complex64::new(0.0, 0.0),
            m22: Complex64::from_polar(1.0, -phase),
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, forward: Complex64, backward: Complex64) -> (Complex64, Complex64) {
        (
            self.m11 * forward + self.m12 * backward,
            self.m21 * forward + self.m22 * backward,
        )
    }

    /// Converts to scattering coefficients.
    ///
    /// From the left: `0 = m21 + m22·r_fwd`, `t = det/m22`.
    /// From the right: `t' = 1/m22`, `r_bwd = m12/m22`.
    pub fn scattering(&self, n_sites: u32) -> StackCoefficients {
        let inv = self.m22.inv();
        StackCoefficients {
            r_fwd: -self.m21 * inv,
            r_bwd: self.m12 * inv,
            t: self.determinant() * inv,
            n_sites,
        }
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// `Λ = (k/4ε₀)·n·Ω` with `Ω = 2℘²A/(ħΔ)` and `k = 2π/λ`.
pub fn lambda_from_physical(p: &PhysicalParams) -> Result<SiteCoupling> {
    p.validate()?;
    let lambda = p.wavenumber() / (4.0 * p.vacuum_permittivity)
        * f64::from(p.atoms_per_site)
        * p.rabi_frequency();
    SiteCoupling::new(lambda)
}

/// Self-consistent Bragg lattice period `d = (π + 2·arctan Λ)/k`.
pub fn lattice_spacing(c: SiteCoupling, wavenumber: f64) -> Result<f64> {
    if !(wavenumber > 0.0) || !wavenumber.is_finite() {
        return Err(Error::invalid("wavenumber", "must be positive and finite"));
    }
    Ok(bragg_phase(c) / wavenumber)
}

/// Propagation phase `k·d` between adjacent sites.
#[inline]
pub fn bragg_phase(c: SiteCoupling) -> f64 {
    PI + 2.0 * c.0.atan()
}

/// Single sheet: `r = −iΛ/(1+iΛ)`, `t = 1/(1+iΛ)`.
pub fn site_coefficients(c: SiteCoupling) -> StackCoefficients {
    let t = (Complex64::new(1.0, c.0)).inv();
    let r = -I * c.0 * t;
    StackCoefficients {
        r_fwd: r,
        r_bwd: r,
        t,
        n_sites: 1,
    }
}

/// Closed-form coefficients of `n_sites` Bragg-spaced sheets.
///
/// ```text
/// R→ = −iΛN e^{−2i·atan Λ}        / (1 − iΛN)
/// R← = −iΛN e^{−2i(2N−1)·atan Λ}  / (1 − iΛN)
/// T  =      e^{−2iN·atan Λ}       / (1 − iΛN)
/// ```
pub fn stack_coefficients(c: SiteCoupling, n_sites: u32) -> Result<StackCoefficients> {
    if n_sites == 0 {
        return Err(Error::invalid("n_sites", "must be at least 1"));
    }
    let lambda = c.0;
    let n = f64::from(n_sites);
    let atan = lambda.atan();
    let denom_inv = Complex64::new(1.0, -lambda * n).inv();
    let amp = -I * (lambda * n) * denom_inv;
    Ok(StackCoefficients {
        r_fwd: amp * Complex64::from_polar(1.0, -2.0 * atan),
        r_bwd: amp * Complex64::from_polar(1.0, -2.0 * (2.0 * n - 1.0) * atan),
        t: denom_inv * Complex64::from_polar(1.0, -2.0 * n * atan),
        n_sites,
    })
}

/// Jump matrix of one sheet: field continuous, derivative jumps by `2kΛ·E`.
pub fn site_transfer_matrix(c: SiteCoupling) -> TransferMatrix {
    let l = c.0;
    TransferMatrix {
        m11: Complex64::new(1.0, -l),
        m12: Complex64::new(0.0, -l),
        m21: Complex64::new(0.0, l),
        m22: Complex64::new(1.0, l),
    }
}

/// Transfer matrix of the whole stack with both sides referenced to the first site.
pub fn stack_transfer_matrix(c: SiteCoupling, n_sites: u32) -> Result<TransferMatrix> {
    if n_sites == 0 {
        return Err(Error::invalid("n_sites", "must be at least 1"));
    }
    let site = site_transfer_matrix(c);
    let kd = bragg_phase(c);
    let hop = TransferMatrix::propagation(kd);
    let mut total = site;
    for _ in 1..n_sites {
        total = site * hop * total;
    }
    // right-hand amplitudes are local to the last site; move the reference back
    let extent = f64::from(n_sites - 1) * kd;
    Ok(TransferMatrix::propagation(-extent) * total)
}

/// Stack coefficients from the explicit ordered product of site and
/// propagation matrices. Independent of the closed form.
pub fn stack_coefficients_bruteforce(c: SiteCoupling, n_sites: u32) -> Result<StackCoefficients> {
    let m = stack_transfer_matrix(c, n_sites)?;
    let coeffs = m.scattering(n_sites);
    debug_assert!(coeffs.r_fwd.is_finite() && coeffs.t.is_finite());
    Ok(coeffs)
}
