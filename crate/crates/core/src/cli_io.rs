//! Run configuration, command drivers and tabular output.
//!
//! Configs are flat `key = value` lines with `#` comments. Every command
//! returns a [`Table`] rendered as comma-separated values behind a `#` header
//! that echoes the resolved dimensionless parameters.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::atomic_mirror::{
    bragg_phase, lambda_from_physical, stack_coefficients, stack_coefficients_bruteforce,
    PhysicalParams, SiteCoupling, REDUCED_PLANCK, VACUUM_PERMITTIVITY,
};
use crate::cavity_network::{
    dipole_potential, field_envelope_with, CavityConfig, DeterminantMode, DriveFields,
    EnvelopeOptions, RoundTripPhase, DEFAULT_FREE_REGION_WAVES, DEFAULT_SAMPLES_PER_SEGMENT,
};
use crate::error::{Error, Result};
use crate::resonances::{
    chi_path, empty_cavity_resonance, find_resonances, resonant_positions, scan_det_map,
    track_period, DEFAULT_TOL_ROOT, DEFAULT_TRACK_POINTS,
};

/// How the site coupling was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterStyle {
    Dimensionless { lambda: f64 },
    Physical(PhysicalParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Tsv,
}

impl OutputFormat {
    fn separator(self) -> char {
        match self {
            OutputFormat::Csv => ',',
            OutputFormat::Tsv => '\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub style: ParameterStyle,
    /// Resolved `Λ` per site.
    pub coupling: SiteCoupling,
    pub n_sites: u32,
    pub r1_intensity: f64,
    pub r2_intensity: f64,
    pub drive: DriveFields,
    pub chi: f64,
    pub za_over_l: Option<f64>,
    pub u_range: [f64; 2],
    pub chi_range: [f64; 2],
    pub n_u: usize,
    pub n_chi: usize,
    pub n_track: usize,
    pub samples_per_segment: usize,
    pub free_region_waves: f64,
    pub tol_root: f64,
    pub mode: DeterminantMode,
    pub u: f64,
    pub branch: usize,
    pub out: Option<String>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    /// The worked example: 10⁶ atoms on 1000 sites, Λ = −9·10⁻⁴ per site,
    /// both mirrors at 0.99 intensity reflectivity, left drive only.
    fn default() -> Self {
        Self {
            style: ParameterStyle::Dimensionless { lambda: -9e-4 },
            coupling: SiteCoupling(-9e-4),
            n_sites: 1000,
            r1_intensity: 0.99,
            r2_intensity: 0.99,
            drive: DriveFields::left(1.0),
            chi: 0.0,
            za_over_l: None,
            u_range: [-0.5, 0.5],
            chi_range: [0.0, TAU],
            n_u: 600,
            n_chi: 600,
            n_track: DEFAULT_TRACK_POINTS,
            samples_per_segment: DEFAULT_SAMPLES_PER_SEGMENT,
            free_region_waves: DEFAULT_FREE_REGION_WAVES,
            tol_root: DEFAULT_TOL_ROOT,
            mode: DeterminantMode::Full,
            u: 0.0,
            branch: 0,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

const PHYSICAL_KEYS: [&str; 7] = [
    "dipole_moment",
    "wavelength",
    "detuning",
    "overlap_a",
    "atoms_per_site",
    "vacuum_permittivity",
    "reduced_planck",
];

const OTHER_KEYS: [&str; 25] = [
    "lambda",
    "n_sites",
    "r1_intensity",
    "r2_intensity",
    "e_left",
    "e_left_im",
    "e_right",
    "e_right_im",
    "chi",
    "za_over_l",
    "u_min",
    "u_max",
    "chi_min",
    "chi_max",
    "n_u",
    "n_chi",
    "n_track",
    "samples_per_segment",
    "free_region_waves",
    "tol_root",
    "mode",
    "u",
    "branch",
    "out",
    "format",
];

fn parse_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    map.get(key)
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::config(key, format!("expected a finite number, got `{v}`")))
        })
        .transpose()
}

fn parse_uint(map: &BTreeMap<String, String>, key: &str) -> Result<Option<u64>> {
    map.get(key)
        .map(|v| {
            v.parse::<u64>().map_err(|_| {
                Error::config(key, format!("expected a non-negative integer, got `{v}`"))
            })
        })
        .transpose()
}

fn require_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    parse_f64(map, key)?.ok_or_else(|| Error::config(key, "required key missing"))
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !PHYSICAL_KEYS.contains(&key.as_str()) && !OTHER_KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, "unknown key"));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::config(key, "duplicate key"));
        }
    }

    let mut cfg = RunConfig::default();
    let has_physical = PHYSICAL_KEYS.iter().any(|k| map.contains_key(*k));
    let has_lambda = map.contains_key("lambda");

    cfg.n_sites = match parse_uint(&map, "n_sites")? {
        Some(n) if n >= 1 && n <= u64::from(u32::MAX) => n as u32,
        Some(n) => {
            return Err(Error::config(
                "n_sites",
                format!("must be in [1, 2^32), got {n}"),
            ))
        }
        None => return Err(Error::config("n_sites", "required key missing")),
    };

    match (has_lambda, has_physical) {
        (true, true) => {
            let clash = PHYSICAL_KEYS
                .iter()
                .find(|k| map.contains_key(**k))
                .unwrap();
            return Err(Error::config(
                "lambda",
                format!("conflicts with physical parameter `{clash}`; use exactly one style"),
            ));
        }
        (false, false) => {
            return Err(Error::config(
                "lambda",
                "required key missing (or give the physical parameters instead)",
            ))
        }
        (true, false) => {
            let lambda = require_f64(&map, "lambda")?;
            cfg.style = ParameterStyle::Dimensionless { lambda };
            cfg.coupling = SiteCoupling(lambda);
        }
        (false, true) => {
            let atoms = match parse_uint(&map, "atoms_per_site")? {
                Some(n) if n >= 1 && n <= u64::from(u32::MAX) => n as u32,
                Some(_) => return Err(Error::config("atoms_per_site", "must be at least 1")),
                None => return Err(Error::config("atoms_per_site", "required key missing")),
            };
            let params = PhysicalParams {
                dipole_moment: require_f64(&map, "dipole_moment")?,
                wavelength: require_f64(&map, "wavelength")?,
                detuning: require_f64(&map, "detuning")?,
                overlap_a: require_f64(&map, "overlap_a")?,
                atoms_per_site: atoms,
                vacuum_permittivity: parse_f64(&map, "vacuum_permittivity")?
                    .unwrap_or(VACUUM_PERMITTIVITY),
                reduced_planck: parse_f64(&map, "reduced_planck")?.unwrap_or(REDUCED_PLANCK),
            };
            cfg.coupling = lambda_from_physical(&params).map_err(|e| match e {
                Error::InvalidParameter { name, reason } => Error::config(name, reason),
                other => other,
            })?;
            cfg.style = ParameterStyle::Physical(params);
        }
    }

    cfg.r1_intensity = require_f64(&map, "r1_intensity")?;
    cfg.r2_intensity = require_f64(&map, "r2_intensity")?;
    for key in ["r1_intensity", "r2_intensity"] {
        let v = require_f64(&map, key)?;
        if !(0.0..1.0).contains(&v) {
            return Err(Error::config(key, format!("must lie in [0, 1), got {v}")));
        }
    }

    let complex = |re: &str, im: &str, default: Complex64| -> Result<Complex64> {
        Ok(Complex64::new(
            parse_f64(&map, re)?.unwrap_or(default.re),
            parse_f64(&map, im)?.unwrap_or(default.im),
        ))
    };
    cfg.drive = DriveFields::new(
        complex("e_left", "e_left_im", cfg.drive.e_left)?,
        complex("e_right", "e_right_im", cfg.drive.e_right)?,
    );

    if let Some(chi) = parse_f64(&map, "chi")? {
        cfg.chi = chi.rem_euclid(TAU);
    }
    if let Some(r) = parse_f64(&map, "za_over_l")? {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::config(
                "za_over_l",
                format!("must lie in (0, 1), got {r}"),
            ));
        }
        cfg.za_over_l = Some(r);
    }

    cfg.u_range = [
        parse_f64(&map, "u_min")?.unwrap_or(cfg.u_range[0]),
        parse_f64(&map, "u_max")?.unwrap_or(cfg.u_range[1]),
    ];
    if !(cfg.u_range[1] > cfg.u_range[0]) {
        return Err(Error::config("u_max", "must exceed u_min"));
    }
    cfg.chi_range = [
        parse_f64(&map, "chi_min")?.unwrap_or(cfg.chi_range[0]),
        parse_f64(&map, "chi_max")?.unwrap_or(cfg.chi_range[1]),
    ];
    if !(cfg.chi_range[1] > cfg.chi_range[0]) {
        return Err(Error::config("chi_max", "must exceed chi_min"));
    }

    for (key, slot, min) in [
        ("n_u", &mut cfg.n_u, 2u64),
        ("n_chi", &mut cfg.n_chi, 2),
        ("n_track", &mut cfg.n_track, 8),
        ("samples_per_segment", &mut cfg.samples_per_segment, 1),
    ] {
        if let Some(n) = parse_uint(&map, key)? {
            if n < min {
                return Err(Error::config(
                    key,
                    format!("must be at least {min}, got {n}"),
                ));
            }
            *slot = n as usize;
        }
    }
    if let Some(w) = parse_f64(&map, "free_region_waves")? {
        if !(w > 0.0) {
            return Err(Error::config("free_region_waves", "must be positive"));
        }
        cfg.free_region_waves = w;
    }
    if let Some(t) = parse_f64(&map, "tol_root")? {
        if !(t > 0.0) {
            return Err(Error::config("tol_root", "must be positive"));
        }
        cfg.tol_root = t;
    }
    if let Some(m) = map.get("mode") {
        cfg.mode = m.parse()?;
    }
    if let Some(u) = parse_f64(&map, "u")? {
        cfg.u = u;
    }
    if let Some(b) = parse_uint(&map, "branch")? {
        cfg.branch = b as usize;
    }
    if let Some(out) = map.get("out") {
        cfg.out = Some(out.clone());
    }
    if let Some(f) = map.get("format") {
        cfg.format = match f.as_str() {
            "csv" => OutputFormat::Csv,
            "tsv" => OutputFormat::Tsv,
            other => {
                return Err(Error::config(
                    "format",
                    format!("expected csv|tsv, got `{other}`"),
                ))
            }
        };
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn cavity(&self) -> Result<CavityConfig> {
        let c = CavityConfig::new(
            self.r1_intensity,
            self.r2_intensity,
            self.coupling,
            self.n_sites,
            self.chi,
        )?;
        match self.za_over_l {
            Some(r) => c.with_za_over_l(r),
            None => Ok(c),
        }
    }

    fn envelope_options(&self) -> EnvelopeOptions {
        EnvelopeOptions {
            samples_per_segment: self.samples_per_segment,
            free_region_waves: self.free_region_waves,
        }
    }

    /// Resolved parameters echoed at the top of every output.
    pub fn header(&self) -> Vec<(String, String)> {
        let mut h = vec![
            ("lambda".to_string(), fmt_num(self.coupling.value())),
            ("n_sites".to_string(), self.n_sites.to_string()),
            (
                "lambda_n_sites".to_string(),
                fmt_num(self.coupling.value() * f64::from(self.n_sites)),
            ),
            ("r1_intensity".to_string(), fmt_num(self.r1_intensity)),
            ("r2_intensity".to_string(), fmt_num(self.r2_intensity)),
            ("e_left".to_string(), fmt_complex(self.drive.e_left)),
            ("e_right".to_string(), fmt_complex(self.drive.e_right)),
            ("chi".to_string(), fmt_num(self.chi)),
            (
                "za_over_wavelength".to_string(),
                fmt_num(self.chi / (2.0 * TAU)),
            ),
        ];
        if let Some(r) = self.za_over_l {
            h.push(("za_over_l".to_string(), fmt_num(r)));
        }
        if let ParameterStyle::Physical(p) = &self.style {
            h.push(("source".to_string(), "physical".to_string()));
            h.push((
                "lambda_per_atom".to_string(),
                fmt_num(self.coupling.value() / f64::from(p.atoms_per_site)),
            ));
            h.push(("atoms_per_site".to_string(), p.atoms_per_site.to_string()));
            h.push(("wavelength_m".to_string(), fmt_num(p.wavelength)));
        } else {
            h.push(("source".to_string(), "dimensionless".to_string()));
        }
        h
    }
}

/// Fixed 12-significant-digit formatting.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+.11e}i", fmt_num(z.re), z.im)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(command: &str, cfg: &RunConfig, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            header: cfg.header(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: impl Into<String>) {
        self.header.push((key.to_string(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(x) => *x,
                    Cell::Int(n) => *n as f64,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let sep = format.separator();
        let mut out = String::new();
        let _ = writeln!(out, "# command = {}", self.command);
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let cols: Vec<String> = self.columns.iter().map(|c| quote(c, sep)).collect();
        out.push_str(&cols.join(&sep.to_string()));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_num(*x),
                    Cell::Int(n) => n.to_string(),
                    Cell::Text(s) => quote(s, sep),
                })
                .collect();
            out.push_str(&cells.join(&sep.to_string()));
            out.push('\n');
        }
        out
    }
}

fn quote(s: &str, sep: char) -> String {
    if s.contains(sep) || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Stack coefficients, closed form next to the transfer-matrix product.
pub fn cmd_coeffs(cfg: &RunConfig) -> Result<Table> {
    let closed = stack_coefficients(cfg.coupling, cfg.n_sites)?;
    let brute = stack_coefficients_bruteforce(cfg.coupling, cfg.n_sites)?;
    let dev = closed.max_deviation(&brute);
    let mut t = Table::new(
        "coeffs",
        cfg,
        &[
            "method",
            "lambda",
            "n_sites",
            "r_fwd_re",
            "r_fwd_im",
            "r_bwd_re",
            "r_bwd_im",
            "t_re",
            "t_im",
            "r_fwd_abs2",
            "r_bwd_abs2",
            "t_abs2",
            "max_deviation",
        ],
    );
    t.note("max_deviation", fmt_num(dev));
    for (label, c) in [("closed_form", closed), ("transfer_matrix", brute)] {
        t.rows.push(vec![
            label.into(),
            cfg.coupling.value().into(),
            (cfg.n_sites as usize).into(),
            c.r_fwd.re.into(),
            c.r_fwd.im.into(),
            c.r_bwd.re.into(),
            c.r_bwd.im.into(),
            c.t.re.into(),
            c.t.im.into(),
            c.r_fwd.norm_sqr().into(),
            c.r_bwd.norm_sqr().into(),
            c.t.norm_sqr().into(),
            dev.into(),
        ]);
    }
    Ok(t)
}

/// Lattice period in wavelengths and as a phase.
pub fn cmd_spacing(cfg: &RunConfig) -> Result<Table> {
    let kd = bragg_phase(cfg.coupling);
    let mut t = Table::new(
        "spacing",
        cfg,
        &["lambda", "d_over_wavelength", "d_times_k", "d_m"],
    );
    let d_m = match &cfg.style {
        ParameterStyle::Physical(p) => kd / p.wavenumber(),
        ParameterStyle::Dimensionless { .. } => f64::NAN,
    };
    t.rows.push(vec![
        cfg.coupling.value().into(),
        (kd / TAU).into(),
        kd.into(),
        d_m.into(),
    ]);
    Ok(t)
}

/// `log10(1/|D|²)` on the `(u, z_a/λ)` grid.
pub fn cmd_det_scan(cfg: &RunConfig) -> Result<Table> {
    let cavity = cfg.cavity()?;
    let map = scan_det_map(
        &cavity,
        cfg.u_range,
        cfg.chi_range,
        cfg.n_u,
        cfg.n_chi,
        cfg.mode,
    )?;
    let mut t = Table::new(
        "det-scan",
        cfg,
        &["u", "za_over_wavelength", "log10_inv_abs_d2"],
    );
    t.note("mode", cfg.mode.to_string());
    t.note("n_u", cfg.n_u.to_string());
    t.note("n_chi", cfg.n_chi.to_string());
    for (i, chi) in map.chi.iter().enumerate() {
        for (j, u) in map.u.iter().enumerate() {
            t.rows.push(vec![
                (*u).into(),
                (chi / (2.0 * TAU)).into(),
                map.value(i, j).into(),
            ]);
        }
    }
    Ok(t)
}

/// Linewidth against atom position, with and without atomic reflection.
pub fn cmd_linewidth_inset(cfg: &RunConfig) -> Result<Table> {
    let cavity = cfg.cavity()?;
    let full = track_period(&cavity, DeterminantMode::Full, cfg.u, cfg.n_track)?;
    let uniform = track_period(&cavity, DeterminantMode::UniformGas, cfg.u, cfg.n_track)?;
    let empty = empty_cavity_resonance(cfg.r1_intensity, cfg.r2_intensity, 0)?;
    let mut t = Table::new(
        "linewidth-inset",
        cfg,
        &[
            "za_over_wavelength",
            "gamma_full",
            "gamma_uniform_gas",
            "u0_full",
            "u0_uniform_gas",
        ],
    );
    t.note("gamma_empty", fmt_num(empty.gamma_fwhm));
    t.note("n_track", cfg.n_track.to_string());
    let excursion = full.iter().map(|r| r.u0).fold(f64::NEG_INFINITY, f64::max)
        - full.iter().map(|r| r.u0).fold(f64::INFINITY, f64::min);
    t.note("u0_full_excursion", fmt_num(excursion));
    for (chi, (f, g)) in chi_path(cfg.n_track).iter().zip(full.iter().zip(&uniform)) {
        t.rows.push(vec![
            (chi / (2.0 * TAU)).into(),
            f.gamma_fwhm.into(),
            g.gamma_fwhm.into(),
            f.u0.into(),
            g.u0.into(),
        ]);
    }
    Ok(t)
}

/// Field envelope at detuning `u` with the atoms on the selected resonant branch.
pub fn cmd_envelope(cfg: &RunConfig) -> Result<Table> {
    let cavity = cfg.cavity()?;
    let positions = resonant_positions(&cavity, cfg.mode, cfg.u, cfg.n_track)?;
    let pos = positions.get(cfg.branch).ok_or(Error::BranchIndex {
        index: cfg.branch,
        available: positions.len(),
    })?;
    let placed = cavity.with_chi(pos.chi);
    let env = field_envelope_with(
        &placed,
        &cfg.drive,
        RoundTripPhase::from_fsr(cfg.u),
        &cfg.envelope_options(),
    )?;
    let potential = dipole_potential(&env, placed.coupling);
    let site_v_max = potential
        .site_v
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut t = Table::new(
        "envelope",
        cfg,
        &[
            "z_over_wavelength",
            "envelope_max",
            "envelope_min",
            "abs_forward",
            "abs_backward",
        ],
    );
    t.note("u", fmt_num(cfg.u));
    t.note("branch", cfg.branch.to_string());
    t.note("branches_available", positions.len().to_string());
    t.note("resonant_chi", fmt_num(pos.chi));
    t.note(
        "resonant_za_over_wavelength",
        fmt_num(pos.chi / (2.0 * TAU)),
    );
    t.note("resonance_u0", fmt_num(pos.resonance.u0));
    t.note("resonance_gamma_fwhm", fmt_num(pos.resonance.gamma_fwhm));
    t.note("left_right_ratio", fmt_num(env.left_right_ratio()));
    t.note("envelope_variation", fmt_num(env.lattice_variation()));
    t.note("closure_error", fmt_num(env.closure_error()));
    t.note("site_potential_max", fmt_num(site_v_max));
    for seg in &env.segments {
        t.rows.push(vec![
            seg.z_start.into(),
            seg.envelope_max.into(),
            seg.envelope_min.into(),
            seg.forward.norm().into(),
            seg.backward.norm().into(),
        ]);
    }
    if let Some(last) = env.segments.last() {
        let f = last.forward.norm();
        let b = last.backward.norm();
        t.rows.push(vec![
            last.z_end.into(),
            (f + b).into(),
            (f - b).abs().into(),
            f.into(),
            b.into(),
        ]);
    }
    Ok(t)
}

/// Complex zeros in the configured frequency window at the configured atom phase.
pub fn cmd_resonances(cfg: &RunConfig) -> Result<(Table, Vec<f64>)> {
    let cavity = cfg.cavity()?;
    let terms = cavity.determinant_terms();
    let search = find_resonances(&cavity, cfg.mode, cavity.chi(), cfg.u_range, cfg.tol_root)?;
    let mut t = Table::new(
        "resonances",
        cfg,
        &[
            "branch_id",
            "u0",
            "gamma_fwhm",
            "theta_re",
            "theta_im",
            "residual",
            "chi",
        ],
    );
    t.note("mode", cfg.mode.to_string());
    t.note("failed_seeds", search.failed_seeds.len().to_string());
    for r in &search.resonances {
        let residual = terms.evaluate(cfg.mode, r.theta_zero, r.chi).norm();
        t.rows.push(vec![
            r.branch_id.into(),
            r.u0.into(),
            r.gamma_fwhm.into(),
            r.theta_zero.re.into(),
            r.theta_zero.im.into(),
            residual.into(),
            r.chi.into(),
        ]);
    }
    Ok((t, search.failed_seeds))
}
