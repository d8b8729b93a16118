//! Declarative run description read from TOML, with defaults for every field.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ed1d::{capped_dimension, default_n_cap, Boundary, DEFAULT_RATIO, MAX_DIM, MAX_SITES};
use crate::error::{Error, Result};
use crate::observables::{ScanGeometry, POINTS_PER_PI};
use crate::phasemap::SweepMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Module {
    Wannier,
    Coupling,
    Mf,
    Ed,
    Scan,
    Map3d,
    Phasediagram,
    Rate,
    Figure,
}

impl Module {
    pub fn name(self) -> &'static str {
        match self {
            Module::Wannier => "wannier",
            Module::Coupling => "coupling",
            Module::Mf => "mf",
            Module::Ed => "ed",
            Module::Scan => "scan",
            Module::Map3d => "map3d",
            Module::Phasediagram => "phasediagram",
            Module::Rate => "rate",
            Module::Figure => "figure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Max,
    Min,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Ed,
    Mf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureTag {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Quads,
}

impl FigureTag {
    pub fn name(self) -> &'static str {
        match self {
            FigureTag::Fig2 => "fig2",
            FigureTag::Fig3 => "fig3",
            FigureTag::Fig4 => "fig4",
            FigureTag::Fig5 => "fig5",
            FigureTag::Quads => "quads",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    /// `V0` in recoil energies.
    pub depth: f64,
    pub cutoff: usize,
    pub nq: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            depth: 5.0,
            cutoff: 21,
            nq: 64,
        }
    }
}

/// Standing-wave pair for the `coupling` command; wavenumbers in `1/d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    pub k0x: f64,
    pub k1x: f64,
    pub phi0: f64,
    pub phi1: f64,
    /// Illuminated sites `K`.
    pub sites: usize,
    pub c_abs: f64,
    /// Samples of the phase and local-oscillator scans.
    pub phase_points: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            kind: GeometryKind::Max,
            k0x: PI,
            k1x: PI,
            phi0: 0.0,
            phi1: 0.0,
            sites: 8,
            c_abs: 1.0,
            phase_points: 181,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MfConfig {
    /// `U / zJ`
    pub u: f64,
    /// `mu / zJ`; the unit-density value when absent.
    pub mu: Option<f64>,
    pub z: usize,
    pub n_max: usize,
    pub max_iter: usize,
    /// `a:b:n` grid of `U / zJ`.
    pub scan_u: Option<String>,
    /// `a:b:n` grid of `mu / zJ`.
    pub scan_mu: Option<String>,
}

impl Default for MfConfig {
    fn default() -> Self {
        Self {
            u: 10.0,
            mu: None,
            z: 6,
            n_max: 12,
            max_iter: 200_000,
            scan_u: None,
            scan_mu: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub sites: usize,
    /// Defaults to one boson per site.
    pub bosons: Option<usize>,
    /// `U / 2J`
    pub u: f64,
    /// `mu / 2J`
    pub mu: f64,
    /// `V / 2J`
    pub v: f64,
    pub ratio: f64,
    pub offset: f64,
    pub boundary: Boundary,
    pub n_cap: Option<usize>,
    /// Minimise `E(N) - mu N` over `N <= max_bosons` instead of fixing `N`.
    pub grand_canonical: bool,
    pub max_bosons: Option<usize>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            sites: 8,
            bosons: None,
            u: 1.0,
            mu: 0.0,
            v: 0.0,
            ratio: DEFAULT_RATIO,
            offset: 0.0,
            boundary: Boundary::Open,
            n_cap: None,
            grand_canonical: false,
            max_bosons: None,
        }
    }
}

impl ChainConfig {
    pub fn bosons(&self) -> usize {
        self.bosons.unwrap_or(self.sites)
    }

    pub fn max_bosons(&self) -> usize {
        self.max_bosons.unwrap_or(2 * self.sites)
    }

    pub fn n_cap_for(&self, bosons: usize) -> usize {
        self.n_cap
            .map_or_else(|| default_n_cap(bosons, 1.0, 2.0 * self.u), |c| c.min(bosons))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub source: Source,
    pub geometry: ScanGeometry,
    pub theta0: f64,
    /// Wavenumber in `1/d`.
    pub k: f64,
    pub points_per_pi: usize,
    /// Illuminated sites; the whole chain when absent.
    pub k_sites: Option<usize>,
    /// Half width (in `dk d`) masked around classical peaks before the dip is measured.
    pub mask_half_width: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            source: Source::Ed,
            geometry: ScanGeometry::Density,
            theta0: 0.0,
            k: PI,
            points_per_pi: POINTS_PER_PI,
            k_sites: None,
            mask_half_width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Map3dConfig {
    /// Sites per axis of the cubic lattice.
    pub lattice: usize,
    /// Angular resolution: `2q + 1` polar and `4q` azimuthal samples.
    pub q: usize,
    /// Probe direction, rescaled to `|k| = pi/d`.
    pub probe: [f64; 3],
}

impl Default for Map3dConfig {
    fn default() -> Self {
        Self {
            lattice: 6,
            q: 12,
            probe: [0.48, 0.6, 0.64],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub mode: SweepMode,
    /// `[axis1, axis2]` cell counts.
    pub grid: [usize; 2],
    /// `mu / 2J` range.
    pub mu: [f64; 2],
    /// `U / 2J` range; `[0, 5]` for `mu-u`, `[0.5, 10]` for `disorder` when absent.
    pub u: Option<[f64; 2]>,
    /// `V / 2J` range.
    pub v: [f64; 2],
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: SweepMode::MuU,
            grid: [16, 16],
            mu: [0.0, 3.0],
            u: None,
            v: [0.0, 5.0],
        }
    }
}

impl SweepConfig {
    pub fn u_range(&self) -> [f64; 2] {
        self.u.unwrap_or(match self.mode {
            SweepMode::MuU => [0.0, 5.0],
            SweepMode::Disorder => [0.5, 10.0],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadsConfig {
    /// `U / zJ` range of the unit-density path.
    pub u: [f64; 2],
    pub count: usize,
}

impl Default for QuadsConfig {
    fn default() -> Self {
        Self {
            u: [0.5, 40.0],
            count: 80,
        }
    }
}

/// Photon-rate inputs in SI units (angular frequencies in rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateConfig {
    pub omega0: f64,
    pub delta_a: f64,
    pub gamma: f64,
    pub k_sites: usize,
    pub sigma2: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            omega0: 2.36e8,
            delta_a: 6.283e9,
            gamma: 3.81e7,
            k_sites: 150,
            sigma2: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub mf: f64,
    pub lanczos: f64,
    pub krylov: usize,
    pub max_restarts: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            mf: 1e-12,
            lanczos: 1e-10,
            krylov: 40,
            max_restarts: 2_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub module: Option<Module>,
    pub figure: Option<FigureTag>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out_dir: PathBuf,
    /// Name of the primary output file.
    pub out: Option<String>,
    pub lattice: LatticeConfig,
    pub geometry: GeometryConfig,
    pub mf: MfConfig,
    pub chain: ChainConfig,
    pub scan: ScanConfig,
    pub map3d: Map3dConfig,
    pub sweep: SweepConfig,
    pub quads: QuadsConfig,
    pub rate: RateConfig,
    pub tolerance: ToleranceConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            module: None,
            figure: None,
            seed: 0,
            jobs: None,
            out_dir: PathBuf::from("."),
            out: None,
            lattice: LatticeConfig::default(),
            geometry: GeometryConfig::default(),
            mf: MfConfig::default(),
            chain: ChainConfig::default(),
            scan: ScanConfig::default(),
            map3d: Map3dConfig::default(),
            sweep: SweepConfig::default(),
            quads: QuadsConfig::default(),
            rate: RateConfig::default(),
            tolerance: ToleranceConfig::default(),
        }
    }
}

/// Parsed config plus the text it came from, for locating validation errors.
#[derive(Debug, Clone, Default)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub text: String,
    /// Dotted keys set on the command line after parsing.
    pub overridden: BTreeSet<String>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a TOML run description.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let loaded = load_config(text)?;
    loaded.validate()?;
    Ok(loaded.config)
}

/// Parses without validating, so command-line overrides can be applied first.
pub fn load_config(text: &str) -> Result<LoadedConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    Ok(LoadedConfig {
        config,
        text: text.to_string(),
        overridden: BTreeSet::new(),
    })
}

/// Line of `key` inside `[section]` (top level for an empty section).
fn locate(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = dotted.rsplit_once('.').unwrap_or(("", dotted));
    let mut current = String::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = h.trim().to_string();
            continue;
        }
        let Some((k, _)) = line.split_once('=') else { continue };
        let k = k.trim();
        if (current == section && k == key) || (current.is_empty() && k == dotted) {
            return Some(n + 1);
        }
    }
    None
}

struct Checker<'a> {
    loaded: &'a LoadedConfig,
}

impl Checker<'_> {
    fn fail(&self, key: &str, constraint: &str, detail: String) -> Error {
        let line = if self.loaded.overridden.contains(key) {
            None
        } else {
            locate(&self.loaded.text, key)
        };
        Error::Config {
            line,
            message: format!("{key} = {detail} violates `{constraint}`"),
        }
    }

    fn require(&self, ok: bool, key: &str, constraint: &str, value: impl std::fmt::Display) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(key, constraint, value.to_string()))
        }
    }
}

/// Parses `a:b:n` into an inclusive grid.
pub fn parse_range(spec: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:n, got `{spec}`"));
    }
    let a = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("`{}`: {e}", parts[0]))?;
    let b = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("`{}`: {e}", parts[1]))?;
    let n = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("`{}`: {e}", parts[2]))?;
    if !a.is_finite() || !b.is_finite() || n == 0 {
        return Err(format!("need finite bounds and n >= 1 in `{spec}`"));
    }
    Ok((a, b, n))
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            a * (1.0 - t) + b * t
        })
        .collect()
}

impl LoadedConfig {
    /// Checks every physical field against the module preconditions.
    pub fn validate(&self) -> Result<()> {
        let c = &self.config;
        let k = Checker { loaded: self };

        k.require(
            c.jobs.is_none_or(|j| j >= 1),
            "jobs",
            "jobs ≥ 1",
            format!("{:?}", c.jobs),
        )?;

        let l = &c.lattice;
        k.require(
            l.depth.is_finite() && l.depth >= 0.0,
            "lattice.depth",
            "depth ≥ 0",
            l.depth,
        )?;
        k.require(l.depth <= 100.0, "lattice.depth", "depth ≤ 100", l.depth)?;
        k.require(
            l.cutoff >= 5 && l.cutoff % 2 == 1,
            "lattice.cutoff",
            "cutoff odd and ≥ 5",
            l.cutoff,
        )?;
        k.require(l.nq >= 32, "lattice.nq", "nq ≥ 32", l.nq)?;

        let g = &c.geometry;
        for (key, v) in [
            ("geometry.k0x", g.k0x),
            ("geometry.k1x", g.k1x),
            ("geometry.phi0", g.phi0),
            ("geometry.phi1", g.phi1),
        ] {
            k.require(v.is_finite(), key, "finite", v)?;
        }
        k.require(g.sites >= 2, "geometry.sites", "sites ≥ 2", g.sites)?;
        k.require(g.sites <= 4096, "geometry.sites", "sites ≤ 4096", g.sites)?;
        k.require(
            g.c_abs.is_finite() && g.c_abs > 0.0,
            "geometry.c_abs",
            "c_abs > 0",
            g.c_abs,
        )?;
        k.require(
            g.phase_points >= 2,
            "geometry.phase_points",
            "phase_points ≥ 2",
            g.phase_points,
        )?;

        let m = &c.mf;
        k.require(m.u.is_finite() && m.u >= 0.0, "mf.u", "u ≥ 0", m.u)?;
        if let Some(mu) = m.mu {
            k.require(mu.is_finite(), "mf.mu", "finite", mu)?;
        }
        k.require([2, 4, 6].contains(&m.z), "mf.z", "z ∈ {2, 4, 6}", m.z)?;
        k.require(m.n_max >= 6, "mf.n_max", "n_max ≥ 6", m.n_max)?;
        k.require(m.max_iter >= 1, "mf.max_iter", "max_iter ≥ 1", m.max_iter)?;
        for (key, r) in [("mf.scan_u", &m.scan_u), ("mf.scan_mu", &m.scan_mu)] {
            if let Some(r) = r {
                if let Err(e) = parse_range(r) {
                    return Err(k.fail(key, "a:b:n with finite a, b and n ≥ 1", e));
                }
            }
        }
        if let Some(r) = &m.scan_u {
            let (a, b, _) = parse_range(r).unwrap_or((0.0, 0.0, 1));
            k.require(a >= 0.0 && b >= 0.0, "mf.scan_u", "u ≥ 0", r)?;
        }

        let ch = &c.chain;
        let n = ch.bosons();
        let cap = ch.n_cap_for(n);
        let dim = capped_dimension(ch.sites, n, cap);
        k.require(ch.sites >= 1, "chain.sites", "sites ≥ 1", ch.sites)?;
        k.require(
            dim <= MAX_DIM,
            "chain.sites",
            &format!("ED dimension C(N+M-1, N) ≤ {MAX_DIM}"),
            format!("{} with N = {n} gives dimension {dim}", ch.sites),
        )?;
        k.require(
            ch.sites <= MAX_SITES,
            "chain.sites",
            &format!("sites ≤ {MAX_SITES}"),
            ch.sites,
        )?;
        k.require(n <= 31, "chain.bosons", "bosons ≤ 31", n)?;
        if let Some(nc) = ch.n_cap {
            k.require(nc >= 1 || n == 0, "chain.n_cap", "n_cap ≥ 1", nc)?;
        }
        k.require(ch.u.is_finite() && ch.u >= 0.0, "chain.u", "u ≥ 0", ch.u)?;
        k.require(ch.mu.is_finite(), "chain.mu", "finite", ch.mu)?;
        k.require(ch.v.is_finite() && ch.v >= 0.0, "chain.v", "v ≥ 0", ch.v)?;
        k.require(ch.ratio.is_finite(), "chain.ratio", "finite", ch.ratio)?;
        k.require(ch.offset.is_finite(), "chain.offset", "finite", ch.offset)?;
        let nmax = ch.max_bosons();
        k.require(nmax <= 31, "chain.max_bosons", "max_bosons ≤ 31", nmax)?;

        let s = &c.scan;
        k.require(
            s.theta0.is_finite() && s.theta0.abs() <= PI / 2.0,
            "scan.theta0",
            "|theta0| ≤ pi/2",
            s.theta0,
        )?;
        k.require(s.k.is_finite() && s.k > 0.0, "scan.k", "k > 0", s.k)?;
        k.require(s.k <= 3.0 * PI, "scan.k", "k ≤ 3 pi", s.k)?;
        k.require(
            (2..=65_536).contains(&s.points_per_pi),
            "scan.points_per_pi",
            "2 ≤ points_per_pi ≤ 65536",
            s.points_per_pi,
        )?;
        if let Some(ks) = s.k_sites {
            k.require(
                ks >= 1 && ks <= ch.sites,
                "scan.k_sites",
                "1 ≤ k_sites ≤ chain.sites",
                ks,
            )?;
        }
        if let Some(w) = s.mask_half_width {
            k.require(
                w.is_finite() && w > 0.0,
                "scan.mask_half_width",
                "mask_half_width > 0",
                w,
            )?;
        }

        let mp = &c.map3d;
        k.require(
            (1..=40).contains(&mp.lattice),
            "map3d.lattice",
            "1 ≤ lattice ≤ 40",
            mp.lattice,
        )?;
        k.require((1..=200).contains(&mp.q), "map3d.q", "1 ≤ q ≤ 200", mp.q)?;
        let norm = mp.probe.iter().map(|x| x * x).sum::<f64>().sqrt();
        k.require(
            norm.is_finite() && norm > 0.0,
            "map3d.probe",
            "nonzero finite direction",
            format!("{:?}", mp.probe),
        )?;

        let sw = &c.sweep;
        k.require(
            sw.grid[0] >= 2 && sw.grid[1] >= 2,
            "sweep.grid",
            "both counts ≥ 2",
            format!("{:?}", sw.grid),
        )?;
        k.require(
            sw.grid[0] * sw.grid[1] <= 65_536,
            "sweep.grid",
            "at most 65536 cells",
            format!("{:?}", sw.grid),
        )?;
        let su = sw.u_range();
        for (key, r) in [("sweep.mu", sw.mu), ("sweep.u", su), ("sweep.v", sw.v)] {
            k.require(
                r[0].is_finite() && r[1].is_finite(),
                key,
                "finite bounds",
                format!("{r:?}"),
            )?;
        }
        k.require(su[0] >= 0.0 && su[1] >= 0.0, "sweep.u", "u ≥ 0", format!("{su:?}"))?;
        k.require(
            sw.v[0] >= 0.0 && sw.v[1] >= 0.0,
            "sweep.v",
            "v ≥ 0",
            format!("{:?}", sw.v),
        )?;
        let sweep_n = match sw.mode {
            SweepMode::MuU => nmax,
            SweepMode::Disorder => ch.sites,
        };
        let sweep_dim = capped_dimension(ch.sites, sweep_n, sweep_n);
        if c.module == Some(Module::Phasediagram) {
            k.require(
                sweep_dim <= MAX_DIM,
                "chain.sites",
                &format!("ED dimension C(N+M-1, N) ≤ {MAX_DIM}"),
                format!("{} with N = {sweep_n} gives dimension {sweep_dim}", ch.sites),
            )?;
        }

        let q = &c.quads;
        k.require(
            q.u[0].is_finite() && q.u[1].is_finite() && q.u[0] >= 0.0 && q.u[1] >= 0.0,
            "quads.u",
            "u ≥ 0",
            format!("{:?}", q.u),
        )?;
        k.require(q.count >= 2, "quads.count", "count ≥ 2", q.count)?;

        let r = &c.rate;
        k.require(r.omega0.is_finite(), "rate.omega0", "finite", r.omega0)?;
        k.require(
            r.delta_a.is_finite() && r.delta_a != 0.0,
            "rate.delta_a",
            "delta_a ≠ 0",
            r.delta_a,
        )?;
        k.require(
            r.gamma.is_finite() && r.gamma >= 0.0,
            "rate.gamma",
            "gamma ≥ 0",
            r.gamma,
        )?;
        k.require(
            r.sigma2.is_finite() && r.sigma2 >= 0.0,
            "rate.sigma2",
            "sigma2 ≥ 0",
            r.sigma2,
        )?;

        let t = &c.tolerance;
        k.require(t.mf > 0.0 && t.mf <= 1e-10, "tolerance.mf", "0 < mf ≤ 1e-10", t.mf)?;
        k.require(
            t.lanczos > 0.0 && t.lanczos < 1e-3,
            "tolerance.lanczos",
            "0 < lanczos < 1e-3",
            t.lanczos,
        )?;
        k.require(t.krylov >= 4, "tolerance.krylov", "krylov ≥ 4", t.krylov)?;
        k.require(
            t.max_restarts >= 1,
            "tolerance.max_restarts",
            "max_restarts ≥ 1",
            t.max_restarts,
        )?;

        if c.module == Some(Module::Figure) {
            k.require(
                c.figure.is_some(),
                "figure",
                "a figure tag for the figure module",
                "none",
            )?;
        }
        Ok(())
    }
}
