//! Command-line surface: global flags, subcommands and their overrides.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{load_config, FigureTag, GeometryKind, LoadedConfig, Module, Source};
use super::{exit_code, run, EXIT_CONFIG, EXIT_OK};
use crate::ed1d::Boundary;
use crate::error::Error;
use crate::observables::ScanGeometry;
use crate::phasemap::SweepMode;

#[derive(Debug, Parser)]
#[command(
    name = "latscat",
    version,
    about = "Light scattering from ultracold bosons in optical lattices"
)]
pub struct Cli {
    /// TOML run description
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// File name of the primary output inside the output directory
    #[arg(long, global = true, visible_alias = "dump")]
    pub out: Option<String>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wannier orbital, overlap densities and their Fourier transforms
    Wannier(Lattice),
    /// Coupling coefficients of a standing-wave geometry
    Coupling(CouplingArgs),
    /// Gutzwiller mean field, grids and the unit-density path
    Mf(MfArgs),
    /// Exact ground state of a chain
    Ed(ChainArgs),
    /// Angular scan of the quantum addition
    Scan(ScanArgs),
    /// Mean-field angular map over the sphere
    Map3d(Map3dArgs),
    /// Phase maps over (mu, U) or (U, V)
    Phasediagram(PhaseArgs),
    /// Scattered photon rate
    Rate(RateArgs),
    /// Plot-ready panels from earlier outputs
    Figure(FigureArgs),
}

#[derive(Debug, Args, Default)]
pub struct Lattice {
    /// Lattice depth in recoil energies
    #[arg(long)]
    pub depth: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CouplingArgs {
    #[command(flatten)]
    pub lattice: Lattice,
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub k0x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k1x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<f64>,
    /// Illuminated sites K
    #[arg(long)]
    pub sites: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MfArgs {
    #[command(flatten)]
    pub lattice: Lattice,
    /// U / zJ
    #[arg(long)]
    pub u: Option<f64>,
    /// mu / zJ (unit density when omitted)
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// a:b:n grid of U / zJ
    #[arg(long)]
    pub scan_u: Option<String>,
    /// a:b:n grid of mu / zJ
    #[arg(long, allow_hyphen_values = true)]
    pub scan_mu: Option<String>,
    #[arg(long)]
    pub z: Option<usize>,
    /// Illuminated sites K
    #[arg(long)]
    pub sites: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct ChainArgs {
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long)]
    pub bosons: Option<usize>,
    /// U / 2J
    #[arg(long)]
    pub u: Option<f64>,
    /// V / 2J
    #[arg(long)]
    pub v: Option<f64>,
    /// mu / 2J
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    #[arg(long)]
    pub periodic: bool,
    /// Pick N by minimising E(N) - mu N
    #[arg(long)]
    pub grand_canonical: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub source: Option<Source>,
    #[arg(long, value_enum)]
    pub geometry: Option<ScanGeometry>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub points_per_pi: Option<usize>,
    #[arg(long)]
    pub depth: Option<f64>,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Args)]
pub struct Map3dArgs {
    /// U / zJ
    #[arg(long)]
    pub u: Option<f64>,
    /// mu / zJ
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Sites per axis
    #[arg(long)]
    pub lattice: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, value_enum)]
    pub mode: Option<SweepMode>,
    /// Cells as AxB
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long)]
    pub periodic: bool,
    #[arg(long)]
    pub points_per_pi: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_a: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub k_sites: Option<usize>,
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub tag: FigureTag,
}

macro_rules! set {
    ($loaded:ident, $field:expr, $key:literal, $value:expr) => {
        if let Some(v) = $value {
            $field = v;
            $loaded.overridden.insert($key.to_string());
        }
    };
}

fn apply_chain(l: &mut LoadedConfig, a: ChainArgs) {
    set!(l, l.config.chain.sites, "chain.sites", a.sites);
    set!(l, l.config.chain.bosons, "chain.bosons", a.bosons.map(Some));
    set!(l, l.config.chain.u, "chain.u", a.u);
    set!(l, l.config.chain.v, "chain.v", a.v);
    set!(l, l.config.chain.mu, "chain.mu", a.mu);
    set!(l, l.config.chain.ratio, "chain.ratio", a.ratio);
    set!(l, l.config.chain.offset, "chain.offset", a.offset);
    set!(
        l,
        l.config.chain.boundary,
        "chain.boundary",
        a.periodic.then_some(Boundary::Periodic)
    );
    set!(
        l,
        l.config.chain.grand_canonical,
        "chain.grand_canonical",
        a.grand_canonical.then_some(true)
    );
}

fn parse_grid(s: &str) -> Result<[usize; 2], Error> {
    let bad = || Error::Config {
        line: None,
        message: format!("--grid expects AxB, got `{s}`"),
    };
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok([
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ])
}

/// Merges the config file and command-line flags into one run description.
pub fn resolve(cli: Cli) -> Result<LoadedConfig, Error> {
    let mut l = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config {
                line: None,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            load_config(&text)?
        }
        None => LoadedConfig::default(),
    };
    set!(l, l.config.seed, "seed", cli.seed);
    set!(l, l.config.jobs, "jobs", cli.jobs.map(Some));
    set!(l, l.config.out_dir, "out_dir", cli.out_dir);
    set!(l, l.config.out, "out", cli.out.map(Some));
    let Some(command) = cli.command else {
        return Ok(l);
    };
    let module = match &command {
        Command::Wannier(_) => Module::Wannier,
        Command::Coupling(_) => Module::Coupling,
        Command::Mf(_) => Module::Mf,
        Command::Ed(_) => Module::Ed,
        Command::Scan(_) => Module::Scan,
        Command::Map3d(_) => Module::Map3d,
        Command::Phasediagram(_) => Module::Phasediagram,
        Command::Rate(_) => Module::Rate,
        Command::Figure(_) => Module::Figure,
    };
    if let Some(m) = l.config.module.filter(|&m| m != module) {
        return Err(Error::Config {
            line: None,
            message: format!(
                "config module `{}` conflicts with subcommand `{}`",
                m.name(),
                module.name()
            ),
        });
    }
    l.config.module = Some(module);
    match command {
        Command::Wannier(a) => set!(l, l.config.lattice.depth, "lattice.depth", a.depth),
        Command::Coupling(a) => {
            set!(l, l.config.lattice.depth, "lattice.depth", a.lattice.depth);
            set!(l, l.config.geometry.kind, "geometry.kind", a.geometry);
            set!(l, l.config.geometry.k0x, "geometry.k0x", a.k0x);
            set!(l, l.config.geometry.k1x, "geometry.k1x", a.k1x);
            set!(l, l.config.geometry.phi0, "geometry.phi0", a.phi0);
            set!(l, l.config.geometry.phi1, "geometry.phi1", a.phi1);
            set!(l, l.config.geometry.sites, "geometry.sites", a.sites);
        }
        Command::Mf(a) => {
            set!(l, l.config.lattice.depth, "lattice.depth", a.lattice.depth);
            set!(l, l.config.mf.u, "mf.u", a.u);
            set!(l, l.config.mf.mu, "mf.mu", a.mu.map(Some));
            set!(l, l.config.mf.scan_u, "mf.scan_u", a.scan_u.map(Some));
            set!(l, l.config.mf.scan_mu, "mf.scan_mu", a.scan_mu.map(Some));
            set!(l, l.config.mf.z, "mf.z", a.z);
            set!(l, l.config.geometry.sites, "geometry.sites", a.sites);
        }
        Command::Ed(a) => apply_chain(&mut l, a),
        Command::Scan(a) => {
            set!(l, l.config.scan.source, "scan.source", a.source);
            set!(l, l.config.scan.geometry, "scan.geometry", a.geometry);
            set!(l, l.config.scan.theta0, "scan.theta0", a.theta0);
            set!(l, l.config.scan.points_per_pi, "scan.points_per_pi", a.points_per_pi);
            set!(l, l.config.lattice.depth, "lattice.depth", a.depth);
            if l.config.scan.source == Source::Mf {
                let (u, mu) = (a.chain.u, a.chain.mu);
                set!(l, l.config.mf.u, "mf.u", u);
                set!(l, l.config.mf.mu, "mf.mu", mu.map(Some));
                apply_chain(
                    &mut l,
                    ChainArgs {
                        u: None,
                        mu: None,
                        ..a.chain
                    },
                );
            } else {
                apply_chain(&mut l, a.chain);
            }
        }
        Command::Map3d(a) => {
            set!(l, l.config.mf.u, "mf.u", a.u);
            set!(l, l.config.mf.mu, "mf.mu", a.mu.map(Some));
            set!(l, l.config.map3d.lattice, "map3d.lattice", a.lattice);
            set!(l, l.config.map3d.q, "map3d.q", a.q);
        }
        Command::Phasediagram(a) => {
            set!(l, l.config.sweep.mode, "sweep.mode", a.mode);
            let grid = a.grid.as_deref().map(parse_grid).transpose()?;
            set!(l, l.config.sweep.grid, "sweep.grid", grid);
            set!(l, l.config.chain.sites, "chain.sites", a.sites);
            set!(
                l,
                l.config.chain.boundary,
                "chain.boundary",
                a.periodic.then_some(Boundary::Periodic)
            );
            set!(l, l.config.scan.points_per_pi, "scan.points_per_pi", a.points_per_pi);
        }
        Command::Rate(a) => {
            set!(l, l.config.rate.omega0, "rate.omega0", a.omega0);
            set!(l, l.config.rate.delta_a, "rate.delta_a", a.delta_a);
            set!(l, l.config.rate.gamma, "rate.gamma", a.gamma);
            set!(l, l.config.rate.k_sites, "rate.k_sites", a.k_sites);
            set!(l, l.config.rate.sigma2, "rate.sigma2", a.sigma2);
        }
        Command::Figure(a) => set!(l, l.config.figure, "figure", Some(Some(a.tag))),
    }
    Ok(l)
}

/// Parses arguments, runs, reports to stderr and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = resolve(cli).and_then(|l| run(&l));
    match outcome {
        Ok(report) => {
            for p in &report.written {
                log::info!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
