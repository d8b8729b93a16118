//! Configuration, run orchestration and deterministic on-disk output.

mod args;
pub mod commands;
pub mod config;
pub mod figure;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

pub use args::{main_with_args, Cli};
pub use config::{load_config, parse_config, FigureTag, LoadedConfig, Module, RunConfig};
pub use figure::emit_figure_data;
pub use output::{write_atomically, Artifact, Manifest};

use crate::error::{Error, Result};

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Exit status for invalid input.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status for a numerical failure.
pub const EXIT_NUMERICAL: u8 = 3;

pub fn exit_code(err: &Error) -> u8 {
    if err.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub written: Vec<PathBuf>,
    pub manifest: Manifest,
}

fn compute(cfg: &RunConfig, module: Module) -> Result<commands::Outputs> {
    match module {
        Module::Wannier => commands::wannier(cfg),
        Module::Coupling => commands::coupling(cfg),
        Module::Mf => commands::mf(cfg),
        Module::Ed => commands::ed(cfg),
        Module::Scan => commands::scan(cfg),
        Module::Map3d => commands::map3d(cfg),
        Module::Phasediagram => commands::phasediagram(cfg),
        Module::Rate => commands::rate(cfg),
        Module::Figure => {
            let tag = cfg.figure.ok_or_else(|| Error::Config {
                line: None,
                message: "figure module needs a tag".into(),
            })?;
            Ok(commands::Outputs {
                artifacts: figure::emit_figure_data(&cfg.out_dir, tag)?,
                ..Default::default()
            })
        }
    }
}

/// Validates, computes every artifact in memory, then writes them and the
/// manifest atomically into `out_dir`.
pub fn run(loaded: &LoadedConfig) -> Result<RunReport> {
    loaded.validate()?;
    let cfg = &loaded.config;
    let module = cfg.module.ok_or_else(|| Error::Config {
        line: None,
        message: "no subcommand given and no `module` in the config".into(),
    })?;
    let command = match (module, cfg.figure) {
        (Module::Figure, Some(tag)) => format!("figure_{}", tag.name()),
        _ => module.name().to_string(),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Error::Config {
        line: None,
        message: format!("cannot start {:?} worker threads: {e}", cfg.jobs),
    })?;
    let start = Instant::now();
    let outputs = pool.install(|| compute(cfg, module))?;
    let canonical = serde_json::to_vec(cfg)?;
    let manifest = Manifest {
        command: command.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: output::sha256_hex(&canonical),
        seed: cfg.seed,
        jobs: pool.current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        caveat: outputs.caveat,
        notes: outputs.notes,
        files: Manifest::entries(&outputs.artifacts),
    };
    let mut all = outputs.artifacts;
    all.push(Artifact::json(Manifest::file_name(&command), &manifest)?);
    let written = write_atomically(&cfg.out_dir, &all)?;
    Ok(RunReport {
        command,
        written,
        manifest,
    })
}
