use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use hri_affect::error::{ConfigError, RunError};
use hri_affect::scenario::run_scenario;
use hri_affect::Setup;

/// Could not bind or run the session server.
const EXIT_SERVE: u8 = 7;

#[derive(Parser)]
#[command(
    name = "hri-affect",
    version,
    about = "Deterministic emotion appraisal engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario file and write a CSV trace.
    Run {
        scenario: PathBuf,
        /// Engine config; the bundled defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's behavior-selection seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Accept a sector table that differs from the reference one.
        #[arg(long)]
        allow_modified_sectors: bool,
    },
    /// Run a live session and serve it over WebSocket at /ws.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8765")]
        bind: SocketAddr,
        /// On Ctrl-C, write everything injected as a replayable scenario file.
        #[arg(long)]
        record: Option<PathBuf>,
        #[arg(long)]
        allow_modified_sectors: bool,
    },
    /// Load a config and every data file it references, then report.
    Validate {
        config: PathBuf,
        #[arg(long)]
        allow_modified_sectors: bool,
    },
}

fn fail(err: &dyn std::fmt::Display, code: i32) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code as u8)
}

fn load(config: Option<&Path>, allow_modified: bool) -> Result<Setup, ConfigError> {
    match config {
        Some(p) => Setup::load_with(p, allow_modified),
        None => Setup::from_config(
            hri_affect::EngineConfig {
                allow_modified_sectors: allow_modified,
                ..Default::default()
            },
            Path::new("."),
        ),
    }
}

fn config_failure(e: ConfigError) -> ExitCode {
    let err = RunError::Config(e);
    fail(&err, err.exit_code())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_target(false)
        .init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            config,
            out,
            seed,
            allow_modified_sectors,
        } => match run_scenario(
            &scenario,
            config.as_deref(),
            &out,
            seed,
            allow_modified_sectors,
        ) {
            Ok(ticks) => {
                eprintln!("wrote {ticks} ticks to {}", out.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e, e.exit_code()),
        },
        Command::Validate {
            config,
            allow_modified_sectors,
        } => match Setup::load_with(&config, allow_modified_sectors) {
            Ok(setup) => {
                println!("ok: {}", config.display());
                println!(
                    "  tick_hz {} seed {}",
                    setup.config.tick_hz, setup.config.seed
                );
                println!(
                    "  {} percept catalog entries",
                    setup.percepts.entries().len()
                );
                println!("  {} motives", setup.motives.params().len());
                println!("  sectors digest {}", setup.sectors_digest);
                ExitCode::SUCCESS
            }
            Err(e) => config_failure(e),
        },
        Command::Serve {
            config,
            bind,
            record,
            allow_modified_sectors,
        } => {
            let setup = match load(config.as_deref(), allow_modified_sectors) {
                Ok(s) => s,
                Err(e) => return config_failure(e),
            };
            serve(setup, bind, record)
        }
    }
}

fn serve(setup: Setup, bind: SocketAddr, record: Option<PathBuf>) -> ExitCode {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .expect("tokio runtime");
    rt.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(bind).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind {bind}: {e}");
                return ExitCode::from(EXIT_SERVE);
            }
        };
        let handle = match hri_affect_server::start(Arc::new(setup), listener).await {
            Ok(h) => h,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_SERVE);
            }
        };
        // Parsed by scripts (and the tests) to find an ephemeral port.
        println!("listening on ws://{}/ws", handle.local_addr());
        if let Err(e) = tokio::signal::ctrl_c().await {
            tracing::error!("cannot wait for Ctrl-C: {e}");
        }
        let session = handle.shutdown().await;
        tracing::info!(ticks = session.engine().tick(), "session stopped");
        if let Some(path) = record {
            if let Err(e) = std::fs::write(&path, session.injection_log().to_json()) {
                let err = RunError::Output { path, source: e };
                return fail(&err, err.exit_code());
            }
        }
        ExitCode::SUCCESS
    })
}
