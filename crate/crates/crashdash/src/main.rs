use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crashdash::boundaries::boundaries_to_geojson;
use crashdash::config::Config;
use crashdash::query::{self, Params, QueryResult};
use crashdash::report::{self, Format};
use crashdash::service::{self, AppState};
use crashdash::store::{self, InputPaths};
use crashdash::{hotspot_export, synth_io};
use crashdash_core::synth::calibration::{calibrated_spec, tribal_seed_records, wisconsin_tribes};
use crashdash_core::{generate, DatasetSnapshot, SynthSpec};

#[derive(Parser)]
#[command(name = "crashdash", version, about = "Crash-safety analytics for tribal lands")]
struct Cli {
    /// TOML config file; environment variables override it.
    #[arg(long, global = true, env = "CRASHDASH_CONFIG")]
    config: Option<PathBuf>,
    /// Snapshot directory (overrides config and DATA_DIR).
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the input files, assign tribes and persist a snapshot.
    Ingest {
        #[arg(long)]
        crashes: PathBuf,
        #[arg(long)]
        persons: PathBuf,
        #[arg(long)]
        boundaries: PathBuf,
        /// Fixed ingestion timestamp; defaults to now.
        #[arg(long)]
        ingested_at: Option<String>,
    },
    /// Run a query against the stored snapshot and print it.
    Report {
        #[arg(value_parser = query::QUERY_KINDS)]
        kind: String,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
        #[command(flatten)]
        params: QueryArgs,
    },
    /// Hotspot grid as GeoJSON, optionally also as CSV.
    Hotspots {
        /// GeoJSON output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        params: QueryArgs,
    },
    /// Write synthetic crash, person and boundary files.
    Synth {
        /// JSON generator spec; overrides --seed/--n/--preset.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Preset::Calibrated)]
        preset: Preset,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        /// Listen address (overrides config and LISTEN_ADDR).
        #[arg(long)]
        listen: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Calibrated,
    TribalSeed,
}

/// Query parameters, spelled as on the HTTP API.
#[derive(Args, Default)]
struct QueryArgs {
    #[arg(long)]
    scope: Option<String>,
    #[arg(long)]
    year_from: Option<String>,
    #[arg(long)]
    year_to: Option<String>,
    #[arg(long)]
    tribe_id: Option<String>,
    #[arg(long)]
    severity_group: Option<String>,
    #[arg(long)]
    urban_rural: Option<String>,
    #[arg(long)]
    road_class: Option<String>,
    #[arg(long)]
    key_factor: Option<String>,
    /// min_lon,min_lat,max_lon,max_lat
    #[arg(long, allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long)]
    crash_type: Option<String>,
    #[arg(long)]
    dimension: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    cell: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    cursor: Option<String>,
    #[arg(long)]
    limit: Option<String>,
}

impl QueryArgs {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let all = [
            ("scope", &self.scope),
            ("year_from", &self.year_from),
            ("year_to", &self.year_to),
            ("tribe_id", &self.tribe_id),
            ("severity_group", &self.severity_group),
            ("urban_rural", &self.urban_rural),
            ("road_class", &self.road_class),
            ("key_factor", &self.key_factor),
            ("bbox", &self.bbox),
            ("crash_type", &self.crash_type),
            ("dimension", &self.dimension),
            ("weight", &self.weight),
            ("n", &self.n),
            ("cell", &self.cell),
            ("radius", &self.radius),
            ("cursor", &self.cursor),
            ("limit", &self.limit),
        ];
        all.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect()
    }
}

/// Failure carrying its exit status.
struct Exit(u8, anyhow::Error);

fn fatal(e: anyhow::Error) -> Exit {
    Exit(2, e)
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = Config::from_env(cli.config.as_deref())?;
    if let Some(dir) = &cli.data_dir {
        config.data_dir = dir.clone();
    }
    Ok(config)
}

fn stored_snapshot(config: &Config) -> Result<DatasetSnapshot> {
    store::load(&config.data_dir)?
        .ok_or_else(|| anyhow!("no snapshot in {}; run `crashdash ingest` first", config.data_dir.display()))
}

fn run_query(config: &Config, kind: &str, args: &QueryArgs) -> Result<query::Envelope<QueryResult>, Exit> {
    let snapshot = stored_snapshot(config).map_err(fatal)?;
    let params = Params::from_pairs(args.pairs()).map_err(|e| fatal(e.into()))?;
    query::run(kind, params, &snapshot, &config.defaults()).map_err(|e| fatal(e.into()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn ingest(config: &Config, paths: InputPaths, ingested_at: Option<String>) -> Result<(), Exit> {
    let at = ingested_at.unwrap_or_else(store::now_rfc3339);
    let (snapshot, report) = store::build_from_paths(&paths, &config.schema, &at).map_err(|e| fatal(e.into()))?;
    store::save(&config.data_dir, &snapshot, &report).map_err(|e| fatal(e.into()))?;
    for r in &report.rejected {
        eprintln!("rejected row {}: {}: {}", r.row, r.field, r.message);
    }
    for row in &report.orphan_person_rows {
        eprintln!("person row {row} has no matching crash");
    }
    println!("snapshot_id: {}", snapshot.snapshot_id());
    println!("accepted: {}", report.accepted_count);
    println!("rejected: {}", report.rejected.len());
    println!("tribal: {}", snapshot.tribal_count());
    println!("conflicts: {}", snapshot.conflict_count());
    println!("source_digest: {}", report.source_digest);
    if report.rejected.is_empty() {
        Ok(())
    } else {
        Err(Exit(1, anyhow!("{} rows rejected", report.rejected.len())))
    }
}

fn synth(spec: Option<PathBuf>, seed: u64, n: usize, preset: Preset, out_dir: &Path, config: &Config) -> Result<()> {
    let tribes = wisconsin_tribes();
    let records = match (spec, preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
            let spec: SynthSpec = serde_json::from_str(&text).with_context(|| format!("invalid spec {}", path.display()))?;
            generate(&spec, &tribes)?
        }
        (None, Preset::Calibrated) => generate(&calibrated_spec(seed, n), &tribes)?,
        (None, Preset::TribalSeed) => tribal_seed_records(),
    };
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    write_file(&out_dir.join("crashes.csv"), &synth_io::crash_csv(&records, &config.schema))?;
    write_file(&out_dir.join("persons.csv"), &synth_io::person_csv(&records, &config.schema))?;
    let mut geojson = serde_json::to_string_pretty(&boundaries_to_geojson(&tribes))?;
    geojson.push('\n');
    write_file(&out_dir.join("boundaries.geojson"), geojson.as_bytes())?;
    eprintln!("wrote {} crashes to {}", records.len(), out_dir.display());
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

fn serve(mut config: Config, listen: Option<String>) -> Result<()> {
    if let Some(addr) = listen {
        config.listen_addr = addr;
    }
    let snapshot = store::load(&config.data_dir)?;
    if snapshot.is_none() {
        tracing::warn!(data_dir = %config.data_dir.display(), "no snapshot yet; queries return 503 until a reload");
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&config.listen_addr)
            .await
            .with_context(|| format!("cannot listen on {}", config.listen_addr))?;
        service::serve(listener, AppState::new(config, snapshot), shutdown_signal()).await?;
        Ok(())
    })
}

fn dispatch(cli: Cli) -> Result<(), Exit> {
    let config = load_config(&cli).map_err(fatal)?;
    match cli.command {
        Command::Ingest { crashes, persons, boundaries, ingested_at } => {
            ingest(&config, InputPaths { crashes, persons, boundaries }, ingested_at)
        }
        Command::Report { kind, format, params } => {
            let envelope = run_query(&config, &kind, &params)?;
            let format = match format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            };
            print!("{}", report::render(&envelope, format));
            Ok(())
        }
        Command::Hotspots { out, csv, params } => {
            let envelope = run_query(&config, "hotspots", &params)?;
            let QueryResult::Hotspots(grid) = &envelope.result else {
                return Err(fatal(anyhow!("hotspot query returned another result")));
            };
            let mut geojson = serde_json::to_string(&hotspot_export::to_geojson(grid)).map_err(|e| fatal(e.into()))?;
            geojson.push('\n');
            match out {
                Some(path) => write_file(&path, geojson.as_bytes()).map_err(fatal)?,
                None => print!("{geojson}"),
            }
            if let Some(path) = csv {
                write_file(&path, hotspot_export::to_csv(grid).as_bytes()).map_err(fatal)?;
            }
            for w in &grid.warnings {
                eprintln!("warning: {w:?}");
            }
            Ok(())
        }
        Command::Synth { spec, seed, n, preset, out_dir } => {
            synth(spec, seed, n, preset, &out_dir, &config).map_err(fatal)
        }
        Command::Serve { listen } => serve(config, listen).map_err(fatal),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
