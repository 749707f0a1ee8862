//! `slicelab`: dataset tiling, the collaboration server, offline reconstruction and the
//! traffic simulator.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use slicelab_core::collab::{label_file_stem, ServerConfig};
use slicelab_core::geometry::{obj_string, reconstruct_volume, Contour};
use slicelab_core::sim::{simulate, SimConfig};
use slicelab_core::tiler::{ingest_dataset, IngestConfig, DEFAULT_TILE_SIZE};

#[derive(Parser)]
#[command(name = "slicelab", version, about = "Collaborative cross-sectional anatomy lab tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a directory of slice images into a tile pyramid.
    Tile(TileArgs),
    /// Run the collaboration server and tile service.
    Serve(ServeArgs),
    /// Reconstruct meshes from a contour JSON stack, offline.
    Reconstruct(ReconstructArgs),
    /// Measure server egress for synthetic clients and print CSV.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct TileArgs {
    /// Directory of slice images, taken in natural filename order.
    source: PathBuf,
    /// mm per pixel.
    #[arg(long)]
    pixel_spacing: f64,
    /// mm between slices.
    #[arg(long)]
    slice_spacing: f64,
    /// Dataset root; the pyramid is written to `<output>/<id>`.
    #[arg(short, long, default_value = "datasets")]
    output: PathBuf,
    /// Dataset id, defaulting to the source directory name.
    #[arg(long)]
    id: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TILE_SIZE, value_parser = clap::value_parser!(u32).range(1..))]
    tile_size: u32,
    /// Abort if more than this many MiB of decoded pixels would be resident.
    #[arg(long)]
    memory_budget_mib: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    /// `key = value` file with listen, store_dir, dataset_root, palette_size, debounce_ms.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    listen: Option<String>,
    #[arg(long)]
    store_dir: Option<PathBuf>,
    #[arg(long)]
    dataset_root: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// JSON array of contours, or `{"slice_spacing": mm, "contours": [...]}`.
    input: PathBuf,
    /// OBJ output. With several structures each goes to `<stem>_<structure>.obj`.
    #[arg(short, long)]
    output: PathBuf,
    /// mm between slices; overrides the input file.
    #[arg(long)]
    slice_spacing: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Client counts, comma separated.
    #[arg(short = 'n', long = "clients", value_delimiter = ',', required = true,
          value_parser = clap::value_parser!(u64).range(1..))]
    clients: Vec<u64>,
    /// Messages per second per client.
    #[arg(long, default_value_t = 10.0)]
    rate: f64,
    /// Simulated seconds per run.
    #[arg(long, default_value_t = 10.0)]
    secs: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let result = match cli.command {
        Command::Tile(a) => tile(a),
        Command::Serve(a) => serve(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Simulate(a) => simulate_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn tile(a: TileArgs) -> Result<()> {
    let mut cfg = IngestConfig::new(&a.source, &a.output);
    cfg.dataset_id = a.id;
    cfg.pixel_spacing = a.pixel_spacing;
    cfg.slice_spacing = a.slice_spacing;
    cfg.tile_size = a.tile_size;
    cfg.memory_budget = a.memory_budget_mib.map(|m| m << 20);
    let report = ingest_dataset(&cfg)?;
    println!("{}", report.manifest.to_json());
    eprintln!(
        "wrote {} tiles to {} (peak {} bytes resident)",
        report.tiles_written,
        report.dataset_dir.display(),
        report.peak_resident_bytes
    );
    Ok(())
}

fn server_config(a: &ServeArgs) -> Result<ServerConfig> {
    let mut cfg = ServerConfig::default();
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_file(&text).with_context(|| format!("in {}", path.display()))?;
    }
    cfg.apply_env(std::env::vars())?;
    if let Some(v) = &a.listen {
        cfg.set("listen", v)?;
    }
    if let Some(v) = &a.store_dir {
        cfg.store_dir = v.clone();
    }
    if let Some(v) = &a.dataset_root {
        cfg.dataset_root = v.clone();
    }
    Ok(cfg)
}

fn serve(a: ServeArgs) -> Result<()> {
    let cfg = server_config(&a)?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(slicelab_server::run(&cfg, async {
        let _ = tokio::signal::ctrl_c().await;
    }))
}

fn read_stack(path: &Path) -> Result<(Vec<Contour>, Option<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (items, spacing) = match &doc {
        Value::Array(items) => (items.clone(), None),
        Value::Object(o) => {
            let items = o.get("contours").and_then(Value::as_array).context("expected a \"contours\" array")?;
            (items.clone(), o.get("slice_spacing").and_then(Value::as_f64))
        }
        _ => bail!("expected a contour array or an object with \"contours\""),
    };
    let contours = items
        .iter()
        .enumerate()
        .map(|(i, v)| Contour::from_json(&v.to_string()).with_context(|| format!("contour {i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok((contours, spacing))
}

fn reconstruct(a: ReconstructArgs) -> Result<()> {
    let (contours, file_spacing) = read_stack(&a.input)?;
    let spacing = a.slice_spacing.or(file_spacing).unwrap_or(1.0);
    let mut by_label: BTreeMap<String, Vec<Contour>> = BTreeMap::new();
    for c in contours {
        by_label.entry(c.structure_label.clone()).or_default().push(c);
    }
    if by_label.is_empty() {
        bail!("{} holds no contours", a.input.display());
    }
    let single = by_label.len() == 1;
    let mut reports = Vec::new();
    for (label, stack) in &by_label {
        let rec = reconstruct_volume(stack, spacing).with_context(|| format!("structure {label:?}"))?;
        let path = if single {
            a.output.clone()
        } else {
            let stem = a.output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            a.output.with_file_name(format!("{stem}_{}.obj", label_file_stem(label)))
        };
        fs::write(&path, obj_string(&rec.mesh)).with_context(|| format!("writing {}", path.display()))?;
        reports.push(json!({
            "structure": label,
            "output": path,
            "stats": rec.stats,
            "warnings": rec.warnings,
        }));
    }
    println!("{}", serde_json::to_string_pretty(&json!({ "slice_spacing": spacing, "structures": reports }))?);
    Ok(())
}

fn simulate_cmd(a: SimulateArgs) -> Result<()> {
    let cfg = SimConfig {
        client_counts: a.clients.iter().map(|&n| n as usize).collect(),
        rate: a.rate,
        duration_secs: a.secs,
        seed: a.seed,
    };
    let report = simulate(&cfg)?;
    let csv = report.to_csv();
    match &a.output {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    eprintln!(
        "egress msgs/s = {:.3} * n + {:.3} (R^2 = {:.6})",
        report.slope, report.intercept, report.r_squared
    );
    Ok(())
}
