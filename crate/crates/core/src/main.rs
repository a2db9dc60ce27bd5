//! Command-line front end: generation jobs, random batches, expressive-range
//! analysis and SVG previews.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use roundabout::config::{JobConfig, Mode};
use roundabout::era::{
    self, era_batch, instance_row, radius_derivative, radius_series, random_road_defs,
    ring_center_estimate, series_csv, BatchInstance, BatchMode, BatchOptions, InstanceRow,
};
use roundabout::error::Error;
use roundabout::odr::{emit_opendrive, parse_opendrive};
use roundabout::svg::{render_svg, superposition_svg, svg_string};
use roundabout::{
    generate_classic, generate_turbo, validate_links, GenerationParams, Point, RoadNetwork,
    TurboParams,
};

const SEED_ENV: &str = "ROUNDABOUT_SEED";

#[derive(Parser)]
#[command(
    name = "roundabout",
    version,
    about = "Generate classic and turbo roundabout road networks as OpenDRIVE"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Classic,
    Turbo,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Classic => Mode::Classic,
            ModeArg::Turbo => Mode::Turbo,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate one roundabout from a JSON job config
    Generate {
        /// Job config path (mode, defs, params, outputs)
        #[arg(long)]
        config: PathBuf,
        /// Seed override (flag > ROUNDABOUT_SEED > config > 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured .xodr output path
        #[arg(long)]
        xodr: Option<PathBuf>,
        /// Override the configured .svg output path
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Generate a numbered batch of random roundabouts plus a seed manifest
    Random {
        /// Number of incident roads per roundabout
        #[arg(long)]
        ways: usize,
        /// Number of roundabouts
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Classic)]
        mode: ModeArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Measure radius and derivative distributions of networks
    Era {
        /// Existing .xodr files to analyze
        inputs: Vec<PathBuf>,
        /// Generate a random batch instead of reading files
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 3)]
        ways: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Classic)]
        mode: ModeArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Arc-length sampling step in meters
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Also write the normalized-ring superposition SVG
        #[arg(long)]
        svg: bool,
    },
    /// Render an OpenDRIVE file as an SVG preview
    Preview {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Infeasible(_) => 3,
            Error::Validation(_) => 4,
            Error::Io { .. } => 1,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            config,
            seed,
            xodr,
            svg,
        } => run_generate(&config, seed, xodr, svg),
        Command::Random {
            ways,
            count,
            mode,
            seed,
            out_dir,
        } => run_random(ways, count, mode.into(), resolve_seed(seed, None)?, &out_dir),
        Command::Era {
            inputs,
            random,
            ways,
            count,
            mode,
            seed,
            out_dir,
            step,
            svg,
        } => run_era(
            &inputs,
            random,
            ways,
            count,
            mode.into(),
            resolve_seed(seed, None)?,
            &out_dir,
            step,
            svg,
        ),
        Command::Preview { input, out } => run_preview(&input, &out),
    }
}

// flag > environment > config > fixed default 0
fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(raw) = std::env::var(SEED_ENV) {
        return raw.parse::<u64>().map_err(|_| {
            Failure::new(2, format!("{SEED_ENV} must be an unsigned integer, got '{raw}'"))
        });
    }
    Ok(config.unwrap_or(0))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|source| Error::Io {
                    path: parent.to_path_buf(),
                    source,
                })
                .map_err(Failure::from)?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
        .map_err(Failure::from)
}

fn generate_with_mode(
    mode: Mode,
    defs: &[roundabout::IncidentRoadDefinition],
    params: GenerationParams,
    translation: Option<f64>,
) -> Result<RoadNetwork, Error> {
    match mode {
        Mode::Classic => generate_classic(defs, &params),
        Mode::Turbo => generate_turbo(
            defs,
            &TurboParams {
                base: params,
                translation_distance: translation,
            },
        ),
    }
}

fn run_generate(
    config_path: &Path,
    seed_flag: Option<u64>,
    xodr_override: Option<PathBuf>,
    svg_override: Option<PathBuf>,
) -> Result<(), Failure> {
    let config = JobConfig::load(config_path)?;
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let defs = config.resolve_defs(base_dir)?;
    if defs.len() < 3 {
        return Err(Failure::new(
            2,
            format!(
                "at least 3 incident road definitions are required, got {}",
                defs.len()
            ),
        ));
    }
    let seed = resolve_seed(seed_flag, config.seed)?;
    let net = generate_with_mode(
        config.mode,
        &defs,
        config.generation_params(seed),
        config.params.translation_distance,
    )?;

    let xodr_path = xodr_override.unwrap_or_else(|| config.output.xodr.clone());
    write_file(&xodr_path, &emit_opendrive(&net)?)?;
    println!("wrote {}", xodr_path.display());

    if let Some(svg_path) = svg_override.or_else(|| config.output.svg.clone()) {
        write_file(&svg_path, &svg_string(&net)?)?;
        println!("wrote {}", svg_path.display());
    }

    let violations = validate_links(&net);
    println!(
        "{} roads, {} junctions, {} validation violations",
        net.roads.len(),
        net.junctions.len(),
        violations.len()
    );
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(4, "validation failed after generation"))
    }
}

fn instance_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..count).map(|_| rng.gen()).collect()
}

#[derive(Serialize)]
struct ManifestInstance {
    index: usize,
    file: String,
    seed: u64,
    status: String,
}

#[derive(Serialize)]
struct Manifest {
    mode: String,
    ways: usize,
    count: usize,
    master_seed: u64,
    instances: Vec<ManifestInstance>,
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Classic => "classic",
        Mode::Turbo => "turbo",
    }
}

fn run_random(
    ways: usize,
    count: usize,
    mode: Mode,
    master_seed: u64,
    out_dir: &Path,
) -> Result<(), Failure> {
    if ways < 3 {
        return Err(Failure::new(
            2,
            format!("at least 3 incident roads are required, got {ways}"),
        ));
    }
    if count < 1 {
        return Err(Failure::new(2, format!("count must be at least 1, got {count}")));
    }
    let seeds = instance_seeds(master_seed, count);
    let mut instances = Vec::with_capacity(count);
    let mut failed = 0usize;
    for (i, &seed) in seeds.iter().enumerate() {
        let file = format!("roundabout_{i:03}.xodr");
        let status = (|| -> Result<(), Error> {
            let defs = random_road_defs(ways, seed, era::DEFAULT_INPUT_RADIUS_RANGE)?;
            let params = GenerationParams {
                seed,
                ..Default::default()
            };
            let net = generate_with_mode(mode, &defs, params, None)?;
            let xml = emit_opendrive(&net)?;
            write_file(&out_dir.join(&file), &xml).map_err(|f| Error::InvalidParams(f.message))?;
            Ok(())
        })();
        let status = match status {
            Ok(()) => "ok".to_string(),
            Err(e) => {
                failed += 1;
                eprintln!("instance {i}: {e}");
                format!("failed: {e}")
            }
        };
        instances.push(ManifestInstance {
            index: i,
            file,
            seed,
            status,
        });
    }
    let manifest = Manifest {
        mode: mode_name(mode).to_string(),
        ways,
        count,
        master_seed,
        instances,
    };
    write_file(
        &out_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).expect("manifest serialization cannot fail"),
    )?;
    println!(
        "generated {}/{count} roundabouts in {}",
        count - failed,
        out_dir.display()
    );
    if failed > 0 {
        Err(Failure::new(3, format!("{failed} instances failed")))
    } else {
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn run_era(
    inputs: &[PathBuf],
    random: bool,
    ways: usize,
    count: usize,
    mode: Mode,
    seed: u64,
    out_dir: &Path,
    step: f64,
    with_svg: bool,
) -> Result<(), Failure> {
    if !(step > 0.0) {
        return Err(Failure::new(2, format!("step must be positive, got {step}")));
    }
    if inputs.is_empty() && !random {
        return Err(Failure::new(
            2,
            "nothing to analyze: pass .xodr files or --random",
        ));
    }

    let mut rows: Vec<InstanceRow> = Vec::new();
    let mut failures: Vec<(String, String)> = Vec::new();
    let mut series_files: Vec<(String, String)> = Vec::new();
    let mut rings: Vec<(String, Vec<Point>)> = Vec::new();

    if random {
        if ways < 3 {
            return Err(Failure::new(
                2,
                format!("at least 3 incident roads are required, got {ways}"),
            ));
        }
        let seeds = instance_seeds(seed, count);
        let mut instances = Vec::with_capacity(count);
        for (i, &instance_seed) in seeds.iter().enumerate() {
            match random_road_defs(ways, instance_seed, era::DEFAULT_INPUT_RADIUS_RANGE) {
                Ok(defs) => instances.push(BatchInstance {
                    id: format!("random-{i:03}"),
                    n_ways: ways,
                    seed: instance_seed,
                    defs,
                }),
                Err(e) => failures.push((format!("random-{i:03}"), e.to_string())),
            }
        }
        let options = BatchOptions {
            mode: match mode {
                Mode::Classic => BatchMode::Classic,
                Mode::Turbo => BatchMode::Turbo,
            },
            step,
            ..Default::default()
        };
        let report = era_batch(&instances, &options);
        for f in &report.failures {
            failures.push((f.instance_id.clone(), f.message.clone()));
        }
        for s in &report.series {
            series_files.push((s.id.clone(), series_csv(&s.series, &s.derivative)));
            rings.push((s.id.clone(), normalized_ring(&s.series)));
        }
        rows.extend(report.rows);
    }

    for path in inputs {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        match analyze_file(path, step) {
            Ok((row, series, derivative)) => {
                series_files.push((id.clone(), series_csv(&series, &derivative)));
                rings.push((id, normalized_ring(&series)));
                rows.push(row);
            }
            Err(e) => failures.push((id, e.to_string())),
        }
    }

    // deterministic report assembly regardless of input order quirks
    rows.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    series_files.sort_by(|a, b| a.0.cmp(&b.0));
    rings.sort_by(|a, b| a.0.cmp(&b.0));
    failures.sort();

    let mut csv = String::from(
        "instance_id,n_ways,mean_radius,std_radius,skew,excess_kurtosis,deriv_mean,deriv_kurtosis\n",
    );
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            r.instance_id,
            r.n_ways,
            r.mean_radius,
            r.std_radius,
            r.skew,
            r.excess_kurtosis,
            r.deriv_mean,
            r.deriv_kurtosis
        );
    }
    write_file(&out_dir.join("report.csv"), &csv)?;

    #[derive(Serialize)]
    struct FailureView<'a> {
        instance_id: &'a str,
        message: &'a str,
    }
    #[derive(Serialize)]
    struct AggregateView<'a> {
        instances_ok: usize,
        instances_failed: usize,
        median_mean_radius: f64,
        rows: &'a [InstanceRow],
        failures: Vec<FailureView<'a>>,
    }
    let mut means: Vec<f64> = rows.iter().map(|r| r.mean_radius).collect();
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if means.is_empty() {
        0.0
    } else if means.len() % 2 == 1 {
        means[means.len() / 2]
    } else {
        0.5 * (means[means.len() / 2 - 1] + means[means.len() / 2])
    };
    let aggregate = AggregateView {
        instances_ok: rows.len(),
        instances_failed: failures.len(),
        median_mean_radius: median,
        rows: &rows,
        failures: failures
            .iter()
            .map(|(id, msg)| FailureView {
                instance_id: id,
                message: msg,
            })
            .collect(),
    };
    write_file(
        &out_dir.join("aggregate.json"),
        &serde_json::to_string_pretty(&aggregate).expect("aggregate serialization cannot fail"),
    )?;

    let series_dir = out_dir.join("series");
    for (id, contents) in &series_files {
        write_file(&series_dir.join(format!("{id}.csv")), contents)?;
    }
    if with_svg {
        write_file(&out_dir.join("superposition.svg"), &superposition_svg(&rings))?;
    }

    println!(
        "analyzed {} networks ({} failed), reports in {}",
        rows.len(),
        failures.len(),
        out_dir.display()
    );
    for (id, msg) in &failures {
        eprintln!("{id}: {msg}");
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(2, "some inputs could not be analyzed"))
    }
}

fn normalized_ring(series: &roundabout::era::RadiusSeries) -> Vec<Point> {
    let mean: f64 =
        series.samples.iter().map(|&(_, r)| r).sum::<f64>() / series.samples.len().max(1) as f64;
    series
        .samples
        .iter()
        .map(|&(s, r)| {
            let theta = std::f64::consts::TAU * s / series.ring_length;
            Point::new(r / mean * theta.cos(), r / mean * theta.sin())
        })
        .collect()
}

type FileAnalysis = (InstanceRow, roundabout::era::RadiusSeries, Vec<(f64, f64)>);

fn analyze_file(path: &Path, step: f64) -> Result<FileAnalysis, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = parse_opendrive(&text)?;
    for w in &parsed.warnings {
        eprintln!("{}: {w}", path.display());
    }
    let mut net = parsed.network;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    net.name = id.clone();
    let circle = ring_center_estimate(&net)?;
    let series = radius_series(&net, circle.center, step)?;
    let derivative = radius_derivative(&series)?;
    let n_ways = net.junctions.len();
    let row = instance_row(&id, n_ways, &series, &derivative)?;
    Ok((row, series, derivative))
}

fn run_preview(input: &Path, out: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(input).map_err(|source| Error::Io {
        path: input.to_path_buf(),
        source,
    })?;
    let parsed = parse_opendrive(&text)?;
    for w in &parsed.warnings {
        eprintln!("{}: {w}", input.display());
    }
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    render_svg(&parsed.network, out)?;
    println!("wrote {}", out.display());
    Ok(())
}
