//! The `flatdiag` command line.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags, out-of-range
//! values), 2 for I/O and parse errors. Diagnostics go to stderr; data goes to
//! files, or to stdout when no output path (or `-`) is given.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use flatdiag_core::diagram::to_flat;
use flatdiag_core::persistence::{compute_persistence, PersistenceDiagram};
use flatdiag_core::pointcloud::{sample_circle, sample_sphere, DistanceMatrix, PointCloud, DEFAULT_CIRCLE_NOISE_SD};
use flatdiag_core::render::{render_barcode, render_conventional, render_flat, PlotSpec, SvgDocument};
use flatdiag_core::rips::{build_rips_filtration, Threshold};

use crate::formats::{self, DiagramFormat};
use crate::Error;

/// Seeds used by `reproduce-figures` unless overridden.
pub const DEFAULT_CIRCLE_SEED: u64 = 42;
/// See [`DEFAULT_CIRCLE_SEED`].
pub const DEFAULT_SPHERE_SEED: u64 = 12;

#[derive(Debug, Parser)]
#[command(name = "flatdiag", version, about = "Vietoris-Rips persistence with barcodes, persistence diagrams and flat persistence diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a synthetic point cloud and write it as CSV.
    Sample(SampleArgs),
    /// Compute the persistence diagram of a point-cloud CSV.
    Compute(ComputeArgs),
    /// Render a diagram file as SVG.
    Plot(PlotArgs),
    /// Sample, compute and plot in one step.
    Pipeline(PipelineArgs),
    /// Write the circle and sphere figure panels into a directory.
    ReproduceFigures(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Circle,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Style {
    Barcode,
    Diagram,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ShapeArgs {
    /// Which surface to sample.
    #[arg(long, value_enum)]
    shape: Shape,
    /// Number of points.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Radius of the circle or sphere (> 0).
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Standard deviation of the radial noise on the circle (>= 0).
    #[arg(long, default_value_t = DEFAULT_CIRCLE_NOISE_SD)]
    noise_sd: f64,
    /// Seed for the ChaCha8 generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct HomologyArgs {
    /// Highest homology degree to compute [default: 2 for 3-D clouds, else 1].
    #[arg(long)]
    max_hom_dim: Option<usize>,
    /// Largest simplex diameter, or "auto" for the full filtration.
    #[arg(long, default_value = "auto", value_parser = parse_threshold)]
    threshold: Threshold,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Figure type.
    #[arg(long, value_enum, default_value_t = Style::Flat)]
    style: Style,
    /// Draw essential (never-dying) features.
    #[arg(long)]
    include_essential: bool,
    /// Where essential bars are capped, as a multiple of the largest finite value (> 1).
    #[arg(long, default_value_t = 1.1)]
    cap_factor: f64,
    /// Figure width in pixels.
    #[arg(long, default_value_t = 480.0)]
    width: f64,
    /// Figure height in pixels.
    #[arg(long, default_value_t = 480.0)]
    height: f64,
    /// Margin in pixels.
    #[arg(long, default_value_t = 60.0)]
    margin: f64,
    /// Title drawn above the plot.
    #[arg(long)]
    title: Option<String>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Output CSV (stdout when omitted or "-").
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    /// Point-cloud CSV.
    #[arg(short, long)]
    input: PathBuf,
    /// Skip a non-numeric first row of the input.
    #[arg(long)]
    header: bool,
    #[command(flatten)]
    homology: HomologyArgs,
    /// Output diagram (stdout when omitted or "-").
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Output format [default: from the extension, CSV otherwise].
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write the flat diagram as CSV here.
    #[arg(long)]
    flat_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Diagram CSV (or JSON, by extension).
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    render: RenderArgs,
    /// Output SVG (stdout when omitted or "-").
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    homology: HomologyArgs,
    #[command(flatten)]
    render: RenderArgs,
    /// Output SVG (stdout when omitted or "-").
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// Directory for the SVG panels (created if missing).
    #[arg(short, long)]
    output: PathBuf,
    /// Points per cloud.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Radial noise of the circle.
    #[arg(long, default_value_t = DEFAULT_CIRCLE_NOISE_SD)]
    noise_sd: f64,
    /// Seed of the noisy circle.
    #[arg(long, default_value_t = DEFAULT_CIRCLE_SEED)]
    circle_seed: u64,
    /// Seed of the sphere.
    #[arg(long, default_value_t = DEFAULT_SPHERE_SEED)]
    sphere_seed: u64,
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Threshold::Auto);
    }
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 => Ok(Threshold::Value(t)),
        _ => Err(format!("expected \"auto\" or a positive number, got {s:?}")),
    }
}

/// Why a command failed; decides the exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Core(flatdiag_core::Error::InvalidParameter(msg)) => Failure::Usage(msg),
            other => Failure::Data(other),
        }
    }
}

impl From<flatdiag_core::Error> for Failure {
    fn from(e: flatdiag_core::Error) -> Self {
        Error::Core(e).into()
    }
}

fn is_stdout(path: &Option<PathBuf>) -> bool {
    path.as_deref().map_or(true, |p| p == Path::new("-"))
}

fn emit(output: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    if is_stdout(output) {
        let mut out = io::stdout().lock();
        out.write_all(bytes).and_then(|()| out.flush()).map_err(|e| Failure::Data(Error::io("<stdout>", e)))
    } else {
        let path = output.as_deref().expect("checked above");
        fs::write(path, bytes).map_err(|e| Failure::Data(Error::io(path, e)))
    }
}

fn sample(args: &ShapeArgs) -> Result<PointCloud, Failure> {
    Ok(match args.shape {
        Shape::Circle => sample_circle(args.n, args.radius, args.noise_sd, args.seed)?,
        Shape::Sphere => sample_sphere(args.n, args.radius, args.seed)?,
    })
}

fn persistence(cloud: &PointCloud, args: &HomologyArgs) -> Result<PersistenceDiagram, Failure> {
    let degree = args.max_hom_dim.unwrap_or(if cloud.ambient_dim() == 3 { 2 } else { 1 });
    let dm = DistanceMatrix::from_cloud(cloud);
    let filtration = build_rips_filtration(&dm, degree + 1, args.threshold)?;
    Ok(compute_persistence(&filtration, degree)?)
}

fn plot_spec(args: &RenderArgs) -> Result<PlotSpec, Failure> {
    let mut spec = PlotSpec::new(args.width, args.height, args.margin)?
        .with_include_essential(args.include_essential)
        .with_essential_cap_factor(args.cap_factor)?;
    if let Some(title) = &args.title {
        spec = spec.with_title(title.clone());
    }
    Ok(spec)
}

fn render(diag: &PersistenceDiagram, style: Style, spec: &PlotSpec) -> SvgDocument {
    match style {
        Style::Barcode => render_barcode(diag, spec),
        Style::Diagram => render_conventional(diag, spec),
        Style::Flat => render_flat(diag, spec),
    }
}

fn cloud_bytes(cloud: &PointCloud) -> Vec<u8> {
    let mut buf = Vec::new();
    formats::write_cloud_csv_to(cloud, &mut buf).expect("writing to memory");
    buf
}

fn run_sample(args: &SampleArgs) -> Result<(), Failure> {
    let cloud = sample(&args.shape)?;
    emit(&args.output, &cloud_bytes(&cloud))
}

fn run_compute(args: &ComputeArgs) -> Result<(), Failure> {
    let cloud = formats::read_cloud_csv(&args.input, args.header)?;
    let diag = persistence(&cloud, &args.homology)?;
    let format = match args.format {
        Some(Format::Csv) => DiagramFormat::Csv,
        Some(Format::Json) => DiagramFormat::Json,
        None if is_stdout(&args.output) => DiagramFormat::Csv,
        None => DiagramFormat::from_path(args.output.as_deref().expect("not stdout")),
    };
    let mut buf = Vec::new();
    formats::write_diagram_to(&diag, format, &mut buf).expect("writing to memory");
    emit(&args.output, &buf)?;
    if let Some(path) = &args.flat_output {
        formats::write_flat_csv(&to_flat(&diag), path)?;
    }
    Ok(())
}

fn run_plot(args: &PlotArgs) -> Result<(), Failure> {
    let spec = plot_spec(&args.render)?;
    let diag = formats::read_diagram(&args.input)?;
    emit(&args.output, render(&diag, args.render.style, &spec).as_str().as_bytes())
}

fn run_pipeline(args: &PipelineArgs) -> Result<(), Failure> {
    let spec = plot_spec(&args.render)?;
    let cloud = sample(&args.shape)?;
    let diag = persistence(&cloud, &args.homology)?;
    emit(&args.output, render(&diag, args.render.style, &spec).as_str().as_bytes())
}

fn run_reproduce(args: &ReproduceArgs) -> Result<(), Failure> {
    fs::create_dir_all(&args.output).map_err(|e| Failure::Data(Error::io(&args.output, e)))?;
    eprintln!(
        "note: panels use freshly seeded samples, so exact values differ from any other sampling of the same shapes; \
         compare qualitative structure, not exact values"
    );
    let circle = sample_circle(args.n, 1.0, args.noise_sd, args.circle_seed)?;
    let sphere = sample_sphere(args.n, 1.0, args.sphere_seed)?;
    let annulus = persistence(&circle, &HomologyArgs { max_hom_dim: Some(1), threshold: Threshold::Auto })?;
    let hollow = persistence(&sphere, &HomologyArgs { max_hom_dim: Some(2), threshold: Threshold::Auto })?;

    let spec = PlotSpec::default().with_include_essential(true);
    let panels: [(&str, &PersistenceDiagram, Style, &str); 6] = [
        ("circle_diagram.svg", &annulus, Style::Diagram, "Noisy circle: persistence diagram"),
        ("circle_barcode.svg", &annulus, Style::Barcode, "Noisy circle: barcode"),
        ("circle_flat.svg", &annulus, Style::Flat, "Noisy circle: flat persistence diagram"),
        ("sphere_barcode.svg", &hollow, Style::Barcode, "Sphere: barcode"),
        ("sphere_diagram.svg", &hollow, Style::Diagram, "Sphere: persistence diagram"),
        ("sphere_flat.svg", &hollow, Style::Flat, "Sphere: flat persistence diagram"),
    ];
    for (name, diag, style, title) in panels {
        let path = args.output.join(name);
        let svg = render(diag, style, &spec.clone().with_title(title));
        fs::write(&path, svg.as_str()).map_err(|e| Failure::Data(Error::io(&path, e)))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Runs the tool on `argv` (including the program name) and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Sample(args) => run_sample(args),
        Command::Compute(args) => run_compute(args),
        Command::Plot(args) => run_plot(args),
        Command::Pipeline(args) => run_pipeline(args),
        Command::ReproduceFigures(args) => run_reproduce(args),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("flatdiag: error: {msg}");
            1
        }
        Err(Failure::Data(err)) => {
            eprintln!("flatdiag: error: {err}");
            2
        }
    }
}
