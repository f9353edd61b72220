//! `solidkit`: command-line access to the solid-geometry kernel.
//!
//! Every run prints (or writes, with `--report`) a JSON run report. Errors
//! print a one-line JSON diagnostic to stderr and exit with a code from
//! [`exit`]; no output file is written unless the whole run succeeds.

mod commands;
mod exit;
mod input;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Ctx;
use exit::Failure;
use input::TolFlags;
use output::Staged;

#[derive(Parser)]
#[command(
    name = "solidkit",
    version,
    about = "Solid-geometry analysis on closed triangle meshes"
)]
struct Cli {
    /// Absolute length tolerance. Overrides SOLIDKIT_EPS; the default is 1e-9 x scene diameter.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Angular tolerance in radians.
    #[arg(long, global = true)]
    angular_eps: Option<f64>,
    /// Write the run report to this file instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convex hull of a point set (JSON points or a mesh file's vertices).
    Hull {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the facet list as JSON.
        #[arg(long)]
        facets: Option<PathBuf>,
    },
    /// Buffer (offset by a ball) of a body, face, or a scene entity.
    Buffer {
        /// Mesh file, or a scene manifest (.json).
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        distance: f64,
        /// Icosphere subdivision level of the ball.
        #[arg(long, default_value_t = 3)]
        lod: u32,
        /// Entity id when the input is a manifest.
        #[arg(long)]
        entity: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Boolean operation: union, meet, difference, symmetric-difference.
    Boolean {
        #[arg(long)]
        op: String,
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Overlay of polygon layers into attributed cells.
    Overlay {
        #[arg(required = true)]
        layers: Vec<PathBuf>,
        /// Reclassification rule (JSON).
        #[arg(long)]
        rule: Option<PathBuf>,
        /// Cells output (JSON).
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the reclassified, dissolved layer.
        #[arg(long)]
        classes: Option<PathBuf>,
    },
    /// Convex decomposition; writes piece_NNN.off and manifest.json.
    Decompose {
        input: PathBuf,
        #[arg(long)]
        max_pieces: Option<usize>,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Boundary-representation topology model of one or more bodies.
    Topology {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Feature groups as body indices, e.g. `0,1;2`.
        #[arg(long)]
        features: Option<String>,
        /// Merge coplanar adjacent triangles into polygonal faces.
        #[arg(long)]
        merge_coplanar: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Minkowski sum of two solids.
    Minkowski {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Intersection curve of two solids, or intersecting pairs of a scene.
    Intersect {
        #[arg(num_args = 0..=2)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Checks that a mesh is a valid closed solid.
    Validate { input: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hull { .. } => "hull",
            Command::Buffer { .. } => "buffer",
            Command::Boolean { .. } => "boolean",
            Command::Overlay { .. } => "overlay",
            Command::Decompose { .. } => "decompose",
            Command::Topology { .. } => "topology",
            Command::Minkowski { .. } => "minkowski",
            Command::Intersect { .. } => "intersect",
            Command::Validate { .. } => "validate",
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<u8, Failure> {
    match cmd {
        Command::Hull { input, output, facets } => commands::hull(ctx, input, output, facets.as_deref()),
        Command::Buffer {
            input,
            distance,
            lod,
            entity,
            output,
        } => commands::buffer(ctx, input, *distance, *lod, entity.as_deref(), output),
        Command::Boolean { op, inputs, output } => commands::boolean(ctx, op, inputs, output),
        Command::Overlay {
            layers,
            rule,
            output,
            classes,
        } => commands::overlay_cmd(ctx, layers, rule.as_deref(), output, classes.as_deref()),
        Command::Decompose {
            input,
            max_pieces,
            output,
        } => commands::decompose(ctx, input, *max_pieces, output),
        Command::Topology {
            inputs,
            features,
            merge_coplanar,
            output,
        } => commands::topology(ctx, inputs, features.as_deref(), *merge_coplanar, output),
        Command::Minkowski { a, b, output } => commands::minkowski(ctx, a, b, output),
        Command::Intersect { inputs, scene, output } => commands::intersect(ctx, inputs, scene.as_deref(), output),
        Command::Validate { input } => commands::validate(ctx, input),
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let started = Instant::now();
    let flags = TolFlags {
        eps: cli.eps,
        angular_eps: cli.angular_eps,
    };
    let mut ctx = Ctx::new(cli.command.name(), flags);
    let code = dispatch(&cli.command, &mut ctx)?;
    let Ctx { mut report, staged, .. } = ctx;
    report.outputs = staged.commit()?;
    report.timing.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    let text = report.to_json();
    match &cli.report {
        Some(path) => {
            let mut s = Staged::default();
            s.add(path, text, Default::default());
            s.commit()?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::new(exit::IO, "io", format!("stdout: {e}")))?;
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.exit_code() == 0 => {
            let _ = e.print();
            return ExitCode::from(exit::OK);
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!(
                "{}",
                Failure::usage(first)
                    .with_detail(serde_json::json!({ "help": text }))
                    .diagnostic()
            );
            return ExitCode::from(exit::USAGE);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.diagnostic());
            ExitCode::from(f.code)
        }
    }
}
