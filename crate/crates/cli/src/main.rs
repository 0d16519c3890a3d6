use std::path::{Path, PathBuf};
use std::process::ExitCode;

use autoflow::commands::{self, CommandError, HeegaardArgs, Output, PortraitArgs};
use autoflow::config::Config;
use autoflow::C64;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "autoflow", version, about = "Automorphic vector fields, flow analysis and surgery bookkeeping")]
struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config. Defaults to the current directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance override, e.g. `--tol zero_tol=1e-10`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equivariance residual report for an automorphic field.
    Synth { field: String },
    /// Evaluate a field at points written `x,y`.
    Eval {
        field: String,
        #[arg(required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Integrate a trajectory.
    Flow {
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
        #[arg(long, default_value_t = 0.01)]
        h0: f64,
        #[arg(long)]
        region: Option<String>,
    },
    /// Locate equilibria in a region and report their indices.
    Zeros {
        field: String,
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Euler characteristic to audit the index sum against.
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,
    },
    /// SVG phase portrait with marked equilibria.
    Portrait {
        field: String,
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 12)]
        seeds: usize,
        #[arg(long, default_value_t = 16)]
        arrows: usize,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 600)]
        height: u32,
    },
    /// Connected-sum bookkeeping from a JSON plan file.
    Surgery { plan: PathBuf },
    /// Heegaard genus feasibility or twist-word homology.
    Heegaard {
        /// Comma-separated equilibrium indices.
        #[arg(long, allow_hyphen_values = true)]
        indices: Option<String>,
        /// Number of hyperbolic equilibria; defaults to the count of index -1.
        #[arg(long)]
        hyperbolic: Option<usize>,
        /// Twist word such as `a1 b1^-1 g1 a2`.
        #[arg(long, allow_hyphen_values = true)]
        twists: Option<String>,
        #[arg(long)]
        genus: Option<u32>,
    },
    /// Extend a sphere field into the ball and scan the interior for zeros.
    Extend3 {
        field: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// The pendulum on [-4,4]x[-3,3].
    Pendulum,
}

fn parse_point(s: &str) -> Result<C64, CommandError> {
    let bad = || CommandError::Input(format!("bad point {s:?}, expected x,y"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok(C64::new(x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

fn load_config(cli: &Cli) -> Result<Config, CommandError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CommandError::Input(format!("{}: {e}", path.display())))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    for t in &cli.tol {
        cfg.tolerances.set(t)?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(Output, Option<PathBuf>), CommandError> {
    let cfg = load_config(cli)?;
    let out = match &cli.command {
        Command::Synth { field } => commands::cmd_synth(&cfg, field)?,
        Command::Eval { field, points } => {
            let pts = points.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>, _>>()?;
            commands::cmd_eval(&cfg, field, &pts)?
        }
        Command::Flow {
            field,
            from,
            time,
            h0,
            region,
        } => commands::cmd_flow(&cfg, field, parse_point(from)?, *time, *h0, region.as_deref())?,
        Command::Zeros { field, region, grid, chi } => commands::cmd_zeros(&cfg, field, region, *grid, *chi)?,
        Command::Portrait {
            field,
            region,
            grid,
            seeds,
            arrows,
            width,
            height,
        } => {
            let args = PortraitArgs {
                grid: *grid,
                seeds: *seeds,
                arrows: *arrows,
                width: *width,
                height: *height,
            };
            commands::cmd_portrait(&cfg, field, region, &args)?
        }
        Command::Surgery { plan } => {
            let text = std::fs::read_to_string(plan)
                .map_err(|e| CommandError::Input(format!("{}: {e}", plan.display())))?;
            commands::cmd_surgery(&text)?
        }
        Command::Heegaard {
            indices,
            hyperbolic,
            twists,
            genus,
        } => commands::cmd_heegaard(&HeegaardArgs {
            indices: indices.clone(),
            hyperbolic: *hyperbolic,
            genus: *genus,
            twists: twists.clone(),
        })?,
        Command::Extend3 { field, samples } => commands::cmd_extend3(&cfg, field, *samples, cli.seed)?,
        Command::Demo { which: Demo::Pendulum } => commands::cmd_demo_pendulum(&cfg)?,
    };
    Ok((out, cli.out.clone().or(cfg.out)))
}

fn write_files(dir: &Path, files: &[(String, String)]) -> Result<(), CommandError> {
    if files.is_empty() {
        return Ok(());
    }
    let io = |e: std::io::Error| CommandError::Input(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents).map_err(io)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(out, dir)| {
        write_files(&dir.unwrap_or_else(|| PathBuf::from(".")), &out.files)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
