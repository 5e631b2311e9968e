//! Command-line front end: flags are parsed here, converted to a
//! `RunConfig`, and handed to `cli_io::run`. Exit codes: 0 all
//! diagnostics pass, 1 validation error, 2 numeric failure.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use prodspec::cli_io::{
    self, parse_grid, CommandSpec, DensityMethod, GridSpec, KernelRoute, RegimeInput, RunConfig,
    SourceInput,
};

#[derive(Parser)]
#[command(
    name = "prodspec",
    version,
    about = "Spectral statistics of Hermitised Ginibre chains with a sourced-GUE factor"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// RNG seed (sampling commands; echoed everywhere for provenance).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write a JSON result envelope here, plus one CSV per table beside it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a named tolerance, e.g. --tol error-budget=1e-7 (repeatable).
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = value.parse().map_err(|_| format!("bad tolerance {value:?}"))?;
    if !(v > 0.0) {
        return Err(format!("tolerance must be positive, got {v}"));
    }
    Ok((name.to_string(), v))
}

fn parse_grid_arg(s: &str) -> Result<GridSpec, String> {
    parse_grid(s).map_err(|e| e.to_string())
}

/// Ginibre-chain shape: explicit offsets --nus "0,1" take precedence
/// over --M (which means M offsets all zero).
#[derive(Args, Clone)]
struct ShapeArgs {
    /// Comma-separated Ginibre offsets ν_1,…,ν_M.
    #[arg(long, value_delimiter = ',')]
    nus: Option<Vec<u32>>,
    /// Number of Ginibre factors, all offsets zero.
    #[arg(long = "M", default_value_t = 0)]
    m: usize,
}

impl ShapeArgs {
    fn to_nus(&self) -> Vec<u32> {
        match &self.nus {
            Some(v) => v.clone(),
            None => vec![0; self.m],
        }
    }
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Explicit source eigenvalues b_1,…,b_n (comma-separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<f64>>,
    /// Symmetric two-atom source strength a (atoms ±a·√(n/2)).
    #[arg(long = "two-atom-a")]
    two_atom_a: Option<f64>,
    /// Finite-rank spike values added to the two-atom source.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    spikes: Option<Vec<f64>>,
}

impl SourceArgs {
    fn to_input(&self) -> SourceInput {
        SourceInput {
            b: self.b.clone(),
            two_atom_a: self.two_atom_a,
            spikes: self.spikes.clone().unwrap_or_default(),
        }
    }
}

#[derive(Args, Clone)]
struct RegimeArgs {
    /// Regime: subcritical | critical | supercritical.
    #[arg(long)]
    regime: String,
    /// Source strength a (subcritical/supercritical regimes).
    #[arg(long)]
    a: Option<f64>,
    /// Critical coupling offset τ.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Spike locations (comma-separated, sorted ascending).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    spikes: Option<Vec<f64>>,
    /// Number of negative spikes (critical regime sign split).
    #[arg(long, default_value_t = 0)]
    p0: usize,
    /// Admit the conjectural subcritical range a ∈ (√2/2, 1) (exploratory).
    #[arg(long, default_value_t = false)]
    extended: bool,
}

impl RegimeArgs {
    fn to_input(&self) -> Result<RegimeInput, String> {
        let spikes = self.spikes.clone().unwrap_or_default();
        match self.regime.as_str() {
            "subcritical" => Ok(RegimeInput::Subcritical {
                a: self.a.ok_or("subcritical regime needs --a")?,
                spikes,
                extended: self.extended,
            }),
            "critical" => Ok(RegimeInput::Critical {
                tau: self.tau.ok_or("critical regime needs --tau")?,
                spikes,
                p0: self.p0,
            }),
            "supercritical" => Ok(RegimeInput::Supercritical {
                a: self.a.ok_or("supercritical regime needs --a")?,
                spikes,
            }),
            other => Err(format!(
                "unknown regime {other:?} (subcritical | critical | supercritical)"
            )),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw eigenvalue samples and emit a histogram density.
    Sample {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        /// Apply the global scaling √2·n^{-(M+1/2)} to eigenvalues.
        #[arg(long, default_value_t = false)]
        scaled: bool,
    },
    /// Evaluate the finite-n correlation kernel on a grid.
    Kernel {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        source: SourceArgs,
        /// Evaluation grid lo:hi:count (kernel evaluated on grid²).
        #[arg(long, value_parser = parse_grid_arg, allow_hyphen_values = true)]
        grid: GridSpec,
        /// Route: auto | biortho | contour.
        #[arg(long, default_value = "auto")]
        route: String,
    },
    /// Evaluate a limiting kernel (origin scaling limit) on a grid.
    LimitKernel {
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        regime: RegimeArgs,
        #[arg(long, value_parser = parse_grid_arg, allow_hyphen_values = true)]
        grid: GridSpec,
    },
    /// Sup-error of the scaled finite-n kernel against its limit over n.
    Transition {
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        regime: RegimeArgs,
        /// Matrix sizes, comma-separated (each ≤ 400).
        #[arg(long, value_delimiter = ',')]
        ns: Vec<usize>,
        #[arg(long, value_parser = parse_grid_arg, allow_hyphen_values = true)]
        grid: GridSpec,
    },
    /// Global limiting density: parametric closed form or Stieltjes inversion.
    Density {
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        a: f64,
        /// Method: parametric | stieltjes.
        #[arg(long, default_value = "parametric")]
        method: String,
        /// Parameter points per half-axis (parametric method).
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// x grid (stieltjes method).
        #[arg(long, value_parser = parse_grid_arg, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
    },
    /// Even moments of the global density (exact Fuss-Catalan integers).
    Moments {
        #[arg(long = "M")]
        m: usize,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
    /// Run the built-in cross-representation checks.
    Verify,
}

fn build_command(cmd: &Cmd) -> Result<CommandSpec, String> {
    Ok(match cmd {
        Cmd::Sample {
            n,
            shape,
            source,
            samples,
            bins,
            scaled,
        } => CommandSpec::Sample {
            n: *n,
            nus: shape.to_nus(),
            source: source.to_input(),
            samples: *samples,
            bins: *bins,
            scaled: *scaled,
        },
        Cmd::Kernel {
            n,
            shape,
            source,
            grid,
            route,
        } => CommandSpec::Kernel {
            n: *n,
            nus: shape.to_nus(),
            source: source.to_input(),
            grid: grid.clone(),
            route: match route.as_str() {
                "auto" => KernelRoute::Auto,
                "biortho" => KernelRoute::Biortho,
                "contour" => KernelRoute::Contour,
                other => return Err(format!("unknown route {other:?}")),
            },
        },
        Cmd::LimitKernel { shape, regime, grid } => CommandSpec::LimitKernel {
            nus: shape.to_nus(),
            regime: regime.to_input()?,
            grid: grid.clone(),
        },
        Cmd::Transition {
            shape,
            regime,
            ns,
            grid,
        } => CommandSpec::Transition {
            nus: shape.to_nus(),
            regime: regime.to_input()?,
            ns: ns.clone(),
            grid: grid.clone(),
        },
        Cmd::Density {
            m,
            a,
            method,
            points,
            grid,
        } => CommandSpec::Density {
            m: *m,
            a: *a,
            method: match method.as_str() {
                "parametric" => DensityMethod::Parametric,
                "stieltjes" => DensityMethod::Stieltjes,
                other => return Err(format!("unknown method {other:?}")),
            },
            points: *points,
            grid: grid.clone(),
        },
        Cmd::Moments { m, k_max } => CommandSpec::Moments {
            m: *m,
            k_max: *k_max,
        },
        Cmd::Verify => CommandSpec::Verify,
    })
}

fn main() {
    // Usage errors are validation failures (exit 1); --help/--version exit 0.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if informational { 0 } else { 1 });
        }
    };
    let command = match build_command(&cli.cmd) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    };
    let mut config = RunConfig::new(command);
    config.seed = cli.seed;
    config.output_path = cli.out;
    let overrides: BTreeMap<String, f64> = cli.tolerances.into_iter().collect();
    config.tolerances.extend(overrides);

    match cli_io::run(&config) {
        Ok(envelope) => {
            for t in &envelope.tables {
                println!("table {} ({} rows): formula {}", t.name, t.rows.len(), t.formula);
            }
            for d in &envelope.diagnostics {
                println!(
                    "check {:<24} {}  residual {:.3e}",
                    d.name,
                    if d.pass { "pass" } else { "FAIL" },
                    d.residual
                );
            }
            if let Some(p) = &envelope.config_echo.output_path {
                println!("wrote {}", p.display());
            }
            std::process::exit(cli_io::exit_code(&envelope));
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(cli_io::error_exit_code(&e));
        }
    }
}
