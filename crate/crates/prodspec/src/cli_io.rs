//! Command surface, configuration, and artifact persistence: every
//! run is a `RunConfig`, every outcome a `ResultEnvelope` whose tables
//! serialize to CSV with 17-significant-digit reals. Reruns of the same
//! config and seed are byte-identical (all evaluation is deterministic
//! and single-threaded per process).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_kernel::{
    kernel_biortho, kernel_contour, moment_entry_quadrature, moment_matrix, EnsembleParams,
};
use crate::freeprob::{
    density_from_g, density_parametric_a0, density_parametric_a1, fuss_catalan, phi_max_a0,
    phi_max_a1,
};
use crate::limits::{
    contour_monotonicity_check, kernel_critical, kernel_meijer_hard_edge, kernel_pearcey_direct,
    kernel_subcritical, kernel_supercritical, transition_convergence, CriticalParams,
    RegimeParams, SupercriticalParams,
};
use crate::sampler::{histogram, run_mc, Scaling, SourceSpec};
use crate::specfun::{f_m, g_m, NuVector};

/// Inclusive uniform grid, parsed from "lo:hi:count".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// Parse "lo:hi:count".
pub fn parse_grid(s: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Validation(format!(
            "grid must be lo:hi:count, got {s:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Validation(format!("bad grid lower bound {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Validation(format!("bad grid upper bound {:?}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Validation(format!("bad grid count {:?}", parts[2])))?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() || (count > 1 && hi <= lo) {
        return Err(Error::Validation(format!("degenerate grid {s:?}")));
    }
    Ok(GridSpec { lo, hi, count })
}

/// Source specification as it arrives from flags: either explicit
/// levels or the symmetric two-atom form with optional spikes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceInput {
    pub b: Option<Vec<f64>>,
    pub two_atom_a: Option<f64>,
    #[serde(default)]
    pub spikes: Vec<f64>,
}

impl SourceInput {
    pub fn to_spec(&self) -> Result<SourceSpec> {
        match (&self.b, self.two_atom_a) {
            (Some(b), None) => {
                if !self.spikes.is_empty() {
                    return Err(Error::Validation(
                        "spikes are part of the two-atom form; fold them into --b instead".into(),
                    ));
                }
                Ok(SourceSpec::Explicit(b.clone()))
            }
            (None, Some(a)) => Ok(SourceSpec::SymmetricTwoAtom {
                a,
                spikes: self.spikes.clone(),
            }),
            (None, None) => Err(Error::Validation(
                "source required: --b or --two-atom-a".into(),
            )),
            (Some(_), Some(_)) => Err(Error::Validation(
                "--b and --two-atom-a are mutually exclusive".into(),
            )),
        }
    }
}

/// Regime selection as it arrives from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum RegimeInput {
    Subcritical {
        a: f64,
        #[serde(default)]
        spikes: Vec<f64>,
        /// Admit the conjectural a ∈ (√2/2, 1) range (exploratory).
        #[serde(default)]
        extended: bool,
    },
    Critical {
        tau: f64,
        #[serde(default)]
        spikes: Vec<f64>,
        #[serde(default)]
        p0: usize,
    },
    Supercritical {
        a: f64,
        #[serde(default)]
        spikes: Vec<f64>,
    },
}

impl RegimeInput {
    pub fn to_params(&self) -> Result<RegimeParams> {
        let params = match self {
            RegimeInput::Subcritical { a, spikes, .. } => RegimeParams::Subcritical {
                a: *a,
                spikes: spikes.clone(),
            },
            RegimeInput::Critical { tau, spikes, p0 } => RegimeParams::Critical(CriticalParams {
                tau: *tau,
                spikes: spikes.clone(),
                p0: *p0,
            }),
            RegimeInput::Supercritical { a, spikes } => {
                RegimeParams::Supercritical(SupercriticalParams {
                    a: *a,
                    spikes: spikes.clone(),
                })
            }
        };
        let extended = matches!(self, RegimeInput::Subcritical { extended: true, .. });
        params.validate_with_extension(extended)?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelRoute {
    Auto,
    Biortho,
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMethod {
    Parametric,
    Stieltjes,
}

/// One command with its structured parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandSpec {
    Sample {
        n: usize,
        nus: Vec<u32>,
        source: SourceInput,
        samples: usize,
        bins: usize,
        /// Apply the global product scaling √2·n^{-(M+1/2)}.
        scaled: bool,
    },
    Kernel {
        n: usize,
        nus: Vec<u32>,
        source: SourceInput,
        grid: GridSpec,
        route: KernelRoute,
    },
    LimitKernel {
        nus: Vec<u32>,
        regime: RegimeInput,
        grid: GridSpec,
    },
    Transition {
        nus: Vec<u32>,
        regime: RegimeInput,
        ns: Vec<usize>,
        grid: GridSpec,
    },
    Density {
        m: usize,
        a: f64,
        method: DensityMethod,
        /// Number of parameter points per half-axis (parametric method).
        points: usize,
        /// x grid (required by the stieltjes method).
        grid: Option<GridSpec>,
    },
    Moments {
        m: usize,
        k_max: usize,
    },
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandSpec,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandSpec) -> RunConfig {
        let tolerances = default_tolerances(&command);
        RunConfig {
            command,
            seed: 0,
            tolerances,
            output_path: None,
        }
    }

    /// Canonical text form (stable field order, sorted maps).
    pub fn to_canonical(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_canonical(s: &str) -> Result<RunConfig> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("config parse: {e}")))
    }

    pub fn tol(&self, name: &str) -> f64 {
        *self.tolerances.get(name).unwrap_or(&1e-6)
    }
}

fn default_tolerances(command: &CommandSpec) -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    match command {
        CommandSpec::Sample { .. } => {
            t.insert("mass-defect".into(), 5e-3);
        }
        CommandSpec::Kernel { .. } => {
            t.insert("error-budget".into(), 1e-6);
            t.insert("route-agreement".into(), 1e-8);
        }
        CommandSpec::LimitKernel { .. } => {
            t.insert("error-budget".into(), 1e-6);
        }
        CommandSpec::Transition { .. } => {
            t.insert("final-error".into(), 5e-2);
        }
        CommandSpec::Density { .. } => {
            t.insert("mass-defect".into(), 5e-3);
        }
        CommandSpec::Moments { .. } => {}
        CommandSpec::Verify => {
            t.insert("g-routes".into(), 1e-8);
            t.insert("f-routes".into(), 1e-10);
            t.insert("kernel-routes".into(), 1e-8);
            t.insert("u-asymptotics".into(), 1e-6);
            t.insert("sine-reduction".into(), 1e-8);
            t.insert("moment-quadrature".into(), 1e-8);
        }
    }
    t
}

/// Named CSV block; rows are preformatted so emission is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    /// Slug of the generating formula, echoed in the CSV header.
    pub formula: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# formula: {}", self.formula);
        let _ = writeln!(s, "# units: dimensionless");
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub config_echo: RunConfig,
    pub artifact_version: String,
    pub tables: Vec<Table>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ResultEnvelope {
    pub fn all_pass(&self) -> bool {
        self.diagnostics.iter().all(|d| d.pass)
    }

    /// Write the JSON envelope at `path` and each table as a sibling
    /// CSV named `<stem>.<table>.csv`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Validation(format!("envelope serialize: {e}")))?;
        std::fs::write(path, json)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "result".into());
        for t in &self.tables {
            let sibling = path.with_file_name(format!("{stem}.{}.csv", t.name));
            std::fs::write(sibling, t.to_csv())?;
        }
        Ok(())
    }
}

/// 17-significant-digit formatting: round-trips f64 exactly.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn nu_vector(nus: &[u32]) -> NuVector {
    NuVector::new(nus.to_vec())
}

/// Execute a configured command. Numeric work happens here; the binary
/// only parses flags, calls this, and maps the outcome to an exit code.
pub fn run(config: &RunConfig) -> Result<ResultEnvelope> {
    let mut tables = Vec::new();
    let mut diagnostics = Vec::new();
    match &config.command {
        CommandSpec::Sample {
            n,
            nus,
            source,
            samples,
            bins,
            scaled,
        } => {
            let nus = nu_vector(nus);
            let spec = source.to_spec()?;
            let params = crate::sampler::ensemble_from_source(*n, nus, &spec)?;
            let run = run_mc(&params, *samples, config.seed)?;
            let scaling = if *scaled {
                Scaling::GlobalProduct
            } else {
                Scaling::None
            };
            let curve = histogram(&run, *bins, scaling)?;
            let mut rows = Vec::with_capacity(curve.points.len());
            let mut mass = 0.0;
            let width = if curve.points.len() > 1 {
                curve.points[1].0 - curve.points[0].0
            } else {
                1.0
            };
            for &(x, rho) in &curve.points {
                mass += rho * width;
                rows.push(vec![fmt_real(x), fmt_real(rho)]);
            }
            tables.push(Table {
                name: "histogram".into(),
                formula: "empirical-eigenvalue-density".into(),
                columns: vec!["x".into(), "rho".into()],
                rows,
            });
            let defect = (mass - 1.0).abs();
            diagnostics.push(Diagnostic {
                name: "mass-defect".into(),
                pass: defect <= config.tol("mass-defect"),
                residual: defect,
            });
        }
        CommandSpec::Kernel {
            n,
            nus,
            source,
            grid,
            route,
        } => {
            let nus = nu_vector(nus);
            let spec = source.to_spec()?;
            let params = crate::sampler::ensemble_from_source(*n, nus, &spec)?;
            let pts = grid.points();
            let use_biortho = match route {
                KernelRoute::Biortho => true,
                KernelRoute::Contour => false,
                KernelRoute::Auto => *n <= 12 && params.distinct(),
            };
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            let mut worst_gap = 0.0f64;
            for &x in &pts {
                for &y in &pts {
                    let k = if use_biortho {
                        kernel_biortho(&params, x, y)?
                    } else {
                        kernel_contour(&params, x, y)?
                    };
                    worst = worst.max(k.abs_error_estimate);
                    if matches!(route, KernelRoute::Auto) && use_biortho {
                        let other = kernel_contour(&params, x, y)?;
                        worst_gap = worst_gap
                            .max((k.value - other.value).abs() / k.value.abs().max(1.0));
                    }
                    rows.push(vec![
                        fmt_real(x),
                        fmt_real(y),
                        fmt_real(k.value),
                        fmt_real(k.abs_error_estimate),
                    ]);
                }
            }
            tables.push(Table {
                name: "kernel".into(),
                formula: "finite-n-double-contour-kernel".into(),
                columns: vec!["x".into(), "y".into(), "k".into(), "abs_err".into()],
                rows,
            });
            diagnostics.push(Diagnostic {
                name: "error-budget".into(),
                pass: worst <= config.tol("error-budget"),
                residual: worst,
            });
            if matches!(route, KernelRoute::Auto) && use_biortho {
                diagnostics.push(Diagnostic {
                    name: "route-agreement".into(),
                    pass: worst_gap <= config.tol("route-agreement"),
                    residual: worst_gap,
                });
            }
        }
        CommandSpec::LimitKernel { nus, regime, grid } => {
            let nus = nu_vector(nus);
            let params = regime.to_params()?;
            let pts = grid.points();
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for &x in &pts {
                for &y in &pts {
                    let k = match &params {
                        RegimeParams::Subcritical { .. } => kernel_subcritical(&nus, x, y)?,
                        RegimeParams::Critical(cp) => kernel_critical(&nus, cp, x, y)?,
                        RegimeParams::Supercritical(sp) => kernel_supercritical(&nus, sp, x, y)?,
                    };
                    worst = worst.max(k.abs_error_estimate);
                    rows.push(vec![
                        fmt_real(x),
                        fmt_real(y),
                        fmt_real(k.value),
                        fmt_real(k.abs_error_estimate),
                    ]);
                }
            }
            let formula = match &params {
                RegimeParams::Subcritical { .. } => "subcritical-sine-limit-kernel",
                RegimeParams::Critical(_) => "critical-pearcey-meijer-kernel",
                RegimeParams::Supercritical(_) => "supercritical-spike-kernel",
            };
            tables.push(Table {
                name: "limit_kernel".into(),
                formula: formula.into(),
                columns: vec!["x".into(), "y".into(), "k".into(), "abs_err".into()],
                rows,
            });
            diagnostics.push(Diagnostic {
                name: "error-budget".into(),
                pass: worst <= config.tol("error-budget"),
                residual: worst,
            });
        }
        CommandSpec::Transition {
            nus,
            regime,
            ns,
            grid,
        } => {
            let nus = nu_vector(nus);
            let params = regime.to_params()?;
            let rows_data = transition_convergence(&nus, &params, ns, &grid.points())?;
            let rows = rows_data
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_real(r.sup_error),
                        fmt_real(r.worst_x),
                        fmt_real(r.worst_y),
                    ]
                })
                .collect();
            tables.push(Table {
                name: "transition".into(),
                formula: "scaled-kernel-vs-limit-sup-error".into(),
                columns: vec![
                    "n".into(),
                    "sup_error".into(),
                    "worst_x".into(),
                    "worst_y".into(),
                ],
                rows,
            });
            let decreasing = rows_data.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
            diagnostics.push(Diagnostic {
                name: "monotone-decrease".into(),
                pass: decreasing,
                residual: rows_data
                    .windows(2)
                    .map(|w| w[1].sup_error - w[0].sup_error)
                    .fold(f64::NEG_INFINITY, f64::max)
                    .max(0.0),
            });
            let final_err = rows_data.last().map(|r| r.sup_error).unwrap_or(f64::NAN);
            diagnostics.push(Diagnostic {
                name: "final-error".into(),
                pass: final_err <= config.tol("final-error"),
                residual: final_err,
            });
        }
        CommandSpec::Density {
            m,
            a,
            method,
            points,
            grid,
        } => match method {
            DensityMethod::Parametric => {
                if *points < 2 {
                    return Err(Error::Validation("need at least 2 parameter points".into()));
                }
                type CurveFn = fn(usize, &[f64]) -> Result<crate::freeprob::DensityCurve>;
                let (lim, curve_fn): (f64, CurveFn) = if *a == 0.0 {
                    (phi_max_a0(*m), density_parametric_a0)
                } else if *a == 1.0 {
                    (phi_max_a1(*m), density_parametric_a1)
                } else {
                    return Err(Error::Validation(
                        "closed parametric forms exist at a = 0 and a = 1; use --method stieltjes elsewhere"
                            .into(),
                    ));
                };
                let mut phis = Vec::with_capacity(2 * points);
                for i in 0..*points {
                    phis.push(-lim * (i as f64 + 0.5) / *points as f64);
                }
                for i in (0..*points).rev() {
                    phis.push(lim * (i as f64 + 0.5) / *points as f64);
                }
                // Both halves ordered by increasing x (φ ↓ means |x| ↓).
                let curve = curve_fn(*m, &phis)?;
                let rows = phis
                    .iter()
                    .zip(&curve.points)
                    .map(|(phi, &(x, rho))| vec![fmt_real(*phi), fmt_real(x), fmt_real(rho)])
                    .collect();
                tables.push(Table {
                    name: "density".into(),
                    formula: "trigonometric-density-parametrisation".into(),
                    columns: vec!["phi".into(), "x".into(), "rho".into()],
                    rows,
                });
                let mut pts: Vec<(f64, f64)> = curve.points.clone();
                pts.sort_by(|p, q| p.0.total_cmp(&q.0));
                let mass: f64 = pts
                    .windows(2)
                    .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                    .sum();
                let defect = (mass - 1.0).abs();
                diagnostics.push(Diagnostic {
                    name: "mass-defect".into(),
                    pass: defect <= config.tol("mass-defect"),
                    residual: defect,
                });
            }
            DensityMethod::Stieltjes => {
                let grid = grid
                    .as_ref()
                    .ok_or_else(|| Error::Validation("stieltjes method needs --grid".into()))?;
                let xs: Vec<f64> = grid.points().into_iter().filter(|&x| x != 0.0).collect();
                let curve = density_from_g(*m, *a, &xs)?;
                let mut rows = Vec::new();
                let mut worst = 0.0f64;
                for &(x, rho) in &curve.points {
                    rows.push(vec![fmt_real(x), fmt_real(rho)]);
                    if rho < worst {
                        worst = rho;
                    }
                }
                tables.push(Table {
                    name: "density".into(),
                    formula: "stieltjes-inversion-of-algebraic-transform".into(),
                    columns: vec!["x".into(), "rho".into()],
                    rows,
                });
                diagnostics.push(Diagnostic {
                    name: "nonnegative".into(),
                    pass: worst >= 0.0,
                    residual: -worst,
                });
            }
        },
        CommandSpec::Moments { m, k_max } => {
            let rows = (0..=*k_max)
                .map(|k| vec![k.to_string(), fuss_catalan(2 * m + 1, k).to_string()])
                .collect();
            tables.push(Table {
                name: "moments".into(),
                formula: "fuss-catalan-even-moments".into(),
                columns: vec!["k".into(), "moment".into()],
                rows,
            });
        }
        CommandSpec::Verify => {
            diagnostics = verify_battery(config)?;
            let rows = diagnostics
                .iter()
                .map(|d| {
                    vec![
                        d.name.clone(),
                        if d.pass { "pass" } else { "fail" }.to_string(),
                        fmt_real(d.residual),
                    ]
                })
                .collect();
            tables.push(Table {
                name: "checks".into(),
                formula: "cross-representation-residuals".into(),
                columns: vec!["check".into(), "status".into(), "residual".into()],
                rows,
            });
        }
    }
    let envelope = ResultEnvelope {
        config_echo: config.clone(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        tables,
        diagnostics,
    };
    if let Some(path) = &config.output_path {
        envelope.write(path)?;
    }
    Ok(envelope)
}

/// Built-in cross-checks: every special function and kernel evaluated
/// through two independent representations, plus closed-form anchors.
fn verify_battery(config: &RunConfig) -> Result<Vec<Diagnostic>> {
    use num_complex::Complex64;
    let mut out = Vec::new();

    // g_M: iterated radial quadrature vs Mellin-Barnes line, M ∈ {1, 2}.
    let mut worst = 0.0f64;
    for (nus, y, v) in [
        (NuVector::new(vec![0]), 1.0, Complex64::new(0.3, 0.2)),
        (NuVector::new(vec![2]), -0.7, Complex64::new(0.4, 0.25)),
        (NuVector::new(vec![0, 1]), 0.6, Complex64::new(-0.35, 0.1)),
    ] {
        let quad = crate::specfun::fg::g_m_log(&nus, y, v)?.0.exp();
        let mell = crate::specfun::fg::g_m_mellin_log(&nus, y, v)?.0.exp();
        worst = worst.max((quad - mell).norm() / quad.norm().max(1e-300));
    }
    push_check(&mut out, "g-routes", worst, config.tol("g-routes"));

    // f_M: double series vs contour representation.
    let mut worst = 0.0f64;
    for (nus, x, u) in [
        (NuVector::new(vec![0]), 1.0, Complex64::new(0.5, 0.0)),
        (NuVector::new(vec![1, 3]), 0.7, Complex64::new(-1.2, 0.4)),
    ] {
        let series = f_m(&nus, x, u)?.value;
        let contour = crate::specfun::fg::f_m_contour(&nus, x, u)?.value;
        worst = worst.max((series - contour).norm() / series.norm().max(1e-300));
    }
    push_check(&mut out, "f-routes", worst, config.tol("f-routes"));

    // Parabolic cylinder U against its two asymptotic sectors at |z| ≥ 8.
    let mut worst = 0.0f64;
    for (c, z) in [
        (Complex64::new(1.5, 0.0), Complex64::new(9.0, 0.0)),
        (Complex64::new(0.5, 0.0), Complex64::new(0.0, 10.0)),
        (Complex64::new(2.0, 0.5), Complex64::new(-6.0, 6.0)),
    ] {
        let exact = crate::specfun::pcf_u(c, z)?.value;
        let asy = crate::specfun::pcf::pcf_u_asymptotic(c, z)?;
        worst = worst.max((exact - asy).norm() / exact.norm().max(1e-300));
    }
    push_check(&mut out, "u-asymptotics", worst, config.tol("u-asymptotics"));

    // Finite-n kernel: biorthogonal inversion vs double contour.
    let params = EnsembleParams::new(2, NuVector::new(vec![0]), vec![0.3, -0.3])?;
    let mut worst = 0.0f64;
    for (x, y) in [(0.5, 0.7), (1.1, -0.4)] {
        let kb = kernel_biortho(&params, x, y)?;
        let kc = kernel_contour(&params, x, y)?;
        worst = worst.max((kb.value - kc.value).abs() / kb.value.abs().max(1e-300));
    }
    push_check(&mut out, "kernel-routes", worst, config.tol("kernel-routes"));

    // Subcritical kernel at M = 0 against the sine kernel.
    let nus0 = NuVector::new(vec![]);
    let mut worst = 0.0f64;
    for (x, y) in [(0.7, 0.4), (-0.6, 0.9)] {
        let k = kernel_subcritical(&nus0, x, y)?;
        let sine = ((x - y) as f64).sin() / (std::f64::consts::PI * (x - y));
        worst = worst.max((k.value - sine).abs());
    }
    push_check(&mut out, "sine-reduction", worst, config.tol("sine-reduction"));

    // Moment-matrix entries: closed form vs direct quadrature.
    let nus1 = NuVector::new(vec![0]);
    let p1 = EnsembleParams::new(3, nus1.clone(), vec![0.3, 0.0, -0.4])?;
    let mm = moment_matrix(&p1)?;
    let mut worst = 0.0f64;
    for k in 1..=3usize {
        let q = moment_entry_quadrature(&nus1, k, 0.3)?;
        let closed = mm.entries[(k - 1, 0)];
        worst = worst.max((q - closed).abs() / closed.abs().max(1e-300));
    }
    push_check(&mut out, "moment-quadrature", worst, config.tol("moment-quadrature"));

    // Interior sanity: hard-edge kernel refinement stability and g_m
    // evaluation on a spike location (used by the supercritical route).
    let kh = kernel_meijer_hard_edge(&NuVector::new(vec![1]), 1.0, 1.0)?;
    push_check(&mut out, "hard-edge-budget", kh.abs_error_estimate, 1e-8);
    let gs = g_m(&NuVector::new(vec![0]), 0.6, Complex64::new(1.5, 0.0))?;
    push_check(&mut out, "g-on-axis-budget", gs.abs_error_estimate / gs.value.norm(), 1e-8);

    // Monotonicity propositions on a coarse sweep.
    let rep = contour_monotonicity_check(1.0, 101.0 * std::f64::consts::PI / 400.0)?;
    push_check(&mut out, "phase-monotonicity", rep.total_violations() as f64, 0.5);

    // Pearcey reduction: G-dressed critical kernel vs direct exponentials.
    let cp = CriticalParams {
        tau: 0.0,
        spikes: vec![],
        p0: 0,
    };
    let k1 = kernel_critical(&nus0, &cp, 0.5, 0.5)?;
    let k2 = kernel_pearcey_direct(0.0, 0.5, 0.5)?;
    push_check(&mut out, "pearcey-reduction", (k1.value - k2.value).abs(), 1e-6);

    Ok(out)
}

fn push_check(out: &mut Vec<Diagnostic>, name: &str, residual: f64, tol: f64) {
    out.push(Diagnostic {
        name: name.into(),
        pass: residual <= tol,
        residual,
    });
}

/// Exit code for a finished run: 0 iff all diagnostics pass, else 2.
pub fn exit_code(env: &ResultEnvelope) -> i32 {
    if env.all_pass() {
        0
    } else {
        2
    }
}

/// Exit code for an error: validation problems are 1, numeric failures 2.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::CoincidentSource(_) => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parse_and_points() {
        let g = parse_grid("-1:1:5").unwrap();
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:5").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert_eq!(parse_grid("3:3:1").unwrap().points(), vec![3.0]);
    }

    #[test]
    fn config_round_trip_is_identical() {
        let cfg = RunConfig {
            command: CommandSpec::Kernel {
                n: 2,
                nus: vec![0],
                source: SourceInput {
                    b: Some(vec![0.3, -0.3]),
                    two_atom_a: None,
                    spikes: vec![],
                },
                grid: GridSpec {
                    lo: -1.0,
                    hi: 1.0,
                    count: 3,
                },
                route: KernelRoute::Auto,
            },
            seed: 42,
            tolerances: {
                let mut t = BTreeMap::new();
                t.insert("error-budget".to_string(), 1e-6);
                t
            },
            output_path: Some(PathBuf::from("/tmp/x.json")),
        };
        let text = cfg.to_canonical();
        let back = RunConfig::from_canonical(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(text, back.to_canonical());
    }

    #[test]
    fn real_formatting_round_trips() {
        for v in [0.3, -1.0 / 3.0, 1e-300, 2.2250738585072014e-308, 123456.789] {
            let s = fmt_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn moments_command_emits_exact_integers() {
        let cfg = RunConfig::new(CommandSpec::Moments { m: 1, k_max: 4 });
        let env = run(&cfg).unwrap();
        assert!(env.all_pass());
        let t = &env.tables[0];
        assert_eq!(t.rows[2][1], "4");
        assert_eq!(t.rows[3][1], "22");
        assert_eq!(t.rows[4][1], "140");
    }

    #[test]
    fn source_input_validation() {
        let s = SourceInput {
            b: None,
            two_atom_a: None,
            spikes: vec![],
        };
        assert!(s.to_spec().is_err());
        let s = SourceInput {
            b: Some(vec![0.0]),
            two_atom_a: Some(0.5),
            spikes: vec![],
        };
        assert!(s.to_spec().is_err());
    }
}
