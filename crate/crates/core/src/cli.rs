//! Batch front-end: parse inputs, run pipelines, emit deterministic JSON/CSV.
//!
//! Exit codes: 0 success, 2 parse errors, 3 precondition failures, 4 internal.

use crate::cohn_elkies::{self, build_ce, CeFunction, Convention, VerifyConfig};
use crate::error::{Error, Result};
use crate::gabor;
use crate::lattice::{self, Lattice, PeriodicSet, ProductLattice};
use crate::linalg;
use crate::periodic;
use crate::report;
use crate::wexler_raz::{self, DualWindowConfig, Strategy};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "cegabor", version, about = "Sphere-packing bound functions from Gaussian Gabor dual windows")]
pub struct Cli {
    /// Flat JSON config file; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for reports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Tolerance overrides, e.g. --tol ft_grid=1e-12
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    pub tolerances: Vec<String>,

    /// Seed recorded in reports (sampling in this pipeline is deterministic).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// quadrant_symmetric | chr_kim
    #[arg(long, global = true)]
    pub strategy: Option<String>,

    /// consistent | literal
    #[arg(long, global = true)]
    pub convention: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lattice and periodic-set geometry reports.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Approximate dual-window construction and residual gates.
    Dual {
        #[command(subcommand)]
        cmd: DualCmd,
    },
    /// Cohn-Elkies candidate construction, verification and bounds.
    Ce {
        #[command(subcommand)]
        cmd: CeCmd,
    },
    /// Periodic-set pipeline.
    Periodic {
        #[command(subcommand)]
        cmd: PeriodicCmd,
    },
    /// Parameter sweeps to CSV.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Dual, adjoint, covolume, shortest vector, densities, criticality.
    Info {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum DualCmd {
    /// Build the multiplicity map and dual window, then run the residual gates.
    Build(DualBuildArgs),
}

#[derive(Args, Debug)]
pub struct DualBuildArgs {
    #[arg(long = "lattice-l")]
    pub lattice_l: PathBuf,
    #[arg(long = "lattice-k")]
    pub lattice_k: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Error target; the cutoff is sized from it unless --omega is given.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub omega: Option<i64>,
    /// Use the compactly supported window in the identity gate.
    #[arg(long)]
    pub truncated: bool,
    /// gaussian | hat (the hat fixture checks the exact identity)
    #[arg(long, default_value = "gaussian")]
    pub window: String,
}

#[derive(Subcommand, Debug)]
pub enum CeCmd {
    /// Construct the candidate and report its parameters.
    Build(CeArgs),
    /// Construct and run the full verification battery.
    Verify(CeArgs),
    /// Construct and report the packing bound only.
    Bound(CeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CeArgs {
    #[arg(long = "lattice-l")]
    pub lattice_l: PathBuf,
    #[arg(long = "lattice-k")]
    pub lattice_k: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub omega: Option<i64>,
    /// Also emit a radial profile CSV (r, f(r e), Ff(r e)).
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Direction for the profile, comma-separated coordinates.
    #[arg(long = "plot-direction")]
    pub plot_direction: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum PeriodicCmd {
    /// Cohn-Elkies pipeline over a periodic set.
    Ce(PeriodicArgs),
}

#[derive(Args, Debug)]
pub struct PeriodicArgs {
    #[arg(long = "sigma-set")]
    pub sigma_set: PathBuf,
    #[arg(long = "lattice-k")]
    pub lattice_k: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub omega: Option<i64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// ce | grassmann
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long = "lattice-l")]
    pub lattice_l: Option<PathBuf>,
    #[arg(long = "lattice-k")]
    pub lattice_k: Option<PathBuf>,
}

/// Flat config file; unknown keys are rejected.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub omega: Option<i64>,
    pub epsilon: Option<f64>,
    pub strategy: Option<String>,
    pub convention: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub mode: Option<String>,
    pub grid_alpha: Option<Vec<f64>>,
    pub grid_sigma: Option<Vec<f64>>,
    pub grid_t: Option<Vec<f64>>,
    pub plot_points: Option<usize>,
    pub tolerances: Option<BTreeMap<String, f64>>,
}

const KNOWN_TOLERANCES: &[&str] = &["sign_grid", "ft_grid", "poisson_radius", "zero"];
const SWEEP_BUDGET: usize = 100_000;

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(tols) = &self.tolerances {
            for (k, v) in tols {
                if !KNOWN_TOLERANCES.contains(&k.as_str()) {
                    return Err(Error::Parse(format!("unknown tolerance key: {k}")));
                }
                if !(*v > 0.0) {
                    return Err(Error::Parse(format!("tolerance {k} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}

/// Resolved settings after merging config file and flags (flags win).
struct Settings {
    config: RunConfig,
    out_dir: PathBuf,
    seed: u64,
    strategy: Strategy,
    convention: Convention,
    verify: VerifyConfig,
}

fn resolve(cli: &Cli) -> Result<Settings> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out = Some(out.display().to_string());
    }
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(s) = &cli.strategy {
        config.strategy = Some(s.clone());
    }
    if let Some(c) = &cli.convention {
        config.convention = Some(c.clone());
    }
    let mut tols = config.tolerances.clone().unwrap_or_default();
    for spec in &cli.tolerances {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected KEY=VAL, got {spec}")))?;
        let v: f64 =
            v.parse().map_err(|_| Error::Parse(format!("tolerance {k} is not a number: {v}")))?;
        tols.insert(k.to_string(), v);
    }
    config.tolerances = Some(tols);
    config.validate()?;

    let strategy: Strategy =
        config.strategy.as_deref().unwrap_or("quadrant_symmetric").parse()?;
    let convention: Convention = config.convention.as_deref().unwrap_or("consistent").parse()?;
    let tols = config.tolerances.clone().unwrap_or_default();
    let verify = VerifyConfig {
        sign_tol: tols.get("sign_grid").copied().unwrap_or(1e-12),
        ft_grid_tol: tols.get("ft_grid").copied().unwrap_or(1e-12),
        poisson_radius: tols.get("poisson_radius").copied(),
        zero_tol: tols.get("zero").copied().unwrap_or(1e-9),
        ..VerifyConfig::default()
    };
    Ok(Settings {
        out_dir: PathBuf::from(config.out.clone().unwrap_or_else(|| "out".to_string())),
        seed: config.seed.unwrap_or(0),
        strategy,
        convention,
        verify,
        config,
    })
}

fn load_lattice(path: &Path) -> Result<Lattice> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_periodic(path: &Path) -> Result<PeriodicSet> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out_dir: &Path, name: &str, content: &str) -> Result<()> {
    report::write_atomic(&out_dir.join(name), content)?;
    print!("{content}");
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    let settings = resolve(cli)?;
    match &cli.command {
        Command::Lattice { cmd: LatticeCmd::Info { input } } => lattice_info(&settings, input),
        Command::Dual { cmd: DualCmd::Build(args) } => dual_build(&settings, args),
        Command::Ce { cmd } => {
            let (args, mode) = match cmd {
                CeCmd::Build(a) => (a, "build"),
                CeCmd::Verify(a) => (a, "verify"),
                CeCmd::Bound(a) => (a, "bound"),
            };
            ce_run(&settings, args, mode)
        }
        Command::Periodic { cmd: PeriodicCmd::Ce(args) } => periodic_ce(&settings, args),
        Command::Sweep(args) => sweep(&settings, args),
    }
}

// ---------------------------------------------------------------------------
// lattice info
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LatticeInfoReport {
    schema_version: u32,
    seed: u64,
    dim: usize,
    covolume: f64,
    dual_basis: Vec<Vec<f64>>,
    dual_covolume: f64,
    shortest_vector: Vec<f64>,
    shortest_length: f64,
    center_density: f64,
    criticality: lattice::CriticalityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjoint_basis: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label_density: Option<lattice::LabelDensityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    periodic: Option<PeriodicInfo>,
}

#[derive(Serialize)]
struct PeriodicInfo {
    translations: usize,
    min_distance: f64,
    center_density: f64,
}

fn lattice_info(settings: &Settings, input: &Path) -> Result<()> {
    let text = std::fs::read_to_string(input)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
    let (l, periodic_set) = if value.get("lattice").is_some() {
        let s: PeriodicSet = serde_json::from_value(value)
            .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
        (s.lattice().clone(), Some(s))
    } else {
        let l: Lattice = serde_json::from_value(value)
            .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
        (l, None)
    };

    let dual = lattice::dual(&l)?;
    let (sv, len) = lattice::shortest_vector(&l)?;
    let even = l.dim() % 2 == 0;
    let rep = LatticeInfoReport {
        schema_version: 1,
        seed: settings.seed,
        dim: l.dim(),
        covolume: l.covolume(),
        dual_basis: dual.basis().columns(),
        dual_covolume: dual.covolume(),
        shortest_vector: sv,
        shortest_length: len,
        center_density: lattice::center_density(&l)?,
        criticality: lattice::criticality_check(&l)?,
        adjoint_basis: if even {
            Some(lattice::adjoint(&l)?.basis().columns())
        } else {
            None
        },
        label_density: if even { Some(lattice::label_density(&l)?) } else { None },
        periodic: match &periodic_set {
            Some(s) => Some(PeriodicInfo {
                translations: s.size(),
                min_distance: lattice::min_distance_periodic(s)?,
                center_density: lattice::center_density_periodic(s)?,
            }),
            None => None,
        },
    };
    emit(&settings.out_dir, "lattice_info.json", &report::to_json_string(&rep)?)
}

// ---------------------------------------------------------------------------
// dual build
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DualBuildReport {
    schema_version: u32,
    seed: u64,
    omega: i64,
    epsilon: f64,
    duality_error_budget: f64,
    det_factor: f64,
    strategy: String,
    window: String,
    norm_condition: wexler_raz::NormCondition,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<wexler_raz::PartitionReport>,
    wr_identity: wexler_raz::WrIdentityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    biorthogonality: Option<wexler_raz::BiorthogonalityReport>,
}

fn dual_build(settings: &Settings, args: &DualBuildArgs) -> Result<()> {
    let l = load_lattice(&args.lattice_l)?;
    let k = load_lattice(&args.lattice_k)?;
    let alpha = args.alpha.or(settings.config.alpha).unwrap_or(0.6);
    let dim = l.dim();
    let omega = match (args.omega, args.epsilon.or(settings.config.epsilon)) {
        (Some(w), _) => w,
        (None, Some(eps)) => wexler_raz::omega_for_epsilon(alpha, dim, eps)?,
        (None, None) => settings.config.omega.unwrap_or(2),
    };
    eprintln!("dual build: omega = {omega}");

    let hat = match args.window.as_str() {
        "gaussian" => false,
        "hat" => true,
        other => return Err(Error::Parse(format!("unknown window: {other}"))),
    };

    let mut dw = wexler_raz::build_dual_window(
        alpha,
        l.basis(),
        k.basis(),
        omega,
        settings.strategy,
        &DualWindowConfig { truncated: args.truncated, normalized: true },
    )?;
    if hat {
        dw.shape = wexler_raz::WindowShape::Hat;
        dw.epsilon = 0.0;
    }

    let cond = wexler_raz::chrkim_norm_condition(l.basis(), k.basis(), omega);
    let grid = if dim == 1 { 41 } else { 13 };
    let identity = wexler_raz::wr_identity_residual(&dw, l.basis(), k.basis(), grid)?;
    let partition = if hat {
        None
    } else {
        let spacing: Vec<f64> = (0..dim).map(|j| linalg::norm2(&l.basis().column(j))).collect();
        Some(wexler_raz::partition_of_unity_residual(alpha, &spacing, 64)?)
    };
    let biorth = if hat || args.truncated {
        None
    } else {
        let lambda = ProductLattice::new(l.clone(), k.clone())?;
        let radius =
            omega as f64 + (90.0 / alpha).sqrt() + (90.0 * alpha).sqrt() / std::f64::consts::PI;
        Some(wexler_raz::biorthogonality_residual(&dw, &lambda, radius)?)
    };

    let mu_json = report::to_json_string(&dw.mu)?;
    report::write_atomic(&settings.out_dir.join("multiplicity.json"), &mu_json)?;

    let rep = DualBuildReport {
        schema_version: 1,
        seed: settings.seed,
        omega,
        epsilon: dw.epsilon,
        duality_error_budget: dw.duality_error_budget(),
        det_factor: dw.det_factor,
        strategy: settings.strategy.to_string(),
        window: args.window.clone(),
        norm_condition: cond,
        partition,
        wr_identity: identity,
        biorthogonality: biorth,
    };
    emit(&settings.out_dir, "dual_residuals.json", &report::to_json_string(&rep)?)
}

// ---------------------------------------------------------------------------
// ce build | verify | bound
// ---------------------------------------------------------------------------

fn build_from_args(settings: &Settings, args: &CeArgs) -> Result<CeFunction> {
    let l = load_lattice(&args.lattice_l)?;
    let k = load_lattice(&args.lattice_k)?;
    let sigma = args.sigma.or(settings.config.sigma).unwrap_or(1.0);
    let alpha = args
        .alpha
        .or(settings.config.alpha)
        .unwrap_or(std::f64::consts::PI * sigma / std::f64::consts::E);
    let omega = args.omega.or(settings.config.omega).unwrap_or(1);
    build_ce(&l, &k, alpha, sigma, omega, settings.convention)
}

fn emit_plot(settings: &Settings, args: &CeArgs, ce: &CeFunction) -> Result<()> {
    let Some(plot_path) = &args.plot else { return Ok(()) };
    let direction: Vec<f64> = match &args.plot_direction {
        Some(text) => {
            let parsed: std::result::Result<Vec<f64>, _> =
                text.split(',').map(str::trim).map(str::parse).collect();
            parsed.map_err(|_| Error::Parse(format!("bad plot direction: {text}")))?
        }
        None => {
            let mut e = vec![0.0; ce.dim];
            e[0] = 1.0;
            e
        }
    };
    if direction.len() != ce.dim {
        return Err(Error::Parse("plot direction dimension mismatch".into()));
    }
    let norm = linalg::norm2(&direction);
    if !(norm > 0.0) {
        return Err(Error::Parse("plot direction must be nonzero".into()));
    }
    let e: Vec<f64> = linalg::scale_vec(&direction, 1.0 / norm);
    let points = settings.config.plot_points.unwrap_or(200);
    let r_max = ce.size + 5.0;
    let mut rows = Vec::with_capacity(points + 1);
    for i in 0..=points {
        let r = r_max * i as f64 / points as f64;
        let x = linalg::scale_vec(&e, r);
        rows.push(vec![r, ce.eval_f(&x), ce.eval_ft(&x)]);
    }
    let csv = report::to_csv_string(&["r", "f", "ft"], &rows);
    report::write_atomic(&settings.out_dir.join(plot_path), &csv)?;
    Ok(())
}

#[derive(Serialize)]
struct CeBuildReport {
    schema_version: u32,
    seed: u64,
    size: f64,
    f_zero: f64,
    ft_zero: f64,
    params: cohn_elkies::ReportParams,
    convention: String,
}

#[derive(Serialize)]
struct CeBoundOnly {
    schema_version: u32,
    seed: u64,
    size: f64,
    bound: f64,
    center_density: f64,
    ratio: f64,
}

fn ce_run(settings: &Settings, args: &CeArgs, mode: &str) -> Result<()> {
    let ce = build_from_args(settings, args)?;
    emit_plot(settings, args, &ce)?;
    match mode {
        "build" => {
            let (f0, ft0) = cohn_elkies::ce_values_at_zero(&ce)?;
            let range = cohn_elkies::parameter_range(
                ce.alpha,
                ce.sigma,
                ce.dual_covolume,
                ce.beta_cutoff,
                ce.dim,
            );
            let rep = CeBuildReport {
                schema_version: 1,
                seed: settings.seed,
                size: ce.size,
                f_zero: f0,
                ft_zero: ft0,
                params: cohn_elkies::ReportParams {
                    dim: ce.dim,
                    alpha: ce.alpha,
                    sigma: ce.sigma,
                    omega: ce.kernel.mu().omega(),
                    beta_cutoff: ce.beta_cutoff,
                    cutoff_constant: ce.cutoff_constant,
                    det_factor: ce.det_factor,
                    dual_shortest: ce.dual_shortest,
                    dual_covolume: ce.dual_covolume,
                    dual_critical: ce.dual_critical,
                    range_simple_margin: range.simple_margin,
                    range_exact_margin: range.exact_margin,
                },
                convention: ce.convention.to_string(),
            };
            emit(&settings.out_dir, "ce_build.json", &report::to_json_string(&rep)?)
        }
        "verify" => {
            let rep = cohn_elkies::verify_ce(&ce, &settings.verify)?;
            emit(&settings.out_dir, "ce_report.json", &report::to_json_string(&rep)?)
        }
        "bound" => {
            let b = cohn_elkies::ce_bound(&ce)?;
            let rep = CeBoundOnly {
                schema_version: 1,
                seed: settings.seed,
                size: ce.size,
                bound: b.bound,
                center_density: b.center_density,
                ratio: b.ratio,
            };
            emit(&settings.out_dir, "ce_bound.json", &report::to_json_string(&rep)?)
        }
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// periodic ce
// ---------------------------------------------------------------------------

fn periodic_ce(settings: &Settings, args: &PeriodicArgs) -> Result<()> {
    let sigma_set = load_periodic(&args.sigma_set)?;
    let k = load_lattice(&args.lattice_k)?;
    let sigma = args.sigma.or(settings.config.sigma).unwrap_or(1.0);
    let alpha = args
        .alpha
        .or(settings.config.alpha)
        .unwrap_or(std::f64::consts::PI * sigma / std::f64::consts::E);
    let omega = args.omega.or(settings.config.omega).unwrap_or(1);
    let pce =
        periodic::build_ce_periodic(&sigma_set, &k, alpha, sigma, omega, settings.convention)?;
    let rep = periodic::verify_ce_periodic(&pce, &settings.verify)?;
    emit(&settings.out_dir, "periodic_ce_report.json", &report::to_json_string(&rep)?)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn sweep(settings: &Settings, args: &SweepArgs) -> Result<()> {
    let mode = args
        .mode
        .clone()
        .or_else(|| settings.config.mode.clone())
        .unwrap_or_else(|| "ce".to_string());
    match mode.as_str() {
        "grassmann" => sweep_grassmann(settings),
        "ce" => sweep_ce(settings, args),
        other => Err(Error::Parse(format!("unknown sweep mode: {other}"))),
    }
}

fn sweep_grassmann(settings: &Settings) -> Result<()> {
    let ts = settings
        .config
        .grid_t
        .clone()
        .unwrap_or_else(|| (0..10).map(|i| 0.6 + 0.1 * i as f64).collect());
    if ts.len() > SWEEP_BUDGET {
        return Err(Error::Budget(format!("grid of {} points exceeds {SWEEP_BUDGET}", ts.len())));
    }
    let alpha = settings.config.alpha.unwrap_or(std::f64::consts::PI);
    let family: Vec<Lattice> = ts
        .iter()
        .map(|&t| Lattice::from_columns(&[vec![t, 0.0], vec![0.0, 1.0 / t]]))
        .collect::<Result<_>>()?;
    let scan = gabor::grassmannian_scan(alpha, &family)?;
    let rows: Vec<Vec<f64>> = scan
        .rows
        .iter()
        .map(|r| vec![r.index as f64, ts[r.index], r.correlation, r.scaled_shortest_len])
        .collect();
    let mut csv = report::to_csv_string(&["index", "t", "correlation", "scaled_shortest_len"], &rows);
    csv.push_str(&format!(
        "# argmin_correlation={} argmax_shortest={} agree={}\n",
        scan.argmin_correlation, scan.argmax_shortest, scan.agree
    ));
    report::write_atomic(&settings.out_dir.join("sweep.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn sweep_ce(settings: &Settings, args: &SweepArgs) -> Result<()> {
    let l = match &args.lattice_l {
        Some(p) => load_lattice(p)?,
        None => Lattice::standard(1),
    };
    let k = match &args.lattice_k {
        Some(p) => load_lattice(p)?,
        None => Lattice::standard(1).scale(1.0 / 16.0)?,
    };
    let sigmas = settings.config.grid_sigma.clone().unwrap_or_else(|| vec![1.0]);
    let alphas = settings.config.grid_alpha.clone().unwrap_or_else(|| {
        vec![std::f64::consts::PI / std::f64::consts::E]
    });
    if alphas.len() * sigmas.len() > SWEEP_BUDGET {
        return Err(Error::Budget(format!(
            "grid of {} points exceeds {SWEEP_BUDGET}",
            alphas.len() * sigmas.len()
        )));
    }
    let omega = settings.config.omega.unwrap_or(1);
    let mut rows = Vec::new();
    for &sigma in &sigmas {
        for &alpha in &alphas {
            let ce = build_ce(&l, &k, alpha, sigma, omega, settings.convention)?;
            let rep = cohn_elkies::verify_ce(&ce, &settings.verify)?;
            rows.push(vec![
                alpha,
                sigma,
                rep.size,
                rep.bound,
                rep.center_density,
                rep.ratio,
                f64::from(u8::from(rep.sign_ok)),
                rep.ft_ok_analytic.margin,
                f64::from(u8::from(rep.ft_ok_grid)),
                rep.ft_zero,
                rep.special_residual,
                rep.poisson_residual,
            ]);
        }
    }
    let csv = report::to_csv_string(
        &[
            "alpha",
            "sigma",
            "size",
            "bound",
            "center_density",
            "ratio",
            "sign_ok",
            "ft_margin",
            "ft_grid_ok",
            "ft_zero",
            "special_residual",
            "poisson_residual",
        ],
        &rows,
    );
    report::write_atomic(&settings.out_dir.join("sweep.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}
