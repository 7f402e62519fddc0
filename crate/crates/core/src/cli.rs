//! Command-line front end. Every subcommand resolves a [`RunConfig`] (JSON file, then
//! flags on top), runs one stage of the pipeline and writes CSV/JSON data files.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bifurcation::{exist_len_scan, sweep, Diagram, Family, SweepOpts};
use crate::checks::verdict;
use crate::integrate::{integrate_to, IntegratorOpts, Outcome, Tolerance};
use crate::problem::{PhasePoint, PhiKind, PhiModel, PhiSpec};
use crate::series::{build_expansion, certified_params, certify_convergence, envelope_m, SeriesParams};
use crate::spectrum::{discrete_spectrum, linearized_spectrum, SolutionProfile};
use crate::zset::{build_zcurve, default_d_range, intersect, ShootOpts, Side, ZCurve};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

// ---------------------------------------------------------------------------------------
// Configuration

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZsetConfig {
    pub station: f64,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub samples: usize,
}

impl Default for ZsetConfig {
    fn default() -> Self {
        Self { station: 0.0, d_min: None, d_max: None, samples: 160 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub c_min: f64,
    pub c_max: f64,
    pub seeds: usize,
    pub curve_samples: usize,
    pub spectrum_n: usize,
    pub l_half: f64,
    pub f_esc: f64,
    /// Existence-interval grid: `grid_c` values of c across the range times `grid_f0`
    /// values of f(0) in `[f0_min, f0_max]`.
    pub grid_c: usize,
    pub grid_f0: usize,
    pub f0_min: f64,
    pub f0_max: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let s = SweepOpts::default();
        Self {
            c_min: -1.2,
            c_max: 1.0,
            seeds: s.n_seeds,
            curve_samples: s.curve_samples,
            spectrum_n: s.spectrum_n,
            l_half: s.l_half,
            f_esc: s.f_esc,
            grid_c: 45,
            grid_f0: 41,
            f0_min: -2.5,
            f0_max: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesConfig {
    /// Pole of the exported expansion.
    pub d: f64,
    pub k: f64,
    pub alpha: f64,
    pub order: usize,
    pub d_min: f64,
    pub d_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub grid_d: usize,
    pub grid_r: usize,
    /// Radius used for the exported M(d) curve.
    pub m_radius: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            d: 0.0,
            k: 0.0,
            alpha: crate::series::DEFAULT_ALPHA,
            order: crate::series::DEFAULT_ORDER,
            d_min: -5.0,
            d_max: 5.0,
            r_min: 0.1,
            r_max: 5.0,
            grid_d: 81,
            grid_r: 50,
            m_radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub f0: f64,
    pub fp0: f64,
    pub l_half: f64,
    pub n: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { f0: 0.0, fp0: 0.0, l_half: crate::spectrum::DEFAULT_L_HALF, n: crate::spectrum::DEFAULT_N }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrateConfig {
    pub f0: f64,
    pub fp0: f64,
    pub x0: f64,
    pub x_end: f64,
}

impl Default for IntegrateConfig {
    fn default() -> Self {
        Self { f0: 0.0, fp0: 0.0, x0: 0.0, x_end: 10.0 }
    }
}

/// Everything a run needs. The pipeline is deterministic: no RNG is used anywhere, so
/// identical configs give byte-identical output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub phi: Option<PhiSpec>,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub x_bc: f64,
    pub x_verify: f64,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub zset: ZsetConfig,
    pub sweep: SweepConfig,
    pub series: SeriesConfig,
    pub spectrum: SpectrumConfig,
    pub integrate: IntegrateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let shoot = ShootOpts::default();
        Self {
            phi: None,
            tol_rel: shoot.tol.rtol,
            tol_abs: shoot.tol.atol,
            x_bc: shoot.x_bc,
            x_verify: shoot.x_verify,
            jobs: None,
            out: PathBuf::from("glosol-out"),
            zset: ZsetConfig::default(),
            sweep: SweepConfig::default(),
            series: SeriesConfig::default(),
            spectrum: SpectrumConfig::default(),
            integrate: IntegrateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("tol_rel", self.tol_rel),
            ("tol_abs", self.tol_abs),
            ("x_bc", self.x_bc),
            ("x_verify", self.x_verify),
            ("sweep.l_half", self.sweep.l_half),
            ("sweep.f_esc", self.sweep.f_esc),
            ("spectrum.l_half", self.spectrum.l_half),
            ("series.r_min", self.series.r_min),
            ("series.m_radius", self.series.m_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        if !(self.sweep.c_min < self.sweep.c_max) {
            return Err(CliError::Config(format!(
                "empty parameter range [{}, {}]",
                self.sweep.c_min, self.sweep.c_max
            )));
        }
        if !(self.series.d_min < self.series.d_max && self.series.r_min < self.series.r_max) {
            return Err(CliError::Config("series grid needs d_min < d_max and r_min < r_max".into()));
        }
        if !(self.sweep.f0_min < self.sweep.f0_max) {
            return Err(CliError::Config("sweep grid needs f0_min < f0_max".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tol_rel, self.tol_abs)
    }

    pub fn shoot_opts(&self) -> ShootOpts {
        ShootOpts { tol: self.tolerance(), x_bc: self.x_bc, x_verify: self.x_verify, ..ShootOpts::default() }
    }

    pub fn phi_model(&self) -> Result<PhiModel, CliError> {
        let spec = self.phi.clone().ok_or_else(|| CliError::Usage("--phi is required".into()))?;
        PhiModel::try_from(spec).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn family(&self) -> Result<Family, CliError> {
        let spec = self.phi.clone().ok_or_else(|| CliError::Usage("--phi is required".into()))?;
        match spec.kind {
            PhiKind::Gaussian => Ok(Family::Gaussian),
            PhiKind::HermiteGaussian => Ok(Family::HermiteGaussian),
            PhiKind::Tabulated => {
                let rows = spec.table.ok_or_else(|| CliError::Config("tabulated phi needs a table".into()))?;
                Ok(Family::ScaledTable { rows })
            }
            PhiKind::Constant => Err(CliError::Usage("constant phi has no parameter family to sweep".into())),
        }
    }

    pub fn sweep_opts(&self) -> SweepOpts {
        SweepOpts {
            shoot: self.shoot_opts(),
            n_seeds: self.sweep.seeds,
            curve_samples: self.sweep.curve_samples,
            spectrum_n: self.sweep.spectrum_n,
            l_half: self.sweep.l_half,
            f_esc: self.sweep.f_esc,
            ..SweepOpts::default()
        }
    }
}

// ---------------------------------------------------------------------------------------
// Arguments

#[derive(Debug, Parser)]
#[command(name = "glosol", version, about = "Global solutions of f'' = f^2 - phi(x)")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// gaussian | hermite_gaussian | constant | tabulated FILE (CSV rows x,phi,dphi or JSON)
    #[arg(long, global = true, num_args = 1..=2, value_names = ["KIND", "FILE"])]
    pub phi: Vec<String>,
    /// Family parameter (c, or P for constant phi; scales a tabulated profile).
    #[arg(long = "c", visible_alias = "P", global = true, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    #[arg(long, global = true)]
    pub x_bc: Option<f64>,
    #[arg(long, global = true)]
    pub x_verify: Option<f64>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the existence and uniqueness checks and print a JSON report.
    Verdict,
    /// Sample Z and Z' at a station and refine their intersections.
    Zset {
        #[arg(long, allow_negative_numbers = true)]
        station: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        d_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        d_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Continue global solutions across the family and emit the bifurcation diagram.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        c_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c_max: Option<f64>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        grid_c: Option<usize>,
        #[arg(long)]
        grid_f0: Option<usize>,
    },
    /// Export series coefficients, the convergence region and M(d).
    Series {
        #[arg(long, allow_negative_numbers = true)]
        d: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k: Option<f64>,
    },
    /// Spectrum of d^2/dx^2 - 2f about the solution through (f0, fp0) at x = 0.
    Spectrum {
        #[arg(long, allow_negative_numbers = true)]
        f0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        fp0: Option<f64>,
        #[arg(long)]
        l_half: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Integrate one trajectory.
    Integrate {
        #[arg(long, allow_negative_numbers = true)]
        f0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        fp0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_end: Option<f64>,
    },
}

/// Reads a tabulated profile: a JSON array of `[x, phi, dphi]` rows, or CSV with one
/// row per line (a non-numeric header line and `#` comments are skipped).
pub fn read_table(path: &Path) -> Result<Vec<[f64; 3]>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())));
    }
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match vals {
            Ok(v) if v.len() == 3 => rows.push([v[0], v[1], v[2]]),
            Err(_) if rows.is_empty() && i == 0 => continue,
            _ => return Err(CliError::Config(format!("{}:{}: expected x,phi,dphi", path.display(), i + 1))),
        }
    }
    Ok(rows)
}

fn phi_spec(args: &[String], c: Option<f64>, base: Option<&PhiSpec>) -> Result<Option<PhiSpec>, CliError> {
    let Some(kind) = args.first() else {
        // No --phi: keep the config's phi, with --c overriding its parameter.
        return Ok(base.cloned().map(|mut s| {
            if let Some(c) = c {
                s.param = c;
            }
            s
        }));
    };
    let kind: PhiKind = serde_json::from_value(serde_json::Value::String(kind.clone()))
        .map_err(|_| CliError::Usage(format!("unknown phi kind {kind:?}")))?;
    match kind {
        PhiKind::Tabulated => {
            let path = args.get(1).ok_or_else(|| CliError::Usage("--phi tabulated needs a FILE".into()))?;
            let scale = c.unwrap_or(1.0);
            let rows = read_table(Path::new(path))?
                .into_iter()
                .map(|r| [r[0], scale * r[1], scale * r[2]])
                .collect();
            Ok(Some(PhiSpec { kind, param: 0.0, table: Some(rows) }))
        }
        _ => {
            if args.len() > 1 {
                return Err(CliError::Usage(format!("--phi {} takes no file", args[0])));
            }
            let param = c.or(base.filter(|b| b.kind == kind).map(|b| b.param));
            Ok(Some(PhiSpec { kind, param: param.unwrap_or(0.0), table: None }))
        }
    }
}

/// Builds the effective config: defaults, then the `--config` file, then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let a = &cli.common;
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.phi = phi_spec(&a.phi, a.c, cfg.phi.as_ref())?;
    fn set<T: Copy>(dst: &mut T, v: Option<T>) {
        if let Some(v) = v {
            *dst = v;
        }
    }
    set(&mut cfg.tol_rel, a.tol_rel);
    set(&mut cfg.tol_abs, a.tol_abs);
    set(&mut cfg.x_bc, a.x_bc);
    set(&mut cfg.x_verify, a.x_verify);
    if a.jobs.is_some() {
        cfg.jobs = a.jobs;
    }
    if let Some(o) = &a.out {
        cfg.out = o.clone();
    }
    match &cli.command {
        Command::Verdict => {}
        Command::Zset { station, d_min, d_max, samples } => {
            set(&mut cfg.zset.station, *station);
            if d_min.is_some() {
                cfg.zset.d_min = *d_min;
            }
            if d_max.is_some() {
                cfg.zset.d_max = *d_max;
            }
            set(&mut cfg.zset.samples, *samples);
        }
        Command::Sweep { c_min, c_max, seeds, grid_c, grid_f0 } => {
            set(&mut cfg.sweep.c_min, *c_min);
            set(&mut cfg.sweep.c_max, *c_max);
            set(&mut cfg.sweep.seeds, *seeds);
            set(&mut cfg.sweep.grid_c, *grid_c);
            set(&mut cfg.sweep.grid_f0, *grid_f0);
        }
        Command::Series { d, k } => {
            set(&mut cfg.series.d, *d);
            set(&mut cfg.series.k, *k);
        }
        Command::Spectrum { f0, fp0, l_half, n } => {
            set(&mut cfg.spectrum.f0, *f0);
            set(&mut cfg.spectrum.fp0, *fp0);
            set(&mut cfg.spectrum.l_half, *l_half);
            set(&mut cfg.spectrum.n, *n);
        }
        Command::Integrate { f0, fp0, x0, x_end } => {
            set(&mut cfg.integrate.f0, *f0);
            set(&mut cfg.integrate.fp0, *fp0);
            set(&mut cfg.integrate.x0, *x0);
            set(&mut cfg.integrate.x_end, *x_end);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

// ---------------------------------------------------------------------------------------
// Output

/// Shortest representation that parses back to the same double.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_line(buf: &mut String, cols: &[String]) {
    let _ = writeln!(buf, "{}", cols.join(","));
}

struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        s.push('\n');
        self.write(name, &s)
    }
}

/// What a run produced; printed as JSON on stdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub out: Option<PathBuf>,
    pub files: Vec<String>,
    pub summary: serde_json::Value,
}

fn zcurve_csv(z: &ZCurve) -> String {
    // Rows ascend in d; the curve's end (d = -inf) comes first.
    let mut s = String::from("d,amplitude,f,fp\n");
    if let Some(b) = z.boundary {
        csv_line(&mut s, &[num(f64::NEG_INFINITY), num(0.0), num(b.f), num(b.fp)]);
    }
    for p in &z.points {
        csv_line(&mut s, &[num(p.seed_d), num(p.amplitude), num(p.f), num(p.fp)]);
    }
    s
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

// ---------------------------------------------------------------------------------------
// Commands

pub fn cmd_verdict(cfg: &RunConfig, write_file: bool) -> Result<Report, CliError> {
    let phi = cfg.phi_model()?;
    let v = verdict(&phi).map_err(numerical)?;
    let mut files = Vec::new();
    if write_file {
        let mut out = Output::new(&cfg.out)?;
        out.json("verdict.json", &v)?;
        files = out.files;
    }
    let summary = serde_json::to_value(&v).map_err(numerical)?;
    Ok(Report { command: "verdict".into(), out: write_file.then(|| cfg.out.clone()), files, summary })
}

pub fn cmd_zset(cfg: &RunConfig) -> Result<Report, CliError> {
    let phi = cfg.phi_model()?;
    let opts = cfg.shoot_opts();
    let z = &cfg.zset;
    let (lo, hi) = default_d_range(z.station);
    let range = (z.d_min.unwrap_or(lo), z.d_max.unwrap_or(hi));
    let zf = build_zcurve(&phi, z.station, range, z.samples, Side::Forward, &opts).map_err(numerical)?;
    let zb = build_zcurve(&phi, z.station, range, z.samples, Side::Backward, &opts).map_err(numerical)?;
    let xs = intersect(&zf, &zb).map_err(numerical)?;
    let mut out = Output::new(&cfg.out)?;
    out.write("zcurve_fwd.csv", &zcurve_csv(&zf))?;
    out.write("zcurve_bwd.csv", &zcurve_csv(&zb))?;
    out.json("intersections.json", &xs)?;
    let summary = serde_json::json!({
        "fwd_points": zf.points.len(),
        "bwd_points": zb.points.len(),
        "intersections": xs.len(),
    });
    Ok(Report { command: "zset".into(), out: Some(cfg.out.clone()), files: out.files, summary })
}

fn diagram_csv(d: &Diagram) -> String {
    let mut s = String::from("branch,c,f0,fp0,n_positive,smallest_abs,exist_len,status\n");
    for (i, b) in d.branches.iter().enumerate() {
        for p in &b.points {
            let status = serde_json::to_value(p.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            csv_line(
                &mut s,
                &[
                    i.to_string(),
                    num(p.c),
                    num(p.f0),
                    num(p.fp0),
                    p.n_positive().map(|n| n.to_string()).unwrap_or_default(),
                    opt_num(p.spectral.as_ref().map(|x| x.smallest_abs)),
                    num(p.exist_len),
                    status,
                ],
            );
        }
    }
    s
}

fn small_eig_csv(d: &Diagram) -> String {
    let mut s = String::from("branch,symmetric,c,f0,fp0,smallest_abs,top_eigenvalue\n");
    for (i, b) in d.branches.iter().enumerate() {
        for p in &b.points {
            let sp = p.spectral.as_ref();
            csv_line(
                &mut s,
                &[
                    i.to_string(),
                    b.symmetric.to_string(),
                    num(p.c),
                    num(p.f0),
                    num(p.fp0),
                    opt_num(sp.map(|x| x.smallest_abs)),
                    opt_num(sp.and_then(|x| x.eigenvalues_head.first().copied())),
                ],
            );
        }
    }
    s
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let family = cfg.family()?;
    let sc = &cfg.sweep;
    let opts = cfg.sweep_opts();
    let diagram = sweep(&family, (sc.c_min, sc.c_max), &opts).map_err(numerical)?;
    let cs = linspace(sc.c_min, sc.c_max, sc.grid_c);
    let f0s = linspace(sc.f0_min, sc.f0_max, sc.grid_f0);
    let grid = exist_len_scan(&family, &cs, &f0s, sc.f_esc, cfg.x_verify, cfg.tolerance()).map_err(numerical)?;
    let mut exist = String::from("c,f0,exist_len\n");
    for (c, f0, len) in grid {
        csv_line(&mut exist, &[num(c), num(f0), num(len)]);
    }
    let mut out = Output::new(&cfg.out)?;
    out.write("diagram.csv", &diagram_csv(&diagram))?;
    out.json("diagram.json", &diagram)?;
    out.write("small_eig.csv", &small_eig_csv(&diagram))?;
    out.write("exist_len.csv", &exist)?;
    let summary = serde_json::json!({
        "branches": diagram.branches.len(),
        "folds": diagram.folds.iter().map(|f| f.c).collect::<Vec<_>>(),
        "pitchforks": diagram.pitchforks.iter().map(|p| p.c).collect::<Vec<_>>(),
        "ends": diagram.ends.iter().map(|e| e.c).collect::<Vec<_>>(),
        "flagged_points": diagram.branches.iter().flat_map(|b| &b.points).filter(|p| p.flagged()).count(),
    });
    Ok(Report { command: "sweep".into(), out: Some(cfg.out.clone()), files: out.files, summary })
}

pub fn cmd_series(cfg: &RunConfig) -> Result<Report, CliError> {
    let phi = cfg.phi_model()?;
    let sc = &cfg.series;
    let params = certified_params(&phi, sc.d, sc.k, sc.alpha, sc.order).map_err(numerical)?;
    let table = build_expansion(&phi, &params).map_err(numerical)?.table();
    let ds = linspace(sc.d_min, sc.d_max, sc.grid_d);
    let rs = linspace(sc.r_min, sc.r_max, sc.grid_r);
    let mut region = String::from("d,r,m,converges\n");
    for &d in &ds {
        for &r in &rs {
            let m = envelope_m(&phi, d, sc.alpha, r).map_err(numerical)?;
            let p = SeriesParams { d, k: sc.k, m, alpha: sc.alpha, r, order: sc.order };
            csv_line(&mut region, &[num(d), num(r), num(m), certify_convergence(&p).to_string()]);
        }
    }
    let mut m_curve = String::from("d,m\n");
    for &d in &ds {
        let m = envelope_m(&phi, d, sc.alpha, sc.m_radius).map_err(numerical)?;
        csv_line(&mut m_curve, &[num(d), num(m)]);
    }
    let mut out = Output::new(&cfg.out)?;
    out.json("series_coeffs.json", &table)?;
    out.write("convergence_region.csv", &region)?;
    out.write("m_curve.csv", &m_curve)?;
    let summary = serde_json::to_value(params).map_err(numerical)?;
    Ok(Report { command: "series".into(), out: Some(cfg.out.clone()), files: out.files, summary })
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let phi = cfg.phi_model()?;
    let sc = &cfg.spectrum;
    let profile = SolutionProfile::from_point(&phi, sc.f0, sc.fp0, sc.l_half, cfg.tolerance()).map_err(numerical)?;
    let summary = linearized_spectrum(&profile, sc.l_half, sc.n).map_err(numerical)?;
    let f = |x: f64| profile.eval(x).unwrap_or(0.0);
    let all = discrete_spectrum(f, sc.l_half, sc.n).map_err(numerical)?;
    let mut csv = String::from("index,eigenvalue\n");
    for (i, l) in all.iter().enumerate() {
        csv_line(&mut csv, &[i.to_string(), num(*l)]);
    }
    let mut out = Output::new(&cfg.out)?;
    out.json("spectrum.json", &summary)?;
    out.write("eigenvalues.csv", &csv)?;
    let value = serde_json::to_value(&summary).map_err(numerical)?;
    Ok(Report { command: "spectrum".into(), out: Some(cfg.out.clone()), files: out.files, summary: value })
}

pub fn cmd_integrate(cfg: &RunConfig) -> Result<Report, CliError> {
    let phi = cfg.phi_model()?;
    let ic = &cfg.integrate;
    let start = PhasePoint::new(ic.f0, ic.fp0, ic.x0);
    let traj = integrate_to(&start, ic.x_end, &phi, &IntegratorOpts::with_tol(cfg.tolerance())).map_err(numerical)?;
    let mut csv = String::from("x,f,fp\n");
    for p in &traj.samples {
        csv_line(&mut csv, &[num(p.x), num(p.f), num(p.fp)]);
    }
    let mut out = Output::new(&cfg.out)?;
    out.write("trajectory.csv", &csv)?;
    out.json("trajectory.json", &traj.record())?;
    if let Outcome::ToleranceFailure { x } = traj.outcome {
        return Err(CliError::Numerical(format!("step size underflow at x = {x}")));
    }
    let summary = serde_json::json!({ "outcome": traj.outcome, "samples": traj.samples.len() });
    Ok(Report { command: "integrate".into(), out: Some(cfg.out.clone()), files: out.files, summary })
}

/// Resolves the config and runs the subcommand on a pool of `jobs` workers.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = resolve_config(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Verdict => cmd_verdict(&cfg, cli.common.out.is_some()),
        Command::Zset { .. } => cmd_zset(&cfg),
        Command::Sweep { .. } => cmd_sweep(&cfg),
        Command::Series { .. } => cmd_series(&cfg),
        Command::Spectrum { .. } => cmd_spectrum(&cfg),
        Command::Integrate { .. } => cmd_integrate(&cfg),
    })
}

/// Parses `args`, runs, prints the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            match serde_json::to_string_pretty(&report) {
                Ok(s) => println!("{s}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
