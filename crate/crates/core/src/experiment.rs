//! Experiment drivers behind the command-line tool: per-subcommand reports,
//! figure-style sweeps and configuration diagnostics. Everything returns a
//! [`Table`] that renders to CSV or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::bias::{bias_theorem1, bias_theorem2, relative_gap};
use crate::config::{ExperimentConfig, OutputFormat, SweepVariable};
use crate::contour::{lss_mean, ContourSpec, SpectralFn};
use crate::error::{Error, Result};
use crate::fixed_point::{resolvent_trace_de, solve, SpectralPoint};
use crate::linalg::spectral_norm;
use crate::mi::{mi_clt, nats_to_bits, outage_probability, outage_probability_gaussian};
use crate::model::{cv_of, default_norm_cap, moments_of, ChannelModel, EntryDistribution};
use crate::monte_carlo::stats::{ecdf_at, ks_distance};
use crate::monte_carlo::{run_mi_experiment_with, run_resolvent_experiment_with, McOptions};
use crate::quantities::table1;
use crate::special::{normal_cdf, normal_pdf};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Shortest round-trip digits, with an exponent for very small or large values.
            Cell::Real(x) => format!("{x:?}"),
            Cell::Int(x) => x.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Rows under a fixed header. A failure note marks partial output.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            failure: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Look up a value in a `quantity,...` style table.
    pub fn get(&self, key: &str, column: &str) -> Option<&Cell> {
        let col = self.columns.iter().position(|c| c == column)?;
        self.rows
            .iter()
            .find(|r| matches!(&r[0], Cell::Text(s) if s == key))
            .map(|r| &r[col])
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        if let Some(msg) = &self.failure {
            let _ = writeln!(out, "# failed: {}", msg.replace('\n', " "));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// A table plus the error that cut it short, if any.
#[derive(Debug)]
pub struct Report {
    pub table: Table,
    pub error: Option<Error>,
}

impl Report {
    fn complete(table: Table) -> Self {
        Report { table, error: None }
    }
}

fn complex_row(name: &str, v: Complex64) -> Vec<Cell> {
    vec![name.into(), v.re.into(), v.im.into()]
}

fn mc_options(cfg: &ExperimentConfig, workers: Option<usize>) -> McOptions {
    McOptions {
        workers,
        solver: cfg.solver,
        ..McOptions::default()
    }
}

pub fn solve_report(cfg: &ExperimentConfig) -> Result<Table> {
    let model = cfg.model()?;
    let z = cfg.spectral_point()?;
    let sol = solve(&model, z, &cfg.solver)?;
    let mut t = Table::new(&["quantity", "re", "im"]);
    t.push(complex_row("z", z.z()));
    t.push(complex_row("delta", sol.delta));
    t.push(complex_row("delta_t", sol.delta_t));
    t.push(complex_row("trace_T", resolvent_trace_de(&sol)));
    t.push(complex_row("trace_Tt", sol.tt.trace()));
    t.push(vec!["iterations".into(), sol.iterations.into(), Cell::Empty]);
    t.push(vec!["residual".into(), sol.residual.into(), Cell::Empty]);
    Ok(t)
}

pub fn quantities_report(cfg: &ExperimentConfig) -> Result<Table> {
    let model = cfg.model()?;
    let sol = solve(&model, cfg.spectral_point()?, &cfg.solver)?;
    let q = table1(&model, &sol)?;
    let mut t = Table::new(&["quantity", "re", "im"]);
    for (name, v) in q.scalars() {
        t.push(complex_row(name, v));
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BiasSelection {
    T1,
    T2,
    Both,
}

impl FromStr for BiasSelection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(BiasSelection::T1),
            "t2" => Ok(BiasSelection::T2),
            "both" => Ok(BiasSelection::Both),
            _ => Err(Error::Config(format!("unknown method {s:?}; expected t1, t2 or both"))),
        }
    }
}

/// Relative finite-difference step used when none is given.
pub const DEFAULT_STEP: f64 = 1e-4;

pub fn bias_report(cfg: &ExperimentConfig, method: BiasSelection, h: Option<f64>) -> Result<Table> {
    let model = cfg.model()?;
    let z = cfg.spectral_point()?;
    let h = h.unwrap_or(DEFAULT_STEP * z.z().norm());
    let mut t = Table::new(&["quantity", "re", "im"]);
    let t1 = match method {
        BiasSelection::T2 => None,
        _ => Some(bias_theorem1(&model, &solve(&model, z, &cfg.solver)?)?),
    };
    let t2 = match method {
        BiasSelection::T1 => None,
        _ => Some(bias_theorem2(&model, z, h, &cfg.solver)?),
    };
    t.push(complex_row("z", z.z()));
    if let Some(b) = &t1 {
        t.push(complex_row("t1_b_theta", b.b_theta));
        t.push(complex_row("t1_b_kappa", b.b_kappa));
        t.push(complex_row("t1_total", b.total));
    }
    if let Some(b) = &t2 {
        t.push(complex_row("t2_b_theta", b.b_theta));
        t.push(complex_row("t2_b_kappa", b.b_kappa));
        t.push(complex_row("t2_total", b.total));
    }
    if let (Some(a), Some(b)) = (&t1, &t2) {
        t.push(vec!["relative_gap".into(), relative_gap(a, b).into(), Cell::Empty]);
    }
    Ok(t)
}

pub fn lss_report(cfg: &ExperimentConfig, f: &SpectralFn, nodes: Option<usize>, margin: Option<f64>) -> Result<Table> {
    let model = cfg.model()?;
    let mut spec = ContourSpec::for_function(&model, f);
    if let Some(n) = nodes {
        spec.nodes = n;
    }
    if let Some(m) = margin {
        spec.margin = m;
    }
    let r = lss_mean(&model, f, &spec, &cfg.solver)?;
    let mut t = Table::new(&["quantity", "re", "im"]);
    t.push(complex_row("V_f", r.v_f));
    t.push(complex_row("B_f", r.b_f));
    t.push(vec!["u_plus".into(), spec.u_plus.into(), Cell::Empty]);
    t.push(vec!["margin".into(), spec.margin.into(), Cell::Empty]);
    t.push(vec!["nodes".into(), spec.nodes.into(), Cell::Empty]);
    Ok(t)
}

pub fn clt_report(cfg: &ExperimentConfig, bits: bool) -> Result<Table> {
    let model = cfg.model()?;
    let s = mi_clt(&model, cfg.sigma2, &cfg.solver)?;
    // Variances scale by the square of the unit conversion.
    let (u, u2) = if bits {
        (nats_to_bits(1.0), nats_to_bits(1.0).powi(2))
    } else {
        (1.0, 1.0)
    };
    let mut t = Table::new(&["quantity", "value"]);
    t.push(vec!["sigma2".into(), s.sigma2.into()]);
    t.push(vec!["V".into(), (s.v * u).into()]);
    t.push(vec!["B_C".into(), (s.b_c * u).into()]);
    t.push(vec!["B_C_theta".into(), (s.b_c_theta * u).into()]);
    t.push(vec!["B_C_kappa".into(), (s.b_c_kappa * u).into()]);
    t.push(vec!["Theta_G".into(), (s.theta_g * u2).into()]);
    t.push(vec!["Theta_B".into(), (s.theta_b * u2).into()]);
    t.push(vec!["Theta".into(), (s.theta * u2).into()]);
    t.push(vec!["mean".into(), (s.mean * u).into()]);
    Ok(t)
}

pub fn outage_report(cfg: &ExperimentConfig, rates: &[f64]) -> Result<Table> {
    let model = cfg.model()?;
    let s = mi_clt(&model, cfg.sigma2, &cfg.solver)?;
    let mut t = Table::new(&["rate", "p_out"]);
    for &r in rates {
        t.push(vec![r.into(), outage_probability(&s, r).into()]);
    }
    Ok(t)
}

/// Summary rows `quantity,value,stderr`; optionally also returns the MI
/// samples (sorted, capped).
pub fn mc_report(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<(Table, Vec<f64>)> {
    let model = cfg.model()?;
    let opts = mc_options(cfg, workers);
    let s = run_mi_experiment_with(&model, &cfg.scenario.entry, cfg.sigma2, cfg.mc.trials, cfg.mc.seed, &opts)?;
    let stats = mi_clt(&model, cfg.sigma2, &cfg.solver)?;
    let ks = ks_distance(&s.ecdf, |x| normal_cdf((x - stats.mean) / stats.theta.sqrt()));
    let mut t = Table::new(&["quantity", "value", "stderr"]);
    t.push(vec!["trials".into(), s.trials.into(), Cell::Empty]);
    t.push(vec!["seed".into(), s.seed.into(), Cell::Empty]);
    t.push(vec!["sigma2".into(), s.sigma2.into(), Cell::Empty]);
    t.push(vec!["mean_C".into(), s.mean_c.into(), s.se_mean.into()]);
    t.push(vec!["var_C".into(), s.var_c.into(), s.se_var.into()]);
    t.push(vec!["emp_bias_mean".into(), s.emp_bias_mean.into(), s.se_mean.into()]);
    t.push(vec!["emp_bias_var".into(), s.emp_bias_var.into(), s.se_var.into()]);
    t.push(vec!["emp_resolvent_bias".into(), s.emp_resolvent_bias.re.into(), s.se_resolvent.into()]);
    t.push(vec!["V".into(), stats.v.into(), Cell::Empty]);
    t.push(vec!["B_C".into(), stats.b_c.into(), Cell::Empty]);
    t.push(vec!["Theta_G".into(), stats.theta_g.into(), Cell::Empty]);
    t.push(vec!["Theta".into(), stats.theta.into(), Cell::Empty]);
    t.push(vec!["ks_modified_clt".into(), ks.into(), Cell::Empty]);
    Ok((t, s.ecdf))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    BiasVsN,
    CltPdf,
    CdfComparison,
    OutageVsSnr,
    CvVsVariance,
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bias_vs_N" | "bias_vs_n" => Ok(Figure::BiasVsN),
            "clt_pdf" => Ok(Figure::CltPdf),
            "cdf_comparison" => Ok(Figure::CdfComparison),
            "outage_vs_snr" => Ok(Figure::OutageVsSnr),
            "cv_vs_variance" => Ok(Figure::CvVsVariance),
            _ => Err(Error::Config(format!("unknown figure {s:?}"))),
        }
    }
}

fn sweep_values(cfg: &ExperimentConfig, variable: SweepVariable, default: &[f64]) -> Vec<f64> {
    match &cfg.sweep {
        Some(s) if s.variable == variable => s.values.clone(),
        _ => default.to_vec(),
    }
}

/// Run the pipeline behind one figure. Sweeps stop at the first failing
/// point and return what they have together with the error.
pub fn reproduce(figure: Figure, cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    match figure {
        Figure::BiasVsN => bias_vs_n(cfg, workers),
        Figure::CltPdf => clt_pdf(cfg, workers).map(Report::complete),
        Figure::CdfComparison => cdf_comparison(cfg, workers).map(Report::complete),
        Figure::OutageVsSnr => outage_vs_snr(cfg, workers),
        Figure::CvVsVariance => cv_vs_variance(cfg, workers),
    }
}

fn sweep<F>(mut table: Table, values: &[f64], mut row: F) -> Report
where
    F: FnMut(f64) -> Result<Vec<Cell>>,
{
    for &v in values {
        match row(v) {
            Ok(r) => table.push(r),
            Err(e) => {
                table.failure = Some(format!("at {v}: {e}"));
                return Report { table, error: Some(e) };
            }
        }
    }
    Report::complete(table)
}

fn bias_vs_n(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let ns = sweep_values(cfg, SweepVariable::N, &[8.0, 16.0, 32.0, 64.0]);
    let table = Table::new(&[
        "N",
        "M",
        "analytic_bias",
        "emp_resolvent_bias",
        "se_resolvent",
        "analytic_B_C",
        "emp_bias_mean",
        "se_mean",
        "analytic_Theta_B",
        "emp_bias_var",
        "se_var",
    ]);
    let opts = mc_options(cfg, workers);
    let z = cfg.spectral_point()?;
    let at_noise = z.z() == Complex64::new(-cfg.sigma2, 0.0);
    Ok(sweep(table, &ns, |n| {
        let scenario = cfg.scenario.with_n(n as usize)?;
        let model = scenario.build(&cfg.base_dir)?;
        let sol = solve(&model, z, &cfg.solver)?;
        let b = bias_theorem1(&model, &sol)?;
        let stats = mi_clt(&model, cfg.sigma2, &cfg.solver)?;
        let s = run_mi_experiment_with(&model, &scenario.entry, cfg.sigma2, cfg.mc.trials, cfg.mc.seed, &opts)?;
        let (emp_res, se_res) = if at_noise {
            (s.emp_resolvent_bias.re, s.se_resolvent)
        } else {
            let r = run_resolvent_experiment_with(&model, &scenario.entry, z, cfg.mc.trials, cfg.mc.seed, &opts)?;
            (r.bias.re, r.se_re)
        };
        Ok(vec![
            model.n().into(),
            model.m().into(),
            b.total.re.into(),
            emp_res.into(),
            se_res.into(),
            stats.b_c.into(),
            s.emp_bias_mean.into(),
            s.se_mean.into(),
            stats.theta_b.into(),
            s.emp_bias_var.into(),
            s.se_var.into(),
        ])
    }))
}

const PDF_BINS: usize = 40;
const PDF_RANGE: f64 = 4.0;

fn histogram(samples: impl Iterator<Item = f64>, total: usize) -> Vec<f64> {
    let width = 2.0 * PDF_RANGE / PDF_BINS as f64;
    let mut counts = vec![0usize; PDF_BINS];
    for x in samples {
        let k = ((x + PDF_RANGE) / width).floor();
        if k >= 0.0 && (k as usize) < PDF_BINS {
            counts[k as usize] += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / (total as f64 * width)).collect()
}

fn clt_pdf(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Table> {
    let model = cfg.model()?;
    let stats = mi_clt(&model, cfg.sigma2, &cfg.solver)?;
    let s = run_mi_experiment_with(&model, &cfg.scenario.entry, cfg.sigma2, cfg.mc.trials, cfg.mc.seed, &mc_options(cfg, workers))?;
    let n = s.ecdf.len();
    let modified = histogram(s.ecdf.iter().map(|c| (c - stats.mean) / stats.theta.sqrt()), n);
    let gaussian = histogram(s.ecdf.iter().map(|c| (c - stats.v) / stats.theta_g.sqrt()), n);
    let width = 2.0 * PDF_RANGE / PDF_BINS as f64;
    let mut t = Table::new(&["x", "density_modified", "density_gaussian_clt", "normal_pdf"]);
    for k in 0..PDF_BINS {
        let x = -PDF_RANGE + (k as f64 + 0.5) * width;
        t.push(vec![x.into(), modified[k].into(), gaussian[k].into(), normal_pdf(x).into()]);
    }
    Ok(t)
}

fn cdf_comparison(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Table> {
    let model = cfg.model()?;
    let stats = mi_clt(&model, cfg.sigma2, &cfg.solver)?;
    let s = run_mi_experiment_with(&model, &cfg.scenario.entry, cfg.sigma2, cfg.mc.trials, cfg.mc.seed, &mc_options(cfg, workers))?;
    let (lo, hi) = (s.ecdf[0], s.ecdf[s.ecdf.len() - 1]);
    let mut t = Table::new(&["rate", "ecdf", "cdf_modified", "cdf_gaussian"]);
    let points = 101;
    for k in 0..points {
        let r = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        t.push(vec![
            r.into(),
            ecdf_at(&s.ecdf, r).into(),
            outage_probability(&stats, r).into(),
            outage_probability_gaussian(&stats, r).into(),
        ]);
    }
    Ok(t)
}

fn outage_vs_snr(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let rate = cfg
        .rate
        .ok_or_else(|| Error::Config("outage_vs_snr needs `rate` in the configuration".into()))?;
    let sigmas = sweep_values(cfg, SweepVariable::Sigma2, &[0.05, 0.1, 0.2, 0.5, 1.0]);
    let model = cfg.model()?;
    let opts = mc_options(cfg, workers);
    let table = Table::new(&[
        "snr_db",
        "sigma2",
        "rate",
        "p_out_analytic",
        "p_out_gaussian",
        "p_out_empirical",
        "se_empirical",
    ]);
    Ok(sweep(table, &sigmas, |s2| {
        let stats = mi_clt(&model, s2, &cfg.solver)?;
        let s = run_mi_experiment_with(&model, &cfg.scenario.entry, s2, cfg.mc.trials, cfg.mc.seed, &opts)?;
        let p = ecdf_at(&s.ecdf, rate);
        let se = (p * (1.0 - p) / s.ecdf.len() as f64).sqrt();
        Ok(vec![
            (-10.0 * s2.log10()).into(),
            s2.into(),
            rate.into(),
            outage_probability(&stats, rate).into(),
            outage_probability_gaussian(&stats, rate).into(),
            p.into(),
            se.into(),
        ])
    }))
}

/// Law parameter giving coefficient of variation `target` at the
/// distribution's weights, by bisection.
pub fn parameter_for_cv(dist: &EntryDistribution, target: f64) -> Result<f64> {
    use crate::model::ModulusLaw;
    let (lo, hi) = match dist.modulus_law {
        ModulusLaw::Weibull { .. } => (0.3, 50.0),
        ModulusLaw::Lognormal { .. } => (0.0, 2.0),
        ModulusLaw::Nakagami { .. } => (0.05, 1e3),
    };
    let cv = |p: f64| -> Result<f64> {
        cv_of(&EntryDistribution {
            modulus_law: dist.modulus_law.with_parameter(p),
            ..*dist
        })
    };
    let (f_lo, f_hi) = (cv(lo)? - target, cv(hi)? - target);
    if f_lo * f_hi > 0.0 {
        return Err(Error::Domain(format!(
            "CV {target} is out of reach for the {} law at these weights",
            dist.modulus_law.name()
        )));
    }
    let (mut a, mut b, mut fa) = (lo, hi, f_lo);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = cv(mid)? - target;
        if fm == 0.0 || (b - a) < 1e-13 * b.abs().max(1.0) {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

fn cv_vs_variance(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Report> {
    let cvs = sweep_values(cfg, SweepVariable::Cv, &[0.6, 0.8, 1.0, 1.2]);
    let base = cfg.model()?;
    let opts = mc_options(cfg, workers);
    let table = Table::new(&[
        "cv",
        "law_parameter",
        "kappa",
        "Theta_G",
        "Theta_B",
        "Theta",
        "var_C",
        "se_var",
    ]);
    Ok(sweep(table, &cvs, |cv| {
        let p = parameter_for_cv(&cfg.scenario.entry, cv)?;
        let dist = EntryDistribution {
            modulus_law: cfg.scenario.entry.modulus_law.with_parameter(p),
            ..cfg.scenario.entry
        };
        let model = base.with_moments(moments_of(&dist)?)?;
        let stats = mi_clt(&model, cfg.sigma2, &cfg.solver)?;
        let s = run_mi_experiment_with(&model, &dist, cfg.sigma2, cfg.mc.trials, cfg.mc.seed, &opts)?;
        Ok(vec![
            cv.into(),
            p.into(),
            model.moments().kappa.into(),
            stats.theta_g.into(),
            stats.theta_b.into(),
            stats.theta.into(),
            s.var_c.into(),
            s.se_var.into(),
        ])
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
    Skip,
}

impl Status {
    fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub check: &'static str,
    pub status: Status,
    pub detail: String,
}

fn diag(check: &'static str, ok: bool, detail: String) -> Diagnostic {
    Diagnostic {
        check,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

/// Check a configuration without running anything expensive.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let sc = &cfg.scenario;
    let dims_ok = sc.n > 0 && sc.m > 0;
    out.push(diag(
        "dimensions",
        dims_ok,
        format!("N = {}, M = {}, c = {}", sc.n, sc.m, sc.n as f64 / sc.m as f64),
    ));

    let raw = if dims_ok { Some(sc.raw(&cfg.base_dir)) } else { None };
    let mut structural_ok = dims_ok;
    match &raw {
        Some(Ok(r)) => {
            let m = sc.m as f64;
            let nonneg = r.d.iter().chain(&r.dt).all(|&x| x >= 0.0 && x.is_finite());
            let (td, tdt) = (r.d.iter().sum::<f64>() / m, r.dt.iter().sum::<f64>() / m);
            let ok = nonneg && td > 0.0 && tdt > 0.0;
            structural_ok &= ok;
            out.push(diag(
                "variance_profiles",
                ok,
                format!("non-negative: {nonneg}, Tr D/M = {td}, Tr D̃/M = {tdt}"),
            ));
            let norm = spectral_norm(&r.a);
            let cap = sc.norm_cap.unwrap_or_else(|| default_norm_cap(&r.a));
            let ok = norm.is_finite() && norm <= cap * (1.0 + 1e-12);
            structural_ok &= ok;
            out.push(diag("los_norm", ok, format!("‖A‖ = {norm}, cap = {cap}")));
        }
        Some(Err(e)) => {
            structural_ok = false;
            out.push(diag("scenario_inputs", false, e.to_string()));
        }
        None => {}
    }

    let e = &sc.entry;
    let params = e.modulus_law.validate();
    out.push(diag(
        "entry_parameters",
        params.is_ok(),
        params.err().map(|e| e.to_string()).unwrap_or_else(|| format!("{:?}", e.modulus_law)),
    ));
    let weights_ok = e.sigma_r2 >= 0.0 && e.sigma_i2 >= 0.0 && (e.sigma_r2 + e.sigma_i2 - 2.0).abs() <= 1e-12;
    out.push(diag(
        "entry_normalization",
        weights_ok,
        format!("σ_r² + σ_i² = {} (must be 2)", e.sigma_r2 + e.sigma_i2),
    ));
    let moments = moments_of(e);
    match &moments {
        Ok(m) => {
            let ok = m.validate().is_ok();
            out.push(diag(
                "moments",
                ok,
                format!("ϑ = {}, κ = {}, E|x|⁴ = {}", m.vartheta.re, m.kappa, m.fourth_moment()),
            ));
            structural_ok &= ok;
        }
        Err(err) => {
            structural_ok = false;
            out.push(diag("moments", false, err.to_string()));
        }
    }
    for w in e.warnings() {
        out.push(Diagnostic {
            check: "entry_tails",
            status: Status::Warn,
            detail: w,
        });
    }

    if !structural_ok {
        for check in ["fixed_point", "delta", "delta_t"] {
            out.push(Diagnostic {
                check,
                status: Status::Skip,
                detail: "model is invalid".into(),
            });
        }
        return out;
    }
    let model: ChannelModel = match cfg.model() {
        Ok(m) => m,
        Err(err) => {
            out.push(diag("model", false, err.to_string()));
            return out;
        }
    };
    let point = SpectralPoint::from_noise(cfg.sigma2);
    match point.and_then(|z| solve(&model, z, &cfg.solver)) {
        Ok(sol) => {
            out.push(diag(
                "fixed_point",
                true,
                format!("converged in {} iterations at z = −σ² = {}", sol.iterations, -cfg.sigma2),
            ));
            match table1(&model, &sol) {
                Ok(q) => {
                    out.push(diag("delta", q.det.re > 0.0, format!("Δ = {}", q.det.re)));
                    out.push(diag("delta_t", q.det_tr.re > 0.0, format!("Δ_T = {}", q.det_tr.re)));
                }
                Err(err) => out.push(diag("delta_t", false, err.to_string())),
            }
        }
        Err(err) => out.push(diag("fixed_point", false, err.to_string())),
    }
    out
}

pub fn diagnostics_table(diags: &[Diagnostic]) -> Table {
    let mut t = Table::new(&["check", "status", "detail"]);
    for d in diags {
        t.push(vec![d.check.into(), d.status.as_str().into(), d.detail.clone().into()]);
    }
    t
}
