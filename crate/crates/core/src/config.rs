//! TOML scenario and experiment files.
//!
//! ```toml
//! sigma2 = 0.2
//!
//! [scenario]
//! N = 16
//! M = 32
//! rician_K = 1.0
//! D = "identity"          # or [d1, d2, ...] or a path to a whitespace-separated file
//! Dt = "identity"
//! los = { kind = "ula" }  # or { kind = "ula", angles = [...] }, { kind = "zero" }, { kind = "file", path = "..." }
//! entry = { law = "weibull", params = { k = 1.0 }, sigma_r2 = 1.6, sigma_i2 = 0.4 }
//!
//! [mc]
//! trials = 20000
//! seed = 1
//! ```
//!
//! With `rician_K` set, the LoS matrix is scaled by `√(K/(K+1))/√M` and `D`
//! by `1/(K+1)`. Without it the LoS matrix is used as given.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_point::{SolverOptions, SpectralPoint};
use crate::linalg::CMatrix;
use crate::model::{default_norm_cap, moments_of, ula_los, ChannelModel, EntryDistribution};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LosConfig {
    Ula {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angles: Option<Vec<f64>>,
    },
    Zero,
    File {
        path: PathBuf,
    },
}

/// `"identity"`, an explicit vector, or a path to a file of numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileConfig {
    Values(Vec<f64>),
    Named(String),
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig::Named("identity".into())
    }
}

impl ProfileConfig {
    fn is_identity(&self) -> bool {
        matches!(self, ProfileConfig::Named(s) if s == "identity")
    }

    pub fn resolve(&self, len: usize, base: &Path) -> Result<Vec<f64>> {
        let v = match self {
            ProfileConfig::Named(s) if s == "identity" => vec![1.0; len],
            ProfileConfig::Named(path) => read_reals(&base.join(path))?,
            ProfileConfig::Values(v) => v.clone(),
        };
        if v.len() != len {
            return Err(Error::Dimension(format!("profile has {} entries, expected {len}", v.len())));
        }
        Ok(v)
    }
}

fn read_reals(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    text.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| Error::Config(format!("{}: bad number {t:?}: {e}", path.display()))))
        .collect()
}

/// One matrix row per line, entries separated by whitespace, each entry a
/// complex literal such as `0.5`, `-1+2i` or `0.3-0.1j`.
fn read_complex_matrix(path: &Path, n: usize, m: usize) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<Vec<Complex64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(parse_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    if rows.len() != n || rows.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension(format!("{} must hold a {n}x{m} matrix", path.display())));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Parse `a`, `a+bi`, `a+bj`, `bi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim().replace('j', "i").replace(' ', "");
    t.parse::<Complex64>()
        .map_err(|_| Error::Config(format!("cannot parse complex number {s:?}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "rician_K", default, skip_serializing_if = "Option::is_none")]
    pub rician_k: Option<f64>,
    #[serde(rename = "D", default)]
    pub d: ProfileConfig,
    #[serde(rename = "Dt", default)]
    pub dt: ProfileConfig,
    /// Overrides the default cap on `‖A‖`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_cap: Option<f64>,
    pub los: LosConfig,
    pub entry: EntryDistribution,
}

/// The pieces of a scenario before validation.
#[derive(Clone, Debug)]
pub struct RawScenario {
    pub a: CMatrix,
    pub d: Vec<f64>,
    pub dt: Vec<f64>,
}

impl ScenarioConfig {
    /// LoS matrix and profiles after Rician scaling, without validation.
    pub fn raw(&self, base: &Path) -> Result<RawScenario> {
        let (n, m) = (self.n, self.m);
        if n == 0 || m == 0 {
            return Err(Error::Dimension("N and M must be positive".into()));
        }
        let los = match &self.los {
            LosConfig::Ula { angles } => ula_los(n, m, angles.as_deref())?,
            LosConfig::Zero => CMatrix::zeros(n, m),
            LosConfig::File { path } => read_complex_matrix(&base.join(path), n, m)?,
        };
        let mut d = self.d.resolve(n, base)?;
        let dt = self.dt.resolve(m, base)?;
        let a = match self.rician_k {
            None => los,
            Some(k) => {
                if !(k >= 0.0) {
                    return Err(Error::Domain(format!("Rician factor K = {k} must be ≥ 0")));
                }
                let s = if k.is_infinite() { 1.0 } else { (k / (k + 1.0)).sqrt() };
                let nlos_power = 1.0 / (k + 1.0);
                d.iter_mut().for_each(|x| *x *= nlos_power);
                los * Complex64::new(s / (m as f64).sqrt(), 0.0)
            }
        };
        Ok(RawScenario { a, d, dt })
    }

    pub fn build(&self, base: &Path) -> Result<ChannelModel> {
        self.entry.validate()?;
        let moments = moments_of(&self.entry)?;
        let raw = self.raw(base)?;
        let cap = self.norm_cap.unwrap_or_else(|| default_norm_cap(&raw.a));
        ChannelModel::with_norm_cap(raw.a, raw.d, raw.dt, moments, cap)
    }

    /// Same scenario at `N = n`, keeping `N/M` fixed.
    pub fn with_n(&self, n: usize) -> Result<ScenarioConfig> {
        if n == 0 {
            return Err(Error::Config("N must be positive".into()));
        }
        if matches!(self.los, LosConfig::File { .. }) || matches!(self.los, LosConfig::Ula { angles: Some(_) }) {
            return Err(Error::Config("an N sweep needs a ula (default angles) or zero LoS".into()));
        }
        if !self.d.is_identity() || !self.dt.is_identity() {
            return Err(Error::Config("an N sweep needs identity profiles".into()));
        }
        let m = ((n as f64) * self.m as f64 / self.n as f64).round() as usize;
        Ok(ScenarioConfig {
            n,
            m: m.max(1),
            ..self.clone()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    N,
    #[serde(rename = "sigma2")]
    Sigma2,
    R,
    #[serde(rename = "cv")]
    Cv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { trials: 20_000, seed: 1 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

fn default_sigma2() -> f64 {
    0.2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    /// Spectral point for `solve`, `quantities` and `bias`; defaults to `−σ²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    /// Rate threshold (nats) for outage computations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    pub scenario: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(scenario: ScenarioConfig) -> Self {
        ExperimentConfig {
            sigma2: default_sigma2(),
            z: None,
            rate: None,
            scenario,
            sweep: None,
            solver: SolverOptions::default(),
            mc: McConfig::default(),
            output: OutputConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if !(self.sigma2 > 0.0) {
            return Err(Error::Config(format!("sigma2 = {} must be positive", self.sigma2)));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() || sweep.values.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Config("sweep values must be non-empty and strictly increasing".into()));
            }
            if sweep.variable == SweepVariable::N && sweep.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
                return Err(Error::Config("N sweep values must be positive integers".into()));
            }
        }
        if let Some(z) = &self.z {
            parse_complex(z)?;
        }
        self.solver.validate()
    }

    pub fn model(&self) -> Result<ChannelModel> {
        self.scenario.build(&self.base_dir)
    }

    /// `z` from the file, or `−σ²`.
    pub fn spectral_point(&self) -> Result<SpectralPoint> {
        match &self.z {
            Some(z) => SpectralPoint::new(parse_complex(z)?),
            None => SpectralPoint::from_noise(self.sigma2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModulusLaw;

    const SAMPLE: &str = r#"
sigma2 = 0.2
rate = 20.0

[scenario]
N = 4
M = 8
rician_K = 1.0
D = "identity"
Dt = [1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5]
los = { kind = "ula" }
entry = { law = "weibull", params = { k = 1.0 }, sigma_r2 = 1.6, sigma_i2 = 0.4 }

[sweep]
variable = "sigma2"
values = [0.1, 0.2, 0.4]

[mc]
trials = 100
seed = 9
"#;

    #[test]
    fn parse_and_round_trip() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.scenario.entry.modulus_law, ModulusLaw::Weibull { k: 1.0 });
        assert_eq!(cfg.mc.seed, 9);
        let model = cfg.model().unwrap();
        assert_eq!(model.dt()[5], 0.5);
        assert_eq!(model.d()[0], 0.5);
        let text = cfg.to_toml().unwrap();
        let again = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("-0.2").unwrap(), Complex64::new(-0.2, 0.0));
        assert_eq!(parse_complex("-1+0.5j").unwrap(), Complex64::new(-1.0, 0.5));
        assert_eq!(parse_complex("-1+0.5i").unwrap(), Complex64::new(-1.0, 0.5));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn rejects_bad_sweeps() {
        let bad = SAMPLE.replace("[0.1, 0.2, 0.4]", "[0.2, 0.1]");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn n_sweep_keeps_ratio() {
        let cfg = ExperimentConfig::from_toml(&SAMPLE.replace("Dt = [1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5]", "Dt = \"identity\"")).unwrap();
        let s = cfg.scenario.with_n(16).unwrap();
        assert_eq!((s.n, s.m), (16, 32));
        assert!(cfg.scenario.with_n(0).is_err());
    }

    #[test]
    fn profile_and_los_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("d.txt"), "1 2\n").unwrap();
        std::fs::write(dir.path().join("a.txt"), "0.1 0.2i\n-0.1+0.1j 0\n").unwrap();
        let text = SAMPLE
            .replace("rician_K = 1.0\n", "")
            .replace("N = 4\nM = 8", "N = 2\nM = 2")
            .replace("D = \"identity\"", "D = \"d.txt\"")
            .replace("Dt = [1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5]", "Dt = \"identity\"")
            .replace("los = { kind = \"ula\" }", "los = { kind = \"file\", path = \"a.txt\" }");
        let path = dir.path().join("exp.toml");
        std::fs::write(&path, text).unwrap();
        let cfg = ExperimentConfig::load(&path).unwrap();
        let model = cfg.model().unwrap();
        assert_eq!(model.d(), &[1.0, 2.0]);
        assert_eq!(model.los()[(1, 0)], Complex64::new(-0.1, 0.1));
    }
}
