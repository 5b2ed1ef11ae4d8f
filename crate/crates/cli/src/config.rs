//! Experiment configuration: a flat `key = value` text file with CLI flag
//! overrides. Grids use the `start:stop:step` syntax (inclusive ends).

use anyhow::{anyhow, bail, Context, Result};
use ncplane_core::params::PhysicalParams;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ClassicalTraj,
    Spectrum,
    MmEvolve,
    LambdaError,
    LambdaPhase,
    LambdaRadius,
    QuantizeVerify,
    WeightMoments,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ClassicalTraj => "classical-traj",
            Self::Spectrum => "spectrum",
            Self::MmEvolve => "mm-evolve",
            Self::LambdaError => "lambda-error",
            Self::LambdaPhase => "lambda-phase",
            Self::LambdaRadius => "lambda-radius",
            Self::QuantizeVerify => "quantize-verify",
            Self::WeightMoments => "weight-moments",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitsMode {
    Natural,
    LambdaCs,
    Explicit,
}

/// An inclusive numeric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Self {
            start: v,
            stop: v,
            step: 1.0,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.len() {
            1 => Ok(Self::single(parts[0].trim().parse()?)),
            3 => {
                let g = Self {
                    start: parts[0].trim().parse()?,
                    stop: parts[1].trim().parse()?,
                    step: parts[2].trim().parse()?,
                };
                if g.step <= 0.0 || g.stop < g.start {
                    bail!("grid `{text}` needs stop >= start and step > 0");
                }
                Ok(g)
            }
            _ => bail!("grid `{text}` is not `value` or `start:stop:step`"),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step).round() as usize;
        (0..=n)
            .map(|i| self.start + self.step * i as f64)
            .filter(|v| *v <= self.stop + 1e-9 * self.step)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub units: UnitsMode,
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
    pub c: f64,
    pub b_field: f64,
    pub theta: f64,
    pub lambda: Grid,
    pub l_grid: Option<Grid>,
    pub zeta_re: f64,
    pub zeta_im: f64,
    pub t_max: f64,
    pub t_samples: usize,
    pub n_max: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    // classical-trajectory specifics
    pub gauge: String,
    pub coords: String,
    pub radius: f64,
    pub phase: f64,
    pub center: [f64; 2],
    // mm-evolve specifics
    pub r_amp: f64,
    pub phi: f64,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let lambda = match experiment {
            Experiment::LambdaRadius => Grid {
                start: 0.0,
                stop: 8.0,
                step: 0.05,
            },
            Experiment::WeightMoments => Grid {
                start: 0.5,
                stop: 4.0,
                step: 0.5,
            },
            _ => Grid::single(2.0),
        };
        let t_samples = match experiment {
            Experiment::ClassicalTraj | Experiment::MmEvolve => 1_024,
            Experiment::LambdaPhase => 4_096,
            _ => 20_000,
        };
        Self {
            experiment,
            units: UnitsMode::Natural,
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            c: 1.0,
            b_field: 1.0,
            theta: 0.0,
            lambda,
            l_grid: None,
            zeta_re: 1.0,
            zeta_im: 0.0,
            t_max: 8.0 * std::f64::consts::PI,
            t_samples,
            n_max: 10,
            seed: 0,
            out_dir: PathBuf::from("out"),
            gauge: "symmetric".to_string(),
            coords: "noncommutative".to_string(),
            radius: 1.0,
            phase: 0.0,
            center: [0.0, 0.0],
            r_amp: 1.0,
            phi: 0.0,
        }
    }

    /// Parse the flat key-value file and fold it over the defaults.
    pub fn from_file(experiment: Experiment, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = Self::defaults(experiment);
        let mut kv = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
        for (key, value) in kv {
            cfg.set(&key, &value)
                .with_context(|| format!("config key `{key}`"))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "units" => {
                self.units = match value {
                    "natural" => UnitsMode::Natural,
                    "lambda_cs" => UnitsMode::LambdaCs,
                    "explicit" => UnitsMode::Explicit,
                    other => bail!("unknown units mode `{other}`"),
                }
            }
            "hbar" => self.hbar = value.parse()?,
            "mass" => self.mass = value.parse()?,
            "charge" => self.charge = value.parse()?,
            "c" => self.c = value.parse()?,
            "B" => self.b_field = value.parse()?,
            "theta" => self.theta = value.parse()?,
            "lambda" => self.lambda = Grid::parse(value)?,
            "l" => self.l_grid = Some(Grid::parse(value)?),
            "zeta_re" => self.zeta_re = value.parse()?,
            "zeta_im" => self.zeta_im = value.parse()?,
            "t_max" => self.t_max = value.parse()?,
            "t_samples" => self.t_samples = value.parse()?,
            "N" => self.n_max = value.parse()?,
            "seed" => self.seed = value.parse()?,
            "out" => self.out_dir = PathBuf::from(value),
            "gauge" => self.gauge = value.to_string(),
            "coords" => self.coords = value.to_string(),
            "radius" => self.radius = value.parse()?,
            "phase" => self.phase = value.parse()?,
            "center1" => self.center[0] = value.parse()?,
            "center2" => self.center[1] = value.parse()?,
            "r_amp" => self.r_amp = value.parse()?,
            "phi" => self.phi = value.parse()?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    pub fn physical_params(&self) -> PhysicalParams {
        match self.units {
            UnitsMode::Natural => PhysicalParams::natural_units(self.b_field, self.theta),
            UnitsMode::LambdaCs => PhysicalParams::lambda_cs_units(),
            UnitsMode::Explicit => PhysicalParams {
                hbar: self.hbar,
                mass: self.mass,
                charge: self.charge,
                c: self.c,
                b_field: self.b_field,
                theta: self.theta,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 || self.n_max > 256 {
            bail!("N must be in 1..=256, got {}", self.n_max);
        }
        if self.t_samples < 2 {
            bail!("t_samples must be at least 2");
        }
        if self.t_max <= 0.0 {
            bail!("t_max must be positive");
        }
        if self.lambda.values().is_empty() {
            bail!("lambda grid is empty");
        }
        if self.lambda.values().iter().any(|&l| !(0.0..=16.0).contains(&l)) {
            bail!("lambda values must lie in [0, 16]");
        }
        if let Some(g) = &self.l_grid {
            if g.values().iter().any(|&l| l <= 0.0) {
                bail!("l values must be positive");
            }
        }
        let zeta_abs = (self.zeta_re * self.zeta_re + self.zeta_im * self.zeta_im).sqrt();
        if zeta_abs > 1e3 {
            bail!("|zeta| must be at most 1e3");
        }
        if !matches!(self.gauge.as_str(), "landau" | "symmetric" | "landau_swapped") {
            bail!("gauge must be landau | symmetric | landau_swapped");
        }
        if !matches!(self.coords.as_str(), "noncommutative" | "commuting") {
            bail!("coords must be noncommutative | commuting");
        }
        if self.radius < 0.0 {
            bail!("orbit radius must be nonnegative");
        }
        self.physical_params()
            .validate()
            .map_err(|e| anyhow!("{e}"))?;
        // two-mode experiments allocate (N+1)^4 complex entries
        if matches!(self.experiment, Experiment::QuantizeVerify) && self.n_max > 32 {
            bail!("quantize-verify caps N at 32 (dense two-mode matrices)");
        }
        Ok(())
    }
}
