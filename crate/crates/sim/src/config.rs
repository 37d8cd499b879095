//! JSON run configuration and the two built-in presets.
//!
//! Lengths in the scenario and grid sections are given in wavelengths,
//! times in units of `1/Γ`. Every section has defaults taken from the
//! single-packet preset, so a config file only needs what it changes.

use std::path::{Path, PathBuf};

use recoil_core::density::{SpatialGrid, EXTENT_PER_WIDTH, SPACING_PER_WAVELENGTH};
use recoil_core::wavepacket::Scenario;
use recoil_core::{ModeGrid, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Two packets at ±2λ, followed to 1000/Γ.
    Superposition,
    /// One packet, followed to 5/Γ.
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub omega0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// `|d|² / (4 ε0 ħ c²)`; used only when `gamma` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole_factor: Option<f64>,
    pub mu: f64,
}

impl ParamsSpec {
    pub fn build(&self) -> Result<ModelParams, SimError> {
        let params = match (self.gamma, self.dipole_factor) {
            (Some(_), Some(_)) => {
                return Err(SimError::Config("give either gamma or dipole_factor, not both".into()))
            }
            (Some(gamma), None) => ModelParams::new(self.omega0, gamma, self.mu)?,
            (None, dipole) => ModelParams::from_dipole(
                self.omega0,
                dipole.ok_or_else(|| SimError::Config("params need gamma or dipole_factor".into()))?,
                self.mu,
            )?,
        };
        Ok(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    Superposition { a_over_lambda: f64, d_over_lambda: f64 },
    Single {
        #[serde(default)]
        center_over_lambda: f64,
        d_over_lambda: f64,
    },
}

impl ScenarioSpec {
    pub fn build(&self, params: &ModelParams) -> Result<Scenario, SimError> {
        let l = params.lambda();
        let sc = match *self {
            ScenarioSpec::Superposition {
                a_over_lambda,
                d_over_lambda,
            } => Scenario::Superposition {
                a: a_over_lambda * l,
                d: d_over_lambda * l,
            },
            ScenarioSpec::Single {
                center_over_lambda,
                d_over_lambda,
            } => Scenario::Single {
                center: center_over_lambda * l,
                d: d_over_lambda * l,
            },
        };
        sc.validate()?;
        Ok(sc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub spacing_over_lambda: f64,
    /// Reach beyond the packet centres, in packet widths at the last time.
    pub reach_widths: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            spacing_over_lambda: SPACING_PER_WAVELENGTH,
            reach_widths: EXTENT_PER_WIDTH,
        }
    }
}

impl GridSpec {
    pub fn build(&self, scenario: &Scenario, t_max: f64, params: &ModelParams) -> Result<SpatialGrid, SimError> {
        if !(self.spacing_over_lambda > 0.0 && self.reach_widths.is_finite()) {
            return Err(SimError::Config("grid spacing and reach must be positive".into()));
        }
        let spacing = self.spacing_over_lambda * params.lambda();
        let tail = self.reach_widths * scenario.sigma(t_max, params.mu());
        let (center, span) = match *scenario {
            Scenario::Superposition { a, .. } => (0.0, a.abs() + tail),
            Scenario::Single { center, .. } => (center, tail),
        };
        let half_points = (span / spacing).ceil() as usize;
        let grid = SpatialGrid::uniform(center, spacing, half_points)?;
        grid.check_covers(scenario, t_max, params)?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSpec {
    pub count: usize,
    /// Half-width `W` of the wavenumber band, in units of `Γ/c`.
    pub half_width_gamma: f64,
    /// Number of equally spaced emission angles.
    pub angles: usize,
}

impl Default for ModesSpec {
    fn default() -> Self {
        Self {
            count: 400,
            half_width_gamma: 50.0,
            angles: 1,
        }
    }
}

impl ModesSpec {
    pub fn build(&self, params: &ModelParams) -> Result<ModeGrid, SimError> {
        if self.angles == 0 {
            return Err(SimError::Config("modes.angles must be >= 1".into()));
        }
        Ok(ModeGrid::uniform(
            params,
            self.count,
            self.half_width_gamma,
            &ModeGrid::uniform_angles(self.angles),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub max_dx_over_lambda: f64,
    pub points: usize,
}

impl Default for FactorSpec {
    fn default() -> Self {
        Self {
            max_dx_over_lambda: 3.0,
            points: 600,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSpec {
    /// Parameters of the bath runs; a weak `Γ` keeps the √k coupling slope
    /// from shifting the level.
    pub params: ParamsSpec,
    pub tol: f64,
    pub t_max_gamma: f64,
    pub samples: usize,
    pub central_modes: usize,
    pub n_phi: usize,
    pub subgrid: usize,
    /// Time of the angular quadrature check, in units of `1/Γ`.
    pub quadrature_t_gamma: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            params: ParamsSpec {
                omega0: 1.0,
                gamma: Some(1e-4),
                dipole_factor: None,
                mu: 1e4,
            },
            tol: 1e-10,
            t_max_gamma: 5.0,
            samples: 101,
            central_modes: 8,
            n_phi: 256,
            subgrid: 16,
            quadrature_t_gamma: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSpec,
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub modes: ModesSpec,
    /// In units of `1/Γ`, ascending.
    pub times: Vec<f64>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub factor: FactorSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::preset(Preset::Single)
    }
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Superposition => Self {
                params: ParamsSpec {
                    omega0: 1.0,
                    gamma: Some(1e-3),
                    dipole_factor: None,
                    mu: 2e4,
                },
                scenario: ScenarioSpec::Superposition {
                    a_over_lambda: 2.0,
                    d_over_lambda: 0.25,
                },
                times: vec![100.0, 200.0, 1000.0],
                grid: GridSpec::default(),
                modes: ModesSpec::default(),
                output: OutputSpec::default(),
                factor: FactorSpec::default(),
                oracle: OracleSpec::default(),
            },
            Preset::Single => Self {
                params: ParamsSpec {
                    omega0: 1.0,
                    gamma: Some(1e-3),
                    dipole_factor: None,
                    mu: 250.0,
                },
                scenario: ScenarioSpec::Single {
                    center_over_lambda: 0.0,
                    d_over_lambda: 0.25,
                },
                times: vec![2.0, 3.0, 5.0],
                grid: GridSpec::default(),
                modes: ModesSpec::default(),
                output: OutputSpec::default(),
                factor: FactorSpec::default(),
                oracle: OracleSpec::default(),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Runs every check that does not need the output directory.
    // the negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SimError> {
        let params = self.params.build()?;
        params.check_scenario_regime()?;
        self.scenario.build(&params)?;
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(SimError::Config("times must be finite and >= 0".into()));
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(SimError::Config("times must be ascending".into()));
        }
        if self.grid.spacing_over_lambda > SPACING_PER_WAVELENGTH * (1.0 + 1e-12) {
            return Err(SimError::Config(format!(
                "grid.spacing_over_lambda must be <= {SPACING_PER_WAVELENGTH}"
            )));
        }
        if self.grid.reach_widths < EXTENT_PER_WIDTH {
            return Err(SimError::Config(format!("grid.reach_widths must be >= {EXTENT_PER_WIDTH}")));
        }
        if self.factor.points < 2 || !(self.factor.max_dx_over_lambda > 0.0) {
            return Err(SimError::Config("factor needs >= 2 points and a positive range".into()));
        }
        self.oracle.params.build()?;
        let o = &self.oracle;
        if o.samples < 2 || o.subgrid < 2 || !(o.t_max_gamma > 0.0) || o.central_modes == 0 {
            return Err(SimError::Config("oracle needs >= 2 samples, subgrid >= 2, t_max_gamma > 0 and central_modes >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        RunConfig::preset(Preset::Superposition).validate().unwrap();
        RunConfig::preset(Preset::Single).validate().unwrap();
    }

    #[test]
    fn shipped_configs_match_presets() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
        for (file, preset) in [("superposition.json", Preset::Superposition), ("single.json", Preset::Single)] {
            let cfg = RunConfig::load(&dir.join(file)).unwrap();
            assert_eq!(cfg, RunConfig::preset(preset), "{file}");
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig::preset(Preset::Superposition);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn minimal_document_fills_defaults() {
        let cfg = RunConfig::from_json(
            r#"{"params": {"omega0": 1.0, "gamma": 0.001, "mu": 250.0},
                "scenario": {"kind": "single", "d_over_lambda": 0.25},
                "times": [2.0, 3.0, 5.0]}"#,
        )
        .unwrap();
        assert_eq!(cfg, RunConfig::preset(Preset::Single));
    }

    #[test]
    fn rejects_bad_documents() {
        let base = serde_json::to_value(RunConfig::default()).unwrap();
        let mut unknown = base.clone();
        unknown["params"]["hbar"] = 1.0.into();
        assert!(RunConfig::from_json(&unknown.to_string()).is_err());
        let mut top = base.clone();
        top["extra"] = 1.into();
        assert!(RunConfig::from_json(&top.to_string()).is_err());
        let mut both = base.clone();
        both["params"]["dipole_factor"] = 1e-3.into();
        assert!(RunConfig::from_json(&both.to_string()).is_err());
        let mut regime = base.clone();
        regime["params"]["gamma"] = 0.5.into();
        assert!(RunConfig::from_json(&regime.to_string()).is_err());
        let mut order = base.clone();
        order["times"] = serde_json::json!([3.0, 2.0]);
        assert!(RunConfig::from_json(&order.to_string()).is_err());
        let mut coarse = base;
        coarse["grid"]["spacing_over_lambda"] = 0.1.into();
        assert!(RunConfig::from_json(&coarse.to_string()).is_err());
    }

    #[test]
    fn dipole_factor_sets_gamma() {
        let spec = ParamsSpec {
            omega0: 2.0,
            gamma: None,
            dipole_factor: Some(1e-4),
            mu: 10.0,
        };
        assert!((spec.build().unwrap().gamma() - 4e-4).abs() < 1e-18);
    }
}
