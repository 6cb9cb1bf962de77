//! Scenario configuration: the JSON document consumed by every subcommand.
//!
//! One document per scenario. All physics values are in units of g; the
//! `g_phys_MHz` field drives the microsecond/MHz conversions of the
//! reporting layer only. Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use enantiosim::dynamics::{HamiltonianKind, RunSpec, TimeGrid};
use enantiosim::model::{AwgnConfig, DecoherenceRates, PhysicalParams, SystematicErrors};

/// Resource sanity bounds applied at the config boundary (untrusted input).
const MAX_FOCK_CUTOFF: usize = 512;
const MAX_STEPS: f64 = 5e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dt: f64,
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub params: PhysicalParams,
    pub errors: SystematicErrors,
    pub awgn: Option<AwgnConfig>,
    pub rates: DecoherenceRates,
    pub corrected_pulse: bool,
    /// Integration grid override; per-mode defaults when absent.
    pub grid: Option<GridConfig>,
    /// Laboratory coupling strength for unit conversions in reports.
    #[serde(rename = "g_phys_MHz")]
    pub g_phys_mhz: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::default(),
            errors: SystematicErrors::none(),
            awgn: None,
            rates: DecoherenceRates::none(),
            corrected_pulse: false,
            grid: None,
            g_phys_mhz: 10.0,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json_str(s: &str) -> Result<Self, String> {
        let cfg: ScenarioConfig = serde_json::from_str(s).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Schema-level validation; returns perturbative-regime warnings.
    pub fn validate(&self) -> Result<Vec<String>, String> {
        let warnings = self.params.validate().map_err(|e| e.to_string())?;
        self.errors.validate().map_err(|e| e.to_string())?;
        self.rates.validate().map_err(|e| e.to_string())?;
        if let Some(awgn) = &self.awgn {
            awgn.validate().map_err(|e| e.to_string())?;
        }
        if self.params.fock_cutoff > MAX_FOCK_CUTOFF {
            return Err(format!(
                "N = {} exceeds the configuration bound {MAX_FOCK_CUTOFF}",
                self.params.fock_cutoff
            ));
        }
        if !(self.g_phys_mhz > 0.0) || !self.g_phys_mhz.is_finite() {
            return Err("g_phys_MHz must be positive and finite".into());
        }
        if let Some(grid) = &self.grid {
            if !(grid.dt > 0.0) || !grid.dt.is_finite() {
                return Err("grid.dt must be positive and finite".into());
            }
            if grid.stride == 0 {
                return Err("grid.stride must be at least 1".into());
            }
            if self.params.total_time / grid.dt > MAX_STEPS {
                return Err(format!(
                    "T/dt = {:.1e} steps exceeds the configuration bound {MAX_STEPS:.0e}",
                    self.params.total_time / grid.dt
                ));
            }
        }
        Ok(warnings)
    }

    fn time_grid(&self) -> Option<TimeGrid> {
        self.grid.as_ref().map(|g| TimeGrid {
            dt: g.dt,
            t_end: self.params.total_time,
            sample_stride: g.stride,
            dense_window: None,
        })
    }

    /// Lower into the dynamics-layer run specification.
    pub fn to_run_spec(&self, mode: HamiltonianKind) -> RunSpec {
        RunSpec {
            params: self.params.clone(),
            errors: self.errors,
            rates: self.rates,
            awgn: self.awgn,
            corrected_pulse: self.corrected_pulse,
            mode,
            grid: self.time_grid(),
        }
    }

    /// Dimensionless time in laboratory microseconds.
    pub fn time_us(&self, t: f64) -> f64 {
        t / self.g_phys_mhz
    }
}
