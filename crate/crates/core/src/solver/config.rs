use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pressure::PressureConfig;
use crate::semigroup::EpsParams;
use crate::spectral::Grid;

/// Named analytic or seeded initial profile. `amplitude` scales the
/// coefficient of the analytic profiles and sets the L2 norm of `random`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// `cos(m . x)`; vector fields put it on every component and project.
    Cosine { amplitude: f64, mode: [i64; 3] },
    /// scalar `cos x1 cos x2 cos x3`, vector `(sin x1 cos x2, -cos x1 sin x2, 0) cos x3`
    TaylorGreen { amplitude: f64 },
    /// scalar `sin x2 cos x3`, vector `(sin x2 cos x3, 0, 0)`
    Shear { amplitude: f64 },
    Random { amplitude: f64, envelope: f64 },
}

/// Switches for the coupling terms; all on is the full system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    /// transport of `a` and `v . grad v`
    pub nonlinear: bool,
    /// variable density in the momentum and pressure equations
    pub density: bool,
    pub pressure: bool,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            nonlinear: true,
            density: true,
            pressure: true,
        }
    }
}

impl Physics {
    pub fn stokes() -> Self {
        Physics {
            nonlinear: false,
            density: false,
            pressure: false,
        }
    }
}

fn default_c() -> f64 {
    1.0
}

fn default_eps_small() -> f64 {
    0.1
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: [usize; 3],
    pub params: EpsParams,
    pub delta: f64,
    pub lambda: f64,
    pub dt: f64,
    pub t_end: f64,
    pub a0: Profile,
    pub v0: Profile,
    #[serde(default)]
    pub pressure: PressureConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Constant used by the bootstrap monitor.
    #[serde(default = "default_c")]
    pub bootstrap_c: f64,
    /// Smallness parameter of the density (the `epsilon` of the small-`a`
    /// condition, distinct from the scaling `eps`).
    #[serde(default = "default_eps_small")]
    pub eps_small: f64,
    #[serde(default)]
    pub allow_outside: bool,
    #[serde(default)]
    pub physics: Physics,
    /// Write field snapshots every this many steps.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// A desk-scale configuration used by the tests and examples.
    pub fn example() -> Self {
        RunConfig {
            grid: [16, 16, 16],
            params: EpsParams::new(0.1, 0.1, 0.5, 0.02),
            delta: 0.5,
            lambda: 8.0,
            dt: 0.01,
            t_end: 0.1,
            a0: Profile::Cosine {
                amplitude: 0.5,
                mode: [1, 1, 1],
            },
            v0: Profile::TaylorGreen { amplitude: 1.0 },
            pressure: PressureConfig::default(),
            seed: 1,
            bootstrap_c: 1.0,
            eps_small: 0.1,
            allow_outside: false,
            physics: Physics::default(),
            snapshot_every: None,
            output: None,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.params.validate(self.allow_outside)?;
        self.pressure.validate()?;
        let pos = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
            }
        };
        pos("delta", self.delta)?;
        pos("lambda", self.lambda)?;
        pos("dt", self.dt)?;
        pos("t_end", self.t_end)?;
        pos("bootstrap_c", self.bootstrap_c)?;
        pos("eps_small", self.eps_small)?;
        if self.snapshot_every == Some(0) {
            return Err(Error::InvalidParameter("snapshot_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies a `key=value` override where the value is JSON (bare strings
    /// are accepted for string fields). Dotted keys address nested objects.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("override `{assignment}` is not key=value")))?;
        let value: serde_json::Value =
            serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(&*self)?;
        let mut slot = &mut doc;
        for part in key.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|o| o.get_mut(part))
                .ok_or_else(|| Error::InvalidParameter(format!("unknown config key `{key}`")))?;
        }
        *slot = value;
        *self = serde_json::from_value(doc)?;
        Ok(())
    }
}
