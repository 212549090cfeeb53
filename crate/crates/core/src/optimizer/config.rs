use serde::{Deserialize, Serialize};

use crate::bounds::taschuk_threshold_3d;
use crate::error::{Error, Result};

/// Settings for the witness search.
///
/// Loadable from `key = value` files; absent keys take the defaults below and
/// unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Matrix dimension `n`; the search space has `n²` coordinates.
    pub dimension: usize,
    pub nm_reflection: f64,
    pub nm_expansion: f64,
    pub nm_contraction: f64,
    pub nm_shrink: f64,
    pub nm_max_iters: usize,
    pub nm_tol: f64,
    pub pso_swarm: usize,
    pub pso_iters: usize,
    pub pso_inertia: f64,
    pub pso_cognitive: f64,
    pub pso_social: f64,
    pub search_box: f64,
    pub seed: u64,
    pub restarts: usize,
    pub feasibility_threshold: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            nm_reflection: 1.0,
            nm_expansion: 2.0,
            nm_contraction: 0.5,
            nm_shrink: 0.5,
            nm_max_iters: 20_000,
            nm_tol: 1e-10,
            pso_swarm: 50,
            pso_iters: 500,
            pso_inertia: 0.729,
            pso_cognitive: 1.49445,
            pso_social: 1.49445,
            search_box: 1.0,
            seed: 0,
            restarts: 8,
            feasibility_threshold: taschuk_threshold_3d(),
        }
    }
}

impl OptimizerConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.dimension < 2 || self.dimension > 8 {
            return bad("dimension must lie in 2..=8");
        }
        if !(self.nm_reflection > 0.0) {
            return bad("nm_reflection must be positive");
        }
        if !(self.nm_expansion > 1.0) {
            return bad("nm_expansion must exceed 1");
        }
        if !(self.nm_contraction > 0.0 && self.nm_contraction < 1.0) {
            return bad("nm_contraction must lie in (0, 1)");
        }
        if !(self.nm_shrink > 0.0 && self.nm_shrink < 1.0) {
            return bad("nm_shrink must lie in (0, 1)");
        }
        if self.nm_max_iters == 0 || self.pso_swarm == 0 || self.restarts == 0 {
            return bad("nm_max_iters, pso_swarm and restarts must be positive");
        }
        if !(self.nm_tol >= 0.0) {
            return bad("nm_tol must be nonnegative");
        }
        if !(self.search_box > 0.0 && self.search_box.is_finite()) {
            return bad("search_box must be positive");
        }
        for (name, v) in [
            ("pso_inertia", self.pso_inertia),
            ("pso_cognitive", self.pso_cognitive),
            ("pso_social", self.pso_social),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and >= 0"
                )));
            }
        }
        if !(self.feasibility_threshold >= 1.0) {
            return bad("feasibility_threshold must be at least 1");
        }
        Ok(())
    }
}
