//! Run defaults, embedded from `defaults.toml` and overridable by a user
//! TOML file whose tables are merged key by key.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::IntegrationConfig;
use crate::manifold::ShootConfig;

pub const DEFAULTS_TOML: &str = include_str!("../defaults.toml");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootSection {
    #[serde(flatten)]
    pub shoot: ShootConfig,
    pub theta_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    pub eps0: f64,
    pub grid: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindSection {
    pub eps0: f64,
    pub theta_offset: f64,
    pub blowup_norm: f64,
    pub max_span: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    pub orbits: usize,
    pub span: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub integration: IntegrationConfig,
    pub shoot: ShootSection,
    pub classify: ClassifySection,
    pub wind: WindSection,
    pub energy: EnergySection,
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config::from_overrides("").expect("embedded defaults are valid")
    }
}

impl Config {
    /// Defaults with the tables of `text` merged over them.
    pub fn from_overrides(text: &str) -> Result<Self> {
        let mut base: toml::Table = toml::from_str(DEFAULTS_TOML)?;
        merge(&mut base, toml::from_str(text)?);
        let cfg: Config = toml::Value::Table(base).try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Self> {
        match path {
            Some(p) => Config::from_overrides(&std::fs::read_to_string(p)?),
            None => Ok(Config::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.integration.validate()?;
        self.shoot.shoot.validate()?;
        if !(self.shoot.theta_tol > 0.0) || self.classify.grid < 2 || self.energy.orbits == 0 {
            return Err(Error::Config("theta_tol > 0, grid >= 2 and orbits >= 1 required".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_defaults_match_code_defaults() {
        let c = Config::default();
        assert_eq!(c.integration, IntegrationConfig::default());
        assert_eq!(c.shoot.shoot, ShootConfig::default());
        assert_eq!(c.wind.blowup_norm, 1e8);
    }

    #[test]
    fn overrides_merge_per_key() {
        let c = Config::from_overrides("[integration]\nmax_span = 7.0\n[wind]\ntheta_offset = 0.3").unwrap();
        assert_eq!(c.integration.max_span, 7.0);
        assert_eq!(c.integration.rel_tol, 1e-11);
        assert_eq!(c.wind.theta_offset, 0.3);
        assert!(Config::from_overrides("[integration]\nbogus = 1").is_err());
        assert!(Config::from_overrides("[classify]\ngrid = 1").is_err());
        assert!(Config::from_overrides("[shoot]\nbogus = 1").is_err());
        assert_eq!(Config::from_overrides("[shoot]\norder = 20").unwrap().shoot.shoot.order, 20);
    }
}
