//! Run configuration: defaults, an optional config file, then flags.

use std::path::Path;

use serde::Deserialize;
use torelli_core::period::Tolerances;

use crate::io::CliError;

/// Overrides read from the file named by `--config` / `TORELLI_CONFIG`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub tol_iso: Option<f64>,
    pub tol_orth: Option<f64>,
    pub tol_pos: Option<f64>,
    pub tol_lie: Option<f64>,
    pub tol_wall: Option<f64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Fields of `over` win.
    pub fn merge(self, over: ConfigFile) -> ConfigFile {
        ConfigFile {
            tol_iso: over.tol_iso.or(self.tol_iso),
            tol_orth: over.tol_orth.or(self.tol_orth),
            tol_pos: over.tol_pos.or(self.tol_pos),
            tol_lie: over.tol_lie.or(self.tol_lie),
            tol_wall: over.tol_wall.or(self.tol_wall),
            seed: over.seed.or(self.seed),
            workers: over.workers.or(self.workers),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub period: Tolerances,
    pub tol_lie: f64,
    pub tol_wall: f64,
    pub seed: Option<u64>,
    pub workers: usize,
}

impl Config {
    pub fn resolve(file: ConfigFile) -> Result<Self, CliError> {
        let base = Tolerances::default();
        let period = Tolerances {
            iso: file.tol_iso.unwrap_or(base.iso),
            orth: file.tol_orth.unwrap_or(base.orth),
            pos: file.tol_pos.unwrap_or(base.pos),
        };
        let cfg = Config {
            period,
            tol_lie: file.tol_lie.unwrap_or(1e-8),
            tol_wall: file.tol_wall.unwrap_or(1e-8),
            seed: file.seed,
            workers: file.workers.unwrap_or(1),
        };
        let tols = [
            ("tol-iso", cfg.period.iso),
            ("tol-orth", cfg.period.orth),
            ("tol-pos", cfg.period.pos),
            ("tol-lie", cfg.tol_lie),
            ("tol-wall", cfg.tol_wall),
        ];
        for (name, t) in tols {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!(
                    "--{name} must be a positive number, got {t}"
                )));
            }
        }
        if cfg.workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("this command needs --seed".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = ConfigFile {
            tol_iso: Some(1e-6),
            seed: Some(3),
            ..Default::default()
        };
        let flags = ConfigFile {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = Config::resolve(file.merge(flags)).unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.period.iso, 1e-6);
        assert_eq!(cfg.period.pos, 1e-6);
        assert_eq!(cfg.workers, 1);
    }

    #[test]
    fn nonpositive_tolerance_is_a_usage_error() {
        let bad = ConfigFile {
            tol_wall: Some(0.0),
            ..Default::default()
        };
        assert!(matches!(Config::resolve(bad), Err(CliError::Usage(_))));
        let nan = ConfigFile {
            tol_lie: Some(f64::NAN),
            ..Default::default()
        };
        assert!(Config::resolve(nan).is_err());
    }

    #[test]
    fn seed_is_required_on_demand() {
        let cfg = Config::resolve(ConfigFile::default()).unwrap();
        assert!(cfg.seed().is_err());
    }
}
