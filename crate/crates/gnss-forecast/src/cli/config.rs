//! The experiment configuration file: flat TOML where every hyperparameter
//! is addressable by dotted key (`gp.lengthscale_grid`, `svr.c`, ...), so a
//! run is fully reproducible from one human-editable artifact.

use serde::Deserialize;
use std::path::{Path, PathBuf};

use super::CliError;
use crate::harness::{ExperimentConfig, StationSource};
use crate::ingest::ColumnMapping;
use crate::models::{
    BnnParams, CartParams, GpParams, GrnnParams, Hyperparameters, KnnParams, MethodKind,
    MlpParams, SvrParams,
};
use crate::synth::SynthSpec;

/// Environment variable consulted when no cache directory is configured.
pub const CACHE_DIR_ENV: &str = "GNSS_FORECAST_CACHE";

fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("cache"))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationsSection {
    /// Manifest of real stations (`STATION_ID [local path]` per line).
    pub manifest: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub suffix: Option<String>,
    /// Base URL for the `fetch` subcommand.
    pub base_url: Option<String>,
    pub mapping: Option<ColumnMapping>,
    /// Synthetic roster; mutually exclusive with `manifest`.
    pub synth: Vec<SynthSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub m: Option<usize>,
    pub horizon: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub master_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub parallel: Option<bool>,
    pub stations: StationsSection,
    pub mlp: MlpParams,
    pub bnn: BnnParams,
    pub gp: GpParams,
    pub knn: KnnParams,
    pub grnn: GrnnParams,
    pub cart: CartParams,
    pub svr: SvrParams,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::runtime(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::runtime(format!("config {}: {e}", path.display())))
    }

    pub fn hyperparameters(&self) -> Hyperparameters {
        Hyperparameters {
            mlp: self.mlp.clone(),
            bnn: self.bnn.clone(),
            gp: self.gp.clone(),
            knn: self.knn.clone(),
            grnn: self.grnn.clone(),
            cart: self.cart.clone(),
            svr: self.svr.clone(),
        }
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.stations.cache_dir.clone().unwrap_or_else(default_cache_dir)
    }

    pub fn station_source(&self, cache_dir_override: Option<&Path>) -> Result<StationSource, CliError> {
        match (&self.stations.manifest, self.stations.synth.is_empty()) {
            (Some(_), false) => Err(CliError::runtime(
                "config declares both a manifest and synth stations; pick one".to_owned(),
            )),
            (Some(path), true) => Ok(StationSource::Manifest {
                path: path.clone(),
                cache_dir: cache_dir_override
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| self.cache_dir()),
                suffix: self.stations.suffix.clone().unwrap_or_else(|| ".txt".to_owned()),
                mapping: self.stations.mapping.clone().unwrap_or_default(),
            }),
            (None, false) => Ok(StationSource::Synth(self.stations.synth.clone())),
            (None, true) => Err(CliError::runtime(
                "config declares no stations: set stations.manifest or [[stations.synth]]".to_owned(),
            )),
        }
    }
}

/// Flag overrides; each takes precedence over the config file value.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub horizon: Option<usize>,
    pub methods: Option<Vec<MethodKind>>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

pub fn parse_methods(names: &[String]) -> Result<Vec<MethodKind>, CliError> {
    names
        .iter()
        .map(|n| n.parse::<MethodKind>().map_err(CliError::usage))
        .collect()
}

/// Merges file values and overrides into a runnable experiment config.
pub fn build_experiment_config(
    file: &FileConfig,
    overrides: &RunOverrides,
) -> Result<ExperimentConfig, CliError> {
    let m = overrides
        .m
        .or(file.m)
        .ok_or_else(|| CliError::runtime("training count m is not set (config `m` or --m)".to_owned()))?;
    let horizon = overrides.horizon.or(file.horizon).ok_or_else(|| {
        CliError::runtime("horizon is not set (config `horizon` or --horizon)".to_owned())
    })?;
    let methods = match &overrides.methods {
        Some(list) => list.clone(),
        None => match &file.methods {
            Some(names) => parse_methods(names)?,
            None => MethodKind::ALL.to_vec(),
        },
    };
    Ok(ExperimentConfig {
        stations: file.station_source(overrides.cache_dir.as_deref())?,
        m,
        horizon,
        methods,
        hyperparameters: file.hyperparameters(),
        master_seed: overrides.seed.or(file.master_seed).unwrap_or(42),
        output_dir: overrides
            .out
            .clone()
            .or_else(|| file.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        parallel: file.parallel.unwrap_or(true),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYNTH_CONFIG: &str = r#"
m = 60
horizon = 10
master_seed = 9
methods = ["GP", "knn"]

gp.lengthscale_grid = [0.1, 0.5]
svr.c = 3.5

[[stations.synth]]
station_id = "SY00"
start_epoch = 2015.0
cadence_days = 1.0
length = 80
noise_sigma_m = 0.002
seed = 3
"#;

    #[test]
    fn parses_synth_config_with_dotted_hyperparameters() {
        let file: FileConfig = toml::from_str(SYNTH_CONFIG).unwrap();
        assert_eq!(file.m, Some(60));
        assert_eq!(file.gp.lengthscale_grid, vec![0.1, 0.5]);
        assert_eq!(file.svr.c, 3.5);
        // Unset sections keep their defaults.
        assert_eq!(file.knn.k, 5);

        let config = build_experiment_config(&file, &RunOverrides::default()).unwrap();
        assert_eq!(config.master_seed, 9);
        assert_eq!(config.methods, vec![MethodKind::Gp, MethodKind::Knn]);
        assert!(matches!(config.stations, StationSource::Synth(ref v) if v.len() == 1));
    }

    #[test]
    fn overrides_beat_file_values() {
        let file: FileConfig = toml::from_str(SYNTH_CONFIG).unwrap();
        let overrides = RunOverrides {
            seed: Some(1),
            m: Some(50),
            methods: Some(vec![MethodKind::Cart]),
            ..RunOverrides::default()
        };
        let config = build_experiment_config(&file, &overrides).unwrap();
        assert_eq!(config.master_seed, 1);
        assert_eq!(config.m, 50);
        assert_eq!(config.methods, vec![MethodKind::Cart]);
    }

    #[test]
    fn missing_station_source_is_an_error() {
        let file: FileConfig = toml::from_str("m = 10\nhorizon = 2\n").unwrap();
        assert!(build_experiment_config(&file, &RunOverrides::default()).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("m = 10\nmystery = 1\n").is_err());
        assert!(toml::from_str::<FileConfig>("gp.lengthscales = [0.1]\n").is_err());
    }

    #[test]
    fn manifest_source_uses_env_cache_fallback() {
        let file: FileConfig =
            toml::from_str("m = 10\nhorizon = 2\nstations.manifest = \"stations.txt\"\n").unwrap();
        let source = file.station_source(None).unwrap();
        match source {
            StationSource::Manifest { suffix, .. } => assert_eq!(suffix, ".txt"),
            other => panic!("unexpected source {other:?}"),
        }
    }
}
