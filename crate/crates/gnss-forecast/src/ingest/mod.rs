//! Station data ingestion: Cartesian position-file parsing, a cached HTTP
//! fetcher, and station manifests.
//!
//! The artifact consumes already-computed position time series, one
//! whitespace-delimited text file per station. Column positions are
//! configurable through [`ColumnMapping`] so any provider's layout can be
//! adapted without code changes.

mod fetch;
mod manifest;
mod parse;

pub use fetch::{fetch_station, FetchConfig};
pub use manifest::{load_manifest, ManifestEntry};
pub use parse::{format_station_file, parse_cartesian_file, ColumnMapping, ParseDiagnostics};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::Component;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid station id {0:?}: expected exactly 4 uppercase letters or digits")]
    InvalidStationId(String),
    #[error("no valid data rows in file")]
    EmptyFile,
    #[error("only {count} valid data row(s); a series needs at least 2")]
    TooFewRows { count: usize },
    #[error("file mixes stations {first} and {second}")]
    InconsistentStation { first: StationId, second: StationId },
    #[error("epochs are not strictly increasing after sorting and duplicate resolution")]
    NonMonotoneAfterSort,
    #[error("series invariant violated: {0}")]
    InvalidSeries(String),
    #[error("manifest line {line}: {message}")]
    ManifestParse { line: usize, message: String },
    #[error("manifest line {line}: duplicate station {station}")]
    DuplicateStation { station: StationId, line: usize },
    #[error("station {station} not cached and fetching is disabled (offline)")]
    CacheMissOffline { station: StationId },
    #[error("station {station} not found at {url} (HTTP 404)")]
    StationNotFound { station: StationId, url: String },
    #[error("network error fetching {url}{}: {message}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Network {
        url: String,
        status: Option<u16>,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Four-character uppercase station code, e.g. `WTZR` or `P123`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StationId(String);

impl StationId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for StationId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for StationId {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() == 4 && s.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
            Ok(StationId(s.to_owned()))
        } else {
            Err(IngestError::InvalidStationId(s.to_owned()))
        }
    }
}

impl TryFrom<String> for StationId {
    type Error = IngestError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StationId> for String {
    fn from(id: StationId) -> String {
        id.0
    }
}

/// One parsed data row from a station file.
#[derive(Debug, Clone, PartialEq)]
pub struct StationRecordRaw {
    pub station_id: StationId,
    pub epoch_decimal_year: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: Option<f64>,
    pub sigma_x_m: Option<f64>,
    pub sigma_y_m: Option<f64>,
    pub sigma_z_m: Option<f64>,
}

/// One station's horizontal coordinate samples, sorted by epoch.
///
/// Construction enforces the ingestion invariants: strictly increasing
/// epochs, equal component lengths of at least 2, and no non-finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct StationSeries {
    station_id: StationId,
    epochs: Vec<f64>,
    first_component: Vec<f64>,
    second_component: Vec<f64>,
}

impl StationSeries {
    pub fn new(
        station_id: StationId,
        epochs: Vec<f64>,
        first_component: Vec<f64>,
        second_component: Vec<f64>,
    ) -> Result<Self, IngestError> {
        if epochs.len() < 2 {
            return Err(IngestError::TooFewRows { count: epochs.len() });
        }
        if epochs.len() != first_component.len() || epochs.len() != second_component.len() {
            return Err(IngestError::InvalidSeries(format!(
                "component lengths differ: {} epochs, {} first, {} second",
                epochs.len(),
                first_component.len(),
                second_component.len()
            )));
        }
        let all_finite = epochs
            .iter()
            .chain(&first_component)
            .chain(&second_component)
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(IngestError::InvalidSeries("non-finite value".to_owned()));
        }
        if epochs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IngestError::NonMonotoneAfterSort);
        }
        Ok(StationSeries {
            station_id,
            epochs,
            first_component,
            second_component,
        })
    }

    pub fn station_id(&self) -> &StationId {
        &self.station_id
    }

    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }

    pub fn first_component(&self) -> &[f64] {
        &self.first_component
    }

    pub fn second_component(&self) -> &[f64] {
        &self.second_component
    }

    pub fn component(&self, component: Component) -> &[f64] {
        match component {
            Component::First => &self.first_component,
            Component::Second => &self.second_component,
        }
    }
}
