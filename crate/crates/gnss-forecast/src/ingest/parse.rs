//! Whitespace-delimited Cartesian position-file parsing and writing.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{IngestError, StationId, StationRecordRaw, StationSeries};

/// Plausible decimal-year window for permanent-station data.
const EPOCH_RANGE: std::ops::RangeInclusive<f64> = 1990.0..=2100.0;
/// Largest plausible single geocentric coordinate, meters.
const COORD_ABS_MAX: f64 = 1.0e7;
/// Plausible geocentric position norm, meters. Individual components can
/// be legitimately small (a station near the Greenwich meridian has a tiny
/// Y), so plausibility is judged on the vector, not per axis.
const NORM_RANGE: std::ops::RangeInclusive<f64> = 1.0e6..=1.0e7;

/// Column layout of a station file.
///
/// Defaults to `station _ year x y z sx sy sz`, i.e. station in column 0,
/// decimal year in column 2, coordinates in columns 3-5 and their sigmas in
/// columns 6-8. Optional columns that a row does not have are simply absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMapping {
    pub station: usize,
    pub epoch: usize,
    pub x: usize,
    pub y: usize,
    pub z: Option<usize>,
    pub sigma_x: Option<usize>,
    pub sigma_y: Option<usize>,
    pub sigma_z: Option<usize>,
    /// Drop rows whose coordinate vector is implausible for a geocentric
    /// frame: any component beyond 1e7 m in magnitude, or a position norm
    /// outside [1e6, 1e7] m. Disable for local or synthetic frames.
    pub enforce_coordinate_range: bool,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        ColumnMapping {
            station: 0,
            epoch: 2,
            x: 3,
            y: 4,
            z: Some(5),
            sigma_x: Some(6),
            sigma_y: Some(7),
            sigma_z: Some(8),
            enforce_coordinate_range: true,
        }
    }
}

/// Row-level bookkeeping from one parse.
///
/// `skipped` is the total number of dropped candidate data rows; the other
/// counters break that total down. `#`-prefixed and blank lines are not
/// counted at all.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub skipped: usize,
    pub header_rows: usize,
    pub malformed_rows: usize,
    pub non_finite_rows: usize,
    pub out_of_range_rows: usize,
    /// Earlier occurrences displaced by a later row with the same epoch.
    pub duplicate_epochs: usize,
}

enum RowOutcome {
    Record(StationRecordRaw),
    Header,
    Malformed,
    NonFinite,
    OutOfRange,
}

/// Parses one station's file into a sorted [`StationSeries`].
///
/// Rows that cannot be interpreted are skipped and tallied rather than
/// aborting the parse: a non-numeric decimal-year column marks a header
/// line, non-finite or out-of-range values drop the row. Duplicate epochs
/// keep the last occurrence in file order, since providers publish
/// corrections by appending.
pub fn parse_cartesian_file(
    content: &str,
    mapping: &ColumnMapping,
) -> Result<(StationSeries, ParseDiagnostics), IngestError> {
    let mut diagnostics = ParseDiagnostics::default();
    let mut records: Vec<StationRecordRaw> = Vec::new();

    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_row(line, mapping) {
            RowOutcome::Record(record) => records.push(record),
            RowOutcome::Header => {
                diagnostics.header_rows += 1;
                diagnostics.skipped += 1;
            }
            RowOutcome::Malformed => {
                diagnostics.malformed_rows += 1;
                diagnostics.skipped += 1;
            }
            RowOutcome::NonFinite => {
                diagnostics.non_finite_rows += 1;
                diagnostics.skipped += 1;
            }
            RowOutcome::OutOfRange => {
                diagnostics.out_of_range_rows += 1;
                diagnostics.skipped += 1;
            }
        }
    }

    if records.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    let station_id = records[0].station_id.clone();
    if let Some(other) = records.iter().find(|r| r.station_id != station_id) {
        return Err(IngestError::InconsistentStation {
            first: station_id,
            second: other.station_id.clone(),
        });
    }

    // Stable sort keeps file order within equal epochs, so the last element
    // of each equal-epoch run is the last occurrence in the file.
    records.sort_by(|a, b| a.epoch_decimal_year.total_cmp(&b.epoch_decimal_year));
    let mut epochs = Vec::with_capacity(records.len());
    let mut first = Vec::with_capacity(records.len());
    let mut second = Vec::with_capacity(records.len());
    for record in &records {
        if epochs.last() == Some(&record.epoch_decimal_year) {
            diagnostics.duplicate_epochs += 1;
            *first.last_mut().unwrap() = record.x_m;
            *second.last_mut().unwrap() = record.y_m;
        } else {
            epochs.push(record.epoch_decimal_year);
            first.push(record.x_m);
            second.push(record.y_m);
        }
    }
    if epochs.len() < 2 {
        return Err(IngestError::TooFewRows { count: epochs.len() });
    }

    let series = StationSeries::new(station_id, epochs, first, second)?;
    Ok((series, diagnostics))
}

fn parse_row(line: &str, mapping: &ColumnMapping) -> RowOutcome {
    let fields: Vec<&str> = line.split_whitespace().collect();

    let Some(&epoch_field) = fields.get(mapping.epoch) else {
        return RowOutcome::Malformed;
    };
    let Ok(epoch) = epoch_field.parse::<f64>() else {
        return RowOutcome::Header;
    };
    if !epoch.is_finite() {
        return RowOutcome::NonFinite;
    }
    if !EPOCH_RANGE.contains(&epoch) {
        return RowOutcome::OutOfRange;
    }

    let Some(station_field) = fields.get(mapping.station) else {
        return RowOutcome::Malformed;
    };
    let Ok(station_id) = station_field.parse::<StationId>() else {
        return RowOutcome::Malformed;
    };

    let mut coords = [0.0f64; 2];
    for (slot, col) in coords.iter_mut().zip([mapping.x, mapping.y]) {
        let Some(field) = fields.get(col) else {
            return RowOutcome::Malformed;
        };
        let Ok(value) = field.parse::<f64>() else {
            return RowOutcome::Malformed;
        };
        if !value.is_finite() {
            return RowOutcome::NonFinite;
        }
        *slot = value;
    }
    let z = match mapping.z.and_then(|col| fields.get(col)) {
        Some(field) => match field.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            Ok(_) => return RowOutcome::NonFinite,
            Err(_) => return RowOutcome::Malformed,
        },
        None => None,
    };
    if mapping.enforce_coordinate_range {
        let component_ok = coords[0].abs() <= COORD_ABS_MAX
            && coords[1].abs() <= COORD_ABS_MAX
            && z.is_none_or(|v| v.abs() <= COORD_ABS_MAX);
        let norm = (coords[0] * coords[0]
            + coords[1] * coords[1]
            + z.map_or(0.0, |v| v * v))
        .sqrt();
        if !component_ok || !NORM_RANGE.contains(&norm) {
            return RowOutcome::OutOfRange;
        }
    }

    let sigma = |col: Option<usize>| {
        col.and_then(|c| fields.get(c))
            .and_then(|f| f.parse::<f64>().ok())
            .filter(|v| v.is_finite())
    };

    RowOutcome::Record(StationRecordRaw {
        station_id,
        epoch_decimal_year: epoch,
        x_m: coords[0],
        y_m: coords[1],
        z_m: z,
        sigma_x_m: sigma(mapping.sigma_x),
        sigma_y_m: sigma(mapping.sigma_y),
        sigma_z_m: sigma(mapping.sigma_z),
    })
}

/// Placeholder third coordinate written for series that only carry the two
/// horizontal components; kept inside the plausible geocentric range so the
/// default parser accepts the rows back.
const PLACEHOLDER_Z_M: f64 = 4_500_000.0;

/// Serializes a series in the default column layout.
///
/// Epochs are written with 6 decimals (about 30 s) and coordinates with 5
/// (0.01 mm), so a parse round-trip reproduces the series well within
/// 1e-6 year and 1e-5 m.
pub fn format_station_file(series: &StationSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# station index epoch_year x_m y_m z_m");
    for (k, &epoch) in series.epochs().iter().enumerate() {
        let _ = writeln!(
            out,
            "{} {} {:.6} {:.5} {:.5} {:.5}",
            series.station_id(),
            k,
            epoch,
            series.first_component()[k],
            series.second_component()[k],
            PLACEHOLDER_Z_M,
        );
    }
    out
}
