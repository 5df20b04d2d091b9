//! Station manifests: the experimenter's chosen roster, one entry per line.

use std::path::{Path, PathBuf};

use super::{IngestError, StationId};

/// One manifest line: `STATION_ID [optional local path]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub station_id: StationId,
    pub local_path: Option<PathBuf>,
}

/// Loads a manifest, preserving entry order as written.
///
/// `#` comments and blank lines are ignored. Duplicate station ids are
/// rejected: averaging over a station listed twice would silently bias the
/// cross-station means.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    let content = std::fs::read_to_string(path)?;
    parse_manifest(&content)
}

pub(crate) fn parse_manifest(content: &str) -> Result<Vec<ManifestEntry>, IngestError> {
    let mut entries: Vec<ManifestEntry> = Vec::new();
    for (index, raw_line) in content.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let id_field = fields.next().expect("non-empty line has a first field");
        let station_id: StationId =
            id_field
                .parse()
                .map_err(|_| IngestError::ManifestParse {
                    line: line_no,
                    message: format!("invalid station id {id_field:?}"),
                })?;
        let local_path = fields.next().map(PathBuf::from);
        if let Some(extra) = fields.next() {
            return Err(IngestError::ManifestParse {
                line: line_no,
                message: format!("unexpected trailing field {extra:?}"),
            });
        }
        if entries.iter().any(|e| e.station_id == station_id) {
            return Err(IngestError::DuplicateStation {
                station: station_id,
                line: line_no,
            });
        }
        entries.push(ManifestEntry {
            station_id,
            local_path,
        });
    }
    if entries.is_empty() {
        return Err(IngestError::ManifestParse {
            line: 0,
            message: "no stations".to_owned(),
        });
    }
    Ok(entries)
}
