//! Cached HTTP fetching of station files.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use super::{IngestError, StationId};

/// Where station files come from and where they are cached.
#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub base_url: String,
    /// Appended to the station id in both the URL and the cache file name.
    pub suffix: String,
    pub cache_dir: PathBuf,
    /// Never touch the network; a cache miss becomes an error.
    pub offline: bool,
}

impl FetchConfig {
    pub fn cache_path(&self, station_id: &StationId) -> PathBuf {
        self.cache_dir.join(format!("{}{}", station_id, self.suffix))
    }

    pub fn url(&self, station_id: &StationId) -> String {
        format!(
            "{}/{}{}",
            self.base_url.trim_end_matches('/'),
            station_id,
            self.suffix
        )
    }
}

/// Returns a station file's content, from cache when present.
///
/// A cache hit never touches the network. On a miss the file is downloaded
/// (one retry on transport errors) and stored write-temp-then-rename, so a
/// concurrent fetcher of the same station never observes a torn file.
pub fn fetch_station(station_id: &StationId, config: &FetchConfig) -> Result<String, IngestError> {
    let cache_path = config.cache_path(station_id);
    match std::fs::read_to_string(&cache_path) {
        Ok(content) => return Ok(content),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => return Err(e.into()),
    }
    if config.offline {
        return Err(IngestError::CacheMissOffline {
            station: station_id.clone(),
        });
    }

    let url = config.url(station_id);
    let content = download(&url, station_id)?;
    std::fs::create_dir_all(&config.cache_dir)?;
    write_atomic(&config.cache_dir, &cache_path, &content)?;
    Ok(content)
}

fn download(url: &str, station_id: &StationId) -> Result<String, IngestError> {
    let mut last_transport: Option<ureq::Error> = None;
    for _ in 0..2 {
        match ureq::get(url).call() {
            Ok(mut response) => {
                return response.body_mut().read_to_string().map_err(|e| {
                    IngestError::Network {
                        url: url.to_owned(),
                        status: None,
                        message: format!("reading body: {e}"),
                    }
                });
            }
            Err(ureq::Error::StatusCode(404)) => {
                return Err(IngestError::StationNotFound {
                    station: station_id.clone(),
                    url: url.to_owned(),
                });
            }
            Err(ureq::Error::StatusCode(status)) => {
                return Err(IngestError::Network {
                    url: url.to_owned(),
                    status: Some(status),
                    message: "unexpected HTTP status".to_owned(),
                });
            }
            Err(transport) => last_transport = Some(transport),
        }
    }
    let e = last_transport.expect("loop exits early unless a transport error occurred");
    Err(IngestError::Network {
        url: url.to_owned(),
        status: None,
        message: e.to_string(),
    })
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn write_atomic(dir: &Path, target: &Path, content: &str) -> Result<(), IngestError> {
    let unique = format!(
        ".tmp-{}-{}",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    );
    let temp_path = dir.join(unique);
    std::fs::write(&temp_path, content)?;
    match std::fs::rename(&temp_path, target) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = std::fs::remove_file(&temp_path);
            Err(e.into())
        }
    }
}
