//! Cache semantics of the station fetcher, demonstrated fully offline.
//!
//! ```bash
//! cargo run --example fetch_cached_station
//! ```

use gnss_forecast::ingest::{fetch_station, FetchConfig, StationId};

fn main() {
    let cache_dir = std::env::temp_dir().join("gnss-forecast-example-cache");
    std::fs::create_dir_all(&cache_dir).expect("create cache dir");

    // The base URL is deliberately unroutable: every path below must be
    // served from the cache or fail fast, never from the network.
    let config = FetchConfig {
        base_url: "http://127.0.0.1:1".to_owned(),
        suffix: ".txt".to_owned(),
        cache_dir: cache_dir.clone(),
        offline: true,
    };

    let station: StationId = "WTZR".parse().expect("valid 4-char code");

    // Cache miss while offline is a hard, named error.
    match fetch_station(&station, &config) {
        Err(e) => println!("before caching: {e}"),
        Ok(_) => println!("unexpected cache hit"),
    }

    // Simulate a prior `fetch` run by placing the file in the cache.
    std::fs::write(
        config.cache_path(&station),
        "WTZR 0 2015.000000 4075580.1 931853.7 4801568.1\n",
    )
    .expect("write cache file");

    match fetch_station(&station, &config) {
        Ok(content) => println!(
            "after caching:  served {} bytes from {}",
            content.len(),
            config.cache_path(&station).display()
        ),
        Err(e) => println!("unexpected error: {e}"),
    }

    let _ = std::fs::remove_dir_all(&cache_dir);
}
