use std::path::PathBuf;

use clap::{Parser, Subcommand};

use gnss_forecast::cli::{self, parse_methods, RunOverrides, CACHE_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "gnss-forecast",
    version,
    about = "Benchmark seven classical regressors on horizontal GNSS position time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download every manifest station into the local cache.
    Fetch {
        /// Manifest file: one `STATION_ID [local path]` per line.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        base_url: String,
        /// Appended to the station id in URLs and cache file names.
        #[arg(long, default_value = ".txt")]
        suffix: String,
        /// Defaults to $GNSS_FORECAST_CACHE, then ./cache.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Fail on cache misses instead of touching the network.
        #[arg(long)]
        offline: bool,
    },
    /// Write synthetic station files from the config's [[stations.synth]].
    Synth {
        /// Config file (also accepted via --config).
        config: Option<PathBuf>,
        #[arg(long = "config", value_name = "PATH")]
        config_flag: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the benchmark and emit the report plus averaged tables.
    Run {
        /// Config file (also accepted via --config).
        config: Option<PathBuf>,
        #[arg(long = "config", value_name = "PATH")]
        config_flag: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Training count.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
        /// Comma-separated subset of MLP,BNN,GP,KNN,GRNN,CART,SVR.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Summarize an existing report.json; optionally re-emit its tables.
    Report {
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Fetch {
            manifest,
            base_url,
            suffix,
            cache_dir,
            offline,
        } => {
            let cache_dir = cache_dir.unwrap_or_else(default_cache_dir);
            cli::cmd_fetch(&manifest, &base_url, &suffix, &cache_dir, offline)
        }
        Command::Synth {
            config,
            config_flag,
            out,
        } => match require_config(config, config_flag) {
            Ok(path) => cli::cmd_synth(&path, &out),
            Err(code) => code,
        },
        Command::Run {
            config,
            config_flag,
            seed,
            m,
            horizon,
            methods,
            out,
            cache_dir,
        } => match require_config(config, config_flag) {
            Ok(path) => {
                let methods = match methods.as_deref().map(parse_methods) {
                    Some(Ok(list)) => Some(list),
                    Some(Err(e)) => {
                        eprintln!("error: {e}");
                        std::process::exit(e.exit_code());
                    }
                    None => None,
                };
                let overrides = RunOverrides {
                    seed,
                    m,
                    horizon,
                    methods,
                    out,
                    cache_dir,
                };
                cli::cmd_run(&path, &overrides)
            }
            Err(code) => code,
        },
        Command::Report { report, out } => cli::cmd_report(&report, out.as_ref()),
    };
    std::process::exit(code);
}

fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("cache"))
}

fn require_config(positional: Option<PathBuf>, flag: Option<PathBuf>) -> Result<PathBuf, i32> {
    match flag.or(positional) {
        Some(path) => Ok(path),
        None => {
            eprintln!("error: a config file is required (positional or --config)");
            Err(cli::EXIT_USAGE)
        }
    }
}
