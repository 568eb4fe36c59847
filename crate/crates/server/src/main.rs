use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use pfs_server::{Server, ServerConfig};

#[derive(Parser)]
#[command(
    name = "pfs-serve",
    version,
    about = "Serve a document root, including files inside .pfs wrappers"
)]
struct Cli {
    #[arg(long)]
    root: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    bind: IpAddr,
    #[arg(long, default_value_t = 8080, value_parser = clap::value_parser!(u16).range(1..))]
    port: u16,
    #[arg(long, default_value = "index.html")]
    index: String,
    /// Upstream fetch deadline for remote entities.
    #[arg(long, default_value_t = 10.0, value_name = "SECONDS")]
    remote_timeout: f64,
    #[arg(long)]
    no_remote_relay: bool,
    #[arg(long, default_value_t = 32 << 20)]
    max_remote_bytes: u64,
    #[arg(long, default_value = "info", value_name = "L")]
    log_level: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .init();
    if !(cli.remote_timeout.is_finite() && cli.remote_timeout > 0.0) {
        eprintln!("pfs-serve: --remote-timeout must be positive");
        return ExitCode::from(2);
    }
    let mut config = ServerConfig::new(cli.root);
    config.bind = cli.bind;
    config.port = cli.port;
    config.index_name = cli.index;
    config.remote_timeout = Duration::from_secs_f64(cli.remote_timeout);
    config.remote_relay_enabled = !cli.no_remote_relay;
    config.max_remote_bytes = cli.max_remote_bytes;
    if let Err(e) = config.validate() {
        eprintln!("pfs-serve: {e}");
        return ExitCode::from(2);
    }
    let server = match Server::new(config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("pfs-serve: {e}");
            return ExitCode::from(2);
        }
    };
    match server.run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pfs-serve: {e}");
            ExitCode::from(1)
        }
    }
}
