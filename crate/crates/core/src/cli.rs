//! The `objauth` command line: digest a file, sign up, log in, run a load
//! benchmark, or serve.
//!
//! Exit codes: 0 success, 1 rejected or other failure, 2 duplicate user,
//! 3 object too large, 4 transport error (server unreachable, timeout).

use std::io::Write;
use std::net::SocketAddr;
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig, BenchError, LoadShape, Scheme};
use crate::client::{Client, ClientConfig, ClientError, Verdict, DEFAULT_SERVER};
use crate::digest::{digest_file, is_digest_hex};
use crate::server::{self, ServerConfig, DEFAULT_MAX_UPLOAD_BYTES};

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const DUPLICATE: u8 = 2;
    pub const TOO_LARGE: u8 = 3;
    pub const TRANSPORT: u8 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "objauth", version, about = "Log in with a file instead of a password")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a file's SHA-256 as 64 lowercase hex characters.
    Hash { path: PathBuf },
    /// Create an account whose password is the given file.
    Signup {
        #[arg(long)]
        user: String,
        #[arg(long)]
        object: PathBuf,
        #[arg(long, default_value = DEFAULT_SERVER)]
        server: String,
    },
    /// Log in by uploading the file (object) or sending its digest (hash).
    Login {
        #[arg(long)]
        user: String,
        #[arg(long, value_enum)]
        scheme: LoginScheme,
        /// File path, or for --scheme hash a 64-character hex digest.
        target: String,
        #[arg(long, default_value = DEFAULT_SERVER)]
        server: String,
        /// Limit upload speed, bytes per second.
        #[arg(long)]
        throttle_bps: Option<NonZeroU64>,
    },
    /// Drive the server with logins and write a CSV report.
    Bench(BenchArgs),
    /// Run the authentication server.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LoginScheme {
    Object,
    Hash,
}

impl From<LoginScheme> for Scheme {
    fn from(s: LoginScheme) -> Self {
        match s {
            LoginScheme::Object => Scheme::Object,
            LoginScheme::Hash => Scheme::Hash,
        }
    }
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("load").required(true).args(["rate", "clients"])))]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub scheme: LoginScheme,
    /// Open-loop: requests per second.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Closed-loop: number of concurrent clients.
    #[arg(long)]
    pub clients: Option<u32>,
    /// Seconds of request issuing.
    #[arg(long)]
    pub duration: f64,
    /// Bench object size in bytes.
    #[arg(long)]
    pub size: u64,
    #[arg(long)]
    pub throttle_bps: Option<NonZeroU64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = DEFAULT_SERVER)]
    pub server: String,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    #[arg(long, default_value = "accounts.jsonl")]
    pub store: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_UPLOAD_BYTES)]
    pub max_upload_bytes: u64,
    #[arg(long, default_value_t = 0)]
    pub artificial_delay_ms: u64,
    /// Also accept JSON sign-ups with a text password.
    #[arg(long)]
    pub allow_text_signup: bool,
    /// Directory of static files to serve at `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub async fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let code = match cli.command {
        Command::Hash { path } => cmd_hash(&path, out, err),
        Command::Signup { user, object, server } => cmd_signup(&server, &user, &object, out, err).await,
        Command::Login { user, scheme, target, server, throttle_bps } => {
            let cfg = ClientConfig::new(server).with_throttle(throttle_bps);
            cmd_login(cfg, &user, scheme, &target, out, err).await
        }
        Command::Bench(args) => cmd_bench(args, out, err).await,
        Command::Serve(args) => cmd_serve(args, out, err).await,
    };
    let _ = out.flush();
    code
}

pub fn cmd_hash(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match digest_file(path) {
        Ok(d) => {
            let _ = writeln!(out, "{d}");
            exit::OK
        }
        Err(e) => {
            let _ = writeln!(err, "objauth: cannot read {}: {e}", path.display());
            exit::FAILURE
        }
    }
}

fn client_error_exit(e: &ClientError) -> u8 {
    match e {
        ClientError::Transport(_) => exit::TRANSPORT,
        ClientError::Server { status: 409, .. } => exit::DUPLICATE,
        ClientError::Server { status: 413, .. } => exit::TOO_LARGE,
        _ => exit::FAILURE,
    }
}

fn report_client_error(e: &ClientError, err: &mut dyn Write) -> u8 {
    let msg = match e {
        ClientError::Server { status: 409, .. } => "user already exists".to_owned(),
        ClientError::Server { status: 413, .. } => "object exceeds the server's upload limit".to_owned(),
        ClientError::Transport(t) if t.is_connect() => format!("cannot connect to server: {t}"),
        other => other.to_string(),
    };
    let _ = writeln!(err, "objauth: {msg}");
    client_error_exit(e)
}

pub async fn cmd_signup(server: &str, user: &str, object: &Path, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let client = match Client::new(ClientConfig::new(server)) {
        Ok(c) => c,
        Err(e) => return report_client_error(&e, err),
    };
    match client.signup(user, object).await {
        Ok(o) => {
            let _ = writeln!(
                out,
                "ok server_auth_ms={:.3} wall_ms={:.3}",
                o.server_auth_ms.unwrap_or(f64::NAN),
                o.wall_ms
            );
            exit::OK
        }
        Err(e) => report_client_error(&e, err),
    }
}

/// What `login --scheme hash` should send for `target`: a literal digest if it
/// is 64 hex characters and names no existing file, otherwise the digest of
/// the file at that path.
pub fn resolve_hash_target(target: &str) -> std::io::Result<String> {
    if is_digest_hex(target) && !Path::new(target).exists() {
        Ok(target.to_ascii_lowercase())
    } else {
        digest_file(target).map(|d| d.to_hex())
    }
}

pub async fn cmd_login(
    cfg: ClientConfig,
    user: &str,
    scheme: LoginScheme,
    target: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> u8 {
    let client = match Client::new(cfg) {
        Ok(c) => c,
        Err(e) => return report_client_error(&e, err),
    };
    let result = match scheme {
        LoginScheme::Hash => match resolve_hash_target(target) {
            Ok(hex) => client.login_hash(user, &hex).await,
            Err(e) => {
                let _ = writeln!(err, "objauth: cannot read {target}: {e}");
                return exit::FAILURE;
            }
        },
        LoginScheme::Object => client.login_object(user, Path::new(target)).await,
    };
    match result {
        Ok(o) => {
            let server_ms = o.server_auth_ms.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "{} wall_ms={:.3} server_auth_ms={server_ms}", o.verdict.as_str(), o.wall_ms);
            match o.verdict {
                Verdict::Accepted => exit::OK,
                Verdict::Rejected => exit::FAILURE,
            }
        }
        Err(ClientError::Io(e)) => {
            let _ = writeln!(err, "objauth: cannot read {target}: {e}");
            exit::FAILURE
        }
        Err(e) => report_client_error(&e, err),
    }
}

pub async fn cmd_bench(args: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let load = match (args.rate, args.clients) {
        (Some(rate), None) => LoadShape::OpenLoop { rate },
        (None, Some(clients)) => LoadShape::ClosedLoop { clients },
        _ => {
            let _ = writeln!(err, "objauth: exactly one of --rate or --clients is required");
            return exit::FAILURE;
        }
    };
    if !(args.duration.is_finite() && args.duration > 0.0) {
        let _ = writeln!(err, "objauth: --duration must be a positive number of seconds");
        return exit::FAILURE;
    }
    let mut cfg = BenchConfig::new(
        args.server,
        args.scheme.into(),
        load,
        Duration::from_secs_f64(args.duration),
        args.size,
    );
    cfg.throttle_bps = args.throttle_bps;

    let report = match bench::run_load(&cfg).await {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "objauth: {e}");
            return match e {
                BenchError::Unreachable(_) => exit::TRANSPORT,
                _ => exit::FAILURE,
            };
        }
    };
    let written = std::fs::File::create(&args.out)
        .map_err(BenchError::from)
        .and_then(|f| report.write_csv(std::io::BufWriter::new(f)));
    if let Err(e) = written {
        let _ = writeln!(err, "objauth: cannot write {}: {e}", args.out.display());
        return exit::FAILURE;
    }

    let s = &report.summary;
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
    let _ = writeln!(
        out,
        "requests={} completed={} accepted={} transport_errors={} throughput_rps={} latency_mean_ms={} latency_p95_ms={}",
        s.requests,
        s.completed,
        s.accepted,
        s.transport_errors,
        fmt(s.throughput_rps),
        fmt(s.latency_ms.map(|l| l.mean)),
        fmt(s.latency_ms.map(|l| l.p95)),
    );
    if s.failed {
        let _ = writeln!(err, "objauth: run failed: more than 10% of requests got no response");
        return exit::FAILURE;
    }
    exit::OK
}

pub async fn cmd_serve(args: ServeArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let mut cfg = ServerConfig::new(args.listen, args.store);
    cfg.max_upload_bytes = args.max_upload_bytes;
    cfg.artificial_delay = Duration::from_millis(args.artificial_delay_ms);
    cfg.allow_text_signup = args.allow_text_signup;
    cfg.static_dir = args.static_dir;

    let running = match server::start(cfg).await {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "objauth: {e}");
            return exit::FAILURE;
        }
    };
    let _ = writeln!(out, "listening on {}", running.base_url());
    let _ = out.flush();

    let _ = tokio::signal::ctrl_c().await;
    match running.shutdown().await {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "objauth: {e}");
            exit::FAILURE
        }
    }
}
