//! `hve`: build and search hidden-vector-encrypted record indexes.
//!
//! Exit codes: 0 success, 1 usage error, 2 cryptographic or decoding
//! failure, 3 no matches (`search --fail-empty` only).

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hve_core::SchemeId;

mod backend;
mod commands;
mod files;
mod payload;
mod spec;

/// An error caused by the invocation rather than by the data.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

macro_rules! usage {
    ($($arg:tt)*) => {
        anyhow::Error::new($crate::Usage(format!($($arg)*)))
    };
}
pub(crate) use usage;

#[derive(Parser)]
#[command(
    name = "hve",
    version,
    about = "Build and search hidden-vector-encrypted record indexes"
)]
struct Cli {
    /// Derive all randomness from this seed. For reproducible tests only:
    /// keys and ciphertexts made this way are not secret.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen(KeygenArgs),
    /// Encrypt one record and append it to an index.
    Encrypt(EncryptArgs),
    /// Generate a search token from a predicate spec.
    Token(TokenArgs),
    /// Fix `?` slots of a dhve3 token.
    Delegate(DelegateArgs),
    /// Scan an index with a token.
    Search(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Bw2,
    Ll3,
    Dhve3,
    Asym1,
}

impl From<SchemeArg> for SchemeId {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Bw2 => SchemeId::Bw2,
            SchemeArg::Ll3 => SchemeId::Ll3,
            SchemeArg::Dhve3 => SchemeId::Dhve3,
            SchemeArg::Asym1 => SchemeId::Asym1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    #[value(name = "bls12-381")]
    Bls12_381,
    Bn254,
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Number of attribute fields.
    #[arg(long, value_name = "L", value_parser = clap::value_parser!(u32).range(1..),
          required_unless_present = "encode", conflicts_with = "encode")]
    fields: Option<u32>,
    /// Generate keys for a predicate encoding instead of plain fields.
    #[arg(long, value_enum, requires_all = ["domain", "width"])]
    encode: Option<files::Family>,
    /// Domain size n; encoded values range over 1..=n.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..), requires = "encode")]
    domain: Option<u32>,
    /// Number of encoded fields w.
    #[arg(long, value_name = "W", value_parser = clap::value_parser!(u32).range(1..), requires = "encode")]
    width: Option<u32>,
    #[arg(long, value_enum, default_value = "bls12-381")]
    curve: CurveArg,
    /// Use the symmetric representation of the source group.
    #[arg(long)]
    symmetric: bool,
    #[arg(long)]
    out_dir: PathBuf,
    /// Overwrite existing key files.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct EncryptArgs {
    #[arg(long)]
    pk: PathBuf,
    #[arg(long)]
    index: PathBuf,
    /// Comma-separated attribute values (plain key pairs).
    #[arg(long, conflicts_with = "values")]
    attrs: Option<String>,
    /// Comma-separated values in 1..=n (encoded key pairs).
    #[arg(long)]
    values: Option<String>,
    /// Payload file, or `-` for stdin.
    #[arg(long)]
    payload: PathBuf,
    /// Record id; defaults to a digest of the ciphertext.
    #[arg(long)]
    id: Option<String>,
    /// Also append the plaintext attributes to `<index>.plain.jsonl`.
    /// Test mode only: this defeats the encryption.
    #[arg(long)]
    sidecar: bool,
}

#[derive(Args)]
struct TokenArgs {
    #[arg(long)]
    sk: PathBuf,
    #[arg(long)]
    pk: PathBuf,
    /// One expression per field: =v * ? <=k >=k in{a,b} [lo,hi]
    #[arg(long, allow_hyphen_values = true)]
    spec: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DelegateArgs {
    #[arg(long)]
    token: PathBuf,
    #[arg(long)]
    pk: PathBuf,
    /// `k=v` or `k=*` with 1-based field k. Repeat to fix several slots.
    #[arg(long, required = true, value_name = "K=V")]
    fix: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    token: PathBuf,
    #[arg(long)]
    pk: PathBuf,
    /// Print the number of pairings evaluated to stderr.
    #[arg(long)]
    raw_count: bool,
    /// Write matching payloads to this directory, one file per record id.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Exit with status 3 when nothing matches.
    #[arg(long)]
    fail_empty: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() {
                1
            } else {
                2
            })
        }
    }
}
