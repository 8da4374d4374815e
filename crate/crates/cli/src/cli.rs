use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::bench;
use crate::commands::{self, Outcome};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ipfefr", version, about = "Inner-product functional encryption with fine-grained revocation")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub role: Role,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Keystore directory.
    #[arg(long, global = true, default_value = "ipfefr-store")]
    pub store: PathBuf,
    /// Parameter profile: micro, demo, toy or n64.
    #[arg(long, global = true)]
    pub profile: Option<String>,
    /// Hex seed (up to 32 bytes) for reproducible randomness.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Print a JSON object instead of a human-readable line.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Role {
    /// Certificate authority.
    Ca {
        #[command(subcommand)]
        cmd: CaCmd,
    },
    /// Group manager.
    Gm {
        #[command(subcommand)]
        cmd: GmCmd,
    },
    /// Cloud server.
    Cs {
        #[command(subcommand)]
        cmd: CsCmd,
    },
    /// Electronic health record owner.
    Eh {
        #[command(subcommand)]
        cmd: EhCmd,
    },
    /// Medical institution (a group member).
    Mi {
        #[command(subcommand)]
        cmd: MiCmd,
    },
    /// Time every algorithm at n = 64.
    Bench {
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CaCmd {
    Setup,
    Fkeygen {
        #[arg(long)]
        id: String,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
    },
    Uptkeygen,
}

#[derive(Debug, Subcommand)]
pub enum GmCmd {
    GroupSetup,
    Ukeygen {
        #[arg(long)]
        id: String,
    },
    GroupUpdate,
    Fupdate {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        /// Identities to revoke for this function; may repeat.
        #[arg(long)]
        revoke: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CsCmd {
    CtUpdate {
        #[arg(long)]
        ct: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum EhCmd {
    Enc {
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<u64>,
        /// Name of the ciphertext in the store.
        #[arg(long)]
        out: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum MiCmd {
    Dec {
        #[arg(long)]
        id: String,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        #[arg(long)]
        ct: String,
    },
    KeyUpdate {
        #[arg(long)]
        id: String,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
    },
}

/// Builds the command RNG. A fixed seed gives each command its own stream
/// so that repeated invocations with one seed do not reuse randomness.
fn command_rng(seed: Option<&str>, stream: u64) -> CliResult<ChaCha20Rng> {
    let Some(hex_seed) = seed else {
        return Ok(ChaCha20Rng::from_os_rng());
    };
    let bytes = hex::decode(hex_seed.trim_start_matches("0x")).map_err(|e| CliError::Usage(format!("--seed: {e}")))?;
    if bytes.len() > 32 {
        return Err(CliError::Usage("--seed is longer than 32 bytes".into()));
    }
    let mut key = [0u8; 32];
    key[..bytes.len()].copy_from_slice(&bytes);
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream);
    Ok(rng)
}

pub fn execute(cli: Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    let (store, profile) = (g.store.as_path(), g.profile.as_deref());
    let rng = |stream| command_rng(g.seed.as_deref(), stream);
    match &cli.role {
        Role::Ca { cmd: CaCmd::Setup } => commands::setup(store, profile, &mut rng(1)?),
        Role::Ca { cmd: CaCmd::Fkeygen { id, x } } => commands::fkeygen(store, profile, id, x, &mut rng(2)?),
        Role::Ca { cmd: CaCmd::Uptkeygen } => commands::uptkeygen(store, profile, &mut rng(3)?),
        Role::Gm { cmd: GmCmd::GroupSetup } => commands::group_setup(store, profile, &mut rng(4)?),
        Role::Gm { cmd: GmCmd::Ukeygen { id } } => commands::ukeygen(store, profile, id),
        Role::Gm { cmd: GmCmd::GroupUpdate } => commands::group_update(store, profile, &mut rng(5)?),
        Role::Gm { cmd: GmCmd::Fupdate { x, revoke } } => commands::fupdate(store, profile, x, revoke, &mut rng(6)?),
        Role::Cs { cmd: CsCmd::CtUpdate { ct } } => commands::ct_update(store, profile, ct),
        Role::Eh { cmd: EhCmd::Enc { y, out } } => commands::enc(store, profile, y, out, &mut rng(7)?),
        Role::Mi { cmd: MiCmd::Dec { id, x, ct } } => commands::dec(store, profile, id, x, ct),
        Role::Mi { cmd: MiCmd::KeyUpdate { id, x } } => commands::key_update(store, profile, id, x),
        Role::Bench { reps } => {
            let report = bench::run(*reps, &bench::CONFIGS, &mut rng(8)?)?;
            let json = serde_json::to_value(&report)?;
            Ok(Outcome { text: report.table(), json })
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let json = cli.global.json;
    match execute(cli) {
        Ok(outcome) => {
            let _ = if json { writeln!(out, "{}", outcome.json) } else { writeln!(out, "{}", outcome.text.trim_end()) };
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            e.exit_code()
        }
    }
}
