use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fbar::{Format, Layout, Mode};

mod commands;
mod tables;

/// Exit statuses. Every failure path maps to exactly one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    AuditFailed = 1,
    Io = 2,
    MissingTable = 3,
    MalformedArtifact = 4,
    ModeMismatch = 5,
    BadTable = 6,
    Usage = 64,
}

/// A failure carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(exit: Exit, error: impl Into<anyhow::Error>) -> Self {
        Failure { exit, error: error.into() }
    }
}

pub type CmdResult = Result<Exit, Failure>;

#[derive(Parser, Debug)]
#[command(name = "fbar", version, about = "Bit-pair translation-table codec")]
struct Cli {
    /// Coordinate layout used to build and check tables.
    #[arg(long, global = true, value_enum, default_value_t = LayoutArg::Interleaved)]
    layout: LayoutArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate translation table file(s).
    GenTt(GenTtArgs),
    /// Compress a file into a grid or honest artifact.
    Compress(CompressArgs),
    /// Reconstruct the original file from an artifact.
    Decompress(DecompressArgs),
    /// Check a table's bijection and report per-channel information.
    Audit(AuditArgs),
    /// Compress and decompress a set of files and tabulate sizes and timings.
    Bench(BenchArgs),
    /// Report order-0 entropies of files.
    Entropy(EntropyArgs),
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Table file; repeat four times for 4tt. Defaults to files in FBAR_TT_DIR.
    #[arg(long = "tt")]
    pub tt: Vec<PathBuf>,

    /// Directory holding default tables.
    #[arg(long, env = "FBAR_TT_DIR", default_value = ".")]
    pub tt_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenTtArgs {
    /// Output directory.
    #[arg(long, env = "FBAR_TT_DIR", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = TtFormatArg::Binary)]
    pub format: TtFormatArg,
    /// Number of tables: 1, or 4 for the four-table mode.
    #[arg(long, default_value_t = 1, value_parser = clap::builder::PossibleValuesParser::new(["1", "4"]).map(|s| s.parse::<u8>().unwrap()))]
    pub count: u8,
}

#[derive(Args, Debug)]
pub struct CompressArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::OneTt)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Paper)]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value_t = ReportArg::Table)]
    pub report: ReportArg,
    #[command(flatten)]
    pub tables: TableArgs,
}

#[derive(Args, Debug)]
pub struct DecompressArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Expected mode; the artifact header must agree.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = ReportArg::Table)]
    pub report: ReportArg,
    #[command(flatten)]
    pub tables: TableArgs,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[command(flatten)]
    pub tables: TableArgs,
    #[arg(long, value_enum, default_value_t = ReportArg::Table)]
    pub report: ReportArg,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportArg::Table)]
    pub report: ReportArg,
    #[command(flatten)]
    pub tables: TableArgs,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportArg::Table)]
    pub report: ReportArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LayoutArg {
    Interleaved,
    Grouped,
}

impl From<LayoutArg> for Layout {
    fn from(l: LayoutArg) -> Layout {
        match l {
            LayoutArg::Interleaved => Layout::Interleaved,
            LayoutArg::Grouped => Layout::Grouped,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    #[value(name = "1tt")]
    OneTt,
    #[value(name = "4tt")]
    FourTt,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::OneTt => Mode::OneTable,
            ModeArg::FourTt => Mode::FourTables,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Paper,
    Honest,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Paper => Format::Paper,
            FormatArg::Honest => Format::Honest,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TtFormatArg {
    Text,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportArg {
    Table,
    Kv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Exit::Usage as u8),
            };
        }
    };
    let layout = Layout::from(cli.layout);
    let result = match cli.command {
        Command::GenTt(args) => commands::gen_tt(&args, layout),
        Command::Compress(args) => commands::compress(&args, layout),
        Command::Decompress(args) => commands::decompress(&args, layout),
        Command::Audit(args) => commands::audit(&args, layout),
        Command::Bench(args) => commands::bench(&args, layout),
        Command::Entropy(args) => commands::entropy(&args),
    };
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(f) => {
            eprintln!("fbar: {:#}", f.error);
            ExitCode::from(f.exit as u8)
        }
    }
}
