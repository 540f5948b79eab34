//! Locating and loading translation tables from disk.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use fbar::codec::Tables;
use fbar::transtable::load_any;
use fbar::{Layout, Mode, TranslationTable, TtError, TtSet4};

use crate::{Exit, Failure, TableArgs};

pub const BINARY_EXT: &str = "bin";
pub const TEXT_EXT: &str = "txt";

/// File name for table `index` (1-based) of `count`.
pub fn table_file_name(count: u8, index: u8, ext: &str) -> String {
    if count == 1 {
        format!("tt.{ext}")
    } else {
        format!("tt-{index}.{ext}")
    }
}

fn default_path(dir: &Path, count: u8, index: u8) -> Option<PathBuf> {
    [BINARY_EXT, TEXT_EXT]
        .iter()
        .map(|ext| dir.join(table_file_name(count, index, ext)))
        .find(|p| p.is_file())
}

/// Paths for `mode`: explicit `--tt` values, else the defaults in the
/// table directory.
pub fn resolve(args: &TableArgs, mode: Mode) -> Result<Vec<PathBuf>, Failure> {
    let want = match mode {
        Mode::OneTable => 1,
        Mode::FourTables => 4,
    };
    if !args.tt.is_empty() {
        if args.tt.len() != want as usize {
            return Err(Failure::new(
                Exit::ModeMismatch,
                anyhow!("mode {mode} needs {want} table(s), {} given", args.tt.len()),
            ));
        }
        return Ok(args.tt.clone());
    }
    (1..=want)
        .map(|i| {
            default_path(&args.tt_dir, want, i).ok_or_else(|| {
                Failure::new(
                    Exit::MissingTable,
                    anyhow!(
                        "no table {} in {} (run `fbar gen-tt --count {want}`)",
                        table_file_name(want, i, BINARY_EXT),
                        args.tt_dir.display()
                    ),
                )
            })
        })
        .collect()
}

/// Loads one table without verifying it.
pub fn load_raw(path: &Path, layout: Layout) -> Result<TranslationTable, Failure> {
    let file = File::open(path).map_err(|e| {
        let exit = if e.kind() == std::io::ErrorKind::NotFound { Exit::MissingTable } else { Exit::Io };
        Failure::new(exit, anyhow!("{}: {e}", path.display()))
    })?;
    load_any(file, layout).map_err(|e| table_failure(path, e))
}

fn table_failure(path: &Path, e: TtError) -> Failure {
    let exit = match e {
        TtError::Io { .. } => Exit::Io,
        _ => Exit::BadTable,
    };
    Failure::new(exit, anyhow!("{}: {e}", path.display()))
}

/// Loads and verifies the tables for `mode`.
pub fn load(args: &TableArgs, mode: Mode, layout: Layout) -> Result<Tables, Failure> {
    let paths = resolve(args, mode)?;
    let mut loaded = Vec::with_capacity(paths.len());
    for p in &paths {
        let tt = load_raw(p, layout)?.verified().map_err(|e| table_failure(p, e))?;
        loaded.push(tt);
    }
    let tables = match <[TranslationTable; 4]>::try_from(loaded) {
        Ok(four) => Tables::four(TtSet4 { tables: four }),
        Err(mut one) => Tables::one(one.pop().expect("one table")),
    };
    tables.map_err(|e| table_failure(&paths[0], e))
}
