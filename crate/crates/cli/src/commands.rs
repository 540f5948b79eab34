use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::anyhow;
use fbar::codec::{compress_to_vec, decode_artifact, Tables};
use fbar::gridfile::{parse_artifact_bytes, Artifact};
use fbar::metrics::{
    distinct_symbols, empirical_entropy, kib, manipulation_distance, pigeonhole_audit, shannon_order0, ArtifactAudit,
    MetricsReport,
};
use fbar::transtable::{serialize_binary, serialize_text, verify_tt};
use fbar::{generate_tt, CodecError, Format, FormatError, Layout, Mode, TtError, TtSet4};

use crate::tables::{self, table_file_name, BINARY_EXT, TEXT_EXT};
use crate::{
    AuditArgs, BenchArgs, CmdResult, CompressArgs, DecompressArgs, EntropyArgs, Exit, Failure, GenTtArgs, ReportArg,
    TableArgs, TtFormatArg,
};

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::new(Exit::Io, anyhow!("{}: {e}", path.display()))
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_failure(path, e))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn codec_failure(e: CodecError) -> Failure {
    let exit = match &e {
        CodecError::ModeMismatch { .. } => Exit::ModeMismatch,
        CodecError::Format(FormatError::Io(_)) | CodecError::Io(_) => Exit::Io,
        CodecError::Format(_) => Exit::MalformedArtifact,
        CodecError::Table(TtError::Io { .. }) => Exit::Io,
        CodecError::Table(_) => Exit::BadTable,
    };
    Failure::new(exit, e)
}

pub fn gen_tt(args: &GenTtArgs, layout: Layout) -> CmdResult {
    fs::create_dir_all(&args.out).map_err(|e| io_failure(&args.out, e))?;
    let tt = generate_tt(layout);
    let report = verify_tt(&tt);
    if !report.is_ok() {
        return Err(Failure::new(Exit::BadTable, anyhow!("generated table failed verification")));
    }
    let ext = if args.format == TtFormatArg::Text { TEXT_EXT } else { BINARY_EXT };
    for index in 1..=args.count {
        let path = args.out.join(table_file_name(args.count, index, ext));
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        let written = match args.format {
            TtFormatArg::Text => serialize_text(&tt, file),
            TtFormatArg::Binary => serialize_binary(&tt, file),
        }
        .map_err(|e| io_failure(&path, e))?;
        println!("{} {} bytes ({layout})", path.display(), written);
    }
    Ok(Exit::Ok)
}

fn default_artifact_path(input: &Path) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(".fbar");
    PathBuf::from(s)
}

fn default_restore_path(input: &Path) -> PathBuf {
    match input.extension() {
        Some(ext) if ext == "fbar" => input.with_extension(""),
        _ => {
            let mut s = input.as_os_str().to_owned();
            s.push(".out");
            PathBuf::from(s)
        }
    }
}

fn print_report(report: &MetricsReport, format: ReportArg) {
    match format {
        ReportArg::Table => println!("{report}"),
        ReportArg::Kv => print!("{}", report.to_kv()),
    }
}

pub fn compress(args: &CompressArgs, layout: Layout) -> CmdResult {
    let mode = Mode::from(args.mode);
    let format = Format::from(args.format);
    let tables = tables::load(&args.tables, mode, layout)?;
    let input = read_input(&args.input)?;
    let (bytes, outcome) = compress_to_vec(&input, format, &tables).map_err(codec_failure)?;
    let out = args.out.clone().unwrap_or_else(|| default_artifact_path(&args.input));
    write_output(&out, &bytes)?;
    print_report(&outcome.report, args.report);
    match args.report {
        ReportArg::Table => println!("artifact             {} ({} B, {format})", out.display(), bytes.len()),
        ReportArg::Kv => println!("artifact={}\nartifact_size={}\nformat={format}", out.display(), bytes.len()),
    }
    Ok(Exit::Ok)
}

pub fn decompress(args: &DecompressArgs, layout: Layout) -> CmdResult {
    let bytes = read_input(&args.input)?;
    let artifact = parse_artifact_bytes(&bytes).map_err(|e| codec_failure(e.into()))?;
    if let Some(expected) = args.mode.map(Mode::from) {
        if expected != artifact.mode() {
            return Err(codec_failure(CodecError::ModeMismatch { artifact: artifact.mode(), supplied: expected }));
        }
    }
    let tables = tables::load(&args.tables, artifact.mode(), layout)?;
    let start = Instant::now();
    let output = decode_artifact(&artifact, &tables).map_err(codec_failure)?;
    let elapsed = start.elapsed();
    let out = args.out.clone().unwrap_or_else(|| default_restore_path(&args.input));
    write_output(&out, &output)?;
    let units = artifact.rows().len() as u64;
    let report = MetricsReport::new(artifact.mode(), &output, occupant_size(&artifact), artifact.honest_payload_size(), elapsed);
    print_report(&report, args.report);
    let after = manipulation_distance(units, true);
    match args.report {
        ReportArg::Table => println!("restored             {} ({} B, {} outstanding)", out.display(), output.len(), after),
        ReportArg::Kv => println!("restored={}\nrestored_size={}\nmanipulations_outstanding={}", out.display(), output.len(), after.get()),
    }
    Ok(Exit::Ok)
}

fn occupant_size(artifact: &Artifact) -> u64 {
    match artifact {
        Artifact::Grid(g) => g.paper_accounted_size(),
        Artifact::Honest(_) => 0,
    }
}

pub fn audit(args: &AuditArgs, layout: Layout) -> CmdResult {
    let paths = audit_paths(&args.tables)?;
    let mut all_ok = true;
    for path in paths {
        let tt = tables::load_raw(&path, layout)?;
        let verify = verify_tt(&tt);
        let report = pigeonhole_audit(&tt);
        let ok = verify.is_ok() && report.bijection_ok;
        all_ok &= ok;
        match args.report {
            ReportArg::Table => {
                println!("table {} ({layout})", path.display());
                println!("{report}");
                for v in verify.violations.iter().take(16) {
                    println!("violation: {v}");
                }
                if verify.violations.len() > 16 {
                    println!("... {} more violations", verify.violations.len() - 16);
                }
                println!("honest accounting: every pair needs its 16-bit row; the occupant character alone cannot tell pairs apart");
            }
            ReportArg::Kv => {
                println!("table={}", path.display());
                println!("bijection_ok={}", report.bijection_ok);
                println!("pairs_checked={}", report.pairs_checked);
                println!("violations={}", verify.violations.len());
                if let Some(row) = verify.violations.first().and_then(|v| v.row()) {
                    println!("first_bad_row={}", row + 1);
                }
                if let Some(w) = &report.collision_witness {
                    println!("witness_first={}", String::from_utf8_lossy(&w.first));
                    println!("witness_second={}", String::from_utf8_lossy(&w.second));
                    println!("witness_stream={}", String::from_utf8_lossy(&w.occupant_stream));
                }
                println!("occupant_bits_per_pair={}", report.channel_bits.occupant_bits);
                println!("address_bits_per_pair={}", report.channel_bits.address_bits);
                println!("grid_bits={}", report.channel_bits.grid_bits);
            }
        }
    }
    Ok(if all_ok { Exit::Ok } else { Exit::AuditFailed })
}

/// Audit accepts any number of explicit tables, else the single default
/// table, else the four-table set.
fn audit_paths(args: &TableArgs) -> Result<Vec<PathBuf>, Failure> {
    if !args.tt.is_empty() {
        return Ok(args.tt.clone());
    }
    tables::resolve(args, Mode::OneTable).or_else(|e| tables::resolve(args, Mode::FourTables).map_err(|_| e))
}

struct BenchRow {
    name: String,
    size: u64,
    ldc: [Duration; 2],
    ldd: [Duration; 2],
    paper: [u64; 2],
    honest: u64,
    entropy: f64,
}

fn bench_file(path: &Path, one: &Tables, four: &Tables) -> anyhow::Result<BenchRow> {
    let input = fs::read(path)?;
    let mut ldc = [Duration::ZERO; 2];
    let mut ldd = [Duration::ZERO; 2];
    let mut paper = [0u64; 2];
    let mut honest = 0;
    for (slot, tables) in [one, four].into_iter().enumerate() {
        let start = Instant::now();
        let (bytes, outcome) = compress_to_vec(&input, Format::Paper, tables)?;
        ldc[slot] = start.elapsed();
        let start = Instant::now();
        let back = fbar::decompress(&bytes, tables)?;
        ldd[slot] = start.elapsed();
        if back != input {
            return Err(anyhow!("round trip mismatch in {}", tables.mode()));
        }
        paper[slot] = if slot == 0 { outcome.report.paper_size_1tt } else { outcome.report.paper_size_4tt };
        honest = outcome.summary.honest_payload_size;
        let parsed = parse_artifact_bytes(&bytes)?;
        if let Artifact::Grid(g) = parsed {
            debug_assert!(ArtifactAudit::of(&g).honest_covers_original());
        }
    }
    Ok(BenchRow {
        name: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        size: input.len() as u64,
        ldc,
        ldd,
        paper,
        honest,
        entropy: empirical_entropy(&input),
    })
}

fn bench_tables(args: &TableArgs, layout: Layout) -> Result<(Tables, Tables), Failure> {
    let load_or_generate = |mode| match tables::load(args, mode, layout) {
        Ok(t) => Ok(t),
        Err(f) if f.exit == Exit::MissingTable && args.tt.is_empty() => {
            let t = match mode {
                Mode::OneTable => Tables::one(generate_tt(layout)),
                Mode::FourTables => Tables::four(TtSet4::generate(layout)),
            };
            t.map_err(|e| Failure::new(Exit::BadTable, e))
        }
        Err(f) => Err(f),
    };
    Ok((load_or_generate(Mode::OneTable)?, load_or_generate(Mode::FourTables)?))
}

pub fn bench(args: &BenchArgs, layout: Layout) -> CmdResult {
    let (one, four) = bench_tables(&args.tables, layout)?;
    let mut rows = Vec::new();
    let mut failed = 0;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let secs = |d: Duration| d.as_secs_f64();
    if args.report == ReportArg::Table {
        let _ = writeln!(
            out,
            "{:>3}  {:<14} {:>10}  {:>17}  {:>17}  {:>19}  {:>10}  {:>6}  {:>12}",
            "No.", "File", "Size KiB", "LDC s 1TT:4TT", "LDD s 1TT:4TT", "Paper KiB 1TT:4TT", "Honest KiB", "H b/B", "1TT B/s"
        );
    }
    for (i, path) in args.files.iter().enumerate() {
        match bench_file(path, &one, &four) {
            Ok(row) => {
                let rate = if row.ldc[0].is_zero() { 0.0 } else { row.size as f64 / secs(row.ldc[0]) };
                match args.report {
                    ReportArg::Table => {
                        let _ = writeln!(
                            out,
                            "{:>3}  {:<14} {:>10.2}  {:>17}  {:>17}  {:>19}  {:>10.2}  {:>6.3}  {:>12.0}",
                            i + 1,
                            row.name,
                            kib(row.size),
                            format!("{:.4}:{:.4}", secs(row.ldc[0]), secs(row.ldc[1])),
                            format!("{:.4}:{:.4}", secs(row.ldd[0]), secs(row.ldd[1])),
                            format!("{:.2}:{:.2}", kib(row.paper[0]), kib(row.paper[1])),
                            kib(row.honest),
                            row.entropy,
                            rate
                        );
                    }
                    ReportArg::Kv => {
                        let _ = writeln!(
                            out,
                            "file={} size={} ldc_1tt_s={:.6} ldc_4tt_s={:.6} ldd_1tt_s={:.6} ldd_4tt_s={:.6} paper_1tt={} paper_4tt={} honest={} entropy={:.6} throughput_Bps={:.1}",
                            path.display(),
                            row.size,
                            secs(row.ldc[0]),
                            secs(row.ldc[1]),
                            secs(row.ldd[0]),
                            secs(row.ldd[1]),
                            row.paper[0],
                            row.paper[1],
                            row.honest,
                            row.entropy,
                            rate
                        );
                    }
                }
                rows.push(row);
            }
            Err(e) => {
                failed += 1;
                match args.report {
                    ReportArg::Table => {
                        let _ = writeln!(out, "{:>3}  {:<14} failed: {e:#}", i + 1, path.display());
                    }
                    ReportArg::Kv => {
                        let _ = writeln!(out, "file={} failed={e:#}", path.display());
                    }
                }
            }
        }
    }
    let sum = |f: &dyn Fn(&BenchRow) -> u64| rows.iter().map(f).sum::<u64>();
    let sumd = |f: &dyn Fn(&BenchRow) -> Duration| rows.iter().map(f).sum::<Duration>();
    let (size, p1, p4, honest) = (sum(&|r| r.size), sum(&|r| r.paper[0]), sum(&|r| r.paper[1]), sum(&|r| r.honest));
    let (c1, c4, d1, d4) = (sumd(&|r| r.ldc[0]), sumd(&|r| r.ldc[1]), sumd(&|r| r.ldd[0]), sumd(&|r| r.ldd[1]));
    match args.report {
        ReportArg::Table => {
            let _ = writeln!(
                out,
                "{:>3}  {:<14} {:>10.2}  {:>17}  {:>17}  {:>19}  {:>10.2}",
                "",
                "Total",
                kib(size),
                format!("{:.4}:{:.4}", secs(c1), secs(c4)),
                format!("{:.4}:{:.4}", secs(d1), secs(d4)),
                format!("{:.2}:{:.2}", kib(p1), kib(p4)),
                kib(honest)
            );
        }
        ReportArg::Kv => {
            let _ = writeln!(out, "total_size={size} total_paper_1tt={p1} total_paper_4tt={p4} total_honest={honest} failed={failed}");
        }
    }
    let _ = out.flush();
    Ok(if failed == 0 { Exit::Ok } else { Exit::Io })
}

pub fn entropy(args: &EntropyArgs) -> CmdResult {
    let mut failed = 0;
    for path in &args.files {
        let data = match fs::read(path) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("fbar: {}: {e}", path.display());
                failed += 1;
                continue;
            }
        };
        let m = distinct_symbols(&data);
        let h0: f64 = if m == 0 { 0.0 } else { shannon_order0(m).expect("m > 0") };
        let h: f64 = empirical_entropy(&data);
        match args.report {
            ReportArg::Table => println!(
                "{}  {} B  {} symbols  log2(m) = {:.4} bpc  empirical H = {:.4} bits/byte",
                path.display(),
                data.len(),
                m,
                h0,
                h
            ),
            ReportArg::Kv => println!("file={} size={} symbols={m} order0_bpc={h0:.6} empirical_bits_per_byte={h:.6}", path.display(), data.len()),
        }
    }
    Ok(if failed == 0 { Exit::Ok } else { Exit::Io })
}
