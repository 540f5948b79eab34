use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fbar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbar"))
        .current_dir(dir)
        .env_remove("FBAR_TT_DIR")
        .args(args)
        .output()
        .expect("spawn fbar")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn kv(out: &Output, key: &str) -> String {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_owned))
        .unwrap_or_else(|| panic!("no {key} in {}", stdout(out)))
}

fn with_tables(count: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    let out = fbar(dir.path(), &["gen-tt", "--out", ".", "--count", count]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

#[test]
fn gen_tt_text_is_eight_mebibytes() {
    let dir = TempDir::new().unwrap();
    let out = fbar(dir.path(), &["gen-tt", "--out", ".", "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = fs::read(dir.path().join("tt.txt")).unwrap();
    assert_eq!(text.len(), 8_388_608);
    assert!(text.starts_with(b"1 1x1x1x1 abcd"));
}

#[test]
fn gen_tt_four_tables() {
    let dir = with_tables("4");
    for i in 1..=4 {
        assert_eq!(fs::metadata(dir.path().join(format!("tt-{i}.bin"))).unwrap().len(), 262_149);
    }
}

#[test]
fn gen_tt_unwritable_path_exits_2() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("blocker"), b"x").unwrap();
    let out = fbar(dir.path(), &["gen-tt", "--out", "blocker/sub"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn compress_eight_bytes_paper_sizes() {
    let dir = with_tables("1");
    fs::write(dir.path().join("r.txt"), b"resolved").unwrap();
    let out = fbar(dir.path(), &["compress", "r.txt", "--report", "kv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(kv(&out, "paper_size_1tt"), "4");
    assert_eq!(kv(&out, "paper_size_4tt"), "1");
    assert!(dir.path().join("r.txt.fbar").is_file());
}

#[test]
fn decompress_round_trip_both_modes_and_formats() {
    let one = with_tables("1");
    let four = with_tables("4");
    let data: Vec<u8> = (0..5000u32).map(|i| (i * 7 % 251) as u8).collect();
    for (dir, mode) in [(&one, "1tt"), (&four, "4tt")] {
        for format in ["paper", "honest"] {
            fs::write(dir.path().join("in.bin"), &data).unwrap();
            let c = fbar(dir.path(), &["compress", "in.bin", "--mode", mode, "--format", format, "--out", "a.fbar"]);
            assert_eq!(code(&c), 0, "{}", String::from_utf8_lossy(&c.stderr));
            let d = fbar(dir.path(), &["decompress", "a.fbar"]);
            assert_eq!(code(&d), 0, "{}", String::from_utf8_lossy(&d.stderr));
            assert_eq!(fs::read(dir.path().join("a")).unwrap(), data, "{mode} {format}");
        }
    }
}

#[test]
fn decompress_mode_mismatch_exits_5() {
    let dir = with_tables("1");
    fs::write(dir.path().join("r.txt"), b"resolved").unwrap();
    assert_eq!(code(&fbar(dir.path(), &["compress", "r.txt"])), 0);
    let out = fbar(dir.path(), &["decompress", "r.txt.fbar", "--mode", "4tt"]);
    assert_eq!(code(&out), 5);
}

#[test]
fn decompress_malformed_exits_4() {
    let dir = with_tables("1");
    fs::write(dir.path().join("bad.fbar"), b"FBGR\x01\x01garbage").unwrap();
    assert_eq!(code(&fbar(dir.path(), &["decompress", "bad.fbar"])), 4);
}

#[test]
fn audit_generated_table_ok() {
    let dir = with_tables("1");
    let out = fbar(dir.path(), &["audit"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bijection over 65536 pairs: OK"));
}

#[test]
fn audit_mutated_table_exits_1() {
    let dir = with_tables("1");
    let path = dir.path().join("tt.bin");
    let mut bytes = fs::read(&path).unwrap();
    // Make row 2's original equal row 1's.
    let (first, second) = (5, 5 + 4);
    let copy: Vec<u8> = bytes[first + 2..first + 4].to_vec();
    bytes[second + 2..second + 4].copy_from_slice(&copy);
    fs::write(&path, bytes).unwrap();
    let out = fbar(dir.path(), &["audit", "--report", "kv"]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert_eq!(kv(&out, "bijection_ok"), "false");
}

#[test]
fn missing_table_exits_3() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("r.txt"), b"resolved").unwrap();
    assert_eq!(code(&fbar(dir.path(), &["compress", "r.txt"])), 3);
    assert_eq!(code(&fbar(dir.path(), &["audit"])), 3);
}

#[test]
fn truncated_table_exits_6() {
    let dir = with_tables("1");
    let path = dir.path().join("tt.bin");
    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..1000]).unwrap();
    assert_eq!(code(&fbar(dir.path(), &["audit"])), 6);
}

#[test]
fn bench_and_entropy_run() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("a.txt"), b"the quick brown fox jumps over the lazy dog").unwrap();
    let b = fbar(dir.path(), &["bench", "a.txt", "missing.txt", "--report", "kv"]);
    assert_eq!(code(&b), 2, "unreadable file marks the run failed");
    assert!(stdout(&b).contains("failed=1"));
    assert!(stdout(&b).contains("paper_1tt=22"));
    let e = fbar(dir.path(), &["entropy", "a.txt", "--report", "kv"]);
    assert_eq!(code(&e), 0);
    assert!(stdout(&e).contains("symbols=27"));
}

#[test]
fn usage_error_exits_64() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fbar(dir.path(), &["compress"])), 64);
    assert_eq!(code(&fbar(dir.path(), &["gen-tt", "--count", "3"])), 64);
}
