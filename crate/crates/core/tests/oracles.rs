//! Frozen expectations computed by a brute-force oracle that only knows the
//! operator truth tables and the two alphabet listings.

use fbar::addressing::{address_of_pair, pair_of_row, row_of_address, row_of_pair, FlagAddress, Layout, RowIndex};
use fbar::pairops::canonical_factor;

const IP: [&str; 16] = [
    "iiii", "iiip", "iipi", "ipii", "piii", "iipp", "ippi", "ppii", "pipi", "ipip", "piip", "ippp", "pipp", "ppip",
    "pppi", "pppp",
];
const ZN: [&str; 16] = [
    "zzzz", "zzzn", "zznz", "znzz", "nzzz", "zznn", "znnz", "nnzz", "nznz", "znzn", "nzzn", "znnn", "nnnz", "nznn",
    "nnzn", "nnnn",
];

/// Regenerates a byte from the pure byte by spelling out each pair as a
/// two-character bit string.
fn oracle_decode(stage1: &str, stage2: &str) -> u8 {
    let mut bits = String::new();
    for (a, b) in stage1.chars().zip(stage2.chars()) {
        let after1 = match a {
            'i' => "01",
            'p' | 'z' => "11",
            'n' => "00",
            _ => unreachable!(),
        };
        let after2 = match (b, after1) {
            ('z', s) => s.to_string(),
            ('n', s) => s.chars().map(|c| if c == '1' { '0' } else { '1' }).collect(),
            _ => unreachable!(),
        };
        bits.push_str(&after2);
    }
    u8::from_str_radix(&bits, 2).unwrap()
}

/// All (ip, zn) alphabet positions (1-based) whose decode equals `b`.
fn oracle_factor(b: u8) -> Vec<(usize, usize)> {
    let mut hits = Vec::new();
    for (i, s1) in IP.iter().enumerate() {
        for (j, s2) in ZN.iter().enumerate() {
            if oracle_decode(s1, s2) == b {
                hits.push((i + 1, j + 1));
            }
        }
    }
    hits
}

fn oracle_address(x: u8, y: u8) -> [usize; 4] {
    let a = oracle_factor(x);
    let b = oracle_factor(y);
    assert_eq!((a.len(), b.len()), (1, 1));
    [a[0].0, a[0].1, b[0].0, b[0].1]
}

#[test]
fn oracle_reproduces_worked_example() {
    assert_eq!(oracle_decode("ippp", "znnn"), b'@');
}

#[test]
fn dollar_factor_is_unique() {
    let hits = oracle_factor(b'$');
    assert_eq!(hits.len(), 1);
    let (i, j) = hits[0];
    assert_eq!((IP[i - 1], ZN[j - 1]), ("piip", "nnzn"));
    let (ip, zn) = canonical_factor(b'$');
    assert_eq!((ip.to_string(), zn.to_string()), ("piip".to_string(), "nnzn".to_string()));
}

#[test]
fn frozen_addresses() {
    // values produced by the oracle above
    let frozen: [(&[u8; 2], [usize; 4]); 3] = [(b"re", [7, 6, 1, 4]), (b"so", [12, 3, 6, 4]), (b"@$", [12, 12, 11, 15])];
    for (pair, want) in frozen {
        assert_eq!(oracle_address(pair[0], pair[1]), want);
        let got = address_of_pair(pair[0], pair[1], Layout::Interleaved).coords().map(usize::from);
        assert_eq!(got, want, "{:?}", std::str::from_utf8(pair));
    }
}

#[test]
fn oracle_agrees_on_every_byte() {
    for b in 0..=255u8 {
        let hits = oracle_factor(b);
        assert_eq!(hits.len(), 1, "byte {b:#04x}");
        let a = address_of_pair(b, b, Layout::Interleaved);
        assert_eq!((a.i as usize, a.j as usize), hits[0]);
    }
}

#[test]
fn end_rows_decode() {
    assert_eq!(oracle_decode("iiii", "zzzz"), 0x55);
    assert_eq!(oracle_decode("pppp", "nnnn"), 0x00);
    assert_eq!(pair_of_row(RowIndex(0), Layout::Interleaved), (0x55, 0x55));
    assert_eq!(pair_of_row(RowIndex(65_535), Layout::Interleaved), (0x00, 0x00));
}

#[test]
fn exhaustive_pair_bijection_both_layouts() {
    for layout in [Layout::Interleaved, Layout::Grouped] {
        let mut seen = vec![false; 65_536];
        for v in 0..=u16::MAX {
            let [a, b] = v.to_be_bytes();
            let row = row_of_pair(a, b, layout);
            assert!(!seen[row.0 as usize]);
            seen[row.0 as usize] = true;
            assert_eq!(pair_of_row(row, layout), (a, b));
        }
    }
}

#[test]
fn at_dollar_row_value() {
    let a = FlagAddress::new(12, 12, 11, 15).unwrap();
    // (12-1)*4096 + (12-1)*256 + (11-1)*16 + (15-1)
    assert_eq!(row_of_address(a), RowIndex(48_046));
}
