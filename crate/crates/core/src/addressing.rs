//! 4D flag addresses for two-byte pairs and their linear rows.
//!
//! Each byte factors into an `(ip, zn)` combo pair; the 1-based positions of
//! those combos in the two 16-element alphabets give two coordinates per
//! byte, four per pair. Rows linearize `(i, j, k, l)` with `l` varying
//! fastest.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::pairops::{canonical_factor, decode_byte, IpCombo, ZnCombo};

pub const ROW_COUNT: usize = 65_536;

/// The `ip` alphabet in its fixed listing order.
pub const IP_ALPHABET: [&str; 16] = [
    "iiii", "iiip", "iipi", "ipii", "piii", "iipp", "ippi", "ppii", "pipi", "ipip", "piip", "ippp",
    "pipp", "ppip", "pppi", "pppp",
];

/// The `zn` alphabet in its fixed listing order.
pub const ZN_ALPHABET: [&str; 16] = [
    "zzzz", "zzzn", "zznz", "znzz", "nzzz", "zznn", "znnz", "nnzz", "nznz", "znzn", "nzzn", "znnn",
    "nnnz", "nznn", "nnzn", "nnnn",
];

/// How the four coordinates are assigned from the two bytes of a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Layout {
    /// `(ip(x), zn(x), ip(x'), zn(x'))`.
    #[default]
    Interleaved,
    /// `(ip(x), ip(x'), zn(x), zn(x'))`.
    Grouped,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Interleaved => "interleaved",
            Layout::Grouped => "grouped",
        })
    }
}

impl FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interleaved" => Ok(Layout::Interleaved),
            "grouped" => Ok(Layout::Grouped),
            other => Err(format!("unknown layout {other:?}")),
        }
    }
}

/// Mask-indexed lookup of 1-based alphabet positions.
struct IndexTables {
    ip_by_mask: [u8; 16],
    zn_by_mask: [u8; 16],
}

fn index_tables() -> &'static IndexTables {
    static TABLES: OnceLock<IndexTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut ip_by_mask = [0u8; 16];
        let mut zn_by_mask = [0u8; 16];
        for (pos, (ip, zn)) in IP_ALPHABET.iter().zip(ZN_ALPHABET.iter()).enumerate() {
            let ip: IpCombo = ip.parse().expect("ip alphabet entry");
            let zn: ZnCombo = zn.parse().expect("zn alphabet entry");
            ip_by_mask[ip.mask() as usize] = pos as u8 + 1;
            zn_by_mask[zn.mask() as usize] = pos as u8 + 1;
        }
        debug_assert!(ip_by_mask.iter().chain(zn_by_mask.iter()).all(|&v| v != 0));
        IndexTables { ip_by_mask, zn_by_mask }
    })
}

/// A combo that has a position in one of the two alphabets.
pub trait AlphabetMember: Sized {
    /// 1-based position in the alphabet listing.
    fn alphabet_index(&self) -> u8;
    /// Inverse of [`alphabet_index`](Self::alphabet_index); `None` outside 1..=16.
    fn from_alphabet_index(index: u8) -> Option<Self>;
}

impl AlphabetMember for IpCombo {
    fn alphabet_index(&self) -> u8 {
        index_tables().ip_by_mask[self.mask() as usize]
    }

    fn from_alphabet_index(index: u8) -> Option<Self> {
        let pos = index.checked_sub(1)? as usize;
        IP_ALPHABET.get(pos).map(|s| s.parse().expect("ip alphabet entry"))
    }
}

impl AlphabetMember for ZnCombo {
    fn alphabet_index(&self) -> u8 {
        index_tables().zn_by_mask[self.mask() as usize]
    }

    fn from_alphabet_index(index: u8) -> Option<Self> {
        let pos = index.checked_sub(1)? as usize;
        ZN_ALPHABET.get(pos).map(|s| s.parse().expect("zn alphabet entry"))
    }
}

pub fn combo_index<C: AlphabetMember>(combo: &C) -> u8 {
    combo.alphabet_index()
}

/// A coordinate quadruple, each component in `1..=16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagAddress {
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub l: u8,
}

impl FlagAddress {
    pub fn new(i: u8, j: u8, k: u8, l: u8) -> Option<Self> {
        let ok = |c: u8| (1..=16).contains(&c);
        (ok(i) && ok(j) && ok(k) && ok(l)).then_some(FlagAddress { i, j, k, l })
    }

    pub fn coords(&self) -> [u8; 4] {
        [self.i, self.j, self.k, self.l]
    }
}

impl fmt::Display for FlagAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}x{}", self.i, self.j, self.k, self.l)
    }
}

/// Zero-based row in the 65,536-row field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowIndex(pub u16);

impl RowIndex {
    pub fn get(self) -> u16 {
        self.0
    }

    /// 1-based row number as printed in reports.
    pub fn display_number(self) -> u32 {
        u32::from(self.0) + 1
    }

    pub fn all() -> impl Iterator<Item = RowIndex> {
        (0..=u16::MAX).map(RowIndex)
    }
}

pub fn address_of_pair(x: u8, x2: u8, layout: Layout) -> FlagAddress {
    let (ip1, zn1) = canonical_factor(x);
    let (ip2, zn2) = canonical_factor(x2);
    let (a, b, c, d) = (
        ip1.alphabet_index(),
        zn1.alphabet_index(),
        ip2.alphabet_index(),
        zn2.alphabet_index(),
    );
    match layout {
        Layout::Interleaved => FlagAddress { i: a, j: b, k: c, l: d },
        Layout::Grouped => FlagAddress { i: a, j: c, k: b, l: d },
    }
}

pub fn row_of_address(a: FlagAddress) -> RowIndex {
    let [i, j, k, l] = a.coords().map(|c| u16::from(c - 1));
    RowIndex((i << 12) | (j << 8) | (k << 4) | l)
}

pub fn address_of_row(r: RowIndex) -> FlagAddress {
    let v = r.0;
    let c = |shift: u16| ((v >> shift) & 0xF) as u8 + 1;
    FlagAddress { i: c(12), j: c(8), k: c(4), l: c(0) }
}

pub fn row_of_pair(x: u8, x2: u8, layout: Layout) -> RowIndex {
    row_of_address(address_of_pair(x, x2, layout))
}

pub fn pair_of_row(r: RowIndex, layout: Layout) -> (u8, u8) {
    let a = address_of_row(r);
    let (ip1, zn1, ip2, zn2) = match layout {
        Layout::Interleaved => (a.i, a.j, a.k, a.l),
        Layout::Grouped => (a.i, a.k, a.j, a.l),
    };
    let byte = |ip: u8, zn: u8| {
        decode_byte(
            IpCombo::from_alphabet_index(ip).expect("coordinate in range"),
            ZnCombo::from_alphabet_index(zn).expect("coordinate in range"),
        )
    };
    (byte(ip1, zn1), byte(ip2, zn2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_positions() {
        assert_eq!(combo_index(&"iiii".parse::<IpCombo>().unwrap()), 1);
        assert_eq!(combo_index(&"ippi".parse::<IpCombo>().unwrap()), 7);
        assert_eq!(combo_index(&"nnnn".parse::<ZnCombo>().unwrap()), 16);
        assert!(IpCombo::from_alphabet_index(0).is_none());
        assert!(ZnCombo::from_alphabet_index(17).is_none());
    }

    #[test]
    fn alphabets_are_permutations() {
        let mut ip: Vec<_> = IP_ALPHABET.iter().map(|s| s.parse::<IpCombo>().unwrap().mask()).collect();
        let mut zn: Vec<_> = ZN_ALPHABET.iter().map(|s| s.parse::<ZnCombo>().unwrap().mask()).collect();
        ip.sort_unstable();
        zn.sort_unstable();
        assert_eq!(ip, (0..16).collect::<Vec<_>>());
        assert_eq!(zn, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn address_examples() {
        let l = Layout::Interleaved;
        assert_eq!(address_of_pair(b'r', b'e', l).coords(), [7, 6, 1, 4]);
        assert_eq!(address_of_pair(b's', b'o', l).coords(), [12, 3, 6, 4]);
        assert_eq!(address_of_pair(b'@', b'$', l).coords(), [12, 12, 11, 15]);
    }

    #[test]
    fn row_examples() {
        let a = |i, j, k, l| FlagAddress::new(i, j, k, l).unwrap();
        assert_eq!(row_of_address(a(1, 1, 1, 1)), RowIndex(0));
        assert_eq!(row_of_address(a(16, 16, 16, 16)), RowIndex(65_535));
        assert_eq!(row_of_address(a(16, 16, 16, 15)), RowIndex(65_534));
        assert_eq!(RowIndex(65_534).display_number(), 65_535);
    }

    #[test]
    fn pair_examples() {
        for layout in [Layout::Interleaved, Layout::Grouped] {
            assert_eq!(pair_of_row(row_of_pair(b'@', b'$', layout), layout), (b'@', b'$'));
            assert_eq!(pair_of_row(RowIndex(0), layout), (0x55, 0x55));
            assert_eq!(pair_of_row(RowIndex(65_535), layout), (0x00, 0x00));
        }
    }

    #[test]
    fn address_bounds() {
        assert!(FlagAddress::new(0, 1, 1, 1).is_none());
        assert!(FlagAddress::new(1, 1, 1, 17).is_none());
        assert_eq!(FlagAddress::new(7, 11, 1, 13).unwrap().to_string(), "7x11x1x13");
    }

    #[test]
    fn layouts_agree_on_first_coordinate() {
        for x in 0..=255u8 {
            let a = address_of_pair(x, b'q', Layout::Interleaved);
            let b = address_of_pair(x, b'q', Layout::Grouped);
            assert_eq!(a.i, b.i);
            assert_eq!(a.l, b.l);
            assert_eq!((a.j, a.k), (b.k, b.j));
        }
    }

    #[test]
    fn row_linearization_inverts() {
        for r in RowIndex::all() {
            assert_eq!(row_of_address(address_of_row(r)), r);
        }
    }
}
