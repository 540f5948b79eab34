//! The four bit-pair operators (`z`, `n`, `i`, `p`) and the byte-level
//! machinery built from them.
//!
//! A byte is treated as four bit-pairs, most significant pair first. Every
//! byte is regenerated from the pure byte `11111111` by a stage-1 combo
//! followed by a stage-2 combo:
//!
//! ```
//! use fbar::pairops::{decode_byte, StageCombo, ZnCombo};
//!
//! let s1: StageCombo = "ippp".parse().unwrap();
//! let s2: ZnCombo = "znnn".parse().unwrap();
//! assert_eq!(decode_byte(s1, s2), b'@');
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::ParseComboError;

/// The pure byte every decode starts from.
pub const PURE_BYTE: u8 = 0xFF;

/// Manipulations spent per decoded byte (one per bit-pair).
pub const MANIPULATIONS_PER_BYTE: u64 = 4;

/// One of the four pair operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairOp {
    /// Zero/neutral: passes a pair unchanged.
    Z,
    /// Negate: flips both bits of a pair.
    N,
    /// Impure: relates the pairs `01` and `10`.
    I,
    /// Pure: relates the pairs `11` and `00`.
    P,
}

impl PairOp {
    pub const ALL: [PairOp; 4] = [PairOp::Z, PairOp::N, PairOp::I, PairOp::P];

    pub fn symbol(self) -> char {
        match self {
            PairOp::Z => 'z',
            PairOp::N => 'n',
            PairOp::I => 'i',
            PairOp::P => 'p',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'z' => Some(PairOp::Z),
            'n' => Some(PairOp::N),
            'i' => Some(PairOp::I),
            'p' => Some(PairOp::P),
            _ => None,
        }
    }

    /// Generative application used while regenerating a byte.
    ///
    /// On the pure pair `11`: `i -> 01`, `p -> 11`, `n -> 00`, `z -> 11`.
    /// `i` toggles the high bit, so a pure pair always lands on its impure
    /// partner (`11 -> 01`, `00 -> 10`).
    pub fn apply(self, pair: BitPair) -> BitPair {
        let v = pair.value();
        BitPair(match self {
            PairOp::Z | PairOp::P => v,
            PairOp::N => !v & 0b11,
            PairOp::I => v ^ 0b10,
        })
    }
}

impl fmt::Display for PairOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A 2-bit value in `{00, 01, 10, 11}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPair(u8);

impl BitPair {
    pub const ALL: [BitPair; 4] = [BitPair(0b00), BitPair(0b01), BitPair(0b10), BitPair(0b11)];

    /// Returns `None` when `value` does not fit in two bits.
    pub fn new(value: u8) -> Option<Self> {
        (value < 4).then_some(BitPair(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// The pair at position `index` (0 = most significant) of `byte`.
    pub fn of_byte(byte: u8, index: usize) -> Self {
        debug_assert!(index < 4);
        BitPair((byte >> (6 - 2 * index)) & 0b11)
    }

    pub fn is_pure(self) -> bool {
        self.0 == 0b00 || self.0 == 0b11
    }
}

impl fmt::Display for BitPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

/// Closes a pair to a single bit. `i` owns the impure pairs and `p` the
/// pure ones; `01` and `11` close to 1, `10` and `00` close to 0.
///
/// Note that `10` and `00` close to the same bit (as do `01` and `11`), so
/// the bit alone does not identify the pair.
pub fn closure_classify(pair: BitPair) -> (PairOp, u8) {
    match pair.value() {
        0b01 => (PairOp::I, 1),
        0b10 => (PairOp::I, 0),
        0b11 => (PairOp::P, 1),
        _ => (PairOp::P, 0),
    }
}

/// Four operators applied to a byte's pairs, most significant pair first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StageCombo(pub [PairOp; 4]);

impl StageCombo {
    pub fn ops(&self) -> [PairOp; 4] {
        self.0
    }

    pub fn apply(&self, input: u8) -> u8 {
        self.0.iter().enumerate().fold(0u8, |acc, (idx, op)| {
            let out = op.apply(BitPair::of_byte(input, idx));
            acc | (out.value() << (6 - 2 * idx))
        })
    }

    /// All 256 combos over the full four-symbol alphabet.
    pub fn all() -> impl Iterator<Item = StageCombo> {
        (0..256usize).map(|code| {
            StageCombo(std::array::from_fn(|idx| PairOp::ALL[(code >> (6 - 2 * idx)) & 0b11]))
        })
    }

    fn only(&self, allowed: [PairOp; 2]) -> bool {
        self.0.iter().all(|op| allowed.contains(op))
    }
}

impl fmt::Display for StageCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|op| write!(f, "{op}"))
    }
}

impl FromStr for StageCombo {
    type Err = ParseComboError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 4 {
            return Err(ParseComboError::Length(s.to_string()));
        }
        let mut ops = [PairOp::Z; 4];
        for (slot, c) in ops.iter_mut().zip(chars) {
            *slot = PairOp::from_symbol(c).ok_or(ParseComboError::Symbol(c))?;
        }
        Ok(StageCombo(ops))
    }
}

macro_rules! restricted_combo {
    ($name:ident, $first:expr, $second:expr, $label:literal) => {
        #[doc = concat!("A stage combo restricted to the `", $label, "` operators.")]
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(StageCombo);

        impl $name {
            pub const SYMBOLS: [PairOp; 2] = [$first, $second];

            pub fn new(combo: StageCombo) -> Option<Self> {
                combo.only(Self::SYMBOLS).then_some($name(combo))
            }

            /// Builds the combo from a 4-bit mask, bit 3 addressing the most
            /// significant pair; a set bit selects the second symbol.
            pub fn from_mask(mask: u8) -> Self {
                $name(StageCombo(std::array::from_fn(|idx| {
                    Self::SYMBOLS[((mask >> (3 - idx)) & 1) as usize]
                })))
            }

            pub fn mask(&self) -> u8 {
                self.0
                     .0
                    .iter()
                    .fold(0u8, |acc, op| (acc << 1) | u8::from(*op == Self::SYMBOLS[1]))
            }

            pub fn combo(&self) -> StageCombo {
                self.0
            }

            pub fn apply(&self, input: u8) -> u8 {
                self.0.apply(input)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl FromStr for $name {
            type Err = ParseComboError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let combo: StageCombo = s.parse()?;
                $name::new(combo).ok_or_else(|| ParseComboError::Alphabet(s.to_string(), $label))
            }
        }

        impl From<$name> for StageCombo {
            fn from(c: $name) -> StageCombo {
                c.0
            }
        }
    };
}

restricted_combo!(IpCombo, PairOp::I, PairOp::P, "ip");
restricted_combo!(ZnCombo, PairOp::Z, PairOp::N, "zn");

/// Stage 1: regenerates an intermediate byte from `input` (normally the
/// pure byte).
pub fn apply_stage1(combo: impl Into<StageCombo>, input: u8) -> u8 {
    combo.into().apply(input)
}

/// Stage 2: `z` passes a pair, `n` negates it.
pub fn apply_stage2(combo: ZnCombo, input: u8) -> u8 {
    combo.apply(input)
}

pub fn decode_byte(stage1: impl Into<StageCombo>, stage2: ZnCombo) -> u8 {
    apply_stage2(stage2, apply_stage1(stage1, PURE_BYTE))
}

/// The unique `(ip, zn)` combo pair regenerating `b`.
///
/// Per pair: `01 <- (i, z)`, `10 <- (i, n)`, `11 <- (p, z)`, `00 <- (p, n)`.
pub fn canonical_factor(b: u8) -> (IpCombo, ZnCombo) {
    let mut ip_mask = 0u8;
    let mut zn_mask = 0u8;
    for idx in 0..4 {
        let (ip, zn) = match BitPair::of_byte(b, idx).value() {
            0b01 => (0, 0),
            0b10 => (0, 1),
            0b11 => (1, 0),
            _ => (1, 1),
        };
        ip_mask = (ip_mask << 1) | ip;
        zn_mask = (zn_mask << 1) | zn;
    }
    (IpCombo::from_mask(ip_mask), ZnCombo::from_mask(zn_mask))
}

/// A count of composed per-pair manipulations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ManipulationCount(pub u64);

impl ManipulationCount {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl std::ops::Add for ManipulationCount {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        ManipulationCount(self.0 + rhs.0)
    }
}

impl fmt::Display for ManipulationCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} \u{2127}", self.0)
    }
}

/// Manipulations needed to regenerate `units` two-character units.
pub fn count_manipulations(units: u64) -> ManipulationCount {
    ManipulationCount(units * 2 * MANIPULATIONS_PER_BYTE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(s: &str) -> StageCombo {
        s.parse().unwrap()
    }

    fn zn(s: &str) -> ZnCombo {
        s.parse().unwrap()
    }

    #[test]
    fn stage1_examples() {
        assert_eq!(apply_stage1(sc("ippp"), 0xFF), 0b0111_1111);
        assert_eq!(apply_stage1(sc("niin"), 0xFF), 0b0001_0100);
        assert_eq!(apply_stage1(sc("pppp"), 0xFF), 0xFF);
    }

    #[test]
    fn stage2_examples() {
        assert_eq!(apply_stage2(zn("znnn"), 0x7F), 0b0100_0000);
        assert_eq!(apply_stage2(zn("znzz"), 0x14), 0b0010_0100);
        for b in 0..=255u8 {
            assert_eq!(apply_stage2(zn("zzzz"), b), b);
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_byte(sc("ippp"), zn("znnn")), b'@');
        assert_eq!(decode_byte(sc("niin"), zn("znzz")), b'$');
        assert_eq!(decode_byte(sc("pppp"), zn("zzzz")), 0xFF);
    }

    #[test]
    fn canonical_examples() {
        let (a, b) = canonical_factor(b'@');
        assert_eq!((a.to_string(), b.to_string()), ("ippp".into(), "znnn".into()));
        let (a, b) = canonical_factor(b'$');
        assert_eq!((a.to_string(), b.to_string()), ("piip".into(), "nnzn".into()));
        let (a, b) = canonical_factor(0xFF);
        assert_eq!((a.to_string(), b.to_string()), ("pppp".into(), "zzzz".into()));
    }

    #[test]
    fn canonical_round_trip_all_bytes() {
        let mut seen = std::collections::HashSet::new();
        for b in 0..=255u8 {
            let (ip, z) = canonical_factor(b);
            assert_eq!(decode_byte(ip, z), b);
            assert!(seen.insert((ip, z)));
        }
    }

    #[test]
    fn per_pair_bijection() {
        for target in BitPair::ALL {
            let hits: Vec<_> = IpCombo::SYMBOLS
                .iter()
                .flat_map(|&s1| ZnCombo::SYMBOLS.iter().map(move |&s2| (s1, s2)))
                .filter(|&(s1, s2)| s2.apply(s1.apply(BitPair(0b11))) == target)
                .collect();
            assert_eq!(hits.len(), 1, "pair {target}");
        }
    }

    #[test]
    fn z_identity_and_n_involution() {
        for p in BitPair::ALL {
            assert_eq!(PairOp::Z.apply(p), p);
            assert_ne!(PairOp::N.apply(p), p);
            assert_eq!(PairOp::N.apply(PairOp::N.apply(p)), p);
        }
    }

    #[test]
    fn closure_table_and_paradox() {
        let bp = |v| BitPair::new(v).unwrap();
        assert_eq!(closure_classify(bp(0b01)), (PairOp::I, 1));
        assert_eq!(closure_classify(bp(0b10)), (PairOp::I, 0));
        assert_eq!(closure_classify(bp(0b11)), (PairOp::P, 1));
        assert_eq!(closure_classify(bp(0b00)), (PairOp::P, 0));
        assert_eq!(closure_classify(bp(0b10)).1, closure_classify(bp(0b00)).1);
        assert_eq!(closure_classify(bp(0b01)).1, closure_classify(bp(0b11)).1);
    }

    #[test]
    fn general_space_is_many_to_one_onto_bytes() {
        let mut hits = [0u32; 256];
        for s1 in StageCombo::all() {
            for mask in 0..16 {
                hits[decode_byte(s1, ZnCombo::from_mask(mask)) as usize] += 1;
            }
        }
        assert!(hits.iter().all(|&h| h >= 1));
        assert_eq!(hits.iter().sum::<u32>(), 256 * 16);
        assert!(hits.iter().any(|&h| h > 1));
    }

    #[test]
    fn restricted_parsing() {
        assert!("ippp".parse::<IpCombo>().is_ok());
        assert!("ippz".parse::<IpCombo>().is_err());
        assert!("znz".parse::<ZnCombo>().is_err());
        assert!(matches!("zqzz".parse::<ZnCombo>(), Err(ParseComboError::Symbol('q'))));
    }

    #[test]
    fn mask_round_trip() {
        for m in 0..16 {
            assert_eq!(IpCombo::from_mask(m).mask(), m);
            assert_eq!(ZnCombo::from_mask(m).mask(), m);
        }
    }

    #[test]
    fn manipulation_counts() {
        assert_eq!(count_manipulations(2).get(), 16);
        assert_eq!(count_manipulations(1).get(), 8);
        assert_eq!(count_manipulations(0).get(), 0);
    }
}
