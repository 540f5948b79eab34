//! Size, entropy and manipulation accounting, plus the audit that checks
//! which channel of an artifact really carries the data.

use std::fmt;
use std::time::Duration;

use num_traits::Float;

use crate::addressing::{row_of_pair, RowIndex, ROW_COUNT};
use crate::error::MetricsError;
use crate::gridfile::{GridArtifact, Mode, BLOCK_UNITS, GRID_REGION_SIZE};
use crate::pairops::{count_manipulations, ManipulationCount};
use crate::scalar::Scalar;
use crate::transtable::TranslationTable;

/// Occupant-stream bytes the paper accounting assigns to `n` input bytes,
/// assuming no row collisions.
///
/// One-table mode spends one byte per two-byte unit plus one extra byte for
/// every full 96-unit block; four-table mode spends one byte per eight.
pub fn paper_size(n: u64, mode: Mode) -> u64 {
    let units = mode.units_for(n);
    match mode {
        Mode::OneTable => units + units / BLOCK_UNITS as u64,
        Mode::FourTables => units,
    }
}

pub fn kib(bytes: u64) -> f64 {
    bytes as f64 / 1024.0
}

/// Order-0 entropy of an alphabet of `m` equiprobable symbols.
pub fn shannon_order0<F: Float>(m: u64) -> Result<F, MetricsError> {
    if m == 0 {
        return Err(MetricsError::Domain("alphabet size 0"));
    }
    Ok(F::from(m).expect("alphabet size fits").log2())
}

/// Empirical order-0 entropy of `data` in bits per byte.
pub fn empirical_entropy<F: Float>(data: &[u8]) -> F {
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    let total = F::from(data.len()).expect("length fits");
    let h = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = F::from(c).expect("count fits") / total;
            -p * p.log2()
        })
        .fold(F::zero(), |acc, x| acc + x);
    // -0.0 for single-symbol input
    h.max(F::zero())
}

/// Distinct byte values present in `data`.
pub fn distinct_symbols(data: &[u8]) -> u64 {
    let mut seen = [false; 256];
    data.iter().for_each(|&b| seen[b as usize] = true);
    seen.iter().filter(|&&s| s).count() as u64
}

/// Entropy figure for an `8:B` ratio: `H = log2(B)`.
pub fn fbar_h<T: Scalar>(bytes_out_per_8_in: T) -> Result<T, MetricsError> {
    if bytes_out_per_8_in <= T::zero() {
        return Err(MetricsError::Domain("ratio must be positive"));
    }
    bytes_out_per_8_in.log2_checked().ok_or(MetricsError::Domain("log2 not representable"))
}

/// Space savings for an entropy figure: `1 - 2^H / 8`.
pub fn savings_from_h<T: Scalar>(h: T) -> Result<T, MetricsError> {
    let out = h.exp2_checked().ok_or(MetricsError::Domain("2^H not representable"))?;
    Ok(T::one() - out / T::from_ratio(8, 1))
}

/// Output bytes per eight input bytes for a mode's nominal ratio.
pub fn nominal_bytes_per_8(mode: Mode) -> i64 {
    match mode {
        Mode::OneTable => 4,
        Mode::FourTables => 1,
    }
}

/// Manipulations still outstanding for `units` compressed two-character
/// units: eight each before decompression, none after.
pub fn manipulation_distance(units: u64, decompressed: bool) -> ManipulationCount {
    if decompressed {
        ManipulationCount(0)
    } else {
        count_manipulations(units)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub mode: Mode,
    pub input_size: u64,
    pub paper_size_1tt: u64,
    pub paper_size_4tt: u64,
    /// Occupant stream actually written (collisions can add separators).
    pub occupant_stream_size: u64,
    pub honest_size: u64,
    pub space_savings_paper: f64,
    pub fbar_h: f64,
    pub shannon_h0: f64,
    pub empirical_h: f64,
    pub manipulation_total: ManipulationCount,
    pub elapsed: Duration,
}

impl MetricsReport {
    pub fn new(mode: Mode, input: &[u8], occupant_stream_size: u64, honest_size: u64, elapsed: Duration) -> Self {
        let n = input.len() as u64;
        let paper = paper_size(n, mode);
        let space_savings_paper = if n == 0 { 0.0 } else { 1.0 - paper as f64 / n as f64 };
        let distinct = distinct_symbols(input);
        MetricsReport {
            mode,
            input_size: n,
            paper_size_1tt: paper_size(n, Mode::OneTable),
            paper_size_4tt: paper_size(n, Mode::FourTables),
            occupant_stream_size,
            honest_size,
            space_savings_paper,
            fbar_h: fbar_h(nominal_bytes_per_8(mode) as f64).expect("positive ratio"),
            shannon_h0: if distinct == 0 { 0.0 } else { shannon_order0(distinct).expect("non-empty") },
            empirical_h: empirical_entropy(input),
            manipulation_total: count_manipulations(n / 2),
            elapsed,
        }
    }

    pub fn throughput(&self) -> f64 {
        let secs = self.elapsed.as_secs_f64();
        if secs > 0.0 {
            self.input_size as f64 / secs
        } else {
            0.0
        }
    }

    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("mode", self.mode.to_string());
        kv("input_size", self.input_size.to_string());
        kv("paper_size_1tt", self.paper_size_1tt.to_string());
        kv("paper_size_4tt", self.paper_size_4tt.to_string());
        kv("occupant_stream_size", self.occupant_stream_size.to_string());
        kv("honest_size", self.honest_size.to_string());
        kv("space_savings_paper", format!("{:.6}", self.space_savings_paper));
        kv("fbar_h_bpB", format!("{}", self.fbar_h));
        kv("shannon_h0_bpc", format!("{:.6}", self.shannon_h0));
        kv("empirical_h_bits_per_byte", format!("{:.6}", self.empirical_h));
        kv("manipulations", self.manipulation_total.get().to_string());
        kv("elapsed_s", format!("{:.6}", self.elapsed.as_secs_f64()));
        kv("throughput_Bps", format!("{:.1}", self.throughput()));
        out
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode                 {}", self.mode)?;
        writeln!(f, "input                {} B ({:.2} KiB)", self.input_size, kib(self.input_size))?;
        writeln!(
            f,
            "paper size 1TT:4TT   {:.2}:{:.2} KiB",
            kib(self.paper_size_1tt),
            kib(self.paper_size_4tt)
        )?;
        writeln!(f, "occupant stream      {} B", self.occupant_stream_size)?;
        writeln!(f, "honest payload       {} B", self.honest_size)?;
        writeln!(f, "paper savings        {:.2}%", 100.0 * self.space_savings_paper)?;
        writeln!(f, "H (8:B)              {} bpB", self.fbar_h)?;
        writeln!(f, "order-0 H            {:.4} bpc", self.shannon_h0)?;
        writeln!(f, "empirical H          {:.4} bits/byte", self.empirical_h)?;
        writeln!(f, "manipulations        {}", self.manipulation_total)?;
        write!(f, "time                 {:.6} s ({:.0} B/s)", self.elapsed.as_secs_f64(), self.throughput())
    }
}

/// Bits attributed to each section of an artifact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChannelTally {
    pub occupant_bits: u64,
    pub address_bits: u64,
    pub tail_bits: u64,
    pub grid_bits: u64,
}

impl ChannelTally {
    pub fn of_artifact(artifact: &GridArtifact) -> Self {
        ChannelTally {
            occupant_bits: 8 * artifact.occupant_stream.len() as u64,
            address_bits: 16 * artifact.rows.len() as u64,
            tail_bits: 8 * (artifact.honest_payload_size() - 2 * artifact.rows.len() as u64),
            grid_bits: 8 * GRID_REGION_SIZE as u64,
        }
    }

    /// Tally for `n` input bytes assuming no collisions.
    pub fn for_input(n: u64, mode: Mode) -> Self {
        ChannelTally {
            occupant_bits: 8 * paper_size(n, mode),
            address_bits: 16 * (n / 2),
            tail_bits: if n % 2 == 1 { 16 } else { 0 },
            grid_bits: 8 * GRID_REGION_SIZE as u64,
        }
    }
}

/// Two distinct inputs that produce the same occupant stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionWitness {
    pub first: Vec<u8>,
    pub second: Vec<u8>,
    pub occupant_stream: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub bijection_ok: bool,
    pub pairs_checked: usize,
    /// Rows (zero-based) whose record disagrees with the addressing.
    pub bad_rows: Vec<usize>,
    pub collision_witness: Option<CollisionWitness>,
    /// Per-pair bits in each channel, one-table mode.
    pub channel_bits: ChannelTally,
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bijection_ok {
            writeln!(f, "bijection over {} pairs: OK", self.pairs_checked)?;
        } else {
            let shown: Vec<String> = self.bad_rows.iter().take(8).map(|r| (r + 1).to_string()).collect();
            writeln!(
                f,
                "bijection over {} pairs: FAILED ({} bad rows; first: {})",
                self.pairs_checked,
                self.bad_rows.len(),
                shown.join(", ")
            )?;
        }
        if let Some(w) = &self.collision_witness {
            writeln!(
                f,
                "occupant-only collision: {:?} and {:?} both yield occupant stream {:?}",
                String::from_utf8_lossy(&w.first),
                String::from_utf8_lossy(&w.second),
                String::from_utf8_lossy(&w.occupant_stream)
            )?;
        }
        let c = &self.channel_bits;
        writeln!(f, "occupant stream carries {} bits/pair", c.occupant_bits)?;
        writeln!(f, "address channel carries {} bits/pair", c.address_bits)?;
        write!(f, "grid region is a fixed {} bits", c.grid_bits)
    }
}

/// Enumerates every pair against the table, and builds an occupant-only
/// collision from two single-pair inputs.
pub fn pigeonhole_audit(tt: &TranslationTable) -> AuditReport {
    let mut hit = vec![false; ROW_COUNT];
    let mut bad_rows = Vec::new();
    let mut distinct = true;
    for v in 0..=u16::MAX {
        let [a, b] = v.to_be_bytes();
        let row = row_of_pair(a, b, tt.layout());
        let slot = &mut hit[row.0 as usize];
        distinct &= !*slot;
        *slot = true;
        if tt.original(row) != Some([a, b]) {
            bad_rows.push(row.0 as usize);
        }
    }
    bad_rows.sort_unstable();
    bad_rows.dedup();
    let bijection_ok = distinct && bad_rows.is_empty() && tt.len() == ROW_COUNT;

    let occupant_of = |input: &[u8]| {
        let rows: Vec<RowIndex> = input.chunks_exact(2).map(|c| tt.row_of([c[0], c[1]])).collect();
        GridArtifact::build(Mode::OneTable, rows, None).occupant_stream
    };
    let (first, second) = (b"aa".to_vec(), b"bb".to_vec());
    let (s1, s2) = (occupant_of(&first), occupant_of(&second));
    let collision_witness = (s1 == s2).then_some(CollisionWitness { first, second, occupant_stream: s1 });

    AuditReport {
        bijection_ok,
        pairs_checked: ROW_COUNT,
        bad_rows,
        collision_witness,
        channel_bits: ChannelTally { occupant_bits: 8, address_bits: 16, tail_bits: 0, grid_bits: 8 * GRID_REGION_SIZE as u64 },
    }
}

/// Honest accounting of one artifact against the original length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArtifactAudit {
    pub original_size: u64,
    pub paper_accounted_size: u64,
    pub honest_payload_size: u64,
    pub tally: ChannelTally,
}

impl ArtifactAudit {
    pub fn of(artifact: &GridArtifact) -> Self {
        ArtifactAudit {
            original_size: artifact.input_len(),
            paper_accounted_size: artifact.paper_accounted_size(),
            honest_payload_size: artifact.honest_payload_size(),
            tally: ChannelTally::of_artifact(artifact),
        }
    }

    pub fn honest_covers_original(&self) -> bool {
        self.honest_payload_size >= self.original_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addressing::Layout;
    use crate::transtable::generate_tt;
    use crate::Exact;

    #[test]
    fn paper_size_examples() {
        assert_eq!(paper_size(0, Mode::OneTable), 0);
        assert_eq!(paper_size(0, Mode::FourTables), 0);
        assert_eq!(paper_size(8, Mode::OneTable), 4);
        assert_eq!(paper_size(8, Mode::FourTables), 1);
        assert_eq!(paper_size(192, Mode::OneTable), 97);
        assert!((kib(paper_size(61_604, Mode::OneTable)) - 30.39).abs() < 0.02);
        assert!((kib(paper_size(61_604, Mode::FourTables)) - 7.52).abs() < 0.02);
        assert!((kib(paper_size(10_260, Mode::OneTable)) - 5.06).abs() < 0.02);
    }

    #[test]
    fn paper_size_limit_ratio() {
        let n = 1u64 << 40;
        let r = paper_size(n, Mode::OneTable) as f64 / n as f64;
        assert!((r - 97.0 / 192.0).abs() < 1e-9);
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_order0::<f64>(27).unwrap() - 4.7549).abs() < 1e-4);
        assert_eq!(shannon_order0::<f64>(2).unwrap(), 1.0);
        assert_eq!(shannon_order0::<f32>(256).unwrap(), 8.0);
        assert!(shannon_order0::<f64>(0).is_err());
    }

    #[test]
    fn empirical_examples() {
        assert_eq!(empirical_entropy::<f64>(b""), 0.0);
        assert_eq!(empirical_entropy::<f64>(&[7; 100]), 0.0);
        assert_eq!(empirical_entropy::<f64>(b"abab"), 1.0);
        let all: Vec<u8> = (0..=255).collect();
        assert!((empirical_entropy::<f64>(&all) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_exact() {
        let r = |n, d| Exact::new(n, d);
        assert_eq!(fbar_h(r(4, 1)), Ok(r(2, 1)));
        assert_eq!(savings_from_h(r(2, 1)), Ok(r(1, 2)));
        assert_eq!(fbar_h(r(1, 1)), Ok(r(0, 1)));
        assert_eq!(savings_from_h(r(0, 1)), Ok(r(7, 8)));
        assert_eq!(fbar_h(r(1, 2)), Ok(r(-1, 1)));
        assert_eq!(savings_from_h(r(-1, 1)), Ok(r(15, 16)));
        assert!(fbar_h(r(0, 1)).is_err());
        assert!(fbar_h(-1.0f64).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(manipulation_distance(2, false).get(), 16);
        assert_eq!(manipulation_distance(2, true).get(), 0);
        assert_eq!(manipulation_distance(0, false).get(), 0);
    }

    #[test]
    fn audit_canonical_and_mutated() {
        let tt = generate_tt(Layout::Interleaved);
        let report = pigeonhole_audit(&tt);
        assert!(report.bijection_ok);
        let w = report.collision_witness.as_ref().unwrap();
        assert_eq!(w.occupant_stream, b"a");
        assert_ne!(w.first, w.second);

        let mut bad = tt.clone();
        bad.set_original(RowIndex(4242), [0, 1]);
        let report = pigeonhole_audit(&bad);
        assert!(!report.bijection_ok);
        assert!(report.bad_rows.contains(&4242));
    }

    #[test]
    fn tally_for_input() {
        let t = ChannelTally::for_input(10, Mode::OneTable);
        assert_eq!(t.occupant_bits, 8 * 5);
        assert_eq!(t.address_bits, 16 * 5);
    }
}
