//! Compressed artifacts.
//!
//! The grid format (`FBGR`) keeps everything the row-and-occupant scheme
//! produces: a 64 KiB grid region, the occupant character stream with its
//! block separators, and the address channel that actually carries the
//! rows. The honest format (`FBHN`) stores only the rows and the tail.
//!
//! Layout of `FBGR`, all integers big-endian:
//!
//! ```text
//! "FBGR" | version u8 | mode u8 | pair count u64
//! grid region            65,536 bytes
//! occupant stream        u64 length, bytes
//! address channel        u64 length, 2 bytes per row
//! tail                   empty, or 0x00 followed by the final odd byte
//! ```
//!
//! In one-table mode a block holds up to 96 units. Units 1..=95 are written
//! as the occupant character of their ordinal. A 96th unit closes the block
//! with a two-byte entry: the block separator followed by the 95th occupant
//! character again. A block that would place two units on the same row is
//! closed early by a bare separator. Separators are control bytes cycling
//! through `0x01..=0x1F`. Four-table mode writes one occupant character per
//! eight-byte chunk, cycling the alphabet without separators.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::addressing::{RowIndex, ROW_COUNT};
use crate::error::FormatError;
use crate::transtable::OCCUPANT_ALPHABET;

pub const GRID_MAGIC: &[u8; 4] = b"FBGR";
pub const HONEST_MAGIC: &[u8; 4] = b"FBHN";
pub const FORMAT_VERSION: u8 = 1;
pub const GRID_REGION_SIZE: usize = ROW_COUNT;
pub const HEADER_SIZE: u64 = 14;
/// Units per full one-table block.
pub const BLOCK_UNITS: usize = OCCUPANT_ALPHABET.len() + 1;
pub const TAIL_MARKER: u8 = 0x00;
/// Rows per four-table chunk.
pub const CHUNK_PAIRS: usize = 4;

const LAST_OCCUPANT: u8 = OCCUPANT_ALPHABET[OCCUPANT_ALPHABET.len() - 1];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// One table: two input bytes per occupant character.
    #[default]
    OneTable,
    /// Four tables: eight input bytes per occupant character.
    FourTables,
}

impl Mode {
    pub fn code(self) -> u8 {
        match self {
            Mode::OneTable => 1,
            Mode::FourTables => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, FormatError> {
        match code {
            1 => Ok(Mode::OneTable),
            4 => Ok(Mode::FourTables),
            other => Err(FormatError::Mode(other)),
        }
    }

    /// Input bytes covered by one occupant character.
    pub fn unit_bytes(self) -> u64 {
        match self {
            Mode::OneTable => 2,
            Mode::FourTables => 8,
        }
    }

    /// Occupant units needed for `n` input bytes.
    pub fn units_for(self, n: u64) -> u64 {
        n.div_ceil(self.unit_bytes())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::OneTable => "1tt",
            Mode::FourTables => "4tt",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1tt" => Ok(Mode::OneTable),
            "4tt" => Ok(Mode::FourTables),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Format {
    #[default]
    Paper,
    Honest,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Paper => "paper",
            Format::Honest => "honest",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Format::Paper),
            "honest" => Ok(Format::Honest),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// Block separator for zero-based block `block`.
pub fn separator(block: u64) -> u8 {
    (block % 31) as u8 + 1
}

/// Tail section bytes for an optional odd final byte.
fn tail_bytes(tail: Option<u8>) -> Vec<u8> {
    tail.map(|b| vec![TAIL_MARKER, b]).unwrap_or_default()
}

/// Everything a grid artifact holds, in memory.
#[derive(Clone, PartialEq, Eq)]
pub struct GridArtifact {
    pub mode: Mode,
    pub grid_region: Vec<u8>,
    pub occupant_stream: Vec<u8>,
    pub rows: Vec<RowIndex>,
    pub tail: Option<u8>,
}

impl fmt::Debug for GridArtifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridArtifact")
            .field("mode", &self.mode)
            .field("occupied_slots", &self.grid_region.iter().filter(|&&b| b != 0).count())
            .field("occupant_stream", &String::from_utf8_lossy(&self.occupant_stream))
            .field("rows", &self.rows.len())
            .field("tail", &self.tail)
            .finish()
    }
}

struct BlockGrid {
    region: Vec<u8>,
    touched: Vec<u16>,
}

impl BlockGrid {
    fn new() -> Self {
        BlockGrid { region: vec![0; GRID_REGION_SIZE], touched: Vec::new() }
    }

    fn occupied(&self, row: RowIndex) -> bool {
        self.region[row.0 as usize] != 0
    }

    fn place(&mut self, row: RowIndex, c: u8) {
        self.region[row.0 as usize] = c;
        self.touched.push(row.0);
    }

    fn clear(&mut self) {
        for r in self.touched.drain(..) {
            self.region[r as usize] = 0;
        }
    }
}

impl GridArtifact {
    /// Lays out the occupant stream and grid region for `rows` (and an
    /// optional odd tail byte) in the given mode.
    pub fn build(mode: Mode, rows: Vec<RowIndex>, tail: Option<u8>) -> Self {
        let (occupant_stream, grid) = match mode {
            Mode::OneTable => layout_one_table(&rows, tail),
            Mode::FourTables => layout_four_tables(&rows, tail),
        };
        GridArtifact { mode, grid_region: grid.region, occupant_stream, rows, tail }
    }

    pub fn input_len(&self) -> u64 {
        2 * self.rows.len() as u64 + u64::from(self.tail.is_some())
    }

    pub fn units(&self) -> u64 {
        self.mode.units_for(self.input_len())
    }

    /// Bytes counted by the paper accounting: occupant characters and
    /// separators only.
    pub fn paper_accounted_size(&self) -> u64 {
        self.occupant_stream.len() as u64
    }

    /// Bytes that actually carry the content: the address channel plus the
    /// tail section.
    pub fn honest_payload_size(&self) -> u64 {
        honest_payload_size(self.rows.len() as u64, self.tail)
    }

    pub fn blocks(&self) -> u64 {
        match self.mode {
            Mode::OneTable => {
                let seps = self.occupant_stream.iter().filter(|&&b| b < 32).count() as u64;
                let closed_last = self.units() > 0 && self.occupant_stream.len() >= 2 && {
                    let n = self.occupant_stream.len();
                    self.occupant_stream[n - 2] < 32 && self.occupant_stream[n - 1] == LAST_OCCUPANT
                };
                if self.units() == 0 {
                    0
                } else {
                    seps + u64::from(!closed_last)
                }
            }
            Mode::FourTables => self.units().div_ceil(OCCUPANT_ALPHABET.len() as u64),
        }
    }

    pub fn file_size(&self) -> u64 {
        HEADER_SIZE
            + GRID_REGION_SIZE as u64
            + 8
            + self.occupant_stream.len() as u64
            + 8
            + 2 * self.rows.len() as u64
            + tail_bytes(self.tail).len() as u64
    }

    pub fn write<W: Write>(&self, mut sink: W) -> std::io::Result<u64> {
        let mut header = Vec::with_capacity(HEADER_SIZE as usize);
        header.extend_from_slice(GRID_MAGIC);
        header.push(FORMAT_VERSION);
        header.push(self.mode.code());
        header.extend_from_slice(&(self.rows.len() as u64).to_be_bytes());
        sink.write_all(&header)?;
        sink.write_all(&self.grid_region)?;
        sink.write_all(&(self.occupant_stream.len() as u64).to_be_bytes())?;
        sink.write_all(&self.occupant_stream)?;
        sink.write_all(&(2 * self.rows.len() as u64).to_be_bytes())?;
        sink.write_all(&rows_to_bytes(&self.rows))?;
        sink.write_all(&tail_bytes(self.tail))?;
        sink.flush()?;
        Ok(self.file_size())
    }
}

pub fn honest_payload_size(pairs: u64, tail: Option<u8>) -> u64 {
    2 * pairs + tail_bytes(tail).len() as u64
}

fn rows_to_bytes(rows: &[RowIndex]) -> Vec<u8> {
    rows.iter().flat_map(|r| r.0.to_be_bytes()).collect()
}

fn layout_one_table(rows: &[RowIndex], tail: Option<u8>) -> (Vec<u8>, BlockGrid) {
    let units = rows.iter().copied().map(Some).chain(tail.map(|_| None));
    let mut stream = Vec::with_capacity(rows.len() + rows.len() / BLOCK_UNITS + 2);
    let mut grid = BlockGrid::new();
    let mut block = 0u64;
    let mut ordinal = 0usize;
    let mut fresh = false;
    for row in units {
        if fresh {
            grid.clear();
            fresh = false;
        }
        if let Some(r) = row {
            if grid.occupied(r) {
                stream.push(separator(block));
                block += 1;
                ordinal = 0;
                grid.clear();
            }
        }
        ordinal += 1;
        let slot_char = if ordinal < BLOCK_UNITS {
            let c = OCCUPANT_ALPHABET[ordinal - 1];
            stream.push(c);
            c
        } else {
            let sep = separator(block);
            stream.extend_from_slice(&[sep, LAST_OCCUPANT]);
            block += 1;
            ordinal = 0;
            fresh = true;
            sep
        };
        if let Some(r) = row {
            grid.place(r, slot_char);
        }
    }
    (stream, grid)
}

fn layout_four_tables(rows: &[RowIndex], tail: Option<u8>) -> (Vec<u8>, BlockGrid) {
    let n = 2 * rows.len() as u64 + u64::from(tail.is_some());
    let units = Mode::FourTables.units_for(n) as usize;
    let per_block = OCCUPANT_ALPHABET.len();
    let stream: Vec<u8> = (0..units).map(|u| OCCUPANT_ALPHABET[u % per_block]).collect();
    let mut grid = BlockGrid::new();
    let last_block_start = units.saturating_sub(1) / per_block * per_block;
    for (u, &ch) in stream.iter().enumerate().skip(last_block_start) {
        if let Some(&r) = rows.get(u * CHUNK_PAIRS) {
            grid.place(r, ch);
        }
    }
    (stream, grid)
}

/// Summary of a written artifact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSummary {
    pub format: Format,
    pub mode: Mode,
    pub pairs: u64,
    pub paper_accounted_size: u64,
    pub honest_payload_size: u64,
    pub file_size: u64,
}

pub fn write_grid<W: Write>(rows: Vec<RowIndex>, tail: Option<u8>, mode: Mode, sink: W) -> std::io::Result<(GridArtifact, GridSummary)> {
    let artifact = GridArtifact::build(mode, rows, tail);
    let file_size = artifact.write(sink)?;
    let summary = GridSummary {
        format: Format::Paper,
        mode,
        pairs: artifact.rows.len() as u64,
        paper_accounted_size: artifact.paper_accounted_size(),
        honest_payload_size: artifact.honest_payload_size(),
        file_size,
    };
    Ok((artifact, summary))
}

/// The self-contained format: header, then rows, then the tail section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HonestArtifact {
    pub mode: Mode,
    pub rows: Vec<RowIndex>,
    pub tail: Option<u8>,
}

impl HonestArtifact {
    pub fn input_len(&self) -> u64 {
        2 * self.rows.len() as u64 + u64::from(self.tail.is_some())
    }

    pub fn honest_payload_size(&self) -> u64 {
        honest_payload_size(self.rows.len() as u64, self.tail)
    }
}

pub fn write_honest<W: Write>(rows: &[RowIndex], tail: Option<u8>, mode: Mode, mut sink: W) -> std::io::Result<GridSummary> {
    let mut buf = Vec::with_capacity(HEADER_SIZE as usize + 2 * rows.len() + 2);
    buf.extend_from_slice(HONEST_MAGIC);
    buf.push(FORMAT_VERSION);
    buf.push(mode.code());
    buf.extend_from_slice(&(rows.len() as u64).to_be_bytes());
    buf.extend_from_slice(&rows_to_bytes(rows));
    buf.extend_from_slice(&tail_bytes(tail));
    sink.write_all(&buf)?;
    sink.flush()?;
    let payload = honest_payload_size(rows.len() as u64, tail);
    Ok(GridSummary {
        format: Format::Honest,
        mode,
        pairs: rows.len() as u64,
        paper_accounted_size: payload,
        honest_payload_size: payload,
        file_size: buf.len() as u64,
    })
}

/// A parsed artifact of either format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Artifact {
    Grid(GridArtifact),
    Honest(HonestArtifact),
}

impl Artifact {
    pub fn mode(&self) -> Mode {
        match self {
            Artifact::Grid(g) => g.mode,
            Artifact::Honest(h) => h.mode,
        }
    }

    pub fn format(&self) -> Format {
        match self {
            Artifact::Grid(_) => Format::Paper,
            Artifact::Honest(_) => Format::Honest,
        }
    }

    pub fn rows(&self) -> &[RowIndex] {
        match self {
            Artifact::Grid(g) => &g.rows,
            Artifact::Honest(h) => &h.rows,
        }
    }

    pub fn tail(&self) -> Option<u8> {
        match self {
            Artifact::Grid(g) => g.tail,
            Artifact::Honest(h) => h.tail,
        }
    }

    pub fn honest_payload_size(&self) -> u64 {
        honest_payload_size(self.rows().len() as u64, self.tail())
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, section: &'static str) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let out = &self.buf[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(FormatError::Truncated { section, offset: self.buf.len() as u64 }),
        }
    }

    fn u64(&mut self, section: &'static str) -> Result<u64, FormatError> {
        let b = self.take(8, section)?;
        Ok(u64::from_be_bytes(b.try_into().expect("8 bytes")))
    }

    fn offset(&self) -> u64 {
        self.pos as u64
    }
}

fn parse_header<'a>(cur: &mut Cursor<'a>, magic: &'static [u8; 4], name: &'static str) -> Result<(Mode, u64), FormatError> {
    let found = cur.take(4, "header")?;
    if found != magic {
        return Err(FormatError::BadMagic { expected: name, found: found.to_vec() });
    }
    let version = cur.take(1, "header")?[0];
    if version != FORMAT_VERSION {
        return Err(FormatError::Version(version));
    }
    let mode = Mode::from_code(cur.take(1, "header")?[0])?;
    let pairs = cur.u64("header")?;
    Ok((mode, pairs))
}

fn parse_rows(bytes: &[u8]) -> Vec<RowIndex> {
    bytes.chunks_exact(2).map(|c| RowIndex(u16::from_be_bytes([c[0], c[1]]))).collect()
}

fn parse_tail(cur: &mut Cursor<'_>) -> Result<Option<u8>, FormatError> {
    let rest = &cur.buf[cur.pos..];
    match rest {
        [] => Ok(None),
        [TAIL_MARKER, b] => Ok(Some(*b)),
        _ => Err(FormatError::Tail { offset: cur.offset() }),
    }
}

/// Scans a one-table occupant stream; returns the number of units it holds.
fn scan_one_table(stream: &[u8], base: u64) -> Result<u64, FormatError> {
    let mut units = 0u64;
    let mut block = 0u64;
    let mut ordinal = 0usize;
    let mut pos = 0usize;
    while pos < stream.len() {
        let b = stream[pos];
        let offset = base + pos as u64;
        if b < 32 {
            let expected = separator(block);
            if b != expected {
                return Err(FormatError::Separator { offset, block, expected, found: b });
            }
            if ordinal == 0 {
                return Err(FormatError::OrdinalGap { offset, block, expected: OCCUPANT_ALPHABET[0] as char, found: b as char });
            }
            if ordinal == BLOCK_UNITS - 1 && stream.get(pos + 1) == Some(&LAST_OCCUPANT) {
                units += 1;
                pos += 2;
            } else if pos + 1 == stream.len() {
                return Err(FormatError::Truncated { section: "occupant stream", offset: offset + 1 });
            } else {
                pos += 1;
            }
            block += 1;
            ordinal = 0;
            continue;
        }
        let expected = OCCUPANT_ALPHABET.get(ordinal).copied();
        if expected != Some(b) {
            return Err(FormatError::OrdinalGap {
                offset,
                block,
                expected: expected.map_or('\u{1f}', char::from),
                found: b as char,
            });
        }
        ordinal += 1;
        units += 1;
        pos += 1;
    }
    Ok(units)
}

fn scan_four_tables(stream: &[u8], base: u64) -> Result<u64, FormatError> {
    let per_block = OCCUPANT_ALPHABET.len();
    for (u, &b) in stream.iter().enumerate() {
        let expected = OCCUPANT_ALPHABET[u % per_block];
        if b != expected {
            return Err(FormatError::OrdinalGap {
                offset: base + u as u64,
                block: (u / per_block) as u64,
                expected: expected as char,
                found: b as char,
            });
        }
    }
    Ok(stream.len() as u64)
}

/// Parses a grid artifact and checks every channel against the others.
pub fn parse_grid_bytes(buf: &[u8]) -> Result<GridArtifact, FormatError> {
    let mut cur = Cursor { buf, pos: 0 };
    let (mode, pairs) = parse_header(&mut cur, GRID_MAGIC, "FBGR")?;
    let grid_region = cur.take(GRID_REGION_SIZE, "grid region")?.to_vec();
    let occ_len = cur.u64("occupant stream")?;
    let occ_base = cur.offset();
    let occupant_stream = cur.take(usize::try_from(occ_len).unwrap_or(usize::MAX), "occupant stream")?.to_vec();
    let addr_len = cur.u64("address channel")?;
    let expected_addr = pairs.saturating_mul(2);
    if addr_len != expected_addr {
        return Err(FormatError::Length { section: "address channel", expected: expected_addr, found: addr_len });
    }
    let available = (buf.len() - cur.pos) as u64;
    if addr_len > available {
        return Err(FormatError::Length { section: "address channel", expected: addr_len, found: available });
    }
    let rows = parse_rows(cur.take(addr_len as usize, "address channel")?);
    let tail = parse_tail(&mut cur)?;

    let found_units = match mode {
        Mode::OneTable => scan_one_table(&occupant_stream, occ_base)?,
        Mode::FourTables => scan_four_tables(&occupant_stream, occ_base)?,
    };
    let n = 2 * pairs + u64::from(tail.is_some());
    let expected_units = mode.units_for(n);
    if found_units != expected_units {
        return Err(FormatError::Length { section: "occupant stream", expected: expected_units, found: found_units });
    }

    let rebuilt = GridArtifact::build(mode, rows, tail);
    if rebuilt.occupant_stream != occupant_stream {
        let at = rebuilt.occupant_stream.iter().zip(&occupant_stream).position(|(a, b)| a != b).unwrap_or(0);
        let found = occupant_stream.get(at).copied().unwrap_or(0);
        let expected = rebuilt.occupant_stream.get(at).copied().unwrap_or(0);
        return Err(FormatError::Separator { offset: occ_base + at as u64, block: 0, expected, found });
    }
    if let Some(row) = rebuilt.grid_region.iter().zip(&grid_region).position(|(a, b)| a != b) {
        return Err(FormatError::Grid { row: row as u16 });
    }
    Ok(rebuilt)
}

pub fn parse_honest_bytes(buf: &[u8]) -> Result<HonestArtifact, FormatError> {
    let mut cur = Cursor { buf, pos: 0 };
    let (mode, pairs) = parse_header(&mut cur, HONEST_MAGIC, "FBHN")?;
    let want = pairs.saturating_mul(2);
    let available = (buf.len() - cur.pos) as u64;
    if want > available {
        return Err(FormatError::Length { section: "row stream", expected: want, found: available });
    }
    let rows = parse_rows(cur.take(want as usize, "row stream")?);
    let tail = parse_tail(&mut cur)?;
    Ok(HonestArtifact { mode, rows, tail })
}

/// Parses either format, picking by magic.
pub fn parse_artifact_bytes(buf: &[u8]) -> Result<Artifact, FormatError> {
    if buf.starts_with(HONEST_MAGIC) {
        parse_honest_bytes(buf).map(Artifact::Honest)
    } else if buf.starts_with(GRID_MAGIC) {
        parse_grid_bytes(buf).map(Artifact::Grid)
    } else {
        Err(FormatError::BadMagic { expected: "FBGR or FBHN", found: buf.iter().take(4).copied().collect() })
    }
}

/// Reads a grid artifact and checks its mode against `mode`.
pub fn parse_grid<R: Read>(mut source: R, mode: Mode) -> Result<(Vec<RowIndex>, Option<u8>), FormatError> {
    let mut buf = Vec::new();
    source.read_to_end(&mut buf)?;
    let artifact = parse_grid_bytes(&buf)?;
    if artifact.mode != mode {
        return Err(FormatError::Mode(artifact.mode.code()));
    }
    Ok((artifact.rows, artifact.tail))
}
