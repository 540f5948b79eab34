//! The translation table: 65,536 rows mapping each row to the original
//! two-byte pair it stands for.
//!
//! Two on-disk forms exist. The text form is fixed-width (128 bytes per
//! row, 8 MiB in total) and carries the occupant alphabet column on every
//! row. The binary form is `FBTT`, a version byte, then one
//! `(row: u16 BE, original: [u8; 2])` record per row.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Read, Write};

use crate::addressing::{address_of_row, pair_of_row, row_of_pair, Layout, RowIndex, ROW_COUNT};
use crate::error::TtError;

/// Width of one text row, newline included.
pub const TEXT_ROW_WIDTH: usize = 128;
pub const TEXT_TABLE_SIZE: u64 = (ROW_COUNT * TEXT_ROW_WIDTH) as u64;

pub const BINARY_MAGIC: &[u8; 4] = b"FBTT";
pub const BINARY_VERSION: u8 = 1;
const BINARY_RECORD: usize = 4;
pub const BINARY_TABLE_SIZE: u64 = (5 + ROW_COUNT * BINARY_RECORD) as u64;

/// Marks an escaped byte (followed by two hex digits) in the text form.
const ESCAPE: u8 = b'\\';

/// The 95 printable occupant characters: lower case, upper case, the digits
/// `1..9` then `0`, then the remaining printable codes (space included) in
/// ascending order.
pub const OCCUPANT_ALPHABET: [u8; 95] = build_alphabet();

const fn build_alphabet() -> [u8; 95] {
    let mut out = [0u8; 95];
    let mut n = 0;
    let mut c = b'a';
    while c <= b'z' {
        out[n] = c;
        n += 1;
        c += 1;
    }
    c = b'A';
    while c <= b'Z' {
        out[n] = c;
        n += 1;
        c += 1;
    }
    c = b'1';
    while c <= b'9' {
        out[n] = c;
        n += 1;
        c += 1;
    }
    out[n] = b'0';
    n += 1;
    c = 32;
    while c <= 126 {
        if !c.is_ascii_alphanumeric() {
            out[n] = c;
            n += 1;
        }
        c += 1;
    }
    assert!(n == 95);
    out
}

/// 1-based ordinal of `c` in the occupant alphabet.
pub fn occupant_ordinal(c: u8) -> Option<usize> {
    OCCUPANT_ALPHABET.iter().position(|&a| a == c).map(|p| p + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtRecord {
    pub row: RowIndex,
    pub original: [u8; 2],
}

impl TtRecord {
    pub fn address(&self) -> crate::addressing::FlagAddress {
        address_of_row(self.row)
    }
}

/// The row dictionary. Rows are dense; `originals[r]` is the pair for row `r`.
#[derive(Clone)]
pub struct TranslationTable {
    layout: Layout,
    originals: Vec<[u8; 2]>,
    by_pair: Vec<u16>,
}

// by_pair is derived and ambiguous for malformed tables
impl PartialEq for TranslationTable {
    fn eq(&self, other: &Self) -> bool {
        self.layout == other.layout && self.originals == other.originals
    }
}

impl Eq for TranslationTable {}

impl fmt::Debug for TranslationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TranslationTable")
            .field("layout", &self.layout)
            .field("rows", &self.originals.len())
            .finish()
    }
}

pub fn generate_tt(layout: Layout) -> TranslationTable {
    let originals = RowIndex::all()
        .map(|r| {
            let (a, b) = pair_of_row(r, layout);
            [a, b]
        })
        .collect();
    TranslationTable::from_originals(layout, originals)
}

impl TranslationTable {
    /// Builds a table from raw originals without checking them. Use
    /// [`verify_tt`] or [`TranslationTable::verified`] before encoding.
    pub fn from_originals(layout: Layout, originals: Vec<[u8; 2]>) -> Self {
        let mut by_pair = vec![0u16; ROW_COUNT];
        for (row, pair) in originals.iter().enumerate().take(ROW_COUNT) {
            by_pair[pair_key(*pair)] = row as u16;
        }
        TranslationTable { layout, originals, by_pair }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.originals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.originals.is_empty()
    }

    pub fn original(&self, row: RowIndex) -> Option<[u8; 2]> {
        self.originals.get(row.0 as usize).copied()
    }

    pub fn row_of(&self, pair: [u8; 2]) -> RowIndex {
        RowIndex(self.by_pair[pair_key(pair)])
    }

    pub fn records(&self) -> impl Iterator<Item = TtRecord> + '_ {
        self.originals
            .iter()
            .enumerate()
            .map(|(r, &original)| TtRecord { row: RowIndex(r as u16), original })
    }

    /// Overwrites one record's original and refreshes the inverse index.
    pub fn set_original(&mut self, row: RowIndex, original: [u8; 2]) {
        self.originals[row.0 as usize] = original;
        self.by_pair[pair_key(original)] = row.0;
    }

    pub fn swap_rows(&mut self, a: RowIndex, b: RowIndex) {
        let (pa, pb) = (self.originals[a.0 as usize], self.originals[b.0 as usize]);
        self.set_original(a, pb);
        self.set_original(b, pa);
    }

    /// Drops the final row; only useful to build malformed tables.
    pub fn truncate_last(&mut self) {
        self.originals.pop();
    }

    /// Returns the table if it verifies, else the first violation.
    pub fn verified(self) -> Result<Self, TtError> {
        match verify_tt(&self).violations.first() {
            None => Ok(self),
            Some(v) => Err(TtError::Verification { row: v.row().unwrap_or(self.len()), reason: v.to_string() }),
        }
    }
}

fn pair_key(pair: [u8; 2]) -> usize {
    usize::from(u16::from_be_bytes(pair))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Count { expected: usize, found: usize },
    Mismatch { row: usize, expected: [u8; 2], found: [u8; 2] },
    Duplicate { original: [u8; 2], rows: Vec<usize> },
}

impl Violation {
    pub fn row(&self) -> Option<usize> {
        match self {
            Violation::Count { .. } => None,
            Violation::Mismatch { row, .. } => Some(*row),
            Violation::Duplicate { rows, .. } => rows.first().copied(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Count { expected, found } => write!(f, "row count {found}, expected {expected}"),
            Violation::Mismatch { row, expected, found } => write!(
                f,
                "row {} holds {:02x}{:02x}, address implies {:02x}{:02x}",
                row + 1,
                found[0],
                found[1],
                expected[0],
                expected[1]
            ),
            Violation::Duplicate { original, rows } => {
                write!(f, "pair {:02x}{:02x} appears on rows {:?}", original[0], original[1], rows)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks row count, that each row's original matches its address, and
/// that no pair appears twice.
pub fn verify_tt(tt: &TranslationTable) -> VerifyReport {
    let mut violations = Vec::new();
    if tt.len() != ROW_COUNT {
        violations.push(Violation::Count { expected: ROW_COUNT, found: tt.len() });
    }
    let mut seen: HashMap<[u8; 2], Vec<usize>> = HashMap::new();
    for rec in tt.records() {
        let (a, b) = pair_of_row(rec.row, tt.layout);
        if rec.original != [a, b] {
            violations.push(Violation::Mismatch { row: rec.row.0 as usize, expected: [a, b], found: rec.original });
        }
        seen.entry(rec.original).or_default().push(rec.row.0 as usize);
    }
    let mut dups: Vec<_> = seen
        .into_iter()
        .filter(|(_, rows)| rows.len() > 1)
        .map(|(original, rows)| Violation::Duplicate { original, rows })
        .collect();
    dups.sort_by_key(|v| v.row());
    violations.extend(dups);
    VerifyReport { violations }
}

/// Four tables for the 8-to-1 mode, one per pair position in a chunk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtSet4 {
    pub tables: [TranslationTable; 4],
}

impl TtSet4 {
    pub fn generate(layout: Layout) -> Self {
        let tt = generate_tt(layout);
        TtSet4 { tables: [tt.clone(), tt.clone(), tt.clone(), tt] }
    }

    pub fn verify(&self) -> [VerifyReport; 4] {
        std::array::from_fn(|i| verify_tt(&self.tables[i]))
    }
}

struct CountingWriter<W> {
    inner: W,
    written: u64,
}

impl<W: Write> CountingWriter<W> {
    fn put(&mut self, buf: &[u8]) -> Result<(), TtError> {
        self.inner
            .write_all(buf)
            .map_err(|source| TtError::Io { written: self.written, source })?;
        self.written += buf.len() as u64;
        Ok(())
    }

    fn finish(mut self) -> Result<u64, TtError> {
        self.inner.flush().map_err(|source| TtError::Io { written: self.written, source })?;
        Ok(self.written)
    }
}

fn escape_into(out: &mut Vec<u8>, b: u8) {
    if b.is_ascii_graphic() && b != ESCAPE {
        out.push(b);
    } else {
        out.push(ESCAPE);
        out.extend_from_slice(format!("{b:02X}").as_bytes());
    }
}

fn text_row(rec: TtRecord) -> [u8; TEXT_ROW_WIDTH] {
    let mut line = Vec::with_capacity(TEXT_ROW_WIDTH);
    line.extend_from_slice(format!("{} {} ", rec.row.display_number(), rec.address()).as_bytes());
    line.extend_from_slice(&OCCUPANT_ALPHABET);
    line.push(b' ');
    escape_into(&mut line, rec.original[0]);
    escape_into(&mut line, rec.original[1]);
    debug_assert!(line.len() < TEXT_ROW_WIDTH);
    let mut row = [b' '; TEXT_ROW_WIDTH];
    row[..line.len()].copy_from_slice(&line);
    row[TEXT_ROW_WIDTH - 1] = b'\n';
    row
}

/// Writes the fixed-width text form; returns the byte count.
pub fn serialize_text<W: Write>(tt: &TranslationTable, sink: W) -> Result<u64, TtError> {
    let mut w = CountingWriter { inner: io::BufWriter::new(sink), written: 0 };
    for rec in tt.records() {
        w.put(&text_row(rec))?;
    }
    w.finish()
}

fn parse_original(field: &[u8], offset: u64) -> Result<[u8; 2], TtError> {
    let bad = || TtError::Format { offset, reason: "malformed original field".into() };
    let mut out = Vec::with_capacity(2);
    let mut pos = 0;
    while pos < field.len() {
        if field[pos] == ESCAPE {
            let hex = field.get(pos + 1..pos + 3).ok_or_else(bad)?;
            let hex = std::str::from_utf8(hex).map_err(|_| bad())?;
            out.push(u8::from_str_radix(hex, 16).map_err(|_| bad())?);
            pos += 3;
        } else {
            out.push(field[pos]);
            pos += 1;
        }
    }
    out.try_into().map_err(|_| bad())
}

/// Reads the text form back. The table is not verified.
pub fn load_text<R: Read>(source: R, layout: Layout) -> Result<TranslationTable, TtError> {
    let mut reader = io::BufReader::new(source);
    let mut originals = Vec::with_capacity(ROW_COUNT);
    let mut line = [0u8; TEXT_ROW_WIDTH];
    let mut offset = 0u64;
    loop {
        let filled = read_full(&mut reader, &mut line).map_err(|source| TtError::Io { written: offset, source })?;
        if filled == 0 {
            break;
        }
        if filled < TEXT_ROW_WIDTH {
            return Err(TtError::Format { offset: offset + filled as u64, reason: "truncated row".into() });
        }
        if line[TEXT_ROW_WIDTH - 1] != b'\n' {
            return Err(TtError::Format { offset: offset + TEXT_ROW_WIDTH as u64 - 1, reason: "row not newline-terminated".into() });
        }
        let body = &line[..TEXT_ROW_WIDTH - 1];
        let mut fields = body.splitn(3, |&b| b == b' ');
        let number = fields.next().unwrap_or_default();
        let expected = (originals.len() + 1).to_string();
        if number != expected.as_bytes() {
            return Err(TtError::Format { offset, reason: format!("expected row number {expected}") });
        }
        let rest = fields.nth(1).unwrap_or_default();
        if rest.len() < OCCUPANT_ALPHABET.len() + 1 || rest[..OCCUPANT_ALPHABET.len()] != OCCUPANT_ALPHABET {
            return Err(TtError::Format { offset, reason: "occupant column mismatch".into() });
        }
        let tail = &rest[OCCUPANT_ALPHABET.len() + 1..];
        let end = tail.iter().position(|&b| b == b' ').unwrap_or(tail.len());
        if tail[end..].iter().any(|&b| b != b' ') {
            return Err(TtError::Format { offset, reason: "trailing garbage".into() });
        }
        originals.push(parse_original(&tail[..end], offset)?);
        offset += TEXT_ROW_WIDTH as u64;
        if originals.len() > ROW_COUNT {
            return Err(TtError::Format { offset, reason: "more than 65536 rows".into() });
        }
    }
    Ok(TranslationTable::from_originals(layout, originals))
}

fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

pub fn serialize_binary<W: Write>(tt: &TranslationTable, sink: W) -> Result<u64, TtError> {
    let mut w = CountingWriter { inner: io::BufWriter::new(sink), written: 0 };
    w.put(BINARY_MAGIC)?;
    w.put(&[BINARY_VERSION])?;
    for rec in tt.records() {
        let r = rec.row.0.to_be_bytes();
        w.put(&[r[0], r[1], rec.original[0], rec.original[1]])?;
    }
    w.finish()
}

/// Reads the binary form. Structural problems are format errors carrying
/// the byte offset; content is left to [`verify_tt`].
pub fn load_binary<R: Read>(source: R, layout: Layout) -> Result<TranslationTable, TtError> {
    let mut reader = io::BufReader::new(source);
    let io_err = |source| TtError::Io { written: 0, source };
    let mut head = [0u8; 5];
    let got = read_full(&mut reader, &mut head).map_err(io_err)?;
    if got < 4 || &head[..4] != BINARY_MAGIC {
        return Err(TtError::Format { offset: 0, reason: "bad magic".into() });
    }
    if got < 5 {
        return Err(TtError::Format { offset: got as u64, reason: "truncated header".into() });
    }
    if head[4] != BINARY_VERSION {
        return Err(TtError::Format { offset: 4, reason: format!("unsupported version {}", head[4]) });
    }
    let mut originals = Vec::with_capacity(ROW_COUNT);
    let mut rec = [0u8; BINARY_RECORD];
    let mut offset = 5u64;
    loop {
        let got = read_full(&mut reader, &mut rec).map_err(io_err)?;
        if got == 0 {
            break;
        }
        if got < BINARY_RECORD {
            return Err(TtError::Format { offset: offset + got as u64, reason: "truncated record".into() });
        }
        if originals.len() == ROW_COUNT {
            return Err(TtError::Format { offset, reason: "more than 65536 records".into() });
        }
        let row = u16::from_be_bytes([rec[0], rec[1]]) as usize;
        if row != originals.len() {
            return Err(TtError::Format { offset, reason: format!("record for row {row} where row {} expected", originals.len()) });
        }
        originals.push([rec[2], rec[3]]);
        offset += BINARY_RECORD as u64;
    }
    if originals.len() != ROW_COUNT {
        return Err(TtError::Format { offset, reason: format!("row count {} short of 65536", originals.len()) });
    }
    Ok(TranslationTable::from_originals(layout, originals))
}

/// Loads either form, picking by the leading magic.
pub fn load_any<R: Read>(source: R, layout: Layout) -> Result<TranslationTable, TtError> {
    let mut reader = io::BufReader::new(source);
    let peek = io::BufRead::fill_buf(&mut reader).map_err(|source| TtError::Io { written: 0, source })?;
    if peek.starts_with(BINARY_MAGIC) {
        load_binary(reader, layout)
    } else {
        load_text(reader, layout)
    }
}

/// True iff `row_of_pair` and the table agree on every pair.
pub fn agrees_with_addressing(tt: &TranslationTable) -> bool {
    tt.len() == ROW_COUNT
        && (0..=u16::MAX).all(|v| {
            let [a, b] = v.to_be_bytes();
            let row = row_of_pair(a, b, tt.layout);
            tt.original(row) == Some([a, b])
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addressing::FlagAddress;

    #[test]
    fn alphabet_shape() {
        assert_eq!(&OCCUPANT_ALPHABET[..4], b"abcd");
        assert_eq!(OCCUPANT_ALPHABET[26], b'A');
        assert_eq!(&OCCUPANT_ALPHABET[52..62], b"1234567890");
        let mut sorted = OCCUPANT_ALPHABET.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (32u8..=126).collect::<Vec<_>>());
        assert_eq!(occupant_ordinal(b'a'), Some(1));
        assert_eq!(occupant_ordinal(0x7F), None);
    }

    #[test]
    fn generated_table_lookup() {
        let tt = generate_tt(Layout::Interleaved);
        assert_eq!(tt.len(), 65_536);
        let row = crate::addressing::row_of_address(FlagAddress::new(7, 6, 1, 4).unwrap());
        assert_eq!(tt.original(row), Some(*b"re"));
        assert_eq!(tt.row_of(*b"re"), row);
        assert_eq!(tt, generate_tt(Layout::Interleaved));
        assert!(verify_tt(&tt).is_ok());
        assert!(agrees_with_addressing(&tt));
    }

    #[test]
    fn text_size_and_first_row() {
        let tt = generate_tt(Layout::Interleaved);
        let mut buf = Vec::new();
        assert_eq!(serialize_text(&tt, &mut buf).unwrap(), 8_388_608);
        assert_eq!(buf.len(), 8_388_608);
        assert!(buf.starts_with(b"1 1x1x1x1 abcd"));
        assert!(buf.chunks(TEXT_ROW_WIDTH).all(|row| row[TEXT_ROW_WIDTH - 1] == b'\n'));
        let back = load_text(&buf[..], Layout::Interleaved).unwrap();
        assert_eq!(back, tt);
    }

    #[test]
    fn binary_round_trip_and_errors() {
        let tt = generate_tt(Layout::Grouped);
        let mut buf = Vec::new();
        assert_eq!(serialize_binary(&tt, &mut buf).unwrap(), BINARY_TABLE_SIZE);
        assert_eq!(load_binary(&buf[..], Layout::Grouped).unwrap(), tt);

        let cut = &buf[..1000];
        match load_binary(cut, Layout::Grouped) {
            Err(TtError::Format { offset, .. }) => assert_eq!(offset, 1000),
            other => panic!("unexpected {other:?}"),
        }
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(load_binary(&bad[..], Layout::Grouped), Err(TtError::Format { offset: 0, .. })));

        let mut corrupt = buf.clone();
        corrupt[5 + 4 * 1234 + 2] ^= 0x01;
        let loaded = load_binary(&corrupt[..], Layout::Grouped).unwrap();
        match loaded.verified() {
            Err(TtError::Verification { row, .. }) => assert_eq!(row, 1234),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn swapped_rows_give_two_violations() {
        let mut tt = generate_tt(Layout::Interleaved);
        tt.swap_rows(RowIndex(10), RowIndex(20_000));
        let report = verify_tt(&tt);
        assert_eq!(report.violations.len(), 2);
        assert_eq!(report.violations[0].row(), Some(10));
    }

    #[test]
    fn missing_row_is_count_violation() {
        let mut tt = generate_tt(Layout::Interleaved);
        tt.truncate_last();
        let report = verify_tt(&tt);
        assert_eq!(report.violations, vec![Violation::Count { expected: 65_536, found: 65_535 }]);
    }

    #[test]
    fn escaped_originals() {
        let tt = generate_tt(Layout::Interleaved);
        let rec = TtRecord { row: tt.row_of(*b" \\"), original: *b" \\" };
        let row = text_row(rec);
        let text = String::from_utf8_lossy(&row);
        assert!(text.trim_end().ends_with("\\20\\5C"), "{text}");
    }

    #[test]
    fn set4_verifies() {
        let set = TtSet4::generate(Layout::Interleaved);
        assert!(set.verify().iter().all(VerifyReport::is_ok));
    }
}
