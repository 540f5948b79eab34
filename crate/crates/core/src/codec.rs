//! Compression and decompression pipelines over the translation table(s).

use std::io::Write;
use std::time::Instant;

use crate::addressing::RowIndex;
use crate::error::{CodecError, TtError};
use crate::gridfile::{
    parse_artifact_bytes, write_grid, write_honest, Artifact, Format, GridSummary, Mode, CHUNK_PAIRS,
};
use crate::metrics::MetricsReport;
use crate::transtable::{OCCUPANT_ALPHABET, TranslationTable, TtSet4};

/// Verified tables for one of the two modes.
#[derive(Clone, Debug)]
pub enum Tables {
    One(TranslationTable),
    Four(TtSet4),
}

impl Tables {
    pub fn one(tt: TranslationTable) -> Result<Self, TtError> {
        Ok(Tables::One(tt.verified()?))
    }

    pub fn four(set: TtSet4) -> Result<Self, TtError> {
        let [a, b, c, d] = set.tables;
        Ok(Tables::Four(TtSet4 { tables: [a.verified()?, b.verified()?, c.verified()?, d.verified()?] }))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Tables::One(_) => Mode::OneTable,
            Tables::Four(_) => Mode::FourTables,
        }
    }

    /// Table used for the `index`-th pair of the input.
    pub fn for_pair(&self, index: usize) -> &TranslationTable {
        match self {
            Tables::One(tt) => tt,
            Tables::Four(set) => &set.tables[index % CHUNK_PAIRS],
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CompressJob<'a> {
    pub input: &'a [u8],
    pub format: Format,
    pub tables: &'a Tables,
}

impl CompressJob<'_> {
    pub fn mode(&self) -> Mode {
        self.tables.mode()
    }
}

#[derive(Clone, Debug)]
pub struct CompressOutcome {
    pub summary: GridSummary,
    pub report: MetricsReport,
}

/// Rows for every full pair of `input`, plus the odd final byte if any.
pub fn rows_of(input: &[u8], tables: &Tables) -> (Vec<RowIndex>, Option<u8>) {
    let pairs = input.chunks_exact(2);
    let tail = pairs.remainder().first().copied();
    let rows = pairs.enumerate().map(|(i, c)| tables.for_pair(i).row_of([c[0], c[1]])).collect();
    (rows, tail)
}

/// One eight-byte chunk of four-table mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chunk4 {
    /// 1-based occupant ordinal, cycling through the alphabet.
    pub ordinal: u8,
    /// Up to four rows; fewer only in a final partial chunk.
    pub rows: Vec<RowIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chunking {
    pub chunks: Vec<Chunk4>,
    pub tail: Option<u8>,
}

pub fn chunk_4tt(input: &[u8], tables: &TtSet4) -> Chunking {
    let tail = (input.len() % 2 == 1).then(|| input[input.len() - 1]);
    let chunks = input
        .chunks(8)
        .enumerate()
        .map(|(k, chunk)| Chunk4 {
            ordinal: (k % OCCUPANT_ALPHABET.len()) as u8 + 1,
            rows: chunk
                .chunks_exact(2)
                .enumerate()
                .map(|(q, p)| tables.tables[q].row_of([p[0], p[1]]))
                .collect(),
        })
        .collect();
    Chunking { chunks, tail }
}

pub fn compress<W: Write>(job: CompressJob<'_>, sink: W) -> Result<CompressOutcome, CodecError> {
    let start = Instant::now();
    let mode = job.mode();
    let (rows, tail) = rows_of(job.input, job.tables);
    let summary = match job.format {
        Format::Paper => write_grid(rows, tail, mode, sink)?.1,
        Format::Honest => write_honest(&rows, tail, mode, sink)?,
    };
    let occupant = match job.format {
        Format::Paper => summary.paper_accounted_size,
        Format::Honest => 0,
    };
    let report = MetricsReport::new(mode, job.input, occupant, summary.honest_payload_size, start.elapsed());
    Ok(CompressOutcome { summary, report })
}

/// Convenience wrapper returning the artifact bytes.
pub fn compress_to_vec(input: &[u8], format: Format, tables: &Tables) -> Result<(Vec<u8>, CompressOutcome), CodecError> {
    let mut out = Vec::new();
    let outcome = compress(CompressJob { input, format, tables }, &mut out)?;
    Ok((out, outcome))
}

pub fn decode_artifact(artifact: &Artifact, tables: &Tables) -> Result<Vec<u8>, CodecError> {
    if artifact.mode() != tables.mode() {
        return Err(CodecError::ModeMismatch { artifact: artifact.mode(), supplied: tables.mode() });
    }
    let rows = artifact.rows();
    let mut out = Vec::with_capacity(2 * rows.len() + 1);
    for (i, &row) in rows.iter().enumerate() {
        let pair = tables.for_pair(i).original(row).expect("verified table has every row");
        out.extend_from_slice(&pair);
    }
    out.extend(artifact.tail());
    Ok(out)
}

pub fn decompress(artifact: &[u8], tables: &Tables) -> Result<Vec<u8>, CodecError> {
    let parsed = parse_artifact_bytes(artifact)?;
    decode_artifact(&parsed, tables)
}
