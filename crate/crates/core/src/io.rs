//! File formats for time tags, histograms, curves and tuning tables.
//!
//! Binary time-tag layout: `TTAG`, version byte, channel byte, then
//! little-endian `u64` picosecond timestamps. Text formats are CSV with
//! optional `#` comment lines.

use std::io::Write;

use crate::correlation::{G2Curve, Histogram};
use crate::error::{Error, Result};
use crate::extraction::{Measured, TuningRecord};
use crate::fitting::CurveData;
use crate::sim::{first_unsorted_index, TimeTagStream, PS_PER_NS};

pub const TTAG_MAGIC: &[u8; 4] = b"TTAG";
pub const TTAG_VERSION: u8 = 0x01;
pub const TTAG_HEADER_LEN: usize = 6;

pub const TAGS_CSV_HEADER: &str = "channel,timestamp_ps";
pub const HISTOGRAM_CSV_HEADER: &str = "delay_ps,counts";
pub const G2_CSV_HEADER: &str = "delay_ns,g2";
pub const TUNING_CSV_HEADER: &str = "label,lambda_cav,sig,lambda_zpl,sig,q,sig,flux,sig";

pub fn write_ttag<W: Write>(mut w: W, stream: &TimeTagStream) -> Result<()> {
    let mut buf = Vec::with_capacity(TTAG_HEADER_LEN + 8 * stream.len());
    buf.extend_from_slice(TTAG_MAGIC);
    buf.push(TTAG_VERSION);
    buf.push(stream.channel);
    for t in stream.tags() {
        buf.extend_from_slice(&t.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn parse_ttag(bytes: &[u8]) -> Result<TimeTagStream> {
    if bytes.len() < TTAG_HEADER_LEN || &bytes[..4] != TTAG_MAGIC {
        return Err(Error::Data("missing TTAG magic bytes at offset 0".into()));
    }
    if bytes[4] != TTAG_VERSION {
        return Err(Error::Data(format!("unsupported TTAG version {} at offset 4", bytes[4])));
    }
    let channel = bytes[5];
    let body = &bytes[TTAG_HEADER_LEN..];
    if !body.len().is_multiple_of(8) {
        let offset = TTAG_HEADER_LEN + body.len() / 8 * 8;
        return Err(Error::Data(format!("truncated timestamp at byte offset {offset}")));
    }
    let tags: Vec<u64> =
        body.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8 bytes"))).collect();
    if let Some(i) = first_unsorted_index(&tags) {
        return Err(Error::Data(format!(
            "unsorted timestamp {} at byte offset {} (previous {})",
            tags[i],
            TTAG_HEADER_LEN + 8 * i,
            tags[i - 1]
        )));
    }
    TimeTagStream::new(channel, tags)
}

/// Writes `# ` comment lines.
pub fn write_comments<W: Write>(w: &mut W, header: &[String]) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// Writes several channels into one CSV, channel by channel.
pub fn write_tags_csv<W: Write>(mut w: W, streams: &[&TimeTagStream], header: &[String]) -> Result<()> {
    let mut out = std::io::BufWriter::new(&mut w);
    write_comments(&mut out, header)?;
    writeln!(out, "{TAGS_CSV_HEADER}")?;
    for s in streams {
        for t in s.tags() {
            writeln!(out, "{},{t}", s.channel)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Lines of a text file with their starting byte offsets, skipping blank
/// and `#` lines.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    text.split_inclusive('\n').filter_map(move |raw| {
        let start = offset;
        offset += raw.len();
        let line = raw.trim();
        (!line.is_empty() && !line.starts_with('#')).then_some((start, line))
    })
}

/// Parses `channel,timestamp_ps` rows. Channels are returned in order of
/// first appearance; each must be strictly increasing.
pub fn parse_tags_csv(text: &str) -> Result<Vec<TimeTagStream>> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, h)) if h.replace(' ', "") == TAGS_CSV_HEADER => {}
        Some((off, h)) => {
            return Err(Error::Data(format!("expected header '{TAGS_CSV_HEADER}' at byte offset {off}, found '{h}'")))
        }
        None => return Err(Error::Data("empty time-tag CSV".into())),
    }
    let mut channels: Vec<(u8, Vec<u64>)> = Vec::new();
    for (off, line) in lines {
        let bad = || Error::Data(format!("malformed row '{line}' at byte offset {off}"));
        let (c, t) = line.split_once(',').ok_or_else(bad)?;
        let channel: u8 = c.trim().parse().map_err(|_| bad())?;
        let tag: u64 = t.trim().parse().map_err(|_| bad())?;
        let idx = match channels.iter().position(|(c, _)| *c == channel) {
            Some(i) => i,
            None => {
                channels.push((channel, Vec::new()));
                channels.len() - 1
            }
        };
        let tags = &mut channels[idx].1;
        if let Some(&prev) = tags.last() {
            if tag <= prev {
                return Err(Error::Data(format!(
                    "unsorted timestamp {tag} on channel {channel} at byte offset {off} (previous {prev})"
                )));
            }
        }
        tags.push(tag);
    }
    channels.into_iter().map(|(c, t)| TimeTagStream::new(c, t)).collect()
}

/// Reads a binary or CSV time-tag file, deciding by the magic bytes.
pub fn read_tag_file(path: &std::path::Path) -> Result<Vec<TimeTagStream>> {
    let bytes = std::fs::read(path)?;
    let tagged = |e: Error| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    };
    if bytes.starts_with(TTAG_MAGIC) {
        parse_ttag(&bytes).map(|s| vec![s]).map_err(tagged)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| Error::Data(format!("{}: not UTF-8 at byte offset {}", path.display(), e.valid_up_to())))?;
        parse_tags_csv(text).map_err(tagged)
    }
}

/// `delay_ps,counts` at bin centres.
pub fn write_histogram_csv<W: Write>(mut w: W, h: &Histogram, header: &[String]) -> Result<()> {
    let mut out = std::io::BufWriter::new(&mut w);
    write_comments(&mut out, header)?;
    writeln!(out, "{HISTOGRAM_CSV_HEADER}")?;
    for (i, c) in h.counts.iter().enumerate() {
        writeln!(out, "{},{c}", h.bin_center_ps(i))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_g2_csv<W: Write>(mut w: W, curve: &G2Curve, header: &[String]) -> Result<()> {
    let mut out = std::io::BufWriter::new(&mut w);
    write_comments(&mut out, header)?;
    writeln!(out, "{G2_CSV_HEADER}")?;
    for (t, g) in curve.delays_ns.iter().zip(&curve.values) {
        writeln!(out, "{t},{g}")?;
    }
    out.flush()?;
    Ok(())
}

/// Numeric CSV with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }
}

pub fn parse_numeric_csv(text: &str) -> Result<Table> {
    let mut lines = data_lines(text);
    let (_, header) = lines.next().ok_or_else(|| Error::Data("empty CSV".into()))?;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (off, line) in lines {
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Data(format!("non-numeric row '{line}' at byte offset {off}")))?;
        if row.len() != columns.len() {
            return Err(Error::Data(format!(
                "row at byte offset {off} has {} fields, header has {}",
                row.len(),
                columns.len()
            )));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

/// Curve from the first two columns, plus an optional third column of
/// uncertainties. An x column named `*_ps` is converted to ns.
pub fn curve_from_table(table: &Table) -> Result<CurveData> {
    if !(2..=3).contains(&table.columns.len()) {
        return Err(Error::Data(format!(
            "curve CSV needs 2 or 3 columns (x,y[,sigma]), found {}",
            table.columns.len()
        )));
    }
    let mut x = table.column(0);
    if table.columns[0].ends_with("_ps") {
        x.iter_mut().for_each(|v| *v /= PS_PER_NS);
    }
    let sigma = (table.columns.len() == 3).then(|| table.column(2));
    CurveData::new(x, table.column(1), sigma)
}

pub fn parse_tuning_csv(text: &str) -> Result<Vec<TuningRecord>> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, h)) if h.replace(' ', "") == TUNING_CSV_HEADER => {}
        Some((off, h)) => {
            return Err(Error::Data(format!("expected header '{TUNING_CSV_HEADER}' at byte offset {off}, found '{h}'")))
        }
        None => return Err(Error::Data("empty tuning CSV".into())),
    }
    let mut records = Vec::new();
    for (off, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 9 {
            return Err(Error::Data(format!("row at byte offset {off} has {} fields, expected 9", fields.len())));
        }
        let num = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::Data(format!("non-numeric field '{}' at byte offset {off}", fields[i])))
        };
        let m = |i: usize| -> Result<Measured> { Ok(Measured::new(num(i)?, num(i + 1)?)) };
        let record = TuningRecord {
            label: fields[0].to_string(),
            lambda_cav: m(1)?,
            lambda_zpl: m(3)?,
            q_factor: m(5)?,
            pl_flux: m(7)?,
        };
        record.validate().map_err(|e| Error::Data(format!("row at byte offset {off}: {e}")))?;
        records.push(record);
    }
    Ok(records)
}
