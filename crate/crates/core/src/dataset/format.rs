//! The `.omd` container.
//!
//! ```text
//! offset  size  content
//! 0       4     magic "OMD1"
//! 4       4     header length H, u32 little-endian
//! 8       H     header, UTF-8 JSON (see DatasetHeader)
//! 8+H     278   record 0
//! ...           `count` records in total, nothing after the last one
//! ```
//!
//! A record is 69 little-endian `f32` values followed by two bytes:
//! obs[33], action[2], reward, next_obs[33], terminal (0/1), timeout (0/1).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sensing::OBS_DIM;

pub const MAGIC: [u8; 4] = *b"OMD1";
pub const FORMAT_VERSION: u32 = 1;
pub const ACT_DIM: usize = 2;
pub const RECORD_BYTES: usize = 4 * (2 * OBS_DIM + ACT_DIM + 1) + 2;

/// Headers larger than this are rejected as corrupt.
const MAX_HEADER_BYTES: u32 = 16 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub obs: [f32; OBS_DIM],
    pub action: [f32; ACT_DIM],
    pub reward: f32,
    pub next_obs: [f32; OBS_DIM],
    pub terminal: bool,
    pub timeout: bool,
}

impl Transition {
    pub fn is_finite(&self) -> bool {
        self.obs.iter().chain(&self.action).chain(&self.next_obs).all(|v| v.is_finite()) && self.reward.is_finite()
    }

    pub fn encode(&self, out: &mut [u8; RECORD_BYTES]) {
        let floats = self.obs.iter().chain(&self.action).chain(std::iter::once(&self.reward)).chain(&self.next_obs);
        for (chunk, v) in out.chunks_exact_mut(4).zip(floats) {
            chunk.copy_from_slice(&v.to_le_bytes());
        }
        out[RECORD_BYTES - 2] = self.terminal as u8;
        out[RECORD_BYTES - 1] = self.timeout as u8;
    }

    pub fn decode(buf: &[u8; RECORD_BYTES]) -> Result<Self> {
        let f = |i: usize| f32::from_le_bytes(buf[4 * i..4 * i + 4].try_into().unwrap());
        let flag = |b: u8| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::Format(format!("flag byte must be 0 or 1, got {other}"))),
        };
        Ok(Self {
            obs: std::array::from_fn(f),
            action: std::array::from_fn(|i| f(OBS_DIM + i)),
            reward: f(OBS_DIM + ACT_DIM),
            next_obs: std::array::from_fn(|i| f(OBS_DIM + ACT_DIM + 1 + i)),
            terminal: flag(buf[RECORD_BYTES - 2])?,
            timeout: flag(buf[RECORD_BYTES - 1])?,
        })
    }
}

/// Where a block of transitions came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub policy: String,
    pub count: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixInfo {
    pub seed: u64,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetHeader {
    pub format_version: u32,
    pub obs_dim: usize,
    pub act_dim: usize,
    pub count: u64,
    pub env_version: String,
    pub provenance: Vec<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<MixInfo>,
    /// Unix seconds.
    pub created_at: u64,
}

impl DatasetHeader {
    pub fn new(env_version: &str, count: u64, provenance: Vec<Provenance>) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            obs_dim: OBS_DIM,
            act_dim: ACT_DIM,
            count,
            env_version: env_version.to_string(),
            provenance,
            mix: None,
            created_at: now_unix(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.obs_dim != OBS_DIM || self.act_dim != ACT_DIM {
            return Err(Error::Dimension(format!(
                "header declares obs_dim={} act_dim={}, expected {OBS_DIM} and {ACT_DIM}",
                self.obs_dim, self.act_dim
            )));
        }
        Ok(())
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// A dataset held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub records: Vec<Transition>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        if self.header.count != self.records.len() as u64 {
            return Err(Error::Format(format!(
                "header count {} does not match {} records",
                self.header.count,
                self.records.len()
            )));
        }
        let mut w = DatasetWriter::new(w, &self.header)?;
        for r in &self.records {
            w.write(r)?;
        }
        w.finish()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(File::create(path)?)
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let reader = DatasetReader::new(r)?;
        let header = reader.header().clone();
        let records = reader.collect::<Result<Vec<_>>>()?;
        Ok(Self { header, records })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let reader = DatasetReader::open(path)?;
        let header = reader.header().clone();
        let records = reader.collect::<Result<Vec<_>>>()?;
        Ok(Self { header, records })
    }
}

/// Streaming writer. The record count is fixed by the header up front.
pub struct DatasetWriter<W: Write> {
    out: BufWriter<W>,
    expected: u64,
    written: u64,
    buf: [u8; RECORD_BYTES],
}

impl<W: Write> DatasetWriter<W> {
    pub fn new(w: W, header: &DatasetHeader) -> Result<Self> {
        header.check()?;
        let mut out = BufWriter::new(w);
        let blob = serde_json::to_vec(header)?;
        out.write_all(&MAGIC)?;
        out.write_all(&(blob.len() as u32).to_le_bytes())?;
        out.write_all(&blob)?;
        Ok(Self {
            out,
            expected: header.count,
            written: 0,
            buf: [0; RECORD_BYTES],
        })
    }

    pub fn write(&mut self, t: &Transition) -> Result<()> {
        if self.written == self.expected {
            return Err(Error::Format(format!("more than the declared {} records", self.expected)));
        }
        if !t.is_finite() {
            return Err(Error::Format(format!("record {} holds a non-finite value", self.written)));
        }
        t.encode(&mut self.buf);
        self.out.write_all(&self.buf)?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        if self.written != self.expected {
            return Err(Error::Truncation(format!(
                "wrote {} of the declared {} records",
                self.written, self.expected
            )));
        }
        self.out.flush()?;
        self.out.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

/// Streaming reader: validates the header on open, then yields records one
/// at a time. A short or overlong record section surfaces as
/// [`Error::Truncation`].
pub struct DatasetReader<R: Read> {
    input: R,
    header: DatasetHeader,
    header_len: u32,
    remaining: u64,
    index: u64,
    buf: [u8; RECORD_BYTES],
    failed: bool,
}

impl DatasetReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let size = file.metadata()?.len();
        let reader = DatasetReader::new(BufReader::new(file))?;
        let expected = reader.data_offset() + reader.header.count * RECORD_BYTES as u64;
        if size != expected {
            return Err(Error::Truncation(format!(
                "header declares {} records ({expected} bytes in total) but the file has {size} bytes",
                reader.header.count
            )));
        }
        Ok(reader)
    }
}

impl<R: Read> DatasetReader<R> {
    pub fn new(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact_or(&mut input, &mut magic, || Error::Format("file too short for magic".into()))?;
        if magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}, expected \"OMD1\"")));
        }
        let mut len = [0u8; 4];
        read_exact_or(&mut input, &mut len, || Error::Format("file too short for header length".into()))?;
        let len = u32::from_le_bytes(len);
        if len > MAX_HEADER_BYTES {
            return Err(Error::Format(format!("header length {len} is implausible")));
        }
        let mut blob = vec![0u8; len as usize];
        read_exact_or(&mut input, &mut blob, || Error::Format("header cut short".into()))?;
        let header: DatasetHeader =
            serde_json::from_slice(&blob).map_err(|e| Error::Format(format!("unreadable header: {e}")))?;
        header.check()?;
        Ok(Self {
            input,
            remaining: header.count,
            header,
            header_len: len,
            index: 0,
            buf: [0; RECORD_BYTES],
            failed: false,
        })
    }

    pub fn header(&self) -> &DatasetHeader {
        &self.header
    }

    fn data_offset(&self) -> u64 {
        8 + self.header_len as u64
    }

    fn next_record(&mut self) -> Result<Option<Transition>> {
        if self.remaining == 0 {
            // Anything after the last declared record means the count is wrong.
            let mut probe = [0u8; 1];
            return match self.input.read(&mut probe)? {
                0 => Ok(None),
                _ => Err(Error::Truncation(format!(
                    "data continues past the declared {} records",
                    self.header.count
                ))),
            };
        }
        let index = self.index;
        let count = self.header.count;
        read_exact_or(&mut self.input, &mut self.buf, || {
            Error::Truncation(format!("record {index} of {count} is incomplete"))
        })?;
        self.remaining -= 1;
        self.index += 1;
        Transition::decode(&self.buf).map(Some)
    }
}

impl<R: Read> Iterator for DatasetReader<R> {
    type Item = Result<Transition>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.next_record() {
            Ok(Some(t)) => Some(Ok(t)),
            Ok(None) => None,
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], err: impl FnOnce() -> Error) -> Result<()> {
    match r.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(err()),
        Err(e) => Err(e.into()),
    }
}

/// Whether two encoded datasets are identical once `created_at` is ignored.
pub fn same_modulo_timestamp(a: &[u8], b: &[u8]) -> Result<bool> {
    fn split(bytes: &[u8]) -> Result<(DatasetHeader, &[u8])> {
        let reader = DatasetReader::new(bytes)?;
        let len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let mut h = reader.header().clone();
        h.created_at = 0;
        Ok((h, &bytes[8 + len..]))
    }
    let (ha, ra) = split(a)?;
    let (hb, rb) = split(b)?;
    Ok(ha == hb && ra == rb)
}
