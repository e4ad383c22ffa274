use crate::error::{Error, Result};
use crate::exact;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A payload of raw bits, written as a `"0101..."` string in JSON.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Appends `value` as a `width`-bit big-endian unsigned integer.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        debug_assert!(
            width == 64 || value < (1u64 << width),
            "{value} needs more than {width} bits"
        );
        for i in (0..width).rev() {
            self.0.push((value >> i) & 1 == 1);
        }
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(index).copied()
    }

    /// Reads a big-endian unsigned integer of `width` bits at `start`.
    pub fn read_uint(&self, start: usize, width: u32) -> Result<u64> {
        let end = start + width as usize;
        if end > self.0.len() {
            return Err(Error::Format(format!(
                "read of {width} bits at {start} overruns a {}-bit payload",
                self.0.len()
            )));
        }
        Ok(self.0[start..end]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("bad bit {other:?}"))),
            })
            .collect()
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bits needed to name one of `count` values (`ceil(log2 count)`).
pub fn bits_for(count: u64) -> u32 {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros()
    }
}

/// Protocol participants. Two-party protocols use `A` and `B`; the
/// three-party broadcast protocol uses `P1`, `P2`, `P3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    P1,
    P2,
    P3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub from: Party,
    pub bits: Bits,
}

/// What a protocol run declared as its answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Declared {
    None,
    Point {
        #[serde(with = "exact::vec")]
        coords: Vec<f64>,
    },
    Cell {
        base: Vec<u32>,
        perm: Vec<u8>,
    },
    Violation {
        vertex: u32,
        reason: String,
    },
}

/// Bit-exact record of a protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TranscriptRepr", into = "TranscriptRepr")]
pub struct Transcript {
    messages: Vec<Message>,
    total_bits: u64,
    rounds: u64,
    output: Declared,
}

#[derive(Clone, Serialize, Deserialize)]
struct TranscriptRepr {
    format: u32,
    messages: Vec<Message>,
    total_bits: u64,
    rounds: u64,
    output: Declared,
}

impl TryFrom<TranscriptRepr> for Transcript {
    type Error = Error;

    fn try_from(r: TranscriptRepr) -> Result<Self> {
        if r.format != crate::FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported transcript format {}",
                r.format
            )));
        }
        let t = Transcript::new(r.messages, r.output);
        if t.total_bits != r.total_bits || t.rounds != r.rounds {
            return Err(Error::Format(format!(
                "transcript header claims {} bits / {} rounds, messages replay to {} / {}",
                r.total_bits, r.rounds, t.total_bits, t.rounds
            )));
        }
        Ok(t)
    }
}

impl From<Transcript> for TranscriptRepr {
    fn from(t: Transcript) -> Self {
        TranscriptRepr {
            format: crate::FORMAT_VERSION,
            messages: t.messages,
            total_bits: t.total_bits,
            rounds: t.rounds,
            output: t.output,
        }
    }
}

impl Transcript {
    fn new(messages: Vec<Message>, output: Declared) -> Self {
        let total_bits = replay_bits(&messages);
        let rounds = count_rounds(&messages);
        Transcript {
            messages,
            total_bits,
            rounds,
            output,
        }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }

    /// Number of maximal runs of consecutive messages from one sender.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn output(&self) -> &Declared {
        &self.output
    }

    /// Recomputes the bit total from the message payloads.
    pub fn replay_total_bits(&self) -> u64 {
        replay_bits(&self.messages)
    }

    pub fn bits_from(&self, party: Party) -> u64 {
        self.messages
            .iter()
            .filter(|m| m.from == party)
            .map(|m| m.bits.len() as u64)
            .sum()
    }
}

fn replay_bits(messages: &[Message]) -> u64 {
    messages.iter().map(|m| m.bits.len() as u64).sum()
}

fn count_rounds(messages: &[Message]) -> u64 {
    let mut rounds = 0;
    let mut last = None;
    for m in messages {
        if last != Some(m.from) {
            rounds += 1;
            last = Some(m.from);
        }
    }
    rounds
}

/// The metered channel a protocol run talks through.
///
/// A public random seed can be attached for randomized experiments; the
/// protocols in this crate are deterministic and never read it.
#[derive(Debug, Default)]
pub struct Channel {
    messages: Vec<Message>,
    public_seed: Option<u64>,
}

impl Channel {
    pub fn new() -> Self {
        Channel::default()
    }

    pub fn with_public_seed(seed: u64) -> Self {
        Channel {
            messages: Vec::new(),
            public_seed: Some(seed),
        }
    }

    pub fn public_seed(&self) -> Option<u64> {
        self.public_seed
    }

    /// Sends `bits` from `from` and returns the payload as delivered.
    pub fn send(&mut self, from: Party, bits: Bits) -> &Bits {
        self.messages.push(Message { from, bits });
        &self.messages.last().expect("just pushed").bits
    }

    pub fn bits_so_far(&self) -> u64 {
        replay_bits(&self.messages)
    }

    pub fn finish(self, output: Declared) -> Transcript {
        Transcript::new(self.messages, output)
    }
}
