//! Offline ternary weight encoding.
//!
//! A group of `mu` trits maps to a sign-magnitude key: the magnitude is the
//! absolute base-3 positional value of the group (which doubles as the LUT
//! address), the sign bit is the symmetry flag the fetch unit uses to negate
//! the stored entry. The all-zero group is the reserved code (sign=0, mag=0);
//! (sign=1, mag=0) is invalid.
//!
//! Key width is `ceil(log2(table_size + 1)) + 1` bits: one code per stored
//! positive-half entry, one for the zero group, plus the sign bit. At `mu = 5`
//! this is 8 bits for 5 weights, 1.6 bits per weight.
//!
//! The stream format (`TLUT`, version 1) is byte-exact:
//!
//! ```text
//! magic   4 bytes  "TLUT"
//! version u8       1
//! mu      u8
//! rows    u32 LE
//! cols    u32 LE
//! payload keys row-major, groups along the row (input) dimension,
//!         each key packed LSB-first into little-endian bytes,
//!         final byte zero-padded
//! ```
//!
//! Rows whose length is not a multiple of `mu` have their final group
//! zero-padded; the padding trits are dropped on decode using the header's
//! `cols` field.

use crate::error::{Error, Result};
use crate::tile::{table_size, MU_MAX};
use crate::trit::{TernaryMatrix, Trit};

pub const STREAM_MAGIC: [u8; 4] = *b"TLUT";
pub const STREAM_VERSION: u8 = 1;

/// Sign-magnitude key for one group of `mu` trits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GroupKey {
    sign: bool,
    magnitude: u16,
    mu: u8,
}

impl GroupKey {
    /// Builds a key, enforcing magnitude range and the canonical zero code.
    pub fn new(sign: bool, magnitude: u16, mu: usize) -> Result<GroupKey> {
        check_mu(mu)?;
        if magnitude as usize > table_size(mu) {
            return Err(Error::corrupt(format!(
                "key magnitude {magnitude} exceeds table size {} for mu={mu}",
                table_size(mu)
            )));
        }
        if sign && magnitude == 0 {
            return Err(Error::corrupt("key (sign=1, magnitude=0) violates the canonical zero code".to_string()));
        }
        Ok(GroupKey { sign, magnitude, mu: mu as u8 })
    }

    #[inline]
    pub fn sign(&self) -> bool {
        self.sign
    }

    #[inline]
    pub fn magnitude(&self) -> u16 {
        self.magnitude
    }

    #[inline]
    pub fn mu(&self) -> usize {
        self.mu as usize
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.magnitude == 0
    }

    /// Key for the negated group: sign flip for nonzero, identity for zero.
    pub fn negated(&self) -> GroupKey {
        if self.is_zero() {
            *self
        } else {
            GroupKey { sign: !self.sign, ..*self }
        }
    }

    /// Packed integer form: sign in the most significant bit, magnitude below.
    #[inline]
    pub fn to_bits(&self) -> u32 {
        ((self.sign as u32) << (key_width(self.mu as usize) - 1)) | self.magnitude as u32
    }

    /// Parses the packed integer form, validating magnitude and zero-code rules.
    pub fn from_bits(bits: u32, mu: usize) -> Result<GroupKey> {
        check_mu(mu)?;
        let w = key_width(mu);
        let sign = (bits >> (w - 1)) & 1 == 1;
        let magnitude = (bits & ((1 << (w - 1)) - 1)) as u16;
        GroupKey::new(sign, magnitude, mu)
    }
}

fn check_mu(mu: usize) -> Result<()> {
    if mu < 1 || mu > MU_MAX {
        return Err(Error::invalid(format!("mu must be in [1, {MU_MAX}], got {mu}")));
    }
    Ok(())
}

fn check_group_len(g: &[Trit], mu: usize) -> Result<()> {
    check_mu(mu)?;
    if g.len() != mu {
        return Err(Error::invalid(format!("group length {} does not match mu={mu}", g.len())));
    }
    Ok(())
}

/// Base-3 positional value of a group: `sum_i g[i] * 3^(mu-1-i)`.
///
/// The first trit is the most significant digit, so the value's sign equals
/// the sign of the leading nonzero trit, and the range is
/// `[-(3^mu - 1)/2, +(3^mu - 1)/2]`.
pub fn group_value(g: &[Trit], mu: usize) -> Result<i32> {
    check_group_len(g, mu)?;
    let mut v: i32 = 0;
    for t in g {
        v = v * 3 + t.value() as i32;
    }
    Ok(v)
}

/// Encodes one group: sign = (value < 0), magnitude = |value|.
pub fn encode_group(g: &[Trit], mu: usize) -> Result<GroupKey> {
    let v = group_value(g, mu)?;
    GroupKey::new(v < 0, v.unsigned_abs() as u16, mu)
}

/// Decodes a key back to its `mu` trits (exact inverse of [`encode_group`]).
pub fn decode_group(key: &GroupKey) -> Result<Vec<Trit>> {
    let mu = key.mu();
    // GroupKey construction already validated range and the zero-code rule;
    // re-derive the digits from the signed value.
    let v = if key.sign { -(key.magnitude as i32) } else { key.magnitude as i32 };
    Ok(signed_value_to_group(v, mu))
}

/// Balanced-ternary digits (most significant first) of a value known to lie
/// in `[-(3^mu - 1)/2, +(3^mu - 1)/2]`.
pub(crate) fn signed_value_to_group(v: i32, mu: usize) -> Vec<Trit> {
    debug_assert!(v.unsigned_abs() as usize <= table_size(mu));
    let mut digits = vec![Trit::Zero; mu];
    let mut x = v;
    for i in (0..mu).rev() {
        let d = match x.rem_euclid(3) {
            0 => Trit::Zero,
            1 => Trit::Pos,
            _ => Trit::Neg,
        };
        digits[i] = d;
        x = (x - d.value() as i32) / 3;
    }
    debug_assert_eq!(x, 0);
    digits
}

/// Total key width in bits: `ceil(log2(table_size + 1))` magnitude bits plus
/// the sign bit. The extra `+ 1` inside the log reserves a code for the
/// all-zero group.
pub fn key_width(mu: usize) -> usize {
    debug_assert!((1..=MU_MAX).contains(&mu));
    let codes = table_size(mu) + 1; // magnitudes 0..=table_size
    (usize::BITS - (codes - 1).leading_zeros()) as usize + 1
}

/// Encoded density in payload bits per weight, ignoring edge padding.
pub fn bits_per_weight(mu: usize) -> f64 {
    key_width(mu) as f64 / mu as f64
}

/// Header of an encoded weight stream.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct StreamHeader {
    pub mu: u8,
    pub rows: u32,
    pub cols: u32,
}

pub const HEADER_LEN: usize = 14;

/// A bit-packed encoded weight matrix: header plus key payload.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EncodedWeightStream {
    pub header: StreamHeader,
    pub payload: Vec<u8>,
}

impl EncodedWeightStream {
    /// Number of key groups per row: `ceil(cols / mu)`.
    pub fn groups_per_row(&self) -> usize {
        (self.header.cols as usize).div_ceil(self.header.mu as usize)
    }

    /// Exact payload length in bits: `rows * groups_per_row * key_width`.
    pub fn payload_bits(&self) -> usize {
        self.header.rows as usize * self.groups_per_row() * key_width(self.header.mu as usize)
    }

    /// Achieved density in payload bits per weight (includes edge padding).
    pub fn density(&self) -> f64 {
        self.payload_bits() as f64 / (self.header.rows as f64 * self.header.cols as f64)
    }

    /// Serializes header and payload to the byte-exact file format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&STREAM_MAGIC);
        out.push(STREAM_VERSION);
        out.push(self.header.mu);
        out.extend_from_slice(&self.header.rows.to_le_bytes());
        out.extend_from_slice(&self.header.cols.to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses and validates the byte-exact file format. The payload must be
    /// exactly the expected length and the final byte's padding bits zero.
    pub fn from_bytes(bytes: &[u8]) -> Result<EncodedWeightStream> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::corrupt(format!("stream truncated: {} bytes < {HEADER_LEN}-byte header", bytes.len())));
        }
        if bytes[0..4] != STREAM_MAGIC {
            return Err(Error::corrupt(format!("bad magic {:02x?}", &bytes[0..4])));
        }
        if bytes[4] != STREAM_VERSION {
            return Err(Error::corrupt(format!("unsupported version {}", bytes[4])));
        }
        let mu = bytes[5];
        check_mu(mu as usize).map_err(|_| Error::corrupt(format!("header mu {mu} out of range")))?;
        let rows = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
        let cols = u32::from_le_bytes(bytes[10..14].try_into().unwrap());
        if rows == 0 || cols == 0 {
            return Err(Error::corrupt(format!("header dimensions {rows}x{cols} must be positive")));
        }
        let header = StreamHeader { mu, rows, cols };
        let stream = EncodedWeightStream { header, payload: bytes[HEADER_LEN..].to_vec() };

        let bits = stream.payload_bits();
        let expect_bytes = bits.div_ceil(8);
        if stream.payload.len() != expect_bytes {
            return Err(Error::corrupt(format!(
                "payload length {} bytes, expected {expect_bytes} for {rows}x{cols} mu={mu}",
                stream.payload.len()
            )));
        }
        // Padding bits in the final byte must be zero.
        let pad = expect_bytes * 8 - bits;
        if pad > 0 {
            let last = stream.payload[expect_bytes - 1];
            if last >> (8 - pad) != 0 {
                return Err(Error::corrupt("nonzero padding bits in final payload byte".to_string()));
            }
        }
        Ok(stream)
    }
}

/// LSB-first bit accumulator over little-endian bytes.
struct BitWriter {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl BitWriter {
    fn new() -> BitWriter {
        BitWriter { bytes: Vec::new(), bit_len: 0 }
    }

    fn push(&mut self, value: u32, width: usize) {
        debug_assert!(width <= 32);
        for j in 0..width {
            let bit = (value >> j) & 1;
            let pos = self.bit_len + j;
            if pos / 8 == self.bytes.len() {
                self.bytes.push(0);
            }
            self.bytes[pos / 8] |= (bit as u8) << (pos % 8);
        }
        self.bit_len += width;
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> BitReader<'a> {
        BitReader { bytes, pos: 0 }
    }

    fn read(&mut self, width: usize) -> Result<u32> {
        if self.pos + width > self.bytes.len() * 8 {
            return Err(Error::corrupt("payload truncated mid-key".to_string()));
        }
        let mut v = 0u32;
        for j in 0..width {
            let pos = self.pos + j;
            let bit = (self.bytes[pos / 8] >> (pos % 8)) & 1;
            v |= (bit as u32) << j;
        }
        self.pos += width;
        Ok(v)
    }
}

/// Encodes a matrix into the bit-packed stream, grouping each row's columns
/// into runs of `mu` (final group zero-padded).
pub fn encode_matrix(w: &TernaryMatrix, mu: usize) -> Result<EncodedWeightStream> {
    check_mu(mu)?;
    if w.rows() > u32::MAX as usize || w.cols() > u32::MAX as usize {
        return Err(Error::invalid("matrix dimensions exceed the stream header's u32 fields".to_string()));
    }
    let width = key_width(mu);
    let mut writer = BitWriter::new();
    let mut group = vec![Trit::Zero; mu];
    for r in 0..w.rows() {
        let row = w.row(r);
        for chunk in row.chunks(mu) {
            group.fill(Trit::Zero);
            group[..chunk.len()].copy_from_slice(chunk);
            let key = encode_group(&group, mu)?;
            writer.push(key.to_bits(), width);
        }
    }
    Ok(EncodedWeightStream {
        header: StreamHeader { mu: mu as u8, rows: w.rows() as u32, cols: w.cols() as u32 },
        payload: writer.bytes,
    })
}

/// Decodes a stream back to the exact original matrix.
pub fn decode_matrix(stream: &EncodedWeightStream) -> Result<TernaryMatrix> {
    let mu = stream.header.mu as usize;
    let rows = stream.header.rows as usize;
    let cols = stream.header.cols as usize;
    let width = key_width(mu);
    let groups = stream.groups_per_row();

    let mut reader = BitReader::new(&stream.payload);
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let mut row = Vec::with_capacity(groups * mu);
        for _ in 0..groups {
            let bits = reader.read(width)?;
            let key = GroupKey::from_bits(bits, mu)?;
            row.extend(decode_group(&key)?);
        }
        // Padding trits beyond `cols` must be zero (they were written as zero).
        for (i, t) in row.iter().enumerate().skip(cols) {
            if !t.is_zero() {
                return Err(Error::corrupt(format!("nonzero padding trit at row position {i}")));
            }
        }
        row.truncate(cols);
        data.extend(row);
    }
    TernaryMatrix::new(rows, cols, data)
}
