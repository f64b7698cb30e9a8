//! Fixed-width bitstrings used for oracle inputs/outputs and classical program data.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rng::SeededRng;

/// Longest bitstring representable by [`Bits`].
pub const MAX_BITS: u32 = 64;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("bitstring length {0} exceeds the {MAX_BITS}-bit limit")]
    TooLong(u32),
    #[error("value {value:#x} does not fit in {len} bits")]
    Overflow { value: u64, len: u32 },
    #[error("malformed bitstring literal {0:?}")]
    Malformed(String),
}

/// A bitstring of length `len <= 64`, stored in the low bits of `value`.
///
/// The most significant of the `len` bits is the first bit of the string, so
/// concatenation `a ‖ b` places `a` in the high bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    len: u32,
    value: u64,
}

fn mask(len: u32) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Bits {
    pub fn new(value: u64, len: u32) -> Result<Self, BitsError> {
        if len > MAX_BITS {
            return Err(BitsError::TooLong(len));
        }
        if value & !mask(len) != 0 {
            return Err(BitsError::Overflow { value, len });
        }
        Ok(Self { len, value })
    }

    /// Like [`Bits::new`] but truncates `value` to `len` bits.
    pub fn truncated(value: u64, len: u32) -> Self {
        assert!(len <= MAX_BITS, "bitstring length {len} too long");
        Self {
            len,
            value: value & mask(len),
        }
    }

    pub fn zeros(len: u32) -> Self {
        Self::truncated(0, len)
    }

    pub fn empty() -> Self {
        Self { len: 0, value: 0 }
    }

    pub fn random(len: u32, rng: &mut SeededRng) -> Self {
        Self::truncated(rng.random::<u64>(), len)
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit `i` counted from the start of the string (the most significant bit).
    pub fn bit(&self, i: u32) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.value >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn with_bit(&self, i: u32, b: bool) -> Self {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let m = 1u64 << (self.len - 1 - i);
        let value = if b { self.value | m } else { self.value & !m };
        Self { len: self.len, value }
    }

    pub fn concat(&self, other: &Bits) -> Result<Self, BitsError> {
        let len = self.len + other.len;
        if len > MAX_BITS {
            return Err(BitsError::TooLong(len));
        }
        let hi = if other.len == 64 { 0 } else { self.value << other.len };
        Ok(Self {
            len,
            value: hi | other.value,
        })
    }

    /// Bitwise XOR. Panics on length mismatch.
    pub fn xor(&self, other: &Bits) -> Self {
        assert_eq!(self.len, other.len, "xor of bitstrings with different lengths");
        Self {
            len: self.len,
            value: self.value ^ other.value,
        }
    }

    /// Substring of `len` bits starting at bit `start`.
    pub fn slice(&self, start: u32, len: u32) -> Self {
        assert!(start + len <= self.len, "slice out of range");
        let shift = self.len - start - len;
        Self::truncated(self.value >> shift, len)
    }

    /// Lowercase hex with exactly `ceil(len/4)` digits (empty for `len == 0`).
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4) as usize;
        if digits == 0 {
            return String::new();
        }
        format!("{:0width$x}", self.value, width = digits)
    }

    pub fn from_hex(hex: &str, len: u32) -> Result<Self, BitsError> {
        if hex.len() != len.div_ceil(4) as usize {
            return Err(BitsError::Malformed(hex.to_string()));
        }
        let value = if hex.is_empty() {
            0
        } else {
            u64::from_str_radix(hex, 16).map_err(|_| BitsError::Malformed(hex.to_string()))?
        };
        Self::new(value, len)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.to_hex(), self.len)
    }
}

impl FromStr for Bits {
    type Err = BitsError;

    /// Parses the `hex/len` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (hex, len) = s
            .split_once('/')
            .ok_or_else(|| BitsError::Malformed(s.to_string()))?;
        let len: u32 = len.parse().map_err(|_| BitsError::Malformed(s.to_string()))?;
        Self::from_hex(hex, len)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
