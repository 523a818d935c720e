//! Adaptive m-ary arithmetic coding over exact integer frequencies.
//!
//! This is the classic low/high coder with deferred ("pending") bits. State is
//! 62 bits wide and interval products are taken in 128-bit arithmetic, so the
//! model total may grow to 2^60 before precision runs out. After every
//! renormalization the interval spans more than a quarter of the full range.
//!
//! Streams are MSB-first within bytes; the final partial byte is zero padded.
//! The decoder must be told the number of symbols.

use crate::error::{Error, Result};
use crate::probmodel::{AdaptiveModel, Estimator, SymbolRange};

const PRECISION: u32 = 62;
const TOP: u64 = (1 << PRECISION) - 1;
const HALF: u64 = 1 << (PRECISION - 1);
const QUARTER: u64 = 1 << (PRECISION - 2);
const THREE_QUARTERS: u64 = HALF + QUARTER;

/// Largest model total the coder accepts.
pub const MAX_TOTAL_FREQUENCY: u64 = QUARTER;

/// Bit budget allowed above `⌈−log₂ q(x^N)⌉ + 1` for flush and rounding.
pub const LENGTH_SLACK_BITS: u64 = 32;

#[derive(Default)]
struct BitWriter {
    bytes: Vec<u8>,
    current: u8,
    used: u8,
    len: u64,
}

impl BitWriter {
    #[inline]
    fn push(&mut self, bit: bool) {
        self.current = (self.current << 1) | bit as u8;
        self.used += 1;
        self.len += 1;
        if self.used == 8 {
            self.bytes.push(self.current);
            self.current = 0;
            self.used = 0;
        }
    }

    fn finish(mut self) -> EncodedStream {
        if self.used > 0 {
            self.bytes.push(self.current << (8 - self.used));
        }
        EncodedStream {
            bytes: self.bytes,
            bit_len: self.len,
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl BitReader<'_> {
    /// Reads past the end as zeros.
    #[inline]
    fn next(&mut self) -> u64 {
        let byte = (self.pos >> 3) as usize;
        let bit = match self.bytes.get(byte) {
            Some(b) => (b >> (7 - (self.pos & 7))) & 1,
            None => 0,
        };
        self.pos += 1;
        bit as u64
    }
}

/// Output of the encoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedStream {
    pub bytes: Vec<u8>,
    /// Significant bits before byte padding.
    pub bit_len: u64,
}

pub struct ArithmeticEncoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl Default for ArithmeticEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArithmeticEncoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            high: TOP,
            pending: 0,
            out: BitWriter::default(),
        }
    }

    #[inline]
    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    /// Narrows the interval to `range`. `range.total` must not exceed
    /// [`MAX_TOTAL_FREQUENCY`].
    #[inline]
    pub fn encode(&mut self, range: SymbolRange) {
        debug_assert!(range.freq > 0 && range.low + range.freq <= range.total);
        debug_assert!(range.total <= MAX_TOTAL_FREQUENCY);
        let width = (self.high - self.low + 1) as u128;
        let total = range.total as u128;
        let hi = (width * (range.low + range.freq) as u128 / total) as u64;
        let lo = (width * range.low as u128 / total) as u64;
        self.high = self.low + hi - 1;
        self.low += lo;

        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    /// Codes `symbol` under `model` and updates the model.
    #[inline]
    pub fn encode_symbol(&mut self, model: &mut AdaptiveModel, symbol: usize) -> Result<()> {
        if symbol >= model.alphabet_size() {
            return Err(Error::SymbolOutOfRange {
                symbol: symbol as u64,
                m: model.alphabet_size() as u64,
            });
        }
        if model.total_frequency() > MAX_TOTAL_FREQUENCY {
            return Err(Error::TooLarge("model total exceeds coder precision".into()));
        }
        self.encode(model.range_of(symbol));
        model.update(symbol);
        Ok(())
    }

    /// Flushes two disambiguating bits plus anything pending.
    pub fn finish(mut self) -> EncodedStream {
        self.pending += 1;
        let bit = self.low >= QUARTER;
        self.emit(bit);
        self.out.finish()
    }
}

pub struct ArithmeticDecoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    input: BitReader<'a>,
    shifts: u64,
}

impl<'a> ArithmeticDecoder<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        let mut input = BitReader { bytes, pos: 0 };
        let mut value = 0;
        for _ in 0..PRECISION {
            value = (value << 1) | input.next();
        }
        Self {
            low: 0,
            high: TOP,
            value,
            input,
            shifts: 0,
        }
    }

    /// Decodes one symbol under `model` and updates the model.
    #[inline]
    pub fn decode_symbol(&mut self, model: &mut AdaptiveModel) -> usize {
        let width = (self.high - self.low + 1) as u128;
        let total = model.total_frequency();
        let offset = (self.value - self.low + 1) as u128;
        let target = ((offset * total as u128 - 1) / width) as u64;
        let (symbol, range) = model.symbol_at(target);

        let hi = (width * (range.low + range.freq) as u128 / total as u128) as u64;
        let lo = (width * range.low as u128 / total as u128) as u64;
        self.high = self.low + hi - 1;
        self.low += lo;

        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.input.next();
            self.shifts += 1;
        }
        model.update(symbol);
        symbol
    }

    /// Checks that the input held every bit the encoder produced.
    pub fn finish(self) -> Result<()> {
        let needed = self.shifts + 2;
        let available = self.input.bytes.len() as u64 * 8;
        if available < needed {
            return Err(Error::Truncated { needed, available });
        }
        Ok(())
    }
}

/// Encodes `symbols` over an alphabet of size `m` with a fresh adaptive model.
pub fn encode(symbols: &[usize], m: usize, estimator: Estimator) -> Result<EncodedStream> {
    encode_iter(symbols.iter().copied(), m, estimator)
}

pub fn encode_iter<I>(symbols: I, m: usize, estimator: Estimator) -> Result<EncodedStream>
where
    I: IntoIterator<Item = usize>,
{
    let mut model = AdaptiveModel::new(m, estimator);
    let mut enc = ArithmeticEncoder::new();
    for s in symbols {
        enc.encode_symbol(&mut model, s)?;
    }
    Ok(enc.finish())
}

/// Decodes `count` symbols. Bytes after the encoded stream are ignored.
pub fn decode(bytes: &[u8], m: usize, estimator: Estimator, count: usize) -> Result<Vec<usize>> {
    let mut model = AdaptiveModel::new(m, estimator);
    let mut dec = ArithmeticDecoder::new(bytes);
    let out = (0..count).map(|_| dec.decode_symbol(&mut model)).collect();
    dec.finish()?;
    Ok(out)
}
