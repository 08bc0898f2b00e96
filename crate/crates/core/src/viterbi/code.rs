use serde::{Deserialize, Serialize};

use super::ViterbiError;

/// Largest supported constraint length.
pub const MAX_CONSTRAINT_LENGTH: u32 = 16;

/// Rate `1/r` feed-forward convolutional code.
///
/// The shift register holds the current input in bit `K-1` and the oldest
/// input in bit 0. A generator's MSB (bit `K-1`) taps the current input, so
/// `(7, 5)` octal with `K = 3` is the usual textbook code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConvCodeConfig", into = "ConvCodeConfig")]
pub struct ConvCode {
    constraint_length: u32,
    generators: Vec<u32>,
}

/// Config-file form of a [`ConvCode`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvCodeConfig {
    pub constraint_length: u32,
    pub generators_octal: Vec<String>,
}

impl TryFrom<ConvCodeConfig> for ConvCode {
    type Error = ViterbiError;

    fn try_from(cfg: ConvCodeConfig) -> Result<Self, Self::Error> {
        let gens: Vec<&str> = cfg.generators_octal.iter().map(String::as_str).collect();
        ConvCode::from_octal(cfg.constraint_length, &gens)
    }
}

impl From<ConvCode> for ConvCodeConfig {
    fn from(code: ConvCode) -> Self {
        ConvCodeConfig {
            constraint_length: code.constraint_length,
            generators_octal: code.generators.iter().map(|g| format!("{g:o}")).collect(),
        }
    }
}

impl Default for ConvCode {
    /// `K = 3`, rate 1/2, generators `(7, 5)` octal.
    fn default() -> Self {
        ConvCode {
            constraint_length: 3,
            generators: vec![0o7, 0o5],
        }
    }
}

impl ConvCode {
    pub fn new(constraint_length: u32, generators: Vec<u32>) -> Result<Self, ViterbiError> {
        if !(2..=MAX_CONSTRAINT_LENGTH).contains(&constraint_length) {
            return Err(ViterbiError::InvalidCode(format!(
                "constraint length {constraint_length} outside 2..={MAX_CONSTRAINT_LENGTH}"
            )));
        }
        if generators.is_empty() || generators.len() > 32 {
            return Err(ViterbiError::InvalidCode(format!(
                "need 1..=32 generators, got {}",
                generators.len()
            )));
        }
        for &g in &generators {
            if g == 0 || g >> constraint_length != 0 {
                return Err(ViterbiError::InvalidCode(format!(
                    "generator {g:o} (octal) is zero or wider than K={constraint_length}"
                )));
            }
        }
        Ok(ConvCode {
            constraint_length,
            generators,
        })
    }

    pub fn from_octal(constraint_length: u32, generators: &[&str]) -> Result<Self, ViterbiError> {
        let gens = generators
            .iter()
            .map(|s| {
                u32::from_str_radix(s.trim(), 8)
                    .map_err(|_| ViterbiError::InvalidCode(format!("`{s}` is not an octal number")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(constraint_length, gens)
    }

    pub fn constraint_length(&self) -> u32 {
        self.constraint_length
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// Output bits per input bit (the inverse code rate).
    pub fn rate_inverse(&self) -> usize {
        self.generators.len()
    }

    pub fn num_states(&self) -> usize {
        1 << (self.constraint_length - 1)
    }

    /// Output symbol for register contents `reg` (K bits), packed with
    /// generator `j` in bit `j`.
    #[inline]
    pub(crate) fn symbol(&self, reg: u32) -> u32 {
        self.generators
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &g)| acc | (((g & reg).count_ones() & 1) << j))
    }

    /// Encodes `bits` (each 0 or 1). With `flush`, `K-1` zero bits are
    /// appended so the register ends in state 0.
    pub fn encode(&self, bits: &[u8], flush: bool) -> Vec<u8> {
        let k = self.constraint_length;
        let tail = if flush { (k - 1) as usize } else { 0 };
        let mut out = Vec::with_capacity((bits.len() + tail) * self.rate_inverse());
        let mut state = 0u32;
        let inputs = bits.iter().copied().chain(std::iter::repeat_n(0u8, tail));
        for bit in inputs {
            let b = u32::from(bit & 1);
            let reg = (b << (k - 1)) | state;
            let sym = self.symbol(reg);
            out.extend((0..self.rate_inverse()).map(|j| ((sym >> j) & 1) as u8));
            state = reg >> 1;
        }
        out
    }
}

/// Free-function form of [`ConvCode::encode`].
pub fn conv_encode(code: &ConvCode, bits: &[u8], flush: bool) -> Vec<u8> {
    code.encode(bits, flush)
}
