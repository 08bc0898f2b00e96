use super::ConvCode;

/// Expanded state-transition table of a [`ConvCode`].
///
/// `next_state = (input << (K-2)) | (state >> 1)`. The two predecessors of
/// state `t` are `((t << 1) & mask) | i` for `i` in `{0, 1}`; `i` is the
/// decision bit stored by the ACS stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trellis {
    constraint_length: u32,
    rate_inverse: usize,
    next: Vec<u32>,
    output: Vec<u32>,
}

impl Trellis {
    pub fn new(code: &ConvCode) -> Self {
        let k = code.constraint_length();
        let states = code.num_states() as u32;
        let mut next = Vec::with_capacity(2 * states as usize);
        let mut output = Vec::with_capacity(2 * states as usize);
        for s in 0..states {
            for b in 0..2u32 {
                let reg = (b << (k - 1)) | s;
                next.push(reg >> 1);
                output.push(code.symbol(reg));
            }
        }
        Trellis {
            constraint_length: k,
            rate_inverse: code.rate_inverse(),
            next,
            output,
        }
    }

    pub fn num_states(&self) -> usize {
        self.next.len() / 2
    }

    pub fn rate_inverse(&self) -> usize {
        self.rate_inverse
    }

    pub fn constraint_length(&self) -> u32 {
        self.constraint_length
    }

    pub fn next_state(&self, state: usize, input: u8) -> usize {
        self.next[2 * state + usize::from(input & 1)] as usize
    }

    /// Expected symbol on `state --input-->`, generator `j` in bit `j`.
    pub fn output(&self, state: usize, input: u8) -> u32 {
        self.output[2 * state + usize::from(input & 1)]
    }

    /// Predecessor `i` (0 or 1) of `state`.
    #[inline]
    pub fn predecessor(&self, state: usize, i: usize) -> usize {
        ((state << 1) & (self.num_states() - 1)) | i
    }

    /// Input bit carried by any transition into `state`.
    #[inline]
    pub fn input_into(&self, state: usize) -> u8 {
        (state >> (self.constraint_length - 2)) as u8
    }
}
