//! n-bit unsigned adder models.
//!
//! An [`AdderModel`] takes two `n`-bit operands and produces an `n+1`-bit
//! result. The exact model is ordinary addition; the parametric models
//! (lower-OR and truncated) approximate the low `k` bits; netlist models
//! evaluate an imported gate-level circuit.

mod metrics;
mod netlist;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use metrics::{error_metrics, ErrorReport, MetricsMode, EXHAUSTIVE_LIMIT_BITS};
pub use netlist::{ripple_carry_netlist, GateNetlist, GateOp, NetlistError};

/// Widest operand supported by any model.
pub const MAX_WIDTH: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdderError {
    #[error("operand {value} does not fit a {width}-bit adder")]
    OperandOutOfRange { value: u64, width: u32 },
    #[error("unsupported adder width {0} (expected 1..={MAX_WIDTH})")]
    UnsupportedWidth(u32),
    #[error("approximated bit count k={k} exceeds width n={width}")]
    InvalidApproxBits { k: u32, width: u32 },
    #[error("exhaustive enumeration of {width}-bit operands needs 2^{} pairs, limit is 2^{EXHAUSTIVE_LIMIT_BITS}", 2 * .width)]
    Capacity { width: u32 },
    #[error("sampled metrics need at least one sample")]
    EmptySample,
    #[error("unknown adder spec `{0}` (expected exact:N, lower-or:N:K or truncated:N:K)")]
    UnknownSpec(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// The two built-in approximate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParametricKind {
    /// Low `k` bits are `a | b`; a single carry `a[k-1] & b[k-1]` feeds the
    /// exact upper part.
    LowerOr,
    /// Low `k` bits forced to one; upper part added without carry-in.
    Truncated,
}

#[derive(Debug, Clone)]
pub enum AdderKind {
    Exact,
    LowerOr { k: u32 },
    Truncated { k: u32 },
    Netlist(Arc<GateNetlist>),
}

impl PartialEq for AdderKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AdderKind::Exact, AdderKind::Exact) => true,
            (AdderKind::LowerOr { k: a }, AdderKind::LowerOr { k: b }) => a == b,
            (AdderKind::Truncated { k: a }, AdderKind::Truncated { k: b }) => a == b,
            (AdderKind::Netlist(a), AdderKind::Netlist(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

/// An evaluatable n-bit unsigned adder. Cheap to clone; immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct AdderModel {
    name: String,
    width: u32,
    kind: AdderKind,
}

fn check_width(width: u32) -> Result<(), AdderError> {
    if width == 0 || width > MAX_WIDTH {
        return Err(AdderError::UnsupportedWidth(width));
    }
    Ok(())
}

impl AdderModel {
    pub fn exact(width: u32) -> Result<Self, AdderError> {
        check_width(width)?;
        Ok(Self {
            name: format!("exact{width}"),
            width,
            kind: AdderKind::Exact,
        })
    }

    pub fn parametric(kind: ParametricKind, width: u32, k: u32) -> Result<Self, AdderError> {
        check_width(width)?;
        if k > width {
            return Err(AdderError::InvalidApproxBits { k, width });
        }
        let (name, kind) = match kind {
            ParametricKind::LowerOr => (format!("loa{width}_k{k}"), AdderKind::LowerOr { k }),
            ParametricKind::Truncated => (format!("trunc{width}_k{k}"), AdderKind::Truncated { k }),
        };
        Ok(Self { name, width, kind })
    }

    pub fn from_netlist(name: impl Into<String>, netlist: GateNetlist) -> Self {
        Self {
            name: name.into(),
            width: netlist.width(),
            kind: AdderKind::Netlist(Arc::new(netlist)),
        }
    }

    /// Parses netlist text and wraps it as a model.
    pub fn load_netlist(name: impl Into<String>, text: &str) -> Result<Self, AdderError> {
        let netlist = GateNetlist::parse(text)?;
        if netlist.width() > MAX_WIDTH {
            return Err(AdderError::UnsupportedWidth(netlist.width()));
        }
        Ok(Self::from_netlist(name, netlist))
    }

    /// Builds a model from a short spec: `exact:12`, `lower-or:12:6`,
    /// `truncated:16:4` (`loa` and `trunc` are accepted as aliases).
    pub fn from_spec(spec: &str) -> Result<Self, AdderError> {
        let bad = || AdderError::UnknownSpec(spec.to_string());
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |s: &str| s.parse::<u32>().map_err(|_| bad());
        match parts.as_slice() {
            ["exact", n] => Self::exact(num(n)?),
            ["lower-or" | "loa", n, k] => Self::parametric(ParametricKind::LowerOr, num(n)?, num(k)?),
            ["truncated" | "trunc", n, k] => Self::parametric(ParametricKind::Truncated, num(n)?, num(k)?),
            _ => Err(bad()),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn kind(&self) -> &AdderKind {
        &self.kind
    }

    /// Largest operand value, `2^n - 1`.
    pub fn max_operand(&self) -> u32 {
        (1u32 << self.width) - 1
    }

    /// Range-checked evaluation.
    pub fn evaluate(&self, a: u64, b: u64) -> Result<u32, AdderError> {
        for v in [a, b] {
            if v > u64::from(self.max_operand()) {
                return Err(AdderError::OperandOutOfRange {
                    value: v,
                    width: self.width,
                });
            }
        }
        Ok(self.add(a as u32, b as u32))
    }

    /// Unchecked evaluation; operands must already be `< 2^n`.
    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a <= self.max_operand() && b <= self.max_operand());
        match &self.kind {
            AdderKind::Exact => a + b,
            AdderKind::LowerOr { k } => lower_or(a, b, *k),
            AdderKind::Truncated { k } => truncated(a, b, *k),
            AdderKind::Netlist(net) => {
                let mut out = [0u32];
                net.eval_lanes(&[a], &[b], &mut out);
                out[0]
            }
        }
    }

    /// Evaluates `out[i] = add(a[i], b[i])`. Netlists simulate 64 pairs per
    /// pass, so batching is much faster than repeated [`add`](Self::add).
    pub fn add_batch(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        assert!(a.len() == b.len() && a.len() == out.len());
        match &self.kind {
            AdderKind::Netlist(net) => {
                for ((ca, cb), co) in a.chunks(64).zip(b.chunks(64)).zip(out.chunks_mut(64)) {
                    net.eval_lanes(ca, cb, co);
                }
            }
            _ => {
                for ((&x, &y), o) in a.iter().zip(b).zip(out.iter_mut()) {
                    *o = self.add(x, y);
                }
            }
        }
    }
}

impl fmt::Display for AdderModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}-bit)", self.name, self.width)
    }
}

#[inline]
fn lower_or(a: u32, b: u32, k: u32) -> u32 {
    if k == 0 {
        return a + b;
    }
    let low_mask = (1u32 << k) - 1;
    let carry = (a >> (k - 1)) & (b >> (k - 1)) & 1;
    (((a >> k) + (b >> k) + carry) << k) | ((a | b) & low_mask)
}

#[inline]
fn truncated(a: u32, b: u32, k: u32) -> u32 {
    let low_mask = (1u32 << k) - 1;
    (((a >> k) + (b >> k)) << k) | low_mask
}
