//! Flat gate-level adder netlists.
//!
//! Grammar (one statement per line, `#` starts a comment):
//!
//! ```text
//! inputs a0 a1 ... a{n-1} b0 b1 ... b{n-1}
//! <sig> = <GATE>(<sig>[, <sig>])
//! outputs s0 s1 ... s{n}
//! ```
//!
//! Gates must appear in topological order. Operand and sum bits are listed
//! LSB first. Simulation is bit-sliced: each signal is a `u64` carrying 64
//! independent evaluations.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateOp {
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
    Not,
    Buf,
    Const0,
    Const1,
}

impl GateOp {
    fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "AND" => GateOp::And,
            "OR" => GateOp::Or,
            "XOR" => GateOp::Xor,
            "NAND" => GateOp::Nand,
            "NOR" => GateOp::Nor,
            "XNOR" => GateOp::Xnor,
            "NOT" => GateOp::Not,
            "BUF" => GateOp::Buf,
            "CONST0" => GateOp::Const0,
            "CONST1" => GateOp::Const1,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            GateOp::Const0 | GateOp::Const1 => 0,
            GateOp::Not | GateOp::Buf => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Xor => "XOR",
            GateOp::Nand => "NAND",
            GateOp::Nor => "NOR",
            GateOp::Xnor => "XNOR",
            GateOp::Not => "NOT",
            GateOp::Buf => "BUF",
            GateOp::Const0 => "CONST0",
            GateOp::Const1 => "CONST1",
        }
    }

    #[inline]
    fn apply(self, x: u64, y: u64) -> u64 {
        match self {
            GateOp::And => x & y,
            GateOp::Or => x | y,
            GateOp::Xor => x ^ y,
            GateOp::Nand => !(x & y),
            GateOp::Nor => !(x | y),
            GateOp::Xnor => !(x ^ y),
            GateOp::Not => !x,
            GateOp::Buf => x,
            GateOp::Const0 => 0,
            GateOp::Const1 => !0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: undefined signal `{name}`")]
    UndefinedSignal { line: usize, name: String },
    #[error("line {line}: signal `{name}` defined more than once")]
    DuplicateDefinition { line: usize, name: String },
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("line {line}: {gate} takes {expected} input(s), got {found}")]
    Arity {
        line: usize,
        gate: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: expected {expected} outputs for a {width}-bit adder, got {found}")]
    WrongOutputCount {
        line: usize,
        width: u32,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: input list must hold 2n signals (n >= 1), got {found}")]
    BadInputCount { line: usize, found: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// One compiled gate: output slot, op and argument slots.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Gate {
    op: GateOp,
    args: [usize; 2],
}

/// A parsed and validated adder netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateNetlist {
    inputs: Vec<String>,
    gate_names: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
    output_names: Vec<String>,
}

impl GateNetlist {
    pub fn parse(text: &str) -> Result<Self, NetlistError> {
        let mut slots: HashMap<String, usize> = HashMap::new();
        let mut inputs: Option<Vec<String>> = None;
        let mut gate_names = Vec::new();
        let mut gates = Vec::new();
        let mut outputs: Option<(usize, Vec<String>)> = None;
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let stmt = raw.split('#').next().unwrap_or("").trim();
            if stmt.is_empty() {
                continue;
            }
            let syntax = |message: &str| NetlistError::Syntax {
                line,
                message: message.to_string(),
            };

            if let Some(rest) = keyword(stmt, "inputs") {
                if inputs.is_some() {
                    return Err(syntax("duplicate `inputs` statement"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.is_empty() || !names.len().is_multiple_of(2) {
                    return Err(NetlistError::BadInputCount {
                        line,
                        found: names.len(),
                    });
                }
                for name in &names {
                    check_ident(name, line)?;
                    if slots.insert(name.clone(), slots.len()).is_some() {
                        return Err(NetlistError::DuplicateDefinition {
                            line,
                            name: name.clone(),
                        });
                    }
                }
                inputs = Some(names);
                continue;
            }

            let Some(input_list) = inputs.as_ref() else {
                return Err(syntax("`inputs` must be the first statement"));
            };

            if let Some(rest) = keyword(stmt, "outputs") {
                if outputs.is_some() {
                    return Err(syntax("duplicate `outputs` statement"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                let width = (input_list.len() / 2) as u32;
                if names.len() != width as usize + 1 {
                    return Err(NetlistError::WrongOutputCount {
                        line,
                        width,
                        expected: width as usize + 1,
                        found: names.len(),
                    });
                }
                outputs = Some((line, names));
                continue;
            }

            if outputs.is_some() {
                return Err(syntax("gate statement after `outputs`"));
            }

            let (lhs, rhs) = stmt
                .split_once('=')
                .ok_or_else(|| syntax("expected `<sig> = GATE(...)`"))?;
            let target = lhs.trim();
            check_ident(target, line)?;
            let rhs = rhs.trim();
            let open = rhs.find('(').ok_or_else(|| syntax("missing `(`"))?;
            if !rhs.ends_with(')') {
                return Err(syntax("missing `)`"));
            }
            let gate_name = rhs[..open].trim();
            let op = GateOp::parse(gate_name).ok_or_else(|| NetlistError::UnknownGate {
                line,
                name: gate_name.to_string(),
            })?;
            let arg_text = rhs[open + 1..rhs.len() - 1].trim();
            let arg_names: Vec<&str> = if arg_text.is_empty() {
                Vec::new()
            } else {
                arg_text.split(',').map(str::trim).collect()
            };
            if arg_names.len() != op.arity() {
                return Err(NetlistError::Arity {
                    line,
                    gate: op.name(),
                    expected: op.arity(),
                    found: arg_names.len(),
                });
            }
            let mut args = [0usize; 2];
            for (slot, name) in args.iter_mut().zip(&arg_names) {
                *slot = *slots.get(*name).ok_or_else(|| NetlistError::UndefinedSignal {
                    line,
                    name: name.to_string(),
                })?;
            }
            if slots.contains_key(target) {
                return Err(NetlistError::DuplicateDefinition {
                    line,
                    name: target.to_string(),
                });
            }
            slots.insert(target.to_string(), slots.len());
            gate_names.push(target.to_string());
            gates.push(Gate { op, args });
        }

        let inputs = inputs.ok_or(NetlistError::Syntax {
            line: last_line,
            message: "missing `inputs` statement".into(),
        })?;
        let (out_line, output_names) = outputs.ok_or(NetlistError::Syntax {
            line: last_line,
            message: "missing `outputs` statement".into(),
        })?;
        let outputs = output_names
            .iter()
            .map(|name| {
                slots.get(name).copied().ok_or_else(|| NetlistError::UndefinedSignal {
                    line: out_line,
                    name: name.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Self {
            inputs,
            gate_names,
            gates,
            outputs,
            output_names,
        })
    }

    /// Operand width `n`; the netlist has `2n` inputs and `n+1` outputs.
    pub fn width(&self) -> u32 {
        (self.inputs.len() / 2) as u32
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Simulates up to 64 operand pairs at once.
    pub(crate) fn eval_lanes(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        let lanes = a.len();
        debug_assert!(lanes <= 64 && b.len() == lanes && out.len() == lanes);
        let n = self.width() as usize;
        let mut sig = vec![0u64; self.inputs.len() + self.gates.len()];
        for bit in 0..n {
            let (mut wa, mut wb) = (0u64, 0u64);
            for lane in 0..lanes {
                wa |= u64::from((a[lane] >> bit) & 1) << lane;
                wb |= u64::from((b[lane] >> bit) & 1) << lane;
            }
            sig[bit] = wa;
            sig[n + bit] = wb;
        }
        let base = self.inputs.len();
        for (i, g) in self.gates.iter().enumerate() {
            sig[base + i] = g.op.apply(sig[g.args[0]], sig[g.args[1]]);
        }
        out.fill(0);
        for (bit, &slot) in self.outputs.iter().enumerate() {
            let w = sig[slot];
            for (lane, o) in out.iter_mut().enumerate() {
                *o |= (((w >> lane) & 1) as u32) << bit;
            }
        }
    }

    /// Renders the netlist back into the text grammar.
    pub fn to_text(&self) -> String {
        let mut names: Vec<&str> = self.inputs.iter().map(String::as_str).collect();
        names.extend(self.gate_names.iter().map(String::as_str));
        let mut s = format!("inputs {}\n", self.inputs.join(" "));
        for (name, g) in self.gate_names.iter().zip(&self.gates) {
            let args: Vec<&str> = g.args[..g.op.arity()].iter().map(|&i| names[i]).collect();
            let _ = writeln!(s, "{name} = {}({})", g.op.name(), args.join(", "));
        }
        let _ = writeln!(s, "outputs {}", self.output_names.join(" "));
        s
    }
}

fn keyword<'a>(stmt: &'a str, kw: &str) -> Option<&'a str> {
    let rest = stmt.strip_prefix(kw)?;
    (rest.is_empty() || rest.starts_with(char::is_whitespace)).then_some(rest)
}

fn check_ident(name: &str, line: usize) -> Result<(), NetlistError> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '[' || c == ']');
    if ok {
        Ok(())
    } else {
        Err(NetlistError::Syntax {
            line,
            message: format!("invalid signal name `{name}`"),
        })
    }
}

/// Text of an exact n-bit ripple-carry adder in the netlist grammar.
pub fn ripple_carry_netlist(n: u32) -> String {
    assert!(n >= 1);
    let mut s = String::from("# exact ripple-carry adder\ninputs");
    for p in ["a", "b"] {
        for i in 0..n {
            let _ = write!(s, " {p}{i}");
        }
    }
    s.push('\n');
    let _ = writeln!(s, "s0 = XOR(a0, b0)");
    let _ = writeln!(s, "c0 = AND(a0, b0)");
    for i in 1..n {
        let p = i - 1;
        let _ = writeln!(s, "p{i} = XOR(a{i}, b{i})");
        let _ = writeln!(s, "s{i} = XOR(p{i}, c{p})");
        let _ = writeln!(s, "g{i} = AND(a{i}, b{i})");
        let _ = writeln!(s, "t{i} = AND(p{i}, c{p})");
        let _ = writeln!(s, "c{i} = OR(g{i}, t{i})");
    }
    let _ = writeln!(s, "s{n} = BUF(c{})", n - 1);
    s.push_str("outputs");
    for i in 0..=n {
        let _ = write!(s, " s{i}");
    }
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::AdderModel;

    const HALF_ADDER: &str = "\
# 1-bit adder
inputs a0 b0
s0 = XOR(a0, b0)
s1 = AND(a0, b0)
outputs s0 s1
";

    #[test]
    fn half_adder_truth_table() {
        let m = AdderModel::load_netlist("ha", HALF_ADDER).unwrap();
        assert_eq!(m.width(), 1);
        assert_eq!(m.evaluate(1, 1).unwrap(), 2);
        assert_eq!(m.evaluate(1, 0).unwrap(), 1);
        assert_eq!(m.evaluate(0, 0).unwrap(), 0);
    }

    #[test]
    fn undefined_signal_reports_line() {
        let text = "inputs a0 b0\ns0 = XOR(a0, zz)\ns1 = AND(a0, b0)\noutputs s0 s1\n";
        assert_eq!(
            GateNetlist::parse(text),
            Err(NetlistError::UndefinedSignal {
                line: 2,
                name: "zz".into()
            })
        );
    }

    #[test]
    fn duplicate_definition() {
        let text = "inputs a0 b0\ns0 = XOR(a0, b0)\ns0 = AND(a0, b0)\noutputs s0 s0\n";
        assert!(matches!(
            GateNetlist::parse(text),
            Err(NetlistError::DuplicateDefinition { line: 3, .. })
        ));
    }

    #[test]
    fn wrong_output_count() {
        let text = "inputs a0 b0\ns0 = XOR(a0, b0)\noutputs s0\n";
        assert!(matches!(
            GateNetlist::parse(text),
            Err(NetlistError::WrongOutputCount {
                line: 3,
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn unknown_gate_and_arity() {
        let text = "inputs a0 b0\ns0 = MUX(a0, b0)\n";
        assert!(matches!(
            GateNetlist::parse(text),
            Err(NetlistError::UnknownGate { line: 2, .. })
        ));
        let text = "inputs a0 b0\ns0 = NOT(a0, b0)\n";
        assert!(matches!(
            GateNetlist::parse(text),
            Err(NetlistError::Arity { line: 2, .. })
        ));
    }

    #[test]
    fn output_must_be_defined() {
        let text = "inputs a0 b0\ns0 = XOR(a0, b0)\n\noutputs s0 s1\n";
        assert_eq!(
            GateNetlist::parse(text),
            Err(NetlistError::UndefinedSignal {
                line: 4,
                name: "s1".into()
            })
        );
    }

    #[test]
    fn constants_and_odd_inputs() {
        let text = "inputs a0 b0\nz = CONST0()\none = CONST1()\ns0 = OR(a0, b0)\nnb = NOT(one)\nouts = BUF(nb)\noutputs s0 outs\n";
        let m = AdderModel::load_netlist("or1", text).unwrap();
        assert_eq!(m.evaluate(1, 1).unwrap(), 1);
        assert!(matches!(
            GateNetlist::parse("inputs a0 b0 c0\n"),
            Err(NetlistError::BadInputCount { line: 1, found: 3 })
        ));
    }

    #[test]
    fn ripple_carry_is_exact() {
        for n in 1..=8 {
            let m = AdderModel::load_netlist("rca", &ripple_carry_netlist(n)).unwrap();
            for a in 0..(1u32 << n) {
                for b in 0..(1u32 << n) {
                    assert_eq!(m.add(a, b), a + b, "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let net = GateNetlist::parse(&ripple_carry_netlist(4)).unwrap();
        assert_eq!(GateNetlist::parse(&net.to_text()).unwrap(), net);
    }
}
