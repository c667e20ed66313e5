//! The reference machine family.
//!
//! Programs are read strictly left to right in 3-bit opcode groups, most
//! significant bit first, with no lookahead:
//!
//! | bits | opcode | effect |
//! |------|--------|--------|
//! | 000  | HALT   | stop, output is final |
//! | 001  | EMIT0  | append `0` |
//! | 010  | EMIT1  | append `1` |
//! | 011  | RDC    | consume the next condition symbol and append it |
//! | 100  | DUP    | buffer `b <- bb`, costs `max(|b|, 1)` steps |
//! | 101  | SKC    | consume the next condition symbol, discard it |
//! | 110  | BRE    | length-aware only: if the condition is used up, skip the next opcode |
//! | 111  | ABT    | abort |
//!
//! Every opcode other than DUP costs one step. Fewer than three unread program
//! bits end the run with [`RunStatus::ProgramExhausted`], which is the normal
//! terminal state of a monotone run.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Version tag of the opcode table; embedded in snapshots and cache keys.
pub const ISA_VERSION: u32 = 1;

pub const OPCODE_BITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MachineKind {
    /// No condition tape, must execute HALT.
    Prefix,
    /// No condition tape, may run off the end of its program.
    Monotone,
    /// Reads its condition self-delimitingly; cannot detect the condition end.
    TwicePrefix,
    /// Like `TwicePrefix` but BRE can observe the end of the condition.
    CondLengthAware,
}

impl MachineKind {
    pub fn takes_condition(self) -> bool {
        matches!(self, MachineKind::TwicePrefix | MachineKind::CondLengthAware)
    }

    pub fn name(self) -> &'static str {
        match self {
            MachineKind::Prefix => "Prefix",
            MachineKind::Monotone => "Monotone",
            MachineKind::TwicePrefix => "TwicePrefix",
            MachineKind::CondLengthAware => "CondLengthAware",
        }
    }
}

impl FromStr for MachineKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prefix" => Ok(MachineKind::Prefix),
            "monotone" => Ok(MachineKind::Monotone),
            "twiceprefix" | "twice-prefix" => Ok(MachineKind::TwicePrefix),
            "condlengthaware" | "cond-length-aware" | "cla" => Ok(MachineKind::CondLengthAware),
            _ => Err(LabError::InvalidArgument(format!("unknown machine kind {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Opcode {
    Halt,
    Emit0,
    Emit1,
    ReadCond,
    Dup,
    SkipCond,
    BranchEnd,
    Abort,
}

impl Opcode {
    pub const ALL: [Opcode; 8] = [
        Opcode::Halt,
        Opcode::Emit0,
        Opcode::Emit1,
        Opcode::ReadCond,
        Opcode::Dup,
        Opcode::SkipCond,
        Opcode::BranchEnd,
        Opcode::Abort,
    ];

    pub fn from_bits(bits: &[u8]) -> Opcode {
        let v = bits[..OPCODE_BITS]
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize);
        Opcode::ALL[v]
    }

    pub fn bits(self) -> [u8; 3] {
        let v = self as u8;
        [(v >> 2) & 1, (v >> 1) & 1, v & 1]
    }
}

/// A finite binary program.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Program {
    bits: Vec<u8>,
}

impl Program {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "program bits must be 0 or 1");
        Program { bits }
    }

    pub fn from_opcodes(ops: &[Opcode]) -> Self {
        Program {
            bits: ops.iter().flat_map(|op| op.bits()).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for Program {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Program {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Program {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Program::new(crate::strings::parse_bits(s)?))
    }
}

/// Execution limits for one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    pub max_steps: u64,
    pub max_output: usize,
}

impl Budget {
    pub const DEFAULT_MAX_OUTPUT: usize = 1 << 16;

    pub fn new(max_steps: u64, max_output: usize) -> Result<Self> {
        if max_steps == 0 || max_output == 0 {
            return Err(LabError::InvalidArgument(
                "budget limits must be strictly positive".into(),
            ));
        }
        Ok(Budget {
            max_steps,
            max_output,
        })
    }

    pub fn steps(max_steps: u64) -> Self {
        Budget::new(max_steps, Self::DEFAULT_MAX_OUTPUT).expect("positive step budget")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    Halted,
    Aborted,
    StepLimit,
    CondExhausted,
    OutputLimit,
    ProgramExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub output: Vec<u8>,
    pub consumed_program: usize,
    pub consumed_condition: usize,
    pub steps: u64,
}

/// Interpreter state after some prefix of opcodes. Cloning it lets the
/// enumerator share execution of common program prefixes.
#[derive(Clone, Debug)]
pub struct MachineState<'c> {
    kind: MachineKind,
    condition: &'c [u8],
    budget: Budget,
    output: Vec<u8>,
    consumed_program: usize,
    consumed_condition: usize,
    steps: u64,
    skip_next: bool,
}

impl<'c> MachineState<'c> {
    /// # Panics
    /// If a condition is supplied to a kind without a condition tape, or missing
    /// for a kind that has one.
    pub fn new(kind: MachineKind, condition: Option<&'c [u8]>, budget: Budget) -> Self {
        assert_eq!(
            condition.is_some(),
            kind.takes_condition(),
            "condition must be present iff {kind:?} reads one"
        );
        MachineState {
            kind,
            condition: condition.unwrap_or(&[]),
            budget,
            output: Vec::new(),
            consumed_program: 0,
            consumed_condition: 0,
            steps: 0,
            skip_next: false,
        }
    }

    pub fn output(&self) -> &[u8] {
        &self.output
    }

    pub fn consumed_program(&self) -> usize {
        self.consumed_program
    }

    pub fn consumed_condition(&self) -> usize {
        self.consumed_condition
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn charge(&mut self, cost: u64) -> Option<RunStatus> {
        self.steps += cost;
        (self.steps > self.budget.max_steps).then_some(RunStatus::StepLimit)
    }

    /// Consumes one opcode. Returns the terminal status if the run ended.
    pub fn exec(&mut self, op: Opcode) -> Option<RunStatus> {
        self.consumed_program += OPCODE_BITS;
        if self.skip_next {
            self.skip_next = false;
            return self.charge(1);
        }
        let cost = match op {
            Opcode::Dup => self.output.len().max(1) as u64,
            _ => 1,
        };
        if let Some(status) = self.charge(cost) {
            return Some(status);
        }
        match op {
            Opcode::Halt => return Some(RunStatus::Halted),
            Opcode::Abort => return Some(RunStatus::Aborted),
            Opcode::Emit0 => self.output.push(0),
            Opcode::Emit1 => self.output.push(1),
            Opcode::Dup => {
                if self.output.len() * 2 > self.budget.max_output {
                    return Some(RunStatus::OutputLimit);
                }
                self.output.extend_from_within(..);
            }
            Opcode::ReadCond | Opcode::SkipCond => {
                if !self.kind.takes_condition() {
                    return Some(RunStatus::Aborted);
                }
                let Some(&symbol) = self.condition.get(self.consumed_condition) else {
                    return Some(RunStatus::CondExhausted);
                };
                self.consumed_condition += 1;
                if op == Opcode::ReadCond {
                    self.output.push(symbol);
                }
            }
            Opcode::BranchEnd => {
                if self.kind != MachineKind::CondLengthAware {
                    return Some(RunStatus::Aborted);
                }
                self.skip_next = self.consumed_condition == self.condition.len();
            }
        }
        (self.output.len() > self.budget.max_output).then_some(RunStatus::OutputLimit)
    }

    pub fn finish(self, status: RunStatus) -> RunOutcome {
        RunOutcome {
            status,
            output: self.output,
            consumed_program: self.consumed_program,
            consumed_condition: self.consumed_condition,
            steps: self.steps,
        }
    }
}

/// Runs `program` to termination.
///
/// # Panics
/// If `condition` is present for `Prefix`/`Monotone` or absent for the
/// conditional kinds.
pub fn run(
    kind: MachineKind,
    program: &Program,
    condition: Option<&[u8]>,
    budget: Budget,
) -> RunOutcome {
    let mut state = MachineState::new(kind, condition, budget);
    for group in program.bits().chunks_exact(OPCODE_BITS) {
        if let Some(status) = state.exec(Opcode::from_bits(group)) {
            return state.finish(status);
        }
    }
    state.finish(RunStatus::ProgramExhausted)
}

/// Runs the monotone machine on `tape` and returns the number of tape bits
/// consumed at the first moment the output starts with `target`, or `None`
/// if that never happens within the budget.
pub fn minimal_consumed_prefix(tape: &[u8], target: &[u8], budget: Budget) -> Option<usize> {
    if target.is_empty() {
        return Some(0);
    }
    let mut state = MachineState::new(MachineKind::Monotone, None, budget);
    for group in tape.chunks_exact(OPCODE_BITS) {
        let status = state.exec(Opcode::from_bits(group));
        if status.is_some_and(|s| s != RunStatus::Halted) {
            return None;
        }
        let out = state.output();
        let common = out.len().min(target.len());
        if out[..common] != target[..common] {
            return None;
        }
        if out.len() >= target.len() {
            return Some(state.consumed_program());
        }
        if status.is_some() {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prog(s: &str) -> Program {
        s.parse().unwrap()
    }

    fn b() -> Budget {
        Budget::steps(100)
    }

    #[test]
    fn prefix_emit_then_halt() {
        let out = run(MachineKind::Prefix, &prog("010000"), None, b());
        assert_eq!(out.status, RunStatus::Halted);
        assert_eq!(out.output, vec![1]);
        assert_eq!(out.consumed_program, 6);
        assert_eq!(out.consumed_condition, 0);
    }

    #[test]
    fn monotone_dup_runs_off_the_tape() {
        let out = run(MachineKind::Monotone, &prog("001100100"), None, b());
        assert_eq!(out.status, RunStatus::ProgramExhausted);
        assert_eq!(out.output, vec![0, 0, 0, 0]);
        assert_eq!(out.consumed_program, 9);
        // EMIT0 (1) + DUP on "0" (1) + DUP on "00" (2)
        assert_eq!(out.steps, 4);
    }

    #[test]
    fn twice_prefix_copies_condition() {
        let out = run(MachineKind::TwicePrefix, &prog("011011000"), Some(&[1, 0]), b());
        assert_eq!(out.status, RunStatus::Halted);
        assert_eq!(out.output, vec![1, 0]);
        assert_eq!(out.consumed_condition, 2);
    }

    #[test]
    fn condition_opcodes_abort_without_condition_tape() {
        for p in ["011000", "101000", "110000"] {
            assert_eq!(run(MachineKind::Prefix, &prog(p), None, b()).status, RunStatus::Aborted);
            assert_eq!(run(MachineKind::Monotone, &prog(p), None, b()).status, RunStatus::Aborted);
        }
        assert_eq!(
            run(MachineKind::TwicePrefix, &prog("110000"), Some(&[]), b()).status,
            RunStatus::Aborted
        );
        assert_eq!(run(MachineKind::Prefix, &prog("111"), None, b()).status, RunStatus::Aborted);
    }

    #[test]
    fn reading_past_condition_end() {
        let out = run(MachineKind::TwicePrefix, &prog("011011000"), Some(&[1]), b());
        assert_eq!(out.status, RunStatus::CondExhausted);
        assert_eq!(out.consumed_condition, 1);
        let out = run(MachineKind::CondLengthAware, &prog("101000"), Some(&[]), b());
        assert_eq!(out.status, RunStatus::CondExhausted);
    }

    #[test]
    fn branch_on_end_skips_next_opcode() {
        // BRE, EMIT1, EMIT0, HALT: at the end of the condition EMIT1 is skipped.
        let p = prog("110010001000");
        let at_end = run(MachineKind::CondLengthAware, &p, Some(&[]), b());
        assert_eq!(at_end.status, RunStatus::Halted);
        assert_eq!(at_end.output, vec![0]);
        let not_end = run(MachineKind::CondLengthAware, &p, Some(&[1]), b());
        assert_eq!(not_end.output, vec![1, 0]);
    }

    #[test]
    fn dup_on_empty_is_a_unit_cost_noop() {
        let out = run(MachineKind::Prefix, &prog("100000"), None, b());
        assert_eq!(out.status, RunStatus::Halted);
        assert!(out.output.is_empty());
        assert_eq!(out.steps, 2);
    }

    #[test]
    fn trailing_bits_exhaust_the_program() {
        let out = run(MachineKind::Prefix, &prog("00101"), None, b());
        assert_eq!(out.status, RunStatus::ProgramExhausted);
        assert_eq!(out.consumed_program, 3);
        assert_eq!(out.output, vec![0]);
    }

    #[test]
    fn budgets_are_enforced() {
        // EMIT0, five DUPs and HALT cost 1 + (1 + 2 + 4 + 8 + 16) + 1 = 33 steps.
        let p = prog("001100100100100100000");
        assert_eq!(run(MachineKind::Prefix, &p, None, Budget::steps(33)).status, RunStatus::Halted);
        assert_eq!(
            run(MachineKind::Prefix, &p, None, Budget::steps(32)).status,
            RunStatus::StepLimit
        );
        assert_eq!(
            run(MachineKind::Prefix, &p, None, Budget::new(100, 16).unwrap()).status,
            RunStatus::OutputLimit
        );
        assert!(Budget::new(0, 1).is_err());
    }

    #[test]
    fn consumed_prefix_examples() {
        assert_eq!(minimal_consumed_prefix(&[0, 0, 1, 0, 0, 0], &[0], b()), Some(3));
        assert_eq!(
            minimal_consumed_prefix(&[1, 0, 0, 0, 0, 1, 1, 1, 1], &[0], b()),
            Some(6)
        );
        assert_eq!(minimal_consumed_prefix(&[0, 0, 0, 0, 0, 0], &[0], b()), None);
        assert_eq!(minimal_consumed_prefix(&[0, 1, 0], &[0], b()), None);
    }

    fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..2, 0..max)
    }

    fn kind() -> impl Strategy<Value = MachineKind> {
        prop_oneof![
            Just(MachineKind::Prefix),
            Just(MachineKind::Monotone),
            Just(MachineKind::TwicePrefix),
            Just(MachineKind::CondLengthAware),
        ]
    }

    proptest! {
        #[test]
        fn padding_unread_bits_changes_nothing(
            k in kind(), p in bits(24), c in bits(6), pad_p in bits(9), pad_c in bits(4)
        ) {
            let cond = k.takes_condition().then_some(c.as_slice());
            let out = run(k, &Program::new(p.clone()), cond, b());
            prop_assume!(out.status != RunStatus::ProgramExhausted);
            let mut padded = p[..out.consumed_program].to_vec();
            padded.extend(&pad_p);
            let again = run(k, &Program::new(padded.clone()), cond, b());
            prop_assert_eq!(&again, &out);
            // The length-aware machine sees the condition end, so only the
            // self-delimiting kinds are condition-padding invariant.
            if k == MachineKind::TwicePrefix && out.status != RunStatus::CondExhausted {
                let mut cpad = c[..out.consumed_condition].to_vec();
                cpad.extend(&pad_c);
                let again = run(k, &Program::new(padded), Some(&cpad), b());
                prop_assert_eq!(again, out);
            }
        }

        #[test]
        fn monotone_output_only_grows(p in bits(30)) {
            let mut state = MachineState::new(MachineKind::Monotone, None, b());
            let mut previous = Vec::new();
            for g in p.chunks_exact(3) {
                let done = state.exec(Opcode::from_bits(g));
                prop_assert!(crate::strings::is_prefix(&previous, state.output()));
                previous = state.output().to_vec();
                if done.is_some() { break; }
            }
        }

    }

    #[test]
    fn twice_prefix_halts_identically_on_prolonged_conditions() {
        let programs = crate::strings::all_strings_upto(2, 12);
        let conditions = crate::strings::all_strings_upto(2, 3);
        for p in &programs {
            for c in &conditions {
                let out = run(MachineKind::TwicePrefix, &Program::new(p.clone()), Some(c), b());
                if out.status != RunStatus::Halted {
                    continue;
                }
                for z in [&[0u8][..], &[1], &[1, 0, 1]] {
                    let longer = [c.as_slice(), z].concat();
                    let again = run(MachineKind::TwicePrefix, &Program::new(p.clone()), Some(&longer), b());
                    assert_eq!(again, out);
                }
            }
        }
    }
}
