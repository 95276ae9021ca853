use serde::{Deserialize, Serialize};

use super::{Instr, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunOutcome {
    pub halted: bool,
    /// Meaningful only when `halted`.
    pub output: bool,
    /// Instructions executed, including the halting one.
    pub steps: u64,
}

/// Runs `p` on `input` for at most `step_limit` steps.
pub fn run(p: &Program, input: &[bool], step_limit: u64) -> RunOutcome {
    run_traced(p, input, step_limit).0
}

/// Like [`run`], also returning how many leading input bits were inspected.
/// Any input of the same length that agrees on that prefix runs identically.
pub(super) fn run_traced(p: &Program, input: &[bool], step_limit: u64) -> (RunOutcome, usize) {
    let code = p.instrs();
    let mut pc = 0usize;
    let mut steps = 0u64;
    let mut head = 0usize;
    let mut work = vec![false; 8];
    let mut cell = 0usize;
    let mut inspected = 0usize;
    let halt = |output, steps| RunOutcome {
        halted: true,
        output,
        steps,
    };
    loop {
        if steps >= step_limit {
            return (
                RunOutcome {
                    halted: false,
                    output: false,
                    steps: step_limit,
                },
                inspected,
            );
        }
        steps += 1;
        let Some(&instr) = code.get(pc) else {
            return (halt(false, steps), inspected);
        };
        pc += 1;
        match instr {
            Instr::MoveIn => head = (head + 1).min(input.len()),
            Instr::BranchEof(a) => {
                if head >= input.len() {
                    pc = a;
                }
            }
            Instr::BranchIn(a) => {
                if head < input.len() {
                    inspected = inspected.max(head + 1);
                    if input[head] {
                        pc = a;
                    }
                }
            }
            Instr::MoveWL => cell = cell.saturating_sub(1),
            Instr::MoveWR => {
                cell += 1;
                if cell == work.len() {
                    work.push(false);
                }
            }
            Instr::ToggleW => work[cell] = !work[cell],
            Instr::BranchW(a) => {
                if work[cell] {
                    pc = a;
                }
            }
            Instr::Halt(b) => return (halt(b, steps), inspected),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::assemble;
    use Instr::*;

    #[test]
    fn infinite_loop_exhausts_limit() {
        let p = assemble(&[ToggleW, BranchW(1)]).unwrap();
        let out = run(&p, &[true], 50);
        assert_eq!((out.halted, out.steps), (false, 50));
    }

    #[test]
    fn echo_first_input_hand_trace() {
        // 0: BRANCH_EOF 3   1: BRANCH_IN 4   2: HALT 0   3: HALT 0   4: HALT 1
        let p = assemble(&[
            BranchEof(3),
            BranchIn(4),
            Halt(false),
            Halt(false),
            Halt(true),
        ])
        .unwrap();
        let out = run(&p, &[true], 10);
        assert_eq!((out.halted, out.output, out.steps), (true, true, 3));
        let out = run(&p, &[false], 10);
        assert_eq!((out.halted, out.output, out.steps), (true, false, 3));
        let out = run(&p, &[], 10);
        assert_eq!((out.halted, out.output, out.steps), (true, false, 2));
    }

    #[test]
    fn raising_the_limit_keeps_halted_outcomes() {
        for i in 1..3000u64 {
            let p = crate::machine::nth_machine(i);
            let input = [true, false, true];
            let low = run(&p, &input, 20);
            if low.halted {
                assert_eq!(run(&p, &input, 500), low);
            }
        }
    }

    #[test]
    fn work_tape_is_unbounded_rightward() {
        let mut prog = vec![MoveWR; 20];
        prog.extend([ToggleW, BranchW(23), Halt(false), Halt(true)]);
        let p = assemble(&prog).unwrap();
        let out = run(&p, &[], 100);
        assert_eq!((out.output, out.steps), (true, 23));
    }
}
