//! Assemble a few programs and run them on each machine kind.

use kstar_lab::machine::{run, Budget, MachineKind, Opcode, Program};
use kstar_lab::strings;

fn main() {
    use Opcode::*;
    let budget = Budget::steps(100);

    let programs = [
        ("emit 101", Program::from_opcodes(&[Emit1, Emit0, Emit1, Halt])),
        ("copy condition", Program::from_opcodes(&[ReadCond, ReadCond, Halt])),
        ("double", Program::from_opcodes(&[Emit1, Emit0, Dup, Dup, Halt])),
        ("abort", Program::from_opcodes(&[Emit1, Abort])),
        ("no halt", Program::from_opcodes(&[Emit0, Emit0])),
    ];

    for (label, p) in &programs {
        println!("{label}: {p}");
        for kind in [MachineKind::Prefix, MachineKind::Monotone, MachineKind::TwicePrefix, MachineKind::CondLengthAware] {
            let cond: Option<&[u8]> = kind.takes_condition().then_some(&[0, 1][..]);
            let out = run(kind, p, cond, budget);
            println!(
                "  {:<16} {:?} output={} steps={} read={}",
                kind.name(),
                out.status,
                strings::show(&out.output),
                out.steps,
                out.consumed_condition,
            );
        }
    }

    let tight = run(MachineKind::Prefix, &programs[2].1, None, Budget::steps(3));
    println!("double with 3 steps: {:?}", tight.status);
}
