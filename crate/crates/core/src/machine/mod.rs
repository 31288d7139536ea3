//! Toy computers: fixed quantum circuits over the string space and a tiny
//! classical register machine whose programs can be enumerated exhaustively.

mod classical;
mod quantum;

pub use classical::{
    classical_complexity, complexity_table, decode, run_classical, ClassicalMachine, Instruction, ProgramJson,
    DEFAULT_STEP_LIMIT, MAX_PROGRAM_BITS,
};
pub use quantum::{make_machine, Family, MachineSpec, QuantumMachine, MAX_MACHINE_N};
