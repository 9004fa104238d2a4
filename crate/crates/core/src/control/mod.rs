//! Gate circuits, their compilation into control schedules, and schedule
//! validation against hardware limits and the decoherence budget.

mod circuit;
mod compile;
mod ideal;

pub use circuit::{parse_angle, Circuit, Gate};
pub use compile::{compile, validate, CompilationReport, CompileOptions, GateSlice, Limits};
pub use ideal::{apply_gate, ideal_state, ideal_unitary};

use crate::device::QubitParams;
use crate::dynamics::{evolve, EvolveOptions, RegisterState, Sampling};
use crate::error::Result;

/// Compile, simulate from every computational basis state, undo the frame
/// phases and return the fidelity with the ideal output for each input.
pub fn basis_fidelities(circuit: &Circuit, params: &QubitParams, options: &CompileOptions) -> Result<Vec<f64>> {
    let (schedule, report) = compile(circuit, params, options)?;
    let n = params.len();
    (0..1usize << n)
        .map(|b| {
            let initial = RegisterState::basis(n, b)?;
            let RegisterState::Pure { amplitudes, .. } = &initial else {
                unreachable!()
            };
            let target = ideal_state(circuit, amplitudes)?;
            let mut out = evolve(
                params,
                &schedule,
                &initial,
                None,
                &Sampling::Uniform(2),
                &EvolveOptions::default(),
            )?
            .final_state;
            report.correct_frame(&mut out);
            Ok(out.fidelity_with(&target))
        })
        .collect()
}
