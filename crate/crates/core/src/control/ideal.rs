use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

type M2 = [[C64; 2]; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn single_qubit(g: &Gate) -> Option<(usize, M2)> {
    match *g {
        Gate::Rx { theta, site } => {
            let (s, co) = (0.5 * theta).sin_cos();
            Some((site, [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]))
        }
        Gate::Ry { theta, site } => {
            let (s, co) = (0.5 * theta).sin_cos();
            Some((site, [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]))
        }
        Gate::Rz { theta, site } => Some((
            site,
            [
                [C64::from_polar(1.0, -0.5 * theta), c(0.0, 0.0)],
                [c(0.0, 0.0), C64::from_polar(1.0, 0.5 * theta)],
            ],
        )),
        _ => None,
    }
}

/// Apply a gate's ideal action to a state vector (bit n = site n).
pub fn apply_gate(g: &Gate, psi: &mut [C64]) -> Result<()> {
    if let Some((site, m)) = single_qubit(g) {
        let bit = 1 << site;
        for b in 0..psi.len() {
            if b & bit == 0 {
                let (a0, a1) = (psi[b], psi[b | bit]);
                psi[b] = m[0][0] * a0 + m[0][1] * a1;
                psi[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        return Ok(());
    }
    match *g {
        Gate::Iswap { a, b } => {
            let (ba, bb) = (1 << a, 1 << b);
            for x in 0..psi.len() {
                if x & ba != 0 && x & bb == 0 {
                    let y = x ^ ba ^ bb;
                    let (u, v) = (psi[x], psi[y]);
                    psi[x] = v * c(0.0, 1.0);
                    psi[y] = u * c(0.0, 1.0);
                }
            }
            Ok(())
        }
        Gate::Cnot { control, target } => {
            let (bc, bt) = (1 << control, 1 << target);
            for x in 0..psi.len() {
                if x & bc != 0 && x & bt == 0 {
                    psi.swap(x, x | bt);
                }
            }
            Ok(())
        }
        _ => Err(Error::Circuit(format!(
            "{} has no ideal unitary (its outcome depends on the sweep rate)",
            g.name()
        ))),
    }
}

pub fn ideal_state(circuit: &Circuit, initial: &Array1<C64>) -> Result<Array1<C64>> {
    let mut psi = initial.to_vec();
    for g in &circuit.gates {
        apply_gate(g, &mut psi)?;
    }
    Ok(Array1::from(psi))
}

/// Full 2^N unitary of a circuit without sweep gates.
pub fn ideal_unitary(circuit: &Circuit) -> Result<Array2<C64>> {
    let dim = 1usize << circuit.n_qubits;
    let mut u = Array2::zeros((dim, dim));
    for j in 0..dim {
        let mut e = Array1::zeros(dim);
        e[j] = c(1.0, 0.0);
        let col = ideal_state(circuit, &e)?;
        u.column_mut(j).assign(&col);
    }
    Ok(u)
}
