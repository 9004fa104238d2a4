use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::defaults;
use crate::error::{Error, Result};

/// Pure-state norm tolerance.
pub const STATE_TOLERANCE: f64 = 1e-9;
pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Smallest eigenvalue accepted is −EIGEN_TOLERANCE.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

/// State of an N-site register. Basis index bit n is site n (1 = excited).
#[derive(Debug, Clone, PartialEq)]
pub enum RegisterState {
    Pure { n_sites: usize, amplitudes: Array1<C64> },
    Density { n_sites: usize, rho: Array2<C64> },
}

impl RegisterState {
    fn check_size(n_sites: usize, max: usize) -> Result<usize> {
        if n_sites == 0 || n_sites > max {
            return Err(Error::range("dynamics", format!("{n_sites} sites (limit {max})")));
        }
        Ok(1 << n_sites)
    }

    /// All sites in the ground state.
    pub fn ground(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, 0)
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let dim = Self::check_size(n_sites, defaults::MAX_PURE_SITES)?;
        if index >= dim {
            return Err(Error::State(format!("basis index {index} ≥ {dim}")));
        }
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(RegisterState::Pure { n_sites, amplitudes })
    }

    pub fn pure(n_sites: usize, amplitudes: Array1<C64>) -> Result<Self> {
        let dim = Self::check_size(n_sites, defaults::MAX_PURE_SITES)?;
        if amplitudes.len() != dim {
            return Err(Error::State(format!(
                "{} amplitudes for dimension {dim}",
                amplitudes.len()
            )));
        }
        let s = RegisterState::Pure { n_sites, amplitudes };
        s.check()?;
        Ok(s)
    }

    pub fn density(n_sites: usize, rho: Array2<C64>) -> Result<Self> {
        let dim = Self::check_size(n_sites, defaults::MAX_DENSITY_SITES)?;
        if rho.dim() != (dim, dim) {
            return Err(Error::State(format!(
                "density matrix shape {:?} for dimension {dim}",
                rho.dim()
            )));
        }
        let s = RegisterState::Density { n_sites, rho };
        s.check()?;
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        match self {
            RegisterState::Pure { n_sites, .. } | RegisterState::Density { n_sites, .. } => *n_sites,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, RegisterState::Pure { .. })
    }

    /// Occupation probability of basis state `index`.
    pub fn probability(&self, index: usize) -> f64 {
        match self {
            RegisterState::Pure { amplitudes, .. } => amplitudes[index].norm_sqr(),
            RegisterState::Density { rho, .. } => rho[[index, index]].re,
        }
    }

    pub fn excitation_probability(&self, site: usize) -> f64 {
        let bit = 1 << site;
        (0..self.dim())
            .filter(|b| b & bit != 0)
            .map(|b| self.probability(b))
            .sum()
    }

    pub fn excitation_probabilities(&self) -> Vec<f64> {
        (0..self.n_sites()).map(|s| self.excitation_probability(s)).collect()
    }

    /// |⟨σ⁺_n σ⁻_m⟩|, the exchange coherence between two sites.
    pub fn exchange_coherence(&self, n: usize, m: usize) -> f64 {
        let (bn, bm) = (1 << n, 1 << m);
        let mut acc = C64::new(0.0, 0.0);
        for b in 0..self.dim() {
            // σ⁺_n σ⁻_m maps b (n = 0, m = 1) to b' (n = 1, m = 0)
            if b & bn == 0 && b & bm != 0 {
                let b2 = b ^ bn ^ bm;
                acc += match self {
                    RegisterState::Pure { amplitudes, .. } => amplitudes[b2].conj() * amplitudes[b],
                    RegisterState::Density { rho, .. } => rho[[b, b2]],
                };
            }
        }
        acc.norm()
    }

    pub fn to_density(&self) -> Result<RegisterState> {
        match self {
            RegisterState::Density { .. } => Ok(self.clone()),
            RegisterState::Pure { n_sites, amplitudes } => {
                Self::check_size(*n_sites, defaults::MAX_DENSITY_SITES)?;
                let dim = amplitudes.len();
                let rho = Array2::from_shape_fn((dim, dim), |(i, j)| amplitudes[i] * amplitudes[j].conj());
                Ok(RegisterState::Density { n_sites: *n_sites, rho })
            }
        }
    }

    /// ⟨ψ|ρ|ψ⟩ for a target pure state given as amplitudes.
    pub fn fidelity_with(&self, target: &Array1<C64>) -> f64 {
        match self {
            RegisterState::Pure { amplitudes, .. } => {
                let overlap: C64 = target.iter().zip(amplitudes).map(|(t, a)| t.conj() * a).sum();
                overlap.norm_sqr()
            }
            RegisterState::Density { rho, .. } => {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..target.len() {
                    for j in 0..target.len() {
                        acc += target[i].conj() * rho[[i, j]] * target[j];
                    }
                }
                acc.re
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|b| self.probability(b)).sum()
    }

    /// Multiply every amplitude with site n excited by e^{−iζ_n}
    /// (ρ transforms as U ρ U†).
    pub fn apply_phases(&mut self, phases: &[f64]) {
        let dim = self.dim();
        let factor: Vec<C64> = (0..dim)
            .map(|b| {
                let z: f64 = phases
                    .iter()
                    .enumerate()
                    .filter(|(n, _)| b >> n & 1 == 1)
                    .map(|(_, z)| z)
                    .sum();
                C64::from_polar(1.0, -z)
            })
            .collect();
        match self {
            RegisterState::Pure { amplitudes, .. } => {
                for (a, f) in amplitudes.iter_mut().zip(&factor) {
                    *a *= f;
                }
            }
            RegisterState::Density { rho, .. } => {
                for ((i, j), r) in rho.indexed_iter_mut() {
                    *r *= factor[i] * factor[j].conj();
                }
            }
        }
    }

    /// Norm (pure) or trace, hermiticity and positivity (density).
    pub fn check(&self) -> Result<()> {
        let tr = self.trace();
        let tol = if self.is_pure() {
            STATE_TOLERANCE
        } else {
            TRACE_TOLERANCE
        };
        if !((tr - 1.0).abs() <= tol) {
            return Err(Error::State(format!("trace/norm {tr} differs from 1")));
        }
        if let RegisterState::Density { rho, .. } = self {
            let dim = rho.nrows();
            for i in 0..dim {
                for j in 0..=i {
                    if (rho[[i, j]] - rho[[j, i]].conj()).norm() > HERMITIAN_TOLERANCE {
                        return Err(Error::State("density matrix is not Hermitian".into()));
                    }
                }
            }
            if !positive_semidefinite(rho, EIGEN_TOLERANCE) {
                return Err(Error::State("density matrix has a negative eigenvalue".into()));
            }
        }
        Ok(())
    }
}

/// Cholesky of ρ + εI succeeds iff ρ has no eigenvalue below −ε (up to
/// rounding).
fn positive_semidefinite(rho: &Array2<C64>, eps: f64) -> bool {
    let n = rho.nrows();
    let mut l = Array2::<C64>::zeros((n, n));
    for j in 0..n {
        let mut d = rho[[j, j]].re + eps;
        for k in 0..j {
            d -= l[[j, k]].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[[j, j]] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = rho[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]].conj();
            }
            l[[i, j]] = s / d;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_probabilities() {
        let s = RegisterState::basis(3, 0b101).unwrap();
        assert_eq!(s.excitation_probabilities(), vec![1.0, 0.0, 1.0]);
        assert!(RegisterState::basis(2, 4).is_err());
        assert!(RegisterState::ground(11).is_err());
    }

    #[test]
    fn invalid_states_rejected() {
        let amps = Array1::from(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(RegisterState::pure(1, amps), Err(Error::State(_))));
        let mut rho = Array2::zeros((2, 2));
        rho[[0, 0]] = C64::new(1.2, 0.0);
        rho[[1, 1]] = C64::new(-0.2, 0.0);
        assert!(matches!(RegisterState::density(1, rho), Err(Error::State(_))));
        let mut rho = Array2::zeros((2, 2));
        rho[[0, 0]] = C64::new(0.5, 0.0);
        rho[[1, 1]] = C64::new(0.5, 0.0);
        rho[[0, 1]] = C64::new(0.5, 0.0);
        rho[[1, 0]] = C64::new(0.4, 0.0);
        assert!(RegisterState::density(1, rho).is_err());
        assert!(RegisterState::density(7, Array2::zeros((128, 128))).is_err());
    }

    #[test]
    fn coherence_and_density_agree() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = Array1::from(vec![
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
            C64::new(0.0, h),
            C64::new(0.0, 0.0),
        ]);
        let p = RegisterState::pure(2, amps.clone()).unwrap();
        let d = p.to_density().unwrap();
        d.check().unwrap();
        assert!((p.exchange_coherence(0, 1) - 0.5).abs() < 1e-15);
        assert!((d.exchange_coherence(0, 1) - 0.5).abs() < 1e-15);
        assert!((d.fidelity_with(&amps) - 1.0).abs() < 1e-15);
        let mut q = p.clone();
        q.apply_phases(&[0.0, -std::f64::consts::FRAC_PI_2]);
        // site-1 amplitude picks up e^{iπ/2}
        if let RegisterState::Pure { amplitudes, .. } = &q {
            assert!((amplitudes[2] - C64::new(-h, 0.0)).norm() < 1e-15);
        }
    }
}
