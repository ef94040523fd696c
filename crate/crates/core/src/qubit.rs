//! Scattering channels as qubits and the controlled composition of two graphs.
//!
//! Lead 0 is `|0>` and lead 1 is `|1>`. A particle sent into lead 0 leaves
//! as `r|0> + t|1>`. In the two-graph system Alice's output channel selects
//! which of Bob's two configurations (B or B') scatters the second particle.
//! Two-qubit basis order is `|00>, |01>, |10>, |11>` with Alice first.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scattering::{ChannelSMatrix, DEFAULT_TOL};

/// Eigenvalues down to this (negative) value are accepted as rounding.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl QubitState {
    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }
}

/// Output state for a particle injected through lead 0.
pub fn scatter_state(s: &ChannelSMatrix) -> QubitState {
    QubitState { a0: s.r, a1: s.t }
}

/// Alice's graph plus Bob's two configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlledPair {
    pub a: ChannelSMatrix,
    pub b: ChannelSMatrix,
    /// Bob's graph when Alice's particle is transmitted.
    pub b_prime: ChannelSMatrix,
}

impl ControlledPair {
    pub fn new(a: ChannelSMatrix, b: ChannelSMatrix, b_prime: ChannelSMatrix) -> Self {
        ControlledPair { a, b, b_prime }
    }

    /// `r_B r_B'^* + t_B t_B'^*`, the overlap of Bob's two output states.
    pub fn bob_overlap(&self) -> Complex64 {
        self.b.r * self.b_prime.r.conj() + self.b.t * self.b_prime.t.conj()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub c00: Complex64,
    pub c01: Complex64,
    pub c10: Complex64,
    pub c11: Complex64,
}

impl JointState {
    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.c00, self.c01, self.c10, self.c11]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|c| c.norm_sqr()).sum()
    }

    /// Coefficients arranged with Alice's index on rows, Bob's on columns.
    /// Its singular values are the Schmidt coefficients.
    pub fn amplitude_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.c00, self.c01, self.c10, self.c11)
    }
}

/// `r_A r_B |00> + r_A t_B |01> + t_A r_B' |10> + t_A t_B' |11>`.
pub fn joint_state(pair: &ControlledPair) -> JointState {
    let (a, b, bp) = (&pair.a, &pair.b, &pair.b_prime);
    JointState {
        c00: a.r * b.r,
        c01: a.r * b.t,
        c10: a.t * bp.r,
        c11: a.t * bp.t,
    }
}

/// Bob's configuration with an extra phase `e^{i phi}` on its transmission
/// channel when Alice's particle is transmitted.
pub fn channel_phase_pair(a: ChannelSMatrix, b: ChannelSMatrix, phi: f64) -> ControlledPair {
    let b_prime = ChannelSMatrix {
        r: b.r,
        t: b.t * Complex64::from_polar(1.0, phi),
        k: b.k,
    };
    ControlledPair { a, b, b_prime }
}

/// `r_A r_B |00> + r_A t_B |01> + t_A r_B |10> + e^{i phi} t_A t_B |11>`.
pub fn joint_state_channel_phase(a: &ChannelSMatrix, b: &ChannelSMatrix, phi: f64) -> JointState {
    joint_state(&channel_phase_pair(*a, *b, phi))
}

/// Hermitian, positive semidefinite, unit-trace 2x2 or 4x4 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity and trace to [`DEFAULT_TOL`] and eigenvalues to
    /// `>= -PSD_TOL`.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n || !(n == 2 || n == 4) {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected 2x2 or 4x4, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if !(herm <= DEFAULT_TOL) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let trace = entries.trace();
        if !((trace - 1.0).norm() <= DEFAULT_TOL) {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}")));
        }
        let rho = DensityMatrix { entries };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Eigenvalues in descending order, with values within [`PSD_TOL`] of
    /// zero clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.entries.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&l| if l.abs() <= PSD_TOL { l.max(0.0) } else { l })
            .collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }
}

/// The pure-state projector `|psi><psi|`.
pub fn density_matrix(state: &JointState) -> Result<DensityMatrix> {
    let psi = state.amplitudes();
    DensityMatrix::new(DMatrix::from_fn(4, 4, |i, j| psi[i] * psi[j].conj()))
}

fn require_joint(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() == 4 {
        Ok(())
    } else {
        Err(Error::InvalidDensityMatrix(format!(
            "partial trace needs a 4x4 matrix, got {0}x{0}",
            rho.dim()
        )))
    }
}

/// Alice's reduced state: trace over Bob.
pub fn reduce_a(rho: &DensityMatrix) -> Result<DensityMatrix> {
    require_joint(rho)?;
    let m = rho.entries();
    let out = DMatrix::from_fn(2, 2, |i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)]);
    DensityMatrix::new(out)
}

/// Bob's reduced state: trace over Alice.
pub fn reduce_b(rho: &DensityMatrix) -> Result<DensityMatrix> {
    require_joint(rho)?;
    let m = rho.entries();
    let out = DMatrix::from_fn(2, 2, |i, j| m[(i, j)] + m[(i + 2, j + 2)]);
    DensityMatrix::new(out)
}

/// Probability of finding Bob's particle in lead 1 when Alice transmits with
/// probability `p`: `(1 - p)|t_B|^2 + p |t_B'|^2`.
pub fn expected_transmission_b(p: f64, t_b: Complex64, t_bp: Complex64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok((1.0 - p) * t_b.norm_sqr() + p * t_bp.norm_sqr())
}
