//! Entanglement produced by controlled scattering, the conditions for
//! maximal and vanishing entanglement, and single-qubit gates realised by
//! the star graph.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::StarPhaseParams;
use crate::qubit::ControlledPair;
use crate::scattering::star4_phase_form;

/// Radicands this far outside `[0, 1]` are clamped; anything further is an error.
pub const RADICAND_TOL: f64 = 1e-12;

/// Default tolerance for gate verification.
pub const GATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// von Neumann entropy of either reduced state, in bits.
    pub entropy: f64,
    pub max_ent_residual: f64,
    pub separability_residual: f64,
}

// |r_A|^2 |t_A|^2 (1 - |r_B r_B'^* + t_B t_B'^*|^2), which equals
// lambda_plus * lambda_minus.
fn mixing_term(pair: &ControlledPair) -> f64 {
    pair.a.r.norm_sqr() * pair.a.t.norm_sqr() * (1.0 - pair.bob_overlap().norm_sqr())
}

/// Eigenvalues `(lambda_plus, lambda_minus)` of Alice's reduced state, in
/// closed form.
pub fn lambda_pm(pair: &ControlledPair) -> Result<(f64, f64)> {
    let d = mixing_term(pair);
    let radicand = 1.0 - 4.0 * d;
    if !(-RADICAND_TOL..=1.0 + RADICAND_TOL).contains(&radicand) {
        return Err(Error::InconsistentInput(format!(
            "eigenvalue radicand {radicand} is outside [0, 1]; amplitudes are not normalized"
        )));
    }
    let d = d.clamp(0.0, 0.25);
    let plus = 0.5 * (1.0 + (1.0 - 4.0 * d).sqrt());
    // d / plus instead of (1 - sqrt)/2: no cancellation near separability
    Ok((plus, d / plus))
}

/// von Neumann entropy in bits of a two-level spectrum, with `0 log 0 = 0`.
pub fn entropy(lambdas: (f64, f64)) -> f64 {
    let h = |l: f64| if l > 0.0 { -l * l.log2() } else { 0.0 };
    (h(lambdas.0) + h(lambdas.1)).clamp(0.0, 1.0)
}

/// Distance of the mixing term from its maximal value 1/4.
pub fn max_ent_residual(pair: &ControlledPair) -> f64 {
    (mixing_term(pair) - 0.25).abs()
}

/// The mixing term itself; zero exactly when the joint state is a product.
pub fn separability_residual(pair: &ControlledPair) -> f64 {
    mixing_term(pair).abs()
}

pub fn analyze(pair: &ControlledPair) -> Result<EntanglementReport> {
    let (lambda_plus, lambda_minus) = lambda_pm(pair)?;
    Ok(EntanglementReport {
        lambda_plus,
        lambda_minus,
        entropy: entropy((lambda_plus, lambda_minus)),
        max_ent_residual: max_ent_residual(pair),
        separability_residual: separability_residual(pair),
    })
}

/// Stub phase that maximises the entanglement of two star graphs for Bob's
/// stub argument `kb_l`. Branches are spaced by `pi` through `n`.
pub fn solve_phi(kb_l: f64, n: i64) -> f64 {
    let (s, c) = (2.0 * kb_l).sin_cos();
    -(3.0 * s / (5.0 + 3.0 * c)).atan() + (2 * n + 1) as f64 * FRAC_PI_2
}

/// `|tan(x) tan(x + phi) + 4|`, the plug-back residual of [`solve_phi`].
///
/// Within `1e-6` of a pole of either tangent the cleared-denominator form
/// `|sin x sin(x+phi) + 4 cos x cos(x+phi)|` is returned instead.
pub fn tan_product_residual(x: f64, phi: f64) -> f64 {
    let (s1, c1) = x.sin_cos();
    let (s2, c2) = (x + phi).sin_cos();
    if c1.abs() < 1e-6 || c2.abs() < 1e-6 {
        (s1 * s2 + 4.0 * c1 * c2).abs()
    } else {
        ((s1 / c1) * (s2 / c2) + 4.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Identity,
    GlobalPhase { delta: f64 },
    /// Any `alpha` works; `beta` follows from it.
    PauliX { alpha: f64 },
    PauliZ,
    /// `plus` picks the sign shared by the stub argument and `beta`.
    Hadamard { plus: bool },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Identity => "identity",
            Gate::GlobalPhase { .. } => "global-phase",
            Gate::PauliX { .. } => "pauli-x",
            Gate::PauliZ => "pauli-z",
            Gate::Hadamard { .. } => "hadamard",
        }
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        let c = |re: f64| Complex64::new(re, 0.0);
        match *self {
            Gate::Identity => Matrix2::identity(),
            Gate::GlobalPhase { delta } => Matrix2::identity() * Complex64::from_polar(1.0, delta),
            Gate::PauliX { .. } => Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0)),
            Gate::PauliZ => Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0)),
            Gate::Hadamard { .. } => Matrix2::new(c(1.0), c(1.0), c(1.0), c(-1.0)) * c(FRAC_1_SQRT_2),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a gate name with default parameters (`delta = 0`, `alpha = 0`,
/// plus sign).
impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Gate::Identity),
            "global-phase" => Ok(Gate::GlobalPhase { delta: 0.0 }),
            "pauli-x" => Ok(Gate::PauliX { alpha: 0.0 }),
            "pauli-z" => Ok(Gate::PauliZ),
            "hadamard" => Ok(Gate::Hadamard { plus: true }),
            other => Err(Error::InconsistentInput(format!("unknown gate {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub gate: Gate,
    pub n_phi: i64,
    pub n_alpha: i64,
    pub n_beta: i64,
}

impl GateSpec {
    pub fn new(gate: Gate) -> Self {
        GateSpec {
            gate,
            n_phi: 0,
            n_alpha: 0,
            n_beta: 0,
        }
    }

    pub fn with_offsets(gate: Gate, n_phi: i64, n_alpha: i64, n_beta: i64) -> Self {
        GateSpec {
            gate,
            n_phi,
            n_alpha,
            n_beta,
        }
    }
}

/// Star-graph parameters `(x, alpha, beta)` realising `spec.gate`.
pub fn gate_params(spec: &GateSpec) -> StarPhaseParams {
    let (nf, na, nb) = (spec.n_phi as f64, spec.n_alpha as f64, spec.n_beta as f64);
    let (x, alpha, beta) = match spec.gate {
        Gate::Identity => ((nf + 0.5) * PI, (na + 0.5) * PI, (nb + 0.5) * PI),
        Gate::GlobalPhase { delta } => (
            (nf + 0.5) * PI,
            (na + 0.5) * PI + delta / 2.0,
            (nb + 0.5) * PI + delta / 2.0,
        ),
        Gate::PauliX { alpha } => (nf * PI, alpha, 2.0 * nb * PI - alpha),
        Gate::PauliZ => ((nf + 0.5) * PI, (na + 0.5) * PI, nb * PI),
        Gate::Hadamard { plus } => {
            let sign = if plus { 1.0 } else { -1.0 };
            (
                sign * 2f64.atan() + nf * PI,
                (na - 3.0 / 8.0) * PI,
                (2.0 * nb - na + sign / 8.0) * PI,
            )
        }
    };
    StarPhaseParams { x, alpha, beta }
}

/// Max elementwise distance between `candidate` and `target` after rotating
/// `candidate` onto `target`'s phase at the first largest-magnitude entry of
/// `target` (row-major).
pub fn deviation_up_to_global_phase(
    candidate: &Matrix2<Complex64>,
    target: &Matrix2<Complex64>,
) -> f64 {
    let entries = |m: &Matrix2<Complex64>| [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
    let (cand, targ) = (entries(candidate), entries(target));
    let largest = targ.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = targ
        .iter()
        .position(|z| z.norm() >= largest - 1e-12)
        .expect("matrix has entries");
    if cand[pivot].norm() == 0.0 {
        return f64::INFINITY;
    }
    let rotate = (targ[pivot] / targ[pivot].norm()) / (cand[pivot] / cand[pivot].norm());
    cand.iter()
        .zip(&targ)
        .map(|(c, t)| (c * rotate - t).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub spec: GateSpec,
    pub params: StarPhaseParams,
    pub achieved: Matrix2<Complex64>,
    pub target: Matrix2<Complex64>,
    pub deviation: f64,
    pub passed: bool,
}

/// Builds the star-graph S-matrix for `spec` and compares it with the ideal
/// gate up to a global phase.
pub fn verify_gate(spec: &GateSpec, tol: f64) -> GateReport {
    let params = gate_params(spec);
    let s = star4_phase_form(params).entries;
    let achieved = Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
    let target = spec.gate.matrix();
    let deviation = deviation_up_to_global_phase(&achieved, &target);
    GateReport {
        spec: *spec,
        params,
        achieved,
        target,
        deviation,
        passed: deviation <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{channel_phase_pair, ControlledPair};
    use crate::scattering::{rt_channel, ChannelSMatrix};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn prob_channel(p_t: f64) -> ChannelSMatrix {
        ChannelSMatrix::new(c((1.0 - p_t).sqrt(), 0.0), c(0.0, p_t.sqrt()), None).unwrap()
    }

    #[test]
    fn separable_pair_has_unit_eigenvalue() {
        let (a, b) = (rt_channel(0.7), rt_channel(1.2));
        let (lp, lm) = lambda_pm(&ControlledPair::new(a, b, b)).unwrap();
        assert_abs_diff_eq!(lp, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lm, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn maximal_pair_has_equal_eigenvalues() {
        let a = rt_channel(2f64.atan());
        let b = prob_channel(0.3);
        // orthogonal partner: (r, t) -> (-t*, r*) swaps the probabilities
        let bp = ChannelSMatrix::new(-b.t.conj(), b.r.conj(), None).unwrap();
        let pair = ControlledPair::new(a, b, bp);
        assert!(pair.bob_overlap().norm() < 1e-15);
        let (lp, lm) = lambda_pm(&pair).unwrap();
        assert_abs_diff_eq!(lp, 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(lm, 0.5, epsilon = 1e-7);
        assert!(max_ent_residual(&pair) < 1e-12);
        assert_abs_diff_eq!(separability_residual(&pair), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(analyze(&pair).unwrap().entropy, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unnormalized_amplitudes_are_rejected() {
        let bogus = ChannelSMatrix {
            r: c(1.0, 0.0),
            t: c(1.0, 0.0),
            k: None,
        };
        let b = rt_channel(0.5);
        let bp = ChannelSMatrix::new(-b.t.conj(), b.r.conj(), None).unwrap();
        assert!(matches!(
            lambda_pm(&ControlledPair::new(bogus, b, bp)),
            Err(Error::InconsistentInput(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy((1.0, 0.0)), 0.0);
        assert_eq!(entropy((0.5, 0.5)), 1.0);
        // -0.75 log2 0.75 - 0.25 log2 0.25
        assert_abs_diff_eq!(entropy((0.75, 0.25)), 0.8112781244591328, epsilon = 1e-15);
    }

    #[test]
    fn channel_phase_quarter_example() {
        // |t_A|^2 = 1/2, |t_B|^2 = 1/4, phi = pi: det term 0.1875 gives (3/4, 1/4)
        let pair = channel_phase_pair(prob_channel(0.5), prob_channel(0.25), PI);
        let (lp, lm) = lambda_pm(&pair).unwrap();
        assert_abs_diff_eq!(lp, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(lm, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(entropy((lp, lm)), 0.8112781244591328, epsilon = 1e-14);
    }

    #[test]
    fn residual_examples() {
        let (a, b) = (rt_channel(0.9), rt_channel(0.3));
        let sep = ControlledPair::new(a, b, b);
        assert_abs_diff_eq!(max_ent_residual(&sep), 0.25, epsilon = 1e-15);
        assert!(separability_residual(&sep) < 1e-15);

        let opaque = ChannelSMatrix::new(c(-1.0, 0.0), c(0.0, 0.0), None).unwrap();
        assert_eq!(
            separability_residual(&ControlledPair::new(opaque, b, rt_channel(2.0))),
            0.0
        );

        let theta = 1.234;
        let phase = Complex64::from_polar(1.0, theta);
        let bp = ChannelSMatrix::new(b.r * phase, b.t * phase, None).unwrap();
        assert!(separability_residual(&ControlledPair::new(a, b, bp)) < 1e-15);
    }

    #[test]
    fn probability_swap_alone_is_not_enough() {
        // |t_B'|^2 = |r_B|^2 but with phases that keep the overlap nonzero
        let a = rt_channel(2f64.atan());
        let b = ChannelSMatrix::new(c(0.6, 0.0), c(0.0, 0.8), None).unwrap();
        let bp = ChannelSMatrix::new(c(0.8, 0.0), c(0.0, 0.6), None).unwrap();
        let pair = ControlledPair::new(a, b, bp);
        // overlap = 0.48 + 0.48 = 0.96
        assert_abs_diff_eq!(pair.bob_overlap().re, 0.96, epsilon = 1e-15);
        assert!(max_ent_residual(&pair) > 0.2);
        assert!(analyze(&pair).unwrap().entropy < 1.0);
    }

    #[test]
    fn solve_phi_examples() {
        let x = PI / 4.0;
        let phi = solve_phi(x, 0);
        assert_abs_diff_eq!(phi, -(0.6f64).atan() + FRAC_PI_2, epsilon = 1e-15);
        assert!(tan_product_residual(x, phi) <= 1e-9);

        let phi = solve_phi(FRAC_PI_2, 0);
        assert_abs_diff_eq!(phi, FRAC_PI_2, epsilon = 1e-15);
        assert!(tan_product_residual(FRAC_PI_2, phi) <= 1e-9);

        for x in [0.1, 1.0, 2.2, -0.7] {
            assert_abs_diff_eq!(solve_phi(x, 1) - solve_phi(x, 0), PI, epsilon = 1e-15);
        }
    }

    #[test]
    fn table_gate_parameters() {
        let p = gate_params(&GateSpec::new(Gate::Identity));
        assert_eq!((p.x, p.alpha, p.beta), (FRAC_PI_2, FRAC_PI_2, FRAC_PI_2));

        let p = gate_params(&GateSpec::new(Gate::GlobalPhase { delta: PI / 3.0 }));
        assert_abs_diff_eq!(p.x, FRAC_PI_2);
        assert_abs_diff_eq!(p.alpha, FRAC_PI_2 + PI / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.beta, FRAC_PI_2 + PI / 6.0, epsilon = 1e-15);

        let p = gate_params(&GateSpec::new(Gate::Hadamard { plus: true }));
        assert_abs_diff_eq!(p.x, 2f64.atan());
        assert_abs_diff_eq!(p.alpha, -3.0 * PI / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.beta, PI / 8.0, epsilon = 1e-15);

        let p = gate_params(&GateSpec::with_offsets(Gate::PauliX { alpha: 0.3 }, 2, 0, 1));
        assert_abs_diff_eq!(p.x, 2.0 * PI);
        assert_abs_diff_eq!(p.alpha + p.beta, 2.0 * PI, epsilon = 1e-15);
    }

    #[test]
    fn table_gates_verify() {
        let id = verify_gate(&GateSpec::new(Gate::Identity), 1e-12);
        assert!(id.passed, "{}", id.deviation);
        let z = verify_gate(&GateSpec::new(Gate::PauliZ), 1e-12);
        assert!(z.passed, "{}", z.deviation);
        let h = verify_gate(&GateSpec::new(Gate::Hadamard { plus: true }), 1e-10);
        assert!(h.passed, "{}", h.deviation);
    }

    #[test]
    fn hadamard_minus_row_does_not_reproduce_h() {
        // Neither sign coupling of the minus row gives H up to phase.
        let minus = verify_gate(&GateSpec::new(Gate::Hadamard { plus: false }), 1e-10);
        assert!(!minus.passed);
        assert_abs_diff_eq!(minus.deviation, 1.3065629648763766, epsilon = 1e-12);
        let h = Gate::Hadamard { plus: true }.matrix();
        for (xs, bs) in [(1.0, -1.0), (-1.0, 1.0)] {
            let s = star4_phase_form(StarPhaseParams {
                x: xs * 2f64.atan(),
                alpha: -3.0 * PI / 8.0,
                beta: bs * PI / 8.0,
            })
            .entries;
            let m = Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
            assert!(deviation_up_to_global_phase(&m, &h) > 0.5);
        }
    }

    #[test]
    fn global_phase_comparison() {
        let z = Gate::PauliZ.matrix();
        let rotated = z * Complex64::from_polar(1.0, 2.1);
        assert!(deviation_up_to_global_phase(&rotated, &z) < 1e-15);
        let x = Gate::PauliX { alpha: 0.0 }.matrix();
        assert!(deviation_up_to_global_phase(&x, &z).is_infinite());
        assert!(deviation_up_to_global_phase(&Matrix2::identity(), &z) > 1.9);
    }

    #[test]
    fn gate_names_parse() {
        for name in ["identity", "global-phase", "pauli-x", "pauli-z", "hadamard"] {
            assert_eq!(name.parse::<Gate>().unwrap().name(), name);
        }
        assert!("toffoli".parse::<Gate>().is_err());
    }
}
