//! Energy-dependent scattering matrices of open graphs.
//!
//! Two routes are provided. [`global_smatrix`] solves the bond-scattering
//! linear system of an arbitrary graph. [`star4_analytic`],
//! [`star4_phase_form`] and [`rt_simplified`] are the closed forms for the
//! star graph of [`crate::graph::make_star4`].
//!
//! The closed forms carry a `tan x` that blows up at `x = (n + 1/2)pi`. All
//! of them are evaluated multiplied through by `cos x`, i.e. with `sin x` in
//! place of `tan x` and `2i cos x` in place of `2i`, so those points are
//! ordinary: `t = 0` and the reflection has unit modulus.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{self, BoundaryCondition, MetricGraph, StarPhaseParams};

/// Unitarity tolerance used when the caller does not pass one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Condition number above which the internal bond system is treated as singular.
pub const RESONANCE_CONDITION_LIMIT: f64 = 1e12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Reflection and transmission for a particle entering through lead 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSMatrix {
    pub r: Complex64,
    pub t: Complex64,
    /// Wavenumber of evaluation, when there is one.
    pub k: Option<f64>,
}

impl ChannelSMatrix {
    /// Checks `|r|^2 + |t|^2 = 1` to [`DEFAULT_TOL`].
    pub fn new(r: Complex64, t: Complex64, k: Option<f64>) -> Result<Self> {
        Self::with_tol(r, t, k, DEFAULT_TOL)
    }

    pub fn with_tol(r: Complex64, t: Complex64, k: Option<f64>, tol: f64) -> Result<Self> {
        let s = ChannelSMatrix { r, t, k };
        let residual = s.unitarity_residual();
        if residual.is_finite() && residual <= tol {
            Ok(s)
        } else {
            Err(Error::NotUnitary(residual))
        }
    }

    pub fn unitarity_residual(&self) -> f64 {
        (self.r.norm_sqr() + self.t.norm_sqr() - 1.0).abs()
    }

    /// `|Re(r t*)|`, which vanishes when `[[r, t], [t, r]]` is unitary.
    pub fn phase_lock_residual(&self) -> f64 {
        (self.r * self.t.conj()).re.abs()
    }

    /// The symmetric two-channel matrix `[[r, t], [t, r]]`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[self.r, self.t, self.t, self.r])
    }

    pub fn reflection_probability(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmission_probability(&self) -> f64 {
        self.t.norm_sqr()
    }
}

/// Full `c x c` scattering matrix; entry `(out, in)` is the amplitude from
/// lead `in` to lead `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullSMatrix {
    pub entries: DMatrix<Complex64>,
    pub k: Option<f64>,
}

impl FullSMatrix {
    pub fn channels(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |(S S^dagger - I)_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.entries.nrows();
        let prod = &self.entries * self.entries.adjoint();
        let id = DMatrix::<Complex64>::identity(n, n);
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &FullSMatrix) -> f64 {
        assert_eq!(self.entries.shape(), other.entries.shape());
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Column 0 as a [`ChannelSMatrix`]: `r = S[0,0]`, `t = S[1,0]`.
    ///
    /// Requires two channels and equal off-diagonal entries to within `tol`.
    pub fn to_channel(&self, tol: f64) -> Result<ChannelSMatrix> {
        if self.entries.shape() != (2, 2) {
            return Err(Error::NotTwoChannel(format!(
                "matrix is {}x{}",
                self.entries.nrows(),
                self.entries.ncols()
            )));
        }
        let asym = (self.entries[(0, 1)] - self.entries[(1, 0)]).norm();
        if asym > tol {
            return Err(Error::NotTwoChannel(format!(
                "off-diagonal entries differ by {asym:.3e}"
            )));
        }
        ChannelSMatrix::with_tol(self.entries[(0, 0)], self.entries[(1, 0)], self.k, tol)
    }
}

/// Single-vertex scattering matrix for a vertex of the given degree.
///
/// Standard conditions give `(2/d) J - I`; Dirichlet gives `-I`.
pub fn vertex_matrix(degree: usize, bc: BoundaryCondition) -> Result<DMatrix<Complex64>> {
    if degree == 0 {
        return Err(Error::ZeroDegree);
    }
    let m = match bc {
        BoundaryCondition::Standard => {
            let off = 2.0 / degree as f64;
            DMatrix::from_fn(degree, degree, |i, j| {
                Complex64::from(if i == j { off - 1.0 } else { off })
            })
        }
        BoundaryCondition::Dirichlet => -DMatrix::<Complex64>::identity(degree, degree),
    };
    Ok(m)
}

fn next_port(v: usize, degree: &mut [usize]) -> usize {
    degree[v] += 1;
    degree[v] - 1
}

// A directed bond leaves vertex `tail` through port `tail_port` and enters
// vertex `head` through port `head_port`.
struct Bond {
    tail: usize,
    tail_port: usize,
    head: usize,
    head_port: usize,
    theta: f64,
}

/// Scattering matrix of `graph` at wavenumber `k`.
///
/// Unknowns are the amplitudes leaving each vertex along each directed bond.
/// They satisfy `a = V D a + injection`, where `D` multiplies by
/// `exp(i(k l + phase))` along a bond and `V` scatters the arriving
/// amplitudes through the vertex matrices. Leads inject unit amplitude.
pub fn global_smatrix(graph: &MetricGraph, k: f64) -> Result<FullSMatrix> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidWavenumber(k));
    }
    graph::ensure_no_errors(&graph::validate(graph))?;

    let index: HashMap<&str, usize> = graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let nv = graph.vertices().len();
    let mut degree = vec![0usize; nv];

    let mut bonds = Vec::with_capacity(2 * graph.edges().len());
    for e in graph.edges() {
        let (a, b) = (index[e.a.as_str()], index[e.b.as_str()]);
        let pa = next_port(a, &mut degree);
        let pb = next_port(b, &mut degree);
        let theta = k * e.length + e.phase;
        bonds.push(Bond {
            tail: a,
            tail_port: pa,
            head: b,
            head_port: pb,
            theta,
        });
        bonds.push(Bond {
            tail: b,
            tail_port: pb,
            head: a,
            head_port: pa,
            theta,
        });
    }
    // (vertex, port) of each lead, in channel order
    let leads: Vec<(usize, usize)> = graph
        .leads()
        .iter()
        .map(|l| {
            let v = index[l.vertex.as_str()];
            (v, next_port(v, &mut degree))
        })
        .collect();

    let sigma: Vec<Option<DMatrix<Complex64>>> = graph
        .vertices()
        .iter()
        .zip(&degree)
        .map(|(v, &d)| (d > 0).then(|| vertex_matrix(d, graph.bc(v))).transpose())
        .collect::<Result<_>>()?;
    let sigma = |v: usize| sigma[v].as_ref().expect("vertex with ports has a matrix");

    let nb = bonds.len();
    let nc = leads.len();
    let mut arriving: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (j, b) in bonds.iter().enumerate() {
        arriving[b.head].push(j);
    }
    let phase: Vec<Complex64> = bonds.iter().map(|b| (I * b.theta).exp()).collect();

    // (I - V D) a = B, one column of B per injecting lead
    let mut system = DMatrix::<Complex64>::identity(nb, nb);
    let mut rhs = DMatrix::<Complex64>::zeros(nb, nc);
    for (i, b) in bonds.iter().enumerate() {
        let s = sigma(b.tail);
        for &j in &arriving[b.tail] {
            system[(i, j)] -= s[(b.tail_port, bonds[j].head_port)] * phase[j];
        }
        for (c, &(lv, lp)) in leads.iter().enumerate() {
            if lv == b.tail {
                rhs[(i, c)] += s[(b.tail_port, lp)];
            }
        }
    }

    let amplitudes = if nb == 0 {
        DMatrix::<Complex64>::zeros(0, nc)
    } else {
        let sv = system.clone().singular_values();
        let (max, min) = (sv.max(), sv.min());
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        if !(condition <= RESONANCE_CONDITION_LIMIT) {
            return Err(Error::Resonance { k, condition });
        }
        system
            .lu()
            .solve(&rhs)
            .ok_or(Error::Resonance { k, condition })?
    };

    let mut s = DMatrix::<Complex64>::zeros(nc, nc);
    for (out, &(ov, op)) in leads.iter().enumerate() {
        let sv = sigma(ov);
        for (inp, &(iv, ip)) in leads.iter().enumerate() {
            let mut z = if iv == ov {
                sv[(op, ip)]
            } else {
                Complex64::new(0.0, 0.0)
            };
            for &j in &arriving[ov] {
                z += sv[(op, bonds[j].head_port)] * phase[j] * amplitudes[(j, inp)];
            }
            s[(out, inp)] = z;
        }
    }
    Ok(FullSMatrix {
        entries: s,
        k: Some(k),
    })
}

// Common structure of the star-graph closed forms: the 2x2 matrix
// -1/(2i cos x + sin x) [[sin x e^{2ia}, -2i cos x e^{i(a+b)}], [.., sin x e^{2ib}]].
fn star_matrix(x: f64, alpha: f64, beta: f64) -> DMatrix<Complex64> {
    let (s, c) = x.sin_cos();
    let scale = -1.0 / (2.0 * I * c + s);
    let diag_a = scale * s * (2.0 * I * alpha).exp();
    let diag_b = scale * s * (2.0 * I * beta).exp();
    let off = scale * (-2.0 * I * c) * (I * (alpha + beta)).exp();
    DMatrix::from_row_slice(2, 2, &[diag_a, off, off, diag_b])
}

/// Closed-form S-matrix of the star graph with an extra phase `phi` on the stub.
pub fn star4_analytic_full(k: f64, l12: f64, l23: f64, l24: f64, phi: f64) -> Result<FullSMatrix> {
    for len in [l12, l23, l24] {
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::NonPositiveLength(len));
        }
    }
    Ok(FullSMatrix {
        entries: star_matrix(k * l23 + phi, k * l12, k * l24),
        k: Some(k),
    })
}

/// Reflection and transmission from lead 0 of the star graph.
pub fn star4_analytic(k: f64, l12: f64, l23: f64, l24: f64, phi: f64) -> Result<ChannelSMatrix> {
    let full = star4_analytic_full(k, l12, l23, l24, phi)?;
    Ok(ChannelSMatrix {
        r: full.entries[(0, 0)],
        t: full.entries[(1, 0)],
        k: Some(k),
    })
}

/// Star-graph S-matrix in terms of the phase-equivalent parameters.
pub fn star4_phase_form(params: StarPhaseParams) -> FullSMatrix {
    FullSMatrix {
        entries: star_matrix(params.x, params.alpha, params.beta),
        k: None,
    }
}

/// `R(x) = -tan x / (2i + tan x)` and `T(x) = 2i / (2i + tan x)`.
pub fn rt_simplified(x: f64) -> (Complex64, Complex64) {
    let (s, c) = x.sin_cos();
    let den = 2.0 * I * c + s;
    (-s / den, 2.0 * I * c / den)
}

/// [`rt_simplified`] packaged as a channel.
pub fn rt_channel(x: f64) -> ChannelSMatrix {
    let (r, t) = rt_simplified(x);
    ChannelSMatrix { r, t, k: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_star4, with_edge_phase, Edge, Lead, STAR4_E23};
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_matrix_eq(m: &DMatrix<Complex64>, expected: &[Complex64], tol: f64) {
        for (a, b) in m.transpose().iter().zip(expected) {
            assert!((a - b).norm() <= tol, "{m} vs {expected:?}");
        }
    }

    #[test]
    fn vertex_matrix_examples() {
        let m2 = vertex_matrix(2, BoundaryCondition::Standard).unwrap();
        assert_matrix_eq(&m2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)], 0.0);
        let m1 = vertex_matrix(1, BoundaryCondition::Standard).unwrap();
        assert_matrix_eq(&m1, &[c(1., 0.)], 0.0);
        let m3 = vertex_matrix(3, BoundaryCondition::Standard).unwrap();
        let (d, o) = (c(-1. / 3., 0.), c(2. / 3., 0.));
        assert_matrix_eq(&m3, &[d, o, o, o, d, o, o, o, d], 1e-15);
        let id = &m3 * m3.adjoint();
        assert_matrix_eq(
            &id,
            &DMatrix::<Complex64>::identity(3, 3).transpose().as_slice(),
            1e-15,
        );
        let dir = vertex_matrix(3, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(dir, -DMatrix::<Complex64>::identity(3, 3));
        assert!(matches!(
            vertex_matrix(0, BoundaryCondition::Standard),
            Err(Error::ZeroDegree)
        ));
    }

    fn single_edge(len: f64) -> MetricGraph {
        MetricGraph::new(
            vec!["a".into(), "b".into()],
            vec![Edge {
                a: "a".into(),
                b: "b".into(),
                length: len,
                phase: 0.0,
            }],
            vec![
                Lead {
                    id: 0,
                    vertex: "a".into(),
                },
                Lead {
                    id: 1,
                    vertex: "b".into(),
                },
            ],
            BTreeMap::new(),
        )
    }

    #[test]
    fn single_edge_propagates_freely() {
        let (len, k) = (1.7, 2.3);
        let s = global_smatrix(&single_edge(len), k).unwrap();
        let ch = s.to_channel(1e-12).unwrap();
        assert_abs_diff_eq!(ch.r.norm(), 0.0, epsilon = 1e-14);
        assert!((ch.t - (I * k * len).exp()).norm() < 1e-14);
    }

    #[test]
    fn disconnected_lead_reflects_fully() {
        let mut g = single_edge(1.0);
        // move lead 1 to an isolated vertex
        g = MetricGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            g.edges().to_vec(),
            vec![
                Lead {
                    id: 0,
                    vertex: "a".into(),
                },
                Lead {
                    id: 1,
                    vertex: "c".into(),
                },
            ],
            BTreeMap::new(),
        );
        let s = global_smatrix(&g, 1.1).unwrap();
        assert_abs_diff_eq!(s.entries[(0, 0)].norm(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.entries[(1, 0)].norm(), 0.0, epsilon = 1e-13);
        assert!(s.unitarity_residual() < 1e-12);
    }

    #[test]
    fn closed_component_resonates() {
        // an isolated edge with Neumann ends has eigenvalues at k l = n pi
        let mut g = single_edge(1.0);
        let mut edges = g.edges().to_vec();
        edges.push(Edge {
            a: "x".into(),
            b: "y".into(),
            length: 1.0,
            phase: 0.0,
        });
        g = MetricGraph::new(
            vec!["a".into(), "b".into(), "x".into(), "y".into()],
            edges,
            g.leads().to_vec(),
            BTreeMap::new(),
        );
        assert!(matches!(
            global_smatrix(&g, PI),
            Err(Error::Resonance { .. })
        ));
        let s = global_smatrix(&g, 2.0).unwrap();
        assert!(s.unitarity_residual() < 1e-12);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let g = make_star4(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            global_smatrix(&g, 0.0),
            Err(Error::InvalidWavenumber(_))
        ));
        assert!(global_smatrix(&g, f64::NAN).is_err());
        let mut bad = single_edge(1.0);
        bad = MetricGraph::new(
            bad.vertices().to_vec(),
            vec![Edge {
                a: "a".into(),
                b: "b".into(),
                length: -1.0,
                phase: 0.0,
            }],
            bad.leads().to_vec(),
            BTreeMap::new(),
        );
        assert!(matches!(
            global_smatrix(&bad, 1.0),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn star4_solver_matches_closed_form() {
        let g = make_star4(1.0, 1.0, 1.0).unwrap();
        for k in [0.1, 0.7, 1.0, 2.5, FRAC_PI_2, 4.0] {
            let num = global_smatrix(&g, k).unwrap();
            let ana = star4_analytic_full(k, 1.0, 1.0, 1.0, 0.0).unwrap();
            assert!(num.max_deviation(&ana) <= 1e-10, "k = {k}");
        }
    }

    #[test]
    fn edge_phase_shifts_stub_argument() {
        let g = make_star4(0.8, 1.3, 0.6).unwrap();
        let (k, phi) = (1.9, 0.7);
        let num = global_smatrix(&with_edge_phase(&g, STAR4_E23, phi).unwrap(), k).unwrap();
        let ana = star4_analytic_full(k, 0.8, 1.3, 0.6, phi).unwrap();
        assert!(num.max_deviation(&ana) <= 1e-10);
        let zero = global_smatrix(&with_edge_phase(&g, STAR4_E23, 0.0).unwrap(), k).unwrap();
        assert_eq!(zero, global_smatrix(&g, k).unwrap());
    }

    #[test]
    fn star4_analytic_special_points() {
        let (k, l23) = (1.3, 0.9);
        let s = star4_analytic(k, 0.5, l23, 0.7, -k * l23).unwrap();
        assert_abs_diff_eq!(s.t.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.r.norm(), 0.0, epsilon = 1e-15);

        let l12 = 0.5;
        let s = star4_analytic(k, l12, l23, 0.7, FRAC_PI_2 - k * l23).unwrap();
        assert!(s.t.norm() < 1e-15);
        assert!((s.r + (2.0 * I * k * l12).exp()).norm() < 1e-15);

        let s = star4_analytic(1.0, 1.0, 2f64.atan(), 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(s.reflection_probability(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.transmission_probability(), 0.5, epsilon = 1e-15);
        assert!(star4_analytic(1.0, 0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn phase_form_table_points() {
        let id = star4_phase_form(StarPhaseParams {
            x: FRAC_PI_2,
            alpha: FRAC_PI_2,
            beta: FRAC_PI_2,
        });
        assert_matrix_eq(&id.entries, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)], 1e-15);
        let z = star4_phase_form(StarPhaseParams {
            x: FRAC_PI_2,
            alpha: FRAC_PI_2,
            beta: 0.0,
        });
        assert_matrix_eq(&z.entries, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)], 1e-15);
        let x = star4_phase_form(StarPhaseParams {
            x: 0.0,
            alpha: 0.4,
            beta: -0.4,
        });
        assert_matrix_eq(&x.entries, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)], 1e-15);
    }

    #[test]
    fn rt_simplified_examples() {
        let (r, t) = rt_simplified(0.0);
        assert_eq!((r, t), (c(0.0, 0.0), c(1.0, 0.0)));
        let (r, t) = rt_simplified(FRAC_PI_2);
        assert!((r - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(t.norm() < 1e-15);
        let (r, t) = rt_simplified(2f64.atan());
        assert_abs_diff_eq!(r.norm_sqr(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.norm_sqr(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn channel_checks() {
        assert!(ChannelSMatrix::new(c(0.6, 0.0), c(0.0, 0.8), None).is_ok());
        assert!(matches!(
            ChannelSMatrix::new(c(0.6, 0.0), c(0.0, 0.7), None),
            Err(Error::NotUnitary(_))
        ));
        let ch = rt_channel(0.37);
        assert!(ch.phase_lock_residual() < 1e-15);
        let full = FullSMatrix {
            entries: ch.matrix(),
            k: None,
        };
        assert!(full.unitarity_residual() < 1e-15);
        assert_eq!(full.to_channel(1e-12).unwrap(), ch);
        let three = FullSMatrix {
            entries: DMatrix::identity(3, 3),
            k: None,
        };
        assert!(matches!(three.to_channel(1e-12), Err(Error::NotTwoChannel(_))));
    }
}
