//! Reflectance reconstruction from tristimulus values.
//!
//! Finds the unique strictly positive spectrum `ρ = exp(z)` whose log has the
//! smallest summed squared slope, `½ z′Cz`, among all spectra that reproduce
//! a target tristimulus under a given (weighted) CMF matrix:
//!
//! ```text
//! minimise  ½ z′Cz   subject to   A′ exp(z) = XYZ
//! ```
//!
//! The stationarity conditions of the Lagrangian are solved by plain Newton
//! iteration on the bordered `(n+3)×(n+3)` system
//!
//! ```text
//! F(z, λ) = [ Cz + diag(eᶻ)·G·λ ]      J = [ C + diag(diag(eᶻ)·G·λ)   diag(eᶻ)·G ]
//!           [ A′eᶻ − XYZ        ]          [ A′·diag(eᶻ)              0          ]
//! ```
//!
//! where `G = A` for the plain reconstruction and `G = A_SD = diag(W_D)·A_S`
//! for the symmetric (dual-referenced) variant. The constraint row always uses
//! `A`, so the reconstructed reflectance reproduces the target exactly.

use nalgebra::{DMatrix, DVector};

use crate::cmf::CmfSet;
use crate::colorimetry::{Illuminant, Tristimulus};
use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, N_BANDS};

/// Iteration cap on Newton steps.
pub const MAX_ITERATIONS: usize = 20;
/// Convergence threshold on `max |F|`.
pub const TOLERANCE: f64 = 1e-8;

/// The symmetric tridiagonal finite-difference matrix
/// `C = tridiag(−2, [2, 4, …, 4, 2], −2)`, so that `½ z′Cz = Σ (zᵢ₊₁ − zᵢ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffMatrix {
    n: usize,
}

pub fn build_diff_matrix(n: usize) -> Result<DiffMatrix> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    Ok(DiffMatrix { n })
}

impl DiffMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for n = {}", self.n);
        if i == j {
            if i == 0 || i == self.n - 1 {
                2.0
            } else {
                4.0
            }
        } else if i.abs_diff(j) == 1 {
            -2.0
        } else {
            0.0
        }
    }

    /// `C·z`.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut v = self.entry(i, i) * z[i];
                if i > 0 {
                    v -= 2.0 * z[i - 1];
                }
                if i + 1 < self.n {
                    v -= 2.0 * z[i + 1];
                }
                v
            })
            .collect()
    }

    /// `z′·C·z`.
    pub fn quadratic_form(&self, z: &[f64]) -> f64 {
        self.apply(z).iter().zip(z).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j))
    }
}

/// `½ ln(ρ)′·C·ln(ρ)`, the smoothness objective of a positive spectrum.
pub fn log_slope_objective(diff: &DiffMatrix, rho: &Spectrum) -> f64 {
    let z: Vec<f64> = rho.iter().map(f64::ln).collect();
    0.5 * diff.quadratic_form(&z)
}

/// Iterate of the Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonState {
    pub z: [f64; N_BANDS],
    pub lambda: [f64; 3],
    pub residual_norm: f64,
    pub iterations: usize,
}

impl NewtonState {
    /// Flat start: `z = 0`, `λ = 0`.
    pub fn initial() -> Self {
        NewtonState { z: [0.0; N_BANDS], lambda: [0.0; 3], residual_norm: f64::INFINITY, iterations: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconResult {
    /// Strictly positive reconstructed spectrum.
    pub rho: Spectrum,
    /// Newton steps taken before `max |F| < TOLERANCE` was observed.
    pub iterations: usize,
    /// `max |F|` at the returned spectrum.
    pub residual_norm: f64,
}

/// The stationarity system of one reconstruction problem.
#[derive(Debug, Clone, Copy)]
pub struct LagrangeSystem<'a> {
    constraint: &'a CmfSet,
    gradient: &'a CmfSet,
    diff: &'a DiffMatrix,
    target: Tristimulus,
}

impl<'a> LagrangeSystem<'a> {
    /// Plain reconstruction: the same matrix in the constraint and gradient blocks.
    pub fn original(a_ref: &'a CmfSet, diff: &'a DiffMatrix, target: Tristimulus) -> Result<Self> {
        Self::symmetric(a_ref, a_ref, diff, target)
    }

    /// Dual-referenced reconstruction: `a_sd` in the gradient blocks, `a_s` in the constraint.
    pub fn symmetric(
        a_s: &'a CmfSet,
        a_sd: &'a CmfSet,
        diff: &'a DiffMatrix,
        target: Tristimulus,
    ) -> Result<Self> {
        if diff.size() != N_BANDS {
            return Err(Error::DimensionMismatch(format!(
                "difference matrix is {0}×{0}, CMFs have {N_BANDS} rows",
                diff.size()
            )));
        }
        if !target.is_finite() {
            return Err(Error::DimensionMismatch("target tristimulus is not finite".into()));
        }
        Ok(LagrangeSystem { constraint: a_s, gradient: a_sd, diff, target })
    }

    /// `F(z, λ)`, length `n + 3`.
    pub fn residual(&self, z: &[f64; N_BANDS], lambda: &[f64; 3]) -> DVector<f64> {
        let cz = self.diff.apply(z);
        let target = self.target.to_array();
        let mut f = DVector::zeros(N_BANDS + 3);
        let mut constraint = [0.0; 3];
        for i in 0..N_BANDS {
            let r = z[i].exp();
            let g = self.gradient.row(i);
            f[i] = cz[i] + r * (g[0] * lambda[0] + g[1] * lambda[1] + g[2] * lambda[2]);
            let a = self.constraint.row(i);
            for k in 0..3 {
                constraint[k] += a[k] * r;
            }
        }
        for k in 0..3 {
            f[N_BANDS + k] = constraint[k] - target[k];
        }
        f
    }

    /// `J(z, λ) = ∂F/∂(z, λ)`.
    pub fn jacobian(&self, z: &[f64; N_BANDS], lambda: &[f64; 3]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(N_BANDS + 3, N_BANDS + 3);
        for i in 0..N_BANDS {
            let r = z[i].exp();
            let g = self.gradient.row(i);
            let a = self.constraint.row(i);
            j[(i, i)] = self.diff.entry(i, i) + r * (g[0] * lambda[0] + g[1] * lambda[1] + g[2] * lambda[2]);
            if i > 0 {
                j[(i, i - 1)] = self.diff.entry(i, i - 1);
            }
            if i + 1 < N_BANDS {
                j[(i, i + 1)] = self.diff.entry(i, i + 1);
            }
            for k in 0..3 {
                j[(i, N_BANDS + k)] = r * g[k];
                j[(N_BANDS + k, i)] = a[k] * r;
            }
        }
        j
    }

    /// Newton iteration from the flat start.
    pub fn solve(&self) -> Result<ReconResult> {
        self.solve_from(NewtonState::initial())
    }

    /// Newton iteration from an arbitrary starting state.
    ///
    /// Each pass evaluates `F` at the current iterate and takes the full
    /// Newton step; once the evaluated `F` is within tolerance, the stepped
    /// iterate is returned. No damping or line search.
    pub fn solve_from(&self, mut state: NewtonState) -> Result<ReconResult> {
        state.iterations = 0;
        while state.iterations <= MAX_ITERATIONS {
            let f = self.residual(&state.z, &state.lambda);
            state.residual_norm = max_abs(&f);
            if !state.residual_norm.is_finite() {
                break;
            }
            let converged = state.residual_norm < TOLERANCE;
            let jacobian = self.jacobian(&state.z, &state.lambda);
            match jacobian.lu().solve(&(-f)) {
                Some(delta) if delta.iter().all(|d| d.is_finite()) => {
                    for i in 0..N_BANDS {
                        state.z[i] += delta[i];
                    }
                    for k in 0..3 {
                        state.lambda[k] += delta[N_BANDS + k];
                    }
                }
                _ if converged => {}
                _ => return Err(Error::SingularSystem { iterations: state.iterations }),
            }
            if converged {
                return self.finish(state);
            }
            state.iterations += 1;
        }
        Err(Error::NoConvergence { iterations: state.iterations, residual: state.residual_norm })
    }

    fn finish(&self, state: NewtonState) -> Result<ReconResult> {
        let residual_norm = max_abs(&self.residual(&state.z, &state.lambda));
        let rho = Spectrum::new(state.z.map(f64::exp))?;
        if rho.min() <= 0.0 || !residual_norm.is_finite() {
            // exp underflow: the iterate has run off towards an unreachable target.
            return Err(Error::NoConvergence { iterations: state.iterations, residual: residual_norm });
        }
        Ok(ReconResult { rho, iterations: state.iterations, residual_norm })
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Reconstructs the smoothest positive spectrum with `a_ref′ρ = target`.
pub fn reconstruct(a_ref: &CmfSet, diff: &DiffMatrix, target: Tristimulus) -> Result<ReconResult> {
    LagrangeSystem::original(a_ref, diff, target)?.solve()
}

/// Dual-referenced variant; `a_sd` must be `diag(W_D)·a_s`.
pub fn reconstruct_symmetric(
    a_s: &CmfSet,
    a_sd: &CmfSet,
    diff: &DiffMatrix,
    target: Tristimulus,
) -> Result<ReconResult> {
    LagrangeSystem::symmetric(a_s, a_sd, diff, target)?.solve()
}

/// `A_SD = diag(W_S)·diag(W_D)·A`.
pub fn build_dual_cmf(w_s: &Illuminant, w_d: &Illuminant, cmf: &CmfSet) -> CmfSet {
    let s = w_s.spectrum().values();
    let d = w_d.spectrum().values();
    cmf.scale_rows(&std::array::from_fn(|i| s[i] * d[i]))
}
