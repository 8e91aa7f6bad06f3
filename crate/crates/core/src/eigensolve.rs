//! Low-lying eigenpairs of the transverse-field Ising chain.
//!
//! The Hamiltonian commutes with the global flip `X̂`, so each parity sector is
//! treated separately. Within a sector the lowest eigenpairs come from a
//! restarted Lanczos iteration with full reorthogonalization and locking of
//! converged vectors. In the ordered phase the two lowest levels sit in opposite
//! sectors and are split only by an exponentially small gap; solving the sectors
//! independently keeps both members of the doublet exact.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen_ascending;
use crate::model::{build_tfim, flip_mask, global_flip_expectation, TfimHamiltonian};
use crate::pauli::{AdditiveOperator, PauliAxis, StateVector};

/// Matrix applications allowed per eigenpair before giving up.
pub const MATVEC_BUDGET: usize = 5000;
/// Largest number of requested eigenpairs.
pub const MAX_PAIRS: usize = 4;
/// Residual every returned eigenpair is guaranteed to meet.
pub const RESIDUAL_CEILING: f64 = 1e-9;
/// Largest chain handled by the dense full-spectrum path.
pub const MAX_DENSE_SITES: usize = 10;
/// Largest chain accepted by the gap scan.
pub const MAX_SCAN_SITES: usize = 14;

const MAX_KRYLOV: usize = 160;
const START_SEED: u64 = 0x5eed_2a11;

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
    /// `‖Hv − Ev‖` per pair.
    pub residuals: Vec<f64>,
    /// `⟨X̂⟩` per pair, ±1.
    pub parities: Vec<f64>,
    /// Total matrix applications spent.
    pub matvecs: usize,
}

impl EigenPairs {
    pub fn gap(&self) -> Option<f64> {
        (self.eigenvalues.len() >= 2).then(|| self.eigenvalues[1] - self.eigenvalues[0])
    }
}

struct SectorSolver<'a> {
    h: &'a TfimHamiltonian,
    sign: f64,
    mask: usize,
    tol: f64,
    locked: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    matvecs: usize,
}

impl<'a> SectorSolver<'a> {
    fn new(h: &'a TfimHamiltonian, sign: f64, tol: f64) -> Self {
        Self {
            h,
            sign,
            mask: flip_mask(h.n_sites()),
            tol,
            locked: Vec::new(),
            scratch: vec![0.0; h.dim()],
            matvecs: 0,
        }
    }

    fn sector_dim(&self) -> usize {
        self.h.dim() / 2
    }

    /// `v ← (v + s·X̂v)/2`.
    fn project(&self, v: &mut [f64]) {
        for i in 0..v.len() {
            let j = i ^ self.mask;
            if i < j {
                let sym = 0.5 * (v[i] + self.sign * v[j]);
                v[i] = sym;
                v[j] = self.sign * sym;
            }
        }
    }

    fn apply(&mut self, v: &[f64], out: &mut [f64]) {
        self.h.apply_real_into(v, out);
        self.matvecs += 1;
        self.project(out);
    }

    fn orthogonalize(&self, w: &mut [f64], basis: &[Vec<f64>]) {
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for b in self.locked.iter().chain(basis) {
                let c = dot(b, w);
                axpy(-c, b, w);
            }
        }
    }

    fn start_vector(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let mut v: Vec<f64> = (0..self.h.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            self.project(&mut v);
            self.orthogonalize(&mut v, &[]);
            let n = norm(&v);
            if n > 1e-8 {
                scale(1.0 / n, &mut v);
                return v;
            }
        }
    }

    /// Lowest eigenpair of the sector restricted to the complement of `locked`.
    fn next_pair(&mut self, rng: &mut ChaCha8Rng) -> Result<(f64, Vec<f64>, f64)> {
        let dim = self.h.dim();
        let free = self.sector_dim() - self.locked.len();
        let max_basis = free.clamp(1, MAX_KRYLOV);
        let spent_before = self.matvecs;
        let mut best_residual = f64::INFINITY;
        let mut start = self.start_vector(rng);

        loop {
            let mut basis: Vec<Vec<f64>> = vec![start];
            let mut alphas: Vec<f64> = Vec::new();
            let mut betas: Vec<f64> = Vec::new();
            let mut w = vec![0.0; dim];
            let mut restart: Option<Vec<f64>> = None;

            for j in 0..max_basis {
                let vj = basis[j].clone();
                self.apply(&vj, &mut w);
                let alpha = dot(&vj, &w);
                axpy(-alpha, &vj, &mut w);
                if j > 0 {
                    axpy(-betas[j - 1], &basis[j - 1], &mut w);
                }
                self.orthogonalize(&mut w, &basis);
                alphas.push(alpha);
                let beta = norm(&w);

                let exhausted = beta < 1e-12 || j + 1 == max_basis;
                let check = exhausted || j < 24 || j % 4 == 3;
                if check {
                    let (_, y) = lowest_ritz(&alphas, &betas);
                    let estimate = beta * y[y.len() - 1].abs();
                    if estimate <= self.tol || exhausted {
                        let mut x = vec![0.0; dim];
                        for (c, b) in y.iter().zip(&basis) {
                            axpy(*c, b, &mut x);
                        }
                        self.project(&mut x);
                        self.orthogonalize(&mut x, &[]);
                        scale(1.0 / norm(&x), &mut x);
                        let mut hx = std::mem::take(&mut self.scratch);
                        self.apply(&x, &mut hx);
                        let theta = dot(&x, &hx);
                        axpy(-theta, &x, &mut hx);
                        let residual = norm(&hx);
                        self.scratch = hx;
                        best_residual = best_residual.min(residual);
                        if residual <= self.tol {
                            return Ok((theta, x, residual));
                        }
                        if exhausted {
                            restart = Some(x);
                            break;
                        }
                    }
                }
                if self.matvecs - spent_before >= MATVEC_BUDGET {
                    break;
                }
                betas.push(beta);
                let mut next = w.clone();
                scale(1.0 / beta, &mut next);
                basis.push(next);
            }

            if self.matvecs - spent_before >= MATVEC_BUDGET {
                return Err(Error::Convergence {
                    matvecs: self.matvecs - spent_before,
                    best_residual,
                });
            }
            start = match restart {
                Some(x) => x,
                None => {
                    // Krylov space closed without a usable Ritz vector
                    self.start_vector(rng)
                }
            };
        }
    }
}

fn lowest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty tridiagonal");
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += c * xi);
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn scale(c: f64, v: &mut [f64]) {
    v.iter_mut().for_each(|x| *x *= c);
}

/// The `k` algebraically smallest eigenpairs of `h`.
///
/// `tol` is the target residual `‖Hv − Ev‖`; it is capped at [`RESIDUAL_CEILING`].
pub fn lowest_eigenpairs(h: &TfimHamiltonian, k: usize, tol: f64) -> Result<EigenPairs> {
    if !(1..=MAX_PAIRS).contains(&k) {
        return Err(Error::domain(format!("k must lie in 1..={MAX_PAIRS}, got {k}")));
    }
    if !(tol >= 1e-12) {
        return Err(Error::domain(format!("tolerance must be >= 1e-12, got {tol}")));
    }
    let tol = tol.min(RESIDUAL_CEILING);
    let n = h.n_sites();

    let mut found: Vec<(f64, Vec<f64>, f64)> = Vec::new();
    let mut matvecs = 0;
    for (sector, sign) in [(0u64, 1.0), (1u64, -1.0)] {
        let mut solver = SectorSolver::new(h, sign, tol);
        let wanted = k.min(solver.sector_dim());
        let mut rng = ChaCha8Rng::seed_from_u64(START_SEED ^ ((n as u64) << 8) ^ sector);
        for _ in 0..wanted {
            let pair = solver.next_pair(&mut rng)?;
            solver.locked.push(pair.1.clone());
            found.push(pair);
        }
        matvecs += solver.matvecs;
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found.truncate(k);

    let mut out = EigenPairs {
        eigenvalues: Vec::with_capacity(k),
        eigenvectors: Vec::with_capacity(k),
        residuals: Vec::with_capacity(k),
        parities: Vec::with_capacity(k),
        matvecs,
    };
    for (value, vector, residual) in found {
        let state = StateVector::from_real(n, &vector)?;
        out.parities.push(global_flip_expectation(&state));
        out.eigenvalues.push(value);
        out.eigenvectors.push(state);
        out.residuals.push(residual);
    }
    Ok(out)
}

/// Complete eigen-decomposition of a small chain.
#[derive(Debug, Clone)]
pub struct FullSpectrum {
    pub n_sites: usize,
    /// Ascending, length `2^N`.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
}

impl FullSpectrum {
    pub fn eigenvector(&self, index: usize) -> Result<StateVector> {
        if index >= self.eigenvalues.len() {
            return Err(Error::domain(format!("eigenvector index {index} out of range")));
        }
        StateVector::from_real(self.n_sites, self.eigenvectors.column(index).as_slice())
    }
}

pub fn full_spectrum(h: &TfimHamiltonian) -> Result<FullSpectrum> {
    if h.n_sites() > MAX_DENSE_SITES {
        return Err(Error::capability(format!(
            "dense diagonalization is limited to N <= {MAX_DENSE_SITES}, got {}",
            h.n_sites()
        )));
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen_ascending(h.dense());
    Ok(FullSpectrum {
        n_sites: h.n_sites(),
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint {
    pub n: usize,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
}

/// `ΔE = E₁ − E₀` for every `N` in `n_min..=n_max`.
pub fn gap_scan(lambda: f64, n_min: usize, n_max: usize, tol: f64) -> Result<Vec<GapPoint>> {
    if lambda == 0.0 {
        return Err(Error::domain(
            "λ = 0 has an exactly degenerate ground doublet; the gap scan needs λ ≠ 0",
        ));
    }
    if !(3 <= n_min && n_min <= n_max && n_max <= MAX_SCAN_SITES) {
        return Err(Error::domain(format!(
            "gap scan needs 3 <= n_min <= n_max <= {MAX_SCAN_SITES}, got {n_min}..{n_max}"
        )));
    }
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let h = build_tfim(n, lambda)?;
            let pairs = lowest_eigenpairs(&h, 2, tol)?;
            let (e0, e1) = (pairs.eigenvalues[0], pairs.eigenvalues[1]);
            let gap = e1 - e0;
            if !(gap > 0.0) {
                return Err(Error::domain(format!("non-positive gap {gap:e} at N = {n}")));
            }
            Ok(GapPoint { n, e0, e1, gap })
        })
        .collect()
}

/// Multiplies by the unit phase that makes the first largest-magnitude amplitude real positive.
pub fn fix_phase(state: &StateVector) -> StateVector {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, a) in state.amplitudes().iter().enumerate() {
        let m = a.norm_sqr();
        if m > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = m;
        }
    }
    let a = state.amplitudes()[best];
    if a.norm() == 0.0 {
        return state.clone();
    }
    state.scaled(a.conj() / a.norm())
}

/// `(e0 + s·e1)/√2` with phases fixed and `s = ±1` chosen so that `⟨M_z⟩` is
/// as large as possible in magnitude, preferring the positive branch on ties.
pub fn superposed_state(e0: &StateVector, e1: &StateVector) -> Result<StateVector> {
    e0.check_same_size(e1)?;
    e0.require_normalized()?;
    e1.require_normalized()?;
    let overlap = e0.inner(e1).norm();
    if overlap > 1e-8 {
        return Err(Error::contract(format!(
            "states are not orthogonal (|⟨e0|e1⟩| = {overlap:e})"
        )));
    }
    let n = e0.n_sites();
    let a = fix_phase(e0);
    let b = fix_phase(e1);
    let mz = AdditiveOperator::magnetization(n, PauliAxis::Z)?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    let mut candidates = Vec::with_capacity(2);
    for s in [1.0, -1.0] {
        let mut psi = a.add_scaled(Complex64::new(s, 0.0), &b)?.scaled(h);
        psi.normalize()?;
        let m = psi.inner(&mz.apply(&psi)?).re;
        candidates.push((m, psi));
    }
    let tie = 1e-9 * n as f64;
    let (m0, m1) = (candidates[0].0, candidates[1].0);
    let pick = if (m0.abs() - m1.abs()).abs() <= tie {
        usize::from(m1 > m0)
    } else {
        usize::from(m1.abs() > m0.abs())
    };
    Ok(candidates.swap_remove(pick).1)
}

/// Which chain state a scan or command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainState {
    /// `|E₀⟩`.
    Ground,
    /// `|E₁⟩`.
    Excited,
    /// `(|E₀⟩ ± |E₁⟩)/√2`, see [`superposed_state`].
    Superposed,
}

pub fn chain_state(n: usize, lambda: f64, which: ChainState, tol: f64) -> Result<StateVector> {
    let h = build_tfim(n, lambda)?;
    let k = if which == ChainState::Ground { 1 } else { 2 };
    let mut pairs = lowest_eigenpairs(&h, k, tol)?;
    Ok(match which {
        ChainState::Ground => pairs.eigenvectors.swap_remove(0),
        ChainState::Excited => pairs.eigenvectors.swap_remove(1),
        ChainState::Superposed => superposed_state(&pairs.eigenvectors[0], &pairs.eigenvectors[1])?,
    })
}

/// `T ≈ 1/ΔE²` per chain length.
pub fn adiabatic_time_estimate(points: &[GapPoint]) -> Result<Vec<(usize, f64)>> {
    points
        .iter()
        .map(|p| {
            if !(p.gap > 0.0) {
                return Err(Error::domain(format!("gap must be positive, got {} at N = {}", p.gap, p.n)));
            }
            Ok((p.n, 1.0 / (p.gap * p.gap)))
        })
        .collect()
}
