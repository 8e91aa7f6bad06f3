//! Gibbs states of the chain and the commutator matrix `W` of a density matrix.
//!
//! `W_{αl,βl′} = Tr([ρ, σ_α(l)][σ_β(l′), ρ])` is the Gram matrix of the
//! commutators `C_{αl} = [ρ, σ_α(l)]` under the trace inner product, so for an
//! additive operator with real coefficients `c`, `‖[Â, ρ]‖₂² = cᵀWc`. Its largest
//! eigenvalue `e₁` times `N` is the lower-bound diagnostic for the index `q`; the
//! index itself is never computed. For a pure state `W = 2·Re(V)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigensolve::{full_spectrum, lowest_eigenpairs, FullSpectrum, MAX_DENSE_SITES};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, symmetric_eigen_ascending};
use crate::macroscopicity::{build_vcm, CorrelationKind, CorrelationMatrix};
use crate::model::{build_tfim, TfimHamiltonian};
use crate::pauli::{check_sites, AdditiveOperator, PauliAxis, PauliString, StateVector};

/// Tolerance on Hermiticity and trace for an accepted density matrix.
pub const DENSITY_TOLERANCE: f64 = 1e-10;
/// Default temperature window and resolution of a scan, in units of `J`.
pub const DEFAULT_KT_MIN: f64 = 0.05;
pub const DEFAULT_KT_MAX: f64 = 2.0;
pub const DEFAULT_KT_POINTS: usize = 40;

/// Upper bound on the bytes held by materialized commutators at once.
const COMMUTATOR_BUDGET_BYTES: usize = 128 << 20;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_sites: usize,
    matrix: DMatrix<Complex64>,
    trace_correction: f64,
}

impl DensityMatrix {
    /// Accepts a Hermitian matrix and rescales it to unit trace, recording `|Tr ρ − 1|`.
    pub fn new(n_sites: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::domain(format!(
                "density matrix must be {dim}×{dim}, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
        let defect = hermiticity_defect(&matrix);
        if defect > DENSITY_TOLERANCE * scale {
            return Err(Error::contract(format!("density matrix is not Hermitian (defect {defect:e})")));
        }
        let trace = matrix.trace();
        if trace.im.abs() > DENSITY_TOLERANCE * scale || !(trace.re > 0.0) {
            return Err(Error::contract(format!("density matrix trace must be positive, got {trace}")));
        }
        let matrix = matrix.unscale(trace.re);
        Ok(Self {
            n_sites,
            matrix,
            trace_correction: (trace.re - 1.0).abs(),
        })
    }

    pub fn from_pure(state: &StateVector) -> Result<Self> {
        state.require_normalized()?;
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self::new(state.n_sites(), &v * v.adjoint())
    }

    pub fn maximally_mixed(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        Self::new(n_sites, DMatrix::identity(dim, dim))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace_correction(&self) -> f64 {
        self.trace_correction
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_in(&self, state: &StateVector) -> Result<f64> {
        if state.n_sites() != self.n_sites {
            return Err(Error::domain("state and density matrix sizes differ"));
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    /// `Tr(ρĤ)`.
    pub fn energy(&self, h: &TfimHamiltonian) -> Result<f64> {
        if h.n_sites() != self.n_sites {
            return Err(Error::domain("Hamiltonian and density matrix sizes differ"));
        }
        let hd = h.dense();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                acc += self.matrix[(i, j)] * hd[(j, i)];
            }
        }
        Ok(acc.re)
    }

    /// Largest entry of `ρĤ − Ĥρ`.
    pub fn commutator_with(&self, h: &TfimHamiltonian) -> Result<f64> {
        if h.n_sites() != self.n_sites {
            return Err(Error::domain("Hamiltonian and density matrix sizes differ"));
        }
        let hd = h.dense().map(|x| Complex64::new(x, 0.0));
        let c = &self.matrix * &hd - &hd * &self.matrix;
        Ok(c.iter().fold(0.0, |m, z| m.max(z.norm())))
    }

    /// Ascending eigenvalues of `ρ`.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut values: Vec<f64> = nalgebra::SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }
}

#[derive(Debug, Clone)]
pub struct GibbsState {
    pub n_sites: usize,
    pub lambda: f64,
    pub kt: f64,
    pub rho: DensityMatrix,
}

/// `e^{−Ĥ/kT}/Z` from the full spectrum of `h`.
pub fn gibbs_state(h: &TfimHamiltonian, kt: f64) -> Result<GibbsState> {
    check_temperature(kt)?;
    let spectrum = full_spectrum(h)?;
    gibbs_from_spectrum(&spectrum, h.lambda(), kt)
}

fn check_temperature(kt: f64) -> Result<()> {
    if !(kt > 0.0) || !kt.is_finite() {
        return Err(Error::domain(format!("temperature must be positive and finite, got {kt}")));
    }
    Ok(())
}

/// Same as [`gibbs_state`] but reuses an existing diagonalization.
pub fn gibbs_from_spectrum(spectrum: &FullSpectrum, lambda: f64, kt: f64) -> Result<GibbsState> {
    check_temperature(kt)?;
    let e0 = spectrum.eigenvalues[0];
    let weights: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|e| (-(e - e0) / kt).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let u = &spectrum.eigenvectors;
    let mut scaled = u.clone();
    for (k, w) in weights.iter().enumerate() {
        scaled.column_mut(k).scale_mut(w / z);
    }
    let rho = (scaled * u.transpose()).map(|x| Complex64::new(x, 0.0));
    Ok(GibbsState {
        n_sites: spectrum.n_sites,
        lambda,
        kt,
        rho: DensityMatrix::new(spectrum.n_sites, rho)?,
    })
}

/// Nonzero pattern of a single-site Pauli: column `j` holds `value[j]` in row `row[j]`.
struct SitePauli {
    row: Vec<usize>,
    value: Vec<Complex64>,
}

impl SitePauli {
    fn new(n_sites: usize, axis: PauliAxis, site: usize) -> Result<Self> {
        let p = PauliString::from_sites(n_sites, &[(axis, site)])?;
        let (row, value) = (0..1usize << n_sites).map(|j| p.apply_basis(j)).unzip();
        Ok(Self { row, value })
    }
}

/// `[ρ, σ]` in column-major order, using `(ρσ)_{ij} = ρ_{i,r(j)} v_j` and `(σρ)_{ij} = v_{r(i)} ρ_{r(i),j}`.
fn commutator(rho: &DMatrix<Complex64>, sigma: &SitePauli) -> Vec<Complex64> {
    let dim = rho.nrows();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        let rj = sigma.row[j];
        let col = &mut out[j * dim..(j + 1) * dim];
        for (i, slot) in col.iter_mut().enumerate() {
            // σ is an involutive monomial, so the row holding column i's entry is r(i) with value v_{r(i)}
            let ri = sigma.row[i];
            *slot = rho[(i, rj)] * sigma.value[j] - sigma.value[ri] * rho[(ri, j)];
        }
    }
    out
}

fn trace_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `W` as the Gram matrix of the `3N` commutators `[ρ, σ_α(l)]`.
///
/// Commutators are materialized in chunks so that at most
/// `COMMUTATOR_BUDGET_BYTES` are live; the row chunk is kept while column chunks
/// are regenerated.
pub fn build_w_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    let n = rho.n_sites();
    let dim = rho.dim();
    let ops = 3 * n;
    let paulis: Vec<SitePauli> = (0..ops)
        .map(|k| SitePauli::new(n, PauliAxis::from_index(k % 3).unwrap(), k / 3 + 1))
        .collect::<Result<_>>()?;
    let per_op = dim * dim * std::mem::size_of::<Complex64>();
    let chunk = (COMMUTATOR_BUDGET_BYTES / 2 / per_op).clamp(1, ops);
    let build = |range: std::ops::Range<usize>| -> Vec<Vec<Complex64>> {
        range.into_par_iter().map(|k| commutator(rho.matrix(), &paulis[k])).collect()
    };

    let mut entries = DMatrix::<Complex64>::zeros(ops, ops);
    for row_start in (0..ops).step_by(chunk) {
        let row_end = (row_start + chunk).min(ops);
        let rows = build(row_start..row_end);
        for col_start in (row_start..ops).step_by(chunk) {
            let col_end = (col_start + chunk).min(ops);
            let cols_owned;
            let cols: &[Vec<Complex64>] = if col_start == row_start {
                &rows
            } else {
                cols_owned = build(col_start..col_end);
                &cols_owned
            };
            let pairs: Vec<(usize, usize)> = (row_start..row_end)
                .flat_map(|a| (col_start.max(a)..col_end).map(move |b| (a, b)))
                .collect();
            let values: Vec<Complex64> = pairs
                .par_iter()
                .map(|&(a, b)| trace_inner(&rows[a - row_start], &cols[b - col_start]))
                .collect();
            for (&(a, b), v) in pairs.iter().zip(values) {
                entries[(a, b)] = v;
                entries[(b, a)] = v.conj();
            }
        }
    }
    for a in 0..ops {
        entries[(a, a)].im = 0.0;
    }
    Ok(CorrelationMatrix::from_entries(n, CorrelationKind::W, entries))
}

/// `‖[Â, ρ]‖₂²` computed directly from `Âρ`, independent of `W`.
pub fn commutator_norm_sqr(rho: &DensityMatrix, op: &AdditiveOperator) -> Result<f64> {
    let n = rho.n_sites();
    if op.n_sites() != n {
        return Err(Error::domain("operator and density matrix sizes differ"));
    }
    let dim = rho.dim();
    let columns: Vec<StateVector> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let col = StateVector::from_amplitudes(n, rho.matrix().column(j).iter().copied().collect())?;
            op.apply(&col)
        })
        .collect::<Result<_>>()?;
    // ρÂ = (Âρ)† for Hermitian Â and ρ
    let mut acc = 0.0;
    for j in 0..dim {
        for i in 0..dim {
            let m_ij = columns[j].amplitudes()[i];
            let m_ji = columns[i].amplitudes()[j];
            acc += (m_ij - m_ji.conj()).norm_sqr();
        }
    }
    Ok(acc)
}

/// `points` log-spaced temperatures from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0) || !(max > min) || !max.is_finite() {
        return Err(Error::domain(format!("need 0 < min < max, got [{min}, {max}]")));
    }
    if points < 2 {
        return Err(Error::domain(format!("need at least 2 grid points, got {points}")));
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                max
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint {
    pub kt: f64,
    /// Largest eigenvalue of `W`, not rescaled by `N`.
    pub e1: f64,
}

/// `e₁(W)` of the Gibbs state at every temperature of an ascending grid.
pub fn thermal_scan(lambda: f64, n: usize, grid: &[f64]) -> Result<Vec<ThermalPoint>> {
    if grid.is_empty() {
        return Err(Error::domain("temperature grid is empty"));
    }
    if let Some(kt) = grid.iter().find(|kt| !(**kt > 0.0) || !kt.is_finite()) {
        return Err(Error::domain(format!("temperatures must be positive, got {kt}")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("temperature grid must be strictly ascending"));
    }
    if n > MAX_DENSE_SITES {
        return Err(Error::capability(format!(
            "thermal states need the full spectrum, limited to N ≤ {MAX_DENSE_SITES}"
        )));
    }
    let h = build_tfim(n, lambda)?;
    let spectrum = full_spectrum(&h)?;
    grid.par_iter()
        .map(|&kt| {
            let g = gibbs_from_spectrum(&spectrum, lambda, kt)?;
            Ok(ThermalPoint {
                kt,
                e1: build_w_matrix(&g.rho)?.e1(),
            })
        })
        .collect()
}

/// Largest eigenvalue of `2·Re(V)` for the ground state, the `kT → 0` value of `e₁(W)`
/// when the ground state is separated from the rest of the spectrum.
pub fn pure_state_limit(lambda: f64, n: usize, tol: f64) -> Result<f64> {
    let h = build_tfim(n, lambda)?;
    let pairs = lowest_eigenpairs(&h, 1, tol)?;
    let vcm = build_vcm(&pairs.eigenvectors[0])?;
    let (values, _) = symmetric_eigen_ascending(vcm.real_part() * 2.0);
    Ok(*values.last().expect("nonempty spectrum"))
}
