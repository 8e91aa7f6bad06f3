//! The Z₂ memory Hamiltonian on a periodic chain and its stabilizer algebra.
//!
//! `H = −Σ_l σ_z(l)σ_z(l+1) + λ Σ_l σ_x(l)` with `σ_z(N+1) ≡ σ_z(1)`, energies in
//! units of the bond coupling `J = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{check_sites, PauliAxis, PauliString, StateVector};

/// Periodic chains below this size double-count a bond.
pub const MIN_CHAIN: usize = 3;
/// Upper limit for the explicit-operator stabilizer check.
pub const MAX_STABILIZER_SITES: usize = 12;

/// Matrix-free transverse-field Ising Hamiltonian.
#[derive(Debug, Clone)]
pub struct TfimHamiltonian {
    n_sites: usize,
    lambda: f64,
    /// `−Σ_l s_l s_{l+1}` for every basis index.
    bond_energy: Vec<f64>,
}

pub fn build_tfim(n: usize, lambda: f64) -> Result<TfimHamiltonian> {
    TfimHamiltonian::new(n, lambda)
}

impl TfimHamiltonian {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if n < MIN_CHAIN {
            return Err(Error::domain(format!(
                "periodic chain needs at least {MIN_CHAIN} sites, got {n}"
            )));
        }
        check_sites(n)?;
        if !lambda.is_finite() {
            return Err(Error::domain("λ must be finite"));
        }
        let full = (1usize << n) - 1;
        let bond_energy = (0..1usize << n)
            .map(|i| {
                // bit l of `rotated` holds site l+2, so `i ^ rotated` marks broken bonds
                let rotated = ((i >> 1) | ((i & 1) << (n - 1))) & full;
                let broken = (i ^ rotated).count_ones() as f64;
                2.0 * broken - n as f64
            })
            .collect();
        Ok(Self {
            n_sites: n,
            lambda,
            bond_energy,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.bond_energy.len()
    }

    /// Diagonal of the Hamiltonian in the z basis.
    pub fn diagonal(&self) -> &[f64] {
        &self.bond_energy
    }

    /// `out = H·input` on real vectors.
    pub(crate) fn apply_real_into(&self, input: &[f64], out: &mut [f64]) {
        for (i, (o, &d)) in out.iter_mut().zip(&self.bond_energy).enumerate() {
            let mut flips = 0.0;
            for l in 0..self.n_sites {
                flips += input[i ^ (1 << l)];
            }
            *o = d * input[i] + self.lambda * flips;
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_sites() != self.n_sites {
            return Err(Error::domain(format!(
                "Hamiltonian acts on {} sites but the state has {}",
                self.n_sites,
                state.n_sites()
            )));
        }
        let amps = state.amplitudes();
        let out = self
            .bond_energy
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let flips: Complex64 = (0..self.n_sites).map(|l| amps[i ^ (1 << l)]).sum();
                amps[i] * d + flips * self.lambda
            })
            .collect();
        StateVector::from_amplitudes(self.n_sites, out)
    }

    /// `⟨ψ|H|ψ⟩` for a normalized state.
    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        state.require_normalized()?;
        Ok(state.inner(&self.apply(state)?).re)
    }

    /// Explicit real symmetric matrix.
    pub fn dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &d) in self.bond_energy.iter().enumerate() {
            m[(i, i)] = d;
            for l in 0..self.n_sites {
                m[(i ^ (1 << l), i)] += self.lambda;
            }
        }
        m
    }
}

/// Bit mask of the global flip `X̂ = Π σ_x(l)`.
pub(crate) fn flip_mask(n_sites: usize) -> usize {
    (1usize << n_sites) - 1
}

/// `Re⟨ψ|Π_l σ_x(l)|ψ⟩`: +1 / −1 on the two parity sectors.
pub fn global_flip_expectation(state: &StateVector) -> f64 {
    let mask = flip_mask(state.n_sites());
    let amps = state.amplitudes();
    amps.iter()
        .enumerate()
        .map(|(i, a)| (amps[i ^ mask].conj() * a).re)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerReport {
    pub n_sites: usize,
    /// Dimension of the joint +1 eigenspace of `B_1 … B_{N−1}`.
    pub code_dimension: usize,
    /// `‖B_N − Π_{l<N} B_l‖_F`.
    pub product_identity_residual: f64,
    /// `max_l ‖[X̂, B_l]‖_F`.
    pub logical_x_commutator: f64,
    /// `max_l ‖[Ẑ, B_l]‖_F`.
    pub logical_z_commutator: f64,
    /// `‖X̂Ẑ + ẐX̂‖_F`.
    pub logical_anticommutator: f64,
    /// Basis indices spanning the code space (every bond satisfied).
    pub code_basis: Vec<usize>,
}

impl StabilizerReport {
    pub fn max_residual(&self) -> f64 {
        self.product_identity_residual
            .max(self.logical_x_commutator)
            .max(self.logical_z_commutator)
            .max(self.logical_anticommutator)
    }
}

/// Column-wise representation of a matrix with one nonzero per column.
#[derive(Debug, Clone)]
struct Monomial {
    rows: Vec<usize>,
    values: Vec<Complex64>,
}

impl Monomial {
    fn from_pauli(p: &PauliString) -> Self {
        let (rows, values) = (0..1usize << p.n_sites()).map(|j| p.apply_basis(j)).unzip();
        Self { rows, values }
    }

    /// `self · other`.
    fn compose(&self, other: &Monomial) -> Monomial {
        let (rows, values) = other
            .rows
            .iter()
            .zip(&other.values)
            .map(|(&r, &v)| (self.rows[r], self.values[r] * v))
            .unzip();
        Monomial { rows, values }
    }

    fn negated(&self) -> Monomial {
        Monomial {
            rows: self.rows.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Frobenius norm of `self − other`.
    fn distance(&self, other: &Monomial) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.rows.len() {
            if self.rows[j] == other.rows[j] {
                acc += (self.values[j] - other.values[j]).norm_sqr();
            } else {
                acc += self.values[j].norm_sqr() + other.values[j].norm_sqr();
            }
        }
        acc.sqrt()
    }
}

fn bond_operator(n: usize, l: usize) -> Result<PauliString> {
    let next = l % n + 1;
    PauliString::from_sites(n, &[(PauliAxis::Z, l), (PauliAxis::Z, next)])
}

/// Verifies the code-space algebra of the bond stabilizers on explicit operators.
pub fn stabilizer_check(n: usize) -> Result<StabilizerReport> {
    if !(MIN_CHAIN..=MAX_STABILIZER_SITES).contains(&n) {
        return Err(Error::domain(format!(
            "stabilizer check supports {MIN_CHAIN} <= n <= {MAX_STABILIZER_SITES}, got {n}"
        )));
    }
    let bonds: Vec<PauliString> = (1..=n).map(|l| bond_operator(n, l)).collect::<Result<_>>()?;
    let bond_mats: Vec<Monomial> = bonds.iter().map(Monomial::from_pauli).collect();

    let identity = Monomial::from_pauli(&PauliString::identity(n)?);
    let product = bond_mats[..n - 1]
        .iter()
        .fold(identity, |acc, b| acc.compose(b));
    let product_identity_residual = bond_mats[n - 1].distance(&product);

    let all_x: Vec<(PauliAxis, usize)> = (1..=n).map(|l| (PauliAxis::X, l)).collect();
    let logical_x = Monomial::from_pauli(&PauliString::from_sites(n, &all_x)?);
    let logical_z = Monomial::from_pauli(&PauliString::from_sites(n, &[(PauliAxis::Z, 1)])?);

    let commutator = |a: &Monomial, b: &Monomial| a.compose(b).distance(&b.compose(a));
    let logical_x_commutator = bond_mats
        .iter()
        .map(|b| commutator(&logical_x, b))
        .fold(0.0, f64::max);
    let logical_z_commutator = bond_mats
        .iter()
        .map(|b| commutator(&logical_z, b))
        .fold(0.0, f64::max);
    let logical_anticommutator = logical_x
        .compose(&logical_z)
        .distance(&logical_z.compose(&logical_x).negated());

    // Tr Π_l (1 + B_l)/2 over the generators B_1 … B_{N−1}.
    let mut code_basis = Vec::new();
    let mut trace = 0.0;
    for j in 0..1usize << n {
        let mut v = StateVector::basis_state(n, j)?;
        for b in &bonds[..n - 1] {
            let bv = b.apply(&v)?;
            v = v.add_scaled(Complex64::new(1.0, 0.0), &bv)?.scaled(Complex64::new(0.5, 0.0));
        }
        let diag = v.amplitudes()[j].re;
        trace += diag;
        if diag > 0.5 {
            code_basis.push(j);
        }
    }
    let code_dimension = trace.round() as usize;

    Ok(StabilizerReport {
        n_sites: n,
        code_dimension,
        product_identity_residual,
        logical_x_commutator,
        logical_z_commutator,
        logical_anticommutator,
        code_basis,
    })
}
