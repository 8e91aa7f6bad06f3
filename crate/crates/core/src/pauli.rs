//! State vectors of spin-1/2 chains and the action of Pauli operators on them.
//!
//! Site `l` (1-based) is stored in bit `l - 1` of the basis index. A cleared
//! bit is the `σ_z = +1` state `|0⟩`, a set bit is `|1⟩`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Largest chain the dense state-vector code will allocate.
pub const MAX_SITES: usize = 24;

/// Allowed deviation of `⟨ψ|ψ⟩` from one before an input counts as unnormalized.
pub const NORM_TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Position of the axis inside a per-site coefficient triple.
    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        };
        f.write_str(s)
    }
}

/// Complex amplitudes of an `N`-site state over the `σ_z` product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_sites(n_sites)?;
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::domain(format!(
                "{} amplitudes given for {} sites (expected {})",
                amplitudes.len(),
                n_sites,
                1usize << n_sites
            )));
        }
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    pub fn from_real(n_sites: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(
            n_sites,
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    pub fn basis_state(n_sites: usize, index: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::domain(format!(
                "basis index {index} out of range for {n_sites} sites"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    /// `|0…0⟩`, every spin up along z.
    pub fn all_up(n_sites: usize) -> Result<Self> {
        Self::basis_state(n_sites, 0)
    }

    /// Tensor product of single-site states `a|0⟩ + b|1⟩`, normalized.
    pub fn product(sites: &[[Complex64; 2]]) -> Result<Self> {
        let n = sites.len();
        check_sites(n)?;
        let amplitudes = (0..1usize << n)
            .map(|idx| {
                sites
                    .iter()
                    .enumerate()
                    .fold(ONE, |acc, (l, s)| acc * s[(idx >> l) & 1])
            })
            .collect();
        let mut state = Self {
            n_sites: n,
            amplitudes,
        };
        state.normalize()?;
        Ok(state)
    }

    /// Normalized state with i.i.d. complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n_sites: usize, rng: &mut R) -> Result<Self> {
        check_sites(n_sites)?;
        let amplitudes = (0..1usize << n_sites)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        let mut state = Self {
            n_sites,
            amplitudes,
        };
        state.normalize()?;
        Ok(state)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            n_sites: self.n_sites,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// `self + factor·other`.
    pub fn add_scaled(&self, factor: Complex64, other: &StateVector) -> Result<StateVector> {
        self.check_same_size(other)?;
        Ok(StateVector {
            n_sites: self.n_sites,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::contract(format!(
                "state is not normalized (⟨ψ|ψ⟩ = {n2})"
            )));
        }
        Ok(())
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(Error::domain(format!(
                "site {site} out of range 1..={}",
                self.n_sites
            )));
        }
        Ok(())
    }

    pub(crate) fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(Error::domain(format!(
                "state sizes differ: {} vs {} sites",
                self.n_sites, other.n_sites
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::domain(format!(
            "number of sites must lie in 1..={MAX_SITES}, got {n_sites}"
        )));
    }
    Ok(())
}

/// Writes `σ_axis(site)|input⟩` into `out`. `site` is 1-based and assumed valid.
pub(crate) fn apply_pauli_into(input: &[Complex64], axis: PauliAxis, site: usize, out: &mut [Complex64]) {
    let mask = 1usize << (site - 1);
    match axis {
        PauliAxis::X => {
            for (i, a) in input.iter().enumerate() {
                out[i ^ mask] = *a;
            }
        }
        PauliAxis::Y => {
            for (i, a) in input.iter().enumerate() {
                // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
                out[i ^ mask] = if i & mask == 0 { I * a } else { -I * a };
            }
        }
        PauliAxis::Z => {
            for (i, a) in input.iter().enumerate() {
                out[i] = if i & mask == 0 { *a } else { -a };
            }
        }
    }
}

/// `σ_axis(site)|state⟩` for a 1-based `site`.
pub fn apply_pauli(state: &StateVector, axis: PauliAxis, site: usize) -> Result<StateVector> {
    state.check_site(site)?;
    let mut out = vec![ZERO; state.dim()];
    apply_pauli_into(&state.amplitudes, axis, site, &mut out);
    Ok(StateVector {
        n_sites: state.n_sites,
        amplitudes: out,
    })
}

/// `⟨ψ|σ_axis(site)|ψ⟩` for a normalized state.
pub fn expectation(state: &StateVector, axis: PauliAxis, site: usize) -> Result<f64> {
    state.check_site(site)?;
    state.require_normalized()?;
    Ok(raw_expectation(state, axis, site).re)
}

/// The unnormalized inner product `⟨ψ|σ|ψ⟩` without contract checks.
pub(crate) fn raw_expectation(state: &StateVector, axis: PauliAxis, site: usize) -> Complex64 {
    let mask = 1usize << (site - 1);
    let amps = &state.amplitudes;
    match axis {
        PauliAxis::X => amps
            .iter()
            .enumerate()
            .map(|(i, a)| amps[i ^ mask].conj() * a)
            .sum(),
        PauliAxis::Y => amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let phase = if i & mask == 0 { I } else { -I };
                amps[i ^ mask].conj() * phase * a
            })
            .sum(),
        PauliAxis::Z => amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let n = a.norm_sqr();
                Complex64::new(if i & mask == 0 { n } else { -n }, 0.0)
            })
            .sum(),
    }
}

/// `⟨ψ|σ_a(site_a) σ_b(site_b)|ψ⟩`, with `σ_b(site_b)` acting first.
pub fn two_point(
    state: &StateVector,
    axis_a: PauliAxis,
    site_a: usize,
    axis_b: PauliAxis,
    site_b: usize,
) -> Result<Complex64> {
    state.check_site(site_a)?;
    state.check_site(site_b)?;
    state.require_normalized()?;
    if site_a == site_b && axis_a == axis_b {
        return Ok(ONE);
    }
    // ⟨ψ|σ_a σ_b|ψ⟩ = ⟨σ_a ψ|σ_b ψ⟩ since every σ is Hermitian.
    let left = apply_pauli(state, axis_a, site_a)?;
    let right = apply_pauli(state, axis_b, site_b)?;
    Ok(left.inner(&right))
}

/// A tensor product of Pauli operators with an overall phase `i^phase`.
///
/// Stored as `i^phase · X^x_mask · Z^z_mask` (the `Z` factors act first), so a
/// `σ_y` on site `l` sets bit `l-1` in both masks and contributes one power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    x_mask: usize,
    z_mask: usize,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        Ok(Self {
            n_sites,
            x_mask: 0,
            z_mask: 0,
            phase: 0,
        })
    }

    /// Product of single-site Paulis on distinct sites.
    pub fn from_sites(n_sites: usize, factors: &[(PauliAxis, usize)]) -> Result<Self> {
        let mut s = Self::identity(n_sites)?;
        for &(axis, site) in factors {
            if site == 0 || site > n_sites {
                return Err(Error::domain(format!(
                    "site {site} out of range 1..={n_sites}"
                )));
            }
            let bit = 1usize << (site - 1);
            if (s.x_mask | s.z_mask) & bit != 0 {
                return Err(Error::domain(format!("site {site} listed twice")));
            }
            match axis {
                PauliAxis::X => s.x_mask |= bit,
                PauliAxis::Z => s.z_mask |= bit,
                PauliAxis::Y => {
                    s.x_mask |= bit;
                    s.z_mask |= bit;
                    s.phase = (s.phase + 1) % 4;
                }
            }
        }
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn x_mask(&self) -> usize {
        self.x_mask
    }

    pub fn z_mask(&self) -> usize {
        self.z_mask
    }

    /// Image of the basis vector `|index⟩`: the operator maps it to `value·|row⟩`.
    pub fn apply_basis(&self, index: usize) -> (usize, Complex64) {
        let sign_flips = (index & self.z_mask).count_ones() as u8 * 2;
        (index ^ self.x_mask, phase_power((self.phase + sign_flips) % 4))
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_sites != self.n_sites {
            return Err(Error::domain("Pauli string and state sizes differ"));
        }
        let mut out = vec![ZERO; state.dim()];
        for (i, a) in state.amplitudes.iter().enumerate() {
            let (row, value) = self.apply_basis(i);
            out[row] = value * a;
        }
        Ok(StateVector {
            n_sites: self.n_sites,
            amplitudes: out,
        })
    }
}

fn phase_power(k: u8) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// `Â = Σ_l Σ_α c[l][α] σ_α(l)` with real coefficients; identity parts are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveOperator {
    coeffs: Vec<[f64; 3]>,
}

impl AdditiveOperator {
    pub fn new(coeffs: Vec<[f64; 3]>) -> Result<Self> {
        check_sites(coeffs.len())?;
        if coeffs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::domain("additive operator coefficients must be finite"));
        }
        Ok(Self { coeffs })
    }

    /// From a flat vector ordered `(site, axis)` → `3(l−1) + axis`.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.is_empty() || !flat.len().is_multiple_of(3) {
            return Err(Error::domain(format!(
                "flat coefficient vector of length {} is not 3N",
                flat.len()
            )));
        }
        Self::new(flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
    }

    /// Total magnetization `M_axis = Σ_l σ_axis(l)`.
    pub fn magnetization(n_sites: usize, axis: PauliAxis) -> Result<Self> {
        let mut row = [0.0; 3];
        row[axis.index()] = 1.0;
        Self::new(vec![row; n_sites])
    }

    /// Staggered magnetization `Σ_l (−1)^l σ_axis(l)`.
    pub fn staggered(n_sites: usize, axis: PauliAxis) -> Result<Self> {
        let coeffs = (1..=n_sites)
            .map(|l| {
                let mut row = [0.0; 3];
                row[axis.index()] = if l % 2 == 0 { 1.0 } else { -1.0 };
                row
            })
            .collect();
        Self::new(coeffs)
    }

    /// Normalized operator with i.i.d. Gaussian coefficients.
    pub fn random<R: Rng + ?Sized>(n_sites: usize, rng: &mut R) -> Result<Self> {
        let coeffs = (0..n_sites)
            .map(|_| [standard_normal(rng), standard_normal(rng), standard_normal(rng)])
            .collect();
        Self::new(coeffs)?.normalized()
    }

    pub fn n_sites(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[[f64; 3]] {
        &self.coeffs
    }

    pub fn flat(&self) -> Vec<f64> {
        self.coeffs.iter().flatten().copied().collect()
    }

    pub fn weight(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c * c).sum()
    }

    /// Rescaled so that `Σ c² = N`.
    pub fn normalized(&self) -> Result<Self> {
        let w = self.weight();
        if !(w > 0.0) {
            return Err(Error::domain("cannot normalize the zero additive operator"));
        }
        let scale = (self.n_sites() as f64 / w).sqrt();
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| [r[0] * scale, r[1] * scale, r[2] * scale])
                .collect(),
        })
    }

    /// `Â|ψ⟩`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_sites != self.n_sites() {
            return Err(Error::domain(format!(
                "operator acts on {} sites but the state has {}",
                self.n_sites(),
                state.n_sites
            )));
        }
        let amps = &state.amplitudes;
        let mut out = vec![ZERO; amps.len()];
        for (l, &[cx, cy, cz]) in self.coeffs.iter().enumerate() {
            let mask = 1usize << l;
            for (i, a) in amps.iter().enumerate() {
                let up = i & mask == 0;
                // σ_x + σ_y part moves weight to the flipped index.
                let flip = Complex64::new(cx, if up { cy } else { -cy });
                out[i ^ mask] += flip * a;
                out[i] += if up { cz * a } else { -cz * a };
            }
        }
        Ok(StateVector {
            n_sites: state.n_sites,
            amplitudes: out,
        })
    }
}

/// `⟨Â²⟩ − ⟨Â⟩²`, clamped at zero.
pub fn additive_variance(state: &StateVector, op: &AdditiveOperator) -> Result<f64> {
    state.require_normalized()?;
    let image = op.apply(state)?;
    let mean = state.inner(&image).re;
    let second = image.norm_sqr();
    Ok((second - mean * mean).max(0.0))
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    ghz_with_sign(n, 1.0)
}

/// `(|0…0⟩ + sign·|1…1⟩)/√2`.
pub fn ghz_with_sign(n: usize, sign: f64) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::domain(format!("GHZ state needs n >= 2, got {n}")));
    }
    check_sites(n)?;
    let dim = 1usize << n;
    let mut amplitudes = vec![ZERO; dim];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amplitudes[0] = Complex64::new(h, 0.0);
    amplitudes[dim - 1] = Complex64::new(sign * h, 0.0);
    Ok(StateVector {
        n_sites: n,
        amplitudes,
    })
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
