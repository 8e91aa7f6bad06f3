//! Variance-covariance matrix (VCM) of a pure state and the scaling fits built on it.
//!
//! For an additive operator `Â = Σ_l Σ_α c_{lα} σ_α(l)` the variance in `|ψ⟩` is the
//! quadratic form `cᵀVc`, so the largest eigenvalue `e₁` of the `3N × 3N` VCM
//! bounds every additive fluctuation by `e₁·N` (with `Σc² = N`). Fitting
//! `e₁ ∝ N^{p−1}` across chain lengths gives the index `p`.
//!
//! Rows and columns are indexed by `3(l−1) + a` with `a = 0, 1, 2` for `x, y, z`.

use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigensolve::{chain_state, ChainState};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_descending, hermiticity_defect, symmetric_eigen_ascending};
use crate::pauli::{apply_pauli, raw_expectation, AdditiveOperator, PauliAxis, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    /// Connected Pauli correlations of a pure state.
    Vcm,
    /// Gram matrix of the commutators `[ρ, σ_α(l)]` of a density matrix.
    W,
}

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub n_sites: usize,
    pub kind: CorrelationKind,
    pub entries: DMatrix<Complex64>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors of the two largest eigenvalues, as columns.
    pub principal_vectors: DMatrix<Complex64>,
}

/// Flattened index of `(axis, site)` with a 1-based site.
pub fn flat_index(axis: PauliAxis, site: usize) -> usize {
    3 * (site - 1) + axis.index()
}

impl CorrelationMatrix {
    pub(crate) fn from_entries(n_sites: usize, kind: CorrelationKind, entries: DMatrix<Complex64>) -> Self {
        let eig = hermitian_eigen_descending(&entries);
        let keep = eig.values.len().min(2);
        let principal_vectors = eig.vectors.columns(0, keep).into_owned();
        Self {
            n_sites,
            kind,
            entries,
            eigenvalues: eig.values,
            principal_vectors,
        }
    }

    pub fn e1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn e2(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("3N >= 3 eigenvalues")
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    pub fn entry(&self, a: PauliAxis, l: usize, b: PauliAxis, lp: usize) -> Complex64 {
        self.entries[(flat_index(a, l), flat_index(b, lp))]
    }

    /// Symmetric real part; its quadratic form is the variance of real-coefficient operators.
    pub fn real_part(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    /// `cᵀ Re(M) c` for the flattened coefficients of `op`.
    pub fn quadratic_form(&self, op: &AdditiveOperator) -> Result<f64> {
        if op.n_sites() != self.n_sites {
            return Err(Error::domain("operator and correlation matrix sizes differ"));
        }
        let c = op.flat();
        let mut acc = 0.0;
        for (i, ci) in c.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                acc += ci * cj * self.entries[(i, j)].re;
            }
        }
        Ok(acc)
    }
}

/// `V_{αl,βl′} = ⟨σ_α(l)σ_β(l′)⟩ − ⟨σ_α(l)⟩⟨σ_β(l′)⟩`, same-site off-axis entries included.
pub fn build_vcm(state: &StateVector) -> Result<CorrelationMatrix> {
    state.require_normalized()?;
    let n = state.n_sites();
    let images: Vec<StateVector> = (0..3 * n)
        .into_par_iter()
        .map(|k| apply_pauli(state, PauliAxis::from_index(k % 3).unwrap(), k / 3 + 1))
        .collect::<Result<_>>()?;
    let means: Vec<f64> = (0..3 * n)
        .map(|k| raw_expectation(state, PauliAxis::from_index(k % 3).unwrap(), k / 3 + 1).re)
        .collect();

    let dim = 3 * n;
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|a| {
            (0..dim)
                .map(|b| {
                    if b < a {
                        Complex64::new(0.0, 0.0)
                    } else {
                        images[a].inner(&images[b]) - means[a] * means[b]
                    }
                })
                .collect()
        })
        .collect();
    let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            entries[(a, b)] = rows[a][b];
            entries[(b, a)] = rows[a][b].conj();
        }
        entries[(a, a)].im = 0.0;
    }
    Ok(CorrelationMatrix::from_entries(n, CorrelationKind::Vcm, entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `ln y` against `ln x`.
    PowerLaw,
    /// `ln y` against `x`.
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub model: FitModel,
}

impl ScalingFit {
    /// `p = 1 + slope` of a power-law fit of `e₁` against `N`.
    pub fn index_p(&self) -> f64 {
        1.0 + self.slope
    }

    pub fn predict(&self, x: f64) -> f64 {
        let t = match self.model {
            FitModel::PowerLaw => x.ln(),
            FitModel::Exponential => x,
        };
        (self.intercept + self.slope * t).exp()
    }
}

fn least_squares(ts: &[f64], us: &[f64]) -> (f64, f64, f64) {
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let mu = us.iter().sum::<f64>() / n;
    let stt: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    let stu: f64 = ts.iter().zip(us).map(|(t, u)| (t - mt) * (u - mu)).sum();
    let slope = stu / stt;
    let intercept = mu - slope * mt;
    let ss_tot: f64 = us.iter().map(|u| (u - mu).powi(2)).sum();
    let ss_res: f64 = ts
        .iter()
        .zip(us)
        .map(|(t, u)| (u - intercept - slope * t).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * us.len() as f64 * mu.abs().max(1.0) {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r_squared)
}

pub fn fit_scaling(xs: &[f64], ys: &[f64], model: FitModel) -> Result<ScalingFit> {
    if xs.len() != ys.len() {
        return Err(Error::domain("x and y series differ in length"));
    }
    if xs.len() < 3 {
        return Err(Error::domain(format!("need at least 3 points, got {}", xs.len())));
    }
    if let Some(y) = ys.iter().find(|y| !(**y > 0.0)) {
        return Err(Error::domain(format!("scaling fits need positive values, got {y}")));
    }
    let ts: Vec<f64> = match model {
        FitModel::PowerLaw => {
            if xs.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::domain("power-law fits need positive abscissae"));
            }
            xs.iter().map(|x| x.ln()).collect()
        }
        FitModel::Exponential => xs.to_vec(),
    };
    let spread = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ts.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(spread > 0.0) {
        return Err(Error::domain("abscissae must not all coincide"));
    }
    let us: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&ts, &us);
    Ok(ScalingFit {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        slope,
        intercept,
        r_squared,
        model,
    })
}

fn split_points(points: &[(usize, f64)]) -> (Vec<f64>, Vec<f64>) {
    points.iter().map(|&(n, y)| (n as f64, y)).unzip()
}

/// Power-law fit of `e₁` against `N`; see [`ScalingFit::index_p`].
pub fn fit_index_p(points: &[(usize, f64)]) -> Result<ScalingFit> {
    let (xs, ys) = split_points(points);
    fit_scaling(&xs, &ys, FitModel::PowerLaw)
}

/// Linear fit of `ln ΔE` against `N`.
pub fn fit_exponential_gap(points: &[(usize, f64)]) -> Result<ScalingFit> {
    let (xs, ys) = split_points(points);
    fit_scaling(&xs, &ys, FitModel::Exponential)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VcmPoint {
    pub n: usize,
    pub lambda: f64,
    pub e1: f64,
    pub e2: f64,
}

/// `e₁` and `e₂` of the VCM of a chain eigenstate for every `N` in the range.
pub fn vcm_scan(
    lambda: f64,
    ns: RangeInclusive<usize>,
    which: ChainState,
    tol: f64,
) -> Result<Vec<VcmPoint>> {
    ns.into_par_iter()
        .map(|n| {
            let state = chain_state(n, lambda, which, tol)?;
            let vcm = build_vcm(&state)?;
            Ok(VcmPoint {
                n,
                lambda,
                e1: vcm.e1(),
                e2: vcm.e2(),
            })
        })
        .collect()
}

/// Second-largest VCM eigenvalue of the ground state across chain lengths.
pub fn second_eigenvalue_scan(lambda: f64, ns: RangeInclusive<usize>, tol: f64) -> Result<Vec<(usize, f64)>> {
    Ok(vcm_scan(lambda, ns, ChainState::Ground, tol)?
        .into_iter()
        .map(|p| (p.n, p.e2))
        .collect())
}

/// The additive operator of largest variance read off a correlation matrix.
#[derive(Debug, Clone)]
pub struct FluctuationOperator {
    /// Normalized to `Σc² = N`.
    pub operator: AdditiveOperator,
    /// Largest eigenvalue of the real part; the variance of `operator` is this times `N`.
    pub eigenvalue: f64,
    /// Set when the top eigenvalue is degenerate and the direction is not unique.
    pub ambiguous: bool,
}

impl FluctuationOperator {
    /// Fraction of `Σc²` carried by one Pauli axis.
    pub fn axis_weight(&self, axis: PauliAxis) -> f64 {
        let total = self.operator.weight();
        self.operator
            .coeffs()
            .iter()
            .map(|r| r[axis.index()].powi(2))
            .sum::<f64>()
            / total
    }
}

/// Principal direction of `Re(M)`, the maximizer of `cᵀMc` over real coefficients.
///
/// Hermitian additive operators have real coefficients, so the imaginary
/// (antisymmetric) part of the VCM never contributes to their variance.
pub fn max_fluctuation_operator(matrix: &CorrelationMatrix) -> Result<FluctuationOperator> {
    let (values, vectors) = symmetric_eigen_ascending(matrix.real_part());
    let dim = values.len();
    let top = values[dim - 1];
    let next = values[dim - 2];
    let ambiguous = top - next < 1e-10 * top.abs().max(f64::MIN_POSITIVE);
    let mut flat: Vec<f64> = vectors.column(dim - 1).iter().copied().collect();
    // fix the overall sign: largest-magnitude coefficient positive
    let pivot = flat
        .iter()
        .copied()
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() * (1.0 + 1e-12) { x } else { acc });
    if pivot < 0.0 {
        flat.iter_mut().for_each(|x| *x = -*x);
    }
    let operator = AdditiveOperator::from_flat(&flat)?.normalized()?;
    Ok(FluctuationOperator {
        operator,
        eigenvalue: top,
        ambiguous,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MzDistribution {
    pub n_sites: usize,
    /// `−N, −N+2, …, N`.
    pub support: Vec<i64>,
    pub probabilities: Vec<f64>,
}

impl MzDistribution {
    pub fn probability(&self, mz: i64) -> f64 {
        let n = self.n_sites as i64;
        if mz < -n || mz > n || (mz + n) % 2 != 0 {
            return 0.0;
        }
        self.probabilities[((mz + n) / 2) as usize]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// `max |P(M) − P(−M)|`.
    pub fn asymmetry(&self) -> f64 {
        let k = self.probabilities.len();
        (0..k)
            .map(|i| (self.probabilities[i] - self.probabilities[k - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_{M>0} P(M)`.
    pub fn positive_weight(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probabilities)
            .filter(|(m, _)| **m > 0)
            .map(|(_, p)| p)
            .sum()
    }

    /// Support points attaining the maximal probability (within a relative 1e-12).
    pub fn global_maxima(&self) -> Vec<i64> {
        let peak = self.probabilities.iter().cloned().fold(0.0, f64::max);
        self.support
            .iter()
            .zip(&self.probabilities)
            .filter(|(_, p)| **p >= peak * (1.0 - 1e-12))
            .map(|(m, _)| *m)
            .collect()
    }
}

/// Distribution of the total magnetization `M_z` in the state.
pub fn mz_distribution(state: &StateVector) -> MzDistribution {
    let n = state.n_sites();
    let mut probabilities = vec![0.0; n + 1];
    for (i, a) in state.amplitudes().iter().enumerate() {
        // M_z = N − 2·(number of down spins); slot (M_z + N)/2 = N − downs
        probabilities[n - i.count_ones() as usize] += a.norm_sqr();
    }
    let nn = n as i64;
    MzDistribution {
        n_sites: n,
        support: (0..=nn).map(|k| 2 * k - nn).collect(),
        probabilities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::lowest_eigenpairs;
    use crate::model::build_tfim;
    use crate::pauli::{additive_variance, ghz_state, ghz_with_sign, two_point};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Entry-by-entry oracle from `two_point` and `expectation`.
    fn vcm_oracle(state: &StateVector) -> DMatrix<Complex64> {
        let n = state.n_sites();
        let mut m = DMatrix::zeros(3 * n, 3 * n);
        for l in 1..=n {
            for a in PauliAxis::ALL {
                for lp in 1..=n {
                    for b in PauliAxis::ALL {
                        let ea = crate::pauli::expectation(state, a, l).unwrap();
                        let eb = crate::pauli::expectation(state, b, lp).unwrap();
                        m[(flat_index(a, l), flat_index(b, lp))] =
                            two_point(state, a, l, b, lp).unwrap() - ea * eb;
                    }
                }
            }
        }
        m
    }

    #[test]
    fn vcm_matches_entrywise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = StateVector::random(4, &mut rng).unwrap();
        let v = build_vcm(&s).unwrap();
        assert!((&v.entries - vcm_oracle(&s)).norm() < 1e-12);
        assert!(v.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn product_state_vcm() {
        for n in [3, 6, 9] {
            let v = build_vcm(&StateVector::all_up(n).unwrap()).unwrap();
            assert!((v.e1() - 2.0).abs() < 1e-12);
            assert!((v.e2() - 2.0).abs() < 1e-12);
            let i = Complex64::new(0.0, 1.0);
            assert!((v.entry(PauliAxis::X, 2, PauliAxis::Y, 2) - i).norm() < 1e-14);
            assert!(v.entry(PauliAxis::X, 1, PauliAxis::X, 2).norm() < 1e-14);
        }
    }

    #[test]
    fn ghz_vcm() {
        for n in [3, 5, 8] {
            let v = build_vcm(&ghz_state(n).unwrap()).unwrap();
            assert!(v.e1() >= n as f64 - 1e-10);
            assert!(v.e2() <= 2.0 + 1e-10);
            let op = max_fluctuation_operator(&v).unwrap();
            assert!(!op.ambiguous);
            assert!(op.axis_weight(PauliAxis::Z) > 1.0 - 1e-12);
            for row in op.operator.coeffs() {
                assert!((row[2] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn product_state_fluctuation_is_ambiguous_in_the_xy_plane() {
        let v = build_vcm(&StateVector::all_up(5).unwrap()).unwrap();
        let op = max_fluctuation_operator(&v).unwrap();
        assert!(op.ambiguous);
        assert!(op.axis_weight(PauliAxis::Z) < 1e-12);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let s = StateVector::all_up(3).unwrap().scaled(Complex64::new(2.0, 0.0));
        assert!(matches!(build_vcm(&s), Err(Error::Contract(_))));
    }

    #[test]
    fn fit_examples() {
        let flat: Vec<(usize, f64)> = (6..=13).map(|n| (n, 2.0)).collect();
        let f = fit_index_p(&flat).unwrap();
        assert!((f.index_p() - 1.0).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);

        let linear: Vec<(usize, f64)> = (6..=13).map(|n| (n, n as f64)).collect();
        let f = fit_index_p(&linear).unwrap();
        assert!((f.index_p() - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);

        let decay: Vec<(usize, f64)> = (4..=13).map(|n| (n, (-(n as f64)).exp())).collect();
        let f = fit_exponential_gap(&decay).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);

        assert!(matches!(fit_index_p(&[(4, 1.0), (5, 0.0), (6, 1.0)]), Err(Error::Domain(_))));
        assert!(matches!(fit_index_p(&[(4, 1.0), (5, 1.0)]), Err(Error::Domain(_))));
        assert!(matches!(fit_exponential_gap(&[(4, 1.0), (5, -1.0), (6, 1.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn ground_state_fluctuates_along_uniform_mz() {
        let n = 10;
        let p = lowest_eigenpairs(&build_tfim(n, 0.5).unwrap(), 1, 1e-10).unwrap();
        let v = build_vcm(&p.eigenvectors[0]).unwrap();
        let op = max_fluctuation_operator(&v).unwrap();
        assert!(op.axis_weight(PauliAxis::Z) > 0.95);
        let zs: Vec<f64> = op.operator.coeffs().iter().map(|r| r[2]).collect();
        let mean = zs.iter().sum::<f64>() / n as f64;
        assert!(zs.iter().all(|z| (z - mean).abs() < 0.05 * mean.abs()));

        let var = additive_variance(&p.eigenvectors[0], &op.operator).unwrap();
        assert!((var - op.eigenvalue * n as f64).abs() < 1e-6 * var);
        assert!(op.eigenvalue <= v.e1() + 1e-12);
    }

    #[test]
    fn second_eigenvalue_stays_bounded_for_ghz() {
        let e2: Vec<f64> = (3..=8)
            .map(|n| build_vcm(&ghz_state(n).unwrap()).unwrap().e2())
            .collect();
        assert!(e2.iter().all(|&e| e <= 2.0 + 1e-10));
    }

    #[test]
    fn mz_distribution_examples() {
        let d = mz_distribution(&ghz_state(5).unwrap());
        assert_eq!(d.support, vec![-5, -3, -1, 1, 3, 5]);
        assert!((d.probability(5) - 0.5).abs() < 1e-15);
        assert!((d.probability(-5) - 0.5).abs() < 1e-15);
        assert_eq!(d.probability(1), 0.0);
        assert_eq!(d.probability(2), 0.0);

        let up = mz_distribution(&StateVector::all_up(4).unwrap());
        assert_eq!(up.probability(4), 1.0);
    }

    #[test]
    fn mz_distribution_matches_a_direct_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = StateVector::random(6, &mut rng).unwrap();
        let d = mz_distribution(&s);
        for m in (-6i64..=6).step_by(2) {
            let direct: f64 = s
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| {
                    let ups = (0..6).filter(|l| i >> l & 1 == 0).count() as i64;
                    2 * ups - 6 == m
                })
                .map(|(_, a)| a.norm_sqr())
                .sum();
            assert!((d.probability(m) - direct).abs() < 1e-15);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_eigenstates_have_symmetric_mz_distribution() {
        let d = mz_distribution(&ghz_with_sign(7, -1.0).unwrap());
        assert!(d.asymmetry() < 1e-15);
        let p = lowest_eigenpairs(&build_tfim(9, 0.7).unwrap(), 2, 1e-10).unwrap();
        for v in &p.eigenvectors {
            assert!(mz_distribution(v).asymmetry() < 1e-10);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn vcm_psd_and_rayleigh_bound(seed in any::<u64>()) {
                let n = 5;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let s = StateVector::random(n, &mut rng).unwrap();
                let v = build_vcm(&s).unwrap();
                prop_assert!(v.min_eigenvalue() > -1e-8);
                prop_assert!(v.hermiticity_defect() < 1e-10);
                for _ in 0..10 {
                    let op = AdditiveOperator::random(n, &mut rng).unwrap();
                    let var = additive_variance(&s, &op).unwrap();
                    prop_assert!(var <= v.e1() * n as f64 + 1e-6);
                    prop_assert!((var - v.quadratic_form(&op).unwrap()).abs() < 1e-10);
                }
                let best = max_fluctuation_operator(&v).unwrap();
                let var = additive_variance(&s, &best.operator).unwrap();
                prop_assert!((var - best.eigenvalue * n as f64).abs() <= 1e-6 * var.max(1.0));
            }

            #[test]
            fn product_states_have_e1_at_most_two(seed in any::<u64>()) {
                use rand::Rng;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sites: Vec<[Complex64; 2]> = (0..6)
                    .map(|_| [
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    ])
                    .collect();
                let s = StateVector::product(&sites).unwrap();
                let v = build_vcm(&s).unwrap();
                prop_assert!(v.e1() <= 2.0 + 1e-10);
            }
        }
    }
}
