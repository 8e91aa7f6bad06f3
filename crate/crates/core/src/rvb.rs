//! Nearest-neighbour resonating-valence-bond state on the periodic chain.
//!
//! `|Ψ⟩ ∝ |VB₁⟩ + |VB₂⟩` where `|VB₁⟩` pairs `(2l−1, 2l)` and `|VB₂⟩` pairs
//! `(2l, 2l+1)` into singlets `(|0_i 1_j⟩ − |1_i 0_j⟩)/√2`. The wraparound pair of
//! `|VB₂⟩` is written `(1, N)`; with that orientation `⟨VB₂|VB₁⟩ = (−1/2)^{N/2−1}`
//! and `t̂_{2,3}|VB₁⟩ = −½|VB₁ with (1,2),(3,4) → (1,4),(2,3)⟩` hold exactly, and the
//! norm is `⟨Ψ|Ψ⟩ = 2 + 2(−1/2)^{N/2−1}` before normalization.
//!
//! `T̂ = Σ_l (−1)^l t̂_{l,l+1}` with `t̂` the singlet projector distinguishes the two
//! coverings and has `O(N²)` variance in `|Ψ⟩`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::macroscopicity::{build_vcm, flat_index};
use crate::pauli::{apply_pauli, AdditiveOperator, PauliAxis, StateVector};

pub const MIN_RVB_SITES: usize = 4;
pub const MAX_RVB_SITES: usize = 14;
/// Largest chain for the correlation-matrix checks.
pub const MAX_CORRELATION_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCovering {
    n_sites: usize,
    /// 1-based; the first site of each pair carries the `0` in `|01⟩`.
    pairs: Vec<(usize, usize)>,
}

fn check_even(n: usize, max: usize) -> Result<()> {
    if !n.is_multiple_of(2) || n < MIN_RVB_SITES || n > max {
        return Err(Error::domain(format!(
            "valence-bond states need even N in {MIN_RVB_SITES}..={max}, got {n}"
        )));
    }
    Ok(())
}

impl PairCovering {
    pub fn new(n_sites: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        check_even(n_sites, MAX_RVB_SITES)?;
        if pairs.len() != n_sites / 2 {
            return Err(Error::domain(format!(
                "a covering of {n_sites} sites needs {} pairs, got {}",
                n_sites / 2,
                pairs.len()
            )));
        }
        let mut seen = vec![false; n_sites + 1];
        for &(i, j) in &pairs {
            for s in [i, j] {
                if s == 0 || s > n_sites {
                    return Err(Error::domain(format!("site {s} outside 1..={n_sites}")));
                }
                if seen[s] {
                    return Err(Error::domain(format!("site {s} appears in more than one pair")));
                }
                seen[s] = true;
            }
        }
        Ok(Self { n_sites, pairs })
    }

    /// `(1,2), (3,4), …`.
    pub fn vb1(n: usize) -> Result<Self> {
        Self::new(n, (1..=n / 2).map(|l| (2 * l - 1, 2 * l)).collect())
    }

    /// `(2,3), (4,5), …, (N−2,N−1), (1,N)`.
    pub fn vb2(n: usize) -> Result<Self> {
        let mut pairs: Vec<_> = (1..n / 2).map(|l| (2 * l, 2 * l + 1)).collect();
        pairs.push((1, n));
        Self::new(n, pairs)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Product of singlets over the covering.
pub fn build_vb(covering: &PairCovering) -> Result<StateVector> {
    let n = covering.n_sites();
    let amp = std::f64::consts::FRAC_1_SQRT_2.powi((n / 2) as i32);
    let amplitudes = (0..1usize << n)
        .map(|idx| {
            let mut sign = 1.0;
            for &(i, j) in covering.pairs() {
                let (bi, bj) = (idx >> (i - 1) & 1, idx >> (j - 1) & 1);
                if bi == bj {
                    return Complex64::new(0.0, 0.0);
                }
                if bi == 1 {
                    sign = -sign;
                }
            }
            Complex64::new(sign * amp, 0.0)
        })
        .collect();
    StateVector::from_amplitudes(n, amplitudes)
}

/// `⟨VB₂|VB₁⟩ = (−1/2)^{N/2−1}`.
pub fn vb_overlap(n: usize) -> f64 {
    (-0.5f64).powi((n / 2) as i32 - 1)
}

/// `‖|VB₁⟩ + |VB₂⟩‖²`.
pub fn rvb_norm_sqr(n: usize) -> f64 {
    2.0 + 2.0 * vb_overlap(n)
}

pub fn build_rvb(n: usize) -> Result<StateVector> {
    check_even(n, MAX_RVB_SITES)?;
    let vb1 = build_vb(&PairCovering::vb1(n)?)?;
    let vb2 = build_vb(&PairCovering::vb2(n)?)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(vb1
        .add_scaled(one, &vb2)?
        .scaled(Complex64::new(1.0 / rvb_norm_sqr(n).sqrt(), 0.0)))
}

fn bond_sites(n: usize, l: usize) -> Result<(usize, usize)> {
    if l == 0 || l > n {
        return Err(Error::domain(format!("bond index {l} outside 1..={n}")));
    }
    Ok((l, if l == n { 1 } else { l + 1 }))
}

/// `t̂_{l,l+1}|ψ⟩`, the singlet projector on sites `l` and `l+1` (wrapping at `l = N`).
pub fn singlet_projector_apply(state: &StateVector, l: usize) -> Result<StateVector> {
    let n = state.n_sites();
    let (a, b) = bond_sites(n, l)?;
    let (ma, mb) = (1usize << (a - 1), 1usize << (b - 1));
    let src = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for idx in 0..src.len() {
        // visit each (01, 10) pair once, from the index with site a up and site b down
        if idx & ma == 0 && idx & mb != 0 {
            let partner = idx ^ ma ^ mb;
            let s = (src[idx] - src[partner]) * 0.5;
            out[idx] = s;
            out[partner] = -s;
        }
    }
    StateVector::from_amplitudes(n, out)
}

/// `T̂|ψ⟩ = Σ_l (−1)^l t̂_{l,l+1}|ψ⟩`.
pub fn t_operator_apply(state: &StateVector) -> Result<StateVector> {
    let n = state.n_sites();
    let mut acc = StateVector::from_amplitudes(n, vec![Complex64::new(0.0, 0.0); state.dim()])?;
    for l in 1..=n {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.add_scaled(Complex64::new(sign, 0.0), &singlet_projector_apply(state, l)?)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `⟨T̂⟩` and `⟨T̂²⟩ − ⟨T̂⟩²` in `|Ψ⟩`.
pub fn t_operator_moments(n: usize) -> Result<TMoments> {
    let psi = build_rvb(n)?;
    let t_psi = t_operator_apply(&psi)?;
    let mean = psi.inner(&t_psi).re;
    Ok(TMoments {
        mean,
        variance: t_psi.norm_sqr() - mean * mean,
    })
}

pub fn ring_distance(n: usize, l: usize, lp: usize) -> usize {
    let d = l.abs_diff(lp);
    d.min(n - d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationScan {
    /// Largest connected correlation over site pairs at ring distance ≥ 2.
    pub max_long_range: f64,
    /// `(α, l, β, l′)` attaining it.
    pub argmax: (PauliAxis, usize, PauliAxis, usize),
    /// `|⟨σ_z(1)σ_z(2)⟩_c|`.
    pub nearest_neighbor_zz: f64,
}

pub fn connected_correlation_scan(n: usize) -> Result<CorrelationScan> {
    check_even(n, MAX_CORRELATION_SITES)?;
    let vcm = build_vcm(&build_rvb(n)?)?;
    let mut best = (0.0, (PauliAxis::X, 1, PauliAxis::X, 1));
    for l in 1..=n {
        for lp in 1..=n {
            if ring_distance(n, l, lp) < 2 {
                continue;
            }
            for a in PauliAxis::ALL {
                for b in PauliAxis::ALL {
                    let c = vcm.entries[(flat_index(a, l), flat_index(b, lp))].norm();
                    if c > best.0 {
                        best = (c, (a, l, b, lp));
                    }
                }
            }
        }
    }
    Ok(CorrelationScan {
        max_long_range: best.0,
        argmax: best.1,
        nearest_neighbor_zz: vcm.entry(PauliAxis::Z, 1, PauliAxis::Z, 2).norm(),
    })
}

/// Largest VCM eigenvalue of `|Ψ⟩`.
pub fn rvb_vcm_check(n: usize) -> Result<f64> {
    check_even(n, MAX_CORRELATION_SITES)?;
    Ok(build_vcm(&build_rvb(n)?)?.e1())
}

/// A named numerical identity: passes when `value` lies in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl IdentityCheck {
    fn equals(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower: expected - tol,
            upper: expected + tol,
        }
    }

    fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower,
            upper,
        }
    }

    pub fn passed(&self) -> bool {
        self.value >= self.lower && self.value <= self.upper
    }
}

/// The pair covering obtained from `|VB₁⟩` by the swap `t̂_{2,3}`: `(1,4), (2,3), (5,6), …`.
pub fn swapped_covering(n: usize) -> Result<PairCovering> {
    let mut pairs = vec![(1, 4), (2, 3)];
    pairs.extend((3..=n / 2).map(|l| (2 * l - 1, 2 * l)));
    PairCovering::new(n, pairs)
}

/// Every identity of the valence-bond construction at one chain length.
///
/// Correlation-matrix checks are included up to [`MAX_CORRELATION_SITES`]; the
/// `T̂` variance window applies from `N = 8`. At `N = 4` the nearest-neighbour
/// `zz` correlation vanishes, so that check starts at `N = 6`.
pub fn identity_checks(n: usize) -> Result<Vec<IdentityCheck>> {
    check_even(n, MAX_RVB_SITES)?;
    let nf = n as f64;
    let vb1 = build_vb(&PairCovering::vb1(n)?)?;
    let vb2 = build_vb(&PairCovering::vb2(n)?)?;
    let psi = build_rvb(n)?;
    let mut checks = Vec::new();

    checks.push(IdentityCheck::equals("vb2_vb1_overlap", vb2.inner(&vb1).re, vb_overlap(n), 1e-12));
    checks.push(IdentityCheck::equals("rvb_norm", psi.norm_sqr(), 1.0, 1e-12));
    checks.push(IdentityCheck::equals(
        "vb1_rvb_overlap",
        vb1.inner(&psi).re,
        (1.0 + vb_overlap(n)) / rvb_norm_sqr(n).sqrt(),
        1e-12,
    ));
    for axis in PauliAxis::ALL {
        let m = AdditiveOperator::magnetization(n, axis)?;
        checks.push(IdentityCheck::equals(
            format!("m{axis}_annihilates_rvb"),
            m.apply(&psi)?.norm(),
            0.0,
            1e-12,
        ));
    }

    let t23 = singlet_projector_apply(&vb1, 2)?;
    let swapped = build_vb(&swapped_covering(n)?)?;
    let coefficient = swapped.inner(&t23);
    checks.push(IdentityCheck::equals("swap_coefficient", coefficient.re, -0.5, 1e-12));
    checks.push(IdentityCheck::equals(
        "swap_residual",
        t23.distance(&swapped.scaled(coefficient)),
        0.0,
        1e-12,
    ));
    checks.push(IdentityCheck::equals("vb1_t23_vb1", vb1.inner(&t23).re, 0.25, 1e-12));
    checks.push(IdentityCheck::equals(
        "projector_idempotent",
        singlet_projector_apply(&t23, 2)?.distance(&t23),
        0.0,
        1e-12,
    ));

    let mut iterated = vb1.clone();
    for l in 1..n / 2 {
        iterated = singlet_projector_apply(&iterated, 2 * l)?;
    }
    let factor = (-2.0f64).powi((n / 2) as i32 - 1);
    checks.push(IdentityCheck::equals(
        "iterated_swap_residual",
        iterated.scaled(Complex64::new(factor, 0.0)).distance(&vb2),
        0.0,
        1e-10,
    ));

    let t_vb1 = vb1.inner(&t_operator_apply(&vb1)?).re;
    checks.push(IdentityCheck::equals("vb1_t_vb1", t_vb1, -3.0 * nf / 8.0, 1e-10));
    if n >= 8 {
        let moments = t_operator_moments(n)?;
        checks.push(IdentityCheck::equals("rvb_t_mean", moments.mean, 0.0, 0.5));
        checks.push(IdentityCheck::within("rvb_t_variance_over_n2", moments.variance / (nf * nf), 0.10, 0.18));
    }

    if n <= MAX_CORRELATION_SITES {
        let scan = connected_correlation_scan(n)?;
        checks.push(IdentityCheck::equals("long_range_connected_max", scan.max_long_range, 0.0, 1e-12));
        if n >= 6 {
            checks.push(IdentityCheck::within("nearest_neighbor_zz", scan.nearest_neighbor_zz, 0.1, f64::INFINITY));
        }
        checks.push(IdentityCheck::within("vcm_e1", rvb_vcm_check(n)?, 1.0, f64::INFINITY));
    }
    Ok(checks)
}

/// `⟨σ_α(l)σ_β(l′)⟩` in `|Ψ⟩` computed without the correlation matrix.
pub fn rvb_two_point(n: usize, a: PauliAxis, l: usize, b: PauliAxis, lp: usize) -> Result<Complex64> {
    let psi = build_rvb(n)?;
    let left = apply_pauli(&psi, a, l)?;
    let right = apply_pauli(&psi, b, lp)?;
    Ok(left.inner(&right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{additive_variance, expectation};

    fn check(n: usize, name: &str) -> IdentityCheck {
        identity_checks(n)
            .unwrap()
            .into_iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("no check {name}"))
    }

    #[test]
    fn four_site_vb1_amplitudes() {
        let s = build_vb(&PairCovering::vb1(4).unwrap()).unwrap();
        // bits (site1, site2, site3, site4) little-endian
        let expect = |bits: [usize; 4]| bits.iter().enumerate().map(|(k, b)| b << k).sum::<usize>();
        let a = s.amplitudes();
        assert!((a[expect([0, 1, 0, 1])].re - 0.5).abs() < 1e-15);
        assert!((a[expect([1, 0, 0, 1])].re + 0.5).abs() < 1e-15);
        assert!((a[expect([0, 1, 1, 0])].re + 0.5).abs() < 1e-15);
        assert!((a[expect([1, 0, 1, 0])].re - 0.5).abs() < 1e-15);
        assert_eq!(a.iter().filter(|z| z.norm() > 0.0).count(), 4);
    }

    #[test]
    fn singlet_is_antisymmetric_and_spinless() {
        let ab = build_vb(&PairCovering::new(4, vec![(1, 2), (3, 4)]).unwrap()).unwrap();
        let ba = build_vb(&PairCovering::new(4, vec![(2, 1), (3, 4)]).unwrap()).unwrap();
        assert!((ab.inner(&ba).re + 1.0).abs() < 1e-15);
        for axis in PauliAxis::ALL {
            let m = AdditiveOperator::magnetization(4, axis).unwrap();
            assert!(m.apply(&ab).unwrap().norm() < 1e-15);
            assert!(additive_variance(&ab, &m).unwrap().abs() < 1e-15);
            for l in 1..=4 {
                assert!(expectation(&ab, axis, l).unwrap().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn covering_validation() {
        assert!(matches!(PairCovering::new(5, vec![]), Err(Error::Domain(_))));
        assert!(matches!(PairCovering::new(4, vec![(1, 2), (2, 3)]), Err(Error::Domain(_))));
        assert!(matches!(PairCovering::new(4, vec![(1, 2), (3, 5)]), Err(Error::Domain(_))));
        assert!(matches!(PairCovering::new(4, vec![(1, 2)]), Err(Error::Domain(_))));
        assert!(matches!(build_rvb(7), Err(Error::Domain(_))));
        assert!(matches!(build_rvb(2), Err(Error::Domain(_))));
        assert!(matches!(build_rvb(16), Err(Error::Domain(_))));
        let s = build_rvb(4).unwrap();
        assert!(matches!(singlet_projector_apply(&s, 0), Err(Error::Domain(_))));
        assert!(matches!(singlet_projector_apply(&s, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn coverings_are_the_two_dimer_patterns() {
        assert_eq!(PairCovering::vb1(6).unwrap().pairs(), &[(1, 2), (3, 4), (5, 6)]);
        assert_eq!(PairCovering::vb2(6).unwrap().pairs(), &[(2, 3), (4, 5), (1, 6)]);
        assert_eq!(swapped_covering(6).unwrap().pairs(), &[(1, 4), (2, 3), (5, 6)]);
    }

    #[test]
    fn overlap_matches_brute_force() {
        for n in (4..=12).step_by(2) {
            let vb1 = build_vb(&PairCovering::vb1(n).unwrap()).unwrap();
            let vb2 = build_vb(&PairCovering::vb2(n).unwrap()).unwrap();
            let direct: Complex64 = vb2
                .amplitudes()
                .iter()
                .zip(vb1.amplitudes())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!((direct.re - vb_overlap(n)).abs() < 1e-12, "N = {n}");
        }
        assert!((vb_overlap(8) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn rvb_is_normalized_and_unmagnetized() {
        for n in (4..=12).step_by(2) {
            let psi = build_rvb(n).unwrap();
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
            let mz = AdditiveOperator::magnetization(n, PauliAxis::Z).unwrap();
            assert!(psi.inner(&mz.apply(&psi).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn projector_is_idempotent_and_hermitian() {
        let psi = build_rvb(6).unwrap();
        let vb1 = build_vb(&PairCovering::vb1(6).unwrap()).unwrap();
        for l in 1..=6 {
            let once = singlet_projector_apply(&psi, l).unwrap();
            let twice = singlet_projector_apply(&once, l).unwrap();
            assert!(once.distance(&twice) < 1e-12);
            let lhs = vb1.inner(&once);
            let rhs = singlet_projector_apply(&vb1, l).unwrap().inner(&psi);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn projector_acts_as_one_on_its_own_singlet() {
        let vb1 = build_vb(&PairCovering::vb1(6).unwrap()).unwrap();
        for l in [1, 3, 5] {
            assert!(singlet_projector_apply(&vb1, l).unwrap().distance(&vb1) < 1e-14);
        }
    }

    #[test]
    fn swap_identity_at_four_sites() {
        let c = check(4, "swap_coefficient");
        assert!(c.passed(), "{c:?}");
        // at N = 4 the swapped covering is VB₂
        let vb1 = build_vb(&PairCovering::vb1(4).unwrap()).unwrap();
        let vb2 = build_vb(&PairCovering::vb2(4).unwrap()).unwrap();
        let t = singlet_projector_apply(&vb1, 2).unwrap();
        assert!(t.distance(&vb2.scaled(Complex64::new(-0.5, 0.0))) < 1e-14);
    }

    #[test]
    fn exact_identities_hold() {
        for n in (4..=12).step_by(2) {
            for name in [
                "vb2_vb1_overlap",
                "rvb_norm",
                "vb1_rvb_overlap",
                "mx_annihilates_rvb",
                "my_annihilates_rvb",
                "mz_annihilates_rvb",
                "swap_coefficient",
                "swap_residual",
                "vb1_t23_vb1",
                "projector_idempotent",
                "iterated_swap_residual",
                "vb1_t_vb1",
                "nearest_neighbor_zz",
                "vcm_e1",
            ] {
                if n == 4 && name == "nearest_neighbor_zz" {
                    continue;
                }
                let c = check(n, name);
                assert!(c.passed(), "N = {n}: {c:?}");
            }
        }
    }

    #[test]
    fn t_moments_match_an_explicit_square() {
        let n = 8;
        let psi = build_rvb(n).unwrap();
        let t = t_operator_apply(&psi).unwrap();
        let tt = t_operator_apply(&t).unwrap();
        let m = t_operator_moments(n).unwrap();
        assert!((psi.inner(&tt).re - m.mean.powi(2) - m.variance).abs() < 1e-12);
        assert!(m.mean.abs() < 0.5);
        assert!((0.10..=0.18).contains(&(m.variance / 64.0)));
    }

    #[test]
    fn vcm_agrees_with_direct_two_point() {
        let n = 6;
        let scan = connected_correlation_scan(n).unwrap();
        let (a, l, b, lp) = scan.argmax;
        let psi = build_rvb(n).unwrap();
        let direct = rvb_two_point(n, a, l, b, lp).unwrap()
            - expectation(&psi, a, l).unwrap() * expectation(&psi, b, lp).unwrap();
        assert!((direct.norm() - scan.max_long_range).abs() < 1e-12);
    }

    #[test]
    fn ring_distance_wraps() {
        assert_eq!(ring_distance(8, 1, 8), 1);
        assert_eq!(ring_distance(8, 1, 5), 4);
        assert_eq!(ring_distance(8, 2, 7), 3);
    }
}
