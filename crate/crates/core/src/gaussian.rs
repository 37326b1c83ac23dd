//! Multimode coherent states and Gaussian unitaries.
//!
//! Quadratures are ordered `(x_1..x_n, p_1..p_n)` with `alpha = (x + i p) /
//! sqrt(2)`; the vacuum covariance is `I / 2`. A [`CoherentLabel`] is a
//! displaced vacuum `e^{i phase} |alpha>`, and displacements use the Weyl
//! phase `D(delta)|alpha> = e^{i Im(delta conj(alpha))} |alpha + delta>`, so
//! complex overlaps (not just their magnitudes) are preserved exactly by
//! passive Gaussian unitaries.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
use num_complex::Complex64;

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Symplectic tolerance in max norm.
pub const SYMPLECTIC_TOL: f64 = 1e-12;
/// Matrices within this distance of symplectic get one Newton correction.
pub const RESYMPLECTIFY_TOL: f64 = 1e-8;
/// Largest squeezing component tolerated by [`apply_unitary`].
pub const PASSIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentLabel {
    amplitudes: Vec<Complex64>,
    phase: f64,
}

impl CoherentLabel {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_phase(amplitudes, 0.0)
    }

    pub fn with_phase(amplitudes: Vec<Complex64>, phase: f64) -> Result<Self> {
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) || !phase.is_finite() {
            return Err(Error::NonFinite("coherent label"));
        }
        Ok(CoherentLabel { amplitudes, phase })
    }

    pub fn vacuum(modes: usize) -> Self {
        CoherentLabel {
            amplitudes: vec![Complex64::new(0.0, 0.0); modes],
            phase: 0.0,
        }
    }

    pub fn modes(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Concatenation `self ⊕ other` (tensor product of coherent states).
    pub fn tensor(&self, other: &CoherentLabel) -> CoherentLabel {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.extend_from_slice(&other.amplitudes);
        CoherentLabel {
            amplitudes,
            phase: self.phase + other.phase,
        }
    }

    /// Restriction to a subset of modes, in the given order. The global
    /// phase stays with the full label.
    pub fn restrict(&self, modes: &[usize]) -> Result<CoherentLabel> {
        let mut amplitudes = Vec::with_capacity(modes.len());
        for &m in modes {
            let a = self.amplitudes.get(m).ok_or(Error::Dimension {
                expected: self.modes(),
                got: m + 1,
            })?;
            amplitudes.push(*a);
        }
        Ok(CoherentLabel { amplitudes, phase: 0.0 })
    }

    /// Real quadrature means `sqrt(2) (Re alpha, Im alpha)`.
    pub fn quadratures(&self) -> Vec<f64> {
        let n = self.modes();
        let mut r = vec![0.0; 2 * n];
        for (i, a) in self.amplitudes.iter().enumerate() {
            r[i] = SQRT_2 * a.re;
            r[n + i] = SQRT_2 * a.im;
        }
        r
    }
}

fn check_modes(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModeMismatch { left: a, right: b })
    }
}

/// Exponent `-1/2 sum |a - b|^2 + i Im sum conj(a) b` restricted to `modes`
/// (all modes when `None`), without the global phases.
fn overlap_exponent(a: &[Complex64], b: &[Complex64], modes: Option<&[usize]>) -> Complex64 {
    let term = |x: &Complex64, y: &Complex64| Complex64::new(-0.5 * (x - y).norm_sqr(), (x.conj() * y).im);
    match modes {
        None => a.iter().zip(b).map(|(x, y)| term(x, y)).sum(),
        Some(ix) => ix.iter().map(|&i| term(&a[i], &b[i])).sum(),
    }
}

/// `<a|b>` for coherent labels.
pub fn overlap(a: &CoherentLabel, b: &CoherentLabel) -> Result<Complex64> {
    check_modes(a.modes(), b.modes())?;
    let mut e = overlap_exponent(&a.amplitudes, &b.amplitudes, None);
    e.im += b.phase - a.phase;
    Ok(e.exp())
}

/// Disjoint covering of a mode registry by a field and a probe sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    field: Vec<usize>,
    probe: Vec<usize>,
}

impl Partition {
    pub fn new(modes: usize, field: Vec<usize>, probe: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; modes];
        for &m in field.iter().chain(&probe) {
            match seen.get_mut(m) {
                None => return Err(Error::InvalidPartition(format!("mode {m} outside registry of {modes}"))),
                Some(true) => return Err(Error::InvalidPartition(format!("mode {m} listed twice"))),
                Some(s) => *s = true,
            }
        }
        if let Some(m) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("mode {m} not covered")));
        }
        Ok(Partition { field, probe })
    }

    /// First `field` modes are field, the remaining `probe` are probe.
    pub fn split(field: usize, probe: usize) -> Self {
        Partition {
            field: (0..field).collect(),
            probe: (field..field + probe).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.field.len() + self.probe.len()
    }

    pub fn field(&self) -> &[usize] {
        &self.field
    }

    pub fn probe(&self) -> &[usize] {
        &self.probe
    }
}

/// Field-sector and probe-sector overlaps of two product coherent states.
/// Global phases are attributed to the field factor so that the product
/// equals [`overlap`] exactly.
pub fn factor_overlap(a: &CoherentLabel, b: &CoherentLabel, partition: &Partition) -> Result<(Complex64, Complex64)> {
    check_modes(a.modes(), b.modes())?;
    check_modes(a.modes(), partition.modes())?;
    let mut field = overlap_exponent(&a.amplitudes, &b.amplitudes, Some(&partition.field));
    field.im += b.phase - a.phase;
    let probe = overlap_exponent(&a.amplitudes, &b.amplitudes, Some(&partition.probe));
    Ok((field.exp(), probe.exp()))
}

/// Affine phase-space map `r -> S r + disp` with `S` symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianUnitary {
    s: Matrix,
    disp: Vec<f64>,
}

/// `max |S Omega S^T - Omega|`.
pub fn symplectic_residual(s: &Matrix) -> f64 {
    let n = s.rows() / 2;
    let omega = Matrix::symplectic_form(n);
    match s.mul(&omega).and_then(|m| m.mul(&s.transpose())).and_then(|m| m.sub(&omega)) {
        Ok(e) => e.max_abs(),
        Err(_) => f64::INFINITY,
    }
}

impl GaussianUnitary {
    /// Validates `S`; a matrix within [`RESYMPLECTIFY_TOL`] of the symplectic
    /// group is corrected by one Newton step `S <- (I + E Omega / 2) S`.
    pub fn new(s: Matrix, disp: Vec<f64>) -> Result<Self> {
        if !s.is_square() || s.rows() % 2 != 0 {
            return Err(Error::Dimension {
                expected: 2 * (s.rows() / 2),
                got: s.cols(),
            });
        }
        if disp.len() != s.rows() {
            return Err(Error::Dimension {
                expected: s.rows(),
                got: disp.len(),
            });
        }
        if s.data().iter().chain(&disp).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gaussian unitary"));
        }
        let residual = symplectic_residual(&s);
        if residual <= SYMPLECTIC_TOL {
            return Ok(GaussianUnitary { s, disp });
        }
        if residual > RESYMPLECTIFY_TOL {
            return Err(Error::NotSymplectic { residual });
        }
        let n = s.rows() / 2;
        let omega = Matrix::symplectic_form(n);
        let e = s.mul(&omega)?.mul(&s.transpose())?.sub(&omega)?;
        let correction = Matrix::identity(2 * n).add(&e.mul(&omega)?.scale(0.5))?;
        let fixed = correction.mul(&s)?;
        let residual = symplectic_residual(&fixed);
        if residual > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(GaussianUnitary { s: fixed, disp })
    }

    pub fn identity(modes: usize) -> Self {
        GaussianUnitary {
            s: Matrix::identity(2 * modes),
            disp: vec![0.0; 2 * modes],
        }
    }

    /// Pure displacement by complex amplitudes `delta`.
    pub fn displacement(delta: &[Complex64]) -> Self {
        let n = delta.len();
        let mut disp = vec![0.0; 2 * n];
        for (i, d) in delta.iter().enumerate() {
            disp[i] = SQRT_2 * d.re;
            disp[n + i] = SQRT_2 * d.im;
        }
        GaussianUnitary {
            s: Matrix::identity(2 * n),
            disp,
        }
    }

    /// Passive unitary `alpha -> U alpha + delta` from a row-major `n x n`
    /// complex matrix `U`.
    pub fn from_passive(n: usize, u: &[Complex64], delta: &[Complex64]) -> Result<Self> {
        if u.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: u.len(),
            });
        }
        if delta.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: delta.len(),
            });
        }
        let mut s = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = u[i * n + j];
                s[(i, j)] = z.re;
                s[(i, n + j)] = -z.im;
                s[(n + i, j)] = z.im;
                s[(n + i, n + j)] = z.re;
            }
        }
        let d = GaussianUnitary::displacement(delta);
        GaussianUnitary::new(s, d.disp)
    }

    /// Beam splitter on modes `i`, `j`:
    /// `a_i -> cos(t) a_i - e^{-i phi} sin(t) a_j`,
    /// `a_j -> e^{i phi} sin(t) a_i + cos(t) a_j`.
    pub fn beam_splitter(modes: usize, i: usize, j: usize, theta: f64, phi: f64) -> Result<Self> {
        if i >= modes || j >= modes || i == j {
            return Err(Error::InvalidPartition(format!("beam splitter modes {i}, {j} in registry of {modes}")));
        }
        let mut u = identity_complex(modes);
        let (c, s) = (libm::cos(theta), libm::sin(theta));
        u[i * modes + i] = Complex64::new(c, 0.0);
        u[i * modes + j] = -Complex64::from_polar(s, -phi);
        u[j * modes + i] = Complex64::from_polar(s, phi);
        u[j * modes + j] = Complex64::new(c, 0.0);
        GaussianUnitary::from_passive(modes, &u, &vec![Complex64::new(0.0, 0.0); modes])
    }

    /// Exchange of modes `i` and `j`.
    pub fn swap(modes: usize, i: usize, j: usize) -> Result<Self> {
        if i >= modes || j >= modes {
            return Err(Error::InvalidPartition(format!("swap modes {i}, {j} in registry of {modes}")));
        }
        let mut u = vec![Complex64::new(0.0, 0.0); modes * modes];
        for k in 0..modes {
            let target = if k == i {
                j
            } else if k == j {
                i
            } else {
                k
            };
            u[target * modes + k] = Complex64::new(1.0, 0.0);
        }
        GaussianUnitary::from_passive(modes, &u, &vec![Complex64::new(0.0, 0.0); modes])
    }

    /// Single-mode squeezer `x -> e^{-r} x`, `p -> e^{r} p` on mode `i`.
    pub fn squeezer(modes: usize, i: usize, r: f64) -> Result<Self> {
        if i >= modes {
            return Err(Error::InvalidPartition(format!("squeezer mode {i} in registry of {modes}")));
        }
        let mut s = Matrix::identity(2 * modes);
        s[(i, i)] = libm::exp(-r);
        s[(modes + i, modes + i)] = libm::exp(r);
        GaussianUnitary::new(s, vec![0.0; 2 * modes])
    }

    pub fn modes(&self) -> usize {
        self.s.rows() / 2
    }

    pub fn matrix(&self) -> &Matrix {
        &self.s
    }

    pub fn displacement_vector(&self) -> &[f64] {
        &self.disp
    }

    pub fn symplectic_residual(&self) -> f64 {
        symplectic_residual(&self.s)
    }

    /// Bogoliubov form `alpha -> A alpha + B conj(alpha)` (row-major).
    pub fn complex_form(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.modes();
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        let mut b = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let xx = self.s[(i, j)];
                let xp = self.s[(i, n + j)];
                let px = self.s[(n + i, j)];
                let pp = self.s[(n + i, n + j)];
                a[i * n + j] = Complex64::new(0.5 * (xx + pp), 0.5 * (px - xp));
                b[i * n + j] = Complex64::new(0.5 * (xx - pp), 0.5 * (px + xp));
            }
        }
        (a, b)
    }

    /// Largest entry of the squeezing block `B`; zero for passive maps.
    pub fn passivity_residual(&self) -> f64 {
        let (_, b) = self.complex_form();
        b.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_passive(&self) -> bool {
        self.passivity_residual() <= PASSIVE_TOL
    }

    /// Displacement in complex-amplitude units.
    pub fn complex_displacement(&self) -> Vec<Complex64> {
        let n = self.modes();
        (0..n)
            .map(|i| Complex64::new(self.disp[i], self.disp[n + i]) / SQRT_2)
            .collect()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &GaussianUnitary) -> Result<GaussianUnitary> {
        check_modes(self.modes(), first.modes())?;
        let s = self.s.mul(&first.s)?;
        let mut disp = self.s.mul_vec(&first.disp)?;
        for (d, e) in disp.iter_mut().zip(&self.disp) {
            *d += e;
        }
        GaussianUnitary::new(s, disp)
    }

    /// Inverse map, using `S^{-1} = -Omega S^T Omega`.
    pub fn inverse(&self) -> Result<GaussianUnitary> {
        let n = self.modes();
        let omega = Matrix::symplectic_form(n);
        let inv = omega.mul(&self.s.transpose())?.mul(&omega)?.scale(-1.0);
        let disp = inv.mul_vec(&self.disp)?.into_iter().map(|d| -d).collect();
        GaussianUnitary::new(inv, disp)
    }

    /// Embeds this unitary into a registry of `total` modes, acting on
    /// `targets` (in order) and as the identity elsewhere.
    pub fn embed(&self, total: usize, targets: &[usize]) -> Result<GaussianUnitary> {
        let n = self.modes();
        if targets.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: targets.len(),
            });
        }
        let mut seen = vec![false; total];
        for &t in targets {
            match seen.get_mut(t) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::InvalidPartition(format!("bad embedding target {t}"))),
            }
        }
        let mut s = Matrix::identity(2 * total);
        let mut disp = vec![0.0; 2 * total];
        for (a, &ta) in targets.iter().enumerate() {
            for (b, &tb) in targets.iter().enumerate() {
                s[(ta, tb)] = self.s[(a, b)];
                s[(ta, total + tb)] = self.s[(a, n + b)];
                s[(total + ta, tb)] = self.s[(n + a, b)];
                s[(total + ta, total + tb)] = self.s[(n + a, n + b)];
            }
            disp[ta] = self.disp[a];
            disp[total + ta] = self.disp[n + a];
        }
        GaussianUnitary::new(s, disp)
    }

    /// Modes the map touches: non-identity rows/columns or nonzero displacement.
    pub fn support(&self) -> Vec<usize> {
        let n = self.modes();
        (0..n)
            .filter(|&m| {
                let rows = [m, n + m];
                self.disp[m] != 0.0
                    || self.disp[n + m] != 0.0
                    || rows.iter().any(|&r| {
                        (0..2 * n).any(|c| {
                            let id = if r == c { 1.0 } else { 0.0 };
                            self.s[(r, c)] != id || self.s[(c, r)] != id
                        })
                    })
            })
            .collect()
    }
}

fn identity_complex(n: usize) -> Vec<Complex64> {
    let mut u = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        u[i * n + i] = Complex64::new(1.0, 0.0);
    }
    u
}

/// Maps a coherent label through a passive Gaussian unitary. Active
/// (squeezing) maps are rejected since their output is not coherent.
pub fn apply_unitary(u: &GaussianUnitary, x: &CoherentLabel) -> Result<CoherentLabel> {
    check_modes(u.modes(), x.modes())?;
    let (a, b) = u.complex_form();
    let residual = b.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    if residual > PASSIVE_TOL {
        return Err(Error::NotPassive { residual });
    }
    let n = x.modes();
    let delta = u.complex_displacement();
    let mut phase = x.phase;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let rotated: Complex64 = (0..n).map(|j| a[i * n + j] * x.amplitudes[j]).sum();
        phase += (delta[i] * rotated.conj()).im;
        out.push(rotated + delta[i]);
    }
    CoherentLabel::with_phase(out, phase)
}

/// `|<psi_1|psi_2>|` for pure Gaussian states sharing covariance `cov` whose
/// quadrature means differ by `mean_difference`: `exp(-d^T cov^{-1} d / 8)`.
pub fn gaussian_overlap_magnitude(cov: &Matrix, mean_difference: &[f64]) -> Result<f64> {
    let y = cov.cholesky_solve(mean_difference)?;
    let q: f64 = y.iter().zip(mean_difference).map(|(a, b)| a * b).sum();
    Ok(libm::exp(-q / 8.0))
}

/// Random sampling of unitaries and labels.
pub mod random {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
    }

    /// Haar-random `n x n` unitary (row-major), via Gram-Schmidt of a complex
    /// Ginibre matrix with positive `R` diagonal.
    pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
        let mut cols: Vec<Vec<Complex64>> = (0..n).map(|_| (0..n).map(|_| complex_normal(rng)).collect()).collect();
        for j in 0..n {
            // Two Gram-Schmidt passes keep orthogonality at round-off level.
            for _ in 0..2 {
                for k in 0..j {
                    let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
                    let (done, rest) = cols.split_at_mut(j);
                    for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                        *v -= proj * q;
                    }
                }
            }
            let norm = libm::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>());
            for v in cols[j].iter_mut() {
                *v /= norm;
            }
        }
        let mut u = vec![Complex64::new(0.0, 0.0); n * n];
        for (j, col) in cols.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                u[i * n + j] = *z;
            }
        }
        u
    }

    pub fn random_label<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CoherentLabel {
        CoherentLabel {
            amplitudes: (0..n).map(|_| complex_normal(rng) * scale).collect(),
            phase: 0.0,
        }
    }

    /// Haar passive unitary followed by a random displacement.
    pub fn random_passive<R: Rng + ?Sized>(n: usize, displacement_scale: f64, rng: &mut R) -> GaussianUnitary {
        let u = haar_unitary(n, rng);
        let delta: Vec<Complex64> = (0..n).map(|_| complex_normal(rng) * displacement_scale).collect();
        GaussianUnitary::from_passive(n, &u, &delta).expect("Haar unitary is symplectic")
    }

    /// `O_1 Z O_2` with Haar passive `O_i` and squeezers `Z` whose parameters
    /// are uniform in `[0, squeeze_bound]`.
    pub fn random_symplectic<R: Rng + ?Sized>(n: usize, squeeze_bound: f64, rng: &mut R) -> GaussianUnitary {
        let o1 = random_passive(n, 0.0, rng);
        let o2 = random_passive(n, 0.0, rng);
        let mut z = Matrix::identity(2 * n);
        if squeeze_bound > 0.0 {
            let dist = Uniform::new_inclusive(0.0, squeeze_bound).expect("finite bound");
            for i in 0..n {
                let r: f64 = dist.sample(rng);
                z[(i, i)] = libm::exp(-r);
                z[(n + i, n + i)] = libm::exp(r);
            }
        }
        let s = o1.s.mul(&z).and_then(|m| m.mul(&o2.s)).expect("square matrices");
        GaussianUnitary::new(s, vec![0.0; 2 * n]).expect("product of symplectic matrices")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn overlap_identical_and_known() {
        let a = CoherentLabel::new(vec![c(0.3, -1.0), c(2.0, 0.5)]).unwrap();
        assert!((overlap(&a, &a).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let vac = CoherentLabel::vacuum(1);
        let b = CoherentLabel::new(vec![c(SQRT_2, 0.0)]).unwrap();
        let o = overlap(&vac, &b).unwrap();
        assert!((o.norm() - libm::exp(-1.0)).abs() < 1e-15);
        assert!(overlap(&vac, &a).is_err());
    }

    #[test]
    fn beam_splitter_example() {
        let bs = GaussianUnitary::beam_splitter(2, 0, 1, core::f64::consts::FRAC_PI_4, 0.0).unwrap();
        let alpha = c(0.7, -0.2);
        let x = CoherentLabel::new(vec![alpha, c(0.0, 0.0)]).unwrap();
        let y = apply_unitary(&bs, &x).unwrap();
        for z in y.amplitudes() {
            assert!((z - alpha / SQRT_2).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_and_displacement() {
        let x = CoherentLabel::new(vec![c(1.0, 2.0), c(-0.5, 0.0)]).unwrap();
        assert_eq!(apply_unitary(&GaussianUnitary::identity(2), &x).unwrap(), x);
        let delta = [c(0.25, -1.5)];
        let d = apply_unitary(&GaussianUnitary::displacement(&delta), &CoherentLabel::vacuum(1)).unwrap();
        assert!((d.amplitudes()[0] - delta[0]).norm() < 1e-15);
    }

    #[test]
    fn squeezer_rejected_on_labels() {
        let sq = GaussianUnitary::squeezer(1, 0, 0.3).unwrap();
        assert!(!sq.is_passive());
        assert!(matches!(
            apply_unitary(&sq, &CoherentLabel::vacuum(1)),
            Err(Error::NotPassive { .. })
        ));
    }

    #[test]
    fn non_symplectic_rejected_and_near_symplectic_repaired() {
        let mut s = Matrix::identity(2);
        s[(0, 0)] = 2.0;
        assert!(matches!(
            GaussianUnitary::new(s, vec![0.0; 2]),
            Err(Error::NotSymplectic { .. })
        ));
        let mut s = Matrix::identity(4);
        s[(0, 1)] = 3e-9;
        s[(2, 2)] = 1.0 + 2e-9;
        let g = GaussianUnitary::new(s, vec![0.0; 4]).unwrap();
        assert!(g.symplectic_residual() <= SYMPLECTIC_TOL);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![0, 1], vec![2]).is_ok());
        assert!(Partition::new(3, vec![0, 1], vec![1]).is_err());
        assert!(Partition::new(3, vec![0], vec![2]).is_err());
        assert!(Partition::new(3, vec![0, 5], vec![1, 2]).is_err());
    }

    #[test]
    fn factor_overlap_examples() {
        let a = CoherentLabel::new(vec![c(1.0, 0.0), c(0.2, 0.1), c(-0.3, 0.4)]).unwrap();
        let p = Partition::split(2, 1);
        let (f, b) = factor_overlap(&a, &a, &p).unwrap();
        assert!((f - c(1.0, 0.0)).norm() < 1e-15 && (b - c(1.0, 0.0)).norm() < 1e-15);
        let mut amps = a.amplitudes().to_vec();
        amps[2] += c(0.5, -0.5);
        let probe_moved = CoherentLabel::new(amps).unwrap();
        let (f, b) = factor_overlap(&a, &probe_moved, &p).unwrap();
        assert!((f - c(1.0, 0.0)).norm() < 1e-15);
        assert!((b.norm() - libm::exp(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn swap_moves_amplitudes() {
        let sw = GaussianUnitary::swap(3, 0, 2).unwrap();
        let x = CoherentLabel::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 1.0)]).unwrap();
        let y = apply_unitary(&sw, &x).unwrap();
        assert_eq!(y.amplitudes(), &[c(3.0, 1.0), c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn support_and_embedding() {
        let bs = GaussianUnitary::beam_splitter(2, 0, 1, 0.3, 0.1).unwrap();
        let e = bs.embed(5, &[1, 3]).unwrap();
        assert_eq!(e.support(), vec![1, 3]);
        assert!(GaussianUnitary::identity(4).support().is_empty());
        assert!(bs.embed(5, &[1, 1]).is_err());
    }
}
