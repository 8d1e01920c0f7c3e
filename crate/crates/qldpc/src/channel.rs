//! Depolarizing-channel model: parameter conversions, Kraus weights,
//! i.i.d. Pauli error sampling, and a single-qubit density-matrix applier
//! used to cross-check the channel definition.
//!
//! The channel is parameterized either by the depolarization parameter
//! `f` in [0, 1] or by the flip probability `f' = 3f/4`, under which the
//! channel applies each of X, Y, Z with probability `f'/3` and leaves the
//! qubit alone with probability `1 - f'`.

use crate::bits::BitVec;
use crate::stabilizer::PauliErrorPattern;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
}

/// Depolarization strength and its flip-probability form, kept consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    f: f64,
    f_prime: f64,
}

impl ChannelParams {
    pub fn new(f: f64) -> Result<Self, ChannelError> {
        Ok(ChannelParams {
            f,
            f_prime: flip_probability(f)?,
        })
    }

    /// Builds parameters from the flip probability `f' = 3f/4`.
    pub fn from_flip_probability(f_prime: f64) -> Result<Self, ChannelError> {
        if !(0.0..=0.75).contains(&f_prime) {
            return Err(ChannelError::OutOfRange {
                name: "f_prime",
                value: f_prime,
                range: "[0, 0.75]",
            });
        }
        Ok(ChannelParams {
            f: f_prime * 4.0 / 3.0,
            f_prime,
        })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn f_prime(&self) -> f64 {
        self.f_prime
    }
}

/// Kraus weights `(1 - 3f/4, f/4, f/4, f/4)` for (I, X, Y, Z); they sum to 1.
pub fn kraus_weights(f: f64) -> Result<[f64; 4], ChannelError> {
    check_unit_interval("f", f)?;
    let q = f / 4.0;
    Ok([1.0 - 3.0 * q, q, q, q])
}

/// Flip probability `f' = 3f/4`.
pub fn flip_probability(f: f64) -> Result<f64, ChannelError> {
    check_unit_interval("f", f)?;
    Ok(0.75 * f)
}

fn check_unit_interval(name: &'static str, v: f64) -> Result<(), ChannelError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(ChannelError::OutOfRange {
            name,
            value: v,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Samples an i.i.d. error pattern: per qubit, identity with probability
/// `1 - f'`, and each of X, Y, Z with probability `f'/3`.
pub fn sample_error<R: Rng + ?Sized>(
    n_qubits: usize,
    f_prime: f64,
    rng: &mut R,
) -> Result<PauliErrorPattern, ChannelError> {
    if !(0.0..=0.75).contains(&f_prime) {
        return Err(ChannelError::OutOfRange {
            name: "f_prime",
            value: f_prime,
            range: "[0, 0.75]",
        });
    }
    if n_qubits == 0 {
        return Err(ChannelError::OutOfRange {
            name: "n_qubits",
            value: 0.0,
            range: "[1, ..)",
        });
    }
    let third = f_prime / 3.0;
    let mut x = BitVec::zeros(n_qubits);
    let mut z = BitVec::zeros(n_qubits);
    for i in 0..n_qubits {
        let u: f64 = rng.gen();
        if u < f_prime {
            // which third of [0, f') we landed in picks X, Y or Z
            let k = (u / third) as usize;
            match k.min(2) {
                0 => x.set(i, true),
                1 => {
                    x.set(i, true);
                    z.set(i, true);
                }
                _ => z.set(i, true),
            }
        }
    }
    Ok(PauliErrorPattern::new(x, z).expect("equal lengths"))
}

/// 2x2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Mat2::zero();
        m.0[0][0] = Complex64::new(1.0, 0.0);
        m.0[1][1] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn pauli_x() -> Self {
        Mat2([
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
    }

    pub fn pauli_y() -> Self {
        Mat2([
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        ])
    }

    pub fn pauli_z() -> Self {
        Mat2([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        m
    }
}

/// Single-qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

const RHO_TOL: f64 = 1e-9;

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self, ChannelError> {
        let herm = m.max_abs_diff(&m.adjoint());
        if herm > RHO_TOL {
            return Err(ChannelError::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:.2e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > RHO_TOL || tr.im.abs() > RHO_TOL {
            return Err(ChannelError::InvalidDensityMatrix(format!(
                "trace {tr} != 1"
            )));
        }
        // for a 2x2 Hermitian matrix with unit trace, PSD <=> det >= 0
        let det = (m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0]).re;
        if det < -RHO_TOL {
            return Err(ChannelError::InvalidDensityMatrix(format!(
                "negative eigenvalue (det {det:.2e})"
            )));
        }
        Ok(DensityMatrix(m))
    }

    /// `(I + r·sigma) / 2` for a Bloch vector with `|r| <= 1`.
    pub fn from_bloch(rx: f64, ry: f64, rz: f64) -> Result<Self, ChannelError> {
        let norm = (rx * rx + ry * ry + rz * rz).sqrt();
        if norm > 1.0 + RHO_TOL {
            return Err(ChannelError::InvalidDensityMatrix(format!(
                "Bloch vector norm {norm} > 1"
            )));
        }
        let m = Mat2::identity()
            .add(&Mat2::pauli_x().scale(rx))
            .add(&Mat2::pauli_y().scale(ry))
            .add(&Mat2::pauli_z().scale(rz))
            .scale(0.5);
        DensityMatrix::new(m)
    }

    pub fn pure_zero() -> Self {
        DensityMatrix::from_bloch(0.0, 0.0, 1.0).expect("valid")
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat2::identity().scale(0.5))
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0
    }
}

/// The four Kraus operators `sqrt(1 - 3f/4)·I, sqrt(f/4)·X, sqrt(f/4)·Y,
/// sqrt(f/4)·Z`.
pub fn kraus_operators(f: f64) -> Result<[Mat2; 4], ChannelError> {
    let w = kraus_weights(f)?;
    Ok([
        Mat2::identity().scale(w[0].sqrt()),
        Mat2::pauli_x().scale(w[1].sqrt()),
        Mat2::pauli_y().scale(w[2].sqrt()),
        Mat2::pauli_z().scale(w[3].sqrt()),
    ])
}

/// Applies the single-qubit depolarizing channel in operator-sum form,
/// `sum_a K_a rho K_a^dag`. Equals `(1 - f)·rho + f·I/2`; tests compare the
/// two routes.
pub fn apply_channel_1q(rho: &DensityMatrix, f: f64) -> Result<DensityMatrix, ChannelError> {
    let kraus = kraus_operators(f)?;
    let mut out = Mat2::zero();
    for k in &kraus {
        out = out.add(&k.mul(rho.mat()).mul(&k.adjoint()));
    }
    DensityMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn kraus_weights_examples() {
        assert_eq!(kraus_weights(0.0).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(kraus_weights(1.0).unwrap(), [0.25, 0.25, 0.25, 0.25]);
        let w = kraus_weights(0.4).unwrap();
        assert!((w[0] - 0.7).abs() < 1e-15);
        for p in &w[1..] {
            assert!((p - 0.1).abs() < 1e-15);
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(kraus_weights(-0.1).is_err());
        assert!(kraus_weights(1.1).is_err());
    }

    #[test]
    fn flip_probability_examples() {
        assert_eq!(flip_probability(0.0).unwrap(), 0.0);
        assert_eq!(flip_probability(1.0).unwrap(), 0.75);
        assert!((flip_probability(0.2).unwrap() - 0.15).abs() < 1e-15);
        assert!(flip_probability(2.0).is_err());
    }

    #[test]
    fn channel_params_consistent() {
        let p = ChannelParams::new(0.4).unwrap();
        assert!((p.f_prime() - 0.3).abs() < 1e-15);
        let q = ChannelParams::from_flip_probability(0.3).unwrap();
        assert!((q.f() - 0.4).abs() < 1e-15);
        assert!(ChannelParams::from_flip_probability(0.8).is_err());
    }

    #[test]
    fn sample_error_zero_rate_is_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..100 {
            let e = sample_error(16, 0.0, &mut rng).unwrap();
            assert!(e.is_identity());
        }
    }

    #[test]
    fn sample_error_rejects_bad_params() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert!(sample_error(4, 0.8, &mut rng).is_err());
        assert!(sample_error(0, 0.1, &mut rng).is_err());
    }

    /// Chi-square goodness of fit of per-qubit Pauli frequencies against
    /// (1 - f', f'/3, f'/3, f'/3); critical value 16.266 for df = 3 at
    /// significance 0.001.
    fn chi_square_ok(f_prime: f64, draws: usize, seed: u64) -> bool {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let n = 64;
        let mut counts = [0u64; 4]; // I, X, Y, Z
        let rounds = draws / n;
        for _ in 0..rounds {
            let e = sample_error(n, f_prime, &mut rng).unwrap();
            for i in 0..n {
                let (x, z) = (e.x().get(i), e.z().get(i));
                let idx = match (x, z) {
                    (false, false) => 0,
                    (true, false) => 1,
                    (true, true) => 2,
                    (false, true) => 3,
                };
                counts[idx] += 1;
            }
        }
        let total = counts.iter().sum::<u64>() as f64;
        let expected = [
            (1.0 - f_prime) * total,
            f_prime / 3.0 * total,
            f_prime / 3.0 * total,
            f_prime / 3.0 * total,
        ];
        let stat: f64 = counts
            .iter()
            .zip(&expected)
            .map(|(&o, &e)| {
                let d = o as f64 - e;
                d * d / e
            })
            .sum();
        stat < 16.266
    }

    #[test]
    fn sample_error_frequencies_match_model() {
        assert!(chi_square_ok(0.75, 1_200_000, 7));
        assert!(chi_square_ok(0.15, 1_200_000, 11));
    }

    #[test]
    fn sample_error_nonidentity_rate() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let n = 100;
        let trials = 12_000;
        let mut nonid = 0u64;
        for _ in 0..trials {
            let e = sample_error(n, 0.15, &mut rng).unwrap();
            nonid += e.weight() as u64;
        }
        let total = (n * trials) as f64;
        let p = nonid as f64 / total;
        let sigma = (0.15f64 * 0.85 / total).sqrt();
        assert!((p - 0.15).abs() < 3.0 * sigma, "p = {p}");
    }

    #[test]
    fn apply_channel_trivial_cases() {
        let rho = DensityMatrix::from_bloch(0.3, -0.2, 0.5).unwrap();
        let out = apply_channel_1q(&rho, 0.0).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()) < 1e-15);

        let fully = apply_channel_1q(&rho, 1.0).unwrap();
        assert!(fully.mat().max_abs_diff(DensityMatrix::maximally_mixed().mat()) < 1e-12);
    }

    #[test]
    fn apply_channel_on_pure_zero() {
        let out = apply_channel_1q(&DensityMatrix::pure_zero(), 0.5).unwrap();
        let m = out.mat();
        assert!((m.0[0][0].re - 0.75).abs() < 1e-12);
        assert!((m.0[1][1].re - 0.25).abs() < 1e-12);
        assert!(m.0[0][1].norm() < 1e-12);
    }

    #[test]
    fn operator_sum_equals_closed_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (rx, ry, rz) = random_bloch(&mut rng);
            let rho = DensityMatrix::from_bloch(rx, ry, rz).unwrap();
            let f: f64 = rng.gen();
            let kraus_route = apply_channel_1q(&rho, f).unwrap();
            let closed = rho
                .mat()
                .scale(1.0 - f)
                .add(&Mat2::identity().scale(f / 2.0));
            assert!(kraus_route.mat().max_abs_diff(&closed) < 1e-12);
            let tr = kraus_route.mat().trace();
            assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
        }
    }

    #[test]
    fn kraus_completeness_grid() {
        for k in 0..=100 {
            let f = k as f64 / 100.0;
            let kraus = kraus_operators(f).unwrap();
            let mut sum = Mat2::zero();
            for op in &kraus {
                sum = sum.add(&op.adjoint().mul(op));
            }
            assert!(sum.max_abs_diff(&Mat2::identity()) <= 1e-12, "f = {f}");
        }
    }

    #[test]
    fn invalid_density_matrices_rejected() {
        // non-unit trace
        assert!(DensityMatrix::new(Mat2::identity()).is_err());
        // non-Hermitian
        let mut m = Mat2::identity().scale(0.5);
        m.0[0][1] = Complex64::new(0.3, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        // negative eigenvalue via an over-long Bloch vector
        assert!(DensityMatrix::from_bloch(1.2, 0.0, 0.0).is_err());
    }

    pub(super) fn random_bloch<R: Rng>(rng: &mut R) -> (f64, f64, f64) {
        loop {
            let rx = rng.gen_range(-1.0..1.0);
            let ry = rng.gen_range(-1.0..1.0);
            let rz = rng.gen_range(-1.0..1.0);
            if rx * rx + ry * ry + rz * rz <= 1.0 {
                return (rx, ry, rz);
            }
        }
    }
}
