//! Seeded samplers used by the property suites and search harnesses.

use nalgebra::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::twin::{StateVector, TwoStateVector};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the generator seeded by `seed`.
pub fn derived_rng(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = QR::new(gaussian_matrix(rng, dim, dim));
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 {
            d / n
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniformly distributed unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = StateVector::unit(amps) {
            return s;
        }
    }
}

/// Two-state vector with i.i.d. complex Gaussian coefficients.
pub fn random_tsv<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> TwoStateVector {
    loop {
        if let Ok(v) = TwoStateVector::from_matrix(gaussian_matrix(rng, dim, dim)) {
            return v;
        }
    }
}

/// Random separable two-state vector `|ψ⟩⊗⟨φ|` with unit factors.
pub fn random_separable<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> TwoStateVector {
    let ket = random_state(rng, dim);
    let bra = random_state(rng, dim);
    TwoStateVector::separable(&ket, &bra).expect("unit factors give a nonzero product")
}
