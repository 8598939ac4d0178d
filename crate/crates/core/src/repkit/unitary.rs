use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::repkit::matrix::CMatrix;

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::matrix::max_abs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_and_seeded() {
        for d in [1, 2, 9, 30] {
            let u = random_unitary(d, &mut ChaCha8Rng::seed_from_u64(11));
            assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(d, d))) < 1e-12);
            assert_eq!(u, random_unitary(d, &mut ChaCha8Rng::seed_from_u64(11)));
        }
    }
}
