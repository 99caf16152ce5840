//! Seeded random unitaries and density operators for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::lr_indices;
use crate::elements::SingleParticleUnitary;
use crate::fock::{enumerate_basis, DensityOperator, Statistics};
use crate::linalg::{c, real, CMatrix};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// n×n matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Haar-random unitary: QR of a Ginibre matrix with R's diagonal phases
/// folded back into Q.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let qr = ginibre(rng, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            real(1.0)
        };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn random_single_particle_unitary<R: Rng>(rng: &mut R) -> SingleParticleUnitary {
    SingleParticleUnitary::new(random_unitary(rng, 4)).expect("QR factor is unitary")
}

/// Random full-rank density operator supported on the one-particle-per-mode block.
pub fn random_lr_density<R: Rng>(rng: &mut R, statistics: Statistics) -> DensityOperator {
    let g = ginibre(rng, 4);
    let block = &g * g.adjoint();
    let tr: f64 = block.diagonal().iter().map(|z| z.re).sum();
    let block = block * real(1.0 / tr);
    let idx = lr_indices(statistics);
    let dim = enumerate_basis(statistics).dim();
    let mut m = CMatrix::zeros(dim, dim);
    for r in 0..4 {
        for col in 0..4 {
            m[(idx[r], idx[col])] = block[(r, col)];
        }
    }
    let m = (&m + m.adjoint()) * real(0.5);
    DensityOperator::new(statistics, m).expect("Gram matrix is a valid state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ParityClass, TOL};
    use crate::linalg::{max_abs, unitarity_defect};

    #[test]
    fn unitaries_are_unitary_and_reproducible() {
        let a = random_unitary(&mut seeded_rng(7), 4);
        let b = random_unitary(&mut seeded_rng(7), 4);
        assert!(unitarity_defect(&a) < TOL);
        assert_eq!(max_abs(&(a - b)), 0.0);
    }

    #[test]
    fn lr_densities_are_lr_supported() {
        let mut rng = seeded_rng(3);
        for s in Statistics::ALL {
            let rho = random_lr_density(&mut rng, s);
            assert!(rho.leakage_outside(ParityClass::LR) < TOL);
        }
    }
}
