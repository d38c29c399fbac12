//! Seeded random generators for states, Hamiltonians and channels, shared by
//! the test suites and the `verify` command.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hs::{tensor, BipartiteOperator, CMatrix, HsOperator, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre(dim: usize, rng: &mut impl Rng) -> CMatrix {
    DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// A general (non-Hermitian) operator with standard-normal entries.
pub fn random_operator(dim: usize, rng: &mut impl Rng) -> HsOperator {
    HsOperator::new(ginibre(dim, rng)).unwrap()
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HsOperator {
    let g = ginibre(dim, rng);
    HsOperator::new((&g + g.adjoint()).scale(0.5)).unwrap()
}

/// Full-rank density operator from the Hilbert-Schmidt ensemble.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> HsOperator {
    let g = ginibre(dim, rng);
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    HsOperator::new(p.map(|z| z / tr)).unwrap()
}

pub fn random_bipartite_density(dim_s: usize, dim_e: usize, rng: &mut impl Rng) -> BipartiteOperator {
    let g = ginibre(dim_s * dim_e, rng);
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    BipartiteOperator::new(dim_s, dim_e, p.map(|z| z / tr)).unwrap()
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        let d = r[(c, c)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for row in 0..dim {
                q[(row, c)] *= phase;
            }
        }
    }
    q
}

/// Kraus operators of a random CPTP channel on a `dim`-level system, obtained
/// by restricting a Haar unitary on system + ancilla of equal dimension.
pub fn random_kraus_channel(dim: usize, rng: &mut impl Rng) -> Vec<HsOperator> {
    let u = random_unitary(dim * dim, rng);
    // K_i = (1 (x) <i|) U (1 (x) |0>), ancilla index is the fast (minor) one
    (0..dim)
        .map(|i| {
            let mut k = CMatrix::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    k[(r, c)] = u[(r * dim + i, c * dim)];
                }
            }
            HsOperator::new(k).unwrap()
        })
        .collect()
}

/// Applies a channel given by Kraus operators to the system side of a
/// bipartite operator.
pub fn apply_kraus_to_system(kraus: &[HsOperator], rho: &BipartiteOperator) -> BipartiteOperator {
    let ide = HsOperator::identity(rho.dim_e());
    let mut acc = BipartiteOperator::zeros(rho.dim_s(), rho.dim_e());
    for k in kraus {
        let lifted = tensor(k, &ide);
        let term = lifted.matrix() * rho.matrix() * lifted.matrix().adjoint();
        acc = &acc + &BipartiteOperator::new(rho.dim_s(), rho.dim_e(), term).unwrap();
    }
    acc
}
