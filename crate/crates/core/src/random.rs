//! Random operators, POVMs and ensembles for property tests and oracles.

use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::discrimination::WeightedEnsemble;
use crate::operator::{BlochOperator, HermitianOperator, C64};
use crate::povm::Povm;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Complex Gaussian `rows × cols` matrix.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

/// `G G†` with `G` a `dim × rank` complex Gaussian matrix.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> HermitianOperator {
    let g = ginibre(rng, dim, rank);
    HermitianOperator::from_raw(&g * g.adjoint())
}

/// Hermitian matrix with Gaussian entries of unit scale.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    HermitianOperator::from_raw(ginibre(rng, dim, dim))
}

/// Uniformly distributed unit vector in ℝ³.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(gaussian(rng), gaussian(rng), gaussian(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Qubit Hermitian operator with `c` and the components of `r` in `[-1, 1]`.
pub fn bloch_operator<R: Rng + ?Sized>(rng: &mut R) -> BlochOperator {
    BlochOperator::new(
        rng.random_range(-1.0..1.0),
        [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ],
    )
}

/// `E_j = S^{-1/2} G_j S^{-1/2}` with `S = Σ G_j` and random PSD `G_j`.
/// Needs `outcomes * rank >= dim` so that `S` has full rank.
pub fn povm<R: Rng + ?Sized>(rng: &mut R, outcomes: usize, dim: usize, rank: usize) -> Povm {
    let gs: Vec<HermitianOperator> = (0..outcomes).map(|_| psd(rng, dim, rank)).collect();
    let total = gs
        .iter()
        .fold(HermitianOperator::zeros(dim), |acc, g| &acc + g);
    let w = total
        .pseudo_inverse_sqrt()
        .expect("sum of PSD matrices is PSD");
    let elements = gs.iter().map(|g| w.sandwich(g)).collect();
    Povm::new(elements).expect("normalized random POVM is valid")
}

/// Density matrix `ρ = G G† / Tr[G G†]`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> HermitianOperator {
    let g = psd(rng, dim, rank);
    let t = g.trace();
    g.scale(1.0 / t)
}

/// Random probability vector drawn uniformly from the simplex.
pub fn weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -rng.random_range(f64::EPSILON..1.0).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Ensemble of `n` mixed states of the given dimension with random weights.
pub fn ensemble<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> WeightedEnsemble {
    let ps = weights(rng, n);
    let states = ps
        .into_iter()
        .map(|p| {
            let rank = rng.random_range(1..=dim);
            (p, density(rng, dim, rank))
        })
        .collect();
    WeightedEnsemble::new(states).expect("random ensemble is valid")
}

/// Equiprobable pure qubit states with uniformly random Bloch vectors.
pub fn pure_qubit_ensemble<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightedEnsemble {
    let vs: Vec<[f64; 3]> = (0..n).map(|_| unit_vector(rng).into()).collect();
    WeightedEnsemble::equiprobable_bloch(&vs).expect("unit Bloch vectors are valid states")
}
