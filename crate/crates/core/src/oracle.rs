//! Reference values computed without the `F_Q` machinery: an exhaustive
//! grid over qubit first steps, the geometric polytope rule for pure
//! equiprobable qubits, and random POVM sampling.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrimination::{success_probability, WeightedEnsemble};
use crate::error::{Error, Result};
use crate::operator::BlochOperator;
use crate::qubit::QubitQ;
use crate::random;

/// Grid over the first step `Q = λ_a P_n + λ_b (1 − P_n)`, with `P_n` the
/// projector on Bloch direction `n = (sin θ cos φ, sin θ sin φ, cos θ)`.
///
/// Closed ranges use `resolution + 1` points, the periodic `φ` range uses
/// `resolution`. Doubling the resolution refines every range by halving,
/// so the coarse grid is a subset of the fine one.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub resolution: usize,
    pub eigenvalue: (f64, f64),
    pub theta: (f64, f64),
    pub phi: (f64, f64),
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::SizeMismatch(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        Ok(Self {
            resolution,
            eigenvalue: (0.0, 1.0),
            theta: (0.0, PI / 2.0),
            phi: (0.0, 2.0 * PI),
        })
    }

    fn closed(&self, (lo, hi): (f64, f64)) -> Vec<f64> {
        let k = self.resolution;
        (0..=k)
            .map(|i| lo + (hi - lo) * i as f64 / k as f64)
            .collect()
    }

    fn periodic(&self, (lo, hi): (f64, f64)) -> Vec<f64> {
        let k = self.resolution;
        (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / k as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridOptimum {
    pub probability: f64,
    pub q: QubitQ,
}

/// Weighted pair `(ρ̃_a, ρ̃_b)` told apart by Helstrom after outcome `B`.
struct Branch {
    sum: BlochOperator,
    diff: BlochOperator,
}

/// Projections of a branch's operators onto a direction `n`.
struct Projected {
    sum_n: f64,
    sum_perp: f64,
    diff_n: f64,
    diff_perp: f64,
    diff_off_sq: f64,
}

impl Branch {
    fn project(&self, n: &Vector3<f64>) -> Projected {
        let s = self.sum.r.dot(n);
        let d = self.diff.r.dot(n);
        Projected {
            sum_n: self.sum.c + s,
            sum_perp: self.sum.c - s,
            diff_n: self.diff.c + d,
            diff_perp: self.diff.c - d,
            diff_off_sq: (self.diff.r.norm_squared() - d * d).max(0.0),
        }
    }
}

impl Projected {
    /// `(Tr[B S] + ‖√B D √B‖₁)/2` for `B = λ P_n + μ (1 − P_n)`.
    fn value(&self, lambda: f64, mu: f64) -> f64 {
        let x = lambda * self.diff_n;
        let y = mu * self.diff_perp;
        let off = 4.0 * lambda * mu * self.diff_off_sq;
        let norm = (x + y).abs().max(((x - y) * (x - y) + off).sqrt());
        0.5 * (lambda * self.sum_n + mu * self.sum_perp + norm)
    }
}

/// Best success probability over the grid of first steps, each followed by
/// the exact Helstrom measurement in both branches. The branch `k₁ = 0`
/// separates states 0 and 2, the branch `k₁ = 1` states 1 and 3 (a null
/// state when there are only three).
///
/// Every grid point is an achievable nested measurement, so the result is a
/// lower bound on the optimum. Ties keep the first point in grid order.
pub fn brute_force_nested(e: &WeightedEnsemble, grid: &GridSpec) -> Result<GridOptimum> {
    if e.dim() != 2 {
        return Err(Error::UnsupportedDimension(e.dim()));
    }
    let n = e.len();
    if !(3..=4).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    let bloch = |j: usize| -> Result<BlochOperator> {
        if j < n {
            BlochOperator::from_operator(&e.weighted(j))
        } else {
            Ok(BlochOperator::zero())
        }
    };
    let branch = |a: usize, b: usize| -> Result<Branch> {
        let (a, b) = (bloch(a)?, bloch(b)?);
        Ok(Branch {
            sum: a + b,
            diff: a - b,
        })
    };
    let first = branch(0, 2)?;
    let second = branch(1, 3)?;

    let eigen = grid.closed(grid.eigenvalue);
    let thetas = grid.closed(grid.theta);
    let phis = grid.periodic(grid.phi);

    let mut best = f64::NEG_INFINITY;
    let mut arg = (0.0, 0.0, Vector3::new(0.0, 0.0, 1.0));
    for &theta in &thetas {
        for &phi in &phis {
            let dir = Vector3::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            );
            let p0 = first.project(&dir);
            let p1 = second.project(&dir);
            for &lambda in &eigen {
                for &mu in &eigen {
                    let v = p0.value(lambda, mu) + p1.value(1.0 - lambda, 1.0 - mu);
                    if v > best {
                        best = v;
                        arg = (lambda, mu, dir);
                    }
                }
            }
        }
    }
    let (lambda, mu, dir) = arg;
    let q = QubitQ::from_vector(0.5 * (lambda + mu), 0.5 * (lambda - mu) * dir)?;
    Ok(GridOptimum {
        probability: best,
        q,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeEstimate {
    pub probability: f64,
    /// Size of the weighted polytope relative to its largest similar copy
    /// inside the Bloch ball.
    pub ratio: f64,
    pub contains_origin: bool,
    /// Set when the rule is applied beyond three states.
    pub heuristic: bool,
}

const PURITY_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-10;

/// `1/N + R` for equiprobable pure qubit states.
///
/// The weighted polytope has vertices `r_j/N`. A similar copy can be grown
/// until it touches the Bloch sphere, which happens when its smallest
/// enclosing ball becomes a unit ball. So `R = ρ/N`, where `ρ` is the radius
/// of the smallest ball enclosing the Bloch vectors. For states on a great
/// circle this gives `R = 1/N` when the triangle holds the origin and
/// (largest side)/(2N) otherwise.
pub fn polytope_ratio_probability(e: &WeightedEnsemble) -> Result<PolytopeEstimate> {
    if e.dim() != 2 {
        return Err(Error::UnsupportedDimension(e.dim()));
    }
    let n = e.len();
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    let uniform = 1.0 / n as f64;
    if e.states()
        .iter()
        .any(|s| (s.p - uniform).abs() > WEIGHT_TOL)
    {
        return Err(Error::NotEquiprobable);
    }
    let mut points = Vec::with_capacity(n);
    for (j, s) in e.states().iter().enumerate() {
        let b = BlochOperator::from_operator(&s.rho)?;
        // ρ = (1 + v·σ)/2 has c = 1/2 and r = v/2.
        let v = 2.0 * b.r;
        if (v.norm() - 1.0).abs() > PURITY_TOL {
            return Err(Error::NotPure(j));
        }
        points.push(v);
    }
    let radius = enclosing_radius(&points);
    let ratio = radius / n as f64;
    Ok(PolytopeEstimate {
        probability: uniform + ratio,
        ratio,
        contains_origin: hull_contains_origin(&points),
        heuristic: n > 3,
    })
}

/// Center of the sphere through `pts` within their affine hull, or `None`
/// when the points are affinely dependent.
fn circumcenter(pts: &[Vector3<f64>]) -> Option<Vector3<f64>> {
    let p0 = pts[0];
    let k = pts.len() - 1;
    if k == 0 {
        return Some(p0);
    }
    let v: Vec<Vector3<f64>> = pts[1..].iter().map(|p| p - p0).collect();
    let gram = DMatrix::from_fn(k, k, |i, j| 2.0 * v[i].dot(&v[j]));
    let rhs = DVector::from_fn(k, |i, _| v[i].norm_squared());
    let scale = v.iter().map(|x| x.norm_squared()).fold(0.0, f64::max);
    if gram.determinant().abs() <= 1e-12 * (2.0 * scale).powi(k as i32) {
        return None;
    }
    let t = gram.lu().solve(&rhs)?;
    Some(
        p0 + v
            .iter()
            .zip(t.iter())
            .map(|(x, ti)| x * *ti)
            .sum::<Vector3<f64>>(),
    )
}

/// Radius of the smallest ball enclosing up to four points: the smallest
/// circumscribed ball of any subset that contains all the points.
fn enclosing_radius(points: &[Vector3<f64>]) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let subset: Vec<Vector3<f64>> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| points[i])
            .collect();
        let Some(center) = circumcenter(&subset) else {
            continue;
        };
        let r = (subset[0] - center).norm();
        if r < best && points.iter().all(|p| (p - center).norm() <= r + 1e-12) {
            best = r;
        }
    }
    best
}

/// Whether the origin is a convex combination of `points`. Some subset then
/// carries it with unique nonnegative weights summing to one.
fn hull_contains_origin(points: &[Vector3<f64>]) -> bool {
    let n = points.len();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let a = DMatrix::from_fn(
            4,
            k,
            |row, col| {
                if row < 3 {
                    points[idx[col]][row]
                } else {
                    1.0
                }
            },
        );
        let b = DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]);
        let Ok(w) = a.clone().svd(true, true).solve(&b, 1e-12) else {
            continue;
        };
        if (&a * &w - &b).norm() < 1e-9 && w.iter().all(|x| *x >= -1e-12) {
            return true;
        }
    }
    false
}

/// Best success probability over `trials` random POVMs with one element per
/// state. Deterministic for a given seed.
pub fn random_povm_search(e: &WeightedEnsemble, trials: usize, seed: u64) -> f64 {
    let n = e.len();
    if n == 1 {
        return e.weight(0);
    }
    let dim = e.dim();
    let min_rank = dim.div_ceil(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials {
        let rank = rng.random_range(min_rank..=dim);
        let povm = random::povm(&mut rng, n, dim, rank);
        let p = success_probability(e, &povm).expect("POVM matches the ensemble");
        best = best.max(p);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::{build_abc, f_q, optimal_probability, SearchOptions};
    use crate::operator::HermitianOperator;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn equatorial(angles: &[f64]) -> WeightedEnsemble {
        let vs: Vec<[f64; 3]> = angles.iter().map(|t| [t.cos(), t.sin(), 0.0]).collect();
        WeightedEnsemble::equiprobable_bloch(&vs).unwrap()
    }

    fn trine() -> WeightedEnsemble {
        equatorial(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])
    }

    fn bb84() -> WeightedEnsemble {
        WeightedEnsemble::equiprobable_bloch(&[
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn grid_spec_rejects_coarse_grids() {
        assert!(GridSpec::new(1).is_err());
        let g = GridSpec::new(4).unwrap();
        assert_eq!(g.closed(g.eigenvalue), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.periodic(g.phi).len(), 4);
    }

    #[test]
    fn brute_force_examples() {
        let t = brute_force_nested(&trine(), &GridSpec::new(60).unwrap()).unwrap();
        assert!(
            t.probability >= 0.666 && t.probability <= 2.0 / 3.0 + 1e-12,
            "{}",
            t.probability
        );

        for n in [3, 4] {
            let same = WeightedEnsemble::equiprobable_bloch(&vec![[0.6, 0.0, 0.8]; n]).unwrap();
            let v = brute_force_nested(&same, &GridSpec::new(3).unwrap()).unwrap();
            assert_abs_diff_eq!(v.probability, 1.0 / n as f64, epsilon = 1e-15);
        }

        let b = brute_force_nested(&bb84(), &GridSpec::new(80).unwrap()).unwrap();
        assert!(b.probability >= 0.499 && b.probability <= 0.5 + 1e-12);
    }

    #[test]
    fn grid_value_matches_objective_at_its_argmax() {
        let e = random::ensemble(&mut ChaCha8Rng::seed_from_u64(5), 4, 2);
        let best = brute_force_nested(&e, &GridSpec::new(8).unwrap()).unwrap();
        let abc = build_abc(&e, &[0, 1, 2, 3]).unwrap();
        let f = abc.offset + f_q(&abc.a, &abc.b, &abc.c, &best.q.to_operator()).unwrap();
        assert_abs_diff_eq!(best.probability, f, epsilon = 1e-12);
    }

    #[test]
    fn refinement_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [3, 4] {
            let e = random::ensemble(&mut rng, n, 2);
            let coarse = brute_force_nested(&e, &GridSpec::new(6).unwrap()).unwrap();
            let fine = brute_force_nested(&e, &GridSpec::new(12).unwrap()).unwrap();
            assert!(fine.probability >= coarse.probability - 1e-12);
        }
    }

    #[test]
    fn brute_force_rejects_unsupported_inputs() {
        let e = random::ensemble(&mut ChaCha8Rng::seed_from_u64(7), 3, 3);
        assert_eq!(
            brute_force_nested(&e, &GridSpec::new(2).unwrap()),
            Err(Error::UnsupportedDimension(3))
        );
        let pair = random::ensemble(&mut ChaCha8Rng::seed_from_u64(7), 2, 2);
        assert_eq!(
            brute_force_nested(&pair, &GridSpec::new(2).unwrap()),
            Err(Error::UnsupportedN(2))
        );
    }

    #[test]
    fn polytope_examples() {
        let t = polytope_ratio_probability(&trine()).unwrap();
        assert_abs_diff_eq!(t.probability, 2.0 / 3.0, epsilon = 1e-12);
        assert!(t.contains_origin && !t.heuristic);

        let same = equatorial(&[0.3, 0.3, 0.3]);
        let s = polytope_ratio_probability(&same).unwrap();
        assert_abs_diff_eq!(s.probability, 1.0 / 3.0, epsilon = 1e-12);
        assert!(!s.contains_origin);

        let c = polytope_ratio_probability(&equatorial(&[0.0, 2.0 * PI / 3.0, 7.0 * PI / 5.0]))
            .unwrap();
        assert_abs_diff_eq!(c.probability, 2.0 / 3.0, epsilon = 1e-12);
        assert!(c.contains_origin);

        // Obtuse triangle: the largest side becomes a diameter.
        let o = polytope_ratio_probability(&equatorial(&[0.0, 0.5, 1.0])).unwrap();
        assert_abs_diff_eq!(o.ratio, (2.0 * 0.5f64.sin()) / 6.0, epsilon = 1e-12);
        assert!(!o.contains_origin);

        assert!(polytope_ratio_probability(&bb84()).unwrap().heuristic);
    }

    #[test]
    fn polytope_rejects_invalid_ensembles() {
        let mixed = WeightedEnsemble::equiprobable_bloch(&[
            [1.0, 0.0, 0.0],
            [0.0, 0.5, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(polytope_ratio_probability(&mixed), Err(Error::NotPure(1)));
        let skewed = WeightedEnsemble::from_bloch(
            &[0.5, 0.25, 0.25],
            &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(
            polytope_ratio_probability(&skewed),
            Err(Error::NotEquiprobable)
        );
        let five = equatorial(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            polytope_ratio_probability(&five),
            Err(Error::UnsupportedN(5))
        );
    }

    #[test]
    fn polytope_matches_helstrom_for_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let e = random::pure_qubit_ensemble(&mut rng, 2);
            let (h, _) = crate::discrimination::helstrom(&e).unwrap();
            assert_abs_diff_eq!(
                polytope_ratio_probability(&e).unwrap().probability,
                h,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn random_search_examples() {
        let basis =
            WeightedEnsemble::equiprobable_bloch(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        assert!(random_povm_search(&basis, 2000, 1) > 0.99);

        let single = WeightedEnsemble::new(vec![(
            1.0,
            HermitianOperator::from_real_diagonal(&[0.3, 0.7]),
        )])
        .unwrap();
        assert_eq!(random_povm_search(&single, 10, 1), 1.0);

        let t = random_povm_search(&trine(), 2000, 2);
        assert!((0.6..=2.0 / 3.0 + 1e-12).contains(&t), "{t}");
        assert_eq!(t, random_povm_search(&trine(), 2000, 2));
    }

    #[test]
    fn oracles_never_beat_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [3, 4] {
            for _ in 0..5 {
                let e = random::ensemble(&mut rng, n, 2);
                let opt = optimal_probability(&e, &SearchOptions::default())
                    .unwrap()
                    .probability;
                let grid = brute_force_nested(&e, &GridSpec::new(10).unwrap())
                    .unwrap()
                    .probability;
                let rand = random_povm_search(&e, 200, 3);
                assert!(grid <= opt + 1e-9, "{grid} > {opt}");
                assert!(rand <= opt + 1e-9, "{rand} > {opt}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn polytope_agrees_with_optimum_on_equatorial_triples(
            phi2 in 0.0..(2.0 * PI),
            phi3 in 0.0..(2.0 * PI),
        ) {
            let e = equatorial(&[0.0, phi2, phi3]);
            let opt = optimal_probability(&e, &SearchOptions::default()).unwrap().probability;
            let geo = polytope_ratio_probability(&e).unwrap().probability;
            prop_assert!((opt - geo).abs() < 1e-3, "{} vs {}", opt, geo);
        }
    }
}
