//! Multi-start Nelder–Mead maximization of `F_Q` over qubit operators `Q`.
//!
//! Candidates are projected onto the feasible set `0 ≤ Q ≤ 1` before every
//! evaluation, and the simplex keeps the projected points. The four-parameter
//! search moves over the eigenvalues and eigenvector direction of `Q`; half
//! of its starts are rank-one projectors, on the boundary
//! `|r_Q| = min(c_Q, 1 − c_Q)` where optima are frequently found.
//!
//! When `C = 0` the search runs by default over the two-parameter family
//! `(c_Q, φ_Q)` of [`ReducedSpace`]; the full four-parameter search can be
//! forced with [`OptimizerConfig::full_search`].

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::operator::BlochOperator;
use crate::qubit::{f_q_bloch, n3_reduced_parametrization, QubitQ, ReducedSpace, SignInfo};
use crate::random;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub restarts: usize,
    /// Evaluation budget per start.
    pub max_evals: usize,
    /// Agreement expected with closed forms where they apply.
    pub match_tol: f64,
    /// Search all four coefficients of `Q` even when `C = 0`.
    pub full_search: bool,
    /// Keep the best value after every iteration of every start.
    pub record_history: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            seed: 20_170_131,
            restarts: 16,
            max_evals: 2000,
            match_tol: 1e-4,
            full_search: false,
            record_history: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub best_q: QubitQ,
    pub value: f64,
    pub starts_used: usize,
    /// Whether the start that produced `best_q` met the stopping rule
    /// within its budget.
    pub converged: bool,
    pub evaluations: usize,
    /// `(start, iteration, best value)` triples, when requested.
    pub history: Option<Vec<(usize, usize, f64)>>,
}

/// Clamps `c` to `[0, 1]` and shrinks `r` to norm `min(c, 1 − c)` if needed.
pub fn feasibility_project(c: f64, r: Vector3<f64>) -> QubitQ {
    let c = if c.is_nan() { 0.5 } else { c.clamp(0.0, 1.0) };
    let bound = c.min(1.0 - c).max(0.0);
    let norm = r.norm();
    let r = if norm > bound {
        if norm > 0.0 {
            r * (bound / norm)
        } else {
            Vector3::zeros()
        }
    } else {
        r
    };
    QubitQ::new_unchecked(c, r)
}

/// A search space mapped onto feasible `Q`.
trait Space {
    fn dim(&self) -> usize;
    /// Projects a parameter vector in place and returns the matching `Q`.
    fn project(&self, x: &mut [f64]) -> QubitQ;
    fn sample<R: Rng>(&self, rng: &mut R, on_boundary: bool) -> Vec<f64>;
    fn step(&self) -> Vec<f64>;
}

/// `Q = λ_a P_n + λ_b (1 − P_n)` with `P_n` the projector on the Bloch
/// direction `n(θ, φ)`. The eigenvalues live in a box, which keeps the
/// simplex from collapsing on the cone `|r_Q| = min(c_Q, 1 − c_Q)`.
struct FullSpace;

fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

fn angles(n: &Vector3<f64>) -> (f64, f64) {
    (n.z.clamp(-1.0, 1.0).acos(), n.y.atan2(n.x))
}

impl FullSpace {
    fn coordinates(q: &QubitQ) -> Vec<f64> {
        let r = q.radius();
        let (theta, phi) = if r > 0.0 {
            angles(&(q.r() / r))
        } else {
            (0.0, 0.0)
        };
        vec![q.c() + r, q.c() - r, theta, phi]
    }
}

impl Space for FullSpace {
    fn dim(&self) -> usize {
        4
    }

    fn project(&self, x: &mut [f64]) -> QubitQ {
        x[0] = x[0].clamp(0.0, 1.0);
        x[1] = x[1].clamp(0.0, 1.0);
        let n = direction(x[2], x[3]);
        feasibility_project(0.5 * (x[0] + x[1]), n * (0.5 * (x[0] - x[1])))
    }

    fn sample<R: Rng>(&self, rng: &mut R, on_boundary: bool) -> Vec<f64> {
        let (hi, lo) = if on_boundary {
            (1.0, 0.0)
        } else {
            (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0))
        };
        let (theta, phi) = angles(&random::unit_vector(rng));
        vec![hi, lo, theta, phi]
    }

    fn step(&self) -> Vec<f64> {
        vec![0.1, 0.1, 0.3, 0.3]
    }
}

/// The boundary `|r_Q| = min(c_Q, 1 − c_Q)`: `Q = t P_n` on the lower sheet,
/// `Q = 1 − t P_n` on the upper one, with parameters `(t, θ, φ)`.
struct BoundarySpace {
    upper: bool,
}

impl Space for BoundarySpace {
    fn dim(&self) -> usize {
        3
    }

    fn project(&self, x: &mut [f64]) -> QubitQ {
        x[0] = x[0].clamp(0.0, 1.0);
        let half = 0.5 * x[0];
        let r = direction(x[1], x[2]) * half;
        if self.upper {
            feasibility_project(1.0 - half, -r)
        } else {
            feasibility_project(half, r)
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R, _on_boundary: bool) -> Vec<f64> {
        let t = rng.random_range(0.0..=1.0);
        let (theta, phi) = angles(&random::unit_vector(rng));
        vec![t, theta, phi]
    }

    fn step(&self) -> Vec<f64> {
        vec![0.1, 0.3, 0.3]
    }
}

/// `Q` by its Bloch coefficients `(c_Q, r_Q)`.
struct ConeSpace;

impl Space for ConeSpace {
    fn dim(&self) -> usize {
        4
    }

    fn project(&self, x: &mut [f64]) -> QubitQ {
        let q = feasibility_project(x[0], Vector3::new(x[1], x[2], x[3]));
        x[0] = q.c();
        x[1] = q.r().x;
        x[2] = q.r().y;
        x[3] = q.r().z;
        q
    }

    fn sample<R: Rng>(&self, rng: &mut R, on_boundary: bool) -> Vec<f64> {
        let c: f64 = rng.random_range(0.0..=1.0);
        let bound = c.min(1.0 - c);
        let radius = if on_boundary {
            bound
        } else {
            bound * rng.random_range(0.0f64..=1.0).cbrt()
        };
        let r = random::unit_vector(rng) * radius;
        vec![c, r.x, r.y, r.z]
    }

    fn step(&self) -> Vec<f64> {
        vec![0.05; 4]
    }
}

struct PlaneSpace(ReducedSpace);

impl Space for PlaneSpace {
    fn dim(&self) -> usize {
        2
    }

    fn project(&self, x: &mut [f64]) -> QubitQ {
        x[0] = x[0].clamp(ReducedSpace::C_RANGE.0, ReducedSpace::C_RANGE.1);
        self.0.q(x[0], x[1])
    }

    fn sample<R: Rng>(&self, rng: &mut R, _on_boundary: bool) -> Vec<f64> {
        vec![
            rng.random_range(ReducedSpace::C_RANGE.0..=ReducedSpace::C_RANGE.1),
            rng.random_range(0.0..2.0 * PI),
        ]
    }

    fn step(&self) -> Vec<f64> {
        vec![0.1, 0.4]
    }
}

const DIAMETER_TOL: f64 = 1e-9;
const SURFACE_SCREEN: usize = 64;
const SEED_T: [f64; 6] = [0.01, 0.03, 0.1, 0.3, 0.6, 1.0];
const SPREAD_TOL: f64 = 1e-12;

struct LocalOutcome {
    q: QubitQ,
    value: f64,
    evaluations: usize,
    converged: bool,
}

/// One local search: Nelder–Mead, re-seeded around the incumbent after each
/// convergence until a re-seed stops improving.
fn local_search<S: Space, F: Fn(&QubitQ) -> f64>(
    space: &S,
    objective: &F,
    start: Vec<f64>,
    max_evals: usize,
    mut trace: Option<&mut Vec<f64>>,
) -> LocalOutcome {
    let n = space.dim();
    let mut evals = 0usize;
    let eval = |x: &mut Vec<f64>| -> (f64, QubitQ) {
        let q = space.project(x);
        (objective(&q), q)
    };

    let mut x0 = start;
    let (mut best_value, mut best_q) = eval(&mut x0);
    evals += 1;
    let mut best_x = x0;
    let mut scale = 1.0;
    let mut converged;

    'reseed: loop {
        let steps = space.step();
        let mut simplex: Vec<(Vec<f64>, f64, QubitQ)> = vec![(best_x.clone(), best_value, best_q)];
        for i in 0..n {
            let mut x = best_x.clone();
            x[i] += steps[i] * scale;
            let (v, q) = eval(&mut x);
            evals += 1;
            simplex.push((x, v, q));
        }
        let improved_from = best_value;

        loop {
            simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
            if simplex[0].1 > best_value {
                best_value = simplex[0].1;
                best_x = simplex[0].0.clone();
                best_q = simplex[0].2;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(best_value);
            }

            let spread = simplex[0].1 - simplex[n].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _, _)| dist(x, &simplex[0].0))
                .fold(0.0, f64::max);
            if diameter < DIAMETER_TOL || spread < SPREAD_TOL {
                converged = true;
                break;
            }
            if evals + n + 2 > max_evals {
                converged = false;
                break 'reseed;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|i| simplex[..n].iter().map(|(x, _, _)| x[i]).sum::<f64>() / n as f64)
                .collect();
            let worst = simplex[n].0.clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let mut xr = along(1.0);
            let (vr, qr) = eval(&mut xr);
            evals += 1;
            if vr > simplex[0].1 {
                let mut xe = along(2.0);
                let (ve, qe) = eval(&mut xe);
                evals += 1;
                simplex[n] = if ve > vr { (xe, ve, qe) } else { (xr, vr, qr) };
            } else if vr > simplex[n - 1].1 {
                simplex[n] = (xr, vr, qr);
            } else {
                let (mut xc, t) = if vr > simplex[n].1 {
                    (along(0.5), vr)
                } else {
                    (along(-0.5), simplex[n].1)
                };
                let (vc, qc) = eval(&mut xc);
                evals += 1;
                if vc > t {
                    simplex[n] = (xc, vc, qc);
                } else {
                    let anchor = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        let mut x: Vec<f64> = anchor
                            .iter()
                            .zip(&vertex.0)
                            .map(|(a, v)| a + 0.5 * (v - a))
                            .collect();
                        let (v, q) = eval(&mut x);
                        *vertex = (x, v, q);
                    }
                    evals += n;
                }
            }
        }

        if best_value <= improved_from + SPREAD_TOL || evals + 2 * n + 2 > max_evals {
            break;
        }
        scale = (scale * 0.5).max(1e-3);
    }

    LocalOutcome {
        q: best_q,
        value: best_value,
        evaluations: evals,
        converged,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Maximizes `F_Q(A, B, C)` over feasible qubit `Q`.
///
/// Deterministic for a given `config.seed`. Exhausting the budget is not an
/// error: the best point found is returned with `converged = false`.
pub fn maximize_f(
    a: &BlochOperator,
    b: &BlochOperator,
    c: &BlochOperator,
    config: &OptimizerConfig,
) -> OptimizationResult {
    let signs = SignInfo::classify(b, c);
    let objective = |q: &QubitQ| f_q_bloch(a, b, c, q, signs);
    if c.is_zero() && !config.full_search {
        let space = PlaneSpace(n3_reduced_parametrization(a, b));
        let mut result = run_starts(config, |start, rng, trace| {
            let x0 = space.sample(rng, start % 2 == 0);
            local_search(&space, &objective, x0, config.max_evals, trace)
        });
        // With C = 0, F_{tQ} = t F_Q, so the optimum either has largest
        // eigenvalue one or is Q = 0 with value zero.
        let at_zero = objective(&QubitQ::zero());
        if at_zero > result.value {
            result.value = at_zero;
            result.best_q = QubitQ::zero();
            result.converged = true;
        }
        result
    } else {
        // Even starts first walk the boundary surface, then move into the
        // interior. Optima close to 0 or 1 sit in narrow basins, so the first
        // of them follow the directions of steepest first-order ascent away
        // from 0 and 1, and the rest screen a batch of random surface points.
        let seeds = boundary_seeds(a, b, c);
        let mut result = run_starts(config, |start, rng, mut trace| {
            if start % 2 == 1 {
                let x0 = FullSpace.sample(rng, false);
                return local_search(&FullSpace, &objective, x0, config.max_evals, trace);
            }
            let k = start / 2;
            let (surface, candidates) = match seeds.get(k) {
                Some(&(upper, n)) => {
                    let (theta, phi) = angles(&n);
                    let xs: Vec<Vec<f64>> = SEED_T.iter().map(|&t| vec![t, theta, phi]).collect();
                    (BoundarySpace { upper }, xs)
                }
                None => {
                    let surface = BoundarySpace { upper: k % 2 == 1 };
                    let xs = (0..SURFACE_SCREEN)
                        .map(|_| surface.sample(rng, true))
                        .collect();
                    (surface, xs)
                }
            };
            let budget = config.max_evals / 2;
            let x0 = candidates
                .into_iter()
                .map(|mut x| {
                    let v = objective(&surface.project(&mut x));
                    (x, v)
                })
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(x, _)| x)
                .expect("non-empty screen");
            let first = local_search(&surface, &objective, x0, budget, trace.as_deref_mut());
            let second = local_search(
                &FullSpace,
                &objective,
                FullSpace::coordinates(&first.q),
                budget,
                trace,
            );
            let evaluations = first.evaluations + second.evaluations;
            let mut best = if second.value > first.value {
                second
            } else {
                first
            };
            best.evaluations = evaluations;
            best
        });
        // Where the eigenvalues nearly coincide the direction of `Q` stops
        // mattering in the eigen chart, so finish in the (c, r) chart.
        let r = result.best_q.r();
        let polish = local_search(
            &ConeSpace,
            &objective,
            vec![result.best_q.c(), r.x, r.y, r.z],
            config.max_evals,
            None,
        );
        result.evaluations += polish.evaluations;
        if polish.value > result.value {
            result.value = polish.value;
            result.best_q = polish.q;
            result.converged = polish.converged;
        }
        result
    }
}

fn abs_bloch(x: &BlochOperator) -> BlochOperator {
    let r = x.r.norm();
    if r <= x.c.abs() {
        BlochOperator {
            c: x.c.abs(),
            r: x.r * x.c.signum(),
        }
    } else {
        BlochOperator {
            c: r,
            r: x.r * (x.c / r),
        }
    }
}

/// Directions `n` maximizing the slope of `F` along `t P_n` at `t = 0`,
/// `⟨n|A ± B − |C||n⟩`, and along `1 − t P_n` at `t = 0`,
/// `⟨n|−A − |B| ± C|n⟩`. Each is the top eigenvector of the operator.
fn boundary_seeds(
    a: &BlochOperator,
    b: &BlochOperator,
    c: &BlochOperator,
) -> Vec<(bool, Vector3<f64>)> {
    let (abs_b, abs_c) = (abs_bloch(b), abs_bloch(c));
    let lower = [a.r + b.r - abs_c.r, a.r - b.r - abs_c.r];
    let upper = [-a.r - abs_b.r + c.r, -a.r - abs_b.r - c.r];
    lower
        .into_iter()
        .map(|r| (false, r))
        .chain(upper.into_iter().map(|r| (true, r)))
        .map(|(up, r)| {
            let norm = r.norm();
            (up, if norm > 0.0 { r / norm } else { Vector3::z() })
        })
        .collect()
}

fn run_starts<F>(config: &OptimizerConfig, one: F) -> OptimizationResult
where
    F: Fn(usize, &mut ChaCha8Rng, Option<&mut Vec<f64>>) -> LocalOutcome,
{
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let restarts = config.restarts.max(1);
    let mut history = config.record_history.then(Vec::new);
    let mut best: Option<LocalOutcome> = None;
    let mut evaluations = 0;
    for start in 0..restarts {
        let mut trace = config.record_history.then(Vec::new);
        let outcome = one(start, &mut rng, trace.as_mut());
        evaluations += outcome.evaluations;
        if let (Some(h), Some(t)) = (history.as_mut(), trace) {
            h.extend(t.into_iter().enumerate().map(|(it, v)| (start, it, v)));
        }
        // Strict comparison keeps the earliest start on ties.
        if best.as_ref().is_none_or(|b| outcome.value > b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one start");
    OptimizationResult {
        best_q: best.q,
        value: best.value,
        starts_used: restarts,
        converged: best.converged,
        evaluations,
        history,
    }
}
