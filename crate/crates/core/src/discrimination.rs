//! Minimum-error discrimination through nested binary measurements.
//!
//! For an ensemble `{p_j, ρ_j}` the success probability of a POVM `{E_j}` is
//! `Σ Tr[E_j ρ̃_j]` with `ρ̃_j = p_j ρ_j`. Decomposing the POVM into a binary
//! tree and solving the last step with the Helstrom measurement leaves a
//! single free operator `Q = B^(1)_0`:
//!
//! ```text
//! P(N = 4) = (p₁₀ + p₁₁)/2 + max_Q F_Q(A, B, C)
//! P(N = 3) = p₁₀ + max_Q F_Q(A, B, 0)
//! F_Q(A, B, C) = Tr[QA] + ‖√Q B √Q‖₁ + ‖√(1−Q) C √(1−Q)‖₁
//! ```
//!
//! States are attached to leaves with `ρ̃_{k₁,k₂} = ρ̃_{k₁ + 2k₂}`, after an
//! optional relabeling. [`optimal_probability`] first tries the closed-form
//! maximum of `F` under every relabeling, then falls back to the numerical
//! qubit optimizer.

use std::fmt;

use itertools::Itertools;
use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::operator::{BlochOperator, HermitianOperator};
use crate::optimizer::{maximize_f, OptimizationResult, OptimizerConfig};
use crate::povm::{apply_binary, BinaryNode, NestedPovm, Povm};
use crate::qubit::QubitQ;
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedState {
    pub p: f64,
    pub rho: HermitianOperator,
}

/// States `ρ_j` with prior probabilities `p_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEnsemble {
    states: Vec<WeightedState>,
}

impl WeightedEnsemble {
    pub fn new(states: Vec<(f64, HermitianOperator)>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        let dim = states[0].1.dim();
        let mut total = 0.0;
        for (j, (p, rho)) in states.iter().enumerate() {
            if rho.dim() != dim {
                return Err(Error::InvalidEnsemble(format!(
                    "state {j} has dimension {}, expected {dim}",
                    rho.dim()
                )));
            }
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::InvalidEnsemble(format!("state {j} has weight {p}")));
            }
            if (rho.trace() - 1.0).abs() > tol::ENSEMBLE {
                return Err(Error::InvalidEnsemble(format!(
                    "state {j} has trace {}",
                    rho.trace()
                )));
            }
            if rho.eigendecompose().min() < -tol::ENSEMBLE {
                return Err(Error::InvalidEnsemble(format!("state {j} is not positive")));
            }
            total += p;
        }
        if (total - 1.0).abs() > tol::ENSEMBLE {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self {
            states: states
                .into_iter()
                .map(|(p, rho)| WeightedState { p, rho })
                .collect(),
        })
    }

    /// Qubit states `(1 + v·σ)/2` with the given weights.
    pub fn from_bloch(weights: &[f64], vectors: &[[f64; 3]]) -> Result<Self> {
        if weights.len() != vectors.len() {
            return Err(Error::SizeMismatch(format!(
                "{} weights for {} states",
                weights.len(),
                vectors.len()
            )));
        }
        let states = weights
            .iter()
            .zip(vectors)
            .enumerate()
            .map(|(j, (&p, v))| {
                if Vector3::from(*v).norm() > 1.0 + tol::ENSEMBLE {
                    return Err(Error::InvalidEnsemble(format!(
                        "Bloch vector {j} lies outside the unit ball"
                    )));
                }
                Ok((p, BlochOperator::state(*v).to_operator()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }

    pub fn equiprobable_bloch(vectors: &[[f64; 3]]) -> Result<Self> {
        let n = vectors.len();
        Self::from_bloch(&vec![1.0 / n as f64; n], vectors)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].rho.dim()
    }

    pub fn states(&self) -> &[WeightedState] {
        &self.states
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.states[j].p
    }

    /// `ρ̃_j = p_j ρ_j`.
    pub fn weighted(&self, j: usize) -> HermitianOperator {
        self.states[j].rho.scale(self.states[j].p)
    }

    /// Appends zero-weight maximally mixed states up to `n` states.
    pub fn padded(&self, n: usize) -> Self {
        let mut states = self.states.clone();
        let mixed = HermitianOperator::identity(self.dim()).scale(1.0 / self.dim() as f64);
        while states.len() < n {
            states.push(WeightedState {
                p: 0.0,
                rho: mixed.clone(),
            });
        }
        Self { states }
    }

    /// Ensemble whose state `j` is state `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.len())?;
        Ok(Self {
            states: perm.iter().map(|&k| self.states[k].clone()).collect(),
        })
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {n} states",
            perm.len()
        )));
    }
    for &k in perm {
        if k >= n || seen[k] {
            return Err(Error::InvalidPermutation(format!("{perm:?}")));
        }
        seen[k] = true;
    }
    Ok(())
}

/// `Σ_j Tr[E_j ρ̃_j]`.
pub fn success_probability(e: &WeightedEnsemble, p: &Povm) -> Result<f64> {
    if e.len() != p.len() {
        return Err(Error::SizeMismatch(format!(
            "{} states but {} POVM elements",
            e.len(),
            p.len()
        )));
    }
    if e.dim() != p.dim() {
        return Err(Error::SizeMismatch(format!(
            "states have dimension {}, POVM {}",
            e.dim(),
            p.dim()
        )));
    }
    Ok(p.elements()
        .iter()
        .enumerate()
        .map(|(j, el)| el.trace_product(&e.weighted(j)))
        .sum())
}

/// Success probability of a nested POVM, obtained by passing each weighted
/// state through its chain of binary outcomes. The ensemble is padded with
/// null states to the number of leaves.
pub fn success_probability_nested(e: &WeightedEnsemble, n: &NestedPovm) -> Result<f64> {
    if e.len() > n.leaf_count() {
        return Err(Error::SizeMismatch(format!(
            "{} states but only {} leaves",
            e.len(),
            n.leaf_count()
        )));
    }
    if e.dim() != n.dim() {
        return Err(Error::SizeMismatch(format!(
            "states have dimension {}, tree {}",
            e.dim(),
            n.dim()
        )));
    }
    let mut total = 0.0;
    for j in 0..e.len() {
        let mut state = e.weighted(j);
        let mut prob = state.trace();
        for b in n.chain(j) {
            let (post, p) = apply_binary(&state, b)?;
            state = post;
            prob = p;
        }
        total += prob;
    }
    Ok(total)
}

/// Optimal value `(Tr[X₀ + X₁] + ‖X₀ − X₁‖₁)/2` of telling two weighted
/// operators apart, and the projector onto the positive part of `X₀ − X₁`.
fn helstrom_pair(x0: &HermitianOperator, x1: &HermitianOperator) -> (f64, HermitianOperator) {
    let diff = x0 - x1;
    let value = 0.5 * ((x0 + x1).trace() + diff.trace_norm());
    (value, diff.positive_support_projector())
}

/// Helstrom optimum `(1 + ‖ρ̃₀ − ρ̃₁‖₁)/2` for two states and the projective
/// measurement attaining it.
pub fn helstrom(e: &WeightedEnsemble) -> Result<(f64, Povm)> {
    if e.len() != 2 {
        return Err(Error::SizeMismatch(format!(
            "Helstrom needs 2 states, got {}",
            e.len()
        )));
    }
    let (value, proj) = helstrom_pair(&e.weighted(0), &e.weighted(1));
    Ok((value, Povm::binary(proj)?))
}

/// States `selected` after outcome `B`, renormalized: weights
/// `Tr[√B ρ̃_j √B] / p_B` and branch probability `p_B = Σ Tr[B ρ̃_j]`.
pub fn conditional_ensemble(
    e: &WeightedEnsemble,
    b: &HermitianOperator,
    selected: &[usize],
) -> Result<(WeightedEnsemble, f64)> {
    if selected.is_empty() {
        return Err(Error::SizeMismatch("no states selected".into()));
    }
    if let Some(&bad) = selected.iter().find(|&&j| j >= e.len()) {
        return Err(Error::SizeMismatch(format!(
            "index {bad} out of range for {} states",
            e.len()
        )));
    }
    b.check_effect()?;
    let root = b.sqrt()?;
    let posts: Vec<(f64, HermitianOperator)> = selected
        .iter()
        .map(|&j| {
            let post = root.sandwich(&e.states[j].rho);
            (e.states[j].p * post.trace().max(0.0), post)
        })
        .collect();
    let branch: f64 = posts.iter().map(|(w, _)| w).sum();
    if branch <= tol::BRANCH {
        return Err(Error::DeadBranch(branch));
    }
    let mixed = HermitianOperator::identity(e.dim()).scale(1.0 / e.dim() as f64);
    let states = posts
        .into_iter()
        .map(|(w, post)| {
            let t = post.trace();
            let rho = if t > tol::BRANCH {
                post.scale(1.0 / t)
            } else {
                mixed.clone()
            };
            WeightedState { p: w / branch, rho }
        })
        .collect();
    Ok((WeightedEnsemble { states }, branch))
}

/// `Σ_{k₁} p(k₁) · solver(S_{k₁})` for four states, where `S_{k₁}` holds the
/// states with first bit `k₁` after the first-step outcome. Branches with
/// probability below [`tol::BRANCH`] contribute zero.
pub fn recursion_value<F>(e: &WeightedEnsemble, first_step: &Povm, solver: F) -> Result<f64>
where
    F: Fn(&WeightedEnsemble) -> Result<f64>,
{
    if e.len() != 4 {
        return Err(Error::SizeMismatch(format!(
            "the recursion needs 4 states, got {}",
            e.len()
        )));
    }
    if first_step.len() != 2 || first_step.dim() != e.dim() {
        return Err(Error::SizeMismatch(
            "first step must be a binary POVM on the ensemble's space".into(),
        ));
    }
    let mut total = 0.0;
    for k1 in 0..2 {
        match conditional_ensemble(e, &first_step.elements()[k1], &[k1, k1 + 2]) {
            Ok((sub, branch)) => total += branch * solver(&sub)?,
            Err(Error::DeadBranch(_)) => {}
            Err(other) => return Err(other),
        }
    }
    Ok(total)
}

/// Operators of the single-`Q` objective together with the additive constant
/// of the success probability.
#[derive(Clone, Debug, PartialEq)]
pub struct AbcTriple {
    pub a: HermitianOperator,
    pub b: HermitianOperator,
    pub c: HermitianOperator,
    pub offset: f64,
}

/// `A`, `B`, `C` and offset for three or four states after relabeling by
/// `perm` (leaf `j` holds state `perm[j]`).
pub fn build_abc(e: &WeightedEnsemble, perm: &[usize]) -> Result<AbcTriple> {
    let n = e.len();
    if !(3..=4).contains(&n) {
        return Err(Error::SizeMismatch(format!(
            "A, B, C are defined for 3 or 4 states, got {n}"
        )));
    }
    check_permutation(perm, n)?;
    let w = |leaf: usize| e.weighted(perm[leaf]);
    let p = |leaf: usize| e.weight(perm[leaf]);
    // ρ̃_{k₁,k₂} = leaf k₁ + 2k₂.
    let (r00, r10, r01) = (w(0), w(1), w(2));
    let b = (&r00 - &r01).scale(0.5);
    if n == 4 {
        let r11 = w(3);
        Ok(AbcTriple {
            a: (&(&r00 + &r01) - &(&r10 + &r11)).scale(0.5),
            b,
            c: (&r10 - &r11).scale(0.5),
            offset: 0.5 * (p(1) + p(3)),
        })
    } else {
        Ok(AbcTriple {
            a: &(&r00 + &r01).scale(0.5) - &r10,
            b,
            c: HermitianOperator::zeros(e.dim()),
            offset: p(1),
        })
    }
}

/// `F_Q(A, B, C) = Tr[QA] + ‖√Q B √Q‖₁ + ‖√(1−Q) C √(1−Q)‖₁`.
pub fn f_q(
    a: &HermitianOperator,
    b: &HermitianOperator,
    c: &HermitianOperator,
    q: &HermitianOperator,
) -> Result<f64> {
    let dim = q.dim();
    if [a, b, c].iter().any(|x| x.dim() != dim) {
        return Err(Error::SizeMismatch(
            "A, B, C and Q must share a dimension".into(),
        ));
    }
    q.check_effect()?;
    let root = q.sqrt()?;
    let root_rest = q.complement().sqrt()?;
    Ok(q.trace_product(a) + root.sandwich(b).trace_norm() + root_rest.sandwich(c).trace_norm())
}

/// Which sufficient condition made the closed form of `F` applicable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionFamily {
    /// `B` lives on the positive support of `A`, `C` on the negative one.
    SupportSplit,
    /// `B` and `C` each have a definite sign.
    DefiniteSign,
    /// `A`, `B` and `C` commute pairwise.
    Commuting,
}

impl ConditionFamily {
    pub fn label(&self) -> &'static str {
        match self {
            ConditionFamily::SupportSplit => "i",
            ConditionFamily::DefiniteSign => "ii",
            ConditionFamily::Commuting => "iii",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub value: f64,
    /// A maximizer of `F_Q`.
    pub witness: HermitianOperator,
    pub family: ConditionFamily,
}

/// `F(A, B, C) = Tr[(A + |B| − |C|)₊] + ‖C‖₁` when one of the sufficient
/// conditions holds, checked in the order support split, definite sign,
/// commuting.
pub fn f_closed_form(
    a: &HermitianOperator,
    b: &HermitianOperator,
    c: &HermitianOperator,
) -> Result<ClosedForm> {
    let dim = a.dim();
    if b.dim() != dim || c.dim() != dim {
        return Err(Error::SizeMismatch(
            "A, B and C must share a dimension".into(),
        ));
    }
    let x = &(a + &b.abs()) - &c.abs();
    let value = x.positive_part().trace() + c.trace_norm();

    let pos = a.positive_support_projector();
    let neg = a.negative_support_projector();
    if b.distance(&pos.sandwich(b)) <= tol::SUPPORT && c.distance(&neg.sandwich(c)) <= tol::SUPPORT
    {
        return Ok(ClosedForm {
            value,
            witness: pos,
            family: ConditionFamily::SupportSplit,
        });
    }
    let family = if b.sign().is_definite() && c.sign().is_definite() {
        ConditionFamily::DefiniteSign
    } else if a.commutes_with(b) && a.commutes_with(c) && b.commutes_with(c) {
        ConditionFamily::Commuting
    } else {
        return Err(Error::ConditionsNotMet);
    };
    Ok(ClosedForm {
        value,
        witness: x.positive_support_projector(),
        family,
    })
}

/// Which permutations of the state labels the closed-form search visits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PermutationSearch {
    #[default]
    All,
    Identity,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchOptions {
    pub permutations: PermutationSearch,
    pub optimizer: OptimizerConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Helstrom,
    ClosedForm(ConditionFamily),
    Numerical,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Helstrom => f.write_str("helstrom"),
            Method::ClosedForm(family) => write!(f, "closed-form({})", family.label()),
            Method::Numerical => f.write_str("numerical"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalDiscrimination {
    pub probability: f64,
    pub method: Method,
    /// Leaf `j` of `measurement` guesses state `permutation[j]`.
    pub permutation: Vec<usize>,
    /// First-step operator `Q = B^(1)_0`.
    pub q: HermitianOperator,
    pub measurement: NestedPovm,
    pub optimizer: Option<OptimizationResult>,
}

impl OptimalDiscrimination {
    /// The ensemble as seen by `measurement`: relabeled and padded to the
    /// number of leaves.
    pub fn leaf_ensemble(&self, e: &WeightedEnsemble) -> Result<WeightedEnsemble> {
        Ok(e.permuted(&self.permutation)?
            .padded(self.measurement.leaf_count()))
    }
}

/// Nested measurement `{Q, 1 − Q}` followed in each branch by the Helstrom
/// measurement of the two post-measurement states, restricted to the support
/// of the branch operator. A branch whose second state is padding keeps its
/// whole support on the first leaf.
fn helstrom_completion(
    leaves: &WeightedEnsemble,
    q: &HermitianOperator,
    real_states: usize,
) -> Result<NestedPovm> {
    let first = [q.clone(), q.complement()];
    let mut second = Vec::with_capacity(2);
    for (k1, b1) in first.iter().enumerate() {
        let support = b1.support_projector();
        let node = if k1 + 2 >= real_states {
            BinaryNode {
                b0: support.clone(),
                b1: HermitianOperator::zeros(q.dim()),
            }
        } else {
            let root = b1.sqrt()?;
            let diff = root.sandwich(&(&leaves.weighted(k1) - &leaves.weighted(k1 + 2)));
            let keep = support.sandwich(&diff.positive_support_projector());
            let rest = &support - &keep;
            BinaryNode { b0: keep, b1: rest }
        };
        second.push(node);
    }
    let [b0, b1] = first;
    Ok(NestedPovm::from_levels(vec![
        vec![BinaryNode { b0, b1 }],
        second,
    ]))
}

fn permutations(n: usize, search: PermutationSearch) -> Vec<Vec<usize>> {
    match search {
        PermutationSearch::Identity => vec![(0..n).collect()],
        PermutationSearch::All => (0..n).permutations(n).collect(),
    }
}

/// Optimal success probability for two, three or four states.
///
/// Two states use the Helstrom formula. For three or four, the closed form
/// is tried under each label permutation (identity first); the first hit
/// wins. Otherwise `F` is maximized numerically over qubit `Q` with the
/// identity labeling, which requires dimension 2.
pub fn optimal_probability(
    e: &WeightedEnsemble,
    options: &SearchOptions,
) -> Result<OptimalDiscrimination> {
    let n = e.len();
    if n == 2 {
        let (probability, povm) = helstrom(e)?;
        let q = povm.elements()[0].clone();
        let measurement = NestedPovm::from_levels(vec![vec![BinaryNode {
            b0: q.clone(),
            b1: q.complement(),
        }]]);
        return Ok(OptimalDiscrimination {
            probability,
            method: Method::Helstrom,
            permutation: vec![0, 1],
            q,
            measurement,
            optimizer: None,
        });
    }
    if !(3..=4).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }

    for perm in permutations(n, options.permutations) {
        let abc = build_abc(e, &perm)?;
        if let Ok(closed) = f_closed_form(&abc.a, &abc.b, &abc.c) {
            let leaves = e.permuted(&perm)?.padded(4);
            let measurement = helstrom_completion(&leaves, &closed.witness, n)?;
            return Ok(OptimalDiscrimination {
                probability: abc.offset + closed.value,
                method: Method::ClosedForm(closed.family),
                permutation: perm,
                q: closed.witness,
                measurement,
                optimizer: None,
            });
        }
    }

    if e.dim() != 2 {
        return Err(Error::UnsupportedDimension(e.dim()));
    }
    let perm: Vec<usize> = (0..n).collect();
    let abc = build_abc(e, &perm)?;
    let result = maximize_f(
        &abc.a.to_bloch()?,
        &abc.b.to_bloch()?,
        &abc.c.to_bloch()?,
        &options.optimizer,
    );
    let q = result.best_q.to_operator();
    let leaves = e.padded(4);
    let measurement = helstrom_completion(&leaves, &q, n)?;
    Ok(OptimalDiscrimination {
        probability: abc.offset + result.value,
        method: Method::Numerical,
        permutation: perm,
        q,
        measurement,
        optimizer: Some(result),
    })
}

/// Convenience for qubit ensembles: `F_Q` at a feasible Bloch `Q`.
pub fn f_q_at(abc: &AbcTriple, q: &QubitQ) -> Result<f64> {
    f_q(&abc.a, &abc.b, &abc.c, &q.to_operator())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{decompose, recompose};
    use crate::random;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn equatorial(angles: &[f64]) -> WeightedEnsemble {
        let vs: Vec<[f64; 3]> = angles.iter().map(|t| [t.cos(), t.sin(), 0.0]).collect();
        WeightedEnsemble::equiprobable_bloch(&vs).unwrap()
    }

    fn trine() -> WeightedEnsemble {
        equatorial(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])
    }

    fn trine_povm() -> Povm {
        let e = trine();
        Povm::new((0..3).map(|j| e.states()[j].rho.scale(2.0 / 3.0)).collect()).unwrap()
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
    fn ensemble_validation() {
        let rho = HermitianOperator::identity(2).scale(0.5);
        assert!(WeightedEnsemble::new(vec![(0.5, rho.clone()), (0.4, rho.clone())]).is_err());
        assert!(WeightedEnsemble::new(vec![(1.5, rho.clone()), (-0.5, rho.clone())]).is_err());
        assert!(WeightedEnsemble::new(vec![(1.0, HermitianOperator::identity(2))]).is_err());
        assert!(WeightedEnsemble::from_bloch(&[1.0], &[[1.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn success_probability_examples() {
        let basis =
            WeightedEnsemble::equiprobable_bloch(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        let povm = Povm::new(vec![
            HermitianOperator::from_real_diagonal(&[1.0, 0.0]),
            HermitianOperator::from_real_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        assert_abs_diff_eq!(
            success_probability(&basis, &povm).unwrap(),
            1.0,
            epsilon = 1e-15
        );

        let same = WeightedEnsemble::equiprobable_bloch(&[[0.3, 0.1, 0.2]; 3]).unwrap();
        let uniform = Povm::new(vec![HermitianOperator::identity(2).scale(1.0 / 3.0); 3]).unwrap();
        assert_abs_diff_eq!(
            success_probability(&same, &uniform).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );

        assert_abs_diff_eq!(
            success_probability(&trine(), &trine_povm()).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-14
        );
        assert!(matches!(
            success_probability(&trine(), &povm),
            Err(Error::SizeMismatch(_))
        ));
    }

    #[test]
    fn nested_probability_examples() {
        let basis =
            WeightedEnsemble::equiprobable_bloch(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        let tree = decompose(
            &Povm::new(vec![
                HermitianOperator::from_real_diagonal(&[1.0, 0.0]),
                HermitianOperator::from_real_diagonal(&[0.0, 1.0]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            success_probability_nested(&basis, &tree).unwrap(),
            1.0,
            epsilon = 1e-15
        );

        let tree = decompose(&trine_povm()).unwrap();
        assert_abs_diff_eq!(
            success_probability_nested(&trine(), &tree).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-12
        );

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let e = random::ensemble(&mut rng, 4, 3);
            let p = random::povm(&mut rng, 4, 3, 2);
            let tree = decompose(&p).unwrap();
            let nested = success_probability_nested(&e, &tree).unwrap();
            let flat = success_probability(&e, &recompose(&tree).unwrap()).unwrap();
            assert!((nested - flat).abs() < 1e-12);
        }
    }

    #[test]
    fn helstrom_examples() {
        let orth =
            WeightedEnsemble::equiprobable_bloch(&[[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(helstrom(&orth).unwrap().0, 1.0, epsilon = 1e-14);
        let same = WeightedEnsemble::equiprobable_bloch(&[[0.0, 1.0, 0.0]; 2]).unwrap();
        let (v, povm) = helstrom(&same).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            success_probability(&same, &povm).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let plus =
            WeightedEnsemble::equiprobable_bloch(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        let (v, povm) = helstrom(&plus).unwrap();
        // (ρ₀ − ρ₁)/2 has eigenvalues ±1/(2√2).
        assert_abs_diff_eq!(v, 0.5 * (1.0 + 0.5f64.sqrt()), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.853_553_390_6, epsilon = 1e-10);
        assert_abs_diff_eq!(
            success_probability(&plus, &povm).unwrap(),
            v,
            epsilon = 1e-14
        );
        assert!(helstrom(&trine()).is_err());
    }

    #[test]
    fn conditional_ensemble_examples() {
        let e = trine();
        let (sub, branch) =
            conditional_ensemble(&e, &HermitianOperator::identity(2), &[0, 2]).unwrap();
        assert_abs_diff_eq!(branch, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sub.weight(0), 0.5, epsilon = 1e-15);
        assert!(sub.states()[1].rho.distance(&e.states()[2].rho) < 1e-14);
        assert!(matches!(
            conditional_ensemble(&e, &HermitianOperator::zeros(2), &[0, 1]),
            Err(Error::DeadBranch(_))
        ));

        // |+⟩ and |0⟩ after the outcome |0⟩⟨0|: Born weights 1/2 and 1.
        let pair =
            WeightedEnsemble::equiprobable_bloch(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let ket0 = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let (sub, branch) = conditional_ensemble(&pair, &ket0, &[0, 1]).unwrap();
        assert_abs_diff_eq!(branch, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(sub.weight(0), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sub.weight(1), 2.0 / 3.0, epsilon = 1e-15);
        assert!(sub.states()[0].rho.distance(&ket0) < 1e-15);
    }

    fn helstrom_value(sub: &WeightedEnsemble) -> Result<f64> {
        helstrom(sub).map(|(v, _)| v)
    }

    #[test]
    fn recursion_examples() {
        let e = bb84();
        let absorbing = Povm::binary(HermitianOperator::identity(2)).unwrap();
        let v = recursion_value(&e, &absorbing, helstrom_value).unwrap();
        // Only states 0 and 2 (|0⟩ and |+⟩) survive, with total weight 1/2.
        let pair =
            WeightedEnsemble::equiprobable_bloch(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(v, 0.5 * helstrom(&pair).unwrap().0, epsilon = 1e-14);

        let basis4 = WeightedEnsemble::new(
            (0..4)
                .map(|k| {
                    let mut d = [0.0; 4];
                    d[k] = 1.0;
                    (0.25, HermitianOperator::from_real_diagonal(&d))
                })
                .collect(),
        )
        .unwrap();
        let split =
            Povm::binary(HermitianOperator::from_real_diagonal(&[1.0, 0.0, 1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(
            recursion_value(&basis4, &split, helstrom_value).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn recursion_matches_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let e = random::ensemble(&mut rng, 4, 2);
            let q = random::povm(&mut rng, 2, 2, 1).elements()[0].clone();
            let abc = build_abc(&e, &[0, 1, 2, 3]).unwrap();
            let expected = abc.offset + f_q(&abc.a, &abc.b, &abc.c, &q).unwrap();
            let got = recursion_value(&e, &Povm::binary(q).unwrap(), helstrom_value).unwrap();
            assert!((got - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn build_abc_examples() {
        let same = WeightedEnsemble::equiprobable_bloch(&[[0.1, 0.2, 0.3]; 3]).unwrap();
        let abc = build_abc(&same, &[0, 1, 2]).unwrap();
        assert!(abc.a.frobenius_norm() < 1e-15);
        assert!(abc.b.frobenius_norm() < 1e-15);
        assert_eq!(abc.c, HermitianOperator::zeros(2));
        assert_abs_diff_eq!(abc.offset, 1.0 / 3.0, epsilon = 1e-15);

        // Trine: A = (ρ̃₀ + ρ̃₂)/2 − ρ̃₁, B = (ρ̃₀ − ρ̃₂)/2 in Bloch form.
        let abc = build_abc(&trine(), &[0, 1, 2]).unwrap();
        let v = |t: f64| Vector3::new(t.cos(), t.sin(), 0.0);
        let (v0, v1, v2) = (v(0.0), v(2.0 * PI / 3.0), v(4.0 * PI / 3.0));
        let a = abc.a.to_bloch().unwrap();
        let b = abc.b.to_bloch().unwrap();
        assert_abs_diff_eq!(a.c, 0.0, epsilon = 1e-15);
        assert!((a.r - ((v0 + v2) / 12.0 - v1 / 6.0)).norm() < 1e-15);
        assert_abs_diff_eq!(b.c, 0.0, epsilon = 1e-15);
        assert!((b.r - (v0 - v2) / 12.0).norm() < 1e-15);

        // BB84 paired as (|0⟩, |1⟩) against (|+⟩, |−⟩).
        let abc = build_abc(&bb84(), &[0, 2, 1, 3]).unwrap();
        assert!(abc.a.frobenius_norm() < 1e-15);
        assert_abs_diff_eq!(abc.offset, 0.25, epsilon = 1e-15);
        assert!(build_abc(&bb84(), &[0, 0, 1, 3]).is_err());
    }

    #[test]
    fn f_q_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random::hermitian(&mut rng, 3);
        let b = random::hermitian(&mut rng, 3);
        let c = random::hermitian(&mut rng, 3);
        let one = HermitianOperator::identity(3);
        assert_abs_diff_eq!(
            f_q(&a, &b, &c, &one).unwrap(),
            a.trace() + b.trace_norm(),
            epsilon = 1e-12
        );
        let zero = HermitianOperator::zeros(3);
        assert_abs_diff_eq!(
            f_q(&a, &b, &c, &zero).unwrap(),
            c.trace_norm(),
            epsilon = 1e-12
        );
        assert!(matches!(
            f_q(&a, &b, &c, &one.scale(1.2)),
            Err(Error::NotSubIdentity { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        let z = HermitianOperator::zeros(2);
        let sz = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        let cf = f_closed_form(&sz, &z, &z).unwrap();
        assert_abs_diff_eq!(cf.value, 1.0, epsilon = 1e-15);
        assert!(
            cf.witness
                .distance(&HermitianOperator::from_real_diagonal(&[1.0, 0.0]))
                < 1e-15
        );

        let b = HermitianOperator::from_real_diagonal(&[0.2, 0.0]);
        let c = HermitianOperator::from_real_diagonal(&[0.0, 0.3]);
        let cf = f_closed_form(&sz, &b, &c).unwrap();
        assert_abs_diff_eq!(cf.value, 1.5, epsilon = 1e-14);
        assert_eq!(cf.family, ConditionFamily::SupportSplit);
        assert_abs_diff_eq!(f_q(&sz, &b, &c, &cf.witness).unwrap(), 1.5, epsilon = 1e-14);

        let x = HermitianOperator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            f_closed_form(&sz, &x, &sz),
            Err(Error::ConditionsNotMet)
        ));
    }

    #[test]
    fn optimal_probability_examples() {
        let opts = SearchOptions::default();
        let t = optimal_probability(&trine(), &opts).unwrap();
        assert!(
            (t.probability - 2.0 / 3.0).abs() < 1e-4,
            "{}",
            t.probability
        );

        let same = WeightedEnsemble::equiprobable_bloch(&[[0.0, 0.6, 0.8]; 3]).unwrap();
        let s = optimal_probability(&same, &opts).unwrap();
        assert_abs_diff_eq!(s.probability, 1.0 / 3.0, epsilon = 1e-12);

        let b = optimal_probability(&bb84(), &opts).unwrap();
        assert!((b.probability - 0.5).abs() < 1e-6, "{b:?}");

        let qutrits = random::ensemble(&mut ChaCha8Rng::seed_from_u64(3), 3, 3);
        match optimal_probability(&qutrits, &opts) {
            Ok(r) => assert!(matches!(r.method, Method::ClosedForm(_))),
            Err(err) => assert_eq!(err, Error::UnsupportedDimension(3)),
        }
    }

    #[test]
    fn returned_measurement_replays() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in [3, 4] {
            for _ in 0..10 {
                let e = random::ensemble(&mut rng, n, 2);
                let res = optimal_probability(&e, &SearchOptions::default()).unwrap();
                let replay =
                    success_probability_nested(&res.leaf_ensemble(&e).unwrap(), &res.measurement)
                        .unwrap();
                assert!(
                    (replay - res.probability).abs() < 1e-9,
                    "{} vs {}",
                    replay,
                    res.probability
                );
                assert!(res.measurement.check().weak_completeness_residual < 1e-9);
            }
        }
    }
}
