//! POVMs and their nested binary decomposition.
//!
//! A nested POVM of depth `u_F` is a binary tree of conditional two-outcome
//! measurements. The node reached after the outcomes `k_1, …, k_{u−1}`
//! holds the pair `(B^(u)_{k,0}, B^(u)_{k,1})`, and the leaf `k_1 … k_{u_F}`
//! recomposes to
//!
//! ```text
//! F_k = |√B^(u_F)_{k_1…k_{u_F}} ⋯ √B^(1)_{k_1}|²
//! ```
//!
//! Leaves map to flat outcome indices by `j = Σ_u 2^{u−1} k_u`, so `k_1` is
//! the least significant bit.
//!
//! Node pairs only need to be complete on the support of their parent
//! operator ("weak completeness"); [`decompose`] produces exactly that and
//! never pads the complement of the support.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, C64};
use crate::tol;

/// Outcome of a POVM validity check.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmReport {
    pub outcomes: usize,
    pub dim: usize,
    /// `max(0, −λ_min)` over all elements.
    pub max_psd_violation: f64,
    /// `‖Σ E_j − 1‖_F`.
    pub completeness_residual: f64,
    pub passed: bool,
    pub reason: Option<String>,
}

/// Checks positivity and completeness. Never fails; inspect `passed`.
pub fn validate(elements: &[HermitianOperator]) -> PovmReport {
    let dim = elements.first().map_or(0, |e| e.dim());
    let mut report = PovmReport {
        outcomes: elements.len(),
        dim,
        max_psd_violation: 0.0,
        completeness_residual: f64::INFINITY,
        passed: false,
        reason: None,
    };
    if elements.len() < 2 {
        report.reason = Some(format!(
            "a POVM needs at least 2 outcomes, got {}",
            elements.len()
        ));
        return report;
    }
    if elements.iter().any(|e| e.dim() != dim) {
        report.reason = Some("elements have different dimensions".into());
        return report;
    }
    let mut sum = HermitianOperator::zeros(dim);
    for e in elements {
        report.max_psd_violation = report.max_psd_violation.max(-e.eigendecompose().min());
        sum = &sum + e;
    }
    report.completeness_residual = sum.distance(&HermitianOperator::identity(dim));
    if report.max_psd_violation > tol::PSD {
        report.reason = Some(format!(
            "element has negative eigenvalue {:.3e}",
            -report.max_psd_violation
        ));
    } else if report.completeness_residual > tol::COMPLETENESS {
        report.reason = Some(format!(
            "elements sum to identity only within {:.3e}",
            report.completeness_residual
        ));
    } else {
        report.passed = true;
    }
    report
}

/// A validated POVM with at least two outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let report = validate(&elements);
        if !report.passed {
            return Err(Error::InvalidPovm(report.reason.unwrap_or_default()));
        }
        Ok(Self { elements })
    }

    /// Binary POVM `{Q, 1 − Q}`.
    pub fn binary(q: HermitianOperator) -> Result<Self> {
        let rest = q.complement();
        Self::new(vec![q, rest])
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Appends null elements up to `n` outcomes.
    pub fn padded(&self, n: usize) -> Self {
        let mut elements = self.elements.clone();
        while elements.len() < n {
            elements.push(HermitianOperator::zeros(self.dim()));
        }
        Self { elements }
    }
}

/// Number of binary steps needed for `n` outcomes, `⌈log₂ n⌉`.
pub fn depth_for(n: usize) -> usize {
    assert!(n >= 2, "need at least two outcomes");
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// A string of measurement outcomes `k_1 k_2 …`, possibly empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPath(Vec<bool>);

impl BitPath {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The first `len` outcomes of flat index `index`.
    pub fn from_index(index: usize, len: usize) -> Self {
        Self((0..len).map(|u| (index >> u) & 1 == 1).collect())
    }

    /// `Σ_u 2^{u−1} k_u`.
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .map(|(u, &k)| (k as usize) << u)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.0.clone();
        bits.push(bit);
        Self(bits)
    }
}

impl fmt::Display for BitPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &k in &self.0 {
            f.write_str(if k { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "invalid bit '{other}' in path \"{s}\""
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// One conditional binary measurement `(B_0, B_1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryNode {
    pub b0: HermitianOperator,
    pub b1: HermitianOperator,
}

impl BinaryNode {
    pub fn outcome(&self, bit: bool) -> &HermitianOperator {
        if bit {
            &self.b1
        } else {
            &self.b0
        }
    }
}

/// Diagnostics from [`NestedPovm::check`].
#[derive(Clone, Debug, PartialEq)]
pub struct NestedReport {
    pub max_psd_violation: f64,
    /// Largest `‖B_0 + B_1 − 1_parent‖_F` over all nodes.
    pub weak_completeness_residual: f64,
}

/// Binary tree of conditional two-outcome measurements.
///
/// `levels[u − 1][p]` is the node applied at step `u` after the outcome
/// prefix with index `p` (see [`BitPath::index`]).
#[derive(Clone, Debug, PartialEq)]
pub struct NestedPovm {
    levels: Vec<Vec<BinaryNode>>,
}

impl NestedPovm {
    /// Builds and validates a tree from `(path, B_0, B_1)` triples. Every
    /// path of length `0..depth` must appear exactly once.
    pub fn new(
        depth: usize,
        nodes: impl IntoIterator<Item = (BitPath, HermitianOperator, HermitianOperator)>,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidNestedPovm("depth must be at least 1".into()));
        }
        if depth > 16 {
            return Err(Error::InvalidNestedPovm(format!(
                "depth {depth} is too large"
            )));
        }
        let mut slots: Vec<Vec<Option<BinaryNode>>> =
            (0..depth).map(|u| vec![None; 1 << u]).collect();
        for (path, b0, b1) in nodes {
            if path.len() >= depth {
                return Err(Error::InvalidNestedPovm(format!(
                    "path \"{path}\" is too long for depth {depth}"
                )));
            }
            let slot = &mut slots[path.len()][path.index()];
            if slot.is_some() {
                return Err(Error::InvalidNestedPovm(format!(
                    "duplicate node \"{path}\""
                )));
            }
            *slot = Some(BinaryNode { b0, b1 });
        }
        let mut levels = Vec::with_capacity(depth);
        for (u, level) in slots.into_iter().enumerate() {
            let mut out = Vec::with_capacity(level.len());
            for (p, node) in level.into_iter().enumerate() {
                match node {
                    Some(n) => out.push(n),
                    None => {
                        return Err(Error::InvalidNestedPovm(format!(
                            "missing node \"{}\"",
                            BitPath::from_index(p, u)
                        )))
                    }
                }
            }
            levels.push(out);
        }
        let tree = Self { levels };
        tree.validated()
    }

    pub(crate) fn from_levels(levels: Vec<Vec<BinaryNode>>) -> Self {
        Self { levels }
    }

    fn validated(self) -> Result<Self> {
        let dim = self.dim();
        for level in &self.levels {
            for node in level {
                if node.b0.dim() != dim || node.b1.dim() != dim {
                    return Err(Error::InvalidNestedPovm("node dimensions differ".into()));
                }
            }
        }
        let report = self.check();
        if report.max_psd_violation > tol::PSD {
            return Err(Error::InvalidNestedPovm(format!(
                "node operator has negative eigenvalue {:.3e}",
                -report.max_psd_violation
            )));
        }
        if report.weak_completeness_residual > tol::COMPLETENESS {
            return Err(Error::InvalidNestedPovm(format!(
                "weak completeness violated by {:.3e}",
                report.weak_completeness_residual
            )));
        }
        Ok(self)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn dim(&self) -> usize {
        self.levels[0][0].b0.dim()
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.depth()
    }

    /// Node reached after the outcomes in `path`.
    pub fn node(&self, path: &BitPath) -> Option<&BinaryNode> {
        self.levels.get(path.len())?.get(path.index())
    }

    /// All nodes in level order, each with its prefix path.
    pub fn nodes(&self) -> impl Iterator<Item = (BitPath, &BinaryNode)> {
        self.levels.iter().enumerate().flat_map(|(u, level)| {
            level
                .iter()
                .enumerate()
                .map(move |(p, node)| (BitPath::from_index(p, u), node))
        })
    }

    /// `B^(u)_{k_1…k_u}` for a non-empty path of length `u`.
    pub fn element(&self, path: &BitPath) -> Option<&HermitianOperator> {
        let (&last, prefix) = path.bits().split_last()?;
        let node = self.node(&BitPath::new(prefix.to_vec()))?;
        Some(node.outcome(last))
    }

    /// The operators met on the way to leaf `j`: `B^(1)_{k_1}, …, B^(u_F)_{k}`.
    pub fn chain(&self, leaf: usize) -> Vec<&HermitianOperator> {
        (0..self.depth())
            .map(|u| {
                let node = &self.levels[u][leaf & ((1 << u) - 1)];
                node.outcome((leaf >> u) & 1 == 1)
            })
            .collect()
    }

    /// `M = √B^(u_F) ⋯ √B^(1)` along leaf `j`, so that `F_j = M†M`.
    pub fn leaf_map(&self, leaf: usize) -> Result<DMatrix<C64>> {
        let mut m = DMatrix::<C64>::identity(self.dim(), self.dim());
        for b in self.chain(leaf) {
            m = b.sqrt()?.matrix() * m;
        }
        Ok(m)
    }

    /// Positivity and weak completeness residuals over all nodes.
    pub fn check(&self) -> NestedReport {
        let dim = self.dim();
        let mut report = NestedReport {
            max_psd_violation: 0.0,
            weak_completeness_residual: 0.0,
        };
        for (path, node) in self.nodes() {
            for b in [&node.b0, &node.b1] {
                report.max_psd_violation = report.max_psd_violation.max(-b.eigendecompose().min());
            }
            let parent_support = match self.element(&path) {
                Some(parent) => parent.support_projector(),
                None => HermitianOperator::identity(dim),
            };
            let residual = (&node.b0 + &node.b1).distance(&parent_support);
            report.weak_completeness_residual = report.weak_completeness_residual.max(residual);
        }
        report
    }
}

/// Rewrites `p` as a nested binary POVM of depth `⌈log₂ N⌉`, padding with
/// null elements when `N` is not a power of two.
pub fn decompose(p: &Povm) -> Result<NestedPovm> {
    let report = validate(p.elements());
    if !report.passed {
        return Err(Error::InvalidPovm(report.reason.unwrap_or_default()));
    }
    let depth = depth_for(p.len());
    let padded = p.padded(1 << depth);
    let dim = p.dim();
    let elements = padded.elements();

    // whitening[p] = (√B^(u−1)_p)⁺ ⋯ (√B^(1)_{k_1})⁺ for the prefix with index p.
    let mut whitening = vec![DMatrix::<C64>::identity(dim, dim)];
    let mut levels = Vec::with_capacity(depth);
    for u in 1..=depth {
        let half = 1 << (u - 1);
        let mask = (1 << u) - 1;
        let mut nodes = Vec::with_capacity(half);
        let mut next = vec![DMatrix::<C64>::zeros(dim, dim); 1 << u];
        for (prefix, w) in whitening.iter().enumerate() {
            let mut pair = Vec::with_capacity(2);
            for bit in 0..2 {
                let child = prefix + bit * half;
                let mut sum = HermitianOperator::zeros(dim);
                for (j, e) in elements.iter().enumerate() {
                    if j & mask == child {
                        sum = &sum + e;
                    }
                }
                let b = sum.conjugate_by(w);
                if u < depth {
                    next[child] = b.pseudo_inverse_sqrt()?.matrix() * w;
                }
                pair.push(b);
            }
            let b1 = pair.pop().expect("two outcomes");
            let b0 = pair.pop().expect("two outcomes");
            nodes.push(BinaryNode { b0, b1 });
        }
        levels.push(nodes);
        whitening = next;
    }
    Ok(NestedPovm::from_levels(levels))
}

/// Flattens a nested POVM into its `2^{u_F}` leaf elements `F_j = M_j† M_j`.
pub fn recompose(n: &NestedPovm) -> Result<Povm> {
    let n = n.clone().validated()?;
    let elements = (0..n.leaf_count())
        .map(|leaf| {
            let m = n.leaf_map(leaf)?;
            Ok(HermitianOperator::from_raw(m.adjoint() * m))
        })
        .collect::<Result<Vec<_>>>()?;
    Povm::new(elements).map_err(|e| Error::InvalidNestedPovm(e.to_string()))
}

/// Applies the binary outcome `B` to an unnormalized state, returning
/// `√B ρ √B` and its trace.
pub fn apply_binary(
    state: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<(HermitianOperator, f64)> {
    if state.dim() != b.dim() {
        return Err(Error::SizeMismatch(format!(
            "state has dimension {}, operator {}",
            state.dim(),
            b.dim()
        )));
    }
    state.check_psd()?;
    b.check_effect()?;
    let post = b.sqrt()?.sandwich(state);
    let prob = post.trace();
    Ok((post, prob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn trine() -> Vec<HermitianOperator> {
        (0..3)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
                // |ψ⟩ = cos(t/2)|0⟩ + sin(t/2)|1⟩, Bloch vector in the x-z plane.
                let v = DVector::from_vec(vec![
                    C64::new((t / 2.0).cos(), 0.0),
                    C64::new((t / 2.0).sin(), 0.0),
                ]);
                HermitianOperator::projector(&v).scale(2.0 / 3.0)
            })
            .collect()
    }

    fn basis(dim: usize) -> Vec<HermitianOperator> {
        (0..dim)
            .map(|k| {
                let mut d = vec![0.0; dim];
                d[k] = 1.0;
                HermitianOperator::from_real_diagonal(&d)
            })
            .collect()
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&basis(2)).passed);
        let single = validate(&[HermitianOperator::identity(2)]);
        assert!(!single.passed);
        assert!(single.reason.unwrap().contains("at least 2"));
        let t = validate(&trine());
        assert!(t.passed, "{t:?}");
        assert!(t.completeness_residual < 1e-14);
        let bad = validate(&[
            HermitianOperator::from_real_diagonal(&[1.2, 0.0]),
            HermitianOperator::from_real_diagonal(&[-0.2, 1.0]),
        ]);
        assert!(!bad.passed);
        assert_abs_diff_eq!(bad.max_psd_violation, 0.2, epsilon = 1e-14);
    }

    #[test]
    fn depth_is_ceil_log2() {
        assert_eq!(depth_for(2), 1);
        assert_eq!(depth_for(3), 2);
        assert_eq!(depth_for(4), 2);
        assert_eq!(depth_for(5), 3);
        assert_eq!(depth_for(8), 3);
    }

    #[test]
    fn bit_path_round_trip() {
        let p: BitPath = "011".parse().unwrap();
        assert_eq!(p.index(), 0b110);
        assert_eq!(BitPath::from_index(6, 3), p);
        assert_eq!(p.to_string(), "011");
        assert_eq!(BitPath::empty().to_string(), "");
        assert!("012".parse::<BitPath>().is_err());
    }

    #[test]
    fn binary_povm_is_its_own_tree() {
        let q = HermitianOperator::from_real_rows(2, &[0.7, 0.1, 0.1, 0.2]).unwrap();
        let p = Povm::binary(q.clone()).unwrap();
        let tree = decompose(&p).unwrap();
        assert_eq!(tree.depth(), 1);
        let root = tree.node(&BitPath::empty()).unwrap();
        assert!(root.b0.distance(&q) < 1e-15);
        assert!(root.b1.distance(&q.complement()) < 1e-15);
        let back = recompose(&tree).unwrap();
        assert!(back.elements()[0].distance(&q) < 1e-12);
    }

    #[test]
    fn basis_measurement_first_step_groups_by_lowest_bit() {
        let tree = decompose(&Povm::new(basis(4)).unwrap()).unwrap();
        assert_eq!(tree.depth(), 2);
        let root = tree.node(&BitPath::empty()).unwrap();
        // k_1 = 0 collects outcomes j = 0 and j = 2.
        assert!(
            root.b0.distance(&HermitianOperator::from_real_diagonal(&[
                1.0, 0.0, 1.0, 0.0
            ])) < 1e-14
        );
        assert!(
            root.b1.distance(&HermitianOperator::from_real_diagonal(&[
                0.0, 1.0, 0.0, 1.0
            ])) < 1e-14
        );
        let back = recompose(&tree).unwrap();
        for (f, e) in back.elements().iter().zip(basis(4)) {
            assert!(f.distance(&e) < 1e-12);
        }
    }

    #[test]
    fn trine_pads_to_four_with_null_leaf() {
        let tree = decompose(&Povm::new(trine()).unwrap()).unwrap();
        assert_eq!(tree.depth(), 2);
        let back = recompose(&tree).unwrap();
        assert_eq!(back.len(), 4);
        for (f, e) in back.elements().iter().zip(trine()) {
            assert!(f.distance(&e) < 1e-10);
        }
        assert!(back.elements()[3].frobenius_norm() < 1e-12);
        assert!(tree.check().weak_completeness_residual < 1e-10);
    }

    #[test]
    fn absorbing_second_step() {
        let q = HermitianOperator::from_real_rows(2, &[0.6, 0.2, 0.2, 0.3]).unwrap();
        let id = HermitianOperator::identity(2);
        let zero = HermitianOperator::zeros(2);
        let tree = NestedPovm::new(
            2,
            vec![
                (BitPath::empty(), q.clone(), q.complement()),
                ("0".parse().unwrap(), id.clone(), zero.clone()),
                ("1".parse().unwrap(), zero.clone(), id.clone()),
            ],
        )
        .unwrap();
        let flat = recompose(&tree).unwrap();
        assert!(flat.elements()[0].distance(&q) < 1e-12);
        assert!(flat.elements()[1].frobenius_norm() < 1e-12);
        assert!(flat.elements()[2].frobenius_norm() < 1e-12);
        assert!(flat.elements()[3].distance(&q.complement()) < 1e-12);
    }

    #[test]
    fn rejects_broken_trees() {
        let id = HermitianOperator::identity(2);
        let half = id.scale(0.5);
        let missing = NestedPovm::new(2, vec![(BitPath::empty(), half.clone(), half.clone())]);
        assert!(matches!(missing, Err(Error::InvalidNestedPovm(_))));
        let incomplete =
            NestedPovm::new(1, vec![(BitPath::empty(), half.clone(), half.scale(0.5))]);
        assert!(matches!(incomplete, Err(Error::InvalidNestedPovm(_))));
    }

    #[test]
    fn apply_binary_examples() {
        let mixed = HermitianOperator::identity(2).scale(0.5);
        let (post, p) = apply_binary(&mixed, &HermitianOperator::identity(2)).unwrap();
        assert!(post.distance(&mixed) < 1e-15);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
        let (post, p) = apply_binary(&mixed, &HermitianOperator::zeros(2)).unwrap();
        assert_eq!(post.frobenius_norm(), 0.0);
        assert_eq!(p, 0.0);
        let ket0 = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let (post, p) = apply_binary(&mixed, &ket0).unwrap();
        assert!(post.distance(&ket0.scale(0.5)) < 1e-15);
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        let too_big = HermitianOperator::identity(2).scale(1.5);
        assert!(matches!(
            apply_binary(&mixed, &too_big),
            Err(Error::NotSubIdentity { .. })
        ));
    }
}
