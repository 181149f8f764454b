//! Closed-form evaluation of `F_Q(A, B, C)` for qubits.
//!
//! With `X = c_X·1 + r_X·σ`, every term of `F_Q` reduces to scalar and
//! vector algebra on the Bloch coefficients. For `√Q B √Q` only the norm
//! of its Bloch vector matters:
//!
//! ```text
//! r²_{√Q B √Q} = (c_Q c_B + r_Q·r_B)² + (r_B² − c_B²)(c_Q² − r_Q²)
//! ```
//!
//! and the trace norm is `2·r` when `B` is indefinite, `2·|c|` when `B` has a
//! definite sign. The `C` term is the same expression with `Q → 1 − Q` and
//! `C`'s own coefficients.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::operator::{BlochOperator, HermitianOperator, Sign};

/// Slack allowed on the `0 ≤ Q ≤ 1` constraints.
const CONSTRAINT_SLACK: f64 = 1e-12;

/// A qubit measurement operator `Q = c·1 + r·σ` with `0 ≤ Q ≤ 1`, i.e.
/// `0 ≤ c ≤ 1` and `|r| ≤ min(c, 1 − c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitQ {
    c: f64,
    r: Vector3<f64>,
}

impl QubitQ {
    pub fn new(c: f64, r: [f64; 3]) -> Result<Self> {
        Self::from_vector(c, Vector3::from(r))
    }

    pub fn from_vector(c: f64, r: Vector3<f64>) -> Result<Self> {
        if !c.is_finite() || r.iter().any(|x| !x.is_finite()) {
            return Err(Error::ConstraintViolation("non-finite coefficients".into()));
        }
        if !(-CONSTRAINT_SLACK..=1.0 + CONSTRAINT_SLACK).contains(&c) {
            return Err(Error::ConstraintViolation(format!(
                "c = {c} outside [0, 1]"
            )));
        }
        let bound = c.min(1.0 - c);
        if r.norm() > bound + CONSTRAINT_SLACK {
            return Err(Error::ConstraintViolation(format!(
                "|r| = {} exceeds min(c, 1 − c) = {bound}",
                r.norm()
            )));
        }
        Ok(Self { c, r })
    }

    /// Caller guarantees feasibility.
    pub(crate) fn new_unchecked(c: f64, r: Vector3<f64>) -> Self {
        Self { c, r }
    }

    pub fn from_operator(q: &HermitianOperator) -> Result<Self> {
        let b = q.to_bloch()?;
        Self::from_vector(b.c, b.r)
    }

    pub fn identity() -> Self {
        Self::new_unchecked(1.0, Vector3::zeros())
    }

    pub fn zero() -> Self {
        Self::new_unchecked(0.0, Vector3::zeros())
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r(&self) -> Vector3<f64> {
        self.r
    }

    pub fn radius(&self) -> f64 {
        self.r.norm()
    }

    /// `1 − Q`.
    pub fn complement(&self) -> Self {
        Self::new_unchecked(1.0 - self.c, -self.r)
    }

    pub fn to_bloch(&self) -> BlochOperator {
        BlochOperator {
            c: self.c,
            r: self.r,
        }
    }

    pub fn to_operator(&self) -> HermitianOperator {
        self.to_bloch().to_operator()
    }
}

/// Bloch coefficients `(c_√Q, |r_√Q|)` of `√Q`; `r_√Q` is parallel to `r_Q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqrtCoefficients {
    pub c: f64,
    pub r: f64,
}

pub fn sqrt_coefficients(q: &QubitQ) -> SqrtCoefficients {
    let r = q.radius();
    let hi = (q.c + r).max(0.0).sqrt();
    let lo = (q.c - r).max(0.0).sqrt();
    SqrtCoefficients {
        c: 0.5 * (hi + lo),
        r: 0.5 * (hi - lo),
    }
}

/// `√Q` in Bloch form.
pub fn sqrt_bloch(q: &QubitQ) -> BlochOperator {
    let s = sqrt_coefficients(q);
    let radius = q.radius();
    let dir = if radius > 0.0 {
        q.r / radius
    } else {
        Vector3::zeros()
    };
    BlochOperator {
        c: s.c,
        r: dir * s.r,
    }
}

/// `c_{QX} = c_Q c_X + r_Q·r_X`, half the trace of `Q X`.
fn half_trace(q_c: f64, q_r: &Vector3<f64>, x: &BlochOperator) -> f64 {
    q_c * x.c + q_r.dot(&x.r)
}

/// Squared Bloch radius of `√Q X √Q`, written through `Q`'s coefficients only.
pub fn sandwich_radius_sq(q_c: f64, q_r: &Vector3<f64>, x: &BlochOperator) -> f64 {
    let inner = half_trace(q_c, q_r, x);
    inner * inner + (x.r.norm_squared() - x.c * x.c) * (q_c * q_c - q_r.norm_squared())
}

/// Sign classes of `B` and `C`, selecting the trace-norm formula per term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignInfo {
    pub b: Sign,
    pub c: Sign,
}

impl SignInfo {
    pub fn classify(b: &BlochOperator, c: &BlochOperator) -> Self {
        Self {
            b: b.sign(),
            c: c.sign(),
        }
    }

    pub fn both_definite(&self) -> bool {
        self.b.is_definite() && self.c.is_definite()
    }
}

/// `‖√Q X √Q‖₁` from the Bloch coefficients.
fn sandwich_trace_norm(q_c: f64, q_r: &Vector3<f64>, x: &BlochOperator, sign: Sign) -> f64 {
    match sign.factor() {
        Some(s) => 2.0 * s * half_trace(q_c, q_r, x),
        None => 2.0 * sandwich_radius_sq(q_c, q_r, x).max(0.0).sqrt(),
    }
}

/// `F_Q(A, B, C)` for qubit operators. Each trace-norm term uses the
/// definite-sign or the indefinite formula according to `signs`.
pub fn f_q_bloch(
    a: &BlochOperator,
    b: &BlochOperator,
    c: &BlochOperator,
    q: &QubitQ,
    signs: SignInfo,
) -> f64 {
    let first = 2.0 * half_trace(q.c, &q.r, a);
    let second = sandwich_trace_norm(q.c, &q.r, b, signs.b);
    let third = sandwich_trace_norm(1.0 - q.c, &(-q.r), c, signs.c);
    first + second + third
}

/// Maximum of `F_Q` over `Q` when `B` and `C` both have a definite sign.
///
/// The objective is then linear in `(c_Q, r_Q)`,
/// `2(c_Q c_X + r_Q·r_X) + 2c_{|C|}` with `X = A + |B| − |C|`, so its
/// maximum sits at a vertex of the feasible double cone: `Q = 0`, `Q = 1`, or
/// the projector onto the positive eigenvector of `X`. The value is
/// `Tr[X₊] + ‖C‖₁`. Ties at `X = 0` resolve to `Q = 0`.
pub fn definite_sign_optimum(
    a: &BlochOperator,
    b: &BlochOperator,
    c: &BlochOperator,
) -> Result<(f64, QubitQ)> {
    let (sb, sc) = match (b.sign().factor(), c.sign().factor()) {
        (Some(sb), Some(sc)) => (sb, sc),
        _ => return Err(Error::NotDefiniteSign),
    };
    let abs_c = c.scale(sc);
    let x = *a + b.scale(sb) - abs_c;
    let rx = x.radius();
    let (value, q) = if x.c - rx >= 0.0 {
        if x.c > 0.0 {
            (2.0 * x.c, QubitQ::identity())
        } else {
            (0.0, QubitQ::zero())
        }
    } else if x.c + rx <= 0.0 {
        (0.0, QubitQ::zero())
    } else {
        (x.c + rx, QubitQ::new_unchecked(0.5, x.r * (0.5 / rx)))
    };
    Ok((value + 2.0 * abs_c.c, q))
}

/// Two-parameter family of candidate optima when `C = 0`: `Q` has largest
/// eigenvalue one and its Bloch vector lies in the plane of `r_A` and `r_B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedSpace {
    /// Unit vector along `r_A`, the reference for `φ_Q`.
    pub e1: Vector3<f64>,
    /// Unit vector completing the plane of `r_A` and `r_B`.
    pub e2: Vector3<f64>,
}

impl ReducedSpace {
    pub const C_RANGE: (f64, f64) = (0.5, 1.0);
    pub const PHI_RANGE: (f64, f64) = (0.0, 2.0 * PI);

    /// `Q(c_Q, φ_Q)` with `r_Q = 1 − c_Q`; `c_Q` is clamped to `[1/2, 1]`.
    pub fn q(&self, c: f64, phi: f64) -> QubitQ {
        let c = c.clamp(Self::C_RANGE.0, Self::C_RANGE.1);
        let dir = self.e1 * phi.cos() + self.e2 * phi.sin();
        QubitQ::new_unchecked(c, dir * (1.0 - c))
    }
}

fn any_orthogonal(v: &Vector3<f64>) -> Vector3<f64> {
    let trial = if v.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    (trial - v * v.dot(&trial)).normalize()
}

pub fn n3_reduced_parametrization(a: &BlochOperator, b: &BlochOperator) -> ReducedSpace {
    const TINY: f64 = 1e-14;
    let e1 = if a.radius() > TINY {
        a.r / a.radius()
    } else if b.radius() > TINY {
        b.r / b.radius()
    } else {
        Vector3::x()
    };
    let perp = b.r - e1 * e1.dot(&b.r);
    let e2 = if perp.norm() > TINY * b.radius().max(1.0) {
        perp.normalize()
    } else {
        any_orthogonal(&e1)
    };
    ReducedSpace { e1, e2 }
}
