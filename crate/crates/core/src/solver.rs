//! Nonuniform finite differences for the 1D diffusion-transport equation
//! `-mu u'' + b u' = 0` with Dirichlet data.
//!
//! The second derivative uses the standard 3-point stencil on nonuniform
//! grids; the first derivative is upwinded (backward for `b > 0`, forward
//! for `b < 0`), which keeps the scheme monotone at any local Péclet number.

use crate::error::{Error, Result};
use crate::gridgen::Grid1D;
use crate::numfmt::g17;

/// Diffusion-transport boundary value problem on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportProblem {
    pub mu: f64,
    pub b: f64,
    pub lo: f64,
    pub hi: f64,
    pub u_lo: f64,
    pub u_hi: f64,
}

impl TransportProblem {
    pub fn new(mu: f64, b: f64, lo: f64, hi: f64, u_lo: f64, u_hi: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::NonPositiveViscosity);
        }
        if b == 0.0 || !b.is_finite() {
            return Err(Error::invalid("transport coefficient must be nonzero"));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("domain must satisfy lo < hi"));
        }
        if !u_lo.is_finite() || !u_hi.is_finite() {
            return Err(Error::invalid("non-finite boundary value"));
        }
        Ok(Self {
            mu,
            b,
            lo,
            hi,
            u_lo,
            u_hi,
        })
    }
}

/// Tridiagonal system `A x = rhs` with `sub`/`super` of length `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Nodal solution values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

/// Nodal error norms against the exact solution: the maximum absolute error
/// and the trapezoid-weighted L2 error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub linf: f64,
    pub l2w: f64,
}

// Overflow-safe weight w(x) with u = u_lo + (u_hi - u_lo) * w,
// w = (e^{r(x-lo)} - 1) / (e^{r L} - 1).
fn exact_weight(prob: &TransportProblem, x: f64) -> f64 {
    let r = prob.b / prob.mu;
    let len = prob.hi - prob.lo;
    let total = r * len;
    if total <= 700.0 {
        // expm1 keeps the small-|r| limit (the linear profile) exact
        f64::exp_m1(r * (x - prob.lo)) / f64::exp_m1(total)
    } else {
        // dominant transport: shift exponents so nothing overflows
        ((r * (x - prob.hi)).exp() - (-total).exp()) / (1.0 - (-total).exp())
    }
}

/// Exact solution of the BVP at `x`, computed in an overflow-safe
/// rearrangement for large `b/mu`.
pub fn exact_solution(prob: &TransportProblem, x: f64) -> Result<f64> {
    if !(prob.lo <= x && x <= prob.hi) {
        return Err(Error::invalid("x outside domain"));
    }
    Ok(prob.u_lo + (prob.u_hi - prob.u_lo) * exact_weight(prob, x))
}

/// Dominant-transport boundary-layer approximation `u = exp((b/mu)(x - hi))`.
/// Meaningful for `mu << b`; not exact at the inflow boundary.
pub fn boundary_layer_approx(prob: &TransportProblem, x: f64) -> f64 {
    (prob.b / prob.mu * (x - prob.hi)).exp()
}

/// Assemble the upwind finite-difference system for `prob` on `grid`.
/// Boundary rows encode the Dirichlet data directly.
pub fn assemble(prob: &TransportProblem, grid: &Grid1D) -> Result<TridiagonalSystem> {
    let nodes = grid.nodes();
    let n = nodes.len();
    if n < 3 {
        return Err(Error::NoInteriorNodes);
    }

    let mut sub = vec![0.0; n - 1];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n - 1];
    let mut rhs = vec![0.0; n];

    diag[0] = 1.0;
    rhs[0] = prob.u_lo;
    diag[n - 1] = 1.0;
    rhs[n - 1] = prob.u_hi;

    for i in 1..n - 1 {
        let hm = nodes[i] - nodes[i - 1];
        let hp = nodes[i + 1] - nodes[i];
        // -mu u'' with the 3-point nonuniform stencil
        let mut a_sub = -2.0 * prob.mu / (hm * (hm + hp));
        let mut a_diag = 2.0 * prob.mu / (hm * hp);
        let mut a_sup = -2.0 * prob.mu / (hp * (hm + hp));
        // b u' decentered from the inflow side
        if prob.b > 0.0 {
            a_sub += -prob.b / hm;
            a_diag += prob.b / hm;
        } else {
            a_diag += -prob.b / hp;
            a_sup += prob.b / hp;
        }
        sub[i - 1] = a_sub;
        diag[i] = a_diag;
        sup[i] = a_sup;
        rhs[i] = 0.0;
    }

    Ok(TridiagonalSystem {
        sub,
        diag,
        sup,
        rhs,
    })
}

/// Thomas sweep: forward elimination and back substitution, no pivoting.
/// The upwind matrix is diagonally dominant, so a vanishing pivot signals a
/// system this solver is not meant for.
pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = sys.diag.len();
    if n == 0 {
        return Err(Error::invalid("empty system"));
    }
    if sys.sub.len() + 1 != n || sys.sup.len() + 1 != n || sys.rhs.len() != n {
        return Err(Error::invalid("inconsistent tridiagonal lengths"));
    }

    let mut c = vec![0.0; n]; // eliminated super-diagonal
    let mut x = vec![0.0; n]; // eliminated rhs, then the solution

    let mut pivot = sys.diag[0];
    if pivot.abs() < 1e-300 {
        return Err(Error::SingularSystem);
    }
    if n > 1 {
        c[0] = sys.sup[0] / pivot;
    }
    x[0] = sys.rhs[0] / pivot;

    for i in 1..n {
        pivot = sys.diag[i] - sys.sub[i - 1] * c[i - 1];
        if pivot.abs() < 1e-300 {
            return Err(Error::SingularSystem);
        }
        if i + 1 < n {
            c[i] = sys.sup[i] / pivot;
        }
        x[i] = (sys.rhs[i] - sys.sub[i - 1] * x[i - 1]) / pivot;
    }

    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Assemble and solve `prob` on `grid`.
pub fn solve(prob: &TransportProblem, grid: &Grid1D) -> Result<Solution> {
    let sys = assemble(prob, grid)?;
    let values = solve_tridiagonal(&sys)?;
    Ok(Solution {
        grid: grid.clone(),
        values,
    })
}

/// Nodal error norms of `sol` against the exact solution of `prob`.
pub fn error_norms(sol: &Solution, prob: &TransportProblem) -> ErrorNorms {
    let nodes = sol.grid.nodes();
    let n = nodes.len();
    let mut linf = 0.0_f64;
    let mut l2 = 0.0_f64;
    for (i, (&x, &u)) in nodes.iter().zip(&sol.values).enumerate() {
        let e = (u - (prob.u_lo + (prob.u_hi - prob.u_lo) * exact_weight(prob, x))).abs();
        linf = linf.max(e);
        // trapezoid weight of node i
        let w = match i {
            0 => (nodes[1] - nodes[0]) / 2.0,
            _ if i == n - 1 => (nodes[n - 1] - nodes[n - 2]) / 2.0,
            _ => (nodes[i + 1] - nodes[i - 1]) / 2.0,
        };
        l2 += w * e * e;
    }
    ErrorNorms {
        linf,
        l2w: l2.sqrt(),
    }
}

impl Solution {
    /// Serialize as `x,u_numeric,u_exact,abs_err` CSV, 17 significant digits.
    pub fn to_csv(&self, prob: &TransportProblem) -> String {
        let mut out = String::from("x,u_numeric,u_exact,abs_err\n");
        for (&x, &u) in self.grid.nodes().iter().zip(&self.values) {
            let ue = prob.u_lo + (prob.u_hi - prob.u_lo) * exact_weight(prob, x);
            out.push_str(&format!(
                "{},{},{},{}\n",
                g17(x),
                g17(u),
                g17(ue),
                g17((u - ue).abs())
            ));
        }
        out
    }
}
