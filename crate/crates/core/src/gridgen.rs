//! Grid generation from field values.
//!
//! The step laws convert field values into grid steps (`h = A/k` and the
//! pairwise inverse-mean form). Calibration picks the exponential decay rate
//! of the step profile so the local Péclet number drops to 1 exactly at the
//! refinement onset `xi`, and the node recursion walks that profile to build
//! a 1D boundary-layer grid.

use crate::error::{Error, Result};
use crate::kfield::{EvolutionParams, GradientHistory};
use crate::numfmt::g17;

/// Slack for Péclet-bound assertions; keeps exact-arithmetic identities from
/// failing on the last ulp.
pub const PECLET_TOL: f64 = 1e-12;

/// Absolute tolerance for the xi-on-coarse-lattice check.
pub const LATTICE_TOL: f64 = 1e-9;

/// Strictly increasing node coordinates on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl Grid1D {
    /// Build a grid from raw coordinates; `lo`/`hi` are taken from the ends.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid("grid needs at least 2 nodes"));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite node coordinate"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NodesNotIncreasing);
        }
        let lo = nodes[0];
        let hi = nodes[nodes.len() - 1];
        Ok(Self { nodes, lo, hi })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Consecutive gaps `nodes[j+1] - nodes[j]`.
    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    pub fn min_step(&self) -> f64 {
        self.steps().fold(f64::INFINITY, f64::min)
    }

    pub fn max_step(&self) -> f64 {
        self.steps().fold(0.0, f64::max)
    }

    /// Serialize as `index,x,h_next,peclet_next` CSV with 17 significant
    /// digits; the step columns are empty on the last row.
    pub fn to_csv(&self, b: f64, mu: f64) -> String {
        let mut out = String::from("index,x,h_next,peclet_next\n");
        let n = self.nodes.len();
        for (i, &x) in self.nodes.iter().enumerate() {
            if i + 1 < n {
                let h = self.nodes[i + 1] - x;
                let pe = b.abs() * h / (2.0 * mu);
                out.push_str(&format!("{i},{},{},{}\n", g17(x), g17(h), g17(pe)));
            } else {
                out.push_str(&format!("{i},{},,\n", g17(x)));
            }
        }
        out
    }

    /// Parse the CSV format written by [`Grid1D::to_csv`]. Only the `x`
    /// column is read back; steps are recomputed from the coordinates.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "index,x,h_next,peclet_next" => {}
            _ => return Err(Error::invalid("bad grid CSV header")),
        }
        let mut nodes = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let _index = cols.next();
            let x = cols
                .next()
                .ok_or_else(|| Error::invalid(format!("grid CSV row {} has no x column", lineno + 2)))?;
            let x: f64 = x.trim().parse().map_err(|_| {
                Error::invalid(format!("grid CSV row {}: bad x value '{x}'", lineno + 2))
            })?;
            nodes.push(x);
        }
        Grid1D::new(nodes)
    }
}

/// Calibrated boundary-layer profile: first step `h1`, transport `b`,
/// diffusion `mu`, refinement onset `xi`, and the decay rate `m0/S`.
///
/// [`calibrate`] is the validated constructor; the fields are public so
/// degenerate profiles (e.g. `rate = 0`) can be built directly in tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLayerSpec {
    pub h1: f64,
    pub b: f64,
    pub mu: f64,
    pub xi: f64,
    pub rate: f64,
}

/// Calibrate the decay rate from the Péclet condition:
/// `rate = ln(b h1 / (2 mu)) / xi`, imposing local Péclet 1 at `xi`.
/// Requires `h1 > 2 mu / b` so the logarithm argument exceeds 1.
pub fn calibrate(b: f64, mu: f64, h1: f64, xi: f64) -> Result<BoundaryLayerSpec> {
    for (name, v) in [("b", b), ("mu", mu), ("h1", h1), ("xi", xi)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be positive and finite")));
        }
    }
    let arg = b * h1 / (2.0 * mu);
    if arg <= 1.0 {
        return Err(Error::RefinementImpossible);
    }
    Ok(BoundaryLayerSpec {
        h1,
        b,
        mu,
        xi,
        rate: arg.ln() / xi,
    })
}

/// Step profile `h(x) = h1 * exp(-rate * x)`; equals `2 mu / b` at `x = xi`
/// for a calibrated spec.
pub fn step_profile(spec: &BoundaryLayerSpec, x: f64) -> f64 {
    spec.h1 * (-spec.rate * x).exp()
}

/// Generate the boundary-layer grid on `[lo, hi]`: uniform steps `h1` up to
/// `xi` (which must lie on that lattice and becomes a node), then the
/// recursion `x_{j+1} = x_j + h(x_j)` until the domain end, with the last
/// node clamped to `hi`.
///
/// A clamped final cell smaller than a quarter of its neighbor is merged
/// into that neighbor, unless the merged cell would break the Péclet bound
/// that holds above `xi`.
pub fn generate_boundary_layer_grid(spec: &BoundaryLayerSpec, lo: f64, hi: f64) -> Result<Grid1D> {
    if !lo.is_finite() || !hi.is_finite() || !(lo < spec.xi && spec.xi < hi) {
        return Err(Error::invalid("domain must satisfy lo < xi < hi"));
    }
    if !(spec.h1 > 0.0) {
        return Err(Error::invalid("h1 must be positive"));
    }

    let n = ((spec.xi - lo) / spec.h1).round();
    if n < 1.0 || (lo + n * spec.h1 - spec.xi).abs() > LATTICE_TOL {
        return Err(Error::XiOffLattice);
    }
    let n = n as usize;

    let mut nodes: Vec<f64> = (0..n).map(|j| lo + j as f64 * spec.h1).collect();
    nodes.push(spec.xi);

    let mut x = spec.xi;
    loop {
        let step = step_profile(spec, x);
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::invalid("step profile vanished before reaching hi"));
        }
        let next = x + step;
        if next >= hi {
            break;
        }
        if nodes.len() > 10_000_000 {
            return Err(Error::invalid("grid would exceed 10 million nodes"));
        }
        nodes.push(next);
        x = next;
    }

    // Clamp to hi; merge a sliver cell into its neighbor when safe.
    let last = nodes[nodes.len() - 1];
    if last > spec.xi && nodes.len() >= 2 {
        let prev = nodes[nodes.len() - 2];
        let final_gap = hi - last;
        let prev_gap = last - prev;
        let merged_pe = spec.b * (hi - prev) / (2.0 * spec.mu);
        if final_gap < 0.25 * prev_gap && merged_pe <= 1.0 + PECLET_TOL {
            nodes.pop();
        }
    }
    nodes.push(hi);

    Grid1D::new(nodes)
}

/// Evenly spaced grid with step `h`; the last step is shortened when `h`
/// does not divide the span.
pub fn uniform_grid(lo: f64, hi: f64, h: f64) -> Result<Grid1D> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid("non-positive step"));
    }
    if !(lo < hi) {
        return Err(Error::invalid("empty domain"));
    }
    if h > hi - lo {
        return Err(Error::invalid("step exceeds domain length"));
    }
    let n = (((hi - lo) / h) - 1e-9).ceil().max(1.0) as usize;
    let mut nodes: Vec<f64> = (0..n).map(|j| lo + j as f64 * h).collect();
    nodes.push(hi);
    Grid1D::new(nodes)
}

/// Pairwise step law: inverse of the arithmetic mean, `2A / (k_i + k_j)`.
pub fn step_between(k_i: f64, k_j: f64, a: f64) -> Result<f64> {
    if !(k_i > 0.0) || !(k_j > 0.0) || !(a > 0.0) {
        return Err(Error::invalid("non-positive input"));
    }
    Ok(2.0 * a / (k_i + k_j))
}

/// Field step law `h = A / k`.
pub fn step_field(k: f64, a: f64) -> Result<f64> {
    if !(k > 0.0) || !(a > 0.0) {
        return Err(Error::invalid("non-positive input"));
    }
    Ok(a / k)
}

/// Linearized homogeneous step `h = (A/c)(1 - m t / S)`, valid for
/// `t in [0, S/m]` when `m > 0`.
pub fn h_case2_linearized(c: f64, a: f64, m: f64, s: f64, t: f64) -> Result<f64> {
    if !(c > 0.0) || !(a > 0.0) {
        return Err(Error::invalid("non-positive input"));
    }
    if !(s > 0.0) {
        return Err(Error::NonPositiveFieldSum);
    }
    if t < 0.0 || (m > 0.0 && t > s / m) {
        return Err(Error::LinearizationWindowExceeded);
    }
    Ok(a / c * (1.0 - m * t / s))
}

/// Gradient-driven step law
/// `h = mu^2 S A / (c (mu^2 S + mu^2 m0 t + mu m1 l1 + m2 l2sq))`.
/// With zero history this reduces to `S A / (c (S + m0 t))`; with nonzero
/// history and `m2 > 0` it vanishes as `mu -> 0`.
pub fn h_case3(
    c: f64,
    a: f64,
    params: &EvolutionParams,
    hist: &GradientHistory,
) -> Result<f64> {
    if !(c > 0.0) || !(a > 0.0) {
        return Err(Error::invalid("non-positive input"));
    }
    if !(params.mu > 0.0) || !params.mu.is_finite() {
        return Err(Error::NonPositiveViscosity);
    }
    if !(params.s > 0.0) {
        return Err(Error::NonPositiveFieldSum);
    }
    let mu2 = params.mu * params.mu;
    let denom = c
        * (mu2 * params.s
            + mu2 * params.m0 * hist.t
            + params.mu * params.m1 * hist.l1
            + params.m2 * hist.l2sq);
    if !(denom > 0.0) {
        return Err(Error::StepLawOutOfRange);
    }
    Ok(mu2 * params.s * a / denom)
}

/// Local Péclet number `Pe = b h / (2 mu)`.
pub fn peclet(h: f64, b: f64, mu: f64) -> Result<f64> {
    if !(h > 0.0) || !(b > 0.0) || !(mu > 0.0) {
        return Err(Error::invalid("non-positive input"));
    }
    Ok(b * h / (2.0 * mu))
}
