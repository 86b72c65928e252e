//! Grid-field dynamics.
//!
//! A positive scalar field `k` lives on the grid nodes and grows by a
//! preferential-attachment rate law: the share of growth a node receives is
//! proportional to its current share of the field sum. This module provides
//! the attachment probabilities, the closed-form solutions for constant and
//! gradient-driven rate coefficients, and an explicit time stepper for
//! general rate histories.

use crate::error::{Error, Result};

/// Per-node field values `k` with their initial values `c` and a time stamp.
///
/// Invariants: all lists share one length `M >= 1`, every entry of `k` and
/// `c` is positive and finite, and a freshly constructed field (t = 0) has
/// `k = c` elementwise.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    positions: Vec<f64>,
    k: Vec<f64>,
    c: Vec<f64>,
    time: f64,
}

impl GridField {
    /// Field at t = 0: `k` starts equal to the initial values `c`.
    pub fn new(positions: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyField);
        }
        if positions.len() != c.len() {
            return Err(Error::invalid("positions and c must have the same length"));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite position"));
        }
        if c.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NonPositiveFieldValue);
        }
        Ok(Self {
            positions,
            k: c.clone(),
            c,
            time: 0.0,
        })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

/// How the field-sum denominator of the rate equation is treated during
/// explicit stepping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// Denominator stays the constant `S` from [`EvolutionParams`].
    FixedS,
    /// Denominator is recomputed from the current field each step.
    SelfConsistentS,
}

/// Scalar parameters of the constitutive law: Taylor coefficients of the
/// rate factor, the field sum `S`, and the viscosity `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub s: f64,
    pub mu: f64,
    pub s_mode: SumMode,
}

impl EvolutionParams {
    pub fn new(m0: f64, m1: f64, m2: f64, s: f64, mu: f64, s_mode: SumMode) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NonPositiveFieldSum);
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::NonPositiveViscosity);
        }
        Ok(Self {
            m0,
            m1,
            m2,
            s,
            mu,
            s_mode,
        })
    }
}

/// Accumulated gradient-magnitude history: `l1` holds the running integral
/// of `|grad u|`, `l2sq` the running integral of `|grad u|^2`, over `[0, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientHistory {
    pub l1: f64,
    pub l2sq: f64,
    pub t: f64,
}

impl GradientHistory {
    pub fn zero() -> Self {
        Self {
            l1: 0.0,
            l2sq: 0.0,
            t: 0.0,
        }
    }

    /// Validated construction. Besides nonnegativity this checks the
    /// Cauchy-Schwarz relation `l1^2 <= t * l2sq` (with a small rounding
    /// slack), which every genuine accumulation history satisfies.
    pub fn new(l1: f64, l2sq: f64, t: f64) -> Result<Self> {
        if !(l1 >= 0.0) || !(l2sq >= 0.0) || !(t >= 0.0) {
            return Err(Error::invalid("gradient history values must be nonnegative"));
        }
        if !l1.is_finite() || !l2sq.is_finite() || !t.is_finite() {
            return Err(Error::invalid("non-finite gradient history"));
        }
        if l1 * l1 > t * l2sq * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::invalid(
                "gradient history violates l1^2 <= t * l2sq",
            ));
        }
        Ok(Self { l1, l2sq, t })
    }

    /// Advance the history by one left-endpoint rectangle of width `dt` with
    /// gradient magnitude `grad_mag`.
    pub fn accumulate(&self, grad_mag: f64, dt: f64) -> Result<Self> {
        if !(grad_mag >= 0.0) || !grad_mag.is_finite() {
            return Err(Error::invalid("negative gradient magnitude"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid("non-positive dt"));
        }
        Ok(Self {
            l1: self.l1 + grad_mag * dt,
            l2sq: self.l2sq + grad_mag * grad_mag * dt,
            t: self.t + dt,
        })
    }
}

/// Attachment probabilities `k_i / sum_j k_j`, in node order.
pub fn attachment_probabilities(k: &[f64]) -> Result<Vec<f64>> {
    if k.is_empty() {
        return Err(Error::EmptyField);
    }
    let mut sum = 0.0;
    for &v in k {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveFieldValue);
        }
        sum += v;
    }
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(Error::NonPositiveFieldSum);
    }
    Ok(k.iter().map(|&v| v / sum).collect())
}

/// Closed form for a constant rate coefficient: `k_i = c_i * exp(m t / S)`.
/// `m = 0` leaves the field constant in time.
pub fn evolve_constant_m(c: &[f64], m: f64, s: f64, t: f64) -> Result<Vec<f64>> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::NonPositiveFieldSum);
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("negative time"));
    }
    if c.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveFieldValue);
    }
    let factor = (m * t / s).exp();
    Ok(c.iter().map(|&ci| ci * factor).collect())
}

/// Explicit first-order time stepping of `dk_i/dt = m_i(t) * k_i / sum_j k_j`
/// from `field.time` to `t_end`.
///
/// `m` is sampled per node at the left endpoint of each step. Under
/// [`SumMode::FixedS`] the denominator stays `params.s`; under
/// [`SumMode::SelfConsistentS`] it is recomputed from the current field each
/// step. A step that would drive any `k_i` to zero or below is rejected.
pub fn evolve_explicit<F>(
    field: &GridField,
    params: &EvolutionParams,
    mut m: F,
    t_end: f64,
    dt: f64,
) -> Result<GridField>
where
    F: FnMut(usize, f64) -> f64,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("non-positive dt"));
    }
    if !t_end.is_finite() || t_end < field.time {
        return Err(Error::invalid("t_end must not precede the field time"));
    }
    if params.s_mode == SumMode::FixedS && !(params.s > 0.0) {
        return Err(Error::NonPositiveFieldSum);
    }

    let mut k = field.k.clone();
    let mut t = field.time;
    // Sub-epsilon remainders from accumulating t are noise, not steps.
    let t_eps = 1e-12 * t_end.abs().max(1.0);
    while t < t_end - t_eps {
        let step = dt.min(t_end - t);
        let denom = match params.s_mode {
            SumMode::FixedS => params.s,
            SumMode::SelfConsistentS => k.iter().sum(),
        };
        if !(denom > 0.0) {
            return Err(Error::NonPositiveFieldSum);
        }
        for (i, ki) in k.iter_mut().enumerate() {
            *ki += step * m(i, t) * *ki / denom;
        }
        if k.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::PositivityViolated);
        }
        t += step;
    }

    Ok(GridField {
        positions: field.positions.clone(),
        k,
        c: field.c.clone(),
        time: t_end,
    })
}

fn case3_exponent(params: &EvolutionParams, hist: &GradientHistory) -> Result<f64> {
    if !(params.mu > 0.0) || !params.mu.is_finite() {
        return Err(Error::NonPositiveViscosity);
    }
    if !(params.s > 0.0) || !params.s.is_finite() {
        return Err(Error::NonPositiveFieldSum);
    }
    Ok(params.m0 * hist.t / params.s
        + params.m1 * hist.l1 / (params.mu * params.s)
        + params.m2 * hist.l2sq / (params.mu * params.mu * params.s))
}

/// Exact gradient-driven closed form:
/// `k = c * exp(m0 t / S + m1 l1 / (mu S) + m2 l2sq / (mu^2 S))`.
pub fn k_case3_exact(c: f64, params: &EvolutionParams, hist: &GradientHistory) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NonPositiveFieldValue);
    }
    Ok(c * case3_exponent(params, hist)?.exp())
}

/// First-order expansion of [`k_case3_exact`]:
/// `k = c * (1 + m0 t / S + m1 l1 / (mu S) + m2 l2sq / (mu^2 S))`.
/// Errors when the expansion leaves the positive range.
pub fn k_case3_first_order(
    c: f64,
    params: &EvolutionParams,
    hist: &GradientHistory,
) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NonPositiveFieldValue);
    }
    let factor = 1.0 + case3_exponent(params, hist)?;
    if !(factor > 0.0) {
        return Err(Error::FirstOrderExpansionInvalid);
    }
    Ok(c * factor)
}
