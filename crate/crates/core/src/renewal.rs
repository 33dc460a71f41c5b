//! Undelayed renewal sequences driven by the geometric-hazard law.
//!
//! `u_n = P(Y_n = 1)` is the probability that some partial sum of i.i.d.
//! inter-arrival times equals `n`. It satisfies the renewal equation
//! `u_0 = 1`, `u_n = Σ_{k=1}^{n} f_k u_{n-k}` and decays like `γ^{-n}`,
//! where the convergence rate `γ > 1` solves `F(γ) = Σ γ^k f_k = 1`.

use crate::distributions::{geometric_tail_index, HazardSpec};
use crate::error::{check_tol, Error, Result};
use crate::roots::bisect;

const MAX_BISECTIONS: usize = 200;
/// Consecutive ratios must stay below this for a decay to count as strict.
const SUBCRITICAL_RATIO: f64 = 1.0 - 1e-6;

/// Exact renewal probabilities `u_0..=u_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalProbs {
    values: Vec<f64>,
    spec: HazardSpec,
}

impl RenewalProbs {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spec(&self) -> HazardSpec {
        self.spec
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    /// `u_n`, or `None` past the horizon.
    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    /// Finite-horizon estimate `-ln(u_n) / n` of `ln γ`.
    pub fn log_rate_estimate(&self, n: usize) -> Option<f64> {
        match self.get(n) {
            Some(u) if n > 0 && u > 0.0 => Some(-u.ln() / n as f64),
            _ => None,
        }
    }
}

/// Renewal probabilities up to `horizon` by the convolution recursion.
pub fn renewal_probabilities(spec: HazardSpec, horizon: usize) -> RenewalProbs {
    RenewalProbs {
        values: scaled_renewal_sequence(spec, 1.0, horizon),
        spec,
    }
}

/// `v_n = scale^n u_n` for `n = 0..=horizon`, computed from the rescaled
/// recursion `v_n = Σ_k (scale^k f_k) v_{n-k}` so long horizons neither
/// underflow nor overflow.
pub fn scaled_renewal_sequence(spec: HazardSpec, scale: f64, horizon: usize) -> Vec<f64> {
    let weights: Vec<f64> = spec
        .terms()
        .take(horizon)
        .scan(1.0, |factor, t| {
            *factor *= scale;
            Some(*factor * t.pmf)
        })
        .collect();
    let mut v = Vec::with_capacity(horizon + 1);
    v.push(1.0);
    for n in 1..=horizon {
        let next = weights[..n]
            .iter()
            .zip(v.iter().rev())
            .map(|(w, u)| w * u)
            .sum();
        v.push(next);
    }
    v
}

/// `F(α) = Σ_{n≥1} α^n f_n` together with the truncation index used.
pub(crate) fn generating_function_with_index(
    spec: HazardSpec,
    alpha: f64,
    tol: f64,
) -> Result<(f64, usize)> {
    check_tol(tol)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let ratio = alpha * spec.q();
    if ratio >= 1.0 {
        return Err(Error::Divergence(format!(
            "alpha * q = {ratio} is outside the radius of convergence 1/q"
        )));
    }
    let k_max = geometric_tail_index(spec.c(), ratio, tol);
    let mut scaled = 1.0;
    let mut sum = 0.0;
    for t in spec.terms().take(k_max) {
        scaled *= ratio;
        // α^k f_k = c (αq)^k P(T ≥ k)
        sum += spec.c() * scaled * t.survival;
    }
    Ok((sum, k_max))
}

/// Evaluates `F(α)` to within `tol`, using the tail bound
/// `Σ_{n>K} c (αq)^n = c (αq)^{K+1} / (1 - αq)`.
pub fn generating_function(spec: HazardSpec, alpha: f64, tol: f64) -> Result<f64> {
    generating_function_with_index(spec, alpha, tol).map(|(f, _)| f)
}

/// Solution `γ` of `F(γ) = 1` with its certified residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub gamma: f64,
    /// Upper bound on `|F(γ) - 1|`, truncation included.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub truncation_k: usize,
}

/// The renewal convergence rate: the unique `γ ∈ (1, 1/q)` with `F(γ) = 1`.
pub fn convergence_rate(spec: HazardSpec, tol: f64) -> Result<RateResult> {
    check_tol(tol)?;
    let series_tol = (tol * 1e-3).max(1e-16);
    let f = |alpha: f64| generating_function(spec, alpha, series_tol).map(|v| v - 1.0);

    if f(1.0)? >= 0.0 {
        return Err(Error::Bracket(format!(
            "F(1) >= 1 for {spec:?}; the law is not defective"
        )));
    }
    // F blows up at the radius 1/q: walk towards it geometrically
    let radius = 1.0 / spec.q();
    let mut lo = 1.0;
    let mut hi = None;
    for j in 1..=60 {
        let alpha = radius * (1.0 - 0.5f64.powi(j));
        if alpha <= lo {
            continue;
        }
        if f(alpha)? > 0.0 {
            hi = Some(alpha);
            break;
        }
        lo = alpha;
    }
    let hi = hi.ok_or_else(|| {
        Error::Bracket(format!("F never exceeds 1 below the radius for {spec:?}"))
    })?;

    let b = bisect(f, lo, hi, 0.0, MAX_BISECTIONS)?;
    let ratio = b.root * spec.q();
    let (value, truncation_k) = generating_function_with_index(spec, b.root, series_tol)?;
    let tail = spec.c() * ratio.powf(truncation_k as f64 + 1.0) / (1.0 - ratio);
    let residual = (value - 1.0).abs() + tail;
    if residual > tol {
        return Err(Error::Bracket(format!(
            "bisection stalled at gamma = {} with residual {residual:e} above {tol:e}",
            b.root
        )));
    }
    Ok(RateResult {
        gamma: b.root,
        residual,
        bracket: (b.lo, b.hi),
        truncation_k,
    })
}

/// Finite-horizon verdict on whether `d^n u_n` grows or vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    /// Some `d^n u_n > 1` with `1 ≤ n ≤ N`.
    Supercritical,
    /// All terms stay at most 1 and the trailing quarter of the horizon
    /// decreases with every ratio at most `1 - 1e-6`.
    Subcritical,
    Indeterminate,
}

/// Classifies `(d, spec)` from `d^n u_n`, `n ≤ horizon`.
pub fn growth_classifier(d: u32, spec: HazardSpec, horizon: usize) -> Growth {
    let v = scaled_renewal_sequence(spec, d as f64, horizon);
    if v[1..].iter().any(|&x| x > 1.0) {
        return Growth::Supercritical;
    }
    let start = horizon - horizon / 4;
    if horizon >= 4
        && v[start..]
            .windows(2)
            .all(|w| w[1] <= SUBCRITICAL_RATIO * w[0])
    {
        Growth::Subcritical
    } else {
        Growth::Indeterminate
    }
}
