//! Critical parameter of the frog model on the directed `d`-ary tree and
//! the bounds it yields for related models.
//!
//! `q_c(d, c)` is the root on `(0, 1/d)` of
//!
//! ```text
//! G(q) = Σ_{k≥1} c (dq)^k ∏_{i=1}^{k-1} (1 - c q^i) = 1,
//! ```
//!
//! i.e. the `q` at which the renewal convergence rate of the branch process
//! equals `d`. Bounding the product between `1 - cq - cq²` and `1 - cq`
//! turns this into two quadratic inequalities in `d` (the "C2" bounds);
//! polynomial bounds on `√(1-x)` give explicit closed forms (the "C3"
//! bounds).
//!
//! Closed forms of the type `1 - √(1 - x)` are evaluated as
//! `x / (1 + √(1 - x))` to avoid cancellation.

use crate::distributions::HazardSpec;
use crate::error::{check_tol, Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::renewal::generating_function_with_index;
use crate::roots::bisect;

const SCAN_POINTS: usize = 64;
const MAX_BISECTIONS: usize = 200;
/// q-tolerance used when building tables.
pub const TABLE_TOL: f64 = 1e-15;

fn check_d(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("d must be at least 2, got {d}")));
    }
    Ok(())
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("c must satisfy 0 < c <= 1, got {c}")));
    }
    Ok(())
}

/// `G(q)` together with an upper bound on its truncation error.
fn survival_series_with_tail(d: u32, c: f64, q: f64, tol: f64) -> Result<(f64, f64)> {
    let spec = HazardSpec::new(c, q)?;
    let ratio = d as f64 * q;
    let (value, k) = generating_function_with_index(spec, d as f64, tol)?;
    Ok((value, c * ratio.powf(k as f64 + 1.0) / (1.0 - ratio)))
}

/// `G(q) = Σ_{k≥1} c (dq)^k ∏_{i=1}^{k-1}(1 - c q^i)`, truncated where the
/// tail bound `c (dq)^{K+1} / (1 - dq)` drops below `tol`.
pub fn survival_series(d: u32, c: f64, q: f64, tol: f64) -> Result<f64> {
    check_d(d)?;
    check_c(c)?;
    check_tol(tol)?;
    if q == 0.0 {
        return Ok(0.0);
    }
    if !(q > 0.0) {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    if d as f64 * q >= 1.0 {
        return Err(Error::Divergence(format!(
            "d*q = {} must be below 1",
            d as f64 * q
        )));
    }
    survival_series_with_tail(d, c, q, tol).map(|(v, _)| v)
}

/// Solved critical parameter with the closed-form bounds around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalResult {
    pub d: u32,
    pub c: f64,
    pub q_c: f64,
    /// Upper bound on `|G(q_c) - 1|`, truncation included.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub lower_c2: f64,
    pub upper_c2: f64,
    pub lower_c3: f64,
    /// Only defined for `d ≥ 3`.
    pub upper_c3: Option<f64>,
}

/// Solves `G(q) = 1` on `(0, 1/d)`.
///
/// A 64-point scan must show exactly one sign change of `G - 1`; the root is
/// then bisected to full double precision and must satisfy
/// `|G(q_c) - 1| < tol`.
pub fn solve_qc(d: u32, c: f64, tol: f64) -> Result<CriticalResult> {
    check_d(d)?;
    check_c(c)?;
    check_tol(tol)?;
    let series_tol = (tol * 1e-3).max(1e-16);
    let g = |q: f64| survival_series(d, c, q, series_tol).map(|v| v - 1.0);

    let width = 1.0 / d as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| (i as f64 + 0.5) / SCAN_POINTS as f64 * width)
        .collect();
    let values = grid.iter().map(|&q| g(q)).collect::<Result<Vec<_>>>()?;
    let crossings: Vec<usize> = values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].signum() != w[1].signum())
        .map(|(i, _)| i)
        .collect();
    let i = match crossings.as_slice() {
        [i] => *i,
        [] => {
            return Err(Error::Bracket(format!(
                "G(q) - 1 has no sign change on (0, 1/{d}) for c = {c}"
            )))
        }
        many => {
            return Err(Error::Bracket(format!(
                "G(q) - 1 changes sign {} times on (0, 1/{d}) for c = {c}",
                many.len()
            )))
        }
    };

    let b = bisect(g, grid[i], grid[i + 1], 0.0, MAX_BISECTIONS)?;
    let (value, tail) = survival_series_with_tail(d, c, b.root, series_tol)?;
    let residual = (value - 1.0).abs() + tail;
    if residual >= tol {
        return Err(Error::Bracket(format!(
            "bisection stalled at q = {} with residual {residual:e} not below {tol:e}",
            b.root
        )));
    }
    let (lower_c2, upper_c2) = invert_bounds_c2(d, c, TABLE_TOL)?;
    let (lower_c3, upper_c3) = explicit_bounds_c3(d, c)?;
    Ok(CriticalResult {
        d,
        c,
        q_c: b.root,
        residual,
        bracket: (b.lo, b.hi),
        lower_c2,
        upper_c2,
        lower_c3,
        upper_c3,
    })
}

fn discriminant_args(c: f64, q: f64) -> (f64, f64) {
    let x = 4.0 * q * c * c / ((c + 1.0) * (c + 1.0));
    (x, x * (q + 1.0))
}

/// Largest `q` for which both square roots in [`bounds_on_d`] are real.
pub fn bounds_domain_limit(c: f64) -> f64 {
    // q(q + 1) ≤ (c+1)²/(4c²) is the binding constraint
    let m = (c + 1.0) * (c + 1.0) / (4.0 * c * c);
    2.0 * m / (1.0 + (1.0 + 4.0 * m).sqrt())
}

/// The two bounds on `d` implied at `q_c = q` by sandwiching the product
/// term of `G`: returns `(lower_d, upper_d)` with
///
/// ```text
/// lower_d = (c+1)(1 - √(1 - 4q c²/(c+1)²)) / (2 q² c²)
/// upper_d = (c+1)(1 - √(1 - 4c² q(q+1)/(c+1)²)) / (2 c² q² (q+1))
/// ```
pub fn bounds_on_d(c: f64, q: f64) -> Result<(f64, f64)> {
    check_c(c)?;
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    let (x, y) = discriminant_args(c, q);
    if x > 1.0 || y > 1.0 {
        return Err(Error::Domain(format!(
            "negative discriminant at c = {c}, q = {q}"
        )));
    }
    let scale = 2.0 / ((c + 1.0) * q);
    Ok((
        scale / (1.0 + (1.0 - x).sqrt()),
        scale / (1.0 + (1.0 - y).sqrt()),
    ))
}

/// Inverts [`bounds_on_d`] in `q`: `q_lower` solves `lower_d(c, q) = d` and
/// `q_upper` solves `upper_d(c, q) = d`. Both expressions decrease in `q`,
/// so `q_lower ≤ q_c ≤ q_upper`.
pub fn invert_bounds_c2(d: u32, c: f64, tol: f64) -> Result<(f64, f64)> {
    check_d(d)?;
    check_c(c)?;
    check_tol(tol)?;
    let target = d as f64;
    let lo = 1e-12 / target;
    let hi = bounds_domain_limit(c).min(1.0) * (1.0 - 1e-12);
    let lower = bisect(
        |q| bounds_on_d(c, q).map(|b| b.0 - target),
        lo,
        hi,
        tol,
        MAX_BISECTIONS,
    )?;
    let upper = bisect(
        |q| bounds_on_d(c, q).map(|b| b.1 - target),
        lo,
        hi,
        tol,
        MAX_BISECTIONS,
    )?;
    Ok((lower.root, upper.root))
}

/// The explicit bounds `1/(d(c+1) - (c/(c+1))²) ≤ q_c` (all `d ≥ 2`) and
/// `q_c ≤ (F - √(F² - 224c²(c+1)²)) / (16c²)` with
/// `F = 7d(c+1)³ - 8c²` (only for `d ≥ 3`).
pub fn explicit_bounds_c3(d: u32, c: f64) -> Result<(f64, Option<f64>)> {
    check_d(d)?;
    check_c(c)?;
    let d_f = d as f64;
    let lower = 1.0 / (d_f * (c + 1.0) - (c / (c + 1.0)).powi(2));
    let upper = (d >= 3).then(|| {
        let f = 7.0 * d_f * (c + 1.0).powi(3) - 8.0 * c * c;
        let k = 224.0 * c * c * (c + 1.0) * (c + 1.0);
        // (F - √(F² - k)) / (16c²) rationalised
        k / (16.0 * c * c * (f + (f * f - k).sqrt()))
    });
    Ok((lower, upper))
}

/// Models whose critical parameters are bounded through `q_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    ConePercolation,
    OriginalFrog,
    SelfAvoidingFrog,
    Removal,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::ConePercolation => "cone",
            Model::OriginalFrog => "original",
            Model::SelfAvoidingFrog => "selfavoiding",
            Model::Removal => "removal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelBounds {
    pub model: Model,
    pub d: u32,
    pub lower: Option<f64>,
    pub upper: f64,
}

/// Bounds on the critical parameter of cone percolation with geometric
/// radius, which coincides with `q_c(d, 1)`.
pub fn cone_percolation_bounds(d: u32) -> Result<ModelBounds> {
    check_d(d)?;
    let (lower, upper) = if d == 2 {
        (
            explicit_bounds_c3(2, 1.0)?.0,
            invert_bounds_c2(2, 1.0, TABLE_TOL)?.1,
        )
    } else {
        let a = 7.0 * d as f64 - 1.0;
        // (7d-1)(1 - √(1 - 14/(7d-1)²))/2
        (
            1.0 / (2.0 * d as f64 - 0.25),
            7.0 / (a * (1.0 + (1.0 - 14.0 / (a * a)).sqrt())),
        )
    };
    Ok(ModelBounds {
        model: Model::ConePercolation,
        d,
        lower: Some(lower),
        upper,
    })
}

/// Probability `r(p)` that the original frog started at `u` visits a fixed
/// descendant `v`, per unit of distance.
pub fn r_of_p(d: u32, p: f64) -> Result<f64> {
    check_d(d)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    let d_f = d as f64;
    let disc = (d_f + 1.0).powi(2) - 4.0 * d_f * p * p;
    // (d+1 - √disc)/(2dp) rationalised
    Ok(2.0 * p / (d_f + 1.0 + disc.sqrt()))
}

/// Inverse of [`r_of_p`]: `p = (d+1) r / (1 + d r²)`.
pub fn p_of_r(d: u32, r: f64) -> Result<f64> {
    check_d(d)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0, 1), got {r}")));
    }
    let d_f = d as f64;
    let p = (d_f + 1.0) * r / (1.0 + d_f * r * r);
    if p >= 1.0 {
        return Err(Error::Range(format!("p(r = {r}) = {p} is not below 1")));
    }
    Ok(p)
}

/// Closed-form upper bound for the original frog model, `d ≥ 3`.
pub fn original_frog_closed_form(d: u32) -> f64 {
    let d = d as f64;
    let a = 7.0 * d - 1.0;
    let t = a + (a * a - 14.0).sqrt();
    // (d+1)[a - s] / (d a² - 7d + 2 - d a s) with s = √(a² - 14), rationalised
    7.0 * (d + 1.0) * t / (t * t + 49.0 * d)
}

/// Upper bound for the original frog model on the undirected tree.
pub fn original_frog_upper(d: u32) -> Result<ModelBounds> {
    check_d(d)?;
    let upper = if d == 2 {
        p_of_r(2, invert_bounds_c2(2, 1.0, TABLE_TOL)?.1)?
    } else {
        original_frog_closed_form(d)
    };
    Ok(ModelBounds {
        model: Model::OriginalFrog,
        d,
        lower: None,
        upper,
    })
}

/// Upper bound for the self-avoiding frog model: `d` times the critical
/// bound at `c = d/(d+1)`.
pub fn self_avoiding_upper(d: u32) -> Result<ModelBounds> {
    check_d(d)?;
    let c = d as f64 / (d as f64 + 1.0);
    let q = if d == 2 {
        invert_bounds_c2(2, c, TABLE_TOL)?.1
    } else {
        explicit_bounds_c3(d, c)?.1.expect("defined for d >= 3")
    };
    Ok(ModelBounds {
        model: Model::SelfAvoidingFrog,
        d,
        lower: None,
        upper: d as f64 * q,
    })
}

/// Bounds for the frog model with removal after one unsuccessful move:
/// `(d+1)` times the cone percolation bounds.
pub fn removal_bounds(d: u32) -> Result<ModelBounds> {
    let cone = cone_percolation_bounds(d)?;
    let scale = d as f64 + 1.0;
    let upper = scale * cone.upper;
    if upper >= 1.0 {
        return Err(Error::Range(format!(
            "removal upper bound {upper} is not below 1"
        )));
    }
    Ok(ModelBounds {
        model: Model::Removal,
        d,
        lower: cone.lower.map(|l| scale * l),
        upper,
    })
}

/// Earlier bounds `1/(2d) ≤ p_c^cp ≤ 1 - √(1 - 1/d)` for cone percolation.
pub fn known_cone_bounds(d: u32) -> (f64, f64) {
    let d = d as f64;
    (1.0 / (2.0 * d), (1.0 / d) / (1.0 + (1.0 - 1.0 / d).sqrt()))
}

/// Earlier upper bound `(d+1)/(2d)` for the original frog model.
pub fn known_original_upper(d: u32) -> f64 {
    (d as f64 + 1.0) / (2.0 * d as f64)
}

/// Earlier upper bound `(2d + 1 - √(4d² - 3))/2` for the self-avoiding model.
pub fn known_self_avoiding_upper(d: u32) -> f64 {
    let d = d as f64;
    // (4d+4)/(2(2d+1+√(4d²-3))) after rationalising
    (2.0 * d + 2.0) / (2.0 * d + 1.0 + (4.0 * d * d - 3.0).sqrt())
}

/// One row of the cone percolation table (`c = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeRow {
    pub d: u32,
    pub c2_lower: f64,
    pub prop_lower: f64,
    pub known_lower: f64,
    pub c2_upper: f64,
    pub prop_upper: f64,
    pub known_upper: f64,
}

impl ConeRow {
    pub fn cells(&self) -> [f64; 6] {
        [
            self.c2_lower,
            self.prop_lower,
            self.known_lower,
            self.c2_upper,
            self.prop_upper,
            self.known_upper,
        ]
    }
}

/// One row of the frog-model upper bound table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrogRow {
    pub d: u32,
    pub original_c2: f64,
    pub original_prop: f64,
    pub original_known: f64,
    pub self_avoiding_c2: f64,
    pub self_avoiding_prop: f64,
    pub self_avoiding_known: f64,
}

impl FrogRow {
    pub fn cells(&self) -> [f64; 6] {
        [
            self.original_c2,
            self.original_prop,
            self.original_known,
            self.self_avoiding_c2,
            self.self_avoiding_prop,
            self.self_avoiding_known,
        ]
    }
}

/// One row of the removal-model table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemovalRow {
    pub d: u32,
    pub c2_lower: f64,
    pub prop_lower: f64,
    pub c2_upper: f64,
    pub prop_upper: f64,
}

fn cone_row(d: u32) -> Result<ConeRow> {
    let (c2_lower, c2_upper) = invert_bounds_c2(d, 1.0, TABLE_TOL)?;
    let prop = cone_percolation_bounds(d)?;
    let (known_lower, known_upper) = known_cone_bounds(d);
    Ok(ConeRow {
        d,
        c2_lower,
        prop_lower: prop.lower.expect("cone bounds carry a lower bound"),
        known_lower,
        c2_upper,
        prop_upper: prop.upper,
        known_upper,
    })
}

fn frog_row(d: u32) -> Result<FrogRow> {
    let original_c2 = p_of_r(d, invert_bounds_c2(d, 1.0, TABLE_TOL)?.1)?;
    let c = d as f64 / (d as f64 + 1.0);
    let self_avoiding_c2 = d as f64 * invert_bounds_c2(d, c, TABLE_TOL)?.1;
    Ok(FrogRow {
        d,
        original_c2,
        original_prop: original_frog_upper(d)?.upper,
        original_known: known_original_upper(d),
        self_avoiding_c2,
        self_avoiding_prop: self_avoiding_upper(d)?.upper,
        self_avoiding_known: known_self_avoiding_upper(d),
    })
}

fn removal_row(d: u32) -> Result<RemovalRow> {
    let scale = d as f64 + 1.0;
    let (c2_lower, c2_upper) = invert_bounds_c2(d, 1.0, TABLE_TOL)?;
    let prop = removal_bounds(d)?;
    Ok(RemovalRow {
        d,
        c2_lower: scale * c2_lower,
        prop_lower: prop.lower.expect("removal bounds carry a lower bound"),
        c2_upper: scale * c2_upper,
        prop_upper: prop.upper,
    })
}

fn build_rows<R: Send>(ds: &[u32], exec: Execution, row: fn(u32) -> Result<R>) -> Result<Vec<R>> {
    map_ordered(ds, exec, |&d| row(d)).into_iter().collect()
}

/// Cone percolation bounds per `d`, in input order.
pub fn table_cone(ds: &[u32], exec: Execution) -> Result<Vec<ConeRow>> {
    build_rows(ds, exec, cone_row)
}

/// Original and self-avoiding frog upper bounds per `d`, in input order.
pub fn table_frogs(ds: &[u32], exec: Execution) -> Result<Vec<FrogRow>> {
    build_rows(ds, exec, frog_row)
}

/// Removal-model bounds per `d`, in input order.
pub fn table_removal(ds: &[u32], exec: Execution) -> Result<Vec<RemovalRow>> {
    build_rows(ds, exec, removal_row)
}
