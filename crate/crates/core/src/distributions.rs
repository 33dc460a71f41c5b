//! The defective inter-arrival law with geometric hazard.
//!
//! An inter-arrival time `T` taking values in `{1, 2, ...} ∪ {∞}` has hazard
//! `h_k = P(T = k | T ≥ k) = c q^k`. Its mass function is
//! `f_k = c q^k ∏_{i=1}^{k-1} (1 - c q^i)` and it puts positive mass
//! `∏_{i≥1} (1 - c q^i)` on `T = ∞`.
//!
//! Infinite products and series are truncated at an index derived from the
//! caller's tolerance using geometric majorants (`f_k ≤ c q^k`).

use crate::error::{check_tol, Error, Result};

/// Above this ratio products are accumulated as sums of `ln(1 - ·)`.
const LOG_PRODUCT_THRESHOLD: f64 = 0.9;

/// Parameters `(c, q)` of the hazard `h_k = c q^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardSpec {
    c: f64,
    q: f64,
}

impl HazardSpec {
    /// Requires `0 < c ≤ 1` and `0 < q < 1`.
    pub fn new(c: f64, q: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::Domain(format!("c must satisfy 0 < c <= 1, got {c}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("q must satisfy 0 < q < 1, got {q}")));
        }
        Ok(Self { c, q })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `h_k = c q^k`.
    pub fn hazard(&self, k: u32) -> f64 {
        self.c * self.q.powi(k as i32)
    }

    /// Lazily yields `(k, f_k, P(T ≥ k))` for `k = 1, 2, ...`.
    pub fn terms(&self) -> Terms {
        Terms {
            c: self.c,
            q: self.q,
            k: 0,
            power: 1.0,
            acc: if self.q > LOG_PRODUCT_THRESHOLD {
                0.0
            } else {
                1.0
            },
            log_mode: self.q > LOG_PRODUCT_THRESHOLD,
        }
    }
}

/// Iterator over the mass function and survival function of a [`HazardSpec`].
#[derive(Debug, Clone)]
pub struct Terms {
    c: f64,
    q: f64,
    k: u32,
    // q^k for the term about to be produced
    power: f64,
    // ∏_{i=1}^{k-1}(1 - c q^i), or its logarithm in log mode
    acc: f64,
    log_mode: bool,
}

/// One term of the inter-arrival law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub k: u32,
    /// `q^k`
    pub power: f64,
    /// `f_k = P(T = k)`
    pub pmf: f64,
    /// `P(T ≥ k)`
    pub survival: f64,
}

impl Iterator for Terms {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        self.k = self.k.checked_add(1)?;
        self.power *= self.q;
        let survival = if self.log_mode {
            self.acc.exp()
        } else {
            self.acc
        };
        let hazard = self.c * self.power;
        if self.log_mode {
            self.acc += (-hazard).ln_1p();
        } else {
            self.acc *= 1.0 - hazard;
        }
        Some(Term {
            k: self.k,
            power: self.power,
            pmf: hazard * survival,
            survival,
        })
    }
}

/// Parameters `(d, c, q)` of the frog model on the directed `d`-ary tree,
/// where an activated particle survives at least `n` steps with probability
/// `c (dq)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    d: u32,
    c: f64,
    q: f64,
}

impl TreeParams {
    /// Requires `d ≥ 2`, `0 < c ≤ 1`, `0 < q < 1`, `dq ≤ 1` and `cdq < 1`.
    pub fn new(d: u32, c: f64, q: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("d must be at least 2, got {d}")));
        }
        HazardSpec::new(c, q)?;
        let dq = d as f64 * q;
        if dq > 1.0 {
            return Err(Error::Domain(format!("d*q must not exceed 1, got {dq}")));
        }
        if c * dq >= 1.0 {
            return Err(Error::Domain(format!(
                "c*d*q must be below 1, got {}",
                c * dq
            )));
        }
        Ok(Self { d, c, q })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Per-step continuation probability `dq` of the lifetime.
    pub fn continuation(&self) -> f64 {
        self.d as f64 * self.q
    }

    /// The inter-arrival law seen along one branch of the tree.
    pub fn branch_spec(&self) -> HazardSpec {
        HazardSpec {
            c: self.c,
            q: self.q,
        }
    }
}

/// Smallest `K` such that `scale · ratio^{K+1} / (1 - ratio) < tol`,
/// the tail of a geometric series started after index `K`.
pub(crate) fn geometric_tail_index(scale: f64, ratio: f64, tol: f64) -> usize {
    debug_assert!(ratio > 0.0 && ratio < 1.0);
    let target = tol * (1.0 - ratio) / scale;
    if target >= ratio {
        return 0;
    }
    let k = (target.ln() / ratio.ln()).ceil() - 1.0;
    let mut k = k.max(0.0) as usize;
    // guard against rounding in the logarithms
    while scale * ratio.powf(k as f64 + 1.0) / (1.0 - ratio) >= tol {
        k += 1;
    }
    k
}

/// The q-Pochhammer symbol `(a; x)_k = ∏_{i=0}^{k-1} (1 - a x^i)`.
pub fn pochhammer(a: f64, x: f64, k: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Domain(format!(
            "pochhammer needs 0 <= a < 1, got a = {a}"
        )));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "pochhammer needs 0 <= x < 1, got x = {x}"
        )));
    }
    let factors = (0..k).scan(a, |term, _| {
        let t = *term;
        *term *= x;
        Some(t)
    });
    Ok(if x > LOG_PRODUCT_THRESHOLD {
        factors.map(|t| (-t).ln_1p()).sum::<f64>().exp()
    } else {
        factors.map(|t| 1.0 - t).product()
    })
}

/// `f_k = P(T = k)`; zero for `k = 0`.
pub fn interarrival_pmf(spec: HazardSpec, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    spec.hazard(k) * interarrival_survival(spec, k)
}

/// `P(T ≥ n) = ∏_{i=1}^{n-1} (1 - c q^i)`; equals 1 for `n ≤ 1`.
pub fn interarrival_survival(spec: HazardSpec, n: u32) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    pochhammer(spec.c * spec.q, spec.q, n - 1).expect("cq and q lie in [0, 1)")
}

/// Number of factors of `∏_{i≥1}(1 - c q^i)` needed for the logarithm of the
/// omitted tail to be below `tol`.
fn defect_truncation(spec: HazardSpec, tol: f64) -> u32 {
    let (c, q) = (spec.c, spec.q);
    let mut k = 0u32;
    loop {
        let next = c * q.powi(k as i32 + 1);
        let bound = next / ((1.0 - q) * (1.0 - next));
        if bound < tol {
            return k;
        }
        k += 1;
    }
}

/// The defect `f_∞ = P(T = ∞) = ∏_{i≥1} (1 - c q^i)`, truncated where the
/// tail bound `c q^{K+1} / ((1-q)(1 - c q^{K+1}))` on its logarithm drops
/// below `tol`.
pub fn defect_mass(spec: HazardSpec, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let k = defect_truncation(spec, tol);
    Ok(interarrival_survival(spec, k + 1))
}
