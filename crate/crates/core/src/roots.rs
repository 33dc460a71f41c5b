use crate::error::{Error, Result};

/// Outcome of a bracketed bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bisection {
    /// Whichever final bracket end has the smaller |f|.
    pub root: f64,
    pub f_root: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Bisects `f` on `[lo, hi]` until the bracket is no wider than `xtol`, it
/// can no longer be split in double precision, or `max_iter` halvings
/// have been done.
pub(crate) fn bisect<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}"
        )));
    }
    for _ in 0..max_iter {
        if hi - lo <= xtol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(Bisection {
                root: mid,
                f_root: 0.0,
                lo: mid,
                hi: mid,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let (root, f_root) = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    Ok(Bisection {
        root,
        f_root,
        lo,
        hi,
    })
}
