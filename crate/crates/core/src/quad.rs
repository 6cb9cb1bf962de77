//! Adaptive Simpson quadrature for smooth complex (and real) integrands.

use num_complex::Complex64 as C64;

use crate::{Error, Result};

const MAX_DEPTH: u32 = 48;

fn simpson(fa: C64, fm: C64, fb: C64, h: f64) -> C64 {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> C64>(
    f: &F,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: u32,
) -> Result<C64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNonConvergence);
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

/// Integrate a complex-valued function over `[a, b]` to absolute tolerance
/// `tol` with adaptive Simpson subdivision.
///
/// The interval is pre-split into 16 panels before adapting, so localized
/// features away from the global midpoint cannot hide from the first
/// error estimate.
pub fn integrate_complex<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    const PANELS: usize = 16;
    let panel_tol = tol / PANELS as f64;
    let h = (b - a) / PANELS as f64;
    let mut total = C64::new(0.0, 0.0);
    for k in 0..PANELS {
        let pa = a + k as f64 * h;
        let pb = if k == PANELS - 1 { b } else { pa + h };
        let m = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(m), f(pb));
        let whole = simpson(fa, fm, fb, pb - pa);
        total += adapt(&f, pa, pb, fa, fm, fb, whole, panel_tol, 0)?;
    }
    Ok(total)
}

/// Integrate a real-valued function over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_complex(|t| C64::new(f(t), 0.0), a, b, tol).map(|v| v.re)
}
