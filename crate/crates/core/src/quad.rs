//! Quadrature primitives: composite Simpson sums over stored uniform grids and
//! an adaptive Simpson rule for moment and tail integrals.

use crate::scalar::{fl, Scalar};
use num_complex::Complex;

/// Composite Simpson weight for index `k` of an odd-length uniform grid,
/// excluding the common factor `dx / 3`.
#[inline]
pub fn simpson_coeff<T: Scalar>(k: usize, len: usize) -> T {
    debug_assert!(len >= 3 && len % 2 == 1);
    if k == 0 || k + 1 == len {
        T::one()
    } else if k % 2 == 1 {
        fl(4.0)
    } else {
        fl(2.0)
    }
}

/// Composite Simpson sum of real samples on a uniform grid with spacing `dx`.
/// The sample count must be odd.
pub fn simpson<T: Scalar>(dx: T, values: &[T]) -> T {
    assert!(values.len() >= 3 && values.len() % 2 == 1, "odd sample count required");
    let mut acc = T::zero();
    for (k, &v) in values.iter().enumerate() {
        acc = acc + simpson_coeff::<T>(k, values.len()) * v;
    }
    acc * dx / fl(3.0)
}

/// Composite Simpson sum of complex samples on a uniform grid.
pub fn simpson_complex<T: Scalar>(dx: T, values: &[Complex<T>]) -> Complex<T> {
    assert!(values.len() >= 3 && values.len() % 2 == 1, "odd sample count required");
    let mut acc = Complex::new(T::zero(), T::zero());
    for (k, &v) in values.iter().enumerate() {
        let w = simpson_coeff::<T>(k, values.len());
        acc = acc + v * w;
    }
    acc * (dx / fl(3.0))
}

/// Trapezoid sum of real samples on a uniform grid. Used where an index mask
/// breaks the Simpson pattern (e.g. band-restricted energies).
pub fn trapezoid<T: Scalar>(dx: T, values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let half = fl::<T>(0.5);
    let mut acc = (values[0] + values[values.len() - 1]) * half;
    for &v in &values[1..values.len() - 1] {
        acc = acc + v;
    }
    acc * dx
}

fn simpson_step<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, fa: T, b: T, fb: T) -> (T, T, T) {
    let m = (a + b) * fl(0.5);
    let fm = f(m);
    let s = (b - a) / fl(6.0) * (fa + fl::<T>(4.0) * fm + fb);
    (m, fm, s)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<T: Scalar, F: Fn(T) -> T>(
    f: &F,
    a: T,
    fa: T,
    b: T,
    fb: T,
    m: T,
    fm: T,
    whole: T,
    tol: T,
    depth: u32,
) -> T {
    let (lm, flm, left) = simpson_step(f, a, fa, m, fm);
    let (rm, frm, right) = simpson_step(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= fl::<T>(15.0) * tol {
        left + right + delta / fl(15.0)
    } else {
        let half_tol = tol * fl(0.5);
        adaptive_rec(f, a, fa, m, fm, lm, flm, left, half_tol, depth - 1)
            + adaptive_rec(f, m, fm, b, fb, rm, frm, right, half_tol, depth - 1)
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol_abs`. Recursion is capped at `max_depth` subdivision levels.
pub fn adaptive_simpson<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T, tol_abs: T, max_depth: u32) -> T {
    if a == b {
        return T::zero();
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson_step(f, a, fa, b, fb);
    adaptive_rec(f, a, fa, b, fb, m, fm, whole, tol_abs, max_depth)
}

/// Integrates `f` over `[a, +inf)` by doubling panels until a panel
/// contributes less than `tol_rel` of the accumulated value (and less than
/// `tol_abs`). Intended for rapidly decaying integrands such as density tails.
pub fn integrate_to_infinity<T: Scalar, F: Fn(T) -> T>(
    f: &F,
    a: T,
    initial_width: T,
    tol_abs: T,
    tol_rel: T,
) -> T {
    let mut lo = a;
    let mut width = initial_width;
    let mut total = T::zero();
    for _ in 0..60 {
        let hi = lo + width;
        let panel = adaptive_simpson(f, lo, hi, tol_abs * fl(0.25), 28);
        total = total + panel;
        if panel.abs() < tol_abs && panel.abs() < tol_rel * total.abs().max(fl(1e-300)) {
            break;
        }
        lo = hi;
        width = width * fl(2.0);
    }
    total
}
