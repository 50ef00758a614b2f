//! Adaptive Simpson quadrature with an explicit absolute-error budget.
//!
//! A subinterval is accepted once the coarse and refined Simpson estimates agree to within
//! its share of the budget. The reported error is the sum of those raw differences, which
//! is fifteen times the usual Richardson error estimate.

use crate::scalar::Scalar;

/// Recursion depth after which a subinterval is accepted regardless of the error test.
pub const DEFAULT_MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub evals: usize,
    /// False when some subinterval hit the depth limit before meeting its budget.
    pub converged: bool,
}

struct Simpson<'f, T, F> {
    f: &'f F,
    max_depth: u32,
    evals: usize,
    error: T,
    converged: bool,
}

impl<T: Scalar, F: Fn(T) -> T> Simpson<'_, T, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(&mut self, a: T, b: T, fa: T, fm: T, fb: T, whole: T, eps: T, depth: u32) -> T {
        let half = T::lit(0.5);
        let m = (a + b) * half;
        let lm = (a + m) * half;
        let rm = (m + b) * half;
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        self.evals += 2;
        let sixth = T::one() / T::lit(6.0);
        let left = (m - a) * sixth * (fa + T::lit(4.0) * flm + fm);
        let right = (b - m) * sixth * (fm + T::lit(4.0) * frm + fb);
        let diff = left + right - whole;
        if diff.abs() <= eps || depth >= self.max_depth || !(lm > a && rm < b) {
            if diff.abs() > eps {
                self.converged = false;
            }
            self.error += diff.abs();
            return left + right + diff / T::lit(15.0);
        }
        self.refine(a, m, fa, flm, fm, left, eps * half, depth + 1)
            + self.refine(m, b, fm, frm, fb, right, eps * half, depth + 1)
    }
}

/// Integrates `f` over `[a, b]` aiming at an absolute error of at most `eps`.
pub fn adaptive_simpson<T, F>(f: &F, a: T, b: T, eps: T, max_depth: u32) -> Quadrature<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if b <= a {
        return Quadrature {
            value: T::zero(),
            error: T::zero(),
            evals: 0,
            converged: true,
        };
    }
    let m = (a + b) * T::lit(0.5);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb);
    let mut s = Simpson {
        f,
        max_depth,
        evals: 3,
        error: T::zero(),
        converged: true,
    };
    let value = s.refine(a, b, fa, fm, fb, whole, eps, 0);
    Quadrature {
        value,
        error: s.error,
        evals: s.evals,
        converged: s.converged,
    }
}
