//! Dense univariate polynomials over an exact field, with Sturm root counting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Coefficients in ascending order, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R> Poly<R>
where
    R: Clone + Signed,
{
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let mut k = R::zero();
        let coeffs = self
            .coeffs
            .iter()
            .skip(1)
            .map(|c| {
                k = k.clone() + R::one();
                c.clone() * k.clone()
            })
            .collect();
        Self::new(coeffs)
    }

    /// Quotient and remainder of Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::new(Vec::new()), self.clone());
        }
        let mut quot = vec![R::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd].clone() / lead.clone();
            if !q.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].clone() - q.clone() * c.clone();
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a
    }

    /// The product of the distinct irreducible factors: same roots, all simple.
    pub fn square_free(&self) -> Self {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// `p₀ = p`, `p₁ = p'`, `p_{k+1} = -rem(p_{k-1}, p_k)`.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone()];
        if self.is_zero() {
            return chain;
        }
        let mut next = self.derivative();
        while !next.is_zero() {
            let r = chain.last().expect("nonempty").div_rem(&next).1;
            chain.push(next);
            next = Self::new(r.coeffs.into_iter().map(|c| -c).collect());
        }
        chain
    }
}

/// Sign variations of a Sturm chain at `x`, zeros dropped.
pub fn sign_variations<R: Clone + Signed>(chain: &[Poly<R>], x: &R) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            continue;
        };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Exact root isolation for a square-free polynomial with rational coefficients.
pub struct SturmCounter {
    poly: Poly<BigRational>,
    chain: Vec<Poly<BigRational>>,
}

impl SturmCounter {
    /// Builds the chain of the square-free part of `p`, which must be nonzero.
    pub fn new(p: &Poly<BigRational>) -> Self {
        let poly = p.square_free();
        let chain = poly.sturm_chain();
        Self { poly, chain }
    }

    pub fn poly(&self) -> &Poly<BigRational> {
        &self.poly
    }

    /// Distinct roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        sign_variations(&self.chain, a).saturating_sub(sign_variations(&self.chain, b))
    }

    /// Distinct roots in `[a, b)`.
    pub fn count_closed_open(&self, a: &BigRational, b: &BigRational) -> usize {
        let mut n = self.count(a, b);
        if self.poly.eval(a).is_zero() {
            n += 1;
        }
        if self.poly.eval(b).is_zero() {
            n -= 1;
        }
        n
    }

    /// Each root in `[a, b)` enclosed in an interval of width at most `width`, returned as
    /// the interval midpoints in increasing order (exact roots are returned exactly).
    pub fn isolate(
        &self,
        a: &BigRational,
        b: &BigRational,
        width: &BigRational,
    ) -> Vec<BigRational> {
        let mut out = Vec::new();
        if self.poly.eval(a).is_zero() {
            out.push(a.clone());
        }
        self.isolate_half_open(a, b, width, &mut out);
        if self.poly.eval(b).is_zero() {
            out.pop();
        }
        out
    }

    fn isolate_half_open(
        &self,
        a: &BigRational,
        b: &BigRational,
        width: &BigRational,
        out: &mut Vec<BigRational>,
    ) {
        let n = self.count(a, b);
        if n == 0 {
            return;
        }
        if self.poly.eval(b).is_zero() && n == 1 {
            out.push(b.clone());
            return;
        }
        if n == 1 && (b - a) <= *width {
            let two = BigRational::from_integer(BigInt::from(2));
            out.push((a + b) / two);
            return;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let mid = (a + b) / two;
        self.isolate_half_open(a, &mid, width, out);
        self.isolate_half_open(&mid, b, width, out);
    }
}

/// Exact rational value of a finite `f64`.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
