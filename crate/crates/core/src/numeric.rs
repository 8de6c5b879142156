//! Scalar abstraction and small complex-arithmetic helpers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the whole crate is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` constant (tolerances, literals) into this scalar.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Converts a count or index into this scalar.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Integer power by repeated squaring; negative exponents invert first.
pub fn cpow<T: Real>(z: Complex<T>, exp: i64) -> Complex<T> {
    let mut base = if exp < 0 { z.inv() } else { z };
    let mut e = exp.unsigned_abs();
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `exp(i * theta)`.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Max-norm of a complex slice.
pub fn max_abs<T: Real>(values: &[Complex<T>]) -> T {
    values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
}

/// Argument mapped into `[0, 2π)`.
pub fn arg_2pi<T: Real>(z: Complex<T>) -> T {
    let a = z.arg();
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}

/// Neumaier-compensated accumulator for complex sums.
///
/// Real and imaginary parts are compensated independently, so the result
/// only depends on the order in which terms are added.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: Complex<T>,
    comp: Complex<T>,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: Complex::new(T::zero(), T::zero()),
            comp: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn add(&mut self, term: Complex<T>) {
        let (re, cre) = neumaier_step(self.sum.re, self.comp.re, term.re);
        let (im, cim) = neumaier_step(self.sum.im, self.comp.im, term.im);
        self.sum = Complex::new(re, im);
        self.comp = Complex::new(cre, cim);
    }

    pub fn value(&self) -> Complex<T> {
        self.sum + self.comp
    }
}

fn neumaier_step<T: Real>(sum: T, comp: T, x: T) -> (T, T) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        comp + ((sum - t) + x)
    } else {
        comp + ((x - t) + sum)
    };
    (t, c)
}

impl<T: Real> Extend<Complex<T>> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = Complex<T>>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Compensated sum of an iterator of complex terms, in iteration order.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = Complex<T>>>(terms: I) -> Complex<T> {
    let mut acc = CompensatedSum::new();
    acc.extend(terms);
    acc.value()
}

/// Binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}
