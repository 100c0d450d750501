//! Compensated (Neumaier) summation for complex series.
//!
//! All infinite and finite partial-fraction sums in this crate are reduced
//! strictly in ascending term order with error-free-transformation
//! compensation, so repeated runs are bit-identical regardless of how the
//! terms were produced.

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, c)
}

/// Neumaier-compensated accumulator, one compensation track per component.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    s_re: f64,
    s_im: f64,
    c_re: f64,
    c_im: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        let (s, c) = two_sum(self.s_re, z.re);
        self.s_re = s;
        self.c_re += c;
        let (s, c) = two_sum(self.s_im, z.im);
        self.s_im = s;
        self.c_im += c;
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.s_re + self.c_re, self.s_im + self.c_im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_cancellation() {
        let mut acc = NeumaierSum::new();
        acc.add(Complex64::new(1.0, 0.0));
        acc.add(Complex64::new(1e100, 0.0));
        acc.add(Complex64::new(1.0, 0.0));
        acc.add(Complex64::new(-1e100, 0.0));
        assert_eq!(acc.value(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn harmonic_tail_matches_f128_reference() {
        // sum of 1/k^2 for k=1..=10^5, reference from exact rational head + zeta tail
        let mut acc = NeumaierSum::new();
        for k in 1..=100_000u64 {
            let k = k as f64;
            acc.add(Complex64::new(1.0 / (k * k), 0.0));
        }
        let expect = std::f64::consts::PI * std::f64::consts::PI / 6.0 - 9.9999500001666666667e-6;
        assert!((acc.value().re - expect).abs() < 1e-14);
    }
}
