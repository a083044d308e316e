//! Compensated floating-point accumulation.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of complex terms, real and imaginary parts tracked separately.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexCompensatedSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexCompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `exp(2πi·t/n)` for `t = 0..n`. Angles are reduced to the first half
/// quadrant before calling `sin_cos`, so each entry is within an ulp or two.
pub fn roots_of_unity(n: u64) -> Vec<Complex64> {
    (0..n).map(|t| unit_root(t, n)).collect()
}

/// `exp(2πi·t/n)` for a single `t`.
pub fn unit_root(t: u64, n: u64) -> Complex64 {
    use std::f64::consts::FRAC_PI_2;
    let n128 = n as u128;
    let four_t = 4 * (t % n) as u128;
    let quadrant = four_t / n128;
    let rem = four_t % n128;
    // angle inside the quadrant is (π/2)·rem/n
    let (s, c) = if 2 * rem <= n128 {
        (FRAC_PI_2 * (rem as f64 / n as f64)).sin_cos()
    } else {
        let (s, c) = (FRAC_PI_2 * ((n128 - rem) as f64 / n as f64)).sin_cos();
        (c, s)
    };
    let (re, im) = match quadrant {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    Complex64::new(re, im)
}
