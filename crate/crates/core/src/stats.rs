//! Small Monte Carlo helpers: running summaries, batch-means standard
//! errors and the chi-square goodness-of-fit test.

use num_complex::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Summary {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Summary {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Summary) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for Summary {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Summary::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Real and imaginary summaries of a complex-valued estimator.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSummary {
    pub re: Summary,
    pub im: Summary,
}

impl ComplexSummary {
    pub fn push(&mut self, z: Complex64) {
        self.re.push(z.re);
        self.im.push(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSummary) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.re.mean(), self.im.mean())
    }

    /// Largest of the real and imaginary |z|-scores against `target`. A part
    /// with zero standard error scores 0 when it matches to 1e-12 and ∞ otherwise.
    pub fn max_z(&self, target: Complex64) -> f64 {
        z_score(self.re.mean(), self.re.standard_error(), target.re)
            .abs()
            .max(z_score(self.im.mean(), self.im.standard_error(), target.im).abs())
    }
}

pub fn z_score(mean: f64, se: f64, target: f64) -> f64 {
    let diff = mean - target;
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY * diff.signum()
    }
}

/// Mean and batch-means standard error of a possibly autocorrelated series.
/// Falls back to the i.i.d. formula below 400 values.
pub fn batch_means(values: &[f64], batches: usize) -> (f64, f64) {
    let s: Summary = values.iter().copied().collect();
    if values.len() < 400 || batches < 2 {
        return (s.mean(), s.standard_error());
    }
    let size = values.len() / batches;
    let means: Summary = values.chunks(size).take(batches).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    (s.mean(), (means.variance() / batches as f64).sqrt())
}

/// Pearson chi-square statistic and its p-value against `expected`
/// probabilities. Cells with zero expected mass must be empty.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), expected.len());
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells: usize = 0;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            if o > 0 {
                return ChiSquareResult { statistic: f64::INFINITY, dof: 0, p_value: 0.0 };
            }
            continue;
        }
        let e = p * n as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(stat)
    };
    ChiSquareResult { statistic: stat, dof, p_value }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pass threshold for chi-square goodness-of-fit checks.
pub const CHI_SQUARE_MIN_P: f64 = 0.001;
/// Pass threshold for |z|-scores of Monte Carlo means.
pub const Z_MAX: f64 = 3.0;
