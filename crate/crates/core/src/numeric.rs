//! Small numerical helpers shared by the estimation modules.

/// Kahan–Babuška (Neumaier) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

/// Running sum that switches to compensated accumulation for long windows.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Accumulator {
    Plain(f64),
    Compensated(CompensatedSum),
}

/// Window length above which sums are accumulated with compensation.
pub(crate) const COMPENSATION_THRESHOLD: usize = 10_000;

impl Accumulator {
    pub(crate) fn for_length(len: usize) -> Self {
        if len > COMPENSATION_THRESHOLD {
            Accumulator::Compensated(CompensatedSum::new())
        } else {
            Accumulator::Plain(0.0)
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        match self {
            Accumulator::Plain(s) => *s += v,
            Accumulator::Compensated(c) => c.add(v),
        }
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        match self {
            Accumulator::Plain(s) => *s,
            Accumulator::Compensated(c) => c.value(),
        }
    }
}

/// Composite Simpson rule on `[lo, hi]` with `intervals` subintervals
/// (rounded up to an even count).
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, intervals: usize) -> f64 {
    let m = intervals.max(2);
    let m = m + (m % 2);
    let step = (hi - lo) / m as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(lo));
    acc.add(f(hi));
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(lo + i as f64 * step));
    }
    acc.value() * step / 3.0
}

/// Sample mean and standard error of the mean. The standard error is NaN for
/// fewer than two observations.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = CompensatedSum::sum_iter(values.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let ss = CompensatedSum::sum_iter(values.iter().map(|v| (v - mean) * (v - mean)));
    let var = ss / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
