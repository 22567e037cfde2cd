//! Small numerical kernels: compensated summation, Gauss-Legendre rules and a
//! safeguarded monotone inverse.

/// Neumaier's improved Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
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
        for v in iter {
            s.add(v);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

// 5-point Gauss-Legendre on [-1, 1]; exact for polynomials of degree <= 9.
const GL5_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Integral of `f` over `[a, b]` with a single 5-point Gauss-Legendre panel.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = CompensatedSum::new();
    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

/// Integral of `f` over consecutive pieces given by sorted `breaks`.
pub fn piecewise_gauss<F: Fn(f64) -> f64>(f: &F, breaks: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            acc.add(gauss_legendre5(f, w[0], w[1]));
        }
    }
    acc.value()
}

const MAX_BISECTIONS: usize = 200;

/// Solves `f(x) = target` for increasing `f` on `[lo, hi]` with
/// `f(lo) <= target <= f(hi)`.
///
/// Newton steps are taken from the current iterate and rejected in favour of
/// bisection whenever they leave the bracket. Iteration stops once the step
/// falls below a few ulps of the iterate or the bracket collapses.
pub fn invert_monotone<F, D>(f: F, df: D, target: f64, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a) - target, f(b) - target);
    if fa >= 0.0 {
        return a;
    }
    if fb <= 0.0 {
        return b;
    }
    let mut x = a + (b - a) * (-fa / (fb - fa));
    if !(x > a && x < b) {
        x = 0.5 * (a + b);
    }
    for _ in 0..MAX_BISECTIONS {
        let fx = f(x) - target;
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let d = df(x);
        let mut next = if d > 0.0 { x - fx / d } else { f64::NAN };
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        let tol = 4.0 * f64::EPSILON * next.abs().max(f64::MIN_POSITIVE);
        if (next - x).abs() <= tol || b - a <= tol {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
        let naive: f64 = v.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_nine() {
        let f = |x: f64| x.powi(9) - 3.0 * x.powi(4) + 2.0;
        let exact = |x: f64| x.powi(10) / 10.0 - 0.6 * x.powi(5) + 2.0 * x;
        let got = gauss_legendre5(f, -0.3, 1.7);
        assert!((got - (exact(1.7) - exact(-0.3))).abs() < 1e-12);
    }

    #[test]
    fn invert_monotone_cubic() {
        let f = |x: f64| x * x * x + x;
        let df = |x: f64| 3.0 * x * x + 1.0;
        let x = invert_monotone(f, df, 10.0, 0.0, 5.0);
        assert!((x - 2.0).abs() < 1e-15);
        assert_eq!(invert_monotone(f, df, -1.0, 0.0, 5.0), 0.0);
        assert_eq!(invert_monotone(f, df, 1000.0, 0.0, 5.0), 5.0);
    }

    #[test]
    fn invert_monotone_survives_flat_derivative() {
        // derivative vanishes at 0; Newton would divide by zero there
        let f = |x: f64| x * x * x;
        let x = invert_monotone(f, |x| 3.0 * x * x, 1e-9, -1.0, 1.0);
        assert!((x - 1e-3).abs() < 1e-15);
    }
}
