//! Signed log-domain scalars, stable accumulation and log-binomials.
//!
//! Every quantity that can overflow or underflow an `f64` (binomials of a
//! few thousand spins, normalized sector weights, squared inner sums) is
//! carried as a [`LogReal`]: a sign plus the natural log of the magnitude.
//! Sums go through [`LogAccumulator`], which rescales against a running
//! maximum and keeps positive and negative parts apart until the end.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Size of the shared log-factorial table.
pub const DEFAULT_TABLE_SIZE: usize = 4096;

/// Relative size below which a signed sum is reported as exact zero.
pub const CANCELLATION_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A real number stored as `sign * exp(ln_mag)`.
#[derive(Clone, Copy, Debug)]
pub struct LogReal {
    sign: Sign,
    ln_mag: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: Sign::Zero,
        ln_mag: f64::NEG_INFINITY,
    };

    pub const ONE: LogReal = LogReal {
        sign: Sign::Positive,
        ln_mag: 0.0,
    };

    /// Positive number with the given natural-log magnitude.
    pub fn from_ln(ln_mag: f64) -> LogReal {
        LogReal::signed(Sign::Positive, ln_mag)
    }

    pub fn signed(sign: Sign, ln_mag: f64) -> LogReal {
        if sign == Sign::Zero || ln_mag == f64::NEG_INFINITY {
            LogReal::ZERO
        } else {
            LogReal { sign, ln_mag }
        }
    }

    pub fn from_f64(x: f64) -> LogReal {
        if x > 0.0 {
            LogReal::from_ln(x.ln())
        } else if x < 0.0 {
            LogReal::signed(Sign::Negative, (-x).ln())
        } else if x == 0.0 {
            LogReal::ZERO
        } else {
            LogReal {
                sign: Sign::Positive,
                ln_mag: f64::NAN,
            }
        }
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln(self) -> f64 {
        self.ln_mag
    }

    /// Base-2 log of the magnitude.
    pub fn log2(self) -> f64 {
        self.ln_mag / std::f64::consts::LN_2
    }

    pub fn is_zero(self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_f64() * self.ln_mag.exp(),
        }
    }

    pub fn abs(self) -> LogReal {
        match self.sign {
            Sign::Negative => LogReal {
                sign: Sign::Positive,
                ..self
            },
            _ => self,
        }
    }

    /// Square root of the magnitude. The sign must not be negative.
    pub fn sqrt(self) -> LogReal {
        debug_assert!(self.sign != Sign::Negative, "sqrt of a negative LogReal");
        LogReal::signed(self.sign, 0.5 * self.ln_mag)
    }

    pub fn powi(self, e: i32) -> LogReal {
        if e == 0 {
            return LogReal::ONE;
        }
        let sign = if e % 2 == 0 {
            self.sign.times(self.sign)
        } else {
            self.sign
        };
        LogReal::signed(sign, self.ln_mag * e as f64)
    }

    pub fn square(self) -> LogReal {
        self.powi(2)
    }

    pub fn recip(self) -> LogReal {
        LogReal::signed(self.sign, -self.ln_mag)
    }

    /// Multiply by `2^e`.
    pub fn scale_pow2(self, e: f64) -> LogReal {
        LogReal::signed(self.sign, self.ln_mag + e * std::f64::consts::LN_2)
    }
}

impl Default for LogReal {
    fn default() -> Self {
        LogReal::ZERO
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            Sign::Positive => write!(f, "exp({})", self.ln_mag),
            Sign::Negative => write!(f, "-exp({})", self.ln_mag),
        }
    }
}

impl PartialEq for LogReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                Sign::Zero => Some(Ordering::Equal),
                Sign::Positive => self.ln_mag.partial_cmp(&other.ln_mag),
                Sign::Negative => other.ln_mag.partial_cmp(&self.ln_mag),
            },
            ord => Some(ord),
        }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        LogReal::signed(self.sign.times(rhs.sign), self.ln_mag + rhs.ln_mag)
    }
}

impl Div for LogReal {
    type Output = LogReal;
    /// Division by zero yields an infinite magnitude with the numerator's sign.
    fn div(self, rhs: LogReal) -> LogReal {
        if rhs.is_zero() {
            return LogReal::signed(self.sign, f64::INFINITY);
        }
        LogReal::signed(self.sign.times(rhs.sign), self.ln_mag - rhs.ln_mag)
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: self.sign.flip(),
            ..self
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        let mut acc = LogAccumulator::new();
        acc.push(self);
        acc.push(rhs);
        acc.value()
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Running sum of signed log-domain terms.
#[derive(Clone, Copy, Debug)]
pub struct LogAccumulator {
    max: f64,
    pos: Compensated,
    neg: Compensated,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        LogAccumulator::new()
    }
}

impl LogAccumulator {
    pub fn new() -> Self {
        LogAccumulator {
            max: f64::NEG_INFINITY,
            pos: Compensated::default(),
            neg: Compensated::default(),
        }
    }

    fn rebase(&mut self, ln: f64) {
        if ln > self.max {
            let f = if self.max == f64::NEG_INFINITY {
                0.0
            } else {
                (self.max - ln).exp()
            };
            self.pos.scale(f);
            self.neg.scale(f);
            self.max = ln;
        }
    }

    pub fn push(&mut self, term: LogReal) {
        if term.is_zero() {
            return;
        }
        self.rebase(term.ln_mag);
        let x = (term.ln_mag - self.max).exp();
        match term.sign {
            Sign::Positive => self.pos.add(x),
            Sign::Negative => self.neg.add(x),
            Sign::Zero => {}
        }
    }

    /// Fold another accumulator into this one.
    pub fn merge(&mut self, other: &LogAccumulator) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        self.rebase(other.max);
        let f = (other.max - self.max).exp();
        self.pos.add(other.pos.sum * f);
        self.pos.add(other.pos.comp * f);
        self.neg.add(other.neg.sum * f);
        self.neg.add(other.neg.comp * f);
    }

    /// Current sum. Cancellation down to `CANCELLATION_TOL` relative to the
    /// larger part is reported as exact zero.
    pub fn value(&self) -> LogReal {
        let p = self.pos.value();
        let n = self.neg.value();
        let diff = p - n;
        if diff == 0.0 || (n > 0.0 && diff.abs() <= CANCELLATION_TOL * p.max(n)) {
            return LogReal::ZERO;
        }
        let sign = if diff > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        };
        LogReal::signed(sign, self.max + diff.abs().ln())
    }
}

impl Extend<LogReal> for LogAccumulator {
    fn extend<I: IntoIterator<Item = LogReal>>(&mut self, iter: I) {
        for t in iter {
            self.push(t);
        }
    }
}

impl FromIterator<LogReal> for LogAccumulator {
    fn from_iter<I: IntoIterator<Item = LogReal>>(iter: I) -> Self {
        let mut acc = LogAccumulator::new();
        acc.extend(iter);
        acc
    }
}

/// Stable signed sum of log-domain terms.
pub fn log_sum_exp<I: IntoIterator<Item = LogReal>>(terms: I) -> LogReal {
    terms.into_iter().collect::<LogAccumulator>().value()
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Cumulative `ln n!` stored as an unevaluated hi + lo pair.
#[derive(Clone, Debug)]
pub struct LogFactorialTable {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl LogFactorialTable {
    pub fn new(n_max: usize) -> Self {
        let mut hi = Vec::with_capacity(n_max + 1);
        let mut lo = Vec::with_capacity(n_max + 1);
        let mut acc = Compensated::default();
        hi.push(0.0);
        lo.push(0.0);
        for i in 1..=n_max {
            acc.add((i as f64).ln());
            let (h, l) = two_sum(acc.sum, acc.comp);
            hi.push(h);
            lo.push(l);
        }
        LogFactorialTable { hi, lo }
    }

    pub fn n_max(&self) -> usize {
        self.hi.len() - 1
    }

    fn parts(&self, n: usize) -> (f64, f64) {
        if n < self.hi.len() {
            (self.hi[n], self.lo[n])
        } else {
            (stirling_ln_factorial(n as f64), 0.0)
        }
    }

    /// `ln n!`. Falls back to the Stirling series above `n_max`.
    pub fn ln_factorial(&self, n: usize) -> f64 {
        let (h, l) = self.parts(n);
        h + l
    }

    /// `C(n, r)` in log form; exact zero when `r < 0`, `r > n` or `n < 0`.
    pub fn log_binomial(&self, n: i64, r: i64) -> LogReal {
        if n < 0 || r < 0 || r > n {
            return LogReal::ZERO;
        }
        if r == 0 || r == n {
            return LogReal::ONE;
        }
        let (hn, ln) = self.parts(n as usize);
        let (hr, lr) = self.parts(r as usize);
        let (hs, ls) = self.parts((n - r) as usize);
        let (s1, e1) = two_sum(hn, -hr);
        let (s2, e2) = two_sum(s1, -hs);
        LogReal::from_ln(s2 + (e1 + e2 + (ln - lr - ls)))
    }
}

fn stirling_ln_factorial(n: f64) -> f64 {
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    n * n.ln() - n
        + 0.5 * (2.0 * std::f64::consts::PI * n).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

static TABLE: OnceLock<LogFactorialTable> = OnceLock::new();

/// Shared table of size [`DEFAULT_TABLE_SIZE`].
pub fn shared_table() -> &'static LogFactorialTable {
    TABLE.get_or_init(|| LogFactorialTable::new(DEFAULT_TABLE_SIZE))
}

/// `C(n, r)` in log form using the shared table.
pub fn log_binomial(n: i64, r: i64) -> LogReal {
    shared_table().log_binomial(n, r)
}

pub fn ln_factorial(n: usize) -> f64 {
    shared_table().ln_factorial(n)
}

/// `C(n, r)` as a plain float; overflows to `inf` for large arguments.
pub fn binomial(n: i64, r: i64) -> f64 {
    log_binomial(n, r).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_rows_match() {
        let mut row = vec![1.0f64];
        for n in 1..40i64 {
            let mut next = vec![1.0; n as usize + 1];
            for r in 1..n as usize {
                next[r] = row[r - 1] + row[r];
            }
            row = next;
            for (r, &v) in row.iter().enumerate() {
                let got = binomial(n, r as i64);
                assert!((got - v).abs() <= 1e-13 * v, "C({n},{r}) = {got} vs {v}");
            }
        }
    }

    #[test]
    fn out_of_range_is_exact_zero() {
        assert!(log_binomial(5, -1).is_zero());
        assert!(log_binomial(5, 6).is_zero());
        assert!(log_binomial(-1, 0).is_zero());
        assert_eq!(log_binomial(0, 0).to_f64(), 1.0);
    }

    #[test]
    fn stirling_continues_table() {
        let small = LogFactorialTable::new(100);
        for n in [101usize, 150, 400] {
            let a = small.ln_factorial(n);
            let b = shared_table().ln_factorial(n);
            assert!((a - b).abs() < 1e-12 * b, "n = {n}");
        }
    }

    #[test]
    fn accumulator_detects_cancellation() {
        let x = LogReal::from_ln(700.0);
        let y = LogReal::from_ln(-700.0);
        assert!((x - x).is_zero());
        let s = log_sum_exp([x, y, -x]);
        assert!(s.is_zero());
        let s = log_sum_exp([y, y]);
        assert!((s.ln() - (-700.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn accumulator_handles_extreme_range() {
        let s = log_sum_exp([LogReal::from_ln(-800.0), LogReal::from_ln(-800.0)]);
        assert!((s.ln() - (-800.0 + 2f64.ln())).abs() < 1e-12);
        let s = log_sum_exp([LogReal::from_ln(800.0), LogReal::from_ln(0.0)]);
        assert!((s.ln() - 800.0).abs() < 1e-12);
    }

    #[test]
    fn merge_matches_sequential() {
        let terms: Vec<LogReal> = (0..50)
            .map(|i| LogReal::from_f64((i as f64 - 20.5) * 1.3f64.powi(i)))
            .collect();
        let whole = log_sum_exp(terms.iter().copied());
        let mut a: LogAccumulator = terms[..17].iter().copied().collect();
        let b: LogAccumulator = terms[17..].iter().copied().collect();
        a.merge(&b);
        let merged = a.value();
        assert_eq!(whole.sign(), merged.sign());
        assert!((whole.ln() - merged.ln()).abs() < 1e-13);
    }

    #[test]
    fn ordering_respects_sign() {
        let a = LogReal::from_f64(-3.0);
        let b = LogReal::from_f64(-2.0);
        let c = LogReal::ZERO;
        let d = LogReal::from_f64(1e-300);
        assert!(a < b && b < c && c < d);
        assert_eq!(LogReal::ZERO, LogReal::from_f64(0.0));
    }

    #[test]
    fn arithmetic_round_trips() {
        let a = LogReal::from_f64(-6.0);
        let b = LogReal::from_f64(1.5);
        assert!(((a * b).to_f64() + 9.0).abs() < 1e-14);
        assert!(((a / b).to_f64() + 4.0).abs() < 1e-14);
        assert!(((a + b).to_f64() + 4.5).abs() < 1e-14);
        assert!((b.square().sqrt().to_f64() - 1.5).abs() < 1e-15);
        assert!((a.powi(3).to_f64() + 216.0).abs() < 1e-11);
        assert!((b.scale_pow2(-1.0).to_f64() - 0.75).abs() < 1e-15);
    }
}
