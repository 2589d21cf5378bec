//! Outward-rounded fixed-point interval arithmetic.
//!
//! An [`Interval`] holds two big integers `lo`, `hi` and a precision `bits`,
//! and stands for the real range `[lo / 2^bits, hi / 2^bits]`. Every
//! operation rounds `lo` down and `hi` up, so the true value always lies in
//! the interval. Only what the crate needs is here: rationals, sums, products
//! and the natural logarithm of a positive rational.

use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn scale(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Interval {
    pub fn from_integer(value: impl Into<BigInt>, bits: u32) -> Self {
        let v = value.into() << bits as usize;
        Self {
            lo: v.clone(),
            hi: v,
            bits,
        }
    }

    /// Enclosure of `num / den`. Panics if `den` is zero.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let scaled = num << bits as usize;
        Self {
            lo: floor_div(&scaled, &den),
            hi: ceil_div(&scaled, &den),
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        debug_assert_eq!(self.bits, other.bits);
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    /// Exact multiplication by an integer.
    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval {
            lo,
            hi,
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        debug_assert_eq!(self.bits, other.bits);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().expect("four products");
        let max = products.iter().max().expect("four products");
        let s = scale(self.bits);
        Interval {
            lo: floor_div(min, &s),
            hi: ceil_div(max, &s),
            bits: self.bits,
        }
    }

    /// Enclosure of `self * num / den` for a rational with `den > 0`.
    pub fn mul_ratio(&self, num: &BigInt, den: &BigInt) -> Interval {
        assert!(den.is_positive(), "denominator must be positive");
        let scaled = self.mul_int(num);
        Interval {
            lo: floor_div(&scaled.lo, den),
            hi: ceil_div(&scaled.hi, den),
            bits: self.bits,
        }
    }

    /// `Some(Less)` if every point of `self` is strictly below every point of
    /// `other`, `Some(Greater)` for the mirror case, `Some(Equal)` if both are
    /// the same point, `None` if they overlap otherwise.
    pub fn certain_cmp(&self, other: &Interval) -> Option<Ordering> {
        debug_assert_eq!(self.bits, other.bits);
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && self == other {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// True when every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    /// The ceiling of the enclosed value, if the enclosure pins it down.
    pub fn exact_ceil(&self) -> Option<BigInt> {
        let s = scale(self.bits);
        let lo = ceil_div(&self.lo, &s);
        let hi = ceil_div(&self.hi, &s);
        (lo == hi).then_some(lo)
    }

    /// Lower and upper endpoints as `(numerator, 2^bits)` pairs.
    pub fn endpoints(&self) -> (&BigInt, &BigInt) {
        (&self.lo, &self.hi)
    }

    /// Natural logarithm of `num / den`. Panics unless the ratio is positive.
    pub fn ln_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Interval {
        assert!(
            num.is_positive() && den.is_positive(),
            "logarithm of a non-positive ratio"
        );
        // Reduce to s = num / (den * 2^e) in [1, 2).
        let mut e = num.bits() as i64 - den.bits() as i64;
        let (mut a, mut b) = shifted(num, den, e);
        if a < b {
            e -= 1;
            (a, b) = shifted(num, den, e);
        }
        debug_assert!(a >= b && a < &b * 2);
        // ln s = 2 atanh((s - 1) / (s + 1)), with (s - 1) / (s + 1) in [0, 1/3).
        let y_num = &a - &b;
        let y_den = &a + &b;
        let ln_s = atanh_ratio(&y_num, &y_den, bits).mul_int(&BigInt::from(2));
        if e == 0 {
            return ln_s;
        }
        let ln2 = atanh_ratio(&BigInt::one(), &BigInt::from(3), bits).mul_int(&BigInt::from(2));
        ln2.mul_int(&BigInt::from(e)).add(&ln_s)
    }

    /// Natural logarithm of a positive integer.
    pub fn ln_int(n: u64, bits: u32) -> Interval {
        Interval::ln_ratio(&BigInt::from(n), &BigInt::one(), bits)
    }
}

/// `(num, den * 2^e)` with the power moved onto the numerator when `e < 0`.
fn shifted(num: &BigInt, den: &BigInt, e: i64) -> (BigInt, BigInt) {
    if e >= 0 {
        (num.clone(), den << e as usize)
    } else {
        (num << (-e) as usize, den.clone())
    }
}

/// `atanh(p / q) = sum_j (p/q)^(2j+1) / (2j+1)` for `0 <= p / q <= 1/3`.
///
/// Terms are rounded outward one by one; the remainder after the last term is
/// bounded by `t * (9/8)` where `t` is the first omitted term, because the
/// ratio between consecutive terms is at most `1/9`.
fn atanh_ratio(p: &BigInt, q: &BigInt, bits: u32) -> Interval {
    assert!(!p.is_negative() && q.is_positive() && p * 3 <= *q);
    if p.is_zero() {
        return Interval::from_integer(0, bits);
    }
    let p2 = p * p;
    let q2 = q * q;
    let mut pow_p = p.clone();
    let mut pow_q = q.clone();
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut odd = 1u64;
    loop {
        let num = &pow_p << bits as usize;
        let den = &pow_q * odd;
        let term_hi = ceil_div(&num, &den);
        if term_hi <= BigInt::one() {
            // Every remaining term is below one ulp; bound the tail from above.
            let tail = ceil_div(&(num * 9), &(den * 8));
            hi += tail;
            break;
        }
        lo += floor_div(&num, &den);
        hi += term_hi;
        pow_p *= &p2;
        pow_q *= &q2;
        odd += 2;
    }
    Interval { lo, hi, bits }
}
