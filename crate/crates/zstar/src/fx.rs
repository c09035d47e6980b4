//! Fixed-point ball arithmetic over arbitrary-precision integers.
//!
//! A [`Fx`] represents the interval `[(v - e) / 2^F, (v + e) / 2^F]` where `F`
//! is the fraction-bit count of the governing [`Ctx`]. All operations round
//! the midpoint to nearest and push the rounding slack into the error term,
//! so containment of the true value is never lost (outward rounding
//! contract). Addition and subtraction are exact; everything else pays at
//! most one ulp plus the propagated input error.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arithmetic context: the global binary fixed-point scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ctx {
    frac_bits: u32,
}

/// A midpoint/error pair at the scale of a [`Ctx`].
#[derive(Clone, Debug)]
pub struct Fx {
    /// Scaled midpoint: the represented midpoint is `v / 2^F`.
    pub(crate) v: BigInt,
    /// Scaled error bound, always non-negative.
    pub(crate) e: BigInt,
}

/// `x >> k` rounded to nearest (ties away from zero is fine for our error
/// accounting; the result is within 1/2 ulp of the true quotient).
fn shr_round(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (k - 1);
    (x + half) >> k
}

/// `ceil(x / 2^k)` for non-negative `x`.
fn shr_ceil(x: &BigInt, k: u32) -> BigInt {
    debug_assert!(!x.is_negative());
    if k == 0 {
        return x.clone();
    }
    let mask = (BigInt::one() << k) - 1;
    (x + mask) >> k
}

/// `round(a / b)` for `b > 0`, ties away from the floor.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(b.is_positive());
    (a * 2 + b).div_floor(&(b * 2))
}

/// `ceil(a / b)` for non-negative `a`, positive `b`.
fn div_ceil_nonneg(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!a.is_negative() && b.is_positive());
    a.div_ceil(b)
}

impl Ctx {
    pub fn new(frac_bits: u32) -> Self {
        Ctx { frac_bits }
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn zero(&self) -> Fx {
        Fx {
            v: BigInt::zero(),
            e: BigInt::zero(),
        }
    }

    pub fn one(&self) -> Fx {
        self.from_i64(1)
    }

    pub fn from_i64(&self, k: i64) -> Fx {
        Fx {
            v: BigInt::from(k) << self.frac_bits,
            e: BigInt::zero(),
        }
    }

    pub fn from_bigint(&self, k: &BigInt) -> Fx {
        Fx {
            v: k << self.frac_bits,
            e: BigInt::zero(),
        }
    }

    /// Exact rational `p/q` rounded once; `q > 0`.
    pub fn from_ratio(&self, p: &BigInt, q: &BigInt) -> Fx {
        debug_assert!(q.is_positive());
        Fx {
            v: div_round(&(p << self.frac_bits), q),
            e: BigInt::one(),
        }
    }

    pub fn from_ratio_i64(&self, p: i64, q: i64) -> Fx {
        self.from_ratio(&BigInt::from(p), &BigInt::from(q))
    }

    pub fn add(&self, a: &Fx, b: &Fx) -> Fx {
        Fx {
            v: &a.v + &b.v,
            e: &a.e + &b.e,
        }
    }

    pub fn sub(&self, a: &Fx, b: &Fx) -> Fx {
        Fx {
            v: &a.v - &b.v,
            e: &a.e + &b.e,
        }
    }

    pub fn neg(&self, a: &Fx) -> Fx {
        Fx {
            v: -&a.v,
            e: a.e.clone(),
        }
    }

    pub fn mul(&self, a: &Fx, b: &Fx) -> Fx {
        let f = self.frac_bits;
        let v = shr_round(&(&a.v * &b.v), f);
        let slack = a.v.abs() * &b.e + b.v.abs() * &a.e + &a.e * &b.e;
        Fx {
            v,
            e: shr_ceil(&slack, f) + 1,
        }
    }

    /// Multiply by an exact integer (no rounding).
    pub fn mul_i64(&self, a: &Fx, k: i64) -> Fx {
        Fx {
            v: &a.v * k,
            e: &a.e * k.abs(),
        }
    }

    /// Divide by an exact positive integer.
    pub fn div_u64(&self, a: &Fx, n: u64) -> Fx {
        let n = BigInt::from(n);
        Fx {
            v: div_round(&a.v, &n),
            e: div_ceil_nonneg(&a.e, &n) + 1,
        }
    }

    /// Full division; the divisor interval must exclude zero and be positive.
    pub fn div(&self, a: &Fx, b: &Fx) -> Option<Fx> {
        let blo = &b.v - &b.e;
        if !blo.is_positive() {
            return None;
        }
        let f = self.frac_bits;
        let v = div_round(&(&a.v << f), &b.v);
        let num = (&a.e * b.v.abs() + a.v.abs() * &b.e) << f;
        let den = &b.v * &blo;
        Some(Fx {
            v,
            e: div_ceil_nonneg(&num, &den) + 1,
        })
    }

    /// Multiply by `2^k` (exact for `k >= 0`, one rounding otherwise).
    pub fn mul_pow2(&self, a: &Fx, k: i64) -> Fx {
        if k >= 0 {
            Fx {
                v: &a.v << (k as u32),
                e: &a.e << (k as u32),
            }
        } else {
            let s = (-k) as u32;
            Fx {
                v: shr_round(&a.v, s),
                e: shr_ceil(&a.e, s) + 1,
            }
        }
    }

    /// Square root; the argument interval must not be entirely negative.
    /// Negative parts of the interval are clipped to zero.
    pub fn sqrt(&self, a: &Fx) -> Fx {
        let f = self.frac_bits;
        let lo = &a.v - &a.e;
        let hi = &a.v + &a.e;
        debug_assert!(!hi.is_negative(), "sqrt of negative interval");
        let shi = (hi << f).sqrt();
        let slo = if lo.is_positive() {
            (lo << f).sqrt()
        } else {
            BigInt::zero()
        };
        // floor sqrts bracket the true range within 1 ulp on each side
        let v = shr_round(&(&shi + &slo), 1);
        let e = shr_ceil(&(&shi - &slo), 1) + 2;
        Fx { v, e }
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, a: &Fx, mut n: u64) -> Fx {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Widen the error bound by `2^k` ulps... i.e. add an absolute slack of
    /// `2^k / 2^F` (used for certified series tails).
    pub fn add_error_pow2(&self, a: &mut Fx, k: i64) {
        if k >= 0 {
            a.e += BigInt::one() << (k as u32);
        } else {
            // sub-ulp slack still costs one ulp
            a.e += 1;
        }
    }

    pub fn add_error(&self, a: &mut Fx, e: &BigInt) {
        debug_assert!(!e.is_negative());
        a.e += e;
    }

    /// Natural log of 2, certified.
    pub fn ln2(&self) -> Fx {
        // ln 2 = 2 atanh(1/3): terms 3^-(2j+1)/(2j+1)
        let f = self.frac_bits;
        let mut sum = BigInt::zero();
        let mut err = BigInt::zero();
        let mut pow = BigInt::from(3);
        let mut j = 0u32;
        loop {
            let den = &pow * (2 * j + 1);
            let term = div_round(&(BigInt::one() << f), &den);
            if term.is_zero() {
                // remainder below one ulp; tail of the series is < 2 ulps
                err += 2;
                break;
            }
            sum += term;
            err += 1;
            pow *= 9;
            j += 1;
        }
        let a = Fx { v: sum, e: err };
        self.mul_i64(&a, 2)
    }

    /// atanh for |u| strictly below 1/2 (interval bound enforced).
    fn atanh_small(&self, u: &Fx) -> Fx {
        let f = self.frac_bits;
        let half = BigInt::one() << (f - 1);
        assert!(
            (u.v.abs() + &u.e) < half,
            "atanh argument must stay below 1/2"
        );
        let u2 = self.mul(u, u);
        let mut term = u.clone();
        let mut sum = u.clone();
        let mut j = 1u64;
        loop {
            term = self.mul(&term, &u2);
            let add = self.div_u64(&term, 2 * j + 1);
            sum = self.add(&sum, &add);
            j += 1;
            if term.v.abs() + &term.e < BigInt::from(4) {
                // |u| < 1/2 so the tail is dominated by a geometric series
                // with ratio 1/4: remaining mass < 2 * current term < 8 ulps
                sum.e += 8;
                break;
            }
        }
        sum
    }

    /// Natural logarithm; the argument interval must be strictly positive.
    pub fn ln(&self, a: &Fx) -> Option<Fx> {
        let f = self.frac_bits;
        if !(&a.v - &a.e).is_positive() {
            return None;
        }
        // normalize to m in [1, 2)
        let k = a.v.bits() as i64 - 1 - f as i64;
        let m = self.mul_pow2(a, -k);
        let num = self.sub(&m, &self.one());
        let den = self.add(&m, &self.one());
        let u = self.div(&num, &den)?;
        let atanh = self.atanh_small(&u);
        let lnm = self.mul_i64(&atanh, 2);
        let ln2 = self.ln2();
        Some(self.add(&self.mul_i64(&ln2, k), &lnm))
    }

    /// Exponential. The argument magnitude must stay desk-scale (|a| < 2^20).
    pub fn exp(&self, a: &Fx) -> Fx {
        let f = self.frac_bits;
        // crude magnitude estimate for range reduction
        let approx = self.to_f64(a);
        assert!(approx.abs() < 1_048_576.0, "exp argument out of range");
        let k = (approx / std::f64::consts::LN_2).round() as i64;
        let ln2 = self.ln2();
        let s = self.sub(a, &self.mul_i64(&ln2, k));
        // |s| <= 0.5 ln 2 + slack < 0.4
        let mut term = self.one();
        let mut sum = self.one();
        let mut j = 1u64;
        loop {
            term = self.mul(&term, &s);
            term = self.div_u64(&term, j);
            sum = self.add(&sum, &term);
            j += 1;
            if term.v.abs() + &term.e < BigInt::from(4) {
                // |s| < 1/2: tail below 2*term < 8 ulps
                sum.e += 8;
                break;
            }
            assert!(j < 10_000, "exp series failed to converge");
        }
        self.mul_pow2(&sum, k)
    }

    /// Real power `a^t` for a strictly positive `a`.
    pub fn pow(&self, a: &Fx, t: &Fx) -> Option<Fx> {
        let l = self.ln(a)?;
        Some(self.exp(&self.mul(&l, t)))
    }

    /// `2^t`.
    pub fn exp2(&self, t: &Fx) -> Fx {
        self.exp(&self.mul(t, &self.ln2()))
    }

    // ---- comparisons and inspection ----

    pub fn lo(&self, a: &Fx) -> BigInt {
        &a.v - &a.e
    }

    pub fn hi(&self, a: &Fx) -> BigInt {
        &a.v + &a.e
    }

    /// `a < b` certainly.
    pub fn lt_definite(&self, a: &Fx, b: &Fx) -> bool {
        self.hi(a) < self.lo(b)
    }

    pub fn is_positive_definite(&self, a: &Fx) -> bool {
        (&a.v - &a.e).is_positive()
    }

    pub fn contains_zero(&self, a: &Fx) -> bool {
        !(&a.v - &a.e).is_positive() && !(&a.v + &a.e).is_negative()
    }

    /// Midpoint as f64 (diagnostics only; not part of any certified path).
    pub fn to_f64(&self, a: &Fx) -> f64 {
        let f = self.frac_bits;
        let bits = a.v.bits();
        if bits <= 52 {
            let (sign, digits) = a.v.to_u64_digits();
            let mag = digits.first().copied().unwrap_or(0) as f64;
            let signed = if sign == num_bigint::Sign::Minus {
                -mag
            } else {
                mag
            };
            signed / 2f64.powi(f as i32)
        } else {
            let shift = bits - 52;
            let top = &a.v >> shift;
            let (sign, digits) = top.to_u64_digits();
            let mag = digits.first().copied().unwrap_or(0) as f64;
            let signed = if sign == num_bigint::Sign::Minus {
                -mag
            } else {
                mag
            };
            signed * 2f64.powi(shift as i32 - f as i32)
        }
    }

    /// Round the value to a coarser context.
    pub fn round_to(&self, a: &Fx, target: &Ctx) -> Fx {
        let diff = self.frac_bits as i64 - target.frac_bits as i64;
        if diff <= 0 {
            Fx {
                v: &a.v << ((-diff) as u32),
                e: &a.e << ((-diff) as u32),
            }
        } else {
            let s = diff as u32;
            Fx {
                v: shr_round(&a.v, s),
                e: shr_ceil(&a.e, s) + 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(192)
    }

    fn assert_contains(c: &Ctx, a: &Fx, p: i64, q: i64) {
        // check p/q is inside [lo, hi] / 2^F
        let scaled = BigInt::from(p) << c.frac_bits();
        let lo = c.lo(a) * q;
        let hi = c.hi(a) * q;
        assert!(lo <= scaled && scaled <= hi, "interval does not contain {p}/{q}");
    }

    #[test]
    fn ratio_round_trip() {
        let c = ctx();
        let x = c.from_ratio_i64(1, 3);
        assert_contains(&c, &x, 1, 3);
        let y = c.mul_i64(&x, 3);
        assert_contains(&c, &y, 1, 1);
    }

    #[test]
    fn mul_contains_product() {
        let c = ctx();
        let a = c.from_ratio_i64(22, 7);
        let b = c.from_ratio_i64(-5, 9);
        let p = c.mul(&a, &b);
        assert_contains(&c, &p, -110, 63);
    }

    #[test]
    fn div_contains_quotient() {
        let c = ctx();
        let a = c.from_ratio_i64(355, 113);
        let b = c.from_ratio_i64(2, 1);
        let q = c.div(&a, &b).unwrap();
        assert_contains(&c, &q, 355, 226);
        assert!(c.div(&a, &c.zero()).is_none());
    }

    #[test]
    fn sqrt_of_two_squares_back() {
        let c = ctx();
        let two = c.from_i64(2);
        let r = c.sqrt(&two);
        let sq = c.mul(&r, &r);
        assert_contains(&c, &sq, 2, 1);
        // tight: error below 2^-180
        assert!(r.e < (BigInt::one() << 12));
    }

    #[test]
    fn ln2_exp_consistency() {
        let c = ctx();
        let l = c.ln2();
        let e = c.exp(&l);
        assert_contains(&c, &e, 2, 1);
        assert!(e.e < (BigInt::one() << 20));
    }

    #[test]
    fn ln_of_e_is_one() {
        let c = ctx();
        let e = c.exp(&c.one());
        let l = c.ln(&e).unwrap();
        assert_contains(&c, &l, 1, 1);
    }

    #[test]
    fn pow_matches_integer_power() {
        let c = ctx();
        let three = c.from_i64(3);
        let t = c.from_i64(4);
        let p = c.pow(&three, &t).unwrap();
        assert_contains(&c, &p, 81, 1);
        let q = c.powi(&three, 4);
        assert_contains(&c, &q, 81, 1);
        assert!(q.e.is_zero() || q.e < BigInt::from(1024));
    }

    #[test]
    fn exp2_matches_shift() {
        let c = ctx();
        let t = c.from_ratio_i64(-3, 1);
        let p = c.exp2(&t);
        assert_contains(&c, &p, 1, 8);
    }

    #[test]
    fn nested_refinement_overlaps() {
        // the same quantity at two precisions: intervals must intersect
        let c1 = Ctx::new(96);
        let c2 = Ctx::new(224);
        let a1 = c1.ln2();
        let a2 = c2.ln2();
        let lo1 = c1.lo(&a1) << 128;
        let hi1 = c1.hi(&a1) << 128;
        let lo2 = c2.lo(&a2);
        let hi2 = c2.hi(&a2);
        assert!(lo1 <= hi2 && lo2 <= hi1);
    }
}
