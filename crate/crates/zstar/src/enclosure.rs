//! Public value types: exact dyadic numbers and certified enclosures.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::fx::{Ctx, Fx};
use crate::Error;

/// An exact dyadic rational `mant * 2^exp2`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp2: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp2: 0,
        }
    }

    pub fn from_int(k: i64) -> Self {
        Dyadic {
            mant: BigInt::from(k),
            exp2: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp2 >= 0 {
            BigRational::from_integer(&self.mant << (self.exp2 as u32))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp2) as u32))
        }
    }

    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp2) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        Some(Dyadic {
            mant: BigInt::from(mant) * sign,
            exp2,
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    fn cmp_dyadic(&self, other: &Dyadic) -> Ordering {
        let e = self.exp2.min(other.exp2);
        let a = &self.mant << ((self.exp2 - e) as u32);
        let b = &other.mant << ((other.exp2 - e) as u32);
        a.cmp(&b)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_dyadic(other) == Ordering::Equal
    }
}
impl Eq for Dyadic {}
impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_dyadic(other))
    }
}
impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_dyadic(other)
    }
}

/// A value with a certified error radius: the true quantity lies in
/// `[center - radius, center + radius]`.
#[derive(Clone, Debug)]
pub struct Enclosure {
    pub center: Dyadic,
    pub radius: Dyadic,
    /// Decimal digits the producing computation was asked for.
    pub precision: u32,
}

impl Enclosure {
    pub fn exact(center: Dyadic, precision: u32) -> Self {
        Enclosure {
            center,
            radius: Dyadic::zero(),
            precision,
        }
    }

    pub fn lo(&self) -> BigRational {
        self.center.to_rational() - self.radius.to_rational()
    }

    pub fn hi(&self) -> BigRational {
        self.center.to_rational() + self.radius.to_rational()
    }

    pub fn width(&self) -> BigRational {
        self.radius.to_rational() * BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains_rational(&self, x: &BigRational) -> bool {
        &self.lo() <= x && x <= &self.hi()
    }

    pub fn contains_int(&self, k: &BigInt) -> bool {
        self.contains_rational(&BigRational::from_integer(k.clone()))
    }

    /// Some integer lies inside the enclosure.
    pub fn touches_any_integer(&self) -> bool {
        let lo = self.lo();
        let hi = self.hi();
        lo.ceil().to_integer() <= hi.floor().to_integer()
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }

    pub fn disjoint(&self, other: &Enclosure) -> bool {
        !self.overlaps(other)
    }

    /// `self` entirely below `other`.
    pub fn strictly_below(&self, other: &Enclosure) -> bool {
        self.hi() < other.lo()
    }

    pub fn radius_at_most(&self, tol: f64) -> bool {
        match Dyadic::from_f64(tol) {
            Some(t) => self.radius <= t,
            None => false,
        }
    }

    /// |self - other| bounded by the sum of the radii.
    pub fn consistent_with(&self, other: &Enclosure) -> bool {
        self.overlaps(other)
    }

    pub fn to_f64(&self) -> f64 {
        self.center.to_f64()
    }

    /// Decimal rendering of the center to `digits` significant digits.
    pub fn value_string(&self, digits: u32) -> String {
        decimal_string(&self.center.to_rational(), digits.max(1))
    }

    /// Short upper-bounded decimal for the radius.
    pub fn radius_string(&self) -> String {
        if self.radius.is_zero() {
            return "0".to_string();
        }
        decimal_string_round_up(&self.radius.to_rational(), 2)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ± {}",
            self.value_string(self.precision),
            self.radius_string()
        )
    }
}

pub(crate) fn fx_to_enclosure(ctx: &Ctx, a: &Fx, precision: u32) -> Enclosure {
    let f = -(ctx.frac_bits() as i64);
    Enclosure {
        center: Dyadic {
            mant: a.v.clone(),
            exp2: f,
        },
        radius: Dyadic {
            mant: a.e.clone(),
            exp2: f,
        },
        precision,
    }
}

pub(crate) fn fx_from_rational(ctx: &Ctx, x: &BigRational) -> Fx {
    ctx.from_ratio(x.numer(), x.denom())
}

pub(crate) fn fx_from_enclosure(ctx: &Ctx, a: &Enclosure) -> Fx {
    let mut m = fx_from_rational(ctx, &a.center.to_rational());
    if !a.radius.is_zero() {
        let r = fx_from_rational(ctx, &a.radius.to_rational());
        let slack = ctx.hi(&r).max(BigInt::zero());
        ctx.add_error(&mut m, &slack);
    }
    m
}

/// Decimal digits needed to separate at `10^-digits` expressed in bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits * 3322 + 999) / 1000 + 1
}

/// Target radius `10^-digits` as an exact rational.
pub fn pow10_neg(digits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits))
}

// ---- decimal parsing / formatting ----

/// Parse a decimal literal (optionally signed, optional fraction and
/// exponent) or a rational `p/q` into an exact rational.
pub fn parse_real(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let pn: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator {p:?}")))?;
        let qn: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator {q:?}")))?;
        if qn.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(BigRational::new(pn, qn));
    }
    let (mant_str, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (neg, body) = match mant_str.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mant_str.strip_prefix('+').unwrap_or(mant_str)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad number {s:?}")));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("bad number {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let mant: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad number {s:?}")))?
    };
    let mant = if neg { -mant } else { mant };
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        BigRational::from_integer(mant * ten.pow(shift as u32))
    } else {
        BigRational::new(mant, ten.pow((-shift) as u32))
    };
    Ok(value)
}

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

/// `floor(log10 |x|)` for non-zero rational `x`.
fn log10_floor(x: &BigRational) -> i64 {
    let num = x.numer().abs();
    let den = x.denom().clone();
    // first estimate from bit lengths, then correct
    let mut e = ((num.bits() as i64 - den.bits() as i64) as f64 * 0.301_029_995_663_981) as i64;
    loop {
        // value >= 10^e ?
        let ge = if e >= 0 {
            num.clone() >= &den * pow10(e as u32)
        } else {
            &num * pow10((-e) as u32) >= den
        };
        if ge {
            // and value < 10^(e+1)?
            let lt = if e + 1 >= 0 {
                num < &den * pow10((e + 1) as u32)
            } else {
                &num * pow10((-(e + 1)) as u32) < den
            };
            if lt {
                return e;
            }
            e += 1;
        } else {
            e -= 1;
        }
    }
}

fn scale_digits(x: &BigRational, sig: u32, round_up: bool) -> (BigInt, i64) {
    // returns (digits, exp10) with value ≈ digits * 10^(exp10 - sig + 1)
    let e10 = log10_floor(x);
    let shift = sig as i64 - 1 - e10;
    let num = x.numer().abs();
    let den = x.denom();
    let (scaled_num, scaled_den) = if shift >= 0 {
        (num * pow10(shift as u32), den.clone())
    } else {
        (num, den * pow10((-shift) as u32))
    };
    let mut d = if round_up {
        scaled_num.div_ceil(&scaled_den)
    } else {
        // round to nearest
        (scaled_num * 2 + &scaled_den) / (scaled_den * 2)
    };
    let mut e10 = e10;
    // rounding may have produced sig+1 digits (e.g. 9.99 -> 10.0)
    if d >= pow10(sig) {
        d /= 10;
        e10 += 1;
    }
    (d, e10)
}

fn format_digits(neg: bool, digits: &BigInt, e10: i64, sig: u32) -> String {
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig as usize);
    let sign = if neg { "-" } else { "" };
    if e10 >= 0 && e10 < sig as i64 {
        let point = (e10 + 1) as usize;
        let int = &ds[..point];
        let frac = &ds[point..];
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else if e10 < 0 && e10 >= -4 {
        let zeros = "0".repeat((-e10 - 1) as usize);
        format!("{sign}0.{zeros}{ds}")
    } else {
        let head = &ds[..1];
        let tail = &ds[1..];
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }
}

/// Round-to-nearest decimal rendering with `sig` significant digits.
pub fn decimal_string(x: &BigRational, sig: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (d, e10) = scale_digits(x, sig, false);
    format_digits(x.is_negative(), &d, e10, sig)
}

/// Like [`decimal_string`] but rounds the magnitude up (for radii).
pub fn decimal_string_round_up(x: &BigRational, sig: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (d, e10) = scale_digits(x, sig, true);
    format_digits(x.is_negative(), &d, e10, sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let x = parse_real("3.25").unwrap();
        assert_eq!(decimal_string(&x, 3), "3.25");
        let y = parse_real("-0.004").unwrap();
        assert_eq!(decimal_string(&y, 1), "-0.004");
        let z = parse_real("1e-15").unwrap();
        assert_eq!(decimal_string(&z, 2), "1.0e-15");
        let r = parse_real("22/7").unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(22), BigInt::from(7)));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_real("").is_err());
        assert!(parse_real("1.2.3").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn decimal_rounding_carries() {
        let x = parse_real("0.999").unwrap();
        assert_eq!(decimal_string(&x, 2), "1.0");
    }

    #[test]
    fn dyadic_f64_round_trip() {
        let d = Dyadic::from_f64(0.15625).unwrap();
        assert_eq!(d.to_f64(), 0.15625);
        let tiny = Dyadic::from_f64(1e-25).unwrap();
        assert!(tiny.to_f64() > 0.0);
    }

    #[test]
    fn enclosure_integer_touching() {
        let e = Enclosure {
            center: Dyadic::from_f64(2.9).unwrap(),
            radius: Dyadic::from_f64(0.2).unwrap(),
            precision: 10,
        };
        assert!(e.touches_any_integer());
        let e2 = Enclosure {
            center: Dyadic::from_f64(2.5).unwrap(),
            radius: Dyadic::from_f64(0.2).unwrap(),
            precision: 10,
        };
        assert!(!e2.touches_any_integer());
    }
}
