//! Exact arithmetic in the ring Z[ψ], where ψ ≈ 0.78615 is the positive real
//! root of x⁴ + x² − 1.
//!
//! Every element is stored as `c0 + c1·ψ + c2·ψ² + c3·ψ³`. The representation is
//! unique, so equality is coefficient-wise. Coefficients live in `i64` while they
//! fit and transparently move to `BigInt` otherwise.
//!
//! The sign of an element is decided by interval evaluation against a certified
//! enclosure of ψ, doubling the working precision until the interval excludes
//! zero. Since ψ has degree four, a non-zero element never evaluates to zero and
//! the refinement always terminates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// ψ as a double, for approximate work only (spatial indexing, rendering).
pub const PSI_F64: f64 = 0.786_151_377_757_423_3;

/// Sign of a real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match self.as_i8() * rhs.as_i8() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small([i64; 4]),
    Big(Box<[BigInt; 4]>),
}

/// An element `c0 + c1·ψ + c2·ψ² + c3·ψ³` of Z[ψ].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicNum {
    repr: Repr,
}

impl AlgebraicNum {
    pub const fn new(c0: i64, c1: i64, c2: i64, c3: i64) -> AlgebraicNum {
        AlgebraicNum {
            repr: Repr::Small([c0, c1, c2, c3]),
        }
    }

    pub fn from_coeffs(c: [BigInt; 4]) -> AlgebraicNum {
        let small: Option<Vec<i64>> = c.iter().map(|x| x.to_i64()).collect();
        match small {
            Some(s) => AlgebraicNum::new(s[0], s[1], s[2], s[3]),
            None => AlgebraicNum {
                repr: Repr::Big(Box::new(c)),
            },
        }
    }

    fn from_i128(c: [i128; 4]) -> AlgebraicNum {
        let fits = c.iter().all(|&x| i64::try_from(x).is_ok());
        if fits {
            AlgebraicNum::new(c[0] as i64, c[1] as i64, c[2] as i64, c[3] as i64)
        } else {
            AlgebraicNum::from_coeffs(c.map(BigInt::from))
        }
    }

    pub const fn zero() -> AlgebraicNum {
        AlgebraicNum::new(0, 0, 0, 0)
    }

    pub const fn one() -> AlgebraicNum {
        AlgebraicNum::new(1, 0, 0, 0)
    }

    pub const fn from_int(n: i64) -> AlgebraicNum {
        AlgebraicNum::new(n, 0, 0, 0)
    }

    pub const fn psi() -> AlgebraicNum {
        AlgebraicNum::new(0, 1, 0, 0)
    }

    /// ψⁿ for any integer n; ψ is a unit with ψ⁻¹ = ψ + ψ³.
    pub fn psi_pow(n: i32) -> AlgebraicNum {
        let mut acc = AlgebraicNum::one();
        if n >= 0 {
            for _ in 0..n {
                acc = acc.mul_psi();
            }
        } else {
            for _ in 0..(-n) {
                acc = acc.div_psi();
            }
        }
        acc
    }

    pub fn coeffs(&self) -> [BigInt; 4] {
        match &self.repr {
            Repr::Small(c) => c.map(BigInt::from),
            Repr::Big(c) => (**c).clone(),
        }
    }

    /// The coefficients when all of them fit in an `i64`.
    pub fn small_coeffs(&self) -> Option<[i64; 4]> {
        match &self.repr {
            Repr::Small(c) => Some(*c),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Small([0, 0, 0, 0]))
    }

    /// Multiplication by ψ, using ψ⁴ = 1 − ψ².
    pub fn mul_psi(&self) -> AlgebraicNum {
        match &self.repr {
            Repr::Small([c0, c1, c2, c3]) => match c1.checked_sub(*c3) {
                Some(d) => AlgebraicNum::new(*c3, *c0, d, *c2),
                None => self.mul_psi_big(),
            },
            Repr::Big(_) => self.mul_psi_big(),
        }
    }

    fn mul_psi_big(&self) -> AlgebraicNum {
        let [c0, c1, c2, c3] = self.coeffs();
        AlgebraicNum::from_coeffs([c3.clone(), c0, c1 - c3, c2])
    }

    /// Division by ψ, i.e. multiplication by ψ + ψ³.
    pub fn div_psi(&self) -> AlgebraicNum {
        // (c0 + c1ψ + c2ψ² + c3ψ³)/ψ = c1 + c2ψ + c3ψ² + c0ψ⁻¹ and ψ⁻¹ = ψ + ψ³.
        match &self.repr {
            Repr::Small([c0, c1, c2, c3]) => match c2.checked_add(*c0) {
                Some(s) => AlgebraicNum::new(*c1, s, *c3, *c0),
                None => self.div_psi_big(),
            },
            Repr::Big(_) => self.div_psi_big(),
        }
    }

    fn div_psi_big(&self) -> AlgebraicNum {
        let [c0, c1, c2, c3] = self.coeffs();
        AlgebraicNum::from_coeffs([c1, c2 + &c0, c3, c0])
    }

    /// Approximate value; never used to make exact decisions.
    pub fn to_f64(&self) -> f64 {
        let p = PSI_F64;
        match &self.repr {
            Repr::Small([c0, c1, c2, c3]) => {
                *c0 as f64 + p * (*c1 as f64 + p * (*c2 as f64 + p * (*c3 as f64)))
            }
            Repr::Big(c) => {
                let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
                f(&c[0]) + p * (f(&c[1]) + p * (f(&c[2]) + p * f(&c[3])))
            }
        }
    }

    /// Exact sign of the real value at ψ.
    pub fn sign(&self) -> Sign {
        if self.is_zero() {
            return Sign::Zero;
        }
        if let Repr::Small(c) = &self.repr {
            if let Some(s) = sign_small_64(c) {
                return s;
            }
        }
        let c = self.coeffs();
        let mut level = 0;
        loop {
            let enc = enclosure(level);
            if let Some(s) = enc.decide(&c) {
                return s;
            }
            level += 1;
        }
    }

    pub fn abs(&self) -> AlgebraicNum {
        if self.sign() == Sign::Negative {
            -self
        } else {
            self.clone()
        }
    }

    fn mul_ref(&self, other: &AlgebraicNum) -> AlgebraicNum {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.repr, &other.repr) {
            if let Some(r) = mul_small(a, b) {
                return AlgebraicNum::from_i128(r);
            }
        }
        let a = self.coeffs();
        let b = other.coeffs();
        let mut p: [BigInt; 7] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                p[i + j] += &a[i] * &b[j];
            }
        }
        let [p0, p1, p2, p3, p4, p5, p6] = p;
        AlgebraicNum::from_coeffs([&p0 + &p4 - &p6, &p1 + &p5, p2 - &p4 + &p6 * 2, p3 - &p5])
    }

    fn add_ref(&self, other: &AlgebraicNum) -> AlgebraicNum {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.repr, &other.repr) {
            let r = [0, 1, 2, 3].map(|i| a[i] as i128 + b[i] as i128);
            return AlgebraicNum::from_i128(r);
        }
        let a = self.coeffs();
        let b = other.coeffs();
        AlgebraicNum::from_coeffs([0, 1, 2, 3].map(|i| &a[i] + &b[i]))
    }

    fn neg_ref(&self) -> AlgebraicNum {
        match &self.repr {
            Repr::Small(a) => AlgebraicNum::from_i128(a.map(|x| -(x as i128))),
            Repr::Big(c) => AlgebraicNum::from_coeffs(c.clone().map(|x| -x)),
        }
    }
}

/// Product in Z[ψ] via ψ⁴ = 1 − ψ², ψ⁵ = ψ − ψ³, ψ⁶ = 2ψ² − 1.
fn mul_small(a: &[i64; 4], b: &[i64; 4]) -> Option<[i128; 4]> {
    let mut p = [0i128; 7];
    for i in 0..4 {
        for j in 0..4 {
            let t = (a[i] as i128).checked_mul(b[j] as i128)?;
            p[i + j] = p[i + j].checked_add(t)?;
        }
    }
    Some([
        p[0].checked_add(p[4])?.checked_sub(p[6])?,
        p[1].checked_add(p[5])?,
        p[2].checked_sub(p[4])?.checked_add(p[6].checked_mul(2)?)?,
        p[3].checked_sub(p[5])?,
    ])
}

/// Certified enclosures `lo[k] < ψ^(k+1)·2^bits < hi[k]` for k = 0, 1, 2.
struct Enclosure {
    bits: u32,
    lo: [BigInt; 3],
    hi: [BigInt; 3],
}

impl Enclosure {
    /// Bisection on f(x) = x⁴ + x² − 1, which is increasing on [0, 1]
    /// with f(0) < 0 < f(1).
    fn compute(bits: u32) -> Enclosure {
        let one = BigInt::one() << bits;
        let one2 = &one * &one;
        let one4 = &one2 * &one2;
        let f = |m: &BigInt| {
            let m2 = m * m;
            &m2 * &m2 + &m2 * &one2 - &one4
        };
        let mut lo = BigInt::zero();
        let mut hi = one.clone();
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if f(&mid).is_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut lo_pows: [BigInt; 3] = Default::default();
        let mut hi_pows: [BigInt; 3] = Default::default();
        let mut lp = BigInt::one();
        let mut hp = BigInt::one();
        for k in 0..3 {
            lp *= &lo;
            hp *= &hi;
            let scale = BigInt::one() << (bits as usize * k);
            lo_pows[k] = lp.div_floor(&scale);
            hi_pows[k] = hp.div_ceil(&scale);
        }
        Enclosure {
            bits,
            lo: lo_pows,
            hi: hi_pows,
        }
    }

    fn decide(&self, c: &[BigInt; 4]) -> Option<Sign> {
        let mut low = &c[0] << self.bits;
        let mut high = low.clone();
        for k in 0..3 {
            let ck = &c[k + 1];
            if ck.is_negative() {
                low += ck * &self.hi[k];
                high += ck * &self.lo[k];
            } else {
                low += ck * &self.lo[k];
                high += ck * &self.hi[k];
            }
        }
        if low.is_positive() {
            Some(Sign::Positive)
        } else if high.is_negative() {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

fn enclosure(level: usize) -> Arc<Enclosure> {
    static CACHE: OnceLock<Mutex<Vec<Arc<Enclosure>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    while guard.len() <= level {
        let bits = 64u32 << guard.len();
        guard.push(Arc::new(Enclosure::compute(bits)));
    }
    guard[level].clone()
}

/// The 64-bit enclosure as machine integers.
fn enclosure64() -> &'static [(i128, i128); 3] {
    static E64: OnceLock<[(i128, i128); 3]> = OnceLock::new();
    E64.get_or_init(|| {
        let e = enclosure(0);
        [0, 1, 2].map(|k| {
            (
                e.lo[k].to_i128().expect("enclosure fits in i128"),
                e.hi[k].to_i128().expect("enclosure fits in i128"),
            )
        })
    })
}

fn sign_small_64(c: &[i64; 4]) -> Option<Sign> {
    let e = enclosure64();
    let mut low = (c[0] as i128).checked_mul(1i128 << 64)?;
    let mut high = low;
    for k in 0..3 {
        let ck = c[k + 1] as i128;
        let (a, b) = (ck.checked_mul(e[k].0)?, ck.checked_mul(e[k].1)?);
        let (mn, mx) = if ck < 0 { (b, a) } else { (a, b) };
        low = low.checked_add(mn)?;
        high = high.checked_add(mx)?;
    }
    if low > 0 {
        Some(Sign::Positive)
    } else if high < 0 {
        Some(Sign::Negative)
    } else {
        None
    }
}

impl PartialOrd for AlgebraicNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordering by real value.
impl Ord for AlgebraicNum {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).sign().to_ordering()
    }
}

impl Default for AlgebraicNum {
    fn default() -> Self {
        AlgebraicNum::zero()
    }
}

impl From<i64> for AlgebraicNum {
    fn from(n: i64) -> Self {
        AlgebraicNum::from_int(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&AlgebraicNum> for &AlgebraicNum {
            type Output = AlgebraicNum;
            fn $method(self, rhs: &AlgebraicNum) -> AlgebraicNum {
                $body(self, rhs)
            }
        }
        impl $tr<AlgebraicNum> for AlgebraicNum {
            type Output = AlgebraicNum;
            fn $method(self, rhs: AlgebraicNum) -> AlgebraicNum {
                $body(&self, &rhs)
            }
        }
        impl $tr<&AlgebraicNum> for AlgebraicNum {
            type Output = AlgebraicNum;
            fn $method(self, rhs: &AlgebraicNum) -> AlgebraicNum {
                $body(&self, rhs)
            }
        }
        impl $tr<AlgebraicNum> for &AlgebraicNum {
            type Output = AlgebraicNum;
            fn $method(self, rhs: AlgebraicNum) -> AlgebraicNum {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &AlgebraicNum, b: &AlgebraicNum| a.add_ref(b));
forward_binop!(Sub, sub, |a: &AlgebraicNum, b: &AlgebraicNum| a
    .add_ref(&b.neg_ref()));
forward_binop!(Mul, mul, |a: &AlgebraicNum, b: &AlgebraicNum| a.mul_ref(b));

impl Neg for AlgebraicNum {
    type Output = AlgebraicNum;
    fn neg(self) -> AlgebraicNum {
        self.neg_ref()
    }
}

impl Neg for &AlgebraicNum {
    type Output = AlgebraicNum;
    fn neg(self) -> AlgebraicNum {
        self.neg_ref()
    }
}

impl AddAssign<&AlgebraicNum> for AlgebraicNum {
    fn add_assign(&mut self, rhs: &AlgebraicNum) {
        *self = self.add_ref(rhs);
    }
}

impl SubAssign<&AlgebraicNum> for AlgebraicNum {
    fn sub_assign(&mut self, rhs: &AlgebraicNum) {
        *self = self.add_ref(&rhs.neg_ref());
    }
}

impl std::iter::Sum for AlgebraicNum {
    fn sum<I: Iterator<Item = AlgebraicNum>>(iter: I) -> Self {
        iter.fold(AlgebraicNum::zero(), |a, b| a + b)
    }
}

impl fmt::Debug for AlgebraicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        write!(f, "[{}, {}, {}, {}]", c[0], c[1], c[2], c[3])
    }
}

impl fmt::Display for AlgebraicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        let names = ["", "ψ", "ψ²", "ψ³"];
        let mut first = true;
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let neg = ck.is_negative();
            let mag = ck.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if k == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "{}", names[k])?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for AlgebraicNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.repr {
            Repr::Small(c) => c.serialize(s),
            Repr::Big(c) => {
                let wide: Option<Vec<i128>> = c.iter().map(|x| x.to_i128()).collect();
                match wide {
                    Some(w) => w.serialize(s),
                    None => Err(serde::ser::Error::custom(
                        "coefficient exceeds the 128-bit JSON range",
                    )),
                }
            }
        }
    }
}

impl<'de> Deserialize<'de> for AlgebraicNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<i128> = Vec::deserialize(d)?;
        let arr: [i128; 4] = v
            .try_into()
            .map_err(|v: Vec<i128>| D::Error::invalid_length(v.len(), &"4 coefficients"))?;
        Ok(AlgebraicNum::from_i128(arr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(c0: i64, c1: i64, c2: i64, c3: i64) -> AlgebraicNum {
        AlgebraicNum::new(c0, c1, c2, c3)
    }

    #[test]
    fn add_examples() {
        assert_eq!(n(1, 0, 0, 0) + n(0, 1, 0, 0), n(1, 1, 0, 0));
        let a = n(3, -7, 11, 2);
        assert_eq!(&a + &(-&a), AlgebraicNum::zero());
        assert_eq!(
            AlgebraicNum::psi_pow(2) + AlgebraicNum::psi_pow(4),
            n(1, 0, 0, 0)
        );
    }

    #[test]
    fn mul_examples() {
        let psi = AlgebraicNum::psi();
        assert_eq!(&psi * &n(0, 0, 0, 1), n(1, 0, -1, 0));
        assert_eq!(&psi * &n(0, 1, 0, 1), n(1, 0, 0, 0));
        assert_eq!(n(0, 0, 0, 1) * n(0, 0, 0, 1), n(-1, 0, 2, 0));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(n(0, 0, 0, 0).sign(), Sign::Zero);
        assert_eq!(n(-1, 2, 0, 0).sign(), Sign::Positive);
        assert_eq!(n(0, -1, 1, 0).sign(), Sign::Negative);
    }

    #[test]
    fn psi_pow_examples() {
        assert_eq!(AlgebraicNum::psi_pow(0), n(1, 0, 0, 0));
        assert_eq!(AlgebraicNum::psi_pow(5), n(0, 1, 0, -1));
        assert_eq!(AlgebraicNum::psi_pow(-1), n(0, 1, 0, 1));
        assert_eq!(AlgebraicNum::psi_pow(6), n(-1, 0, 2, 0));
    }

    #[test]
    fn big_coefficients_round_trip_through_small() {
        let big = AlgebraicNum::from_int(i64::MAX);
        let sum = &big + &big;
        assert!(sum.small_coeffs().is_none());
        let back = &sum - &big;
        assert_eq!(back.small_coeffs(), Some([i64::MAX, 0, 0, 0]));
        assert_eq!(sum.sign(), Sign::Positive);
    }

    #[test]
    fn sign_needs_refinement_for_near_zero_values() {
        // ψ^200 ≈ 1e-21 while its coefficients are around 1e21, so the 64-bit
        // interval cannot decide it.
        let tiny = AlgebraicNum::psi_pow(200);
        assert_eq!(tiny.sign(), Sign::Positive);
        assert_eq!((-&tiny).sign(), Sign::Negative);
    }

    #[test]
    fn enclosure_brackets_psi() {
        let e = enclosure(1);
        let scale = (e.bits as f64).exp2();
        let lo = e.lo[0].to_f64().unwrap() / scale;
        let hi = e.hi[0].to_f64().unwrap() / scale;
        assert!(lo <= PSI_F64 && PSI_F64 <= hi);
    }

    #[test]
    fn json_is_a_four_integer_array() {
        let a = n(1, -2, 3, -4);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[1,-2,3,-4]");
        let b: AlgebraicNum = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<AlgebraicNum>("[1,2,3]").is_err());
    }

    #[test]
    fn display() {
        assert_eq!(n(1, -1, 0, 2).to_string(), "1 - ψ + 2ψ³");
        assert_eq!(n(0, 0, 0, 0).to_string(), "0");
    }
}
