//! Exact arithmetic in the number field `ℚ(λ)` generated by a real algebraic
//! number, with certified signs.
//!
//! Elements are rational polynomials in `λ` reduced modulo a square-free
//! polynomial `p` having `λ` as a simple root.  Whenever possible `p` is the
//! minimal polynomial, found by grouping numerically computed roots and
//! verified exactly; then zero tests are syntactic.  Otherwise zero tests
//! are decided by checking whether `λ` is a root of `gcd(e, p)` (Sturm count
//! on the isolating interval), and inverses are taken modulo the cofactor of
//! that gcd.  Signs of nonzero elements are certified by
//! interval evaluation on a shrinking isolating interval.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::poly::{count_roots, minimal_factor, rat, rational_to_f64, Poly, Rational};

/// A real algebraic number `λ` together with a defining polynomial.
#[derive(Debug)]
pub struct NumberField {
    modulus: Poly,
    lo: Rational,
    hi: Rational,
    exact: Option<Rational>,
    approx: f64,
    /// The modulus is known to be irreducible, so an element is zero iff its
    /// reduced representative is.
    irreducible: bool,
}

impl PartialEq for NumberField {
    fn eq(&self, o: &Self) -> bool {
        self.modulus == o.modulus && self.approx == o.approx
    }
}

impl NumberField {
    /// The field generated by the largest real root of `p` (which must have a
    /// real root).  Used for Perron–Frobenius eigenvalues.
    pub fn largest_real_root(p: &Poly) -> Option<Arc<NumberField>> {
        let sf = p.square_free();
        let deg = sf.degree()?;
        if deg == 0 {
            return None;
        }
        let seq = sf.sturm_sequence();
        let bound = sf.root_bound();
        let mut lo = -bound.clone();
        let mut hi = bound;
        if count_roots(&seq, &lo, &hi) == 0 {
            return None;
        }
        // Shrink (lo, hi] to contain exactly the largest root.
        loop {
            let n = count_roots(&seq, &lo, &hi);
            if n == 1 {
                break;
            }
            let mid = (&lo + &hi) / rat(2);
            if count_roots(&seq, &mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(Arc::new(Self::isolate(sf, lo, hi)))
    }

    /// The field `ℚ` with `λ` a given rational number.
    pub fn rational(value: Rational) -> Arc<NumberField> {
        let modulus = Poly::new(alloc::vec![-value.clone(), Rational::one()]);
        let approx = rational_to_f64(&value);
        Arc::new(NumberField { modulus, lo: value.clone(), hi: value.clone(), exact: Some(value), approx, irreducible: true })
    }

    fn isolate(p: Poly, mut lo: Rational, mut hi: Rational) -> NumberField {
        // The root lies in (lo, hi]; check the right endpoint first.
        if p.eval(&hi).is_zero() {
            return Self::exact_root(hi);
        }
        let target = Rational::new(1.into(), num_bigint::BigInt::one() << 48usize);
        let s_hi = p.eval(&hi).signum();
        while &hi - &lo > target {
            let mid = (&lo + &hi) / rat(2);
            let v = p.eval(&mid);
            if v.is_zero() {
                return Self::exact_root(mid);
            }
            if v.signum() == s_hi {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // Detect integer/rational roots near the interval (monic integer
        // characteristic polynomials only have integer rational roots).
        let approx = rational_to_f64(&((&lo + &hi) / rat(2)));
        let r = rat(libm_round(approx));
        if p.eval(&r).is_zero() && r > lo && r <= hi {
            return Self::exact_root(r);
        }
        // Replace the modulus by the minimal polynomial when it can be found.
        let minimal = minimal_factor(&p, approx, |q| {
            count_roots(&q.sturm_sequence(), &lo, &hi) == 1
        });
        match minimal {
            Some(q) => NumberField { modulus: q, lo, hi, exact: None, approx, irreducible: true },
            None => {
                let irreducible = p.degree() == Some(2);
                NumberField { modulus: p, lo, hi, exact: None, approx, irreducible }
            }
        }
    }

    fn exact_root(v: Rational) -> NumberField {
        let modulus = Poly::new(alloc::vec![-v.clone(), Rational::one()]);
        let approx = rational_to_f64(&v);
        NumberField { modulus, lo: v.clone(), hi: v.clone(), exact: Some(v), approx, irreducible: true }
    }

    /// Defining polynomial (square-free, `λ` a simple root).
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// Isolating interval `(lo, hi]` of `λ`.
    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    /// Floating approximation of `λ`.
    pub fn approx(&self) -> f64 {
        self.approx
    }

    /// `λ` if it is rational.
    pub fn exact_value(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    fn is_root_of(&self, e: &Poly) -> bool {
        if let Some(v) = &self.exact {
            return e.eval(v).is_zero();
        }
        if e.is_zero() {
            return true;
        }
        if self.irreducible {
            return e.rem(&self.modulus).is_zero();
        }
        let (v, err) = e.eval_f64_bounded(self.approx);
        if v.is_finite() && err.is_finite() && v.abs() > err {
            return false;
        }
        let (a, b) = e.eval_interval(&self.lo, &self.hi);
        if a.is_positive() || b.is_negative() {
            return false;
        }
        let g = e.gcd(&self.modulus);
        if g.degree() == Some(0) {
            return false;
        }
        count_roots(&g.sturm_sequence(), &self.lo, &self.hi) == 1
    }

    fn sign_of(&self, e: &Poly) -> Ordering {
        if let Some(v) = &self.exact {
            return e.eval(v).cmp(&Rational::zero());
        }
        if e.is_zero() {
            return Ordering::Equal;
        }
        if let Some(d) = e.degree() {
            if d == 0 {
                return e.coeff(0).cmp(&Rational::zero());
            }
        }
        // Fast paths: floating evaluation, then the stored interval.
        let (v, err) = e.eval_f64_bounded(self.approx);
        if v.is_finite() && err.is_finite() && v.abs() > err {
            return if v > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        let (a, b) = e.eval_interval(&self.lo, &self.hi);
        if a.is_positive() {
            return Ordering::Greater;
        }
        if b.is_negative() {
            return Ordering::Less;
        }
        if self.is_root_of(e) {
            return Ordering::Equal;
        }
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let s_hi = self.modulus.eval(&hi).signum();
        loop {
            let mid = (&lo + &hi) / rat(2);
            let v = self.modulus.eval(&mid);
            if v.is_zero() {
                return e.eval(&mid).cmp(&Rational::zero());
            }
            if v.signum() == s_hi {
                hi = mid;
            } else {
                lo = mid;
            }
            let (a, b) = e.eval_interval(&lo, &hi);
            if a.is_positive() {
                return Ordering::Greater;
            }
            if b.is_negative() {
                return Ordering::Less;
            }
        }
    }
}

fn libm_round(x: f64) -> i64 {
    // no_std rounding.
    let t = x as i64;
    let frac = x - t as f64;
    if frac >= 0.5 {
        t + 1
    } else if frac <= -0.5 {
        t - 1
    } else {
        t
    }
}

/// An element of `ℚ(λ)`.
#[derive(Clone)]
pub struct AlgebraicScalar {
    field: Arc<NumberField>,
    poly: Poly,
}

impl AlgebraicScalar {
    /// The element represented by `poly(λ)`.
    pub fn from_poly(field: &Arc<NumberField>, poly: Poly) -> Self {
        let poly = poly.rem(&field.modulus);
        AlgebraicScalar { field: field.clone(), poly }
    }

    /// A rational element.
    pub fn from_rational(field: &Arc<NumberField>, r: Rational) -> Self {
        AlgebraicScalar { field: field.clone(), poly: Poly::constant(r) }
    }

    /// An integer element.
    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, rat(n))
    }

    /// Zero.
    pub fn zero(field: &Arc<NumberField>) -> Self {
        AlgebraicScalar { field: field.clone(), poly: Poly::zero() }
    }

    /// `λ` itself.
    pub fn lambda(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, Poly::x())
    }

    /// The ambient field.
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Representing polynomial (not canonical when the modulus is reducible).
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.field.is_root_of(&self.poly)
    }

    /// Certified sign.
    pub fn signum(&self) -> Ordering {
        self.field.sign_of(&self.poly)
    }

    /// True iff strictly positive.
    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, o: &Self) -> Ordering {
        (self - o).signum()
    }

    /// Floating approximation.
    pub fn approx(&self) -> f64 {
        self.poly.eval_f64(self.field.approx)
    }

    /// Non-negative integer power.
    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(&self.field, 1);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(v) = &self.field.exact {
            return Some(Self::from_rational(&self.field, self.poly.eval(v).recip()));
        }
        // Remove the common factor with the modulus (λ is not a root of it).
        let g = self.poly.gcd(&self.field.modulus);
        let m = self.field.modulus.divrem(&g).0;
        let (h, s, _) = self.poly.ext_gcd(&m);
        debug_assert_eq!(h, Poly::one());
        Some(Self::from_poly(&self.field, s))
    }

    /// Exact quotient; panics on division by zero.
    pub fn div(&self, o: &Self) -> Self {
        self * &o.inverse().expect("division by zero in ℚ(λ)")
    }

    /// Largest integer `≤` this value.
    pub fn floor(&self) -> i64 {
        let mut k = self.approx() as i64;
        let me = self.clone();
        loop {
            let kk = Self::from_int(&self.field, k);
            if kk.cmp_exact(&me) == Ordering::Greater {
                k -= 1;
                continue;
            }
            let k1 = Self::from_int(&self.field, k + 1);
            if k1.cmp_exact(&me) != Ordering::Greater {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// Smallest integer `≥` this value.
    pub fn ceil(&self) -> i64 {
        let f = self.floor();
        if Self::from_int(&self.field, f).cmp_exact(self) == Ordering::Equal {
            f
        } else {
            f + 1
        }
    }
}

impl PartialEq for AlgebraicScalar {
    fn eq(&self, o: &Self) -> bool {
        (self - o).is_zero()
    }
}

impl PartialOrd for AlgebraicScalar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(o))
    }
}

impl<'a> Add<&'a AlgebraicScalar> for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn add(self, o: &AlgebraicScalar) -> AlgebraicScalar {
        AlgebraicScalar { field: self.field.clone(), poly: self.poly.add(&o.poly) }
    }
}

impl<'a> Sub<&'a AlgebraicScalar> for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn sub(self, o: &AlgebraicScalar) -> AlgebraicScalar {
        AlgebraicScalar { field: self.field.clone(), poly: self.poly.sub(&o.poly) }
    }
}

impl<'a> Mul<&'a AlgebraicScalar> for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn mul(self, o: &AlgebraicScalar) -> AlgebraicScalar {
        AlgebraicScalar::from_poly(&self.field, self.poly.mul(&o.poly))
    }
}

impl<'a> Neg for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn neg(self) -> AlgebraicScalar {
        AlgebraicScalar { field: self.field.clone(), poly: self.poly.neg() }
    }
}

impl Add for AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn add(self, o: AlgebraicScalar) -> AlgebraicScalar {
        &self + &o
    }
}

impl Sub for AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn sub(self, o: AlgebraicScalar) -> AlgebraicScalar {
        &self - &o
    }
}

impl Mul for AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn mul(self, o: AlgebraicScalar) -> AlgebraicScalar {
        &self * &o
    }
}

impl fmt::Debug for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (≈{:.6})", self, self.approx())
    }
}

impl fmt::Display for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.poly.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let magnitude = if negative { -c.clone() } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = magnitude.is_one();
            match i {
                0 => write!(f, "{}", magnitude)?,
                _ if !unit => write!(f, "{}", magnitude)?,
                _ => {}
            }
            match i {
                0 => {}
                1 => write!(f, "λ")?,
                _ => write!(f, "λ^{}", i)?,
            }
        }
        Ok(())
    }
}

/// Sum of a sequence of scalars (zero for the empty sequence).
pub fn sum<'a, I: IntoIterator<Item = &'a AlgebraicScalar>>(field: &Arc<NumberField>, it: I) -> AlgebraicScalar {
    let mut acc = Poly::zero();
    for x in it {
        acc = acc.add(&x.poly);
    }
    AlgebraicScalar { field: field.clone(), poly: acc }
}

/// A vector of field elements.
pub type AlgebraicVector = Vec<AlgebraicScalar>;

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<NumberField> {
        NumberField::largest_real_root(&Poly::from_ints(&[-1, -1, 1])).unwrap()
    }

    #[test]
    fn golden_ratio_identities() {
        let k = golden();
        let l = AlgebraicScalar::lambda(&k);
        let one = AlgebraicScalar::from_int(&k, 1);
        assert!((&(&l * &l) - &(&l + &one)).is_zero());
        assert!(l.approx() > 1.61 && l.approx() < 1.62);
        assert_eq!(l.floor(), 1);
        assert_eq!(l.ceil(), 2);
        let inv = l.inverse().unwrap();
        assert!((&(&inv * &l) - &one).is_zero());
        assert!(l > one);
        assert_eq!(l.pow(2), &l + &one);
    }

    #[test]
    fn reducible_modulus_zero_test() {
        // (x² − x − 1)(x + 1): largest root is still the golden ratio.
        let p = Poly::from_ints(&[-1, -1, 1]).mul(&Poly::from_ints(&[1, 1]));
        let k = NumberField::largest_real_root(&p).unwrap();
        let e = AlgebraicScalar::from_poly(&k, Poly::from_ints(&[-1, -1, 1]));
        assert!(e.is_zero());
        let f = AlgebraicScalar::from_poly(&k, Poly::from_ints(&[1, 1]));
        assert!(!f.is_zero());
        assert!(f.is_positive());
        let fi = f.inverse().unwrap();
        assert!((&(&fi * &f) - &AlgebraicScalar::from_int(&k, 1)).is_zero());
    }

    #[test]
    fn integer_root_is_exact() {
        let k = NumberField::largest_real_root(&Poly::from_ints(&[-2, 1])).unwrap();
        assert_eq!(k.exact_value(), Some(&rat(2)));
        let k = NumberField::largest_real_root(&Poly::from_ints(&[-1, 0, 0, 1])).unwrap();
        assert_eq!(k.exact_value(), Some(&rat(1)));
    }

    #[test]
    fn signs_of_tiny_differences() {
        let k = golden();
        let l = AlgebraicScalar::lambda(&k);
        // 987/610 lies just below the golden ratio, 1597/987 just above.
        let q = AlgebraicScalar::from_rational(&k, crate::poly::ratio(987, 610));
        assert_eq!(l.cmp_exact(&q), Ordering::Greater);
        let q = AlgebraicScalar::from_rational(&k, crate::poly::ratio(1597, 987));
        assert_eq!(l.cmp_exact(&q), Ordering::Less);
    }
}
