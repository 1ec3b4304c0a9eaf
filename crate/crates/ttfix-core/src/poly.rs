//! Dense univariate polynomials with rational coefficients.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rational number type used throughout.
pub type Rational = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial with coefficients stored from degree 0 upward; never has a
/// trailing zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    /// Builds a polynomial from low-to-high coefficients.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// From integer coefficients (low to high).
    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| rat(x)).collect())
    }

    /// Constant polynomial.
    pub fn constant(c: Rational) -> Self {
        Poly::new(alloc::vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// The constant one.
    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficients from degree 0 upward.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    /// Sum.
    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    /// Difference.
    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    /// Negation.
    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// Product.
    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = alloc::vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: returns `(q, r)` with `self = q·d + r`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let lead = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = alloc::vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, b) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * b;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Remainder modulo `d`.
    pub fn rem(&self, d: &Poly) -> Poly {
        if self.coeffs.len() < d.coeffs.len() {
            return self.clone();
        }
        self.divrem(d).1
    }

    /// Monic normalisation (zero stays zero).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead();
        Poly::new(self.coeffs.iter().map(|a| a / &l).collect())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lead().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    /// Square-free part `p / gcd(p, p')`, monic.
    pub fn square_free(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Interval evaluation on `[lo, hi]` (returns an enclosing interval).
    pub fn eval_interval(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        for c in self.coeffs.iter().rev() {
            // [a,b] * [lo,hi]
            let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
            let mut mn = prods[0].clone();
            let mut mx = prods[0].clone();
            for p in &prods[1..] {
                if *p < mn {
                    mn = p.clone();
                }
                if *p > mx {
                    mx = p.clone();
                }
            }
            a = mn + c;
            b = mx + c;
        }
        (a, b)
    }

    /// Approximate value at a float point.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    /// Floating evaluation together with a generous bound on its error when
    /// `x` approximates the true argument to about machine precision.
    pub fn eval_f64_bounded(&self, x: f64) -> (f64, f64) {
        let mut acc = 0.0;
        let mut mag = 0.0;
        let y = x.abs() + 1.0;
        for c in self.coeffs.iter().rev() {
            let cf = rational_to_f64(c);
            acc = acc * x + cf;
            mag = mag * y + cf.abs();
        }
        (acc, mag * 1e-10)
    }

    /// Sturm sequence of a square-free polynomial.
    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = alloc::vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Cauchy bound: every real root has absolute value below it.
    pub fn root_bound(&self) -> Rational {
        let l = self.lead().abs();
        let mut m = Rational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let v = c.abs() / &l;
            if v > m {
                m = v;
            }
        }
        m + Rational::one()
    }
}

fn sign_changes(seq: &[Poly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots of the square-free polynomial with Sturm
/// sequence `seq` in the half-open interval `(a, b]`.
pub fn count_roots(seq: &[Poly], a: &Rational, b: &Rational) -> usize {
    sign_changes(seq, a) - sign_changes(seq, b)
}

/// Converts a rational to the nearest `f64` (approximately).
pub fn rational_to_f64(r: &Rational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Scale down large values to keep within f64 range.
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb.max(db) - 60).max(0) as usize;
    let nn: f64 = bigint_to_f64(&(n >> shift));
    let dd: f64 = bigint_to_f64(&(d >> shift));
    if dd == 0.0 {
        return if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    nn / dd
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(0.0)
}

/// Characteristic polynomial `det(x·I − M)` by the Faddeev–LeVerrier
/// recursion (exact over ℚ).
pub fn char_poly(m: &[Vec<i64>]) -> Poly {
    let n = m.len();
    let a: Vec<Vec<Rational>> = m.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect();
    let mut coeffs = alloc::vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk: Vec<Vec<Rational>> = alloc::vec![alloc::vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // mk = A·mk + c_{n-k+1} I
        let mut next = alloc::vec![alloc::vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() && !mk[l][j].is_zero() {
                        s += &a[i][l] * &mk[l][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        mk = next;
        // c_{n-k} = -tr(A·mk)/k
        let mut tr = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() && !mk[l][i].is_zero() {
                    tr += &a[i][l] * &mk[l][i];
                }
            }
        }
        coeffs[n - k] = -tr / rat(k as i64);
    }
    Poly::new(coeffs)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}·x", c)?,
                _ => write!(f, "{}·x^{}", c, i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn char_poly_of_fibonacci_matrix() {
        let p = char_poly(&[vec![1, 1], vec![1, 0]]);
        assert_eq!(p, Poly::from_ints(&[-1, -1, 1]));
        let p = char_poly(&[vec![2]]);
        assert_eq!(p, Poly::from_ints(&[-2, 1]));
        let p = char_poly(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(p, Poly::from_ints(&[-1, 0, 0, 1]));
    }

    #[test]
    fn gcd_and_square_free() {
        let a = Poly::from_ints(&[-1, 1]).mul(&Poly::from_ints(&[-1, 1])).mul(&Poly::from_ints(&[2, 1]));
        assert_eq!(a.square_free(), Poly::from_ints(&[-1, 1]).mul(&Poly::from_ints(&[2, 1])));
        let (g, s, t) = Poly::from_ints(&[-1, -1, 1]).ext_gcd(&Poly::from_ints(&[0, 1]));
        assert_eq!(g, Poly::one());
        let lhs = s.mul(&Poly::from_ints(&[-1, -1, 1])).add(&t.mul(&Poly::x()));
        assert_eq!(lhs, Poly::one());
    }

    #[test]
    fn sturm_counts() {
        let p = Poly::from_ints(&[-1, -1, 1]);
        let s = p.sturm_sequence();
        assert_eq!(count_roots(&s, &rat(-10), &rat(10)), 2);
        assert_eq!(count_roots(&s, &rat(1), &rat(2)), 1);
        assert_eq!(count_roots(&s, &ratio(162, 100), &rat(2)), 0);
    }

    #[test]
    fn interval_evaluation_encloses_value() {
        let p = Poly::from_ints(&[3, -4, 1]);
        let (a, b) = p.eval_interval(&rat(1), &rat(2));
        let v = p.eval(&ratio(3, 2));
        assert!(a <= v && v <= b);
    }
}

type Complex = (f64, f64);

fn c_mul(a: Complex, b: Complex) -> Complex {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn c_div(a: Complex, b: Complex) -> Complex {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Approximate complex roots of a monic polynomial (Durand–Kerner).
fn complex_roots(p: &Poly) -> Option<Vec<Complex>> {
    let n = p.degree()?;
    let c: Vec<f64> = p.coeffs.iter().map(rational_to_f64).collect();
    let lead = c[n];
    let eval = |z: Complex| -> Complex {
        let mut acc = (0.0, 0.0);
        for k in (0..=n).rev() {
            acc = c_mul(acc, z);
            acc.0 += c[k] / lead;
        }
        acc
    };
    let mut z: Vec<Complex> = Vec::with_capacity(n);
    let mut w = (1.0, 0.0);
    for _ in 0..n {
        z.push(w);
        w = c_mul(w, (0.4, 0.9));
    }
    let mut converged = false;
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = c_mul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let step = c_div(eval(z[i]), den);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            delta = delta.max(step.0.abs() + step.1.abs());
        }
        if delta < 1e-13 {
            converged = true;
            break;
        }
    }
    if converged && z.iter().all(|x| x.0.is_finite() && x.1.is_finite()) {
        Some(z)
    } else {
        None
    }
}

/// The monic integer factor of the monic integer polynomial `p` of least
/// degree that has the root approximated by `root` (its minimal
/// polynomial), verified exactly by division and by `check` (which must
/// confirm that the candidate vanishes at the true root).  Returns `p`
/// itself when every proper candidate is excluded, and `None` when the
/// numerical root finder does not converge.
pub fn minimal_factor(p: &Poly, root: f64, check: impl Fn(&Poly) -> bool) -> Option<Poly> {
    let n = p.degree()?;
    if n <= 1 || n > 16 || !p.lead().is_one() || p.coeffs.iter().any(|c| !c.is_integer()) {
        return None;
    }
    let roots = complex_roots(p)?;
    let (idx, _) = roots
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z.0 - root).abs() + z.1.abs()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
    let others: Vec<Complex> = roots.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, z)| *z).collect();
    let m = others.len();
    let mut masks: Vec<u32> = (0..(1u32 << m)).collect();
    masks.sort_by_key(|x| x.count_ones());
    for mask in masks {
        if mask.count_ones() as usize + 1 >= n {
            break;
        }
        // Product of (x − z) over the chosen roots.
        let mut coeffs: Vec<Complex> = alloc::vec![(-roots[idx].0, -roots[idx].1), (1.0, 0.0)];
        for (k, z) in others.iter().enumerate() {
            if mask & (1 << k) == 0 {
                continue;
            }
            let mut next = alloc::vec![(0.0, 0.0); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i + 1].0 += a.0;
                next[i + 1].1 += a.1;
                let t = c_mul(*a, *z);
                next[i].0 -= t.0;
                next[i].1 -= t.1;
            }
            coeffs = next;
        }
        let mut ints = Vec::with_capacity(coeffs.len());
        let mut ok = true;
        for c in &coeffs {
            let r = libm_round(c.0);
            if (c.0 - r as f64).abs() > 1e-6 || c.1.abs() > 1e-6 {
                ok = false;
                break;
            }
            ints.push(r);
        }
        if !ok {
            continue;
        }
        let q = Poly::from_ints(&ints);
        if p.rem(&q).is_zero() && check(&q) {
            return Some(q);
        }
    }
    Some(p.clone())
}

fn libm_round(x: f64) -> i64 {
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
