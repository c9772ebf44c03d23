//! The boxes `A_m(Λ)` and their scaled copies `A_m(sΛ)`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::numberfield::{Element, NiceBasis};

/// An exact positive real `coeff · base^(p/q)`.
///
/// Box bounds such as `C₁·n^α/r` are rarely rational, so bounds are kept in
/// this closed form and compared against integer powers exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    coeff: BigRational,
    base: BigInt,
    p: u32,
    q: u32,
}

impl Bound {
    pub fn rational(m: BigRational) -> Result<Self> {
        if !m.is_positive() {
            return Err(invalid("m", format!("{m} must be positive")));
        }
        Ok(Bound {
            coeff: m,
            base: BigInt::one(),
            p: 0,
            q: 1,
        })
    }

    pub fn integer(m: u64) -> Result<Self> {
        Self::rational(BigRational::from_integer(m.into()))
    }

    /// `coeff · base^(p/q)`.
    pub fn power(coeff: BigRational, base: u64, p: u32, q: u32) -> Result<Self> {
        if !coeff.is_positive() {
            return Err(invalid("m", format!("coefficient {coeff} must be positive")));
        }
        if base == 0 || q == 0 {
            return Err(invalid("m", "base and exponent denominator must be positive"));
        }
        let g = p.gcd(&q).max(1);
        Ok(Bound {
            coeff,
            base: base.into(),
            p: p / g,
            q: q / g,
        })
    }

    /// Compares `x^k` with this bound, for `x ≥ 0`.
    pub fn cmp_power(&self, x: &BigRational, k: u32) -> Ordering {
        // x^k vs c·N^(p/q)  <=>  (x^k)^q · cden^q  vs  cnum^q · N^p · ...
        // with x = a/b: a^(kq) · cden^q  vs  cnum^q · N^p · b^(kq)
        let kq = k * self.q;
        let lhs = Pow::pow(x.numer(), kq) * Pow::pow(self.coeff.denom(), self.q);
        let rhs = Pow::pow(self.coeff.numer(), self.q)
            * Pow::pow(&self.base, self.p)
            * Pow::pow(x.denom(), kq);
        lhs.cmp(&rhs)
    }

    /// Largest integer `u ≥ 0` with `u^k ≤ self`.
    pub fn floor_root(&self, k: u32) -> BigInt {
        let est = self.approx().powf(1.0 / k as f64);
        let mut u = if est.is_finite() {
            BigInt::from(est.floor().max(0.0) as u64)
        } else {
            BigInt::zero()
        };
        let le = |u: &BigInt| {
            self.cmp_power(&BigRational::from_integer(u.clone()), k) != Ordering::Greater
        };
        while u.is_positive() && !le(&u) {
            u -= 1;
        }
        loop {
            let next = &u + 1;
            if le(&next) {
                u = next;
            } else {
                break;
            }
        }
        u
    }

    /// True when the bound is at least `x` (rational).
    pub fn ge_rational(&self, x: &BigRational) -> bool {
        if !x.is_positive() {
            return true;
        }
        self.cmp_power(x, 1) != Ordering::Greater
    }

    /// Floating approximation; diagnostics and root seeding only.
    pub fn approx(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::INFINITY);
        let n = self.base.to_f64().unwrap_or(f64::INFINITY);
        c * n.powf(self.p as f64 / self.q as f64)
    }

    /// `self · factor` for a positive rational factor.
    pub fn scaled(&self, factor: &BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(invalid("m", "scale factor must be positive"));
        }
        Ok(Bound {
            coeff: &self.coeff * factor,
            ..self.clone()
        })
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 || self.base.is_one() {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "{}*{}^({}/{})", self.coeff, self.base, self.p, self.q)
        }
    }
}

/// `⌊m^{1/d}/3⌋`: the largest `t` with `(3t)^d ≤ m`.
pub fn gap_radius(m: &Bound, d: usize) -> BigInt {
    m.floor_root(d as u32) / 3
}

/// [`gap_radius`] for a rational bound.
pub fn gap_radius_rational(m: &BigRational, d: usize) -> Result<BigInt> {
    Ok(gap_radius(&Bound::rational(m.clone())?, d))
}

/// `A_m(sΛ)`: elements `s·(a_1, …, a_d)` with `|a_i| ≤ ⌊m^{1/d}/3⌋`.
#[derive(Clone, Debug)]
pub struct GapSet {
    basis: Arc<NiceBasis>,
    m: Bound,
    radius: BigInt,
    scale: BigInt,
}

impl GapSet {
    pub fn new(basis: Arc<NiceBasis>, m: Bound, scale: BigInt) -> Result<Self> {
        if !scale.is_positive() {
            return Err(invalid("scale", format!("{scale} must be at least 1")));
        }
        let radius = gap_radius(&m, basis.degree());
        Ok(GapSet {
            basis,
            m,
            radius,
            scale,
        })
    }

    /// `A_m(Λ)` for a rational `m`.
    pub fn generate(basis: Arc<NiceBasis>, m: BigRational, scale: u64) -> Result<Self> {
        Self::new(basis, Bound::rational(m)?, scale.into())
    }

    pub fn basis(&self) -> &Arc<NiceBasis> {
        &self.basis
    }

    pub fn bound(&self) -> &Bound {
        &self.m
    }

    pub fn radius(&self) -> &BigInt {
        &self.radius
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    /// `(2·radius + 1)^d`.
    pub fn cardinality(&self) -> BigInt {
        Pow::pow(&self.radius * 2 + 1, self.degree() as u32)
    }

    pub fn contains(&self, e: &Element) -> bool {
        e.degree() == self.degree()
            && e.coords().iter().all(|c| {
                let (quot, rem) = c.div_rem(&self.scale);
                rem.is_zero() && quot.abs() <= self.radius
            })
    }

    /// Elements in lexicographic coordinate order.
    pub fn iter(&self) -> GapIter<'_> {
        let r = self.radius.to_i64().expect("gap radius fits in i64");
        GapIter {
            set: self,
            radius: r,
            cursor: Some(vec![-r; self.degree()]),
        }
    }

    pub fn elements(&self) -> Vec<Element> {
        self.iter().collect()
    }
}

pub struct GapIter<'a> {
    set: &'a GapSet,
    radius: i64,
    cursor: Option<Vec<i64>>,
}

impl Iterator for GapIter<'_> {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        let cur = self.cursor.as_mut()?;
        let out = Element::new(
            cur.iter()
                .map(|&c| BigInt::from(c) * &self.set.scale)
                .collect(),
        );
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cursor = None;
                break;
            }
            i -= 1;
            if cur[i] < self.radius {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = -self.radius;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Membership in `A_m(sΛ)` for a rational `m`.
pub fn contains(basis: &NiceBasis, m: &BigRational, s: &BigInt, e: &Element) -> Result<bool> {
    if !s.is_positive() {
        return Err(invalid("scale", format!("{s} must be at least 1")));
    }
    let radius = gap_radius_rational(m, basis.degree())?;
    Ok(e.degree() == basis.degree()
        && e.coords().iter().all(|c| {
            let (quot, rem) = c.div_rem(s);
            rem.is_zero() && quot.abs() <= radius
        }))
}

fn check_at_least_one(name: &'static str, m: &BigRational) -> Result<()> {
    if *m < BigRational::one() {
        return Err(invalid(name, format!("{m} must be at least 1")));
    }
    Ok(())
}

/// `2^d · max{m, m'}`: sums and differences of `A_m` and `A_{m'}` elements
/// lie in `A` of this bound.
pub fn sum_bound(m: &BigRational, m_prime: &BigRational, d: usize) -> Result<BigRational> {
    check_at_least_one("m", m)?;
    check_at_least_one("m'", m_prime)?;
    let two_d = BigRational::from_integer(Pow::pow(BigInt::from(2), d as u32));
    Ok(two_d * m.max(m_prime).clone())
}

/// `(d²·C_Λ)^d · m · m'`: products of `A_m` and `A_{m'}` elements lie in `A`
/// of this bound.
pub fn product_bound(
    m: &BigRational,
    m_prime: &BigRational,
    d: usize,
    c_lambda: &BigInt,
) -> Result<BigRational> {
    check_at_least_one("m", m)?;
    check_at_least_one("m'", m_prime)?;
    let factor = Pow::pow(BigInt::from(d * d) * c_lambda, d as u32);
    Ok(BigRational::from_integer(factor) * m * m_prime)
}
