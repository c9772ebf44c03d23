//! Exact arithmetic in the ring spanned by a nice basis.
//!
//! A nice basis `{λ_1, …, λ_d}` is presented by its integer structure
//! constants `c[i][j][k]`, where `λ_i·λ_j = Σ_k c[i][j][k]·λ_k`. Every
//! exactness-critical operation works on integer or rational coordinate
//! vectors; the complex embedding is kept around only for diagnostics.

use std::fmt;
use std::hash::{Hash, Hasher};

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Complex64 = Complex<f64>;

/// JSON description of a basis, as accepted by the harness config.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BasisSpec {
    Integers,
    Quadratic { k: i64 },
    /// Non-leading coefficients `p_0..p_{d-1}` of a monic polynomial.
    Power { minpoly: Vec<i64> },
}

impl BasisSpec {
    pub fn build(&self) -> Result<NiceBasis> {
        match self {
            BasisSpec::Integers => NiceBasis::integers(),
            BasisSpec::Quadratic { k } => NiceBasis::quadratic(*k),
            BasisSpec::Power { minpoly } => {
                let p: Vec<BigInt> = minpoly.iter().map(|&c| BigInt::from(c)).collect();
                NiceBasis::power(&p)
            }
        }
    }
}

/// Integer coordinates `(a_1, …, a_d)` of `Σ a_i λ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Vec<BigInt>);

impl Element {
    pub fn new(coords: Vec<BigInt>) -> Self {
        Element(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        Element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Element(vec![BigInt::zero(); degree])
    }

    /// The `i`-th basis vector `λ_{i+1}`.
    pub fn basis_vector(degree: usize, i: usize) -> Self {
        let mut e = Self::zero(degree);
        e.0[i] = BigInt::one();
        e
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> RationalElement {
        RationalElement(self.0.iter().cloned().map(BigRational::from_integer).collect())
    }

    /// Multiplies every coordinate by an integer scalar.
    pub fn scale(&self, s: &BigInt) -> Element {
        Element(self.0.iter().map(|c| c * s).collect())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Rational coordinates of an element of the fraction field.
///
/// Each coordinate is a `BigRational`, which is always kept in lowest terms
/// with a positive denominator, so equal field elements have identical
/// coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalElement(Vec<BigRational>);

impl RationalElement {
    pub fn new(coords: Vec<BigRational>) -> Self {
        RationalElement(coords.into_iter().map(|q| q.reduced()).collect())
    }

    /// Trusts that every coordinate is already in lowest terms.
    pub(crate) fn from_reduced(coords: Vec<BigRational>) -> Self {
        RationalElement(coords)
    }

    pub fn zero(degree: usize) -> Self {
        RationalElement(vec![BigRational::zero(); degree])
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Returns the integer element if every coordinate has denominator 1.
    pub fn to_integral(&self) -> Option<Element> {
        self.0
            .iter()
            .map(|q| q.is_integer().then(|| q.numer().clone()))
            .collect::<Option<Vec<_>>>()
            .map(Element)
    }

    pub fn add(&self, other: &RationalElement) -> RationalElement {
        RationalElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RationalElement) -> RationalElement {
        RationalElement(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> RationalElement {
        RationalElement(self.0.iter().map(|a| -a).collect())
    }

    /// Splits into integer numerators over a common positive denominator.
    fn over_common_denominator(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let nums = self
            .0
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        (nums, den)
    }

    fn from_numerators(nums: Vec<BigInt>, den: &BigInt) -> Self {
        RationalElement(
            nums.into_iter()
                .map(|n| BigRational::new(n, den.clone()))
                .collect(),
        )
    }
}

// Coordinates are always in lowest terms, so hashing the raw numerator
// and denominator agrees with equality.
impl Hash for RationalElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for q in &self.0 {
            q.numer().hash(state);
            q.denom().hash(state);
        }
    }
}

impl fmt::Display for RationalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Exact division by a fixed nonzero element: `M_b^{-1} = scaled / den`
/// with an integer matrix `scaled`.
#[derive(Clone, Debug)]
pub struct Divisor {
    scaled: Vec<Vec<BigInt>>,
    den: BigInt,
}

impl Divisor {
    /// The integer quotient `a / b`, if it exists.
    pub fn divide_exact(&self, a: &Element) -> Option<Element> {
        self.divide_exact_over(&a.0, &BigInt::one())
    }

    /// The integer quotient `(a / extra) / b` for integer coordinates `a`
    /// and a positive integer `extra`, if it exists.
    pub fn divide_exact_over(&self, a: &[BigInt], extra: &BigInt) -> Option<Element> {
        let full;
        let den = if extra.is_one() {
            &self.den
        } else {
            full = &self.den * extra;
            &full
        };
        let mut out = Vec::with_capacity(self.scaled.len());
        for row in &self.scaled {
            let mut acc = BigInt::zero();
            for (m, x) in row.iter().zip(a) {
                if !m.is_zero() && !x.is_zero() {
                    acc += m * x;
                }
            }
            let (q, rem) = num_integer::Integer::div_rem(&acc, den);
            if !rem.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Element(out))
    }

    /// The rational quotient `a / b`.
    pub fn quotient(&self, a: &Element) -> RationalElement {
        RationalElement(
            self.scaled
                .iter()
                .map(|row| {
                    let acc: BigInt = row
                        .iter()
                        .zip(&a.0)
                        .filter(|(m, x)| !m.is_zero() && !x.is_zero())
                        .map(|(m, x)| m * x)
                        .sum();
                    BigRational::new(acc, self.den.clone())
                })
                .collect(),
        )
    }
}

/// A degree-`d` ring presentation by integer structure constants.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct NiceBasis {
    degree: usize,
    /// Flattened `c[i][j][k]` at index `(i * d + j) * d + k`.
    constants: Vec<BigInt>,
    /// Nonzero `(k, c[i][j][k])` per index `i * d + j`.
    sparse: Vec<Vec<(usize, BigInt)>>,
    c_lambda: BigInt,
    embedding: Vec<Complex64>,
    description: String,
    unity: RationalElement,
}

impl NiceBasis {
    /// Builds a basis from explicit structure constants, checking
    /// commutativity, associativity, the embedding identity, and that the
    /// rational span has a multiplicative identity.
    pub fn from_structure_constants(
        degree: usize,
        constants: Vec<BigInt>,
        embedding: Vec<Complex64>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(invalid("degree", "must be at least 1"));
        }
        let d = degree;
        if constants.len() != d * d * d {
            return Err(Error::InvalidBasis(format!(
                "expected {} structure constants, got {}",
                d * d * d,
                constants.len()
            )));
        }
        if embedding.len() != d {
            return Err(Error::InvalidBasis(format!(
                "expected {d} embedded basis values, got {}",
                embedding.len()
            )));
        }
        let idx = |i: usize, j: usize, k: usize| (i * d + j) * d + k;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if constants[idx(i, j, k)] != constants[idx(j, i, k)] {
                        return Err(Error::InvalidBasis(format!(
                            "not commutative at c[{i}][{j}][{k}]"
                        )));
                    }
                }
            }
        }
        // (λ_i λ_j) λ_k == λ_i (λ_j λ_k)
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for out in 0..d {
                        let mut left = BigInt::zero();
                        let mut right = BigInt::zero();
                        for m in 0..d {
                            left += &constants[idx(i, j, m)] * &constants[idx(m, k, out)];
                            right += &constants[idx(j, k, m)] * &constants[idx(i, m, out)];
                        }
                        if left != right {
                            return Err(Error::InvalidBasis(format!(
                                "not associative on (λ{}, λ{}, λ{})",
                                i + 1,
                                j + 1,
                                k + 1
                            )));
                        }
                    }
                }
            }
        }

        let c_lambda = constants
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        let sparse = (0..d * d)
            .map(|ij| {
                (0..d)
                    .filter_map(|k| {
                        let c = &constants[ij * d + k];
                        (!c.is_zero()).then(|| (k, c.clone()))
                    })
                    .collect()
            })
            .collect();

        let mut basis = NiceBasis {
            degree,
            constants,
            sparse,
            c_lambda,
            embedding,
            description: description.into(),
            unity: RationalElement::zero(d),
        };

        let tol = 1e-6 * (1.0 + basis.c_lambda.to_f64().unwrap_or(f64::INFINITY));
        for i in 0..d {
            for j in 0..d {
                let mut expect = Complex64::new(0.0, 0.0);
                for (k, c) in &basis.sparse[i * d + j] {
                    expect += basis.embedding[*k] * c.to_f64().unwrap_or(f64::NAN);
                }
                let err = (basis.embedding[i] * basis.embedding[j] - expect).norm();
                if !(err < tol) {
                    return Err(Error::InvalidBasis(format!(
                        "embedding violates λ{}·λ{} identity by {err:e}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }

        basis.unity = basis.find_unity()?;
        Ok(basis)
    }

    /// Power basis `{1, θ, …, θ^{d-1}}` of the monic polynomial
    /// `x^d + p_{d-1} x^{d-1} + … + p_0`, given as `[p_0, …, p_{d-1}]`.
    ///
    /// Irreducibility is not checked here; a reducible polynomial shows up
    /// later as [`Error::ZeroDivisor`] from [`NiceBasis::divide`].
    pub fn power(minpoly: &[BigInt]) -> Result<Self> {
        if minpoly.is_empty() {
            return Err(Error::InvalidPolynomial(
                "empty coefficient list; degree must be at least 1".into(),
            ));
        }
        let d = minpoly.len();
        // x^e reduced mod the polynomial, for e in 0..2d-1
        let mut powers: Vec<Vec<BigInt>> = Vec::with_capacity(2 * d - 1);
        let mut cur = vec![BigInt::zero(); d];
        cur[0] = BigInt::one();
        powers.push(cur.clone());
        for _ in 1..(2 * d - 1) {
            let top = cur[d - 1].clone();
            let mut next = vec![BigInt::zero(); d];
            for k in (1..d).rev() {
                next[k] = cur[k - 1].clone();
            }
            if !top.is_zero() {
                for (k, p) in minpoly.iter().enumerate() {
                    next[k] -= &top * p;
                }
            }
            powers.push(next.clone());
            cur = next;
        }
        let mut constants = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                constants.extend(powers[i + j].iter().cloned());
            }
        }

        let root = locate_root(minpoly);
        let embedding: Vec<Complex64> = (0..d).map(|i| root.powi(i as i32)).collect();

        Self::from_structure_constants(
            d,
            constants,
            embedding,
            format!("power basis of {}", format_monic(minpoly)),
        )
    }

    /// Power basis from a full coefficient list `[c_0, …, c_d]` (low to
    /// high), which must be monic.
    pub fn power_from_coefficients(coeffs: &[BigInt]) -> Result<Self> {
        match coeffs.split_last() {
            None => Err(Error::InvalidPolynomial("empty polynomial".into())),
            Some((lead, rest)) if lead.is_one() => Self::power(rest),
            Some((lead, _)) => Err(Error::InvalidPolynomial(format!(
                "leading coefficient is {lead}, expected 1"
            ))),
        }
    }

    /// `{1}`: the rational integers.
    pub fn integers() -> Result<Self> {
        let mut b = Self::power(&[BigInt::from(-1)])?;
        b.description = "integers".into();
        Ok(b)
    }

    /// `{1, √k}` for square-free `k ∉ {0, 1}`.
    pub fn quadratic(k: i64) -> Result<Self> {
        if k == 0 || k == 1 {
            return Err(invalid("k", format!("{k} gives a degenerate basis")));
        }
        if !is_square_free(k) {
            return Err(invalid("k", format!("{k} is not square-free")));
        }
        let mut b = Self::power(&[BigInt::from(-k), BigInt::zero()])?;
        b.description = format!("Z[sqrt({k})]");
        Ok(b)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `c[i][j][k]` with zero-based indices.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &BigInt {
        let d = self.degree;
        &self.constants[(i * d + j) * d + k]
    }

    /// `C_Λ`, the largest absolute structure constant.
    pub fn c_lambda(&self) -> &BigInt {
        &self.c_lambda
    }

    pub fn embedding(&self) -> &[Complex64] {
        &self.embedding
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// True when every basis vector embeds as a real number.
    pub fn is_real(&self) -> bool {
        self.embedding.iter().all(|z| z.im == 0.0)
    }

    /// Coordinates of the multiplicative identity.
    pub fn unity(&self) -> &RationalElement {
        &self.unity
    }

    fn check(&self, a: &Element) -> Result<()> {
        if a.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: a.degree(),
            });
        }
        Ok(())
    }

    fn check_rational(&self, a: &RationalElement) -> Result<()> {
        if a.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: a.degree(),
            });
        }
        Ok(())
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(Element(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()))
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(Element(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect()))
    }

    pub fn neg(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(Element(a.0.iter().map(|x| -x).collect()))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(Element(self.mul_coords(&a.0, &b.0)))
    }

    pub(crate) fn mul_coords(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree;
        let mut out = vec![BigInt::zero(); d];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let p = ai * bj;
                for (k, c) in &self.sparse[i * d + j] {
                    out[*k] += c * &p;
                }
            }
        }
        out
    }

    pub fn mul_rational(&self, a: &RationalElement, b: &RationalElement) -> Result<RationalElement> {
        self.check_rational(a)?;
        self.check_rational(b)?;
        let (na, da) = a.over_common_denominator();
        let (nb, db) = b.over_common_denominator();
        Ok(RationalElement::from_numerators(
            self.mul_coords(&na, &nb),
            &(da * db),
        ))
    }

    /// The unique `q` with `q·b = a`.
    pub fn divide(&self, a: &Element, b: &Element) -> Result<RationalElement> {
        self.check(a)?;
        let mut q = self.solve(b, &[&a.0])?;
        Ok(RationalElement(q.pop().expect("one right-hand side")))
    }

    /// The unique `q` with `q·b = a` for a rational numerator `a`.
    pub fn divide_rational(&self, a: &RationalElement, b: &Element) -> Result<RationalElement> {
        self.check_rational(a)?;
        let (na, da) = a.over_common_denominator();
        let q = self.solve(b, &[&na])?.pop().expect("one right-hand side");
        let da = BigRational::from_integer(da);
        Ok(RationalElement(q.into_iter().map(|c| c / &da).collect()))
    }

    /// Divides several integer numerators by the same `b`, sharing one
    /// elimination of the multiplication-by-`b` matrix.
    pub fn divide_many(&self, numerators: &[&Element], b: &Element) -> Result<Vec<RationalElement>> {
        for a in numerators {
            self.check(a)?;
        }
        let rhs: Vec<&[BigInt]> = numerators.iter().map(|a| a.0.as_slice()).collect();
        Ok(self
            .solve(b, &rhs)?
            .into_iter()
            .map(RationalElement)
            .collect())
    }

    /// Precomputes exact division by `b` for repeated use.
    pub fn divisor(&self, b: &Element) -> Result<Divisor> {
        let d = self.degree;
        let units: Vec<Element> = (0..d).map(|k| Element::basis_vector(d, k)).collect();
        let rhs: Vec<&[BigInt]> = units.iter().map(|e| e.0.as_slice()).collect();
        // columns of M_b^{-1}
        let cols = self.solve(b, &rhs)?;
        let den = cols
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let mut scaled = vec![vec![BigInt::zero(); d]; d];
        for (j, col) in cols.iter().enumerate() {
            for (i, q) in col.iter().enumerate() {
                scaled[i][j] = q.numer() * (&den / q.denom());
            }
        }
        Ok(Divisor { scaled, den })
    }

    /// Multiplicative inverse of a nonzero rational element.
    pub fn inverse_rational(&self, b: &RationalElement) -> Result<RationalElement> {
        self.check_rational(b)?;
        let (nb, db) = b.over_common_denominator();
        let inv = self.divide_rational(&self.unity, &Element(nb))?;
        let db = BigRational::from_integer(db);
        Ok(RationalElement(inv.0.into_iter().map(|c| c * &db).collect()))
    }

    /// Solves `M_b · q = rhs` for each right-hand side, where `M_b` is the
    /// multiplication-by-`b` matrix. Fraction-free (Bareiss) forward
    /// elimination, rational back substitution.
    fn solve(&self, b: &Element, rhs: &[&[BigInt]]) -> Result<Vec<Vec<BigRational>>> {
        self.check(b)?;
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.degree;
        if d == 1 {
            let den = &b.0[0] * &self.constants[0];
            if den.is_zero() {
                return Err(Error::ZeroDivisor);
            }
            return Ok(rhs
                .iter()
                .map(|a| vec![BigRational::new(a[0].clone(), den.clone())])
                .collect());
        }

        let width = d + rhs.len();
        let mut m = vec![vec![BigInt::zero(); width]; d];
        // M_b[k][j] = Σ_i b_i c[i][j][k]
        for (i, bi) in b.0.iter().enumerate() {
            if bi.is_zero() {
                continue;
            }
            for j in 0..d {
                for (k, c) in &self.sparse[i * d + j] {
                    m[*k][j] += bi * c;
                }
            }
        }
        for (col, a) in rhs.iter().enumerate() {
            for k in 0..d {
                m[k][d + col] = a[k].clone();
            }
        }

        let mut prev = BigInt::one();
        for col in 0..d {
            let pivot = (col..d)
                .find(|&row| !m[row][col].is_zero())
                .ok_or(Error::ZeroDivisor)?;
            m.swap(col, pivot);
            let (head, tail) = m.split_at_mut(col + 1);
            let prow = &head[col];
            for row in tail.iter_mut() {
                for c in (col + 1)..width {
                    row[c] = (&prow[col] * &row[c] - &row[col] * &prow[c]) / &prev;
                }
                row[col] = BigInt::zero();
            }
            prev = m[col][col].clone();
        }

        let mut out = Vec::with_capacity(rhs.len());
        for col in 0..rhs.len() {
            let mut q = vec![BigRational::zero(); d];
            for row in (0..d).rev() {
                let mut acc = BigRational::from_integer(m[row][d + col].clone());
                for j in (row + 1)..d {
                    if !m[row][j].is_zero() {
                        acc -= &q[j] * BigRational::from_integer(m[row][j].clone());
                    }
                }
                q[row] = acc / BigRational::from_integer(m[row][row].clone());
            }
            out.push(q);
        }
        Ok(out)
    }

    fn find_unity(&self) -> Result<RationalElement> {
        let d = self.degree;
        for j in 0..d {
            let lj = Element::basis_vector(d, j);
            let candidate = match self.divide(&lj, &lj) {
                Ok(u) => u,
                Err(Error::ZeroDivisor) => continue,
                Err(e) => return Err(e),
            };
            let is_identity = (0..d).all(|i| {
                let li = Element::basis_vector(d, i).to_rational();
                self.mul_rational(&candidate, &li).map(|p| p == li).unwrap_or(false)
            });
            if is_identity {
                return Ok(candidate);
            }
        }
        Err(Error::InvalidBasis(
            "the rational span has no multiplicative identity".into(),
        ))
    }

    /// Floating evaluation `Σ a_i·embed(λ_i)`. Diagnostic only.
    pub fn embed(&self, a: &Element) -> Complex64 {
        a.0.iter()
            .zip(&self.embedding)
            .map(|(c, z)| z * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }
}

fn is_square_free(k: i64) -> bool {
    let mut n = k.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn format_monic(p: &[BigInt]) -> String {
    let d = p.len();
    let mut s = if d == 1 { "x".to_string() } else { format!("x^{d}") };
    for e in (0..d).rev() {
        let c = &p[e];
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { " - " } else { " + " };
        let mag = c.abs();
        let term = match e {
            0 => mag.to_string(),
            1 if mag.is_one() => "x".to_string(),
            1 => format!("{mag}x"),
            _ if mag.is_one() => format!("x^{e}"),
            _ => format!("{mag}x^{e}"),
        };
        s.push_str(sign);
        s.push_str(&term);
    }
    s
}

/// One root of the monic polynomial: the largest-modulus real root if any,
/// otherwise the largest-modulus root with the largest real and imaginary
/// parts.
fn locate_root(p: &[BigInt]) -> Complex64 {
    let d = p.len();
    let coeffs: Vec<f64> = p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    if d == 1 {
        return Complex64::new(-coeffs[0], 0.0);
    }
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -coeffs[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        // Horner for f and f'
        let mut f = Complex64::new(1.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            df = df * z + f;
            f = f * z + c;
        }
        (f, df)
    };
    let mut roots: Vec<Complex64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..50 {
                let (f, df) = eval(z);
                if df.norm() == 0.0 {
                    break;
                }
                let step = f / df;
                z -= step;
                if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                    break;
                }
            }
            if z.im.abs() <= 1e-9 * (1.0 + z.norm()) {
                z.im = 0.0;
            }
            z
        })
        .collect();
    let pick = |cands: &mut Vec<Complex64>| -> Option<Complex64> {
        let max = cands.iter().map(|z| z.norm()).fold(f64::NEG_INFINITY, f64::max);
        cands
            .iter()
            .copied()
            .filter(|z| z.norm() >= max - 1e-9 * (1.0 + max))
            .max_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
    };
    let mut real: Vec<Complex64> = roots.iter().copied().filter(|z| z.im == 0.0).collect();
    pick(&mut real)
        .or_else(|| pick(&mut roots))
        .unwrap_or_else(|| Complex64::new(f64::NAN, f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &[i64]) -> Element {
        Element::from_i64s(c)
    }

    fn q(c: &[(i64, i64)]) -> RationalElement {
        RationalElement::new(
            c.iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn power_basis_sqrt2() {
        let b = NiceBasis::power(&[int(-2), int(0)]).unwrap();
        assert_eq!(b.degree(), 2);
        assert_eq!(b.mul(&e(&[0, 1]), &e(&[0, 1])).unwrap(), e(&[2, 0]));
        assert_eq!(*b.c_lambda(), int(2));
    }

    #[test]
    fn power_basis_cube_root_two() {
        let b = NiceBasis::power(&[int(-2), int(0), int(0)]).unwrap();
        assert_eq!(b.mul(&e(&[0, 0, 1]), &e(&[0, 0, 1])).unwrap(), e(&[0, 2, 0]));
        assert_eq!(b.mul(&e(&[0, 1, 0]), &e(&[0, 0, 1])).unwrap(), e(&[2, 0, 0]));
        assert_eq!(*b.c_lambda(), int(2));
        assert!((b.embedding()[1].re - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn linear_polynomial_is_the_integers() {
        let b = NiceBasis::power(&[int(-1)]).unwrap();
        assert_eq!(b.degree(), 1);
        assert_eq!(b.mul(&e(&[1]), &e(&[1])).unwrap(), e(&[1]));
        assert_eq!(*b.c_lambda(), int(1));
        assert_eq!(b.embed(&e(&[7])), Complex64::new(7.0, 0.0));
    }

    #[test]
    fn invalid_polynomials() {
        assert!(matches!(NiceBasis::power(&[]), Err(Error::InvalidPolynomial(_))));
        assert!(matches!(
            NiceBasis::power_from_coefficients(&[int(-2), int(0), int(2)]),
            Err(Error::InvalidPolynomial(_))
        ));
        let b = NiceBasis::power_from_coefficients(&[int(-2), int(0), int(1)]).unwrap();
        assert_eq!(b.description(), "power basis of x^2 - 2");
    }

    #[test]
    fn quadratic_bases() {
        let a = NiceBasis::quadratic(2).unwrap();
        let p = NiceBasis::power(&[int(-2), int(0)]).unwrap();
        assert_eq!(a.constants, p.constants);

        let five = NiceBasis::quadratic(5).unwrap();
        assert_eq!(five.mul(&e(&[0, 1]), &e(&[0, 1])).unwrap(), e(&[5, 0]));
        assert_eq!(*five.c_lambda(), int(5));

        let gauss = NiceBasis::quadratic(-1).unwrap();
        assert_eq!(gauss.mul(&e(&[0, 1]), &e(&[0, 1])).unwrap(), e(&[-1, 0]));
        assert!(!gauss.is_real());
        assert!((gauss.embedding()[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);

        assert!(NiceBasis::quadratic(0).is_err());
        assert!(NiceBasis::quadratic(1).is_err());
        assert!(NiceBasis::quadratic(12).is_err());
    }

    #[test]
    fn additive_group() {
        let b = NiceBasis::quadratic(2).unwrap();
        assert_eq!(b.add(&e(&[1, 2]), &e(&[3, -1])).unwrap(), e(&[4, 1]));
        let a = e(&[5, -7]);
        assert!(b.add(&a, &b.neg(&a).unwrap()).unwrap().is_zero());
        assert!(b.sub(&a, &a).unwrap().is_zero());
        assert!(matches!(
            b.add(&e(&[1]), &a),
            Err(Error::DegreeMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn multiplication_examples() {
        let b = NiceBasis::quadratic(2).unwrap();
        assert_eq!(b.mul(&e(&[1, 1]), &e(&[1, 1])).unwrap(), e(&[3, 2]));
        assert!(b.mul(&e(&[4, -9]), &Element::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn division_examples() {
        let b = NiceBasis::quadratic(2).unwrap();
        let a = e(&[3, -4]);
        assert_eq!(b.divide(&a, &a).unwrap(), q(&[(1, 1), (0, 1)]));
        let inv = b.divide(&e(&[1, 0]), &e(&[1, 1])).unwrap();
        assert_eq!(inv, q(&[(-1, 1), (1, 1)]));
        assert_eq!(
            b.mul_rational(&inv, &e(&[1, 1]).to_rational()).unwrap(),
            e(&[1, 0]).to_rational()
        );
        assert!(b.divide(&Element::zero(2), &a).unwrap().is_zero());
        assert!(matches!(
            b.divide(&a, &Element::zero(2)),
            Err(Error::DivisionByZero)
        ));
        // 1/2 has a genuinely fractional representation
        assert_eq!(
            b.divide(&e(&[1, 0]), &e(&[2, 0])).unwrap(),
            q(&[(1, 2), (0, 1)])
        );
    }

    #[test]
    fn reducible_polynomial_surfaces_as_zero_divisor() {
        // x^2 - 1 = (x - 1)(x + 1)
        let b = NiceBasis::power(&[int(-1), int(0)]).unwrap();
        assert!(matches!(
            b.divide(&e(&[1, 0]), &e(&[1, 1])),
            Err(Error::ZeroDivisor)
        ));
    }

    #[test]
    fn unity_for_power_bases() {
        for p in [vec![-2, 0, 0], vec![-1, -1, 0, 0], vec![-5, 0]] {
            let p: Vec<BigInt> = p.into_iter().map(BigInt::from).collect();
            let b = NiceBasis::power(&p).unwrap();
            let mut one = vec![(0, 1); b.degree()];
            one[0] = (1, 1);
            assert_eq!(*b.unity(), q(&one));
        }
    }

    #[test]
    fn explicit_structure_constants_without_unit_vector() {
        // {2, 2√2}: (2)(2) = 2·(2), (2)(2√2) = 2·(2√2), (2√2)^2 = 4·(2)
        let c = [2, 0, 0, 2, 0, 2, 4, 0].map(BigInt::from).to_vec();
        let emb = vec![Complex64::new(2.0, 0.0), Complex64::new(2.0 * 2f64.sqrt(), 0.0)];
        let b = NiceBasis::from_structure_constants(2, c, emb, "{2, 2sqrt2}").unwrap();
        assert_eq!(*b.unity(), q(&[(1, 2), (0, 1)]));
        let a = e(&[1, 3]);
        assert_eq!(b.divide(&a, &a).unwrap(), *b.unity());
    }

    #[test]
    fn rejects_non_associative_constants() {
        // λ1λ1 = λ2, λ1λ2 = λ1, λ2λ2 = λ1: commutative but not associative
        let c = [0, 1, 1, 0, 1, 0, 1, 0].map(BigInt::from).to_vec();
        let emb = vec![Complex64::new(1.0, 0.0); 2];
        assert!(matches!(
            NiceBasis::from_structure_constants(2, c, emb, "bad"),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn embedding_examples() {
        let b = NiceBasis::quadratic(2).unwrap();
        assert!((b.embed(&e(&[1, 1])).re - 2.414_213_56).abs() < 1e-8);
        assert_eq!(b.embed(&Element::zero(2)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn power_basis_products_are_reductions() {
        // x^4 - x - 1: x^4 = x + 1, x^5 = x^2 + x, x^6 = x^3 + x^2
        let b = NiceBasis::power(&[int(-1), int(-1), int(0), int(0)]).unwrap();
        let v = |i| Element::basis_vector(4, i);
        assert_eq!(b.mul(&v(1), &v(3)).unwrap(), e(&[1, 1, 0, 0]));
        assert_eq!(b.mul(&v(2), &v(3)).unwrap(), e(&[0, 1, 1, 0]));
        assert_eq!(b.mul(&v(3), &v(3)).unwrap(), e(&[0, 0, 1, 1]));
    }

    #[test]
    fn basis_spec_json() {
        let s: BasisSpec = serde_json::from_str(r#"{"type":"power","minpoly":[-2,0,0]}"#).unwrap();
        assert_eq!(s.build().unwrap().degree(), 3);
        let s: BasisSpec = serde_json::from_str(r#"{"type":"quadratic","k":-1}"#).unwrap();
        assert_eq!(s, BasisSpec::Quadratic { k: -1 });
        let s: BasisSpec = serde_json::from_str(r#"{"type":"integers"}"#).unwrap();
        assert_eq!(s.build().unwrap().description(), "integers");
        assert!(serde_json::from_str::<BasisSpec>(r#"{"type":"cyclotomic"}"#).is_err());
    }
}
