//! Exact incidence geometry over the fraction field of a nice basis.
//!
//! Lines are stored as `A·X + B·Y + C = 0` with the first nonzero of
//! `(A, B)` normalized to the field's unity, so two lines are equal exactly
//! when their coefficient triples are identical.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numberfield::{Divisor, Element, NiceBasis, RationalElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Element,
    pub y: Element,
}

impl Point {
    pub fn new(x: Element, y: Element) -> Self {
        Point { x, y }
    }

    pub fn from_i64s(x: &[i64], y: &[i64]) -> Self {
        Point::new(Element::from_i64s(x), Element::from_i64s(y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalLine {
    pub a: RationalElement,
    pub b: RationalElement,
    pub c: RationalElement,
}

impl CanonicalLine {
    /// `(A, B, C)` scaled by the least common denominator of all their
    /// coordinates; the same line with integer coefficients.
    pub fn integer_coefficients(&self) -> (Element, Element, Element) {
        let den = self
            .a
            .coords()
            .iter()
            .chain(self.b.coords())
            .chain(self.c.coords())
            .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let scale = |e: &RationalElement| {
            Element::new(e.coords().iter().map(|q| q.numer() * (&den / q.denom())).collect())
        };
        (scale(&self.a), scale(&self.b), scale(&self.c))
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// The same line shifted by `(dx, dy)`: `A(X−dx) + B(Y−dy) + C = 0`.
    pub fn translated(&self, basis: &NiceBasis, dx: &Element, dy: &Element) -> Result<Self> {
        let ax = basis.mul_rational(&self.a, &dx.to_rational())?;
        let by = basis.mul_rational(&self.b, &dy.to_rational())?;
        Ok(CanonicalLine {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.sub(&ax).sub(&by),
        })
    }
}

impl fmt::Display for CanonicalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·X + {}·Y + {} = 0", self.a, self.b, self.c)
    }
}

fn check_point(basis: &NiceBasis, p: &Point) -> Result<()> {
    for e in [&p.x, &p.y] {
        if e.degree() != basis.degree() {
            return Err(Error::DegreeMismatch {
                expected: basis.degree(),
                got: e.degree(),
            });
        }
    }
    Ok(())
}

/// Exact test that `(q−p) × (t−p)` vanishes in the field.
pub fn collinear(basis: &NiceBasis, p: &Point, q: &Point, t: &Point) -> Result<bool> {
    let dxq = basis.sub(&q.x, &p.x)?;
    let dyq = basis.sub(&q.y, &p.y)?;
    let dxt = basis.sub(&t.x, &p.x)?;
    let dyt = basis.sub(&t.y, &p.y)?;
    let lhs = basis.mul(&dxq, &dyt)?;
    let rhs = basis.mul(&dyq, &dxt)?;
    Ok(lhs == rhs)
}

/// The canonical line through two distinct points.
pub fn line_through(basis: &NiceBasis, p: &Point, q: &Point) -> Result<CanonicalLine> {
    check_point(basis, p)?;
    check_point(basis, q)?;
    line_through_cached(basis, p, q, &mut HashMap::new())
}

/// [`line_through`] on checked points, reusing one [`Divisor`] per pivot.
fn line_through_cached(
    basis: &NiceBasis,
    p: &Point,
    q: &Point,
    divisors: &mut HashMap<Element, Divisor>,
) -> Result<CanonicalLine> {
    if p == q {
        return Err(Error::DegeneratePair);
    }
    let a = basis.sub(&q.y, &p.y)?;
    let b = basis.sub(&p.x, &q.x)?;
    let c = basis.sub(&basis.mul(&p.y, &q.x)?, &basis.mul(&p.x, &q.y)?)?;
    let vertical = a.is_zero();
    let pivot = if vertical { b.clone() } else { a };
    if !divisors.contains_key(&pivot) {
        let div = basis.divisor(&pivot)?;
        divisors.insert(pivot.clone(), div);
    }
    let div = &divisors[&pivot];
    let c = div.quotient(&c);
    Ok(if vertical {
        CanonicalLine {
            a: RationalElement::zero(basis.degree()),
            b: basis.unity().clone(),
            c,
        }
    } else {
        CanonicalLine {
            a: basis.unity().clone(),
            b: div.quotient(&b),
            c,
        }
    })
}

/// Exact test `A·x + B·y + C = 0`.
pub fn on_line(basis: &NiceBasis, p: &Point, line: &CanonicalLine) -> Result<bool> {
    check_point(basis, p)?;
    let ax = basis.mul_rational(&line.a, &p.x.to_rational())?;
    let by = basis.mul_rational(&line.b, &p.y.to_rational())?;
    Ok(ax.add(&by).add(&line.c).is_zero())
}

fn check_distinct(points: &[Point]) -> Result<()> {
    let mut seen = HashSet::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if !seen.insert(p) {
            return Err(Error::DuplicatePoint(i));
        }
    }
    Ok(())
}

/// Number of points on a line spanned by `pairs` unordered pairs:
/// the `k` with `k(k−1)/2 = pairs`.
#[allow(clippy::manual_div_ceil)]
fn richness_from_pairs(pairs: u64) -> u64 {
    (1 + (1 + 8 * pairs).sqrt()) / 2
}

/// Line → (spanning pairs, smallest index pair).
pub type PairGroups = HashMap<CanonicalLine, (u64, (usize, usize))>;

/// Every line spanned by a pair of `points`, with its number of spanning
/// pairs and its lexicographically smallest index pair.
///
/// Pairs are partitioned over the current rayon pool; the merge adds
/// counts and keeps the minimum pair, so the result does not depend on the
/// number of workers.
pub fn group_pairs(
    basis: &NiceBasis,
    points: &[Point],
) -> Result<PairGroups> {
    for p in points {
        check_point(basis, p)?;
    }
    check_distinct(points)?;
    let n = points.len();
    (0..n)
        .into_par_iter()
        .try_fold(
            || (HashMap::new(), HashMap::new()),
            |(mut acc, mut divisors), i| {
                for j in (i + 1)..n {
                    let line = line_through_cached(basis, &points[i], &points[j], &mut divisors)?;
                    acc.entry(line)
                        .and_modify(|e: &mut (u64, (usize, usize))| {
                            e.0 += 1;
                            e.1 = e.1.min((i, j));
                        })
                        .or_insert((1, (i, j)));
                }
                Ok((acc, divisors))
            },
        )
        .map(|folded: Result<_>| folded.map(|(acc, _)| acc))
        .try_reduce(HashMap::new, |a, b| {
            Ok(if a.len() >= b.len() { merge_groups(a, b) } else { merge_groups(b, a) })
        })
}

fn merge_groups(
    mut into: PairGroups,
    from: PairGroups,
) -> PairGroups {
    for (line, (count, pair)) in from {
        into.entry(line)
            .and_modify(|e| {
                e.0 += count;
                e.1 = e.1.min(pair);
            })
            .or_insert((count, pair));
    }
    into
}

/// Every line with at least `r` points of `points`, sorted by canonical
/// triple, with its exact richness.
pub fn rich_lines_bruteforce(
    basis: &NiceBasis,
    points: &[Point],
    r: u64,
) -> Result<BTreeMap<CanonicalLine, u64>> {
    if r < 2 {
        return Err(crate::error::invalid("r", format!("{r} must be at least 2")));
    }
    let groups = group_pairs(basis, points)?;
    Ok(groups
        .into_iter()
        .filter_map(|(line, (pairs, _))| {
            let k = richness_from_pairs(pairs);
            (k >= r).then_some((line, k))
        })
        .collect())
}

/// `Σ_ℓ |{p ∈ P : p ∈ ℓ}|` by direct evaluation of every pair.
pub fn count_incidences<'a>(
    basis: &NiceBasis,
    points: &[Point],
    lines: impl IntoIterator<Item = &'a CanonicalLine>,
) -> Result<u64> {
    let mut total = 0;
    for line in lines {
        for p in points {
            if on_line(basis, p, line)? {
                total += 1;
            }
        }
    }
    Ok(total)
}

/// `(max collinear, number of distinct 2-rich lines)`.
pub fn beck_statistic(basis: &NiceBasis, points: &[Point]) -> Result<(u64, u64)> {
    if points.len() < 2 {
        return Err(crate::error::invalid("P", "needs at least two points"));
    }
    let groups = group_pairs(basis, points)?;
    let max = groups
        .values()
        .map(|(pairs, _)| richness_from_pairs(*pairs))
        .max()
        .unwrap_or(0);
    Ok((max, groups.len() as u64))
}

/// Points bucketed by x-coordinate, for counting line richness by
/// intersecting each column once instead of testing every point.
pub struct PointIndex {
    columns: Vec<(Element, HashSet<Element>)>,
    by_x: HashMap<Element, usize>,
    len: usize,
}

impl PointIndex {
    pub fn new(basis: &NiceBasis, points: &[Point]) -> Result<Self> {
        let mut columns: Vec<(Element, HashSet<Element>)> = Vec::new();
        let mut by_x = HashMap::new();
        for p in points {
            check_point(basis, p)?;
            let idx = *by_x.entry(p.x.clone()).or_insert_with(|| {
                columns.push((p.x.clone(), HashSet::new()));
                columns.len() - 1
            });
            columns[idx].1.insert(p.y.clone());
        }
        let len = columns.iter().map(|(_, ys)| ys.len()).sum();
        Ok(PointIndex {
            columns,
            by_x,
            len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.by_x
            .get(&p.x)
            .is_some_and(|&i| self.columns[i].1.contains(&p.y))
    }

    /// Exact number of indexed points on `line`.
    pub fn richness(&self, basis: &NiceBasis, line: &CanonicalLine) -> Result<u64> {
        Ok(self.richness_run(basis, std::slice::from_ref(line))?[0])
    }

    /// Richness of each line, parallel over runs of consecutive lines
    /// with equal `(A, B)`. Lines sorted canonically share one division
    /// setup per run.
    pub fn richness_many(&self, basis: &NiceBasis, lines: &[CanonicalLine]) -> Result<Vec<u64>> {
        let mut runs = Vec::new();
        let mut start = 0;
        for i in 1..=lines.len() {
            if i == lines.len() || lines[i].a != lines[start].a || lines[i].b != lines[start].b {
                runs.push(&lines[start..i]);
                start = i;
            }
        }
        let counts: Vec<Vec<u64>> = runs
            .par_iter()
            .map(|run| self.richness_run(basis, run))
            .collect::<Result<_>>()?;
        Ok(counts.into_iter().flatten().collect())
    }

    /// Lines sharing `A` and `B`.
    fn richness_run(&self, basis: &NiceBasis, lines: &[CanonicalLine]) -> Result<Vec<u64>> {
        let first = &lines[0];
        let k = first
            .a
            .coords()
            .iter()
            .chain(first.b.coords())
            .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let (a, b) = (scale_up(&first.a, &k), scale_up(&first.b, &k));
        // A'·x + B'·y + C·k = 0 with integer A', B'
        let split = |line: &CanonicalLine| {
            let ck: Vec<BigRational> = line.c.coords().iter().map(|q| q * &k).collect();
            let cd = ck
                .iter()
                .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
            let nums: Vec<BigInt> = ck.iter().map(|q| q.numer() * (&cd / q.denom())).collect();
            (nums, cd)
        };
        if b.is_zero() {
            // A'·X = −C·k
            let div = basis.divisor(&a)?;
            return Ok(lines
                .iter()
                .map(|line| {
                    let (nums, cd) = split(line);
                    let neg: Vec<BigInt> = nums.into_iter().map(|v| -v).collect();
                    div.divide_exact_over(&neg, &cd)
                        .and_then(|x| self.by_x.get(&x))
                        .map_or(0, |&i| self.columns[i].1.len() as u64)
                })
                .collect());
        }
        let div = basis.divisor(&b)?;
        let ax: Vec<Vec<BigInt>> = self
            .columns
            .iter()
            .map(|(x, _)| basis.mul_coords(a.coords(), x.coords()))
            .collect();
        let mut out = Vec::with_capacity(lines.len());
        let mut rhs = vec![BigInt::zero(); basis.degree()];
        for line in lines {
            let (nums, cd) = split(line);
            let mut count = 0;
            for ((_, ys), ax) in self.columns.iter().zip(&ax) {
                // B'·y = −(cd·A'·x + N) / cd
                for ((v, u), n) in rhs.iter_mut().zip(ax).zip(&nums) {
                    *v = -(u * &cd + n);
                }
                if let Some(y) = div.divide_exact_over(&rhs, &cd) {
                    if ys.contains(&y) {
                        count += 1;
                    }
                }
            }
            out.push(count);
        }
        Ok(out)
    }

    /// `Σ_ℓ richness(ℓ)`.
    pub fn count_incidences(&self, basis: &NiceBasis, lines: &[CanonicalLine]) -> Result<u64> {
        Ok(self.richness_many(basis, lines)?.into_iter().sum())
    }
}

fn scale_up(e: &RationalElement, k: &BigInt) -> Element {
    Element::new(e.coords().iter().map(|q| q.numer() * (k / q.denom())).collect())
}

// Line-oriented text interchange.

/// One point per row: x-coordinates then y-coordinates.
pub fn write_points<W: Write>(mut w: W, points: &[Point]) -> Result<()> {
    for p in points {
        let row: Vec<String> = p
            .x
            .coords()
            .iter()
            .chain(p.y.coords())
            .map(ToString::to_string)
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_points<R: BufRead>(r: R, degree: usize) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (lineno, row) in r.lines().enumerate() {
        let row = row?;
        if row.trim().is_empty() {
            continue;
        }
        let vals = row
            .split_whitespace()
            .map(|t| {
                t.parse::<BigInt>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    message: format!("`{t}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 2 * degree {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected {} integers, found {}", 2 * degree, vals.len()),
            });
        }
        let y = vals[degree..].to_vec();
        let mut x = vals;
        x.truncate(degree);
        out.push(Point::new(Element::new(x), Element::new(y)));
    }
    Ok(out)
}

/// One line per row: the `3d` coordinates of `A`, `B`, `C` as `num/den`.
pub fn write_lines<'a, W: Write>(
    mut w: W,
    lines: impl IntoIterator<Item = &'a CanonicalLine>,
) -> Result<()> {
    for l in lines {
        let row: Vec<String> = l
            .a
            .coords()
            .iter()
            .chain(l.b.coords())
            .chain(l.c.coords())
            .map(|q| format!("{}/{}", q.numer(), q.denom()))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_lines<R: BufRead>(r: R, degree: usize) -> Result<Vec<CanonicalLine>> {
    let mut out = Vec::new();
    for (lineno, row) in r.lines().enumerate() {
        let row = row?;
        if row.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: lineno + 1,
            message,
        };
        let vals = row
            .split_whitespace()
            .map(|t| {
                let (n, d) = t.split_once('/').unwrap_or((t, "1"));
                let n: BigInt = n.parse().map_err(|e| err(format!("`{t}`: {e}")))?;
                let d: BigInt = d.parse().map_err(|e| err(format!("`{t}`: {e}")))?;
                if d == BigInt::from(0) {
                    return Err(err(format!("`{t}`: zero denominator")));
                }
                Ok(BigRational::new(n, d))
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 3 * degree {
            return Err(err(format!(
                "expected {} rationals, found {}",
                3 * degree,
                vals.len()
            )));
        }
        let mut it = vals.chunks(degree).map(|c| RationalElement::new(c.to_vec()));
        out.push(CanonicalLine {
            a: it.next().unwrap(),
            b: it.next().unwrap(),
            c: it.next().unwrap(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints() -> NiceBasis {
        NiceBasis::integers().unwrap()
    }

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64s(&[x], &[y])
    }

    fn rat(v: &[i64]) -> RationalElement {
        Element::from_i64s(v).to_rational()
    }

    fn grid3() -> Vec<Point> {
        (0..3).flat_map(|x| (0..3).map(move |y| pt(x, y))).collect()
    }

    #[test]
    fn collinear_examples() {
        let b = ints();
        assert!(collinear(&b, &pt(0, 0), &pt(1, 1), &pt(2, 2)).unwrap());
        assert!(!collinear(&b, &pt(0, 0), &pt(1, 0), &pt(0, 1)).unwrap());

        let q2 = NiceBasis::quadratic(2).unwrap();
        let p = Point::from_i64s(&[0, 0], &[0, 0]);
        let q = Point::from_i64s(&[1, 1], &[2, 2]);
        let t = Point::from_i64s(&[2, 2], &[4, 4]);
        assert!(collinear(&q2, &p, &q, &t).unwrap());
        assert!(!collinear(&q2, &p, &q, &Point::from_i64s(&[2, 2], &[4, 3])).unwrap());
    }

    #[test]
    fn line_through_examples() {
        let b = ints();
        let l = line_through(&b, &pt(0, 0), &pt(1, 1)).unwrap();
        assert_eq!((l.a, l.b, l.c), (rat(&[1]), rat(&[-1]), rat(&[0])));
        let l = line_through(&b, &pt(0, 0), &pt(0, 1)).unwrap();
        assert_eq!((l.a, l.b, l.c), (rat(&[1]), rat(&[0]), rat(&[0])));
        let l = line_through(&b, &pt(1, 2), &pt(3, 2)).unwrap();
        assert_eq!((l.a, l.b, l.c), (rat(&[0]), rat(&[1]), rat(&[-2])));
        assert!(matches!(
            line_through(&b, &pt(1, 2), &pt(1, 2)),
            Err(Error::DegeneratePair)
        ));
    }

    #[test]
    fn line_through_quadratic_field() {
        // y = (1+√2)x through the origin: X·(1+√2) − Y = 0, normalized to
        // X − (√2−1)Y = 0
        let q2 = NiceBasis::quadratic(2).unwrap();
        let p = Point::from_i64s(&[0, 0], &[0, 0]);
        let q = Point::from_i64s(&[1, 0], &[1, 1]);
        let l = line_through(&q2, &p, &q).unwrap();
        assert_eq!(l.a, rat(&[1, 0]));
        assert_eq!(l.b, rat(&[1, -1]));
        assert!(l.c.is_zero());
        assert!(on_line(&q2, &Point::from_i64s(&[2, 1], &[4, 3]), &l).unwrap());
    }

    #[test]
    fn on_line_examples() {
        let b = ints();
        let l = line_through(&b, &pt(0, 0), &pt(1, 1)).unwrap();
        assert!(on_line(&b, &pt(0, 0), &l).unwrap());
        assert!(on_line(&b, &pt(1, 1), &l).unwrap());
        assert!(!on_line(&b, &pt(1, 0), &l).unwrap());
    }

    #[test]
    fn grid_rich_lines() {
        let b = ints();
        let rich = rich_lines_bruteforce(&b, &grid3(), 3).unwrap();
        assert_eq!(rich.len(), 8);
        assert!(rich.values().all(|&k| k == 3));
        assert_eq!(count_incidences(&b, &grid3(), rich.keys()).unwrap(), 24);
        assert!(rich_lines_bruteforce(&b, &grid3(), 10).unwrap().is_empty());
        assert!(rich_lines_bruteforce(&b, &grid3(), 1).is_err());
    }

    #[test]
    fn collinear_points_form_one_line() {
        let b = ints();
        let pts: Vec<_> = (0..4).map(|i| pt(i, 2 * i + 1)).collect();
        let rich = rich_lines_bruteforce(&b, &pts, 2).unwrap();
        assert_eq!(rich.len(), 1);
        assert_eq!(*rich.values().next().unwrap(), 4);
        assert_eq!(beck_statistic(&b, &pts).unwrap(), (4, 1));
    }

    #[test]
    fn duplicates_rejected() {
        let b = ints();
        let pts = vec![pt(0, 0), pt(1, 1), pt(0, 0)];
        assert!(matches!(
            rich_lines_bruteforce(&b, &pts, 2),
            Err(Error::DuplicatePoint(2))
        ));
    }

    #[test]
    fn beck_examples() {
        let b = ints();
        assert_eq!(beck_statistic(&b, &grid3()).unwrap(), (3, 20));
        assert_eq!(
            beck_statistic(&b, &[pt(0, 0), pt(1, 0), pt(0, 1)]).unwrap(),
            (2, 3)
        );
        assert!(beck_statistic(&b, &[pt(0, 0)]).is_err());
    }

    #[test]
    fn incidence_examples() {
        let b = ints();
        assert_eq!(count_incidences(&b, &grid3(), []).unwrap(), 0);
        let pair = [pt(3, 1), pt(-2, 5)];
        let l = line_through(&b, &pair[0], &pair[1]).unwrap();
        assert_eq!(count_incidences(&b, &pair, [&l]).unwrap(), 2);
    }

    #[test]
    fn index_matches_naive_count() {
        let b = ints();
        let pts: Vec<_> = (-4..=4).flat_map(|x| (-3..=5).map(move |y| pt(x, y))).collect();
        let lines: Vec<_> = group_pairs(&b, &pts).unwrap().into_keys().collect();
        let idx = PointIndex::new(&b, &pts).unwrap();
        for l in &lines {
            let naive = pts.iter().filter(|p| on_line(&b, p, l).unwrap()).count() as u64;
            assert_eq!(idx.richness(&b, l).unwrap(), naive, "{l}");
        }
        assert_eq!(
            idx.count_incidences(&b, &lines).unwrap(),
            count_incidences(&b, &pts, &lines).unwrap()
        );
    }

    #[test]
    fn translated_line_matches_translated_points() {
        let b = NiceBasis::quadratic(5).unwrap();
        let p = Point::from_i64s(&[1, -1], &[0, 2]);
        let q = Point::from_i64s(&[3, 0], &[-1, 1]);
        let dx = Element::from_i64s(&[4, -2]);
        let dy = Element::from_i64s(&[-7, 3]);
        let shift = |p: &Point| Point::new(b.add(&p.x, &dx).unwrap(), b.add(&p.y, &dy).unwrap());
        let direct = line_through(&b, &shift(&p), &shift(&q)).unwrap();
        let moved = line_through(&b, &p, &q).unwrap().translated(&b, &dx, &dy).unwrap();
        assert_eq!(direct, moved);
    }

    #[test]
    fn text_round_trip() {
        let b = NiceBasis::quadratic(3).unwrap();
        let pts = vec![
            Point::from_i64s(&[1, -2], &[0, 5]),
            Point::from_i64s(&[7, 0], &[-3, 1]),
        ];
        let mut buf = Vec::new();
        write_points(&mut buf, &pts).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1 -2 0 5\n7 0 -3 1\n");
        assert_eq!(read_points(&buf[..], 2).unwrap(), pts);

        let l = line_through(&b, &pts[0], &pts[1]).unwrap();
        let mut buf = Vec::new();
        write_lines(&mut buf, [&l]).unwrap();
        assert_eq!(read_lines(&buf[..], 2).unwrap(), vec![l]);

        assert!(read_points(&b"1 2 3\n"[..], 2).is_err());
        assert!(read_lines(&b"1/0 0 0\n"[..], 1).is_err());
    }
}
