//! The translate construction of rich lines.
//!
//! `P = A_{n^α}(Λ) × A_{n^{1−α}}(Λ)`. A small cell
//! `P' = A_{C₁n^α/r}(Λ) × A_{C₁n^{1−α}/r}(Λ)` is copied to every translate
//! `(x, y) ∈ A_r(sΛ) × A_r(s'Λ)`, and `L` is the union over translates of
//! the lines spanned by two points of a copy. The verifiers here count
//! every claimed quantity exactly.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gap::{Bound, GapSet};
use crate::geometry::{group_pairs, on_line, CanonicalLine, Point, PointIndex};
use crate::numberfield::{Element, NiceBasis, RationalElement};

/// Exponent `α = p/q`.
pub type Alpha = Ratio<u32>;

/// The fixed `α` grid searched by [`szt_incidence_construction`], ascending.
pub const ALPHA_GRID: [(u32, u32); 5] = [(1, 5), (1, 4), (1, 3), (2, 5), (1, 2)];

/// Upper limit on `C₁` halvings during auto-tuning.
pub const MAX_HALVINGS: u32 = 20;

#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub basis: Arc<NiceBasis>,
    pub n: u64,
    pub alpha: Alpha,
    pub r: u64,
    pub c1: BigRational,
    pub auto_tune: bool,
}

impl ConstructionParams {
    pub fn validate(&self) -> Result<()> {
        check_alpha(&self.alpha)?;
        if self.n < 2 {
            return Err(invalid("n", format!("{} must be at least 2", self.n)));
        }
        if self.r < 2 {
            return Err(invalid("r", format!("{} must be at least 2", self.r)));
        }
        let zero = BigRational::zero();
        if self.c1 <= zero || self.c1 > BigRational::one() {
            return Err(invalid("c1", format!("{} must lie in (0, 1]", self.c1)));
        }
        if !r_within_n_alpha(self.r, self.n, &self.alpha) {
            return Err(invalid(
                "r",
                format!("{} exceeds n^alpha = {}^({})", self.r, self.n, self.alpha),
            ));
        }
        Ok(())
    }
}

fn check_alpha(alpha: &Alpha) -> Result<()> {
    if *alpha.numer() == 0 || *alpha > Ratio::new(1, 2) {
        return Err(invalid("alpha", format!("{alpha} must lie in (0, 1/2]")));
    }
    Ok(())
}

/// `r ≤ n^(p/q)` ⇔ `r^q ≤ n^p`, exactly.
pub fn r_within_n_alpha(r: u64, n: u64, alpha: &Alpha) -> bool {
    Pow::pow(BigInt::from(r), *alpha.denom()) <= Pow::pow(BigInt::from(n), *alpha.numer())
}

fn complement(alpha: &Alpha) -> (u32, u32) {
    (alpha.denom() - alpha.numer(), *alpha.denom())
}

/// The product set `A_{n^α}(Λ) × A_{n^{1−α}}(Λ)`.
#[derive(Clone, Debug)]
pub struct Pointset {
    pub n_nominal: u64,
    pub x_axis: GapSet,
    pub y_axis: GapSet,
    pub points: Vec<Point>,
}

impl Pointset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn product(xs: &GapSet, ys: &GapSet) -> Vec<Point> {
    let ys: Vec<Element> = ys.elements();
    xs.iter()
        .flat_map(|x| ys.iter().map(move |y| Point::new(x.clone(), y.clone())))
        .collect()
}

pub fn build_pointset(basis: &Arc<NiceBasis>, n: u64, alpha: &Alpha) -> Result<Pointset> {
    check_alpha(alpha)?;
    if n < 2 {
        return Err(invalid("n", format!("{n} must be at least 2")));
    }
    let one = BigRational::one();
    let (cp, cq) = complement(alpha);
    let x_axis = GapSet::new(
        basis.clone(),
        Bound::power(one.clone(), n, *alpha.numer(), *alpha.denom())?,
        BigInt::one(),
    )?;
    let y_axis = GapSet::new(basis.clone(), Bound::power(one, n, cp, cq)?, BigInt::one())?;
    let points = product(&x_axis, &y_axis);
    Ok(Pointset {
        n_nominal: n,
        x_axis,
        y_axis,
        points,
    })
}

/// `P'`, the spacings `s, s'`, and the translate sets.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub basis: Arc<NiceBasis>,
    pub r: u64,
    pub s: BigInt,
    pub s_prime: BigInt,
    pub cell: (GapSet, GapSet),
    pub translates: (GapSet, GapSet),
    /// The sufficient inequality `s ≥ (2/3)(C₁n^α/r)^{1/d} + 1` and its
    /// `s'` analogue.
    pub spacing_inequality: (bool, bool),
    /// Every translate coordinate lies in `A_{C₁n^α}(Λ)` resp.
    /// `A_{C₁n^{1−α}}(Λ)`.
    pub translates_contained: bool,
}

/// `u ≥ (2/3)·m^{1/d} + 1` ⇔ `(3(u−1)/2)^d ≥ m`.
fn spacing_ok(u: &BigInt, m: &Bound, d: usize) -> bool {
    if *u < BigInt::one() {
        return false;
    }
    let lhs = BigRational::new((u - 1) * 3, BigInt::from(2));
    m.cmp_power(&lhs, d as u32) != std::cmp::Ordering::Less
}

pub fn build_cell_geometry(params: &ConstructionParams) -> Result<CellGeometry> {
    params.validate()?;
    let basis = &params.basis;
    let d = basis.degree();
    let (p, q) = (*params.alpha.numer(), *params.alpha.denom());
    let (cp, cq) = complement(&params.alpha);
    let coeff = &params.c1 / BigRational::from_integer(params.r.into());
    let m_x = Bound::power(coeff.clone(), params.n, p, q)?;
    let m_y = Bound::power(coeff, params.n, cp, cq)?;
    let cell = (
        GapSet::new(basis.clone(), m_x.clone(), BigInt::one())?,
        GapSet::new(basis.clone(), m_y.clone(), BigInt::one())?,
    );
    if cell.0.radius().is_zero() || cell.1.radius().is_zero() {
        return Err(Error::RTooLarge {
            r: params.r,
            detail: format!(
                "cell bounds c1*n^alpha/r = {:.4} and c1*n^(1-alpha)/r = {:.4} must both reach 3^d = {}",
                m_x.approx(),
                m_y.approx(),
                3u64.pow(d as u32)
            ),
        });
    }
    let s = m_x.floor_root(d as u32);
    let s_prime = m_y.floor_root(d as u32);
    let spacing_inequality = (spacing_ok(&s, &m_x, d), spacing_ok(&s_prime, &m_y, d));
    let r_bound = Bound::integer(params.r)?;
    let translates = (
        GapSet::new(basis.clone(), r_bound.clone(), s.clone())?,
        GapSet::new(basis.clone(), r_bound, s_prime.clone())?,
    );

    let big_x = GapSet::new(basis.clone(), Bound::power(params.c1.clone(), params.n, p, q)?, BigInt::one())?;
    let big_y = GapSet::new(basis.clone(), Bound::power(params.c1.clone(), params.n, cp, cq)?, BigInt::one())?;
    let translates_contained = translates.0.iter().all(|x| big_x.contains(&x))
        && translates.1.iter().all(|y| big_y.contains(&y));

    Ok(CellGeometry {
        basis: basis.clone(),
        r: params.r,
        s,
        s_prime,
        cell,
        translates,
        spacing_inequality,
        translates_contained,
    })
}

impl CellGeometry {
    /// Replaces the translate spacings, keeping the cell and the translate
    /// radius. Used to probe overlapping configurations.
    pub fn with_spacing(&self, s: BigInt, s_prime: BigInt) -> Result<Self> {
        let d = self.basis.degree();
        let translates = (
            GapSet::new(self.basis.clone(), self.translates.0.bound().clone(), s.clone())?,
            GapSet::new(self.basis.clone(), self.translates.1.bound().clone(), s_prime.clone())?,
        );
        Ok(CellGeometry {
            spacing_inequality: (
                spacing_ok(&s, self.cell.0.bound(), d),
                spacing_ok(&s_prime, self.cell.1.bound(), d),
            ),
            s,
            s_prime,
            translates,
            ..self.clone()
        })
    }

    pub fn cell_points(&self) -> Vec<Point> {
        product(&self.cell.0, &self.cell.1)
    }

    pub fn translate_count(&self) -> BigInt {
        self.translates.0.cardinality() * self.translates.1.cardinality()
    }
}

/// All translate vectors `(x, y)`, lexicographic in `x` then `y`.
pub fn translate_vectors(geom: &CellGeometry) -> Vec<(Element, Element)> {
    let ys = geom.translates.1.elements();
    geom.translates
        .0
        .iter()
        .flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointnessReport {
    pub spacing_inequality: bool,
    pub nearest_translates_disjoint: bool,
    pub disjoint: bool,
}

/// Checks that the translated cell copies are pairwise disjoint.
///
/// The copies along one axis are shifts of a box by multiples of the
/// spacing times a basis vector, so they are disjoint iff each nearest
/// pair (shift by one spacing along one basis direction) is. That pair is
/// checked exhaustively by membership. The sufficient inequality is
/// reported alongside; it can fail while the copies are still disjoint
/// because the cell radius is floored.
pub fn verify_disjoint_translates(geom: &CellGeometry) -> DisjointnessReport {
    let spacing_inequality = geom.spacing_inequality.0 && geom.spacing_inequality.1;
    let single = geom.translates.0.radius().is_zero() && geom.translates.1.radius().is_zero();
    let nearest_translates_disjoint = single
        || (axis_copies_disjoint(&geom.cell.0, &geom.s, geom.translates.0.radius())
            && axis_copies_disjoint(&geom.cell.1, &geom.s_prime, geom.translates.1.radius()));
    DisjointnessReport {
        spacing_inequality,
        nearest_translates_disjoint,
        disjoint: nearest_translates_disjoint,
    }
}

fn axis_copies_disjoint(cell: &GapSet, spacing: &BigInt, translate_radius: &BigInt) -> bool {
    if translate_radius.is_zero() {
        return true;
    }
    let d = cell.degree();
    (0..d).all(|k| {
        let shift = Element::basis_vector(d, k).scale(spacing);
        cell.iter().all(|e| {
            let moved: Vec<BigInt> = e
                .coords()
                .iter()
                .zip(shift.coords())
                .map(|(a, b)| a - b)
                .collect();
            !cell.contains(&Element::new(moved))
        })
    })
}

/// Where a line of the family first appeared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub translate_index: usize,
    pub translate: (Element, Element),
    pub pair: (Point, Point),
}

#[derive(Clone, Debug)]
pub struct LineFamily {
    /// Sorted by canonical triple, no duplicates.
    pub lines: Vec<CanonicalLine>,
    pub provenance: Vec<Provenance>,
    /// `|L_{(0,0)}|`: lines spanned by the untranslated cell.
    pub cell_lines: usize,
    /// `Σ_{(x,y)} |L_{(x,y)}|` before global deduplication.
    pub total_before_dedup: u64,
}

impl LineFamily {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

type Witness = (usize, usize, usize);

fn shift(basis: &NiceBasis, p: &Point, by: &(Element, Element)) -> Result<Point> {
    Ok(Point::new(basis.add(&p.x, &by.0)?, basis.add(&p.y, &by.1)?))
}

fn finish_family(
    basis: &NiceBasis,
    cell: &[Point],
    translates: &[(Element, Element)],
    merged: HashMap<CanonicalLine, Witness>,
    cell_lines: usize,
    total_before_dedup: u64,
) -> Result<LineFamily> {
    let mut entries: Vec<(CanonicalLine, Witness)> = merged.into_iter().collect();
    entries.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut lines = Vec::with_capacity(entries.len());
    let mut provenance = Vec::with_capacity(entries.len());
    for (line, (t, i, j)) in entries {
        let by = &translates[t];
        provenance.push(Provenance {
            translate_index: t,
            translate: by.clone(),
            pair: (shift(basis, &cell[i], by)?, shift(basis, &cell[j], by)?),
        });
        lines.push(line);
    }
    Ok(LineFamily {
        lines,
        provenance,
        cell_lines,
        total_before_dedup,
    })
}

fn merge_min(
    mut into: HashMap<CanonicalLine, Witness>,
    from: HashMap<CanonicalLine, Witness>,
) -> HashMap<CanonicalLine, Witness> {
    for (line, w) in from {
        into.entry(line)
            .and_modify(|cur| *cur = (*cur).min(w))
            .or_insert(w);
    }
    into
}

/// The line family `L`, parallel over translate vectors.
///
/// Lines of `P' + (x, y)` are the lines of `P'` shifted by `(x, y)`, so
/// the cell is grouped once and each worker shifts the cell lines for its
/// translates. The merge keeps the smallest `(translate, i, j)` witness.
pub fn generate_line_family(geom: &CellGeometry) -> Result<LineFamily> {
    let basis = &*geom.basis;
    let cell = geom.cell_points();
    let translates = translate_vectors(geom);
    // iteration order is irrelevant: the merge keeps the minimum witness
    let base: Vec<(CanonicalLine, (usize, usize))> = group_pairs(basis, &cell)?
        .into_iter()
        .map(|(line, (_, pair))| (line, pair))
        .collect();
    let cell_lines = base.len();
    let shiftable: Vec<((Element, Element, Element), BigInt)> = if translates.len() > 1 {
        base.par_iter()
            .map(|(line, _)| (line.integer_coefficients(), line_denominator(line)))
            .collect()
    } else {
        Vec::new()
    };

    let merged = translates
        .par_iter()
        .enumerate()
        .try_fold(HashMap::new, |mut acc: HashMap<CanonicalLine, Witness>, (t, by)| {
            if by.0.is_zero() && by.1.is_zero() {
                for (line, (i, j)) in &base {
                    let w = (t, *i, *j);
                    acc.entry(line.clone())
                        .and_modify(|cur| *cur = (*cur).min(w))
                        .or_insert(w);
                }
                return Ok(acc);
            }
            for ((line, (i, j)), ((a, b, c), den)) in base.iter().zip(&shiftable) {
                let w = (t, *i, *j);
                // C' = C − A·x − B·y, computed on the integer form
                let ax = basis.mul_coords(a.coords(), by.0.coords());
                let bx = basis.mul_coords(b.coords(), by.1.coords());
                let c_new: Vec<BigRational> = c
                    .coords()
                    .iter()
                    .zip(ax.iter().zip(&bx))
                    .map(|(c, (u, v))| BigRational::new(c - u - v, den.clone()))
                    .collect();
                let moved = CanonicalLine {
                    a: line.a.clone(),
                    b: line.b.clone(),
                    c: RationalElement::from_reduced(c_new),
                };
                acc.entry(moved)
                    .and_modify(|cur| *cur = (*cur).min(w))
                    .or_insert(w);
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(HashMap::new, |a, b| {
            Ok(if a.len() >= b.len() { merge_min(a, b) } else { merge_min(b, a) })
        })?;
    let total = (cell_lines * translates.len()) as u64;
    finish_family(basis, &cell, &translates, merged, cell_lines, total)
}

fn line_denominator(line: &CanonicalLine) -> BigInt {
    line.a
        .coords()
        .iter()
        .chain(line.b.coords())
        .chain(line.c.coords())
        .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()))
}

/// Reference path for [`generate_line_family`]: translates every cell
/// point and groups the pairs of each copy directly.
pub fn generate_line_family_reference(geom: &CellGeometry) -> Result<LineFamily> {
    let basis = &*geom.basis;
    let cell = geom.cell_points();
    let translates = translate_vectors(geom);
    let mut merged: HashMap<CanonicalLine, Witness> = HashMap::new();
    let mut total = 0u64;
    let mut cell_lines = 0;
    for (t, by) in translates.iter().enumerate() {
        let copy = cell
            .iter()
            .map(|p| shift(basis, p, by))
            .collect::<Result<Vec<_>>>()?;
        let groups = group_pairs(basis, &copy)?;
        if by.0.is_zero() && by.1.is_zero() {
            cell_lines = groups.len();
        }
        total += groups.len() as u64;
        for (line, (_, (i, j))) in groups {
            let w = (t, i, j);
            merged
                .entry(line)
                .and_modify(|cur| *cur = (*cur).min(w))
                .or_insert(w);
        }
    }
    finish_family(basis, &cell, &translates, merged, cell_lines, total)
}

/// `p_t = (a + t(a−a'), b + t(b−b'))` checks on one witness pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MechanismReport {
    pub lines_sampled: usize,
    pub points_checked: u64,
    /// Must be zero: `p_t` lies on the line through the pair for every `t`.
    pub off_line: u64,
    pub in_pointset: u64,
}

#[derive(Clone, Debug)]
pub struct RichnessReport {
    pub r: u64,
    pub num_lines: usize,
    pub num_rich: usize,
    pub min_richness: u64,
    pub richness: Vec<u64>,
    /// First line in canonical order with fewer than `r` points.
    pub failure: Option<(CanonicalLine, u64)>,
    pub mechanism: MechanismReport,
}

impl RichnessReport {
    /// `num_rich / num_lines`; `1.0` for an empty family.
    pub fn frac_r_rich(&self) -> f64 {
        if self.num_lines == 0 {
            1.0
        } else {
            self.num_rich as f64 / self.num_lines as f64
        }
    }

    pub fn all_rich(&self) -> bool {
        self.num_rich == self.num_lines
    }

    pub fn incidences(&self) -> u64 {
        self.richness.iter().sum()
    }
}

/// Number of family lines sampled for the `p_t` mechanism check.
const MECHANISM_SAMPLE: usize = 16;

/// Exact richness of every line of `family` in `P`.
pub fn verify_claim2(
    basis: &NiceBasis,
    family: &LineFamily,
    index: &PointIndex,
    r: u64,
) -> Result<RichnessReport> {
    let richness = index.richness_many(basis, &family.lines)?;
    let num_rich = richness.iter().filter(|&&k| k >= r).count();
    let min_richness = richness.iter().copied().min().unwrap_or(0);
    let failure = richness
        .iter()
        .position(|&k| k < r)
        .map(|i| (family.lines[i].clone(), richness[i]));
    let mechanism = check_mechanism(basis, family, index, r)?;
    Ok(RichnessReport {
        r,
        num_lines: family.len(),
        num_rich,
        min_richness,
        richness,
        failure,
        mechanism,
    })
}

fn check_mechanism(
    basis: &NiceBasis,
    family: &LineFamily,
    index: &PointIndex,
    r: u64,
) -> Result<MechanismReport> {
    let mut report = MechanismReport::default();
    if family.is_empty() {
        return Ok(report);
    }
    let d = basis.degree();
    let ts = GapSet::new(
        Arc::new(basis.clone()),
        Bound::integer(3u64.pow(d as u32) * r)?,
        BigInt::one(),
    )?
    .elements();
    let step = family.len().div_ceil(MECHANISM_SAMPLE).max(1);
    for i in (0..family.len()).step_by(step) {
        let line = &family.lines[i];
        let (p, q) = &family.provenance[i].pair;
        let dx = basis.sub(&p.x, &q.x)?;
        let dy = basis.sub(&p.y, &q.y)?;
        for t in &ts {
            let pt = Point::new(
                basis.add(&p.x, &basis.mul(t, &dx)?)?,
                basis.add(&p.y, &basis.mul(t, &dy)?)?,
            );
            report.points_checked += 1;
            if !on_line(basis, &pt, line)? {
                report.off_line += 1;
            }
            if index.contains(&pt) {
                report.in_pointset += 1;
            }
        }
        report.lines_sampled += 1;
    }
    Ok(report)
}

/// `|L_{(0,0)}|` for an arbitrary cell point set.
pub fn cell_line_count(basis: &NiceBasis, cell: &[Point]) -> Result<usize> {
    if cell.len() < 2 {
        return Ok(0);
    }
    Ok(group_pairs(basis, cell)?.len())
}

fn normalized(count: u64, r: u64, r_power: u32, p_size: usize) -> f64 {
    let num = count as f64 * (r as f64).powi(r_power as i32);
    let p = p_size as f64;
    num / (p * p)
}

/// `|L_{(0,0)}|·r⁴/|P|²`.
pub fn claim1_statistic(cell_lines: usize, r: u64, p_size: usize) -> f64 {
    normalized(cell_lines as u64, r, 4, p_size)
}

/// `(I·r²/|P|², |L|·r³/|P|²)`.
pub fn claim3_claim4_statistics(incidences: u64, num_lines: usize, r: u64, p_size: usize) -> (f64, f64) {
    (
        normalized(incidences, r, 2, p_size),
        normalized(num_lines as u64, r, 3, p_size),
    )
}

/// A full run of the construction at one parameter set.
#[derive(Clone, Debug)]
pub struct Construction {
    /// Parameters with the final `C₁`.
    pub params: ConstructionParams,
    pub tune_steps: u32,
    pub pointset: Pointset,
    pub geometry: CellGeometry,
    pub family: LineFamily,
    pub claim2: RichnessReport,
    pub disjointness: DisjointnessReport,
}

impl Construction {
    pub fn incidences(&self) -> u64 {
        self.claim2.incidences()
    }

    pub fn claim1(&self) -> f64 {
        claim1_statistic(self.family.cell_lines, self.params.r, self.pointset.len())
    }

    pub fn claim3_claim4(&self) -> (f64, f64) {
        claim3_claim4_statistics(
            self.incidences(),
            self.family.len(),
            self.params.r,
            self.pointset.len(),
        )
    }
}

/// Which generator builds `L`. Both produce identical families.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FamilyPath {
    /// [`generate_line_family`].
    #[default]
    Shifted,
    /// [`generate_line_family_reference`].
    Reference,
}

/// Builds `P` and `L` and verifies them. With `auto_tune`, `C₁` starts at 1
/// and is halved until every line is `r`-rich and the copies are disjoint.
pub fn construct(params: &ConstructionParams) -> Result<Construction> {
    construct_with(params, FamilyPath::Shifted)
}

pub fn construct_with(params: &ConstructionParams, path: FamilyPath) -> Result<Construction> {
    params.validate()?;
    let pointset = build_pointset(&params.basis, params.n, &params.alpha)?;
    let index = PointIndex::new(&params.basis, &pointset.points)?;
    construct_on(params, pointset, &index, path)
}

fn construct_on(
    params: &ConstructionParams,
    pointset: Pointset,
    index: &PointIndex,
    path: FamilyPath,
) -> Result<Construction> {
    let mut current = params.clone();
    if params.auto_tune {
        current.c1 = BigRational::one();
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut steps = 0;
    loop {
        let geometry = match build_cell_geometry(&current) {
            Ok(g) => g,
            Err(e @ Error::RTooLarge { .. }) if params.auto_tune && steps > 0 => {
                return Err(Error::TuningFailed {
                    steps,
                    detail: format!("cell became degenerate at c1 = {}: {e}", current.c1),
                })
            }
            Err(e) => return Err(e),
        };
        let family = match path {
            FamilyPath::Shifted => generate_line_family(&geometry)?,
            FamilyPath::Reference => generate_line_family_reference(&geometry)?,
        };
        let claim2 = verify_claim2(&params.basis, &family, index, current.r)?;
        let disjointness = verify_disjoint_translates(&geometry);
        let ok = claim2.all_rich() && disjointness.disjoint && geometry.translates_contained;
        if ok || !params.auto_tune {
            return Ok(Construction {
                params: current,
                tune_steps: steps,
                pointset,
                geometry,
                family,
                claim2,
                disjointness,
            });
        }
        if steps == MAX_HALVINGS {
            return Err(Error::TuningFailed {
                steps,
                detail: format!(
                    "c1 = {} still leaves {} of {} lines below richness {}",
                    current.c1,
                    claim2.num_lines - claim2.num_rich,
                    claim2.num_lines,
                    current.r
                ),
            });
        }
        current.c1 = &current.c1 * &half;
        steps += 1;
    }
}

/// Nearest integer to `x^{1/3}`, exact for rational `x > 0`.
fn round_cube_root(x: &BigRational) -> BigInt {
    let u = Bound::rational(x.clone())
        .map(|b| b.floor_root(3))
        .unwrap_or_else(|_| BigInt::zero());
    // round up iff x ≥ (u + 1/2)^3 = (2u+1)^3 / 8
    let half_up = BigRational::new(Pow::pow(&u * 2 + 1, 3u32), BigInt::from(8));
    if *x >= half_up {
        u + 1
    } else {
        u
    }
}

#[derive(Clone, Debug)]
pub struct IncidenceConstruction {
    pub n: u64,
    pub m: u64,
    pub r: u64,
    pub construction: Construction,
    pub incidences: u64,
    /// `I / (n^{2/3} m^{2/3})` with the nominal `n`, `m`.
    pub ratio_nominal: f64,
    /// `I / (|P|^{2/3} |L|^{2/3})` with realized sizes.
    pub ratio_realized: f64,
    /// `α` values tried before the chosen one, with the reason each failed.
    pub rejected: Vec<(Alpha, String)>,
}

/// Points and lines with many incidences from rich lines: `r` is the
/// nearest integer to `n^{2/3}/m^{1/3}` (at least 2), and the smallest `α`
/// from [`ALPHA_GRID`] whose auto-tuned construction succeeds is used.
pub fn szt_incidence_construction(basis: &Arc<NiceBasis>, n: u64, m: u64) -> Result<IncidenceConstruction> {
    szt_incidence_construction_with(basis, n, m, FamilyPath::Shifted)
}

pub fn szt_incidence_construction_with(
    basis: &Arc<NiceBasis>,
    n: u64,
    m: u64,
    path: FamilyPath,
) -> Result<IncidenceConstruction> {
    if n == 0 || m == 0 {
        return Err(invalid("n, m", "must be positive"));
    }
    let (nb, mb) = (BigInt::from(n), BigInt::from(m));
    if &nb * &nb < mb || nb > &mb * &mb {
        return Err(Error::OutOfRange(format!(
            "need m^(1/2) <= n <= m^2, got n = {n}, m = {m}"
        )));
    }
    let x = BigRational::new(&nb * &nb, mb);
    let r = round_cube_root(&x).to_u64().unwrap_or(u64::MAX).max(2);

    let mut rejected = Vec::new();
    for (p, q) in ALPHA_GRID {
        let alpha = Ratio::new(p, q);
        if !r_within_n_alpha(r, n, &alpha) {
            rejected.push((alpha, format!("r = {r} exceeds n^{alpha}")));
            continue;
        }
        let params = ConstructionParams {
            basis: basis.clone(),
            n,
            alpha,
            r,
            c1: BigRational::one(),
            auto_tune: true,
        };
        match construct_with(&params, path) {
            Ok(construction) => {
                let incidences = construction.incidences();
                let nominal = (n as f64).powf(2.0 / 3.0) * (m as f64).powf(2.0 / 3.0);
                let realized = (construction.pointset.len() as f64).powf(2.0 / 3.0)
                    * (construction.family.len() as f64).powf(2.0 / 3.0);
                return Ok(IncidenceConstruction {
                    n,
                    m,
                    r,
                    incidences,
                    ratio_nominal: incidences as f64 / nominal,
                    ratio_realized: if realized > 0.0 { incidences as f64 / realized } else { 0.0 },
                    construction,
                    rejected,
                });
            }
            Err(e @ (Error::RTooLarge { .. } | Error::TuningFailed { .. })) => {
                rejected.push((alpha, e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::OutOfRange(format!(
        "no admissible alpha for n = {n}, m = {m}, r = {r}: {}",
        rejected
            .iter()
            .map(|(a, why)| format!("{a}: {why}"))
            .collect::<Vec<_>>()
            .join("; ")
    )))
}
