use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use szt_core::construction::{
    build_cell_geometry, generate_line_family, generate_line_family_reference, ConstructionParams,
};
use szt_core::gap::{contains, product_bound, sum_bound, GapSet};
use szt_core::geometry::{
    count_incidences, line_through, on_line, CanonicalLine, Point, PointIndex,
};
use szt_core::numberfield::{Element, NiceBasis};

fn bases() -> Vec<(NiceBasis, Vec<i64>)> {
    let polys: [&[i64]; 6] = [&[-1], &[-2, 0], &[-5, 0], &[1, 0], &[-2, 0, 0], &[-1, -1, 0, 0]];
    polys
        .iter()
        .map(|p| {
            let big: Vec<BigInt> = p.iter().map(|&c| c.into()).collect();
            (NiceBasis::power(&big).unwrap(), p.to_vec())
        })
        .collect()
}

/// Schoolbook product, then reduction by the monic polynomial `x^d + Σ p_k x^k`.
fn naive_mul(p: &[i64], a: &[i64], b: &[i64]) -> Vec<BigInt> {
    let d = p.len();
    let mut prod = vec![BigInt::zero(); 2 * d - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += BigInt::from(*x) * BigInt::from(*y);
        }
    }
    for top in (d..prod.len()).rev() {
        let lead = std::mem::take(&mut prod[top]);
        for (k, c) in p.iter().enumerate() {
            prod[top - d + k] -= &lead * BigInt::from(*c);
        }
    }
    prod.truncate(d);
    prod
}

fn coords(d: usize, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-bound..=bound, d)
}

fn basis_and_elements(count: usize, bound: i64) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (0..bases().len()).prop_flat_map(move |i| {
        let d = [1, 2, 2, 2, 3, 4][i];
        (Just(i), prop::collection::vec(coords(d, bound), count))
    })
}

fn el(v: &[i64]) -> Element {
    Element::from_i64s(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn product_matches_polynomial_reduction((i, es) in basis_and_elements(2, 50)) {
        let (basis, p) = &bases()[i];
        let got = basis.mul(&el(&es[0]), &el(&es[1])).unwrap();
        prop_assert_eq!(got.coords().to_vec(), naive_mul(p, &es[0], &es[1]));
    }

    #[test]
    fn ring_axioms((i, es) in basis_and_elements(3, 30)) {
        let (basis, _) = &bases()[i];
        let (a, b, c) = (el(&es[0]), el(&es[1]), el(&es[2]));
        let ab = basis.mul(&a, &b).unwrap();
        prop_assert_eq!(&ab, &basis.mul(&b, &a).unwrap());
        prop_assert_eq!(
            basis.mul(&ab, &c).unwrap(),
            basis.mul(&a, &basis.mul(&b, &c).unwrap()).unwrap()
        );
        let lhs = basis.mul(&a, &basis.add(&b, &c).unwrap()).unwrap();
        let rhs = basis.add(&ab, &basis.mul(&a, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(basis.sub(&basis.add(&a, &b).unwrap(), &b).unwrap(), a.clone());
        let unity = basis.unity();
        prop_assert_eq!(basis.mul_rational(unity, &a.to_rational()).unwrap(), a.to_rational());
    }

    #[test]
    fn division_round_trip((i, es) in basis_and_elements(2, 40)) {
        let (basis, _) = &bases()[i];
        let (a, b) = (el(&es[0]), el(&es[1]));
        prop_assume!(!b.is_zero());
        let q = basis.divide(&a, &b).unwrap();
        prop_assert_eq!(basis.mul_rational(&q, &b.to_rational()).unwrap(), a.to_rational());
        let ab = basis.mul(&a, &b).unwrap();
        let div = basis.divisor(&b).unwrap();
        prop_assert_eq!(div.divide_exact(&ab), Some(a.clone()));
        prop_assert_eq!(div.quotient(&a), q);
    }

    #[test]
    fn gap_closure((i, ms) in (0..6usize, (1u64..400, 1u64..400)), seed in any::<u64>()) {
        let (basis, _) = &bases()[i];
        let d = basis.degree();
        let (m, m2) = (BigRational::from_integer(ms.0.into()), BigRational::from_integer(ms.1.into()));
        let r1 = szt_core::gap::gap_radius_rational(&m, d).unwrap();
        let r2 = szt_core::gap::gap_radius_rational(&m2, d).unwrap();
        let pick = |r: &BigInt, salt: u64| {
            let r: i64 = r.try_into().unwrap();
            let span = (2 * r + 1) as u64;
            let v: Vec<i64> = (0..d as u64)
                .map(|k| (seed.wrapping_mul(6364136223846793005).wrapping_add(salt * 31 + k) % span) as i64 - r)
                .collect();
            el(&v)
        };
        let (a, b) = (pick(&r1, 1), pick(&r2, 2));
        let one = BigInt::one();
        prop_assert!(contains(basis, &m, &one, &a).unwrap());
        prop_assert!(contains(basis, &m2, &one, &b).unwrap());
        let sb = sum_bound(&m, &m2, d).unwrap();
        prop_assert!(contains(basis, &sb, &one, &basis.add(&a, &b).unwrap()).unwrap());
        prop_assert!(contains(basis, &sb, &one, &basis.sub(&a, &b).unwrap()).unwrap());
        let pb = product_bound(&m, &m2, d, basis.c_lambda()).unwrap();
        prop_assert!(contains(basis, &pb, &one, &basis.mul(&a, &b).unwrap()).unwrap());
    }

    #[test]
    fn canonical_line_is_symmetric_and_normalized((i, es) in basis_and_elements(4, 20)) {
        let (basis, _) = &bases()[i];
        let p = Point::new(el(&es[0]), el(&es[1]));
        let q = Point::new(el(&es[2]), el(&es[3]));
        prop_assume!(p != q);
        let l = line_through(basis, &p, &q).unwrap();
        prop_assert_eq!(&l, &line_through(basis, &q, &p).unwrap());
        prop_assert!(on_line(basis, &p, &l).unwrap());
        prop_assert!(on_line(basis, &q, &l).unwrap());
        let lead = if l.a.is_zero() { &l.b } else { &l.a };
        prop_assert_eq!(lead, basis.unity());
        // a third point on the line yields the same canonical triple
        let dx = basis.sub(&q.x, &p.x).unwrap();
        let dy = basis.sub(&q.y, &p.y).unwrap();
        let t = Point::new(
            basis.add(&q.x, &basis.add(&dx, &dx).unwrap()).unwrap(),
            basis.add(&q.y, &basis.add(&dy, &dy).unwrap()).unwrap(),
        );
        prop_assert_eq!(line_through(basis, &p, &t).unwrap(), l);
    }

    #[test]
    fn index_richness_matches_naive_scan(
        (i, es) in basis_and_elements(4, 6),
        extra in prop::collection::vec((-3i64..=3, -3i64..=3), 1..30),
    ) {
        let (basis, _) = &bases()[i];
        let d = basis.degree();
        let widen = |v: i64| -> Vec<i64> { (0..d).map(|k| if k == 0 { v } else { 0 }).collect() };
        let mut points: Vec<Point> = extra
            .iter()
            .map(|&(x, y)| Point::new(el(&widen(x)), el(&widen(y))))
            .collect();
        points.sort();
        points.dedup();
        let p = Point::new(el(&es[0]), el(&es[1]));
        let q = Point::new(el(&es[2]), el(&es[3]));
        prop_assume!(p != q);
        let mut lines: Vec<CanonicalLine> = vec![line_through(basis, &p, &q).unwrap()];
        for w in points.windows(2) {
            lines.push(line_through(basis, &w[0], &w[1]).unwrap());
        }
        lines.sort();
        let index = PointIndex::new(basis, &points).unwrap();
        let fast = index.richness_many(basis, &lines).unwrap();
        for (line, k) in lines.iter().zip(&fast) {
            let naive = points.iter().filter(|pt| on_line(basis, pt, line).unwrap()).count() as u64;
            prop_assert_eq!(*k, naive);
        }
        prop_assert_eq!(
            index.count_incidences(basis, &lines).unwrap(),
            count_incidences(basis, &points, &lines).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn both_family_generators_agree(
        basis_i in prop::sample::select(vec![0usize, 1, 4]),
        n in 200u64..3000,
        r in 2u64..4,
        halvings in 0u32..2,
    ) {
        let (basis, _) = bases().swap_remove(basis_i);
        let params = ConstructionParams {
            basis: Arc::new(basis),
            n,
            alpha: num_rational::Ratio::new(1, 2),
            r,
            c1: BigRational::new(BigInt::one(), BigInt::from(1u32 << halvings)),
            auto_tune: false,
        };
        prop_assume!(params.validate().is_ok());
        let Ok(geom) = build_cell_geometry(&params) else { return Ok(()) };
        let fast = generate_line_family(&geom).unwrap();
        let slow = generate_line_family_reference(&geom).unwrap();
        prop_assert_eq!(&fast.lines, &slow.lines);
        prop_assert_eq!(fast.provenance, slow.provenance);
        prop_assert_eq!(fast.cell_lines, slow.cell_lines);
        prop_assert_eq!(fast.total_before_dedup, slow.total_before_dedup);
    }
}

#[test]
fn gap_enumeration_agrees_with_membership() {
    for (basis, _) in bases() {
        let basis = Arc::new(basis);
        for m in [1u64, 7, 27, 100] {
            let m = BigRational::from_integer(m.into());
            let gap = GapSet::generate(basis.clone(), m.clone(), 2).unwrap();
            let listed = gap.elements();
            assert_eq!(BigInt::from(listed.len()), gap.cardinality());
            let two = BigInt::from(2);
            for e in &listed {
                assert!(contains(&basis, &m, &two, e).unwrap());
            }
        }
    }
}
