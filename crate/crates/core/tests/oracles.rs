//! Library results against independent brute-force computations.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use slicelab::census::{classify_slice, full_census, Classifier};
use slicelab::constructions::lookup;
use slicelab::geometry::{gaussian_binomial, SubspaceIter};
use slicelab::stats::slice_distribution;
use slicelab::{
    make_field, Budget, Elem, Field, Grassmannian, HomogeneousPolynomial, ProjectiveVariety,
    QuadricClass,
};

/// All nonzero vectors of F_q^{len}, one per projective class (first
/// nonzero coordinate equal to 1).
fn normalized_vectors(f: &Field, len: usize) -> Vec<Vec<Elem>> {
    let q = f.order();
    let total = q.pow(len as u32);
    (1..total)
        .map(|mut i| {
            (0..len)
                .map(|_| {
                    let d = i % q;
                    i /= q;
                    f.elem(d)
                })
                .collect::<Vec<_>>()
        })
        .filter(|v| v.iter().find(|c| !c.is_zero()) == Some(&Elem::ONE))
        .collect()
}

fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    f.sum(a.iter().zip(b).map(|(&x, &y)| f.mul(x, y)))
}

/// Z(H) for each H, evaluating the equations of H and X at every point.
fn oracle_histogram(x: &ProjectiveVariety, f: &Field, k: usize) -> BTreeMap<u64, u64> {
    let pts = normalized_vectors(f, x.n() + 1);
    let mut hist = BTreeMap::new();
    for h in Grassmannian::new(x.n(), k, f).unwrap().subspaces() {
        let z = pts
            .iter()
            .filter(|v| h.equations().iter().all(|e| dot(f, e, v).is_zero()))
            .filter(|v| x.generators().iter().all(|g| g.evaluate(f, v).is_zero()))
            .count() as u64;
        *hist.entry(z).or_insert(0) += 1;
    }
    hist
}

#[test]
fn slice_histograms_match_direct_evaluation() {
    for name in [
        "conic-p2",
        "split-pair-p2",
        "two-points-p2",
        "quadric-cone-p3",
        "plane-cubic-p2",
    ] {
        let e = lookup(name).unwrap();
        for p in [2u64, 3] {
            let f = make_field(p, 1).unwrap();
            let x = e.instantiate(&f).unwrap();
            for k in 1..x.n() {
                let d = slice_distribution(&x, &f, k, Budget::default()).unwrap();
                assert_eq!(
                    d.histogram,
                    oracle_histogram(&x, &f, k),
                    "{name} p={p} k={k}"
                );
            }
        }
    }
}

/// Row spaces of all k x (n+1) matrices of rank k, deduplicated by their
/// sets of null vectors.
fn oracle_grassmannian_size(f: &Field, n: usize, k: usize) -> usize {
    let vecs = normalized_vectors(f, n + 1);
    let mut seen = BTreeSet::new();
    let mut rows = vec![0usize; k];
    loop {
        let m: Vec<Vec<Elem>> = rows.iter().map(|&i| vecs[i].clone()).collect();
        if slicelab::linalg::rank(f, &m) == k {
            let zeros: BTreeSet<usize> = (0..vecs.len())
                .filter(|&j| m.iter().all(|r| dot(f, r, &vecs[j]).is_zero()))
                .collect();
            seen.insert(zeros.into_iter().collect::<Vec<_>>());
        }
        let mut i = 0;
        loop {
            if i == k {
                return seen.len();
            }
            rows[i] += 1;
            if rows[i] < vecs.len() {
                break;
            }
            rows[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn grassmannian_sizes_match_row_space_oracle() {
    for (p, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
        let f = make_field(p, 1).unwrap();
        for k in 1..=n {
            let enumerated = SubspaceIter::new(&f, n, k).count();
            assert_eq!(
                enumerated,
                oracle_grassmannian_size(&f, n, k),
                "p={p} n={n} k={k}"
            );
            assert_eq!(BigUint::from(enumerated), gaussian_binomial(n + 1, k, p));
        }
    }
}

fn proportional(f: &Field, a: &HomogeneousPolynomial, b: &HomogeneousPolynomial) -> bool {
    let Some((e, ca)) = a.terms().next() else {
        return b.is_zero();
    };
    let cb = b.coefficient(e);
    if cb.is_zero() {
        return false;
    }
    let s = f.div(cb, ca).unwrap();
    a.scale(f, s) == *b
}

/// Decides the quadric type of g by searching for linear factorizations
/// over F_q and F_{q^2}.
fn oracle_quadric_class(f: &Field, g: &HomogeneousPolynomial) -> QuadricClass {
    if g.is_zero() {
        return QuadricClass::WholeSpace;
    }
    let nv = g.nvars();
    let forms: Vec<HomogeneousPolynomial> = normalized_vectors(f, nv)
        .iter()
        .map(|c| HomogeneousPolynomial::linear(f, c))
        .collect();
    for (i, a) in forms.iter().enumerate() {
        if proportional(f, &a.mul(f, a).unwrap(), g) {
            return QuadricClass::DoubleHyperplane;
        }
        for b in &forms[i + 1..] {
            if proportional(f, &a.mul(f, b).unwrap(), g) {
                return QuadricClass::SplitPair;
            }
        }
    }
    // prime-field coefficients embed in F_{q^2} by index
    let f2 = make_field(f.p() as u64, 2).unwrap();
    let g2 = HomogeneousPolynomial::from_terms(&f2, nv, 2, g.terms().map(|(e, c)| (e.clone(), c)))
        .unwrap();
    for c in normalized_vectors(&f2, nv) {
        let conj: Vec<Elem> = c.iter().map(|&a| f2.frobenius(a)).collect();
        let l = HomogeneousPolynomial::linear(&f2, &c);
        let lc = HomogeneousPolynomial::linear(&f2, &conj);
        if !proportional(&f2, &l, &lc) && proportional(&f2, &l.mul(&f2, &lc).unwrap(), &g2) {
            return QuadricClass::ConjugatePair;
        }
    }
    QuadricClass::Irreducible
}

#[test]
fn quadric_classifier_matches_factorization_search() {
    let cases = [
        ("conic-p2", 3u64, 1usize),
        ("split-pair-p2", 3, 1),
        ("conjugate-pair-p2", 3, 1),
        ("conjugate-pair-p2", 5, 1),
        ("quadric-cone-p3", 3, 1),
        ("quadric-cone-p3", 5, 1),
        ("quadric-cone-p3", 3, 2),
        ("quadric-cone-p4", 3, 2),
    ];
    for (name, p, k) in cases {
        let f = make_field(p, 1).unwrap();
        let x = lookup(name).unwrap().instantiate(&f).unwrap();
        for h in Grassmannian::new(x.n(), k, &f).unwrap().subspaces() {
            let v =
                classify_slice(&x, &f, &h, &Classifier::QuadricExact, Budget::default()).unwrap();
            let g = x.slice(&f, &h).unwrap().generators()[0].clone();
            assert_eq!(
                v.class,
                Some(oracle_quadric_class(&f, &g)),
                "{name} p={p} {h:?}"
            );
        }
    }
}

#[test]
fn cone_census_is_q_squared_and_bad_planes_contain_vertex() {
    for p in [3u64, 5, 7] {
        let f = make_field(p, 1).unwrap();
        let x = lookup("quadric-cone-p3").unwrap().instantiate(&f).unwrap();
        let c = full_census(&x, &f, 1, &Classifier::QuadricExact, Budget::default()).unwrap();
        assert_eq!(c.very_bad_count, p * p);
        assert_eq!(BigUint::from(c.total), gaussian_binomial(4, 1, p));
        let vertex = slicelab::ProjectivePoint::from_ints(&f, &[0, 0, 0, 1]).unwrap();
        for h in Grassmannian::new(3, 1, &f).unwrap().subspaces() {
            let v =
                classify_slice(&x, &f, &h, &Classifier::QuadricExact, Budget::default()).unwrap();
            if v.very_bad {
                assert!(h.contains(&f, &vertex));
            }
        }
    }
}

#[test]
fn incidence_counts_match_direct_filter() {
    let f = make_field(3, 1).unwrap();
    let g = Grassmannian::new(3, 2, &f).unwrap();
    let pts = normalized_vectors(&f, 4);
    let a = slicelab::ProjectivePoint::new(&f, pts[0].clone()).unwrap();
    let b = slicelab::ProjectivePoint::new(&f, pts[7].clone()).unwrap();
    let direct = g
        .subspaces()
        .filter(|h| h.contains(&f, &a) && h.contains(&f, &b))
        .count() as u64;
    assert_eq!(g.count_through_points(&[a, b]).unwrap(), direct);
    // lines of P^3 through two points: exactly one
    assert_eq!(direct, 1);
}
