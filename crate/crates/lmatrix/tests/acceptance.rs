//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with --nocapture). Asymptotic statements are checked as finite
//! instances plus monotone trends; every tolerance is pinned here.

use lmatrix::construct::{
    construct_fivethirds, construct_square, construct_subset_incidence, construct_threehalves,
    construct_xy3, ConstructionReport,
};
use lmatrix::field::{Element, FieldCtx};
use lmatrix::matrix::{binomial_u128, ExactMatrix};
use lmatrix::mpoly::{multi_indices, MultiPoly};
use lmatrix::qpoly::QPoly;
use lmatrix::relations::{
    normalize_min_negatives, primitive_relation, relation_to_differences, verify_certificate,
    IntRelation, LSet, PrimitiveRelation,
};
use lmatrix::search::{min_rank, n_of_r, primitive_relation_box_search, within_box, SearchSpec};
use lmatrix::spectral::{digraph_pipeline, polyrel_matrix, polytobetter_pipeline};
use lmatrix::vanishing::genupper_witness;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

fn qctx() -> FieldCtx {
    FieldCtx::rational()
}

fn qset(vals: &[i64]) -> LSet {
    let ctx = qctx();
    LSet::new(ctx.clone(), vals.iter().map(|&v| ctx.from_i64(v)).collect()).unwrap()
}

fn sqrt2_ctx() -> FieldCtx {
    FieldCtx::number_field_from_str("x^2-2").unwrap()
}

fn found(l: &LSet) -> IntRelation {
    match primitive_relation(l).unwrap() {
        PrimitiveRelation::Found(r) => r,
        _ => panic!("relation expected"),
    }
}

fn check_time(start: Instant, limit: Duration, what: &str) {
    let elapsed = start.elapsed();
    assert!(elapsed < limit, "{what} took {elapsed:?}, limit {limit:?}");
}

#[test]
fn acceptance_01_paper_identity() {
    let start = Instant::now();
    let l = qset(&[-1, 1]);
    let res = min_rank(&SearchSpec { l: l.clone(), n: 3, symmetric_only: false }).unwrap();
    assert_eq!(res.min_rank, 2);
    res.witness.verify_l_matrix(l.elems()).unwrap();
    assert_eq!(res.witness.rank().unwrap(), 2);
    let nr = n_of_r(&l, 2, 4, false).unwrap();
    assert_eq!(nr.n, 3); // consistent with the F_2 upper bound r + 1 = 3
    check_time(start, Duration::from_secs(1), "criterion 1");
    println!("ACCEPTANCE 1 PASS: N(2, {{-1,1}}) = 3 with a rank-2 witness at n = 3");
}

/// The construction corpus shared by criterion 2: at least 20 instances
/// across the four named builders. Exact certification where the size
/// permits, a modular lower bound above that.
fn corpus() -> Vec<ConstructionReport> {
    let mut out = Vec::new();
    // quadratic family
    for (vals, qs) in [
        (&[1i64, 2][..], &[5u64, 7, 11, 13][..]),
        (&[2, 3], &[5, 7]),
        (&[3, 4], &[5]),
        (&[4, 5], &[7]),
    ] {
        let l = qset(vals);
        let rel = found(&l);
        for &q in qs {
            out.push(construct_square(&l, &rel, q).unwrap());
        }
    }
    // integer sets whose canonical relation needs the negative-count repair
    for vals in [&[1i64, 3, 8][..], &[1, 2, 3], &[1, 4, 5]] {
        let l = qset(vals);
        let rel = normalize_min_negatives(&l, &found(&l)).unwrap();
        out.push(construct_square(&l, &rel, 7).unwrap());
    }
    // rank-3/2 family
    let nf = sqrt2_ctx();
    let t = nf.generator().unwrap();
    let lr2 = LSet::new(nf.clone(), vec![nf.one(), t.clone(), nf.sub(&t, &nf.one())]).unwrap();
    out.push(
        construct_threehalves(&lr2, &IntRelation::from_i64(&lr2, &[1, -1, 1]).unwrap(), 5).unwrap(),
    );
    let l12 = qset(&[1, 2]);
    out.push(construct_threehalves(&l12, &found(&l12), 5).unwrap());
    let l615 = qset(&[6, 10, 15]);
    out.push(
        construct_threehalves(&l615, &IntRelation::from_i64(&l615, &[0, 3, -2]).unwrap(), 7)
            .unwrap(),
    );
    let l23 = qset(&[2, 3]);
    out.push(construct_threehalves(&l23, &found(&l23), 7).unwrap());
    // rank-5/3 family
    let l123 = qset(&[1, 2, 3]);
    out.push(
        construct_fivethirds(&l123, &IntRelation::from_i64(&l123, &[3, -3, 1]).unwrap(), 3, 0)
            .unwrap(),
    );
    let l145 = qset(&[1, 4, 5]);
    out.push(
        construct_fivethirds(&l145, &IntRelation::from_i64(&l145, &[2, -3, 2]).unwrap(), 3, 0)
            .unwrap(),
    );
    // the {x+y, 3x, 3y} family
    let ctx = qctx();
    out.push(construct_xy3(&ctx, &ctx.one(), &ctx.from_i64(3), 3).unwrap());
    out.push(construct_xy3(&ctx, &ctx.one(), &ctx.from_i64(3), 5).unwrap());
    out.push(construct_xy3(&ctx, &ctx.from_i64(2), &ctx.from_i64(5), 3).unwrap());
    out
}

#[test]
fn acceptance_02_construction_contract() {
    let mut reports = corpus();
    assert!(reports.len() >= 20, "corpus has {} instances", reports.len());
    for report in reports.iter_mut() {
        report.verify().unwrap(); // symmetric, diagonal = lambda, entries in L
        let zero = report.matrix.ctx().zero();
        assert_eq!(report.lambda, zero, "{}: lambda must be 0", report.name);
        let certified = if report.matrix.rows() <= 350 {
            report.certify_exact().unwrap()
        } else {
            report.certify_modular(&[101, 103]).unwrap()
        };
        assert!(
            certified <= report.rank_upper,
            "{}: certified {certified} > bound {}",
            report.name,
            report.rank_upper
        );
    }
    println!(
        "ACCEPTANCE 2 PASS: {} constructed instances verified with certified rank <= bound",
        reports.len()
    );
}

#[test]
fn acceptance_03_quadratic_growth() {
    let start = Instant::now();
    let l = qset(&[1, 2]);
    let rel = found(&l);
    let mut prev_ratio = 0.0f64;
    let mut last_ratio = 0.0f64;
    for q in [5u64, 7, 11, 13] {
        let mut report = construct_square(&l, &rel, q).unwrap();
        let r = report.certify_exact().unwrap();
        assert!(r <= (1 + 2 * q) as usize, "rank {r} above 1 + 2q at q = {q}");
        assert_eq!(report.matrix.rows(), (q * q) as usize);
        let ratio = (q * q) as f64 / r as f64;
        assert!(ratio > prev_ratio, "ratio not strictly increasing at q = {q}");
        prev_ratio = ratio;
        last_ratio = ratio;
    }
    assert!(last_ratio > 5.0, "ratio {last_ratio} at q = 13 must exceed 5");
    check_time(start, Duration::from_secs(30), "criterion 3");
    println!("ACCEPTANCE 3 PASS: quadratic family ratio grows to {last_ratio:.3} > 5 at q = 13");
}

#[test]
fn acceptance_04_three_halves_instance() {
    let start = Instant::now();
    let nf = sqrt2_ctx();
    let t = nf.generator().unwrap();
    let l = LSet::new(nf.clone(), vec![nf.one(), t.clone(), nf.sub(&t, &nf.one())]).unwrap();
    let rel = IntRelation::from_i64(&l, &[1, -1, 1]).unwrap();
    let s = relation_to_differences(&l, &rel).unwrap().s;
    assert_eq!(s, BigInt::from(2));
    let mut report = construct_threehalves(&l, &rel, 5).unwrap();
    assert_eq!(report.matrix.rows(), 125);
    assert_eq!(report.lambda, nf.zero());
    report.verify().unwrap();
    let rank = report.certify_exact().unwrap();
    // 1 + S q + (S + 1) q^2 with S = 2
    assert!(rank <= 1 + 2 * 5 + 3 * 25, "rank {rank} above the stated bound 86");
    check_time(start, Duration::from_secs(60), "criterion 4");
    println!("ACCEPTANCE 4 PASS: size-125 instance over Q(sqrt2) with exact rank {rank} <= 86");
}

#[test]
fn acceptance_05_five_thirds_instance() {
    let start = Instant::now();
    let l = qset(&[1, 2, 3]);
    let rel = IntRelation::from_i64(&l, &[3, -3, 1]).unwrap();
    // the six proof cases are re-verified hyperplane by hyperplane inside
    // the builder; a case failure is a construction error
    let mut report = construct_fivethirds(&l, &rel, 3, 0).unwrap();
    assert_eq!(report.matrix.rows(), 243);
    report.verify().unwrap();
    let rank = report.certify_exact().unwrap();
    assert!(rank <= report.rank_upper);
    check_time(start, Duration::from_secs(120), "criterion 5");
    println!(
        "ACCEPTANCE 5 PASS: size-243 instance with all six cases verified, rank {rank} <= {}",
        report.rank_upper
    );
}

#[test]
fn acceptance_06_digraph_multiplicity() {
    let start = Instant::now();
    let report = digraph_pipeline(&QPoly::from_integers(&[-2, 0, 1]), 50).unwrap();
    let m = report.multiplicity;
    assert!(m >= 11 && m <= 25, "multiplicity {m} outside [11, 25]");
    // the n / deg upper bound on every pipeline output in the corpus
    for (coeffs, n) in [
        (&[-2i64, 0, 1][..], 50usize),
        (&[-2, 0, 1], 21),
        (&[-3, 0, 1], 14),
        (&[-1, -1, 0, 1], 12),
        (&[-1, 1], 9),
        (&[0, 1], 5),
    ] {
        let f = QPoly::from_integers(coeffs);
        let d = f.degree();
        let out = digraph_pipeline(&f, n).unwrap();
        assert!(
            out.multiplicity <= n / d,
            "multiplicity {} above n/d = {} for degree {d} at n = {n}",
            out.multiplicity,
            n / d
        );
    }
    check_time(start, Duration::from_secs(30), "criterion 6");
    println!("ACCEPTANCE 6 PASS: sqrt2 multiplicity {m} in [11, 25]; n/deg bound held corpus-wide");
}

#[test]
fn acceptance_07_entrywise_bound_suite() {
    let start = Instant::now();
    let ctx = FieldCtx::prime(101).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..200 {
        let n = rng.random_range(2..=12);
        let m = ExactMatrix::from_fn(ctx.clone(), n, n, |_, _| ctx.sample(&mut rng));
        let deg = rng.random_range(0..=3usize);
        let mut coeffs: Vec<Element> = (0..=deg).map(|_| ctx.sample(&mut rng)).collect();
        // sparse-term polynomials: drop interior coefficients sometimes
        if deg >= 2 && trial % 3 == 0 {
            coeffs[1] = ctx.zero();
        }
        let fm = m.entrywise_apply(&coeffs).unwrap(); // asserts both bounds
        // re-check the dense bound here as well
        let r = m.rank().unwrap() as u128;
        let k = coeffs.iter().rposition(|c| !ctx.is_zero(c)).unwrap_or(0) as u128;
        assert!((fm.rank().unwrap() as u128) <= binomial_u128(r + k, k));
    }
    check_time(start, Duration::from_secs(10), "criterion 7");
    println!("ACCEPTANCE 7 PASS: 200 random entrywise trials satisfied both binomial bounds");
}

#[test]
fn acceptance_08_hasse_facts() {
    let start = Instant::now();
    // H1/H2-style expansion identity over Q and F_7, 25 evaluations each
    for ctx in [qctx(), FieldCtx::prime(7).unwrap()] {
        let p = MultiPoly::parse(ctx.clone(), "x1^3-2*x1*x2^2+3*x2-5", 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..25 {
            let a = [ctx.sample(&mut rng), ctx.sample(&mut rng)];
            let z = [ctx.sample(&mut rng), ctx.sample(&mut rng)];
            let shifted = [ctx.add(&a[0], &z[0]), ctx.add(&a[1], &z[1])];
            let lhs = p.eval(&shifted, &ctx).unwrap();
            let mut rhs = ctx.zero();
            for m in 0..=p.degree() {
                for idx in multi_indices(2, m) {
                    let der = p.hasse_derivative(&idx).unwrap();
                    let mut term = der.eval(&a, &ctx).unwrap();
                    for (zi, &e) in z.iter().zip(&idx) {
                        if e > 0 {
                            term = ctx.mul(&term, &ctx.pow(zi, e as u64));
                        }
                    }
                    rhs = ctx.add(&rhs, &term);
                }
            }
            assert_eq!(lhs, rhs);
        }
    }
    // composition constant c_{i,j} = prod C(i_t + j_t, i_t)
    let ctx = FieldCtx::prime(7).unwrap();
    let p = MultiPoly::parse(ctx.clone(), "x1^4+2*x1^2*x2-x2^3", 2).unwrap();
    for (i, j) in [([1u32, 0], [1u32, 1]), ([2, 1], [1, 0]), ([0, 2], [0, 1])] {
        let lhs = p.hasse_derivative(&i).unwrap().hasse_derivative(&j).unwrap();
        let sum: Vec<u32> = i.iter().zip(&j).map(|(a, b)| a + b).collect();
        let c: i64 = i
            .iter()
            .zip(&j)
            .map(|(&a, &b)| binomial_u128((a + b) as u128, a as u128) as i64)
            .product();
        let rhs = p.hasse_derivative(&sum).unwrap().scale(&ctx.from_i64(c));
        assert_eq!(lhs, rhs);
    }
    // char-p case: x^p has first Hasse derivative 0 and p-th equal to 1
    let f5 = FieldCtx::prime(5).unwrap();
    let xp = MultiPoly::parse(f5.clone(), "x1^5", 1).unwrap();
    assert!(xp.hasse_derivative(&[1]).unwrap().is_zero());
    let d5 = xp.hasse_derivative(&[5]).unwrap();
    assert_eq!(d5.eval(&[f5.zero()], &f5).unwrap(), f5.one());
    check_time(start, Duration::from_secs(5), "criterion 8");
    println!("ACCEPTANCE 8 PASS: Hasse expansion, composition rule and char-p case verified");
}

#[test]
fn acceptance_09_genupper_witness() {
    let start = Instant::now();
    let l = qset(&[1, 2]);
    let rel = found(&l);
    let report = construct_square(&l, &rel, 3).unwrap();
    assert_eq!(report.matrix.rows(), 9);
    let rank = report.matrix.rank().unwrap();
    let w = genupper_witness(&report.matrix, &l).unwrap();
    assert!(w.poly.is_homogeneous());
    assert!(w.poly.has_integer_coeffs());
    let q = qctx();
    assert_eq!(w.poly.eval(&[q.one(), q.one()], &q).unwrap(), q.one());
    let required = 9 - (rank + 1);
    assert!(
        (w.order as usize) >= required,
        "vanishing order {} below size - (rank+1) = {required}",
        w.order
    );
    check_time(start, Duration::from_secs(60), "criterion 9");
    println!(
        "ACCEPTANCE 9 PASS: witness from the 9x9 instance vanishes to order {} >= {required}",
        w.order
    );
}

#[test]
fn acceptance_10_relation_engine_vs_oracle() {
    let start = Instant::now();
    let q = qctx();
    let rat = |n: i64, d: i64| Element::Rat(num_rational_elem(n, d));
    let mut sets: Vec<LSet> = Vec::new();
    for vals in [
        &[1i64, 2][..],
        &[1, 3],
        &[2, 3],
        &[3, 4],
        &[1, 2, 3],
        &[1, 3, 8],
        &[1, 4, 5],
        &[2, 3, 5],
        &[1, 2, 4],
        &[2, 5],
        &[1, 5],
        &[3, 5],
        &[4, 5],
        &[1, 6],
        &[5, 6],
        &[6, 10, 15],
        &[1, 2, 5],
        &[2, 4, 7],
        &[1, 3, 5],
        &[3, 7],
    ] {
        sets.push(qset(vals));
    }
    for pairs in [
        vec![(1i64, 2i64), (3, 2)],
        vec![(1, 3), (2, 3)],
        vec![(1, 2), (1, 4)],
        vec![(2, 3), (5, 3)],
        vec![(1, 2), (2, 3), (7, 6)],
    ] {
        let elems: Vec<Element> = pairs.iter().map(|&(n, d)| rat(n, d)).collect();
        sets.push(LSet::new(q.clone(), elems).unwrap());
    }
    let nf = sqrt2_ctx();
    let t = nf.generator().unwrap();
    let one = nf.one();
    for elems in [
        vec![one.clone(), t.clone()],
        vec![t.clone(), nf.add(&t, &one)],
        vec![one.clone(), nf.sub(&t, &one)],
        vec![t.clone(), nf.add(&t, &t)],
        vec![one.clone(), t.clone(), nf.sub(&t, &one)],
    ] {
        sets.push(LSet::new(nf.clone(), elems).unwrap());
    }
    assert_eq!(sets.len(), 30);
    for l in &sets {
        let engine = primitive_relation(l).unwrap();
        let boxed = primitive_relation_box_search(l, 10).unwrap();
        match (&engine, &boxed) {
            (PrimitiveRelation::Found(rel), Some(_)) => {
                // every returned relation re-verifies on construction; the
                // canonical one must itself lie inside the box
                assert!(within_box(rel.coeffs(), 10));
            }
            (PrimitiveRelation::Infeasible(cert), None) => {
                assert!(verify_certificate(l, cert), "certificate fails for {:?}", l.render());
            }
            _ => panic!("engine and box oracle disagree on {:?}", l.render()),
        }
    }
    check_time(start, Duration::from_secs(30), "criterion 10");
    println!("ACCEPTANCE 10 PASS: engine and box oracle agree on all 30 corpus sets");
}

fn num_rational_elem(n: i64, d: i64) -> num_rational::BigRational {
    num_rational::BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn acceptance_11_subset_incidence() {
    let start = Instant::now();
    let mut report = construct_subset_incidence(7, 3).unwrap();
    assert_eq!(report.matrix.rows(), 35);
    report.verify().unwrap();
    let allowed: Vec<Element> = (1..=3).map(|v| qctx().from_i64(v)).collect();
    report.matrix.verify_l_matrix(&allowed).unwrap();
    let rank = report.certify_exact().unwrap();
    assert!(rank <= 8, "rank {rank} above r + 1 = 8");
    check_time(start, Duration::from_secs(5), "criterion 11");
    println!("ACCEPTANCE 11 PASS: 35x35 subset-incidence matrix with rank {rank} <= 8");
}

#[test]
fn acceptance_12_polytobetter() {
    let start = Instant::now();
    let nf = sqrt2_ctx();
    let l = LSet::new(nf.clone(), vec![nf.one(), nf.generator().unwrap()]).unwrap();
    let p = MultiPoly::parse(qctx(), "2*x1^2-x2^2", 2).unwrap();
    // the 2x2 progenitor has eigenvalue 1, certified by exact rank
    let prog = polyrel_matrix(&p, &l).unwrap();
    assert_eq!(prog.matrix.rows(), 2);
    assert!(prog.shifted_rank < 2);
    let report = polytobetter_pipeline(&p, &l, 25).unwrap();
    assert_eq!(report.size, 50);
    report.matrix.verify_l_matrix(l.elems()).unwrap();
    assert!(
        report.rank_exact <= 25 + report.patch_slack,
        "rank {} above 25 + patch slack {}",
        report.rank_exact,
        report.patch_slack
    );
    check_time(start, Duration::from_secs(60), "criterion 12");
    let ratio = report.size as f64 / report.rank_exact as f64;
    let pass = ratio > 1.4;
    println!(
        "ACCEPTANCE 12 {}: size/rank = 50/{} = {ratio:.4} (threshold 1.4)",
        if pass { "PASS" } else { "FAIL" },
        report.rank_exact
    );
    // The measured ratio at block 25 is 50/38 = 1.3158: the exact rank is
    // pinned at 38 by the character-space dimension of the q = 5 patches
    // (13 = 1 + 3(q-1)), so the 1.4 threshold is reachable only from block
    // 49 upward (98/68 = 1.44). The assertion is kept as specified.
    assert!(ratio > 1.4, "size/rank ratio {ratio:.4} does not exceed 1.4 at block 25");
}
