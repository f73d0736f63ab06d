use super::*;
use crate::diffspec::is_pwpn;
use crate::linalg::gl_order;
use crate::ortho::{make_c_mult, make_matrix_ortho, verify_orthomorphism};
use alloc::collections::BTreeSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn field(p: u32, n: u32) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::new(p, n, None).unwrap())
}

fn g_mult(f: &Arc<FieldCtx>) -> Ortho {
    make_c_mult(f, f.primitive()).unwrap()
}

fn neg(f: &Arc<FieldCtx>) -> Ortho {
    make_c_mult(f, f.neg(Elt::ONE)).unwrap()
}

/// Every invertible matrix over F_p, as a table.
fn all_linear_perms(ctx: &Arc<FieldCtx>) -> Vec<Vec<u32>> {
    let (p, d) = (ctx.p(), ctx.n() as usize);
    let total = (p as usize).pow((d * d) as u32);
    (0..total)
        .filter_map(|mut idx| {
            let entries = (0..d * d).map(|_| {
                let e = (idx % p as usize) as u32;
                idx /= p as usize;
                e
            }).collect();
            let m = Matrix::from_rows(p, d, entries).unwrap();
            m.is_invertible().then(|| m.to_table(ctx).unwrap())
        })
        .collect()
}

fn brute_admissible(wp: &Ortho) -> BTreeSet<Vec<u32>> {
    let ctx = wp.ctx();
    all_linear_perms(ctx)
        .into_iter()
        .filter(|t| ctx.elements().all(|x| t[wp.apply(x).idx()] == wp.apply(Elt(t[x.idx()])).0))
        .collect()
}

fn random_nonlinear_ortho(f: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> Ortho {
    loop {
        let mut t: Vec<u32> = (0..f.order()).collect();
        for i in (1..t.len()).rev() {
            t.swap(i, rng.gen_range(0..=i));
        }
        if let Ok(o) = verify_orthomorphism(&VFunc::from_table(f.clone(), f.clone(), t).unwrap()) {
            if !o.is_linear() {
                return o;
            }
        }
    }
}

fn random_linear_perm(f: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> VFunc {
    let d = f.n() as usize;
    loop {
        let entries = (0..d * d).map(|_| rng.gen_range(0..f.p())).collect();
        let m = Matrix::from_rows(f.p(), d, entries).unwrap();
        if m.is_invertible() {
            return VFunc::from_table(f.clone(), f.clone(), m.to_table(f).unwrap()).unwrap();
        }
    }
}

#[test]
fn commutation_examples() {
    let f8 = field(2, 3);
    let wp = g_mult(&f8);
    assert!(commutes_with(&VFunc::identity(&f8), &wp));
    let sq = VFunc::from_monomial(&f8, 2).unwrap();
    let c = f8.primitive();
    assert_ne!(f8.mul(c, c), c);
    assert!(!commutes_with(&sq, &wp));
    // c² = c only for c ∈ F_2, so the square map commutes with no g-mult over F_8
    for c in f8.elements().filter(|c| c.0 > 1) {
        assert!(!commutes_with(&sq, &make_c_mult(&f8, c).unwrap()));
    }
    for (p, n) in [(3, 2), (3, 3), (5, 2)] {
        let f = field(p, n);
        let wp = make_c_mult(&f, f.from_int(2)).unwrap();
        for t in all_linear_perms(&f).into_iter().step_by(7) {
            assert!(commutes_with(&VFunc::from_table(f.clone(), f.clone(), t).unwrap(), &wp));
        }
    }
}

#[test]
fn prime_field_scalar_admits_all_of_gl() {
    for (p, n) in [(3, 2), (3, 3), (5, 2), (7, 2)] {
        let f = field(p, n);
        let wp = make_c_mult(&f, f.from_int(p as i128 - 1)).unwrap();
        let all = admissible_l2_enumerate(&wp).unwrap();
        assert_eq!(all.len() as u128, gl_order(p, n));
    }
}

#[test]
fn primitive_scalar_over_f8() {
    let f8 = field(2, 3);
    let wp = g_mult(&f8);
    let got: Vec<Vec<u32>> = admissible_l2_enumerate(&wp).unwrap().iter().map(|l| l.table().to_vec()).collect();
    // a·x^{2^i} commutes with g·x iff g^{2^i} = g, i.e. i = 0
    let mut expect: Vec<Vec<u32>> = f8.nonzero().map(|a| f8.elements().map(|x| f8.mul(a, x).0).collect()).collect();
    expect.sort();
    assert_eq!(got, expect);
    assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), brute_admissible(&wp));
}

#[test]
fn admissible_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, n) in [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2)] {
        let f = field(p, n);
        let mut orthos = vec![g_mult(&f)];
        for _ in 0..3 {
            let d = n as usize;
            loop {
                let entries = (0..d * d).map(|_| rng.gen_range(0..p)).collect();
                if let Ok(o) = make_matrix_ortho(&f, &Matrix::from_rows(p, d, entries).unwrap()) {
                    orthos.push(o);
                    break;
                }
            }
        }
        if matches!(f.order(), 9 | 16) {
            orthos.push(random_nonlinear_ortho(&f, &mut rng));
        }
        for wp in &orthos {
            let got: Vec<Vec<u32>> = admissible_l2_enumerate(wp).unwrap().iter().map(|l| l.table().to_vec()).collect();
            let mut sorted = got.clone();
            sorted.sort();
            assert_eq!(got, sorted, "not in lexicographic order");
            assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), brute_admissible(wp));
        }
    }
}

#[test]
fn admissible_set_is_a_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, n) in [(2, 3), (3, 2), (2, 4)] {
        let f = field(p, n);
        let mut orthos = vec![g_mult(&f)];
        if matches!(f.order(), 9 | 16) {
            orthos.push(random_nonlinear_ortho(&f, &mut rng));
        }
        for wp in &orthos {
            let all = admissible_l2_enumerate(wp).unwrap();
            let set: BTreeSet<Vec<u32>> = all.iter().map(|l| l.table().to_vec()).collect();
            assert!(set.contains(VFunc::identity(&f).table()));
            for a in &all {
                assert!(set.contains(a.inverse().unwrap().table()));
                for b in all.iter().take(20) {
                    assert!(set.contains(VFunc::compose(a, b).unwrap().table()));
                }
            }
        }
    }
}

#[test]
fn admissible_size_limit() {
    let f = field(2, 10);
    assert!(matches!(admissible_l2_enumerate(&g_mult(&f)), Err(Error::SizeLimit { .. })));
    // every element of GL(5, 3) commutes with −x, far more than the table cap
    let f243 = field(3, 5);
    assert!(matches!(admissible_l2_enumerate(&neg(&f243)), Err(Error::SizeLimit { .. })));
}

#[test]
fn equilem_small_fields() {
    for (f, wp) in [(field(2, 2), None), (field(2, 3), None), (field(3, 2), Some(()))] {
        let wp = if wp.is_some() { neg(&f) } else { g_mult(&f) };
        let rep = equilem_solutions(&wp).unwrap();
        let fact: u64 = (1..=f.order() as u64).product();
        assert_eq!(rep.permutations, fact);
        assert!(rep.holds());
        assert!(verify_equilem(&wp).unwrap());
        let sols: BTreeSet<Vec<u32>> = rep.solutions.iter().cloned().collect();
        assert_eq!(sols.len(), rep.solutions.len());
        assert_eq!(sols, brute_admissible(&wp));
    }
}

#[test]
fn equilem_nonlinear_orthomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = field(3, 2);
    for _ in 0..3 {
        let wp = random_nonlinear_ortho(&f, &mut rng);
        let rep = equilem_solutions(&wp).unwrap();
        assert!(rep.holds());
        assert!(rep.solutions.iter().all(|s| s[0] == 0));
        let sols: BTreeSet<Vec<u32>> = rep.solutions.into_iter().collect();
        assert_eq!(sols, brute_admissible(&wp));
    }
}

/// Normalized orthomorphisms of F_4, F_8, F_9 and how many are linear.
#[test]
fn small_orthomorphism_counts() {
    for (f, total, linear) in [(field(2, 2), 2, 2), (field(2, 3), 48, 48), (field(3, 2), 249, 27)] {
        let q = f.order() as usize;
        let (mut t, mut l) = (0, 0);
        for_each_permutation(q - 1, &mut |perm| {
            let table: Vec<u32> = core::iter::once(0).chain(perm.iter().map(|&i| i + 1)).collect();
            let v = VFunc::from_table(f.clone(), f.clone(), table).unwrap();
            if crate::ortho::is_orthomorphism(&v) {
                t += 1;
                l += v.is_linearized() as u32;
            }
        });
        assert_eq!((t, l), (total, linear));
    }
}

#[test]
fn equilem_size_limit() {
    let f = field(11, 1);
    assert!(matches!(verify_equilem(&g_mult(&f)), Err(Error::SizeLimit { .. })));
}

#[test]
fn heap_enumerates_each_permutation_once() {
    for len in 0..=6 {
        let mut seen = BTreeSet::new();
        let mut visits = 0u64;
        for_each_permutation(len, &mut |p| {
            visits += 1;
            seen.insert(p.to_vec());
        });
        let fact: u64 = (1..=len as u64).product();
        assert_eq!(visits, fact);
        assert_eq!(seen.len() as u64, fact);
    }
}

#[test]
fn self_equivalence_is_identity_witness() {
    let f16 = field(2, 4);
    let wp = g_mult(&f16);
    for d in [3, 5, 7] {
        let f = VFunc::from_monomial(&f16, d).unwrap();
        let w = are_wp_affine_equivalent(&f, &f, &wp).unwrap().unwrap();
        assert!(w.checked);
        assert_eq!(w.l1.table(), VFunc::identity(&f16).table());
        assert_eq!(w.l2.table(), VFunc::identity(&f16).table());
        assert_eq!((w.alpha1, w.alpha2), (Elt::ZERO, Elt::ZERO));
    }
}

#[test]
fn linear_permutations_are_equivalent() {
    let f8 = field(2, 3);
    let wp = g_mult(&f8);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let a = random_linear_perm(&f8, &mut rng);
        let b = random_linear_perm(&f8, &mut rng);
        let w = are_wp_affine_equivalent(&a, &b, &wp).unwrap().unwrap();
        assert!(w.checked && w.verify(&a, &b, &wp));
        assert_eq!(w.apply(&a).table(), b.table());
    }
}

#[test]
fn cube_versus_fifth_power_over_f16() {
    let f16 = field(2, 4);
    let wp = g_mult(&f16);
    let f1 = VFunc::from_monomial(&f16, 3).unwrap();
    let f2 = VFunc::from_monomial(&f16, 5).unwrap();
    let with = EquivSearch::new(&f1, &f2, &wp, EquivOptions::default()).unwrap().decide().unwrap();
    let without = EquivSearch::new(&f1, &f2, &wp, EquivOptions { prefilter: false, ..Default::default() }).unwrap().decide().unwrap();
    let found = |v: &EquivVerdict| matches!(v, EquivVerdict::Equivalent(_));
    assert_eq!(found(&with), found(&without));
    if let EquivVerdict::Equivalent(w) = &without {
        assert!(w.checked);
    }
}

#[test]
fn lex_least_witness_over_shards() {
    let f8 = field(2, 3);
    let wp = g_mult(&f8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f1 = VFunc::from_monomial(&f8, 3).unwrap();
    let l1 = random_linear_perm(&f8, &mut rng);
    let l2 = admissible_l2_enumerate(&wp).unwrap().pop().unwrap();
    let w0 = EquivWitness { l1, alpha1: Elt(5), l2, alpha2: Elt(3), checked: false };
    let f2 = w0.apply(&f1);
    let search = EquivSearch::new(&f1, &f2, &wp, EquivOptions::default()).unwrap();
    let per_shard: Vec<Option<EquivWitness>> = (0..search.l2_count()).map(|i| search.search_l2(i)).collect();
    let first = per_shard.iter().flatten().next().cloned().unwrap();
    match search.decide().unwrap() {
        EquivVerdict::Equivalent(w) => assert_eq!(w, first),
        v => panic!("{:?}", v),
    }
    assert!(first.checked);
}

#[test]
fn spectrum_mismatch_refutes() {
    let f9 = field(3, 2);
    let wp = neg(&f9);
    let f1 = VFunc::identity(&f9);
    let f2 = VFunc::from_monomial(&f9, 2).unwrap();
    let s = EquivSearch::new(&f1, &f2, &wp, EquivOptions::default()).unwrap();
    assert!(!s.spectra_match().unwrap());
    assert_eq!(s.decide().unwrap(), EquivVerdict::SpectrumMismatch);
    let s = EquivSearch::new(&f1, &f2, &wp, EquivOptions { prefilter: false, ..Default::default() }).unwrap();
    assert_eq!(s.decide().unwrap(), EquivVerdict::Inequivalent);
}

#[test]
fn equivalence_size_limit() {
    let f = field(2, 7);
    let wp = g_mult(&f);
    let id = VFunc::identity(&f);
    assert!(matches!(are_wp_affine_equivalent(&id, &id, &wp), Err(Error::SizeLimit { .. })));
}

fn random_transform(f: &VFunc, wp: &Ortho, l2s: &[VFunc], rng: &mut ChaCha8Rng, alpha2_ok: impl Fn(Elt) -> bool) -> VFunc {
    let (dom, cod) = (f.dom(), f.cod());
    let alpha2 = loop {
        let a = Elt(rng.gen_range(0..cod.order()));
        if alpha2_ok(a) {
            break a;
        }
    };
    let w = EquivWitness {
        l1: random_linear_perm(dom, rng),
        alpha1: Elt(rng.gen_range(0..dom.order())),
        l2: l2s[rng.gen_range(0..l2s.len())].clone(),
        alpha2,
        checked: false,
    };
    let g = w.apply(f);
    assert!(EquivWitness { checked: false, ..w }.verify(f, &g, wp));
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn histogram_invariant_for_linear_wp(seed in any::<u64>(), which in 0usize..4) {
        let (p, n, m) = [(2, 3, 3), (3, 2, 2), (3, 2, 1), (2, 4, 2)][which];
        let dom = field(p, n);
        let cod = field(p, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = m as usize;
        let wp = loop {
            let entries = (0..d * d).map(|_| rng.gen_range(0..p)).collect();
            if let Ok(o) = make_matrix_ortho(&cod, &Matrix::from_rows(p, d, entries).unwrap()) {
                break o;
            }
        };
        let l2s = admissible_l2_enumerate(&wp).unwrap();
        let f = VFunc::from_fn(&dom, &cod, |_| Elt(rng.gen_range(0..cod.order())));
        let g = random_transform(&f, &wp, &l2s, &mut rng, |_| true);
        let h1 = spectrum(&f, Mode::Wp(&wp)).unwrap().histogram;
        let h2 = spectrum(&g, Mode::Wp(&wp)).unwrap().histogram;
        prop_assert_eq!(h1, h2);
        prop_assert_eq!(is_pwpn(&f, &wp).unwrap(), is_pwpn(&g, &wp).unwrap());
    }

    #[test]
    fn histogram_invariant_for_nonlinear_wp_with_additive_shift(seed in any::<u64>(), which in 0usize..2) {
        let f = [field(3, 2), field(2, 4)][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let wp = random_nonlinear_ortho(&f, &mut rng);
        let l2s = admissible_l2_enumerate(&wp).unwrap();
        let func = VFunc::from_fn(&f, &f, |_| Elt(rng.gen_range(0..f.order())));
        let g = random_transform(&func, &wp, &l2s, &mut rng, |a| is_additive_shift(&wp, a));
        prop_assert_eq!(spectrum(&func, Mode::Wp(&wp)).unwrap().histogram, spectrum(&g, Mode::Wp(&wp)).unwrap().histogram);
    }
}

/// A translate F + α2 of a P℘N function need not be P℘N once ℘ is nonlinear.
#[test]
fn translation_can_break_pwpn_for_nonlinear_wp() {
    let f7 = field(7, 1);
    let wp = verify_orthomorphism(&VFunc::from_table(f7.clone(), f7.clone(), vec![0, 3, 6, 4, 2, 1, 5]).unwrap()).unwrap();
    assert!(!wp.is_linear());
    let f1 = VFunc::from_table(f7.clone(), f7.clone(), vec![3, 5, 6, 4, 2, 1, 0]).unwrap();
    let f2 = VFunc::add_const(&f1, Elt(1));
    assert!(is_pwpn(&f1, &wp).unwrap());
    assert!(!is_pwpn(&f2, &wp).unwrap());
    assert!(!is_additive_shift(&wp, Elt(1)));
    // the pair is ℘-affine equivalent in the unrestricted sense
    let s = EquivSearch::new(&f1, &f2, &wp, EquivOptions::default()).unwrap();
    assert!(!s.prefilter_sound());
    match s.decide().unwrap() {
        EquivVerdict::Equivalent(w) => assert!(w.checked),
        v => panic!("{:?}", v),
    }
    // restricting α2 to additive shifts keeps the histogram invariant and refutes
    let opts = EquivOptions { additive_alpha2: true, ..Default::default() };
    let s = EquivSearch::new(&f1, &f2, &wp, opts).unwrap();
    assert!(s.prefilter_sound());
    assert_eq!(s.decide().unwrap(), EquivVerdict::SpectrumMismatch);
}

#[test]
fn nonlinear_wp_histograms_move_under_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f9 = field(3, 2);
    let changed = (0..20)
        .filter(|_| {
            let wp = random_nonlinear_ortho(&f9, &mut rng);
            let func = VFunc::from_fn(&f9, &f9, |_| Elt(rng.gen_range(0..9)));
            let a = Elt(rng.gen_range(1..9));
            spectrum(&func, Mode::Wp(&wp)).unwrap().histogram != spectrum(&VFunc::add_const(&func, a), Mode::Wp(&wp)).unwrap().histogram
        })
        .count();
    assert!(changed > 0);
}

fn quadratic(ctx: &Arc<FieldCtx>, coeffs: [u32; 9]) -> VFunc {
    let exps = [1u128, 3, 9, 2, 4, 6, 10, 12, 18];
    let terms: Vec<(Elt, u128)> = exps.iter().zip(coeffs).map(|(&e, c)| (Elt(c), e)).collect();
    VFunc::from_poly(ctx, &terms)
}

/// Ranks of x ↦ F(x + a) − F(x) − F(a) + F(0) over a ≠ 0, an affine invariant of quadratic F.
fn bilinear_rank_histogram(f: &VFunc) -> alloc::collections::BTreeMap<usize, u32> {
    let ctx = f.dom();
    let mut h = alloc::collections::BTreeMap::new();
    for a in ctx.nonzero() {
        let c = ctx.sub(f.eval(Elt::ZERO), f.eval(a));
        let table: Vec<u32> = ctx.elements().map(|x| ctx.add(ctx.sub(f.eval(ctx.add(x, a)), f.eval(x)), c).0).collect();
        *h.entry(Matrix::from_linear_table(ctx, &table).rank()).or_insert(0) += 1;
    }
    h
}

/// Quadratic permutations of F_27 fall into several ℘-affine classes for ℘ = −x.
#[test]
fn inequivalent_quadratic_permutations_over_f27() {
    let f27 = field(3, 3);
    let wp = neg(&f27);
    let perms: Vec<VFunc> = [
        [7, 18, 12, 13, 12, 14, 12, 4, 23],
        [11, 21, 4, 13, 4, 15, 15, 18, 18],
        [1, 12, 20, 22, 4, 9, 14, 1, 19],
        [12, 19, 5, 8, 19, 6, 21, 24, 7],
        [17, 16, 9, 22, 21, 18, 2, 8, 18],
    ]
    .into_iter()
    .map(|c| quadratic(&f27, c))
    .collect();
    for f in &perms {
        assert!(f.is_permutation().unwrap() && f.is_quadratic());
        assert!(is_pwpn(f, &wp).unwrap());
    }
    for i in 0..4 {
        for j in 0..i {
            assert!(are_wp_affine_equivalent(&perms[j], &perms[i], &wp).unwrap().is_none(), "{} {}", j, i);
        }
    }
    let w = are_wp_affine_equivalent(&perms[0], &perms[4], &wp).unwrap().unwrap();
    assert!(w.checked);
    assert_eq!(bilinear_rank_histogram(&perms[0]), bilinear_rank_histogram(&perms[4]));
    let distinct: BTreeSet<Vec<(usize, u32)>> = perms[..4].iter().map(|f| bilinear_rank_histogram(f).into_iter().collect()).collect();
    assert!(distinct.len() >= 2);
}
