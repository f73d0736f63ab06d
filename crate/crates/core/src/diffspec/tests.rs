use super::*;
use crate::gf::FieldCtx;
use crate::gf::Embedding;
use crate::linalg::Matrix;
use crate::ortho::{make_c_mult, make_matrix_ortho, make_monomial_twist, make_thmex_ortho, verify_orthomorphism};
use alloc::sync::Arc;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn field(p: u32, n: u32) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::new(p, n, None).unwrap())
}

fn mono(f: &Arc<FieldCtx>, d: i128) -> VFunc {
    VFunc::from_monomial(f, d).unwrap()
}

/// Direct count with the table-free arithmetic: for every included a and b,
/// δ(a, b) = #{x : F(x+a) − M(F(x)) = b}, M given as a closure.
fn oracle_counts(f: &VFunc, m: impl Fn(Elt) -> Elt, skip_zero: bool) -> (u32, BTreeMap<u32, u64>) {
    let (d, k) = (f.dom(), f.cod());
    let mut hist = BTreeMap::new();
    let mut max = 0;
    for a in d.elements().filter(|a| !(skip_zero && a.is_zero())) {
        for b in k.elements() {
            let cnt = d
                .elements()
                .filter(|&x| k.add_ref(f.eval(d.add_ref(x, a)), k.neg_ref(m(f.eval(x)))) == b)
                .count() as u32;
            *hist.entry(cnt).or_insert(0) += 1;
            max = max.max(cnt);
        }
    }
    (max, hist)
}

#[test]
fn spectrum_matches_direct_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (p, n) in [(2, 3), (2, 4), (3, 2), (5, 1), (3, 3)] {
        let f = field(p, n);
        let func = VFunc::endo_fn(&f, |_| Elt(rng.gen_range(0..f.order())));
        let c = Elt(rng.gen_range(2..f.order()));
        let rep = spectrum(&func, Mode::C(c)).unwrap();
        let (max, hist) = oracle_counts(&func, |y| f.mul_ref(c, y), false);
        assert_eq!((rep.max_count, &rep.histogram), (max, &hist));
        let rep = spectrum(&func, Mode::Classical).unwrap();
        let (max, hist) = oracle_counts(&func, |y| y, true);
        assert_eq!((rep.max_count, &rep.histogram), (max, &hist));
        assert!(!rep.includes_zero_a);
        let wp = make_c_mult(&f, Elt(f.order() - 1)).unwrap();
        let rep = spectrum(&func, Mode::Wp(&wp)).unwrap();
        let (max, hist) = oracle_counts(&func, |y| wp.apply(y), false);
        assert_eq!((rep.max_count, &rep.histogram), (max, &hist));
    }
}

#[test]
fn classical_derivative_examples() {
    let f9 = field(3, 2);
    let sq = mono(&f9, 2);
    assert!(classical_derivative(&sq, Elt::ZERO).table().iter().all(|&v| v == 0));
    let l = VFunc::from_linearized(&f9, &[Elt(2), Elt(4)]);
    for a in f9.elements() {
        let d = classical_derivative(&l, a);
        assert!(d.table().iter().all(|&v| v == l.eval(a).0));
    }
    for a in f9.nonzero() {
        assert!(classical_derivative(&sq, a).is_permutation().unwrap());
    }
}

#[test]
fn c_derivative_examples() {
    let f = field(5, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let func = VFunc::endo_fn(&f, |_| Elt(rng.gen_range(0..25)));
    for a in f.elements() {
        assert_eq!(c_derivative(&func, a, Elt::ONE), classical_derivative(&func, a));
    }
    assert_eq!(c_derivative(&func, Elt::ZERO, Elt::ZERO), func);
    let id = VFunc::identity(&f);
    for c in f.elements().filter(|&c| c != Elt::ONE) {
        for a in f.elements() {
            assert!(c_derivative(&id, a, c).is_permutation().unwrap());
        }
    }
}

#[test]
fn wp_derivative_examples() {
    let f16 = field(2, 4);
    let func = mono(&f16, 7);
    for c in f16.elements().skip(2) {
        let wp = make_c_mult(&f16, c).unwrap();
        for a in f16.elements() {
            assert_eq!(wp_derivative(&func, a, &wp).unwrap(), c_derivative(&func, a, c));
        }
    }
    // linear F: derivative = (x − ℘(x))∘L + L(a)
    let f27 = field(3, 3);
    let l = VFunc::from_linearized(&f27, &[Elt(5), Elt(0), Elt(7)]);
    let wp = make_monomial_twist(&f27, f27.primitive(), 1).unwrap();
    assert!(wp.is_linear());
    for a in f27.elements() {
        let d = wp_derivative(&l, a, &wp).unwrap();
        for x in f27.elements() {
            let lx = l.eval(x);
            assert_eq!(d.eval(x), f27.add(f27.sub(lx, wp.apply(lx)), l.eval(a)));
        }
    }
    let f64 = field(2, 6);
    let b = f64.subfield_elements(3).unwrap()[2];
    let wp = make_thmex_ortho(&f64, b).unwrap();
    let d0 = wp_derivative(wp.map(), Elt::ZERO, &wp).unwrap();
    assert!(d0.is_permutation().unwrap());
    let f8 = field(2, 3);
    assert!(wp_derivative(&mono(&f8, 3), Elt::ZERO, &wp).is_err());
}

#[test]
fn spectrum_examples() {
    let f27 = field(3, 3);
    let m1 = f27.neg(Elt::ONE);
    let rep = spectrum(&mono(&f27, 2), Mode::C(m1)).unwrap();
    assert_eq!(rep.max_count, 2);
    assert_eq!(rep.label(), "APcN");
    let rep = spectrum(&mono(&f27, 5), Mode::C(m1)).unwrap();
    assert_eq!(rep.label(), "PcN");
    assert!(rep.includes_zero_a);
    let f64 = field(2, 6);
    let gold = mono(&f64, 5);
    for c in f64.elements().filter(|&c| c != Elt::ONE) {
        let want = if f64.in_subfield(c, 2).unwrap() { 1 } else { 5 };
        assert_eq!(uniformity(&gold, Mode::C(c)).unwrap(), want, "c={c:?}");
    }
    let rep = spectrum(&mono(&field(3, 2), 2), Mode::Classical).unwrap();
    assert_eq!(rep.label(), "PN");
}

#[test]
fn pwpn_examples() {
    for (p, n) in [(2, 4), (3, 2), (5, 2)] {
        let f = field(p, n);
        let lin = VFunc::from_linearized(&f, &[Elt(2)]);
        assert!(lin.is_permutation().unwrap());
        for c in f.elements().skip(2).take(6) {
            let wp = make_c_mult(&f, c).unwrap();
            assert!(is_pwpn(&lin, &wp).unwrap());
        }
    }
    let f64 = field(2, 6);
    for b in f64.subfield_elements(3).unwrap().into_iter().filter(|b| b.0 > 1) {
        let wp = make_thmex_ortho(&f64, b).unwrap();
        assert!(is_pwpn(wp.map(), &wp).unwrap());
    }
    let wp = make_monomial_twist(&f64, f64.primitive(), 2).unwrap();
    let v = perfect_scan(&mono(&f64, 5), Mode::Wp(&wp)).unwrap();
    assert!(!v.perfect);
    let (a, b, cnt) = v.witness.unwrap();
    let d = wp_derivative(&mono(&f64, 5), a, &wp).unwrap();
    assert!(!d.is_permutation().unwrap());
    assert_eq!(d.table().iter().filter(|&&y| y == b.0).count() as u32, cnt);
}

#[test]
fn scan_agrees_with_spectrum() {
    let f27 = field(3, 3);
    for d in 1..26 {
        for c in [Elt(0), Elt(2), Elt(5)] {
            let rep = spectrum(&mono(&f27, d), Mode::C(c)).unwrap();
            let v = perfect_scan(&mono(&f27, d), Mode::C(c)).unwrap();
            assert_eq!(rep.is_perfect(), v.perfect);
        }
    }
}

#[test]
fn quadratic_harness_examples() {
    let f27 = field(3, 3);
    let f3 = field(3, 1);
    let emb = Embedding::new(f27.clone(), f3.clone()).unwrap();
    let g = VFunc::from_poly(&f27, &[(Elt::ONE, 2), (Elt::ONE, 1)]);
    let fmap = VFunc::compose(&VFunc::rel_trace_map(&emb), &g).unwrap();
    assert!(quadratic_pcn_iff_balanced_check(&fmap, Elt(2)).unwrap());
    let lin = VFunc::rel_trace_map(&emb);
    assert!(lin.is_balanced());
    assert!(quadratic_pcn_iff_balanced_check(&lin, Elt(2)).unwrap());
    let k = VFunc::constant(&f27, &f3, Elt(1));
    assert!(!k.is_balanced());
    assert!(quadratic_pcn_iff_balanced_check(&k, Elt(2)).unwrap());
    assert_eq!(quadratic_pcn_iff_balanced_check(&k, Elt(1)).unwrap_err(), Error::BadC);
    let cube = (1..26)
        .map(|d| VFunc::compose(&VFunc::rel_trace_map(&emb), &mono(&f27, d)).unwrap())
        .find(|g| !g.is_quadratic())
        .unwrap();
    assert_eq!(quadratic_pcn_iff_balanced_check(&cube, Elt(2)).unwrap_err(), Error::NotQuadratic);
}

#[test]
fn second_order_examples() {
    let f8 = field(2, 3);
    let f = mono(&f8, 3);
    for a in f8.elements() {
        for b in f8.elements() {
            let s = second_order_c_derivative(&f, a, b, Elt::ONE, Elt::ONE);
            assert_eq!(s, classical_derivative(&classical_derivative(&f, a), b));
        }
    }
    let f25 = field(5, 2);
    let g = mono(&f25, 7);
    let (c1, c2) = (Elt(3), Elt(11));
    let s = second_order_c_derivative(&g, Elt::ZERO, Elt::ZERO, c1, c2);
    let factor = f25.mul(f25.sub(Elt::ONE, c1), f25.sub(Elt::ONE, c2));
    assert_eq!(s, VFunc::scale(factor, &g));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (a, b) = (Elt(rng.gen_range(0..8)), Elt(rng.gen_range(0..8)));
        let (c1, c2) = (Elt(rng.gen_range(0..8)), Elt(rng.gen_range(0..8)));
        let twice = c_derivative(&c_derivative(&f, a, c1), b, c2);
        assert_eq!(second_order_c_derivative(&f, a, b, c1, c2), twice);
    }
}

#[test]
fn key_cancellation_examples() {
    let f8 = field(2, 3);
    let f = mono(&f8, 3);
    let g = f8.primitive();
    for k1 in f8.elements() {
        assert!(key_cancellation_check(&f, k1, Elt::ONE, Elt::ONE));
    }
    let (c1, c2) = (f8.pow(g, 2), f8.pow(g, 3));
    assert!(key_cancellation_check(&f, g, c1, c2));
    let forced = f8.neg(f8.mul(f8.sub(Elt::ONE, c1), g));
    assert_ne!(forced, g);
    assert!(!keys_cancel(&f, g, g, c1, c2));
}

#[test]
fn inverse_exponent_transfers_pcn() {
    // x^d PcN for c and gcd(d, q−1) = 1 ⇒ x^{1/d} is P(c^d)N
    for (p, n) in [(3, 3), (2, 5), (5, 2), (3, 4)] {
        let f = field(p, n);
        let q1 = f.order() as i128 - 1;
        for d in 2..q1 {
            if crate::arith::gcd_i(d, q1) != 1 {
                continue;
            }
            let e = crate::arith::mod_inverse(d, q1).unwrap();
            for c in f.elements().filter(|&c| c != Elt::ONE).take(10) {
                if spectrum(&mono(&f, d), Mode::C(c)).unwrap().is_perfect() {
                    let c2 = f.pow(c, d as u128);
                    assert!(spectrum(&mono(&f, e), Mode::C(c2)).unwrap().is_perfect(), "p={p} n={n} d={d}");
                }
            }
        }
    }
}

#[test]
fn parts_merge_independently_of_order() {
    let f = field(3, 4);
    let func = mono(&f, 11);
    let kernel = Kernel::new(&func, Mode::C(Elt(2))).unwrap();
    let whole = spectrum(&func, Mode::C(Elt(2))).unwrap();
    let cuts = [0u32, 7, 30, 31, 60, 81];
    let mut parts: Vec<SpectrumPart> = cuts.windows(2).map(|w| SpectrumPart::compute(&kernel, w[0]..w[1])).collect();
    parts.reverse();
    assert_eq!(SpectrumPart::merge(&kernel, parts), whole);
}

#[test]
fn size_limits() {
    let f = field(2, 17);
    let func = VFunc::identity(&f);
    assert!(matches!(spectrum(&func, Mode::C(Elt(2))), Err(Error::SizeLimit { .. })));
    let wp = make_c_mult(&f, Elt(2)).unwrap();
    let k = VFunc::constant(&f, &f, Elt(3));
    let v = perfect_scan(&k, Mode::Wp(&wp)).unwrap();
    assert_eq!((v.perfect, v.directions_scanned), (false, 1));
}

fn random_perm(f: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> VFunc {
    let mut t: Vec<u32> = (0..f.order()).collect();
    for i in (1..t.len()).rev() {
        t.swap(i, rng.gen_range(0..=i));
    }
    VFunc::from_table(f.clone(), f.clone(), t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn rows_sum_to_field_order(seed in any::<u64>(), which in 0usize..4) {
        let f = [field(2, 4), field(3, 2), field(7, 1), field(3, 3)][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let func = VFunc::endo_fn(&f, |_| Elt(rng.gen_range(0..f.order())));
        let c = Elt(rng.gen_range(0..f.order()));
        let kernel = Kernel::new(&func, Mode::C(c)).unwrap();
        let mut counts = vec![0u32; f.size()];
        for a in f.elements() {
            kernel.counts_for(a, &mut counts);
            prop_assert_eq!(counts.iter().sum::<u32>(), f.order());
        }
        let rep = spectrum(&func, Mode::C(c)).unwrap();
        let total: u64 = rep.histogram.iter().map(|(&k, &v)| k as u64 * v).sum();
        prop_assert_eq!(total, f.order() as u64 * rep.per_a_max.len() as u64);
        prop_assert!(rep.max_count >= rep.balanced_count);
    }

    #[test]
    fn c_mult_mode_equals_c_mode(seed in any::<u64>(), which in 0usize..4) {
        let f = [field(2, 8), field(3, 5), field(5, 3), field(2, 5)][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let func = VFunc::endo_fn(&f, |_| Elt(rng.gen_range(0..f.order())));
        let c = Elt(rng.gen_range(2..f.order()));
        let wp = make_c_mult(&f, c).unwrap();
        let a = Elt(rng.gen_range(0..f.order()));
        prop_assert_eq!(wp_derivative(&func, a, &wp).unwrap(), c_derivative(&func, a, c));
        let mut s1 = spectrum(&func, Mode::Wp(&wp)).unwrap();
        let s2 = spectrum(&func, Mode::C(c)).unwrap();
        s1.kind = s2.kind.clone();
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn pwpn_implies_balanced_and_ortho(seed in any::<u64>(), which in 0usize..3) {
        let f = [field(3, 2), field(5, 1), field(2, 3)][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let func = random_perm(&f, &mut rng);
        if let Ok(wp) = verify_orthomorphism(&random_perm(&f, &mut rng)) {
            if is_pwpn(&func, &wp).unwrap() {
                prop_assert!(func.is_balanced());
            }
            // F = ℘ itself is PwpN only if ℘ passes verification, which it did
            let _ = is_pwpn(wp.map(), &wp).unwrap();
        }
        let lin = VFunc::from_linearized(&f, &[Elt(rng.gen_range(1..f.order()))]);
        if let Ok(wp) = verify_orthomorphism(&random_perm(&f, &mut rng)) {
            prop_assert!(!is_pwpn(&lin, &wp).unwrap() || lin.is_balanced());
        }
    }

    #[test]
    fn affine_with_linear_wp_pwpn_iff_balanced(seed in any::<u64>(), which in 0usize..4) {
        let f = [field(2, 4), field(3, 2), field(3, 3), field(5, 2)][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = f.n() as usize;
        let coeffs: Vec<Elt> = (0..n).map(|_| Elt(rng.gen_range(0..f.order()))).collect();
        let aff = VFunc::add_const(&VFunc::from_linearized(&f, &coeffs), Elt(rng.gen_range(0..f.order())));
        let wp = loop {
            let e: Vec<u32> = (0..n * n).map(|_| rng.gen_range(0..f.p())).collect();
            let a = Matrix::from_rows(f.p(), n, e).unwrap();
            if let Ok(o) = make_matrix_ortho(&f, &a) {
                break o;
            }
        };
        prop_assert_eq!(is_pwpn(&aff, &wp).unwrap(), aff.is_balanced());
        // the same for affine maps into the prime field
        let small = field(f.p(), 1);
        let emb = Embedding::new(f.clone(), small.clone()).unwrap();
        let beta = Elt(rng.gen_range(0..f.order()));
        let lin = VFunc::compose(&VFunc::rel_trace_map(&emb), &VFunc::from_linearized(&f, &[beta])).unwrap();
        let aff = VFunc::add_const(&lin, Elt(rng.gen_range(0..small.order())));
        if small.order() > 2 {
            let wp = make_c_mult(&small, Elt(small.order() - 1)).unwrap();
            prop_assert_eq!(is_pwpn(&aff, &wp).unwrap(), aff.is_balanced());
        }
    }
}
