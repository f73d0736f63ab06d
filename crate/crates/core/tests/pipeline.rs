use std::sync::Arc;

use proptest::prelude::*;
use pwpn_core::diffspec::{is_pwpn, perfect_scan, spectrum, Mode};
use pwpn_core::ortho::make_c_mult;
use pwpn_core::quasigroup::{graph_of, is_quasigroup_difference_set, QGroup};
use pwpn_core::{Elt, FieldCtx, VFunc};

const FIELDS: [(u32, u32); 7] = [(3, 1), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (3, 3)];

fn field(i: usize) -> Arc<FieldCtx> {
    let (p, n) = FIELDS[i % FIELDS.len()];
    Arc::new(FieldCtx::new(p, n, None).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pwpn_iff_graph_is_difference_set(fi in 0usize..FIELDS.len(), d in 1i128..200, ci in 2u32..50) {
        let k = field(fi);
        let c = Elt(ci % k.order());
        prop_assume!(!c.is_zero() && c != Elt::ONE);
        let f = VFunc::from_monomial(&k, d).unwrap();
        let wp = make_c_mult(&k, c).unwrap();
        let q = QGroup::new(&k, &wp).unwrap();
        let rep = is_quasigroup_difference_set(&q, &graph_of(&f), 1).unwrap();
        prop_assert_eq!(is_pwpn(&f, &wp).unwrap(), rep.pass);
    }

    #[test]
    fn spectrum_rows_sum_to_field_order(fi in 0usize..FIELDS.len(), d in 1i128..200, ci in 0u32..50) {
        let k = field(fi);
        let c = Elt(ci % k.order());
        let f = VFunc::from_monomial(&k, d).unwrap();
        let s = spectrum(&f, Mode::C(c)).unwrap();
        let directions = s.per_a_max.len() as u64;
        let cells: u64 = s.histogram.values().sum();
        let total: u64 = s.histogram.iter().map(|(&v, &n)| v as u64 * n).sum();
        prop_assert_eq!(cells, directions * k.order() as u64);
        prop_assert_eq!(total, directions * k.order() as u64);
        prop_assert_eq!(s.max_count, s.per_a_max.iter().map(|r| r.1).max().unwrap());
        prop_assert_eq!(perfect_scan(&f, Mode::C(c)).unwrap().perfect, s.is_perfect());
    }
}

#[test]
fn negation_twisted_monomials_over_f27() {
    let k = Arc::new(FieldCtx::new(3, 3, None).unwrap());
    let wp = make_c_mult(&k, k.neg(Elt::ONE)).unwrap();
    let perfect: Vec<i128> = (1..26).filter(|&d| is_pwpn(&VFunc::from_monomial(&k, d).unwrap(), &wp).unwrap()).collect();
    assert!(perfect.contains(&5));
    for d in perfect {
        let f = VFunc::from_monomial(&k, d).unwrap();
        let q = QGroup::new(&k, &wp).unwrap();
        assert!(is_quasigroup_difference_set(&q, &graph_of(&f), 1).unwrap().pass, "x^{d}");
    }
}
