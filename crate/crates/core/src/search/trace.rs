//! Randomized search for a primitive pair with a given trace.

use rand::Rng;

use super::witness::{Construction, Witness};
use super::{make_witness, SearchError};
use crate::gf::{BaseField, Elt, FieldTower};
use crate::rng::{seeded_rng, PURPOSE_TRACE};

/// Samples tried before giving up.
pub const DEFAULT_TRACE_BUDGET: u64 = 1_000_000;

/// Uniform sample from {xi : Tr(xi) = a}: two coordinates are drawn and the
/// third is solved from the trace form.
pub fn sample_with_trace<F: BaseField, R: Rng + ?Sized>(
    tower: &FieldTower<F>,
    a: F::El,
    rng: &mut R,
) -> Elt<F::El> {
    let ring = tower.ring();
    let f = tower.field();
    let t = ring.trace_form();
    // Tr(1) = 3 vanishes in characteristic 3, so pick a coordinate that works
    let j = (0..3)
        .find(|&j| !f.is_zero(t[j]))
        .expect("trace form is nonzero");
    let mut c = [f.zero(); 3];
    let mut rest = a;
    for i in 0..3 {
        if i != j {
            c[i] = f.random(rng);
            rest = f.sub(rest, f.mul(t[i], c[i]));
        }
    }
    c[j] = f.mul(rest, f.inv(t[j]).expect("nonzero"));
    Elt(c)
}

/// Randomized trace search for one a (field index), seeded per (q, seed, a).
pub fn search_fallback_trace<F: BaseField>(
    tower: &FieldTower<F>,
    a: u64,
    seed: u64,
    budget: u64,
) -> Result<Witness, SearchError> {
    let f = tower.field();
    let ring = tower.ring();
    let target = f
        .from_index(a)
        .ok_or_else(|| SearchError::Malformed(format!("a = {a} is not below q")))?;
    let mut rng = seeded_rng(tower.q(), seed, PURPOSE_TRACE, a);
    for _ in 0..budget {
        let xi = sample_with_trace(tower, target, &mut rng);
        if ring.is_zero(&xi) {
            continue;
        }
        let xi_flags = tower.primitivity_flags_in(ring, &xi)?;
        if !xi_flags.iter().all(|&b| b) {
            continue;
        }
        let inv = ring.inv(&xi).expect("nonzero element of a field");
        let s = ring.add(&xi, &inv);
        if ring.is_zero(&s) {
            continue;
        }
        let s_flags = tower.primitivity_flags_in(ring, &s)?;
        if !s_flags.iter().all(|&b| b) {
            continue;
        }
        return make_witness(
            tower,
            ring,
            &xi,
            Construction::RandomTrace,
            None,
            None,
            super::Evidence::Powers { nonunit: xi_flags },
            Some(super::Evidence::Powers { nonunit: s_flags }),
        );
    }
    Err(SearchError::BudgetExhausted(budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_tower, AnyTower, TowerVisitor};

    struct TraceSamples;

    impl TowerVisitor for TraceSamples {
        type Output = ();
        fn visit<F: BaseField>(self, t: &FieldTower<F>) {
            let q = t.q();
            for a in 0..q {
                let target = t.field().from_index(a).unwrap();
                let mut rng = seeded_rng(q, 0, PURPOSE_TRACE, a);
                for _ in 0..50 {
                    let x = sample_with_trace(t, target, &mut rng);
                    assert_eq!(t.ring().trace(&x), target, "q={q} a={a}");
                }
            }
        }
    }

    #[test]
    fn samples_have_the_requested_trace() {
        for q in [7u64, 9, 27] {
            build_tower(q, 0).unwrap().visit(TraceSamples);
        }
    }

    #[test]
    fn finds_trace_zero_witness() {
        let AnyTower::Prime(t) = build_tower(211, 0).unwrap() else {
            unreachable!()
        };
        let w = search_fallback_trace(&t, 0, 0, DEFAULT_TRACE_BUDGET).unwrap();
        assert_eq!(w.a, 0);
        assert_eq!(w.checks.trace, 0);
        assert_eq!(w.construction, Construction::RandomTrace);
        assert!(matches!(
            search_fallback_trace(&t, 0, 0, 0),
            Err(SearchError::BudgetExhausted(0))
        ));
    }
}
