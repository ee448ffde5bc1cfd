//! Exhaustive search over F_{q^3}^× for small q.

use super::witness::{Construction, ExceptionReport, Witness};
use super::{make_witness, powers_evidence, SearchError};
use crate::gf::{BaseField, CubicRing, Elt, FieldTower};

/// Default limit on q^3 for exhaustive runs.
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 100_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BruteOutcome {
    /// One witness per achievable a, sorted by a.
    pub witnesses: Vec<Witness>,
    /// Every a with no valid xi, sorted.
    pub exceptions: Vec<ExceptionReport>,
}

fn encode<F: BaseField>(f: &F, x: &Elt<F::El>) -> u64 {
    let q = f.order();
    f.to_index(x.0[0]) + q * (f.to_index(x.0[1]) + q * f.to_index(x.0[2]))
}

fn decode<F: BaseField>(f: &F, mut i: u64) -> Elt<F::El> {
    let q = f.order();
    let mut c = [f.zero(); 3];
    for slot in c.iter_mut() {
        *slot = f.from_index(i % q).expect("digit below q");
        i /= q;
    }
    Elt(c)
}

/// Primitive element of smallest encoding.
fn generator<F: BaseField>(tower: &FieldTower<F>) -> Result<Elt<F::El>, SearchError> {
    let f = tower.field();
    let q = f.order();
    for i in 1..q * q * q {
        let x = decode(f, i);
        if tower.is_primitive(&x)? {
            return Ok(x);
        }
    }
    unreachable!("a finite field has a primitive element")
}

/// Every a in F_q: a witness if one exists, otherwise an exhaustive exception.
pub fn brute_force<F: BaseField>(
    tower: &FieldTower<F>,
    cap: u64,
) -> Result<BruteOutcome, SearchError> {
    brute_force_for(tower, cap, None)
}

/// As [`brute_force`], restricted to the given a values (field indices).
pub fn brute_force_for<F: BaseField>(
    tower: &FieldTower<F>,
    cap: u64,
    targets: Option<&[u64]>,
) -> Result<BruteOutcome, SearchError> {
    let f = tower.field();
    let q = f.order();
    let size = (q as u128).pow(3);
    if size > cap as u128 {
        return Err(SearchError::CapExceeded { q, cap });
    }
    let size = size as u64;
    let n = size - 1;
    let ring: &CubicRing<F> = tower.ring();
    let primes: Vec<u64> = tower.order_fact().primes().map(|p| p as u64).collect();
    let coprime = |i: u64| primes.iter().all(|&p| !i.is_multiple_of(p));

    let mut wanted = vec![targets.is_none(); q as usize];
    if let Some(ts) = targets {
        for &a in ts {
            wanted[a as usize] = true;
        }
    }
    let mut remaining = wanted.iter().filter(|&&w| w).count();
    let mut found: Vec<Option<Elt<F::El>>> = vec![None; q as usize];

    let gamma = generator(tower)?;
    let gamma_inv = ring.inv(&gamma).expect("generator is a unit");

    // primitive elements are gamma^i with gcd(i, n) = 1
    let mut prim = vec![0u64; (size as usize).div_ceil(64)];
    let mut x = ring.one();
    for i in 1..=n {
        x = ring.mul(&x, &gamma);
        if coprime(i) {
            let idx = encode(f, &x) as usize;
            prim[idx / 64] |= 1 << (idx % 64);
        }
    }

    let mut x = ring.one();
    let mut x_inv = ring.one();
    for i in 1..=n {
        if remaining == 0 {
            break;
        }
        x = ring.mul(&x, &gamma);
        x_inv = ring.mul(&x_inv, &gamma_inv);
        if !coprime(i) {
            continue;
        }
        let a = f.to_index(ring.trace_linear(&x)) as usize;
        if !wanted[a] || found[a].is_some() {
            continue;
        }
        let s = ring.add(&x, &x_inv);
        if ring.is_zero(&s) {
            continue;
        }
        let idx = encode(f, &s) as usize;
        if prim[idx / 64] >> (idx % 64) & 1 == 1 {
            found[a] = Some(x);
            remaining -= 1;
        }
    }

    let mut out = BruteOutcome::default();
    for a in 0..q {
        if !wanted[a as usize] {
            continue;
        }
        match &found[a as usize] {
            Some(xi) => out.witnesses.push(make_witness(
                tower,
                ring,
                xi,
                Construction::BruteForce,
                None,
                None,
                powers_evidence(tower, ring, xi)?,
                None,
            )?),
            None => out.exceptions.push(ExceptionReport {
                q,
                failing_a: a,
                exhaustive: true,
            }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_tower, AnyTower, TowerVisitor};

    struct Run;
    impl TowerVisitor for Run {
        type Output = BruteOutcome;
        fn visit<F: BaseField>(self, t: &FieldTower<F>) -> BruteOutcome {
            brute_force(t, DEFAULT_BRUTE_FORCE_CAP).unwrap()
        }
    }

    fn run(q: u64) -> BruteOutcome {
        build_tower(q, 0).unwrap().visit(Run)
    }

    #[test]
    fn exceptional_small_fields() {
        for q in [3u64, 4, 5] {
            let out = run(q);
            assert!(!out.exceptions.is_empty(), "q={q}");
            assert!(out.exceptions.iter().all(|e| e.exhaustive));
            assert_eq!(out.witnesses.len() + out.exceptions.len(), q as usize);
        }
    }

    #[test]
    fn unexceptional_small_fields() {
        for q in [2u64, 7, 8, 9] {
            let out = run(q);
            assert!(out.exceptions.is_empty(), "q={q}");
            assert_eq!(out.witnesses.len(), q as usize);
            for (a, w) in out.witnesses.iter().enumerate() {
                assert_eq!(w.a, a as u64);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let AnyTower::Prime(t) = build_tower(11, 0).unwrap() else {
            unreachable!()
        };
        assert!(matches!(
            brute_force(&t, 1000),
            Err(SearchError::CapExceeded { .. })
        ));
        let out = brute_force_for(&t, DEFAULT_BRUTE_FORCE_CAP, Some(&[0, 5])).unwrap();
        assert_eq!(
            out.witnesses.iter().map(|w| w.a).collect::<Vec<_>>(),
            vec![0, 5]
        );
    }
}
