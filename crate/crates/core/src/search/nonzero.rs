//! Witnesses for all nonzero traces from the precomputed families.
//!
//! A success at k covers a = g^k (xi_k) and a = g^{-k-1} (xi_k^{-1}), and for
//! q = 1 mod 4 also their negatives, since -xi_k = xi_{k + (q-1)/2}. So k only
//! runs over 0..K with K = floor(q/4) or floor(q/2).

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::family::{sum_formula, CandidateFamily};
use super::witness::{Construction, Evidence, Witness};
use super::{make_witness, SearchError};
use crate::gf::{BaseField, FieldTower};

/// Admissible families tried per k before k is handed to the fallback.
pub const DEFAULT_ATTEMPT_CAP: usize = 64;

/// Number of k values needed to cover F_q^×.
pub fn k_bound(q: u64) -> u64 {
    if q % 4 == 1 {
        q / 4
    } else {
        q / 2
    }
}

/// A family for which xi_k + xi_k^{-1} is primitive.
pub struct LemmaHit {
    pub family: usize,
    pub sum_flags: Vec<bool>,
}

/// Runs through the admissible families for k, at most `cap` of them.
pub fn find_family_for_k<F: BaseField>(
    tower: &FieldTower<F>,
    families: &[CandidateFamily<F>],
    k: u64,
    cap: usize,
) -> Result<Option<LemmaHit>, SearchError> {
    let mut attempts = 0;
    for (i, fam) in families.iter().enumerate() {
        if !fam.admits(k) {
            continue;
        }
        if attempts == cap {
            break;
        }
        attempts += 1;
        let s = sum_formula(fam, k)?;
        if fam.ring.is_zero(&s) {
            continue;
        }
        let flags = tower.primitivity_flags_in(&fam.ring, &s)?;
        if flags.iter().all(|&b| b) {
            return Ok(Some(LemmaHit {
                family: i,
                sum_flags: flags,
            }));
        }
    }
    Ok(None)
}

fn norm_exponent(q: u64, k: u64, d: u64, inverse: bool) -> u64 {
    let q1 = q as u128 - 1;
    let n = (3 * (k as u128 % q1) + d as u128) % q1;
    (if inverse { (q1 - n) % q1 } else { n }) as u64
}

/// The witness xi_k (or its inverse) from a hit.
pub fn lemma_witness<F: BaseField>(
    tower: &FieldTower<F>,
    fam: &CandidateFamily<F>,
    k: u64,
    inverse: bool,
    sum_flags: Vec<bool>,
) -> Result<Witness, SearchError> {
    let xi = if inverse { fam.xi_inv(k) } else { fam.xi(k) };
    make_witness(
        tower,
        &fam.ring,
        &xi,
        Construction::Lemma,
        Some(k),
        Some(fam.d),
        Evidence::Lemma {
            norm_exponent: norm_exponent(tower.q(), k, fam.d, inverse),
        },
        Some(Evidence::Powers { nonunit: sum_flags }),
    )
}

/// All witnesses produced by one k, or `None` if every tried family failed.
pub fn witnesses_for_k<F: BaseField>(
    tower: &FieldTower<F>,
    families: &[CandidateFamily<F>],
    k: u64,
    cap: usize,
) -> Result<Option<Vec<Witness>>, SearchError> {
    let Some(hit) = find_family_for_k(tower, families, k, cap)? else {
        return Ok(None);
    };
    let q = tower.q();
    let fam = &families[hit.family];
    let mut out = vec![
        lemma_witness(tower, fam, k, false, hit.sum_flags.clone())?,
        lemma_witness(tower, fam, k, true, hit.sum_flags)?,
    ];
    if q % 4 == 1 {
        let k2 = k + (q - 1) / 2;
        let s = sum_formula(fam, k2)?;
        let flags = tower.primitivity_flags_in(&fam.ring, &s)?;
        debug_assert!(
            flags.iter().all(|&b| b),
            "-x is primitive with x when q = 1 mod 4"
        );
        out.push(lemma_witness(tower, fam, k2, false, flags.clone())?);
        out.push(lemma_witness(tower, fam, k2, true, flags)?);
    }
    Ok(Some(out))
}

#[derive(Clone, Debug, Default)]
pub struct NonzeroOutcome {
    /// Witnesses keyed by a.
    pub witnesses: BTreeMap<u64, Witness>,
    /// k values with no successful family.
    pub fallback_ks: Vec<u64>,
}

/// Runs k = 0..K in parallel; the merge is first-writer-wins in k order.
pub fn search_nonzero<F: BaseField>(
    tower: &FieldTower<F>,
    families: &[CandidateFamily<F>],
    cap: usize,
) -> Result<NonzeroOutcome, SearchError> {
    let kk = k_bound(tower.q());
    let results: Vec<Result<Option<Vec<Witness>>, SearchError>> = (0..kk)
        .into_par_iter()
        .map(|k| witnesses_for_k(tower, families, k, cap))
        .collect();
    let mut out = NonzeroOutcome::default();
    for (k, r) in results.into_iter().enumerate() {
        match r? {
            Some(ws) => {
                for w in ws {
                    out.witnesses.entry(w.a).or_insert(w);
                }
            }
            None => {
                log::info!("q={}: no family succeeded at k={k}", tower.q());
                out.fallback_ks.push(k as u64);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_tower, AnyTower, PrimeField};
    use crate::rng::{seeded_rng, PURPOSE_FAMILIES};
    use crate::search::family::select_families;

    fn setup(q: u64, n: usize) -> (FieldTower<PrimeField>, Vec<CandidateFamily<PrimeField>>) {
        let AnyTower::Prime(t) = build_tower(q, 0).unwrap() else {
            unreachable!()
        };
        let (_, fams) = select_families(&t, n, &mut seeded_rng(q, 0, PURPOSE_FAMILIES, 0)).unwrap();
        (t, fams)
    }

    #[test]
    fn bounds() {
        assert_eq!(k_bound(13), 3);
        assert_eq!(k_bound(11), 5);
        assert_eq!(k_bound(8), 4);
    }

    #[test]
    fn q13_symmetries_and_fallback() {
        // g = 2 admits only d = 5 and d = 10, and each k has one admissible
        // family; the sums fail to be primitive at k = 1, 2
        let (t, fams) = setup(13, 64);
        assert_eq!(fams[0].g, 2);
        let out = search_nonzero(&t, &fams, DEFAULT_ATTEMPT_CAP).unwrap();
        assert_eq!(out.fallback_ks, vec![1, 2]);
        // k = 0 gives 1 and 2^{-1} = 7, and their negatives
        assert_eq!(
            out.witnesses.keys().copied().collect::<Vec<_>>(),
            vec![1, 6, 7, 12]
        );
        for (a, w) in &out.witnesses {
            assert_eq!(w.checks.trace, *a);
        }
    }

    #[test]
    fn lemma_identities() {
        for q in [11u64, 31, 1009] {
            let (t, fams) = setup(q, 16);
            let f = t.field();
            let g = fams[0].g;
            for fam in &fams {
                for k in (0..q - 1).step_by(7) {
                    if !fam.admits(k) {
                        continue;
                    }
                    let xi = fam.xi(k);
                    assert!(t.is_primitive_in(&fam.ring, &xi).unwrap());
                    assert_eq!(fam.ring.trace(&xi), f.pow(g, k as u128));
                    let inv = fam.ring.inv(&xi).unwrap();
                    assert_eq!(
                        fam.ring.trace(&inv),
                        f.pow(f.inv(g).unwrap(), k as u128 + 1)
                    );
                    assert_eq!(fam.ring.norm(&xi), f.pow(g, (3 * k + fam.d) as u128));
                }
            }
        }
    }
}
