//! Certificate checking on a separate path from construction: the tower is
//! rebuilt from the recorded moduli, q^3 - 1 is refactored, traces go through
//! Frobenius powers, and primitivity uses plain square-and-multiply through
//! the norm and x^{q-1}.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::brute::brute_force;
use super::family::family_modulus;
use super::witness::{CertHeader, CertStatus, Certificate, Construction, Witness};
use super::SearchError;
use crate::gf::{
    AnyTower, BaseField, CubicRing, Elt, ExtField, FieldTower, PrimeField, TableField,
};
use crate::numth::{is_prime_power, norm_value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("a = {a}: {reason}")]
pub struct VerifyFailure {
    /// Trace value of the failing record (`u64::MAX` for the header).
    pub a: u64,
    pub reason: String,
}

fn fail(a: u64, reason: impl Into<String>) -> VerifyFailure {
    VerifyFailure {
        a,
        reason: reason.into(),
    }
}

struct Inner<F: BaseField> {
    tower: FieldTower<F>,
    g: Option<F::El>,
    /// Primes of q - 1 with (q - 1)/p.
    sub_exps: Vec<u128>,
    /// (q^2 + q + 1)/p for primes p of q^2 + q + 1 not dividing q - 1.
    norm_exps: Vec<u128>,
    lemma_rings: HashMap<u64, CubicRing<F>>,
}

impl<F: BaseField> Inner<F> {
    fn new(tower: FieldTower<F>, g_index: Option<u64>) -> Result<Self, VerifyFailure> {
        let f = tower.field();
        let q = tower.q();
        let q1 = q as u128 - 1;
        let sub_exps: Vec<u128> = tower.subgroup_fact().primes().map(|p| q1 / p).collect();
        let n = norm_value(q);
        let norm_exps: Vec<u128> = tower
            .norm_fact()
            .primes()
            .filter(|p| !q1.is_multiple_of(*p))
            .map(|p| n / p)
            .collect();
        let g = match g_index {
            None => None,
            Some(i) => {
                let g = f
                    .from_index(i)
                    .ok_or_else(|| fail(u64::MAX, "g out of range"))?;
                let one = f.one();
                if f.is_zero(g) || sub_exps.iter().any(|&e| f.pow(g, e) == one) {
                    return Err(fail(u64::MAX, "g is not a generator of F_q^x"));
                }
                Some(g)
            }
        };
        Ok(Inner {
            tower,
            g,
            sub_exps,
            norm_exps,
            lemma_rings: HashMap::new(),
        })
    }

    fn lemma_ring(&self, d: u64) -> Result<CubicRing<F>, String> {
        let g = self.g.ok_or("family witness without g in the header")?;
        let f = self.tower.field();
        if d >= f.order() - 1 {
            return Err(format!("d = {d} out of range"));
        }
        let ring = self.tower.ring_for(family_modulus(f, g, d));
        if !ring.is_field() {
            return Err(format!("P_d is reducible for d = {d}"));
        }
        Ok(ring)
    }

    fn prepare(&mut self, ds: &BTreeSet<u64>) -> Result<(), VerifyFailure> {
        for &d in ds {
            if !self.lemma_rings.contains_key(&d) {
                let ring = self.lemma_ring(d).map_err(|r| fail(u64::MAX, r))?;
                self.lemma_rings.insert(d, ring);
            }
        }
        Ok(())
    }

    fn primitive(&self, ring: &CubicRing<F>, x: &Elt<F::El>) -> bool {
        if ring.is_zero(x) {
            return false;
        }
        let f = ring.field();
        let q = f.order() as u128;
        let one = ring.one();
        // x^{(q^3-1)/p} = N(x)^{(q-1)/p} for p | q - 1
        let n = ring.pow(x, q * q + q + 1);
        if !ring.is_scalar(&n) {
            return false;
        }
        if self.sub_exps.iter().any(|&e| f.pow(n.0[0], e) == f.one()) {
            return false;
        }
        // and (x^{q-1})^{(q^2+q+1)/p} otherwise
        let y = ring.pow(x, q - 1);
        self.norm_exps.iter().all(|&e| ring.pow(&y, e) != one)
    }

    fn check(&self, w: &Witness) -> Result<(), String> {
        let owned;
        let ring = match w.construction {
            Construction::Lemma => {
                let d = w.d.ok_or("family witness without d")?;
                if w.k.is_none() {
                    return Err("family witness without k".into());
                }
                match self.lemma_rings.get(&d) {
                    Some(r) => r,
                    None => {
                        owned = self.lemma_ring(d)?;
                        &owned
                    }
                }
            }
            _ => self.tower.ring(),
        };
        let f = ring.field();
        let a = f.from_index(w.a).ok_or("a out of range")?;
        let xi = ring
            .from_digits(&w.xi_digits)
            .ok_or("malformed xi digits")?;
        if ring.trace(&xi) != a {
            return Err("trace of xi differs from a".into());
        }
        if !self.primitive(ring, &xi) {
            return Err("xi is not primitive".into());
        }
        let inv = ring.inv(&xi).ok_or("xi is not invertible")?;
        if ring.mul(&xi, &inv) != ring.one() {
            return Err("inverse check failed".into());
        }
        let s = ring.add(&xi, &inv);
        if !self.primitive(ring, &s) {
            return Err("xi + 1/xi is not primitive".into());
        }
        Ok(())
    }
}

#[allow(clippy::large_enum_variant)]
enum AnyInner {
    Prime(Inner<PrimeField>),
    Table(Inner<TableField>),
    Ext(Inner<ExtField>),
}

/// Checks witnesses against one certificate header.
pub struct Verifier {
    header: CertHeader,
    inner: AnyInner,
}

impl Verifier {
    /// Rebuilds the field tower from the header and checks its metadata.
    pub fn new(header: &CertHeader) -> Result<Self, VerifyFailure> {
        let hdr = |r: String| fail(u64::MAX, r);
        let q = header.q;
        let (p, e) = is_prime_power(q as u128)
            .ok_or_else(|| hdr(format!("q = {q} is not a prime power")))?;
        if (p as u64, e) != (header.p, header.e) {
            return Err(hdr("p, e do not match q".into()));
        }
        let tower = AnyTower::from_moduli(q, &header.base_modulus, &header.cubic_modulus)
            .map_err(|err| hdr(format!("cannot rebuild the field: {err}")))?;
        if tower.order_fact().factors() != header.factors.as_slice() {
            return Err(hdr("recorded factorization of q^3 - 1 is wrong".into()));
        }
        let inner = match tower {
            AnyTower::Prime(t) => AnyInner::Prime(Inner::new(t, header.g)?),
            AnyTower::Table(t) => AnyInner::Table(Inner::new(t, header.g)?),
            AnyTower::Ext(t) => AnyInner::Ext(Inner::new(t, header.g)?),
        };
        Ok(Verifier {
            header: header.clone(),
            inner,
        })
    }

    /// Pre-builds the rings for the given family parameters.
    pub fn prepare<'a>(
        &mut self,
        ws: impl IntoIterator<Item = &'a Witness>,
    ) -> Result<(), VerifyFailure> {
        let ds: BTreeSet<u64> = ws
            .into_iter()
            .filter(|w| w.construction == Construction::Lemma)
            .filter_map(|w| w.d)
            .collect();
        match &mut self.inner {
            AnyInner::Prime(i) => i.prepare(&ds),
            AnyInner::Table(i) => i.prepare(&ds),
            AnyInner::Ext(i) => i.prepare(&ds),
        }
    }

    pub fn verify(&self, w: &Witness) -> Result<(), VerifyFailure> {
        if w.q != self.header.q {
            return Err(fail(w.a, "witness belongs to a different q"));
        }
        let r = match &self.inner {
            AnyInner::Prime(i) => i.check(w),
            AnyInner::Table(i) => i.check(w),
            AnyInner::Ext(i) => i.check(w),
        };
        r.map_err(|reason| fail(w.a, reason))
    }

    /// Checks witnesses in parallel; reports the failure with the smallest index.
    pub fn verify_all(&self, ws: &[Witness]) -> Result<(), VerifyFailure> {
        let failures: Vec<Option<VerifyFailure>> =
            ws.par_iter().map(|w| self.verify(w).err()).collect();
        match failures.into_iter().flatten().next() {
            Some(f) => Err(f),
            None => Ok(()),
        }
    }
}

/// Single-witness check against its certificate header.
pub fn verify_witness(header: &CertHeader, w: &Witness) -> bool {
    Verifier::new(header).is_ok_and(|v| v.verify(w).is_ok())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifySummary {
    pub witnesses: usize,
    pub exceptions: usize,
}

/// Checks every record and the coverage claimed by the status. Exceptions are
/// rechecked exhaustively when q^3 is within `brute_force_cap`.
pub fn verify_certificate(
    cert: &Certificate,
    brute_force_cap: u64,
) -> Result<VerifySummary, VerifyFailure> {
    let h = &cert.header;
    let q = h.q;
    let mut v = Verifier::new(h)?;
    v.prepare(&cert.witnesses)?;
    let mut seen = BTreeSet::new();
    for w in &cert.witnesses {
        if !seen.insert(w.a) {
            return Err(fail(w.a, "duplicate witness"));
        }
    }
    v.verify_all(&cert.witnesses)?;
    for e in &cert.exceptions {
        if e.q != q || !e.exhaustive {
            return Err(fail(e.failing_a, "exception is not exhaustive"));
        }
        if !seen.insert(e.failing_a) {
            return Err(fail(e.failing_a, "a both witnessed and excepted"));
        }
    }
    if !cert.exceptions.is_empty() {
        let rerun = match &v.inner {
            AnyInner::Prime(i) => brute_force(&i.tower, brute_force_cap),
            AnyInner::Table(i) => brute_force(&i.tower, brute_force_cap),
            AnyInner::Ext(i) => brute_force(&i.tower, brute_force_cap),
        };
        let rerun = rerun
            .map_err(|e: SearchError| fail(u64::MAX, format!("cannot recheck exceptions: {e}")))?;
        let claimed: Vec<u64> = cert.exceptions.iter().map(|e| e.failing_a).collect();
        let actual: Vec<u64> = rerun.exceptions.iter().map(|e| e.failing_a).collect();
        if claimed != actual {
            let a = claimed
                .iter()
                .find(|a| !actual.contains(a))
                .copied()
                .unwrap_or(u64::MAX);
            return Err(fail(a, "exception set does not match exhaustive search"));
        }
    }
    let covered = seen.len() as u64;
    match h.status {
        CertStatus::Full if !cert.exceptions.is_empty() || covered != q => {
            Err(fail(u64::MAX, "full certificate does not cover every a"))
        }
        CertStatus::Exceptions if cert.exceptions.is_empty() || covered != q => Err(fail(
            u64::MAX,
            "exception certificate does not cover every a",
        )),
        _ => Ok(VerifySummary {
            witnesses: cert.witnesses.len(),
            exceptions: cert.exceptions.len(),
        }),
    }
}
