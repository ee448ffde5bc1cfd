//! Families of primitive elements with prescribed trace.
//!
//! For a generator g of F_q^× and d mod q-1, let xi0 be a root of
//!
//!   P_d = x^3 - x^2 + g^{d-1} x - g^d.
//!
//! If P_d is irreducible and xi0 is not a p-th power for any prime
//! p | q^2 + q + 1, then xi_k = g^k xi0 is primitive whenever
//! gcd(3k + d, q - 1) = 1, with Tr(xi_k) = g^k and Tr(xi_k^{-1}) = g^{-k-1}.

use rand::Rng;

use super::SearchError;
use crate::gf::{BaseField, ChainPlan, CubicRing, Elt, FieldTower};
use crate::numth::modarith::{gcd, inv_mod};
use crate::numth::norm_value;

/// Families are only drawn for q at least this large.
pub const MIN_FAMILY_Q: u64 = 7;

/// Default number of families to collect.
pub const DEFAULT_FAMILIES: usize = 1024;

/// Draws allowed per requested family before giving up.
pub const DRAWS_PER_FAMILY: usize = 64;

/// Generators tried before concluding that no family exists.
pub const MAX_GENERATORS: usize = 32;

/// Below this many d values, existence is decided by trying them all.
pub const EXHAUSTIVE_D: u64 = 4096;

#[derive(Clone, Debug)]
pub struct CandidateFamily<F: BaseField> {
    pub d: u64,
    /// Product of the primes of q - 1 other than 3.
    pub r: u64,
    /// 3 dbar = d mod r.
    pub dbar: u64,
    pub g: F::El,
    pub g_inv_d: F::El,
    pub g_inv: F::El,
    /// F_q[x]/(P_d).
    pub ring: CubicRing<F>,
    /// The class of x in `ring`.
    pub xi0: Elt<F::El>,
    /// xi0^2 - xi0.
    pub xi0_sq_minus: Elt<F::El>,
}

impl<F: BaseField> CandidateFamily<F> {
    /// `[m0, m1, m2]` of P_d.
    pub fn modulus(&self) -> [F::El; 3] {
        self.ring.modulus()
    }

    /// xi_k = g^k xi0.
    pub fn xi(&self, k: u64) -> Elt<F::El> {
        let f = self.ring.field();
        self.ring.scale(f.pow(self.g, k as u128), &self.xi0)
    }

    /// xi_k^{-1} = g^{-k} (g^{-d}(xi0^2 - xi0) + g^{-1}).
    pub fn xi_inv(&self, k: u64) -> Elt<F::El> {
        let f = self.ring.field();
        let q1 = f.order() - 1;
        let a_inv = f.pow(self.g, ((q1 - k % q1) % q1) as u128);
        let t = self.ring.add(
            &self.ring.scale(self.g_inv_d, &self.xi0_sq_minus),
            &self.ring.scalar(self.g_inv),
        );
        self.ring.scale(a_inv, &t)
    }

    /// gcd(k + dbar, r) = 1, equivalent to gcd(3k + d, q - 1) = 1.
    pub fn admits(&self, k: u64) -> bool {
        self.r == 1 || gcd((k % self.r + self.dbar) as u128, self.r as u128) == 1
    }
}

/// P_d as `[m0, m1, m2]`.
pub fn family_modulus<F: BaseField>(field: &F, g: F::El, d: u64) -> [F::El; 3] {
    let q1 = field.order() - 1;
    let gd = field.pow(g, (d % q1) as u128);
    let gd1 = field.pow(g, ((d + q1 - 1) % q1) as u128);
    [field.neg(gd), gd1, field.neg(field.one())]
}

/// Shared data for drawing families over one tower.
pub struct FamilyBuilder<'a, F: BaseField> {
    tower: &'a FieldTower<F>,
    g: F::El,
    g_inv: F::El,
    r: u64,
    three_inv: u64,
    norm_plan: ChainPlan,
}

impl<'a, F: BaseField> FamilyBuilder<'a, F> {
    pub fn new(tower: &'a FieldTower<F>, g: F::El) -> Self {
        let q = tower.q();
        let f = tower.field();
        let r: u64 = tower
            .subgroup_fact()
            .primes()
            .filter(|&p| p != 3)
            .map(|p| p as u64)
            .product();
        let three_inv = if r == 1 {
            0
        } else {
            inv_mod(3, r as u128).expect("3 is prime to r") as u64
        };
        let order = tower.order_fact().value().expect("q <= MAX_Q");
        let exps: Vec<u128> = tower.norm_fact().primes().map(|p| order / p).collect();
        debug_assert_eq!(
            tower.norm_fact().value(),
            Some(norm_value(q)),
            "norm factorization"
        );
        FamilyBuilder {
            tower,
            g,
            g_inv: f.inv(g).expect("generator is nonzero"),
            r,
            three_inv,
            norm_plan: ChainPlan::new(&exps),
        }
    }

    /// Tests one d; `None` if P_d is reducible or xi0 is a p-th power.
    pub fn try_d(&self, d: u64) -> Option<CandidateFamily<F>> {
        let q = self.tower.q();
        if q < MIN_FAMILY_Q {
            return None;
        }
        let f = self.tower.field();
        let ring = self.tower.ring_for(family_modulus(f, self.g, d));
        if !ring.is_field() {
            return None;
        }
        let xi0 = ring.generator();
        let one = ring.one();
        if ring.batch_pow_planned(&xi0, &self.norm_plan).contains(&one) {
            return None;
        }
        if q % 3 == 1 {
            assert!(
                !d.is_multiple_of(3),
                "accepted family with 3 | d at q = {q}"
            );
        }
        let q1 = q - 1;
        let g_inv_d = f.pow(self.g_inv, (d % q1) as u128);
        let xi0_sq_minus = ring.sub(&ring.sqr(&xi0), &xi0);
        Some(CandidateFamily {
            d,
            r: self.r,
            dbar: if self.r == 1 {
                0
            } else {
                (d % self.r) * self.three_inv % self.r
            },
            g: self.g,
            g_inv_d,
            g_inv: self.g_inv,
            ring,
            xi0,
            xi0_sq_minus,
        })
    }

    /// False when an exhaustive scan over d (done for q - 1 <= [`EXHAUSTIVE_D`])
    /// finds no family.
    pub fn may_have_family(&self) -> bool {
        let q = self.tower.q();
        q - 1 > EXHAUSTIVE_D || (0..q - 1).any(|d| self.try_d(d).is_some())
    }

    /// One random draw of d.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<CandidateFamily<F>> {
        let q = self.tower.q();
        if q < MIN_FAMILY_Q {
            return None;
        }
        self.try_d(rng.gen_range(0..q - 1))
    }

    /// Draws until `target` families are found (d may repeat) or the draw
    /// budget runs out. Errors only when nothing was found.
    pub fn precompute<R: Rng + ?Sized>(
        &self,
        target: usize,
        rng: &mut R,
    ) -> Result<Vec<CandidateFamily<F>>, SearchError> {
        let budget = target.max(1) * DRAWS_PER_FAMILY;
        let mut out = Vec::with_capacity(target);
        let mut draws = 0;
        while out.len() < target && draws < budget {
            draws += 1;
            if let Some(fam) = self.build(rng) {
                out.push(fam);
            }
        }
        if out.is_empty() {
            return Err(SearchError::NoFamilies(draws as u64));
        }
        Ok(out)
    }
}

/// Generators of F_q^× in index order.
pub fn generators<F: BaseField>(tower: &FieldTower<F>) -> impl Iterator<Item = F::El> + '_ {
    let f = tower.field();
    let q1 = tower.q() as u128 - 1;
    let exps: Vec<u128> = tower.subgroup_fact().primes().map(|p| q1 / p).collect();
    (1..tower.q())
        .filter_map(move |i| f.from_index(i))
        .filter(move |&g| exps.iter().all(|&e| f.pow(g, e) != f.one()))
}

/// Picks the first generator (in index order, among the first
/// [`MAX_GENERATORS`]) that admits a family and collects families for it.
/// Whether any d works depends on g: at q = 7 the generator 3 admits none.
pub fn select_families<F: BaseField, R: Rng + ?Sized>(
    tower: &FieldTower<F>,
    target: usize,
    rng: &mut R,
) -> Result<(F::El, Vec<CandidateFamily<F>>), SearchError> {
    if tower.q() < MIN_FAMILY_Q {
        return Err(SearchError::NoFamilies(0));
    }
    let mut draws = 0;
    for g in generators(tower).take(MAX_GENERATORS) {
        let b = FamilyBuilder::new(tower, g);
        if !b.may_have_family() {
            continue;
        }
        match b.precompute(target, rng) {
            Ok(fams) => return Ok((g, fams)),
            Err(SearchError::NoFamilies(n)) => draws += n,
            Err(e) => return Err(e),
        }
    }
    Err(SearchError::NoFamilies(draws))
}

pub fn build_family<F: BaseField, R: Rng + ?Sized>(
    tower: &FieldTower<F>,
    g: F::El,
    rng: &mut R,
) -> Option<CandidateFamily<F>> {
    FamilyBuilder::new(tower, g).build(rng)
}

pub fn precompute_families<F: BaseField, R: Rng + ?Sized>(
    tower: &FieldTower<F>,
    g: F::El,
    target: usize,
    rng: &mut R,
) -> Result<Vec<CandidateFamily<F>>, SearchError> {
    FamilyBuilder::new(tower, g).precompute(target, rng)
}

/// xi_k + xi_k^{-1} = a^{-1} g^{-d} (xi0^2 - xi0) + a xi0 + a^{-1} g^{-1} with a = g^k.
pub fn sum_formula<F: BaseField>(
    fam: &CandidateFamily<F>,
    k: u64,
) -> Result<Elt<F::El>, SearchError> {
    let f = fam.ring.field();
    let q1 = f.order() - 1;
    let n = (3 * (k as u128 % q1 as u128) + fam.d as u128) % q1 as u128;
    if gcd(n, q1 as u128) != 1 {
        return Err(SearchError::NotCoprime { k, d: fam.d });
    }
    let a = f.pow(fam.g, (k % q1) as u128);
    let a_inv = f.inv(a).expect("power of a generator");
    let ring = &fam.ring;
    let t1 = ring.scale(f.mul(a_inv, fam.g_inv_d), &fam.xi0_sq_minus);
    let t2 = ring.scale(a, &fam.xi0);
    let t3 = ring.scalar(f.mul(a_inv, fam.g_inv));
    Ok(ring.add(&ring.add(&t1, &t2), &t3))
}
