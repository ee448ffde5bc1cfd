use rand::Rng;

use super::base::{BaseField, ExtField, PrimeField};
use super::chain::ChainPlan;
use super::cubic::{CubicRing, Elt};
use super::table::{TableField, MAX_TABLE_Q};
use super::GfError;
use crate::numth::{factorize, is_prime_power, norm_value, Factorization};
use crate::rng::{seeded_rng, PURPOSE_TOWER};

/// Largest q with q^3 - 1 below 2^128.
pub const MAX_Q: u64 = 6_981_463_658_331;

/// A concrete F_q with a chosen cubic extension and the factorizations that
/// primitivity testing needs.
#[derive(Clone, Debug)]
pub struct FieldTower<F: BaseField> {
    field: F,
    ring: CubicRing<F>,
    order_fact: Factorization,
    subgroup_fact: Factorization,
    norm_fact: Factorization,
    primitivity_exps: Vec<u128>,
    /// How each prime of q^3 - 1 is tested, ascending.
    routes: Vec<Route>,
    /// Chain over (q^2 + q + 1)/p for the primes routed through x^{q-1}.
    y_plan: ChainPlan,
}

/// For p | q - 1, x^{(q^3-1)/p} = N(x)^{(q-1)/p}. Otherwise p | q^2 + q + 1
/// and x^{(q^3-1)/p} = (x^{q-1})^{(q^2+q+1)/p}.
#[derive(Clone, Copy, Debug)]
enum Route {
    Norm(u128),
    Y(usize),
}

impl<F: BaseField> FieldTower<F> {
    /// Assembles a tower from a field and a cubic modulus `[m0, m1, m2]`,
    /// checking irreducibility and factoring q^3 - 1.
    pub fn from_parts(field: F, cubic: [F::El; 3]) -> Result<Self, GfError> {
        let q = field.order();
        if q > MAX_Q {
            return Err(GfError::TooLarge(q));
        }
        let ring = CubicRing::new(field.clone(), cubic);
        if !ring.is_field() {
            return Err(GfError::BadModulus("cubic modulus is reducible".into()));
        }
        let subgroup_fact = factorize(q as u128 - 1)?;
        let norm_fact = factorize(norm_value(q))?;
        let order_fact = Factorization::product(&subgroup_fact, &norm_fact);
        let order = order_fact.value().expect("q^3 - 1 fits by MAX_Q");
        let primitivity_exps: Vec<u128> = order_fact.primes().map(|p| order / p).collect();
        let (q1, nv) = (q as u128 - 1, norm_value(q));
        let mut y_exps = Vec::new();
        let routes = order_fact
            .primes()
            .map(|p| {
                if q1 % p == 0 {
                    Route::Norm(q1 / p)
                } else {
                    y_exps.push(nv / p);
                    Route::Y(y_exps.len() - 1)
                }
            })
            .collect();
        Ok(FieldTower {
            field,
            ring,
            order_fact,
            subgroup_fact,
            norm_fact,
            primitivity_exps,
            routes,
            y_plan: ChainPlan::new(&y_exps),
        })
    }

    fn random_cubic<R: Rng + ?Sized>(field: &F, rng: &mut R) -> [F::El; 3] {
        loop {
            let m = [field.random(rng), field.random(rng), field.random(rng)];
            if CubicRing::new(field.clone(), m).is_field() {
                return m;
            }
        }
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// F_{q^3} as F_q[x]/(cubic modulus).
    pub fn ring(&self) -> &CubicRing<F> {
        &self.ring
    }

    /// Same base field, different cubic modulus.
    pub fn ring_for(&self, cubic: [F::El; 3]) -> CubicRing<F> {
        CubicRing::new(self.field.clone(), cubic)
    }

    /// Factorization of q^3 - 1.
    pub fn order_fact(&self) -> &Factorization {
        &self.order_fact
    }

    /// Factorization of q - 1.
    pub fn subgroup_fact(&self) -> &Factorization {
        &self.subgroup_fact
    }

    /// Factorization of q^2 + q + 1.
    pub fn norm_fact(&self) -> &Factorization {
        &self.norm_fact
    }

    /// `(q^3 - 1)/p` for each prime `p | q^3 - 1`, in increasing order of p.
    pub fn primitivity_exps(&self) -> &[u128] {
        &self.primitivity_exps
    }

    /// Flags for the primes dividing q - 1, from the norm alone.
    fn norm_flags(
        &self,
        ring: &CubicRing<F>,
        x: &Elt<F::El>,
    ) -> Result<Vec<Option<bool>>, GfError> {
        let f = &self.field;
        let n = ring.norm_det(x);
        if f.is_zero(n) {
            return Err(GfError::ZeroElement);
        }
        let one = f.one();
        Ok(self
            .routes
            .iter()
            .map(|r| match r {
                Route::Norm(e) => Some(f.pow(n, *e) != one),
                Route::Y(_) => None,
            })
            .collect())
    }

    /// `[y^{(q^2+q+1)/p}]` for y = x^{q-1}, via the shared chain.
    fn y_powers(&self, ring: &CubicRing<F>, x: &Elt<F::El>) -> Result<Vec<Elt<F::El>>, GfError> {
        let inv = ring.inv(x).ok_or(GfError::ZeroElement)?;
        let y = ring.mul(&ring.frobenius(x), &inv);
        Ok(ring.batch_pow_planned(&y, &self.y_plan))
    }

    /// Primitivity in any ring over this base field whose modulus is
    /// irreducible. The primes of q - 1 are decided by the norm first.
    pub fn is_primitive_in(&self, ring: &CubicRing<F>, x: &Elt<F::El>) -> Result<bool, GfError> {
        if ring.is_zero(x) {
            return Err(GfError::ZeroElement);
        }
        if self.norm_flags(ring, x)?.contains(&Some(false)) {
            return Ok(false);
        }
        let one = ring.one();
        Ok(self.y_powers(ring, x)?.iter().all(|y| *y != one))
    }

    /// `x^{(q^3-1)/p} != 1` for each prime p of q^3 - 1, ascending.
    pub fn primitivity_flags_in(
        &self,
        ring: &CubicRing<F>,
        x: &Elt<F::El>,
    ) -> Result<Vec<bool>, GfError> {
        if ring.is_zero(x) {
            return Err(GfError::ZeroElement);
        }
        let norm = self.norm_flags(ring, x)?;
        let ys = self.y_powers(ring, x)?;
        let one = ring.one();
        Ok(self
            .routes
            .iter()
            .zip(norm)
            .map(|(r, nf)| match r {
                Route::Norm(_) => nf.expect("norm route"),
                Route::Y(i) => ys[*i] != one,
            })
            .collect())
    }

    pub fn is_primitive(&self, x: &Elt<F::El>) -> Result<bool, GfError> {
        self.is_primitive_in(&self.ring, x)
    }

    /// Smallest-index generator of F_q^×.
    pub fn primitive_root(&self) -> Result<F::El, GfError> {
        find_primitive_root_base(&self.field, &self.subgroup_fact)
    }
}

/// Smallest-index generator of F_q^×; errors for q = 2, whose unit group is trivial.
pub fn find_primitive_root_base<F: BaseField>(
    field: &F,
    subgroup_fact: &Factorization,
) -> Result<F::El, GfError> {
    let q = field.order();
    if q <= 2 {
        return Err(GfError::DegenerateGroup(q));
    }
    let n = q as u128 - 1;
    let one = field.one();
    (1..q)
        .filter_map(|i| field.from_index(i))
        .find(|&g| subgroup_fact.primes().all(|p| field.pow(g, n / p) != one))
        .ok_or(GfError::DegenerateGroup(q))
}

/// `x^{(q^3-1)/p} != 1` for every prime `p | q^3 - 1`, via a batch chain.
pub fn is_primitive<F: BaseField>(
    ring: &CubicRing<F>,
    x: &Elt<F::El>,
    order_fact: &Factorization,
) -> Result<bool, GfError> {
    if ring.is_zero(x) {
        return Err(GfError::ZeroElement);
    }
    let order = order_fact
        .value()
        .ok_or(GfError::TooLarge(ring.field().order()))?;
    let exps: Vec<u128> = order_fact.primes().map(|p| order / p).collect();
    let one = ring.one();
    Ok(ring.batch_pow(x, &exps).iter().all(|y| *y != one))
}

/// Same test with one independent square-and-multiply per prime.
pub fn is_primitive_naive<F: BaseField>(
    ring: &CubicRing<F>,
    x: &Elt<F::El>,
    order_fact: &Factorization,
) -> Result<bool, GfError> {
    if ring.is_zero(x) {
        return Err(GfError::ZeroElement);
    }
    let order = order_fact
        .value()
        .ok_or(GfError::TooLarge(ring.field().order()))?;
    let one = ring.one();
    Ok(order_fact.primes().all(|p| ring.pow(x, order / p) != one))
}

/// A tower over one of the base field representations.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum AnyTower {
    Prime(FieldTower<PrimeField>),
    /// F_{p^e} with q at most `MAX_TABLE_Q`, via log tables.
    Table(FieldTower<TableField>),
    Ext(FieldTower<ExtField>),
}

/// Generic code run against whichever tower variant is present.
pub trait TowerVisitor {
    type Output;
    fn visit<F: BaseField>(self, tower: &FieldTower<F>) -> Self::Output;
}

impl AnyTower {
    pub fn visit<V: TowerVisitor>(&self, v: V) -> V::Output {
        match self {
            AnyTower::Prime(t) => v.visit(t),
            AnyTower::Table(t) => v.visit(t),
            AnyTower::Ext(t) => v.visit(t),
        }
    }

    pub fn q(&self) -> u64 {
        match self {
            AnyTower::Prime(t) => t.q(),
            AnyTower::Table(t) => t.q(),
            AnyTower::Ext(t) => t.q(),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            AnyTower::Prime(t) => t.field().characteristic(),
            AnyTower::Table(t) => t.field().characteristic(),
            AnyTower::Ext(t) => t.field().characteristic(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            AnyTower::Prime(_) => 1,
            AnyTower::Table(t) => t.field().degree(),
            AnyTower::Ext(t) => t.field().degree(),
        }
    }

    pub fn order_fact(&self) -> &Factorization {
        match self {
            AnyTower::Prime(t) => t.order_fact(),
            AnyTower::Table(t) => t.order_fact(),
            AnyTower::Ext(t) => t.order_fact(),
        }
    }

    /// Monic base modulus (low to high), empty for prime q.
    pub fn base_modulus(&self) -> Vec<u64> {
        match self {
            AnyTower::Prime(_) => Vec::new(),
            AnyTower::Table(t) => t.field().modulus().to_vec(),
            AnyTower::Ext(t) => t.field().modulus().to_vec(),
        }
    }

    /// Cubic modulus coefficients `[m0, m1, m2]` as base-p digit lists.
    pub fn cubic_modulus_digits(&self) -> Vec<Vec<u64>> {
        fn digits<F: BaseField>(t: &FieldTower<F>) -> Vec<Vec<u64>> {
            t.ring()
                .modulus()
                .iter()
                .map(|&c| t.field().digits(c))
                .collect()
        }
        match self {
            AnyTower::Prime(t) => digits(t),
            AnyTower::Table(t) => digits(t),
            AnyTower::Ext(t) => digits(t),
        }
    }

    /// Rebuilds a tower from recorded moduli.
    pub fn from_moduli(q: u64, base_modulus: &[u64], cubic: &[Vec<u64>]) -> Result<Self, GfError> {
        let (p, e) = is_prime_power(q as u128).ok_or(GfError::NotPrimePower(q))?;
        let p = p as u64;
        if cubic.len() != 3 {
            return Err(GfError::BadModulus(
                "cubic modulus needs three coefficients".into(),
            ));
        }
        fn coeffs<F: BaseField>(f: &F, cubic: &[Vec<u64>]) -> Result<[F::El; 3], GfError> {
            let get = |d: &Vec<u64>| {
                f.from_digits(d)
                    .ok_or_else(|| GfError::BadModulus("cubic coefficient out of range".into()))
            };
            Ok([get(&cubic[0])?, get(&cubic[1])?, get(&cubic[2])?])
        }
        if e == 1 {
            if !base_modulus.is_empty() {
                return Err(GfError::BadModulus(
                    "prime field has no base modulus".into(),
                ));
            }
            let f = PrimeField::new(p);
            let m = coeffs(&f, cubic)?;
            Ok(AnyTower::Prime(FieldTower::from_parts(f, m)?))
        } else {
            if base_modulus.len() != e as usize + 1 {
                return Err(GfError::BadModulus(
                    "base modulus has the wrong degree".into(),
                ));
            }
            let f = ExtField::with_modulus(p, base_modulus)?;
            if q <= MAX_TABLE_Q {
                let f = TableField::new(f)?;
                let m = coeffs(&f, cubic)?;
                return Ok(AnyTower::Table(FieldTower::from_parts(f, m)?));
            }
            let m = coeffs(&f, cubic)?;
            Ok(AnyTower::Ext(FieldTower::from_parts(f, m)?))
        }
    }
}

/// Builds F_q and a random cubic extension, deterministically from `(q, seed)`.
pub fn build_tower(q: u64, seed: u64) -> Result<AnyTower, GfError> {
    let (p, e) = is_prime_power(q as u128).ok_or(GfError::NotPrimePower(q))?;
    if q > MAX_Q {
        return Err(GfError::TooLarge(q));
    }
    let mut rng = seeded_rng(q, seed, PURPOSE_TOWER, 0);
    let p = p as u64;
    if e == 1 {
        let f = PrimeField::new(p);
        let m = FieldTower::random_cubic(&f, &mut rng);
        Ok(AnyTower::Prime(FieldTower::from_parts(f, m)?))
    } else {
        let f = ExtField::random(p, e as usize, &mut rng)?;
        if q <= MAX_TABLE_Q {
            let f = TableField::new(f)?;
            let m = FieldTower::random_cubic(&f, &mut rng);
            return Ok(AnyTower::Table(FieldTower::from_parts(f, m)?));
        }
        let m = FieldTower::random_cubic(&f, &mut rng);
        Ok(AnyTower::Ext(FieldTower::from_parts(f, m)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_examples() {
        let t7 = build_tower(7, 0).unwrap();
        assert_eq!((t7.characteristic(), t7.degree()), (7, 1));
        assert_eq!(t7.order_fact().factors(), &[(2, 1), (3, 2), (19, 1)]);
        let t8 = build_tower(8, 0).unwrap();
        assert_eq!((t8.characteristic(), t8.degree()), (2, 3));
        assert_eq!(t8.order_fact().factors(), &[(7, 1), (73, 1)]);
        assert_eq!(build_tower(6, 0).unwrap_err(), GfError::NotPrimePower(6));
        assert!(build_tower(MAX_Q + 2, 0).is_err());
    }

    #[test]
    fn primitive_roots() {
        let AnyTower::Prime(t) = build_tower(7, 0).unwrap() else {
            panic!("prime tower expected")
        };
        assert_eq!(t.primitive_root().unwrap(), 3);
        let AnyTower::Prime(t2) = build_tower(2, 0).unwrap() else {
            panic!("prime tower expected")
        };
        assert_eq!(t2.primitive_root(), Err(GfError::DegenerateGroup(2)));
    }

    #[test]
    fn primitivity_basics() {
        let AnyTower::Prime(t) = build_tower(7, 5).unwrap() else {
            panic!()
        };
        assert!(!t.is_primitive(&t.ring().one()).unwrap());
        assert_eq!(t.is_primitive(&t.ring().zero()), Err(GfError::ZeroElement));
        // F_8^× has prime order 7: every root of an irreducible cubic over F_2 generates it
        let AnyTower::Prime(t2) = build_tower(2, 1).unwrap() else {
            panic!()
        };
        assert!(t2.is_primitive(&t2.ring().generator()).unwrap());
    }

    #[test]
    fn rebuild_from_moduli() {
        let t = build_tower(81, 3).unwrap();
        let again =
            AnyTower::from_moduli(81, &t.base_modulus(), &t.cubic_modulus_digits()).unwrap();
        assert_eq!(again.base_modulus(), t.base_modulus());
        assert_eq!(again.cubic_modulus_digits(), t.cubic_modulus_digits());
        assert!(AnyTower::from_moduli(81, &[1, 0, 1], &t.cubic_modulus_digits()).is_err());
    }

    struct SplitAgrees;

    impl TowerVisitor for SplitAgrees {
        type Output = usize;
        fn visit<F: BaseField>(self, t: &FieldTower<F>) -> usize {
            let r = t.ring();
            let mut rng = seeded_rng(t.q(), 9, PURPOSE_TOWER, 1);
            let order = t.order_fact().value().unwrap();
            let one = r.one();
            let mut prim = 0;
            for _ in 0..300 {
                let x = r.random(&mut rng);
                if r.is_zero(&x) {
                    continue;
                }
                let want: Vec<bool> = t
                    .order_fact()
                    .primes()
                    .map(|p| r.pow(&x, order / p) != one)
                    .collect();
                assert_eq!(t.primitivity_flags_in(r, &x).unwrap(), want);
                let p = t.is_primitive(&x).unwrap();
                assert_eq!(p, want.iter().all(|&b| b));
                assert_eq!(p, is_primitive(r, &x, t.order_fact()).unwrap());
                assert_eq!(p, is_primitive_naive(r, &x, t.order_fact()).unwrap());
                prim += p as usize;
            }
            prim
        }
    }

    #[test]
    fn norm_and_frobenius_split_matches_full_powers() {
        for q in [4u64, 7, 13, 31, 64, 343, 1009, 65537, 531441] {
            assert!(build_tower(q, 0).unwrap().visit(SplitAgrees) > 0, "q={q}");
        }
    }
}
