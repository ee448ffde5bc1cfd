//! Arithmetic in F_q[x]/(P) for a monic cubic P. When P is irreducible this
//! is F_{q^3}; the same code also serves as the ring used to test whether a
//! candidate P is irreducible.

use super::base::BaseField;
use super::chain::{self, ChainPlan};
use super::poly;

/// Coefficients of `c0 + c1 x + c2 x^2` in the power basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Elt<E>(pub [E; 3]);

#[derive(Clone, Debug)]
pub struct CubicRing<F: BaseField> {
    field: F,
    /// P = x^3 + m[2] x^2 + m[1] x + m[0]
    m: [F::El; 3],
    neg_m: [F::El; 3],
    /// x^q and x^{2q}; Frobenius is F_q-linear on the power basis.
    frob_x: [Elt<F::El>; 2],
}

impl<F: BaseField> CubicRing<F> {
    /// Ring for `x^3 + m2 x^2 + m1 x + m0`, given as `[m0, m1, m2]`.
    pub fn new(field: F, m: [F::El; 3]) -> Self {
        let neg_m = [field.neg(m[0]), field.neg(m[1]), field.neg(m[2])];
        let zero = field.zero();
        let mut ring = CubicRing {
            field,
            m,
            neg_m,
            frob_x: [Elt([zero; 3]); 2],
        };
        let xq = ring.pow(&ring.generator(), ring.field.order() as u128);
        ring.frob_x = [xq, ring.sqr(&xq)];
        ring
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// `[m0, m1, m2]` of the monic modulus.
    pub fn modulus(&self) -> [F::El; 3] {
        self.m
    }

    /// The monic modulus as a coefficient list of length 4.
    pub fn modulus_poly(&self) -> Vec<F::El> {
        vec![self.m[0], self.m[1], self.m[2], self.field.one()]
    }

    pub fn is_field(&self) -> bool {
        poly::is_irreducible(&self.field, &self.modulus_poly())
    }

    pub fn zero(&self) -> Elt<F::El> {
        let z = self.field.zero();
        Elt([z, z, z])
    }

    pub fn one(&self) -> Elt<F::El> {
        self.scalar(self.field.one())
    }

    pub fn scalar(&self, c: F::El) -> Elt<F::El> {
        let z = self.field.zero();
        Elt([c, z, z])
    }

    /// The class of x.
    pub fn generator(&self) -> Elt<F::El> {
        let z = self.field.zero();
        Elt([z, self.field.one(), z])
    }

    pub fn is_zero(&self, a: &Elt<F::El>) -> bool {
        *a == self.zero()
    }

    /// True if `a` lies in the base field (both non-constant coordinates zero).
    pub fn is_scalar(&self, a: &Elt<F::El>) -> bool {
        self.field.is_zero(a.0[1]) && self.field.is_zero(a.0[2])
    }

    pub fn add(&self, a: &Elt<F::El>, b: &Elt<F::El>) -> Elt<F::El> {
        let f = &self.field;
        Elt([
            f.add(a.0[0], b.0[0]),
            f.add(a.0[1], b.0[1]),
            f.add(a.0[2], b.0[2]),
        ])
    }

    pub fn sub(&self, a: &Elt<F::El>, b: &Elt<F::El>) -> Elt<F::El> {
        let f = &self.field;
        Elt([
            f.sub(a.0[0], b.0[0]),
            f.sub(a.0[1], b.0[1]),
            f.sub(a.0[2], b.0[2]),
        ])
    }

    pub fn neg(&self, a: &Elt<F::El>) -> Elt<F::El> {
        let f = &self.field;
        Elt([f.neg(a.0[0]), f.neg(a.0[1]), f.neg(a.0[2])])
    }

    pub fn scale(&self, c: F::El, a: &Elt<F::El>) -> Elt<F::El> {
        let f = &self.field;
        Elt([f.mul(c, a.0[0]), f.mul(c, a.0[1]), f.mul(c, a.0[2])])
    }

    /// Multiplication by x.
    pub fn mul_x(&self, a: &Elt<F::El>) -> Elt<F::El> {
        let f = &self.field;
        let top = a.0[2];
        Elt([
            f.mul(self.neg_m[0], top),
            f.add(a.0[0], f.mul(self.neg_m[1], top)),
            f.add(a.0[1], f.mul(self.neg_m[2], top)),
        ])
    }

    pub fn mul(&self, a: &Elt<F::El>, b: &Elt<F::El>) -> Elt<F::El> {
        let f = &self.field;
        let z = f.zero();
        let [a0, a1, a2] = a.0;
        let [b0, b1, b2] = b.0;
        let c0 = f.mul(a0, b0);
        let c1 = f.dot3([a0, a1, z], [b1, b0, z]);
        let c2 = f.dot3([a0, a1, a2], [b2, b1, b0]);
        let c3 = f.dot3([a1, a2, z], [b2, b1, z]);
        let c4 = f.mul(a2, b2);
        // x^4 -> -m2 x^3 - m1 x^2 - m0 x
        let c3 = f.add(c3, f.mul(self.neg_m[2], c4));
        let r2 = f.dot3([c2, self.neg_m[1], self.neg_m[2]], [f.one(), c4, c3]);
        let r1 = f.dot3([c1, self.neg_m[0], self.neg_m[1]], [f.one(), c4, c3]);
        let r0 = f.add(c0, f.mul(self.neg_m[0], c3));
        Elt([r0, r1, r2])
    }

    pub fn sqr(&self, a: &Elt<F::El>) -> Elt<F::El> {
        self.mul(a, a)
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: &Elt<F::El>, mut e: u128) -> Elt<F::El> {
        let mut acc = self.one();
        let mut base = *a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.sqr(&base);
            }
        }
        acc
    }

    /// `[a^e for e in exps]` through a shared vector addition chain.
    pub fn batch_pow(&self, a: &Elt<F::El>, exps: &[u128]) -> Vec<Elt<F::El>> {
        chain::batch_pow(a, exps, self.one(), |x, y| self.mul(x, y))
    }

    pub fn batch_pow_planned(&self, a: &Elt<F::El>, plan: &ChainPlan) -> Vec<Elt<F::El>> {
        plan.evaluate(a, self.one(), |x, y| self.mul(x, y)).0
    }

    /// The matrix of multiplication by `a`, columns `a, a x, a x^2`.
    fn mul_matrix(&self, a: &Elt<F::El>) -> [[F::El; 3]; 3] {
        let c0 = *a;
        let c1 = self.mul_x(&c0);
        let c2 = self.mul_x(&c1);
        // row r, column c
        [
            [c0.0[0], c1.0[0], c2.0[0]],
            [c0.0[1], c1.0[1], c2.0[1]],
            [c0.0[2], c1.0[2], c2.0[2]],
        ]
    }

    /// Inverse by the adjugate of the multiplication matrix; `None` for zero
    /// divisors (and zero).
    pub fn inv(&self, a: &Elt<F::El>) -> Option<Elt<F::El>> {
        let f = &self.field;
        let m = self.mul_matrix(a);
        let cof0 = f.sub(f.mul(m[1][1], m[2][2]), f.mul(m[1][2], m[2][1]));
        let cof1 = f.sub(f.mul(m[1][2], m[2][0]), f.mul(m[1][0], m[2][2]));
        let cof2 = f.sub(f.mul(m[1][0], m[2][1]), f.mul(m[1][1], m[2][0]));
        let det = f.dot3(m[0], [cof0, cof1, cof2]);
        let di = f.inv(det)?;
        Some(Elt([f.mul(cof0, di), f.mul(cof1, di), f.mul(cof2, di)]))
    }

    /// `a^q`, as `a0 + a1 x^q + a2 x^{2q}`.
    pub fn frobenius(&self, a: &Elt<F::El>) -> Elt<F::El> {
        let f = &self.field;
        let z = f.zero();
        let [a0, a1, a2] = a.0;
        let [u, v] = &self.frob_x;
        let mut out = [a0, z, z];
        for (i, c) in out.iter_mut().enumerate() {
            *c = f.add(*c, f.dot3([a1, a2, z], [u.0[i], v.0[i], z]));
        }
        Elt(out)
    }

    /// `a^q` by square-and-multiply.
    pub fn frobenius_pow(&self, a: &Elt<F::El>) -> Elt<F::El> {
        self.pow(a, self.field.order() as u128)
    }

    /// `a + a^q + a^{q^2}` as a ring element; lies in F_q for a field.
    pub fn trace_elt(&self, a: &Elt<F::El>) -> Elt<F::El> {
        let a1 = self.frobenius(a);
        let a2 = self.frobenius(&a1);
        self.add(&self.add(a, &a1), &a2)
    }

    /// Tr_{F_{q^3}/F_q}(a) through Frobenius powering.
    pub fn trace(&self, a: &Elt<F::El>) -> F::El {
        let t = self.trace_elt(a);
        debug_assert!(self.is_scalar(&t), "trace left the base field");
        t.0[0]
    }

    /// `a^{q^2+q+1}` as a ring element.
    pub fn norm_elt(&self, a: &Elt<F::El>) -> Elt<F::El> {
        let q = self.field.order() as u128;
        self.pow(a, q * q + q + 1)
    }

    /// Determinant of multiplication by `a`; equals [`CubicRing::norm`] on a field.
    pub fn norm_det(&self, a: &Elt<F::El>) -> F::El {
        let f = &self.field;
        let m = self.mul_matrix(a);
        let cof0 = f.sub(f.mul(m[1][1], m[2][2]), f.mul(m[1][2], m[2][1]));
        let cof1 = f.sub(f.mul(m[1][2], m[2][0]), f.mul(m[1][0], m[2][2]));
        let cof2 = f.sub(f.mul(m[1][0], m[2][1]), f.mul(m[1][1], m[2][0]));
        f.dot3(m[0], [cof0, cof1, cof2])
    }

    pub fn norm(&self, a: &Elt<F::El>) -> F::El {
        let n = self.norm_elt(a);
        debug_assert!(self.is_scalar(&n), "norm left the base field");
        n.0[0]
    }

    /// `[Tr(1), Tr(x), Tr(x^2)]` from Newton's identities on the modulus.
    pub fn trace_form(&self) -> [F::El; 3] {
        let f = &self.field;
        let [_, m1, m2] = self.m;
        let t0 = f.from_int(3);
        let t1 = f.neg(m2);
        let t2 = f.sub(f.mul(m2, m2), f.add(m1, m1));
        [t0, t1, t2]
    }

    /// Trace through the linear form; agrees with [`CubicRing::trace`] on a field.
    pub fn trace_linear(&self, a: &Elt<F::El>) -> F::El {
        self.field.dot3(a.0, self.trace_form())
    }

    pub fn to_digits(&self, a: &Elt<F::El>) -> Vec<Vec<u64>> {
        a.0.iter().map(|&c| self.field.digits(c)).collect()
    }

    pub fn from_digits(&self, d: &[Vec<u64>]) -> Option<Elt<F::El>> {
        if d.len() != 3 {
            return None;
        }
        Some(Elt([
            self.field.from_digits(&d[0])?,
            self.field.from_digits(&d[1])?,
            self.field.from_digits(&d[2])?,
        ]))
    }

    /// Uniform random ring element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Elt<F::El> {
        let f = &self.field;
        Elt([f.random(rng), f.random(rng), f.random(rng)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::base::{ExtField, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn ring7() -> CubicRing<PrimeField> {
        // x^3 - 3 is irreducible over F_7 (3 is not a cube mod 7)
        CubicRing::new(PrimeField::new(7), [4, 0, 0])
    }

    /// Determinant and trace of the multiplication matrix, computed
    /// independently of pow/frobenius.
    fn matrix_oracle<F: BaseField>(r: &CubicRing<F>, a: &Elt<F::El>) -> (F::El, F::El) {
        let f = r.field();
        let m = r.mul_matrix(a);
        let tr = f.add(f.add(m[0][0], m[1][1]), m[2][2]);
        let minor = |i: usize, j: usize, k: usize, l: usize| {
            f.sub(f.mul(m[i][k], m[j][l]), f.mul(m[i][l], m[j][k]))
        };
        let det = f.add(
            f.sub(
                f.mul(m[0][0], minor(1, 2, 1, 2)),
                f.mul(m[0][1], minor(1, 2, 0, 2)),
            ),
            f.mul(m[0][2], minor(1, 2, 0, 1)),
        );
        (tr, det)
    }

    #[test]
    fn inverse_and_powers() {
        let r = ring7();
        assert!(r.is_field());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..200 {
            let a = r.random(&mut rng);
            if r.is_zero(&a) {
                assert!(r.inv(&a).is_none());
                continue;
            }
            let ai = r.inv(&a).unwrap();
            assert_eq!(r.mul(&a, &ai), r.one());
            assert_eq!(r.pow(&a, 342), r.one());
            assert_eq!(r.pow(&a, 343), a);
        }
    }

    #[test]
    fn trace_and_norm_of_scalars() {
        let r = ring7();
        for c in 0..7u64 {
            let s = r.scalar(c);
            assert_eq!(r.trace(&s), 3 * c % 7);
            assert_eq!(r.norm(&s), c * c * c % 7);
        }
        assert_eq!(r.trace(&r.zero()), 0);
    }

    #[test]
    fn trace_norm_match_matrix_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let r = ring7();
        for _ in 0..300 {
            let a = r.random(&mut rng);
            let (tr, det) = matrix_oracle(&r, &a);
            assert_eq!(r.trace(&a), tr);
            assert_eq!(r.trace_linear(&a), tr);
            assert_eq!(r.norm(&a), det);
            assert_eq!(r.norm_det(&a), det);
            assert_eq!(r.frobenius(&a), r.frobenius_pow(&a));
            assert!(r.is_scalar(&r.trace_elt(&a)));
            assert!(r.is_scalar(&r.norm_elt(&a)));
        }
        // over F_9 as well
        let f9 = ExtField::random(3, 2, &mut rng).unwrap();
        let r9 = loop {
            let m = [
                f9.random(&mut rng),
                f9.random(&mut rng),
                f9.random(&mut rng),
            ];
            let r = CubicRing::new(f9.clone(), m);
            if r.is_field() {
                break r;
            }
        };
        for _ in 0..300 {
            let a = r9.random(&mut rng);
            let (tr, det) = matrix_oracle(&r9, &a);
            assert_eq!(r9.trace(&a), tr);
            assert_eq!(r9.trace_linear(&a), tr);
            assert_eq!(r9.norm(&a), det);
            assert_eq!(r9.norm_det(&a), det);
            assert_eq!(r9.frobenius(&a), r9.frobenius_pow(&a));
        }
    }

    #[test]
    fn digits_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let r = ring7();
        let a = r.random(&mut rng);
        assert_eq!(r.from_digits(&r.to_digits(&a)), Some(a));
        assert_eq!(r.from_digits(&[vec![7], vec![0], vec![0]]), None);
    }
}
