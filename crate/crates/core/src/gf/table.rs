//! Small extension fields F_{p^e} with elements stored as discrete logarithms
//! to a fixed generator. Addition goes through the Zech table
//! `g^z = 1 + g^i`. Indices and digits match [`ExtField`].

use std::sync::Arc;

use super::base::{BaseField, ExtField};
use super::GfError;
use crate::numth::factorize;

/// Largest order tabulated; the three tables take 12 bytes per element.
pub const MAX_TABLE_Q: u64 = 1 << 21;

/// Log representation of zero.
const ZERO: u32 = u32::MAX;

/// Clones share the tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableField {
    ext: ExtField,
    /// q - 1.
    n: u32,
    tables: Arc<Tables>,
}

#[derive(Debug, PartialEq, Eq)]
struct Tables {
    /// Index of g^i.
    exp: Vec<u32>,
    /// Logarithm by index; `ZERO` at index 0.
    log: Vec<u32>,
    /// Logarithm of 1 + g^i.
    zech: Vec<u32>,
}

impl TableField {
    pub fn new(ext: ExtField) -> Result<Self, GfError> {
        let q = ext.order();
        if q > MAX_TABLE_Q {
            return Err(GfError::Unsupported(format!("table for F_{q}")));
        }
        let n = q - 1;
        let fact = factorize(n as u128)?;
        let one = ext.one();
        let g = (2..q)
            .filter_map(|i| ext.from_index(i))
            .find(|&g| fact.primes().all(|l| ext.pow(g, n as u128 / l) != one))
            .ok_or(GfError::DegenerateGroup(q))?;
        let mut exp = Vec::with_capacity(n as usize);
        let mut log = vec![ZERO; q as usize];
        let mut x = one;
        for i in 0..n as u32 {
            let idx = ext.to_index(x) as u32;
            exp.push(idx);
            log[idx as usize] = i;
            x = ext.mul(x, g);
        }
        let p = ext.characteristic() as u32;
        let zech = exp
            .iter()
            .map(|&idx| {
                let d0 = idx % p;
                log[(idx - d0 + (d0 + 1) % p) as usize]
            })
            .collect();
        Ok(TableField {
            ext,
            n: n as u32,
            tables: Arc::new(Tables { exp, log, zech }),
        })
    }

    /// Monic modulus of the underlying polynomial field, low to high.
    pub fn modulus(&self) -> &[u64] {
        self.ext.modulus()
    }

    #[inline]
    fn add_log(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }
}

impl BaseField for TableField {
    type El = u32;

    fn characteristic(&self) -> u64 {
        self.ext.characteristic()
    }
    fn degree(&self) -> u32 {
        self.ext.degree()
    }
    fn order(&self) -> u64 {
        self.n as u64 + 1
    }
    fn zero(&self) -> u32 {
        ZERO
    }
    fn one(&self) -> u32 {
        0
    }
    fn from_int(&self, n: u64) -> u32 {
        self.tables.log[(n % self.characteristic()) as usize]
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.n - a };
        match self.tables.zech[d as usize] {
            ZERO => ZERO,
            z => self.add_log(a, z),
        }
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    fn neg(&self, a: u32) -> u32 {
        if a == ZERO || self.characteristic() == 2 {
            a
        } else {
            self.add_log(a, self.n / 2)
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO || b == ZERO {
            ZERO
        } else {
            self.add_log(a, b)
        }
    }
    fn inv(&self, a: u32) -> Option<u32> {
        match a {
            ZERO => None,
            0 => Some(0),
            _ => Some(self.n - a),
        }
    }
    fn pow(&self, a: u32, e: u128) -> u32 {
        match (a, e) {
            (_, 0) => 0,
            (ZERO, _) => ZERO,
            _ => (a as u128 * (e % self.n as u128) % self.n as u128) as u32,
        }
    }
    fn to_index(&self, a: u32) -> u64 {
        if a == ZERO {
            0
        } else {
            self.tables.exp[a as usize] as u64
        }
    }
    fn from_index(&self, i: u64) -> Option<u32> {
        self.tables.log.get(i as usize).copied()
    }
    fn digits(&self, a: u32) -> Vec<u64> {
        let x = self
            .ext
            .from_index(self.to_index(a))
            .expect("index below q");
        self.ext.digits(x)
    }
    fn from_digits(&self, d: &[u64]) -> Option<u32> {
        let x = self.ext.from_digits(d)?;
        self.from_index(self.ext.to_index(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn agrees_with_polynomial_arithmetic() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for (p, e) in [(2u64, 2usize), (2, 5), (3, 2), (3, 7), (5, 3), (31, 2)] {
            let ext = ExtField::random(p, e, &mut rng).unwrap();
            let t = TableField::new(ext.clone()).unwrap();
            let q = t.order();
            assert_eq!(t.to_index(t.zero()), 0);
            assert_eq!(t.to_index(t.one()), 1);
            assert_eq!(t.to_index(t.from_int(p + 2)), 2 % p);
            for _ in 0..500 {
                let (i, j) = (
                    rand::Rng::gen_range(&mut rng, 0..q),
                    rand::Rng::gen_range(&mut rng, 0..q),
                );
                let (a, b) = (t.from_index(i).unwrap(), t.from_index(j).unwrap());
                let (x, y) = (ext.from_index(i).unwrap(), ext.from_index(j).unwrap());
                let idx = |v| ext.to_index(v);
                assert_eq!(t.to_index(t.add(a, b)), idx(ext.add(x, y)));
                assert_eq!(t.to_index(t.sub(a, b)), idx(ext.sub(x, y)));
                assert_eq!(t.to_index(t.neg(a)), idx(ext.neg(x)));
                assert_eq!(t.to_index(t.mul(a, b)), idx(ext.mul(x, y)));
                assert_eq!(t.inv(a).map(|v| t.to_index(v)), ext.inv(x).map(idx));
                assert_eq!(
                    t.to_index(t.pow(a, 1 << 40 | j as u128)),
                    idx(ext.pow(x, 1 << 40 | j as u128))
                );
                assert_eq!(t.digits(a), ext.digits(x));
                assert_eq!(t.from_digits(&t.digits(a)), Some(a));
            }
            assert_eq!(t.from_index(q), None);
        }
    }
}
