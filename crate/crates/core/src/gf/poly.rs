//! Dense univariate polynomials over a [`BaseField`], coefficients low to high.
//! Only what irreducibility testing needs.

use super::base::BaseField;

fn trim<F: BaseField>(f: &F, a: &mut Vec<F::El>) {
    while a.last().is_some_and(|&c| f.is_zero(c)) {
        a.pop();
    }
}

/// Degree, with the zero polynomial reported as `None`.
pub fn degree<F: BaseField>(f: &F, a: &[F::El]) -> Option<usize> {
    a.iter().rposition(|&c| !f.is_zero(c))
}

pub fn rem<F: BaseField>(f: &F, a: &[F::El], m: &[F::El]) -> Vec<F::El> {
    let dm = degree(f, m).expect("division by the zero polynomial");
    let lead_inv = f.inv(m[dm]).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    trim(f, &mut r);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = f.mul(r[top], lead_inv);
        let shift = top - dm;
        for (i, &mi) in m[..=dm].iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, mi));
        }
        trim(f, &mut r);
    }
    r
}

pub fn mul_mod<F: BaseField>(f: &F, a: &[F::El], b: &[F::El], m: &[F::El]) -> Vec<F::El> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut t = vec![f.zero(); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if f.is_zero(ai) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            t[i + j] = f.add(t[i + j], f.mul(ai, bj));
        }
    }
    rem(f, &t, m)
}

pub fn pow_mod<F: BaseField>(f: &F, a: &[F::El], mut e: u128, m: &[F::El]) -> Vec<F::El> {
    let mut acc = rem(f, &[f.one()], m);
    let mut base = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(f, &acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mul_mod(f, &base, &base, m);
        }
    }
    acc
}

/// Monic greatest common divisor.
pub fn gcd<F: BaseField>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(f, &mut x);
    trim(f, &mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let li = f.inv(lead).expect("nonzero");
        for c in x.iter_mut() {
            *c = f.mul(*c, li);
        }
    }
    x
}

/// Ben-Or: `f` of degree n is irreducible iff gcd(x^{q^i} - x, f) = 1 for i <= n/2.
pub fn is_irreducible<F: BaseField>(field: &F, m: &[F::El]) -> bool {
    let Some(n) = degree(field, m) else {
        return false;
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let m = &m[..=n];
    let x = vec![field.zero(), field.one()];
    let q = field.order() as u128;
    let mut h = rem(field, &x, m);
    for _ in 1..=n / 2 {
        h = pow_mod(field, &h, q, m);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), field.zero());
        diff[1] = field.sub(diff[1], field.one());
        let g = gcd(field, &diff, m);
        if degree(field, &g) != Some(0) {
            return false;
        }
    }
    true
}
