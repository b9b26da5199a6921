//! Dense univariate helpers on coefficient vectors (lowest degree first).

use crate::field::Coeff;

pub fn trim<C: Coeff>(mut c: Vec<C>) -> Vec<C> {
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    c
}

pub fn derivative<C: Coeff>(c: &[C]) -> Vec<C> {
    c.iter().enumerate().skip(1).map(|(k, v)| v.mul_ref(&C::from_i64(k as i64))).collect()
}

/// Remainder of `a` modulo `b` (`b` nonzero and trimmed).
pub fn rem<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let mut r = trim(a.to_vec());
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap().clone() / lb.clone();
        for (i, bc) in b.iter().enumerate() {
            let v = r[i + shift].clone() - f.mul_ref(bc);
            r[i + shift] = v;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Monic gcd by the Euclidean algorithm.
pub fn gcd<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().cloned() {
        for v in a.iter_mut() {
            *v = v.clone() / l.clone();
        }
    }
    a
}

/// Square-free iff `gcd(f, f')` is a nonzero constant.
pub fn is_square_free<C: Coeff>(f: &[C]) -> bool {
    let f = trim(f.to_vec());
    if f.is_empty() {
        return false;
    }
    gcd(&f, &derivative(&f)).len() == 1
}
