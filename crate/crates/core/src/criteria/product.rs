//! Witness chains for products of hypersurfaces in disjoint variables.
//!
//! For `f = f_X f_Y` with `f_X`, `f_Y` in disjoint blocks, `a` in the `X` block and
//! `b` in the `Y` block,
//! `θ(F_*(ab)) = f_X^{p-1} u_X(F_*a) θ_Y(F_*b) + f_Y^{p-1} θ_X(F_*a) u_Y(F_*b)`.
//! So if `g_1, ..., g_n` is a chain for `f_X` and `z_1 = h ∈ (f_Y^{p-1})`,
//! `z_{l+1} = f_Y^{p-1} u_Y(F_*z_l)`, then `g_l z_l` is a chain for the pair
//! `(f_X, f_Y)` as soon as `z_n ∉ m^{[p]}`.

use crate::error::{Error, Result};
use crate::frobenius::in_max_ideal_frobenius_power;
use crate::monomial::{Exponents, Monomial};
use crate::poly::Polynomial;

/// `u` acting only on the variables flagged in `block`; other exponents are kept.
pub fn partial_u(h: &Polynomial, block: &[bool]) -> Polynomial {
    let p = h.ring().p();
    let terms = h.terms().iter().filter_map(|(m, c)| {
        let ok = m
            .exps()
            .iter()
            .zip(block)
            .all(|(e, &b)| !b || e % p == p - 1);
        ok.then(|| {
            let e: Exponents = m
                .exps()
                .iter()
                .zip(block)
                .map(|(e, &b)| if b { e / p } else { *e })
                .collect();
            (Monomial::new(e), *c)
        })
    });
    Polynomial::from_terms(h.ring(), terms)
}

fn support(a: &Polynomial) -> Vec<bool> {
    let mut s = vec![false; a.ring().nvars()];
    for (m, _) in a.terms() {
        for (slot, e) in s.iter_mut().zip(m.exps()) {
            *slot |= *e > 0;
        }
    }
    s
}

/// Combine a chain `gs` for `f_x` with a polynomial `h` for `f_y` into a chain for
/// the pair `(f_x, f_y)`. All inputs live in the joint ring.
pub fn product_witness(
    gs: &[Polynomial],
    h: &Polynomial,
    f_x: &Polynomial,
    f_y: &Polynomial,
) -> Result<Vec<Polynomial>> {
    if gs.is_empty() {
        return Err(Error::precondition("empty chain"));
    }
    let ring = f_x.ring();
    let p = ring.p() as u64;
    let sx = support(f_x);
    let x_side = gs.iter().fold(sx, |acc, g| {
        acc.iter().zip(support(g)).map(|(a, b)| *a | b).collect()
    });
    // every variable not used on the X side belongs to the Y block
    let sy: Vec<bool> = x_side.iter().map(|b| !b).collect();
    let overlaps = |a: &Polynomial| support(a).iter().zip(&x_side).any(|(a, b)| *a && *b);
    if overlaps(f_y) || overlaps(h) {
        return Err(Error::precondition("variable blocks overlap"));
    }
    let fy1 = f_y.power(p - 1)?;
    if h.is_zero() || h.exact_div(&fy1).is_none() {
        return Err(Error::precondition("h is not a multiple of f_Y^(p-1)"));
    }
    let mut zs = vec![h.clone()];
    for _ in 1..gs.len() {
        let z = &fy1 * &partial_u(zs.last().unwrap(), &sy);
        zs.push(z);
    }
    if in_max_ideal_frobenius_power(zs.last().unwrap(), 1) {
        return Err(Error::precondition("the Y-side factor lies in m^[p]"));
    }
    let out: Vec<Polynomial> = gs.iter().zip(&zs).map(|(g, z)| g * z).collect();
    Ok(out)
}
