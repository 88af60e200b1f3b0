//! Height of graded Calabi–Yau complete intersections from a single coefficient.
//!
//! With `f = f'_1 ⋯ f'_m`, `δ = Δ₁(f^{p-1})` and
//! `f_n = f^{p-1} δ^{1 + p + ... + p^{n-2}}`, the coefficient of
//! `(x_1 ⋯ x_N)^{p^n - 1}` in `f_n` equals the constant `a_n` obtained from
//! `a_1 = f^{p-1}`, `a_{k+1} = θ(F_*a_k)`, read at `(x_1 ⋯ x_N)^{p-1}`. Every `a_k`
//! has degree `(p-1) Σ deg x_i`, so iterating `θ` never grows the degree.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::frobenius::ThetaOperator;
use crate::grading::{check_homogeneous, Grading};
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::witt::delta1;

use super::chain::product;

/// Result of the coefficient iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyOutcome {
    /// First level with a nonzero coefficient, and that coefficient.
    Finite { level: u32, coefficient: u32 },
    /// Every level up to the cutoff vanished. `exhausted` is set when the
    /// iterates became zero or periodic, so no later level can be nonzero.
    Vanishing { cutoff: u32, exhausted: bool },
}

/// Check homogeneity and `Σ deg f'_i = Σ deg x_i`.
pub fn check_calabi_yau(gens: &[Polynomial], grading: &Grading) -> Result<()> {
    let Some(first) = gens.first() else {
        return Err(Error::precondition("no generators"));
    };
    let mut total = vec![0u64; grading.nrows()];
    for g in gens {
        if g.is_zero() {
            return Err(Error::precondition("zero generator"));
        }
        let d = check_homogeneous(g, grading)?;
        for (t, x) in total.iter_mut().zip(d) {
            *t += x;
        }
    }
    let want = grading.variable_degree_sum();
    if total != want {
        return Err(Error::precondition(format!(
            "degree {total:?} of the generators differs from the variable degree sum {want:?}"
        )));
    }
    let _ = first;
    Ok(())
}

fn top_monomial(nvars: usize, e: u32) -> Monomial {
    Monomial::from_slice(&vec![e; nvars])
}

/// Run the `θ`-iteration up to `n_max` levels.
pub fn cy_iterate(gens: &[Polynomial], grading: &Grading, n_max: u32) -> Result<CyOutcome> {
    check_calabi_yau(gens, grading)?;
    let ring = gens[0].ring();
    let p = ring.p();
    let target = top_monomial(ring.nvars(), p - 1);
    let f = product(ring, gens);
    let mut a = f.power(p as u64 - 1)?;
    let c = a.coefficient_of(&target);
    if c != 0 {
        return Ok(CyOutcome::Finite {
            level: 1,
            coefficient: c,
        });
    }
    let theta = ThetaOperator::new(&delta1(&a));
    let mut seen: HashSet<Polynomial> = HashSet::new();
    for level in 2..=n_max {
        seen.insert(a.clone());
        a = theta.apply(&a);
        let c = a.coefficient_of(&target);
        if c != 0 {
            return Ok(CyOutcome::Finite {
                level,
                coefficient: c,
            });
        }
        if a.is_zero() || seen.contains(&a) {
            return Ok(CyOutcome::Vanishing {
                cutoff: n_max,
                exhausted: true,
            });
        }
    }
    Ok(CyOutcome::Vanishing {
        cutoff: n_max,
        exhausted: false,
    })
}

/// `f_n` truncated to exponents at most `p^n - 1`, built as
/// `f^{p-1} · δ · δ^p ⋯ δ^{p^{n-2}}` with capped products.
pub fn capped_f_n(gens: &[Polynomial], n: u32) -> Result<Polynomial> {
    let ring = gens[0].ring();
    let p = ring.p() as u64;
    let q = p
        .checked_pow(n)
        .filter(|q| *q <= u32::MAX as u64)
        .ok_or(Error::ExponentOverflow(u64::MAX))?;
    let cap = vec![(q - 1) as u32; ring.nvars()];
    let f = product(ring, gens);
    let fp1 = f.power(p - 1)?;
    let delta = delta1(&fp1);
    let mut acc = fp1.truncate(&cap);
    for k in 0..n.saturating_sub(1) {
        if acc.is_zero() {
            break;
        }
        let factor = delta.truncate(&shrink(&cap, p, k)).frobenius(k);
        acc = acc.capped_multiply(&factor, &cap)?;
    }
    Ok(acc)
}

// δ^{p^k} only contributes terms with exponents below cap / p^k
fn shrink(cap: &[u32], p: u64, k: u32) -> Vec<u32> {
    let d = p.pow(k);
    cap.iter().map(|&c| (c as u64 / d) as u32).collect()
}

/// Coefficient of `(x_1 ⋯ x_N)^{p^n - 1}` in `f_n` via the capped product.
pub fn capped_coefficient(gens: &[Polynomial], n: u32) -> Result<u32> {
    let ring = gens[0].ring();
    let q = (ring.p() as u64).pow(n) as u32;
    Ok(capped_f_n(gens, n)?.coefficient_of(&top_monomial(ring.nvars(), q - 1)))
}

/// Re-check a coefficient witness: levels below `level` vanish and `level` gives `coefficient`.
pub fn verify_coefficient_witness(
    gens: &[Polynomial],
    grading: &Grading,
    level: u32,
    coefficient: u32,
) -> Result<bool> {
    check_calabi_yau(gens, grading)?;
    if coefficient == 0 || level == 0 {
        return Ok(false);
    }
    for n in 1..level {
        if capped_coefficient(gens, n)? != 0 {
            return Ok(false);
        }
    }
    Ok(capped_coefficient(gens, level)? == coefficient)
}
