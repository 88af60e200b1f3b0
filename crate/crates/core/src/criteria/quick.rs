//! Cheap monomial tests: F-splitting and two sufficient conditions for `sht = ∞`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frobenius::in_max_ideal_frobenius_power;
use crate::groebner::Ideal;
use crate::poly::Polynomial;
use crate::witt::delta1;

use super::chain::product;

/// Which sufficient condition for non-quasi-F-splitness fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonQfsTest {
    /// `f^{p-2} ∈ m^{[p]}`.
    #[serde(rename = "f^(p-2) in m^[p]")]
    PowerInBracket,
    /// `(f^{p-2}, I^{[p]}) f^{p(p-2)} Δ₁(f) ⊆ m^{[p^2]}` and `f^{p-1} ∈ m^{[p]}`.
    #[serde(rename = "delta-product")]
    DeltaProduct,
    /// The stabilized `I_∞` lies in `m^{[p]}`.
    #[serde(rename = "I_inf in m^[p]")]
    FixedPoint,
}

impl NonQfsTest {
    pub fn tag(self) -> &'static str {
        match self {
            NonQfsTest::PowerInBracket => "f^(p-2) in m^[p]",
            NonQfsTest::DeltaProduct => "delta-product",
            NonQfsTest::FixedPoint => "I_inf in m^[p]",
        }
    }
}

/// `I_1 ⊄ m^{[p]}`. Each `f'_i^p` already lies in `m^{[p]}`, so only `f^{p-1}` matters.
pub fn fedder_fsplit(ideal: &Ideal) -> Result<bool> {
    let ring = ideal.ring();
    let f = product(ring, ideal.generators());
    let fp1 = f.power(ring.p() as u64 - 1)?;
    Ok(!in_max_ideal_frobenius_power(&fp1, 1))
}

/// The first of the two monomial tests that applies, if any.
pub fn non_qfs_quick(gens: &[Polynomial]) -> Result<Option<NonQfsTest>> {
    let Some(first) = gens.first() else {
        return Ok(None);
    };
    let ring = first.ring();
    let p = ring.p() as u64;
    let f = product(ring, gens);
    // f^{p-2} = 1 when p = 2, which is never in m^{[p]}
    let fp2 = f.power(p - 2)?;
    if p >= 3 && in_max_ideal_frobenius_power(&fp2, 1) {
        return Ok(Some(NonQfsTest::PowerInBracket));
    }
    if !in_max_ideal_frobenius_power(&(&fp2 * &f), 1) {
        return Ok(None);
    }
    let cap = vec![(p * p - 1) as u32; ring.nvars()];
    let tail = fp2
        .frobenius(1)
        .truncate(&cap)
        .capped_multiply(&delta1(&f).truncate(&cap), &cap)?;
    if tail.is_zero() {
        return Ok(Some(NonQfsTest::DeltaProduct));
    }
    let mut left = vec![fp2];
    left.extend(gens.iter().map(|g| g.frobenius(1)));
    for a in &left {
        if !a.truncate(&cap).capped_multiply(&tail, &cap)?.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(NonQfsTest::DeltaProduct))
}

/// Re-run one named test with untruncated factors.
pub fn check_non_qfs_test(gens: &[Polynomial], test: NonQfsTest) -> Result<bool> {
    let ring = gens[0].ring();
    let p = ring.p() as u64;
    let f = product(ring, gens);
    match test {
        NonQfsTest::PowerInBracket => Ok(p >= 3 && in_max_ideal_frobenius_power(&f.power(p - 2)?, 1)),
        NonQfsTest::DeltaProduct => {
            if !in_max_ideal_frobenius_power(&f.power(p - 1)?, 1) {
                return Ok(false);
            }
            let fp2 = f.power(p - 2)?;
            let tail = &fp2.frobenius(1) * &delta1(&f);
            let mut left = vec![fp2];
            left.extend(gens.iter().map(|g| g.frobenius(1)));
            Ok(left
                .iter()
                .all(|a| in_max_ideal_frobenius_power(&(a * &tail), 2)))
        }
        // needs the chain; see verify_infinity_certificate
        NonQfsTest::FixedPoint => Ok(false),
    }
}
