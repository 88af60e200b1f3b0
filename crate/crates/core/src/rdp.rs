//! Heights of the non-taut rational double points in characteristics 2, 3 and 5.

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{height, HeightOptions, Verdict};
use crate::error::Result;
use crate::groebner::Ideal;
use crate::parse::parse_polynomial;
use crate::poly::Ring;

/// One row of the table with its expected height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RdpRow {
    pub p: u32,
    /// `D_{2n}^r`, `E_8^1`, ...
    pub kind: String,
    pub polynomial: String,
    pub expected: u32,
}

/// `⌈log₂ k⌉ + 1`.
pub fn d_height(k: u32) -> u32 {
    assert!(k >= 1);
    (u32::BITS - (k - 1).leading_zeros()) + 1
}

fn d_rows(n_bound: u32) -> Vec<RdpRow> {
    let mut rows = Vec::new();
    for n in 2..=n_bound {
        for r in 0..n {
            let (even, odd) = if r == 0 {
                (format!("z^2+x^2*y+x*y^{n}"), format!("z^2+x^2*y+y^{n}*z"))
            } else {
                (
                    format!("z^2+x^2*y+x*y^{n}+x*y^{}*z", n - r),
                    format!("z^2+x^2*y+y^{n}*z+x*y^{}*z", n - r),
                )
            };
            rows.push(RdpRow {
                p: 2,
                kind: format!("D_{}^{r}", 2 * n),
                polynomial: even,
                expected: d_height(n - r),
            });
            rows.push(RdpRow {
                p: 2,
                kind: format!("D_{}^{r}", 2 * n + 1),
                polynomial: odd,
                expected: d_height(n - r),
            });
        }
    }
    rows
}

const E_ROWS: &[(u32, &str, &str, u32)] = &[
    (2, "E_6^0", "z^2+x^3+y^2*z", 2),
    (2, "E_6^1", "z^2+x^3+y^2*z+x*y*z", 1),
    (2, "E_7^0", "z^2+x^3+x*y^3", 4),
    (2, "E_7^1", "z^2+x^3+x*y^3+x^2*y*z", 3),
    (2, "E_7^2", "z^2+x^3+x*y^3+y^3*z", 2),
    (2, "E_7^3", "z^2+x^3+x*y^3+x*y*z", 1),
    (2, "E_8^0", "z^2+x^3+y^5", 4),
    (2, "E_8^1", "z^2+x^3+y^5+x*y^3*z", 4),
    (2, "E_8^2", "z^2+x^3+y^5+x*y^2*z", 3),
    (2, "E_8^3", "z^2+x^3+y^5+y^3*z", 2),
    (2, "E_8^4", "z^2+x^3+y^5+x*y*z", 1),
    (3, "E_6^0", "z^2+x^3+y^4", 2),
    (3, "E_6^1", "z^2+x^3+y^4+x^2*y^2", 1),
    (3, "E_7^0", "z^2+x^3+x*y^3", 2),
    (3, "E_7^1", "z^2+x^3+x*y^3+x^2*y^2", 1),
    (3, "E_8^0", "z^2+x^3+y^5", 3),
    (3, "E_8^1", "z^2+x^3+y^5+x^2*y^3", 2),
    (3, "E_8^2", "z^2+x^3+y^5+x^2*y^2", 1),
    (5, "E_8^0", "z^2+x^3+y^5", 2),
    (5, "E_8^1", "z^2+x^3+y^5+x*y^4", 1),
];

/// All rows for the primes in `primes`, with the `D` families for `2 ≤ n ≤ n_bound`.
pub fn rdp_rows(primes: &[u32], n_bound: u32) -> Vec<RdpRow> {
    let mut rows = Vec::new();
    if primes.contains(&2) {
        rows.extend(d_rows(n_bound));
    }
    rows.extend(
        E_ROWS
            .iter()
            .filter(|r| primes.contains(&r.0))
            .map(|&(p, kind, poly, expected)| RdpRow {
                p,
                kind: kind.to_string(),
                polynomial: poly.to_string(),
                expected,
            }),
    );
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct RdpOutcome {
    #[serde(flatten)]
    pub row: RdpRow,
    pub computed: String,
    pub matches: bool,
}

/// Compute every row through the height orchestrator, in parallel, keeping row order.
pub fn rdp_table(primes: &[u32], n_bound: u32) -> Result<Vec<RdpOutcome>> {
    rdp_rows(primes, n_bound)
        .into_par_iter()
        .map(|row| {
            let ring = Ring::new(row.p as u64, &["x", "y", "z"])?;
            let f = parse_polynomial(&row.polynomial, &ring)?;
            let n_max = (row.expected + 2).max(crate::criteria::DEFAULT_N_MAX);
            let res = height(&Ideal::new(&ring, vec![f]), None, HeightOptions { n_max, cross_check: false })?;
            Ok(RdpOutcome {
                matches: res.verdict == Verdict::Finite(row.expected),
                computed: res.verdict.to_string(),
                row,
            })
        })
        .collect()
}

pub fn render_markdown(rows: &[RdpOutcome]) -> String {
    let mut s = String::from("| p | type | f | expected | computed | match |\n|---|---|---|---|---|---|\n");
    for r in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            r.row.p,
            r.row.kind,
            r.row.polynomial,
            r.row.expected,
            r.computed,
            if r.matches { "yes" } else { "NO" }
        ));
    }
    s
}

pub fn render_csv(rows: &[RdpOutcome]) -> String {
    let mut s = String::from("p,type,f,expected,computed,match\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.row.p, r.row.kind, r.row.polynomial, r.row.expected, r.computed, r.matches
        ));
    }
    s
}
