//! Multigradings `deg_W(x^e) = W e` with a nonnegative weight matrix `W`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::poly::Polynomial;

/// An `m x N` weight matrix; column `i` is the multidegree of `x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    rows: Vec<Vec<u32>>,
}

impl Grading {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidGrading("no rows".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGrading("rows have different lengths".into()));
        }
        for i in 0..n {
            if rows.iter().all(|r| r[i] == 0) {
                return Err(Error::InvalidGrading(format!("variable {} has degree zero", i + 1)));
            }
        }
        Ok(Grading { rows })
    }

    pub fn standard(nvars: usize) -> Self {
        Grading {
            rows: vec![vec![1; nvars]],
        }
    }

    pub fn weighted(weights: &[u32]) -> Result<Self> {
        Grading::new(vec![weights.to_vec()])
    }

    /// Parse `"1,1,1|0,0,1"`; rows are separated by `|` or `;`, entries by commas.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .split(['|', ';'])
            .map(|row| {
                row.split(',')
                    .map(|e| {
                        e.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::InvalidGrading(format!("bad entry `{}`", e.trim())))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Grading::new(rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn nvars(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn degree(&self, mono: &Monomial) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(mono.exps()).map(|(w, e)| *w as u64 * *e as u64).sum())
            .collect()
    }

    /// `sum_i deg_W(x_i)`, the degree of `x_1 ... x_N`.
    pub fn variable_degree_sum(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.iter().map(|&w| w as u64).sum()).collect()
    }
}

/// Common `W`-degree of every term of `a`; the zero polynomial has degree zero.
pub fn check_homogeneous(a: &Polynomial, g: &Grading) -> Result<Vec<u64>> {
    if g.nvars() != a.ring().nvars() {
        return Err(Error::InvalidGrading(format!(
            "grading has {} columns but the ring has {} variables",
            g.nvars(),
            a.ring().nvars()
        )));
    }
    let mut terms = a.terms().iter();
    let Some((first, _)) = terms.next() else {
        return Ok(vec![0; g.nrows()]);
    };
    let deg = g.degree(first);
    for (m, _) in terms {
        if g.degree(m) != deg {
            let show = |m: &Monomial| Polynomial::term(a.ring(), m.clone(), 1).to_string();
            return Err(Error::Inhomogeneous {
                first: show(first),
                second: show(m),
            });
        }
    }
    Ok(deg)
}
