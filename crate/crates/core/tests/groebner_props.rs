mod common;

use proptest::prelude::*;
use qfsplit::frobenius::{frobenius_decompose, u_map};
use qfsplit::groebner::{
    buchberger, colon_ideal, frobenius_module_intersect_keru, ideal_equal, ideal_membership, module_normal_form,
    normal_form, ModuleOrder,
};
use qfsplit::{Ideal, Monomial, MonomialOrder, Polynomial, PrimeField, Ring, RingRef};

fn build(r: &RingRef, t: &[(Vec<u32>, u32)]) -> Polynomial {
    Polynomial::from_terms(r, t.iter().map(|(e, c)| (Monomial::from_slice(e), *c)))
}

fn poly(nvars: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Vec<(Vec<u32>, u32)>> {
    prop::collection::vec((prop::collection::vec(0..max_exp, nvars), 1u32..100), 1..max_terms)
}

fn ideal_gens(nvars: usize) -> impl Strategy<Value = Vec<Vec<(Vec<u32>, u32)>>> {
    prop::collection::vec(poly(nvars, 4, 3), 1..4)
}

/// S-polynomial under grevlex, computed from scratch.
fn s_poly(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let field = PrimeField::new(f.ring().p() as u64).unwrap();
    let (mf, cf) = f.leading_term().unwrap();
    let (mg, cg) = g.leading_term().unwrap();
    let l = mf.lcm(mg);
    let a = f.mul_term(&mf.quotient_of(&l), field.inv(*cf));
    let b = g.mul_term(&mg.quotient_of(&l), field.inv(*cg));
    &a - &b
}

fn check_gb(gb: &[Polynomial]) -> Result<(), TestCaseError> {
    for (i, f) in gb.iter().enumerate() {
        prop_assert_eq!(f.leading_term().unwrap().1, 1, "basis not monic");
        for g in &gb[i + 1..] {
            let s = s_poly(f, g);
            prop_assert!(normal_form(&s, gb, MonomialOrder::Grevlex).is_zero(), "S({f}, {g}) does not reduce to 0");
        }
    }
    Ok(())
}

/// Kernel of the `F_p`-linear map given by columns `cols` (sparse, keyed by monomial).
fn kernel(p: u32, cols: &[Vec<(Monomial, u32)>]) -> Vec<Vec<u32>> {
    let field = PrimeField::new(p as u64).unwrap();
    let mut rows: Vec<Monomial> = cols.iter().flatten().map(|(m, _)| m.clone()).collect();
    rows.sort_by(|a, b| a.exps().cmp(b.exps()));
    rows.dedup();
    let n = cols.len();
    let mut mat: Vec<Vec<u32>> = rows
        .iter()
        .map(|m| {
            (0..n)
                .map(|j| cols[j].iter().find(|(k, _)| k == m).map_or(0, |(_, c)| *c))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..mat.len()).find(|&k| mat[k][c] != 0) else {
            continue;
        };
        mat.swap(r, k);
        let inv = field.inv(mat[r][c]);
        for x in mat[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for k in 0..mat.len() {
            if k != r && mat[k][c] != 0 {
                let f = mat[k][c];
                for j in 0..n {
                    let v = field.mul(f, mat[r][j]);
                    mat[k][j] = field.sub(mat[k][j], v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; n];
            v[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(mat[row][fc]);
            }
            v
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn reduced_basis_is_canonical(p in prop::sample::select(vec![2u64, 3, 5]), gens in ideal_gens(3), seed in any::<u64>()) {
        let r = Ring::new(p, &["x", "y", "z"]).unwrap();
        let gens: Vec<Polynomial> = gens.iter().map(|g| build(&r, g)).filter(|g| !g.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let gb = buchberger(&gens, MonomialOrder::Grevlex).unwrap();
        check_gb(&gb)?;
        let mut shuffled = gens.clone();
        let k = shuffled.len();
        shuffled.rotate_left(seed as usize % k);
        if seed % 2 == 0 {
            shuffled.reverse();
        }
        // adding an element of the ideal must not change the reduced basis
        shuffled.push(&shuffled[0] * &Polynomial::var(&r, (seed % 3) as usize));
        prop_assert_eq!(buchberger(&shuffled, MonomialOrder::Grevlex).unwrap(), gb.clone());
        for g in &gens {
            prop_assert!(normal_form(g, &gb, MonomialOrder::Grevlex).is_zero());
        }
    }

    #[test]
    fn colon_matches_membership(gens in ideal_gens(3), j in poly(3, 3, 2), probes in prop::collection::vec(poly(3, 3, 3), 8)) {
        let r = Ring::new(2, &["x", "y", "z"]).unwrap();
        let a = Ideal::new(&r, gens.iter().map(|g| build(&r, g)).filter(|g| !g.is_zero()).collect());
        prop_assume!(!a.generators().is_empty());
        let jg = build(&r, &j);
        prop_assume!(!jg.is_zero());
        let b = Ideal::new(&r, vec![jg.clone()]);
        let colon = colon_ideal(&a, &b).unwrap();
        check_gb(colon.groebner_basis().unwrap())?;
        for g in colon.generators() {
            prop_assert!(ideal_membership(&(g * &jg), &a).unwrap());
        }
        for probe in &probes {
            let h = build(&r, probe);
            prop_assert_eq!(colon.contains(&h).unwrap(), a.contains(&(&h * &jg)).unwrap());
        }
        // (I : 1) = I
        let unit = Ideal::new(&r, vec![Polynomial::one(&r)]);
        prop_assert!(ideal_equal(&colon_ideal(&a, &unit).unwrap(), &a).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn keru_elimination_property(gens in prop::collection::vec(poly(2, 3, 3), 1..3)) {
        let r = Ring::new(2, &["x", "y"]).unwrap();
        let ideal = Ideal::new(&r, gens.iter().map(|g| build(&r, g)).filter(|g| !g.is_zero()).collect());
        prop_assume!(!ideal.generators().is_empty());
        let k = frobenius_module_intersect_keru(&ideal).unwrap();
        for v in &k {
            let h = v.reconstruct();
            prop_assert!(u_map(&h).is_zero());
            prop_assert!(ideal.contains(&h).unwrap());
        }
        // every element of I up to a degree bound killed by u lies in the module
        let mut products = Vec::new();
        for g in ideal.generators() {
            for e in (0..=2).flat_map(|d| common::degree_monomials(2, d)) {
                products.push(g.mul_term(&Monomial::from_slice(&e), 1));
            }
        }
        let cols: Vec<Vec<(Monomial, u32)>> = products.iter().map(|h| u_map(h).terms().to_vec()).collect();
        for coeffs in kernel(2, &cols) {
            let mut h = Polynomial::zero(&r);
            for (c, prod) in coeffs.iter().zip(&products) {
                h = &h + &prod.scale(*c);
            }
            let rem = module_normal_form(&frobenius_decompose(&h), &k, ModuleOrder::default());
            prop_assert!(rem.is_zero(), "{h} not in the kernel module");
        }
    }
}
