#![allow(dead_code)]

use std::collections::HashMap;

use matfac_core::cyclo::{CycloElem, CycloField};
use matfac_core::matfac::MatFac;
use matfac_core::matrix::{FieldMatrix, PolyMatrix};
use matfac_core::poly::{Polynomial, Ring};

pub fn ring(conductor: u32, vars: &[&str]) -> Ring {
    Ring::new(CycloField::new(conductor), vars).unwrap()
}

pub fn names(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("{prefix}{}", i % d)).collect()
}

pub fn rank_one(r: &Ring, entries: &[&str]) -> MatFac {
    let e: Vec<Polynomial> = entries.iter().map(|s| r.parse(s).unwrap()).collect();
    MatFac::rank_one(&e).unwrap()
}

/// `(v_1, ..., v_{d-1}, v_0)` in the variables `prefix1, ..., prefix0`.
pub fn row(r: &Ring, prefix: &str, d: usize) -> MatFac {
    let n = names(prefix, d);
    rank_one(r, &n.iter().map(String::as_str).collect::<Vec<_>>())
}

/// Ring over `ℚ(ζ_conductor)` with `x1..x0, y1..y0` for the given `d`.
pub fn xy_ring(conductor: u32, d: usize) -> Ring {
    let mut v = names("x", d);
    v.extend(names("y", d));
    Ring::new(CycloField::new(conductor), &v).unwrap()
}

/// A monomial factorization of `prefix1 ··· prefix0` of rank `n ∈ {1, 2}`:
/// the row itself, or the row plus its shift.
pub fn monomial_fixture(r: &Ring, prefix: &str, d: usize, n: usize) -> MatFac {
    let x = row(r, prefix, d);
    match n {
        1 => x,
        2 => x.direct_sum(&x.shift(1)).unwrap(),
        _ => unreachable!(),
    }
}

/// Determinant by Laplace expansion, always along the row with the fewest
/// nonzero entries, skipping zeros.
pub fn cofactor_det(m: &PolyMatrix) -> Polynomial {
    let n = m.rows();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    laplace(m, &rows, &cols)
}

fn laplace(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> Polynomial {
    if rows.is_empty() {
        return m.ring().one();
    }
    let nonzero = |r: usize| cols.iter().enumerate().filter(|(_, &c)| !m.get(r, c).is_zero()).count();
    let (pos, &r) = rows.iter().enumerate().min_by_key(|(_, &r)| nonzero(r)).unwrap();
    let rest_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
    let mut acc = m.ring().zero();
    for (cpos, &c) in cols.iter().enumerate() {
        let e = m.get(r, c);
        if e.is_zero() {
            continue;
        }
        let rest_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = laplace(m, &rest_rows, &rest_cols);
        let term = e.try_mul(&minor).unwrap();
        acc = if (pos + cpos) % 2 == 0 {
            acc.try_add(&term).unwrap()
        } else {
            acc.try_sub(&term).unwrap()
        };
    }
    acc
}

/// Determinant of a small field matrix by first-row expansion, memoized
/// on the set of remaining columns.
pub fn subset_det(a: &FieldMatrix) -> CycloElem {
    fn go(a: &FieldMatrix, row: usize, mask: u32, memo: &mut HashMap<u32, CycloElem>) -> CycloElem {
        let n = a.rows();
        if row == n {
            return a.field().one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc = a.field().zero();
        let mut sign_pos = 0;
        for c in 0..n {
            if mask & (1 << c) != 0 {
                continue;
            }
            let minor = go(a, row + 1, mask | (1 << c), memo);
            let term = a.get(row, c).try_mul(&minor).unwrap();
            acc = if sign_pos % 2 == 0 {
                acc.try_add(&term).unwrap()
            } else {
                acc.try_sub(&term).unwrap()
            };
            sign_pos += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    go(a, 0, 0, &mut HashMap::new())
}

/// `ζ_m^e` computed by repeated multiplication.
pub fn root_power(field: &CycloField, m: u32, e: i64) -> CycloElem {
    let z = field.primitive_root(m).unwrap();
    let e = e.rem_euclid(m as i64);
    (0..e).fold(field.one(), |acc, _| acc.try_mul(&z).unwrap())
}
