//! Sparse exact linear algebra for homogeneous systems.

use std::collections::BTreeMap;

use crate::cyclo::{CycloElem, CycloField};

pub type SparseRow = BTreeMap<usize, CycloElem>;

/// Homogeneous linear system kept in echelon form as equations arrive.
///
/// Every stored row has leading coefficient one at a column no other
/// stored row leads with.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    field: CycloField,
    nvars: usize,
    rows: BTreeMap<usize, SparseRow>,
}

fn axpy(row: &mut SparseRow, c: &CycloElem, other: &SparseRow) {
    for (&j, v) in other {
        let t = c * v;
        match row.get_mut(&j) {
            Some(e) => {
                *e = &*e + &t;
                if e.is_zero() {
                    row.remove(&j);
                }
            }
            None => {
                if !t.is_zero() {
                    row.insert(j, t);
                }
            }
        }
    }
}

impl SparseSystem {
    pub fn new(field: &CycloField, nvars: usize) -> SparseSystem {
        SparseSystem {
            field: field.clone(),
            nvars,
            rows: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Add the equation `Σ row[j] x_j = 0`; returns whether it was new
    /// information.
    pub fn add_equation(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, c)) = row.iter().next() else {
                return false;
            };
            match self.rows.get(&lead) {
                Some(piv) => {
                    let c = -c;
                    axpy(&mut row, &c, piv);
                }
                None => {
                    let inv = c.inverse().expect("nonzero leading coefficient");
                    for v in row.values_mut() {
                        *v = &*v * &inv;
                    }
                    self.rows.insert(lead, row);
                    return true;
                }
            }
        }
    }

    /// Basis of the solution space, one vector per free variable in
    /// increasing order.
    pub fn nullspace(&self) -> Vec<Vec<CycloElem>> {
        let free: Vec<usize> = (0..self.nvars)
            .filter(|j| !self.rows.contains_key(j))
            .collect();
        let mut out = Vec::with_capacity(free.len());
        for &f in &free {
            let mut x = vec![self.field.zero(); self.nvars];
            x[f] = self.field.one();
            for (&p, row) in self.rows.iter().rev() {
                if p > f {
                    continue;
                }
                let mut s = self.field.zero();
                for (&j, v) in row.range(p + 1..) {
                    if !x[j].is_zero() {
                        s = &s + &(v * &x[j]);
                    }
                }
                x[p] = -s;
            }
            out.push(x);
        }
        out
    }

    /// Whether `x` satisfies every equation.
    pub fn satisfied_by(&self, x: &[CycloElem]) -> bool {
        self.rows.values().all(|row| {
            let mut s = self.field.zero();
            for (&j, v) in row {
                s = &s + &(v * &x[j]);
            }
            s.is_zero()
        })
    }
}
