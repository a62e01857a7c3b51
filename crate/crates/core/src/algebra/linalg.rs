use super::coeff::{Coeff, Field};

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
/// Pivots are taken at the lowest available column index.
pub fn rref(rows: &[Vec<Coeff>]) -> (Vec<Vec<Coeff>>, Vec<usize>) {
    let mut m: Vec<Vec<Coeff>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let v = m[i][j].sub(&f.mul(&m[r][j]));
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Coeff>]) -> usize {
    rref(rows).1.len()
}

/// Inverse of a square matrix, `None` when singular.
pub fn invert(field: Field, a: &[Vec<Coeff>]) -> Option<Vec<Vec<Coeff>>> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let aug: Vec<Vec<Coeff>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Reduces `v` against rows already in reduced echelon form.
pub fn reduce(v: &[Coeff], basis: &[Vec<Coeff>], pivots: &[usize]) -> Vec<Coeff> {
    let mut v = v.to_vec();
    for (row, &p) in basis.iter().zip(pivots) {
        if !v[p].is_zero() {
            let f = v[p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x = x.sub(&f.mul(y));
            }
        }
    }
    v
}
