//! Square matrices over a frame ring, entries compared at common precision.

use crate::frames::{Frame, SElem};

pub type SMatrix = Vec<Vec<SElem>>;

pub fn identity(f: &Frame, h: usize) -> SMatrix {
    (0..h)
        .map(|i| (0..h).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect()
}

pub fn zeros(f: &Frame, rows: usize, cols: usize) -> SMatrix {
    vec![vec![f.zero(); cols]; rows]
}

pub fn mul(f: &Frame, a: &SMatrix, b: &SMatrix) -> SMatrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(f.zero(), |acc, (x, brow)| f.add(&acc, &f.mul(x, &brow[j])))
                })
                .collect()
        })
        .collect()
}

pub fn sub(f: &Frame, a: &SMatrix, b: &SMatrix) -> SMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| f.sub(x, y)).collect())
        .collect()
}

pub fn add(f: &Frame, a: &SMatrix, b: &SMatrix) -> SMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| f.add(x, y)).collect())
        .collect()
}

pub fn map(a: &SMatrix, op: impl Fn(&SElem) -> SElem) -> SMatrix {
    a.iter().map(|r| r.iter().map(&op).collect()).collect()
}

pub fn scale(f: &Frame, c: &SElem, a: &SMatrix) -> SMatrix {
    map(a, |x| f.mul(c, x))
}

pub fn transpose(a: &SMatrix) -> SMatrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn equal(f: &Frame, a: &SMatrix, b: &SMatrix) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(r, s)| r.len() == s.len() && r.iter().zip(s).all(|(x, y)| f.eq(x, y)))
}

pub fn is_identity(f: &Frame, a: &SMatrix) -> bool {
    equal(f, a, &identity(f, a.len()))
}

/// `b_{ij} = a_{perm(i), perm(j)}`.
pub fn permute(a: &SMatrix, perm: &[usize]) -> SMatrix {
    perm.iter().map(|i| perm.iter().map(|j| a[*i][*j].clone()).collect()).collect()
}

/// Scales column `j` by `c_j`.
pub fn scale_columns(f: &Frame, a: &SMatrix, c: &[SElem]) -> SMatrix {
    a.iter()
        .map(|r| r.iter().zip(c).map(|(x, s)| f.mul(x, s)).collect())
        .collect()
}

/// Scales row `i` by `c_i`.
pub fn scale_rows(f: &Frame, a: &SMatrix, c: &[SElem]) -> SMatrix {
    a.iter()
        .zip(c)
        .map(|(r, s)| r.iter().map(|x| f.mul(s, x)).collect())
        .collect()
}

/// Gauss–Jordan with unit pivots; `S` is local, so this finds the inverse
/// whenever one exists.
pub fn inverse(f: &Frame, a: &SMatrix) -> Option<SMatrix> {
    let h = a.len();
    let mut m: SMatrix = a.clone();
    let mut inv = identity(f, h);
    for c in 0..h {
        let r = (c..h).find(|r| f.is_unit(&m[*r][c]))?;
        m.swap(c, r);
        inv.swap(c, r);
        let s = f.inv(&m[c][c])?;
        m[c] = m[c].iter().map(|x| f.mul(&s, x)).collect();
        inv[c] = inv[c].iter().map(|x| f.mul(&s, x)).collect();
        for r in 0..h {
            if r != c && !f.is_zero(&m[r][c]) {
                let k = m[r][c].clone();
                let (pm, pi) = (m[c].clone(), inv[c].clone());
                m[r] = m[r].iter().zip(&pm).map(|(x, y)| f.sub(x, &f.mul(&k, y))).collect();
                inv[r] = inv[r].iter().zip(&pi).map(|(x, y)| f.sub(x, &f.mul(&k, y))).collect();
            }
        }
    }
    Some(inv)
}

/// Invertibility, decided on residues.
pub fn is_invertible(f: &Frame, a: &SMatrix) -> bool {
    let k = f.ring().residue_field();
    let mut m: Vec<Vec<_>> = a.iter().map(|r| r.iter().map(|x| f.residue(x)).collect()).collect();
    let h = m.len();
    for c in 0..h {
        let Some(r) = (c..h).find(|r| !k.is_zero(&m[*r][c])) else {
            return false;
        };
        m.swap(c, r);
        let s = k.inv(&m[c][c]).expect("field");
        for r in c + 1..h {
            let t = k.mul(&m[r][c], &s);
            m[r] = m[r].iter().zip(&m[c]).map(|(x, y)| k.sub(x, &k.mul(&t, y))).collect();
        }
    }
    true
}

pub fn to_json(a: &SMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        a.iter().map(|r| serde_json::Value::Array(r.iter().map(|x| x.to_json()).collect())).collect(),
    )
}
