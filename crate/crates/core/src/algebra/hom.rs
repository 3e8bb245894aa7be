use std::sync::Arc;

use crate::error::AlgebraError;
use crate::modular::{smith, Matrix, Zpm};

use super::{CoverRecipe, Elem, FiniteAlgebra, Ideal};

/// A ring homomorphism given by the images of the source basis.
#[derive(Clone, Debug)]
pub struct AlgebraHom {
    source: Arc<FiniteAlgebra>,
    target: Arc<FiniteAlgebra>,
    images: Vec<Elem>,
}

impl AlgebraHom {
    pub fn new(
        source: &Arc<FiniteAlgebra>,
        target: &Arc<FiniteAlgebra>,
        images: Vec<Elem>,
    ) -> Result<AlgebraHom, AlgebraError> {
        if images.len() != source.rank() {
            return Err(AlgebraError::NotAHom("wrong number of images".into()));
        }
        let images: Vec<Elem> = images.iter().map(|x| target.normalize(x)).collect();
        let hom = AlgebraHom { source: source.clone(), target: target.clone(), images };
        hom.verify()?;
        Ok(hom)
    }

    pub fn identity(ring: &Arc<FiniteAlgebra>) -> AlgebraHom {
        let images = (0..ring.rank()).map(|i| ring.basis_elem(i)).collect();
        AlgebraHom { source: ring.clone(), target: ring.clone(), images }
    }

    fn verify(&self) -> Result<(), AlgebraError> {
        let (s, t) = (&self.source, &self.target);
        if self.apply(&s.one()) != t.one() {
            return Err(AlgebraError::NotAHom("1 is not sent to 1".into()));
        }
        for i in 0..s.rank() {
            let killed = t.scalar(&self.images[i], s.order_modulus(i) as i64);
            if !t.is_zero(&killed) {
                return Err(AlgebraError::NotAHom(format!(
                    "additive order of {}",
                    s.labels[i]
                )));
            }
            for j in 0..s.rank() {
                let lhs = self.apply(&s.mul(&s.basis_elem(i), &s.basis_elem(j)));
                let rhs = t.mul(&self.images[i], &self.images[j]);
                if lhs != rhs {
                    return Err(AlgebraError::NotAHom(format!(
                        "product of {} and {}",
                        s.labels[i], s.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        &self.target
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn apply(&self, x: &[u64]) -> Elem {
        self.target.combine(x, &self.images)
    }

    pub fn compose(&self, after: &AlgebraHom) -> AlgebraHom {
        let images = self.images.iter().map(|x| after.apply(x)).collect();
        AlgebraHom { source: self.source.clone(), target: after.target.clone(), images }
    }

    /// A set-theoretic section of a surjective hom, additive on the basis.
    pub fn section(&self) -> Option<Vec<Elem>> {
        let s = &self.source;
        let t = &self.target;
        let z = s.zpm().max_with(t.zpm());
        let mut rows: Matrix = self.images.clone();
        rows.extend(t.order_relations());
        let nrows = rows.len();
        let mut out = Vec::with_capacity(t.rank());
        for j in 0..t.rank() {
            let x = crate::modular::solve_particular(&z, &rows, nrows, t.rank(), &t.basis_elem(j))?;
            out.push(s.normalize(&x[..s.rank()]));
        }
        Some(out)
    }
}

impl Zpm {
    pub(crate) fn max_with(&self, other: &Zpm) -> Zpm {
        if self.exp() >= other.exp() {
            self.clone()
        } else {
            other.clone()
        }
    }
}

/// Inverse of an invertible square matrix over `Z/p^m`.
pub(crate) fn mat_inverse(z: &Zpm, a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<u64> = r.iter().map(|x| x % z.modulus()).collect();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| z.is_unit(m[r][c]))?;
        m.swap(c, piv);
        let inv = z.inv(m[c][c])?;
        for x in m[c].iter_mut() {
            *x = z.mul(*x, inv);
        }
        for r in 0..n {
            if r != c && m[r][c] != 0 {
                let q = m[r][c];
                let pivot_row = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x = z.sub(*x, z.mul(q, *y));
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl FiniteAlgebra {
    /// `R/I` together with the projection `R -> R/I`. The ideal must lie in
    /// the nilradical so that the quotient keeps the residue field.
    pub fn quotient(
        ring: &Arc<FiniteAlgebra>,
        ideal: &Ideal,
    ) -> Result<(Arc<FiniteAlgebra>, AlgebraHom), AlgebraError> {
        let nil = ring.nilradical();
        for g in ideal.basis() {
            if !nil.contains(ring, &g) {
                return Err(AlgebraError::NotAdmissible(
                    "quotient by an ideal containing a unit".into(),
                ));
            }
        }
        let z = ring.zpm().clone();
        let n = ring.rank();
        let mut rels = ring.order_relations();
        rels.extend(ideal.basis());
        let nrel = rels.len();
        let snf = smith(&z, &rels, nrel, n);
        let right_inv = mat_inverse(&z, &snf.right).expect("Smith transform is invertible");
        let keep: Vec<(usize, u32)> = (0..n)
            .map(|j| (j, snf.diag.get(j).map_or(z.exp(), |d| z.val(*d))))
            .filter(|(_, e)| *e > 0)
            .collect();
        let orders: Vec<u32> = keep.iter().map(|(_, e)| *e).collect();
        let project = |x: &[u64]| -> Elem {
            let y = crate::modular::vec_mat(&z, x, &snf.right, n);
            keep.iter()
                .map(|(j, e)| y[*j] % ring.p().pow(*e))
                .collect()
        };
        let section: Vec<Elem> = keep
            .iter()
            .map(|(j, _)| ring.normalize(&right_inv[*j]))
            .collect();
        let projection: Matrix = (0..n).map(|i| project(&ring.basis_elem(i))).collect();
        let rank = keep.len();
        let table: Vec<Vec<Elem>> = (0..rank)
            .map(|a| {
                (0..rank)
                    .map(|b| project(&ring.mul(&section[a], &section[b])))
                    .collect()
            })
            .collect();
        let labels: Vec<String> = section
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let nz: Vec<usize> = (0..n).filter(|i| s[*i] != 0).collect();
                if nz.len() == 1 && z.is_unit(s[nz[0]]) && s[nz[0]] == 1 {
                    ring.labels[nz[0]].clone()
                } else {
                    format!("b{j}")
                }
            })
            .collect();
        let one = project(&ring.one());
        let residue: Matrix = section.iter().map(|s| ring.residue(s)).collect();
        let lift: Matrix = ring.lift.iter().map(|l| project(l)).collect();
        let recipe = CoverRecipe::Quotient {
            parent: ring.clone(),
            projection: projection.clone(),
            section: section.clone(),
        };
        let gens: Vec<String> = ideal.gens().iter().map(|g| ring.format(g)).collect();
        let name = format!("{}/({})", ring.name, gens.join(", "));
        let q = FiniteAlgebra::from_parts(
            ring.params,
            labels,
            orders,
            table,
            one,
            Some(ring.residue_field()),
            residue,
            lift,
            Vec::new(),
            recipe,
            name,
        )?;
        let q = Arc::new(q);
        q.check_admissible()?;
        let hom = AlgebraHom::new(ring, &q, projection)?;
        Ok((q, hom))
    }
}
