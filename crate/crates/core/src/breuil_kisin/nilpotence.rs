use serde::Serialize;

use super::BkSetup;
use crate::error::BkError;

/// A coordinate of `δ(x_i)` whose linear part survives modulo `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaWitness {
    pub var: usize,
    pub coord: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotenceReport {
    pub holds: bool,
    /// `p^{-1} σ̄` on `J/J²` modulo `p`; column `j` is the image of `x_j`.
    pub matrix: Vec<Vec<u64>>,
    pub nilpotency_index: Option<usize>,
    /// Linear parts of `δ(x_i)` at coordinate `r`: all zero when the
    /// condition holds, otherwise this names one that is not.
    pub delta_witness: Option<DeltaWitness>,
    pub delta_agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedTauData {
    pub n: usize,
    /// Labels `p^b x^c` with `1 <= |c| <= n+1`, `b + |c| = n+1`.
    pub basis: Vec<String>,
    /// Matrices over `F_p`, columns are images of basis vectors.
    pub gr_n: Vec<Vec<u64>>,
    pub gr_0: Vec<Vec<u64>>,
    pub pi_n: Vec<Vec<u64>>,
    pub in_filtration: bool,
    pub commutes: bool,
    pub vanishes_on_kernel: bool,
}

fn mat_mul(p: u64, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum::<u64>() % p).collect())
        .collect()
}

fn is_zero(m: &[Vec<u64>]) -> bool {
    m.iter().flatten().all(|x| *x == 0)
}

impl BkSetup {
    /// Linear part (coefficients of the `x_j`) of an element.
    fn linear_part(&self, x: &[u64]) -> Vec<u64> {
        let r = self.rank();
        (0..r)
            .map(|j| {
                let mut c = vec![0; r];
                c[j] = 1;
                self.mono_index(&c).map_or(0, |i| x[i])
            })
            .collect()
    }

    /// Whether `p^{-1} σ̄` on `J/J²` is nilpotent modulo `p`.
    pub fn nilpotence_condition(&self) -> Result<NilpotenceReport, BkError> {
        let p = self.p();
        let r = self.rank();
        let mut matrix = vec![vec![0; r]; r];
        for j in 0..r {
            let lin = self.linear_part(&self.sigma(&self.var(j)));
            for (i, c) in lin.iter().enumerate() {
                if c % p != 0 && self.spec.m > 1 {
                    return Err(BkError::DivisionFailure(1));
                }
                matrix[i][j] = if self.spec.m > 1 { (c / p) % p } else { 0 };
            }
        }
        let mut power = matrix.clone();
        let mut nilpotency_index = if is_zero(&power) { Some(1) } else { None };
        for k in 2..=r.max(1) {
            if nilpotency_index.is_some() {
                break;
            }
            power = mat_mul(p, &power, &matrix);
            if is_zero(&power) {
                nilpotency_index = Some(k);
            }
        }
        let holds = nilpotency_index.is_some() || r == 0;
        let mut delta_witness = None;
        for i in 0..r {
            let d = self.delta(&self.var(i), r + 1)?;
            if self.linear_part(d.coord(r)).iter().any(|c| c % p != 0) {
                delta_witness = Some(DeltaWitness { var: i, coord: r });
                break;
            }
        }
        let delta_agrees = holds == delta_witness.is_none();
        Ok(NilpotenceReport { holds, matrix, nilpotency_index, delta_witness, delta_agrees })
    }

    /// `gr_n(τ)` for `τ(x) = (σ(x) - x^p)/p` on `gr_n(J)` for the
    /// `(p, J)`-adic filtration, with the projections `π_n`.
    pub fn graded_tau(&self, n: usize) -> Result<GradedTauData, BkError> {
        if n + 2 > self.spec.a as usize || n + 2 > self.spec.m as usize {
            return Err(BkError::Setup(format!("graded τ at n = {n} needs a, m >= n + 2")));
        }
        let (gr_n, basis, in1) = self.graded_tau_matrix(n)?;
        let (gr_0, _, in0) = self.graded_tau_matrix(0)?;
        let r = self.rank();
        let p = self.p();
        let degs: Vec<(u32, Vec<u32>)> = self.graded_basis(n);
        let pi_n: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                degs.iter()
                    .map(|(b, c)| u64::from(*b as usize == n && c[i] == 1 && c.iter().sum::<u32>() == 1))
                    .collect()
            })
            .collect();
        let commutes = mat_mul(p, &gr_0, &pi_n) == mat_mul(p, &pi_n, &gr_n);
        let vanishes_on_kernel = degs
            .iter()
            .enumerate()
            .filter(|(_, (_, c))| c.iter().sum::<u32>() >= 2)
            .all(|(j, _)| gr_n.iter().all(|row| row[j] == 0));
        Ok(GradedTauData {
            n,
            basis,
            gr_n,
            gr_0,
            pi_n,
            in_filtration: in1 && in0,
            commutes,
            vanishes_on_kernel,
        })
    }

    fn graded_basis(&self, n: usize) -> Vec<(u32, Vec<u32>)> {
        let top = n as u32 + 1;
        self.monos
            .iter()
            .filter(|c| (1..=top).contains(&c.iter().sum::<u32>()))
            .map(|c| (top - c.iter().sum::<u32>(), c.clone()))
            .collect()
    }

    #[allow(clippy::type_complexity)]
    fn graded_tau_matrix(&self, n: usize) -> Result<(Vec<Vec<u64>>, Vec<String>, bool), BkError> {
        let ring = self.ring();
        let p = self.p();
        let basis = self.graded_basis(n);
        let labels = basis
            .iter()
            .map(|(b, c)| {
                let l = &ring.labels()[self.mono_index(c).expect("basis monomial")];
                if *b == 0 { l.clone() } else { format!("{}*{l}", p.pow(*b)) }
            })
            .collect();
        let top = n as u32 + 1;
        let mut in_filtration = true;
        let mut cols = Vec::with_capacity(basis.len());
        for (b, c) in &basis {
            let x = ring.scalar(&ring.basis_elem(self.mono_index(c).expect("basis monomial")), p.pow(*b) as i64);
            let diff = ring.sub(&self.sigma(&x), &ring.pow(&x, p));
            let tau = ring.div_p(&diff).ok_or(BkError::DivisionFailure(1))?;
            for (idx, mono) in self.monos.iter().enumerate() {
                let deg = mono.iter().sum::<u32>();
                if deg <= n as u32 && tau[idx] % p.pow(top - deg) != 0 {
                    in_filtration = false;
                }
            }
            cols.push(
                basis
                    .iter()
                    .map(|(b2, c2)| (tau[self.mono_index(c2).expect("basis monomial")] / p.pow(*b2)) % p)
                    .collect::<Vec<u64>>(),
            );
        }
        let rows = (0..basis.len()).map(|i| cols.iter().map(|col| col[i]).collect()).collect();
        Ok((rows, labels, in_filtration))
    }
}
