use std::sync::Arc;

use crate::error::AlgebraError;

use super::{Elem, FiniteAlgebra, Ideal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PdKind {
    /// `b^2 = 0` and `gamma_n = 0` for `n >= 2`.
    TrivialSquareZero,
    /// `b^p = 0` and `gamma_n(x) = x^n / n!` for `n < p`.
    NilpotentTruncated,
    /// `b = pR` and `gamma_n(py) = (p^n / n!) y^n`.
    CanonicalOnPR,
}

impl PdKind {
    pub fn name(self) -> &'static str {
        match self {
            PdKind::TrivialSquareZero => "trivial-square-zero",
            PdKind::NilpotentTruncated => "nilpotent-truncated",
            PdKind::CanonicalOnPR => "canonical-on-pR",
        }
    }
}

/// Divided powers on an ideal of a finite ring.
#[derive(Clone, Debug)]
pub struct DividedPowerStructure {
    ideal: Ideal,
    kind: PdKind,
}

impl DividedPowerStructure {
    pub fn new(ideal: Ideal, kind: PdKind) -> Result<Self, AlgebraError> {
        let ring = ideal.ring().clone();
        let p = ring.p() as u32;
        let ok = match kind {
            PdKind::TrivialSquareZero => ideal.pow(2).is_zero(),
            PdKind::NilpotentTruncated => ideal.pow(p).is_zero(),
            PdKind::CanonicalOnPR => ideal.same_as(&Ideal::p_ideal(&ring)),
        };
        if !ok {
            return Err(AlgebraError::BadPD(format!(
                "{} requirements fail on the given ideal",
                kind.name()
            )));
        }
        Ok(DividedPowerStructure { ideal, kind })
    }

    /// The canonical divided powers on `pR`.
    pub fn canonical(ring: &Arc<FiniteAlgebra>) -> Self {
        DividedPowerStructure { ideal: Ideal::p_ideal(ring), kind: PdKind::CanonicalOnPR }
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn ring(&self) -> &Arc<FiniteAlgebra> {
        self.ideal.ring()
    }

    pub fn kind(&self) -> PdKind {
        self.kind
    }

    /// Whether some `gamma_p` iteration terminates on every element, which is
    /// what makes `W~(b)` equal to the finite-support part.
    pub fn is_nilpotent(&self) -> bool {
        match self.kind {
            PdKind::TrivialSquareZero | PdKind::NilpotentTruncated => true,
            PdKind::CanonicalOnPR => self.ideal.is_zero(),
        }
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.ideal.contains(x)
    }

    pub fn gamma(&self, n: u64, x: &[u64]) -> Result<Elem, AlgebraError> {
        let ring = self.ring();
        if !self.ideal.contains(x) {
            return Err(AlgebraError::NotInIdeal);
        }
        match n {
            0 => return Ok(ring.one()),
            1 => return Ok(x.to_vec()),
            _ => {}
        }
        let p = ring.p();
        let z = ring.zpm();
        match self.kind {
            PdKind::TrivialSquareZero => Ok(ring.zero()),
            PdKind::NilpotentTruncated => {
                if n >= p {
                    return Ok(ring.zero());
                }
                let fact = (1..=n).fold(1u64, |a, i| z.mul(a, i));
                let inv = z.inv(fact).ok_or(AlgebraError::UnsupportedPD { kind: self.kind.name(), n })?;
                Ok(ring.scalar(&ring.pow(x, n), inv as i64))
            }
            PdKind::CanonicalOnPR => {
                let y = ring.div_p(x).ok_or(AlgebraError::NotInIdeal)?;
                let c = p_power_over_factorial(z.p(), z.modulus(), n);
                Ok(ring.scalar(&ring.pow(&y, n), c as i64))
            }
        }
    }
}

/// `p^n / n!` reduced modulo `modulus` (a power of `p`); it is a `p`-integer.
pub fn p_power_over_factorial(p: u64, modulus: u64, n: u64) -> u64 {
    let mut val: u64 = 0;
    let mut unit: u128 = 1;
    let m = modulus as u128;
    for i in 1..=n {
        let mut j = i;
        while j % p == 0 {
            j /= p;
            val += 1;
        }
        unit = unit * (j as u128 % m) % m;
    }
    let e = n - val;
    let mut pe: u128 = 1 % m;
    for _ in 0..e {
        pe = pe * p as u128 % m;
        if pe == 0 {
            return 0;
        }
    }
    let inv = inv_mod(unit as u64, modulus);
    (pe * inv as u128 % m) as u64
}

fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (m as i128, a as i128 % m as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m as i128) as u64
}
