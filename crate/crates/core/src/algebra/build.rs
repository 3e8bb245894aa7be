use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::modular::{Matrix, Zpm};

use super::{CoverRecipe, Elem, FiniteAlgebra, PrimeParams};

/// Coefficient ring of a truncated polynomial algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CoeffKind {
    /// `W_m(k)`
    #[serde(rename = "W")]
    Witt,
    /// `k`
    #[serde(rename = "k")]
    Field,
}

/// A relation `p^val * x^mono = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub val: u32,
    pub mono: Vec<u32>,
}

impl Relation {
    /// Parses `"t^4"`, `"2t"`, `"2*x*y^2"`, `"4"`. Unit factors of the
    /// coefficient are dropped.
    pub fn parse(s: &str, vars: &[String], p: u64) -> Result<Relation, AlgebraError> {
        let bad = |why: &str| AlgebraError::Spec(format!("relation '{s}': {why}"));
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty"));
        }
        let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
        let mut val = 0;
        if !digits.is_empty() {
            let mut c: u64 = digits.parse().map_err(|_| bad("coefficient"))?;
            if c == 0 {
                return Err(bad("zero coefficient"));
            }
            while c % p == 0 {
                c /= p;
                val += 1;
            }
        }
        let rest = s[digits.len()..].trim_start_matches('*');
        let mut mono = vec![0u32; vars.len()];
        if !rest.is_empty() {
            for factor in rest.split('*') {
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|_| bad("exponent"))?),
                    None => (factor, 1),
                };
                let idx = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| bad(&format!("unknown variable '{name}'")))?;
                mono[idx] += e;
            }
        }
        Ok(Relation { val, mono })
    }
}

/// Everything needed to rebuild a monomial-quotient algebra at another precision.
#[derive(Clone, Debug)]
pub(crate) struct MonomialData {
    pub params: PrimeParams,
    pub coeff_prec: u32,
    pub vars: Vec<String>,
    pub relations: Vec<Relation>,
    pub poly: Vec<u64>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_label(vars: &[String], mono: &[u32]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(mono)
        .filter(|(_, e)| **e > 0)
        .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    parts.join("*")
}

fn poly_is_irreducible(p: u64, f: &[u64]) -> bool {
    // f monic of degree d, coefficients low to high; trial division by all
    // monic polynomials of degree 1..=d/2
    let d = f.len() - 1;
    for deg in 1..=d / 2 {
        let count = p.pow(deg as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                g.push(c % p);
                c /= p;
            }
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|x| *x == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(p: u64, f: &[u64], g: &[u64]) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = r[r.len() - 1] % p;
        let shift = r.len() - 1 - dg;
        for (i, gi) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - lead * gi % p) % p;
        }
        r.pop();
    }
    r
}

/// Lexicographically first monic irreducible polynomial of degree `d` over `F_p`.
pub(crate) fn irreducible_poly(p: u64, d: u32) -> Result<Vec<u64>, AlgebraError> {
    if d == 1 {
        return Ok(vec![0, 1]);
    }
    let count = p.pow(d);
    for code in 0..count {
        let mut f = Vec::with_capacity(d as usize + 1);
        let mut c = code;
        for _ in 0..d {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if f[0] != 0 && poly_is_irreducible(p, &f) {
            return Ok(f);
        }
    }
    Err(AlgebraError::NoIrreducible(d))
}

/// Standard monomials of the ideal generated by the pure relations.
fn standard_monomials(nvars: usize, pure: &[Vec<u32>]) -> Result<Vec<Vec<u32>>, AlgebraError> {
    for v in 0..nvars {
        let has_power = pure
            .iter()
            .any(|m| m[v] > 0 && m.iter().enumerate().all(|(i, e)| i == v || *e == 0));
        if !has_power {
            return Err(AlgebraError::NotFinite(format!(
                "variable {v} has no pure power relation"
            )));
        }
    }
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut frontier = vec![vec![0u32; nvars]];
    if pure.iter().any(|m| m.iter().all(|e| *e == 0)) {
        return Ok(Vec::new());
    }
    while let Some(m) = frontier.pop() {
        if !seen.insert(m.clone()) {
            continue;
        }
        for v in 0..nvars {
            let mut n = m.clone();
            n[v] += 1;
            if !pure.iter().any(|r| divides(r, &n)) && !seen.contains(&n) {
                frontier.push(n);
            }
        }
    }
    let mut out: Vec<Vec<u32>> = seen.into_iter().collect();
    out.sort_by_key(|m| (m.iter().sum::<u32>(), std::cmp::Reverse(m.clone())));
    Ok(out)
}

fn build_from_data(
    data: &MonomialData,
    field: Option<Arc<FiniteAlgebra>>,
    pure_only: bool,
) -> Result<FiniteAlgebra, AlgebraError> {
    let PrimeParams { p, d, .. } = data.params;
    let d = d as usize;
    let nvars = data.vars.len();
    let pure: Vec<Vec<u32>> = data
        .relations
        .iter()
        .filter(|r| r.val == 0)
        .map(|r| r.mono.clone())
        .collect();
    let monos = standard_monomials(nvars, &pure)?;
    let prec_of = |m: &[u32]| -> u32 {
        let mut e = data.coeff_prec;
        if !pure_only {
            for r in &data.relations {
                if r.val > 0 && divides(&r.mono, m) {
                    e = e.min(r.val);
                }
            }
        }
        e
    };
    // basis: (monomial, power of the field generator) with nonzero order
    let mut labels = Vec::new();
    let mut orders = Vec::new();
    let mut index: HashMap<(Vec<u32>, usize), usize> = HashMap::new();
    for m in &monos {
        let e = prec_of(m);
        if e == 0 {
            continue;
        }
        for j in 0..d {
            index.insert((m.clone(), j), labels.len());
            let ml = mono_label(&data.vars, m);
            let fl = match j {
                0 => String::new(),
                1 => "a".into(),
                _ => format!("a^{j}"),
            };
            let label = match (fl.is_empty(), ml.is_empty()) {
                (true, true) => "1".into(),
                (true, false) => ml,
                (false, true) => fl,
                (false, false) => format!("{fl}*{ml}"),
            };
            labels.push(label);
            orders.push(e);
        }
    }
    if labels.is_empty() {
        return Err(AlgebraError::Spec("relations kill the unit".into()));
    }
    let z = Zpm::new(p, data.coeff_prec)?;
    // powers a^s, s < 2d - 1, reduced modulo the lifted defining polynomial
    let mut apow: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; d];
    cur[0] = 1;
    for _ in 0..(2 * d).max(1) {
        apow.push(cur.clone());
        // multiply by a
        let top = cur[d - 1];
        let mut next = vec![0u64; d];
        for i in (1..d).rev() {
            next[i] = cur[i - 1];
        }
        for i in 0..d {
            next[i] = z.sub(next[i], z.mul(top, data.poly[i]));
        }
        cur = next;
    }
    let n = labels.len();
    let mut table = vec![vec![vec![0u64; n]; n]; n];
    let keys: Vec<(Vec<u32>, usize)> = {
        let mut k = vec![(Vec::new(), 0); n];
        for (key, i) in &index {
            k[*i] = key.clone();
        }
        k
    };
    for a in 0..n {
        for b in 0..n {
            let (ma, ja) = &keys[a];
            let (mb, jb) = &keys[b];
            let prod: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            if pure.iter().any(|r| divides(r, &prod)) {
                continue;
            }
            let e = prec_of(&prod);
            if e == 0 {
                continue;
            }
            let modulus = p.pow(e);
            for (i, c) in apow[ja + jb].iter().enumerate() {
                if let Some(&k) = index.get(&(prod.clone(), i)) {
                    table[a][b][k] = c % modulus;
                }
            }
        }
    }
    let one_idx = index[&(vec![0; nvars], 0)];
    let mut one = vec![0u64; n];
    one[one_idx] = 1;
    let is_field = field.is_none() && nvars == 0 && data.coeff_prec == 1;
    let (residue, lift) = if is_field {
        (Vec::new(), Vec::new())
    } else {
        let mut residue = vec![vec![0u64; d]; n];
        let mut lift = vec![vec![0u64; n]; d];
        for j in 0..d {
            let i = index[&(vec![0; nvars], j)];
            residue[i][j] = 1;
            lift[j][i] = 1;
        }
        (residue, lift)
    };
    let field = if is_field {
        None
    } else {
        Some(match field {
            Some(k) => k,
            None => Arc::new(field_algebra(p, data.params.d)?),
        })
    };
    let name = describe(data, pure_only);
    let recipe = CoverRecipe::Monomial(data.clone());
    FiniteAlgebra::from_parts(
        data.params,
        labels,
        orders,
        table,
        one,
        field,
        residue,
        lift,
        if is_field { data.poly.clone() } else { Vec::new() },
        recipe,
        name,
    )
}

fn describe(data: &MonomialData, pure_only: bool) -> String {
    let PrimeParams { p, d, .. } = data.params;
    let base = match (data.coeff_prec, d) {
        (1, 1) => format!("F{p}"),
        (1, d) => format!("F{}", p.pow(d)),
        (m, 1) => format!("Z/{}", p.pow(m)),
        (m, d) => format!("W{m}(F{})", p.pow(d)),
    };
    if data.vars.is_empty() {
        return base;
    }
    let rels: Vec<String> = data
        .relations
        .iter()
        .filter(|r| !pure_only || r.val == 0)
        .map(|r| {
            let m = mono_label(&data.vars, &r.mono);
            match (r.val, m.is_empty()) {
                (0, _) => m,
                (v, true) => format!("{}", p.pow(v)),
                (v, false) => format!("{}{m}", p.pow(v)),
            }
        })
        .collect();
    format!("{base}[{}]/({})", data.vars.join(","), rels.join(","))
}

/// The residue field `F_{p^d}` as an algebra over `F_p`.
pub(crate) fn field_algebra(p: u64, d: u32) -> Result<FiniteAlgebra, AlgebraError> {
    let params = PrimeParams::new(p, 1, d)?;
    let poly = irreducible_poly(p, d)?;
    let data = MonomialData { params, coeff_prec: 1, vars: Vec::new(), relations: Vec::new(), poly };
    build_from_data(&data, None, false)
}

/// Builds `C[x_1..x_r]/(relations, J^cut)` with `C = W_m(k)` or `C = k`.
pub fn build_truncated_poly_algebra(
    params: PrimeParams,
    coeff: CoeffKind,
    vars: &[&str],
    relations: &[&str],
    degree_cut: Option<u32>,
) -> Result<Arc<FiniteAlgebra>, AlgebraError> {
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let mut rels = relations
        .iter()
        .map(|r| Relation::parse(r, &vars, params.p))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(a) = degree_cut {
        if a == 0 {
            return Err(AlgebraError::Spec("degree cut must be positive".into()));
        }
        let monos = monomials_of_degree(vars.len(), a);
        rels.extend(monos.into_iter().map(|mono| Relation { val: 0, mono }));
    }
    let coeff_prec = match coeff {
        CoeffKind::Witt => params.m,
        CoeffKind::Field => 1,
    };
    let k = Arc::new(field_algebra(params.p, params.d)?);
    if vars.is_empty() && coeff_prec == 1 && rels.is_empty() {
        return Ok(k);
    }
    let data = MonomialData {
        params,
        coeff_prec,
        vars,
        relations: rels,
        poly: k.field_poly.clone(),
    };
    let alg = Arc::new(build_from_data(&data, Some(k), false)?);
    alg.check_admissible()?;
    Ok(alg)
}

pub(crate) fn monomials_of_degree(nvars: usize, a: u32) -> Vec<Vec<u32>> {
    if nvars == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    rec(0, a, &mut cur, &mut out);
    out
}

/// Free cover of a monomial algebra at precision `prec`.
pub(crate) fn monomial_cover(
    data: &MonomialData,
    field: Arc<FiniteAlgebra>,
    prec: u32,
) -> Result<FiniteAlgebra, AlgebraError> {
    let mut d = data.clone();
    d.coeff_prec = prec;
    d.params.m = prec;
    build_from_data(&d, Some(field), true)
}

pub(crate) fn monomial_cover_maps(
    _data: &MonomialData,
    cover: &FiniteAlgebra,
    target: &FiniteAlgebra,
) -> (Matrix, Matrix) {
    let pos: HashMap<&str, usize> = target
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let projection: Matrix = cover
        .labels
        .iter()
        .map(|l| match pos.get(l.as_str()) {
            Some(i) => target.basis_elem(*i),
            None => target.zero(),
        })
        .collect();
    let cpos: HashMap<&str, usize> = cover
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let section: Matrix = target
        .labels
        .iter()
        .map(|l| cover.basis_elem(cpos[l.as_str()]))
        .collect();
    (projection, section)
}

impl FiniteAlgebra {
    /// `Z/p^m`, i.e. `W_m(F_p)`.
    pub fn integers_mod(p: u64, m: u32) -> Result<Arc<FiniteAlgebra>, AlgebraError> {
        build_truncated_poly_algebra(PrimeParams::new(p, m, 1)?, CoeffKind::Witt, &[], &[], None)
    }

    /// The finite field `F_{p^d}`.
    pub fn finite_field(p: u64, d: u32) -> Result<Arc<FiniteAlgebra>, AlgebraError> {
        Ok(Arc::new(field_algebra(p, d)?))
    }

    /// `W_m(F_{p^d})`.
    pub fn witt_of_field(p: u64, m: u32, d: u32) -> Result<Arc<FiniteAlgebra>, AlgebraError> {
        build_truncated_poly_algebra(PrimeParams::new(p, m, d)?, CoeffKind::Witt, &[], &[], None)
    }

    /// `F_p[t]/t^a`.
    pub fn truncated_field_poly(p: u64, a: u32) -> Result<Arc<FiniteAlgebra>, AlgebraError> {
        let rel = format!("t^{a}");
        build_truncated_poly_algebra(
            PrimeParams::new(p, 1, 1)?,
            CoeffKind::Field,
            &["t"],
            &[rel.as_str()],
            None,
        )
    }
}

impl FiniteAlgebra {
    /// Evaluates a polynomial expression like `"t^2 + 2*t"` or `"2 - x*y"`.
    /// A variable without a basis element of its own is zero in the ring.
    pub fn parse_element(&self, vars: &[&str], s: &str) -> Result<Elem, AlgebraError> {
        let bad = |why: String| AlgebraError::Spec(format!("expression '{s}': {why}"));
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for ch in s.chars() {
            if ch == '+' || ch == '-' {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                } else if !terms.is_empty() || neg {
                    return Err(bad("dangling sign".into()));
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(bad("dangling sign".into()));
        }
        terms.push((neg, cur));
        let mut acc = self.zero();
        for (neg, term) in terms {
            let mut t = self.one();
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor".into()));
                }
                let digits: String = factor.chars().take_while(|c| c.is_ascii_digit()).collect();
                let rest = &factor[digits.len()..];
                if !digits.is_empty() {
                    let c: i64 = digits.parse().map_err(|_| bad("coefficient".into()))?;
                    t = self.scalar(&t, c);
                }
                if rest.is_empty() {
                    continue;
                }
                let (name, e) = match rest.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u64>().map_err(|_| bad("exponent".into()))?),
                    None => (rest, 1),
                };
                if !vars.contains(&name) {
                    return Err(bad(format!("unknown variable '{name}'")));
                }
                let x = match self.labels.iter().position(|l| l == name) {
                    Some(i) => self.basis_elem(i),
                    None => self.zero(),
                };
                t = self.mul(&t, &self.pow(&x, e));
            }
            acc = if neg { self.sub(&acc, &t) } else { self.add(&acc, &t) };
        }
        Ok(acc)
    }

    /// Exponent vectors of the basis monomials, read off the labels; only
    /// for monomial algebras over `Z/p^m` or `F_p`.
    pub fn basis_monomials(&self, vars: &[&str]) -> Result<Vec<Vec<u32>>, AlgebraError> {
        let mut out = Vec::with_capacity(self.rank());
        for l in &self.labels {
            let mut mono = vec![0u32; vars.len()];
            if l != "1" {
                for f in l.split('*') {
                    let (name, e) = match f.split_once('^') {
                        Some((n, e)) => (n, e.parse::<u32>().map_err(|_| AlgebraError::Spec(l.clone()))?),
                        None => (f, 1),
                    };
                    let i = vars
                        .iter()
                        .position(|v| *v == name)
                        .ok_or_else(|| AlgebraError::Spec(format!("basis label '{l}' is not a monomial")))?;
                    mono[i] += e;
                }
            }
            out.push(mono);
        }
        Ok(out)
    }
}
