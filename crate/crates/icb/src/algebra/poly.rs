use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Rat, SymId, Symbols};

/// Sparse exponent vector, sorted by symbol id, no zero exponents stored.
/// Negative exponents are legal only for Laurent-flagged symbols; the flag
/// is checked at the operations that can introduce them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(SymId, i32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(id: SymId) -> Self {
        Monomial { exps: vec![(id, 1)] }
    }

    pub fn var_pow(id: SymId, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial { exps: vec![(id, e)] }
        }
    }

    pub fn from_pairs(mut pairs: Vec<(SymId, i32)>) -> Self {
        pairs.retain(|&(_, e)| e != 0);
        pairs.sort_by_key(|&(id, _)| id);
        for w in pairs.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate symbol in monomial");
        }
        Monomial { exps: pairs }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, id: SymId) -> i32 {
        self.exps
            .iter()
            .find(|&&(s, _)| s == id)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn exps(&self) -> &[(SymId, i32)] {
        &self.exps
    }

    pub fn total_degree(&self) -> i64 {
        self.exps.iter().map(|&(_, e)| e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() || j < other.exps.len() {
            let pick = match (self.exps.get(i), other.exps.get(j)) {
                (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                    Ordering::Less => {
                        i += 1;
                        (a, ea)
                    }
                    Ordering::Greater => {
                        j += 1;
                        (b, eb)
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (a, ea + eb)
                    }
                },
                (Some(&(a, ea)), None) => {
                    i += 1;
                    (a, ea)
                }
                (None, Some(&(b, eb))) => {
                    j += 1;
                    (b, eb)
                }
                (None, None) => unreachable!(),
            };
            if pick.1 != 0 {
                out.push(pick);
            }
        }
        Monomial { exps: out }
    }

    pub fn inv(&self) -> Monomial {
        Monomial { exps: self.exps.iter().map(|&(s, e)| (s, -e)).collect() }
    }

    pub fn pow(&self, n: i32) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self
                .exps
                .iter()
                .map(|&(s, e)| (s, e.checked_mul(n).expect("exponent overflow")))
                .collect(),
        }
    }

    /// `self / other`, or `None` when a non-Laurent symbol would go negative.
    pub fn div_checked(&self, other: &Monomial, syms: &Symbols) -> Option<Monomial> {
        let q = self.mul(&other.inv());
        for &(s, e) in &q.exps {
            if e < 0 && !syms.is_laurent(s) {
                return None;
            }
        }
        Some(q)
    }

    /// Validates that negative exponents only occur on Laurent symbols.
    pub fn check_laurent(&self, syms: &Symbols) -> Result<(), AlgebraError> {
        for &(s, e) in &self.exps {
            if e < 0 && !syms.is_laurent(s) {
                return Err(AlgebraError::NegativeExponent(syms.name(s).to_string()));
            }
        }
        Ok(())
    }
}

// Graded lexicographic by symbol id: total degree first, then the exponent
// of the lowest id decides (higher exponent on an earlier symbol = larger).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.exps.get(i), other.exps.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(&eb),
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
                (Some(&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&(_, eb))) => return 0.cmp(&eb),
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate (Laurent) polynomial over exact rationals.
/// Terms are kept in canonical graded-lex order by the BTreeMap.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(id: SymId) -> Self {
        Poly::term(Rat::one(), Monomial::var(id))
    }

    pub fn term(c: Rat, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// A unit is a single term (rational times a monomial).
    pub fn as_unit(&self) -> Option<(Rat, Monomial)> {
        (self.terms.len() == 1).then(|| {
            let (m, c) = self.terms.iter().next().unwrap();
            (c.clone(), m.clone())
        })
    }

    /// Greatest term in the canonical order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, c: Rat, m: Monomial) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(c.clone(), m.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ca * cb, ma.mul(mb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Division by a unit (single-term) divisor. Checks Laurent legality.
    pub fn div_unit(&self, unit: &Poly, syms: &Symbols) -> Result<Poly, AlgebraError> {
        let (c, m) = unit.as_unit().ok_or(AlgebraError::NonUnitDivisorInPolyDomain)?;
        if c.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let minv = m.inv();
        let cinv = Rat::one() / c;
        let mut out = Poly::zero();
        for (k, v) in &self.terms {
            let q = k.mul(&minv);
            q.check_laurent(syms)?;
            out.add_term(v * &cinv, q);
        }
        Ok(out)
    }

    /// Exact multivariate division: returns `Some(q)` with `q * d == self`
    /// when the quotient exists in the (Laurent-flag-respecting) ring.
    pub fn div_exact(&self, d: &Poly, syms: &Symbols) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if d.as_unit().is_some() {
            return self.div_unit(d, syms).ok();
        }
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        let cap = 64 + 8 * (self.num_terms() + 1) * (d.num_terms() + 1);
        let mut steps = 0usize;
        while let Some((lm, lc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            steps += 1;
            if steps > cap {
                return None;
            }
            let qm = lm.div_checked(&dm, syms)?;
            let qc = lc / &dc;
            quo.add_term(qc.clone(), qm.clone());
            let piece = d.mul(&Poly::term(qc, qm));
            rem = rem.sub(&piece);
            if let (Some((nm, _)), true) = (rem.leading(), true) {
                if *nm >= lm {
                    // no strict progress: not divisible in this order
                    return None;
                }
            }
        }
        Some(quo)
    }

    /// Substitute polynomials for symbols. Symbols not in the map are kept.
    /// Negative powers require the substitute to be a unit.
    pub fn subst(&self, map: &BTreeMap<SymId, Poly>, syms: &Symbols) -> Result<Poly, AlgebraError> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for &(s, e) in m.exps() {
                let factor = match map.get(&s) {
                    None => Poly::term(Rat::one(), Monomial::var_pow(s, e)),
                    Some(p) => {
                        if e >= 0 {
                            p.pow(e as u32)
                        } else {
                            let (uc, um) = p.as_unit().ok_or(AlgebraError::NonUnitDivisorInPolyDomain)?;
                            if uc.is_zero() {
                                return Err(AlgebraError::DivisionByZero);
                            }
                            let inv = Poly::term(Rat::one() / uc, um.inv());
                            for &(is, ie) in inv.leading().unwrap().0.exps() {
                                if ie < 0 && !syms.is_laurent(is) {
                                    return Err(AlgebraError::NegativeExponent(
                                        syms.name(is).to_string(),
                                    ));
                                }
                            }
                            inv.pow((-e) as u32)
                        }
                    }
                };
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to one symbol.
    pub fn derivative(&self, id: SymId) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(id);
            if e == 0 {
                continue;
            }
            let dm = m.mul(&Monomial::var_pow(id, -1));
            out.add_term(c * Rat::from_integer(e.into()), dm);
        }
        out
    }

    /// Largest total degree among terms (`None` for the zero polynomial).
    pub fn max_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Positive rational `g` such that `self / g` has coprime integer
    /// coefficients. Zero polynomial yields 1.
    pub fn content(&self) -> Rat {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&c.numer().abs());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return Rat::one();
        }
        Rat::new(num_gcd, den_lcm)
    }

    /// Sign of the leading coefficient (0 for the zero polynomial).
    pub fn leading_sign(&self) -> i32 {
        match self.leading() {
            None => 0,
            Some((_, c)) => {
                if c.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat_i;

    fn table() -> std::sync::Arc<Symbols> {
        let mut b = Symbols::builder();
        b.add("x", false);
        b.add("y", false);
        b.add("La", true);
        b.finish()
    }

    #[test]
    fn monomial_order_is_graded() {
        let s = table();
        let x = s.id("x").unwrap();
        let y = s.id("y").unwrap();
        let xy = Monomial::from_pairs(vec![(x, 1), (y, 1)]);
        let y1 = Monomial::var(y);
        assert!(xy > y1);
        let x2 = Monomial::var_pow(x, 2);
        assert!(x2 > xy); // same degree, earlier symbol carries more weight
    }

    #[test]
    fn div_exact_recovers_factor() {
        let s = table();
        let x = Poly::var(s.id("x").unwrap());
        let y = Poly::var(s.id("y").unwrap());
        let a = x.add(&y);
        let b = x.sub(&y);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a, &s).unwrap(), b);
        assert!(x.div_exact(&a, &s).is_none());
    }

    #[test]
    fn laurent_unit_division() {
        let s = table();
        let la = Poly::var(s.id("La").unwrap());
        let x = Poly::var(s.id("x").unwrap());
        let q = x.div_unit(&la.scale(&rat_i(2)), &s).unwrap();
        assert_eq!(q.num_terms(), 1);
        assert!(x.div_unit(&x, &s).is_ok());
        let two_x = x.scale(&rat_i(2));
        assert!(la.div_unit(&two_x, &s).is_err());
    }
}
