use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Monomial, Poly, Rat, SymId, Symbols};

/// Domain tag of a [`CoeffExpr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Domain {
    Rat,
    Poly,
    RatFunc,
}

/// Rational function `num/den`. No general multivariate gcd is performed:
/// normalization cancels the joint integer content and any common monomial
/// factor, and makes the leading coefficient of `den` positive. Equality is
/// decided by cross-multiplication.
#[derive(Debug, Clone)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut rf = RatFunc { num, den };
        rf.normalize();
        Ok(rf)
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        // common monomial factor: componentwise min of exponents over all terms
        let mut mins: std::collections::BTreeMap<SymId, i32> = std::collections::BTreeMap::new();
        let mut seen_all: std::collections::BTreeSet<SymId> = std::collections::BTreeSet::new();
        let mut first = true;
        for p in [&self.num, &self.den] {
            for (m, _) in p.terms() {
                let ids: std::collections::BTreeSet<SymId> = m.exps().iter().map(|&(s, _)| s).collect();
                if first {
                    seen_all = ids.clone();
                    for &(s, e) in m.exps() {
                        mins.insert(s, e);
                    }
                    first = false;
                } else {
                    seen_all = seen_all.intersection(&ids).copied().collect();
                    for &(s, e) in m.exps() {
                        mins.entry(s).and_modify(|v| *v = (*v).min(e)).or_insert(0);
                    }
                }
            }
        }
        let common: Vec<(SymId, i32)> = mins
            .into_iter()
            .filter(|&(s, e)| e > 0 && seen_all.contains(&s))
            .collect();
        if !common.is_empty() {
            let m = Monomial::from_pairs(common).inv();
            self.num = self.num.mul_monomial(&m);
            self.den = self.den.mul_monomial(&m);
        }
        // joint integer content and denominator sign
        let joint = {
            use num_bigint::BigInt;
            use num_integer::Integer;
            let mut ng = BigInt::zero();
            let mut dl = BigInt::one();
            for p in [&self.num, &self.den] {
                for (_m, c) in p.terms() {
                    ng = ng.gcd(&c.numer().abs());
                    dl = dl.lcm(c.denom());
                }
            }
            if ng.is_zero() {
                Rat::one()
            } else {
                Rat::new(ng, dl)
            }
        };
        let mut scale = Rat::one() / joint;
        if self.den.leading_sign() < 0 {
            scale = -scale;
        }
        self.num = self.num.scale(&scale);
        self.den = self.den.scale(&scale);
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominators")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Try to lower to a polynomial by exact division.
    pub fn to_poly(&self, syms: &Symbols) -> Option<Poly> {
        if let Some(c) = self.den.as_constant() {
            return Some(self.num.scale(&(Rat::one() / c)));
        }
        self.num.div_exact(&self.den, syms)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RatFunc {}

/// Exact coefficient: a rational, a (Laurent) polynomial, or a rational
/// function. Mixed-domain arithmetic promotes to the wider domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeffExpr {
    Rat(Rat),
    Poly(Poly),
    Fun(RatFunc),
}

impl CoeffExpr {
    pub fn zero() -> Self {
        CoeffExpr::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        CoeffExpr::Rat(Rat::one())
    }

    pub fn int(n: i64) -> Self {
        CoeffExpr::Rat(super::rat_i(n))
    }

    pub fn rational(p: i64, q: i64) -> Self {
        CoeffExpr::Rat(super::rat(p, q))
    }

    pub fn var(id: SymId) -> Self {
        CoeffExpr::Poly(Poly::var(id))
    }

    pub fn domain(&self) -> Domain {
        match self {
            CoeffExpr::Rat(_) => Domain::Rat,
            CoeffExpr::Poly(_) => Domain::Poly,
            CoeffExpr::Fun(_) => Domain::RatFunc,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoeffExpr::Rat(r) => r.is_zero(),
            CoeffExpr::Poly(p) => p.is_zero(),
            CoeffExpr::Fun(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            CoeffExpr::Rat(r) => r.is_one(),
            CoeffExpr::Poly(p) => p.as_constant().map(|c| c.is_one()).unwrap_or(false),
            CoeffExpr::Fun(f) => f
                .to_poly_weak()
                .and_then(|p| p.as_constant())
                .map(|c| c.is_one())
                .unwrap_or(false),
        }
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            CoeffExpr::Rat(r) => Some(r.clone()),
            CoeffExpr::Poly(p) => p.as_constant(),
            CoeffExpr::Fun(f) => {
                let n = f.num().as_constant()?;
                let d = f.den().as_constant()?;
                Some(n / d)
            }
        }
    }

    pub fn poly(&self) -> Poly {
        match self {
            CoeffExpr::Rat(r) => Poly::constant(r.clone()),
            CoeffExpr::Poly(p) => p.clone(),
            CoeffExpr::Fun(_) => panic!("rational function where polynomial expected"),
        }
    }

    pub fn fun(&self) -> RatFunc {
        match self {
            CoeffExpr::Rat(r) => RatFunc::from_poly(Poly::constant(r.clone())),
            CoeffExpr::Poly(p) => RatFunc::from_poly(p.clone()),
            CoeffExpr::Fun(f) => f.clone(),
        }
    }

    pub fn add(&self, other: &CoeffExpr) -> CoeffExpr {
        match self.domain().max(other.domain()) {
            Domain::Rat => CoeffExpr::Rat(self.as_rat().unwrap() + other.as_rat().unwrap()),
            Domain::Poly => CoeffExpr::Poly(self.poly().add(&other.poly())),
            Domain::RatFunc => CoeffExpr::Fun(self.fun().add(&other.fun())),
        }
    }

    pub fn sub(&self, other: &CoeffExpr) -> CoeffExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CoeffExpr {
        match self {
            CoeffExpr::Rat(r) => CoeffExpr::Rat(-r.clone()),
            CoeffExpr::Poly(p) => CoeffExpr::Poly(p.neg()),
            CoeffExpr::Fun(f) => CoeffExpr::Fun(f.neg()),
        }
    }

    pub fn mul(&self, other: &CoeffExpr) -> CoeffExpr {
        match self.domain().max(other.domain()) {
            Domain::Rat => CoeffExpr::Rat(self.as_rat().unwrap() * other.as_rat().unwrap()),
            Domain::Poly => CoeffExpr::Poly(self.poly().mul(&other.poly())),
            Domain::RatFunc => CoeffExpr::Fun(self.fun().mul(&other.fun())),
        }
    }

    pub fn scale_int(&self, n: i64) -> CoeffExpr {
        self.mul(&CoeffExpr::int(n))
    }

    pub fn pow(&self, n: u32) -> CoeffExpr {
        let mut out = CoeffExpr::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact division within the current domain. In the polynomial domain the
    /// divisor must be a unit (rational times a Laurent monomial); otherwise
    /// `NonUnitDivisorInPolyDomain` signals the caller to promote.
    pub fn div(&self, other: &CoeffExpr, syms: &Symbols) -> Result<CoeffExpr, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        match self.domain().max(other.domain()) {
            Domain::Rat => Ok(CoeffExpr::Rat(self.as_rat().unwrap() / other.as_rat().unwrap())),
            Domain::Poly => Ok(CoeffExpr::Poly(self.poly().div_unit(&other.poly(), syms)?)),
            Domain::RatFunc => Ok(CoeffExpr::Fun(self.fun().div(&other.fun())?)),
        }
    }

    /// Division that falls back to the rational-function domain when the
    /// divisor is not a unit.
    pub fn div_or_promote(&self, other: &CoeffExpr, syms: &Symbols) -> Result<CoeffExpr, AlgebraError> {
        match self.div(other, syms) {
            Err(AlgebraError::NonUnitDivisorInPolyDomain) => {
                Ok(CoeffExpr::Fun(self.fun().div(&other.fun())?))
            }
            r => r,
        }
    }

    /// Substitute polynomial values for symbols.
    pub fn subst(
        &self,
        map: &std::collections::BTreeMap<SymId, Poly>,
        syms: &Symbols,
    ) -> Result<CoeffExpr, AlgebraError> {
        Ok(match self {
            CoeffExpr::Rat(r) => CoeffExpr::Rat(r.clone()),
            CoeffExpr::Poly(p) => CoeffExpr::Poly(p.subst(map, syms)?),
            CoeffExpr::Fun(f) => {
                let num = f.num().subst(map, syms)?;
                let den = f.den().subst(map, syms)?;
                CoeffExpr::Fun(RatFunc::new(num, den)?)
            }
        })
    }

    /// Demote to the narrowest faithful domain (constants to `Rat`,
    /// unit-denominator functions to `Poly`).
    pub fn simplify(&self, syms: &Symbols) -> CoeffExpr {
        match self {
            CoeffExpr::Rat(_) => self.clone(),
            CoeffExpr::Poly(p) => match p.as_constant() {
                Some(c) => CoeffExpr::Rat(c),
                None => self.clone(),
            },
            CoeffExpr::Fun(f) => match f.to_poly(syms) {
                Some(p) => CoeffExpr::Poly(p).simplify(syms),
                None => self.clone(),
            },
        }
    }
}

impl RatFunc {
    // Constant-denominator lowering that needs no symbol table.
    fn to_poly_weak(&self) -> Option<Poly> {
        let c = self.den.as_constant()?;
        Some(self.num.scale(&(Rat::one() / c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat_i, Symbols};

    #[test]
    fn ratfunc_cancels_content_and_monomial() {
        let mut b = Symbols::builder();
        let x = b.add("x", false);
        let _s = b.finish();
        let px = Poly::var(x);
        // 2x^2 / 4x -> x / 2
        let f = RatFunc::new(px.pow(2).scale(&rat_i(2)), px.scale(&rat_i(4))).unwrap();
        assert_eq!(f.num(), &px.scale(&crate::algebra::rat(1, 2)));
        assert_eq!(f.den(), &Poly::one());
    }

    #[test]
    fn div_or_promote_moves_to_ratfunc() {
        let mut b = Symbols::builder();
        let x = b.add("x", false);
        let s = b.finish();
        let a = CoeffExpr::var(x);
        let bq = a.add(&CoeffExpr::one());
        let q = a.div_or_promote(&bq, &s).unwrap();
        assert_eq!(q.domain(), Domain::RatFunc);
        assert_eq!(q.mul(&bq).simplify(&s), a.simplify(&s));
    }
}
