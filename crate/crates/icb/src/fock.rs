//! Heisenberg Fock spaces and the free-boson realization of the Virasoro
//! algebra, used as an independent oracle for the Verma-module machinery.
//!
//! The Virasoro action is the normally ordered bilinear
//! `L_n = (ε/2) a_{n/2}² + Σ_{m > −n/2} a_{−m} a_{m+n} − (n+1) ρ a_n`
//! with central charge `c = 1 − 12ρ²` (`ε = 1` for even `n`, else 0).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{rat, rat_i, CoeffExpr, Symbols};
use crate::partitions::Partition;

/// Parameters of a rank-r Fock space: eigenvalues `(λ₀, …, λ_r)` of the
/// annihilation side and the background charge ρ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockParams {
    pub rank: usize,
    pub lambda: Vec<CoeffExpr>,
    pub rho: CoeffExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FockError {
    BadParameterCount,
    TopParameterZero,
    /// The zero modes of bra and ket differ, so no pairing exists.
    ZeroModeMismatch,
}

impl std::fmt::Display for FockError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FockError::BadParameterCount => write!(f, "expected r+1 Fock parameters"),
            FockError::TopParameterZero => write!(f, "top Fock parameter must be nonzero"),
            FockError::ZeroModeMismatch => write!(f, "bra and ket zero modes differ"),
        }
    }
}

impl std::error::Error for FockError {}

impl FockParams {
    pub fn new(rank: usize, lambda: Vec<CoeffExpr>, rho: CoeffExpr) -> Result<Self, FockError> {
        if lambda.len() != rank + 1 {
            return Err(FockError::BadParameterCount);
        }
        if lambda.last().unwrap().is_zero() {
            return Err(FockError::TopParameterZero);
        }
        Ok(FockParams { rank, lambda, rho })
    }

    /// Eigenvalue of `a_n` on the generating vector (zero outside `0..=r`).
    pub fn lambda_at(&self, n: i64) -> CoeffExpr {
        if n < 0 || n as usize > self.rank {
            CoeffExpr::zero()
        } else {
            self.lambda[n as usize].clone()
        }
    }

    /// Central charge `1 − 12ρ²` of the induced Virasoro action.
    pub fn central_charge(&self) -> CoeffExpr {
        CoeffExpr::one().sub(&self.rho.mul(&self.rho).scale_int(12))
    }
}

/// State of the Fock space: coefficients on the basis
/// `a_{−i_k} ⋯ a_{−i_1} |λ⟩` indexed by the multiset of creation modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockState {
    pub terms: BTreeMap<Partition, CoeffExpr>,
}

impl FockState {
    pub fn zero() -> Self {
        FockState { terms: BTreeMap::new() }
    }

    pub fn generator() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Partition::empty(), CoeffExpr::one());
        FockState { terms }
    }

    pub fn basis(p: Partition) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(p, CoeffExpr::one());
        FockState { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: Partition, c: CoeffExpr) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(p) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &FockState) -> FockState {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FockState) -> FockState {
        self.add(&other.scale(&CoeffExpr::int(-1)))
    }

    pub fn scale(&self, c: &CoeffExpr) -> FockState {
        if c.is_zero() {
            return FockState::zero();
        }
        FockState {
            terms: self
                .terms
                .iter()
                .map(|(p, k)| (p.clone(), k.mul(c)))
                .filter(|(_, k)| !k.is_zero())
                .collect(),
        }
    }

    pub fn coeff(&self, p: &Partition) -> CoeffExpr {
        self.terms.get(p).cloned().unwrap_or_else(CoeffExpr::zero)
    }

    fn max_mode(&self) -> i64 {
        self.terms
            .keys()
            .filter_map(|p| p.parts().first().copied())
            .max()
            .unwrap_or(0) as i64
    }
}

/// A Fock module instance (parameters plus the symbol table used by the
/// coefficients).
pub struct FockModule {
    pub params: FockParams,
    pub syms: Arc<Symbols>,
}

impl FockModule {
    pub fn new(params: FockParams, syms: Arc<Symbols>) -> Self {
        FockModule { params, syms }
    }

    /// Exact action of the Heisenberg generator `a_n`.
    pub fn heis_apply(&self, n: i64, v: &FockState) -> FockState {
        let mut out = FockState::zero();
        for (p, c) in &v.terms {
            if n < 0 {
                out.add_term(p.with_part((-n) as u32), c.clone());
                continue;
            }
            if n == 0 {
                out.add_term(p.clone(), c.mul(&self.params.lambda_at(0)));
                continue;
            }
            // contraction with a matching creation mode: [a_n, a_{-n}] = n
            if let Some(rest) = p.without_part(n as u32) {
                let mult = p.multiplicity(n as u32);
                let k = CoeffExpr::Rat(rat_i(n) * rat_i(mult as i64));
                out.add_term(rest, c.mul(&k));
            }
            // a_n passes through to the generating vector
            let eig = self.params.lambda_at(n);
            if !eig.is_zero() {
                out.add_term(p.clone(), c.mul(&eig));
            }
        }
        out
    }

    /// Virasoro generator through the free-boson bilinear.
    pub fn vir_apply(&self, n: i64, v: &FockState) -> FockState {
        let mut out = FockState::zero();
        // -(n+1) ρ a_n
        let rho_term = self
            .heis_apply(n, v)
            .scale(&self.params.rho.mul(&CoeffExpr::int(-(n + 1))));
        out = out.add(&rho_term);
        // (ε/2) a_{n/2}²
        if n % 2 == 0 {
            let half = n / 2;
            let sq = self.heis_apply(half, &self.heis_apply(half, v));
            out = out.add(&sq.scale(&CoeffExpr::rational(1, 2)));
        }
        // Σ_{m > −n/2} a_{−m} a_{m+n}
        let m_lo = num_integer::Integer::div_floor(&-n, &2) + 1;
        let m_hi = (v.max_mode().max(self.params.rank as i64)) - n.min(0) + n.abs() + 1;
        // conservative upper bound; terms beyond contribute nothing
        for m in m_lo..=m_hi.max(m_lo) {
            let inner = self.heis_apply(m + n, v);
            if inner.is_zero() {
                continue;
            }
            out = out.add(&self.heis_apply(-m, &inner));
        }
        out
    }

    /// Eigenvalues `(Λ_r, …, Λ_{2r})` of `L_n` on the generating vector:
    /// `Λ_n = ½ Σ_m λ_m λ_{n−m} − δ_{n,r} (n+1) ρ λ_n`.
    pub fn whittaker_eigenvalues(&self) -> Vec<CoeffExpr> {
        let r = self.params.rank as i64;
        let mut out = Vec::new();
        for n in r..=2 * r {
            let mut acc = CoeffExpr::zero();
            for m in 0..=n {
                acc = acc.add(&self.params.lambda_at(m).mul(&self.params.lambda_at(n - m)));
            }
            acc = acc.mul(&CoeffExpr::Rat(rat(1, 2)));
            if n == r {
                let corr = self
                    .params
                    .rho
                    .mul(&self.params.lambda_at(n))
                    .scale_int(n + 1);
                acc = acc.sub(&corr);
            }
            out.push(acc);
        }
        out
    }
}

/// Bilinear pairing `⟨bra-word| · |ket⟩` of Fock spaces. The bra is given by
/// its dual parameters and a word of annihilation modes (a partition): the
/// dual basis vector `⟨μ| a_{i_1} ⋯ a_{i_k}`. Requires matching zero modes.
pub fn fock_pairing(
    bra_params: &FockParams,
    bra_word: &Partition,
    ket: &FockModule,
    v: &FockState,
) -> Result<CoeffExpr, FockError> {
    if !bra_params
        .lambda_at(0)
        .sub(&ket.params.lambda_at(0))
        .is_zero()
    {
        return Err(FockError::ZeroModeMismatch);
    }
    // move the bra word onto the ket (positive modes annihilate rightward)
    let mut state = v.clone();
    for &i in bra_word.parts().iter().rev() {
        state = ket.heis_apply(i as i64, &state);
    }
    // remaining creation modes hit the bra eigenvalues
    let mut acc = CoeffExpr::zero();
    for (p, c) in &state.terms {
        let mut factor = c.clone();
        let mut dead = false;
        for &part in p.parts() {
            let eig = bra_params.lambda_at(part as i64);
            if eig.is_zero() {
                dead = true;
                break;
            }
            factor = factor.mul(&eig);
        }
        if !dead {
            acc = acc.add(&factor);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Symbols;

    fn symbolic_rank1() -> FockModule {
        let mut b = Symbols::builder();
        let l0 = b.add("l0", false);
        let l1 = b.add("l1", false);
        let rho = b.add("rho", false);
        let syms = b.finish();
        let params = FockParams::new(
            1,
            vec![CoeffExpr::var(l0), CoeffExpr::var(l1)],
            CoeffExpr::var(rho),
        )
        .unwrap();
        FockModule::new(params, syms)
    }

    #[test]
    fn annihilation_above_rank() {
        let m = symbolic_rank1();
        assert!(m.heis_apply(2, &FockState::generator()).is_zero());
        assert_eq!(
            m.heis_apply(0, &FockState::generator()),
            FockState::generator().scale(&m.params.lambda_at(0))
        );
    }

    #[test]
    fn commutator_a1_am1() {
        // a_1 a_{-1} |λ⟩ = |λ⟩·1 + λ₁ a_{-1}|λ⟩
        let m = symbolic_rank1();
        let v = m.heis_apply(-1, &FockState::generator());
        let got = m.heis_apply(1, &v);
        let mut expect = FockState::generator();
        expect.add_term(Partition::new(vec![1]), m.params.lambda_at(1));
        assert_eq!(got, expect);
    }

    #[test]
    fn vir_annihilates_above_2r() {
        let m = symbolic_rank1();
        for n in 3..6 {
            assert!(m.vir_apply(n, &FockState::generator()).is_zero(), "L_{n}");
        }
    }

    #[test]
    fn whittaker_matches_direct_action() {
        let m = symbolic_rank1();
        let eig = m.whittaker_eigenvalues();
        for (k, n) in (1..=2).enumerate() {
            let direct = m.vir_apply(n, &FockState::generator());
            assert_eq!(direct, FockState::generator().scale(&eig[k]), "L_{n}");
        }
        // Λ₂ = λ₁²/2, Λ₁ = λ₀λ₁ − 2ρλ₁
        let l1 = m.params.lambda_at(1);
        assert!(eig[1].sub(&l1.mul(&l1).mul(&CoeffExpr::rational(1, 2))).is_zero());
    }
}
