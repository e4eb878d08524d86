//! Rank-r Verma (Whittaker) modules of the Virasoro algebra.
//!
//! States are exact linear combinations of the PBW basis `L_λ|Λ⟩` with
//! `L_λ = L_{−λ₁+r} ⋯ L_{−λ_k+r}` indexed by partitions. The module knows:
//! - [`VermaModule::apply`]: the exact action of any generator `L_n`,
//!   re-expressed in the basis by straightening
//! - [`VermaModule::apply_tilde`]: the shifted action `L̃_n = L_n − Λ_n`
//! - [`pair_hw`] / [`pair_vacuum`]: the bilinear pairings against a dual
//!   highest-weight vector and against the vacuum
//! - [`gram_matrix`] / [`gram_det_check`]: the pairing matrix
//!   `⟨Δ*| L̃_λ L_μ |Λ'⟩` and its determinant factorization
//!
//! Straightening results are memoized per module instance behind an
//! `RwLock`, so shared references can be used from several threads.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use crate::algebra::{rat, rat_i, CoeffExpr, Symbols};
use crate::partitions::{partitions_up_to, Partition};

/// Parameters of a rank-r Verma module: central charge and the eigenvalue
/// tuple `(Λ_r, …, Λ_{2r})` (for rank 0 the single highest weight Δ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleParams {
    pub rank: usize,
    pub central_charge: CoeffExpr,
    pub eigenvalues: Vec<CoeffExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VermaError {
    /// `Λ_{2r}` specialized to zero (the module would be degenerate).
    DegenerateTop,
    RankMismatch,
    BadEigenvalueCount,
}

impl std::fmt::Display for VermaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VermaError::DegenerateTop => write!(f, "top eigenvalue is zero"),
            VermaError::RankMismatch => write!(f, "state rank does not match the pairing"),
            VermaError::BadEigenvalueCount => write!(f, "expected r+1 eigenvalues"),
        }
    }
}

impl std::error::Error for VermaError {}

impl ModuleParams {
    pub fn new(
        rank: usize,
        central_charge: CoeffExpr,
        eigenvalues: Vec<CoeffExpr>,
    ) -> Result<Self, VermaError> {
        if eigenvalues.len() != rank + 1 {
            return Err(VermaError::BadEigenvalueCount);
        }
        if eigenvalues.last().unwrap().is_zero() {
            return Err(VermaError::DegenerateTop);
        }
        Ok(ModuleParams { rank, central_charge, eigenvalues })
    }

    /// Eigenvalue `Λ_n` for `r ≤ n ≤ 2r`.
    pub fn eigenvalue(&self, n: i64) -> &CoeffExpr {
        let r = self.rank as i64;
        assert!(n >= r && n <= 2 * r, "no eigenvalue for L_{n}");
        &self.eigenvalues[(n - r) as usize]
    }
}

/// Finite linear combination of PBW basis vectors of one module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VermaState {
    pub terms: BTreeMap<Partition, CoeffExpr>,
}

impl VermaState {
    pub fn zero() -> Self {
        VermaState { terms: BTreeMap::new() }
    }

    /// The generating (Whittaker / highest-weight) vector.
    pub fn generator() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Partition::empty(), CoeffExpr::one());
        VermaState { terms }
    }

    pub fn basis(p: Partition) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(p, CoeffExpr::one());
        VermaState { terms }
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

    pub fn add(&self, other: &VermaState) -> VermaState {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &VermaState) -> VermaState {
        self.add(&other.scale(&CoeffExpr::int(-1)))
    }

    pub fn scale(&self, c: &CoeffExpr) -> VermaState {
        if c.is_zero() {
            return VermaState::zero();
        }
        VermaState {
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

    /// Degree: the largest `|λ|` present (`None` for the zero state).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|p| p.weight()).max()
    }

    /// Membership in the filtration space `U_m`.
    pub fn in_filtration(&self, m: u32) -> bool {
        self.degree().map(|d| d <= m).unwrap_or(true)
    }

    pub fn map_coeffs(&self, f: impl Fn(&CoeffExpr) -> CoeffExpr) -> VermaState {
        let mut out = VermaState::zero();
        for (p, c) in &self.terms {
            out.add_term(p.clone(), f(c));
        }
        out
    }
}

/// A module instance: parameters, the shared symbol table, and the
/// straightening memo (keyed by `(generator index, partition)`).
pub struct VermaModule {
    pub params: ModuleParams,
    pub syms: Arc<Symbols>,
    memo: RwLock<BTreeMap<(i64, Partition), VermaState>>,
}

impl VermaModule {
    pub fn new(params: ModuleParams, syms: Arc<Symbols>) -> Self {
        VermaModule { params, syms, memo: RwLock::new(BTreeMap::new()) }
    }

    fn rank(&self) -> i64 {
        self.params.rank as i64
    }

    /// Generator index of a partition part: the part `p` stands for
    /// `L_{−p+r}`.
    fn part_index(&self, part: u32) -> i64 {
        self.rank() - part as i64
    }

    /// Part size corresponding to a creation index `n ≤ r−1`.
    fn index_part(&self, n: i64) -> u32 {
        debug_assert!(n <= self.rank() - 1);
        (self.rank() - n) as u32
    }

    /// `L_n` applied to a single PBW basis vector.
    pub fn apply_basis(&self, n: i64, p: &Partition) -> VermaState {
        if let Some(hit) = self.memo.read().unwrap().get(&(n, p.clone())) {
            return hit.clone();
        }
        let out = self.apply_basis_uncached(n, p);
        self.memo
            .write()
            .unwrap()
            .insert((n, p.clone()), out.clone());
        out
    }

    fn apply_basis_uncached(&self, n: i64, p: &Partition) -> VermaState {
        let r = self.rank();
        if p.is_empty() {
            // action on the generating vector
            return if n > 2 * r {
                VermaState::zero()
            } else if n >= r {
                VermaState::generator().scale(self.params.eigenvalue(n))
            } else {
                VermaState::basis(Partition::new(vec![self.index_part(n)]))
            };
        }
        // leftmost (smallest) index of the normal word
        let head_part = p.parts()[0];
        let head = self.part_index(head_part);
        if n <= head && n <= r - 1 {
            // prepend keeps the word normal
            return VermaState::basis(p.with_part(self.index_part(n)));
        }
        // commute L_n past the head: L_n L_head = L_head L_n + (n−head) L_{n+head} + central
        let rest = p.without_part(head_part).unwrap();
        let mut out = VermaState::zero();
        // L_head · (L_n · rest)
        let inner = self.apply(n, &VermaState::basis(rest.clone()));
        out = out.add(&self.apply(head, &inner));
        // (n − head) L_{n+head} · rest
        let c = CoeffExpr::int(n - head);
        if !c.is_zero() {
            out = out.add(&self.apply(n + head, &VermaState::basis(rest.clone())).scale(&c));
        }
        // central term c (n^3 − n)/12 when n + head = 0
        if n + head == 0 {
            let k = rat_i(n * n * n - n) * rat(1, 12);
            let central = self.params.central_charge.mul(&CoeffExpr::Rat(k));
            out = out.add(&VermaState::basis(rest).scale(&central));
        }
        out
    }

    /// Exact action of `L_n` on a state.
    pub fn apply(&self, n: i64, v: &VermaState) -> VermaState {
        let mut out = VermaState::zero();
        for (p, c) in &v.terms {
            out = out.add(&self.apply_basis(n, p).scale(c));
        }
        out
    }

    /// Shifted action `L̃_n = L_n − Λ_n` for `r ≤ n ≤ 2r`, `L̃_n = L_n` for
    /// `n > 2r`.
    pub fn apply_tilde(&self, n: i64, v: &VermaState) -> VermaState {
        let r = self.rank();
        assert!(n >= r, "tilde action only defined for n ≥ r");
        let mut out = self.apply(n, v);
        if n <= 2 * r {
            out = out.sub(&v.scale(self.params.eigenvalue(n)));
        }
        out
    }

    /// Apply a word of generators given by indices, rightmost first.
    pub fn apply_word(&self, indices: &[i64], v: &VermaState) -> VermaState {
        let mut state = v.clone();
        for &n in indices.iter().rev() {
            state = self.apply(n, &state);
        }
        state
    }

    /// `L̃_λ = L̃_{λ₁+r} ⋯ L̃_{λ_k+r}` applied to a state (rightmost factor
    /// first).
    pub fn apply_tilde_partition(&self, lambda: &Partition, v: &VermaState) -> VermaState {
        let r = self.rank();
        let mut state = v.clone();
        for &part in lambda.parts().iter().rev() {
            state = self.apply_tilde(part as i64 + r, &state);
        }
        state
    }
}

/// Bilinear pairing `⟨Δ| · |v⟩` of a dual rank-0 highest-weight vector
/// against a state of a rank-1 module (or of a rank-0 module, where only the
/// empty word survives). Moving the leftmost generator of each word onto the
/// bra kills every word with a negative index and turns `L_0` into `Δ`.
pub fn pair_hw(delta: &CoeffExpr, rank: usize, v: &VermaState) -> Result<CoeffExpr, VermaError> {
    match rank {
        0 => Ok(v.coeff(&Partition::empty())),
        1 => {
            let mut acc = CoeffExpr::zero();
            for (p, c) in &v.terms {
                // for rank 1 a part p stands for L_{1−p}; only all-ones
                // partitions (powers of L_0) survive against ⟨Δ|
                if p.parts().iter().all(|&q| q == 1) {
                    acc = acc.add(&c.mul(&delta.pow(p.len() as u32)));
                }
            }
            Ok(acc)
        }
        _ => Err(VermaError::RankMismatch),
    }
}

/// Bilinear pairing `⟨0| · |v⟩` against the vacuum of the irreducible
/// rank-0 module, defined for rank-2 states. `⟨0|L₁ = ⟨0|L₀ = ⟨0|L₋₁ = 0`
/// kills every nonempty word (rank-2 basis indices are ≤ 1).
pub fn pair_vacuum(rank: usize, v: &VermaState) -> Result<CoeffExpr, VermaError> {
    if rank != 2 {
        return Err(VermaError::RankMismatch);
    }
    Ok(v.coeff(&Partition::empty()))
}

/// Gram matrix `(⟨Δ*| L̃_λ L_μ |Λ'⟩)` over partitions with
/// `lo ≤ |λ|,|μ| ≤ hi`, rows and columns in canonical order (weight, then
/// lexicographic). Entries with `|λ| ≥ |μ|` come from pure straightening;
/// entries with `|λ| < |μ|` use the algebraic highest-weight pairing, which
/// is available for rank ≤ 1 (pass the dual weight). For higher ranks those
/// entries require a Fock realization; `None` requests only the
/// structurally determined part (others are filled with zero).
pub fn gram_matrix(
    module: &VermaModule,
    dual_weight: Option<&CoeffExpr>,
    lo: u32,
    hi: u32,
) -> Vec<Vec<CoeffExpr>> {
    let basis: Vec<Partition> = partitions_up_to(hi)
        .into_iter()
        .filter(|p| p.weight() >= lo)
        .collect();
    let mut out = Vec::with_capacity(basis.len());
    for la in &basis {
        let mut row = Vec::with_capacity(basis.len());
        for mu in &basis {
            let state = module.apply_tilde_partition(la, &VermaState::basis(mu.clone()));
            let entry = if la.weight() >= mu.weight() {
                // degree arguments force a scalar multiple of the generator
                state.coeff(&Partition::empty())
            } else {
                match (module.params.rank, dual_weight) {
                    (0, _) => state.coeff(&Partition::empty()),
                    (1, Some(d)) => pair_hw(d, 1, &state).unwrap(),
                    _ => CoeffExpr::zero(),
                }
            };
            row.push(entry);
        }
        out.push(row);
    }
    out
}

/// Outcome of the Gram determinant factorization over `lo ≤ |λ| ≤ hi`.
#[derive(Debug, Clone)]
pub struct GramDetReport {
    /// Power of `Λ_{2r}` in the determinant.
    pub exponent: u64,
    /// The rational constant multiplying that power.
    pub constant: crate::algebra::Rat,
    /// `Σ_{i=lo}^{hi} i·p(i)`.
    pub weight_sum: u64,
    /// `Σ_{i=lo}^{hi} (total number of parts over partitions of i)`;
    /// this is the exponent the diagonal entries actually produce.
    pub part_count_sum: u64,
    /// Whether the matrix was verified block-upper-triangular with diagonal
    /// entries `(2Λ_{2r})^{ℓ(λ)} Π i^{k_i} k_i!`.
    pub structure_ok: bool,
}

/// Checks triangularity of the Gram matrix and factors its determinant as
/// `constant · Λ_{2r}^exponent`. Works symbolically: the determinant is the
/// product of the diagonal entries, each a rational multiple of a power of
/// the top eigenvalue.
pub fn gram_det_check(module: &VermaModule, lo: u32, hi: u32) -> GramDetReport {
    use num_traits::One;
    let basis: Vec<Partition> = partitions_up_to(hi)
        .into_iter()
        .filter(|p| p.weight() >= lo)
        .collect();
    let top = module.params.eigenvalues.last().unwrap().clone();
    let mut structure_ok = true;
    let mut exponent = 0u64;
    let mut constant = crate::algebra::Rat::one();
    for la in &basis {
        for mu in &basis {
            let state = module.apply_tilde_partition(la, &VermaState::basis(mu.clone()));
            if la.weight() > mu.weight() || (la.weight() == mu.weight() && la != mu) {
                if !state.is_zero() {
                    structure_ok = false;
                }
            } else if la == mu {
                // expect (2Λ_{2r})^{ℓ(λ)} Π i^{k_i} k_i!
                let ell = la.len() as u32;
                let mut expect = CoeffExpr::one();
                for part in la.parts().iter().collect::<std::collections::BTreeSet<_>>() {
                    let k = la.multiplicity(*part);
                    let mut fact = rat_i(1);
                    for j in 1..=k {
                        fact *= rat_i(j as i64);
                    }
                    let scale = rat_i(*part as i64).pow(k as i32) * fact;
                    expect = expect.mul(&CoeffExpr::Rat(scale));
                }
                expect = expect.mul(&top.scale_int(2).pow(ell));
                let diag = state.coeff(&Partition::empty());
                if !state.sub(&VermaState::generator().scale(&diag)).is_zero()
                    || !diag.sub(&expect).is_zero()
                {
                    structure_ok = false;
                }
                exponent += ell as u64;
                let mut scalar = rat_i(1);
                for part in la.parts().iter().collect::<std::collections::BTreeSet<_>>() {
                    let k = la.multiplicity(*part);
                    let mut fact = rat_i(1);
                    for j in 1..=k {
                        fact *= rat_i(j as i64);
                    }
                    scalar *= rat_i(*part as i64).pow(k as i32) * fact;
                }
                constant *= scalar * rat_i(2).pow(ell as i32);
            }
        }
    }
    let weight_sum: u64 = (lo..=hi)
        .map(|i| i as u64 * crate::partitions::partition_count(i))
        .sum();
    let part_count_sum: u64 = (lo..=hi)
        .map(|i| {
            crate::partitions::partitions_of(i)
                .iter()
                .map(|p| p.len() as u64)
                .sum::<u64>()
        })
        .sum();
    GramDetReport { exponent, constant, weight_sum, part_count_sum, structure_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CoeffExpr, Symbols};

    fn rank1_module() -> VermaModule {
        let mut b = Symbols::builder();
        let c = b.add("c", false);
        let la1 = b.add("La1", false);
        let la2 = b.add("La2", true);
        let syms = b.finish();
        let params = ModuleParams::new(
            1,
            CoeffExpr::var(c),
            vec![CoeffExpr::var(la1), CoeffExpr::var(la2)],
        )
        .unwrap();
        VermaModule::new(params, syms)
    }

    #[test]
    fn whittaker_annihilation() {
        let m = rank1_module();
        assert!(m.apply(3, &VermaState::generator()).is_zero());
        assert_eq!(
            m.apply(2, &VermaState::generator()),
            VermaState::generator().scale(&CoeffExpr::var(m.syms.id("La2").unwrap()))
        );
    }

    #[test]
    fn one_step_commutator_kills() {
        // L_3 L_0 |Λ⟩ = [L_3, L_0]|Λ⟩ = 3 L_3 |Λ⟩ = 0 at rank 1
        let m = rank1_module();
        let v = VermaState::basis(Partition::new(vec![1]));
        assert!(m.apply(3, &v).is_zero());
    }

    #[test]
    fn tilde_leading_term_on_l0() {
        // L̃_2 L_0 |Λ'⟩ = 2·1·Λ_2 |Λ'⟩ at rank 1
        let m = rank1_module();
        let v = VermaState::basis(Partition::new(vec![1]));
        let got = m.apply_tilde(2, &v);
        let la2 = CoeffExpr::var(m.syms.id("La2").unwrap());
        assert_eq!(got, VermaState::generator().scale(&la2.scale_int(2)));
    }

    #[test]
    fn degenerate_module_rejected() {
        let mut b = Symbols::builder();
        let la1 = b.add("La1", false);
        let _ = b.finish();
        assert_eq!(
            ModuleParams::new(1, CoeffExpr::one(), vec![CoeffExpr::var(la1), CoeffExpr::zero()])
                .unwrap_err(),
            VermaError::DegenerateTop
        );
    }

    #[test]
    fn hw_pairing_basics() {
        let m = rank1_module();
        let mut bld = Symbols::builder();
        let d = bld.add("Ds", false);
        let _s = bld.finish();
        let delta = CoeffExpr::var(d);
        assert!(pair_hw(&delta, 1, &VermaState::generator()).unwrap().is_one());
        let l0 = VermaState::basis(Partition::new(vec![1]));
        assert_eq!(pair_hw(&delta, 1, &l0).unwrap(), delta);
        let lm1 = VermaState::basis(Partition::new(vec![2]));
        assert!(pair_hw(&delta, 1, &lm1).unwrap().is_zero());
        let _ = m;
    }
}
