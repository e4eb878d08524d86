//! Vertex-operator constructors and checkers.
//!
//! Four families are built order by order in the expansion variable:
//! - [`build_regular_vo`]: the classical operator between rank-0 modules
//! - [`build_rank0_vo`]: the rank-0 operator between two rank-r modules,
//!   solved by triangular back-substitution in the shifted-generator basis
//! - [`build_rankr_vo`]: the operator from a rank-0 module into a rank-r
//!   module, with the first-order derivations in the Fock parameters
//! - [`build_delta0_vo`]: its weight-zero special case in closed form
//!
//! [`check_vo_relations`] re-derives every defining relation by independent
//! generator application and reports exact residuals;
//! [`null_vector_constraints`] evaluates the level-two degeneracy relations.

mod rank0;
mod rankr;
mod regular;

pub use rank0::{build_rank0_vo, Rank0Params};
pub use rankr::{build_delta0_vo, build_rankr_vo, Delta0Params, RankRParams};
pub use regular::{build_regular_vo, RegularParams};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{AlgebraError, CoeffExpr, SolveError, SymId, Symbols};
use crate::verma::{VermaError, VermaModule, VermaState};

/// Which family a [`VOExpansion`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VOFamily {
    Regular,
    Rank0OnRankR,
    RankR,
    Delta0,
}

/// Extra defining data kept for relation checking.
#[derive(Debug, Clone)]
pub enum VOData {
    Regular {
        d1: CoeffExpr,
        d2: CoeffExpr,
        d3: CoeffExpr,
    },
    Rank0 {
        /// Source eigenvalues `(Λ_r, …, Λ_{2r})`.
        lambda_src: Vec<CoeffExpr>,
        delta: CoeffExpr,
        beta_r: CoeffExpr,
    },
    RankR {
        /// Fock parameters `(λ₀, …, λ_r)` of the target realization.
        lambda: Vec<CoeffExpr>,
        a: CoeffExpr,
        delta: CoeffExpr,
        rho: CoeffExpr,
    },
    Delta0 {
        lambda: Vec<CoeffExpr>,
        rho: CoeffExpr,
    },
}

/// A truncated vertex operator: the exponents of the prefactor, the
/// exponential coefficients, and the expansion states `v_0..v_M` in the
/// target module.
pub struct VOExpansion {
    pub family: VOFamily,
    pub rank: usize,
    pub syms: Arc<Symbols>,
    pub alpha: CoeffExpr,
    /// `β_1..β_r` (empty for the regular family).
    pub betas: Vec<CoeffExpr>,
    pub target: Arc<VermaModule>,
    pub states: Vec<VermaState>,
    pub order: usize,
    pub data: VOData,
}

#[derive(Debug)]
pub enum VoError {
    /// A pivot that should be a nonzero multiple of the top eigenvalue
    /// vanished under the given specialization.
    SingularPivot(String),
    /// The requested order is too small to determine the data.
    OrderTooSmall,
    /// The defining linear system did not determine all unknowns.
    UnderdeterminedSystem(String),
    /// The defining linear system is inconsistent at the given order.
    Inconsistent(String),
    KindMismatch,
    Verma(VermaError),
    Algebra(AlgebraError),
    Solve(SolveError),
}

impl std::fmt::Display for VoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VoError::SingularPivot(p) => write!(f, "singular pivot: {p}"),
            VoError::OrderTooSmall => write!(f, "expansion order too small"),
            VoError::UnderdeterminedSystem(s) => write!(f, "underdetermined system: {s}"),
            VoError::Inconsistent(s) => write!(f, "inconsistent relations: {s}"),
            VoError::KindMismatch => write!(f, "operation does not apply to this family"),
            VoError::Verma(e) => write!(f, "{e}"),
            VoError::Algebra(e) => write!(f, "{e}"),
            VoError::Solve(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for VoError {}

impl From<VermaError> for VoError {
    fn from(e: VermaError) -> Self {
        VoError::Verma(e)
    }
}

impl From<AlgebraError> for VoError {
    fn from(e: AlgebraError) -> Self {
        VoError::Algebra(e)
    }
}

impl From<SolveError> for VoError {
    fn from(e: SolveError) -> Self {
        VoError::Solve(e)
    }
}

/// One residual of a defining relation.
#[derive(Debug)]
pub struct RelationResidual {
    pub generator: i64,
    pub order: usize,
    pub residual: VermaState,
}

/// Report of [`check_vo_relations`]: all residuals, which must vanish.
#[derive(Debug)]
pub struct RelationReport {
    pub residuals: Vec<RelationResidual>,
}

impl RelationReport {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(|r| r.residual.is_zero())
    }

    pub fn failures(&self) -> Vec<(i64, usize)> {
        self.residuals
            .iter()
            .filter(|r| !r.residual.is_zero())
            .map(|r| (r.generator, r.order))
            .collect()
    }
}

impl VOExpansion {
    pub fn state(&self, m: usize) -> &VermaState {
        &self.states[m]
    }

    /// Generator relation right-hand side for this family.
    ///
    /// For every family this is the coefficient-wise consequence of the
    /// defining commutation relation applied to the generating vector of the
    /// source module. Terms in `v_k` with `k > m_max` are not represented;
    /// the caller restricts `n` accordingly.
    fn relation_rhs(&self, n: i64, m: usize) -> VermaState {
        match &self.data {
            VOData::Regular { d1, d2, .. } => {
                // L_n v_m = δ_{n,0} Δ₁ v_m + (α + (n+1)Δ₂ + m − n) v_{m−n},  n ≥ 0
                let mut out = VermaState::zero();
                if n == 0 {
                    out = out.add(&self.states[m].scale(d1));
                }
                let k = m as i64 - n;
                if k >= 0 {
                    let coeff = self
                        .alpha
                        .add(&d2.scale_int(n + 1))
                        .add(&CoeffExpr::int(m as i64 - n));
                    out = out.add(&self.states[k as usize].scale(&coeff));
                }
                out
            }
            VOData::Rank0 { lambda_src, delta, .. } => {
                // L_n v_m = 1_{r≤n≤2r} Λ_n v_m − Σ_i iβ_i v_{m−n+i}
                //           + (α + (n+1)Δ + m − n) v_{m−n},   n ≥ r
                let r = self.rank as i64;
                let mut out = VermaState::zero();
                if n >= r && n <= 2 * r {
                    out = out.add(&self.states[m].scale(&lambda_src[(n - r) as usize]));
                }
                for (i, beta) in self.betas.iter().enumerate() {
                    let i = i as i64 + 1;
                    let k = m as i64 - n + i;
                    if k >= 0 && (k as usize) < self.states.len() {
                        out = out.sub(&self.states[k as usize].scale(&beta.scale_int(i)));
                    }
                }
                let k = m as i64 - n;
                if k >= 0 {
                    let coeff = self
                        .alpha
                        .add(&delta.scale_int(n + 1))
                        .add(&CoeffExpr::int(m as i64 - n));
                    out = out.add(&self.states[k as usize].scale(&coeff));
                }
                out
            }
            VOData::RankR { .. } | VOData::Delta0 { .. } => {
                rankr::rankr_relation_rhs(self, n, m)
            }
        }
    }

    /// Smallest generator index whose relation is checkable on states alone.
    fn min_generator(&self) -> i64 {
        match self.family {
            VOFamily::Regular | VOFamily::RankR | VOFamily::Delta0 => 0,
            // relations below the rank involve the operator on descendants
            VOFamily::Rank0OnRankR => self.rank as i64,
        }
    }
}

/// Re-derives the defining relations `L_n v_m = rhs(n, m)` for
/// `min_n ≤ n ≤ M + 2r` and `0 ≤ m ≤ M` by independent application of the
/// straightening engine, and reports all residuals.
pub fn check_vo_relations(vo: &VOExpansion) -> RelationReport {
    let mut residuals = Vec::new();
    let top = vo.order;
    for m in 0..=top {
        for n in vo.min_generator()..=(top as i64 + 2 * vo.rank as i64) {
            let lhs = vo.target.apply(n, &vo.states[m]);
            let rhs = vo.relation_rhs(n, m);
            residuals.push(RelationResidual {
                generator: n,
                order: m,
                residual: lhs.sub(&rhs),
            });
        }
    }
    RelationReport { residuals }
}

/// The level-two degeneracy relations evaluated on a rank-0 operator between
/// rank-r modules: returns the expressions
/// `−b²Λ_n − Σ_{i=n−r}^{r} i(n−i) β_i β_{n−i}` for `r+1 ≤ n ≤ 2r` followed by
/// `−b²Λ_r − rβ_r((r+1)(b²+1) − 2α) − Σ_{i=1}^{r−1} i(r−i) β_i β_{r−i}`.
/// All must vanish for the operator to satisfy the constraint.
pub fn null_vector_constraints(vo: &VOExpansion, b: &CoeffExpr) -> Result<Vec<CoeffExpr>, VoError> {
    let VOData::Rank0 { lambda_src, .. } = &vo.data else {
        return Err(VoError::KindMismatch);
    };
    let r = vo.rank as i64;
    let b2 = b.mul(b);
    let beta = |i: i64| -> CoeffExpr {
        if i >= 1 && i <= r {
            vo.betas[(i - 1) as usize].clone()
        } else {
            CoeffExpr::zero()
        }
    };
    let mut out = Vec::new();
    for n in r + 1..=2 * r {
        let mut expr = b2.mul(&lambda_src[(n - r) as usize]).neg();
        for i in n - r..=r {
            let term = beta(i).mul(&beta(n - i)).scale_int(i * (n - i));
            expr = expr.sub(&term);
        }
        out.push(expr);
    }
    // the n = r relation carries the exponent α
    let mut expr = b2.mul(&lambda_src[0]).neg();
    let paren = b2
        .add(&CoeffExpr::one())
        .scale_int(r + 1)
        .sub(&vo.alpha.scale_int(2));
    expr = expr.sub(&beta(r).mul(&paren).scale_int(r));
    for i in 1..=r - 1 {
        expr = expr.sub(&beta(i).mul(&beta(r - i)).scale_int(i * (r - i)));
    }
    out.push(expr);
    Ok(out)
}

/// Translate an expansion into a caller-side symbol table by substituting an
/// image for every symbol of the constructor table.
pub fn translate_expansion(
    vo: &VOExpansion,
    images: &BTreeMap<SymId, CoeffExpr>,
    to_syms: &Arc<Symbols>,
    to_central: CoeffExpr,
) -> Result<VOExpansion, VoError> {
    let tr = |e: &CoeffExpr| -> Result<CoeffExpr, VoError> {
        Ok(crate::jsonio::translate_coeff(e, images, to_syms)?)
    };
    let eigen: Result<Vec<_>, _> = vo
        .target
        .params
        .eigenvalues
        .iter()
        .map(tr)
        .collect();
    let params = crate::verma::ModuleParams::new(vo.rank, to_central, eigen?)?;
    let module = Arc::new(VermaModule::new(params, to_syms.clone()));
    let mut states = Vec::with_capacity(vo.states.len());
    for s in &vo.states {
        let mut ns = VermaState::zero();
        for (p, c) in &s.terms {
            ns.add_term(p.clone(), tr(c)?);
        }
        states.push(ns);
    }
    let betas: Result<Vec<_>, _> = vo.betas.iter().map(tr).collect();
    let data = match &vo.data {
        VOData::Regular { d1, d2, d3 } => VOData::Regular {
            d1: tr(d1)?,
            d2: tr(d2)?,
            d3: tr(d3)?,
        },
        VOData::Rank0 { lambda_src, delta, beta_r } => VOData::Rank0 {
            lambda_src: lambda_src.iter().map(tr).collect::<Result<_, _>>()?,
            delta: tr(delta)?,
            beta_r: tr(beta_r)?,
        },
        VOData::RankR { lambda, a, delta, rho } => VOData::RankR {
            lambda: lambda.iter().map(tr).collect::<Result<_, _>>()?,
            a: tr(a)?,
            delta: tr(delta)?,
            rho: tr(rho)?,
        },
        VOData::Delta0 { lambda, rho } => VOData::Delta0 {
            lambda: lambda.iter().map(tr).collect::<Result<_, _>>()?,
            rho: tr(rho)?,
        },
    };
    Ok(VOExpansion {
        family: vo.family,
        rank: vo.rank,
        syms: to_syms.clone(),
        alpha: tr(&vo.alpha)?,
        betas: betas?,
        target: module,
        states,
        order: vo.order,
        data,
    })
}
