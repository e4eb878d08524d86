//! The rank-0 vertex operator between two rank-r Verma modules.
//!
//! Given the source eigenvalues `(Λ_r, …, Λ_{2r})`, the dimension Δ and the
//! top exponential coefficient `β_r`, the target satisfies
//! `Λ'_n = Λ_n − δ_{n,r} r β_r` and the states obey, for `n ≥ r`,
//!
//! ```text
//! L_n v_m = 1_{r≤n≤2r} Λ_n v_m − Σ_i i β_i v_{m−n+i} + (α+(n+1)Δ+m−n) v_{m−n}.
//! ```
//!
//! Each order is solved by back-substitution: the shifted generators
//! `L̃_{n+r}` lower the degree by exactly `n` with leading coefficient
//! `2n k_n Λ_{2r}`, so the coefficient of every nonempty partition follows
//! from one relation component, with divisions only by rational multiples of
//! `Λ_{2r}`. The constant term of order `m` stays pending until order
//! `m + r` resolves it; `β_{r−m}` emerges at order `m < r` and `α` at order
//! `r`. The constructor runs `r` orders past the requested one so every
//! pending constant, every `β_i`, and `α` come out fully resolved.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{CoeffExpr, Poly, Rat, SymId, Symbols};
use crate::partitions::{partitions_of, Partition};
use crate::verma::{ModuleParams, VermaError, VermaModule, VermaState};

use super::{VOData, VOExpansion, VOFamily, VoError};

/// Inputs for [`build_rank0_vo`]. `None` keeps the slot symbolic.
#[derive(Debug, Clone)]
pub struct Rank0Params {
    pub rank: usize,
    /// `(Λ_r, …, Λ_{2r})` of the source module.
    pub lambda: Vec<Option<Rat>>,
    pub delta: Option<Rat>,
    pub beta_r: Option<Rat>,
    pub central: Option<Rat>,
}

impl Rank0Params {
    pub fn symbolic(rank: usize) -> Self {
        Rank0Params {
            rank,
            lambda: vec![None; rank + 1],
            delta: None,
            beta_r: None,
            central: None,
        }
    }
}

/// Symbol table of the constructor: `c, D, b{r}, La{r}..La{2r}` and the
/// pending constants `phi1..phiK` (all eliminated before returning).
fn rank0_symbols(rank: usize, orders: usize) -> (Arc<Symbols>, Vec<SymId>) {
    let mut b = Symbols::builder();
    b.add("c", false);
    b.add("D", false);
    b.add(&format!("b{rank}"), false);
    for n in rank..=2 * rank {
        // only the top eigenvalue is inverted
        b.add(&format!("La{n}"), n == 2 * rank);
    }
    let mut phis = Vec::new();
    for k in 1..=orders {
        phis.push(b.add(&format!("phi{k}"), false));
    }
    (b.finish(), phis)
}

pub fn build_rank0_vo(params: &Rank0Params, order: usize) -> Result<VOExpansion, VoError> {
    let r = params.rank;
    if r < 1 {
        return Err(VoError::KindMismatch);
    }
    if params.lambda.len() != r + 1 {
        return Err(VoError::Verma(VermaError::BadEigenvalueCount));
    }
    if order < 1 {
        return Err(VoError::OrderTooSmall);
    }
    // run r extra orders so every pending constant resolves
    let top = order + r;
    let (syms, phis) = rank0_symbols(r, top);
    let value = |name: String, v: &Option<Rat>| -> CoeffExpr {
        match v {
            Some(x) => CoeffExpr::Rat(x.clone()),
            None => CoeffExpr::var(syms.id(&name).unwrap()),
        }
    };
    let central = value("c".into(), &params.central);
    let delta = value("D".into(), &params.delta);
    let beta_r = value(format!("b{r}"), &params.beta_r);
    let lambda_src: Vec<CoeffExpr> = (r..=2 * r)
        .map(|n| value(format!("La{n}"), &params.lambda[n - r]))
        .collect();
    // target eigenvalues Λ'_n = Λ_n − δ_{n,r} r β_r
    let mut lambda_tgt = lambda_src.clone();
    lambda_tgt[0] = lambda_tgt[0].sub(&beta_r.scale_int(r as i64));
    let module = Arc::new(VermaModule::new(
        ModuleParams::new(r, central, lambda_tgt).map_err(|e| match e {
            VermaError::DegenerateTop => VoError::SingularPivot("La_2r = 0".into()),
            other => VoError::Verma(other),
        })?,
        syms.clone(),
    ));
    let top_eig = module.params.eigenvalues.last().unwrap().clone();

    let mut builder = Rank0Builder {
        r: r as i64,
        syms: syms.clone(),
        module: module.clone(),
        top_eig,
        delta,
        // β_1..β_r, unresolved slots None
        betas: {
            let mut v = vec![None; r];
            v[r - 1] = Some(beta_r.clone());
            v
        },
        alpha: None,
        states: vec![VermaState::generator()],
        phis,
        phi_values: Vec::new(),
    };
    for m in 1..=top {
        builder.solve_order(m)?;
    }
    builder.finalize(order)?;

    let Rank0Builder { betas, alpha, mut states, delta, .. } = builder;
    let betas: Vec<CoeffExpr> = betas.into_iter().map(Option::unwrap).collect();
    let alpha = alpha.unwrap();
    states.truncate(order + 1);
    Ok(VOExpansion {
        family: VOFamily::Rank0OnRankR,
        rank: r,
        syms,
        alpha,
        betas,
        target: module,
        states,
        order,
        data: VOData::Rank0 { lambda_src, delta, beta_r },
    })
}

struct Rank0Builder {
    r: i64,
    syms: Arc<Symbols>,
    module: Arc<VermaModule>,
    top_eig: CoeffExpr,
    delta: CoeffExpr,
    betas: Vec<Option<CoeffExpr>>,
    alpha: Option<CoeffExpr>,
    states: Vec<VermaState>,
    phis: Vec<SymId>,
    phi_values: Vec<Option<CoeffExpr>>,
}

impl Rank0Builder {
    fn beta(&self, i: i64) -> CoeffExpr {
        self.betas[(i - 1) as usize]
            .clone()
            .expect("beta used before it is determined")
    }

    /// Right-hand side of the shifted relation
    /// `L̃_{n+r} v_m = δ_{n,0} r β_r v_m − Σ_i i β_i v_{m+i−n−r}
    ///               + (α + (n+r+1)Δ + m−n−r) v_{m−n−r}`
    /// restricted to the known terms (indices `< m`; the `δ`-term and the
    /// `i = r` term cancel at `n = 0`). `unknown` collects the coefficient
    /// of the yet-undetermined scalar at this order, if it appears.
    fn shifted_rhs(&self, n: i64, m: i64) -> (VermaState, Option<PendingScalar>) {
        let r = self.r;
        let mut out = VermaState::zero();
        let mut pending = None;
        for i in 1..=r {
            let k = m + i - n - r;
            if k < 0 || k >= m || (n == 0 && i == r) {
                continue;
            }
            match &self.betas[(i - 1) as usize] {
                Some(b) => {
                    out = out.sub(&self.states[k as usize].scale(&b.scale_int(i)));
                }
                None => {
                    // only β_{r−m} at n = 0, k = 0 can still be pending
                    debug_assert!(n == 0 && k == 0 && i == r - m);
                    pending = Some(PendingScalar::Beta {
                        index: i,
                        state_coeff: CoeffExpr::int(-i),
                    });
                }
            }
        }
        let k = m - n - r;
        if k >= 0 {
            let base = self
                .delta
                .scale_int(n + r + 1)
                .add(&CoeffExpr::int(m - n - r));
            match &self.alpha {
                Some(a) => {
                    out = out.add(&self.states[k as usize].scale(&a.add(&base)));
                }
                None => {
                    debug_assert!(n == 0 && m == r);
                    out = out.add(&self.states[k as usize].scale(&base));
                    pending = Some(PendingScalar::Alpha);
                }
            }
        }
        (out, pending)
    }

    fn solve_order(&mut self, m: i64) -> Result<(), VoError> {
        let r = self.r;
        // triangular phase: coefficients of nonempty partitions, degree
        // descending, one relation component each
        let mut v = VermaState::zero();
        for d in (1..=m as u32).rev() {
            // images of the already-accumulated part under each needed tilde
            let mut images: BTreeMap<i64, VermaState> = BTreeMap::new();
            let mut coeffs: Vec<(Partition, CoeffExpr)> = Vec::new();
            for lam in partitions_of(d) {
                let n = lam.parts()[0] as i64;
                let image = images
                    .entry(n)
                    .or_insert_with(|| self.module.apply_tilde(n + r, &v));
                let reduced = lam.without_part(n as u32).unwrap();
                let (rhs, pend) = self.shifted_rhs(n, m);
                debug_assert!(pend.is_none(), "pending scalar in a shifted relation");
                let mult = lam.multiplicity(n as u32) as i64;
                let pivot = self.top_eig.scale_int(2 * n * mult);
                let num = rhs.coeff(&reduced).sub(&image.coeff(&reduced));
                let c = num.div(&pivot, &self.syms).map_err(|e| match e {
                    crate::algebra::AlgebraError::DivisionByZero => {
                        VoError::SingularPivot(pivot.to_canonical(&self.syms))
                    }
                    other => VoError::Algebra(other),
                })?;
                coeffs.push((lam, c));
            }
            for (lam, c) in coeffs {
                v.add_term(lam, c);
            }
        }
        // pending constant term of this order
        let phi = self.phis[(m - 1) as usize];
        v.add_term(Partition::empty(), CoeffExpr::var(phi));
        while self.phi_values.len() < m as usize {
            self.phi_values.push(None);
        }

        // the n = 0 relation: its empty component determines β_{r−m} (m < r),
        // α (m = r) or the pending constant phi_{m−r} (m > r)
        let lhs = self.module.apply_tilde(r, &v);
        let (rhs, pend) = self.shifted_rhs(0, m);
        let gap = rhs.coeff(&Partition::empty()).sub(&lhs.coeff(&Partition::empty()));
        self.states.push(v);
        match pend {
            Some(PendingScalar::Beta { index, state_coeff }) => {
                // gap + state_coeff · β = 0
                let beta = gap.neg().div(&state_coeff, &self.syms)?.simplify(&self.syms);
                self.betas[(index - 1) as usize] = Some(beta);
            }
            Some(PendingScalar::Alpha) => {
                // gap includes −α·[v_0]_∅ = −α
                self.alpha = Some(gap.neg().simplify(&self.syms));
            }
            None => {
                // resolve phi_{m−r} from the linear appearance in the gap
                debug_assert!(m > r);
                let phi_old = self.phis[(m - r - 1) as usize];
                let (coef, rest) = split_linear(&gap, phi_old, &self.syms)?;
                let coef_rat = coef.as_rat().ok_or_else(|| {
                    VoError::UnderdeterminedSystem(format!(
                        "pending constant has non-unit coefficient {}",
                        coef.to_canonical(&self.syms)
                    ))
                })?;
                if num_traits::Zero::is_zero(&coef_rat) {
                    return Err(VoError::UnderdeterminedSystem(
                        "pending constant dropped out".into(),
                    ));
                }
                let value = rest
                    .neg()
                    .div(&CoeffExpr::Rat(coef_rat), &self.syms)?
                    .simplify(&self.syms);
                self.set_phi((m - r) as usize, value)?;
            }
        }
        // after the scalar of this order is fixed, the full n = 0..m
        // relations must hold identically in the remaining pendings
        self.verify_order(m)?;
        Ok(())
    }

    /// Substitute a resolved pending constant everywhere.
    fn set_phi(&mut self, k: usize, value: CoeffExpr) -> Result<(), VoError> {
        let id = self.phis[k - 1];
        // the value may itself refer to later pendings; it must not refer to
        // earlier unresolved ones
        let mut map = BTreeMap::new();
        map.insert(id, value_to_poly(&value)?);
        for s in self.states.iter_mut() {
            *s = subst_state(s, &map, &self.syms)?;
        }
        for b in self.betas.iter_mut().flatten() {
            *b = b.subst(&map, &self.syms)?.simplify(&self.syms);
        }
        if let Some(a) = &mut self.alpha {
            *a = a.subst(&map, &self.syms)?.simplify(&self.syms);
        }
        self.phi_values[k - 1] = Some(value);
        Ok(())
    }

    fn verify_order(&self, m: i64) -> Result<(), VoError> {
        for n in 0..=m {
            let lhs = self.module.apply_tilde(n + self.r, &self.states[m as usize]);
            let (rhs, pend) = self.shifted_rhs(n, m);
            if pend.is_some() {
                continue;
            }
            let diff = lhs.sub(&rhs);
            if !diff.is_zero() {
                return Err(VoError::Inconsistent(format!(
                    "residual at generator {} order {}",
                    n + self.r,
                    m
                )));
            }
        }
        Ok(())
    }

    /// All pendings up to the requested order must be resolved; chase
    /// substitution chains so no phi symbol survives.
    fn finalize(&mut self, order: usize) -> Result<(), VoError> {
        for k in (1..=order.min(self.phi_values.len())).rev() {
            if self.phi_values[k - 1].is_none() {
                return Err(VoError::UnderdeterminedSystem(format!(
                    "constant of order {k} unresolved"
                )));
            }
        }
        if self.alpha.is_none() {
            return Err(VoError::OrderTooSmall);
        }
        // sanity: returned states must be free of pending symbols
        for s in self.states.iter().take(order + 1) {
            for c in s.terms.values() {
                if contains_any(c, &self.phis) {
                    return Err(VoError::UnderdeterminedSystem(
                        "pending symbol survived".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

enum PendingScalar {
    Beta { index: i64, state_coeff: CoeffExpr },
    Alpha,
}

/// Write `e = rest + coef · phi` with `rest` free of `phi`. Requires the
/// dependence to be linear.
fn split_linear(
    e: &CoeffExpr,
    phi: SymId,
    syms: &Symbols,
) -> Result<(CoeffExpr, CoeffExpr), VoError> {
    let p = match e {
        CoeffExpr::Rat(_) => return Ok((CoeffExpr::zero(), e.clone())),
        CoeffExpr::Poly(p) => p.clone(),
        CoeffExpr::Fun(_) => {
            return Err(VoError::UnderdeterminedSystem(
                "rational function in pending resolution".into(),
            ))
        }
    };
    let mut coef = Poly::zero();
    let mut rest = Poly::zero();
    for (mono, c) in p.terms() {
        match mono.exponent(phi) {
            0 => rest.add_term(c.clone(), mono.clone()),
            1 => coef.add_term(
                c.clone(),
                mono.mul(&crate::algebra::Monomial::var_pow(phi, -1)),
            ),
            _ => {
                return Err(VoError::UnderdeterminedSystem(
                    "nonlinear pending dependence".into(),
                ))
            }
        }
    }
    Ok((
        CoeffExpr::Poly(coef).simplify(syms),
        CoeffExpr::Poly(rest).simplify(syms),
    ))
}

fn value_to_poly(v: &CoeffExpr) -> Result<Poly, VoError> {
    match v {
        CoeffExpr::Rat(r) => Ok(Poly::constant(r.clone())),
        CoeffExpr::Poly(p) => Ok(p.clone()),
        CoeffExpr::Fun(_) => Err(VoError::UnderdeterminedSystem(
            "pending constant resolved to a rational function".into(),
        )),
    }
}

fn subst_state(
    s: &VermaState,
    map: &BTreeMap<SymId, Poly>,
    syms: &Symbols,
) -> Result<VermaState, VoError> {
    let mut out = VermaState::zero();
    for (p, c) in &s.terms {
        out.add_term(p.clone(), c.subst(map, syms)?.simplify(syms));
    }
    Ok(out)
}

fn contains_any(c: &CoeffExpr, ids: &[SymId]) -> bool {
    let check_poly = |p: &Poly| {
        p.terms()
            .any(|(m, _)| m.exps().iter().any(|(s, _)| ids.contains(s)))
    };
    match c {
        CoeffExpr::Rat(_) => false,
        CoeffExpr::Poly(p) => check_poly(p),
        CoeffExpr::Fun(f) => check_poly(f.num()) || check_poly(f.den()),
    }
}
