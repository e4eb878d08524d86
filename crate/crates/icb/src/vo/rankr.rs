//! The vertex operator from a rank-0 module into a rank-r module, and its
//! weight-zero special case.
//!
//! The defining commutation relation carries first-order derivations
//! `D_i = Σ_p p λ_{p+i} ∂/∂λ_p` in the Fock parameters of the target. On
//! states they act through the formal derivative of the coefficients plus
//! the connection on the generating vector,
//! `D_i |Λ⟩ = (L_i − s_i)|Λ⟩` with
//! `s_i = ½ Σ_j λ_j λ_{i−j} − (i+1)ρλ_i + (−1)^{i+1} i β_i` (and
//! `s_0 = α + Δ + λ₀(−ρ + λ₀/2)`). The derivation constraints
//! `D_i(β_k) = (−1)^i (k+i) β_{k+i}` are used to substitute every derivative
//! of an exponential coefficient; with them all relation terms involving
//! states beyond the current order cancel identically (this is asserted).
//!
//! Each order is solved like the rank-0 case: the relations at generator
//! indices above the rank are triangular in the shifted basis with pivots
//! `2n k_n Λ_{2r}`; the relations at indices `r..0` form a small linear
//! system that pins the constant term (and, at the first order, the lower
//! exponential coefficients `β_i` and the exponent `α`, each expanded over a
//! graded monomial basis in the Fock parameters).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{solve_exact, CoeffExpr, Monomial, Poly, Rat, SymId, Symbols};
use crate::partitions::{partitions_of, Partition};
use crate::verma::{ModuleParams, VermaError, VermaModule, VermaState};

use super::{VOData, VOExpansion, VOFamily, VoError};

/// Inputs for [`build_rankr_vo`]. `None` keeps a slot symbolic.
#[derive(Debug, Clone)]
pub struct RankRParams {
    pub rank: usize,
    /// Fock parameters `(λ₀, …, λ_r)`; `λ_r` must not be bound to zero.
    pub lambda: Vec<Option<Rat>>,
    pub a: Option<Rat>,
    pub delta: Option<Rat>,
    pub rho: Option<Rat>,
    pub central: Option<Rat>,
}

impl RankRParams {
    pub fn symbolic(rank: usize) -> Self {
        RankRParams {
            rank,
            lambda: vec![None; rank + 1],
            a: None,
            delta: None,
            rho: None,
            central: None,
        }
    }
}

/// Inputs for [`build_delta0_vo`].
#[derive(Debug, Clone)]
pub struct Delta0Params {
    pub rank: usize,
    pub lambda: Vec<Option<Rat>>,
    pub rho: Option<Rat>,
    pub central: Option<Rat>,
}

impl Delta0Params {
    pub fn symbolic(rank: usize) -> Self {
        Delta0Params { rank, lambda: vec![None; rank + 1], rho: None, central: None }
    }
}

/// Symbol table: `c, a, D, rho, l0..lr` (`lr` Laurent).
fn rankr_symbols(rank: usize) -> Arc<Symbols> {
    let mut b = Symbols::builder();
    b.add("c", false);
    b.add("a", false);
    b.add("D", false);
    b.add("rho", false);
    for k in 0..=rank {
        b.add(&format!("l{k}"), k == rank);
    }
    b.finish()
}

/// Shared context for the rank-r relation machinery.
struct RankRCtx {
    r: i64,
    syms: Arc<Symbols>,
    module: Arc<VermaModule>,
    lambda: Vec<CoeffExpr>,
    lambda_ids: Vec<SymId>,
    rho: CoeffExpr,
    delta: CoeffExpr,
}

impl RankRCtx {
    /// `½ Σ_{j} λ_j λ_{n−j}` with out-of-range parameters zero.
    fn half_square(&self, n: i64) -> CoeffExpr {
        let r = self.r;
        let mut acc = CoeffExpr::zero();
        for j in 0..=n {
            if j > r || n - j > r || n - j < 0 {
                continue;
            }
            acc = acc.add(&self.lambda[j as usize].mul(&self.lambda[(n - j) as usize]));
        }
        acc.mul(&CoeffExpr::rational(1, 2))
    }

    /// Formal derivation `D_i` on a coefficient polynomial.
    fn d_formal(&self, i: i64, c: &CoeffExpr) -> CoeffExpr {
        let p = match c {
            CoeffExpr::Rat(_) => return CoeffExpr::zero(),
            CoeffExpr::Poly(p) => p.clone(),
            CoeffExpr::Fun(_) => panic!("derivation applied to a rational function"),
        };
        let mut out = Poly::zero();
        for q in 1..=(self.r - i) {
            let dp = p.derivative(self.lambda_ids[q as usize]);
            if dp.is_zero() {
                continue;
            }
            let factor = Poly::var(self.lambda_ids[(q + i) as usize]).scale(&crate::algebra::rat_i(q));
            out = out.add(&dp.mul(&factor));
        }
        CoeffExpr::Poly(out).simplify(&self.syms)
    }

    /// Substituted derivative values `D_i(β_k) = (−1)^i (k+i) β_{k+i}`.
    fn d_beta(&self, i: i64, k: i64, betas: &[CoeffExpr]) -> CoeffExpr {
        let target = k + i;
        if target > self.r || target < 1 {
            return CoeffExpr::zero();
        }
        let sign = if i % 2 == 0 { 1 } else { -1 };
        betas[(target - 1) as usize].scale_int(sign * target)
    }

    /// Connection scalar `s_i` with `D_i|Λ⟩ = (L_i − s_i)|Λ⟩`.
    fn connection_scalar(&self, i: i64, betas: &[CoeffExpr], alpha: &CoeffExpr) -> CoeffExpr {
        if i == 0 {
            // α + Δ + λ₀(−ρ + λ₀/2)
            let l0 = &self.lambda[0];
            let inner = l0.mul(&CoeffExpr::rational(1, 2)).sub(&self.rho);
            alpha.add(&self.delta).add(&l0.mul(&inner))
        } else {
            let sign = if i % 2 == 0 { -1 } else { 1 };
            self.half_square(i)
                .sub(&self.rho.mul(&self.lambda[i as usize]).scale_int(i + 1))
                .add(&betas[(i - 1) as usize].scale_int(sign * i))
        }
    }

    /// Full derivation on a state: formal part plus connection.
    fn d_state(
        &self,
        i: i64,
        v: &VermaState,
        betas: &[CoeffExpr],
        alpha: &CoeffExpr,
    ) -> VermaState {
        let mut out = VermaState::zero();
        // w_i = L_i|Λ⟩ − s_i|Λ⟩
        let w = {
            let gen = VermaState::generator();
            let li = self.module.apply(i, &gen);
            li.sub(&gen.scale(&self.connection_scalar(i, betas, alpha)))
        };
        for (p, c) in &v.terms {
            out.add_term(p.clone(), self.d_formal(i, c));
            // c · L_λ w_i
            let indices: Vec<i64> = p
                .parts()
                .iter()
                .map(|&part| self.r - part as i64)
                .collect();
            out = out.add(&self.module.apply_word(&indices, &w).scale(c));
        }
        out
    }

    /// Right-hand side of the relation for generator `n ≥ 0` at order `m`,
    /// assembled from the given states. Terms referencing `states[m]` are
    /// included; terms beyond index `m` must cancel and are asserted to.
    fn relation_rhs(
        &self,
        n: i64,
        m: usize,
        states: &[VermaState],
        betas: &[CoeffExpr],
        alpha: &CoeffExpr,
    ) -> VermaState {
        let r = self.r;
        let mut out = VermaState::zero();
        let mut future: BTreeMap<i64, CoeffExpr> = BTreeMap::new();
        let mut add_plain = |k: i64, c: CoeffExpr, out: &mut VermaState| {
            if c.is_zero() || k < 0 {
                return;
            }
            if k as usize <= m {
                *out = out.add(&states[k as usize].scale(&c));
            } else {
                let e = future.entry(k).or_insert_with(CoeffExpr::zero);
                *e = e.add(&c);
            }
        };
        if n == 0 {
            add_plain(m as i64, self.delta.clone(), &mut out);
        }
        // (α + m − n − (n+1)ρλ₀) v_{m−n}
        let k0 = m as i64 - n;
        let c0 = alpha
            .add(&CoeffExpr::int(m as i64 - n))
            .sub(&self.rho.mul(&self.lambda[0]).scale_int(n + 1));
        add_plain(k0, c0, &mut out);
        // (n+1) D_0(v_{m−n})
        if k0 >= 0 {
            out = out.add(
                &self
                    .d_state(0, &states[k0 as usize], betas, alpha)
                    .scale(&CoeffExpr::int(n + 1)),
            );
        }
        // Σ_{i=1}^{r−1} C(n+1, i+1) D_i(v_{m−n+i})
        for i in 1..=r - 1 {
            let k = m as i64 - n + i;
            let b = binom(n + 1, i + 1);
            if b == 0 || k < 0 {
                continue;
            }
            assert!(k as usize <= m, "derivation reaches beyond current order");
            out = out.add(
                &self
                    .d_state(i, &states[k as usize], betas, alpha)
                    .scale(&CoeffExpr::int(b)),
            );
        }
        // − Σ_i (i β_i + (i+1) ρ λ_i C(n+1, i+1)) v_{m−n+i}
        for i in 1..=r {
            let k = m as i64 - n + i;
            let mut c = betas[(i - 1) as usize].scale_int(i);
            let b = binom(n + 1, i + 1);
            if b != 0 {
                c = c.add(&self.rho.mul(&self.lambda[i as usize]).scale_int((i + 1) * b));
            }
            add_plain(k, c.neg(), &mut out);
        }
        // Σ_{i,j} C(n+1, i) D_{i−1}(β_j) v_{m−n−1+i+j}
        for i in 1..=n + 1 {
            let b = binom(n + 1, i);
            if b == 0 {
                continue;
            }
            for j in 1..=r {
                let k = m as i64 - n - 1 + i + j;
                let val = self.d_beta(i - 1, j, betas);
                add_plain(k, val.scale_int(b), &mut out);
            }
        }
        // ½ Σ_{i,j} λ_i λ_j C(n+1, i+j+1) v_{m−n+i+j}
        for i in 0..=r {
            for j in 0..=r {
                let b = binom(n + 1, i + j + 1);
                if b == 0 {
                    continue;
                }
                let k = m as i64 - n + i + j;
                let c = self.lambda[i as usize]
                    .mul(&self.lambda[j as usize])
                    .mul(&CoeffExpr::rational(b, 2));
                add_plain(k, c, &mut out);
            }
        }
        for (k, c) in future {
            assert!(
                c.simplify(&self.syms).is_zero(),
                "uncancelled coefficient of order {k} in relation {n}"
            );
        }
        out
    }
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Relation right-hand side used by the relation checker, for the rank-r and
/// weight-zero families.
pub(super) fn rankr_relation_rhs(vo: &VOExpansion, n: i64, m: usize) -> VermaState {
    let (lambda, rho) = match &vo.data {
        VOData::RankR { lambda, rho, .. } => (lambda.clone(), rho.clone()),
        VOData::Delta0 { lambda, rho } => (lambda.clone(), rho.clone()),
        _ => unreachable!("rank-r relation on a different family"),
    };
    let delta = match &vo.data {
        VOData::RankR { delta, .. } => delta.clone(),
        _ => CoeffExpr::zero(),
    };
    let lambda_ids: Vec<SymId> = (0..=vo.rank)
        .map(|k| {
            vo.syms
                .id(&format!("l{k}"))
                .unwrap_or(SymId(u32::MAX))
        })
        .collect();
    let ctx = RankRCtx {
        r: vo.rank as i64,
        syms: vo.syms.clone(),
        module: vo.target.clone(),
        lambda,
        lambda_ids,
        rho,
        delta,
    };
    ctx.relation_rhs(n, m, &vo.states, &vo.betas, &vo.alpha)
}

pub fn build_delta0_vo(params: &Delta0Params, order: usize) -> Result<VOExpansion, VoError> {
    let r = params.rank;
    if params.lambda.len() != r + 1 {
        return Err(VoError::Verma(VermaError::BadEigenvalueCount));
    }
    let syms = rankr_symbols(r);
    let value = |name: String, v: &Option<Rat>| -> CoeffExpr {
        match v {
            Some(x) => CoeffExpr::Rat(x.clone()),
            None => CoeffExpr::var(syms.id(&name).unwrap()),
        }
    };
    let central = value("c".into(), &params.central);
    let rho = value("rho".into(), &params.rho);
    let lambda: Vec<CoeffExpr> = (0..=r)
        .map(|k| value(format!("l{k}"), &params.lambda[k]))
        .collect();
    // Λ_n = ½ Σ λ_i λ_{n−i} − δ_{n,r} (r+1) ρ λ_r
    let mut eigen = Vec::new();
    for n in r as i64..=2 * r as i64 {
        let mut acc = CoeffExpr::zero();
        for j in 0..=n {
            if j > r as i64 || n - j > r as i64 {
                continue;
            }
            acc = acc.add(&lambda[j as usize].mul(&lambda[(n - j) as usize]));
        }
        acc = acc.mul(&CoeffExpr::rational(1, 2));
        if n == r as i64 {
            acc = acc.sub(&rho.mul(&lambda[r]).scale_int(r as i64 + 1));
        }
        eigen.push(acc);
    }
    let module = Arc::new(VermaModule::new(
        ModuleParams::new(r, central, eigen).map_err(|e| match e {
            VermaError::DegenerateTop => VoError::SingularPivot("La_2r = 0".into()),
            other => VoError::Verma(other),
        })?,
        syms.clone(),
    ));
    // v_m = L_{−1}^m / m!
    let mut states = vec![VermaState::generator()];
    let mut raw = VermaState::generator();
    let mut fact = crate::algebra::rat_i(1);
    for k in 1..=order {
        raw = module.apply(-1, &raw);
        fact *= crate::algebra::rat_i(k as i64);
        states.push(raw.scale(&CoeffExpr::Rat(crate::algebra::rat_i(1) / fact.clone())));
    }
    Ok(VOExpansion {
        family: VOFamily::Delta0,
        rank: r,
        syms,
        alpha: CoeffExpr::zero(),
        betas: vec![CoeffExpr::zero(); r],
        target: module,
        states,
        order,
        data: VOData::Delta0 { lambda, rho },
    })
}

pub fn build_rankr_vo(params: &RankRParams, order: usize) -> Result<VOExpansion, VoError> {
    let r = params.rank;
    if r < 1 || r > 3 {
        return Err(VoError::KindMismatch);
    }
    if params.lambda.len() != r + 1 {
        return Err(VoError::Verma(VermaError::BadEigenvalueCount));
    }
    let syms = rankr_symbols(r);
    let value = |name: String, v: &Option<Rat>| -> CoeffExpr {
        match v {
            Some(x) => CoeffExpr::Rat(x.clone()),
            None => CoeffExpr::var(syms.id(&name).unwrap()),
        }
    };
    let central = value("c".into(), &params.central);
    let a = value("a".into(), &params.a);
    let delta = value("D".into(), &params.delta);
    let rho = value("rho".into(), &params.rho);
    let lambda: Vec<CoeffExpr> = (0..=r)
        .map(|k| value(format!("l{k}"), &params.lambda[k]))
        .collect();
    let lambda_ids: Vec<SymId> = (0..=r).map(|k| syms.id(&format!("l{k}")).unwrap()).collect();
    let beta_r = a.mul(&lambda[r]);
    // Λ_n = ½ Σ λ_i λ_{n−i} + δ_{n,r} ((−1)^{r+1} r β_r − (r+1) ρ λ_r)
    let mut eigen = Vec::new();
    for n in r as i64..=2 * r as i64 {
        let mut acc = CoeffExpr::zero();
        for j in 0..=n {
            if j > r as i64 || n - j > r as i64 {
                continue;
            }
            acc = acc.add(&lambda[j as usize].mul(&lambda[(n - j) as usize]));
        }
        acc = acc.mul(&CoeffExpr::rational(1, 2));
        if n == r as i64 {
            let sign = if r % 2 == 0 { -1 } else { 1 };
            acc = acc.add(&beta_r.scale_int(sign * r as i64));
            acc = acc.sub(&rho.mul(&lambda[r]).scale_int(r as i64 + 1));
        }
        eigen.push(acc);
    }
    let module = Arc::new(VermaModule::new(
        ModuleParams::new(r, central, eigen).map_err(|e| match e {
            VermaError::DegenerateTop => VoError::SingularPivot("La_2r = 0".into()),
            other => VoError::Verma(other),
        })?,
        syms.clone(),
    ));
    let top_eig = module.params.eigenvalues.last().unwrap().clone();
    let ctx = RankRCtx {
        r: r as i64,
        syms: syms.clone(),
        module: module.clone(),
        lambda: lambda.clone(),
        lambda_ids,
        rho,
        delta,
    };

    // β_r is given; β_1..β_{r−1} and α are pinned at order one
    let mut betas: Vec<CoeffExpr> = vec![CoeffExpr::zero(); r];
    betas[r - 1] = beta_r.clone();
    let mut alpha = CoeffExpr::zero();
    let mut states = vec![VermaState::generator()];
    for m in 1..=order {
        let (v, new_betas, new_alpha) =
            solve_rankr_order(&ctx, m, &states, &betas, &alpha, &top_eig)?;
        if m == 1 && r >= 1 {
            if let Some(nb) = new_betas {
                betas = nb;
            }
            if let Some(na) = new_alpha {
                alpha = na;
            }
        }
        states.push(v);
        // verify all relations at this order
        for n in 0..=(m as i64 + 2 * r as i64) {
            let lhs = module.apply(n, &states[m]);
            let rhs = ctx.relation_rhs(n, m, &states, &betas, &alpha);
            if !lhs.sub(&rhs).is_zero() {
                return Err(VoError::Inconsistent(format!(
                    "rank-r relation {n} fails at order {m}"
                )));
            }
        }
    }
    Ok(VOExpansion {
        family: VOFamily::RankR,
        rank: r,
        syms,
        alpha: alpha.clone(),
        betas,
        target: module,
        states,
        order,
        data: VOData::RankR { lambda, a, delta, rho },
    })
}

/// Monomial candidates for the unknown slots at a given order: Laurent
/// monomials in the Fock parameters with prescribed grading weight
/// `Σ_k k·e_k` (the derivation weight), bounded degrees.
fn graded_monomials(
    lambda_ids: &[SymId],
    weight: i64,
    l0_max: i32,
    pos_max: i32,
    top_min: i32,
) -> Vec<Monomial> {
    let r = lambda_ids.len() - 1;
    let mut out = Vec::new();
    // enumerate exponents of l1..lr with the top allowed negative
    fn rec(
        ids: &[SymId],
        k: usize,
        r: usize,
        acc: &mut Vec<(SymId, i32)>,
        weight_left: i64,
        pos_left: i32,
        top_min: i32,
        out: &mut Vec<Vec<(SymId, i32)>>,
    ) {
        if k > r {
            if weight_left == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let lo = if k == r { top_min } else { 0 };
        for e in lo..=pos_left {
            if e != 0 {
                acc.push((ids[k], e));
            }
            let used = if e > 0 { e } else { 0 };
            rec(
                ids,
                k + 1,
                r,
                acc,
                weight_left - (k as i64) * (e as i64),
                pos_left - used,
                top_min,
                out,
            );
            if e != 0 {
                acc.pop();
            }
        }
    }
    let mut raw = Vec::new();
    let mut acc = Vec::new();
    rec(lambda_ids, 1, r, &mut acc, weight, pos_max, top_min, &mut raw);
    for base in raw {
        for e0 in 0..=l0_max {
            let mut pairs = base.clone();
            if e0 != 0 {
                pairs.push((lambda_ids[0], e0));
            }
            out.push(Monomial::from_pairs(pairs));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One unknown slot in the low-phase system.
#[derive(Debug, Clone)]
enum Slot {
    Constant(Monomial),
    Beta(usize, Monomial),
    Alpha(Monomial),
}

fn solve_rankr_order(
    ctx: &RankRCtx,
    m: usize,
    states: &[VermaState],
    betas_in: &[CoeffExpr],
    alpha_in: &CoeffExpr,
    top_eig: &CoeffExpr,
) -> Result<(VermaState, Option<Vec<CoeffExpr>>, Option<CoeffExpr>), VoError> {
    let r = ctx.r;
    let max_weight = ((r + 1) as u32) * m as u32;
    // triangular phase over nonempty partitions (parts ≤ r+1)
    let mut v = VermaState::zero();
    let mut all_states: Vec<VermaState> = states.to_vec();
    all_states.push(VermaState::zero()); // placeholder for v_m (unused in RHS below)
    let mut rhs_cache: BTreeMap<i64, VermaState> = BTreeMap::new();
    for d in (1..=max_weight).rev() {
        let mut images: BTreeMap<i64, VermaState> = BTreeMap::new();
        let mut coeffs: Vec<(Partition, CoeffExpr)> = Vec::new();
        for lam in partitions_of(d)
            .into_iter()
            .filter(|p| p.parts()[0] <= (r + 1) as u32)
        {
            let n = lam.parts()[0] as i64;
            let gen_index = n + r;
            let image = images
                .entry(n)
                .or_insert_with(|| ctx.module.apply_tilde(gen_index, &v));
            let reduced = lam.without_part(n as u32).unwrap();
            // RHS of the relation at generator index n+r; the v_m term
            // contributes the eigenvalue already subtracted on the left
            let rhs = rhs_cache.entry(gen_index).or_insert_with(|| {
                ctx.relation_rhs(gen_index, m, &all_states, betas_in, alpha_in)
            });
            let mult = lam.multiplicity(n as u32) as i64;
            let pivot = top_eig.scale_int(2 * n * mult);
            let num = rhs.coeff(&reduced).sub(&image.coeff(&reduced));
            let c = num
                .div_or_promote(&pivot, &ctx.syms)
                .map_err(VoError::Algebra)?
                .simplify(&ctx.syms);
            coeffs.push((lam, c));
        }
        for (lam, c) in coeffs {
            v.add_term(lam, c);
        }
    }
    // low phase: constant term (and at order one the β_i and α) over graded
    // monomial bases, solved from the relations at generator indices r..0
    let first = m == 1;
    let mut slots: Vec<Slot> = Vec::new();
    let l0_max = (2 * m + 2) as i32;
    for mono in graded_monomials(&ctx.lambda_ids, -(m as i64), l0_max, 3 * m as i32, -(m as i32 + 1)) {
        slots.push(Slot::Constant(mono));
    }
    if first {
        for k in 1..r as usize {
            for mono in graded_monomials(&ctx.lambda_ids, k as i64, 2, 3, 0) {
                slots.push(Slot::Beta(k, mono));
            }
        }
        for mono in graded_monomials(&ctx.lambda_ids, 0, 2, 0, 0) {
            slots.push(Slot::Alpha(mono));
        }
    }
    // residual of relation N as a function of the unknown assignment
    let residual = |assign: &[CoeffExpr]| -> Vec<VermaState> {
        let mut vm = v.clone();
        let mut betas = betas_in.to_vec();
        let mut alpha = alpha_in.clone();
        for (slot, x) in slots.iter().zip(assign) {
            if x.is_zero() {
                continue;
            }
            match slot {
                Slot::Constant(mono) => {
                    vm.add_term(Partition::empty(), x.mul(&CoeffExpr::Poly(Poly::term(
                        crate::algebra::rat_i(1),
                        mono.clone(),
                    ))));
                }
                Slot::Beta(k, mono) => {
                    let add = x.mul(&CoeffExpr::Poly(Poly::term(crate::algebra::rat_i(1), mono.clone())));
                    betas[k - 1] = betas[k - 1].add(&add);
                }
                Slot::Alpha(mono) => {
                    let add = x.mul(&CoeffExpr::Poly(Poly::term(crate::algebra::rat_i(1), mono.clone())));
                    alpha = alpha.add(&add);
                }
            }
        }
        let mut full = states.to_vec();
        full.push(vm.clone());
        let mut out = Vec::new();
        for gen in (0..=r).rev() {
            let lhs = ctx.module.apply(gen, &vm);
            let rhs = ctx.relation_rhs(gen, m, &full, &betas, &alpha);
            out.push(lhs.sub(&rhs));
        }
        out
    };
    let zero_assign = vec![CoeffExpr::zero(); slots.len()];
    let base = residual(&zero_assign);
    let mut columns: Vec<Vec<VermaState>> = Vec::new();
    for j in 0..slots.len() {
        let mut assign = zero_assign.clone();
        assign[j] = CoeffExpr::one();
        let res = residual(&assign);
        columns.push(
            res.into_iter()
                .zip(base.iter())
                .map(|(a, b)| a.sub(b))
                .collect(),
        );
    }
    // assemble the linear system by matching (partition, Fock monomial)
    let lambda_set: BTreeSet<SymId> = ctx.lambda_ids.iter().copied().collect();
    let mut keys: BTreeSet<(usize, Partition, Monomial)> = BTreeSet::new();
    let collect_keys =
        |res: &[VermaState], keys: &mut BTreeSet<(usize, Partition, Monomial)>| {
            for (gi, st) in res.iter().enumerate() {
                for (p, c) in &st.terms {
                    for mono in coeff_monomials(c) {
                        let (lpart, _) = split_monomial(&mono, &lambda_set);
                        keys.insert((gi, p.clone(), lpart));
                    }
                }
            }
        };
    collect_keys(&base, &mut keys);
    for col in &columns {
        collect_keys(col, &mut keys);
    }
    let mut rows: Vec<Vec<CoeffExpr>> = Vec::new();
    let mut rhs: Vec<CoeffExpr> = Vec::new();
    for (gi, p, lpart) in &keys {
        let mut row = Vec::with_capacity(slots.len());
        for col in &columns {
            row.push(extract_component(&col[*gi].coeff(p), lpart, &lambda_set, &ctx.syms));
        }
        rows.push(row);
        rhs.push(extract_component(&base[*gi].coeff(p), lpart, &lambda_set, &ctx.syms).neg());
    }
    let sol = solve_exact(&rows, &rhs, &ctx.syms).map_err(|e| match e {
        crate::algebra::SolveError::Underdetermined(s) => VoError::UnderdeterminedSystem(s),
        crate::algebra::SolveError::Inconsistent(s) => VoError::Inconsistent(s),
        other => VoError::Solve(other),
    })?;
    // apply the solution
    let mut vm = v;
    let mut betas = betas_in.to_vec();
    let mut alpha = alpha_in.clone();
    for (slot, x) in slots.iter().zip(&sol) {
        if x.is_zero() {
            continue;
        }
        let mono_val = |mono: &Monomial| {
            x.mul(&CoeffExpr::Poly(Poly::term(crate::algebra::rat_i(1), mono.clone())))
                .simplify(&ctx.syms)
        };
        match slot {
            Slot::Constant(mono) => vm.add_term(Partition::empty(), mono_val(mono)),
            Slot::Beta(k, mono) => {
                betas[k - 1] = betas[k - 1].add(&mono_val(mono)).simplify(&ctx.syms);
            }
            Slot::Alpha(mono) => {
                alpha = alpha.add(&mono_val(mono)).simplify(&ctx.syms);
            }
        }
    }
    Ok((
        vm,
        if first { Some(betas) } else { None },
        if first { Some(alpha) } else { None },
    ))
}

/// All monomials appearing in a coefficient.
fn coeff_monomials(c: &CoeffExpr) -> Vec<Monomial> {
    match c {
        CoeffExpr::Rat(r) => {
            if num_traits::Zero::is_zero(r) {
                Vec::new()
            } else {
                vec![Monomial::one()]
            }
        }
        CoeffExpr::Poly(p) => p.terms().map(|(m, _)| m.clone()).collect(),
        CoeffExpr::Fun(_) => panic!("rational function in rank-r assembly"),
    }
}

/// Split a monomial into its Fock-parameter part and the rest.
fn split_monomial(m: &Monomial, lambda_set: &BTreeSet<SymId>) -> (Monomial, Monomial) {
    let mut lpart = Vec::new();
    let mut rest = Vec::new();
    for &(s, e) in m.exps() {
        if lambda_set.contains(&s) {
            lpart.push((s, e));
        } else {
            rest.push((s, e));
        }
    }
    (Monomial::from_pairs(lpart), Monomial::from_pairs(rest))
}

/// Coefficient of a given Fock-parameter monomial inside a coefficient; the
/// result lives in the residual symbols.
fn extract_component(
    c: &CoeffExpr,
    lpart: &Monomial,
    lambda_set: &BTreeSet<SymId>,
    syms: &Symbols,
) -> CoeffExpr {
    match c {
        CoeffExpr::Rat(r) => {
            if lpart.is_one() {
                CoeffExpr::Rat(r.clone())
            } else {
                CoeffExpr::zero()
            }
        }
        CoeffExpr::Poly(p) => {
            let mut out = Poly::zero();
            for (mono, k) in p.terms() {
                let (lp, rest) = split_monomial(mono, lambda_set);
                if &lp == lpart {
                    out.add_term(k.clone(), rest);
                }
            }
            CoeffExpr::Poly(out).simplify(syms)
        }
        CoeffExpr::Fun(_) => panic!("rational function in rank-r assembly"),
    }
}
