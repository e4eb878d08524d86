//! The vertex operator between rank-0 Verma modules.
//!
//! `Φ(z)` maps `V_{Δ₁} → V_{Δ₃}` with conformal dimension `Δ₂`; acting on
//! the highest-weight vector it expands as `z^α Σ v_m z^m` with
//! `α = Δ₃ − Δ₂ − Δ₁` and `v_m` at level `m`, solved level by level from the
//! positive-generator relations via the exact linear solver.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{solve_exact, CoeffExpr, Symbols};
use crate::partitions::{partitions_of, Partition};
use crate::verma::{ModuleParams, VermaModule, VermaState};

use super::{VOData, VOExpansion, VOFamily, VoError};

/// Inputs for [`build_regular_vo`]. `None` keeps the slot symbolic.
#[derive(Debug, Clone, Default)]
pub struct RegularParams {
    pub d1: Option<crate::algebra::Rat>,
    pub d2: Option<crate::algebra::Rat>,
    pub d3: Option<crate::algebra::Rat>,
    pub central: Option<crate::algebra::Rat>,
}

/// Symbol table used by the regular constructor: `c, D1, D2, D3`.
pub fn regular_symbols() -> Arc<Symbols> {
    let mut b = Symbols::builder();
    b.add("c", false);
    b.add("D1", false);
    b.add("D2", false);
    b.add("D3", false);
    b.finish()
}

pub fn build_regular_vo(params: &RegularParams, order: usize) -> Result<VOExpansion, VoError> {
    let syms = regular_symbols();
    let value = |name: &str, v: &Option<crate::algebra::Rat>| -> CoeffExpr {
        match v {
            Some(r) => CoeffExpr::Rat(r.clone()),
            None => CoeffExpr::var(syms.id(name).unwrap()),
        }
    };
    let c = value("c", &params.central);
    let d1 = value("D1", &params.d1);
    let d2 = value("D2", &params.d2);
    let d3 = value("D3", &params.d3);
    let module = Arc::new(VermaModule::new(
        ModuleParams::new(0, c, vec![d3.clone()])?,
        syms.clone(),
    ));
    let alpha = d3.sub(&d2).sub(&d1);
    let mut states = vec![VermaState::generator()];
    for m in 1..=order {
        states.push(solve_level(&module, &alpha, &d2, &states, m)?);
    }
    Ok(VOExpansion {
        family: VOFamily::Regular,
        rank: 0,
        syms,
        alpha,
        betas: Vec::new(),
        target: module,
        states,
        order,
        data: VOData::Regular { d1, d2, d3 },
    })
}

/// Solve level `m`: unknown coefficients on the level-m basis, relations
/// `L_n v_m = (α + (n+1)Δ₂ + m − n) v_{m−n}` for `n = 1..m`.
fn solve_level(
    module: &VermaModule,
    alpha: &CoeffExpr,
    d2: &CoeffExpr,
    states: &[VermaState],
    m: usize,
) -> Result<VermaState, VoError> {
    let basis = partitions_of(m as u32);
    let mut rows: Vec<Vec<CoeffExpr>> = Vec::new();
    let mut rhs: Vec<CoeffExpr> = Vec::new();
    // images of basis vectors under each L_n
    for n in 1..=m as i64 {
        let target_rhs = {
            let k = (m as i64 - n) as usize;
            let coeff = alpha
                .add(&d2.scale_int(n + 1))
                .add(&CoeffExpr::int(m as i64 - n));
            states[k].scale(&coeff)
        };
        let images: Vec<VermaState> = basis
            .iter()
            .map(|p| module.apply(n, &VermaState::basis(p.clone())))
            .collect();
        // components live at level m − n
        let comps: std::collections::BTreeSet<Partition> = images
            .iter()
            .flat_map(|s| s.terms.keys().cloned())
            .chain(target_rhs.terms.keys().cloned())
            .collect();
        for comp in comps {
            let row: Vec<CoeffExpr> = images.iter().map(|s| s.coeff(&comp)).collect();
            rows.push(row);
            rhs.push(target_rhs.coeff(&comp));
        }
    }
    let sol = solve_exact(&rows, &rhs, &module.syms).map_err(|e| match e {
        crate::algebra::SolveError::SingularMatrix(p) => VoError::SingularPivot(p),
        crate::algebra::SolveError::Underdetermined(s) => VoError::UnderdeterminedSystem(s),
        crate::algebra::SolveError::Inconsistent(s) => VoError::Inconsistent(s),
        other => VoError::Solve(other),
    })?;
    let mut out = VermaState::zero();
    for (p, c) in basis.into_iter().zip(sol) {
        out.add_term(p, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat_i;

    #[test]
    fn alpha_and_first_level() {
        let vo = build_regular_vo(&RegularParams::default(), 1).unwrap();
        let syms = &vo.syms;
        // α = D3 − D2 − D1
        assert_eq!(vo.alpha.to_canonical(syms), "D3 - D2 - D1");
        // v₁ = (−Δ₁+Δ₂+Δ₃)/(2Δ₃) L_{−1}
        let c = vo.states[1].coeff(&Partition::new(vec![1]));
        let d1 = CoeffExpr::var(syms.id("D1").unwrap());
        let d2 = CoeffExpr::var(syms.id("D2").unwrap());
        let d3 = CoeffExpr::var(syms.id("D3").unwrap());
        let expect = d2
            .add(&d3)
            .sub(&d1)
            .div_or_promote(&d3.scale_int(2), syms)
            .unwrap();
        assert!(c.sub(&expect).simplify(syms).is_zero());
    }

    #[test]
    fn identity_operator_is_translation() {
        // Δ₂ = 0, Δ₃ = Δ₁ numeric: v_m = L_{−1}^m/m! |Δ₁⟩
        let params = RegularParams {
            d1: Some(rat_i(3)),
            d2: Some(rat_i(0)),
            d3: Some(rat_i(3)),
            central: Some(rat_i(1)),
        };
        let vo = build_regular_vo(&params, 3).unwrap();
        let m = &vo.target;
        let mut expect = VermaState::generator();
        let mut fact = rat_i(1);
        for k in 1..=3usize {
            expect = m.apply(-1, &expect);
            fact *= rat_i(k as i64);
            let scaled = expect.scale(&CoeffExpr::Rat(rat_i(1) / fact.clone()));
            assert_eq!(vo.states[k], scaled, "level {k}");
        }
    }
}
