//! Fraction-free exact linear solving.
//!
//! Bareiss-style elimination keeps every intermediate entry equal to a minor
//! of the original matrix, so divisions are exact in the coefficient ring.
//! Unit pivots (rational multiples of Laurent monomials) are preferred; the
//! solution is verified by back-substitution before it is returned.

use super::{AlgebraError, CoeffExpr, Domain, Symbols};

#[derive(Debug, Clone)]
pub enum SolveError {
    NotSquare,
    /// Matrix is singular; carries the canonical form of the determinant-like
    /// pivot expression that vanished.
    SingularMatrix(String),
    /// Fewer independent equations than unknowns; carries the indices of the
    /// undetermined columns.
    Underdetermined(String),
    /// No exact solution exists.
    Inconsistent(String),
    Algebra(AlgebraError),
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::NotSquare => write!(f, "matrix is not square"),
            SolveError::SingularMatrix(p) => write!(f, "singular matrix (vanishing pivot {p})"),
            SolveError::Underdetermined(s) => write!(f, "underdetermined system: {s}"),
            SolveError::Inconsistent(s) => write!(f, "inconsistent system: {s}"),
            SolveError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<AlgebraError> for SolveError {
    fn from(e: AlgebraError) -> Self {
        SolveError::Algebra(e)
    }
}

fn is_unit(c: &CoeffExpr) -> bool {
    match c {
        CoeffExpr::Rat(r) => !num_traits::Zero::is_zero(r),
        CoeffExpr::Poly(p) => p.as_unit().is_some(),
        CoeffExpr::Fun(f) => f.num().as_unit().is_some() && f.den().as_unit().is_some(),
    }
}

fn complexity(c: &CoeffExpr) -> usize {
    match c {
        CoeffExpr::Rat(_) => 1,
        CoeffExpr::Poly(p) => 1 + p.num_terms(),
        CoeffExpr::Fun(f) => 2 + f.num().num_terms() + f.den().num_terms(),
    }
}

/// Exact division used inside the elimination. In the polynomial domain the
/// divisibility is guaranteed by the Sylvester identity; a failure is a bug.
fn exact_div(a: &CoeffExpr, b: &CoeffExpr, syms: &Symbols) -> Result<CoeffExpr, AlgebraError> {
    if b.is_one() {
        return Ok(a.clone());
    }
    match (a, b) {
        (CoeffExpr::Poly(pa), CoeffExpr::Poly(pb)) => match pa.div_exact(pb, syms) {
            Some(q) => Ok(CoeffExpr::Poly(q)),
            None => a.div_or_promote(b, syms),
        },
        _ => a.div_or_promote(b, syms),
    }
}

/// Solve the square nonsingular system `A x = b` exactly.
pub fn solve_linear(
    a: &[Vec<CoeffExpr>],
    b: &[CoeffExpr],
    syms: &Symbols,
) -> Result<Vec<CoeffExpr>, SolveError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) || b.len() != n {
        return Err(SolveError::NotSquare);
    }
    match solve_exact(a, b, syms) {
        Err(SolveError::Underdetermined(_) | SolveError::Inconsistent(_)) => Err(
            SolveError::SingularMatrix("system is singular".into()),
        ),
        r => r,
    }
}

/// Solve `A x = b` exactly where `A` may have more rows than columns. The
/// system must determine every unknown uniquely and be consistent; the
/// solution is verified against every row before it is returned.
pub fn solve_exact(
    a: &[Vec<CoeffExpr>],
    b: &[CoeffExpr],
    syms: &Symbols,
) -> Result<Vec<CoeffExpr>, SolveError> {
    let rows = a.len();
    if b.len() != rows {
        return Err(SolveError::NotSquare);
    }
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    if a.iter().any(|row| row.len() != cols) {
        return Err(SolveError::NotSquare);
    }
    if cols == 0 {
        return if b.iter().all(|x| x.is_zero()) {
            Ok(Vec::new())
        } else {
            Err(SolveError::Inconsistent("nonzero rhs with no unknowns".into()))
        };
    }
    // augmented working matrix
    let mut m: Vec<Vec<CoeffExpr>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut col_of: Vec<usize> = (0..cols).collect();
    let mut prev_pivot = CoeffExpr::one();
    let steps = rows.min(cols);
    let mut rank = 0usize;
    for k in 0..steps {
        // choose pivot: prefer units, then fewest terms
        let mut best: Option<(usize, usize, bool, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for jj in k..cols {
                let e = &row[jj];
                if e.is_zero() {
                    continue;
                }
                let cand = (i, jj, is_unit(e), complexity(e));
                let better = match &best {
                    None => true,
                    Some((_, _, u, c)) => {
                        (cand.2, std::cmp::Reverse(cand.3)) > (*u, std::cmp::Reverse(*c))
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let Some((pi, pj, _, _)) = best else {
            break; // remaining block is zero
        };
        m.swap(k, pi);
        if pj != k {
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            col_of.swap(k, pj);
        }
        let pivot = m[k][k].clone();
        for i in k + 1..rows {
            for j in k + 1..=cols {
                // Bareiss step: (pivot*a[i][j] - a[i][k]*a[k][j]) / prev_pivot
                let t = pivot.mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = exact_div(&t, &prev_pivot, syms)?;
            }
            m[i][k] = CoeffExpr::zero();
        }
        prev_pivot = pivot;
        rank = k + 1;
    }
    if rank < cols {
        let free: Vec<usize> = col_of[rank..].to_vec();
        return Err(SolveError::Underdetermined(format!(
            "free columns {free:?}"
        )));
    }
    // rows below the rank must be consistent (their tail is already zero up
    // to the rhs column)
    for row in m.iter().skip(rank) {
        if !row[cols].is_zero() {
            return Err(SolveError::Inconsistent(row[cols].to_canonical(syms)));
        }
    }
    // back-substitution on the triangular system
    let mut x = vec![CoeffExpr::zero(); cols];
    for k in (0..cols).rev() {
        let mut acc = m[k][cols].clone();
        for j in k + 1..cols {
            acc = acc.sub(&m[k][j].mul(&x[j]));
        }
        if m[k][k].is_zero() {
            return Err(SolveError::SingularMatrix(m[k][k].to_canonical(syms)));
        }
        x[k] = acc.div_or_promote(&m[k][k], syms)?;
        x[k] = x[k].simplify(syms);
    }
    // undo column permutation
    let mut out = vec![CoeffExpr::zero(); cols];
    for (slot, &orig) in col_of.iter().enumerate() {
        out[orig] = x[slot].clone();
    }
    // verification: A * out == b exactly, row by row
    for (row, rhs) in a.iter().zip(b) {
        let mut acc = CoeffExpr::zero();
        for (aij, xj) in row.iter().zip(&out) {
            acc = acc.add(&aij.mul(xj));
        }
        if !acc.sub(rhs).simplify(syms).is_zero() {
            return Err(SolveError::Inconsistent(
                "solution fails back-substitution".into(),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CoeffExpr, Poly, Symbols};

    #[test]
    fn identity_system_returns_rhs() {
        let mut b = Symbols::builder();
        b.add("x", false);
        let syms = b.finish();
        let a = vec![
            vec![CoeffExpr::one(), CoeffExpr::zero()],
            vec![CoeffExpr::zero(), CoeffExpr::one()],
        ];
        let rhs = vec![CoeffExpr::int(3), CoeffExpr::rational(1, 2)];
        assert_eq!(solve_linear(&a, &rhs, &syms).unwrap(), rhs);
    }

    #[test]
    fn triangular_laurent_system() {
        // A = [[2*La4, 0], [1, 2*La4]], b = [b2, 0]
        // x = [b2/(2 La4), -b2/(4 La4^2)]  (hand back-substitution)
        let mut b = Symbols::builder();
        let la4 = b.add("La4", true);
        let b2 = b.add("b2", false);
        let syms = b.finish();
        let two_la4 = CoeffExpr::var(la4).scale_int(2);
        let a = vec![
            vec![two_la4.clone(), CoeffExpr::zero()],
            vec![CoeffExpr::one(), two_la4.clone()],
        ];
        let rhs = vec![CoeffExpr::var(b2), CoeffExpr::zero()];
        let x = solve_linear(&a, &rhs, &syms).unwrap();
        let expect0 = CoeffExpr::var(b2).div(&two_la4, &syms).unwrap();
        let expect1 = expect0.div(&two_la4, &syms).unwrap().neg();
        assert_eq!(x[0], expect0);
        assert_eq!(x[1], expect1);
    }

    #[test]
    fn one_by_one_vertex_coefficient() {
        // (2*La2) x = -b1  =>  x = -b1/(2*La2), the first expansion coefficient
        let mut b = Symbols::builder();
        let la2 = b.add("La2", true);
        let b1 = b.add("b1", false);
        let syms = b.finish();
        let a = vec![vec![CoeffExpr::var(la2).scale_int(2)]];
        let rhs = vec![CoeffExpr::var(b1).neg()];
        let x = solve_linear(&a, &rhs, &syms).unwrap();
        assert_eq!(x[0].to_canonical(&syms), "-1/2*b1*La2^-1");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut bld = Symbols::builder();
        bld.add("x", false);
        let syms = bld.finish();
        let a = vec![
            vec![CoeffExpr::one(), CoeffExpr::one()],
            vec![CoeffExpr::one(), CoeffExpr::one()],
        ];
        let rhs = vec![CoeffExpr::zero(), CoeffExpr::one()];
        assert!(matches!(
            solve_linear(&a, &rhs, &syms),
            Err(SolveError::SingularMatrix(_))
        ));
    }

    #[test]
    fn poly_domain_solution_with_ratfunc_fallback() {
        let mut bld = Symbols::builder();
        let x = bld.add("x", false);
        let syms = bld.finish();
        let px = CoeffExpr::var(x);
        // [[x, 1], [1, x]] * [u, v] = [x^2, x] has solution [u, v] = [x^2-... ]
        let a = vec![
            vec![px.clone(), CoeffExpr::one()],
            vec![CoeffExpr::one(), px.clone()],
        ];
        let rhs = vec![px.mul(&px), px.clone()];
        let sol = solve_linear(&a, &rhs, &syms).unwrap();
        // verify A*sol = rhs is rechecked internally; spot-check one entry
        let lhs0 = px.mul(&sol[0]).add(&sol[1]);
        assert!(lhs0.sub(&rhs[0]).simplify(&syms).is_zero());
        let _ = Poly::one();
    }
}
