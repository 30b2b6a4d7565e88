//! Exact linear programming over entropy coordinates.
//!
//! The primal question is `min lam*M + mu*R` over the Shannon cone
//! intersected with the caching constraints. Internally the simplex machine
//! solves the dual `max b.y : A^T y = c, y >= 0`, whose variables are one
//! nonnegative multiplier per constraint row; the machine's prices are the
//! primal point and its `y` is the raw material for proof certificates.
//! Every optimum is re-checked: dual feasibility, primal feasibility,
//! complementary slackness and strong duality must hold with zero residual
//! in rational arithmetic.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::entropy::{
    elemental_inequalities, Inequality, LinearForm, Provenance, UniverseError, VarSet,
};
use crate::model::CachingModel;
use crate::rat::{fmt_rat, rat, Rat};
use crate::simplex::{ColRef, Machine, MachineResult, MachineStatus, SimplexError};
use crate::symmetry::{symmetry_equality_rows, OrbitMap};
use crate::witness::SetCode;

pub use crate::simplex::MachineOptions as SolveOptions;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("objective weights must be nonnegative")]
    NegativeWeight,
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("solution failed exact verification: {0}")]
    CertificationFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// A variable of the LP: the cache size, the delivery rate, or one entropy
/// coordinate (an orbit representative when a quotient is in effect).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpVar {
    M,
    R,
    Term(VarSet),
}

/// Plain inequality-form LP: `minimize objective` subject to `form >= 0`
/// for every row, all variables free.
#[derive(Debug, Clone)]
pub struct GeneralLp {
    vars: Vec<LpVar>,
    m_idx: Option<usize>,
    r_idx: Option<usize>,
    term_idx: BTreeMap<VarSet, usize>,
    rows: Vec<LinearForm>,
    objective: LinearForm,
}

#[derive(Debug, Clone)]
pub struct GeneralSolution {
    pub status: LpStatus,
    /// Minimum of the full objective (variable part plus constant).
    pub value: Rat,
    /// Per-variable values of the optimal point, aligned with `vars()`.
    pub primal: Vec<Rat>,
    /// Nonnegative multiplier per row.
    pub dual: Vec<Rat>,
}

impl GeneralLp {
    pub fn new(rows: Vec<LinearForm>, objective: LinearForm) -> GeneralLp {
        let mut use_m = !objective.m_coeff().is_zero();
        let mut use_r = !objective.r_coeff().is_zero();
        let mut terms: std::collections::BTreeSet<VarSet> =
            objective.terms().map(|(s, _)| s).collect();
        for row in &rows {
            use_m |= !row.m_coeff().is_zero();
            use_r |= !row.r_coeff().is_zero();
            terms.extend(row.terms().map(|(s, _)| s));
        }
        let mut vars = Vec::new();
        let mut m_idx = None;
        let mut r_idx = None;
        if use_m {
            m_idx = Some(vars.len());
            vars.push(LpVar::M);
        }
        if use_r {
            r_idx = Some(vars.len());
            vars.push(LpVar::R);
        }
        let mut term_idx = BTreeMap::new();
        for t in terms {
            term_idx.insert(t, vars.len());
            vars.push(LpVar::Term(t));
        }
        GeneralLp { vars, m_idx, r_idx, term_idx, rows, objective }
    }

    pub fn vars(&self) -> &[LpVar] {
        &self.vars
    }

    pub fn rows(&self) -> &[LinearForm] {
        &self.rows
    }

    fn column_of(&self, form: &LinearForm) -> Vec<(usize, Rat)> {
        let mut col = Vec::new();
        if !form.m_coeff().is_zero() {
            col.push((self.m_idx.expect("M indexed"), form.m_coeff().clone()));
        }
        if !form.r_coeff().is_zero() {
            col.push((self.r_idx.expect("R indexed"), form.r_coeff().clone()));
        }
        for (s, c) in form.terms() {
            col.push((self.term_idx[&s], c.clone()));
        }
        col
    }

    /// Rows that pin a single variable nonnegative give a ready-made
    /// starting basis column for that variable's equality row.
    fn unit_row_hint(&self) -> Vec<ColRef> {
        let mut unit_for_var: Vec<Option<usize>> = vec![None; self.vars.len()];
        for (j, row) in self.rows.iter().enumerate() {
            if !row.constant().is_zero() {
                continue;
            }
            let col = self.column_of(row);
            if let [(var, coeff)] = col.as_slice() {
                if *coeff == rat(1) && unit_for_var[*var].is_none() {
                    unit_for_var[*var] = Some(j);
                }
            }
        }
        unit_for_var
            .iter()
            .enumerate()
            .map(|(v, row)| match row {
                Some(j) => ColRef::Real(*j),
                None => ColRef::Artificial(v),
            })
            .collect()
    }

    pub fn minimize(&self, opts: &SolveOptions) -> Result<GeneralSolution, LpError> {
        let n_vars = self.vars.len();
        let cols: Vec<Vec<(usize, Rat)>> = self.rows.iter().map(|r| self.column_of(r)).collect();
        let obj: Vec<Rat> = self.rows.iter().map(|r| -r.constant().clone()).collect();
        let mut rhs = vec![Rat::zero(); n_vars];
        if let Some(i) = self.m_idx {
            rhs[i] = self.objective.m_coeff().clone();
        }
        if let Some(i) = self.r_idx {
            rhs[i] = self.objective.r_coeff().clone();
        }
        for (s, c) in self.objective.terms() {
            rhs[self.term_idx[&s]] = c.clone();
        }

        let machine = Machine::new(n_vars, cols, obj, rhs.clone());
        let hint = self.unit_row_hint();
        let res = machine.solve(opts, Some(&hint))?;
        match res.status {
            MachineStatus::Optimal => {
                self.verify_kkt(&res, &rhs)?;
                Ok(GeneralSolution {
                    status: LpStatus::Optimal,
                    value: &res.value + self.objective.constant(),
                    primal: res.prices,
                    dual: res.y,
                })
            }
            // Dual infeasible: the primal minimum is unbounded below (our
            // primal cones are never empty).
            MachineStatus::Infeasible => Ok(GeneralSolution {
                status: LpStatus::Unbounded,
                value: Rat::zero(),
                primal: Vec::new(),
                dual: Vec::new(),
            }),
            // Dual unbounded: the primal has no feasible point.
            MachineStatus::Unbounded => Ok(GeneralSolution {
                status: LpStatus::Infeasible,
                value: Rat::zero(),
                primal: Vec::new(),
                dual: Vec::new(),
            }),
        }
    }

    /// Exact optimality conditions, checked rather than assumed.
    fn verify_kkt(&self, res: &MachineResult, rhs: &[Rat]) -> Result<(), LpError> {
        let fail = |msg: String| Err(LpError::CertificationFailed(msg));
        // Dual feasibility: y >= 0 and the multipliers recombine the
        // objective coefficients exactly.
        let mut combo = vec![Rat::zero(); self.vars.len()];
        for (j, row) in self.rows.iter().enumerate() {
            if res.y[j] < Rat::zero() {
                return fail(format!("negative multiplier on row {}", j));
            }
            if res.y[j].is_zero() {
                continue;
            }
            for (v, c) in self.column_of(row) {
                combo[v] += &res.y[j] * &c;
            }
        }
        if combo != rhs {
            return fail("multiplier combination misses the objective".into());
        }
        // Primal feasibility and complementary slackness at the price point.
        let point = |s: VarSet| -> Rat { res.prices[self.term_idx[&s]].clone() };
        let m_val = self.m_idx.map(|i| res.prices[i].clone()).unwrap_or_else(Rat::zero);
        let r_val = self.r_idx.map(|i| res.prices[i].clone()).unwrap_or_else(Rat::zero);
        for (j, row) in self.rows.iter().enumerate() {
            let slack = row.eval(&point, &m_val, &r_val);
            if slack < Rat::zero() {
                return fail(format!("primal point violates row {}", j));
            }
            if !(&slack * &res.y[j]).is_zero() {
                return fail(format!("complementary slackness fails on row {}", j));
            }
        }
        // Strong duality: primal objective equals the dual value.
        let mut primal_obj = Rat::zero();
        if let Some(i) = self.m_idx {
            primal_obj += self.objective.m_coeff() * &res.prices[i];
        }
        if let Some(i) = self.r_idx {
            primal_obj += self.objective.r_coeff() * &res.prices[i];
        }
        for (s, c) in self.objective.terms() {
            primal_obj += c * &res.prices[self.term_idx[&s]];
        }
        if primal_obj != res.value {
            return fail("strong duality gap".into());
        }
        Ok(())
    }
}

/// How symmetry enters the assembled LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryMode {
    /// Identify orbit-equivalent coordinates (smaller LP; the default).
    Quotient,
    /// Keep raw coordinates and append explicit symmetry equality rows;
    /// used to cross-check the quotient.
    AppendEqualities,
}

/// One row of the assembled LP, keeping the pre-quotient form for
/// certificate extraction.
#[derive(Debug, Clone)]
pub struct LpRow {
    pub form: LinearForm,
    pub raw: LinearForm,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub model: CachingModel,
    pub orbit: OrbitMap,
    pub objective: (Rat, Rat),
    pub rows: Vec<LpRow>,
    lp: GeneralLp,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rat,
    pub m: Rat,
    pub r: Rat,
    /// Entropy coordinates of the optimal point, over orbit representatives.
    pub terms: Vec<(VarSet, Rat)>,
    /// Multiplier per assembled row.
    pub dual: Vec<Rat>,
}

/// Quotients the elemental and model rows and lays out the LP.
pub fn assemble(
    model: &CachingModel,
    orbit: &OrbitMap,
    objective: (Rat, Rat),
) -> Result<LpProblem, LpError> {
    assemble_mode(model, orbit, objective, SymmetryMode::Quotient)
}

pub fn assemble_mode(
    model: &CachingModel,
    orbit: &OrbitMap,
    objective: (Rat, Rat),
    mode: SymmetryMode,
) -> Result<LpProblem, LpError> {
    if objective.0 < Rat::zero() || objective.1 < Rat::zero() {
        return Err(LpError::NegativeWeight);
    }
    let u = model.universe();
    let mut raw: Vec<Inequality> = elemental_inequalities(u)?;
    raw.extend_from_slice(model.constraints());
    if mode == SymmetryMode::AppendEqualities {
        raw.extend(symmetry_equality_rows(u, orbit));
    }

    let mut rows: Vec<LpRow> = Vec::with_capacity(raw.len());
    let mut seen = std::collections::BTreeSet::new();
    for iq in raw {
        let form = match mode {
            SymmetryMode::Quotient => orbit.quotient_form(&iq.form),
            SymmetryMode::AppendEqualities => iq.form.clone(),
        };
        if form.is_zero() {
            continue;
        }
        if seen.insert(form.clone()) {
            rows.push(LpRow { form, raw: iq.form, provenance: iq.provenance });
        }
    }

    let mut obj = LinearForm::zero();
    obj.add_m(objective.0.clone());
    obj.add_r(objective.1.clone());
    let lp = GeneralLp::new(rows.iter().map(|r| r.form.clone()).collect(), obj);
    Ok(LpProblem { model: model.clone(), orbit: orbit.clone(), objective, rows, lp })
}

impl LpProblem {
    /// Number of LP variables (orbit terms plus M and R).
    pub fn n_vars(&self) -> usize {
        self.lp.vars().len()
    }

    pub fn minimize(&self, opts: &SolveOptions) -> Result<LpSolution, LpError> {
        if self.objective.0.is_zero() && self.objective.1.is_zero() {
            return Ok(self.zero_objective_solution());
        }
        let sol = self.lp.minimize(opts)?;
        let mut m = Rat::zero();
        let mut r = Rat::zero();
        let mut terms = Vec::new();
        if sol.status == LpStatus::Optimal {
            for (var, val) in self.lp.vars().iter().zip(&sol.primal) {
                match var {
                    LpVar::M => m = val.clone(),
                    LpVar::R => r = val.clone(),
                    LpVar::Term(s) => terms.push((*s, val.clone())),
                }
            }
        }
        Ok(LpSolution { status: sol.status, value: sol.value, m, r, terms, dual: sol.dual })
    }

    /// `0*M + 0*R` needs no pivoting: the full-cache witness point and an
    /// all-zero dual are already optimal.
    fn zero_objective_solution(&self) -> LpSolution {
        let u = self.model.universe();
        let code = SetCode::full_cache(u);
        let m = rat(u.n_files() as i64);
        let r = Rat::zero();
        let mut terms = Vec::new();
        for var in self.lp.vars() {
            if let LpVar::Term(s) = var {
                // The point lives on orbit representatives; any orbit member
                // has the same entropy under the symmetric witness code.
                terms.push((*s, code.entropy(*s)));
            }
        }
        debug_assert!(self
            .rows
            .iter()
            .all(|row| row.form.eval(|s| code.entropy(s), &m, &r) >= Rat::zero()));
        LpSolution {
            status: LpStatus::Optimal,
            value: Rat::zero(),
            m,
            r,
            terms,
            dual: vec![Rat::zero(); self.rows.len()],
        }
    }
}

/// A Shannon-feasible point beating the claimed bound: the claim is not
/// provable from this LP (it may still hold for real codes).
#[derive(Debug, Clone)]
pub struct Refutation {
    pub target: (Rat, Rat, Rat),
    pub optimum: Rat,
    pub m: Rat,
    pub r: Rat,
    pub terms: Vec<(VarSet, Rat)>,
}

impl Refutation {
    pub fn summary(&self) -> String {
        format!(
            "{}*M+{}*R >= {} is not LP-provable here: optimum {} at (M, R) = ({}, {})",
            fmt_rat(&self.target.0),
            fmt_rat(&self.target.1),
            fmt_rat(&self.target.2),
            fmt_rat(&self.optimum),
            fmt_rat(&self.m),
            fmt_rat(&self.r),
        )
    }
}

pub enum ProofOutcome {
    Proved { certificate: crate::cert::Certificate, optimum: Rat },
    Refuted(Refutation),
}

/// Decides `lam*M + mu*R >= c` over the model: a verified certificate when
/// the LP optimum reaches `c`, otherwise the refuting optimal point.
pub fn prove_inequality(
    model: &CachingModel,
    orbit: &OrbitMap,
    lam: Rat,
    mu: Rat,
    c: Rat,
    opts: &SolveOptions,
) -> Result<ProofOutcome, LpError> {
    let problem = assemble(model, orbit, (lam.clone(), mu.clone()))?;
    let sol = problem.minimize(opts)?;
    if sol.status != LpStatus::Optimal {
        return Err(LpError::CertificationFailed(format!(
            "expected an optimal solve, got {:?}",
            sol.status
        )));
    }
    if sol.value >= c {
        let certificate = crate::cert::extract(&problem, &sol, c).map_err(|e| {
            LpError::CertificationFailed(format!("certificate extraction failed: {}", e))
        })?;
        Ok(ProofOutcome::Proved { certificate, optimum: sol.value })
    } else {
        Ok(ProofOutcome::Refuted(Refutation {
            target: (lam, mu, c),
            optimum: sol.value.clone(),
            m: sol.m.clone(),
            r: sol.r.clone(),
            terms: sol.terms.clone(),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::preset_model;
    use crate::rat::ratio;
    use crate::symmetry::{full_symmetric_group, orbit_map, stabilizer_subgroup};

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn man_table2_m_plus_r_is_two() {
        let m = preset_model("man-table2").unwrap();
        let om = orbit_map(m.universe(), &full_symmetric_group(3));
        let p = assemble(&m, &om, (rat(1), rat(1))).unwrap();
        let sol = p.minimize(&opts()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.value, rat(2));
    }

    #[test]
    fn man_table2_cut_set_bound() {
        let m = preset_model("man-table2").unwrap();
        let om = orbit_map(m.universe(), &full_symmetric_group(3));
        let p = assemble(&m, &om, (rat(3), rat(1))).unwrap();
        let sol = p.minimize(&opts()).unwrap();
        assert_eq!(sol.value, rat(3));
    }

    #[test]
    fn zero_objective_short_circuits() {
        let m = preset_model("man-table2").unwrap();
        let om = orbit_map(m.universe(), &stabilizer_subgroup(m.universe()));
        let p = assemble(&m, &om, (rat(0), rat(0))).unwrap();
        let sol = p.minimize(&opts()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.value, rat(0));
        assert!(sol.dual.iter().all(|y| y.is_zero()));
    }

    #[test]
    fn negative_weights_rejected() {
        let m = preset_model("man-table2").unwrap();
        let om = orbit_map(m.universe(), &stabilizer_subgroup(m.universe()));
        assert!(matches!(
            assemble(&m, &om, (rat(-1), rat(1))),
            Err(LpError::NegativeWeight)
        ));
    }

    #[test]
    fn full_2x2_m_plus_r_is_three_halves() {
        let m = preset_model("full-2x2").unwrap();
        let om = orbit_map(m.universe(), &stabilizer_subgroup(m.universe()));
        let p = assemble(&m, &om, (rat(1), rat(1))).unwrap();
        let sol = p.minimize(&opts()).unwrap();
        assert_eq!(sol.value, ratio(3, 2));
    }

    #[test]
    fn prove_and_refute() {
        let m = preset_model("man-table2").unwrap();
        let om = orbit_map(m.universe(), &full_symmetric_group(3));
        match prove_inequality(&m, &om, rat(1), rat(1), rat(2), &opts()).unwrap() {
            ProofOutcome::Proved { optimum, .. } => assert_eq!(optimum, rat(2)),
            ProofOutcome::Refuted(r) => panic!("unexpected refutation: {}", r.summary()),
        }
        match prove_inequality(&m, &om, rat(1), rat(1), rat(3), &opts()).unwrap() {
            ProofOutcome::Proved { .. } => panic!("M+R>=3 must not be provable"),
            ProofOutcome::Refuted(r) => {
                assert_eq!(r.optimum, rat(2));
                assert_eq!(&r.m + &r.r, rat(2));
            }
        }
    }

    #[test]
    fn quotient_matches_appended_equalities_on_small_model() {
        // 2 users, 2 files, demand pair closed under the user swap.
        let m = crate::model::build_model(
            2,
            2,
            &[crate::entropy::Demand(vec![0, 1]), crate::entropy::Demand(vec![1, 0])],
        )
        .unwrap();
        let group = stabilizer_subgroup(m.universe());
        assert_eq!(group.len(), 2);
        let om = orbit_map(m.universe(), &group);
        for obj in [(rat(1), rat(1)), (rat(2), rat(1)), (rat(1), rat(2))] {
            let q = assemble_mode(&m, &om, obj.clone(), SymmetryMode::Quotient).unwrap();
            let e = assemble_mode(&m, &om, obj, SymmetryMode::AppendEqualities).unwrap();
            let qv = q.minimize(&opts()).unwrap().value;
            let ev = e.minimize(&opts()).unwrap().value;
            assert_eq!(qv, ev);
        }
    }
}
