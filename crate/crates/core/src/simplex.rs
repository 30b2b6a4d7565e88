//! Exact simplex kernel.
//!
//! The machine solves `max obj . y  s.t.  cols . y = rhs, y >= 0` in
//! rational arithmetic. The LP layer feeds it the dual of an inequality
//! system, so the machine's `y` are the certificate multipliers and its
//! simplex prices are the primal point.
//!
//! A floating-point twin may propose a basis first; the basis is refactored
//! and validated exactly, and on any validation failure the pure exact path
//! runs from scratch. The exact path uses Dantzig pricing and switches to
//! Bland's rule permanently once it stalls, which guarantees termination.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::{bit_size, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplexError {
    #[error("rational coefficients exceeded the {limit}-bit guard during pivoting")]
    NumericOverflow { limit: u64 },
    #[error("simplex iteration limit {0} exceeded")]
    IterationLimit(usize),
    #[error("warm basis rejected: {0}")]
    BadWarmBasis(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineStatus {
    Optimal,
    /// No feasible `y`: the corresponding primal is unbounded or empty.
    Infeasible,
    /// Objective unbounded above: the corresponding primal is infeasible.
    Unbounded,
}

/// Column reference: a real column or the artificial unit column of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColRef {
    Real(usize),
    Artificial(usize),
}

#[derive(Debug, Clone)]
pub struct MachineOptions {
    pub presolve: bool,
    pub bit_limit: u64,
    pub max_iters: usize,
}

impl Default for MachineOptions {
    fn default() -> Self {
        MachineOptions { presolve: true, bit_limit: 1 << 20, max_iters: 400_000 }
    }
}

#[derive(Debug, Clone)]
pub struct MachineResult {
    pub status: MachineStatus,
    pub value: Rat,
    /// Optimal `y` per real column (empty unless Optimal).
    pub y: Vec<Rat>,
    /// Simplex prices per row, in the caller's row orientation.
    pub prices: Vec<Rat>,
}

pub struct Machine {
    m: usize,
    cols: Vec<Vec<(usize, Rat)>>,
    obj: Vec<Rat>,
    rhs: Vec<Rat>,
    flipped: Vec<bool>,
}

impl Machine {
    /// Rows with a negative right-hand side are negated so the all-artificial
    /// start is feasible; prices are flipped back on output.
    pub fn new(m: usize, mut cols: Vec<Vec<(usize, Rat)>>, obj: Vec<Rat>, mut rhs: Vec<Rat>) -> Machine {
        assert_eq!(obj.len(), cols.len());
        assert_eq!(rhs.len(), m);
        let mut flipped = vec![false; m];
        for (r, v) in rhs.iter_mut().enumerate() {
            if v.is_negative() {
                *v = -v.clone();
                flipped[r] = true;
            }
        }
        for col in &mut cols {
            col.sort_by_key(|(r, _)| *r);
            for (r, v) in col.iter_mut() {
                if flipped[*r] {
                    *v = -v.clone();
                }
            }
            col.retain(|(_, v)| !v.is_zero());
        }
        Machine { m, cols, obj, rhs, flipped }
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    fn col_entries(&self, c: ColRef) -> Vec<(usize, Rat)> {
        match c {
            ColRef::Real(j) => self.cols[j].clone(),
            ColRef::Artificial(r) => vec![(r, Rat::one())],
        }
    }

    /// Ordering key used by Bland's rule (reals first, by index).
    fn col_key(&self, c: ColRef) -> usize {
        match c {
            ColRef::Real(j) => j,
            ColRef::Artificial(r) => self.cols.len() + r,
        }
    }

    pub fn solve(
        &self,
        opts: &MachineOptions,
        warm: Option<&[ColRef]>,
    ) -> Result<MachineResult, SimplexError> {
        if opts.presolve {
            let twin = MachineF64::from_exact(self);
            if let Some(basis) = twin.solve(warm, opts.max_iters) {
                match self.finish_from_basis(&basis, opts) {
                    Ok(res) => return Ok(res),
                    Err(SimplexError::BadWarmBasis(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        self.solve_exact(opts, warm)
    }

    /// Pure exact path: warm phase 2 when the hint basis is valid, otherwise
    /// a full two-phase run from the all-artificial basis.
    fn solve_exact(
        &self,
        opts: &MachineOptions,
        warm: Option<&[ColRef]>,
    ) -> Result<MachineResult, SimplexError> {
        if let Some(basis) = warm {
            match self.finish_from_basis(basis, opts) {
                Ok(res) => return Ok(res),
                Err(SimplexError::BadWarmBasis(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let mut st = State::initial(self);
        if !st.run_phase(self, 1, opts)? {
            return Ok(MachineResult {
                status: MachineStatus::Infeasible,
                value: Rat::zero(),
                y: Vec::new(),
                prices: Vec::new(),
            });
        }
        self.run_phase2(st, opts)
    }

    /// Validates a proposed basis exactly and, if feasible, finishes with
    /// exact phase-2 pivots.
    fn finish_from_basis(
        &self,
        basis: &[ColRef],
        opts: &MachineOptions,
    ) -> Result<MachineResult, SimplexError> {
        let st = State::from_basis(self, basis)
            .ok_or_else(|| SimplexError::BadWarmBasis("singular or infeasible".into()))?;
        self.run_phase2(st, opts)
    }

    fn run_phase2(
        &self,
        mut st: State,
        opts: &MachineOptions,
    ) -> Result<MachineResult, SimplexError> {
        if !st.run_phase(self, 2, opts)? {
            return Ok(MachineResult {
                status: MachineStatus::Unbounded,
                value: Rat::zero(),
                y: Vec::new(),
                prices: Vec::new(),
            });
        }
        // Final values recomputed from the factorization, not the updates.
        st.refactor(self).ok_or_else(|| SimplexError::BadWarmBasis("refactor failed".into()))?;
        let mut y = vec![Rat::zero(); self.cols.len()];
        let mut value = Rat::zero();
        for (r, c) in st.basis.iter().enumerate() {
            if let ColRef::Real(j) = c {
                y[*j] = st.y_b[r].clone();
                value += &self.obj[*j] * &st.y_b[r];
            }
        }
        let obj_b: Vec<Rat> = st.basis.iter().map(|c| self.phase_obj(*c, 2)).collect();
        let mut prices = st.btran(&obj_b);
        for (r, p) in prices.iter_mut().enumerate() {
            if self.flipped[r] {
                *p = -p.clone();
            }
        }
        Ok(MachineResult { status: MachineStatus::Optimal, value, y, prices })
    }

    fn phase_obj(&self, c: ColRef, phase: u8) -> Rat {
        match (phase, c) {
            (1, ColRef::Real(_)) => Rat::zero(),
            (1, ColRef::Artificial(_)) => -Rat::one(),
            (_, ColRef::Real(j)) => self.obj[j].clone(),
            (_, ColRef::Artificial(_)) => Rat::zero(),
        }
    }
}

const REFACTOR_EVERY: usize = 64;
const OVERFLOW_CHECK_EVERY: usize = 16;

struct Eta {
    p: usize,
    d: Vec<(usize, Rat)>,
    dp: Rat,
}

struct State {
    basis: Vec<ColRef>,
    lu: Lu,
    etas: Vec<Eta>,
    y_b: Vec<Rat>,
    iters: usize,
    stall: usize,
    bland: bool,
}

impl State {
    fn initial(mach: &Machine) -> State {
        State {
            basis: (0..mach.m).map(ColRef::Artificial).collect(),
            lu: Lu::identity(mach.m),
            etas: Vec::new(),
            y_b: mach.rhs.clone(),
            iters: 0,
            stall: 0,
            bland: false,
        }
    }

    fn from_basis(mach: &Machine, basis: &[ColRef]) -> Option<State> {
        if basis.len() != mach.m {
            return None;
        }
        let mut st = State {
            basis: basis.to_vec(),
            lu: Lu::identity(mach.m),
            etas: Vec::new(),
            y_b: vec![Rat::zero(); mach.m],
            iters: 0,
            stall: 0,
            bland: false,
        };
        st.refactor(mach)?;
        for (r, v) in st.y_b.iter().enumerate() {
            if v.is_negative() {
                return None;
            }
            if matches!(st.basis[r], ColRef::Artificial(_)) && !v.is_zero() {
                return None;
            }
        }
        Some(st)
    }

    fn refactor(&mut self, mach: &Machine) -> Option<()> {
        // Cheap columns first keeps elimination fill low.
        self.basis.sort_by_key(|c| match c {
            ColRef::Artificial(r) => (0usize, *r),
            ColRef::Real(j) => (mach.cols[j].len(), *j),
        });
        let cols: Vec<Vec<(usize, Rat)>> =
            self.basis.iter().map(|c| mach.col_entries(*c)).collect();
        self.lu = Lu::factor(mach.m, &cols)?;
        self.etas.clear();
        self.y_b = self.ftran(&mach.rhs);
        Some(())
    }

    fn ftran(&self, v: &[Rat]) -> Vec<Rat> {
        let mut x = self.lu.solve(v);
        for eta in &self.etas {
            let xp = &x[eta.p] / &eta.dp;
            for (r, val) in &eta.d {
                if *r != eta.p {
                    let delta = val * &xp;
                    x[*r] -= delta;
                }
            }
            x[eta.p] = xp;
        }
        x
    }

    fn btran(&self, c: &[Rat]) -> Vec<Rat> {
        let mut w = c.to_vec();
        for eta in self.etas.iter().rev() {
            let mut acc = w[eta.p].clone();
            for (r, val) in &eta.d {
                if *r != eta.p {
                    acc -= val * &w[*r];
                }
            }
            w[eta.p] = acc / &eta.dp;
        }
        self.lu.solve_transposed(&w)
    }

    /// Runs one phase to optimality. Returns `false` when phase 1 ends
    /// infeasible or phase 2 detects an unbounded ray.
    fn run_phase(&mut self, mach: &Machine, phase: u8, opts: &MachineOptions) -> Result<bool, SimplexError> {
        loop {
            self.iters += 1;
            if self.iters > opts.max_iters {
                return Err(SimplexError::IterationLimit(opts.max_iters));
            }
            if self.iters % OVERFLOW_CHECK_EVERY == 0 {
                let worst = self.y_b.iter().map(bit_size).max().unwrap_or(0);
                if worst > opts.bit_limit {
                    return Err(SimplexError::NumericOverflow { limit: opts.bit_limit });
                }
            }
            if self.etas.len() >= REFACTOR_EVERY {
                self.refactor(mach)
                    .ok_or_else(|| SimplexError::BadWarmBasis("refactor failed".into()))?;
            }

            let obj_b: Vec<Rat> = self.basis.iter().map(|c| mach.phase_obj(*c, phase)).collect();
            let prices = self.btran(&obj_b);

            // Entering column: reals only (a dropped or driven-out artificial
            // never returns). Dantzig by default, Bland once stalled.
            let in_basis: std::collections::HashSet<usize> = self
                .basis
                .iter()
                .filter_map(|c| match c {
                    ColRef::Real(j) => Some(*j),
                    _ => None,
                })
                .collect();
            let mut entering: Option<(usize, Rat)> = None;
            for j in 0..mach.cols.len() {
                if in_basis.contains(&j) {
                    continue;
                }
                let mut red = mach.phase_obj(ColRef::Real(j), phase);
                for (r, v) in &mach.cols[j] {
                    red -= v * &prices[*r];
                }
                if red.is_positive() {
                    if self.bland {
                        entering = Some((j, red));
                        break;
                    }
                    match &entering {
                        Some((_, best)) if *best >= red => {}
                        _ => entering = Some((j, red)),
                    }
                }
            }
            let Some((enter, reduced)) = entering else {
                // Optimal for this phase.
                if phase == 1 {
                    let val: Rat = self
                        .basis
                        .iter()
                        .zip(&self.y_b)
                        .filter(|(c, _)| matches!(c, ColRef::Artificial(_)))
                        .map(|(_, v)| v.clone())
                        .sum();
                    return Ok(val.is_zero());
                }
                return Ok(true);
            };

            let d = self.ftran(&dense_of(mach.m, &mach.cols[enter]));

            // Ratio test. Artificial basics are pinned at zero: any nonzero
            // component forces a zero-ratio exit, which also retires them.
            let mut leave: Option<(usize, Rat, bool)> = None; // (row, ratio, is_artificial)
            for r in 0..mach.m {
                let is_art = matches!(self.basis[r], ColRef::Artificial(_));
                let candidate = if is_art {
                    if d[r].is_zero() {
                        None
                    } else {
                        Some(Rat::zero())
                    }
                } else if d[r].is_positive() {
                    Some(&self.y_b[r] / &d[r])
                } else {
                    None
                };
                let Some(ratio) = candidate else { continue };
                let better = match &leave {
                    None => true,
                    Some((lr, lratio, lart)) => {
                        ratio < *lratio
                            || (ratio == *lratio
                                && (is_art && !*lart
                                    || (is_art == *lart
                                        && mach.col_key(self.basis[r])
                                            < mach.col_key(self.basis[*lr]))))
                    }
                };
                if better {
                    leave = Some((r, ratio, is_art));
                }
            }
            let Some((p, theta, _)) = leave else {
                // No limiting row: unbounded ray.
                return Ok(phase == 1 && false);
            };
            if theta.is_zero() {
                self.stall += 1;
                if self.stall > 2 * mach.m + 64 {
                    self.bland = true;
                }
            } else {
                self.stall = 0;
            }
            let _ = reduced;

            // Pivot: update basic values and append the eta transform.
            let theta_exact = theta;
            for r in 0..mach.m {
                if r != p && !d[r].is_zero() {
                    let delta = &d[r] * &theta_exact;
                    self.y_b[r] -= delta;
                }
            }
            self.y_b[p] = theta_exact;
            let dp = d[p].clone();
            let sparse_d: Vec<(usize, Rat)> =
                d.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
            self.etas.push(Eta { p, d: sparse_d, dp });
            self.basis[p] = ColRef::Real(enter);
        }
    }
}

fn dense_of(m: usize, sparse: &[(usize, Rat)]) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); m];
    for (r, val) in sparse {
        v[*r] = val.clone();
    }
    v
}

/// Dense LU factorization with row pivoting, preferring unit pivots.
struct Lu {
    n: usize,
    mat: Vec<Vec<Rat>>,
    perm: Vec<usize>,
}

impl Lu {
    fn identity(n: usize) -> Lu {
        let mut mat = vec![vec![Rat::zero(); n]; n];
        for (i, row) in mat.iter_mut().enumerate() {
            row[i] = Rat::one();
        }
        Lu { n, mat, perm: (0..n).collect() }
    }

    fn factor(n: usize, cols: &[Vec<(usize, Rat)>]) -> Option<Lu> {
        let mut mat = vec![vec![Rat::zero(); n]; n];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col {
                mat[*r][c] = v.clone();
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot_row = (k..n)
                .filter(|&i| !mat[i][k].is_zero())
                .min_by_key(|&i| {
                    let v = &mat[i][k];
                    let unit = v.denom().is_one() && v.numer().magnitude() == &1u32.into();
                    (!unit as u64, bit_size(v))
                })?;
            mat.swap(k, pivot_row);
            perm.swap(k, pivot_row);
            let pivot = mat[k][k].clone();
            for i in (k + 1)..n {
                if mat[i][k].is_zero() {
                    continue;
                }
                let f = &mat[i][k] / &pivot;
                for j in (k + 1)..n {
                    if !mat[k][j].is_zero() {
                        let delta = &f * &mat[k][j];
                        mat[i][j] -= delta;
                    }
                }
                mat[i][k] = f;
            }
        }
        Some(Lu { n, mat, perm })
    }

    /// Solves `B x = b` where `PB = LU`.
    fn solve(&self, b: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        let mut x: Vec<Rat> = (0..n).map(|i| b[self.perm[i]].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                if !self.mat[i][j].is_zero() && !x[j].is_zero() {
                    let delta = &self.mat[i][j] * &x[j];
                    x[i] -= delta;
                }
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                if !self.mat[i][j].is_zero() && !x[j].is_zero() {
                    let delta = &self.mat[i][j] * &x[j];
                    x[i] -= delta;
                }
            }
            x[i] = &x[i] / &self.mat[i][i];
        }
        x
    }

    /// Solves `B^T pi = c` via `B^T = U^T L^T P`.
    fn solve_transposed(&self, c: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        let mut w = c.to_vec();
        for i in 0..n {
            for j in 0..i {
                if !self.mat[j][i].is_zero() && !w[j].is_zero() {
                    let delta = &self.mat[j][i] * &w[j];
                    w[i] -= delta;
                }
            }
            w[i] = &w[i] / &self.mat[i][i];
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                if !self.mat[j][i].is_zero() && !w[j].is_zero() {
                    let delta = &self.mat[j][i] * &w[j];
                    w[i] -= delta;
                }
            }
        }
        let mut pi = vec![Rat::zero(); n];
        for i in 0..n {
            pi[self.perm[i]] = w[i].clone();
        }
        pi
    }
}

/// Floating-point twin used only to propose a basis; nothing it computes is
/// trusted without exact revalidation.
struct MachineF64 {
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    obj: Vec<f64>,
    rhs: Vec<f64>,
}

const EPS: f64 = 1e-9;

impl MachineF64 {
    fn from_exact(mach: &Machine) -> MachineF64 {
        let cast = |x: &Rat| crate::rat::approx(x);
        MachineF64 {
            m: mach.m,
            cols: mach
                .cols
                .iter()
                .map(|c| c.iter().map(|(r, v)| (*r, cast(v))).collect())
                .collect(),
            obj: mach.obj.iter().map(cast).collect(),
            rhs: mach.rhs.iter().map(cast).collect(),
        }
    }

    fn solve(&self, warm: Option<&[ColRef]>, max_iters: usize) -> Option<Vec<ColRef>> {
        let m = self.m;
        let mut basis: Vec<ColRef> = (0..m).map(ColRef::Artificial).collect();
        let mut binv: Vec<f64> = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut y_b = self.rhs.clone();

        if let Some(w) = warm {
            if w.len() == m {
                if let Some((inv, vals)) = self.invert_basis(w) {
                    if vals.iter().all(|v| *v >= -EPS)
                        && w
                            .iter()
                            .zip(&vals)
                            .all(|(c, v)| !matches!(c, ColRef::Artificial(_)) || v.abs() <= EPS)
                    {
                        basis = w.to_vec();
                        binv = inv;
                        y_b = vals;
                    }
                }
            }
        }

        for phase in [1u8, 2u8] {
            if phase == 1
                && basis
                    .iter()
                    .zip(&y_b)
                    .all(|(c, v)| !matches!(c, ColRef::Artificial(_)) || v.abs() <= EPS)
            {
                continue; // already feasible
            }
            if !self.iterate(phase, &mut basis, &mut binv, &mut y_b, max_iters)? {
                return None;
            }
            if phase == 1 {
                let infeas: f64 = basis
                    .iter()
                    .zip(&y_b)
                    .filter(|(c, _)| matches!(c, ColRef::Artificial(_)))
                    .map(|(_, v)| v.abs())
                    .sum();
                if infeas > 1e-6 {
                    return None;
                }
            }
        }
        Some(basis)
    }

    fn invert_basis(&self, basis: &[ColRef]) -> Option<(Vec<f64>, Vec<f64>)> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (c, col) in basis.iter().enumerate() {
            match col {
                ColRef::Artificial(r) => a[r * m + c] = 1.0,
                ColRef::Real(j) => {
                    for (r, v) in &self.cols[*j] {
                        a[r * m + c] = *v;
                    }
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let p = (k..m).max_by(|&x, &y| {
                a[x * m + k].abs().partial_cmp(&a[y * m + k].abs()).unwrap()
            })?;
            if a[p * m + k].abs() < 1e-11 {
                return None;
            }
            for j in 0..m {
                a.swap(k * m + j, p * m + j);
                inv.swap(k * m + j, p * m + j);
            }
            let piv = a[k * m + k];
            for j in 0..m {
                a[k * m + j] /= piv;
                inv[k * m + j] /= piv;
            }
            for i in 0..m {
                if i != k && a[i * m + k].abs() > 0.0 {
                    let f = a[i * m + k];
                    for j in 0..m {
                        a[i * m + j] -= f * a[k * m + j];
                        inv[i * m + j] -= f * inv[k * m + j];
                    }
                }
            }
        }
        let vals: Vec<f64> = (0..m)
            .map(|r| (0..m).map(|c| inv[r * m + c] * self.rhs[c]).sum())
            .collect();
        Some((inv, vals))
    }

    fn phase_obj(&self, c: ColRef, phase: u8) -> f64 {
        match (phase, c) {
            (1, ColRef::Real(_)) => 0.0,
            (1, ColRef::Artificial(_)) => -1.0,
            (_, ColRef::Real(j)) => self.obj[j],
            (_, ColRef::Artificial(_)) => 0.0,
        }
    }

    /// Returns Some(true) at phase optimum, Some(false)=unbounded, None on
    /// numeric trouble.
    fn iterate(
        &self,
        phase: u8,
        basis: &mut Vec<ColRef>,
        binv: &mut [f64],
        y_b: &mut [f64],
        max_iters: usize,
    ) -> Option<bool> {
        let m = self.m;
        let mut iters = 0usize;
        let mut stall = 0usize;
        let mut bland = false;
        loop {
            iters += 1;
            if iters > max_iters {
                return None;
            }
            let mut prices = vec![0.0; m];
            for (r, c) in basis.iter().enumerate() {
                let ob = self.phase_obj(*c, phase);
                if ob != 0.0 {
                    for (k, price) in prices.iter_mut().enumerate() {
                        *price += ob * binv[r * m + k];
                    }
                }
            }
            let in_basis: std::collections::HashSet<usize> = basis
                .iter()
                .filter_map(|c| match c {
                    ColRef::Real(j) => Some(*j),
                    _ => None,
                })
                .collect();
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.cols.len() {
                if in_basis.contains(&j) {
                    continue;
                }
                let mut red = self.phase_obj(ColRef::Real(j), phase);
                for (r, v) in &self.cols[j] {
                    red -= v * prices[*r];
                }
                if red > EPS {
                    if bland {
                        entering = Some((j, red));
                        break;
                    }
                    match entering {
                        Some((_, best)) if best >= red => {}
                        _ => entering = Some((j, red)),
                    }
                }
            }
            let Some((enter, _)) = entering else {
                return Some(true);
            };
            let mut d = vec![0.0; m];
            for (r, v) in &self.cols[enter] {
                for (i, di) in d.iter_mut().enumerate() {
                    *di += binv[i * m + r] * v;
                }
            }
            let mut leave: Option<(usize, f64, bool)> = None;
            for r in 0..m {
                let is_art = matches!(basis[r], ColRef::Artificial(_));
                let ratio = if is_art {
                    if d[r].abs() <= EPS {
                        continue;
                    }
                    0.0
                } else if d[r] > EPS {
                    y_b[r].max(0.0) / d[r]
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((_, lratio, lart)) => {
                        ratio < lratio - 1e-12
                            || ((ratio - lratio).abs() <= 1e-12 && is_art && !lart)
                    }
                };
                if better {
                    leave = Some((r, ratio, is_art));
                }
            }
            let Some((p, theta, _)) = leave else {
                return Some(false);
            };
            if theta <= 1e-12 {
                stall += 1;
                if stall > 4 * m + 128 {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            // Update the inverse and basic values.
            let dp = d[p];
            for i in 0..m {
                if i == p {
                    continue;
                }
                let f = d[i] / dp;
                if f != 0.0 {
                    for k in 0..m {
                        binv[i * m + k] -= f * binv[p * m + k];
                    }
                    y_b[i] -= f * y_b[p];
                }
            }
            for k in 0..m {
                binv[p * m + k] /= dp;
            }
            y_b[p] /= dp;
            basis[p] = ColRef::Real(enter);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    fn solve_cols(
        m: usize,
        cols: Vec<Vec<(usize, i64)>>,
        obj: Vec<i64>,
        rhs: Vec<i64>,
        presolve: bool,
    ) -> MachineResult {
        let cols = cols
            .into_iter()
            .map(|c| c.into_iter().map(|(r, v)| (r, rat(v))).collect())
            .collect();
        let obj = obj.into_iter().map(rat).collect();
        let rhs = rhs.into_iter().map(rat).collect();
        let mach = Machine::new(m, cols, obj, rhs);
        let opts = MachineOptions { presolve, ..Default::default() };
        mach.solve(&opts, None).unwrap()
    }

    #[test]
    fn textbook_max_problem() {
        // max 3a + 5b  s.t. a + s1 = 4, 2b + s2 = 12, 3a + 2b + s3 = 18.
        let cols = vec![
            vec![(0, 1), (2, 3)],
            vec![(1, 2), (2, 2)],
            vec![(0, 1)],
            vec![(1, 1)],
            vec![(2, 1)],
        ];
        for presolve in [false, true] {
            let res = solve_cols(3, cols.clone(), vec![3, 5, 0, 0, 0], vec![4, 12, 18], presolve);
            assert_eq!(res.status, MachineStatus::Optimal);
            assert_eq!(res.value, rat(36));
            assert_eq!(res.y[0], rat(2));
            assert_eq!(res.y[1], rat(6));
        }
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max a + b  s.t. 2a + b = 1, a + 3b = 1  ->  a = 2/5, b = 1/5.
        let cols = vec![vec![(0, 2), (1, 1)], vec![(0, 1), (1, 3)]];
        let res = solve_cols(2, cols, vec![1, 1], vec![1, 1], false);
        assert_eq!(res.status, MachineStatus::Optimal);
        assert_eq!(res.value, ratio(3, 5));
        assert_eq!(res.y, vec![ratio(2, 5), ratio(1, 5)]);
    }

    #[test]
    fn detects_infeasible() {
        // a + b = -1 with a, b >= 0 (rhs flips to 1 with negated row).
        let cols = vec![vec![(0, 1)], vec![(0, 1)]];
        let res = solve_cols(1, cols, vec![0, 0], vec![-1], false);
        assert_eq!(res.status, MachineStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // max a  s.t. a - b = 1: ray a = b + 1 -> infinity.
        let cols = vec![vec![(0, 1)], vec![(0, -1)]];
        let res = solve_cols(1, cols, vec![1, 0], vec![1], false);
        assert_eq!(res.status, MachineStatus::Unbounded);
    }

    #[test]
    fn prices_solve_the_dual_side() {
        // Same textbook problem; prices must reproduce the optimal value
        // against the rhs and dominate every column.
        let cols: Vec<Vec<(usize, Rat)>> = vec![
            vec![(0, rat(1)), (2, rat(3))],
            vec![(1, rat(2)), (2, rat(2))],
            vec![(0, rat(1))],
            vec![(1, rat(1))],
            vec![(2, rat(1))],
        ];
        let obj: Vec<Rat> = [3, 5, 0, 0, 0].map(rat).to_vec();
        let rhs: Vec<Rat> = [4, 12, 18].map(rat).to_vec();
        let mach = Machine::new(3, cols.clone(), obj.clone(), rhs.clone());
        let res = mach.solve(&MachineOptions { presolve: false, ..Default::default() }, None).unwrap();
        let dual_value: Rat = rhs.iter().zip(&res.prices).map(|(b, p)| b * p).sum();
        assert_eq!(dual_value, res.value);
        for (j, col) in cols.iter().enumerate() {
            let lhs: Rat = col.iter().map(|(r, v)| v * &res.prices[*r]).sum();
            assert!(lhs >= obj[j], "price vector fails column {}", j);
        }
    }

    #[test]
    fn warm_basis_skips_to_optimum() {
        let cols = vec![
            vec![(0, rat(1)), (2, rat(3))],
            vec![(1, rat(2)), (2, rat(2))],
            vec![(0, rat(1))],
            vec![(1, rat(1))],
            vec![(2, rat(1))],
        ];
        let obj: Vec<Rat> = [3, 5, 0, 0, 0].map(rat).to_vec();
        let rhs: Vec<Rat> = [4, 12, 18].map(rat).to_vec();
        let mach = Machine::new(3, cols, obj, rhs);
        // Optimal basis from the textbook solution: columns a, b, s1.
        let warm = [ColRef::Real(0), ColRef::Real(1), ColRef::Real(2)];
        let res = mach
            .solve(&MachineOptions { presolve: false, ..Default::default() }, Some(&warm))
            .unwrap();
        assert_eq!(res.status, MachineStatus::Optimal);
        assert_eq!(res.value, rat(36));
    }
}
