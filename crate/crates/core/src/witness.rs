//! Explicit entropy vectors from file-assignment codes.
//!
//! Assigning each variable a subset of the files (thought of as independent
//! unit-size blocks) induces the entropy vector `h(S) = |union of assigned
//! sets|`, which is entropic by construction. These vectors witness
//! feasibility of the caching models: the full-cache scheme at `(M, R) =
//! (N, 0)` and the uncoded broadcast at `(0, N)`.

use std::collections::BTreeSet;

use crate::entropy::{Role, VariableUniverse, VarSet};
use crate::model::CachingModel;
use crate::rat::{rat, Rat};

/// A code where every variable holds a set of whole files.
#[derive(Debug, Clone)]
pub struct SetCode {
    assignments: Vec<BTreeSet<usize>>,
}

impl SetCode {
    pub fn new(u: &VariableUniverse, assign: impl Fn(Role) -> BTreeSet<usize>) -> SetCode {
        let assignments = (0..u.total_vars())
            .map(|v| match u.role(v) {
                Role::File(i) => BTreeSet::from([i]),
                role => assign(role),
            })
            .collect();
        SetCode { assignments }
    }

    /// Every cache holds all files; messages are empty. Feasible at
    /// `M = N, R = 0`.
    pub fn full_cache(u: &VariableUniverse) -> SetCode {
        let all: BTreeSet<usize> = (0..u.n_files()).collect();
        Self::new(u, |role| match role {
            Role::Cache(_) => all.clone(),
            _ => BTreeSet::new(),
        })
    }

    /// Caches are empty; each message carries the files it must deliver.
    /// Feasible at `M = 0, R = N`.
    pub fn broadcast(u: &VariableUniverse) -> SetCode {
        let demands = u.demands().to_vec();
        Self::new(u, move |role| match role {
            Role::Delivery(j) => demands[j].0.iter().map(|&f| f as usize).collect(),
            _ => BTreeSet::new(),
        })
    }

    pub fn entropy(&self, s: VarSet) -> Rat {
        let mut union = BTreeSet::new();
        for v in s.iter() {
            union.extend(self.assignments[v].iter().copied());
        }
        rat(union.len() as i64)
    }

    /// Evaluates every model constraint at this vector with the given
    /// `(M, R)`; returns the display of the first violated one.
    pub fn check_model(&self, m: &CachingModel, mval: &Rat, rval: &Rat) -> Result<(), String> {
        for c in m.constraints() {
            let v = c.form.eval(|s| self.entropy(s), mval, rval);
            if v < rat(0) {
                return Err(format!(
                    "violated: {} (value {})",
                    c.form.display(m.universe()),
                    crate::rat::fmt_rat(&v)
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{elemental_inequalities, Demand};
    use crate::model::preset_model;

    #[test]
    fn witnesses_satisfy_every_model_constraint() {
        for name in ["man-table2", "full-2x2", "cyclic-3"] {
            let m = preset_model(name).unwrap();
            let n = rat(m.universe().n_files() as i64);
            let full = SetCode::full_cache(m.universe());
            full.check_model(&m, &n, &rat(0)).unwrap();
            let bcast = SetCode::broadcast(m.universe());
            bcast.check_model(&m, &rat(0), &n).unwrap();
        }
    }

    #[test]
    fn witnesses_lie_in_the_shannon_cone() {
        let m = preset_model("man-table2").unwrap();
        for code in [SetCode::full_cache(m.universe()), SetCode::broadcast(m.universe())] {
            for iq in elemental_inequalities(m.universe()).unwrap() {
                let v = iq.form.eval(|s| code.entropy(s), &rat(0), &rat(0));
                assert!(v >= rat(0), "elemental violated: {:?}", iq.provenance);
            }
        }
    }

    #[test]
    fn elementals_hold_on_duplicated_and_independent_bits() {
        // 4 variables: two independent "files", one duplicate of file 0, one
        // holding both.
        let u = VariableUniverse::build(2, 2, &[Demand(vec![0, 0]), Demand(vec![1, 1])]).unwrap();
        let code = SetCode::new(&u, |role| match role {
            Role::Cache(0) => BTreeSet::from([0]),
            Role::Cache(1) => BTreeSet::from([0, 1]),
            Role::Delivery(j) => BTreeSet::from([j]),
            _ => BTreeSet::new(),
        });
        for iq in elemental_inequalities(&u).unwrap() {
            let v = iq.form.eval(|s| code.entropy(s), &rat(0), &rat(0));
            assert!(v >= rat(0));
        }
    }

    #[test]
    fn symmetric_code_satisfies_the_orbit_equality() {
        // The full-cache scheme is symmetric: H(Z0,X210) = H(Z0,X201).
        let m = preset_model("man-table2").unwrap();
        let u = m.universe();
        let code = SetCode::full_cache(u);
        let a = u.parse_term_name("H(Z0,X210)").unwrap();
        let b = u.parse_term_name("H(Z0,X201)").unwrap();
        assert_eq!(code.entropy(a), code.entropy(b));
    }
}
