//! User-permutation symmetry on caches and delivery messages.
//!
//! A permutation `p` of the users fixes every file variable, sends `Z_i` to
//! `Z_{p(i)}`, and sends `X_u` to the message whose demand tuple places
//! `u_i` at position `p(i)` (equivalently `t = u . p^{-1}`). The action on a
//! message is partial: it is defined only when the image tuple is among the
//! modeled demands. Symmetric codes give `H(s) = H(p(s))` whenever both
//! sides exist, which is what the orbit quotient exploits.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::entropy::{Demand, Inequality, LinearForm, Provenance, Role, VariableUniverse, VarSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("permutation image {images:?} is not a bijection")]
    NotBijective { images: Vec<usize> },
    #[error("bad permutation string {text:?}")]
    BadPermutation { text: String },
    #[error(
        "permutation {perm} maps demand {demand} outside the modeled demand set"
    )]
    ImageOutsideUniverse { perm: String, demand: String },
}

/// A bijection on user indices, stored as its image vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserPermutation {
    img: Vec<usize>,
}

impl UserPermutation {
    pub fn identity(k: usize) -> UserPermutation {
        UserPermutation { img: (0..k).collect() }
    }

    pub fn from_images(img: Vec<usize>) -> Result<UserPermutation, SymmetryError> {
        let k = img.len();
        let mut seen = vec![false; k];
        for &v in &img {
            if v >= k || seen[v] {
                return Err(SymmetryError::NotBijective { images: img.clone() });
            }
            seen[v] = true;
        }
        Ok(UserPermutation { img })
    }

    pub fn len(&self) -> usize {
        self.img.len()
    }

    pub fn is_empty(&self) -> bool {
        self.img.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.img[i]
    }

    pub fn inverse(&self) -> UserPermutation {
        let mut inv = vec![0; self.img.len()];
        for (i, &v) in self.img.iter().enumerate() {
            inv[v] = i;
        }
        UserPermutation { img: inv }
    }

    /// `self . other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &UserPermutation) -> UserPermutation {
        assert_eq!(self.len(), other.len());
        UserPermutation { img: (0..other.len()).map(|i| self.img[other.img[i]]).collect() }
    }

    /// One-line image form, e.g. `"120"` for p(0)=1, p(1)=2, p(2)=0.
    pub fn parse(text: &str) -> Result<UserPermutation, SymmetryError> {
        let mut img = Vec::with_capacity(text.len());
        for c in text.chars() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| SymmetryError::BadPermutation { text: text.to_string() })?;
            img.push(d as usize);
        }
        Self::from_images(img)
            .map_err(|_| SymmetryError::BadPermutation { text: text.to_string() })
    }
}

impl fmt::Display for UserPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.img {
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

/// Image of a demand tuple: position `p(i)` of the image holds entry `i` of
/// the source, i.e. `t_j = u_{p^{-1}(j)}`.
pub fn permute_demand(perm: &UserPermutation, d: &Demand) -> Demand {
    let inv = perm.inverse();
    Demand((0..d.0.len()).map(|j| d.0[inv.apply_index(j)]).collect())
}

/// Applies the permutation action to a subset. Fails when a delivery
/// variable's image tuple is not among the modeled demands.
pub fn apply_permutation(
    u: &VariableUniverse,
    perm: &UserPermutation,
    s: VarSet,
) -> Result<VarSet, SymmetryError> {
    assert_eq!(perm.len(), u.n_users(), "permutation size must match the user count");
    let mut out = VarSet::EMPTY;
    for v in s.iter() {
        let image = match u.role(v) {
            Role::File(_) => v,
            Role::Cache(k) => u.cache_var(perm.apply_index(k)),
            Role::Delivery(j) => {
                let t = permute_demand(perm, &u.demands()[j]);
                match u.demand_index(&t) {
                    Some(tj) => u.delivery_var(tj),
                    None => {
                        return Err(SymmetryError::ImageOutsideUniverse {
                            perm: perm.to_string(),
                            demand: u.demands()[j].digits(),
                        })
                    }
                }
            }
        };
        out = out.with(image);
    }
    Ok(out)
}

/// All `K!` user permutations, sorted by image vector (identity first).
pub fn full_symmetric_group(k: usize) -> Vec<UserPermutation> {
    let mut out = Vec::new();
    let mut img: Vec<usize> = (0..k).collect();
    loop {
        out.push(UserPermutation { img: img.clone() });
        // Next lexicographic permutation.
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| img[i] < img[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| img[j] > img[i]).unwrap();
        img.swap(i, j);
        img[i + 1..].reverse();
    }
    out
}

/// The largest subgroup of `S_K` whose action maps the modeled demand set
/// onto itself. Always contains the identity.
pub fn stabilizer_subgroup(u: &VariableUniverse) -> Vec<UserPermutation> {
    full_symmetric_group(u.n_users())
        .into_iter()
        .filter(|p| {
            u.demands()
                .iter()
                .all(|d| u.demand_index(&permute_demand(p, d)).is_some())
        })
        .collect()
}

/// Canonical-representative map for subset orbits under the (possibly
/// partial) action of a set of permutations. The orbit relation is the
/// equivalence closure of single applications; the representative is the
/// lexicographically least member, and each subset carries a witness
/// permutation mapping it onto its representative.
#[derive(Debug, Clone)]
pub struct OrbitMap {
    group: Vec<UserPermutation>,
    rep_by_mask: Vec<u32>,
    witness_by_mask: Vec<UserPermutation>,
    orbit_count: usize,
}

pub fn orbit_map(u: &VariableUniverse, group: &[UserPermutation]) -> OrbitMap {
    let n = u.total_vars();
    let size = 1usize << n;
    let mut parent: Vec<u32> = (0..size as u32).collect();

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }

    for mask in 1..size as u32 {
        for p in group {
            if let Ok(img) = apply_permutation(u, p, VarSet(mask)) {
                let (a, b) = (find(&mut parent, mask), find(&mut parent, img.0));
                if a != b {
                    parent[a as usize] = b;
                }
            }
        }
    }

    // Lexicographically least member of each class.
    let mut best: Vec<u32> = (0..size as u32).collect();
    for mask in 1..size as u32 {
        let root = find(&mut parent, mask) as usize;
        if VarSet(mask) < VarSet(best[root]) {
            best[root] = mask;
        }
    }
    let mut rep_by_mask: Vec<u32> = vec![0; size];
    for mask in 1..size as u32 {
        let root = find(&mut parent, mask) as usize;
        rep_by_mask[mask as usize] = best[root];
    }

    // Witnesses: breadth-first from each representative, composing steps.
    let identity = UserPermutation::identity(u.n_users());
    let mut witness_by_mask: Vec<UserPermutation> = vec![identity.clone(); size];
    let mut seen = vec![false; size];
    let mut orbit_count = 0usize;
    for mask in 1..size as u32 {
        if rep_by_mask[mask as usize] != mask {
            continue;
        }
        orbit_count += 1;
        // perm_from_rep[t] maps the representative onto t; the witness for t
        // is its inverse.
        let mut queue = VecDeque::new();
        seen[mask as usize] = true;
        witness_by_mask[mask as usize] = identity.clone();
        queue.push_back((mask, identity.clone()));
        while let Some((cur, from_rep)) = queue.pop_front() {
            for p in group {
                if let Ok(img) = apply_permutation(u, p, VarSet(cur)) {
                    if !seen[img.0 as usize] {
                        seen[img.0 as usize] = true;
                        let composite = p.compose(&from_rep);
                        witness_by_mask[img.0 as usize] = composite.inverse();
                        queue.push_back((img.0, composite));
                    }
                }
            }
        }
    }

    OrbitMap {
        group: group.to_vec(),
        rep_by_mask,
        witness_by_mask,
        orbit_count,
    }
}

impl OrbitMap {
    pub fn representative(&self, s: VarSet) -> VarSet {
        VarSet(self.rep_by_mask[s.0 as usize])
    }

    /// A permutation mapping `s` onto its representative.
    pub fn witness(&self, s: VarSet) -> &UserPermutation {
        &self.witness_by_mask[s.0 as usize]
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    pub fn group(&self) -> &[UserPermutation] {
        &self.group
    }

    pub fn is_identity(&self) -> bool {
        self.rep_by_mask
            .iter()
            .enumerate()
            .all(|(mask, &rep)| rep as usize == mask || mask == 0)
    }

    pub fn quotient_form(&self, form: &LinearForm) -> LinearForm {
        form.map_terms(|s| self.representative(s))
    }
}

/// Rewrites constraints over orbit representatives, dropping rows that
/// collapse to `0 >= 0` and duplicates (first provenance wins).
pub fn quotient_inequalities(rows: &[Inequality], om: &OrbitMap) -> Vec<Inequality> {
    let mut out: Vec<Inequality> = Vec::with_capacity(rows.len());
    let mut seen = std::collections::BTreeSet::new();
    for row in rows {
        let form = om.quotient_form(&row.form);
        if form.is_zero() {
            continue;
        }
        if seen.insert(form.clone()) {
            out.push(Inequality { form, provenance: row.provenance.clone() });
        }
    }
    out
}

/// Explicit symmetry equalities `H(rep(s)) = H(s)` as inequality pairs, for
/// the validation mode that appends constraints instead of merging terms.
pub fn symmetry_equality_rows(u: &VariableUniverse, om: &OrbitMap) -> Vec<Inequality> {
    let n = u.total_vars();
    let mut out = Vec::new();
    for mask in 1..(1u32 << n) {
        let s = VarSet(mask);
        let rep = om.representative(s);
        if rep == s {
            continue;
        }
        let perm = om.witness(s).clone();
        debug_assert_eq!(apply_permutation(u, &perm, s).unwrap(), rep);
        for sense in [crate::entropy::Sense::Ge, crate::entropy::Sense::Le] {
            let mut form = LinearForm::zero();
            form.add_term(rep, crate::rat::rat(1));
            form.add_term(s, crate::rat::rat(-1));
            let form = match sense {
                crate::entropy::Sense::Ge => form,
                crate::entropy::Sense::Le => form.negated(),
            };
            out.push(Inequality {
                form,
                provenance: Provenance::SymmetryEquality { perm: perm.clone(), base: s, sense },
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demands(ds: &[&str]) -> Vec<Demand> {
        ds.iter().map(|s| Demand::parse(s).unwrap()).collect()
    }

    fn u_table2() -> VariableUniverse {
        VariableUniverse::build(3, 3, &demands(&["210", "201"])).unwrap()
    }

    fn set(u: &VariableUniverse, names: &[&str]) -> VarSet {
        let mut s = VarSet::EMPTY;
        for n in names {
            s = s.with(u.parse_var_name(n).unwrap());
        }
        s
    }

    #[test]
    fn cycle_maps_z1_to_z2() {
        // p(0)=1, p(1)=2, p(2)=0 sends {Z1} to {Z2}.
        let u = u_table2();
        let p = UserPermutation::parse("120").unwrap();
        let got = apply_permutation(&u, &p, set(&u, &["Z1"])).unwrap();
        assert_eq!(got, set(&u, &["Z2"]));
    }

    #[test]
    fn cycle_maps_message_pair_like_the_worked_example() {
        // The same cycle sends {X012, X210} to {X201, X021}.
        let u = VariableUniverse::build(3, 3, &demands(&["012", "210", "201", "021"])).unwrap();
        let p = UserPermutation::parse("120").unwrap();
        let got = apply_permutation(&u, &p, set(&u, &["X012", "X210"])).unwrap();
        assert_eq!(got, set(&u, &["X201", "X021"]));
    }

    #[test]
    fn cycle_keeps_decodability_shape() {
        // {W1, Z1, X012} maps to {W1, Z2, X201}.
        let u = VariableUniverse::build(3, 3, &demands(&["012", "201"])).unwrap();
        let p = UserPermutation::parse("120").unwrap();
        let got = apply_permutation(&u, &p, set(&u, &["W1", "Z1", "X012"])).unwrap();
        assert_eq!(got, set(&u, &["W1", "Z2", "X201"]));
    }

    #[test]
    fn identity_fixes_everything() {
        let u = u_table2();
        let id = UserPermutation::identity(3);
        for mask in 1..(1u32 << 8) {
            assert_eq!(apply_permutation(&u, &id, VarSet(mask)).unwrap(), VarSet(mask));
        }
    }

    #[test]
    fn image_outside_universe_is_an_error() {
        let u = u_table2();
        let p = UserPermutation::parse("102").unwrap(); // swap users 0,1
        let r = apply_permutation(&u, &p, set(&u, &["X210"]));
        assert!(matches!(r, Err(SymmetryError::ImageOutsideUniverse { .. })));
    }

    #[test]
    fn composition_is_a_left_action() {
        let u = VariableUniverse::build(3, 3, &demands(&["012", "210", "201", "021", "120", "102"]))
            .unwrap();
        let group = full_symmetric_group(3);
        for a in &group {
            for b in &group {
                let ab = a.compose(b);
                for mask in [0b1u32, 0b111000, 0b10110101, 0b111111111111] {
                    let s = VarSet(mask & ((1 << u.total_vars()) - 1));
                    if s.is_empty() {
                        continue;
                    }
                    let two_step =
                        apply_permutation(&u, a, apply_permutation(&u, b, s).unwrap()).unwrap();
                    let one_step = apply_permutation(&u, &ab, s).unwrap();
                    assert_eq!(two_step, one_step);
                }
            }
        }
    }

    #[test]
    fn stabilizer_of_table2_demands_is_order_two() {
        let u = u_table2();
        let g = stabilizer_subgroup(&u);
        let names: Vec<String> = g.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["012", "021"]);
    }

    #[test]
    fn stabilizer_of_full_2x2_is_all_of_s2() {
        let u = VariableUniverse::build(2, 2, &demands(&["00", "01", "10", "11"])).unwrap();
        assert_eq!(stabilizer_subgroup(&u).len(), 2);
    }

    #[test]
    fn stabilizer_of_constant_demand_is_full() {
        let u = VariableUniverse::build(1, 3, &demands(&["000"])).unwrap();
        assert_eq!(stabilizer_subgroup(&u).len(), 6);
    }

    #[test]
    fn orbit_reps_are_idempotent_and_shared() {
        let u = u_table2();
        let om = orbit_map(&u, &full_symmetric_group(3));
        for mask in 1..(1u32 << 8) {
            let s = VarSet(mask);
            let rep = om.representative(s);
            assert_eq!(om.representative(rep), rep);
            assert!(rep <= s);
            // Witness really maps s onto rep.
            assert_eq!(apply_permutation(&u, om.witness(s), s).unwrap(), rep);
        }
        // The symmetry step of the M+R>=2 proof: H(Z0,X210) and H(Z0,X201)
        // share a representative.
        let a = set(&u, &["Z0", "X210"]);
        let b = set(&u, &["Z0", "X201"]);
        assert_eq!(om.representative(a), om.representative(b));
        // Cross-cache identification on message-free sets.
        let c = set(&u, &["W2", "Z0"]);
        let d = set(&u, &["W2", "Z1"]);
        assert_eq!(om.representative(c), om.representative(d));
    }

    #[test]
    fn singleton_group_gives_identity_orbits() {
        let u = u_table2();
        let om = orbit_map(&u, &[UserPermutation::identity(3)]);
        assert!(om.is_identity());
        assert_eq!(om.orbit_count(), 255);
    }

    #[test]
    fn table2_orbits_shrink_strictly() {
        let u = u_table2();
        let stab = orbit_map(&u, &stabilizer_subgroup(&u));
        assert!(stab.orbit_count() < 255);
        assert_eq!(stab.orbit_count(), (255 + 63) / 2);
        let full = orbit_map(&u, &full_symmetric_group(3));
        assert!(full.orbit_count() < stab.orbit_count());
    }

    #[test]
    fn permutation_round_trip_and_inverse() {
        let p = UserPermutation::parse("120").unwrap();
        assert_eq!(p.to_string(), "120");
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(UserPermutation::parse("112").is_err());
    }
}
