//! Joint-entropy coordinate space over a caching variable universe.
//!
//! A universe holds the file variables `W0..`, cache variables `Z0..` and
//! delivery variables `Xd` for a chosen set of demand tuples, in a fixed
//! canonical order. Every nonempty subset of the universe is one coordinate
//! of the entropy vector; this module enumerates those coordinates and
//! generates the elemental Shannon inequalities that cut out the Shannon
//! outer bound.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::rat::{rat, Rat};
use crate::symmetry::UserPermutation;

/// Hard cap on universe size: coordinates are enumerated densely as bitmasks.
pub const MAX_VARS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("invalid demand tuple {tuple:?}: {reason}")]
    InvalidDemand { tuple: String, reason: String },
    #[error("duplicate demand tuple {tuple:?}")]
    DuplicateDemand { tuple: String },
    #[error(
        "universe with {total} variables exceeds the cap of {cap}; \
         model a demand subset instead (see the named presets)"
    )]
    UniverseTooLarge { total: usize, cap: usize },
    #[error("term names require n_files <= 10, got {n_files}")]
    TooManyFiles { n_files: usize },
    #[error("bad term name {name:?}: {reason}")]
    BadTermName { name: String, reason: String },
}

/// One demand tuple: the file index requested by each user.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Demand(pub Vec<u8>);

impl Demand {
    pub fn digits(&self) -> String {
        self.0.iter().map(|d| char::from(b'0' + d)).collect()
    }

    pub fn parse(s: &str) -> Result<Demand, UniverseError> {
        let mut out = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = c.to_digit(10).ok_or_else(|| UniverseError::InvalidDemand {
                tuple: s.to_string(),
                reason: format!("non-digit character {:?}", c),
            })?;
            out.push(d as u8);
        }
        Ok(Demand(out))
    }
}

/// Role of a variable in the canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    File(usize),
    Cache(usize),
    Delivery(usize),
}

/// The ordered roster of random variables: all `W_i`, then all `Z_k`, then
/// all `X_d` with demands in lexicographic tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableUniverse {
    n_files: usize,
    n_users: usize,
    demands: Vec<Demand>,
}

impl VariableUniverse {
    pub fn build(
        n_files: usize,
        n_users: usize,
        demands: &[Demand],
    ) -> Result<VariableUniverse, UniverseError> {
        Self::build_capped(n_files, n_users, demands, MAX_VARS)
    }

    /// Like [`build`](Self::build) with an explicit variable cap.
    pub fn build_capped(
        n_files: usize,
        n_users: usize,
        demands: &[Demand],
        cap: usize,
    ) -> Result<VariableUniverse, UniverseError> {
        assert!(n_files >= 1 && n_users >= 1, "need at least one file and one user");
        if n_files > 10 {
            return Err(UniverseError::TooManyFiles { n_files });
        }
        let mut sorted: Vec<Demand> = Vec::with_capacity(demands.len());
        for d in demands {
            if d.0.len() != n_users {
                return Err(UniverseError::InvalidDemand {
                    tuple: d.digits(),
                    reason: format!("expected {} entries, got {}", n_users, d.0.len()),
                });
            }
            if let Some(bad) = d.0.iter().find(|&&f| f as usize >= n_files) {
                return Err(UniverseError::InvalidDemand {
                    tuple: d.digits(),
                    reason: format!("file index {} out of range [0, {})", bad, n_files),
                });
            }
            sorted.push(d.clone());
        }
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(UniverseError::DuplicateDemand { tuple: w[0].digits() });
        }
        let total = n_files + n_users + sorted.len();
        if total > cap {
            return Err(UniverseError::UniverseTooLarge { total, cap });
        }
        Ok(VariableUniverse { n_files, n_users, demands: sorted })
    }

    pub fn n_files(&self) -> usize {
        self.n_files
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn total_vars(&self) -> usize {
        self.n_files + self.n_users + self.demands.len()
    }

    pub fn role(&self, var: usize) -> Role {
        if var < self.n_files {
            Role::File(var)
        } else if var < self.n_files + self.n_users {
            Role::Cache(var - self.n_files)
        } else {
            Role::Delivery(var - self.n_files - self.n_users)
        }
    }

    pub fn file_var(&self, i: usize) -> usize {
        debug_assert!(i < self.n_files);
        i
    }

    pub fn cache_var(&self, k: usize) -> usize {
        debug_assert!(k < self.n_users);
        self.n_files + k
    }

    pub fn delivery_var(&self, demand_idx: usize) -> usize {
        debug_assert!(demand_idx < self.demands.len());
        self.n_files + self.n_users + demand_idx
    }

    /// Index of a demand tuple in the canonical demand list.
    pub fn demand_index(&self, d: &Demand) -> Option<usize> {
        self.demands.binary_search(d).ok()
    }

    pub fn all_files(&self) -> VarSet {
        VarSet::from_indices((0..self.n_files).collect::<Vec<_>>().as_slice())
    }

    pub fn full_set(&self) -> VarSet {
        VarSet(((1u32 << self.total_vars()) - 1) as u32)
    }

    pub fn var_name(&self, var: usize) -> String {
        match self.role(var) {
            Role::File(i) => format!("W{}", i),
            Role::Cache(k) => format!("Z{}", k),
            Role::Delivery(j) => format!("X{}", self.demands[j].digits()),
        }
    }

    /// `H(...)` term name: comma-joined variable names in canonical order.
    pub fn term_name(&self, s: VarSet) -> String {
        let names: Vec<String> = s.iter().map(|v| self.var_name(v)).collect();
        format!("H({})", names.join(","))
    }

    pub fn parse_var_name(&self, name: &str) -> Result<usize, UniverseError> {
        let bad = |reason: &str| UniverseError::BadTermName {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = name.split_at(1.min(name.len()));
        match kind {
            "W" => {
                let i: usize = rest.parse().map_err(|_| bad("bad file index"))?;
                if i >= self.n_files {
                    return Err(bad("file index out of range"));
                }
                Ok(self.file_var(i))
            }
            "Z" => {
                let k: usize = rest.parse().map_err(|_| bad("bad cache index"))?;
                if k >= self.n_users {
                    return Err(bad("cache index out of range"));
                }
                Ok(self.cache_var(k))
            }
            "X" => {
                let d = Demand::parse(rest)?;
                let j = self
                    .demand_index(&d)
                    .ok_or_else(|| bad("demand tuple not in this universe"))?;
                Ok(self.delivery_var(j))
            }
            _ => Err(bad("expected W, Z or X prefix")),
        }
    }

    /// Parses a canonical `H(...)` term name back to its subset.
    pub fn parse_term_name(&self, name: &str) -> Result<VarSet, UniverseError> {
        let bad = |reason: &str| UniverseError::BadTermName {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        let inner = name
            .strip_prefix("H(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected H(...)"))?;
        let mut set = VarSet::EMPTY;
        let mut last: Option<usize> = None;
        for piece in inner.split(',') {
            let v = self.parse_var_name(piece)?;
            if let Some(prev) = last {
                if v <= prev {
                    return Err(bad("variables out of canonical order"));
                }
            }
            last = Some(v);
            set = set.with(v);
        }
        if set.is_empty() {
            return Err(bad("empty term"));
        }
        Ok(set)
    }
}

/// A subset of the universe's variables; one joint-entropy coordinate.
///
/// Ordering is lexicographic on the ascending sequence of member indices,
/// which is also the canonical coordinate order and the orbit-representative
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarSet(pub u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn singleton(v: usize) -> VarSet {
        VarSet(1 << v)
    }

    pub fn from_indices(vs: &[usize]) -> VarSet {
        let mut m = 0u32;
        for &v in vs {
            m |= 1 << v;
        }
        VarSet(m)
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 & (1 << v) != 0
    }

    pub fn with(self, v: usize) -> VarSet {
        VarSet(self.0 | (1 << v))
    }

    pub fn without(self, v: usize) -> VarSet {
        VarSet(self.0 & !(1 << v))
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn minus(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(v)
            }
        })
    }
}

impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        if self.0 == other.0 {
            return Equal;
        }
        // First index where membership differs. The set holding it is the
        // smaller one unless the other set has no members past that index
        // (then the other is a strict prefix, hence smaller).
        let d = (self.0 ^ other.0).trailing_zeros();
        let d_in_self = self.0 & (1 << d) != 0;
        let other_continues = if d_in_self {
            other.0 >> (d + 1) != 0
        } else {
            self.0 >> (d + 1) != 0
        };
        match (d_in_self, other_continues) {
            (true, true) => Less,
            (true, false) => Greater,
            (false, true) => Greater,
            (false, false) => Less,
        }
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse rational combination of joint entropies, `M`, `R` and the unit
/// file size `F`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LinearForm {
    terms: BTreeMap<VarSet, Rat>,
    m: Rat,
    r: Rat,
    constant: Rat,
}

impl LinearForm {
    pub fn zero() -> LinearForm {
        LinearForm::default()
    }

    pub fn term(s: VarSet, c: Rat) -> LinearForm {
        let mut f = LinearForm::zero();
        f.add_term(s, c);
        f
    }

    pub fn add_term(&mut self, s: VarSet, c: Rat) {
        assert!(!s.is_empty(), "H() of the empty set is not a coordinate");
        let entry = self.terms.entry(s).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add_m(&mut self, c: Rat) {
        self.m += c;
    }

    pub fn add_r(&mut self, c: Rat) {
        self.r += c;
    }

    pub fn add_constant(&mut self, c: Rat) {
        self.constant += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (VarSet, &Rat)> {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    pub fn coeff(&self, s: VarSet) -> Rat {
        self.terms.get(&s).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn m_coeff(&self) -> &Rat {
        &self.m
    }

    pub fn r_coeff(&self) -> &Rat {
        &self.r
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.m.is_zero() && self.r.is_zero() && self.constant.is_zero()
    }

    /// True when the form has no variable part (only a constant remains).
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() && self.m.is_zero() && self.r.is_zero()
    }

    pub fn add_scaled(&mut self, other: &LinearForm, mult: &Rat) {
        if mult.is_zero() {
            return;
        }
        for (s, c) in &other.terms {
            self.add_term(*s, c * mult);
        }
        self.m += &other.m * mult;
        self.r += &other.r * mult;
        self.constant += &other.constant * mult;
    }

    pub fn scaled(&self, mult: &Rat) -> LinearForm {
        let mut out = LinearForm::zero();
        out.add_scaled(self, mult);
        out
    }

    pub fn negated(&self) -> LinearForm {
        self.scaled(&rat(-1))
    }

    /// Evaluates the form with F = 1 against explicit values for every
    /// entropy coordinate it mentions, plus values for M and R.
    pub fn eval(&self, h: impl Fn(VarSet) -> Rat, m: &Rat, r: &Rat) -> Rat {
        let mut acc = self.constant.clone();
        acc += &self.m * m;
        acc += &self.r * r;
        for (s, c) in &self.terms {
            acc += c * h(*s);
        }
        acc
    }

    /// Rewrites every entropy term through `map` (summing merged terms).
    pub fn map_terms(&self, map: impl Fn(VarSet) -> VarSet) -> LinearForm {
        let mut out = LinearForm::zero();
        for (s, c) in &self.terms {
            out.add_term(map(*s), c.clone());
        }
        out.m = self.m.clone();
        out.r = self.r.clone();
        out.constant = self.constant.clone();
        out
    }

    /// Human-readable rendering over a universe's term names.
    pub fn display(&self, u: &VariableUniverse) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut push = |c: &Rat, name: &str| {
            if c.is_zero() {
                return;
            }
            parts.push(format!("{}*{}", crate::rat::fmt_rat(c), name));
        };
        push(&self.m, "M");
        push(&self.r, "R");
        for (s, c) in &self.terms {
            push(c, &u.term_name(*s));
        }
        push(&self.constant, "F");
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Direction of one half of an equality pair: `Ge` is the stated form,
/// `Le` the negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sense {
    Ge,
    Le,
}

impl Sense {
    pub fn sign(self) -> Rat {
        match self {
            Sense::Ge => rat(1),
            Sense::Le => rat(-1),
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Ge => write!(f, "ge"),
            Sense::Le => write!(f, "le"),
        }
    }
}

/// Tagged origin of a constraint; regenerating the form from the tag is an
/// identity (equalities are kept as two opposing inequalities).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    Elemental { i: usize, j: usize, cond: VarSet },
    Monotone { i: usize, cond: VarSet },
    Decode { user: usize, demand: usize, sense: Sense },
    CacheDeterminism { user: usize, sense: Sense },
    DeliveryDeterminism { demand: usize, sense: Sense },
    Independence { files: VarSet, sense: Sense },
    RateM { user: usize },
    RateR { demand: usize },
    MNonneg,
    RNonneg,
    SymmetryEquality { perm: UserPermutation, base: VarSet, sense: Sense },
    Composite,
}

/// A linear inequality `form >= 0` with its provenance tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub form: LinearForm,
    pub provenance: Provenance,
}

/// All nonempty subsets of the universe in canonical (lexicographic) order,
/// with constant-time index lookup.
#[derive(Debug, Clone)]
pub struct TermTable {
    terms: Vec<VarSet>,
    index_by_mask: Vec<usize>,
}

impl TermTable {
    pub fn terms(&self) -> &[VarSet] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, s: VarSet) -> usize {
        self.index_by_mask[s.0 as usize]
    }

    pub fn term(&self, idx: usize) -> VarSet {
        self.terms[idx]
    }
}

/// Enumerates all `2^n - 1` entropy coordinates in canonical order.
pub fn enumerate_terms(u: &VariableUniverse) -> Result<TermTable, UniverseError> {
    let n = u.total_vars();
    if n > MAX_VARS {
        return Err(UniverseError::UniverseTooLarge { total: n, cap: MAX_VARS });
    }
    let mut terms: Vec<VarSet> = (1u32..(1u32 << n)).map(VarSet).collect();
    terms.sort();
    let mut index_by_mask = vec![usize::MAX; 1usize << n];
    for (i, s) in terms.iter().enumerate() {
        index_by_mask[s.0 as usize] = i;
    }
    Ok(TermTable { terms, index_by_mask })
}

/// The elemental Shannon inequalities for the universe:
/// `H(all) - H(all \ {i}) >= 0` for each variable, and
/// `I(i; j | S) >= 0` for each unordered pair and each conditioning set.
///
/// Total count is `n + n(n-1)/2 * 2^(n-2)`.
pub fn elemental_inequalities(u: &VariableUniverse) -> Result<Vec<Inequality>, UniverseError> {
    let n = u.total_vars();
    if n > MAX_VARS {
        return Err(UniverseError::UniverseTooLarge { total: n, cap: MAX_VARS });
    }
    let full = u.full_set();
    let mut out = Vec::new();
    for i in 0..n {
        let cond = full.without(i);
        let mut form = LinearForm::zero();
        form.add_term(full, rat(1));
        if !cond.is_empty() {
            form.add_term(cond, rat(-1));
        }
        out.push(Inequality { form, provenance: Provenance::Monotone { i, cond } });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let rest = full.without(i).without(j);
            // All subsets of the remaining ground set, masks ascending.
            let rest_bits: Vec<usize> = rest.iter().collect();
            for pick in 0..(1u32 << rest_bits.len()) {
                let mut cond = VarSet::EMPTY;
                for (b, &v) in rest_bits.iter().enumerate() {
                    if pick & (1 << b) != 0 {
                        cond = cond.with(v);
                    }
                }
                out.push(Inequality {
                    form: mutual_information_form(i, j, cond),
                    provenance: Provenance::Elemental { i, j, cond },
                });
            }
        }
    }
    Ok(out)
}

/// `I(i; j | cond) = H(i,cond) + H(j,cond) - H(i,j,cond) - H(cond)`.
pub fn mutual_information_form(i: usize, j: usize, cond: VarSet) -> LinearForm {
    let mut form = LinearForm::zero();
    form.add_term(cond.with(i), rat(1));
    form.add_term(cond.with(j), rat(1));
    form.add_term(cond.with(i).with(j), rat(-1));
    if !cond.is_empty() {
        form.add_term(cond, rat(-1));
    }
    form
}

/// Closed-form count of [`elemental_inequalities`] output.
pub fn elemental_count(n: usize) -> usize {
    let pairs = n * (n - 1) / 2;
    let conds = if n >= 2 { 1usize << (n - 2) } else { 0 };
    n + pairs * conds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demands(ds: &[&str]) -> Vec<Demand> {
        ds.iter().map(|s| Demand::parse(s).unwrap()).collect()
    }

    #[test]
    fn universe_canonical_order_and_names() {
        let u = VariableUniverse::build(3, 3, &demands(&["210", "201"])).unwrap();
        assert_eq!(u.total_vars(), 8);
        let names: Vec<String> = (0..8).map(|v| u.var_name(v)).collect();
        assert_eq!(names, ["W0", "W1", "W2", "Z0", "Z1", "Z2", "X201", "X210"]);
    }

    #[test]
    fn minimal_universe() {
        let u = VariableUniverse::build(1, 1, &demands(&["0"])).unwrap();
        assert_eq!(u.total_vars(), 3);
        assert_eq!(u.var_name(0), "W0");
        assert_eq!(u.var_name(1), "Z0");
        assert_eq!(u.var_name(2), "X0");
    }

    #[test]
    fn two_by_two_universe_counts() {
        let u = VariableUniverse::build(2, 2, &demands(&["00", "01", "10", "11"])).unwrap();
        assert_eq!(u.total_vars(), 8);
    }

    #[test]
    fn rejects_bad_demands() {
        assert!(matches!(
            VariableUniverse::build(3, 3, &demands(&["210", "210"])),
            Err(UniverseError::DuplicateDemand { .. })
        ));
        assert!(matches!(
            VariableUniverse::build(3, 3, &demands(&["23"])),
            Err(UniverseError::InvalidDemand { .. })
        ));
        assert!(matches!(
            VariableUniverse::build(2, 2, &demands(&["02"])),
            Err(UniverseError::InvalidDemand { .. })
        ));
    }

    #[test]
    fn rejects_oversized_universe() {
        // All 27 demands of the 3x3 problem: 33 variables.
        let mut all = Vec::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    all.push(Demand(vec![a, b, c]));
                }
            }
        }
        assert!(matches!(
            VariableUniverse::build(3, 3, &all),
            Err(UniverseError::UniverseTooLarge { total: 33, cap: 16 })
        ));
    }

    #[test]
    fn varset_lex_order() {
        let s = |v: &[usize]| VarSet::from_indices(v);
        assert!(s(&[0]) < s(&[0, 1]));
        assert!(s(&[0, 1]) < s(&[0, 2]));
        assert!(s(&[0, 3]) < s(&[1, 2]));
        assert!(s(&[1, 2]) < s(&[1, 2, 5]));
        assert!(s(&[2]) < s(&[5]));
        assert_eq!(s(&[4, 2]), s(&[2, 4]));
    }

    #[test]
    fn term_enumeration_counts_and_round_trip() {
        for (nf, nu, ds, want) in [
            (1usize, 1usize, vec!["0"], 7usize),
            (3, 3, vec!["210", "201"], 255),
        ] {
            let u = VariableUniverse::build(nf, nu, &demands(&ds)).unwrap();
            let t = enumerate_terms(&u).unwrap();
            assert_eq!(t.len(), want);
            for (i, s) in t.terms().iter().enumerate() {
                assert_eq!(t.index_of(*s), i);
            }
        }
    }

    #[test]
    fn twelve_variable_enumeration() {
        let ds: Vec<Demand> = (0..6)
            .map(|i| Demand(vec![i as u8 % 3, (i as u8 + 1) % 3, (i as u8 + 2) % 3]))
            .collect();
        let u = VariableUniverse::build(3, 3, &ds).unwrap();
        assert_eq!(u.total_vars(), 12);
        assert_eq!(enumerate_terms(&u).unwrap().len(), 4095);
    }

    #[test]
    fn term_names_round_trip() {
        let u = VariableUniverse::build(3, 3, &demands(&["210", "201"])).unwrap();
        let s = VarSet::from_indices(&[3, 6, 7]);
        assert_eq!(u.term_name(s), "H(Z0,X201,X210)");
        assert_eq!(u.parse_term_name("H(Z0,X201,X210)").unwrap(), s);
        assert!(u.parse_term_name("H(X201,Z0)").is_err()); // out of canonical order
        assert!(u.parse_term_name("H()").is_err());
        assert!(u.parse_term_name("H(W9)").is_err());
    }

    #[test]
    fn elemental_counts_match_formula() {
        // n = 2: H(1|2) >= 0, H(2|1) >= 0, I(1;2) >= 0.
        let u2 = VariableUniverse::build(1, 1, &[]).unwrap();
        assert_eq!(u2.total_vars(), 2);
        assert_eq!(elemental_inequalities(&u2).unwrap().len(), 3);
        assert_eq!(elemental_count(2), 3);

        let u3 = VariableUniverse::build(1, 1, &demands(&["0"])).unwrap();
        assert_eq!(elemental_inequalities(&u3).unwrap().len(), 9);
        assert_eq!(elemental_count(3), 9);

        let u8 = VariableUniverse::build(3, 3, &demands(&["210", "201"])).unwrap();
        assert_eq!(elemental_inequalities(&u8).unwrap().len(), 1800);
        assert_eq!(elemental_count(8), 1800);
    }

    #[test]
    fn three_variable_elementals_by_hand() {
        // Ground set {0,1,2}: three monotone rows and I(i;j|S) for the three
        // pairs, each with S empty or the remaining singleton.
        let u = VariableUniverse::build(1, 1, &demands(&["0"])).unwrap();
        let got = elemental_inequalities(&u).unwrap();
        let full = VarSet::from_indices(&[0, 1, 2]);
        let mut expected: Vec<LinearForm> = Vec::new();
        for i in 0..3 {
            let mut f = LinearForm::zero();
            f.add_term(full, rat(1));
            f.add_term(full.without(i), rat(-1));
            expected.push(f);
        }
        for (i, j, rest) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            expected.push(mutual_information_form(i, j, VarSet::EMPTY));
            expected.push(mutual_information_form(i, j, VarSet::singleton(rest)));
        }
        let got_forms: Vec<LinearForm> = got.iter().map(|iq| iq.form.clone()).collect();
        for f in &expected {
            assert!(got_forms.contains(f), "missing {:?}", f);
        }
        assert_eq!(got_forms.len(), expected.len());
    }

    #[test]
    fn linear_form_arithmetic_is_exact() {
        let s = VarSet::singleton(0);
        let mut f = LinearForm::zero();
        f.add_term(s, crate::rat::ratio(1, 3));
        f.add_term(s, crate::rat::ratio(2, 3));
        assert_eq!(f.coeff(s), rat(1));
        f.add_term(s, rat(-1));
        assert!(f.is_zero());
    }
}
