//! Linear constraints of the coded caching problem over the entropy
//! coordinates: unit-size independent files, deterministic placement and
//! delivery, per-user decodability, and the couplings of cache size `M` and
//! delivery rate `R` to the entropy terms.
//!
//! All equalities are stored as two opposing `>= 0` inequalities so a dual
//! multiplier can land on either side.

use crate::entropy::{
    Demand, Inequality, LinearForm, Provenance, Sense, UniverseError, VariableUniverse, VarSet,
};
use crate::rat::rat;
use crate::symmetry::OrbitMap;

/// A universe together with the caching constraints over it.
#[derive(Debug, Clone)]
pub struct CachingModel {
    universe: VariableUniverse,
    constraints: Vec<Inequality>,
    preset: Option<String>,
}

impl CachingModel {
    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn constraints(&self) -> &[Inequality] {
        &self.constraints
    }

    pub fn preset(&self) -> Option<&str> {
        self.preset.as_deref()
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            n_files: self.universe.n_files(),
            n_users: self.universe.n_users(),
            demands: self.universe.demands().iter().map(|d| d.digits()).collect(),
            preset: self.preset.clone(),
        }
    }

    /// Rewrites every constraint over orbit representatives; merged duplicate
    /// rows are dropped.
    pub fn quotiented(&self, om: &OrbitMap) -> CachingModel {
        CachingModel {
            universe: self.universe.clone(),
            constraints: crate::symmetry::quotient_inequalities(&self.constraints, om),
            preset: self.preset.clone(),
        }
    }
}

fn equality_pair(form: LinearForm, prov: impl Fn(Sense) -> Provenance) -> [Inequality; 2] {
    [
        Inequality { form: form.clone(), provenance: prov(Sense::Ge) },
        Inequality { form: form.negated(), provenance: prov(Sense::Le) },
    ]
}

/// `H(W_S) = |S| * F` for every nonempty subset `S` of the files.
pub fn independence_constraints(u: &VariableUniverse) -> Vec<Inequality> {
    let n = u.n_files();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let files = VarSet(mask);
        let mut form = LinearForm::zero();
        form.add_term(files, rat(1));
        form.add_constant(rat(-(files.len() as i64)));
        out.extend(equality_pair(form, |sense| Provenance::Independence { files, sense }));
    }
    out
}

/// Caches and messages are deterministic functions of the files:
/// `H(W_all, Z_k) = H(W_all)` and `H(W_all, X_d) = H(W_all)`.
pub fn determinism_constraints(u: &VariableUniverse) -> Vec<Inequality> {
    let all = u.all_files();
    let mut out = Vec::new();
    for k in 0..u.n_users() {
        let mut form = LinearForm::zero();
        form.add_term(all.with(u.cache_var(k)), rat(1));
        form.add_term(all, rat(-1));
        out.extend(equality_pair(form, |sense| Provenance::CacheDeterminism { user: k, sense }));
    }
    for j in 0..u.demands().len() {
        let mut form = LinearForm::zero();
        form.add_term(all.with(u.delivery_var(j)), rat(1));
        form.add_term(all, rat(-1));
        out.extend(equality_pair(form, |sense| Provenance::DeliveryDeterminism {
            demand: j,
            sense,
        }));
    }
    out
}

/// Every user decodes their demanded file: for user `k` and demand `d` with
/// `d_k = f`, `H(W_f, Z_k, X_d) = H(Z_k, X_d)`.
pub fn decoding_constraints(u: &VariableUniverse) -> Vec<Inequality> {
    let mut out = Vec::new();
    for k in 0..u.n_users() {
        for (j, d) in u.demands().iter().enumerate() {
            let f = d.0[k] as usize;
            let given = VarSet::from_indices(&[u.cache_var(k), u.delivery_var(j)]);
            let mut form = LinearForm::zero();
            form.add_term(given.with(u.file_var(f)), rat(1));
            form.add_term(given, rat(-1));
            out.extend(equality_pair(form, |sense| Provenance::Decode { user: k, demand: j, sense }));
        }
    }
    out
}

/// `M >= H(Z_k)` for every cache, `R >= H(X_d)` for every message, and the
/// sign constraints `M >= 0`, `R >= 0`.
pub fn rate_constraints(u: &VariableUniverse) -> Vec<Inequality> {
    let mut out = Vec::new();
    for k in 0..u.n_users() {
        let mut form = LinearForm::zero();
        form.add_m(rat(1));
        form.add_term(VarSet::singleton(u.cache_var(k)), rat(-1));
        out.push(Inequality { form, provenance: Provenance::RateM { user: k } });
    }
    for j in 0..u.demands().len() {
        let mut form = LinearForm::zero();
        form.add_r(rat(1));
        form.add_term(VarSet::singleton(u.delivery_var(j)), rat(-1));
        out.push(Inequality { form, provenance: Provenance::RateR { demand: j } });
    }
    let mut m_form = LinearForm::zero();
    m_form.add_m(rat(1));
    out.push(Inequality { form: m_form, provenance: Provenance::MNonneg });
    let mut r_form = LinearForm::zero();
    r_form.add_r(rat(1));
    out.push(Inequality { form: r_form, provenance: Provenance::RNonneg });
    out
}

/// Builds the model with all four constraint families.
pub fn build_model(
    n_files: usize,
    n_users: usize,
    demands: &[Demand],
) -> Result<CachingModel, UniverseError> {
    let universe = VariableUniverse::build(n_files, n_users, demands)?;
    Ok(model_over(universe, None))
}

fn model_over(universe: VariableUniverse, preset: Option<String>) -> CachingModel {
    let mut constraints = Vec::new();
    constraints.extend(independence_constraints(&universe));
    constraints.extend(determinism_constraints(&universe));
    constraints.extend(decoding_constraints(&universe));
    constraints.extend(rate_constraints(&universe));
    CachingModel { universe, constraints, preset }
}

/// Named demand-subset configurations, so results are reproducible by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("man-table2", "3 files, 3 users, demands 201 and 210"),
    ("full-2x2", "2 files, 2 users, all four demands"),
    ("cyclic-3", "3 files, 3 users, the three cyclic demands"),
];

pub fn preset_model(name: &str) -> Result<CachingModel, UniverseError> {
    let (n_files, n_users, demands): (usize, usize, Vec<&str>) = match name {
        "man-table2" => (3, 3, vec!["210", "201"]),
        "full-2x2" => (2, 2, vec!["00", "01", "10", "11"]),
        "cyclic-3" => (3, 3, vec!["012", "120", "201"]),
        _ => {
            return Err(UniverseError::InvalidDemand {
                tuple: name.to_string(),
                reason: format!(
                    "unknown preset (known: {})",
                    PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
                ),
            })
        }
    };
    let demands: Result<Vec<Demand>, _> = demands.iter().map(|s| Demand::parse(s)).collect();
    let universe = VariableUniverse::build(n_files, n_users, &demands?)?;
    Ok(model_over(universe, Some(name.to_string())))
}

/// Plain-text model description; renders and parses bit-exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDescriptor {
    pub n_files: usize,
    pub n_users: usize,
    pub demands: Vec<String>,
    pub preset: Option<String>,
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<CachingModel, UniverseError> {
        let demands: Result<Vec<Demand>, _> =
            self.demands.iter().map(|s| Demand::parse(s)).collect();
        let mut m = build_model(self.n_files, self.n_users, &demands?)?;
        m.preset = self.preset.clone();
        Ok(m)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n_files = {}\n", self.n_files));
        out.push_str(&format!("n_users = {}\n", self.n_users));
        out.push_str(&format!("demands = {}\n", self.demands.join(",")));
        if let Some(p) = &self.preset {
            out.push_str(&format!("preset = {}\n", p));
        }
        out
    }

    pub fn parse(text: &str) -> Result<ModelDescriptor, UniverseError> {
        let mut n_files = None;
        let mut n_users = None;
        let mut demands: Option<Vec<String>> = None;
        let mut preset = None;
        let bad = |line: &str, reason: &str| UniverseError::BadTermName {
            name: line.to_string(),
            reason: reason.to_string(),
        };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n_files" => {
                    n_files = Some(value.parse().map_err(|_| bad(line, "bad n_files"))?)
                }
                "n_users" => {
                    n_users = Some(value.parse().map_err(|_| bad(line, "bad n_users"))?)
                }
                "demands" => {
                    demands = Some(
                        value
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(|s| s.trim().to_string())
                            .collect(),
                    )
                }
                "preset" => preset = Some(value.to_string()),
                _ => return Err(bad(line, "unknown key")),
            }
        }
        Ok(ModelDescriptor {
            n_files: n_files.ok_or_else(|| bad(text, "missing n_files"))?,
            n_users: n_users.ok_or_else(|| bad(text, "missing n_users"))?,
            demands: demands.ok_or_else(|| bad(text, "missing demands"))?,
            preset,
        })
    }
}
