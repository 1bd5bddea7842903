//! Hidden-variable models and their checks.
//!
//! Two deterministic layers and one stochastic layer:
//!
//! - [`RawModel`] — five random variables `A, B, F, G, Z` on one finite
//!   space, the "super-deterministic" description where a single state fixes
//!   settings and outcomes alike. Freedom and Parameter Independence are
//!   checked, not assumed.
//! - [`FactorizedModel`] — the product form these checks license: settings
//!   and the hidden variable carry independent full-support distributions
//!   and the wings respond through total maps `(setting, z) → outcome`.
//! - [`StochasticKernelModel`] — per-wing outcome kernels
//!   `P(outcome | setting, z)`; [`derandomize`](StochasticKernelModel::derandomize)
//!   rebuilds the equivalent deterministic statistics in closed form.

mod io;

pub use io::{
    model_to_json, parse_model, read_model, read_table, stochastic_to_json, table_from_file,
    table_to_file, table_to_json, LoadedModel, ModelFile, PairEntry, SettingRepr, TableFile,
};

use crate::error::{Error, Result};
use crate::finprob::{
    check_mutual_independence, condition, index_tuples, product_measure, push_forward,
    FiniteDistribution, JointTable, RandomVariable, SampleSpace,
};
use crate::quantum::{photon_stats, spin1_joint, Angle, Frame};
use crate::rng::CounterRng;
use crate::tol;

/// Which experiment a model describes; fixes the outcome alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Photon EPR experiment, binary outcomes `0`/`1`.
    Photon,
    /// Spin-one experiment, outcomes named by the zero position of the
    /// component triple: `z1`/`z2`/`z3` for (0,1,1), (1,0,1), (1,1,0)
    /// read as "component k is zero".
    Spin1,
}

impl Variant {
    pub fn outcome_labels(&self) -> &'static [&'static str] {
        match self {
            Variant::Photon => &["0", "1"],
            Variant::Spin1 => &["z1", "z2", "z3"],
        }
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_labels().len()
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Photon => "photon",
            Variant::Spin1 => "spin1",
        }
    }

    pub fn parse(s: &str) -> Result<Variant> {
        match s {
            "photon" => Ok(Variant::Photon),
            "spin1" => Ok(Variant::Spin1),
            other => Err(Error::Format(format!("unknown variant '{other}'"))),
        }
    }
}

/// One wing's measurement setting.
#[derive(Debug, Clone)]
pub enum Setting {
    /// Polarizer angle (photon variant).
    Angle(Angle),
    /// Orthonormal frame (spin-one variant).
    Frame(Frame),
    /// Abstract setting recovered from a raw model; carries only its label.
    Label(String),
}

impl Setting {
    fn matches_variant(&self, variant: Variant) -> bool {
        matches!(
            (self, variant),
            (Setting::Angle(_), Variant::Photon)
                | (Setting::Frame(_), Variant::Spin1)
                | (Setting::Label(_), _)
        )
    }

    pub fn as_angle(&self) -> Option<Angle> {
        match self {
            Setting::Angle(a) => Some(*a),
            _ => None,
        }
    }

    pub fn as_frame(&self) -> Option<&Frame> {
        match self {
            Setting::Frame(f) => Some(f),
            _ => None,
        }
    }
}

/// Spin-one outcome triples carry exactly one zero; component `c` of the
/// triple whose zero sits at `zero_pos` is therefore `(c != zero_pos)`.
pub fn triple_component(zero_pos: usize, component: usize) -> u8 {
    u8::from(component != zero_pos)
}

/// Conditional outcome tables, one per setting pair. `None` marks a pair for
/// which no data exists (e.g. never drawn in a simulation) — absent, not
/// zero.
#[derive(Debug, Clone)]
pub struct ConditionalTable {
    outcomes_f: Vec<String>,
    outcomes_g: Vec<String>,
    n_a: usize,
    n_b: usize,
    tables: Vec<Option<Vec<f64>>>,
}

impl ConditionalTable {
    pub fn new(
        n_a: usize,
        n_b: usize,
        outcomes_f: Vec<String>,
        outcomes_g: Vec<String>,
    ) -> Result<Self> {
        if n_a == 0 || n_b == 0 || outcomes_f.is_empty() || outcomes_g.is_empty() {
            return Err(Error::Input("conditional table needs settings and outcomes".into()));
        }
        Ok(ConditionalTable {
            outcomes_f,
            outcomes_g,
            n_a,
            n_b,
            tables: vec![None; n_a * n_b],
        })
    }

    fn idx(&self, ai: usize, bi: usize) -> usize {
        ai * self.n_b + bi
    }

    /// Install the per-pair table, row-major over (F outcome, G outcome).
    pub fn set_pair(&mut self, ai: usize, bi: usize, cells: Vec<f64>) -> Result<()> {
        if ai >= self.n_a || bi >= self.n_b {
            return Err(Error::Input(format!("setting pair ({ai},{bi}) out of range")));
        }
        let want = self.outcomes_f.len() * self.outcomes_g.len();
        if cells.len() != want {
            return Err(Error::Input(format!("{} cells, expected {want}", cells.len())));
        }
        if cells.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Input("negative or non-finite cell".into()));
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > tol::EXACT {
            return Err(Error::Input(format!("pair ({ai},{bi}) cells sum to {sum}")));
        }
        let k = self.idx(ai, bi);
        self.tables[k] = Some(cells);
        Ok(())
    }

    pub fn pair(&self, ai: usize, bi: usize) -> Option<&[f64]> {
        self.tables[self.idx(ai, bi)].as_deref()
    }

    pub fn cell(&self, ai: usize, bi: usize, fi: usize, gi: usize) -> Option<f64> {
        self.pair(ai, bi).map(|c| c[fi * self.outcomes_g.len() + gi])
    }

    pub fn n_settings_a(&self) -> usize {
        self.n_a
    }

    pub fn n_settings_b(&self) -> usize {
        self.n_b
    }

    pub fn outcomes_f(&self) -> &[String] {
        &self.outcomes_f
    }

    pub fn outcomes_g(&self) -> &[String] {
        &self.outcomes_g
    }

    pub fn all_pairs_present(&self) -> bool {
        self.tables.iter().all(Option::is_some)
    }

    pub fn present_pairs(&self) -> usize {
        self.tables.iter().filter(|t| t.is_some()).count()
    }

    /// Largest cell difference; infinite on shape mismatch or when one side
    /// is absent where the other is present.
    pub fn max_abs_diff(&self, other: &ConditionalTable) -> f64 {
        if self.n_a != other.n_a
            || self.n_b != other.n_b
            || self.outcomes_f.len() != other.outcomes_f.len()
            || self.outcomes_g.len() != other.outcomes_g.len()
        {
            return f64::INFINITY;
        }
        let mut m: f64 = 0.0;
        for (a, b) in self.tables.iter().zip(&other.tables) {
            match (a, b) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    for (u, v) in x.iter().zip(y) {
                        m = m.max((u - v).abs());
                    }
                }
                _ => return f64::INFINITY,
            }
        }
        m
    }

    /// Sub-table over the selected settings (used to cut 2×2 windows for
    /// polytope tests).
    pub fn restrict(&self, a_sel: &[usize], b_sel: &[usize]) -> Result<ConditionalTable> {
        let mut out = ConditionalTable::new(
            a_sel.len(),
            b_sel.len(),
            self.outcomes_f.clone(),
            self.outcomes_g.clone(),
        )?;
        for (i, &ai) in a_sel.iter().enumerate() {
            for (j, &bi) in b_sel.iter().enumerate() {
                if ai >= self.n_a || bi >= self.n_b {
                    return Err(Error::Input(format!("selected pair ({ai},{bi}) out of range")));
                }
                if let Some(cells) = self.pair(ai, bi) {
                    out.set_pair(i, j, cells.to_vec())?;
                }
            }
        }
        Ok(out)
    }
}

/// The quantum photon table at the given polarizer settings.
pub fn quantum_photon_table(alphas: &[Angle], betas: &[Angle]) -> Result<ConditionalTable> {
    let labels = |v: &'static [&'static str]| v.iter().map(|s| s.to_string()).collect();
    let mut t = ConditionalTable::new(
        alphas.len(),
        betas.len(),
        labels(Variant::Photon.outcome_labels()),
        labels(Variant::Photon.outcome_labels()),
    )?;
    for (ai, a) in alphas.iter().enumerate() {
        for (bi, b) in betas.iter().enumerate() {
            let s = photon_stats(*a, *b);
            t.set_pair(ai, bi, vec![s.p00, s.p01, s.p10, s.p11])?;
        }
    }
    Ok(t)
}

/// The quantum spin-one table (zero-position outcomes) at the given frames.
pub fn quantum_spin1_table(frames_a: &[Frame], frames_b: &[Frame]) -> Result<ConditionalTable> {
    let labels = |v: &'static [&'static str]| v.iter().map(|s| s.to_string()).collect();
    let mut t = ConditionalTable::new(
        frames_a.len(),
        frames_b.len(),
        labels(Variant::Spin1.outcome_labels()),
        labels(Variant::Spin1.outcome_labels()),
    )?;
    for (ai, a) in frames_a.iter().enumerate() {
        for (bi, b) in frames_b.iter().enumerate() {
            let joint = spin1_joint(a, b);
            let mut cells = Vec::with_capacity(9);
            for i in 0..3 {
                for j in 0..3 {
                    cells.push(joint.cell(i, j));
                }
            }
            t.set_pair(ai, bi, cells)?;
        }
    }
    Ok(t)
}

/// A hidden-variable model over an arbitrary finite state space: the five
/// variables `A, B, F, G, Z`, all total on the space.
#[derive(Debug, Clone)]
pub struct RawModel {
    space: SampleSpace,
    a: RandomVariable,
    b: RandomVariable,
    f: RandomVariable,
    g: RandomVariable,
    z: RandomVariable,
}

impl RawModel {
    pub fn new(
        space: SampleSpace,
        a: RandomVariable,
        b: RandomVariable,
        f: RandomVariable,
        g: RandomVariable,
        z: RandomVariable,
    ) -> Result<Self> {
        for rv in [&a, &b, &f, &g, &z] {
            if !rv.defined_on(&space) {
                return Err(Error::Input(format!(
                    "variable '{}' not total on the state space",
                    rv.name()
                )));
            }
        }
        Ok(RawModel { space, a, b, f, g, z })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn setting_a(&self) -> &RandomVariable {
        &self.a
    }

    pub fn setting_b(&self) -> &RandomVariable {
        &self.b
    }

    pub fn outcome_f(&self) -> &RandomVariable {
        &self.f
    }

    pub fn outcome_g(&self) -> &RandomVariable {
        &self.g
    }

    pub fn hidden_z(&self) -> &RandomVariable {
        &self.z
    }

    /// `P(F, G | A=α, B=β)` for every setting pair of positive probability;
    /// zero-probability pairs come back absent.
    pub fn conditional_table(&self) -> Result<ConditionalTable> {
        let joint = push_forward(&self.space, &[&self.f, &self.g, &self.a, &self.b])?;
        let mut out = ConditionalTable::new(
            self.a.codomain().len(),
            self.b.codomain().len(),
            self.f.codomain().to_vec(),
            self.g.codomain().to_vec(),
        )?;
        for (ai, aval) in self.a.codomain().iter().enumerate() {
            for (bi, bval) in self.b.codomain().iter().enumerate() {
                match condition(&joint, &[(self.a.name(), aval), (self.b.name(), bval)]) {
                    Ok(cond) => out.set_pair(ai, bi, cond.cells().to_vec())?,
                    Err(Error::ZeroProbability(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(out)
    }
}

/// Pairwise independence result inside a [`FreedomReport`].
#[derive(Debug, Clone)]
pub struct PairwiseIndependence {
    pub pair: (String, String),
    pub independent: bool,
    pub max_residual: f64,
}

/// Result of [`check_freedom`]: the probabilistic reading (mutual
/// independence of `(A,B,Z)` under `P`) and the surjective reading (every
/// `(α,β,z)` combination realized by some state), plus pairwise results.
#[derive(Debug, Clone)]
pub struct FreedomReport {
    pub probabilistic: bool,
    pub max_residual: f64,
    pub surjective: bool,
    pub missing_triple: Option<(String, String, String)>,
    pub pairwise: Vec<PairwiseIndependence>,
}

pub fn check_freedom(m: &RawModel, tol: f64) -> Result<FreedomReport> {
    let triple = check_mutual_independence(&[&m.a, &m.b, &m.z], &m.space, tol)?;
    let mut pairwise = Vec::new();
    for (x, y) in [(&m.a, &m.b), (&m.a, &m.z), (&m.b, &m.z)] {
        let r = check_mutual_independence(&[x, y], &m.space, tol)?;
        pairwise.push(PairwiseIndependence {
            pair: (x.name().to_string(), y.name().to_string()),
            independent: r.independent,
            max_residual: r.max_residual,
        });
    }
    // surjective reading: every (α, β, z) attained by some atom, any weight
    let mut attained = vec![
        false;
        m.a.codomain().len() * m.b.codomain().len() * m.z.codomain().len()
    ];
    let (nb, nz) = (m.b.codomain().len(), m.z.codomain().len());
    for atom in 0..m.space.len() {
        let idx = (m.a.value_index(atom) * nb + m.b.value_index(atom)) * nz + m.z.value_index(atom);
        attained[idx] = true;
    }
    let missing_triple = attained.iter().position(|&t| !t).map(|flat| {
        let zi = flat % nz;
        let bi = (flat / nz) % nb;
        let ai = flat / (nz * nb);
        (
            m.a.codomain()[ai].clone(),
            m.b.codomain()[bi].clone(),
            m.z.codomain()[zi].clone(),
        )
    });
    Ok(FreedomReport {
        probabilistic: triple.independent,
        max_residual: triple.max_residual,
        surjective: missing_triple.is_none(),
        missing_triple,
        pairwise,
    })
}

/// Result of [`check_parameter_independence`].
#[derive(Debug, Clone)]
pub struct ParameterIndependenceReport {
    pub holds: bool,
    /// Description of the fiber on which the outcome is not a function of
    /// `(setting, z)`, when violated.
    pub witness: Option<String>,
}

/// Outcome values extracted on positive-probability fibers:
/// `extracted[setting][z]` is `None` where the fiber carries no mass.
type ExtractedResponses = Vec<Vec<Option<usize>>>;

fn extract_responses(
    space: &SampleSpace,
    setting: &RandomVariable,
    z: &RandomVariable,
    outcome: &RandomVariable,
) -> std::result::Result<ExtractedResponses, String> {
    let mut table: ExtractedResponses =
        vec![vec![None; z.codomain().len()]; setting.codomain().len()];
    for atom in 0..space.len() {
        if space.weight(atom) <= 0.0 {
            continue;
        }
        let (si, zi, oi) = (
            setting.value_index(atom),
            z.value_index(atom),
            outcome.value_index(atom),
        );
        match table[si][zi] {
            None => table[si][zi] = Some(oi),
            Some(prev) if prev == oi => {}
            Some(prev) => {
                return Err(format!(
                    "'{}' takes values '{}' and '{}' on the positive-weight fiber ({}={}, {}={})",
                    outcome.name(),
                    outcome.codomain()[prev],
                    outcome.codomain()[oi],
                    setting.name(),
                    setting.codomain()[si],
                    z.name(),
                    z.codomain()[zi],
                ));
            }
        }
    }
    Ok(table)
}

/// Parameter Independence: `F` constant on every positive-weight fiber of
/// `(A, Z)` and `G` constant on every positive-weight fiber of `(B, Z)`.
pub fn check_parameter_independence(m: &RawModel) -> Result<ParameterIndependenceReport> {
    let f = extract_responses(&m.space, &m.a, &m.z, &m.f);
    let g = extract_responses(&m.space, &m.b, &m.z, &m.g);
    let witness = match (&f, &g) {
        (Err(w), _) => Some(w.clone()),
        (_, Err(w)) => Some(w.clone()),
        _ => None,
    };
    Ok(ParameterIndependenceReport {
        holds: witness.is_none(),
        witness,
    })
}

/// Factorize a raw model that passes Freedom (probabilistic, at
/// [`tol::EXACT`]) and Parameter Independence. Settings keep their labels;
/// hidden-variable values of probability zero are dropped. Refusals name the
/// failing check.
pub fn factorize(m: &RawModel) -> Result<FactorizedModel> {
    let freedom = check_freedom(m, tol::EXACT)?;
    if !freedom.probabilistic {
        return Err(Error::Refused {
            check: "Freedom",
            detail: format!(
                "(A,B,Z) dependent: max residual {} exceeds {}",
                freedom.max_residual,
                tol::EXACT
            ),
        });
    }
    let f_resp = extract_responses(&m.space, &m.a, &m.z, &m.f).map_err(|w| Error::Refused {
        check: "Parameter Independence",
        detail: w,
    })?;
    let g_resp = extract_responses(&m.space, &m.b, &m.z, &m.g).map_err(|w| Error::Refused {
        check: "Parameter Independence",
        detail: w,
    })?;

    let variant = match (m.f.codomain(), m.g.codomain()) {
        (f, g) if f == Variant::Photon.outcome_labels() && g == Variant::Photon.outcome_labels() => {
            Variant::Photon
        }
        (f, g) if f == Variant::Spin1.outcome_labels() && g == Variant::Spin1.outcome_labels() => {
            Variant::Spin1
        }
        _ => {
            return Err(Error::Input(
                "outcome codomains must be 0/1 (photon) or z1/z2/z3 (spin-one)".into(),
            ))
        }
    };

    let marginal_weights = |rv: &RandomVariable| -> Result<Vec<f64>> {
        Ok(push_forward(&m.space, &[rv])?.cells().to_vec())
    };
    let pa = marginal_weights(&m.a)?;
    let pb = marginal_weights(&m.b)?;
    for (weights, rv) in [(&pa, &m.a), (&pb, &m.b)] {
        if let Some(i) = weights.iter().position(|w| *w <= 0.0) {
            return Err(Error::Refused {
                check: "Freedom",
                detail: format!(
                    "declared setting '{}' of '{}' has probability zero; full support is required",
                    rv.codomain()[i],
                    rv.name()
                ),
            });
        }
    }
    let pz_all = marginal_weights(&m.z)?;
    let kept: Vec<usize> = (0..pz_all.len()).filter(|&i| pz_all[i] > 0.0).collect();
    let z_labels: Vec<String> = kept.iter().map(|&i| m.z.codomain()[i].clone()).collect();
    let p_z = FiniteDistribution::new(kept.iter().map(|&i| pz_all[i]).collect())?;

    let gather = |resp: &ExtractedResponses, party: &str| -> Result<Vec<Vec<usize>>> {
        resp.iter()
            .enumerate()
            .map(|(si, row)| {
                kept.iter()
                    .map(|&zi| {
                        row[zi].ok_or_else(|| {
                            Error::Input(format!(
                                "fiber (setting {si}, z {zi}) of '{party}' carries no probability mass"
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    };
    let response_f = gather(&f_resp, "F")?;
    let response_g = gather(&g_resp, "G")?;

    FactorizedModel::new(
        variant,
        m.a.codomain().iter().cloned().map(Setting::Label).collect(),
        FiniteDistribution::new(pa)?,
        m.b.codomain().iter().cloned().map(Setting::Label).collect(),
        FiniteDistribution::new(pb)?,
        z_labels,
        p_z,
        response_f,
        response_g,
    )
}

/// Product-form hidden-variable model: independent full-support settings and
/// hidden variable, deterministic per-wing responses.
#[derive(Debug, Clone)]
pub struct FactorizedModel {
    variant: Variant,
    settings_a: Vec<Setting>,
    settings_b: Vec<Setting>,
    p_a: FiniteDistribution,
    p_b: FiniteDistribution,
    z_labels: Vec<String>,
    p_z: FiniteDistribution,
    response_f: Vec<Vec<usize>>,
    response_g: Vec<Vec<usize>>,
}

impl FactorizedModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        variant: Variant,
        settings_a: Vec<Setting>,
        p_a: FiniteDistribution,
        settings_b: Vec<Setting>,
        p_b: FiniteDistribution,
        z_labels: Vec<String>,
        p_z: FiniteDistribution,
        response_f: Vec<Vec<usize>>,
        response_g: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if settings_a.is_empty() || settings_b.is_empty() || z_labels.is_empty() {
            return Err(Error::Input("settings and hidden-variable sets must be nonempty".into()));
        }
        for s in settings_a.iter().chain(&settings_b) {
            if !s.matches_variant(variant) {
                return Err(Error::Input(format!(
                    "setting kind does not match the {} variant",
                    variant.as_str()
                )));
            }
        }
        if p_a.len() != settings_a.len() || p_b.len() != settings_b.len() || p_z.len() != z_labels.len()
        {
            return Err(Error::Input("distribution lengths must match their value sets".into()));
        }
        for (d, name) in [(&p_a, "settings_a"), (&p_b, "settings_b"), (&p_z, "z")] {
            if !d.full_support() {
                return Err(Error::Input(format!(
                    "distribution over {name} must have full support"
                )));
            }
        }
        let k = variant.outcome_count();
        let check_resp = |resp: &Vec<Vec<usize>>, n: usize, party: &str| -> Result<()> {
            if resp.len() != n {
                return Err(Error::Input(format!("response_{party} needs {n} setting rows")));
            }
            for row in resp {
                if row.len() != z_labels.len() {
                    return Err(Error::Input(format!(
                        "response_{party} rows must cover all {} hidden values",
                        z_labels.len()
                    )));
                }
                if row.iter().any(|&o| o >= k) {
                    return Err(Error::Input(format!("response_{party} outcome index out of range")));
                }
            }
            Ok(())
        };
        check_resp(&response_f, settings_a.len(), "f")?;
        check_resp(&response_g, settings_b.len(), "g")?;
        Ok(FactorizedModel {
            variant,
            settings_a,
            settings_b,
            p_a,
            p_b,
            z_labels,
            p_z,
            response_f,
            response_g,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn settings_a(&self) -> &[Setting] {
        &self.settings_a
    }

    pub fn settings_b(&self) -> &[Setting] {
        &self.settings_b
    }

    pub fn p_a(&self) -> &FiniteDistribution {
        &self.p_a
    }

    pub fn p_b(&self) -> &FiniteDistribution {
        &self.p_b
    }

    pub fn z_labels(&self) -> &[String] {
        &self.z_labels
    }

    pub fn p_z(&self) -> &FiniteDistribution {
        &self.p_z
    }

    pub fn response_f(&self) -> &[Vec<usize>] {
        &self.response_f
    }

    pub fn response_g(&self) -> &[Vec<usize>] {
        &self.response_g
    }

    /// Same model with reweighted (still full-support) settings.
    pub fn with_settings_distributions(
        &self,
        p_a: FiniteDistribution,
        p_b: FiniteDistribution,
    ) -> Result<FactorizedModel> {
        FactorizedModel::new(
            self.variant,
            self.settings_a.clone(),
            p_a,
            self.settings_b.clone(),
            p_b,
            self.z_labels.clone(),
            self.p_z.clone(),
            self.response_f.clone(),
            self.response_g.clone(),
        )
    }

    fn setting_labels(n: usize, prefix: &str) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn outcome_label_vec(&self) -> Vec<String> {
        self.variant
            .outcome_labels()
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    /// The raw model this product form induces: the state space is
    /// `X_A × X_B × X_Z` with the product measure, `A`, `B`, `Z` are the
    /// coordinate projections, and the outcomes apply the responses.
    pub fn induced_raw(&self) -> Result<RawModel> {
        let sa = SampleSpace::new(
            Self::setting_labels(self.settings_a.len(), "a"),
            self.p_a.clone(),
        )?;
        let sb = SampleSpace::new(
            Self::setting_labels(self.settings_b.len(), "b"),
            self.p_b.clone(),
        )?;
        let sz = SampleSpace::new(self.z_labels.clone(), self.p_z.clone())?;
        let prod = product_measure(&[sa, sb, sz])?;
        let a = prod.projections[0].renamed("A");
        let b = prod.projections[1].renamed("B");
        let z = prod.projections[2].renamed("Z");
        let outcomes = self.outcome_label_vec();
        let f_assign: Vec<usize> = (0..prod.space.len())
            .map(|atom| self.response_f[a.value_index(atom)][z.value_index(atom)])
            .collect();
        let g_assign: Vec<usize> = (0..prod.space.len())
            .map(|atom| self.response_g[b.value_index(atom)][z.value_index(atom)])
            .collect();
        let f = RandomVariable::new("F", outcomes.clone(), f_assign)?;
        let g = RandomVariable::new("G", outcomes, g_assign)?;
        RawModel::new(prod.space, a, b, f, g, z)
    }

    /// The model's predicted conditional table:
    /// `cell(α,β,λ,μ) = Σ_z P_Z(z)·[F̂(α,z)=λ]·[Ĝ(β,z)=μ]`. Independent of
    /// the settings distributions by construction.
    pub fn predicted_table(&self) -> Result<ConditionalTable> {
        let k = self.variant.outcome_count();
        let mut out = ConditionalTable::new(
            self.settings_a.len(),
            self.settings_b.len(),
            self.outcome_label_vec(),
            self.outcome_label_vec(),
        )?;
        for ai in 0..self.settings_a.len() {
            for bi in 0..self.settings_b.len() {
                let mut cells = vec![0.0; k * k];
                for (zi, w) in self.p_z.weights().iter().enumerate() {
                    cells[self.response_f[ai][zi] * k + self.response_g[bi][zi]] += w;
                }
                out.set_pair(ai, bi, cells)?;
            }
        }
        Ok(out)
    }

    /// Empirical conditional table from `shots` draws of `(α, β, z)` off the
    /// product measure, deterministic in `seed`. Setting pairs never drawn
    /// are absent in the result.
    pub fn simulate(&self, shots: u64, seed: u64) -> Result<ConditionalTable> {
        if shots == 0 {
            return Err(Error::Input("shots must be at least 1".into()));
        }
        let (na, nb, nz) = (
            self.settings_a.len(),
            self.settings_b.len(),
            self.z_labels.len(),
        );
        let k = self.variant.outcome_count();
        let mut cum = Vec::with_capacity(na * nb * nz);
        let mut acc = 0.0;
        for ai in 0..na {
            for bi in 0..nb {
                for zi in 0..nz {
                    acc += self.p_a.weights()[ai] * self.p_b.weights()[bi] * self.p_z.weights()[zi];
                    cum.push(acc);
                }
            }
        }
        let total = acc;
        let mut counts = vec![0u64; na * nb * k * k];
        let mut pair_totals = vec![0u64; na * nb];
        let mut rng = CounterRng::new(seed);
        for _ in 0..shots {
            let u = rng.next_f64() * total;
            let flat = cum.partition_point(|c| *c <= u).min(cum.len() - 1);
            let zi = flat % nz;
            let bi = (flat / nz) % nb;
            let ai = flat / (nz * nb);
            let (fo, go) = (self.response_f[ai][zi], self.response_g[bi][zi]);
            counts[(ai * nb + bi) * k * k + fo * k + go] += 1;
            pair_totals[ai * nb + bi] += 1;
        }
        let mut out = ConditionalTable::new(
            na,
            nb,
            self.outcome_label_vec(),
            self.outcome_label_vec(),
        )?;
        for ai in 0..na {
            for bi in 0..nb {
                let n = pair_totals[ai * nb + bi];
                if n == 0 {
                    continue;
                }
                let cells: Vec<f64> = (0..k * k)
                    .map(|c| counts[(ai * nb + bi) * k * k + c] as f64 / n as f64)
                    .collect();
                out.set_pair(ai, bi, cells)?;
            }
        }
        Ok(out)
    }
}

/// Witness of a perfect-correlation failure.
#[derive(Debug, Clone)]
pub struct CorrelationWitness {
    pub pair_index: usize,
    pub z_index: usize,
    /// Component positions of the shared ray in the two frames.
    pub component_a: usize,
    pub component_b: usize,
}

/// Result of [`check_perfect_correlation`].
#[derive(Debug, Clone)]
pub struct PerfectCorrelationReport {
    pub holds: bool,
    pub witness: Option<CorrelationWitness>,
    /// Indices (into the supplied pair list) with no shared ray; vacuous and
    /// noted rather than failed.
    pub skipped_pairs: Vec<usize>,
    pub checked_pairs: usize,
}

/// For every hidden value `z` and every supplied setting pair whose frames
/// share a ray (`a_i = ±b_j`), component `i` of the F-response must equal
/// component `j` of the G-response.
pub fn check_perfect_correlation(
    m: &FactorizedModel,
    pairs: &[(usize, usize)],
) -> Result<PerfectCorrelationReport> {
    if m.variant() != Variant::Spin1 {
        return Err(Error::Input("perfect-correlation check applies to spin-one models".into()));
    }
    let frame_of = |s: &Setting| -> Result<Frame> {
        s.as_frame().copied().ok_or_else(|| {
            Error::Input("spin-one settings must carry frame values for this check".into())
        })
    };
    let mut skipped = Vec::new();
    let mut checked = 0usize;
    for (pi, &(ai, bi)) in pairs.iter().enumerate() {
        if ai >= m.settings_a().len() || bi >= m.settings_b().len() {
            return Err(Error::Input(format!("setting pair ({ai},{bi}) out of range")));
        }
        let fa = frame_of(&m.settings_a()[ai])?;
        let fb = frame_of(&m.settings_b()[bi])?;
        let shared = fa.shared_rays(&fb);
        if shared.is_empty() {
            skipped.push(pi);
            continue;
        }
        checked += 1;
        for zi in 0..m.z_labels().len() {
            let zero_f = m.response_f()[ai][zi];
            let zero_g = m.response_g()[bi][zi];
            for &(i, j) in &shared {
                if triple_component(zero_f, i) != triple_component(zero_g, j) {
                    return Ok(PerfectCorrelationReport {
                        holds: false,
                        witness: Some(CorrelationWitness {
                            pair_index: pi,
                            z_index: zi,
                            component_a: i,
                            component_b: j,
                        }),
                        skipped_pairs: skipped,
                        checked_pairs: checked,
                    });
                }
            }
        }
    }
    Ok(PerfectCorrelationReport {
        holds: true,
        witness: None,
        skipped_pairs: skipped,
        checked_pairs: checked,
    })
}

/// Result of [`check_bell_locality`].
#[derive(Debug, Clone)]
pub struct BellLocalityReport {
    /// `P(F,G|A,B,Z) = P(F|A,Z)·P(G|B,Z)` wherever defined, within `tol`.
    pub bell_local: bool,
    pub max_residual: f64,
    /// `P(Z|A,B) = P(Z)` wherever defined, within `tol`.
    pub freedom: bool,
    pub freedom_residual: f64,
}

/// Audit Bell-Locality and settings-freedom of a full joint table over the
/// five variables, identified by name.
pub fn check_bell_locality(
    joint: &JointTable,
    a: &str,
    b: &str,
    f: &str,
    g: &str,
    z: &str,
    tol: f64,
) -> Result<BellLocalityReport> {
    if tol <= 0.0 {
        return Err(Error::Input("tolerance must be positive".into()));
    }
    let full = joint.marginal(&[f, g, a, b, z])?;
    let m_abz = joint.marginal(&[a, b, z])?;
    let m_faz = joint.marginal(&[f, a, z])?;
    let m_az = joint.marginal(&[a, z])?;
    let m_gbz = joint.marginal(&[g, b, z])?;
    let m_bz = joint.marginal(&[b, z])?;
    let m_ab = joint.marginal(&[a, b])?;
    let m_z = joint.marginal(&[z])?;

    let dims: Vec<usize> = full.codomains().iter().map(|c| c.len()).collect();
    let (nf, ng, na, nb, nz) = (dims[0], dims[1], dims[2], dims[3], dims[4]);
    let mut max_residual: f64 = 0.0;
    for ai in 0..na {
        for bi in 0..nb {
            for zi in 0..nz {
                let p_abz = m_abz.cell(&[ai, bi, zi]);
                if p_abz <= 0.0 {
                    continue;
                }
                let p_az = m_az.cell(&[ai, zi]);
                let p_bz = m_bz.cell(&[bi, zi]);
                for fi in 0..nf {
                    for gi in 0..ng {
                        let lhs = full.cell(&[fi, gi, ai, bi, zi]) / p_abz;
                        let rhs = (m_faz.cell(&[fi, ai, zi]) / p_az)
                            * (m_gbz.cell(&[gi, bi, zi]) / p_bz);
                        max_residual = max_residual.max((lhs - rhs).abs());
                    }
                }
            }
        }
    }
    let mut freedom_residual: f64 = 0.0;
    for ai in 0..na {
        for bi in 0..nb {
            let p_ab = m_ab.cell(&[ai, bi]);
            if p_ab <= 0.0 {
                continue;
            }
            for zi in 0..nz {
                let lhs = m_abz.cell(&[ai, bi, zi]) / p_ab;
                freedom_residual = freedom_residual.max((lhs - m_z.cell(&[zi])).abs());
            }
        }
    }
    Ok(BellLocalityReport {
        bell_local: max_residual <= tol,
        max_residual,
        freedom: freedom_residual <= tol,
        freedom_residual,
    })
}

/// Embed a fully populated conditional table as a five-variable joint with a
/// singleton hidden variable, under the given settings distributions.
pub fn embed_with_singleton_z(
    table: &ConditionalTable,
    p_a: &FiniteDistribution,
    p_b: &FiniteDistribution,
) -> Result<JointTable> {
    if !table.all_pairs_present() {
        return Err(Error::Input("every setting pair must be present to embed".into()));
    }
    if p_a.len() != table.n_settings_a() || p_b.len() != table.n_settings_b() {
        return Err(Error::Input("settings distribution lengths must match the table".into()));
    }
    let (na, nb) = (table.n_settings_a(), table.n_settings_b());
    let (kf, kg) = (table.outcomes_f().len(), table.outcomes_g().len());
    // flat (a,b,f,g) order with a trailing singleton Z is already the
    // row-major (A,B,F,G,Z) order
    let mut cells = Vec::with_capacity(na * nb * kf * kg);
    for ai in 0..na {
        for bi in 0..nb {
            for fi in 0..kf {
                for gi in 0..kg {
                    cells.push(
                        p_a.weights()[ai]
                            * p_b.weights()[bi]
                            * table.cell(ai, bi, fi, gi).expect("all pairs present"),
                    );
                }
            }
        }
    }
    JointTable::new(
        vec!["A".into(), "B".into(), "F".into(), "G".into(), "Z".into()],
        vec![
            FactorizedModel::setting_labels(na, "a"),
            FactorizedModel::setting_labels(nb, "b"),
            table.outcomes_f().to_vec(),
            table.outcomes_g().to_vec(),
            vec!["z0".into()],
        ],
        cells,
    )
}

/// Stochastic hidden-variable model: per-wing outcome kernels conditioned on
/// the setting and the hidden value.
#[derive(Debug, Clone)]
pub struct StochasticKernelModel {
    variant: Variant,
    settings_a: Vec<Setting>,
    settings_b: Vec<Setting>,
    p_a: FiniteDistribution,
    p_b: FiniteDistribution,
    z_labels: Vec<String>,
    p_z: FiniteDistribution,
    kernel_f: Vec<Vec<Vec<f64>>>,
    kernel_g: Vec<Vec<Vec<f64>>>,
}

impl StochasticKernelModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        variant: Variant,
        settings_a: Vec<Setting>,
        p_a: FiniteDistribution,
        settings_b: Vec<Setting>,
        p_b: FiniteDistribution,
        z_labels: Vec<String>,
        p_z: FiniteDistribution,
        kernel_f: Vec<Vec<Vec<f64>>>,
        kernel_g: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if settings_a.is_empty() || settings_b.is_empty() || z_labels.is_empty() {
            return Err(Error::Input("settings and hidden-variable sets must be nonempty".into()));
        }
        for s in settings_a.iter().chain(&settings_b) {
            if !s.matches_variant(variant) {
                return Err(Error::Input(format!(
                    "setting kind does not match the {} variant",
                    variant.as_str()
                )));
            }
        }
        if p_a.len() != settings_a.len() || p_b.len() != settings_b.len() || p_z.len() != z_labels.len()
        {
            return Err(Error::Input("distribution lengths must match their value sets".into()));
        }
        let k = variant.outcome_count();
        let check = |kern: &Vec<Vec<Vec<f64>>>, n: usize, party: &str| -> Result<()> {
            if kern.len() != n {
                return Err(Error::Input(format!("kernel_{party} needs {n} setting rows")));
            }
            for rows in kern {
                if rows.len() != z_labels.len() {
                    return Err(Error::Input(format!(
                        "kernel_{party} rows must cover all hidden values"
                    )));
                }
                for row in rows {
                    if row.len() != k {
                        return Err(Error::Input(format!(
                            "kernel_{party} outcome distributions need {k} entries"
                        )));
                    }
                    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                        return Err(Error::Input(format!("kernel_{party} has a negative entry")));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > tol::EXACT {
                        return Err(Error::Input(format!(
                            "kernel_{party} row sums to {sum}, not 1"
                        )));
                    }
                }
            }
            Ok(())
        };
        check(&kernel_f, settings_a.len(), "f")?;
        check(&kernel_g, settings_b.len(), "g")?;
        Ok(StochasticKernelModel {
            variant,
            settings_a,
            settings_b,
            p_a,
            p_b,
            z_labels,
            p_z,
            kernel_f,
            kernel_g,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn settings_a(&self) -> &[Setting] {
        &self.settings_a
    }

    pub fn settings_b(&self) -> &[Setting] {
        &self.settings_b
    }

    pub fn p_a(&self) -> &FiniteDistribution {
        &self.p_a
    }

    pub fn p_b(&self) -> &FiniteDistribution {
        &self.p_b
    }

    pub fn z_labels(&self) -> &[String] {
        &self.z_labels
    }

    pub fn p_z(&self) -> &FiniteDistribution {
        &self.p_z
    }

    pub fn kernel_f(&self) -> &[Vec<Vec<f64>>] {
        &self.kernel_f
    }

    pub fn kernel_g(&self) -> &[Vec<Vec<f64>>] {
        &self.kernel_g
    }

    fn outcome_label_vec(&self) -> Vec<String> {
        self.variant
            .outcome_labels()
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    /// The model's own predicted statistics:
    /// `P(λ,μ|α,β) = Σ_z P_Z(z)·kernel_f(λ|α,z)·kernel_g(μ|β,z)`.
    pub fn predicted_table(&self) -> Result<ConditionalTable> {
        let k = self.variant.outcome_count();
        let mut out = ConditionalTable::new(
            self.settings_a.len(),
            self.settings_b.len(),
            self.outcome_label_vec(),
            self.outcome_label_vec(),
        )?;
        for ai in 0..self.settings_a.len() {
            for bi in 0..self.settings_b.len() {
                let mut cells = vec![0.0; k * k];
                for (zi, w) in self.p_z.weights().iter().enumerate() {
                    for fo in 0..k {
                        for go in 0..k {
                            cells[fo * k + go] +=
                                w * self.kernel_f[ai][zi][fo] * self.kernel_g[bi][zi][go];
                        }
                    }
                }
                out.set_pair(ai, bi, cells)?;
            }
        }
        Ok(out)
    }

    /// Full joint over `(A, B, F, G, Z)` induced by independent settings and
    /// the kernels; Bell-Locality and Freedom hold by construction.
    pub fn induced_joint(&self) -> Result<JointTable> {
        let (na, nb, nz) = (
            self.settings_a.len(),
            self.settings_b.len(),
            self.z_labels.len(),
        );
        let k = self.variant.outcome_count();
        let dims = [na, nb, k, k, nz];
        let mut cells = Vec::with_capacity(dims.iter().product());
        for idx in index_tuples(&dims) {
            let (ai, bi, fo, go, zi) = (idx[0], idx[1], idx[2], idx[3], idx[4]);
            cells.push(
                self.p_a.weights()[ai]
                    * self.p_b.weights()[bi]
                    * self.p_z.weights()[zi]
                    * self.kernel_f[ai][zi][fo]
                    * self.kernel_g[bi][zi][go],
            );
        }
        JointTable::new(
            vec!["A".into(), "B".into(), "F".into(), "G".into(), "Z".into()],
            vec![
                FactorizedModel::setting_labels(na, "a"),
                FactorizedModel::setting_labels(nb, "b"),
                self.outcome_label_vec(),
                self.outcome_label_vec(),
                self.z_labels.clone(),
            ],
            cells,
        )
    }

    /// Statistics of the derandomized model, computed analytically.
    ///
    /// The hidden space is extended by two auxiliary uniform coordinates and
    /// the outcomes become indicators of kernel-probability intervals; the
    /// auxiliary coordinates integrate out in closed form to interval
    /// lengths, so the extended deterministic model's table is evaluated
    /// here without materializing the continuum. The certificate compares it
    /// against [`predicted_table`](Self::predicted_table) at
    /// [`tol::EXACT`].
    pub fn derandomize(&self) -> Result<(ConditionalTable, DerandomizationCertificate)> {
        let k = self.variant.outcome_count();
        // interval length of each outcome in the cumulative partition of
        // [0,1] by the kernel row
        let lengths = |row: &[f64]| -> Vec<f64> {
            let mut cum = Vec::with_capacity(k + 1);
            let mut acc = 0.0;
            cum.push(0.0);
            for p in row {
                acc += p;
                cum.push(acc);
            }
            (0..k).map(|o| cum[o + 1] - cum[o]).collect()
        };
        let mut out = ConditionalTable::new(
            self.settings_a.len(),
            self.settings_b.len(),
            self.outcome_label_vec(),
            self.outcome_label_vec(),
        )?;
        for ai in 0..self.settings_a.len() {
            for bi in 0..self.settings_b.len() {
                let mut cells = vec![0.0; k * k];
                for (zi, w) in self.p_z.weights().iter().enumerate() {
                    let lf = lengths(&self.kernel_f[ai][zi]);
                    let lg = lengths(&self.kernel_g[bi][zi]);
                    for fo in 0..k {
                        for go in 0..k {
                            cells[fo * k + go] += w * lf[fo] * lg[go];
                        }
                    }
                }
                // renormalize guard is unnecessary: rows are normalized, so
                // interval lengths sum to 1 exactly up to rounding
                out.set_pair(ai, bi, cells)?;
            }
        }
        let predicted = self.predicted_table()?;
        let max_abs_diff = out.max_abs_diff(&predicted);
        Ok((
            out,
            DerandomizationCertificate {
                max_abs_diff,
                certified: max_abs_diff <= tol::EXACT,
            },
        ))
    }

    /// Deterministic model with the same statistics, when every kernel entry
    /// is exactly 0 or 1.
    pub fn to_factorized(&self) -> Result<FactorizedModel> {
        let to_resp = |kern: &[Vec<Vec<f64>>], party: &str| -> Result<Vec<Vec<usize>>> {
            kern.iter()
                .map(|rows| {
                    rows.iter()
                        .map(|row| {
                            row.iter().position(|p| *p == 1.0).ok_or_else(|| {
                                Error::Input(format!(
                                    "kernel_{party} is not deterministic; no 0/1 row"
                                ))
                            })
                        })
                        .collect()
                })
                .collect()
        };
        FactorizedModel::new(
            self.variant,
            self.settings_a.clone(),
            self.p_a.clone(),
            self.settings_b.clone(),
            self.p_b.clone(),
            self.z_labels.clone(),
            self.p_z.clone(),
            to_resp(&self.kernel_f, "f")?,
            to_resp(&self.kernel_g, "g")?,
        )
    }
}

/// Certificate that the derandomized statistics equal the stochastic
/// model's own predictions.
#[derive(Debug, Clone, Copy)]
pub struct DerandomizationCertificate {
    pub max_abs_diff: f64,
    pub certified: bool,
}
