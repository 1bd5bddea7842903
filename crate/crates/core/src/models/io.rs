//! Model and table files.
//!
//! Model file (JSON): variant, settings with full-support distributions, the
//! hidden-variable set, and either deterministic responses
//! (`response_f`/`response_g`, maps setting-index → z-index → outcome) or
//! stochastic kernels (`kernel_f`/`kernel_g`, maps setting-index → z-index →
//! outcome distribution). Photon outcomes are `0`/`1`; spin-one outcomes are
//! the zero-position labels `z1`/`z2`/`z3`. Angles are radians; frames are
//! nine reals, row per ray. Omitted `p_a`/`p_b`/`p_z` default to uniform.
//!
//! Table file (JSON): outcome alphabets, setting counts, and one cell block
//! per populated setting pair.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finprob::FiniteDistribution;
use crate::models::{ConditionalTable, FactorizedModel, Setting, StochasticKernelModel, Variant};
use crate::quantum::{Angle, Frame};

/// A wing setting as serialized: a bare number (angle in radians) or nine
/// reals (frame rows).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SettingRepr {
    Angle(f64),
    Frame(Vec<f64>),
}

/// Outcome as serialized: `0`/`1` for photon, `"z1"`/`"z2"`/`"z3"` for
/// spin-one (the numeric forms are accepted as strings too).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum OutcomeRepr {
    Bit(u64),
    Label(String),
}

type ResponseMap = BTreeMap<usize, BTreeMap<usize, OutcomeRepr>>;
type KernelMap = BTreeMap<usize, BTreeMap<usize, Vec<f64>>>;

/// On-disk model schema; deterministic and stochastic models share it, with
/// exactly one of responses or kernels present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub variant: String,
    pub settings_a: Vec<SettingRepr>,
    pub settings_b: Vec<SettingRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_b: Option<Vec<f64>>,
    pub z: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_z: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    response_f: Option<ResponseMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    response_g: Option<ResponseMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel_f: Option<KernelMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel_g: Option<KernelMap>,
}

/// A parsed model file.
#[derive(Debug, Clone)]
pub enum LoadedModel {
    Deterministic(FactorizedModel),
    Stochastic(StochasticKernelModel),
}

fn setting_from_repr(repr: &SettingRepr, variant: Variant) -> Result<Setting> {
    match (repr, variant) {
        (SettingRepr::Angle(v), Variant::Photon) => Ok(Setting::Angle(Angle::new(*v))),
        (SettingRepr::Frame(v), Variant::Spin1) => Ok(Setting::Frame(Frame::from_row_major(v)?)),
        (SettingRepr::Angle(_), Variant::Spin1) => {
            Err(Error::Format("spin1 settings must be frames of nine reals".into()))
        }
        (SettingRepr::Frame(_), Variant::Photon) => {
            Err(Error::Format("photon settings must be angles".into()))
        }
    }
}

fn setting_to_repr(s: &Setting) -> Result<SettingRepr> {
    match s {
        Setting::Angle(a) => Ok(SettingRepr::Angle(a.radians())),
        Setting::Frame(f) => Ok(SettingRepr::Frame(f.to_row_major().to_vec())),
        Setting::Label(l) => Err(Error::Input(format!(
            "abstract setting '{l}' has no serialized form"
        ))),
    }
}

fn outcome_index(repr: &OutcomeRepr, variant: Variant) -> Result<usize> {
    let labels = variant.outcome_labels();
    let text = match repr {
        OutcomeRepr::Bit(b) => b.to_string(),
        OutcomeRepr::Label(l) => l.clone(),
    };
    labels
        .iter()
        .position(|l| *l == text)
        .ok_or_else(|| Error::Format(format!("outcome '{text}' not in {labels:?}")))
}

fn dist_or_uniform(p: &Option<Vec<f64>>, n: usize, what: &str) -> Result<FiniteDistribution> {
    match p {
        None => FiniteDistribution::uniform(n),
        Some(w) => {
            if w.len() != n {
                return Err(Error::Format(format!(
                    "{what} has {} weights for {n} values",
                    w.len()
                )));
            }
            FiniteDistribution::new(w.clone())
        }
    }
}

fn dense_responses(
    map: &ResponseMap,
    n_settings: usize,
    n_z: usize,
    variant: Variant,
    what: &str,
) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![vec![None; n_z]; n_settings];
    for (si, row) in map {
        for (zi, o) in row {
            if *si >= n_settings || *zi >= n_z {
                return Err(Error::Format(format!("{what} index ({si},{zi}) out of range")));
            }
            out[*si][*zi] = Some(outcome_index(o, variant)?);
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(si, row)| {
            row.into_iter()
                .enumerate()
                .map(|(zi, o)| {
                    o.ok_or_else(|| Error::Format(format!("{what} missing entry ({si},{zi})")))
                })
                .collect()
        })
        .collect()
}

fn dense_kernels(
    map: &KernelMap,
    n_settings: usize,
    n_z: usize,
    what: &str,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut out = vec![vec![None; n_z]; n_settings];
    for (si, row) in map {
        for (zi, dist) in row {
            if *si >= n_settings || *zi >= n_z {
                return Err(Error::Format(format!("{what} index ({si},{zi}) out of range")));
            }
            out[*si][*zi] = Some(dist.clone());
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(si, row)| {
            row.into_iter()
                .enumerate()
                .map(|(zi, o)| {
                    o.ok_or_else(|| Error::Format(format!("{what} missing entry ({si},{zi})")))
                })
                .collect()
        })
        .collect()
}

/// Parse a model document; rejects files carrying both or neither of
/// responses and kernels.
pub fn parse_model(text: &str) -> Result<LoadedModel> {
    let file: ModelFile = serde_json::from_str(text)?;
    let variant = Variant::parse(&file.variant)?;
    let settings_a: Vec<Setting> = file
        .settings_a
        .iter()
        .map(|r| setting_from_repr(r, variant))
        .collect::<Result<_>>()?;
    let settings_b: Vec<Setting> = file
        .settings_b
        .iter()
        .map(|r| setting_from_repr(r, variant))
        .collect::<Result<_>>()?;
    if settings_a.is_empty() || settings_b.is_empty() || file.z.is_empty() {
        return Err(Error::Format("settings and z must be nonempty".into()));
    }
    let p_a = dist_or_uniform(&file.p_a, settings_a.len(), "p_a")?;
    let p_b = dist_or_uniform(&file.p_b, settings_b.len(), "p_b")?;
    let p_z = dist_or_uniform(&file.p_z, file.z.len(), "p_z")?;
    let n_z = file.z.len();
    match (&file.response_f, &file.response_g, &file.kernel_f, &file.kernel_g) {
        (Some(rf), Some(rg), None, None) => {
            let response_f = dense_responses(rf, settings_a.len(), n_z, variant, "response_f")?;
            let response_g = dense_responses(rg, settings_b.len(), n_z, variant, "response_g")?;
            Ok(LoadedModel::Deterministic(FactorizedModel::new(
                variant, settings_a, p_a, settings_b, p_b, file.z, p_z, response_f, response_g,
            )?))
        }
        (None, None, Some(kf), Some(kg)) => {
            let kernel_f = dense_kernels(kf, settings_a.len(), n_z, "kernel_f")?;
            let kernel_g = dense_kernels(kg, settings_b.len(), n_z, "kernel_g")?;
            Ok(LoadedModel::Stochastic(StochasticKernelModel::new(
                variant, settings_a, p_a, settings_b, p_b, file.z, p_z, kernel_f, kernel_g,
            )?))
        }
        _ => Err(Error::Format(
            "model must carry either response_f/response_g or kernel_f/kernel_g".into(),
        )),
    }
}

pub fn read_model(path: &Path) -> Result<LoadedModel> {
    parse_model(&std::fs::read_to_string(path)?)
}

fn responses_to_map(resp: &[Vec<usize>], variant: Variant) -> ResponseMap {
    resp.iter()
        .enumerate()
        .map(|(si, row)| {
            (
                si,
                row.iter()
                    .enumerate()
                    .map(|(zi, &o)| {
                        let repr = match variant {
                            Variant::Photon => OutcomeRepr::Bit(o as u64),
                            Variant::Spin1 => {
                                OutcomeRepr::Label(variant.outcome_labels()[o].to_string())
                            }
                        };
                        (zi, repr)
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Serialize a deterministic model back to its file schema.
pub fn model_to_json(m: &FactorizedModel) -> Result<ModelFile> {
    Ok(ModelFile {
        variant: m.variant().as_str().to_string(),
        settings_a: m.settings_a().iter().map(setting_to_repr).collect::<Result<_>>()?,
        settings_b: m.settings_b().iter().map(setting_to_repr).collect::<Result<_>>()?,
        p_a: Some(m.p_a().weights().to_vec()),
        p_b: Some(m.p_b().weights().to_vec()),
        z: m.z_labels().to_vec(),
        p_z: Some(m.p_z().weights().to_vec()),
        response_f: Some(responses_to_map(m.response_f(), m.variant())),
        response_g: Some(responses_to_map(m.response_g(), m.variant())),
        kernel_f: None,
        kernel_g: None,
    })
}

fn kernels_to_map(kern: &[Vec<Vec<f64>>]) -> KernelMap {
    kern.iter()
        .enumerate()
        .map(|(si, rows)| {
            (
                si,
                rows.iter().enumerate().map(|(zi, d)| (zi, d.clone())).collect(),
            )
        })
        .collect()
}

/// Serialize a stochastic model back to its file schema.
pub fn stochastic_to_json(m: &StochasticKernelModel) -> Result<ModelFile> {
    Ok(ModelFile {
        variant: m.variant().as_str().to_string(),
        settings_a: m.settings_a().iter().map(setting_to_repr).collect::<Result<_>>()?,
        settings_b: m.settings_b().iter().map(setting_to_repr).collect::<Result<_>>()?,
        p_a: Some(m.p_a().weights().to_vec()),
        p_b: Some(m.p_b().weights().to_vec()),
        z: m.z_labels().to_vec(),
        p_z: Some(m.p_z().weights().to_vec()),
        response_f: None,
        response_g: None,
        kernel_f: Some(kernels_to_map(m.kernel_f())),
        kernel_g: Some(kernels_to_map(m.kernel_g())),
    })
}

/// One populated setting pair in a table file; `cells[f][g]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairEntry {
    pub a: usize,
    pub b: usize,
    pub cells: Vec<Vec<f64>>,
}

/// On-disk conditional-table schema. Settings are echoed when known; pairs
/// never observed are simply omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings_a: Option<Vec<SettingRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings_b: Option<Vec<SettingRepr>>,
    pub n_settings_a: usize,
    pub n_settings_b: usize,
    pub outcomes_f: Vec<String>,
    pub outcomes_g: Vec<String>,
    pub tables: Vec<PairEntry>,
}

/// Convert a table to its file form, optionally echoing the settings.
pub fn table_to_file(t: &ConditionalTable, settings: Option<(&[Setting], &[Setting])>) -> Result<TableFile> {
    let reprs = |ss: &[Setting]| -> Result<Vec<SettingRepr>> {
        ss.iter().map(setting_to_repr).collect()
    };
    let (settings_a, settings_b) = match settings {
        Some((a, b)) => (Some(reprs(a)?), Some(reprs(b)?)),
        None => (None, None),
    };
    let kg = t.outcomes_g().len();
    let mut tables = Vec::new();
    for ai in 0..t.n_settings_a() {
        for bi in 0..t.n_settings_b() {
            if let Some(cells) = t.pair(ai, bi) {
                let rows: Vec<Vec<f64>> = cells.chunks(kg).map(|c| c.to_vec()).collect();
                tables.push(PairEntry {
                    a: ai,
                    b: bi,
                    cells: rows,
                });
            }
        }
    }
    Ok(TableFile {
        settings_a,
        settings_b,
        n_settings_a: t.n_settings_a(),
        n_settings_b: t.n_settings_b(),
        outcomes_f: t.outcomes_f().to_vec(),
        outcomes_g: t.outcomes_g().to_vec(),
        tables,
    })
}

pub fn table_from_file(file: &TableFile) -> Result<ConditionalTable> {
    let mut t = ConditionalTable::new(
        file.n_settings_a,
        file.n_settings_b,
        file.outcomes_f.clone(),
        file.outcomes_g.clone(),
    )?;
    for entry in &file.tables {
        if entry.cells.len() != file.outcomes_f.len()
            || entry.cells.iter().any(|r| r.len() != file.outcomes_g.len())
        {
            return Err(Error::Format(format!(
                "pair ({},{}) cell block does not match the outcome alphabets",
                entry.a, entry.b
            )));
        }
        let flat: Vec<f64> = entry.cells.iter().flatten().copied().collect();
        t.set_pair(entry.a, entry.b, flat)
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(t)
}

/// Parse a table document.
pub fn table_to_json(t: &ConditionalTable) -> Result<TableFile> {
    table_to_file(t, None)
}

pub fn read_table(path: &Path) -> Result<ConditionalTable> {
    let file: TableFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    table_from_file(&file)
}
