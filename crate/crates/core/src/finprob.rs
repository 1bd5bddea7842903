//! Finite probability spaces, random variables, product measures,
//! conditioning, and independence testing.
//!
//! Everything here is finite and immutable: a space is an ordered list of
//! named atoms with a normalized weight vector, a random variable is a total
//! map from atoms into a finite codomain, and joint tables cover the full
//! product of their codomains (zero cells allowed). All derived tables stay
//! normalized to within [`crate::tol::EXACT`].

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::tol;

/// Normalized weights over the atoms of a space, in atom order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    weights: Vec<f64>,
}

impl FiniteDistribution {
    /// Weights must be nonnegative and sum to 1 within [`tol::EXACT`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("distribution needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Input(format!("negative or non-finite weight {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::EXACT {
            return Err(Error::Input(format!("weights sum to {sum}, not 1")));
        }
        Ok(FiniteDistribution { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("uniform distribution over zero atoms".into()));
        }
        FiniteDistribution::new(vec![1.0 / n as f64; n])
    }

    /// All mass on `atom`.
    pub fn point_mass(n: usize, atom: usize) -> Result<Self> {
        if atom >= n {
            return Err(Error::Input(format!("point mass at {atom} of {n} atoms")));
        }
        let mut w = vec![0.0; n];
        w[atom] = 1.0;
        FiniteDistribution::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// True when every weight is strictly positive.
    pub fn full_support(&self) -> bool {
        self.weights.iter().all(|w| *w > 0.0)
    }

    pub fn max_abs_diff(&self, other: &FiniteDistribution) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A finite probability space: ordered, uniquely named atoms plus weights.
#[derive(Debug, Clone)]
pub struct SampleSpace {
    atoms: Vec<String>,
    dist: FiniteDistribution,
}

impl SampleSpace {
    pub fn new(atoms: Vec<String>, dist: FiniteDistribution) -> Result<Self> {
        if atoms.len() != dist.len() {
            return Err(Error::Input(format!(
                "{} atoms but {} weights",
                atoms.len(),
                dist.len()
            )));
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::Input(format!("duplicate atom identifier '{a}'")));
            }
        }
        Ok(SampleSpace { atoms, dist })
    }

    pub fn uniform(atoms: Vec<String>) -> Result<Self> {
        let dist = FiniteDistribution::uniform(atoms.len())?;
        SampleSpace::new(atoms, dist)
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn dist(&self) -> &FiniteDistribution {
        &self.dist
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.dist.weights()[atom]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Deterministic stream of `n` atom indices. The stream depends only on
    /// `(seed, position)`; the cursor lives in the returned iterator.
    pub fn sample(&self, seed: u64, n: usize) -> SampleStream {
        let mut cum = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for w in self.dist.weights() {
            acc += w;
            cum.push(acc);
        }
        SampleStream {
            cum,
            rng: CounterRng::new(seed),
            remaining: n,
        }
    }
}

/// Iterator over sampled atom indices; see [`SampleSpace::sample`].
pub struct SampleStream {
    cum: Vec<f64>,
    rng: CounterRng,
    remaining: usize,
}

impl Iterator for SampleStream {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let total = *self.cum.last().expect("nonempty space");
        let u = self.rng.next_f64() * total;
        // first index whose cumulative weight exceeds u; zero-weight atoms
        // have flat cumulative segments and are never selected
        let idx = self.cum.partition_point(|c| *c <= u);
        Some(idx.min(self.cum.len() - 1))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// A total map from the atoms of one space into a finite ordered codomain.
#[derive(Debug, Clone)]
pub struct RandomVariable {
    name: String,
    codomain: Vec<String>,
    assignment: Vec<usize>,
}

impl RandomVariable {
    /// `assignment[i]` is the codomain index of atom `i`.
    pub fn new(name: impl Into<String>, codomain: Vec<String>, assignment: Vec<usize>) -> Result<Self> {
        if codomain.is_empty() {
            return Err(Error::Input("empty codomain".into()));
        }
        let mut seen = HashSet::new();
        for v in &codomain {
            if !seen.insert(v.as_str()) {
                return Err(Error::Input(format!("duplicate codomain value '{v}'")));
            }
        }
        if let Some(ix) = assignment.iter().find(|ix| **ix >= codomain.len()) {
            return Err(Error::Input(format!("assignment value index {ix} out of range")));
        }
        Ok(RandomVariable {
            name: name.into(),
            codomain,
            assignment,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Codomain index at `atom`.
    pub fn value_index(&self, atom: usize) -> usize {
        self.assignment[atom]
    }

    pub fn value(&self, atom: usize) -> &str {
        &self.codomain[self.assignment[atom]]
    }

    /// Totality on `space`, i.e. one codomain value per atom.
    pub fn defined_on(&self, space: &SampleSpace) -> bool {
        self.assignment.len() == space.len()
    }

    /// Renamed copy with identical codomain and assignment.
    pub fn renamed(&self, name: impl Into<String>) -> RandomVariable {
        RandomVariable {
            name: name.into(),
            codomain: self.codomain.clone(),
            assignment: self.assignment.clone(),
        }
    }
}

/// A normalized joint distribution over the full product of the named
/// variables' codomains, row-major in variable order.
#[derive(Debug, Clone)]
pub struct JointTable {
    variables: Vec<String>,
    codomains: Vec<Vec<String>>,
    cells: Vec<f64>,
}

impl JointTable {
    pub fn new(variables: Vec<String>, codomains: Vec<Vec<String>>, cells: Vec<f64>) -> Result<Self> {
        if variables.len() != codomains.len() {
            return Err(Error::Input("one codomain per variable required".into()));
        }
        let mut seen = HashSet::new();
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(Error::Input(format!("duplicate variable name '{v}'")));
            }
        }
        let size: usize = codomains.iter().map(|c| c.len()).product();
        if cells.len() != size {
            return Err(Error::Input(format!(
                "{} cells for a product of size {size}",
                cells.len()
            )));
        }
        if let Some(c) = cells.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::Input(format!("negative or non-finite cell {c}")));
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > tol::EXACT {
            return Err(Error::Input(format!("cells sum to {sum}, not 1")));
        }
        Ok(JointTable {
            variables,
            codomains,
            cells,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn codomains(&self) -> &[Vec<String>] {
        &self.codomains
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    fn dims(&self) -> Vec<usize> {
        self.codomains.iter().map(|c| c.len()).collect()
    }

    fn var_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Input(format!("unknown variable '{name}'")))
    }

    fn value_index(&self, var: usize, value: &str) -> Result<usize> {
        self.codomains[var]
            .iter()
            .position(|v| v == value)
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown value '{value}' for variable '{}'",
                    self.variables[var]
                ))
            })
    }

    pub fn cell(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.variables.len());
        let mut flat = 0;
        for (i, &ix) in idx.iter().enumerate() {
            flat = flat * self.codomains[i].len() + ix;
        }
        self.cells[flat]
    }

    /// Probability of the event given by a partial assignment.
    pub fn event_prob(&self, given: &[(&str, &str)]) -> Result<f64> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.variables.len()];
        for (name, value) in given {
            let v = self.var_index(name)?;
            fixed[v] = Some(self.value_index(v, value)?);
        }
        let mut p = 0.0;
        for (idx, c) in index_tuples(&self.dims()).zip(self.cells.iter()) {
            if fixed
                .iter()
                .enumerate()
                .all(|(v, f)| f.map_or(true, |fv| idx[v] == fv))
            {
                p += c;
            }
        }
        Ok(p)
    }

    /// Marginal table over `keep`, in the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<JointTable> {
        let keep_idx: Vec<usize> = keep
            .iter()
            .map(|n| self.var_index(n))
            .collect::<Result<_>>()?;
        let out_dims: Vec<usize> = keep_idx.iter().map(|&v| self.codomains[v].len()).collect();
        let out_size: usize = out_dims.iter().product();
        let mut out = vec![0.0; out_size];
        for (idx, c) in index_tuples(&self.dims()).zip(self.cells.iter()) {
            let mut flat = 0;
            for (k, &v) in keep_idx.iter().enumerate() {
                flat = flat * out_dims[k] + idx[v];
            }
            out[flat] += c;
        }
        JointTable::new(
            keep.iter().map(|s| s.to_string()).collect(),
            keep_idx.iter().map(|&v| self.codomains[v].clone()).collect(),
            out,
        )
    }

    /// Condition on a partial assignment; the conditioned variables are
    /// dropped and the remaining table rescaled by `1/P(event)`.
    pub fn condition(&self, given: &[(&str, &str)]) -> Result<JointTable> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.variables.len()];
        for (name, value) in given {
            let v = self.var_index(name)?;
            if fixed[v].is_some() {
                return Err(Error::Input(format!("variable '{name}' conditioned twice")));
            }
            fixed[v] = Some(self.value_index(v, value)?);
        }
        let event = self.event_prob(given)?;
        if event <= 0.0 {
            return Err(Error::ZeroProbability(format!("{given:?}")));
        }
        let rest: Vec<usize> = (0..self.variables.len())
            .filter(|v| fixed[*v].is_none())
            .collect();
        let out_dims: Vec<usize> = rest.iter().map(|&v| self.codomains[v].len()).collect();
        let mut out = vec![0.0; out_dims.iter().product::<usize>().max(1)];
        for (idx, c) in index_tuples(&self.dims()).zip(self.cells.iter()) {
            if fixed
                .iter()
                .enumerate()
                .all(|(v, f)| f.map_or(true, |fv| idx[v] == fv))
            {
                let mut flat = 0;
                for (k, &v) in rest.iter().enumerate() {
                    flat = flat * out_dims[k] + idx[v];
                }
                out[flat] += c / event;
            }
        }
        JointTable::new(
            rest.iter().map(|&v| self.variables[v].clone()).collect(),
            rest.iter().map(|&v| self.codomains[v].clone()).collect(),
            out,
        )
    }

    pub fn max_abs_diff(&self, other: &JointTable) -> f64 {
        if self.cells.len() != other.cells.len() {
            return f64::INFINITY;
        }
        self.cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Row-major odometer over a product of dimensions.
pub(crate) fn index_tuples(dims: &[usize]) -> IndexTuples {
    IndexTuples {
        dims: dims.to_vec(),
        next: if dims.iter().any(|&d| d == 0) {
            None
        } else {
            Some(vec![0; dims.len()])
        },
    }
}

pub(crate) struct IndexTuples {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for IndexTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.clone()?;
        let mut bumped = current.clone();
        let mut done = true;
        for i in (0..self.dims.len()).rev() {
            bumped[i] += 1;
            if bumped[i] < self.dims[i] {
                done = false;
                break;
            }
            bumped[i] = 0;
        }
        // zero-dimensional product has exactly one (empty) tuple
        if done || self.dims.is_empty() {
            self.next = None;
        } else {
            self.next = Some(bumped);
        }
        Some(current)
    }
}

/// A product space together with its coordinate projections.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    pub space: SampleSpace,
    pub projections: Vec<RandomVariable>,
}

/// Product measure of the factors; atoms are tuples of factor atoms and the
/// weight of a tuple is the product of factor weights. Coordinate
/// projections are exposed as random variables named `coord0`, `coord1`, ….
pub fn product_measure(factors: &[SampleSpace]) -> Result<ProductSpace> {
    if factors.is_empty() {
        return Err(Error::Input("product of zero spaces".into()));
    }
    let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    let mut assignments: Vec<Vec<usize>> = vec![Vec::new(); factors.len()];
    for idx in index_tuples(&dims) {
        let label: Vec<&str> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| factors[k].atoms()[i].as_str())
            .collect();
        atoms.push(format!("({})", label.join(",")));
        weights.push(
            idx.iter()
                .enumerate()
                .map(|(k, &i)| factors[k].weight(i))
                .product(),
        );
        for (k, &i) in idx.iter().enumerate() {
            assignments[k].push(i);
        }
    }
    let space = SampleSpace::new(atoms, FiniteDistribution::new(weights)?)?;
    let projections = assignments
        .into_iter()
        .enumerate()
        .map(|(k, assignment)| {
            RandomVariable::new(format!("coord{k}"), factors[k].atoms().to_vec(), assignment)
        })
        .collect::<Result<_>>()?;
    Ok(ProductSpace { space, projections })
}

/// Push the space's measure forward through the given variables:
/// `cell(v1..vn) = Σ weights of atoms mapping to that tuple`.
pub fn push_forward(space: &SampleSpace, rvs: &[&RandomVariable]) -> Result<JointTable> {
    if rvs.is_empty() {
        return Err(Error::Input("push-forward of zero variables".into()));
    }
    for rv in rvs {
        if !rv.defined_on(space) {
            return Err(Error::Input(format!(
                "variable '{}' not defined on the space",
                rv.name()
            )));
        }
    }
    let dims: Vec<usize> = rvs.iter().map(|rv| rv.codomain().len()).collect();
    let mut cells = vec![0.0; dims.iter().product()];
    for atom in 0..space.len() {
        let mut flat = 0;
        for (k, rv) in rvs.iter().enumerate() {
            flat = flat * dims[k] + rv.value_index(atom);
        }
        cells[flat] += space.weight(atom);
    }
    JointTable::new(
        rvs.iter().map(|rv| rv.name().to_string()).collect(),
        rvs.iter().map(|rv| rv.codomain().to_vec()).collect(),
        cells,
    )
}

/// Free-function form of [`JointTable::condition`].
pub fn condition(table: &JointTable, given: &[(&str, &str)]) -> Result<JointTable> {
    table.condition(given)
}

/// Outcome of a mutual-independence check.
#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub independent: bool,
    /// Largest `|P(joint) − Π P(marginals)|` over all value tuples.
    pub max_residual: f64,
}

/// Mutual independence of the variables on `space`:
/// `P(V1=v1,..,Vn=vn) = Π P(Vi=vi)` for every value tuple, within `tol`.
pub fn check_mutual_independence(
    rvs: &[&RandomVariable],
    space: &SampleSpace,
    tol: f64,
) -> Result<IndependenceReport> {
    if tol <= 0.0 {
        return Err(Error::Input("tolerance must be positive".into()));
    }
    let joint = push_forward(space, rvs)?;
    let marginals: Vec<JointTable> = rvs
        .iter()
        .map(|rv| push_forward(space, &[rv]))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = rvs.iter().map(|rv| rv.codomain().len()).collect();
    let mut max_residual: f64 = 0.0;
    for idx in index_tuples(&dims) {
        let product: f64 = idx
            .iter()
            .enumerate()
            .map(|(k, &v)| marginals[k].cells()[v])
            .product();
        max_residual = max_residual.max((joint.cell(&idx) - product).abs());
    }
    Ok(IndependenceReport {
        independent: max_residual <= tol,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin() -> SampleSpace {
        SampleSpace::uniform(vec!["h".into(), "t".into()]).unwrap()
    }

    fn biased() -> SampleSpace {
        SampleSpace::new(
            vec!["x".into(), "y".into()],
            FiniteDistribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn distribution_rejects_negative_and_unnormalized() {
        assert!(FiniteDistribution::new(vec![0.5, -0.5, 1.0]).is_err());
        assert!(FiniteDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(FiniteDistribution::new(vec![]).is_err());
        assert!(FiniteDistribution::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn space_rejects_duplicate_atoms() {
        let d = FiniteDistribution::uniform(2).unwrap();
        assert!(SampleSpace::new(vec!["a".into(), "a".into()], d).is_err());
    }

    #[test]
    fn product_of_two_fair_coins_is_uniform_on_four() {
        let p = product_measure(&[coin(), coin()]).unwrap();
        assert_eq!(p.space.len(), 4);
        for i in 0..4 {
            assert_eq!(p.space.weight(i), 0.25);
        }
        assert_eq!(p.projections.len(), 2);
    }

    #[test]
    fn product_of_single_factor_is_isomorphic_copy() {
        let p = product_measure(&[biased()]).unwrap();
        assert_eq!(p.space.len(), 2);
        assert_eq!(p.space.dist().weights(), biased().dist().weights());
    }

    #[test]
    fn product_weights_multiply() {
        let half = SampleSpace::uniform(vec!["u".into(), "v".into()]).unwrap();
        let p = product_measure(&[biased(), half]).unwrap();
        let expect = [1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0];
        for (i, e) in expect.iter().enumerate() {
            assert!((p.space.weight(i) - e).abs() <= tol::EXACT);
        }
    }

    #[test]
    fn product_of_empty_list_is_input_error() {
        assert!(matches!(product_measure(&[]), Err(Error::Input(_))));
    }

    #[test]
    fn push_forward_of_identity_reproduces_distribution() {
        let s = biased();
        let id = RandomVariable::new("id", s.atoms().to_vec(), vec![0, 1]).unwrap();
        let t = push_forward(&s, &[&id]).unwrap();
        assert_eq!(t.cells(), s.dist().weights());
    }

    #[test]
    fn push_forward_of_constant_is_point_mass() {
        let s = biased();
        let c = RandomVariable::new("c", vec!["k".into()], vec![0, 0]).unwrap();
        let t = push_forward(&s, &[&c]).unwrap();
        assert_eq!(t.cells(), &[1.0]);
    }

    #[test]
    fn push_forward_of_projections_is_product_of_factors() {
        let half = SampleSpace::uniform(vec!["u".into(), "v".into()]).unwrap();
        let p = product_measure(&[biased(), half]).unwrap();
        let rvs: Vec<&RandomVariable> = p.projections.iter().collect();
        let t = push_forward(&p.space, &rvs).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let direct = biased().weight(i) * 0.5;
                assert!((t.cell(&[i, j]) - direct).abs() <= tol::EXACT);
            }
        }
    }

    #[test]
    fn push_forward_rejects_foreign_variable() {
        let rv = RandomVariable::new("f", vec!["0".into()], vec![0, 0, 0]).unwrap();
        assert!(matches!(
            push_forward(&coin(), &[&rv]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn condition_uniform_four_on_two_atom_event_is_uniform_two() {
        let dims = vec!["a".into(), "b".into()];
        let t = JointTable::new(
            vec!["X".into(), "Y".into()],
            vec![dims.clone(), dims],
            vec![0.25; 4],
        )
        .unwrap();
        let c = t.condition(&[("X", "a")]).unwrap();
        assert_eq!(c.variables(), &["Y".to_string()]);
        assert_eq!(c.cells(), &[0.5, 0.5]);
    }

    #[test]
    fn condition_on_full_assignment_is_point_mass() {
        let dims = vec!["a".into(), "b".into()];
        let t = JointTable::new(
            vec!["X".into(), "Y".into()],
            vec![dims.clone(), dims],
            vec![0.25; 4],
        )
        .unwrap();
        let c = t.condition(&[("X", "a"), ("Y", "b")]).unwrap();
        assert!(c.variables().is_empty());
        assert_eq!(c.cells(), &[1.0]);
    }

    #[test]
    fn condition_product_table_on_one_coordinate_leaves_other_marginal() {
        let half = SampleSpace::uniform(vec!["u".into(), "v".into()]).unwrap();
        let p = product_measure(&[biased(), half]).unwrap();
        let rvs: Vec<&RandomVariable> = p.projections.iter().collect();
        let t = push_forward(&p.space, &rvs).unwrap();
        for val in ["u", "v"] {
            let c = t.condition(&[("coord1", val)]).unwrap();
            let m = t.marginal(&["coord0"]).unwrap();
            assert!(c.max_abs_diff(&m) <= tol::EXACT);
        }
    }

    #[test]
    fn condition_on_null_event_is_distinct_error() {
        let t = JointTable::new(
            vec!["X".into()],
            vec![vec!["a".into(), "b".into()]],
            vec![1.0, 0.0],
        )
        .unwrap();
        assert!(matches!(
            t.condition(&[("X", "b")]),
            Err(Error::ZeroProbability(_))
        ));
        assert!(matches!(
            t.condition(&[("X", "nope")]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn projections_of_product_are_mutually_independent() {
        let half = SampleSpace::uniform(vec!["u".into(), "v".into()]).unwrap();
        let p = product_measure(&[biased(), half, coin()]).unwrap();
        let rvs: Vec<&RandomVariable> = p.projections.iter().collect();
        let r = check_mutual_independence(&rvs, &p.space, tol::EXACT).unwrap();
        assert!(r.independent);
        assert!(r.max_residual <= 1e-15);
    }

    #[test]
    fn identical_nondegenerate_variables_are_dependent() {
        let s = coin();
        let a = RandomVariable::new("A", vec!["0".into(), "1".into()], vec![0, 1]).unwrap();
        let z = a.renamed("Z");
        let r = check_mutual_independence(&[&a, &z], &s, tol::EXACT).unwrap();
        assert!(!r.independent);
        assert!(r.max_residual > 0.2);
    }

    /// Three pairwise-independent but jointly dependent bits: the 8-atom
    /// space over (b1,b2,b3) carrying weight 1/4 on even-parity triples.
    #[test]
    fn xor_bits_are_pairwise_but_not_jointly_independent() {
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        let mut assignment = vec![Vec::new(), Vec::new(), Vec::new()];
        for b1 in 0..2usize {
            for b2 in 0..2usize {
                for b3 in 0..2usize {
                    atoms.push(format!("{b1}{b2}{b3}"));
                    weights.push(if b1 ^ b2 == b3 { 0.25 } else { 0.0 });
                    assignment[0].push(b1);
                    assignment[1].push(b2);
                    assignment[2].push(b3);
                }
            }
        }
        let space = SampleSpace::new(atoms, FiniteDistribution::new(weights).unwrap()).unwrap();
        let bits = vec!["0".to_string(), "1".to_string()];
        let rvs: Vec<RandomVariable> = (0..3)
            .map(|k| RandomVariable::new(format!("B{k}"), bits.clone(), assignment[k].clone()).unwrap())
            .collect();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let r = check_mutual_independence(&[&rvs[i], &rvs[j]], &space, tol::EXACT).unwrap();
            assert!(r.independent, "pair ({i},{j}) should be independent");
        }
        let all: Vec<&RandomVariable> = rvs.iter().collect();
        let r = check_mutual_independence(&all, &space, tol::EXACT).unwrap();
        assert!(!r.independent);
        assert!((r.max_residual - 0.125).abs() <= tol::EXACT);
    }

    #[test]
    fn sample_zero_is_empty_and_point_mass_is_constant() {
        assert_eq!(coin().sample(1, 0).count(), 0);
        let pm = SampleSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            FiniteDistribution::point_mass(3, 1).unwrap(),
        )
        .unwrap();
        assert!(pm.sample(9, 1000).all(|i| i == 1));
    }

    #[test]
    fn sample_is_reproducible_for_equal_seeds() {
        let s = biased();
        let a: Vec<usize> = s.sample(123, 64).collect();
        let b: Vec<usize> = s.sample(123, 64).collect();
        let c: Vec<usize> = s.sample(124, 64).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn fair_coin_million_draws_within_four_sigma() {
        let n = 1_000_000usize;
        let bound = 4.0 * (0.25 / n as f64).sqrt();
        for seed in [1u64, 77, 4242] {
            let heads = coin().sample(seed, n).filter(|&i| i == 0).count();
            let freq = heads as f64 / n as f64;
            assert!(
                (freq - 0.5).abs() <= bound,
                "seed {seed}: freq {freq} off by more than {bound}"
            );
        }
    }

    #[test]
    fn empirical_frequencies_track_weights_per_atom() {
        let s = SampleSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            FiniteDistribution::new(vec![0.6, 0.1, 0.3]).unwrap(),
        )
        .unwrap();
        let n = 1_000_000usize;
        let mut counts = [0usize; 3];
        for i in s.sample(2024, n) {
            counts[i] += 1;
        }
        for (i, &p) in [0.6, 0.1, 0.3].iter().enumerate() {
            let bound = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
            let freq = counts[i] as f64 / n as f64;
            assert!((freq - p).abs() <= bound);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_space(max_atoms: usize) -> impl Strategy<Value = SampleSpace> {
            proptest::collection::vec(0.01f64..1.0, 2..=max_atoms).prop_map(|raw| {
                let sum: f64 = raw.iter().sum();
                let weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
                let atoms = (0..weights.len()).map(|i| format!("s{i}")).collect();
                SampleSpace::new(atoms, FiniteDistribution::new(weights).unwrap()).unwrap()
            })
        }

        fn arb_rv(name: &'static str, atoms: usize, values: usize) -> impl Strategy<Value = RandomVariable> {
            proptest::collection::vec(0..values, atoms).prop_map(move |assignment| {
                let codomain = (0..values).map(|v| format!("v{v}")).collect();
                RandomVariable::new(name, codomain, assignment).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            /// Push-forwards and conditionals stay normalized.
            #[test]
            fn derived_tables_stay_normalized(
                space in arb_space(6),
                seed in 0..u64::MAX,
            ) {
                let n = space.len();
                let mut rng = CounterRng::new(seed);
                let assign: Vec<usize> = (0..n).map(|_| rng.next_index(2)).collect();
                let rv = RandomVariable::new(
                    "X", vec!["v0".into(), "v1".into()], assign).unwrap();
                let t = push_forward(&space, &[&rv]).unwrap();
                prop_assert!((t.cells().iter().sum::<f64>() - 1.0).abs() <= tol::EXACT);
            }

            /// Summing a joint table over a variable equals pushing forward
            /// the remaining variables directly.
            #[test]
            fn marginal_consistency(
                space in arb_space(6),
                seed in 0..u64::MAX,
            ) {
                let n = space.len();
                let mut rng = CounterRng::new(seed);
                let vals = |k: usize| (0..k).map(|v| format!("v{v}")).collect::<Vec<_>>();
                let x = RandomVariable::new("X", vals(2), (0..n).map(|_| rng.next_index(2)).collect()).unwrap();
                let y = RandomVariable::new("Y", vals(3), (0..n).map(|_| rng.next_index(3)).collect()).unwrap();
                let joint = push_forward(&space, &[&x, &y]).unwrap();
                let via_sum = joint.marginal(&["Y"]).unwrap();
                let direct = push_forward(&space, &[&y]).unwrap();
                prop_assert!(via_sum.max_abs_diff(&direct) <= tol::EXACT);
            }

            /// Conditioning commutes with marginalizing when the event is on
            /// a disjoint variable.
            #[test]
            fn condition_then_marginalize_commutes(
                space in arb_space(8),
                seed in 0..u64::MAX,
            ) {
                let n = space.len();
                let mut rng = CounterRng::new(seed);
                let vals = |k: usize| (0..k).map(|v| format!("v{v}")).collect::<Vec<_>>();
                let x = RandomVariable::new("X", vals(2), (0..n).map(|_| rng.next_index(2)).collect()).unwrap();
                let y = RandomVariable::new("Y", vals(2), (0..n).map(|_| rng.next_index(2)).collect()).unwrap();
                let e = RandomVariable::new("E", vals(2), (0..n).map(|_| rng.next_index(2)).collect()).unwrap();
                let full = push_forward(&space, &[&x, &y, &e]).unwrap();
                if full.event_prob(&[("E", "v0")]).unwrap() > 0.0 {
                    let cond_then_marg = full.condition(&[("E", "v0")]).unwrap()
                        .marginal(&["X"]).unwrap();
                    let marg_then_cond = full.marginal(&["X", "E"]).unwrap()
                        .condition(&[("E", "v0")]).unwrap();
                    prop_assert!(cond_then_marg.max_abs_diff(&marg_then_cond) <= tol::EXACT);
                }
            }
        }
    }
}
