//! Linear network effects model and its optimality criteria.
//!
//! The response of unit `i` is
//! `mu + tau[t(i)] + sum_k A[i][k] * gamma[t(k)] + error`, with the last free
//! treatment's direct effect pinned to zero. Block nodes enter the sum with
//! their fixed pseudo-treatments, so block effects appear as extra `gamma`
//! columns. Errors are i.i.d. with unit variance; criterion values are in
//! units of `sigma^2`.
//!
//! Columns of the model matrix `F`, in order:
//!
//! | columns                | meaning                                       |
//! |------------------------|-----------------------------------------------|
//! | `0`                    | intercept                                     |
//! | `1 ..= m - 1`          | direct-effect indicators `u_1 .. u_{m-1}`     |
//! | `m .. m + total - 1`   | network sums `A u_j`, `j = 1 ..= total`       |
//!
//! Information matrices are integral, so criteria are computed exactly and
//! rounded once; an eigendecomposition generalized inverse
//! ([`evaluate_spectral`]) is available as an independent route. A design
//! that fails the spec's [`Validity`] rule evaluates to
//! [`CriterionValue::Invalid`].

mod exact;
mod spectral;

pub use spectral::{evaluate_spectral, ESTIMABILITY_TOLERANCE, RANK_TOLERANCE};

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::network::{Network, NodeRole};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("need at least 2 treatments, got {0}")]
    TooFewTreatments(usize),
    #[error("too many treatments ({0}); at most 255 are supported")]
    TooManyTreatments(usize),
    #[error("network has no design nodes")]
    NoDesignNodes,
    #[error("block pseudo-treatments must be {expected:?} for m={m}, found {found:?}")]
    FixedTreatments {
        m: usize,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("design has {actual} entries but the network has {expected} design nodes")]
    DesignLength { expected: usize, actual: usize },
    #[error("treatment {treatment} at position {position} is outside 1..={m}")]
    TreatmentRange {
        position: usize,
        treatment: usize,
        m: usize,
    },
    #[error("information matrix is not positive semidefinite or failed to decompose")]
    Decomposition,
    #[error("model matrix is empty")]
    EmptyModelMatrix,
}

/// Treatment assignment to the design nodes of a network, in design-node
/// order. Stored 0-based; displayed and serialized 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Design(Vec<u8>);

impl Design {
    /// Builds a design from 0-based treatment indices.
    pub fn new(treatments: Vec<u8>) -> Self {
        Design(treatments)
    }

    pub fn from_one_based(treatments: &[usize]) -> Option<Self> {
        treatments
            .iter()
            .map(|&t| t.checked_sub(1).and_then(|t| u8::try_from(t).ok()))
            .collect::<Option<Vec<u8>>>()
            .map(Design)
    }

    /// Parses letters (`"ABB"`) as treatments 1, 2, 2.
    pub fn from_letters(text: &str) -> Option<Self> {
        text.bytes()
            .map(|b| b.is_ascii_uppercase().then(|| b - b'A'))
            .collect::<Option<Vec<u8>>>()
            .map(Design)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&t| t as usize + 1).collect()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// Checks length and range against a network and treatment count.
    pub fn validate(&self, net: &Network, m: usize) -> Result<(), ModelError> {
        if self.0.len() != net.design_count() {
            return Err(ModelError::DesignLength {
                expected: net.design_count(),
                actual: self.0.len(),
            });
        }
        if let Some((position, &t)) = self.0.iter().enumerate().find(|(_, &t)| t as usize >= m) {
            return Err(ModelError::TreatmentRange {
                position: position + 1,
                treatment: t as usize + 1,
                m,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&t| t < 26) {
            for &t in &self.0 {
                write!(f, "{}", (b'A' + t) as char)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.to_one_based().iter().map(usize::to_string).collect();
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl Serialize for Design {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Design {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(deserializer)?;
        Design::from_one_based(&raw).ok_or_else(|| serde::de::Error::custom("treatments are 1-based and at most 256"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// Average variance of all pairwise treatment differences.
    As,
    /// Determinant of the covariance of the treatment contrasts.
    Ds,
}

/// When a design counts as valid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    /// Every pairwise direct-effect contrast is estimable.
    Estimable,
    /// Direct-effect contrasts and the network-effect contrasts among free
    /// treatments are all estimable. Same as `Estimable` on networks where no
    /// design node has a design-node neighbour, since free network effects
    /// then never reach a response.
    #[default]
    NetworkContrasts,
    /// The whole information matrix is nonsingular.
    FullRank,
}

/// Model settings for one network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    m: usize,
    total_treatments: usize,
    criterion: Criterion,
    validity: Validity,
    free_network_effects: bool,
}

impl ModelSpec {
    /// Checks that the network's block nodes fix pseudo-treatments
    /// `m + 1, m + 2, ...` in block-node order.
    pub fn new(net: &Network, m: usize, criterion: Criterion) -> Result<Self, ModelError> {
        if m < 2 {
            return Err(ModelError::TooFewTreatments(m));
        }
        if net.design_count() == 0 {
            return Err(ModelError::NoDesignNodes);
        }
        let found = net.fixed_treatments();
        let expected: Vec<usize> = (m + 1..=m + found.len()).collect();
        if found != expected {
            return Err(ModelError::FixedTreatments { m, expected, found });
        }
        let total_treatments = m + found.len();
        if total_treatments > 256 {
            return Err(ModelError::TooManyTreatments(total_treatments));
        }
        Ok(ModelSpec {
            m,
            total_treatments,
            criterion,
            validity: Validity::default(),
            free_network_effects: net
                .design_nodes()
                .iter()
                .any(|&i| net.in_neighbors(i).any(|k| net.is_measurable(k))),
        })
    }

    pub fn with_validity(mut self, validity: Validity) -> Self {
        self.validity = validity;
        self
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    /// The rule actually applied on this network.
    pub fn effective_validity(&self) -> Validity {
        match self.validity {
            Validity::NetworkContrasts if !self.free_network_effects => Validity::Estimable,
            v => v,
        }
    }

    pub fn treatments(&self) -> usize {
        self.m
    }

    pub fn total_treatments(&self) -> usize {
        self.total_treatments
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    /// Column count of the model matrix.
    pub fn parameter_count(&self) -> usize {
        self.m + self.total_treatments
    }

    fn tau_column(&self, treatment: usize) -> Option<usize> {
        (treatment + 1 < self.m).then_some(1 + treatment)
    }

    fn gamma_column(&self, treatment: usize) -> usize {
        self.m + treatment
    }
}

/// Criterion value; `Invalid` marks a design whose contrasts are not all
/// estimable and ranks below every valid value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CriterionValue {
    Valid(f64),
    Invalid,
}

impl CriterionValue {
    pub fn value(self) -> Option<f64> {
        match self {
            CriterionValue::Valid(v) => Some(v),
            CriterionValue::Invalid => None,
        }
    }

    pub fn is_valid(self) -> bool {
        matches!(self, CriterionValue::Valid(_))
    }

    /// Strictly better (smaller valid value; anything valid beats invalid).
    pub fn better_than(self, other: CriterionValue) -> bool {
        match (self, other) {
            (CriterionValue::Valid(a), CriterionValue::Valid(b)) => a < b,
            (CriterionValue::Valid(_), CriterionValue::Invalid) => true,
            (CriterionValue::Invalid, _) => false,
        }
    }
}

/// Symmetric `F^T F`.
#[derive(Clone, Debug, PartialEq)]
pub struct InformationMatrix(DMatrix<f64>);

impl InformationMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

fn treatment_of(net: &Network, x: &Design, node: usize) -> usize {
    match net.role(node) {
        NodeRole::Design => x.as_slice()[net.design_ordinal(node).expect("design node")] as usize,
        NodeRole::Block { fixed_treatment, .. } => fixed_treatment - 1,
    }
}

/// Dense model matrix, one row per measurable node.
pub fn build_model_matrix(net: &Network, x: &Design, spec: &ModelSpec) -> Result<DMatrix<f64>, ModelError> {
    x.validate(net, spec.m)?;
    let rows = net.design_count();
    let p = spec.parameter_count();
    let mut f = DMatrix::zeros(rows, p);
    for (r, &node) in net.design_nodes().iter().enumerate() {
        f[(r, 0)] = 1.0;
        if let Some(col) = spec.tau_column(treatment_of(net, x, node)) {
            f[(r, col)] = 1.0;
        }
        for k in net.in_neighbors(node) {
            f[(r, spec.gamma_column(treatment_of(net, x, k)))] += 1.0;
        }
    }
    Ok(f)
}

pub fn information_matrix(f: &DMatrix<f64>) -> Result<InformationMatrix, ModelError> {
    if f.nrows() == 0 || f.ncols() == 0 {
        return Err(ModelError::EmptyModelMatrix);
    }
    Ok(InformationMatrix(f.transpose() * f))
}

/// Evaluates the configured criterion. Lower is better.
///
/// Integer-valued matrices (every matrix built by this module) are reduced
/// exactly; anything else goes through the spectral generalized inverse.
pub fn evaluate_criterion(info: &InformationMatrix, spec: &ModelSpec) -> Result<CriterionValue, ModelError> {
    let p = info.dim();
    if p != spec.parameter_count() {
        return Err(ModelError::EmptyModelMatrix);
    }
    const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;
    let integral: Option<Vec<i64>> = info
        .0
        .transpose()
        .iter()
        .map(|&v| (v.fract() == 0.0 && v.abs() < EXACT_LIMIT).then_some(v as i64))
        .collect();
    match integral {
        Some(entries) => exact::evaluate_exact(&entries, p, spec.m, spec.criterion, spec.effective_validity()),
        None => spectral::evaluate_spectral(info, spec),
    }
}

/// Criterion value of design `x` on `net`.
pub fn criterion_for_design(net: &Network, x: &Design, spec: &ModelSpec) -> Result<CriterionValue, ModelError> {
    let f = build_model_matrix(net, x, spec)?;
    evaluate_criterion(&information_matrix(&f)?, spec)
}

#[derive(Clone, Copy, Debug)]
enum Source {
    Free(usize),
    Fixed(usize),
}

/// Precomputed evaluator for repeated criterion calls on one network.
///
/// Accumulates `F^T F` row by row in integer arithmetic, so the information
/// matrix is bit-identical to the dense route and to any row permutation of
/// `F`.
#[derive(Clone, Debug)]
pub struct Evaluator {
    spec: ModelSpec,
    neighbors: Vec<Vec<Source>>,
}

impl Evaluator {
    pub fn new(net: &Network, spec: &ModelSpec) -> Self {
        let neighbors = net
            .design_nodes()
            .iter()
            .map(|&node| {
                net.in_neighbors(node)
                    .map(|k| match net.role(k) {
                        NodeRole::Design => Source::Free(net.design_ordinal(k).expect("design node")),
                        NodeRole::Block { fixed_treatment, .. } => Source::Fixed(fixed_treatment - 1),
                    })
                    .collect()
            })
            .collect();
        Evaluator {
            spec: spec.clone(),
            neighbors,
        }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn design_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Row-major integer `F^T F` for `x`; `x` must already be valid.
    fn accumulate(&self, x: &[u8]) -> Vec<i64> {
        let p = self.spec.parameter_count();
        let mut acc = vec![0i64; p * p];
        let mut row = vec![0i64; p];
        let mut touched = Vec::with_capacity(p);
        for (r, sources) in self.neighbors.iter().enumerate() {
            touched.clear();
            row[0] = 1;
            touched.push(0);
            if let Some(col) = self.spec.tau_column(x[r] as usize) {
                row[col] = 1;
                touched.push(col);
            }
            for src in sources {
                let t = match *src {
                    Source::Free(ord) => x[ord] as usize,
                    Source::Fixed(t) => t,
                };
                let col = self.spec.gamma_column(t);
                if row[col] == 0 {
                    touched.push(col);
                }
                row[col] += 1;
            }
            for &a in &touched {
                for &b in &touched {
                    acc[a * p + b] += row[a] * row[b];
                }
            }
            for &a in &touched {
                row[a] = 0;
            }
        }
        acc
    }

    /// Information matrix for `x`; `x` must already be valid.
    pub fn information(&self, x: &[u8]) -> InformationMatrix {
        let p = self.spec.parameter_count();
        let acc = self.accumulate(x);
        InformationMatrix(DMatrix::from_row_iterator(p, p, acc.into_iter().map(|v| v as f64)))
    }

    pub fn evaluate(&self, x: &[u8]) -> Result<CriterionValue, ModelError> {
        let spec = &self.spec;
        exact::evaluate_exact(
            &self.accumulate(x),
            spec.parameter_count(),
            spec.m,
            spec.criterion,
            spec.effective_validity(),
        )
    }
}
