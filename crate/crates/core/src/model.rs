// SPDX-License-Identifier: Apache-2.0

//! Quantum models `p(x) = alpha * <O> + beta`.
//!
//! The observable is the projector onto the all-zeros string (ancilla
//! included), evaluated on the full un-post-selected state, so the Hartley
//! branch factor N(x)^2 / 2 is absorbed into the trainable scale `alpha`
//! and evaluation stays smooth in x.
//!
//! Differentiation in the feature variable uses the parameter-shift rule
//! over the factorization of the x-dependent diagonal block: per register
//! qubit l the pair of phase gates equals RZ_a(-phi_l) RZZ_{a,l}(phi_l)
//! with phi_l = 2 pi x / 2^l, so together with the ancilla RZ(2 pi x) there
//! are 2N + 1 shiftable rotations, i.e. 4N + 2 shifted evaluations per
//! gradient.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, Circuit, GateKind, Placement};
use crate::circuits::{
    build_correlation_circuit, build_hartley_feature_map, build_hea, build_hera,
    build_phase_feature_map, hea_param_count, hera_param_count, RotationScheme,
};
use crate::statevector::StateVector;
use crate::{Error, Real, Result, RNG_ALGORITHM};

/// Which family of feature map the model encodes through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    Hartley,
    Fourier,
    BivariateHartley,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Hartley => "hartley",
            FeatureKind::Fourier => "fourier",
            FeatureKind::BivariateHartley => "bivariate-hartley",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "hartley" => FeatureKind::Hartley,
            "fourier" => FeatureKind::Fourier,
            "bivariate-hartley" => FeatureKind::BivariateHartley,
            other => {
                return Err(Error::FeatureKindMismatch {
                    expected: "hartley | fourier | bivariate-hartley".into(),
                    got: other.into(),
                })
            }
        })
    }

    pub fn arity(self) -> usize {
        match self {
            FeatureKind::BivariateHartley => 2,
            _ => 1,
        }
    }
}

/// Variational ansatz choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnsatzKind {
    Hera,
    Hea(RotationScheme),
}

/// Ansatz descriptor: family plus depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub depth: usize,
}

impl AnsatzSpec {
    pub fn hera(depth: usize) -> Self {
        AnsatzSpec {
            kind: AnsatzKind::Hera,
            depth,
        }
    }

    pub fn hea(scheme: RotationScheme, depth: usize) -> Self {
        AnsatzSpec {
            kind: AnsatzKind::Hea(scheme),
            depth,
        }
    }

    pub fn param_count(&self, n: usize) -> usize {
        match self.kind {
            AnsatzKind::Hera => hera_param_count(n, self.depth),
            AnsatzKind::Hea(s) => hea_param_count(n, self.depth, s),
        }
    }

    pub fn build<T: Real>(&self, n: usize) -> Result<Circuit<T>> {
        match self.kind {
            AnsatzKind::Hera => build_hera(n, self.depth),
            AnsatzKind::Hea(s) => build_hea(n, self.depth, s),
        }
    }
}

/// Differentiation route for the feature variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffMethod {
    ShiftRule,
    CentralDifference,
}

impl DiffMethod {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "shift-rule" => DiffMethod::ShiftRule,
            "central-difference" => DiffMethod::CentralDifference,
            other => return Err(Error::UnknownMethod(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            DiffMethod::ShiftRule => "shift-rule",
            DiffMethod::CentralDifference => "central-difference",
        }
    }
}

/// Step used by the central-difference first derivative.
pub const CENTRAL_DIFF_STEP: f64 = 1e-4;
/// Step used by the central second difference.
pub const SECOND_DIFF_STEP: f64 = 1e-3;

/// A trainable quantum model.
#[derive(Clone, Debug)]
pub struct QuantumModel<T: Real> {
    feature_kind: FeatureKind,
    n: usize,
    ansatz: AnsatzSpec,
    theta: Vec<T>,
    alpha: T,
    beta: T,
    feature_circuit: Circuit<T>,
    post_circuit: Circuit<T>,
    post_adjoint: Circuit<T>,
    total_qubits: usize,
}

impl<T: Real> QuantumModel<T> {
    /// Builds a model with all trainable angles at zero, `alpha = 1`,
    /// `beta = 0`.
    pub fn new(feature_kind: FeatureKind, n: usize, ansatz: AnsatzSpec) -> Result<Self> {
        let (feature_circuit, post, total_qubits) = match feature_kind {
            FeatureKind::Hartley => {
                let feature = build_hartley_feature_map::<T>(n)?;
                let mut post = Circuit::new(n + 1);
                let v = ansatz.build::<T>(n)?;
                let register: Vec<usize> = (1..=n).collect();
                post.append_mapped(&v, &register, 0, &[])?;
                (feature, post, n + 1)
            }
            FeatureKind::Fourier => {
                let feature = build_phase_feature_map::<T>(n)?;
                let post = ansatz.build::<T>(n)?;
                (feature, post, n)
            }
            FeatureKind::BivariateHartley => {
                let total = 2 * n + 2;
                let mut feature = Circuit::new(total);
                let map = build_hartley_feature_map::<T>(n)?;
                let reg_x: Vec<usize> = (0..=n).collect();
                let reg_y: Vec<usize> = (n + 1..=2 * n + 1).collect();
                feature.append_mapped(&map, &reg_x, 0, &[0])?;
                feature.append_mapped(&map, &reg_y, 0, &[1])?;

                let p_ansatz = ansatz.param_count(n);
                let mut post = Circuit::new(total);
                let corr = build_correlation_circuit::<T>(n)?;
                let all: Vec<usize> = (0..total).collect();
                post.append_mapped(&corr, &all, 2 * p_ansatz, &[])?;
                let v = ansatz.build::<T>(n)?;
                let rx: Vec<usize> = (1..=n).collect();
                let ry: Vec<usize> = (n + 2..=2 * n + 1).collect();
                post.append_mapped(&v, &rx, 0, &[])?;
                post.append_mapped(&v, &ry, p_ansatz, &[])?;
                (feature, post, total)
            }
        };
        let theta = vec![T::zero(); post.param_count()];
        Ok(QuantumModel {
            feature_kind,
            n,
            ansatz,
            theta,
            alpha: T::one(),
            beta: T::zero(),
            post_adjoint: post.adjoint(),
            post_circuit: post,
            feature_circuit,
            total_qubits,
        })
    }

    pub fn feature_kind(&self) -> FeatureKind {
        self.feature_kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ansatz(&self) -> AnsatzSpec {
        self.ansatz
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn param_count(&self) -> usize {
        self.theta.len()
    }

    /// Trainable slots contributed by one register ansatz.
    pub fn ansatz_param_count(&self) -> usize {
        self.ansatz.param_count(self.n)
    }

    /// The circuit applied after the feature map (ansatz, and for
    /// bivariate models the correlation circuit followed by both ansätze).
    pub fn post_circuit(&self) -> &Circuit<T> {
        &self.post_circuit
    }

    pub fn set_params(&mut self, theta: Vec<T>, alpha: T, beta: T) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::ParameterCountMismatch {
                expected: self.param_count(),
                got: theta.len(),
            });
        }
        self.theta = theta;
        self.alpha = alpha;
        self.beta = beta;
        Ok(())
    }

    pub fn with_params(mut self, theta: Vec<T>, alpha: T, beta: T) -> Result<Self> {
        self.set_params(theta, alpha, beta)?;
        Ok(self)
    }

    /// Upper edge of the open feature domain [0, 2^n).
    pub fn domain_upper(&self) -> T {
        T::of_usize(1 << self.n)
    }

    fn check_domain(&self, features: &[T]) -> Result<()> {
        if features.len() != self.feature_kind.arity() {
            return Err(Error::UnboundFeature(features.len()));
        }
        let upper = self.domain_upper();
        for &x in features {
            if x < T::zero() || x >= upper {
                return Err(Error::DomainViolation {
                    value: x.as_f64(),
                    upper: upper.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// The feature-map output state for the given inputs (no ansatz).
    pub fn feature_state(&self, features: &[T]) -> Result<StateVector<T>> {
        self.feature_circuit.run_on_zero(features, &[])
    }

    /// The all-zeros projector row pulled back through the ansatz side:
    /// w = A(theta)^dag |0...0>, so that <O> = |<w|s(x)>|^2.
    pub fn projector_row(&self, theta: &[T]) -> Result<StateVector<T>> {
        self.post_adjoint.run_on_zero(&[], theta)
    }

    /// <O> from a cached projector row and feature state.
    pub fn observable_from(row: &StateVector<T>, state: &StateVector<T>) -> T {
        let mut ip = Complex::new(T::zero(), T::zero());
        for (w, s) in row.amplitudes().iter().zip(state.amplitudes()) {
            ip += w.conj() * *s;
        }
        ip.norm_sqr()
    }

    /// Projector expectation <O> at the given features.
    pub fn observable(&self, features: &[T]) -> Result<T> {
        let row = self.projector_row(&self.theta)?;
        let state = self.feature_state(features)?;
        Ok(Self::observable_from(&row, &state))
    }

    /// Model value `alpha <O> + beta`, rejecting features outside the
    /// domain (the feature map is periodic; silent wraparound hides bugs).
    pub fn evaluate(&self, features: &[T]) -> Result<T> {
        self.check_domain(features)?;
        self.evaluate_unchecked(features)
    }

    /// Model value without the domain guard; used by periodicity checks and
    /// by difference quotients near the domain edge.
    pub fn evaluate_unchecked(&self, features: &[T]) -> Result<T> {
        Ok(self.alpha * self.observable(features)? + self.beta)
    }

    fn univariate(&self) -> Result<()> {
        if self.feature_kind == FeatureKind::BivariateHartley {
            return Err(Error::FeatureKindMismatch {
                expected: "hartley | fourier".into(),
                got: self.feature_kind.name().into(),
            });
        }
        Ok(())
    }

    /// The shiftable x-dependent rotations with their d(angle)/dx factors.
    fn x_shift_gates(&self) -> Vec<ShiftGate<T>> {
        let two_pi = T::of(2.0) * T::PI();
        let mut gates = Vec::new();
        match self.feature_kind {
            FeatureKind::Hartley => {
                for l in 1..=self.n {
                    let phi_rate = two_pi / T::of_usize(1 << l);
                    gates.push(ShiftGate::AncillaRz { chain: -phi_rate });
                    gates.push(ShiftGate::RegisterZz {
                        qubit: l,
                        chain: phi_rate,
                    });
                }
                gates.push(ShiftGate::AncillaRz { chain: two_pi });
            }
            FeatureKind::Fourier => {
                for l in 1..=self.n {
                    gates.push(ShiftGate::RegisterRz {
                        qubit: l - 1,
                        chain: two_pi / T::of_usize(1 << l),
                    });
                }
            }
            FeatureKind::BivariateHartley => {}
        }
        gates
    }

    /// <O>(x) with extra shift rotations inserted into the diagonal block
    /// of the feature map. `shifts` pairs a gate index with a shift angle.
    fn observable_shifted(
        &self,
        row: &StateVector<T>,
        x: T,
        gates: &[ShiftGate<T>],
        shifts: &[(usize, T)],
    ) -> Result<T> {
        // insertion point: inside the trailing diagonal block, i.e. just
        // before the closing ancilla Hadamard for the Hartley map, at the
        // end for the phase map
        let pos = match self.feature_kind {
            FeatureKind::Hartley => self.feature_circuit.len() - 1,
            _ => self.feature_circuit.len(),
        };
        let mut inserted: Vec<Placement<T>> = Vec::new();
        for &(gi, angle) in shifts {
            gates[gi].emit(angle, &mut inserted);
        }
        let placements = splice(self.feature_circuit.placements(), pos, &inserted);
        let circuit = rebuild(self.total_qubits, placements);
        let mut state = StateVector::zero(self.total_qubits)?;
        circuit.apply_to(&mut state, &[x], &[])?;
        Ok(QuantumModel::observable_from(row, &state))
    }

    /// d evaluate / dx. The shift-rule path agrees with the analytic
    /// derivative to machine precision; the central-difference path uses
    /// step 1e-4.
    pub fn grad_x(&self, x: T, method: DiffMethod) -> Result<T> {
        Ok(self.grad_x_detailed(x, method)?.0)
    }

    /// Like [`QuantumModel::grad_x`] but also reports how many shifted
    /// circuit evaluations were spent (4N + 2 for the Hartley map).
    pub fn grad_x_detailed(&self, x: T, method: DiffMethod) -> Result<(T, usize)> {
        self.univariate()?;
        match method {
            DiffMethod::CentralDifference => {
                let h = T::of(CENTRAL_DIFF_STEP);
                let plus = self.evaluate_unchecked(&[x + h])?;
                let minus = self.evaluate_unchecked(&[x - h])?;
                Ok(((plus - minus) / (T::of(2.0) * h), 2))
            }
            DiffMethod::ShiftRule => {
                let gates = self.x_shift_gates();
                let row = self.projector_row(&self.theta)?;
                let half = T::FRAC_PI_2();
                let mut total = T::zero();
                let mut evals = 0;
                for (gi, g) in gates.iter().enumerate() {
                    let plus = self.observable_shifted(&row, x, &gates, &[(gi, half)])?;
                    let minus = self.observable_shifted(&row, x, &gates, &[(gi, -half)])?;
                    evals += 2;
                    total += g.chain() * (plus - minus) / T::of(2.0);
                }
                Ok((self.alpha * total, evals))
            }
        }
    }

    /// d^2 evaluate / dx^2 via iterated parameter shifts (or a central
    /// second difference with step 1e-3).
    pub fn second_derivative_x(&self, x: T, method: DiffMethod) -> Result<T> {
        self.univariate()?;
        match method {
            DiffMethod::CentralDifference => {
                let h = T::of(SECOND_DIFF_STEP);
                let plus = self.evaluate_unchecked(&[x + h])?;
                let mid = self.evaluate_unchecked(&[x])?;
                let minus = self.evaluate_unchecked(&[x - h])?;
                Ok((plus - T::of(2.0) * mid + minus) / (h * h))
            }
            DiffMethod::ShiftRule => {
                let gates = self.x_shift_gates();
                let row = self.projector_row(&self.theta)?;
                let half = T::FRAC_PI_2();
                let pi = T::PI();
                let base = self.observable_shifted(&row, x, &gates, &[])?;
                let mut total = T::zero();
                for (i, gi) in gates.iter().enumerate() {
                    // rotations satisfy f(theta + pi) = f(theta - pi), so the
                    // diagonal second derivative needs one extra evaluation
                    let fp = self.observable_shifted(&row, x, &gates, &[(i, pi)])?;
                    total += gi.chain() * gi.chain() * (fp - base) / T::of(2.0);
                    for (j, gj) in gates.iter().enumerate().skip(i + 1) {
                        let pp =
                            self.observable_shifted(&row, x, &gates, &[(i, half), (j, half)])?;
                        let pm =
                            self.observable_shifted(&row, x, &gates, &[(i, half), (j, -half)])?;
                        let mp =
                            self.observable_shifted(&row, x, &gates, &[(i, -half), (j, half)])?;
                        let mm =
                            self.observable_shifted(&row, x, &gates, &[(i, -half), (j, -half)])?;
                        let mixed = (pp - pm - mp + mm) / T::of(4.0);
                        total += T::of(2.0) * gi.chain() * gj.chain() * mixed;
                    }
                }
                Ok(self.alpha * total)
            }
        }
    }

    /// Gradient of `evaluate` with respect to every trainable angle via the
    /// two-point rotation shift rule.
    pub fn grad_theta(&self, features: &[T]) -> Result<Vec<T>> {
        let state = self.feature_state(features)?;
        self.grad_theta_from_state(&state)
    }

    /// Same as [`QuantumModel::grad_theta`] against a cached feature state.
    pub fn grad_theta_from_state(&self, state: &StateVector<T>) -> Result<Vec<T>> {
        let half = T::FRAC_PI_2();
        let mut grads = Vec::with_capacity(self.param_count());
        let mut shifted = self.theta.clone();
        for i in 0..self.param_count() {
            let original = shifted[i];
            shifted[i] = original + half;
            let plus = QuantumModel::observable_from(&self.projector_row(&shifted)?, state);
            shifted[i] = original - half;
            let minus = QuantumModel::observable_from(&self.projector_row(&shifted)?, state);
            shifted[i] = original;
            grads.push(self.alpha * (plus - minus) / T::of(2.0));
        }
        Ok(grads)
    }

    /// d evaluate / d alpha, equal to the observable itself.
    pub fn grad_alpha(&self, features: &[T]) -> Result<T> {
        self.observable(features)
    }

    /// d evaluate / d beta = 1.
    pub fn grad_beta(&self) -> T {
        T::one()
    }
}

/// One shiftable rotation in the x-dependent diagonal block.
#[derive(Clone, Copy, Debug)]
enum ShiftGate<T: Real> {
    AncillaRz { chain: T },
    RegisterZz { qubit: usize, chain: T },
    RegisterRz { qubit: usize, chain: T },
}

impl<T: Real> ShiftGate<T> {
    fn chain(&self) -> T {
        match *self {
            ShiftGate::AncillaRz { chain }
            | ShiftGate::RegisterZz { chain, .. }
            | ShiftGate::RegisterRz { chain, .. } => chain,
        }
    }

    fn emit(&self, angle: T, out: &mut Vec<Placement<T>>) {
        let rz = |q: usize, a: T| Placement::Gate {
            kind: GateKind::Rz,
            angle: Angle::Constant(a),
            target: q,
            controls: vec![],
        };
        match *self {
            ShiftGate::AncillaRz { .. } => out.push(rz(0, angle)),
            ShiftGate::RegisterRz { qubit, .. } => out.push(rz(qubit, angle)),
            ShiftGate::RegisterZz { qubit, .. } => {
                // RZZ(theta) = CNOT (RZ_target theta) CNOT
                let cnot = Placement::Gate {
                    kind: GateKind::Cnot,
                    angle: Angle::Constant(T::zero()),
                    target: qubit,
                    controls: vec![(0, true)],
                };
                out.push(cnot.clone());
                out.push(rz(qubit, angle));
                out.push(cnot);
            }
        }
    }
}

fn splice<T: Real>(
    placements: &[Placement<T>],
    pos: usize,
    inserted: &[Placement<T>],
) -> Vec<Placement<T>> {
    let mut out = Vec::with_capacity(placements.len() + inserted.len());
    out.extend_from_slice(&placements[..pos]);
    out.extend_from_slice(inserted);
    out.extend_from_slice(&placements[pos..]);
    out
}

fn rebuild<T: Real>(n: usize, placements: Vec<Placement<T>>) -> Circuit<T> {
    let mut c = Circuit::new(n);
    for p in placements {
        match p {
            Placement::Gate {
                kind,
                angle,
                target,
                controls,
            } => {
                c.gate(kind, angle, target, &controls)
                    .expect("valid placement");
            }
            Placement::Permutation {
                kind,
                qubits,
                controls,
            } => {
                c.permutation(kind, &qubits, &controls)
                    .expect("valid placement");
            }
        }
    }
    c
}

// --- model file -----------------------------------------------------------

/// On-disk JSON form of a trained model; the artifact handed from training
/// to sampling.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub feature_kind: String,
    pub n: usize,
    pub ansatz: AnsatzFile,
    pub theta: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub seed_lineage: SeedLineage,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub training: Option<TrainingMeta>,
    /// Resolved run configuration the model was trained from, embedded so
    /// the training run can be reproduced from this file alone.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnsatzFile {
    pub kind: String,
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scheme: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeedLineage {
    pub rng: String,
    pub init_seed: u64,
    pub train_seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrainingMeta {
    pub final_loss: f64,
    pub epochs_run: usize,
}

pub const MODEL_FORMAT: &str = "qhartley-model-v1";

impl ModelFile {
    pub fn from_model<T: Real>(
        model: &QuantumModel<T>,
        seeds: SeedLineage,
        training: Option<TrainingMeta>,
    ) -> Self {
        let (kind, scheme) = match model.ansatz.kind {
            AnsatzKind::Hera => ("hera".to_string(), None),
            AnsatzKind::Hea(s) => ("hea".to_string(), Some(s.name().to_string())),
        };
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            feature_kind: model.feature_kind.name().to_string(),
            n: model.n,
            ansatz: AnsatzFile {
                kind,
                depth: model.ansatz.depth,
                scheme,
            },
            theta: model.theta.iter().map(|t| t.as_f64()).collect(),
            alpha: model.alpha.as_f64(),
            beta: model.beta.as_f64(),
            seed_lineage: seeds,
            training,
            config: None,
        }
    }

    pub fn to_model<T: Real>(&self) -> Result<QuantumModel<T>> {
        if self.format != MODEL_FORMAT {
            return Err(Error::ModelFile(format!(
                "unsupported format `{}`",
                self.format
            )));
        }
        let kind = FeatureKind::parse(&self.feature_kind)?;
        let ansatz = match self.ansatz.kind.as_str() {
            "hera" => AnsatzSpec::hera(self.ansatz.depth),
            "hea" => {
                let scheme = self
                    .ansatz
                    .scheme
                    .as_deref()
                    .ok_or_else(|| Error::ModelFile("hea ansatz needs a scheme".into()))?;
                AnsatzSpec::hea(RotationScheme::parse(scheme)?, self.ansatz.depth)
            }
            other => return Err(Error::ModelFile(format!("unknown ansatz `{other}`"))),
        };
        let model = QuantumModel::new(kind, self.n, ansatz)?;
        model.with_params(
            self.theta.iter().map(|&t| T::of(t)).collect(),
            T::of(self.alpha),
            T::of(self.beta),
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))
    }
}

impl SeedLineage {
    pub fn new(init_seed: u64, train_seed: u64) -> Self {
        SeedLineage {
            rng: RNG_ALGORITHM.to_string(),
            init_seed,
            train_seed,
        }
    }
}
