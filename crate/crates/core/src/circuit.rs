// SPDX-License-Identifier: Apache-2.0

//! Parameterized circuit values.
//!
//! A [`Circuit`] is an ordered sequence of placements whose angles are either
//! constants, closed-form linear functions of a feature variable, or indices
//! into a trainable parameter vector. Keeping the angle expressions symbolic
//! lets the same circuit value serve plain evaluation, shift-rule
//! differentiation and dense unitary extraction.

use num_complex::Complex;

use crate::circuits::gates;
use crate::dense::DenseMat;
use crate::statevector::StateVector;
use crate::{Error, Real, Result, MAX_DENSE_QUBITS};

/// Gate alphabet. `Cnot` and `Cz` carry their control in the placement's
/// control set like any other controlled gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    X,
    Cnot,
    Cz,
    /// P(phi) = diag{1, e^{i phi}}
    P,
    /// RZ(phi) = diag{e^{-i phi/2}, e^{i phi/2}}
    Rz,
    Ry,
    Rx,
    /// Adjoint square root of X, equal to RZ(pi/2) P(-pi/2) RX(-pi/2).
    SqrtXDagger,
}

impl GateKind {
    fn token(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::P => "P",
            GateKind::Rz => "RZ",
            GateKind::Ry => "RY",
            GateKind::Rx => "RX",
            GateKind::SqrtXDagger => "SXDG",
        }
    }

    fn parametric(self) -> bool {
        matches!(self, GateKind::P | GateKind::Rz | GateKind::Ry | GateKind::Rx)
    }
}

/// Angle expression attached to a placement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle<T: Real> {
    /// Fixed angle.
    Constant(T),
    /// `scale * features[var]`.
    Feature { var: usize, scale: T },
    /// `scale * params[index]`; builders emit `scale = 1`, adjoints flip it.
    Trainable { index: usize, scale: T },
}

impl<T: Real> Angle<T> {
    pub fn feature(var: usize, scale: T) -> Self {
        Angle::Feature { var, scale }
    }

    pub fn trainable(index: usize) -> Self {
        Angle::Trainable {
            index,
            scale: T::one(),
        }
    }

    fn negated(self) -> Self {
        match self {
            Angle::Constant(c) => Angle::Constant(-c),
            Angle::Feature { var, scale } => Angle::Feature { var, scale: -scale },
            Angle::Trainable { index, scale } => Angle::Trainable {
                index,
                scale: -scale,
            },
        }
    }

    fn resolve(&self, features: &[T], params: &[T]) -> Result<T> {
        match *self {
            Angle::Constant(c) => Ok(c),
            Angle::Feature { var, scale } => features
                .get(var)
                .map(|&x| scale * x)
                .ok_or(Error::UnboundFeature(var)),
            Angle::Trainable { index, scale } => params
                .get(index)
                .map(|&p| scale * p)
                .ok_or(Error::ParameterCountMismatch {
                    expected: index + 1,
                    got: params.len(),
                }),
        }
    }
}

/// Basis permutations used by the controlled reflection block and its
/// gate-level decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermKind {
    /// v -> (2^k - v) mod 2^k
    Reflection,
    /// v -> (v + 1) mod 2^k
    Increment,
    /// v -> (v - 1) mod 2^k
    Decrement,
}

impl PermKind {
    fn token(self) -> &'static str {
        match self {
            PermKind::Reflection => "reflect",
            PermKind::Increment => "incr",
            PermKind::Decrement => "decr",
        }
    }

    /// The permutation table over `k` qubits.
    pub fn table(self, k: usize) -> Vec<usize> {
        let dim = 1usize << k;
        (0..dim)
            .map(|v| match self {
                PermKind::Reflection => (dim - v) % dim,
                PermKind::Increment => (v + 1) % dim,
                PermKind::Decrement => (v + dim - 1) % dim,
            })
            .collect()
    }

    fn adjoint(self) -> Self {
        match self {
            PermKind::Reflection => PermKind::Reflection,
            PermKind::Increment => PermKind::Decrement,
            PermKind::Decrement => PermKind::Increment,
        }
    }
}

/// One circuit element.
#[derive(Clone, Debug, PartialEq)]
pub enum Placement<T: Real> {
    Gate {
        kind: GateKind,
        angle: Angle<T>,
        target: usize,
        controls: Vec<(usize, bool)>,
    },
    Permutation {
        kind: PermKind,
        qubits: Vec<usize>,
        controls: Vec<(usize, bool)>,
    },
}

/// Ordered gate placements over a fixed number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T: Real> {
    n_qubits: usize,
    placements: Vec<Placement<T>>,
    param_count: usize,
    feature_count: usize,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            placements: Vec::new(),
            param_count: 0,
            feature_count: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of trainable slots referenced by this circuit.
    pub fn param_count(&self) -> usize {
        self.param_count
    }

    /// Number of feature variables referenced by this circuit.
    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn placements(&self) -> &[Placement<T>] {
        &self.placements
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    fn note_angle(&mut self, angle: &Angle<T>) {
        match *angle {
            Angle::Feature { var, .. } => {
                self.feature_count = self.feature_count.max(var + 1);
            }
            Angle::Trainable { index, .. } => {
                self.param_count = self.param_count.max(index + 1);
            }
            Angle::Constant(_) => {}
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Pushes a gate placement.
    pub fn gate(
        &mut self,
        kind: GateKind,
        angle: Angle<T>,
        target: usize,
        controls: &[(usize, bool)],
    ) -> Result<&mut Self> {
        self.check_qubit(target)?;
        for &(c, _) in controls {
            self.check_qubit(c)?;
            if c == target {
                return Err(Error::ControlTargetOverlap(target));
            }
        }
        self.note_angle(&angle);
        self.placements.push(Placement::Gate {
            kind,
            angle,
            target,
            controls: controls.to_vec(),
        });
        Ok(self)
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::H, Angle::Constant(T::zero()), q, &[])
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::X, Angle::Constant(T::zero()), q, &[])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(
            GateKind::Cnot,
            Angle::Constant(T::zero()),
            target,
            &[(control, true)],
        )
    }

    pub fn cz(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(
            GateKind::Cz,
            Angle::Constant(T::zero()),
            target,
            &[(control, true)],
        )
    }

    pub fn p(&mut self, angle: Angle<T>, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::P, angle, q, &[])
    }

    pub fn cp(&mut self, angle: Angle<T>, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::P, angle, target, &[(control, true)])
    }

    pub fn rz(&mut self, angle: Angle<T>, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Rz, angle, q, &[])
    }

    pub fn ry(&mut self, angle: Angle<T>, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Ry, angle, q, &[])
    }

    pub fn rx(&mut self, angle: Angle<T>, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::Rx, angle, q, &[])
    }

    pub fn sxdg(&mut self, q: usize) -> Result<&mut Self> {
        self.gate(GateKind::SqrtXDagger, Angle::Constant(T::zero()), q, &[])
    }

    /// Pushes a controlled basis permutation on a qubit subset.
    pub fn permutation(
        &mut self,
        kind: PermKind,
        qubits: &[usize],
        controls: &[(usize, bool)],
    ) -> Result<&mut Self> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        for &(c, _) in controls {
            self.check_qubit(c)?;
            if qubits.contains(&c) {
                return Err(Error::ControlTargetOverlap(c));
            }
        }
        self.placements.push(Placement::Permutation {
            kind,
            qubits: qubits.to_vec(),
            controls: controls.to_vec(),
        });
        Ok(self)
    }

    /// Appends `other`, mapping its qubit `q` to `qubit_map[q]`, offsetting
    /// trainable indices by `param_offset` and feature variables through
    /// `feature_map`.
    pub fn append_mapped(
        &mut self,
        other: &Circuit<T>,
        qubit_map: &[usize],
        param_offset: usize,
        feature_map: &[usize],
    ) -> Result<&mut Self> {
        if qubit_map.len() != other.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit_map.len(),
                n_qubits: other.n_qubits,
            });
        }
        for p in &other.placements {
            match p {
                Placement::Gate {
                    kind,
                    angle,
                    target,
                    controls,
                } => {
                    let angle = match *angle {
                        Angle::Trainable { index, scale } => Angle::Trainable {
                            index: index + param_offset,
                            scale,
                        },
                        Angle::Feature { var, scale } => Angle::Feature {
                            var: *feature_map.get(var).ok_or(Error::UnboundFeature(var))?,
                            scale,
                        },
                        c => c,
                    };
                    let controls: Vec<(usize, bool)> =
                        controls.iter().map(|&(c, pol)| (qubit_map[c], pol)).collect();
                    self.gate(*kind, angle, qubit_map[*target], &controls)?;
                }
                Placement::Permutation {
                    kind,
                    qubits,
                    controls,
                } => {
                    let qubits: Vec<usize> = qubits.iter().map(|&q| qubit_map[q]).collect();
                    let controls: Vec<(usize, bool)> =
                        controls.iter().map(|&(c, pol)| (qubit_map[c], pol)).collect();
                    self.permutation(*kind, &qubits, &controls)?;
                }
            }
        }
        Ok(self)
    }

    /// Appends `other` one-to-one on qubits.
    pub fn append(&mut self, other: &Circuit<T>) -> Result<&mut Self> {
        let identity: Vec<usize> = (0..other.n_qubits).collect();
        let features: Vec<usize> = (0..other.feature_count.max(1)).collect();
        self.append_mapped(other, &identity, 0, &features)
    }

    /// The adjoint circuit: placements reversed, each replaced by its
    /// Hermitian conjugate. `SqrtXDagger` expands into its three-rotation
    /// definition.
    pub fn adjoint(&self) -> Circuit<T> {
        let mut out = Circuit::new(self.n_qubits);
        out.param_count = self.param_count;
        out.feature_count = self.feature_count;
        for p in self.placements.iter().rev() {
            match p {
                Placement::Gate {
                    kind,
                    angle,
                    target,
                    controls,
                } => match kind {
                    GateKind::H | GateKind::X | GateKind::Cnot | GateKind::Cz => {
                        out.placements.push(p.clone());
                    }
                    GateKind::P | GateKind::Rz | GateKind::Ry | GateKind::Rx => {
                        out.placements.push(Placement::Gate {
                            kind: *kind,
                            angle: angle.negated(),
                            target: *target,
                            controls: controls.clone(),
                        });
                    }
                    GateKind::SqrtXDagger => {
                        // (RZ(pi/2) P(-pi/2) RX(-pi/2))^dag, time-ordered
                        let half = T::FRAC_PI_2();
                        for (k, a) in [
                            (GateKind::Rz, -half),
                            (GateKind::P, half),
                            (GateKind::Rx, half),
                        ] {
                            out.placements.push(Placement::Gate {
                                kind: k,
                                angle: Angle::Constant(a),
                                target: *target,
                                controls: controls.clone(),
                            });
                        }
                    }
                },
                Placement::Permutation {
                    kind,
                    qubits,
                    controls,
                } => {
                    out.placements.push(Placement::Permutation {
                        kind: kind.adjoint(),
                        qubits: qubits.clone(),
                        controls: controls.clone(),
                    });
                }
            }
        }
        out
    }

    /// Applies the circuit to `state` with the given bindings.
    pub fn apply_to(
        &self,
        state: &mut StateVector<T>,
        features: &[T],
        params: &[T],
    ) -> Result<()> {
        if params.len() < self.param_count {
            return Err(Error::ParameterCountMismatch {
                expected: self.param_count,
                got: params.len(),
            });
        }
        for p in &self.placements {
            match p {
                Placement::Gate {
                    kind,
                    angle,
                    target,
                    controls,
                } => {
                    let theta = angle.resolve(features, params)?;
                    let m = gates::matrix(*kind, theta);
                    state.apply_gate(&m, *target, controls)?;
                }
                Placement::Permutation {
                    kind,
                    qubits,
                    controls,
                } => {
                    let table = kind.table(qubits.len());
                    state.apply_permutation(&table, qubits, controls)?;
                }
            }
        }
        Ok(())
    }

    /// Runs the circuit on |0...0>.
    pub fn run_on_zero(&self, features: &[T], params: &[T]) -> Result<StateVector<T>> {
        let mut state = StateVector::zero(self.n_qubits)?;
        self.apply_to(&mut state, features, params)?;
        Ok(state)
    }

    /// Dense unitary of the circuit (column k = action on basis state k).
    ///
    /// This is a verification oracle built from explicit matrix embeddings
    /// and products; it is deliberately independent of the statevector
    /// stride path and is guarded to small qubit counts.
    pub fn to_unitary(&self, features: &[T], params: &[T]) -> Result<DenseMat<T>> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubitsForDense {
                got: self.n_qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let n = self.n_qubits;
        let mut acc = DenseMat::identity(n);
        for p in &self.placements {
            let step = match p {
                Placement::Gate {
                    kind,
                    angle,
                    target,
                    controls,
                } => {
                    let theta = angle.resolve(features, params)?;
                    let m = gates::matrix(*kind, theta);
                    DenseMat::embed_gate(n, &m, *target, controls)
                }
                Placement::Permutation {
                    kind,
                    qubits,
                    controls,
                } => DenseMat::embed_permutation(n, &kind.table(qubits.len()), qubits, controls),
            };
            acc = step.mul(&acc);
        }
        Ok(acc)
    }

    /// Line-oriented text serialization for debugging and golden-file tests.
    pub fn serialize(&self) -> String {
        let mut out = format!(
            "qubits {} params {} features {}\n",
            self.n_qubits, self.param_count, self.feature_count
        );
        for p in &self.placements {
            match p {
                Placement::Gate {
                    kind,
                    angle,
                    target,
                    controls,
                } => {
                    out.push_str(kind.token());
                    if kind.parametric() {
                        match *angle {
                            Angle::Constant(c) => {
                                out.push_str(&format!(" c:{:?}", c.as_f64()));
                            }
                            Angle::Feature { var, scale } => {
                                out.push_str(&format!(" x{}*{:?}", var, scale.as_f64()));
                            }
                            Angle::Trainable { index, scale } => {
                                out.push_str(&format!(" t{}*{:?}", index, scale.as_f64()));
                            }
                        }
                    }
                    out.push_str(&format!(" q{target}"));
                    for &(c, pol) in controls {
                        out.push_str(&format!(" c{}{}", c, if pol { '+' } else { '-' }));
                    }
                    out.push('\n');
                }
                Placement::Permutation {
                    kind,
                    qubits,
                    controls,
                } => {
                    out.push_str("PERM ");
                    out.push_str(kind.token());
                    for &q in qubits {
                        out.push_str(&format!(" q{q}"));
                    }
                    for &(c, pol) in controls {
                        out.push_str(&format!(" c{}{}", c, if pol { '+' } else { '-' }));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Parses the output of [`Circuit::serialize`].
    pub fn parse(text: &str) -> Result<Circuit<T>> {
        let bad = |line: usize, reason: &str| Error::CircuitParse {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(0, "empty input"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "qubits" || h[2] != "params" || h[4] != "features" {
            return Err(bad(1, "malformed header"));
        }
        let n: usize = h[1].parse().map_err(|_| bad(1, "bad qubit count"))?;
        let mut c = Circuit::new(n);
        let params: usize = h[3].parse().map_err(|_| bad(1, "bad param count"))?;
        let features: usize = h[5].parse().map_err(|_| bad(1, "bad feature count"))?;

        for (idx, raw) in lines {
            let lineno = idx + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let parse_ctrl = |t: &str| -> Option<(usize, bool)> {
                let body = t.strip_prefix('c')?;
                let (num, pol) = body.split_at(body.len() - 1);
                let q: usize = num.parse().ok()?;
                match pol {
                    "+" => Some((q, true)),
                    "-" => Some((q, false)),
                    _ => None,
                }
            };
            if toks[0] == "PERM" {
                if toks.len() < 3 {
                    return Err(bad(lineno, "missing permutation arguments"));
                }
                let kind = match toks[1] {
                    "reflect" => PermKind::Reflection,
                    "incr" => PermKind::Increment,
                    "decr" => PermKind::Decrement,
                    other => return Err(bad(lineno, &format!("unknown permutation `{other}`"))),
                };
                let mut qubits = Vec::new();
                let mut controls = Vec::new();
                for t in &toks[2..] {
                    if let Some(q) = t.strip_prefix('q').and_then(|s| s.parse().ok()) {
                        qubits.push(q);
                    } else if let Some(ctl) = parse_ctrl(t) {
                        controls.push(ctl);
                    } else {
                        return Err(bad(lineno, &format!("unknown token `{t}`")));
                    }
                }
                c.permutation(kind, &qubits, &controls)?;
                continue;
            }

            let kind = match toks[0] {
                "H" => GateKind::H,
                "X" => GateKind::X,
                "CNOT" => GateKind::Cnot,
                "CZ" => GateKind::Cz,
                "P" => GateKind::P,
                "RZ" => GateKind::Rz,
                "RY" => GateKind::Ry,
                "RX" => GateKind::Rx,
                "SXDG" => GateKind::SqrtXDagger,
                other => return Err(bad(lineno, &format!("unknown gate `{other}`"))),
            };
            let mut pos = 1;
            let mut angle = Angle::Constant(T::zero());
            if kind.parametric() {
                let t = toks.get(pos).ok_or_else(|| bad(lineno, "missing angle"))?;
                angle = if let Some(v) = t.strip_prefix("c:") {
                    Angle::Constant(T::of(
                        v.parse::<f64>().map_err(|_| bad(lineno, "bad angle"))?,
                    ))
                } else if let Some(body) = t.strip_prefix('x') {
                    let (var, scale) = body
                        .split_once('*')
                        .ok_or_else(|| bad(lineno, "bad feature angle"))?;
                    Angle::Feature {
                        var: var.parse().map_err(|_| bad(lineno, "bad feature index"))?,
                        scale: T::of(scale.parse::<f64>().map_err(|_| bad(lineno, "bad scale"))?),
                    }
                } else if let Some(body) = t.strip_prefix('t') {
                    let (i, scale) = body
                        .split_once('*')
                        .ok_or_else(|| bad(lineno, "bad trainable angle"))?;
                    Angle::Trainable {
                        index: i.parse().map_err(|_| bad(lineno, "bad slot index"))?,
                        scale: T::of(scale.parse::<f64>().map_err(|_| bad(lineno, "bad scale"))?),
                    }
                } else {
                    return Err(bad(lineno, &format!("unknown angle token `{t}`")));
                };
                pos += 1;
            }
            let target: usize = toks
                .get(pos)
                .and_then(|t| t.strip_prefix('q'))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(lineno, "missing target"))?;
            pos += 1;
            let mut controls = Vec::new();
            for t in &toks[pos..] {
                controls.push(parse_ctrl(t).ok_or_else(|| bad(lineno, "bad control token"))?);
            }
            c.gate(kind, angle, target, &controls)?;
        }
        c.param_count = c.param_count.max(params);
        c.feature_count = c.feature_count.max(features);
        Ok(c)
    }
}

/// Dense unitary extraction as a free function mirroring the builder API.
pub fn circuit_to_unitary<T: Real>(
    circuit: &Circuit<T>,
    features: &[T],
    params: &[T],
) -> Result<DenseMat<T>> {
    circuit.to_unitary(features, params)
}

/// Convenience: complex from real part.
pub fn re<T: Real>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_unitary_is_identity() {
        let c = Circuit::<f64>::new(2);
        let u = c.to_unitary(&[], &[]).unwrap();
        assert!(u.max_abs_diff(&DenseMat::identity(2)) < 1e-15);
    }

    #[test]
    fn serialize_roundtrip() {
        let mut c = Circuit::<f64>::new(3);
        c.h(0).unwrap();
        c.p(Angle::feature(0, 1.5), 1).unwrap();
        c.ry(Angle::trainable(2), 2).unwrap();
        c.cnot(0, 2).unwrap();
        c.gate(GateKind::X, Angle::Constant(0.0), 1, &[(0, false), (2, true)])
            .unwrap();
        c.sxdg(0).unwrap();
        c.permutation(PermKind::Reflection, &[1, 2], &[(0, true)])
            .unwrap();
        let text = c.serialize();
        let back = Circuit::<f64>::parse(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn serialized_text_is_stable() {
        let mut c = Circuit::<f64>::new(2);
        c.h(0).unwrap();
        c.p(Angle::feature(0, 0.5), 1).unwrap();
        c.ry(Angle::trainable(0), 1).unwrap();
        c.cnot(0, 1).unwrap();
        c.permutation(PermKind::Reflection, &[1], &[(0, true)]).unwrap();
        let expect = "qubits 2 params 1 features 1\n\
                      H q0\n\
                      P x0*0.5 q1\n\
                      RY t0*1.0 q1\n\
                      CNOT q1 c0+\n\
                      PERM reflect q1 c0+\n";
        assert_eq!(c.serialize(), expect);
    }

    #[test]
    fn adjoint_undoes_circuit() {
        let mut c = Circuit::<f64>::new(2);
        c.h(0).unwrap();
        c.rx(Angle::Constant(0.37), 1).unwrap();
        c.cp(Angle::Constant(1.1), 0, 1).unwrap();
        c.sxdg(0).unwrap();
        c.permutation(PermKind::Increment, &[0, 1], &[]).unwrap();

        let mut all = c.clone();
        all.append(&c.adjoint()).unwrap();
        let u = all.to_unitary(&[], &[]).unwrap();
        assert!(u.max_abs_diff(&DenseMat::identity(2)) < 1e-12);
    }

    #[test]
    fn unitary_matches_statevector_application() {
        // oracle cross-check between the dense embedding path and the
        // in-place stride path
        let mut c = Circuit::<f64>::new(3);
        c.h(0).unwrap();
        c.ry(Angle::Constant(0.8), 1).unwrap();
        c.cnot(0, 2).unwrap();
        c.cp(Angle::Constant(-0.3), 2, 1).unwrap();
        c.permutation(PermKind::Reflection, &[1, 2], &[(0, true)])
            .unwrap();

        let u = c.to_unitary(&[], &[]).unwrap();
        for k in 0..8 {
            let mut s = StateVector::<f64>::basis(3, k).unwrap();
            c.apply_to(&mut s, &[], &[]).unwrap();
            for r in 0..8 {
                assert!((u.get(r, k) - s.amplitudes()[r]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn any_circuit_unitary_is_unitary() {
        let mut c = Circuit::<f64>::new(2);
        c.h(0).unwrap();
        c.rz(Angle::Constant(0.4), 0).unwrap();
        c.cnot(0, 1).unwrap();
        c.sxdg(1).unwrap();
        let u = c.to_unitary(&[], &[]).unwrap();
        let udu = u.dagger().mul(&u);
        assert!(udu.max_abs_diff(&DenseMat::identity(2)) < 1e-10);
    }

    #[test]
    fn missing_bindings_are_rejected() {
        let mut c = Circuit::<f64>::new(1);
        c.p(Angle::feature(0, 1.0), 0).unwrap();
        c.ry(Angle::trainable(0), 0).unwrap();
        let mut s = StateVector::zero(1).unwrap();
        assert!(matches!(
            c.apply_to(&mut s, &[], &[0.0]),
            Err(Error::UnboundFeature(0))
        ));
        assert!(matches!(
            c.apply_to(&mut s, &[1.0], &[]),
            Err(Error::ParameterCountMismatch { .. })
        ));
    }
}
