// SPDX-License-Identifier: Apache-2.0

//! Emits the two-dimensional squared-overlap map of normalized Hartley
//! states over a fine grid, with or without the ancilla RZ(2 pi x) gate.

use qhartley::circuits::{build_hartley_feature_map_opts, HartleyMapOptions};
use qhartley::statevector::StateVector;

use crate::output::{fmt_f64, Csv, OutDir};
use crate::CliError;

pub fn run(
    qubits: usize,
    step: f64,
    no_ancilla_rz: bool,
    out: Option<String>,
) -> Result<(), CliError> {
    if qubits == 0 || qubits > 6 {
        return Err(CliError::Config(format!(
            "overlap-map supports 1..=6 qubits, got {qubits}"
        )));
    }
    if step.is_nan() || step <= 0.0 {
        return Err(CliError::Config("step must be positive".into()));
    }
    let dir = OutDir::create(&out.ok_or_else(|| {
        CliError::Config("overlap-map needs --out (or [output] dir)".into())
    })?)?;

    let map = build_hartley_feature_map_opts::<f64>(
        qubits,
        HartleyMapOptions {
            feature_var: 0,
            include_ancilla_rz: !no_ancilla_rz,
        },
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    let top = ((1usize << qubits) - 1) as f64;
    let count = (top / step).round() as usize;
    let points: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
    let states: Vec<StateVector<f64>> = points
        .iter()
        .map(|&x| {
            Ok(map
                .run_on_zero(&[x], &[])
                .map_err(|e| CliError::Numerical(e.to_string()))?
                .post_select(0, false)
                .map_err(|e| CliError::Numerical(e.to_string()))?
                .0)
        })
        .collect::<Result<_, CliError>>()?;

    let snapshot = format!(
        "[overlap]\nqubits = {qubits}\nstep = {step:?}\nancilla_rz = {}\n",
        !no_ancilla_rz
    );
    let mut csv = Csv::new("overlap-map", &snapshot, &[]);
    csv.header("x,x_prime,overlap_sq");
    let mut max_off = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let overlap_sq = a.inner_product(b).norm_sqr();
            if (points[i] - points[j]).abs() >= 0.5 {
                max_off = max_off.max(overlap_sq);
            }
            csv.row(&[fmt_f64(points[i]), fmt_f64(points[j]), fmt_f64(overlap_sq)]);
        }
    }
    dir.write("overlap_map.csv", &csv.finish())?;
    println!(
        "overlap-map: {} points, max off-diagonal squared overlap {:.4e}",
        points.len(),
        max_off
    );
    Ok(())
}
