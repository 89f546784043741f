// SPDX-License-Identifier: Apache-2.0

//! The verification suite: transform equalities, involution, clean-ancilla
//! runs, feature-map orthogonality, the norm factor, sign consistency,
//! cas-kernel orthogonality and the overlap-regularization bounds.

use std::path::Path;

use qhartley::circuits::{
    build_hartley_feature_map, build_hartley_feature_map_opts, build_iqft,
    build_phase_feature_map, build_qft, build_qht_opts, dft_matrix, dht_matrix,
    hartley_norm_factor, HartleyMapOptions, QhtOptions,
};
use qhartley::dense::DenseMat;
use qhartley::statevector::StateVector;
use qhartley::Circuit64;

use crate::config::RunConfig;
use crate::output::{fmt_f64, Csv, OutDir};
use crate::{numerical, CliError};

/// One named check with its observed margin and threshold.
pub struct CheckResult {
    pub name: String,
    pub n: usize,
    pub margin: f64,
    pub threshold: f64,
    /// true when the margin must stay below the threshold, false when it
    /// must exceed it (negative controls).
    pub upper_bound: bool,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        if self.upper_bound {
            self.margin < self.threshold
        } else {
            self.margin > self.threshold
        }
    }
}

/// Diagonal-ridge exclusion used by the overlap checks: wide enough to
/// step off the sinc shoulder of the kernel itself.
pub const OVERLAP_EXCLUSION: f64 = 2.0;

fn below(name: &str, n: usize, margin: f64, threshold: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        n,
        margin,
        threshold,
        upper_bound: true,
    }
}

fn above(name: &str, n: usize, margin: f64, threshold: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        n,
        margin,
        threshold,
        upper_bound: false,
    }
}

fn post_selected_state(
    circuit: &Circuit64,
    x: f64,
) -> Result<StateVector<f64>, qhartley::Error> {
    let state = circuit.run_on_zero(&[x], &[])?;
    Ok(state.post_select(0, false)?.0)
}

fn gram_deviation(states: &[StateVector<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (j, a) in states.iter().enumerate() {
        for (k, b) in states.iter().enumerate() {
            let ip = a.inner_product(b);
            let expect = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((ip.norm() - expect).abs());
        }
    }
    worst
}

/// Runs every check for registers `n_min..=n_max` and returns the results.
pub fn run_checks(
    n_min: usize,
    n_max: usize,
    seed: u64,
    corrupt_qht: bool,
) -> Result<Vec<CheckResult>, CliError> {
    let mut results = Vec::new();
    let qht_opts = QhtOptions {
        include_sqrt_x: !corrupt_qht,
        ..QhtOptions::default()
    };

    for n in n_min..=n_max {
        let dim = 1usize << n;

        // QFT equals the DFT matrix, and the inverse undoes it
        let qft = build_qft::<f64>(n).map_err(numerical)?;
        let qft_u = qft.to_unitary(&[], &[]).map_err(numerical)?;
        results.push(below(
            "qft-dft-equality",
            n,
            qft_u.max_abs_diff(&dft_matrix(n)),
            1e-10,
        ));
        let mut round = qft.clone();
        round.append(&build_iqft(n).map_err(numerical)?).map_err(numerical)?;
        let round_u = round.to_unitary(&[], &[]).map_err(numerical)?;
        results.push(below(
            "iqft-inverts-qft",
            n,
            round_u.max_abs_diff(&DenseMat::identity(n)),
            1e-12,
        ));

        // QHT ancilla-0 block equals the DHT matrix
        let qht = build_qht_opts::<f64>(n, qht_opts).map_err(numerical)?;
        let qht_u = qht.to_unitary(&[], &[]).map_err(numerical)?;
        let dht = dht_matrix::<f64>(n);
        let mut block_dev = 0.0f64;
        for k in 0..dim {
            for j in 0..dim {
                block_dev = block_dev.max((qht_u.get(k, j) - dht.get(k, j)).norm());
            }
        }
        results.push(below("qht-dht-block", n, block_dev, 1e-10));

        // involution on the full circuit matrix, ancilla included
        let sq = qht_u.mul(&qht_u);
        results.push(below(
            "qht-involution",
            n,
            sq.max_abs_diff(&DenseMat::identity(n + 1)),
            1e-10,
        ));

        // clean ancilla for every basis input
        let mut leak = 0.0f64;
        for j in 0..dim {
            let mut s = StateVector::<f64>::basis(n + 1, j).map_err(numerical)?;
            qht.apply_to(&mut s, &[], &[]).map_err(numerical)?;
            leak = leak.max(s.outcome_probability(0, true).map_err(numerical)?);
        }
        results.push(below("qht-clean-ancilla", n, leak, 1e-12));

        // Hartley state Gram matrices on the integer and half-integer grids
        let map = build_hartley_feature_map::<f64>(n).map_err(numerical)?;
        for (label, offset) in [("hartley-gram-integers", 0.0), ("hartley-gram-halves", 0.5)] {
            let states: Vec<StateVector<f64>> = (0..dim)
                .map(|j| post_selected_state(&map, j as f64 + offset))
                .collect::<Result<_, _>>()
                .map_err(numerical)?;
            results.push(below(label, n, gram_deviation(&states), 1e-10));
        }

        // N(x) formula against the simulated branch norm at random points
        let mut worst_norm = 0.0f64;
        let mut state_seed = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(n as u64);
        for _ in 0..100 {
            // xorshift over the unit interval is plenty for test points
            state_seed ^= state_seed << 13;
            state_seed ^= state_seed >> 7;
            state_seed ^= state_seed << 17;
            let x = (state_seed % 1_000_000) as f64 / 1_000_000.0 * (dim as f64 - 1.0);
            let state = map.run_on_zero(&[x], &[]).map_err(numerical)?;
            let p0 = state.outcome_probability(0, false).map_err(numerical)?;
            let measured = (2.0 * p0).sqrt();
            worst_norm = worst_norm.max((measured - hartley_norm_factor(n, x)).abs());
        }
        results.push(below("hartley-norm-factor", n, worst_norm, 1e-10));

        // post-selected feature map states equal (-1)^j QHT |x_j>
        let mut sign_dev = 0.0f64;
        for j in 0..dim {
            let fm = post_selected_state(&map, j as f64).map_err(numerical)?;
            let mut via_qht = StateVector::<f64>::basis(n + 1, j).map_err(numerical)?;
            qht.apply_to(&mut via_qht, &[], &[]).map_err(numerical)?;
            let (via_qht, _) = via_qht.post_select(0, false).map_err(numerical)?;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for (a, b) in fm.amplitudes().iter().zip(via_qht.amplitudes()) {
                sign_dev = sign_dev.max((a - b * sign).norm());
            }
        }
        results.push(below("featuremap-qht-sign-consistency", n, sign_dev, 1e-10));

        // cas orthogonality as a pure function (all k, l pairs)
        let mut cas_dev = 0.0f64;
        for k in 0..dim {
            for l in 0..dim {
                let mut sum = 0.0f64;
                for j in 0..dim {
                    let a = 2.0 * std::f64::consts::PI * (k * j) as f64 / dim as f64;
                    let b = 2.0 * std::f64::consts::PI * (l * j) as f64 / dim as f64;
                    sum += (a.cos() + a.sin()) * (b.cos() + b.sin());
                }
                let expect = if k == l { dim as f64 } else { 0.0 };
                cas_dev = cas_dev.max((sum - expect).abs());
            }
        }
        results.push(below("cas-orthogonality", n, cas_dev / dim as f64, 1e-10));

        // phase feature map Gram on integers
        let phase = build_phase_feature_map::<f64>(n).map_err(numerical)?;
        let states: Vec<StateVector<f64>> = (0..dim)
            .map(|j| phase.run_on_zero(&[j as f64], &[]))
            .collect::<Result<_, _>>()
            .map_err(numerical)?;
        results.push(below("phase-gram-integers", n, gram_deviation(&states), 1e-10));
    }

    // overlap regularization bounds at n = 5 (runs when the range covers it)
    if (n_min..=n_max).contains(&5) {
        let (with_rz, without_rz) =
            overlap_extremes(5, OVERLAP_EXCLUSION).map_err(numerical)?;
        results.push(below("overlap-regularized-max", 5, with_rz, 0.05));
        results.push(above("overlap-unregularized-max", 5, without_rz, 0.5));
    }

    Ok(results)
}

/// Maximum squared overlap outside the diagonal ridge (|x - x'| >=
/// `exclusion` on a 0.1 grid) with and without the ancilla RZ(2 pi x) gate.
///
/// The cas kernel's diagonal ridge is a periodic sinc of half-width about
/// two grid nodes, so exclusions tighter than that measure the ridge
/// shoulder rather than the anti-diagonal artifact the ancilla rotation
/// suppresses.
pub fn overlap_extremes(n: usize, exclusion: f64) -> Result<(f64, f64), qhartley::Error> {
    let mut out = [0.0f64; 2];
    for (slot, include_rz) in [(0usize, true), (1usize, false)] {
        let map = build_hartley_feature_map_opts::<f64>(
            n,
            HartleyMapOptions {
                feature_var: 0,
                include_ancilla_rz: include_rz,
            },
        )?;
        let points: Vec<f64> = {
            let top = ((1 << n) - 1) as f64;
            let count = (top / 0.1).round() as usize;
            (0..=count).map(|i| i as f64 * 0.1).collect()
        };
        let states: Vec<StateVector<f64>> = points
            .iter()
            .map(|&x| Ok(map.run_on_zero(&[x], &[])?.post_select(0, false)?.0))
            .collect::<Result<_, qhartley::Error>>()?;
        let mut worst = 0.0f64;
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate().skip(i + 1) {
                let lin = (points[j] - points[i]).abs();
                // the kernel is 2^n-periodic in x, so measure separation on
                // the torus
                let dist = lin.min((1 << n) as f64 - lin);
                if dist < exclusion {
                    continue;
                }
                worst = worst.max(a.inner_product(b).norm_sqr());
            }
        }
        out[slot] = worst;
    }
    Ok((out[0], out[1]))
}

pub fn run(
    config: Option<&Path>,
    n_min: usize,
    n_max: usize,
    seed: u64,
    out: Option<String>,
    corrupt_qht: bool,
) -> Result<(), CliError> {
    if n_min == 0 || n_max < n_min || n_max > 8 {
        return Err(CliError::Config(format!(
            "verify range {n_min}..{n_max} invalid (need 1 <= min <= max <= 8)"
        )));
    }
    let out = match (&out, config) {
        (Some(dir), _) => Some(dir.clone()),
        (None, Some(path)) => RunConfig::from_path(path)?.output_dir,
        (None, None) => None,
    };

    let results = run_checks(n_min, n_max, seed, corrupt_qht)?;
    let mut failures = 0usize;
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let relation = if r.upper_bound { "<" } else { ">" };
        println!(
            "{status} {name} n={n} margin {margin:.3e} {relation} {threshold:.3e}",
            name = r.name,
            n = r.n,
            margin = r.margin,
            threshold = r.threshold,
        );
        if !r.passed() {
            failures += 1;
        }
    }

    if let Some(dir) = out {
        let dir = OutDir::create(&dir)?;
        let mut csv = Csv::new(
            "verify",
            &format!("[verify]\nn_min = {n_min}\nn_max = {n_max}\nseed = {seed}\n"),
            &[],
        );
        csv.header("check,n,margin,threshold,bound,status");
        for r in &results {
            csv.row(&[
                r.name.clone(),
                r.n.to_string(),
                fmt_f64(r.margin),
                fmt_f64(r.threshold),
                (if r.upper_bound { "below" } else { "above" }).to_string(),
                (if r.passed() { "pass" } else { "fail" }).to_string(),
            ]);
        }
        dir.write("verify.csv", &csv.finish())?;
    }

    if failures > 0 {
        return Err(CliError::CheckFailed(format!(
            "{failures} verification check(s) failed"
        )));
    }
    println!("all {} checks passed", results.len());
    Ok(())
}
