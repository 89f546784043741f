// SPDX-License-Identifier: Apache-2.0

//! Circuit builders for every block used by the models: transforms (QFT,
//! QHT, controlled reflection), feature maps, variational ansätze, the
//! bivariate correlation circuit and the bitstring network.

pub mod ansatz;
pub mod feature_maps;
pub mod gates;
pub mod transforms;

pub use ansatz::{
    build_correlation_circuit, build_hea, build_hera, correlation_param_count, hea_param_count,
    hera_param_count, RotationScheme,
};
pub use feature_maps::{
    build_hartley_feature_map, build_hartley_feature_map_opts, build_phase_feature_map,
    hartley_norm_factor, HartleyMapOptions,
};
pub use transforms::{
    build_bitstring_network, build_controlled_reflection, build_iqft, build_qft, build_qht,
    build_qht_inverse, build_qht_opts, dht_matrix, dft_matrix, QhtOptions, ReflectionStyle,
};
