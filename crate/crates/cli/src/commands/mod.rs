// SPDX-License-Identifier: Apache-2.0

pub mod compare;
pub mod overlap;
pub mod sample;
pub mod train;
pub mod verify;
