// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lpvtr/lpv_model.hpp"

namespace lpvtr {

/// ||y - ŷ|| / ||y - mean(y)|| * 100, over all output channels. Throws
/// NumericalError for a constant reference.
double nrmse(const Matrix& y_ref, const Matrix& y_hat);

/// Output of a closed-loop simulation under a unit impulse on input channel
/// `channel`, from x0 = 0. Length `n` unless the model diverges.
Trajectory impulse_response(const AffineLpvSs& m, const SchedulingMap& eta,
                            std::size_t n, std::size_t channel = 0);

/// |h_fom(t) - h_rom(t)| per output and sample over the common prefix.
Matrix impulse_error(const Trajectory& fom, const Trajectory& rom);

/// Number of leading samples whose error is within rel_tol * max|h_fom|.
std::size_t matched_samples(const Trajectory& fom, const Trajectory& rom,
                            double rel_tol = 1e-6);

}  // namespace lpvtr
