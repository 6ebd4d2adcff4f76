// Copyright 2026 The qconvsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCONVSIM_NELDER_MEAD_H
#define QCONVSIM_NELDER_MEAD_H

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace qconvsim {

struct SimplexOptions {
    /// Stop once max - min of the simplex values drops below this.
    double f_tol = 1e-10;
    std::size_t max_evaluations = 100000;
    double initial_step = 0.1;
};

struct SimplexResult {
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Derivative-free downhill simplex minimization (standard reflection,
/// expansion, contraction and shrink coefficients 1, 2, 1/2, 1/2).
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd &)> &f, const Eigen::VectorXd &start,
                          const SimplexOptions &opts = {});

}  // namespace qconvsim

#endif  // QCONVSIM_NELDER_MEAD_H
