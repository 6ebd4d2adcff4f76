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

#include "qconvsim/fringe_fit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace qconvsim {

namespace {

constexpr int kMaxReweights = 100;
constexpr double kParamTol = 1e-12;

}  // namespace

std::string scan_name(ScanVariable v) {
    return v == ScanVariable::SourceTheta ? "source_theta" : "alice_phase";
}

ScanVariable parse_scan_variable(const std::string &name) {
    if (name == "alice_phase") {
        return ScanVariable::AlicePhase;
    }
    if (name == "source_theta") {
        return ScanVariable::SourceTheta;
    }
    throw std::invalid_argument("unknown scan variable '" + name + "'");
}

double FringePoint::std_error() const {
    return std::sqrt(static_cast<double>(coincidences));
}

void FringeDataset::validate() const {
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].scan_value > points[i - 1].scan_value)) {
            throw std::invalid_argument("fringe scan values must be strictly increasing");
        }
    }
}

double FringeFit::model(double x, double w) const {
    return amplitude * (1.0 + visibility * std::cos(w * x + phase_offset));
}

FringeFit fit_visibility(const FringeDataset &d) {
    d.validate();
    const auto n = static_cast<Eigen::Index>(d.points.size());
    if (n < 8) {
        throw std::invalid_argument("visibility fit needs at least 8 points");
    }
    const double w = scan_frequency(d.scan);
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = d.points[static_cast<std::size_t>(i)].scan_value;
        x(i, 0) = 1.0;
        x(i, 1) = std::cos(w * s);
        x(i, 2) = std::sin(w * s);
        y(i) = static_cast<double>(d.points[static_cast<std::size_t>(i)].coincidences);
    }
    if (y.sum() <= 0.0) {
        throw std::invalid_argument("visibility fit needs nonzero counts");
    }

    // Start from observed-count weights, then switch to model weights.
    Eigen::VectorXd weights = y.cwiseMax(1.0).cwiseInverse();
    Eigen::Vector3d beta = Eigen::Vector3d::Zero();
    Eigen::Matrix3d normal;
    FringeFit fit;
    bool settled = false;
    for (int it = 1; it <= kMaxReweights; ++it) {
        normal = x.transpose() * weights.asDiagonal() * x;
        Eigen::Vector3d rhs = x.transpose() * weights.asDiagonal() * y;
        Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            throw FringeFitError("fringe fit normal equations are singular", std::numeric_limits<double>::quiet_NaN());
        }
        Eigen::Vector3d next = ldlt.solve(rhs);
        double change = (next - beta).cwiseAbs().maxCoeff();
        double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
        beta = next;
        fit.iterations = it;
        weights = (x * beta).cwiseMax(1.0).cwiseInverse();
        if (change <= kParamTol * scale) {
            settled = true;
            break;
        }
    }
    Eigen::VectorXd resid = y - x * beta;
    fit.residual = resid.cwiseProduct(resid).cwiseProduct(weights).sum();
    if (!settled) {
        throw FringeFitError("fringe fit did not converge", fit.residual);
    }

    const double a = beta(0);
    const double b = beta(1);
    const double c = beta(2);
    if (!(a > 0.0)) {
        throw FringeFitError("fitted fringe mean is not positive", fit.residual);
    }
    const double r = std::hypot(b, c);
    fit.amplitude = a;
    fit.visibility = r / a;
    fit.phase_offset = std::atan2(-c, b);

    normal = x.transpose() * weights.asDiagonal() * x;
    Eigen::Matrix3d cov = normal.inverse();
    Eigen::Vector3d grad;
    if (r > 0.0) {
        grad << -fit.visibility / a, b / (a * r), c / (a * r);
        fit.visibility_stderr = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
    } else {
        fit.visibility_stderr = std::sqrt(std::max(0.0, cov(1, 1) + cov(2, 2))) / a;
    }
    return fit;
}

bool bell_check(const FringeFit &fit) {
    return fit.visibility > kBellThreshold;
}

}  // namespace qconvsim
