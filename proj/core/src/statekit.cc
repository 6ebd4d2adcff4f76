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

#include "qconvsim/statekit.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qconvsim {

namespace {

void check_state_dim(Eigen::Index n) {
    if (n != 2 && n != 4) {
        throw std::invalid_argument("state vector dimension must be 2 or 4, got " + std::to_string(n));
    }
}

}  // namespace

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
    check_state_dim(amps_.size());
}

StateVector::StateVector(std::initializer_list<cd> amplitudes) : amps_(static_cast<Eigen::Index>(amplitudes.size())) {
    Eigen::Index i = 0;
    for (const cd &a : amplitudes) {
        amps_(i++) = a;
    }
    check_state_dim(amps_.size());
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw std::invalid_argument("basis index out of range");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw std::invalid_argument("density matrix must be square and nonempty");
    }
    double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kInvariantTol * scale) {
        throw std::invalid_argument("density matrix must be Hermitian");
    }
    // Remove sub-tolerance anti-Hermitian noise so eigen-solvers see an exact Hermitian input.
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

DensityMatrix DensityMatrix::zero(std::size_t dim) {
    auto n = static_cast<Eigen::Index>(dim);
    return DensityMatrix(Eigen::MatrixXcd::Zero(n, n));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    auto n = static_cast<Eigen::Index>(dim);
    return DensityMatrix(Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(dim));
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_normalized(double tol) const {
    return std::abs(trace() - 1.0) <= tol;
}

DensityMatrix DensityMatrix::normalized() const {
    double t = trace();
    if (!(std::abs(t) > 1e-300)) {
        throw std::invalid_argument("cannot normalize a zero-trace matrix");
    }
    return DensityMatrix(m_ / t);
}

DensityMatrix DensityMatrix::operator+(const DensityMatrix &other) const {
    if (dim() != other.dim()) {
        throw std::invalid_argument("dimension mismatch in density matrix sum");
    }
    return DensityMatrix(m_ + other.m_);
}

DensityMatrix DensityMatrix::operator*(double scale) const {
    return DensityMatrix(m_ * scale);
}

double StokesVector::bloch_length() const {
    return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
}

bool StokesVector::physical(double tol) const {
    return s0 >= -tol && bloch_length() <= s0 + tol;
}

const Eigen::Matrix2cd &pauli(int index) {
    static const std::array<Eigen::Matrix2cd, 4> kPauli = [] {
        std::array<Eigen::Matrix2cd, 4> p;
        const cd i(0.0, 1.0);
        p[0] << 1.0, 0.0, 0.0, 1.0;
        p[1] << 0.0, 1.0, 1.0, 0.0;
        p[2] << 0.0, -i, i, 0.0;
        p[3] << 1.0, 0.0, 0.0, -1.0;
        return p;
    }();
    if (index < 0 || index > 3) {
        throw std::invalid_argument("Pauli index must be 0..3");
    }
    return kPauli[static_cast<std::size_t>(index)];
}

StateVector normalize(const StateVector &v) {
    double n = v.norm();
    if (!(n > 1e-300)) {
        throw std::invalid_argument("degenerate state");
    }
    return StateVector(v.amplitudes() / n);
}

DensityMatrix density_of(const StateVector &v) {
    return DensityMatrix(v.amplitudes() * v.amplitudes().adjoint());
}

StateVector tensor(const StateVector &a, const StateVector &b) {
    Eigen::VectorXcd out(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        out.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
    }
    return StateVector(std::move(out));
}

DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    const auto &x = a.matrix();
    const auto &y = b.matrix();
    Eigen::MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            out.block(r * y.rows(), c * y.cols(), y.rows(), y.cols()) = x(r, c) * y;
        }
    }
    return DensityMatrix(std::move(out));
}

bool is_unitary(const Eigen::MatrixXcd &u, double tol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return (u.adjoint() * u - id).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix apply(const Eigen::MatrixXcd &u, const DensityMatrix &rho) {
    if (u.rows() != static_cast<Eigen::Index>(rho.dim())) {
        throw std::invalid_argument("operator dimension does not match state");
    }
    if (!is_unitary(u)) {
        throw std::invalid_argument("operator is not unitary");
    }
    return DensityMatrix(u * rho.matrix() * u.adjoint());
}

StokesVector stokes_of(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw std::invalid_argument("Stokes parameters are defined for single qubits only");
    }
    Eigen::Matrix2cd m = rho.matrix();
    auto expect = [&](int k) { return (m * pauli(k)).trace().real(); };
    return StokesVector{expect(0), expect(1), expect(2), expect(3)};
}

FlaggedDensity density_from_stokes(const StokesVector &s) {
    Eigen::Matrix2cd m = 0.5 * (s.s0 * pauli(0) + s.s1 * pauli(1) + s.s2 * pauli(2) + s.s3 * pauli(3));
    DensityMatrix rho{Eigen::MatrixXcd(m)};
    bool ok = rho.is_psd();
    return FlaggedDensity{std::move(rho), ok};
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix &rho, const DensityMatrix &rho_aim) {
    if (rho.dim() != rho_aim.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    if (!rho.is_normalized() || !rho_aim.is_normalized()) {
        throw std::invalid_argument("fidelity: states must have unit trace");
    }
    // Eigenvalues at rounding level are zeroed; their square roots would
    // otherwise leak ~1e-8 into the fidelity of (near-)pure states.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(rho.dim());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> aim(rho_aim.matrix());
    Eigen::VectorXd roots =
        (aim.eigenvalues().array() > floor).select(aim.eigenvalues().cwiseMax(0.0).cwiseSqrt(), 0.0);
    Eigen::MatrixXcd root = aim.eigenvectors() * roots.asDiagonal() * aim.eigenvectors().adjoint();
    Eigen::MatrixXcd inner = root * rho.matrix() * root;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
    double tr = (es.eigenvalues().array() > floor).select(es.eigenvalues().cwiseMax(0.0).cwiseSqrt(), 0.0).sum();
    return tr * tr;
}

DensityMatrix partial_trace(const DensityMatrix &rho, int keep) {
    if (rho.dim() != 4) {
        throw std::invalid_argument("partial_trace expects a two-qubit matrix");
    }
    if (keep != 0 && keep != 1) {
        throw std::invalid_argument("partial_trace: keep must be 0 or 1");
    }
    const auto &m = rho.matrix();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2, 2);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int k = 0; k < 2; ++k) {
                int r = keep == 0 ? 2 * a + k : 2 * k + a;
                int c = keep == 0 ? 2 * b + k : 2 * k + b;
                out(a, b) += m(r, c);
            }
        }
    }
    return DensityMatrix(std::move(out));
}

}  // namespace qconvsim
