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

#ifndef QCONVSIM_STATEKIT_H
#define QCONVSIM_STATEKIT_H

#include <complex>
#include <cstddef>
#include <initializer_list>

#include <Eigen/Dense>

namespace qconvsim {

using cd = std::complex<double>;

/// Absolute tolerance for structural checks (Hermiticity, unitarity, PSD, trace).
inline constexpr double kInvariantTol = 1e-9;

/// Basis convention used everywhere in the project:
///   qubit index 0 = |t0> (time bin) or path |0> (long arm),
///   qubit index 1 = |t1> (time bin) or path |1> (short arm),
///   two-qubit index = 2 * signal + idler  (signal (x) idler, Alice (x) Bob).

/// Pure state of one or two qubits. Immutable; amplitudes are not forced to be
/// normalized (see normalize()).
class StateVector {
   public:
    explicit StateVector(Eigen::VectorXcd amplitudes);
    StateVector(std::initializer_list<cd> amplitudes);

    static StateVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const Eigen::VectorXcd &amplitudes() const { return amps_; }
    cd operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
    double norm() const { return amps_.norm(); }

   private:
    Eigen::VectorXcd amps_;
};

/// Hermitian matrix describing a (possibly subnormalized, possibly nonphysical)
/// state. Construction checks squareness and Hermiticity only; positivity and
/// unit trace are queried, not enforced, because linear inversion and loss
/// bookkeeping both legitimately produce matrices that violate them.
class DensityMatrix {
   public:
    explicit DensityMatrix(Eigen::MatrixXcd entries);

    static DensityMatrix zero(std::size_t dim);
    static DensityMatrix maximally_mixed(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const Eigen::MatrixXcd &matrix() const { return m_; }
    cd operator()(std::size_t r, std::size_t c) const {
        return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    double trace() const { return m_.trace().real(); }
    double min_eigenvalue() const;
    bool is_psd(double tol = kInvariantTol) const { return min_eigenvalue() >= -tol; }
    bool is_normalized(double tol = kInvariantTol) const;

    /// Copy rescaled to unit trace. Throws on a (numerically) zero trace.
    DensityMatrix normalized() const;

    DensityMatrix operator+(const DensityMatrix &other) const;
    DensityMatrix operator*(double scale) const;

   private:
    Eigen::MatrixXcd m_;
};

/// Pauli expectations S_i = Tr(rho sigma_i).
struct StokesVector {
    double s0 = 1.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;

    double bloch_length() const;
    /// True when the Bloch vector lies inside the ball of radius s0.
    bool physical(double tol = kInvariantTol) const;
};

/// A matrix produced by an inversion that may land outside the state space.
struct FlaggedDensity {
    DensityMatrix rho;
    bool physical;
};

/// Pauli matrices sigma_0..sigma_3, in the I, X, Y, Z order.
const Eigen::Matrix2cd &pauli(int index);

StateVector normalize(const StateVector &v);
DensityMatrix density_of(const StateVector &v);

StateVector tensor(const StateVector &a, const StateVector &b);
DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b);

bool is_unitary(const Eigen::MatrixXcd &u, double tol = kInvariantTol);

/// U rho U^dagger. Throws std::invalid_argument for a non-unitary or
/// mismatched operator.
DensityMatrix apply(const Eigen::MatrixXcd &u, const DensityMatrix &rho);

StokesVector stokes_of(const DensityMatrix &rho);
FlaggedDensity density_from_stokes(const StokesVector &s);

/// Uhlmann fidelity [Tr sqrt(sqrt(sigma) rho sqrt(sigma))]^2 for normalized
/// states of equal dimension.
double fidelity(const DensityMatrix &rho, const DensityMatrix &rho_aim);

/// Square root of a PSD Hermitian matrix, clamping negative eigenvalues to 0.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd &m);

/// Reduced state of a two-qubit matrix. keep = 0 keeps the first (signal)
/// qubit, keep = 1 keeps the second.
DensityMatrix partial_trace(const DensityMatrix &rho, int keep);

}  // namespace qconvsim

#endif  // QCONVSIM_STATEKIT_H
