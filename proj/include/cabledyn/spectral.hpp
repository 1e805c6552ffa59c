#pragma once

// Numerical linearization of the one-step discrete map and its eigen-spectrum.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cabledyn/cable.hpp"
#include "cabledyn/errors.hpp"
#include "cabledyn/parallel.hpp"
#include "cabledyn/prescription.hpp"
#include "cabledyn/sim.hpp"

namespace cabledyn::spectral {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

struct LinearizeOptions {
    double delta = 1e-6;  // probe is delta * (1 + |x_k|)

    bool operator==(const LinearizeOptions&) const = default;
};

namespace detail {

/// Ends frozen at their snapshot velocities: p(t) = p_s + v_s (t - t_s).
inline auv::BoundaryPrescription held_boundary(const cable::CableState& s) {
    const Vec3 p0 = s.positions.front(), v0 = s.velocities.front();
    const Vec3 p1 = s.positions.back(), v1 = s.velocities.back();
    return auv::BoundaryPrescription(auv::constant_velocity(p0 - v0 * s.time, v0),
                                     auv::constant_velocity(p1 - v1 * s.time, v1));
}

inline VectorXd pack(const cable::CableState& s) {
    const int m = static_cast<int>(s.size()) - 2;
    VectorXd x(6 * m);
    for (int i = 0; i < m; ++i) {
        x.segment<3>(3 * i) = s.positions[i + 1];
        x.segment<3>(3 * m + 3 * i) = s.velocities[i + 1];
    }
    return x;
}

inline void unpack(const VectorXd& x, cable::CableState& s) {
    const int m = static_cast<int>(s.size()) - 2;
    for (int i = 0; i < m; ++i) {
        s.positions[i + 1] = x.segment<3>(3 * i);
        s.velocities[i + 1] = x.segment<3>(3 * m + 3 * i);
    }
}

}  // namespace detail

/// Central-difference Jacobian of the one-step map over interior node
/// positions and velocities, state order [P_1..P_{N-2}, V_1..V_{N-2}].
inline MatrixXd linearize(const cable::CableState& snapshot, const cable::CableProperties& p,
                          const cable::CurrentField& current, const sim::IntegratorConfig& cfg,
                          const LinearizeOptions& opt = {}) {
    if (!(opt.delta > 0.0)) throw ConfigInvalid("linearization delta must be > 0");
    const auto boundary = detail::held_boundary(snapshot);
    const VectorXd x0 = detail::pack(snapshot);
    const Eigen::Index dim = x0.size();
    MatrixXd a(dim, dim);
    parallel::parallel_for(static_cast<std::size_t>(dim), [&](std::size_t k) {
        sim::Stepper stepper(p, boundary, current, cfg);
        const double h = opt.delta * (1.0 + std::abs(x0[k]));
        auto image = [&](double sign) {
            cable::CableState s = snapshot;
            VectorXd x = x0;
            x[k] += sign * h;
            detail::unpack(x, s);
            stepper.step(s);
            return detail::pack(s);
        };
        a.col(static_cast<Eigen::Index>(k)) = (image(1.0) - image(-1.0)) / (2.0 * h);
    });
    return a;
}

/// Jacobian of all nodal forces (3N rows, end rows are the vehicle loads)
/// with respect to the interior node positions (3(N-2) columns).
inline MatrixXd force_jacobian(const cable::CableState& snapshot, const cable::CableProperties& p,
                               const cable::CurrentField& current, const LinearizeOptions& opt = {}) {
    const int n = static_cast<int>(snapshot.size());
    const int m = n - 2;
    MatrixXd j(3 * n, 3 * m);
    auto forces = [&](const std::vector<Vec3>& pos) {
        cable::NodalForces work;
        cable::compute_nodal_forces(p, pos, snapshot.velocities, snapshot.time, current, work);
        VectorXd f(3 * n);
        for (int i = 0; i < n; ++i) f.segment<3>(3 * i) = work.force[i];
        return f;
    };
    for (int c = 0; c < 3 * m; ++c) {
        const int node = c / 3 + 1, axis = c % 3;
        const double h = opt.delta * (1.0 + std::abs(snapshot.positions[node][axis]));
        auto plus = snapshot.positions, minus = snapshot.positions;
        plus[node][axis] += h;
        minus[node][axis] -= h;
        j.col(c) = (forces(plus) - forces(minus)) / (2.0 * h);
    }
    return j;
}

/// Per-node (rows) and per-axis (columns) magnitudes of one mode.
using NodeAxisNorms = Eigen::Matrix<double, Eigen::Dynamic, 3>;

struct Mode {
    Complex eigenvalue;
    double magnitude = 0.0;
    double phase = 0.0;          // |arg lambda| in [0, pi]
    NodeAxisNorms position;      // eigenvector position components, N x 3 (ends zero)
    NodeAxisNorms force;         // force influence, N x 3
    int force_argmax_node = -1;  // node with the largest force-influence norm
};

struct SpectralReport {
    std::vector<Complex> eigenvalues;  // sorted by |lambda| descending
    std::vector<double> phases;
    std::vector<bool> stable;          // |lambda| < 1
    std::vector<Mode> dominant;        // first `dominant_count` modes
    double max_dominant_phase = 0.0;
    double max_dominant_stable_phase = 0.0;
    double spectral_radius = 0.0;
    Eigen::VectorXd influence;   // per-node force-influence norm summed over dominant modes (unit-peak each)
    int influence_argmax_node = -1;

    std::size_t dimension() const { return eigenvalues.size(); }
};

struct SpectralOptions {
    int dominant_count = 6;

    bool operator==(const SpectralOptions&) const = default;
};

/// Eigen-decomposition of A. When `force_jac` is supplied (3N x 3(N-2)),
/// dominant modes also carry their force-influence maps.
inline SpectralReport spectral_report(const MatrixXd& a, const MatrixXd* force_jac = nullptr,
                                      const SpectralOptions& opt = {}) {
    if (a.rows() != a.cols() || a.rows() == 0) throw ConfigInvalid("spectral_report needs a square matrix");
    if (!a.allFinite()) throw ConfigInvalid("spectral_report needs a finite matrix");
    Eigen::EigenSolver<MatrixXd> es(a, force_jac != nullptr);
    if (es.info() != Eigen::Success) throw EigenNoConvergence("eigenvalue iteration did not converge");
    const Eigen::VectorXcd lambda = es.eigenvalues();
    const Eigen::Index dim = lambda.size();
    std::vector<Eigen::Index> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        const double ai = std::abs(lambda[i]), aj = std::abs(lambda[j]);
        if (ai != aj) return ai > aj;
        if (lambda[i].real() != lambda[j].real()) return lambda[i].real() > lambda[j].real();
        return lambda[i].imag() > lambda[j].imag();
    });
    SpectralReport r;
    for (Eigen::Index k : order) {
        r.eigenvalues.push_back(lambda[k]);
        r.phases.push_back(std::abs(std::arg(lambda[k])));
        r.stable.push_back(std::abs(lambda[k]) < 1.0);
    }
    r.spectral_radius = dim > 0 ? std::abs(r.eigenvalues.front()) : 0.0;
    const int count = static_cast<int>(std::min<Eigen::Index>(opt.dominant_count, dim));
    int stable_seen = 0;
    for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
        if (static_cast<int>(k) < count) r.max_dominant_phase = std::max(r.max_dominant_phase, r.phases[k]);
        if (r.stable[k] && stable_seen < count) {
            r.max_dominant_stable_phase = std::max(r.max_dominant_stable_phase, r.phases[k]);
            ++stable_seen;
        }
    }
    if (force_jac) {
        const Eigen::MatrixXcd vectors = es.eigenvectors();
        const int m = static_cast<int>(dim / 6);
        const int n = m + 2;
        if (force_jac->rows() != 3 * n || force_jac->cols() != 3 * m) {
            throw ConfigInvalid("force Jacobian shape does not match the state dimension");
        }
        for (int k = 0; k < count; ++k) {
            Mode mode;
            mode.eigenvalue = r.eigenvalues[k];
            mode.magnitude = std::abs(mode.eigenvalue);
            mode.phase = r.phases[k];
            const Eigen::VectorXcd v = vectors.col(order[k]);
            const Eigen::VectorXcd pos = v.head(3 * m);
            const Eigen::VectorXcd f = force_jac->cast<Complex>() * pos;
            mode.position = NodeAxisNorms::Zero(n, 3);
            mode.force = NodeAxisNorms::Zero(n, 3);
            for (int i = 0; i < m; ++i) {
                for (int c = 0; c < 3; ++c) mode.position(i + 1, c) = std::abs(pos[3 * i + c]);
            }
            for (int i = 0; i < n; ++i) {
                for (int c = 0; c < 3; ++c) mode.force(i, c) = std::abs(f[3 * i + c]);
            }
            Eigen::Index best = 0;
            mode.force.rowwise().norm().maxCoeff(&best);
            mode.force_argmax_node = static_cast<int>(best);
            r.dominant.push_back(std::move(mode));
        }
        r.influence = Eigen::VectorXd::Zero(n);
        for (const auto& mode : r.dominant) {
            const Eigen::VectorXd norms = mode.force.rowwise().norm();
            const double peak = norms.maxCoeff();
            if (peak > 0.0) r.influence += norms / peak;
        }
        Eigen::Index best = 0;
        r.influence.maxCoeff(&best);
        r.influence_argmax_node = static_cast<int>(best);
    }
    return r;
}

/// True for the end nodes and their neighbours.
inline bool endpoint_adjacent(int node, int node_count) {
    return node <= 1 || node >= node_count - 2;
}

struct SnapshotSelection {
    double t_from = 0.0;                // s, ignore the start-up transient
    std::optional<double> slack_time;   // explicit times override the chord extrema
    std::optional<double> taut_time;

    bool operator==(const SnapshotSelection&) const = default;
};

/// Indices of the slack (shortest chord) and taut (longest chord) samples
/// of a record with positions, or of the samples nearest explicit times.
inline std::pair<std::size_t, std::size_t> select_snapshots(const sim::SimRecord& rec,
                                                            const SnapshotSelection& sel = {}) {
    if (rec.states.empty() || rec.states.size() != rec.size()) {
        throw ConfigInvalid("snapshot selection needs a record with positions");
    }
    auto nearest = [&](double t) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < rec.size(); ++k) {
            if (std::abs(rec.times[k] - t) < std::abs(rec.times[best] - t)) best = k;
        }
        return best;
    };
    std::optional<std::size_t> lo, hi;
    double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        if (rec.times[k] < sel.t_from - 1e-12) continue;
        const auto& pos = rec.states[k].positions;
        const double chord = (pos.back() - pos.front()).norm();
        if (chord < cmin) cmin = chord, lo = k;
        if (chord > cmax) cmax = chord, hi = k;
    }
    if (!lo) throw ConfigInvalid("no samples after snapshot t_from");
    return {sel.slack_time ? nearest(*sel.slack_time) : *lo, sel.taut_time ? nearest(*sel.taut_time) : *hi};
}

/// Linearize a snapshot and report its spectrum with force-influence maps.
inline SpectralReport analyze_snapshot(const cable::CableState& snapshot, const cable::CableProperties& p,
                                       const cable::CurrentField& current, const sim::IntegratorConfig& cfg,
                                       const LinearizeOptions& lin = {}, const SpectralOptions& opt = {}) {
    const MatrixXd a = linearize(snapshot, p, current, cfg, lin);
    const MatrixXd j = force_jacobian(snapshot, p, current, lin);
    return spectral_report(a, &j, opt);
}

}  // namespace cabledyn::spectral
