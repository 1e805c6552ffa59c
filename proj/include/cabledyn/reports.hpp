#pragma once

// CSV tables and JSON summaries for each result type.

#include <string>
#include <vector>

#include "cabledyn/analysis.hpp"
#include "cabledyn/config.hpp"
#include "cabledyn/identify.hpp"
#include "cabledyn/io.hpp"
#include "cabledyn/sim.hpp"
#include "cabledyn/spectral.hpp"

namespace cabledyn::reports {

using io::CsvTable;
using io::Json;

inline CsvTable record_table(const sim::SimRecord& rec) {
    CsvTable t({"t", "Fx1", "Fy1", "Fz1", "Fx2", "Fy2", "Fz2", "taut"});
    for (std::size_t k = 0; k < rec.size(); ++k) {
        const auto& a = rec.force_first[k];
        const auto& b = rec.force_second[k];
        t.add_row({rec.times[k], a.x(), a.y(), a.z(), b.x(), b.y(), b.z(),
                   rec.regime[k] == sim::Regime::taut ? 1.0 : 0.0});
    }
    return t;
}

/// Long format: one row per node and sample.
inline CsvTable positions_table(const sim::SimRecord& rec) {
    CsvTable t({"t", "node", "x", "y", "z"});
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
        const auto& pos = rec.states[k].positions;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            t.add_row({rec.times[k], static_cast<double>(i), pos[i].x(), pos[i].y(), pos[i].z()});
        }
    }
    return t;
}

inline CsvTable convergence_table(const std::vector<analysis::ConvergenceRow>& rows, const std::string& parameter) {
    CsvTable t({parameter, "diverged", "midpoint", "average", "max", "dFx1", "dFy1", "dFz1", "dFx2", "dFy2",
                "dFz2", "Fx1", "Fy1", "Fz1", "Fx2", "Fy2", "Fz2"});
    for (const auto& r : rows) {
        std::vector<double> v{r.parameter, r.diverged ? 1.0 : 0.0, r.geometry.midpoint, r.geometry.average,
                              r.geometry.max};
        v.insert(v.end(), r.force_deviation.begin(), r.force_deviation.end());
        v.insert(v.end(), r.force.begin(), r.force.end());
        t.add_row(v);
    }
    return t;
}

inline Json convergence_runtimes(const std::vector<analysis::ConvergenceRow>& rows, const std::string& parameter) {
    Json a = Json::array();
    for (const auto& r : rows) a.push_back({{parameter, r.parameter}, {"runtime_s", r.geometry.runtime}});
    return a;
}

/// Grid in the long format d,E,Fx1,Fy1,Fx2,Fy2,X_mid.
inline CsvTable material_grid_table(const std::vector<analysis::SweepCell>& cells) {
    CsvTable t({"d", "E", "Fx1", "Fy1", "Fx2", "Fy2", "X_mid"});
    for (const auto& c : cells) {
        t.add_row({c.d, c.E, c.force_first.x(), c.force_first.y(), c.force_second.x(), c.force_second.y(), c.x_mid});
    }
    return t;
}

inline CsvTable material_cells_table(const std::vector<analysis::SweepCell>& cells) {
    CsvTable t({"d", "E", "dt", "diverged", "steady", "Fz1", "Fz2"});
    for (const auto& c : cells) {
        t.add_row({c.d, c.E, c.dt, c.diverged ? 1.0 : 0.0, c.steady ? 1.0 : 0.0, c.force_first.z(),
                   c.force_second.z()});
    }
    return t;
}

inline CsvTable length_shapes_table(const analysis::LengthSweepResult& res) {
    CsvTable t({"L", "station", "x", "y", "z", "x_norm", "y_norm", "z_norm"});
    for (const auto& r : res.rows) {
        for (std::size_t k = 0; k < r.configuration.size(); ++k) {
            const auto& p = r.configuration[k];
            const auto& q = r.normalized[k];
            t.add_row({r.length, static_cast<double>(k), p.x(), p.y(), p.z(), q.x(), q.y(), q.z()});
        }
    }
    return t;
}

inline CsvTable length_summary_table(const analysis::LengthSweepResult& res) {
    CsvTable t({"L", "mid_x_norm", "mid_y_norm", "mid_z_norm", "Fx1", "Fy1", "Fz1", "Fx2", "Fy2", "Fz2"});
    for (const auto& r : res.rows) {
        const auto& m = r.midpoint_normalized;
        t.add_row({r.length, m.x(), m.y(), m.z(), r.force_first.x(), r.force_first.y(), r.force_first.z(),
                   r.force_second.x(), r.force_second.y(), r.force_second.z()});
    }
    return t;
}

inline CsvTable eigenvalue_table(const spectral::SpectralReport& r) {
    CsvTable t({"rank", "re", "im", "magnitude", "phase", "stable"});
    for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
        const auto& l = r.eigenvalues[k];
        t.add_row({static_cast<double>(k), l.real(), l.imag(), std::abs(l), r.phases[k], r.stable[k] ? 1.0 : 0.0});
    }
    return t;
}

/// Per dominant mode and node: position and force influence by axis.
inline CsvTable influence_table(const spectral::SpectralReport& r) {
    CsvTable t({"mode", "node", "px", "py", "pz", "fx", "fy", "fz", "f_norm"});
    for (std::size_t m = 0; m < r.dominant.size(); ++m) {
        const auto& mode = r.dominant[m];
        for (Eigen::Index i = 0; i < mode.force.rows(); ++i) {
            t.add_row({static_cast<double>(m), static_cast<double>(i), mode.position(i, 0), mode.position(i, 1),
                       mode.position(i, 2), mode.force(i, 0), mode.force(i, 1), mode.force(i, 2),
                       mode.force.row(i).norm()});
        }
    }
    return t;
}

inline Json spectral_summary(const spectral::SpectralReport& r, double time, double chord, int node_count) {
    Json modes = Json::array();
    for (const auto& m : r.dominant) {
        modes.push_back({{"re", m.eigenvalue.real()},
                         {"im", m.eigenvalue.imag()},
                         {"magnitude", m.magnitude},
                         {"phase", m.phase},
                         {"force_argmax_node", m.force_argmax_node}});
    }
    return {{"time", time},
            {"chord", chord},
            {"dimension", r.dimension()},
            {"spectral_radius", r.spectral_radius},
            {"max_dominant_phase", r.max_dominant_phase},
            {"max_dominant_stable_phase", r.max_dominant_stable_phase},
            {"influence_argmax_node", r.influence_argmax_node},
            {"influence_endpoint_adjacent", spectral::endpoint_adjacent(r.influence_argmax_node, node_count)},
            {"dominant", modes}};
}

inline CsvTable ga_history_table(const identify::IdentifyResult& res, bool added_mass) {
    std::vector<std::string> h{"generation", "best_fitness", "mean_fitness", "E", "C_n", "C_t"};
    if (added_mass) h.push_back("k_a");
    CsvTable t(h);
    for (const auto& g : res.history) {
        std::vector<double> v{static_cast<double>(g.generation), g.best_fitness, g.mean_fitness,
                              g.best.youngs_modulus, g.best.normal_drag_coeff, g.best.tangential_drag_coeff};
        if (added_mass) v.push_back(g.best.added_mass_coeff.value_or(0.0));
        t.add_row(v);
    }
    return t;
}

inline CsvTable dataset_table(const identify::Dataset& data) {
    CsvTable t({"X_d", "Y_d", "speed", "Fx1", "Fy1", "Fz1", "Fx2", "Fy2", "Fz2"});
    for (const auto& s : data) {
        t.add_row({s.x_d, s.y_d, s.speed, s.force_first.x(), s.force_first.y(), s.force_first.z(),
                   s.force_second.x(), s.force_second.y(), s.force_second.z()});
    }
    return t;
}

inline Json channel_json(const identify::ChannelStats& st) {
    static const char* names[6] = {"Fx1", "Fy1", "Fz1", "Fx2", "Fy2", "Fz2"};
    Json j = Json::object();
    for (int c = 0; c < 6; ++c) j[names[c]] = {{"rmse", st.rmse[c]}, {"mse", st.mse[c]}};
    return j;
}

}  // namespace cabledyn::reports
