// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cabledyn/cabledyn.hpp"

using namespace cabledyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Detail {
public:
    template <class... A>
    Detail& add(const char* f, A... a) {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, a...);
        if (!text_.empty()) text_ += "; ";
        text_ += buf;
        return *this;
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

config::RunConfig preset(const std::string& name) {
    return config::load_config((fs::path(CABLEDYN_PRESET_DIR) / (name + ".json")).string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. spatial convergence against n = 70
Outcome spatial() {
    const auto cfg = preset("paper-4.1-spatial");
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = analysis::spatial_convergence(cfg.scenario, *cfg.analysis->spatial);
    const double runtime = seconds_since(t0);
    Detail d;
    bool monotone = true, small = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        d.add("n=%g avg=%.4g", rows[k].parameter, rows[k].geometry.average);
        if (k > 0 && !(rows[k].geometry.average < rows[k - 1].geometry.average)) monotone = false;
        if (rows[k].parameter >= 30 && !(rows[k].geometry.average < 0.02)) small = false;
    }
    d.add("monotone=%d below_0.02_for_n>=30=%d runtime=%.1fs", monotone, small, runtime);
    return {monotone && small && runtime < 300.0, d.str()};
}

// 2. temporal convergence against dt = 1e-5
Outcome temporal() {
    const auto cfg = preset("converge-time");
    const auto rows = analysis::temporal_convergence(cfg.scenario, *cfg.analysis->temporal);
    Detail d;
    bool coarse_diverges = false, strict = true;
    double at_1e3 = std::numeric_limits<double>::quiet_NaN();
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        d.add("dt=%g %s max=%.3g", r.parameter, r.diverged ? "diverged" : "ok", r.geometry.max);
        if (std::abs(r.parameter - 0.1) < 1e-12) coarse_diverges = r.diverged;
        if (std::abs(r.parameter - 1e-3) < 1e-15) at_1e3 = r.geometry.max;
        if (r.diverged) continue;
        if (!(r.geometry.max < prev)) strict = false;
        prev = r.geometry.max;
    }
    const bool close = at_1e3 < 5e-3;
    d.add("dt=0.1 diverges=%d max(1e-3)<5e-3=%d strictly_decreasing=%d", coarse_diverges, close, strict);
    return {coarse_diverges && close && strict, d.str()};
}

// 3. GA round trip on a noiseless synthetic dataset
Outcome identification() {
    auto cfg = preset("identify");
    const auto& sec = *cfg.identify;
    identify::Dataset layout;
    for (const auto& [x, y] : sec.separations) layout.push_back({x, y, sec.speed});
    const identify::ParamVector truth = *sec.truth;
    const auto data = identify::synthesize(truth, layout, cli::synthesis_model(cfg), 0.0, sec.noise_seed);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = identify::identify(data, *cfg.ga, config::model_config(cfg));
    const double runtime = seconds_since(t0);

    // E is searched on a log axis, so its 5 % band is symmetric there: |ln(E/E0)| <= ln 1.05
    const double e_lin = res.best.youngs_modulus / truth.youngs_modulus - 1.0;
    const double e_log = std::abs(std::log(res.best.youngs_modulus / truth.youngs_modulus));
    const double cn = std::abs(res.best.normal_drag_coeff / truth.normal_drag_coeff - 1.0);
    const double ct = std::abs(res.best.tangential_drag_coeff / truth.tangential_drag_coeff - 1.0);
    bool monotone = true;
    for (std::size_t g = 1; g < res.history.size(); ++g) {
        if (res.history[g].best_fitness > res.history[g - 1].best_fitness) monotone = false;
    }
    Detail d;
    d.add("samples=%zu E=%.5g (rel %+.2f%%, |ln ratio| %.4f vs %.4f) Cn=%.5g (%.2f%%) Ct=%.5g (%.2f%%)",
          data.size(), res.best.youngs_modulus, 100 * e_lin, e_log, std::log(1.05), res.best.normal_drag_coeff,
          100 * cn, res.best.tangential_drag_coeff, 100 * ct);
    d.add("fitness=%.3g monotone=%d evaluations=%ld runtime=%.0fs", res.best_fitness, monotone, res.evaluations,
          runtime);
    const bool pass =
        data.size() == 12 && e_log <= std::log(1.05) && cn < 0.05 && ct < 0.10 && monotone && runtime < 1200.0;
    return {pass, d.str()};
}

// 4. force-model properties
Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
}

Outcome properties() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    cable::CableProperties p;
    Detail d;

    bool third_law = true;
    for (int k = 0; k < 10000; ++k) {
        const Vec3 unit = Vec3(u(rng), u(rng), u(rng)).normalized();
        const double strain = 0.1 * (u(rng) + 1.0);
        const Vec3 t = cable::segment_tension(p, unit, strain);
        if (t + (-t) != Vec3::Zero()) third_law = false;
    }
    // the assembled forces must also cancel: with no drag, gravity or bending, they sum to zero
    {
        cable::CableProperties q = p;
        q.bending_stiffness = 0.0;
        q.node_count = 12;
        std::vector<Vec3> pos;
        for (int i = 0; i < q.node_count; ++i) {
            pos.push_back(i * 1.05 * q.rest_length() * Vec3::UnitX() + 0.05 * Vec3(u(rng), u(rng), u(rng)));
        }
        const std::vector<Vec3> vel(q.node_count, Vec3::Zero());
        cable::NodalForces nf;
        cable::compute_nodal_forces(q, pos, vel, 0.0, cable::still_water(), nf);
        Vec3 sum = Vec3::Zero();
        double scale = 0.0;
        for (const auto& f : nf.force) sum += f, scale += f.norm();
        if (!(sum.norm() <= 1e-12 * scale)) third_law = false;
    }
    d.add("third_law=%d", third_law);

    bool dissipative = true;
    for (int k = 0; k < 10000; ++k) {
        const Vec3 v = 2.0 * Vec3(u(rng), u(rng), u(rng)), j = Vec3(u(rng), u(rng), u(rng));
        const Vec3 unit = Vec3(u(rng), u(rng), u(rng)).normalized();
        const Vec3 f = cable::drag_force(p, v, j, unit, 0.05 * (u(rng) + 1.0), 0.5 * (u(rng) + 1.0) + 0.01);
        if (f.dot(v - j) > 0.0) dissipative = false;
    }
    d.add("drag_dissipative=%d", dissipative);

    bool one_sided = true;
    for (int k = 0; k < 1000; ++k) {
        const double l0 = 0.5 * (u(rng) + 1.0) + 0.01;
        const double short_len = l0 * (0.5 + 0.49 * (u(rng) + 1.0) / 2.0);
        const double long_len = l0 * (1.0 + 0.1 * (u(rng) + 1.0) + 1e-6);
        const Vec3 unit = Vec3(u(rng), u(rng), u(rng)).normalized();
        if (cable::segment_strain(short_len, l0) != 0.0) one_sided = false;
        if (cable::segment_tension(p, unit, cable::segment_strain(short_len, l0)) != Vec3::Zero()) one_sided = false;
        if (!(cable::segment_strain(long_len, l0) > 0.0)) one_sided = false;
        if (!(cable::segment_tension(p, unit, cable::segment_strain(long_len, l0)).dot(unit) > 0.0)) one_sided = false;
    }
    d.add("one_sided_strain=%d", one_sided);

    double frame_err = 0.0;
    {
        cable::CableProperties q = p;
        q.node_count = 9;
        q.cable_density = 1300.0;
        q.bending_stiffness = 0.05;
        std::vector<Vec3> pos, vel;
        const Vec3 dir = Vec3(1, 0.2, 0.1).normalized();
        for (int i = 0; i < q.node_count; ++i) {
            pos.push_back(i * 1.01 * q.rest_length() * dir + 0.3 * Vec3(u(rng), u(rng), u(rng)));
            vel.push_back(0.3 * Vec3(u(rng), u(rng), u(rng)));
        }
        const Vec3 water(0.2, -0.1, 0.05);
        cable::NodalForces base;
        cable::compute_nodal_forces(q, pos, vel, 0.0, cable::uniform_current(water), base);
        for (int k = 0; k < 100; ++k) {
            const Mat3 r = random_rotation(rng);
            cable::CableProperties qr = q;
            qr.gravity = r * q.gravity;
            std::vector<Vec3> rp, rv;
            for (std::size_t i = 0; i < pos.size(); ++i) rp.push_back(r * pos[i]), rv.push_back(r * vel[i]);
            cable::NodalForces rot;
            cable::compute_nodal_forces(qr, rp, rv, 0.0, cable::uniform_current(r * water), rot);
            for (std::size_t i = 0; i < pos.size(); ++i) {
                const Vec3 expected = r * base.force[i];
                frame_err = std::max(frame_err, (rot.force[i] - expected).norm() / std::max(1.0, expected.norm()));
            }
        }
    }
    d.add("frame_rel_err=%.2g", frame_err);

    double collinear = 0.0;
    {
        cable::CableProperties q = p;
        q.bending_stiffness = 0.7;
        for (int k = 0; k < 1000; ++k) {
            const Vec3 dir = Vec3(u(rng), u(rng), u(rng)).normalized();
            const Vec3 o = Vec3(u(rng), u(rng), u(rng));
            std::vector<Vec3> line;
            for (int i = 0; i < 4; ++i) line.push_back(o + i * 0.3 * dir);
            std::vector<Vec3> rev(line.rbegin(), line.rend());
            collinear = std::max({collinear,
                                  cable::bending_force(q, std::span(line).first(3), cable::NodeRole::interior).norm(),
                                  cable::bending_force(q, line, cable::NodeRole::left_boundary).norm(),
                                  cable::bending_force(q, rev, cable::NodeRole::right_boundary).norm()});
        }
    }
    d.add("collinear_bending_max=%.2g", collinear);

    double skew = 0.0;
    {
        auv::AuvHydroParams h;
        h.y_rdot = 0.4;
        h.n_vdot = 0.4;
        h.z_qdot = -0.3;
        h.m_wdot = -0.3;
        for (int k = 0; k < 10000; ++k) {
            Vec6 nu;
            for (int i = 0; i < 6; ++i) nu[i] = 3.0 * u(rng);
            const Mat6 c = auv::coriolis_added_mass(h, nu);
            skew = std::max(skew, std::abs(nu.dot(c * nu)) / (1.0 + c.norm() * nu.squaredNorm()));
        }
    }
    d.add("max|nu^T C_A nu|_rel=%.2g", skew);

    const bool pass = third_law && dissipative && one_sided && frame_err < 1e-8 && collinear < 1e-12 && skew < 1e-12;
    return {pass, d.str()};
}

// 5. material sweep slices
Outcome material() {
    const auto cfg = preset("sweep-material");
    analysis::MaterialSweepSpec d_slice = *cfg.analysis->material;
    d_slice.E_values = {3.68e6};
    d_slice.d_values.clear();
    analysis::MaterialSweepSpec e_slice = *cfg.analysis->material;
    e_slice.d_values = {cfg.scenario.cable.diameter};
    e_slice.E_values.clear();
    const auto dc = analysis::material_sweep(cfg.scenario, d_slice);
    const auto ec = analysis::material_sweep(cfg.scenario, e_slice);
    Detail det;

    std::size_t imin = 0;
    bool finite = true;
    for (std::size_t k = 0; k < dc.size(); ++k) {
        det.add("d=%.3g X=%.4f", dc[k].d, dc[k].x_mid);
        if (!std::isfinite(dc[k].x_mid)) finite = false;
        if (dc[k].x_mid < dc[imin].x_mid) imin = k;
    }
    const bool interior = finite && imin > 0 && imin + 1 < dc.size();
    det.add("argmin d=%.3g interior=%d", dc[imin].d, interior);

    bool nondecreasing = true, saturated = true;
    for (std::size_t k = 0; k < ec.size(); ++k) {
        det.add("E=%.3g X=%.4f", ec[k].E, ec[k].x_mid);
        if (!std::isfinite(ec[k].x_mid)) nondecreasing = false;
        if (k == 0) continue;
        if (ec[k].x_mid < ec[k - 1].x_mid) nondecreasing = false;
        if (ec[k - 1].E >= 1e8 * (1 - 1e-12)) {
            const double rel = std::abs(ec[k].x_mid - ec[k - 1].x_mid) / std::abs(ec[k - 1].x_mid);
            if (!(rel < 0.01)) saturated = false;
        }
    }
    det.add("E slice at d=%.3g non-decreasing=%d saturated_above_1e8=%d", cfg.scenario.cable.diameter, nondecreasing,
            saturated);
    return {interior && nondecreasing && saturated, det.str()};
}

// 6. similarity across cable lengths
Outcome similarity() {
    const auto cfg = preset("sweep-length");
    analysis::LengthSweepSpec a = *cfg.analysis->length;
    a.lateral_fraction = 0.5;
    a.longitudinal_fraction = 0.0;
    analysis::LengthSweepSpec b = a;
    b.lateral_fraction = 0.8;
    b.longitudinal_fraction = 0.3;
    const auto ra = analysis::length_sweep(cfg.scenario, a);
    const auto rb = analysis::length_sweep(cfg.scenario, b);
    Detail d;
    d.add("spread(0.5L,0)=%.4f spread(0.8L,0.3L)=%.4f", ra.spread, rb.spread);
    return {ra.spread < 0.05 && rb.spread > ra.spread, d.str()};
}

// 7. horizontal to vertical formation transition
Outcome transition() {
    const auto cfg = preset("paper-4.4-transition");
    const auto scenario = cfg.scenario.build(true);
    const auto rec = sim::run_scenario(scenario);
    const auto& first = cfg.scenario.first;
    const double shift_start = first.shift_start;
    const double shift_end = first.shift_start + first.shift_duration;
    const double t_end = rec.times.back();

    auto mean = [&](const std::vector<Vec3>& f, double from, double to) {
        Vec3 s = Vec3::Zero();
        int n = 0;
        for (std::size_t k = 0; k < rec.size(); ++k) {
            if (rec.times[k] >= from - 1e-9 && rec.times[k] <= to + 1e-9) s += f[k], ++n;
        }
        return Vec3(s / std::max(n, 1));
    };
    auto tension = [&](std::size_t k) { return std::max(rec.force_first[k].norm(), rec.force_second[k].norm()); };
    Detail d;

    // (a) horizontal phase: the last 10 s before the shift
    const Vec3 h1 = mean(rec.force_first, shift_start - 10.0, shift_start);
    const Vec3 h2 = mean(rec.force_second, shift_start - 10.0, shift_start);
    const double asym = std::abs(h1.y() + h2.y()) / std::max(std::abs(h1.y()), std::abs(h2.y()));
    const bool a = h1.y() * h2.y() < 0.0 && asym < 0.02;
    d.add("(a) Fy1=%.2f Fy2=%.2f mismatch=%.3f%% pass=%d", h1.y(), h2.y(), 100 * asym, a);

    // (b) slack minimum during the shift, then a peak above the final level
    std::size_t k_slack = 0;
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rec.size(); ++k) {
        if (rec.times[k] >= shift_start && rec.times[k] <= shift_end && tension(k) < slack) {
            slack = tension(k);
            k_slack = k;
        }
    }
    const double window_end = shift_end + 2.0 * first.shift_ramp;
    std::size_t k_peak = k_slack;
    for (std::size_t k = k_slack; k < rec.size() && rec.times[k] <= window_end; ++k) {
        if (tension(k) > tension(k_peak)) k_peak = k;
    }
    const Vec3 f1_end = mean(rec.force_first, t_end - 10.0, t_end);
    const Vec3 f2_end = mean(rec.force_second, t_end - 10.0, t_end);
    const double final_level = std::max(f1_end.norm(), f2_end.norm());
    const bool b = tension(k_peak) > 1.05 * final_level && tension(k_peak) > slack;
    d.add("(b) slack %.1f N at t=%.1f, peak %.1f N at t=%.1f, final %.1f N, pass=%d", slack, rec.times[k_slack],
          tension(k_peak), rec.times[k_peak], final_level, b);

    // (c) z is down: the lower vehicle in the plotted domain has the smaller z
    const auto& end = rec.states.back().positions;
    const bool second_lower = end.back().z() < end.front().z();
    const Vec3& lo = second_lower ? f2_end : f1_end;
    const Vec3& hi = second_lower ? f1_end : f2_end;
    const bool c = std::abs(lo.x()) > std::abs(hi.x()) && std::abs(lo.z()) > std::abs(hi.z());
    d.add("(c) lower=AUV%d |Fx| %.1f vs %.1f, |Fz| %.1f vs %.1f, pass=%d", second_lower ? 2 : 1, std::abs(lo.x()),
          std::abs(hi.x()), std::abs(lo.z()), std::abs(hi.z()), c);
    return {a && b && c, d.str()};
}

// 8. eigensolver validation and slack/taut spectra
Outcome spectra() {
    Detail d;
    double err = 0.0;
    for (double theta : {0.3, 1.1, 2.5}) {
        Eigen::MatrixXd r(2, 2);
        r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        const auto rep = spectral::spectral_report(r);
        for (const auto& l : rep.eigenvalues) {
            err = std::max(err, std::abs(l - std::polar(1.0, l.imag() > 0 ? theta : -theta)));
        }
    }
    {
        // companion matrix of (z - 0.5)(z + 0.8)(z^2 - 2 0.9 cos(1) z + 0.81)
        const std::vector<std::complex<double>> roots{0.5, -0.8, std::polar(0.9, 1.0), std::polar(0.9, -1.0)};
        std::vector<std::complex<double>> c{1.0};
        for (const auto& z : roots) {
            std::vector<std::complex<double>> n(c.size() + 1, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i) n[i] += c[i], n[i + 1] -= z * c[i];
            c = n;
        }
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
        for (int j = 0; j < 4; ++j) m(0, j) = -c[j + 1].real();
        for (int i = 1; i < 4; ++i) m(i, i - 1) = 1.0;
        const auto rep = spectral::spectral_report(m);
        for (const auto& z : roots) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& l : rep.eigenvalues) best = std::min(best, std::abs(l - z) / std::abs(z));
            err = std::max(err, best);
        }
    }
    const bool solver = err < 1e-8;
    d.add("eigensolver rel err=%.2g", err);

    const auto cfg = preset("paper-4.5-spectral");
    const auto scenario = cfg.scenario.build(true);
    const auto rec = sim::run_scenario(scenario);
    const auto& sec = *cfg.analysis->spectral;
    const auto [slack_idx, taut_idx] = spectral::select_snapshots(rec, sec.selection);
    const int n = scenario.cable.node_count;
    auto analyze = [&](std::size_t idx) {
        return spectral::analyze_snapshot(rec.states[idx], scenario.cable, scenario.current, scenario.integrator,
                                          sec.linearize, sec.options);
    };
    const auto slack = analyze(slack_idx);
    const auto taut = analyze(taut_idx);
    const bool ordering = taut.max_dominant_stable_phase > slack.max_dominant_stable_phase;
    const bool ends = spectral::endpoint_adjacent(slack.influence_argmax_node, n) &&
                      spectral::endpoint_adjacent(taut.influence_argmax_node, n);
    d.add("slack t=%.1f stable phase=%.4f argmax node=%d", rec.times[slack_idx], slack.max_dominant_stable_phase,
          slack.influence_argmax_node);
    d.add("taut t=%.1f stable phase=%.4f argmax node=%d", rec.times[taut_idx], taut.max_dominant_stable_phase,
          taut.influence_argmax_node);
    d.add("taut>slack=%d endpoint_adjacent=%d", ordering, ends);
    return {solver && ordering && ends, d.str()};
}

// 9. byte-identical outputs across repeated runs and worker caps
std::map<std::string, std::string> csv_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") out[e.path().filename().string()] = io::read_file(e.path());
    }
    return out;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "cabledyn_acceptance_determinism";
    fs::remove_all(root);
    using Command = std::function<int(const config::RunConfig&, const std::string&)>;
    const std::vector<std::pair<std::string, Command>> runs{
        {"paper-4.4-transition", cli::simulate},
        {"paper-4.5-spectral", cli::spectral},
        {"sweep-length", cli::sweep_length},
        {"identify", cli::identify_synthesize},
    };
    Detail d;
    bool pass = true;
    for (const auto& [name, command] : runs) {
        auto cfg = preset(name);
        if (cfg.identify) {
            cfg.identify->noise = 0.05;
            cfg.identify->noise_seed = 99;
        }
        std::map<std::string, std::string> outputs[2];
        for (int r = 0; r < 2; ++r) {
            if (r == 1) setenv("CABLEDYN_THREADS", "1", 1);
            const fs::path dir = root / (name + "-" + std::to_string(r));
            const int code = command(cfg, dir.string());
            unsetenv("CABLEDYN_THREADS");
            if (code != 0) pass = false;
            outputs[r] = csv_files(dir);
        }
        const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
        d.add("%s: %zu csv identical=%d", name.c_str(), outputs[0].size(), same);
        pass = pass && same;
    }
    fs::remove_all(root);
    return {pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"spatial convergence", spatial},       {"temporal convergence", temporal},
        {"identification round trip", identification}, {"force-model properties", properties},
        {"material sweep", material},           {"length similarity", similarity},
        {"formation transition", transition},   {"slack/taut spectra", spectra},
        {"determinism", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
