#include "fmo/io.hpp"

#include <cstdio>
#include <iterator>
#include <set>
#include <sstream>

namespace fmo {

namespace {

Json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename M>
Json mat(const M& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index k = 0; k < m.cols(); ++k) r[static_cast<std::size_t>(k)] = m(i, k);
        rows.push_back(r);
    }
    return rows;
}

template <typename M>
M mat_from(const Json& j, const char* what) {
    M m;
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != m.rows()) {
        throw ValidationError(std::string(what) + ": expected " + std::to_string(m.rows()) + " rows");
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const auto& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != m.cols()) {
            throw ValidationError(std::string(what) + ": expected " + std::to_string(m.cols()) + " columns");
        }
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = r[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

double number(const Json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) throw ValidationError(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) throw ValidationError(where + ": unknown key '" + item.key() + "'");
    }
}

Json to_json(const PulseParams& p) {
    return Json{{"e0", p.e0},
                {"t0", p.t0},
                {"sigma", p.sigma},
                {"a", vec(p.a)},
                {"b", vec(p.b)},
                {"nu", vec(p.nu)},
                {"omega_l", p.omega_l},
                {"dtheta", p.dtheta},
                {"dphi", p.dphi},
                {"dtheta_wrapped", wrap_angle(p.dtheta)},
                {"dphi_wrapped", wrap_angle(p.dphi)},
                {"t_total", p.t_total},
                {"m", p.harmonics()},
                {"seed", p.seed}};
}

PulseParams pulse_from_json(const Json& j) {
    require_keys(j, {"e0", "t0", "sigma", "a", "b", "nu", "omega_l", "dtheta", "dphi", "dtheta_wrapped",
                     "dphi_wrapped", "t_total", "m", "seed"},
                 "pulse");
    PulseParams p;
    p.e0 = number(j, "e0");
    p.t0 = number(j, "t0");
    p.sigma = number(j, "sigma");
    p.a = vec_from(j.at("a"));
    p.b = vec_from(j.at("b"));
    p.nu = vec_from(j.at("nu"));
    p.omega_l = number(j, "omega_l");
    p.dtheta = number(j, "dtheta");
    p.dphi = number(j, "dphi");
    p.t_total = number(j, "t_total");
    p.seed = j.value("seed", std::uint64_t{0});
    if (p.a.size() != p.b.size() || p.a.size() != p.nu.size()) {
        throw ValidationError("pulse: a, b and nu must have the same length");
    }
    if (j.contains("m") && j.at("m").get<long>() != p.a.size()) throw ValidationError("pulse: m does not match a");
    return p;
}

Json to_json(const OptimizationResult& r) {
    Json restarts = Json::array();
    for (const auto& rec : r.restarts) {
        restarts.push_back(Json{{"index", rec.index},
                                {"seed", rec.seed},
                                {"initial", to_json(rec.initial)},
                                {"final", to_json(rec.final_params)},
                                {"final_cost", rec.final_cost},
                                {"search_cost", rec.search_cost},
                                {"evaluations", rec.evaluations},
                                {"converged", rec.converged}});
    }
    Json curve = Json::array();
    for (const auto& [e, c] : r.learning_curve) curve.push_back(Json::array({e, c}));
    return Json{{"best_params", to_json(r.best_params)},
                {"best_cost", r.best_cost},
                {"evaluations_total", r.evaluations_total},
                {"restarts", restarts},
                {"learning_curve", curve}};
}

OptimizationResult result_from_json(const Json& j) {
    require_keys(j, {"best_params", "best_cost", "evaluations_total", "restarts", "learning_curve"}, "result");
    OptimizationResult r;
    r.best_params = pulse_from_json(j.at("best_params"));
    r.best_cost = number(j, "best_cost");
    r.evaluations_total = j.at("evaluations_total").get<long>();
    for (const auto& x : j.at("restarts")) {
        require_keys(x, {"index", "seed", "initial", "final", "final_cost", "search_cost", "evaluations", "converged"},
                     "restart");
        RestartRecord rec;
        rec.index = x.at("index").get<int>();
        rec.seed = x.at("seed").get<std::uint64_t>();
        rec.initial = pulse_from_json(x.at("initial"));
        rec.final_params = pulse_from_json(x.at("final"));
        rec.final_cost = number(x, "final_cost");
        rec.search_cost = number(x, "search_cost");
        rec.evaluations = x.at("evaluations").get<long>();
        rec.converged = x.at("converged").get<bool>();
        r.restarts.push_back(std::move(rec));
    }
    for (const auto& point : j.at("learning_curve")) r.learning_curve.emplace_back(point[0].get<long>(), point[1].get<double>());
    return r;
}

Json to_json(const ModelOverrides& o) {
    Json j = Json::object();
    if (o.dephasing) j["dephasing"] = *o.dephasing;
    if (o.dissipation) j["dissipation"] = *o.dissipation;
    if (o.sink_rate) j["sink_rate"] = *o.sink_rate;
    if (o.hamiltonian) j["hamiltonian"] = mat(*o.hamiltonian);
    if (o.dipoles) j["dipoles"] = mat(*o.dipoles);
    return j;
}

ModelOverrides overrides_from_json(const Json& j) {
    require_keys(j, {"dephasing", "dissipation", "sink_rate", "hamiltonian", "dipoles"}, "model");
    ModelOverrides o;
    if (j.contains("dephasing")) o.dephasing = number(j, "dephasing");
    if (j.contains("dissipation")) o.dissipation = number(j, "dissipation");
    if (j.contains("sink_rate")) o.sink_rate = number(j, "sink_rate");
    if (j.contains("hamiltonian")) o.hamiltonian = mat_from<Matrix7d>(j.at("hamiltonian"), "model.hamiltonian");
    if (j.contains("dipoles")) o.dipoles = mat_from<DipoleTable>(j.at("dipoles"), "model.dipoles");
    return o;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

PulseParams load_pulse(const std::filesystem::path& path) {
    const Json j = read_json(path);
    // Accept either a bare pulse or an optimization result.
    if (j.contains("best_params")) return pulse_from_json(j.at("best_params"));
    return pulse_from_json(j);
}

void save_pulse(const std::filesystem::path& path, const PulseParams& p) { write_json(path, to_json(p)); }

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::vector<std::string> header{"t_ps"};
    for (int i = 0; i < kLevels; ++i) header.push_back("rho_" + std::to_string(i) + std::to_string(i));
    const std::pair<int, int> coherences[] = {{1, 2}, {3, 4}, {5, 6}};
    for (auto [a, b] : coherences) {
        header.push_back("re_rho_" + std::to_string(a) + std::to_string(b));
        header.push_back("im_rho_" + std::to_string(a) + std::to_string(b));
    }
    header.push_back("p_sink");
    CsvWriter csv(path, header);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const DensityMatrix& rho = traj.states[k];
        std::vector<double> r{traj.times[k]};
        for (int i = 0; i < kLevels; ++i) r.push_back(rho(i, i).real());
        for (auto [a, b] : coherences) {
            r.push_back(rho(a, b).real());
            r.push_back(rho(a, b).imag());
        }
        r.push_back(traj.p_sink[k]);
        csv.row(r);
    }
}

void write_envelope_csv(const std::filesystem::path& path, const PulseParams& p, int samples) {
    CsvWriter csv(path, {"t_fs", "f", "E"});
    for (int i = 0; i < samples; ++i) {
        const double t = p.t_total * i / (samples - 1);
        const double f = crab_envelope(t, p);
        csv.row({t * 1000.0, f, p.e0 * f});
    }
}

void write_histogram_csv(const std::filesystem::path& path, const EnsembleDistribution& d) {
    CsvWriter csv(path, {"bin_lo", "bin_hi", "density"});
    for (std::size_t b = 0; b < d.bins(); ++b) csv.row({d.edges[b], d.edges[b + 1], d.densities[b]});
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<Orientation>& orientations,
                       const std::vector<double>& values) {
    CsvWriter csv(path, {"index", "theta", "phi", "value"});
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv.row({static_cast<double>(i), orientations[i].theta, orientations[i].phi, values[i]});
    }
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::vector<std::string> header{"row"};
    for (Eigen::Index k = 0; k < m.cols(); ++k) header.push_back("c" + std::to_string(k));
    CsvWriter csv(path, header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r{static_cast<double>(i)};
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        csv.row(r);
    }
}

void write_grid_csv(const std::filesystem::path& path, const AngleGrid& g) {
    CsvWriter csv(path, {"theta", "phi", "value"});
    for (Eigen::Index i = 0; i < g.theta.size(); ++i) {
        for (Eigen::Index j = 0; j < g.phi.size(); ++j) csv.row({g.theta(i), g.phi(j), g.values(i, j)});
    }
}

std::uint64_t hash_files(const std::vector<std::filesystem::path>& files) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw ValidationError("cannot read " + f.string());
        for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
            h ^= static_cast<unsigned char>(*it);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace fmo
