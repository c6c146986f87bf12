#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steinflow/core.hpp"
#include "steinflow/dynamics.hpp"
#include "steinflow/kernels.hpp"
#include "steinflow/metrics.hpp"
#include "steinflow/targets.hpp"

namespace steinflow {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// config schema

struct KernelConfig {
    std::string kind = "p_exponential";  // p_exponential | weighted_matern | polynomial | sum
    double p = 2.0;
    std::optional<double> sigma;  // absent means "median"
    bool offset = true;
    std::vector<std::pair<double, KernelConfig>> terms;

    static KernelConfig from_json(const json& j);
    json to_json() const;
};

struct TargetConfig {
    std::string kind = "paper_1d";  // gaussian | gaussian_mixture | paper_1d | paper_2d
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<std::vector<double>>> covs;

    static TargetConfig from_json(const json& j);
    TargetModel build() const;
};

enum class DynamicsKind { Deterministic, Stochastic, Langevin };

struct ExperimentConfig {
    TargetConfig target;
    KernelConfig kernel;
    Eigen::Index n_particles = 200;
    double t_end = 2000.0;
    IntegratorConfig integrator;
    DynamicsKind dynamics = DynamicsKind::Deterministic;
    double sde_dt = 0.01;
    std::string init_kind = "standard_normal";  // standard_normal | gaussian
    std::vector<double> init_mean;
    std::vector<std::vector<double>> init_cov;
    std::uint64_t seed = 0;
    std::vector<double> record_times;  // explicit schedule; else use record_count
    int record_count = 20;
    Eigen::Index reference_samples = 100000;
    std::string w1_method = "exact1d";  // exact1d | assign | sinkhorn
    Eigen::Index assign_subsample = 512;
    double sinkhorn_eps = 0.01;
    Eigen::Index sinkhorn_reference = 2048;
    int histogram_bins = 80;
    std::string output_dir = "out";

    static ExperimentConfig from_json(const json& j);
    static ExperimentConfig from_file(const std::string& path);
    json to_json() const;
};

// ---------------------------------------------------------------------------

inline KernelConfig KernelConfig::from_json(const json& j) {
    KernelConfig c;
    if (!j.contains("kind")) throw ConfigError("kernel: missing 'kind'");
    c.kind = j.at("kind").get<std::string>();
    if (c.kind == "p_exponential") {
        c.p = j.value("p", 2.0);
        if (j.contains("sigma")) {
            const auto& s = j.at("sigma");
            if (s.is_string()) {
                if (s.get<std::string>() != "median")
                    throw ConfigError("kernel: sigma must be a number or \"median\"");
            } else {
                c.sigma = s.get<double>();
            }
        }
    } else if (c.kind == "weighted_matern") {
        // bandwidth-free; adapted to the target
    } else if (c.kind == "polynomial") {
        c.offset = j.value("offset", true);
    } else if (c.kind == "sum") {
        if (!j.contains("terms")) throw ConfigError("kernel: sum needs 'terms'");
        for (const auto& term : j.at("terms")) {
            c.terms.emplace_back(term.at("weight").get<double>(),
                                 KernelConfig::from_json(term.at("kernel")));
        }
    } else {
        throw ConfigError("kernel: unknown kind '" + c.kind + "'");
    }
    return c;
}

inline json KernelConfig::to_json() const {
    json j;
    j["kind"] = kind;
    if (kind == "p_exponential") {
        j["p"] = p;
        if (sigma) {
            j["sigma"] = *sigma;
        } else {
            j["sigma"] = "median";
        }
    } else if (kind == "polynomial") {
        j["offset"] = offset;
    } else if (kind == "sum") {
        j["terms"] = json::array();
        for (const auto& [w, sub] : terms)
            j["terms"].push_back({{"weight", w}, {"kernel", sub.to_json()}});
    }
    return j;
}

inline TargetConfig TargetConfig::from_json(const json& j) {
    TargetConfig c;
    if (j.is_string()) {
        c.kind = j.get<std::string>();
        return c;
    }
    if (!j.contains("kind")) throw ConfigError("target: missing 'kind'");
    c.kind = j.at("kind").get<std::string>();
    if (c.kind == "gaussian") {
        c.means = {j.at("mean").get<std::vector<double>>()};
        c.covs = {j.at("cov").get<std::vector<std::vector<double>>>()};
        c.weights = {1.0};
    } else if (c.kind == "gaussian_mixture") {
        c.weights = j.at("weights").get<std::vector<double>>();
        c.means = j.at("means").get<std::vector<std::vector<double>>>();
        c.covs = j.at("covs").get<std::vector<std::vector<std::vector<double>>>>();
    } else if (c.kind != "paper_1d" && c.kind != "paper_2d") {
        throw ConfigError("target: unknown kind '" + c.kind + "'");
    }
    return c;
}

inline TargetModel TargetConfig::build() const {
    if (kind == "paper_1d") return TargetModel::paper_1d();
    if (kind == "paper_2d") return TargetModel::paper_2d();
    std::vector<Vector> ms;
    std::vector<Matrix> cs;
    for (const auto& m : means) {
        Vector v(static_cast<Eigen::Index>(m.size()));
        for (std::size_t i = 0; i < m.size(); ++i) v(static_cast<Eigen::Index>(i)) = m[i];
        ms.push_back(std::move(v));
    }
    for (const auto& cov : covs) {
        const auto d = static_cast<Eigen::Index>(cov.size());
        Matrix c(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            if (static_cast<Eigen::Index>(cov[static_cast<std::size_t>(r)].size()) != d)
                throw ConfigError("target: ragged covariance");
            for (Eigen::Index col = 0; col < d; ++col)
                c(r, col) = cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
        }
        cs.push_back(std::move(c));
    }
    try {
        if (kind == "gaussian") return TargetModel::gaussian(ms.at(0), cs.at(0));
        return TargetModel::gaussian_mixture(weights, ms, cs);
    } catch (const InvalidInputError& e) {
        throw ConfigError(std::string("target: ") + e.what());
    }
}

inline ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("target")) c.target = TargetConfig::from_json(j.at("target"));
        if (j.contains("kernel")) c.kernel = KernelConfig::from_json(j.at("kernel"));
        c.n_particles = j.value("n_particles", static_cast<long>(c.n_particles));
        c.t_end = j.value("t_end", c.t_end);
        if (j.contains("integrator")) {
            const auto& ji = j.at("integrator");
            const std::string method = ji.value("method", std::string("rk45"));
            if (method == "rk45") {
                c.integrator.method = IntegratorMethod::AdaptiveRK45;
            } else if (method == "euler") {
                c.integrator.method = IntegratorMethod::FixedEuler;
            } else if (method == "trapezoidal") {
                c.integrator.method = IntegratorMethod::SemiImplicitTrapezoidal;
            } else {
                throw ConfigError("integrator: unknown method '" + method + "'");
            }
            c.integrator.rtol = ji.value("rtol", c.integrator.rtol);
            c.integrator.atol = ji.value("atol", c.integrator.atol);
            c.integrator.dt_init = ji.value("dt_init", c.integrator.dt_init);
            c.integrator.dt_max = ji.value("dt_max", c.integrator.dt_max);
            c.integrator.max_steps = ji.value("max_steps", c.integrator.max_steps);
        }
        if (j.contains("dynamics")) {
            const auto& jd = j.at("dynamics");
            const std::string kind = jd.is_string() ? jd.get<std::string>()
                                                    : jd.value("kind", std::string("deterministic"));
            if (kind == "deterministic") {
                c.dynamics = DynamicsKind::Deterministic;
            } else if (kind == "stochastic") {
                c.dynamics = DynamicsKind::Stochastic;
            } else if (kind == "langevin") {
                c.dynamics = DynamicsKind::Langevin;
            } else {
                throw ConfigError("dynamics: unknown kind '" + kind + "'");
            }
            if (jd.is_object()) c.sde_dt = jd.value("dt", c.sde_dt);
        }
        if (j.contains("init")) {
            const auto& ji = j.at("init");
            c.init_kind = ji.value("kind", std::string("standard_normal"));
            if (c.init_kind == "gaussian") {
                c.init_mean = ji.at("mean").get<std::vector<double>>();
                c.init_cov = ji.at("cov").get<std::vector<std::vector<double>>>();
            } else if (c.init_kind != "standard_normal") {
                throw ConfigError("init: unknown kind '" + c.init_kind + "'");
            }
        }
        c.seed = j.value("seed", 0ull);
        if (j.contains("record_times"))
            c.record_times = j.at("record_times").get<std::vector<double>>();
        c.record_count = j.value("record_count", c.record_count);
        c.reference_samples = j.value("reference_samples", static_cast<long>(c.reference_samples));
        c.w1_method = j.value("w1_method", c.w1_method);
        if (c.w1_method != "exact1d" && c.w1_method != "assign" && c.w1_method != "sinkhorn")
            throw ConfigError("w1_method must be exact1d, assign or sinkhorn");
        c.assign_subsample = j.value("assign_subsample", static_cast<long>(c.assign_subsample));
        c.sinkhorn_eps = j.value("sinkhorn_eps", c.sinkhorn_eps);
        c.sinkhorn_reference = j.value("sinkhorn_reference", static_cast<long>(c.sinkhorn_reference));
        c.histogram_bins = j.value("histogram_bins", c.histogram_bins);
        c.output_dir = j.value("output_dir", c.output_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!c.record_times.empty()) {
        for (std::size_t i = 1; i < c.record_times.size(); ++i)
            if (c.record_times[i] <= c.record_times[i - 1])
                throw ConfigError("record_times must be strictly increasing");
    }
    if (c.n_particles < 1) throw ConfigError("n_particles must be >= 1");
    if (c.t_end <= 0.0) throw ConfigError("t_end must be positive");
    return c;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

inline json ExperimentConfig::to_json() const {
    json j;
    j["target"]["kind"] = target.kind;
    if (target.kind == "gaussian" || target.kind == "gaussian_mixture") {
        j["target"]["weights"] = target.weights;
        j["target"]["means"] = target.means;
        j["target"]["covs"] = target.covs;
    }
    j["kernel"] = kernel.to_json();
    j["n_particles"] = static_cast<long>(n_particles);
    j["t_end"] = t_end;
    switch (integrator.method) {
        case IntegratorMethod::FixedEuler: j["integrator"]["method"] = "euler"; break;
        case IntegratorMethod::SemiImplicitTrapezoidal:
            j["integrator"]["method"] = "trapezoidal";
            break;
        default: j["integrator"]["method"] = "rk45"; break;
    }
    j["integrator"]["rtol"] = integrator.rtol;
    j["integrator"]["atol"] = integrator.atol;
    j["integrator"]["dt_init"] = integrator.dt_init;
    j["integrator"]["dt_max"] = integrator.dt_max;
    j["integrator"]["max_steps"] = integrator.max_steps;
    switch (dynamics) {
        case DynamicsKind::Deterministic: j["dynamics"]["kind"] = "deterministic"; break;
        case DynamicsKind::Stochastic: j["dynamics"]["kind"] = "stochastic"; break;
        case DynamicsKind::Langevin: j["dynamics"]["kind"] = "langevin"; break;
    }
    j["dynamics"]["dt"] = sde_dt;
    j["init"]["kind"] = init_kind;
    if (init_kind == "gaussian") {
        j["init"]["mean"] = init_mean;
        j["init"]["cov"] = init_cov;
    }
    j["seed"] = seed;
    if (!record_times.empty()) j["record_times"] = record_times;
    j["record_count"] = record_count;
    j["reference_samples"] = static_cast<long>(reference_samples);
    j["w1_method"] = w1_method;
    j["assign_subsample"] = static_cast<long>(assign_subsample);
    j["sinkhorn_eps"] = sinkhorn_eps;
    j["sinkhorn_reference"] = static_cast<long>(sinkhorn_reference);
    j["histogram_bins"] = histogram_bins;
    j["output_dir"] = output_dir;
    return j;
}

// ---------------------------------------------------------------------------
// artifacts

struct MetricsRow {
    double t = 0.0;
    long grad_evals = 0;
    long pair_evals = 0;
    double w1 = 0.0;
    double stein_fisher = 0.0;
};

struct ExperimentResult {
    std::vector<MetricsRow> metrics;
    Matrix final_positions;
    double resolved_sigma = 0.0;
    std::vector<std::string> files;
};

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << content;
}

inline std::string positions_csv(const Matrix& positions) {
    std::ostringstream os;
    os << "particle_id";
    for (Eigen::Index c = 0; c < positions.cols(); ++c) os << ",x_" << (c + 1);
    os << "\n";
    for (Eigen::Index i = 0; i < positions.rows(); ++i) {
        os << i;
        for (Eigen::Index c = 0; c < positions.cols(); ++c)
            os << "," << format_double(positions(i, c));
        os << "\n";
    }
    return os.str();
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream os;
    os << "t,grad_evals,pair_evals,w1,stein_fisher\n";
    for (const auto& r : rows)
        os << format_double(r.t) << "," << r.grad_evals << "," << r.pair_evals << ","
           << format_double(r.w1) << "," << format_double(r.stein_fisher) << "\n";
    return os.str();
}

}  // namespace detail

// Draws the initial ensemble for a config.
inline ParticleEnsemble initial_ensemble(const ExperimentConfig& cfg, const TargetModel& target) {
    const Eigen::Index d = target.dim();
    ParticleEnsemble e = ParticleEnsemble::standard_normal(cfg.n_particles, d, cfg.seed);
    if (cfg.init_kind == "gaussian") {
        TargetConfig t;
        t.kind = "gaussian";
        t.means = {cfg.init_mean};
        t.covs = {cfg.init_cov};
        t.weights = {1.0};
        TargetModel init_model = t.build();
        std::mt19937_64 rng(cfg.seed);
        e.positions = init_model.sample(cfg.n_particles, rng);
    }
    return e;
}

// Builds the kernel, resolving a median-heuristic bandwidth from the initial
// particle positions (resolved once, at initialization).
inline KernelSpec build_kernel(const KernelConfig& kc, const Matrix& init_positions,
                               const std::shared_ptr<const TargetModel>& target,
                               double* resolved_sigma = nullptr) {
    if (kc.kind == "p_exponential") {
        double sigma;
        if (kc.sigma) {
            sigma = *kc.sigma;
        } else {
            sigma = median_bandwidth(init_positions, kc.p, init_positions.rows());
        }
        if (resolved_sigma) *resolved_sigma = sigma;
        return KernelSpec::p_exponential(kc.p, sigma);
    }
    if (kc.kind == "weighted_matern") return KernelSpec::weighted_matern(target);
    if (kc.kind == "polynomial") return KernelSpec::polynomial(kc.offset);
    if (kc.kind == "sum") {
        std::vector<std::pair<double, KernelSpec>> terms;
        for (const auto& [w, sub] : kc.terms)
            terms.emplace_back(w, build_kernel(sub, init_positions, target));
        return KernelSpec::weighted_sum(std::move(terms));
    }
    throw ConfigError("kernel: unknown kind '" + kc.kind + "'");
}

// W1 between the current ensemble and a fresh reference sample, using the
// configured estimator (exact quantile coupling in 1D, assignment or
// Sinkhorn on subsamples otherwise).
inline double reference_w1(const ExperimentConfig& cfg, const Matrix& positions,
                           const TargetModel& target, std::mt19937_64& ref_rng) {
    const Matrix reference = target.sample(cfg.reference_samples, ref_rng);
    if (cfg.w1_method == "exact1d") {
        require(positions.cols() == 1, "w1 exact1d needs 1D samples");
        return w1_1d(positions, reference);
    }
    if (cfg.w1_method == "assign") {
        const Eigen::Index n = std::min({cfg.assign_subsample, positions.rows(), reference.rows()});
        return w1_assignment(positions.topRows(n), reference.topRows(n));
    }
    const Eigen::Index m = std::min(cfg.sinkhorn_reference, reference.rows());
    return w1_sinkhorn(positions, reference.topRows(m), cfg.sinkhorn_eps).cost;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    auto target = std::make_shared<const TargetModel>(cfg.target.build());
    ParticleEnsemble e = initial_ensemble(cfg, *target);
    double resolved_sigma = 0.0;
    KernelSpec kernel = build_kernel(cfg.kernel, e.positions, target, &resolved_sigma);

    std::vector<double> record_times = cfg.record_times;
    if (record_times.empty()) {
        for (int i = 1; i <= cfg.record_count; ++i)
            record_times.push_back(cfg.t_end * static_cast<double>(i) /
                                   static_cast<double>(cfg.record_count));
    }

    ExperimentResult result;
    result.resolved_sigma = resolved_sigma;
    std::mt19937_64 ref_rng(cfg.seed ^ 0xD1F2C3B4A5968778ull);
    auto observer = [&](const ParticleEnsemble& state) {
        MetricsRow row;
        row.t = state.time;
        row.grad_evals = state.grad_evals;
        row.pair_evals = state.pair_evals;
        row.w1 = reference_w1(cfg, state.positions, *target, ref_rng);
        row.stein_fisher = stein_fisher(state.positions, kernel, *target);
        result.metrics.push_back(row);
    };

    switch (cfg.dynamics) {
        case DynamicsKind::Deterministic:
            evolve_deterministic(e, kernel, *target, cfg.t_end, cfg.integrator, record_times,
                                 observer);
            break;
        case DynamicsKind::Stochastic:
            evolve_stochastic(e, kernel, *target, cfg.t_end, cfg.sde_dt, {}, record_times,
                              observer);
            break;
        case DynamicsKind::Langevin:
            evolve_langevin(e, *target, cfg.t_end, cfg.sde_dt, {}, record_times, observer);
            break;
    }
    result.final_positions = e.positions;

    // artifact set
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::vector<std::pair<std::string, std::string>> outputs;
    outputs.emplace_back("metrics.csv", detail::metrics_csv(result.metrics));
    outputs.emplace_back("positions.csv", detail::positions_csv(e.positions));
    if (target->dim() == 1) {
        auto [lo, hi] = target->domain_1d(4.0);
        std::vector<double> xs(e.positions.data(), e.positions.data() + e.positions.rows());
        Histogram h = histogram(xs, cfg.histogram_bins, lo, hi);
        std::ostringstream os;
        os << "bin_left,bin_right,density\n";
        for (int b = 0; b < cfg.histogram_bins; ++b)
            os << detail::format_double(h.edges(b)) << "," << detail::format_double(h.edges(b + 1))
               << "," << detail::format_double(h.densities(b)) << "\n";
        outputs.emplace_back("histogram.csv", os.str());
    }
    {
        json echo = cfg.to_json();
        echo["resolved_sigma"] = resolved_sigma;
        echo["version"] = kVersion;
        outputs.emplace_back("config_resolved.json", echo.dump(2) + "\n");
    }

    json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["files"] = json::array();
    for (const auto& [name, content] : outputs) {
        detail::write_text_file(dir / name, content);
        std::ostringstream hash;
        hash << std::hex << std::setw(16) << std::setfill('0')
             << fnv1a64(content.data(), content.size());
        manifest["files"].push_back({{"name", name}, {"fnv1a64", hash.str()}});
        result.files.push_back((dir / name).string());
    }
    detail::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    result.files.push_back((dir / "manifest.json").string());
    return result;
}

// ---------------------------------------------------------------------------

struct SweepCell {
    std::string value;
    bool ok = false;
    std::string error;
    std::vector<MetricsRow> metrics;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

// Runs the base experiment once per axis value (axis in {p, sigma, N, seed}),
// each cell in its own output directory. Cell failures are recorded and the
// sweep continues.
inline SweepResult sweep(const ExperimentConfig& base, const std::string& axis,
                         const std::vector<double>& values) {
    require(axis == "p" || axis == "sigma" || axis == "N" || axis == "seed",
            "sweep: axis must be one of p, sigma, N, seed");
    namespace fs = std::filesystem;
    SweepResult result;
    for (double value : values) {
        ExperimentConfig cfg = base;
        std::ostringstream tag;
        tag << axis << "_" << value;
        if (axis == "p") {
            if (cfg.kernel.kind != "p_exponential")
                throw ConfigError("sweep over p requires a p_exponential kernel");
            cfg.kernel.p = value;
        } else if (axis == "sigma") {
            if (cfg.kernel.kind != "p_exponential")
                throw ConfigError("sweep over sigma requires a p_exponential kernel");
            cfg.kernel.sigma = value;
        } else if (axis == "N") {
            cfg.n_particles = static_cast<Eigen::Index>(value);
        } else {
            cfg.seed = static_cast<std::uint64_t>(value);
        }
        cfg.output_dir = (fs::path(base.output_dir) / tag.str()).string();

        SweepCell cell;
        cell.value = tag.str();
        try {
            ExperimentResult r = run_experiment(cfg);
            cell.ok = true;
            cell.metrics = std::move(r.metrics);
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        result.cells.push_back(std::move(cell));
    }

    // wide CSV keyed by (value, t), plus mean/std aggregation for seed sweeps
    std::ostringstream os;
    os << "value,t,grad_evals,pair_evals,w1,stein_fisher,status\n";
    for (const auto& cell : result.cells) {
        if (!cell.ok) {
            os << cell.value << ",,,,,," << "failed: " << cell.error << "\n";
            continue;
        }
        for (const auto& row : cell.metrics)
            os << cell.value << "," << detail::format_double(row.t) << "," << row.grad_evals
               << "," << row.pair_evals << "," << detail::format_double(row.w1) << ","
               << detail::format_double(row.stein_fisher) << ",ok\n";
    }
    fs::create_directories(base.output_dir);
    detail::write_text_file(fs::path(base.output_dir) / "sweep.csv", os.str());

    if (axis == "seed") {
        std::size_t rows = 0;
        for (const auto& c : result.cells)
            if (c.ok) rows = std::max(rows, c.metrics.size());
        std::ostringstream agg;
        agg << "t,w1_mean,w1_std,stein_fisher_mean,stein_fisher_std\n";
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> w1s, fishers;
            double t = 0.0;
            for (const auto& c : result.cells) {
                if (!c.ok || r >= c.metrics.size()) continue;
                t = c.metrics[r].t;
                w1s.push_back(c.metrics[r].w1);
                fishers.push_back(c.metrics[r].stein_fisher);
            }
            if (w1s.empty()) continue;
            auto mean_std = [](const std::vector<double>& v) {
                double m = 0.0;
                for (double x : v) m += x;
                m /= static_cast<double>(v.size());
                double s = 0.0;
                for (double x : v) s += (x - m) * (x - m);
                s = (v.size() > 1) ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
                return std::pair<double, double>{m, s};
            };
            auto [wm, ws] = mean_std(w1s);
            auto [fm, fs_] = mean_std(fishers);
            agg << detail::format_double(t) << "," << detail::format_double(wm) << ","
                << detail::format_double(ws) << "," << detail::format_double(fm) << ","
                << detail::format_double(fs_) << "\n";
        }
        detail::write_text_file(fs::path(base.output_dir) / "sweep_summary.csv", agg.str());
    }
    return result;
}

}  // namespace steinflow
