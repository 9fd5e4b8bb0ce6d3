#include "idma/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "idma/error.hpp"
#include "idma/simulate.hpp"
#include "idma/verify.hpp"

namespace idma::cli {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

LevyMeasure parse_measure(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("measure: expected an object with a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dickman") {
        reject_unknown(j, {"kind"}, "measure");
        return LevyMeasure::dickman();
    }
    if (kind == "truncated_stable") {
        reject_unknown(j, {"kind", "beta", "C"}, "measure");
        return LevyMeasure::truncated_stable(get_number(j, "beta", "measure"), get_number(j, "C", "measure"));
    }
    if (kind == "two_point") {
        reject_unknown(j, {"kind", "lambda"}, "measure");
        return LevyMeasure::two_point(get_number(j, "lambda", "measure"));
    }
    if (kind == "inner_truncated_stable") {
        reject_unknown(j, {"kind", "alpha", "c", "delta"}, "measure");
        return LevyMeasure::inner_truncated_stable(get_number(j, "alpha", "measure"), get_number(j, "c", "measure"),
                                                   get_number(j, "delta", "measure"));
    }
    throw ConfigError("measure: unknown kind '" + kind + "'");
}

Kernel1D parse_kernel_1d(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("kernel: expected an object with a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "signed_ou" || kind == "gauss_deriv" || kind == "persistent_control") {
        reject_unknown(j, {"kind"}, "kernel");
        if (kind == "signed_ou") return Kernel1D::signed_ou();
        if (kind == "gauss_deriv") return Kernel1D::gauss_deriv();
        return Kernel1D::persistent_control();
    }
    if (kind == "user_table") {
        reject_unknown(j, {"kind", "file"}, "kernel");
        if (!j.contains("file") || !j.at("file").is_string()) throw ConfigError("kernel: user_table needs 'file'");
        std::filesystem::path file = j.at("file").get<std::string>();
        if (file.is_relative()) file = base_dir / file;
        return Kernel1D::user_table_from_csv(file.string());
    }
    throw ConfigError("kernel: unknown kind '" + kind + "'");
}

ProductKernel parse_kernel(const json& j, const std::filesystem::path& base_dir) {
    if (j.is_object() && j.value("kind", "") == "product") {
        reject_unknown(j, {"kind", "components"}, "kernel");
        if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty())
            throw ConfigError("kernel: product needs a non-empty 'components' array");
        std::vector<Kernel1D> parts;
        for (const json& c : j.at("components")) parts.push_back(parse_kernel_1d(c, base_dir));
        return ProductKernel(std::move(parts));
    }
    return ProductKernel(parse_kernel_1d(j, base_dir));
}

std::vector<double> parse_numbers(const json& j, const std::string& key) {
    if (j.is_object()) {
        reject_unknown(j, {"from", "to", "step"}, key);
        const double from = get_number(j, "from", key);
        const double to = get_number(j, "to", key);
        const double step = get_number(j, "step", key);
        if (!(step > 0.0) || !(to >= from)) throw ConfigError(key + ": need step > 0 and to >= from");
        std::vector<double> out;
        const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) out.push_back(from + static_cast<double>(i) * step);
        return out;
    }
    if (!j.is_array()) throw ConfigError(key + ": expected an array of numbers");
    std::vector<double> out;
    for (const json& v : j) {
        if (!v.is_number()) throw ConfigError(key + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<Point> parse_points(const json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError(key + ": expected an array");
    std::vector<Point> out;
    for (const json& v : j) {
        if (v.is_number())
            out.push_back({v.get<double>()});
        else if (v.is_array())
            out.push_back(parse_numbers(v, key));
        else
            throw ConfigError(key + ": entries must be numbers or arrays of numbers");
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

std::string point_label(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ";" : "") + number(p[i]);
    return s;
}

} // namespace

const LevyMeasure& RunConfig::require_measure() const {
    if (!measure) throw ConfigError("config: 'measure' is required for this subcommand");
    return *measure;
}

const ProductKernel& RunConfig::require_kernel() const {
    if (!kernel) throw ConfigError("config: 'kernel' is required for this subcommand");
    return *kernel;
}

std::vector<Point> RunConfig::points() const {
    if (l_points.empty()) return {Point(d, 0.0)};
    return l_points;
}

std::vector<double> RunConfig::base_frequencies() const {
    if (z.empty()) return std::vector<double>(points().size(), 1.0);
    return z;
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"measure", "kernel", "d", "T", "T_grid", "l_points", "z", "z_grid", "t_grid", "epsilon",
                    "window_pad", "replicates", "seed", "quad_tol", "conditions_budget", "threshold", "threads",
                    "output", "format"},
                   "config");

    RunConfig cfg;
    auto count = [&](const char* key) -> std::uint64_t {
        const json& v = j.at(key);
        if (!v.is_number_unsigned()) throw ConfigError(std::string(key) + " must be a non-negative integer");
        return v.get<std::uint64_t>();
    };
    if (j.contains("measure")) cfg.measure = parse_measure(j.at("measure"));
    if (j.contains("kernel")) cfg.kernel = parse_kernel(j.at("kernel"), base_dir);
    if (j.contains("d")) {
        cfg.d = count("d");
        if (cfg.d < 1) throw ConfigError("d must be >= 1");
        if (cfg.kernel && cfg.kernel->dimension() != cfg.d) {
            if (cfg.kernel->dimension() != 1) throw ConfigError("d does not match the product kernel dimension");
            cfg.kernel = ProductKernel(std::vector<Kernel1D>(cfg.d, (*cfg.kernel)[0]));
        }
    } else if (cfg.kernel) {
        cfg.d = cfg.kernel->dimension();
    }
    if (j.contains("T")) cfg.T = get_number(j, "T", "config");
    if (j.contains("T_grid")) cfg.T_grid = parse_numbers(j.at("T_grid"), "T_grid");
    if (j.contains("l_points")) cfg.l_points = parse_points(j.at("l_points"), "l_points");
    if (j.contains("z")) cfg.z = parse_numbers(j.at("z"), "z");
    cfg.z_grid = j.contains("z_grid") ? parse_numbers(j.at("z_grid"), "z_grid") : default_z_grid();
    if (j.contains("t_grid")) cfg.t_grid = parse_points(j.at("t_grid"), "t_grid");
    if (j.contains("epsilon")) cfg.epsilon = get_number(j, "epsilon", "config");
    if (j.contains("window_pad")) cfg.window_pad = get_number(j, "window_pad", "config");
    if (j.contains("replicates")) cfg.replicates = count("replicates");
    if (j.contains("seed")) cfg.seed = count("seed");
    if (j.contains("quad_tol")) cfg.quad_tol = get_number(j, "quad_tol", "config");
    if (j.contains("conditions_budget")) cfg.conditions_budget = count("conditions_budget");
    if (j.contains("threshold")) cfg.threshold = get_number(j, "threshold", "config");
    if (j.contains("threads")) cfg.threads = static_cast<unsigned>(count("threads"));
    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ConfigError("output must be a string");
        cfg.output = j.at("output").get<std::string>();
    }
    if (j.contains("format")) {
        const std::string f = j.at("format").is_string() ? j.at("format").get<std::string>() : "";
        if (f == "csv")
            cfg.format = Format::Csv;
        else if (f == "json")
            cfg.format = Format::Json;
        else
            throw ConfigError("format must be 'csv' or 'json'");
    }

    for (const Point& p : cfg.l_points)
        if (p.size() != cfg.d) throw ConfigError("l_points entries must have dimension d");
    for (const Point& p : cfg.t_grid)
        if (p.size() != cfg.d && p.size() != 1) throw ConfigError("t_grid entries must be scalars or have dimension d");
    if (!cfg.z.empty() && cfg.z.size() != cfg.points().size())
        throw ConfigError("z must have one frequency per l-point");
    if (!(cfg.quad_tol > 0.0)) throw ConfigError("quad_tol must be positive");
    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(cfg.T >= 0.0)) throw ConfigError("T must be >= 0");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");

    json digest_view = j;
    for (const char* key : {"seed", "threads", "output", "format"}) digest_view.erase(key);
    cfg.digest = hex64(fnv1a(digest_view.dump()));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

namespace {

struct Output {
    std::string name;
    std::string content;
};

class Emitter {
public:
    Emitter(const RunConfig& cfg, std::string subcommand) : cfg_(cfg), sub_(std::move(subcommand)) {}

    std::string csv_header() const {
        return "# idma " + sub_ + " config=" + cfg_.digest + " seed=" + std::to_string(cfg_.seed) + "\n";
    }

    ojson json_meta() const {
        ojson meta;
        meta["tool"] = "idma";
        meta["subcommand"] = sub_;
        meta["config_digest"] = cfg_.digest;
        meta["seed"] = cfg_.seed;
        return meta;
    }

    std::string extension() const { return cfg_.format == Format::Json ? ".json" : ".csv"; }

private:
    const RunConfig& cfg_;
    std::string sub_;
};

AnalyticOptions analytic_options(const RunConfig& cfg) {
    AnalyticOptions o;
    o.quad.abs_tol = cfg.quad_tol;
    return o;
}

std::vector<Output> cmd_conditions(const RunConfig& cfg, const Emitter& em) {
    const auto report = check_conditions(cfg.require_kernel(), cfg.require_measure(), cfg.conditions_budget,
                                         analytic_options(cfg));
    if (cfg.format == Format::Json) {
        ojson j;
        j["meta"] = em.json_meta();
        j["c1"] = json_number(report.values[0]);
        j["c2"] = json_number(report.values[1]);
        j["c3"] = json_number(report.values[2]);
        j["pass"] = {report.pass[0], report.pass[1], report.pass[2]};
        j["error_estimates"] = {json_number(report.error_estimates[0]), json_number(report.error_estimates[1]),
                                json_number(report.error_estimates[2])};
        return {{"conditions.json", j.dump(2) + "\n"}};
    }
    std::string csv = em.csv_header() + "condition,value,pass,error_estimate\n";
    for (std::size_t c = 0; c < 3; ++c)
        csv += "c" + std::to_string(c + 1) + "," + number(report.values[c]) + "," +
               (report.pass[c] ? "true" : "false") + "," + number(report.error_estimates[c]) + "\n";
    return {{"conditions.csv", csv}};
}

std::vector<Output> cmd_cf(const RunConfig& cfg, const Emitter& em) {
    const ProductKernel& k = cfg.require_kernel();
    const LevyMeasure& nu = cfg.require_measure();
    const auto opts = analytic_options(cfg);
    const FddSpec base{cfg.d, cfg.points(), cfg.base_frequencies(), cfg.T};
    base.validate();
    const bool derivative = k.has_antiderivative();

    struct Row {
        QuadResult<Complex> stationary, window, claimed, boundary;
    };
    std::vector<Row> rows(cfg.z_grid.size());
    parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
        const double z = cfg.z_grid[i];
        rows[i].stationary = log_cf_stationary(k, nu, z, opts);
        if (derivative) {
            const FddSpec spec = base.scaled(z);
            rows[i].window = log_cf_window(k, nu, spec, opts);
            rows[i].claimed = log_cf_limit(k, nu, spec, LimitVariant::Claimed, opts);
            rows[i].boundary = log_cf_limit(k, nu, spec, LimitVariant::BoundaryAugmented, opts);
        }
    });

    const char* names[] = {"stationary", "window", "claimed", "boundary_augmented"};
    const std::size_t columns = derivative ? 4 : 1;
    auto pick = [](const Row& r, std::size_t c) -> const QuadResult<Complex>& {
        switch (c) {
        case 0: return r.stationary;
        case 1: return r.window;
        case 2: return r.claimed;
        default: return r.boundary;
        }
    };
    if (cfg.format == Format::Json) {
        ojson j;
        j["meta"] = em.json_meta();
        j["T"] = cfg.T;
        j["rows"] = ojson::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            ojson row;
            row["z"] = cfg.z_grid[i];
            for (std::size_t c = 0; c < columns; ++c) {
                const auto& q = pick(rows[i], c);
                const Complex phi = std::exp(q.value);
                row[names[c]] = {{"re", json_number(phi.real())},
                                 {"im", json_number(phi.imag())},
                                 {"error_estimate", json_number(q.error_estimate)}};
            }
            j["rows"].push_back(row);
        }
        return {{"cf.json", j.dump(2) + "\n"}};
    }
    std::string csv = em.csv_header() + "z";
    for (std::size_t c = 0; c < columns; ++c)
        csv += std::string(",") + names[c] + "_re," + names[c] + "_im," + names[c] + "_err";
    csv += "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv += number(cfg.z_grid[i]);
        for (std::size_t c = 0; c < columns; ++c) {
            const auto& q = pick(rows[i], c);
            const Complex phi = std::exp(q.value);
            csv += "," + number(phi.real()) + "," + number(phi.imag()) + "," + number(q.error_estimate);
        }
        csv += "\n";
    }
    return {{"cf.csv", csv}};
}

std::vector<Output> cmd_cov(const RunConfig& cfg, const Emitter& em) {
    const ProductKernel& k = cfg.require_kernel();
    const LevyMeasure& nu = cfg.require_measure();
    const auto opts = analytic_options(cfg);
    std::vector<Point> lags = cfg.t_grid;
    if (lags.empty()) lags = {{0.0}, {1.0}, {2.0}};
    for (Point& t : lags)
        if (t.size() == 1 && cfg.d > 1) t = Point(cfg.d, t[0]);
    std::vector<double> values;
    for (const Point& t : lags) values.push_back(covariance(k, nu, t, opts));
    const CovarianceIntegral integral = covariance_integral(k, nu, opts);

    if (cfg.format == Format::Json) {
        ojson j;
        j["meta"] = em.json_meta();
        j["rows"] = ojson::array();
        for (std::size_t i = 0; i < lags.size(); ++i) j["rows"].push_back({{"t", lags[i]}, {"covariance", values[i]}});
        j["integral"] = {{"exact", json_number(integral.exact)}, {"quadrature", json_number(integral.quadrature)}};
        return {{"cov.json", j.dump(2) + "\n"}};
    }
    std::string csv = em.csv_header() + "t,covariance\n";
    for (std::size_t i = 0; i < lags.size(); ++i) csv += point_label(lags[i]) + "," + number(values[i]) + "\n";
    std::string integral_csv = em.csv_header() + "exact,quadrature\n" + number(integral.exact) + "," +
                               number(integral.quadrature) + "\n";
    return {{"cov.csv", csv}, {"cov_integral.csv", integral_csv}};
}

std::vector<Output> cmd_simulate(const RunConfig& cfg, const Emitter& em) {
    SimConfig sim{cfg.require_kernel(), cfg.require_measure(), cfg.T, cfg.points(), cfg.epsilon,
                  cfg.window_pad,       cfg.replicates,          cfg.seed};
    const ReplicateMatrix m = monte_carlo(sim, cfg.threads);
    if (cfg.format == Format::Json) {
        ojson j;
        j["meta"] = em.json_meta();
        j["replicates"] = m.replicates;
        j["l_points"] = sim.ls;
        ojson rows = ojson::array();
        for (std::size_t r = 0; r < m.replicates; ++r)
            for (std::size_t p = 0; p < m.points; ++p)
                rows.push_back({r, p, json_number(m.S(r, p)), json_number(m.Y(r, p))});
        j["columns"] = {"replicate", "l_index", "S_value", "Y_value"};
        j["rows"] = std::move(rows);
        return {{"replicates.json", j.dump() + "\n"}};
    }
    std::string csv = em.csv_header() + "replicate,l_index,S_value,Y_value\n";
    csv.reserve(csv.size() + m.replicates * m.points * 48);
    for (std::size_t r = 0; r < m.replicates; ++r)
        for (std::size_t p = 0; p < m.points; ++p)
            csv += std::to_string(r) + "," + std::to_string(p) + "," + number(m.S(r, p)) + "," + number(m.Y(r, p)) + "\n";
    return {{"replicates.csv", csv}};
}

std::vector<Output> cmd_converge(const RunConfig& cfg, const Emitter& em) {
    const std::vector<double> T_grid = cfg.T_grid.empty() ? std::vector<double>{5, 10, 20, 40} : cfg.T_grid;
    const FddSpec base{cfg.d, cfg.points(), cfg.base_frequencies(), 0.0};
    ConvergenceOptions opts;
    opts.threshold = cfg.threshold;
    opts.threads = cfg.threads;
    opts.analytic = analytic_options(cfg);
    const auto rep = cf_convergence(cfg.require_kernel(), cfg.require_measure(), base, T_grid, cfg.z_grid, opts);
    if (cfg.format == Format::Json) {
        ojson j;
        j["meta"] = em.json_meta();
        j["threshold"] = rep.threshold;
        j["z_grid"] = rep.z_grid;
        j["entries"] = ojson::array();
        for (const auto& e : rep.entries)
            j["entries"].push_back({{"T", e.T},
                                    {"dist_claimed", json_number(e.dist_claimed)},
                                    {"dist_boundary", json_number(e.dist_boundary)},
                                    {"converged", e.converged}});
        j["claimed_monotone"] = rep.claimed_monotone;
        j["boundary_monotone"] = rep.boundary_monotone;
        j["winner"] = to_string(rep.winner);
        return {{"converge.json", j.dump(2) + "\n"}};
    }
    std::string csv = em.csv_header() + "T,dist_claimed,dist_boundary,converged\n";
    for (const auto& e : rep.entries)
        csv += number(e.T) + "," + number(e.dist_claimed) + "," + number(e.dist_boundary) + "," +
               (e.converged ? "true" : "false") + "\n";
    csv += "# winner=" + to_string(rep.winner) + "\n";
    return {{"converge.csv", csv}};
}

std::vector<Output> cmd_hyper(const RunConfig& cfg, const Emitter& em) {
    const std::vector<double> T_grid = cfg.T_grid.empty() ? std::vector<double>{1, 2, 5, 10, 20} : cfg.T_grid;
    HyperOptions opts;
    opts.seed = cfg.seed;
    opts.epsilon = cfg.epsilon;
    opts.threads = cfg.threads;
    opts.analytic = analytic_options(cfg);
    const auto rep = hyperuniformity(cfg.require_kernel(), cfg.require_measure(), T_grid, cfg.replicates, opts);
    auto at = [](const std::vector<double>& v, std::size_t i) {
        return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
    };
    if (cfg.format == Format::Json) {
        ojson j;
        j["meta"] = em.json_meta();
        j["rows"] = ojson::array();
        for (std::size_t i = 0; i < rep.T_grid.size(); ++i)
            j["rows"].push_back({{"T", rep.T_grid[i]},
                                 {"var_analytic", json_number(rep.var_analytic[i])},
                                 {"var_empirical", json_number(at(rep.var_empirical, i))},
                                 {"var_se", json_number(at(rep.var_se, i))},
                                 {"control_var_analytic", json_number(rep.control_var_analytic[i])},
                                 {"control_var_empirical", json_number(at(rep.control_var_empirical, i))},
                                 {"control_var_se", json_number(at(rep.control_var_se, i))}});
        j["control_slope"] = rep.control_slope;
        j["classification"] = to_string(rep.classification);
        return {{"hyper.json", j.dump(2) + "\n"}};
    }
    std::string csv = em.csv_header() +
                      "T,var_analytic,var_empirical,var_se,control_var_analytic,control_var_empirical,control_var_se\n";
    for (std::size_t i = 0; i < rep.T_grid.size(); ++i)
        csv += number(rep.T_grid[i]) + "," + number(rep.var_analytic[i]) + "," + number(at(rep.var_empirical, i)) +
               "," + number(at(rep.var_se, i)) + "," + number(rep.control_var_analytic[i]) + "," +
               number(at(rep.control_var_empirical, i)) + "," + number(at(rep.control_var_se, i)) + "\n";
    csv += "# control_slope=" + number(rep.control_slope) + " classification=" + to_string(rep.classification) + "\n";
    return {{"hyper.csv", csv}};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Infinitely divisible moving averages: analytic CFs, shot-noise simulation, limit diagnostics", "idma"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"conditions", "Evaluate the integrability conditions (i)-(iii)"},
        {"cf", "Tabulate stationary, window and limit characteristic functions"},
        {"cov", "Tabulate the covariance function and its integral"},
        {"simulate", "Monte Carlo replicates of window integrals and limit values"},
        {"converge", "CF-distance convergence study over a T-grid"},
        {"hyper", "Variance curves and hyperuniformity classification"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--seed", seed, "Override the random seed");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "idma: " << e.what() << "\n" << app.help();
        return kConfigError;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (out_dir) cfg.output = *out_dir;
        if (format) cfg.format = (*format == "json") ? Format::Json : Format::Csv;
        const Emitter em(cfg, subcommand);

        std::vector<Output> outputs;
        if (subcommand == "conditions") outputs = cmd_conditions(cfg, em);
        else if (subcommand == "cf") outputs = cmd_cf(cfg, em);
        else if (subcommand == "cov") outputs = cmd_cov(cfg, em);
        else if (subcommand == "simulate") outputs = cmd_simulate(cfg, em);
        else if (subcommand == "converge") outputs = cmd_converge(cfg, em);
        else outputs = cmd_hyper(cfg, em);

        std::filesystem::create_directories(cfg.output);
        for (const Output& o : outputs) {
            const auto path = cfg.output / o.name;
            std::ofstream f(path, std::ios::binary);
            f << o.content;
            if (!f) throw Error("failed to write '" + path.string() + "'");
            out << path.string() << "\n";
        }
        return kOk;
    } catch (const ConfigError& e) {
        err << "idma: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NotAvailable& e) {
        err << "idma: " << e.what() << "\n";
        return kConfigError;
    } catch (const EmptyTruncation& e) {
        err << "idma: " << e.what() << "\n";
        return kConfigError;
    } catch (const NonConvergence& e) {
        err << "idma: quadrature did not converge: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const DivergentMoment& e) {
        err << "idma: " << e.what() << "\n";
        return kDivergentMoment;
    } catch (const std::exception& e) {
        err << "idma: " << e.what() << "\n";
        return kFailure;
    }
}

} // namespace idma::cli
