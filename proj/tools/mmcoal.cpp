// mmcoal command-line tool: simulation, likelihood surfaces, exact solves.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmcoal/errors.hpp"
#include "mmcoal/io.hpp"
#include "mmcoal/is.hpp"
#include "mmcoal/oracle.hpp"
#include "mmcoal/pac.hpp"
#include "mmcoal/rng.hpp"
#include "mmcoal/simulator.hpp"
#include "mmcoal/xi_is.hpp"

using namespace mmcoal;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int default_threads() {
    if (const char* env = std::getenv("MMCOAL_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t >= 1) return t;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

struct MeasureArgs {
    std::string kind;  // empty: beta when an alpha is given, kingman otherwise
    std::optional<double> alpha;
    double psi = 0.5;
    std::string file;

    void add(CLI::App* app) {
        app->add_option("--measure", kind, "kingman, star, ew, beta or mixture (mixture needs --measure-file)")
            ->check(CLI::IsMember({"kingman", "star", "ew", "beta", "mixture"}));
        app->add_option("--alpha", alpha, "Beta(2 - alpha, alpha) parameter");
        app->add_option("--psi", psi, "Eldon-Wakeley atom location");
        app->add_option("--measure-file", file, "JSON measure description");
    }

    LambdaMeasure build(std::optional<double> alpha_override = std::nullopt) const {
        const auto a = alpha_override ? alpha_override : alpha;
        std::string k = kind;
        if (k.empty()) k = !file.empty() ? "mixture" : (a ? "beta" : "kingman");
        if (k == "kingman") return LambdaMeasure::kingman();
        if (k == "star") return LambdaMeasure::star();
        if (k == "ew") return LambdaMeasure::eldon_wakeley(psi);
        if (k == "beta") {
            if (!a) throw UsageError("--measure beta needs --alpha or --alpha-grid");
            return LambdaMeasure::beta(*a);
        }
        if (file.empty()) throw UsageError("--measure mixture needs --measure-file");
        return parse_lambda_measure(read_text(file), file);
    }

    bool alpha_family() const { return kind.empty() || kind == "beta"; }
};

struct GridArgs {
    std::optional<double> theta;
    std::string theta_grid;
    std::string alpha_grid;

    void add(CLI::App* app) {
        app->add_option("--theta", theta, "total mutation rate (default: the data file's)");
        app->add_option("--theta-grid", theta_grid, "lo:hi:count");
        app->add_option("--alpha-grid", alpha_grid, "lo:hi:count");
    }

    std::vector<double> thetas(const MutationModel& model) const {
        if (!theta_grid.empty()) return parse_grid(theta_grid);
        return {theta.value_or(model.theta())};
    }

    std::vector<std::optional<double>> alphas(const MeasureArgs& m) const {
        if (!alpha_grid.empty()) {
            if (!m.alpha_family()) throw UsageError("--alpha-grid applies to the beta family only");
            std::vector<std::optional<double>> out;
            for (double a : parse_grid(alpha_grid)) out.emplace_back(a);
            return out;
        }
        return {m.alpha};
    }
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct Row {
    double theta;
    std::optional<double> alpha;
    Estimate est;
    std::string proposal;
    std::uint64_t seed;
    std::string measure;
    std::optional<int> permutations;
};

void emit(const std::vector<Row>& rows, bool json_out, const std::string& path) {
    std::ostringstream os;
    if (json_out) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json j;
            j["param_theta"] = r.theta;
            j["param_alpha"] = r.alpha ? nlohmann::ordered_json(*r.alpha) : nlohmann::ordered_json(nullptr);
            j["loglik"] = r.est.loglik;
            j["se"] = std::isfinite(r.est.loglik_se) ? nlohmann::ordered_json(r.est.loglik_se) : nlohmann::ordered_json(nullptr);
            j["ess"] = r.est.ess;
            j["runtime_s"] = r.est.runtime_s;
            j["particles"] = r.est.particles;
            j["proposal"] = r.proposal;
            if (r.permutations) j["permutations"] = *r.permutations;
            j["seed"] = r.seed;
            j["measure"] = r.measure;
            arr.push_back(j);
        }
        os << arr.dump(2) << "\n";
    } else {
        const bool pac = !rows.empty() && rows.front().permutations.has_value();
        os << "param_theta,param_alpha,loglik,se,ess,runtime_s,particles,proposal";
        if (pac) os << ",permutations";
        os << ",seed,measure\n";
        for (const auto& r : rows) {
            os << fmt(r.theta) << ',' << (r.alpha ? fmt(*r.alpha) : "") << ',' << fmt(r.est.loglik) << ','
               << fmt(r.est.loglik_se) << ',' << fmt(r.est.ess) << ',' << fmt(r.est.runtime_s) << ','
               << r.est.particles << ',' << r.proposal;
            if (pac) os << ',' << *r.permutations;
            os << ',' << r.seed << ",\"" << r.measure << "\"\n";
        }
    }
    if (path.empty() || path == "-") {
        std::cout << os.str();
    } else {
        std::ofstream out(path);
        if (!out) throw ParseError(path + ": cannot open file for writing");
        out << os.str();
    }
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << text;
}

// Scaled experiment data: 95 copies of the focal type, 4 one mutation away, 1 at a second site.
SampleConfig focal_sample(const MutationModel& model) {
    SampleConfig s;
    s.add(model.parse("000000000000000"), 95);
    s.add(model.parse("100000000000000"), 4);
    s.add(model.parse("010000000000000"), 1);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood inference under multiple-merger coalescents"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mmcoal 0.1.0");

    std::string data_path, out_path;
    std::uint64_t seed = 1;
    int threads = default_threads();
    bool json_out = false;
    MeasureArgs measure;
    GridArgs grid;

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a sample under a Lambda-coalescent");
    int sim_n = 10, sim_loci = 15;
    double sim_theta = 0.1;
    sim->add_option("--n", sim_n, "sample size")->check(CLI::PositiveNumber);
    sim->add_option("--loci", sim_loci, "number of biallelic flip loci")->check(CLI::PositiveNumber);
    sim->add_option("--theta", sim_theta, "total mutation rate")->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", seed);
    sim->add_option("--out", out_path);
    measure.add(sim);

    // is
    auto* is = app.add_subcommand("is", "importance-sampling likelihood surface");
    std::string proposal = "k", backend = "quadrature", checkpoints;
    int particles = 1000, replicates = 8, quad_order = 4;
    double resample_ess = 0.5;
    bool no_resample = false;
    auto add_is_opts = [&](CLI::App* c) {
        c->add_option("--data", data_path)->required();
        c->add_option("--proposal", proposal);
        c->add_option("--particles", particles)->check(CLI::PositiveNumber);
        c->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
        c->add_option("--quad-order", quad_order)->check(CLI::PositiveNumber);
        c->add_option("--csd-backend", backend)->check(CLI::IsMember({"exact", "quadrature"}));
        c->add_option("--resample-ess", resample_ess, "ESS fraction below which the cohort is resampled");
        c->add_option("--checkpoints", checkpoints, "comma-separated decreasing sample sizes");
        c->add_flag("--no-resample", no_resample);
        c->add_option("--seed", seed);
        c->add_option("--threads", threads)->check(CLI::PositiveNumber);
        c->add_flag("--json", json_out);
        c->add_option("--out", out_path);
    };
    add_is_opts(is);
    measure.add(is);
    grid.add(is);

    // pac
    auto* pac = app.add_subcommand("pac", "product-of-approximate-conditionals likelihood surface");
    std::string csd_kind = "k";
    int permutations = 1000, pac_order = 10;
    bool normalize = false;
    pac->add_option("--data", data_path)->required();
    pac->add_option("--csd", csd_kind)->check(CLI::IsMember({"sd", "k", "k2"}));
    pac->add_option("--permutations", permutations)->check(CLI::PositiveNumber);
    pac->add_option("--quad-order", pac_order)->check(CLI::PositiveNumber);
    pac->add_option("--csd-backend", backend)->check(CLI::IsMember({"exact", "quadrature"}));
    pac->add_flag("--normalize", normalize, "subtract the surface maximum from loglik");
    pac->add_option("--seed", seed);
    pac->add_option("--threads", threads)->check(CLI::PositiveNumber);
    pac->add_flag("--json", json_out);
    pac->add_option("--out", out_path);
    measure.add(pac);
    grid.add(pac);

    // exact
    auto* exact = app.add_subcommand("exact", "exact likelihood of a small sample");
    bool full_table = false;
    int max_n = 8;
    exact->add_option("--data", data_path)->required();
    exact->add_option("--theta", grid.theta);
    exact->add_option("--max-n", max_n);
    exact->add_flag("--table", full_table, "emit every configuration's probability (JSON)");
    exact->add_flag("--json", json_out);
    exact->add_option("--out", out_path);
    measure.add(exact);

    // xi-is / xi-exact
    auto* xi_is = app.add_subcommand("xi-is", "importance sampling under a Xi-coalescent");
    std::string xi_file;
    int orderings = 10;
    add_is_opts(xi_is);
    xi_is->add_option("--measure-file", xi_file, "Xi measure JSON")->required();
    xi_is->add_option("--theta", grid.theta);
    xi_is->add_option("--orderings", orderings)->check(CLI::PositiveNumber);

    auto* xi_exact = app.add_subcommand("xi-exact", "exact likelihood under a Xi-coalescent");
    xi_exact->add_option("--data", data_path)->required();
    xi_exact->add_option("--measure-file", xi_file)->required();
    xi_exact->add_option("--theta", grid.theta);
    xi_exact->add_option("--max-n", max_n);
    xi_exact->add_flag("--json", json_out);
    xi_exact->add_option("--out", out_path);

    // repro
    auto* repro = app.add_subcommand("repro", "scaled reproduction runs of the standard experiments");
    std::string experiment = "1", out_dir = ".";
    repro->add_option("--experiment", experiment)->check(CLI::IsMember({"1", "2", "3"}));
    repro->add_option("--particles", particles)->check(CLI::PositiveNumber);
    repro->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
    repro->add_option("--permutations", permutations)->check(CLI::PositiveNumber);
    repro->add_option("--seed", seed);
    repro->add_option("--threads", threads)->check(CLI::PositiveNumber);
    repro->add_option("--out-dir", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto is_config = [&]() {
            ISConfig c;
            c.particles = particles;
            c.replicates = replicates;
            c.proposal = parse_proposal(proposal);
            c.seed = seed;
            c.threads = threads;
            c.ess_threshold = resample_ess;
            c.resample = !no_resample;
            c.csd = {parse_csd_backend(backend), quad_order, 4096};
            if (!checkpoints.empty()) {
                std::stringstream ss(checkpoints);
                std::string tok;
                while (std::getline(ss, tok, ',')) c.checkpoints.push_back(std::stoi(tok));
            }
            return c;
        };

        if (*sim) {
            const MutationModel model = MutationModel::symmetric_biallelic(sim_loci, sim_theta);
            const SampleConfig s = simulate_sample(model, measure.build(), sim_n, seed);
            write_text(format_data({model, s, seed}), out_path);
            return 0;
        }

        if (*is) {
            const DataSet data = read_data(data_path);
            const ISConfig cfg = is_config();
            std::vector<Row> rows;
            std::uint64_t index = 0;
            for (const auto& alpha : grid.alphas(measure)) {
                const LambdaMeasure lam = measure.build(alpha);
                for (double theta : grid.thetas(data.model)) {
                    ISConfig c = cfg;
                    c.seed = derive_seed(seed, {index++});
                    const auto est = run_is(data.sample, data.model.with_theta(theta), lam, c);
                    rows.push_back({theta, alpha, est, proposal, c.seed, lam.describe(), std::nullopt});
                }
            }
            emit(rows, json_out, out_path);
            return 0;
        }

        if (*pac) {
            const DataSet data = read_data(data_path);
            PacOptions opt;
            opt.kind = parse_csd_kind(csd_kind);
            opt.permutations = permutations;
            opt.threads = threads;
            opt.csd = {parse_csd_backend(backend), pac_order, 4096};
            std::vector<Row> rows;
            std::uint64_t index = 0;
            for (const auto& alpha : grid.alphas(measure)) {
                const LambdaMeasure lam = measure.build(alpha);
                for (double theta : grid.thetas(data.model)) {
                    opt.seed = derive_seed(seed, {index++});
                    const auto est = pac_average(data.sample, data.model.with_theta(theta), lam, opt);
                    rows.push_back({theta, alpha, est, "pac-" + csd_kind, opt.seed, lam.describe(), permutations});
                }
            }
            if (normalize) {
                double best = -std::numeric_limits<double>::infinity();
                for (const auto& r : rows) best = std::max(best, r.est.loglik);
                for (auto& r : rows) r.est.loglik -= best;
            }
            emit(rows, json_out, out_path);
            return 0;
        }

        auto emit_exact = [&](const LikelihoodTable& table, const SampleConfig& target, const MutationModel& model) {
            const double p = likelihood_of(table, target);
            if (json_out || full_table) {
                nlohmann::ordered_json j;
                j["likelihood"] = p;
                j["loglik"] = std::log(p);
                if (full_table) {
                    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
                    for (int m = 1; m <= table.max_size(); ++m) {
                        std::vector<std::pair<SampleConfig, double>> entries(table.level(m).begin(), table.level(m).end());
                        std::sort(entries.begin(), entries.end());
                        nlohmann::ordered_json lvl = nlohmann::ordered_json::array();
                        for (const auto& [c, v] : entries) {
                            nlohmann::ordered_json haps = nlohmann::ordered_json::object();
                            for (const auto& [h, k] : c.entries()) haps[model.format(h)] = k;
                            lvl.push_back({{"haplotypes", haps}, {"probability", v}});
                        }
                        levels.push_back(lvl);
                    }
                    j["levels"] = levels;
                }
                write_text(j.dump(2) + "\n", out_path);
            } else {
                write_text("likelihood,loglik\n" + fmt(p) + "," + fmt(std::log(p)) + "\n", out_path);
            }
        };

        if (*exact) {
            const DataSet data = read_data(data_path);
            const MutationModel model = data.model.with_theta(grid.theta.value_or(data.model.theta()));
            OracleLimits lim;
            lim.max_n = max_n;
            const auto table = solve_exact(model, measure.build(), data.sample.total(), lim);
            emit_exact(table, data.sample, model);
            return 0;
        }

        if (*xi_exact) {
            const DataSet data = read_data(data_path);
            const MutationModel model = data.model.with_theta(grid.theta.value_or(data.model.theta()));
            const XiMeasure xi = parse_xi_measure(read_text(xi_file), xi_file);
            OracleLimits lim;
            lim.max_n = max_n;
            const auto table = solve_exact(model, xi, data.sample.total(), lim);
            emit_exact(table, data.sample, model);
            return 0;
        }

        if (*xi_is) {
            const DataSet data = read_data(data_path);
            const double theta = grid.theta.value_or(data.model.theta());
            const XiMeasure xi = parse_xi_measure(read_text(xi_file), xi_file);
            ISConfig c = is_config();
            if (c.proposal != ProposalKind::GT && c.proposal != ProposalKind::K)
                throw UsageError("xi-is supports --proposal gt or k");
            c.seed = derive_seed(seed, {0});
            XiISOptions xo;
            xo.orderings = orderings;
            const auto est = run_is_xi(data.sample, data.model.with_theta(theta), xi, c, xo);
            emit({{theta, std::nullopt, est, proposal, c.seed, xi.describe(), std::nullopt}}, json_out, out_path);
            return 0;
        }

        if (*repro) {
            const MutationModel base = MutationModel::symmetric_biallelic(15, 0.1);
            const auto thetas = parse_grid("0.025:0.2:8");
            const auto alphas = parse_grid("1.1125:1.9:8");
            auto path = [&](const std::string& name) { return out_dir + "/" + name; };
            if (experiment == "1" || experiment == "3") {
                const SampleConfig data = focal_sample(base);
                write_data({base, data, std::nullopt}, path("experiment1_data.json"));
                if (experiment == "1") {
                    for (const std::string prop : {"sd", "k", "gt"}) {
                        ISConfig c;
                        c.particles = particles;
                        c.replicates = replicates;
                        c.proposal = parse_proposal(prop);
                        c.seed = seed;
                        c.threads = threads;
                        std::vector<Row> rows;
                        std::uint64_t index = 0;
                        auto run = [&](double theta, double alpha) {
                            ISConfig ci = c;
                            ci.seed = derive_seed(seed, {index++});
                            const auto lam = LambdaMeasure::beta(alpha);
                            rows.push_back({theta, alpha, run_is(data, base.with_theta(theta), lam, ci), prop, ci.seed,
                                            lam.describe(), std::nullopt});
                        };
                        for (double t : thetas) run(t, 1.5);
                        for (double a : alphas) run(0.1, a);
                        emit(rows, false, path("experiment1_is_" + prop + ".csv"));
                    }
                } else {
                    for (const std::string kind : {"k", "k2"}) {
                        PacOptions opt;
                        opt.kind = parse_csd_kind(kind);
                        opt.permutations = permutations;
                        opt.threads = threads;
                        std::vector<Row> rows;
                        std::uint64_t index = 0;
                        for (double a : alphas)
                            for (double t : thetas) {
                                opt.seed = derive_seed(seed, {index++});
                                const auto lam = LambdaMeasure::beta(a);
                                rows.push_back({t, a, pac_average(data, base.with_theta(t), lam, opt), "pac-" + kind,
                                                opt.seed, lam.describe(), permutations});
                            }
                        emit(rows, false, path("experiment3_pac_" + kind + ".csv"));
                    }
                }
            } else {
                const MutationModel model = MutationModel::symmetric_biallelic(15, 0.15);
                const SampleConfig data = simulate_sample(model, LambdaMeasure::beta(1.2), 150, seed);
                write_data({model, data, seed}, path("experiment2_data.json"));
                for (const std::string prop : {"k", "gt"}) {
                    ISConfig c;
                    c.particles = particles;
                    c.replicates = replicates;
                    c.proposal = parse_proposal(prop);
                    c.threads = threads;
                    std::vector<Row> rows;
                    std::uint64_t index = 0;
                    for (double a : parse_grid("1.05:1.95:8"))
                        for (double t : parse_grid("0.05:0.3:8")) {
                            c.seed = derive_seed(seed, {index++});
                            const auto lam = LambdaMeasure::beta(a);
                            rows.push_back({t, a, run_is(data, model.with_theta(t), lam, c), prop, c.seed,
                                            lam.describe(), std::nullopt});
                        }
                    emit(rows, false, path("experiment2_is_" + prop + ".csv"));
                }
            }
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const SizeError& e) {
        std::cerr << "size error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
