#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsphere/battery.hpp"
#include "bsphere/cvs.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/inverse.hpp"
#include "bsphere/io.hpp"
#include "bsphere/mating.hpp"
#include "bsphere/quadvar.hpp"
#include "bsphere/snake.hpp"

using namespace bsphere;
using nlohmann::json;

namespace {

constexpr int kUsage = 1;
constexpr int kIo = 2;
constexpr int kCheck = 3;

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const json& j) {
    if (path.empty() || path == "-")
        std::cout << j.dump(2) << '\n';
    else
        io::write_json(path, j);
}

// Values of a --config JSON object become option defaults of the chosen
// subcommand, so explicit flags still win. Keys are long option names
// without dashes, at the top level or under the subcommand's name.
void apply_config(CLI::App& app, const json& config, int argc, char** argv) {
    for (auto* sub : app.get_subcommands({})) {
        bool chosen = false;
        for (int i = 1; i < argc && !chosen; ++i) chosen = sub->get_name() == argv[i];
        if (!chosen) continue;
        for (const json* section : {&config, config.contains(sub->get_name()) ? &config[sub->get_name()] : nullptr}) {
            if (!section || !section->is_object()) continue;
            for (auto& [key, value] : section->items()) {
                if (value.is_object()) continue;
                CLI::Option* opt = nullptr;
                try {
                    opt = sub->get_option("--" + key);
                } catch (const CLI::OptionNotFound&) {
                    continue;
                }
                if (value.is_string())
                    opt->default_val(value.get<std::string>());
                else if (value.is_boolean())
                    opt->default_val(value.get<bool>() ? "true" : "false");
                else
                    opt->default_val(value.dump());
            }
        }
    }
}

std::string config_path(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") return argv[i + 1];
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

ContourPair snake_input(const std::string& path, int n, std::uint64_t seed) {
    return path.empty() ? sample_snake(n, seed) : io::read_snake(path);
}

void add_inverse_flags(CLI::App* cmd, InverseParams& p) {
    cmd->add_option("--tol-geo", p.tol_geo, "Geodesic detour tolerance (negative: default)");
    cmd->add_option("--sep-radius", p.sep_radius, "Transverse separation radius (negative: default)");
    cmd->add_option("--eps-graph", p.eps_graph, "Neighborhood graph edge length (negative: default)");
    cmd->add_option("--eta", p.eta, "Loop band half-width (negative: default)");
    cmd->add_option("--macro-mass", p.macro_mass, "Smallest macroscopic region mass");
    cmd->add_option("--cover-quantile", p.cover_quantile, "Nearest-neighbor quantile used as r_cov");
}

void add_relax_flags(CLI::App* cmd, RelaxationOptions& r) {
    cmd->add_option("--k-max", r.k_max, "Maximum relaxation rounds")->check(CLI::PositiveNumber);
    cmd->add_option("--delta", r.delta, "Gluing threshold on d_f (negative: default)");
    cmd->add_option("--tolerance", r.tolerance, "Relative convergence threshold")->check(CLI::NonNegativeNumber);
}

std::vector<double> read_path_csv(const std::string& path, std::vector<double>* positions) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                cells.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (values.empty()) continue;  // header
            throw IoError(path + ": non-numeric row: " + line);
        }
        if (cells.size() == 1) {
            values.push_back(cells[0]);
        } else if (cells.size() == 2) {
            positions->push_back(cells[0]);
            values.push_back(cells[1]);
        } else {
            throw IoError(path + ": expected one or two columns");
        }
    }
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brownian sphere construction, inversion and the discrete bijection"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "JSON file of option defaults");

    // sample-snake
    int n = 1024;
    std::uint64_t seed = 1;
    std::string out, format = "json";
    auto* c_sample = app.add_subcommand("sample-snake", "Sample a discretized snake");
    c_sample->add_option("--n", n, "Grid resolution (even)")->check(CLI::PositiveNumber);
    c_sample->add_option("--seed", seed, "Random seed");
    c_sample->add_option("--out", out, "Output file (stdout if empty)");
    c_sample->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // build-sphere
    std::string snake_in, marks_out;
    int m = 1000;
    RelaxationOptions relax;
    auto* c_build = app.add_subcommand("build-sphere", "Distance matrix of a sampled sphere");
    c_build->add_option("--snake-in", snake_in, "Snake JSON (sampled from --n/--seed if absent)");
    c_build->add_option("--n", n, "Grid resolution when sampling")->check(CLI::PositiveNumber);
    c_build->add_option("--seed", seed, "Seed when sampling");
    c_build->add_option("--m", m, "Sample size")->check(CLI::PositiveNumber);
    c_build->add_option("--out", out, "Matrix file")->required();
    c_build->add_option("--marks-out", marks_out, "Marks sidecar (default <out>.marks.json)");
    c_build->add_option("--format", format, "bin or csv")->check(CLI::IsMember({"bin", "csv"}));
    add_relax_flags(c_build, relax);

    // invert
    std::string sphere_in, marks_in;
    int epsilon = 0;
    InverseParams inv_params;
    auto* c_invert = app.add_subcommand("invert", "Recover a snake from a marked sphere sample");
    c_invert->add_option("--sphere-in", sphere_in, "Matrix file")->required();
    c_invert->add_option("--marks-in", marks_in, "Marks sidecar (default <sphere-in>.marks.json)");
    c_invert->add_option("--epsilon", epsilon, "Orientation bit +1/-1 (overrides the sidecar)")
        ->check(CLI::IsMember({-1, 1}));
    c_invert->add_option("--out", out, "Recovered snake JSON (stdout if empty)");
    add_inverse_flags(c_invert, inv_params);

    // roundtrip
    std::string report;
    RoundtripOptions rt;
    bool no_rebuild = false, no_reflection = false;
    auto* c_round = app.add_subcommand("roundtrip", "Residuals of snake -> sphere -> recovered snake");
    c_round->add_option("--snake-in", snake_in, "Snake JSON (sampled from --n/--seed if absent)");
    c_round->add_option("--n", n, "Grid resolution when sampling")->check(CLI::PositiveNumber);
    c_round->add_option("--seed", seed, "Seed when sampling");
    c_round->add_option("--m,--sample-size", m, "Sample size")->check(CLI::PositiveNumber);
    c_round->add_option("--report", report, "Report JSON (stdout if empty)");
    c_round->add_flag("--no-rebuild", no_rebuild, "Skip rebuilding a matrix from the recovered snake");
    c_round->add_flag("--no-reflection", no_reflection, "Skip the reflection rebuild");
    add_relax_flags(c_round, relax);
    add_inverse_flags(c_round, inv_params);

    // cvs-forward / cvs-inverse / cvs-enumerate
    std::string tree_in, map_in;
    int sign = 1;
    auto* c_fwd = app.add_subcommand("cvs-forward", "Labeled tree to rooted pointed quadrangulation");
    c_fwd->add_option("--tree-in", tree_in, "Tree JSON")->required();
    c_fwd->add_option("--sign", sign, "+1 or -1")->check(CLI::IsMember({-1, 1}));
    c_fwd->add_option("--out", out, "Map JSON (stdout if empty)");
    auto* c_inv = app.add_subcommand("cvs-inverse", "Rooted pointed quadrangulation to labeled tree");
    c_inv->add_option("--map-in", map_in, "Map JSON")->required();
    c_inv->add_option("--out", out, "Tree JSON with sign (stdout if empty)");
    auto* c_enum = app.add_subcommand("cvs-enumerate", "Exhaustive counts and round trips");
    c_enum->add_option("--n", n, "Number of edges / faces")->check(CLI::Range(1, 5));
    c_enum->add_option("--report", report, "Report JSON (stdout if empty)");

    // scaling-profile
    int runs = 100;
    std::string csv_out;
    auto* c_scale = app.add_subcommand("scaling-profile", "d_Q(root, pointed) / n^(1/4) over seeds");
    c_scale->add_option("--n", n, "Tree edges")->check(CLI::PositiveNumber);
    c_scale->add_option("--runs", runs, "Number of seeds")->check(CLI::PositiveNumber);
    c_scale->add_option("--seed", seed, "First seed");
    c_scale->add_option("--report", report, "Report JSON (stdout if empty)");
    c_scale->add_option("--csv", csv_out, "Also write one value per line");

    // quadvar
    std::string path_in;
    std::vector<double> schedule;
    auto* c_qv = app.add_subcommand("quadvar", "Duration of a time-changed Brownian path");
    c_qv->add_option("--path-in", path_in, "CSV of values, or position,value rows")->required();
    c_qv->add_option("--eps-schedule", schedule, "Decreasing eps values (default std * 2^-3..2^-6)");
    c_qv->add_option("--report", report, "Report JSON (stdout if empty)");

    // stats
    StatsOptions so;
    auto* c_stats = app.add_subcommand("stats", "Statistical battery");
    c_stats->add_option("--num-runs", so.num_runs, "Runs for the s*, epsilon and independence checks");
    c_stats->add_option("--n", so.n, "Grid for those runs")->check(CLI::PositiveNumber);
    c_stats->add_option("--ball-n", so.ball_n, "Grid for the ball-volume runs")->check(CLI::PositiveNumber);
    c_stats->add_option("--ball-runs", so.ball_runs, "Ball-volume runs")->check(CLI::PositiveNumber);
    c_stats->add_option("--ball-lo", so.ball_lo, "Smallest radius (fraction of eccentricity)");
    c_stats->add_option("--ball-hi", so.ball_hi, "Largest radius (fraction of eccentricity)");
    c_stats->add_option("--level", so.level, "Test level");
    c_stats->add_option("--seed", so.seed, "Seed");
    c_stats->add_option("--report", report, "Report JSON (stdout if empty)");

    try {
        if (auto path = config_path(argc, argv); !path.empty()) apply_config(app, io::read_json(path), argc, argv);
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }

    try {
        if (*c_sample) {
            auto h = sample_snake(n, seed);
            if (format == "csv") {
                std::ostringstream s;
                s << "t,f,g\n";
                s.precision(17);
                for (int k = 0; k <= h.n; ++k)
                    s << static_cast<double>(k) / h.n << ',' << h.f[k] << ',' << h.g[k] << '\n';
                if (out.empty()) {
                    std::cout << s.str();
                } else {
                    std::ofstream f(out);
                    if (!(f << s.str())) throw IoError("write failed: " + out);
                }
            } else {
                emit(out, io::snake_to_json(h));
            }
        } else if (*c_build) {
            auto h = snake_input(snake_in, n, seed);
            SphereBuildInfo info;
            auto d = sphere_matrix(h, select_sample(h, m), relax, &info);
            auto s = assemble_marked(h, d);
            if (format == "csv")
                io::write_matrix_csv(out, s.dist);
            else
                io::write_matrix(out, s.dist);
            io::write_json(marks_out.empty() ? out + ".marks.json" : marks_out, io::marks_to_json(s));
            std::cerr << "rounds " << info.rounds << (info.converged ? "" : " (not converged)") << '\n';
            if (!info.converged) throw CheckFailure("relaxation did not converge within k_max");
        } else if (*c_invert) {
            auto d = io::read_matrix(sphere_in);
            auto s = io::marked_from(std::move(d), io::read_json(marks_in.empty() ? sphere_in + ".marks.json" : marks_in));
            if (epsilon != 0) s.epsilon = epsilon;
            if (!s.epsilon) throw ParameterError("invert: no epsilon in the sidecar; pass --epsilon");
            SphereInverse inv(s, inv_params);
            auto rec = inv.phi();
            auto j = io::snake_to_json(rec.h);
            j["version"] = kReportVersion;
            j["time_of"] = rec.time_of;
            j["s_star_hat"] = rec.s_star_hat;
            j["low_confidence_orientation"] = rec.low_confidence_orientation;
            j["loop_failures"] = rec.loop_failures;
            j["branch_failures"] = rec.branch_failures;
            j["max_nesting_violation"] = rec.max_nesting_violation;
            emit(out, j);
        } else if (*c_round) {
            auto h = snake_input(snake_in, n, seed);
            rt.m = m;
            rt.relax = relax;
            rt.inverse = inv_params;
            rt.rebuild = !no_rebuild;
            rt.reflection = !no_reflection;
            auto rep = roundtrip_report(h, rt);
            bool hard = rep["asymmetry"].get<double>() == 0 && rep["root_distance_residual"].get<double>() <= 1e-3 &&
                        rep["label_residual"].get<double>() <= 1e-3 &&
                        (!rt.reflection || rep["reflection_mismatches"].get<long long>() == 0);
            rep["hard_checks_pass"] = hard;
            emit(report, rep);
            if (!hard) throw CheckFailure("roundtrip: a hard check failed");
        } else if (*c_fwd) {
            auto t = io::tree_from_json(io::read_json(tree_in));
            emit(out, io::map_to_json(cvs::cvs_forward(t, sign)));
        } else if (*c_inv) {
            auto q = io::map_from_json(io::read_json(map_in));
            auto r = cvs::cvs_inverse(q);
            emit(out, {{"tree", io::tree_to_json(r.tree)}, {"sign", r.sign}});
        } else if (*c_enum) {
            auto trees = cvs::enumerate_trees(n);
            auto maps = cvs::enumerate_quadrangulations(n);
            std::uint64_t pow3 = 1;
            for (int k = 0; k < n; ++k) pow3 *= 3;
            const std::uint64_t expect_trees = pow3 * cvs::catalan(n);
            long long tree_failures = 0, map_failures = 0;
            for (const auto& t : trees)
                for (int sg : {1, -1}) {
                    auto r = cvs::cvs_inverse(cvs::cvs_forward(t, sg));
                    tree_failures += !(r.tree == t && r.sign == sg);
                }
            for (const auto& q : maps) {
                auto r = cvs::cvs_inverse(q);
                map_failures += cvs::canonical_code(cvs::cvs_forward(r.tree, r.sign)) != cvs::canonical_code(q);
            }
            bool ok = trees.size() == expect_trees && maps.size() == 2 * expect_trees && tree_failures == 0 &&
                      map_failures == 0;
            emit(report, {{"version", kReportVersion},
                          {"n", n},
                          {"trees", trees.size()},
                          {"trees_expected", expect_trees},
                          {"quadrangulations", maps.size()},
                          {"quadrangulations_expected", 2 * expect_trees},
                          {"tree_roundtrip_failures", tree_failures},
                          {"map_roundtrip_failures", map_failures},
                          {"pass", ok}});
            if (!ok) throw CheckFailure("cvs-enumerate: counts or round trips disagree");
        } else if (*c_scale) {
            std::vector<std::uint64_t> seeds(runs);
            for (int k = 0; k < runs; ++k) seeds[k] = seed + k;
            auto prof = cvs::scaling_profile(n, seeds);
            emit(report, {{"version", kReportVersion}, {"n", n}, {"seeds", seeds}, {"profile", prof}});
            if (!csv_out.empty()) {
                std::ofstream f(csv_out);
                f.precision(17);
                f << "seed,distance\n";
                for (int k = 0; k < runs; ++k) f << seeds[k] << ',' << prof[k] << '\n';
                if (!f) throw IoError("write failed: " + csv_out);
            }
        } else if (*c_qv) {
            TimeChangedPath p;
            p.values = read_path_csv(path_in, &p.positions);
            if (p.positions.empty())
                for (std::size_t k = 0; k < p.values.size(); ++k) p.positions.push_back(static_cast<double>(k));
            validate(p);
            if (schedule.empty()) {
                double mean = 0, var = 0;
                for (double v : p.values) mean += v / p.values.size();
                for (double v : p.values) var += (v - mean) * (v - mean) / p.values.size();
                schedule = dyadic_schedule(std::sqrt(var), 3, 6);
            }
            auto est = duration(p, schedule);
            json table = json::array();
            for (std::size_t k = 0; k < est.eps.size(); ++k)
                table.push_back({{"eps", est.eps[k]}, {"crossings", est.crossings[k]}, {"estimate", est.estimates[k]}});
            emit(report, {{"version", kReportVersion},
                          {"duration", est.value},
                          {"unstable", est.unstable},
                          {"eps_floor", est.eps_floor},
                          {"mesh_sigma", est.mesh_sigma},
                          {"table", table}});
        } else if (*c_stats) {
            auto rep = stats_battery(so);
            emit(report, to_json(rep));
            if (!rep.all_pass()) throw CheckFailure("stats: a check failed");
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CheckFailure& e) {
        std::cerr << "check failed: " << e.what() << '\n';
        return kCheck;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kCheck;
    }
    return 0;
}
