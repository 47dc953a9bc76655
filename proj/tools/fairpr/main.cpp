// fairpr: group-fair PageRank from the command line.
//
// Exit status: 0 success, 1 input error, 2 infeasible fairness target,
// 3 numerical failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "algorithms.hpp"
#include "fairpr/errors.hpp"
#include "fairpr/fairness.hpp"
#include "fairpr/io.hpp"
#include "fairpr/random.hpp"
#include "fairpr/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fairpr;
using namespace fairpr::cli;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumeric = 3;

struct GraphArgs {
    std::string edges, colors;
    std::string target_set, target_protected;
};

struct CommonArgs {
    std::string out = ".";
    double gamma = 0.15;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::optional<std::size_t> iters;
    std::size_t directions = 64;
    double lambda = 10.0;
};

void add_graph_options(CLI::App* cmd, GraphArgs& g, bool targets) {
    cmd->add_option("--edges", g.edges, "Edge list, src<TAB>dst per line")->required()->check(CLI::ExistingFile);
    cmd->add_option("--colors", g.colors, "Color file, node<TAB>0|1 (1 = red)")->required()->check(CLI::ExistingFile);
    if (targets) {
        cmd->add_option("--target-set", g.target_set, "Node ids of the target set S")->check(CLI::ExistingFile);
        cmd->add_option("--target-protected", g.target_protected,
                        "Node ids of the protected part of S (default: red members of S)")
            ->check(CLI::ExistingFile);
    }
}

void add_common_options(CLI::App* cmd, CommonArgs& c, bool solver = true) {
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
    cmd->add_option("--gamma", c.gamma, "Restart probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
    if (!solver) return;
    cmd->add_option("--tol", c.tol, "FSPR stopping tolerance on the gradient mapping");
    cmd->add_option("--iters", c.iters, "Iteration budget (FSPR iterations, LFPR_O search steps)");
    cmd->add_option("--K", c.directions, "LFPR_O random directions per step")->capture_default_str();
    cmd->add_option("--lambda", c.lambda, "LFPR_O penalty weight")->capture_default_str();
}

Settings make_settings(const CommonArgs& c) {
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw InputError("gamma must lie in (0, 1)");
    if (c.directions == 0) throw InputError("--K must be positive");
    Settings s;
    s.pagerank.gamma = c.gamma;
    if (c.tol) s.fspr.tol = *c.tol;
    if (c.iters) {
        s.fspr.max_iters = *c.iters;
        s.search.iterations = *c.iters;
    }
    s.search.directions = c.directions;
    s.search.penalty = c.lambda;
    s.search.seed = c.seed;
    return s;
}

void load_targets(const GraphArgs& a, const ColoredGraph& g, Settings& s) {
    if (a.target_set.empty()) {
        if (!a.target_protected.empty()) throw InputError("--target-protected needs --target-set");
        return;
    }
    const auto members = load_node_set(a.target_set, g.size());
    auto groups = make_target_groups(g, members);
    if (!a.target_protected.empty()) groups.protected_members = load_node_set(a.target_protected, g.size());
    s.target = std::move(groups);
}

std::ofstream create(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
    return p;
}

void write_json(const fs::path& path, const json& j) { create(path) << j.dump(2) << '\n'; }

json sparse_map(const std::vector<double>& w) {
    json m = json::object();
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) m[std::to_string(i)] = w[i];
    }
    return m;
}

double default_phi(const ColoredGraph& g) {
    return static_cast<double>(g.red_count()) / static_cast<double>(g.size());
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError(std::string("bad value in ") + what + ": '" + item + "'");
        }
    }
    if (values.empty()) throw InputError(std::string(what) + " list is empty");
    return values;
}

std::vector<Algorithm> parse_algorithms(const std::string& text) {
    std::vector<Algorithm> algos;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) algos.push_back(parse_algorithm(item));
    }
    if (algos.empty()) throw InputError("algorithm list is empty");
    return algos;
}

void check_phi(double phi) {
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("phi must lie in (0, 1)");
}

// rank ---------------------------------------------------------------------

struct RankArgs {
    GraphArgs graph;
    CommonArgs common;
    std::string algo = "opr";
    std::optional<double> phi;
};

int cmd_rank(const RankArgs& a) {
    const auto g = load_graph(a.graph.edges, a.graph.colors);
    auto s = make_settings(a.common);
    load_targets(a.graph, g, s);
    const double phi = a.phi.value_or(default_phi(g));
    check_phi(phi);
    const auto algo = parse_algorithm(a.algo);

    const auto inst = make_instance(g, s.pagerank);
    const auto result = run_algorithm(algo, inst, phi, s);
    const auto dir = prepare_dir(a.common.out);

    auto scores = create(dir / "scores.csv");
    write_scores_csv(result.scores, scores);

    const auto report = make_report(result.scores, inst.original, g, phi);
    json j{{"phi", phi},
           {"gamma", s.pagerank.gamma},
           {"red_mass", report.red_mass},
           {"loss", report.loss},
           {"lower_bound_loss", report.lower_bound_loss},
           {"fair", report.fair}};
    if (s.target) {
        double in_s = 0.0, in_sr = 0.0;
        for (NodeId i : s.target->members) in_s += result.scores[i];
        for (NodeId i : s.target->protected_members) in_sr += result.scores[i];
        j["target_mass"] = in_s;
        j["target_protected_mass"] = in_sr;
        j["target_fair"] = std::abs(in_sr - phi * in_s) <= kFairnessTolerance;
    }
    write_json(dir / "report.json", j);

    if (result.fspr) {
        const auto& sol = *result.fspr;
        auto out = create(dir / "solution.csv");
        write_solution_csv(sol.jump, sol.scores, out);
        write_json(dir / "fspr.json", json{{"phi", phi},
                                           {"gamma", s.pagerank.gamma},
                                           {"loss", sol.loss},
                                           {"fairness_residual", sol.fairness_residual},
                                           {"iterations", sol.iterations},
                                           {"converged", sol.converged}});
        if (!sol.converged) std::cerr << "warning: FSPR stopped at its iteration budget\n";
    }
    if (result.policy) {
        const auto& p = *result.policy;
        write_json(dir / "policy.json",
                   json{{"kind", to_string(p.kind)}, {"x", sparse_map(p.red_weights)}, {"y", sparse_map(p.blue_weights)}});
    }
    std::cout << to_string(algo) << ": red_mass=" << report.red_mass << " loss=" << report.loss << '\n';
    return 0;
}

// sweep --------------------------------------------------------------------

struct SweepArgs {
    GraphArgs graph;
    CommonArgs common;
    std::string algos = "opr,fspr,lfpr-n,lfpr-u,lfpr-p,lfpr-o";
    std::string phis;
    std::string r_list, alpha_red_list, alpha_blue_list;
    std::size_t nodes = 2000;
    std::size_t seed_nodes = 10;
    std::size_t seeds = 1;
};

struct SweepRow {
    std::string instance;
    Algorithm algo;
    double phi;
    double loss = NAN, red_mass = NAN, lower_bound_loss = NAN;
    std::string status;
};

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int cmd_sweep(const SweepArgs& a) {
    auto s = make_settings(a.common);
    const auto phis = parse_list(a.phis, "--phi");
    for (double phi : phis) check_phi(phi);
    const auto algos = parse_algorithms(a.algos);

    struct Named {
        std::string name;
        ColoredGraph graph;
    };
    std::vector<Named> graphs;
    const bool grid = !a.r_list.empty();
    if (grid) {
        if (!a.graph.edges.empty()) throw InputError("give either --edges/--colors or a --r grid");
        const auto rs = parse_list(a.r_list, "--r");
        const auto ars = parse_list(a.alpha_red_list.empty() ? "0.5" : a.alpha_red_list, "--alpha-red");
        const auto abs = a.alpha_blue_list.empty() ? ars : parse_list(a.alpha_blue_list, "--alpha-blue");
        for (double r : rs) {
            for (std::size_t k = 0; k < ars.size(); ++k) {
                const double ar = ars[k];
                const double ab = a.alpha_blue_list.empty() ? ar : abs.at(std::min(k, abs.size() - 1));
                for (std::size_t rep = 0; rep < a.seeds; ++rep) {
                    SynthConfig cfg{a.nodes, a.seed_nodes, r, ar, ab, 1, derive_seed(a.common.seed, rep)};
                    std::ostringstream name;
                    name << "r" << r << "_aR" << ar << "_aB" << ab << "_s" << rep;
                    graphs.push_back({name.str(), generate(cfg)});
                }
            }
        }
    } else {
        if (a.graph.edges.empty() || a.graph.colors.empty()) {
            throw InputError("sweep needs --edges and --colors, or a --r grid");
        }
        graphs.push_back({fs::path(a.graph.edges).stem().string(), load_graph(a.graph.edges, a.graph.colors)});
        load_targets(a.graph, graphs.front().graph, s);
    }

    std::vector<SweepRow> rows;
    for (const auto& named : graphs) {
        const auto inst = make_instance(named.graph, s.pagerank);
        std::vector<SweepRow> cells;
        for (double phi : phis) {
            for (auto algo : algos) cells.push_back({named.name, algo, phi, NAN, NAN, NAN, {}});
        }
        const auto count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t c = 0; c < count; ++c) {
            auto& row = cells[static_cast<std::size_t>(c)];
            try {
                const auto result = run_algorithm(row.algo, inst, row.phi, s);
                const auto report = make_report(result.scores, inst.original, named.graph, row.phi);
                row.loss = report.loss;
                row.red_mass = report.red_mass;
                row.lower_bound_loss = report.lower_bound_loss;
                row.status = (result.fspr && !result.fspr->converged) ? "not_converged" : "ok";
            } catch (const InfeasibleError&) {
                row.status = "infeasible";
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
        }
        rows.insert(rows.end(), cells.begin(), cells.end());
    }

    const auto dir = prepare_dir(a.common.out);
    auto out = create(dir / "sweep.csv");
    out << "instance,algorithm,phi,loss,red_mass,lower_bound_loss,status\n";
    bool any_ok = false;
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        out << r.instance << ',' << to_string(r.algo) << ',' << format_number(r.phi) << ','
            << format_number(r.loss) << ',' << format_number(r.red_mass) << ','
            << format_number(r.lower_bound_loss) << ',' << status << '\n';
        any_ok = any_ok || r.status == "ok" || r.status == "not_converged";
    }
    std::cout << rows.size() << " rows written to " << (dir / "sweep.csv").string() << '\n';
    return any_ok ? 0 : kExitInfeasible;
}

// audit --------------------------------------------------------------------

struct AuditArgs {
    GraphArgs graph;
    CommonArgs common;
    std::string algo = "opr";
    std::optional<double> phi;
    std::optional<std::size_t> sample;
    std::size_t bins = 20;
};

int cmd_audit(const AuditArgs& a) {
    const auto g = load_graph(a.graph.edges, a.graph.colors);
    auto s = make_settings(a.common);
    load_targets(a.graph, g, s);
    const double phi = a.phi.value_or(default_phi(g));
    check_phi(phi);
    const auto algo = parse_algorithm(a.algo);
    if (a.sample && *a.sample == 0) throw InputError("--sample must be positive");

    const auto inst = make_instance(g, s.pagerank);
    const auto model = algorithm_model(algo, inst, phi, s);
    const auto nodes = audit_sample(g, a.sample, a.common.seed);
    const auto audit = personalized_audit(model, g, phi, nodes, s.pagerank, a.bins);

    const auto dir = prepare_dir(a.common.out);
    auto csv = create(dir / "audit.csv");
    write_audit_csv(audit, g, csv);
    auto hist = create(dir / "histogram.csv");
    write_histogram_csv(audit.histogram, hist);
    const auto mean = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    write_json(dir / "audit.json", json{{"phi", phi},
                                        {"gamma", s.pagerank.gamma},
                                        {"target", audit.target},
                                        {"audited", audit.entries.size()},
                                        {"all_fair", audit.all_fair()},
                                        {"red_mean", mean(audit.red_mean)},
                                        {"blue_mean", mean(audit.blue_mean)},
                                        {"locally_fair", converse_check(model, g, phi)}});
    std::cout << audit.entries.size() << " nodes audited, all fair: " << (audit.all_fair() ? "yes" : "no")
              << '\n';
    return 0;
}

// generate -----------------------------------------------------------------

struct GenerateArgs {
    CommonArgs common;
    SynthConfig cfg;
    std::optional<double> alpha;
    std::size_t count = 1;
};

int cmd_generate(GenerateArgs a) {
    if (a.alpha) a.cfg.alpha_red = a.cfg.alpha_blue = *a.alpha;
    if (a.count == 0) throw InputError("--count must be positive");
    const auto dir = prepare_dir(a.common.out);
    PageRankOptions opts;
    opts.gamma = a.common.gamma;

    auto manifest = create(dir / "manifest.csv");
    manifest << "seed,r,alpha_R,alpha_B,n,red_pagerank\n";
    for (std::size_t k = 0; k < a.count; ++k) {
        SynthConfig cfg = a.cfg;
        cfg.seed = a.count == 1 ? a.common.seed : derive_seed(a.common.seed, k);
        const auto g = generate(cfg);
        const std::string suffix = a.count == 1 ? "" : "_" + std::to_string(k);
        save_graph(g, dir / ("edges" + suffix + ".tsv"), dir / ("colors" + suffix + ".tsv"));
        auto summary = create(dir / ("summary" + suffix + ".csv"));
        write_summary_csv(g, summary);
        const auto p = power_iterate(standard_transition(g), uniform_vector(g.size()), opts);
        manifest << cfg.seed << ',' << format_number(cfg.red_probability) << ','
                 << format_number(cfg.alpha_red) << ',' << format_number(cfg.alpha_blue) << ','
                 << g.size() << ',' << format_number(red_mass(p, g)) << '\n';
    }
    std::cout << a.count << " graph(s) written to " << dir.string() << '\n';
    return 0;
}

// stats --------------------------------------------------------------------

int cmd_stats(const GraphArgs& a) {
    const auto g = load_graph(a.edges, a.colors);
    write_summary_csv(g, std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-fair PageRank on node-colored directed graphs"};
    app.require_subcommand(1);

    RankArgs rank;
    auto* rank_cmd = app.add_subcommand("rank", "Score one graph with one algorithm");
    add_graph_options(rank_cmd, rank.graph, true);
    add_common_options(rank_cmd, rank.common);
    rank_cmd->add_option("--algo", rank.algo, "opr, fspr, lfpr-n, lfpr-u, lfpr-p or lfpr-o")->capture_default_str();
    rank_cmd->add_option("--phi", rank.phi, "Target red share (default: red node fraction)");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Loss and red mass over a grid of phi values");
    sweep_cmd->add_option("--edges", sweep.graph.edges, "Edge list")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--colors", sweep.graph.colors, "Color file")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--target-set", sweep.graph.target_set, "Target set S")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--target-protected", sweep.graph.target_protected, "Protected part of S")
        ->check(CLI::ExistingFile);
    add_common_options(sweep_cmd, sweep.common);
    sweep_cmd->add_option("--algo", sweep.algos, "Comma-separated algorithms")->capture_default_str();
    sweep_cmd->add_option("--phi", sweep.phis, "Comma-separated phi values")->required();
    sweep_cmd->add_option("--r", sweep.r_list, "Synthetic grid: comma-separated red probabilities");
    sweep_cmd->add_option("--alpha-red", sweep.alpha_red_list, "Synthetic grid: red homophily values");
    sweep_cmd->add_option("--alpha-blue", sweep.alpha_blue_list, "Synthetic grid: blue homophily values");
    sweep_cmd->add_option("--nodes", sweep.nodes, "Synthetic grid: graph size")->capture_default_str();
    sweep_cmd->add_option("--n0", sweep.seed_nodes, "Synthetic grid: seed ring size")->capture_default_str();
    sweep_cmd->add_option("--seeds", sweep.seeds, "Synthetic grid: graphs per cell")->capture_default_str();

    AuditArgs audit;
    auto* audit_cmd = app.add_subcommand("audit", "Personalized fairness of every (or a sample of) node");
    add_graph_options(audit_cmd, audit.graph, true);
    add_common_options(audit_cmd, audit.common);
    audit_cmd->add_option("--algo", audit.algo, "Whose transition matrix to audit")->capture_default_str();
    audit_cmd->add_option("--phi", audit.phi, "Target red share (default: red node fraction)");
    audit_cmd->add_option("--sample", audit.sample, "Number of nodes to audit");
    audit_cmd->add_option("--bins", audit.bins, "Histogram bins")->capture_default_str();

    GenerateArgs gen;
    auto* gen_cmd = app.add_subcommand("generate", "Biased preferential-attachment graphs");
    add_common_options(gen_cmd, gen.common, false);
    gen_cmd->add_option("--nodes", gen.cfg.nodes, "Final node count")->capture_default_str();
    gen_cmd->add_option("--n0", gen.cfg.seed_nodes, "Seed ring size")->capture_default_str();
    gen_cmd->add_option("--r", gen.cfg.red_probability, "Probability an arriving node is red")->capture_default_str();
    gen_cmd->add_option("--alpha", gen.alpha, "Homophily for both groups");
    gen_cmd->add_option("--alpha-red", gen.cfg.alpha_red, "Homophily of red arrivals")->capture_default_str();
    gen_cmd->add_option("--alpha-blue", gen.cfg.alpha_blue, "Homophily of blue arrivals")->capture_default_str();
    gen_cmd->add_option("--edges-per-node", gen.cfg.edges_per_node, "Edges per arrival")->capture_default_str();
    gen_cmd->add_option("--count", gen.count, "Number of graphs (seeds derived from --seed)")->capture_default_str();

    GraphArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Print the group summary CSV");
    add_graph_options(stats_cmd, stats, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*rank_cmd) return cmd_rank(rank);
        if (*sweep_cmd) return cmd_sweep(sweep);
        if (*audit_cmd) return cmd_audit(audit);
        if (*gen_cmd) return cmd_generate(gen);
        if (*stats_cmd) return cmd_stats(stats);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
