// lab: experiment driver for the group-discrepancy laboratory.
//
// Each subcommand maps onto a serializable ExperimentConfig, so every run is
// reproducible from its report header. Exit codes: 0 complete/verdict true,
// 2 verdict false, 1 error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lab/experiment.hpp"

namespace {

using nlohmann::json;

std::vector<std::uint32_t> parse_elements(const std::string& text) {
    std::vector<std::uint32_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string piece = text.substr(pos, next - pos);
        if (!piece.empty()) out.push_back(std::uint32_t(std::stoul(piece)));
        pos = next + 1;
    }
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    // "a:b:step" inclusive, or a comma list.
    if (text.find(':') != std::string::npos) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos) throw CLI::ValidationError("grid must be a:b:step");
        const double a = std::stod(text.substr(0, c1));
        const double b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const double step = std::stod(text.substr(c2 + 1));
        std::vector<double> out;
        for (double v = a; v <= b + 1e-12; v += step) out.push_back(v);
        return out;
    }
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        out.push_back(std::stod(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

struct CliState {
    lab::ExperimentConfig config;
    json params = json::object();
    bool selected = false;
};

void emit(const lab::RunReport& report, const lab::ExperimentConfig& config) {
    if (!config.out_path.empty()) {
        std::ofstream os(config.out_path);
        if (!os) throw std::runtime_error("cannot open output file: " + config.out_path);
        lab::write_jsonl(report, os);
        json summary{{"aggregates", report.aggregates},
                     {"records", report.records.size()},
                     {"out", config.out_path},
                     {"exit_code", report.exit_code}};
        std::cout << summary.dump() << "\n";
    } else {
        lab::write_jsonl(report, std::cout);
    }
    if (!config.csv_path.empty()) {
        std::ofstream cs(config.csv_path);
        if (!cs) throw std::runtime_error("cannot open csv file: " + config.csv_path);
        lab::write_csv_summary(report, cs);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"group-discrepancy laboratory"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand

    CliState st;
    std::string config_path;
    std::uint64_t seed_master = 0;
    std::uint64_t seed_stream = 0;

    app.add_option("--config", config_path, "JSON config file; explicit flags override fields");
    auto* seed_opt = app.add_option("--seed", seed_master, "master seed")->envname("LAB_SEED");
    auto* stream_opt = app.add_option("--seed-stream", seed_stream, "seed stream");
    auto* threads_opt = app.add_option("--threads", st.config.threads, "worker threads");
    auto* out_opt = app.add_option("--out", st.config.out_path, "JSON-lines report path");
    auto* csv_opt = app.add_option("--csv", st.config.csv_path, "CSV summary path");
    auto* budget_opt = app.add_option("--budget", st.config.budget, "evaluation budget");

    // --- discrepancy ---
    std::string d_group, d_a, d_x, d_y;
    std::uint64_t d_a_seed = 0;
    std::uint32_t d_xs = 0, d_ys = 0;
    auto* discrepancy = app.add_subcommand("discrepancy", "pair counts against a set");
    discrepancy->add_option("--group", d_group)->required();
    auto* d_a_opt = discrepancy->add_option("--A", d_a, "explicit elements of A");
    auto* d_as_opt = discrepancy->add_option("--A-seed", d_a_seed, "density-1/2 seed for A");
    auto* d_x_opt = discrepancy->add_option("--X", d_x, "explicit elements of X");
    auto* d_y_opt = discrepancy->add_option("--Y", d_y, "explicit elements of Y");
    auto* d_xs_opt = discrepancy->add_option("--x-size", d_xs, "random X of this size");
    auto* d_ys_opt = discrepancy->add_option("--y-size", d_ys, "random Y of this size");
    discrepancy->callback([&] {
        st.config.subcommand = "discrepancy";
        st.params["group"] = d_group;
        if (*d_a_opt) st.params["a_elements"] = parse_elements(d_a);
        if (*d_as_opt) st.params["a_seed"] = d_a_seed;
        if (*d_x_opt) st.params["x_elements"] = parse_elements(d_x);
        if (*d_y_opt) st.params["y_elements"] = parse_elements(d_y);
        if (*d_xs_opt) st.params["x_size"] = d_xs;
        if (*d_ys_opt) st.params["y_size"] = d_ys;
        st.selected = true;
    });

    // --- search ---
    std::string s_group, s_a, s_method = "anneal";
    std::uint64_t s_a_seed = 0;
    std::uint32_t s_minx = 1, s_miny = 1, s_restarts = 4;
    auto* search = app.add_subcommand("search", "adversarial worst-pair search");
    search->add_option("--group", s_group)->required();
    auto* s_a_opt = search->add_option("--A", s_a);
    auto* s_as_opt = search->add_option("--A-seed", s_a_seed);
    search->add_option("--min-x", s_minx)->required();
    search->add_option("--min-y", s_miny)->required();
    search->add_option("--method", s_method, "exhaustive|greedy|anneal");
    search->add_option("--restarts", s_restarts);
    search->callback([&] {
        st.config.subcommand = "search";
        st.params["group"] = s_group;
        if (*s_a_opt) st.params["a_elements"] = parse_elements(s_a);
        if (*s_as_opt) st.params["a_seed"] = s_a_seed;
        st.params["min_x"] = s_minx;
        st.params["min_y"] = s_miny;
        st.params["method"] = s_method;
        st.params["restarts"] = s_restarts;
        st.selected = true;
    });

    // --- fourier ---
    auto* fourier = app.add_subcommand("fourier", "characters, Gauss sums, spectral bounds");
    std::uint32_t f_p = 5;
    std::uint64_t f_trials = 1000;
    std::string f_sizes;
    auto* fourier_gauss = fourier->add_subcommand("gauss", "Gauss-sum modulus profile");
    fourier_gauss->add_option("--p", f_p)->required();
    fourier_gauss->callback([&] {
        st.config.subcommand = "fourier";
        st.params["mode"] = "gauss";
        st.params["p"] = f_p;
        st.selected = true;
    });
    auto* fourier_bound = fourier->add_subcommand("bound", "spectral bound battery");
    fourier_bound->add_option("--p", f_p)->required();
    fourier_bound->add_option("--trials", f_trials);
    auto* f_sizes_opt = fourier_bound->add_option("--sizes", f_sizes, "fixed |X|,|Y|");
    fourier_bound->callback([&] {
        st.config.subcommand = "fourier";
        st.params["mode"] = "bound";
        st.params["p"] = f_p;
        st.params["trials"] = f_trials;
        if (*f_sizes_opt) {
            const auto sizes = parse_elements(f_sizes);
            if (sizes.size() != 2) throw CLI::ValidationError("--sizes needs sx,sy");
            st.params["size_x"] = sizes[0];
            st.params["size_y"] = sizes[1];
        }
        st.selected = true;
    });

    // --- subsample ---
    auto* subsample = app.add_subcommand("subsample", "subset-pair expectation checks");
    std::string ss_group;
    std::uint32_t ss_xs = 0, ss_ys = 0, ss_attempts = 100;
    double ss_w = 1e5;
    std::uint64_t ss_trials = 100000;
    auto* subsample_check = subsample->add_subcommand("check", "oracle + Monte Carlo battery");
    subsample_check->add_option("--group", ss_group)->required();
    subsample_check->add_option("--x-size", ss_xs)->required();
    subsample_check->add_option("--y-size", ss_ys)->required();
    subsample_check->add_option("--w", ss_w)->required();
    subsample_check->add_option("--trials", ss_trials);
    subsample_check->add_option("--max-attempts", ss_attempts);
    subsample_check->callback([&] {
        st.config.subcommand = "subsample";
        st.params = json{{"group", ss_group}, {"x_size", ss_xs},
                         {"y_size", ss_ys},   {"w", ss_w},
                         {"trials", ss_trials}, {"max_attempts", ss_attempts}};
        st.selected = true;
    });

    // --- bounds ---
    auto* bounds = app.add_subcommand("bounds", "tail-bound certificates");
    std::uint64_t b_n = 100, b_nmax = 5000;
    double b_eps = 0.1;
    std::string b_grid = "0.05:0.45:0.05";
    auto* bounds_binom = bounds->add_subcommand("binom", "exact binomial tail vs rate bound");
    bounds_binom->add_option("--n", b_n)->required();
    bounds_binom->add_option("--eps", b_eps)->required();
    bounds_binom->callback([&] {
        st.config.subcommand = "bounds";
        st.params = json{{"mode", "binom"}, {"n", b_n}, {"eps", b_eps}};
        st.selected = true;
    });
    auto* bounds_sweep = bounds->add_subcommand("sweep", "grid sweep of tails");
    bounds_sweep->add_option("--eps-grid", b_grid, "a:b:step or comma list");
    bounds_sweep->add_option("--n-max", b_nmax);
    bounds_sweep->callback([&] {
        st.config.subcommand = "bounds";
        st.params = json{{"mode", "sweep"}, {"n_max", b_nmax}, {"eps_grid", parse_grid(b_grid)}};
        st.selected = true;
    });

    // --- subspace ---
    auto* subspace = app.add_subcommand("subspace", "GF(2) subspace machinery");
    std::uint32_t sp_n = 4, sp_k = 2, sp_trials = 200;
    int sp_c = 1;
    double sp_eps = 0.18;
    bool sp_pairs = false;
    std::string sp_scan = "sampled";
    std::uint64_t sp_samples = 2000;
    auto* subspace_enum = subspace->add_subcommand("enum", "canonical enumeration + counts");
    subspace_enum->add_option("--n", sp_n)->required();
    subspace_enum->add_option("--k", sp_k)->required();
    subspace_enum->add_flag("--pairs", sp_pairs, "include intersection pair profile");
    subspace_enum->callback([&] {
        st.config.subcommand = "subspace";
        st.params = json{{"mode", "enum"}, {"n", sp_n}, {"k", sp_k}, {"pairs", sp_pairs}};
        st.selected = true;
    });
    auto* subspace_exp = subspace->add_subcommand("experiment", "dense-subspace second moment");
    subspace_exp->add_option("--n", sp_n)->required();
    subspace_exp->add_option("--c", sp_c)->required();
    subspace_exp->add_option("--eps", sp_eps)->required();
    subspace_exp->add_option("--trials", sp_trials);
    subspace_exp->add_option("--scan", sp_scan, "sampled|exhaustive");
    subspace_exp->add_option("--samples", sp_samples, "subspace draws per trial");
    subspace_exp->callback([&] {
        st.config.subcommand = "subspace";
        st.params = json{{"mode", "experiment"}, {"n", sp_n},        {"c", sp_c},
                         {"eps", sp_eps},        {"trials", sp_trials}, {"scan", sp_scan},
                         {"samples", sp_samples}};
        st.selected = true;
    });

    // --- sumset ---
    std::string su_group;
    std::uint32_t su_target = 0, su_restarts = 50;
    std::uint64_t su_seeds = 100;
    auto* sumset = app.add_subcommand("sumset", "greedy X with X+X inside A");
    sumset->add_option("--group", su_group)->required();
    auto* su_target_opt = sumset->add_option("--target", su_target);
    sumset->add_option("--restarts", su_restarts);
    sumset->add_option("--seeds", su_seeds, "number of random A draws");
    sumset->callback([&] {
        st.config.subcommand = "sumset";
        st.params = json{{"group", su_group}, {"restarts", su_restarts}, {"seeds", su_seeds}};
        if (*su_target_opt) st.params["target"] = su_target;
        st.selected = true;
    });

    // --- extract ---
    auto* extract = app.add_subcommand("extract", "two-source extractor evaluation");
    std::string e_group, e_mode = "exhaustive", e_a;
    std::uint64_t e_a_seed = 0;
    double e_floor = 0.55, e_c = 0.9, e_q = 0.1;
    std::uint64_t e_trials = 100000;
    std::uint32_t e_max_pairs = 64;
    auto* extract_certify = extract->add_subcommand("certify", "flat-source certificate");
    extract_certify->add_option("--group", e_group)->required();
    auto* e_a_opt = extract_certify->add_option("--A", e_a);
    auto* e_as_opt = extract_certify->add_option("--A-seed", e_a_seed);
    extract_certify->add_option("--entropy-floor", e_floor)->required();
    extract_certify->add_option("--c", e_c)->required();
    extract_certify->add_option("--mode", e_mode, "exhaustive|search");
    extract_certify->callback([&] {
        st.config.subcommand = "extract";
        st.params = json{{"mode", "certify"},
                         {"group", e_group},
                         {"entropy_floor", e_floor},
                         {"c", e_c},
                         {"certify_mode", e_mode}};
        if (*e_a_opt) st.params["a_elements"] = parse_elements(e_a);
        if (*e_as_opt) st.params["a_seed"] = e_a_seed;
        st.selected = true;
    });
    auto* extract_vn = extract->add_subcommand("vn", "von Neumann extractor bias");
    extract_vn->add_option("--q", e_q)->required();
    extract_vn->add_option("--trials", e_trials, "accepted outputs");
    extract_vn->add_option("--max-pairs", e_max_pairs);
    extract_vn->callback([&] {
        st.config.subcommand = "extract";
        st.params = json{{"mode", "vn"}, {"q", e_q}, {"trials", e_trials},
                         {"max_pairs", e_max_pairs}};
        st.selected = true;
    });

    // --- er ---
    std::uint32_t er_n = 1024, er_xs = 200, er_ys = 200;
    std::uint64_t er_seeds = 1000;
    bool er_overlap = false;
    auto* er = app.add_subcommand("er", "Erdos-Renyi bipartite control model");
    er->add_option("--n", er_n)->required();
    er->add_option("--x-size", er_xs)->required();
    er->add_option("--y-size", er_ys)->required();
    er->add_option("--seeds", er_seeds);
    er->add_flag("--allow-overlap", er_overlap, "sample X and Y independently");
    er->callback([&] {
        st.config.subcommand = "er";
        st.params = json{{"n", er_n},         {"x_size", er_xs}, {"y_size", er_ys},
                         {"seeds", er_seeds}, {"disjoint", !er_overlap}};
        st.selected = true;
    });

    CLI11_PARSE(app, argc, argv);

    try {
        lab::ExperimentConfig config;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file: " + config_path);
            json base_json;
            in >> base_json;
            config = lab::config_from_json(base_json);
        }
        if (st.selected) {
            config.subcommand = st.config.subcommand;
            for (const auto& item : st.params.items()) config.params[item.key()] = item.value();
        }
        if (config.subcommand.empty())
            throw std::runtime_error("no subcommand given (and no config file)");
        if (*seed_opt) config.seed.master = seed_master;
        if (*stream_opt) config.seed.stream = seed_stream;
        if (*threads_opt) config.threads = st.config.threads;
        if (*out_opt) config.out_path = st.config.out_path;
        if (*csv_opt) config.csv_path = st.config.csv_path;
        if (*budget_opt) config.budget = st.config.budget;

        const lab::RunReport report = lab::run(config);
        emit(report, config);
        return report.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
