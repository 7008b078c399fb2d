// Command-line driver: Q-plane sweeps, level sets, single-Q diagnostics and
// the property suites.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "phom/sweep.hpp"
#include "phom/validation.hpp"

namespace {

using namespace phom;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct Overrides {
    std::string config;
    std::string out;
    std::optional<int> grid_n;
    std::optional<std::uint64_t> seed;
    std::string scheme;
    std::optional<int> jobs;

    void add_to(CLI::App *cmd, bool config_required) {
        auto *c = cmd->add_option("--config", config, "experiment config (JSON)");
        if (config_required) c->required();
        c->check(CLI::ExistingFile);
        cmd->add_option("--out", out, "output directory (overrides output.dir)");
        cmd->add_option("--grid-n", grid_n, "grid points per side");
        cmd->add_option("--seed", seed, "seed for random coefficient patterns");
        cmd->add_option("--scheme", scheme, "standard, monotone or filtered");
        cmd->add_option("--jobs", jobs, "worker threads");
    }

    ExperimentConfig load() const {
        ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
        if (!out.empty()) c.output.dir = out;
        if (grid_n) {
            if (*grid_n < 3) throw ConfigError("--grid-n must be at least 3");
            c.grid_n = *grid_n;
        }
        if (seed) c.seed = *seed;
        if (!scheme.empty()) c.pipeline.scheme.kind = parse_scheme(scheme);
        if (jobs) {
            if (*jobs < 1) throw ConfigError("--jobs must be at least 1");
            c.jobs = *jobs;
        }
        c.pipeline.scheme.validate();
        return c;
    }
};

Sym2 parse_q(const std::string &text) {
    std::vector<double> v;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        try {
            v.push_back(std::stod(part));
        } catch (const std::exception &) {
            throw ConfigError("--q: '" + part + "' is not a number");
        }
    }
    if (v.size() == 2) return Sym2::diag(v[0], v[1]);
    if (v.size() == 3) return Sym2{v[0], v[1], v[2]};
    throw ConfigError("--q expects 'l1,l2' or 'a11,a12,a22'");
}

int cmd_sweep(const Overrides &o) {
    const ExperimentConfig c = o.load();
    const CellOperator op = c.build_operator();
    const auto points = c.q_points();

    const auto csv_path = c.output.dir / c.output.csv;
    std::ofstream csv = open_output(csv_path);
    write_csv_header(csv);
    csv.flush();

    const auto start = std::chrono::steady_clock::now();
    const auto records = run_sweep(c, op, points, [&](std::size_t i, const HomogenizationRecord &r) {
        write_csv_row(csv, r);
        csv.flush();
        std::fprintf(stderr, "[%zu/%zu] f_bar=%.6g error=%.3g %s\n", i + 1, points.size(), r.f_bar,
                     r.error, std::string(status_name(r.status)).c_str());
    });
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!csv) throw std::runtime_error("write failed for '" + csv_path.string() + "'");

    const SweepSummary s = summarize(records);
    std::ofstream report = open_output(c.output.dir / c.output.report);
    report << report_json(c, s, wall) << '\n';

    std::printf("%zu records, %zu failures, %zu violated; wrote %s\n", s.records, s.failures, s.violated,
                csv_path.string().c_str());
    return s.failures > 0 ? kExitPartial : kExitOk;
}

int cmd_levelset(const Overrides &o, std::optional<double> level, std::optional<int> angles) {
    const ExperimentConfig c = o.load();
    const auto points = level_set(c, level.value_or(c.q.level), angles.value_or(c.q.angles));
    const auto path = c.output.dir / "levelset.csv";
    std::ofstream os = open_output(path);
    write_level_set_csv(os, points);
    std::size_t flagged = 0;
    for (const auto &p : points) flagged += !p.flag.empty();
    std::printf("%zu angles, %zu flagged; wrote %s\n", points.size(), flagged, path.string().c_str());
    return flagged > 0 ? kExitPartial : kExitOk;
}

int cmd_single(const Overrides &o, const std::string &q_text, long history_stride) {
    ExperimentConfig c = o.load();
    c.pipeline.solver.history_stride = history_stride;
    Sym2 q;
    if (!q_text.empty()) {
        q = parse_q(q_text);
    } else {
        const auto pts = c.q_points();
        if (pts.empty()) throw ConfigError("no Q given and the config selects none");
        q = pts.front();
    }
    const CellOperator op = c.build_operator();
    PipelineDetail detail;
    const HomogenizationRecord r = homogenize(op, q, c.pipeline, c.seed, &detail);
    std::cout << record_to_json(r) << '\n';

    if (!o.out.empty() && r.converged()) {
        std::ofstream u = open_output(c.output.dir / "corrector.csv");
        write_csv(u, detail.cell.u);
        std::ofstream rho = open_output(c.output.dir / "measure.csv");
        write_csv(rho, detail.rho);
        std::ofstream hist = open_output(c.output.dir / "history.csv");
        write_history_csv(hist, detail.cell);
    }
    return r.converged() ? kExitOk : kExitPartial;
}

int cmd_validate(std::uint64_t seed, int grid_n) {
    ValidationOptions opt;
    opt.seed = seed;
    opt.grid_n = grid_n;
    bool all = true;
    for (const SuiteResult &r : run_validation(opt)) {
        std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all &= r.passed;
    }
    return all ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Numerical homogenization of fully nonlinear elliptic operators on the torus"};
    app.require_subcommand(1);

    Overrides sweep_o, level_o, single_o;
    auto *sweep = app.add_subcommand("sweep", "homogenize every Q of the config's selection");
    sweep_o.add_to(sweep, true);

    auto *levelset = app.add_subcommand("levelset", "level sets of F_bar and L_bar along rays");
    level_o.add_to(levelset, true);
    std::optional<double> level;
    std::optional<int> angles;
    levelset->add_option("--level", level, "level value (default q.level)");
    levelset->add_option("--angles", angles, "number of rays (default q.angles)");

    auto *single = app.add_subcommand("single", "one Q with full diagnostics");
    single_o.add_to(single, false);
    std::string q_text;
    long history_stride = 100;
    single->add_option("--q", q_text, "'l1,l2' (diagonal) or 'a11,a12,a22'");
    single->add_option("--history-stride", history_stride, "residual history stride");

    auto *validate = app.add_subcommand("validate", "run the property suites");
    std::uint64_t v_seed = ValidationOptions{}.seed;
    int v_grid = ValidationOptions{}.grid_n;
    validate->add_option("--seed", v_seed, "seed for the sampled suites");
    validate->add_option("--grid-n", v_grid, "grid for the cell-problem suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sweep) return cmd_sweep(sweep_o);
        if (*levelset) return cmd_levelset(level_o, level, angles);
        if (*single) return cmd_single(single_o, q_text, history_stride);
        if (*validate) return cmd_validate(v_seed, v_grid);
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const DomainError &e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPartial;
    }
    return kExitOk;
}
