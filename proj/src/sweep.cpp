#include "phom/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace phom {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string &where, const std::string &what) {
    throw ConfigError(where + ": " + what);
}

// Strict object access: every key must be known, every value well typed.
class Reader {
public:
    Reader(const json &j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) bad(where_, "expected an object");
    }

    template <class T>
    void get(const char *key, T &out) {
        seen_.push_back(key);
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception &) {
            bad(path(key), "wrong type");
        }
    }

    const json *child(const char *key) {
        seen_.push_back(key);
        const auto it = j_.find(key);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    std::string path(const char *key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto &[k, v] : j_.items())
            if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) bad(where_, "unknown key '" + k + "'");
    }

private:
    const json &j_;
    std::string where_;
    std::vector<std::string> seen_;
};

Sym2 parse_matrix(const json &j, const std::string &where) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3)) bad(where, "expected [l1, l2] or [a11, a12, a22]");
    for (const auto &v : j)
        if (!v.is_number()) bad(where, "expected numbers");
    if (j.size() == 2) return Sym2::diag(j[0].get<double>(), j[1].get<double>());
    return Sym2{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json matrix_json(const Sym2 &q) {
    if (q.a12 == 0.0) return json::array({q.a11, q.a22});
    return json::array({q.a11, q.a12, q.a22});
}

PatternSpec parse_pattern_json(const json &j, const std::string &where) {
    PatternSpec p;
    if (j.is_number()) return PatternSpec::constant_value(j.get<double>());
    Reader r(j, where);
    std::string kind = "constant", orientation = "vertical";
    r.get("kind", kind);
    try {
        p.kind = parse_pattern(kind);
    } catch (const ConfigError &e) {
        bad(r.path("kind"), e.what());
    }
    r.get("cells", p.cells_per_side);
    r.get("b", p.value_b);
    r.get("w", p.value_w);
    r.get("orientation", orientation);
    if (orientation == "vertical") p.orientation = StripeOrientation::Vertical;
    else if (orientation == "horizontal") p.orientation = StripeOrientation::Horizontal;
    else bad(r.path("orientation"), "expected 'vertical' or 'horizontal'");
    r.get("p", p.p);
    r.get("mean", p.mean);
    r.get("amplitude", p.amplitude);
    r.get("lo", p.lo);
    r.get("hi", p.hi);
    r.get("value", p.constant);
    r.finish();
    if (p.cell_based() && p.cells_per_side <= 0) bad(r.path("cells"), "must be positive");
    if (!(p.p >= 0.0 && p.p <= 1.0)) bad(r.path("p"), "must lie in [0, 1]");
    return p;
}

json pattern_json(const PatternSpec &p) {
    json j;
    j["kind"] = pattern_name(p.kind);
    switch (p.kind) {
    case PatternKind::Constant:
        j["value"] = p.constant;
        break;
    case PatternKind::Stripes:
        j["orientation"] = p.orientation == StripeOrientation::Vertical ? "vertical" : "horizontal";
        [[fallthrough]];
    case PatternKind::PeriodicCheckerboard:
        j["cells"] = p.cells_per_side;
        j["b"] = p.value_b;
        j["w"] = p.value_w;
        break;
    case PatternKind::RandomCheckerboard:
        j["cells"] = p.cells_per_side;
        j["b"] = p.value_b;
        j["w"] = p.value_w;
        j["p"] = p.p;
        break;
    case PatternKind::SmoothCosine:
        j["mean"] = p.mean;
        j["amplitude"] = p.amplitude;
        break;
    case PatternKind::UniformRandom:
        j["cells"] = p.cells_per_side;
        j["lo"] = p.lo;
        j["hi"] = p.hi;
        break;
    }
    return j;
}

AxisRange parse_range(const json &j, const std::string &where) {
    AxisRange a;
    Reader r(j, where);
    r.get("min", a.min);
    r.get("max", a.max);
    r.get("step", a.step);
    r.finish();
    if (!(a.step > 0.0)) bad(r.path("step"), "must be positive");
    if (a.max < a.min) bad(where, "max below min");
    return a;
}

json range_json(const AxisRange &a) { return {{"min", a.min}, {"max", a.max}, {"step", a.step}}; }

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_bound(const SemiConcavityValue &c, bool upper) {
    if (c.is_unbounded()) return upper ? "inf" : "-inf";
    return fmt(c.value());
}

}  // namespace

std::vector<double> AxisRange::values() const {
    std::vector<double> out;
    const long count = static_cast<long>(std::floor((max - min) / step + 1e-6)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(min + static_cast<double>(i) * step);
    return out;
}

CellOperator ExperimentConfig::build_operator() const {
    const TorusGrid g(grid_n);
    PatternSpec s = scale, l = lo, h = hi;
    s.seed = seed;
    l.seed = seed + 1;
    h.seed = seed + 2;
    return CellOperator(op, CoefficientField(sample(s, g), sample(l, g), sample(h, g)), delta);
}

std::vector<Sym2> ExperimentConfig::q_points() const {
    std::vector<Sym2> out;
    switch (q.mode) {
    case QMode::Grid:
        for (double l2 : q.lambda2.values())
            for (double l1 : q.lambda1.values())
                if (std::abs(l1 - l2) >= q.min_offdiagonal) out.push_back(Sym2::diag(l1, l2));
        break;
    case QMode::List:
        out = q.list;
        break;
    case QMode::Angles:
        for (int a = 0; a < q.angles; ++a) {
            const double t = 2.0 * std::numbers::pi * a / q.angles;
            out.push_back(Sym2::diag(std::cos(t), std::sin(t)));
        }
        break;
    }
    return out;
}

ExperimentConfig config_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    Reader top(j, "config");

    int version = 0;
    top.get("schema_version", version);
    if (version != kSchemaVersion)
        bad("config.schema_version", "expected " + std::to_string(kSchemaVersion) + ", got " +
                                         std::to_string(version));

    if (const json *o = top.child("operator")) {
        Reader r(*o, "config.operator");
        std::string family = "linear";
        r.get("family", family);
        try {
            c.op.family = parse_family(family);
        } catch (const ConfigError &e) {
            bad(r.path("family"), e.what());
        }
        r.get("k", c.op.k);
        if (const json *m = r.child("linear_matrix")) c.op.linear_matrix = parse_matrix(*m, r.path("linear_matrix"));
        r.get("delta", c.delta);
        r.finish();
        try {
            c.op.validate();
        } catch (const DomainError &e) {
            bad(r.path("k"), e.what());
        }
    } else {
        bad("config", "missing 'operator'");
    }

    if (const json *o = top.child("coefficients")) {
        Reader r(*o, "config.coefficients");
        if (const json *p = r.child("scale")) c.scale = parse_pattern_json(*p, r.path("scale"));
        if (const json *p = r.child("lo")) c.lo = parse_pattern_json(*p, r.path("lo"));
        if (const json *p = r.child("hi")) c.hi = parse_pattern_json(*p, r.path("hi"));
        r.finish();
    }

    top.get("grid_n", c.grid_n);
    if (c.grid_n < 3) bad("config.grid_n", "must be at least 3");

    if (const json *o = top.child("scheme")) {
        Reader r(*o, "config.scheme");
        std::string kind = "standard";
        r.get("kind", kind);
        try {
            c.pipeline.scheme.kind = parse_scheme(kind);
        } catch (const ConfigError &e) {
            bad(r.path("kind"), e.what());
        }
        if (const json *d = r.child("directions")) {
            c.pipeline.scheme.directions.clear();
            if (!d->is_array()) bad(r.path("directions"), "expected a list of [di, dj]");
            for (const auto &p : *d) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
                    bad(r.path("directions"), "expected integer pairs");
                c.pipeline.scheme.directions.push_back({p[0].get<int>(), p[1].get<int>()});
            }
        }
        r.get("switch_tol", c.pipeline.scheme.switch_tol);
        r.finish();
    }
    try {
        c.pipeline.scheme.validate();
    } catch (const ConfigError &e) {
        bad("config.scheme", e.what());
    }

    if (const json *o = top.child("solver")) {
        Reader r(*o, "config.solver");
        r.get("tol", c.pipeline.solver.tol);
        r.get("max_iter", c.pipeline.solver.max_iter);
        double dt = 0.0;
        r.get("dt", dt);
        if (dt != 0.0) c.pipeline.solver.dt = dt;
        r.finish();
        if (!(c.pipeline.solver.tol > 0.0)) bad(r.path("tol"), "must be positive");
        if (c.pipeline.solver.dt && !(*c.pipeline.solver.dt > 0.0)) bad(r.path("dt"), "must be positive");
    }

    if (const json *o = top.child("measure")) {
        Reader r(*o, "config.measure");
        std::string mode = "auto";
        r.get("mode", mode);
        try {
            c.pipeline.measure_mode = parse_measure_mode(mode);
        } catch (const ConfigError &e) {
            bad(r.path("mode"), e.what());
        }
        r.get("increment_tol", c.pipeline.measure.increment_tol);
        r.get("residual_tol", c.pipeline.measure.residual_tol);
        r.get("max_iter", c.pipeline.measure.max_iter);
        r.get("allow_widen", c.pipeline.measure.allow_widen);
        r.finish();
    }

    if (const json *o = top.child("slack")) {
        Reader r(*o, "config.slack");
        r.get("tol_factor", c.pipeline.slack.tol_factor);
        double est = -1.0;
        r.get("refinement_estimate", est);
        if (est >= 0.0) c.pipeline.slack.refinement_estimate = est;
        r.finish();
    }

    if (const json *o = top.child("q")) {
        Reader r(*o, "config.q");
        std::string mode = "grid";
        r.get("mode", mode);
        if (mode == "grid") c.q.mode = QMode::Grid;
        else if (mode == "list") c.q.mode = QMode::List;
        else if (mode == "angles") c.q.mode = QMode::Angles;
        else bad(r.path("mode"), "expected 'grid', 'list' or 'angles'");
        if (const json *a = r.child("lambda1")) c.q.lambda1 = parse_range(*a, r.path("lambda1"));
        if (const json *a = r.child("lambda2")) c.q.lambda2 = parse_range(*a, r.path("lambda2"));
        if (const json *l = r.child("list")) {
            if (!l->is_array()) bad(r.path("list"), "expected a list of matrices");
            for (const auto &m : *l) c.q.list.push_back(parse_matrix(m, r.path("list")));
        }
        r.get("angles", c.q.angles);
        r.get("level", c.q.level);
        r.get("min_offdiagonal", c.q.min_offdiagonal);
        r.finish();
        if (c.q.angles <= 0) bad(r.path("angles"), "must be positive");
    }

    if (const json *o = top.child("output")) {
        Reader r(*o, "config.output");
        std::string dir = c.output.dir.string();
        r.get("dir", dir);
        c.output.dir = dir;
        r.get("csv", c.output.csv);
        r.get("report", c.output.report);
        r.finish();
    }

    top.get("seed", c.seed);
    top.get("jobs", c.jobs);
    if (c.jobs < 1) bad("config.jobs", "must be at least 1");
    top.finish();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return config_from_json(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string config_to_json(const ExperimentConfig &c, int indent) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["operator"] = {{"family", family_name(c.op.family)}, {"delta", c.delta}};
    if (c.op.family == Family::PucciSmoothed) j["operator"]["k"] = c.op.k;
    if (c.op.family == Family::Linear) j["operator"]["linear_matrix"] = json::array({c.op.linear_matrix.a11, c.op.linear_matrix.a12, c.op.linear_matrix.a22});
    j["coefficients"] = {{"scale", pattern_json(c.scale)}, {"lo", pattern_json(c.lo)}, {"hi", pattern_json(c.hi)}};
    j["grid_n"] = c.grid_n;

    json dirs = json::array();
    for (const Offset p : c.pipeline.scheme.directions) dirs.push_back({p.di, p.dj});
    j["scheme"] = {{"kind", scheme_name(c.pipeline.scheme.kind)}, {"directions", dirs},
                   {"switch_tol", c.pipeline.scheme.switch_tol}};
    j["solver"] = {{"tol", c.pipeline.solver.tol}, {"max_iter", c.pipeline.solver.max_iter}};
    if (c.pipeline.solver.dt) j["solver"]["dt"] = *c.pipeline.solver.dt;
    j["measure"] = {{"mode", measure_mode_name(c.pipeline.measure_mode)},
                    {"increment_tol", c.pipeline.measure.increment_tol},
                    {"residual_tol", c.pipeline.measure.residual_tol},
                    {"max_iter", c.pipeline.measure.max_iter},
                    {"allow_widen", c.pipeline.measure.allow_widen}};
    j["slack"] = {{"tol_factor", c.pipeline.slack.tol_factor}};
    if (c.pipeline.slack.refinement_estimate)
        j["slack"]["refinement_estimate"] = *c.pipeline.slack.refinement_estimate;

    const char *mode = c.q.mode == QMode::Grid ? "grid" : c.q.mode == QMode::List ? "list" : "angles";
    j["q"] = {{"mode", mode}, {"lambda1", range_json(c.q.lambda1)}, {"lambda2", range_json(c.q.lambda2)},
              {"angles", c.q.angles}, {"level", c.q.level}, {"min_offdiagonal", c.q.min_offdiagonal}};
    json list = json::array();
    for (const Sym2 &q : c.q.list) list.push_back(matrix_json(q));
    j["q"]["list"] = list;
    j["output"] = {{"dir", c.output.dir.string()}, {"csv", c.output.csv}, {"report", c.output.report}};
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    return j.dump(indent);
}

std::vector<HomogenizationRecord> run_sweep(const ExperimentConfig &config, const RecordSink &sink) {
    return run_sweep(config, config.build_operator(), config.q_points(), sink);
}

std::vector<HomogenizationRecord> run_sweep(const ExperimentConfig &config, const CellOperator &op,
                                            const std::vector<Sym2> &points,
                                            const RecordSink &sink) {
    std::vector<HomogenizationRecord> out(points.size());
    const int workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(points.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            out[i] = homogenize(op, points[i], config.pipeline, config.seed);
            if (sink) sink(i, out[i]);
        }
        return out;
    }

    std::vector<char> ready(points.size(), 0);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};

    const auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
            HomogenizationRecord r = homogenize(op, points[i], config.pipeline, config.seed);
            std::lock_guard lock(mu);
            out[i] = std::move(r);
            ready[i] = 1;
            cv.notify_all();
        }
    };

    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);

    // Collector: hand records to the sink in input order.
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return ready[i] != 0; });
        lock.unlock();
        if (sink) sink(i, out[i]);
    }
    return out;
}

std::pair<double, double> record_lambdas(const Sym2 &q) {
    if (q.a12 == 0.0) return {q.a11, q.a22};
    double lmin, lmax;
    eigenvalues(q.a11, q.a12, q.a22, lmin, lmax);
    return {lmax, lmin};
}

void write_csv_header(std::ostream &os) { os << kCsvHeader << '\n'; }

void write_csv_row(std::ostream &os, const HomogenizationRecord &r) {
    const auto [l1, l2] = record_lambdas(r.q);
    os << fmt(l1) << ',' << fmt(l2) << ',' << fmt(r.f_bar) << ',' << fmt(r.l_bar) << ','
       << fmt(r.error) << ',' << fmt_bound(r.c_bar_minus, false) << ','
       << fmt_bound(r.c_bar_plus, true) << ',' << r.iterations << ',' << fmt(r.residual) << ','
       << status_name(r.status) << '\n';
}

std::string records_to_csv(const std::vector<HomogenizationRecord> &records) {
    std::ostringstream os;
    write_csv_header(os);
    for (const auto &r : records) write_csv_row(os, r);
    return os.str();
}

std::string record_to_json(const HomogenizationRecord &r, int indent) {
    const auto bound = [](const SemiConcavityValue &c, bool upper) -> json {
        if (c.is_unbounded()) return upper ? "inf" : "-inf";
        return c.value();
    };
    json j;
    j["q"] = json::array({r.q.a11, r.q.a12, r.q.a22});
    j["f_bar"] = r.f_bar;
    j["l_bar"] = r.l_bar;
    j["error"] = r.error;
    j["c_bar_minus"] = bound(r.c_bar_minus, false);
    j["c_bar_plus"] = bound(r.c_bar_plus, true);
    j["verdict"] = verdict_name(r.verdict);
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["measure_iterations"] = r.measure_iterations;
    j["measure_residual"] = r.measure_residual;
    j["grid_n"] = r.n;
    j["scheme"] = scheme_name(r.scheme);
    j["seed"] = r.seed;
    j["status"] = status_name(r.status);
    if (!r.message.empty()) j["message"] = r.message;
    return j.dump(indent);
}

SweepSummary summarize(const std::vector<HomogenizationRecord> &records) {
    SweepSummary s;
    s.records = records.size();
    for (const auto &r : records) {
        if (!r.converged()) {
            ++s.failures;
            continue;
        }
        if (r.verdict == Verdict::Holds) ++s.holds;
        if (r.verdict == Verdict::HoldsWithinSlack) ++s.holds_within_slack;
        if (r.verdict == Verdict::Violated) ++s.violated;
        const auto [l1, l2] = record_lambdas(r.q);
        int quad = 4;
        if (l1 > 0 && l2 > 0) quad = 0;
        else if (l1 < 0 && l2 > 0) quad = 1;
        else if (l1 < 0 && l2 < 0) quad = 2;
        else if (l1 > 0 && l2 < 0) quad = 3;
        s.max_abs_error[quad] = std::max(s.max_abs_error[quad], std::abs(r.error));
    }
    return s;
}

std::string report_json(const ExperimentConfig &config, const SweepSummary &s, double wall_seconds) {
    json j;
    j["config"] = json::parse(config_to_json(config, -1));
    j["rng_algorithm"] = kRngAlgorithm;
    j["wall_clock_seconds"] = wall_seconds;
    j["records"] = s.records;
    j["failures"] = s.failures;
    j["verdicts"] = {{"holds", s.holds}, {"holds_within_slack", s.holds_within_slack}, {"violated", s.violated}};
    j["max_abs_error"] = {{"first_quadrant", s.max_abs_error[0]}, {"second_quadrant", s.max_abs_error[1]},
                          {"third_quadrant", s.max_abs_error[2]}, {"fourth_quadrant", s.max_abs_error[3]},
                          {"axes", s.max_abs_error[4]}};
    return j.dump(2);
}

std::vector<LevelSetPoint> level_set(const ExperimentConfig &config, double level, int n_angles) {
    if (!config.op.homogeneous())
        throw ConfigError("level_set needs a positively homogeneous operator family");
    if (n_angles <= 0) throw ConfigError("level_set needs a positive number of angles");
    ExperimentConfig c = config;
    c.q.mode = QMode::Angles;
    c.q.angles = n_angles;
    const auto records = run_sweep(c);

    std::vector<LevelSetPoint> out;
    for (int a = 0; a < n_angles; ++a) {
        const auto &r = records[a];
        LevelSetPoint p;
        p.theta = 2.0 * std::numbers::pi * a / n_angles;
        p.f_bar = r.f_bar;
        p.l_bar = r.l_bar;
        const double c1 = std::cos(p.theta), s1 = std::sin(p.theta);
        if (!r.converged()) {
            p.flag = std::string(status_name(r.status));
        } else {
            // A ray reaches the level only where the value has the level's sign.
            if (r.f_bar * level > 0.0) p.f_point = std::pair{c1 * level / r.f_bar, s1 * level / r.f_bar};
            if (r.l_bar * level > 0.0) p.l_point = std::pair{c1 * level / r.l_bar, s1 * level / r.l_bar};
            if (!p.f_point && !p.l_point) p.flag = "no_crossing";
            else if (!p.f_point) p.flag = "no_f_crossing";
            else if (!p.l_point) p.flag = "no_l_crossing";
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_level_set_csv(std::ostream &os, const std::vector<LevelSetPoint> &points) {
    os << "theta,f_bar,l_bar,f_lambda1,f_lambda2,l_lambda1,l_lambda2,flag\n";
    for (const auto &p : points) {
        os << fmt(p.theta) << ',' << fmt(p.f_bar) << ',' << fmt(p.l_bar) << ',';
        if (p.f_point) os << fmt(p.f_point->first) << ',' << fmt(p.f_point->second) << ',';
        else os << ",,";
        if (p.l_point) os << fmt(p.l_point->first) << ',' << fmt(p.l_point->second) << ',';
        else os << ",,";
        os << p.flag << '\n';
    }
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    return os;
}

}  // namespace phom
