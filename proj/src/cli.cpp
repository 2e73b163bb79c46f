#include "besselheat/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "besselheat/errors.hpp"
#include "besselheat/kernels.hpp"
#include "besselheat/montecarlo.hpp"
#include "besselheat/verify.hpp"

namespace besselheat::cli {
namespace {

using Json = nlohmann::ordered_json;

enum class Format { json, csv };

struct RunConfig {
    std::string subcommand;
    Format format = Format::json;
    std::string output_path;
    std::optional<unsigned> threads;
    std::uint64_t seed = 0;
};

struct EvalArgs {
    double nu = 0.0;
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    std::string kernel = "series";
    double eps = kernels::kDefaultEps;
    double floor = kernels::kDefaultSeriesFloor;
};

struct ScanArgs {
    double nu = 0.0;
    std::string kernel = "main";
    std::vector<double> x_nodes;
    std::vector<double> y_nodes;
    std::vector<double> t_nodes;
    double max_spread = 1e3;
};

struct SimulateArgs {
    double nu = 0.0;
    double x = 0.0;
    double t = 0.0;
    double h = 1e-3;
    std::uint64_t paths = 100000;
    int bins = 40;
    std::string zero = "reflect";
    std::string one = "kill";
    bool no_bridge = false;
    bool compare = true;
    double min_fraction = 0.95;
};

struct VerifyArgs {
    std::string suite;
    std::uint64_t samples = 100000;
    double nu = 0.0;
    double t = 0.2;
    double s = 0.3;
    double x = 0.4;
    double y = 0.6;
    int nodes = 2000;
    double tolerance = 1e-6;
    std::vector<double> t_list;
};

// One CSV record: nu,t,x,y,kernel,comparator,ratio,tail_bound.  Missing
// fields are left empty (null in JSON).
struct CsvRecord {
    double nu = 0.0;
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    std::optional<double> kernel;
    std::optional<double> comparator;
    std::optional<double> ratio;
    std::optional<double> tail_bound;
};

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const std::vector<CsvRecord>& records)
{
    std::string s = "nu,t,x,y,kernel,comparator,ratio,tail_bound\n";
    const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const CsvRecord& r : records) {
        s += format_number(r.nu) + ',' + format_number(r.t) + ',' + format_number(r.x) + ',' + format_number(r.y) +
             ',' + opt(r.kernel) + ',' + opt(r.comparator) + ',' + opt(r.ratio) + ',' + opt(r.tail_bound) + '\n';
    }
    return s;
}

Json number_or_null(const std::optional<double>& v)
{
    if (v && std::isfinite(*v)) {
        return *v;
    }
    return nullptr;
}

Json point_json(const GridPoint& p)
{
    return Json{{"t", p.t}, {"x", p.x}, {"y", p.y}};
}

const char* status_name(NodeStatus s)
{
    switch (s) {
    case NodeStatus::counted:
        return "counted";
    case NodeStatus::refused:
        return "refused";
    case NodeStatus::inaccurate:
        return "inaccurate";
    }
    return "?";
}

struct Outcome {
    Json json;
    std::vector<CsvRecord> csv;
    bool csv_available = true;
    bool verified = true;
};

// ---------------------------------------------------------------------------

Outcome run_eval(const EvalArgs& a)
{
    kernels::SeriesOptions opts;
    opts.eps = a.eps;
    opts.floor = a.floor;
    const KernelQuery q{Order{a.nu}, a.t, a.x, a.y};
    std::optional<SeriesValue> series;
    double value = 0.0;
    std::optional<double> comparator;

    if (a.kernel == "series") {
        series = kernels::eigen_series_kernel(q, opts);
        comparator = kernels::comparator_main(q);
    } else if (a.kernel == "reflected") {
        series = kernels::reflected_density(q, opts);
        comparator = kernels::comparator_reflected(q);
    } else if (a.kernel == "killed") {
        series = kernels::killed_density(Order{a.nu}, a.t, a.x, a.y, opts);
        comparator = kernels::comparator_killed(Order{a.nu}, a.t, a.x, a.y);
    } else if (a.kernel == "free") {
        value = kernels::free_density(q);
        comparator = kernels::free_density_comparator(q);
    } else if (a.kernel == "hunt") {
        value = kernels::hunt_remainder(q, opts);
    } else if (a.kernel == "images-dirichlet") {
        value = kernels::images_dirichlet(a.t, a.x, a.y);
    } else if (a.kernel == "images-neumann") {
        value = kernels::images_neumann_dirichlet(a.t, a.x, a.y, a.floor);
    } else {
        throw DomainError("unknown kernel '" + a.kernel + "'");
    }
    if (series) {
        value = series->value;
    }

    Outcome o;
    o.json = Json{{"command", "eval"}, {"kernel", a.kernel}, {"nu", a.nu}, {"t", a.t}, {"x", a.x}, {"y", a.y},
                  {"value", value}};
    if (series) {
        o.json["terms_used"] = series->terms_used;
        o.json["tail_bound"] = series->tail_bound;
        o.json["rounding_estimate"] = series->rounding_estimate;
        o.json["ill_conditioned"] = series->ill_conditioned();
    }
    std::optional<double> ratio;
    if (comparator) {
        ratio = value / *comparator;
        o.json["comparator"] = *comparator;
        o.json["ratio"] = *ratio;
    }
    CsvRecord rec{a.nu, a.t, a.x, a.y, value, comparator, ratio, std::nullopt};
    if (series) {
        rec.tail_bound = series->tail_bound;
    }
    o.csv.push_back(rec);
    return o;
}

Outcome run_scan(const ScanArgs& a, const VerifyOptions& vopts)
{
    Grid grid = Grid::standard();
    if (!a.x_nodes.empty()) {
        grid.x = a.x_nodes;
    }
    if (!a.y_nodes.empty()) {
        grid.y = a.y_nodes;
    }
    if (!a.t_nodes.empty()) {
        grid.t = a.t_nodes;
    }
    const KernelKind kind = kernel_kind_from_string(a.kernel);
    const RatioReport r = ratio_scan(Order{a.nu}, grid, kind, vopts);

    Outcome o;
    Json nodes = Json::array();
    for (const NodeRatio& n : r.nodes) {
        const bool has_value = n.status != NodeStatus::refused;
        nodes.push_back(Json{{"t", n.at.t},
                             {"x", n.at.x},
                             {"y", n.at.y},
                             {"status", status_name(n.status)},
                             {"kernel", has_value ? Json(n.kernel) : Json(nullptr)},
                             {"comparator", has_value ? Json(n.comparator) : Json(nullptr)},
                             {"ratio", has_value ? Json(n.ratio) : Json(nullptr)},
                             {"tail_bound", has_value ? Json(n.tail_bound) : Json(nullptr)}});
        CsvRecord rec{a.nu, n.at.t, n.at.x, n.at.y, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
        if (has_value) {
            rec.kernel = n.kernel;
            rec.comparator = n.comparator;
            rec.ratio = n.ratio;
            rec.tail_bound = n.tail_bound;
        }
        o.csv.push_back(rec);
    }
    o.verified = r.spread() <= a.max_spread;
    o.json = Json{{"command", "scan"},
                  {"report",
                   {{"nu", a.nu},
                    {"kernel", to_string(kind)},
                    {"grid", {{"x", grid.x}, {"y", grid.y}, {"t", grid.t}}},
                    {"ratio_min", r.ratio_min},
                    {"ratio_max", r.ratio_max},
                    {"spread", r.spread()},
                    {"max_spread", a.max_spread},
                    {"argmin", point_json(r.argmin)},
                    {"argmax", point_json(r.argmax)},
                    {"ill_conditioned_count", r.ill_conditioned_count},
                    {"refused_count", r.refused_count},
                    {"counted", r.counted},
                    {"passed", o.verified},
                    {"nodes", nodes}}}};
    return o;
}

ZeroBoundary parse_zero(const std::string& s)
{
    if (s == "reflect") {
        return ZeroBoundary::reflect;
    }
    if (s == "kill") {
        return ZeroBoundary::kill;
    }
    return ZeroBoundary::none;
}

Outcome run_simulate(const SimulateArgs& a, const RunConfig& rc)
{
    PathEnsembleConfig c;
    c.nu = Order{a.nu};
    c.start_x = a.x;
    c.horizon_t = a.t;
    c.step_h = a.h;
    c.paths = a.paths;
    c.boundary_at_zero = parse_zero(a.zero);
    c.boundary_at_one = a.one == "kill" ? OneBoundary::kill : OneBoundary::none;
    c.seed = rc.seed;
    c.bridge_correction = !a.no_bridge;
    c.threads = rc.threads;
    const HistogramDensity h = simulate_density(c, a.bins);

    // analytic density matching the boundary conditions, when there is one
    std::function<double(double)> analytic;
    std::string analytic_name;
    if (a.compare) {
        const bool zero_killed = c.boundary_at_zero == ZeroBoundary::kill && a.nu < 0.0;
        if (c.boundary_at_one == OneBoundary::kill) {
            if (zero_killed) {
                analytic_name = "killed_density";
                analytic = [&](double y) { return kernels::killed_density(c.nu, a.t, a.x, y).value; };
            } else {
                analytic_name = "reflected_density";
                analytic = [&](double y) { return kernels::reflected_density({c.nu, a.t, a.x, y}).value; };
            }
        } else if (!zero_killed) {
            analytic_name = "free_density";
            analytic = [&](double y) { return kernels::free_density({c.nu, a.t, a.x, y}); };
        }
    }

    Outcome o;
    Json hist{{"bin_edges", h.bin_edges},
              {"counts", h.counts},
              {"estimates", h.estimates},
              {"std_errors", h.std_errors},
              {"survivors", h.survivors},
              {"killed", h.killed},
              {"overflow", h.overflow},
              {"paths_total", h.paths_total},
              {"total_mass", h.total_mass()},
              {"total_mass_error", h.total_mass_error()}};
    o.json = Json{{"command", "simulate"},
                  {"config",
                   {{"nu", a.nu},
                    {"x", a.x},
                    {"t", a.t},
                    {"h", a.h},
                    {"paths", a.paths},
                    {"bins", a.bins},
                    {"boundary_at_zero", a.zero},
                    {"boundary_at_one", a.one},
                    {"bridge_correction", c.bridge_correction},
                    {"seed", rc.seed}}},
                  {"histogram", hist}};

    std::vector<std::optional<double>> expected(h.bins());
    if (analytic) {
        const HistogramComparison cmp = compare_histogram(h, analytic);
        Json z = Json::array();
        for (const BinComparison& b : cmp.bins) {
            expected[b.bin] = b.expected;
            z.push_back(Json{{"bin", b.bin}, {"estimate", b.estimate}, {"expected", b.expected},
                             {"z", number_or_null(b.z)}});
        }
        o.verified = cmp.fraction_within() >= a.min_fraction;
        o.json["comparison"] = Json{{"analytic", analytic_name},     {"occupied", cmp.occupied},
                                    {"within_3sigma", cmp.within_3sigma}, {"fraction_within", cmp.fraction_within()},
                                    {"min_fraction", a.min_fraction}, {"passed", o.verified},
                                    {"bins", z}};
    }
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double mid = 0.5 * (h.bin_edges[i] + h.bin_edges[i + 1]);
        CsvRecord rec{a.nu, a.t, a.x, mid, h.estimates[i], expected[i], std::nullopt, h.std_errors[i]};
        if (expected[i] && *expected[i] != 0.0) {
            rec.ratio = h.estimates[i] / *expected[i];
        }
        o.csv.push_back(rec);
    }
    return o;
}

Json sample_json(const InequalitySample& s, bool two_points)
{
    Json j{{"index", s.index}, {"nu", s.nu}};
    if (two_points) {
        j["x"] = s.x;
        j["y"] = s.y;
    } else {
        j["z"] = s.x;
    }
    j["log_lhs"] = s.sides.log_lhs;
    j["log_rhs"] = s.sides.log_rhs;
    j["log_margin"] = s.sides.log_margin();
    return j;
}

Outcome run_verify(const VerifyArgs& a, const RunConfig& rc, const VerifyOptions& vopts)
{
    Outcome o;
    o.csv_available = false;
    Json report;
    if (a.suite == "inequalities") {
        const InequalityReport r = inequality_suite(a.samples, rc.seed, vopts);
        Json results = Json::array();
        for (const InequalityResult& res : r.results) {
            const bool two = res.name != "nasell";
            Json violations = Json::array();
            for (const auto& s : res.violations) {
                violations.push_back(sample_json(s, two));
            }
            Json witnesses = Json::array();
            for (const auto& s : res.witnesses) {
                witnesses.push_back(sample_json(s, two));
            }
            results.push_back(Json{{"name", res.name},
                                   {"domain", res.domain},
                                   {"samples", res.samples},
                                   {"violation_count", res.violations.size()},
                                   {"violations", violations},
                                   {"witnesses", witnesses}});
        }
        o.verified = r.violation_count() == 0;
        report = Json{{"seed", r.seed}, {"slack", r.slack}, {"violation_count", r.violation_count()},
                      {"results", results}};
    } else if (a.suite == "semigroup") {
        const SemigroupReport r = semigroup_check(Order{a.nu}, a.t, a.s, a.x, a.y, a.nodes, vopts);
        o.verified = r.defect <= a.tolerance && r.converged;
        report = Json{{"nu", a.nu},       {"t", a.t},
                      {"s", a.s},         {"x", a.x},
                      {"y", a.y},         {"nodes", r.nodes},
                      {"lhs", r.lhs},     {"rhs", r.rhs},
                      {"defect", r.defect}, {"defect_half_nodes", r.defect_half},
                      {"converged", r.converged}, {"tolerance", a.tolerance}};
    } else if (a.suite == "large-time") {
        std::vector<double> ts = a.t_list;
        if (ts.empty()) {
            const double l = specfun::bessel_j_zero(Order{a.nu}, 1);
            ts = {2.0 / (l * l), 4.0 / (l * l), 8.0 / (l * l)};
        }
        const LargeTimeReport r = large_time_check(Order{a.nu}, a.x, a.y, ts, vopts);
        Json entries = Json::array();
        for (const auto& e : r.entries) {
            entries.push_back(Json{{"t", e.t},
                                   {"kernel", e.kernel},
                                   {"first_term", e.first_term},
                                   {"relative_gap", e.relative_gap},
                                   {"normalized", e.normalized}});
        }
        o.verified = r.gap_monotone && r.stable;
        report = Json{{"nu", a.nu},
                      {"x", a.x},
                      {"y", a.y},
                      {"lambda1", r.lambda1},
                      {"entries", entries},
                      {"gap_monotone", r.gap_monotone},
                      {"variation_top_decade", r.variation_top_decade},
                      {"variation_last_pair", r.variation_last_pair},
                      {"tolerance", r.tolerance},
                      {"stable", r.stable},
                      {"note", "stabilization tolerance and time range are chosen by this tool"}};
    } else if (a.suite == "asymptotics") {
        const AsymptoticsReport r = asymptotics_check(Order{a.nu});
        Json entries = Json::array();
        for (const auto& e : r.entries) {
            entries.push_back(Json{{"law", e.law},
                                   {"z", e.z},
                                   {"value", e.value},
                                   {"deviation", e.deviation},
                                   {"tolerance", e.tolerance},
                                   {"predicted_correction", e.predicted},
                                   {"passed", e.passed}});
        }
        o.verified = r.passed;
        report = Json{{"nu", a.nu}, {"entries", entries}, {"passed", r.passed}};
    }
    o.json = Json{{"command", "verify"}, {"suite", a.suite}, {"passed", o.verified}, {"report", report}};
    return o;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fourier-Bessel heat kernels, comparators and their numerical verification", "besselheat"};
    app.require_subcommand(1);
    RunConfig rc;
    std::string format = "json";
    std::optional<unsigned> threads;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", rc.output_path, "write the result to this file");
        sub->add_option("--threads", threads, "worker threads (default: BESSEL_HEAT_THREADS, then all cores)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", rc.seed, "random seed");
    };

    EvalArgs ev;
    CLI::App* eval = app.add_subcommand("eval", "evaluate one kernel at (nu, t, x, y)");
    eval->add_option("--nu", ev.nu, "index")->required();
    eval->add_option("--t", ev.t, "time")->required();
    eval->add_option("--x", ev.x, "first space point")->required();
    eval->add_option("--y", ev.y, "second space point")->required();
    eval->add_option("--kernel", ev.kernel, "kernel to evaluate")
        ->check(CLI::IsMember({"series", "reflected", "killed", "free", "hunt", "images-dirichlet", "images-neumann"}));
    eval->add_option("--eps", ev.eps, "relative accuracy of the series")->check(CLI::PositiveNumber);
    eval->add_option("--floor", ev.floor, "series refusal floor for lambda_1^2 t")->check(CLI::NonNegativeNumber);
    add_common(eval);

    ScanArgs sc;
    CLI::App* scan = app.add_subcommand("scan", "kernel/comparator ratios over a grid");
    scan->add_option("--nu", sc.nu, "index")->required();
    scan->add_option("--kernel", sc.kernel, "main, reflected, killed or free")
        ->check(CLI::IsMember({"main", "reflected", "killed", "free"}));
    scan->add_option("--x-nodes", sc.x_nodes, "x grid (comma separated)")->delimiter(',');
    scan->add_option("--y-nodes", sc.y_nodes, "y grid (comma separated)")->delimiter(',');
    scan->add_option("--t-nodes", sc.t_nodes, "t grid (comma separated)")->delimiter(',');
    scan->add_option("--max-spread", sc.max_spread, "fail when ratio_max/ratio_min exceeds this")
        ->check(CLI::PositiveNumber);
    add_common(scan);

    SimulateArgs si;
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo histogram of the transition density");
    sim->add_option("--nu", si.nu, "index")->required();
    sim->add_option("--x", si.x, "starting point in (0,1)")->required();
    sim->add_option("--t", si.t, "horizon")->required();
    sim->set_help_flag("--help", "Print this help message and exit");
    sim->add_option("--h,--step", si.h, "time step")->check(CLI::PositiveNumber);
    sim->add_option("--paths", si.paths, "number of paths")->check(CLI::PositiveNumber);
    sim->add_option("--bins", si.bins, "histogram bins on [0,1]")->check(CLI::PositiveNumber);
    sim->add_option("--zero", si.zero, "boundary at 0")->check(CLI::IsMember({"reflect", "kill", "none"}));
    sim->add_option("--one", si.one, "boundary at 1")->check(CLI::IsMember({"kill", "none"}));
    sim->add_flag("--no-bridge", si.no_bridge, "check crossings of 1 at step ends only");
    sim->add_flag("!--no-compare", si.compare, "skip the comparison with the analytic density");
    sim->add_option("--min-fraction", si.min_fraction, "required fraction of bins within 3 standard errors")
        ->check(CLI::Range(0.0, 1.0));
    add_common(sim);

    VerifyArgs ve;
    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("--suite", ve.suite, "inequalities, semigroup, large-time or asymptotics")
        ->required()
        ->check(CLI::IsMember({"inequalities", "semigroup", "large-time", "asymptotics"}));
    ver->add_option("--samples", ve.samples, "samples per inequality")->check(CLI::PositiveNumber);
    ver->add_option("--nu", ve.nu, "index");
    ver->add_option("--t", ve.t, "first time (semigroup)");
    ver->add_option("--s", ve.s, "second time (semigroup)");
    ver->add_option("--x", ve.x, "first space point");
    ver->add_option("--y", ve.y, "second space point");
    ver->add_option("--nodes", ve.nodes, "quadrature nodes (semigroup), at least 40")->check(CLI::Range(40, 10000000));
    ver->add_option("--tolerance", ve.tolerance, "largest accepted defect (semigroup)")->check(CLI::PositiveNumber);
    ver->add_option("--t-list", ve.t_list, "times for the large-time check (comma separated)")->delimiter(',');
    add_common(ver);

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) {
        args.emplace_back(argv[i]);
    }
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsageError;
    }

    rc.subcommand = app.get_subcommands().front()->get_name();
    rc.format = format == "csv" ? Format::csv : Format::json;
    rc.threads = threads;
    VerifyOptions vopts;
    vopts.threads = threads;

    Outcome outcome;
    try {
        if (rc.subcommand == "eval") {
            outcome = run_eval(ev);
        } else if (rc.subcommand == "scan") {
            outcome = run_scan(sc, vopts);
        } else if (rc.subcommand == "simulate") {
            outcome = run_simulate(si, rc);
        } else {
            if (rc.format == Format::csv) {
                throw ConfigError("verify: csv output is not available; use --format json");
            }
            outcome = run_verify(ve, rc, vopts);
        }
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const IllConditioned& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kVerificationFailed;
    }

    std::string text;
    if (rc.format == Format::csv) {
        text = to_csv(outcome.csv);
    } else {
        text = outcome.json.dump(2) + "\n";
    }
    if (rc.output_path.empty()) {
        out << text;
    } else {
        std::ofstream file(rc.output_path, std::ios::binary);
        file << text;
        if (!file) {
            err << "error: cannot write " << rc.output_path << "\n";
            return kUsageError;
        }
    }
    if (!outcome.verified) {
        err << "verification failed\n";
        return kVerificationFailed;
    }
    return kSuccess;
}

}  // namespace besselheat::cli
