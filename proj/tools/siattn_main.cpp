// Command-line front end for the scale-invariant attention lab.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "siattn/attention.hpp"
#include "siattn/experiments.hpp"
#include "siattn/mclab.hpp"
#include "siattn/moments.hpp"
#include "siattn/report.hpp"
#include "siattn/schedule.hpp"
#include "siattn/svg.hpp"
#include "siattn/tensor_io.hpp"

namespace {

using namespace siattn;

std::vector<std::uint64_t> log_spaced_grid(std::uint64_t lo, std::uint64_t hi,
                                           std::uint64_t points) {
    if (lo < 1 || hi <= lo || points < 2)
        throw std::invalid_argument("grid: need 1 <= t-min < t-max and t-points >= 2");
    std::vector<std::uint64_t> grid;
    const double llo = std::log(static_cast<double>(lo));
    const double lhi = std::log(static_cast<double>(hi));
    for (std::uint64_t i = 0; i < points; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
        const auto t = static_cast<std::uint64_t>(std::llround(std::exp(llo + frac * (lhi - llo))));
        if (grid.empty() || t > grid.back()) grid.push_back(t);
    }
    return grid;
}

LogitModel parse_scheme(const std::string& token, double tau, double s) {
    if (token == "identity" || token == "id") return IdentityLogits{};
    if (token == "logn") return LogNLogits{s, 1};  // n tracks the context length in fig1
    if (token == "si" || token == "schedule" || token == "scale-invariant")
        return resolve_params(tau);
    throw CLI::ValidationError("--schemes: unknown scheme '" + token +
                               "' (expected identity|logn|si)");
}

// Every *_mean column of a fig1 report plotted against the context length.
void emit_fig1_svg(const ExperimentReport& report, const std::string& path) {
    std::vector<Series> ys;
    for (const Series& s : report.columns)
        if (s.name != "length" && s.name.ends_with("_mean")) ys.push_back(s);
    const std::string svg = svg_line_chart("synthetic attention metrics vs context length",
                                           "context length", "metric", report.columns.front(),
                                           ys, /*log_x=*/true);
    write_svg(svg, path);
}

// One entropy polyline per delta against the range start t.
void emit_fig2_svg(const ExperimentReport& report, const std::string& path) {
    const std::vector<double>& delta = report.columns[0].values;
    const std::vector<double>& t = report.columns[1].values;
    const std::vector<double>& h = report.columns[2].values;
    Series x{"t", {}};
    std::vector<Series> ys;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (ys.empty() || delta[i] != delta[i - 1]) {
            ys.push_back(Series{"delta=" + format_double(delta[i]), {}});
            if (ys.size() == 1)
                x.values.clear();
        }
        if (ys.size() == 1) x.values.push_back(t[i]);
        ys.back().values.push_back(h[i]);
    }
    write_svg(svg_line_chart("range entropy scaling", "t", "mean range entropy", x, ys,
                             /*log_x=*/true),
              path);
}

int run_schedule(double tau, std::uint64_t t_max, const std::string& out) {
    const ScheduleParams params = resolve_params(tau);
    std::vector<Series> cols = {Series{"t", {}}, Series{"a", {}}, Series{"m", {}},
                                Series{"expected_unnorm_attention", {}}};
    for (std::uint64_t t = 0; t <= t_max; ++t) {
        const SchedulePoint pt = schedule_at(t, params);
        cols[0].values.push_back(static_cast<double>(t));
        cols[1].values.push_back(pt.a);
        cols[2].values.push_back(pt.m);
        cols[3].values.push_back(expected_unnorm_attention(t, params));
    }
    std::vector<std::pair<std::string, std::string>> meta = {
        {"kind", "schedule"},
        {"alpha", format_double(params.alpha)},
        {"beta", format_double(params.beta)},
        {"tau", format_double(params.tau)},
    };
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << to_csv(meta, cols);
    return 0;
}

struct AttendArgs {
    std::string q_path, k_path, v_path, out_path, weights_path, metrics_path;
    std::string pos = "nope";
    std::string modifier = "id";
    double theta = 10000.0;
    double effective_base = 1024.0;
    std::uint64_t train_len = 0, infer_len = 0;
    double tau = 10.0;
    double logn_s = 0.4;
    int heads = 1;
    int head = 0;
    std::int64_t metrics_query = -1;  // -1 means the last query row
    std::vector<std::uint64_t> boundaries = {10, 100, 1000};
    std::uint64_t local_window = 100;
};

int run_attend(const AttendArgs& args) {
    const Tensor q = read_tensor(args.q_path);
    const Tensor k = read_tensor(args.k_path);
    const Tensor v = read_tensor(args.v_path);
    if (q.ndim() != 2) throw std::runtime_error("attend: Q must be a 2-D [n x d] tensor");

    AttentionConfig cfg;
    cfg.head_dim = static_cast<int>(q.cols());
    cfg.n_heads = args.heads;
    cfg.return_weights = !args.weights_path.empty() || !args.metrics_path.empty();

    if (args.pos == "nope") {
        cfg.pos = NoPe{};
    } else if (args.pos == "rope") {
        cfg.pos = Rope{args.theta};
    } else if (args.pos == "prope") {
        cfg.pos = PRope{args.theta, args.effective_base};
    } else {
        cfg.pos = Ntk{args.theta, args.train_len, args.infer_len};
    }

    if (args.modifier == "id") {
        cfg.modifier = Identity{};
    } else if (args.modifier == "si") {
        cfg.modifier = ScaleInvariant{resolve_params(args.tau)};
    } else if (args.modifier == "logn") {
        cfg.modifier = LogN{args.logn_s, /*per_query=*/true};
    } else {
        cfg.modifier = Alibi{args.heads};
    }

    const AttentionResult result = causal_attention(q, k, v, cfg, args.head);
    write_tensor(result.output, args.out_path);
    if (!args.weights_path.empty()) write_tensor(*result.weights, args.weights_path);

    if (!args.metrics_path.empty()) {
        const std::size_t n = q.rows();
        const std::size_t query =
            args.metrics_query < 0 ? n - 1 : static_cast<std::size_t>(args.metrics_query);
        const AttentionMetrics metrics =
            attention_metrics(*result.weights, query, args.boundaries, args.local_window);
        std::vector<Series> cols = {
            Series{"query_index", {static_cast<double>(query)}},
            Series{"global_entropy", {metrics.global_entropy}},
        };
        for (std::size_t r = 0; r + 1 < args.boundaries.size(); ++r)
            cols.push_back(Series{"range_" + std::to_string(args.boundaries[r]) + "_" +
                                      std::to_string(args.boundaries[r + 1]) + "_entropy",
                                  {metrics.range_entropies[r]}});
        cols.push_back(Series{"local" + std::to_string(args.local_window) + "_mass",
                              {metrics.local_mass}});
        std::vector<std::pair<std::string, std::string>> meta = {{"kind", "attend_metrics"}};
        std::ofstream f(args.metrics_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + args.metrics_path);
        f << to_csv(meta, cols);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"siattn - scale-invariant attention numerical lab"};
    app.require_subcommand(1);

    // schedule
    double sc_tau = 10.0;
    std::uint64_t sc_tmax = 0;
    std::string sc_out;
    auto* sc = app.add_subcommand("schedule", "Tabulate (a_t, m_t, E[A~_t]) as CSV");
    sc->add_option("--tau", sc_tau, "lengthscale in tokens")->capture_default_str();
    sc->add_option("--t-max", sc_tmax, "largest distance to tabulate")->required();
    sc->add_option("--out", sc_out, "output CSV path")->required();

    // theorem1
    double t1_tau = 10.0;
    std::vector<std::uint64_t> t1_deltas = {10};
    std::vector<std::uint64_t> t1_ts = {8192};
    std::uint64_t t1_samples = 4096, t1_seed = 0;
    unsigned t1_threads = 0;
    std::string t1_out;
    auto* t1 = app.add_subcommand(
        "theorem1", "Monte Carlo vs closed-form range totals Z and negentropies N~");
    t1->add_option("--tau", t1_tau)->capture_default_str();
    t1->add_option("--delta", t1_deltas, "range width factors")->delimiter(',')->capture_default_str();
    t1->add_option("--t", t1_ts, "range starts")->delimiter(',')->capture_default_str();
    t1->add_option("--samples", t1_samples)->capture_default_str();
    t1->add_option("--seed", t1_seed)->capture_default_str();
    t1->add_option("--threads", t1_threads, "0 = hardware concurrency")->capture_default_str();
    t1->add_option("--out", t1_out, "output CSV path")->required();

    // fig1
    std::vector<std::uint64_t> f1_lengths = {512,  1024,  2048,  4096,
                                             8192, 16384, 32768, 65536};
    std::vector<std::string> f1_schemes = {"identity", "logn", "si"};
    double f1_s = 0.4, f1_tau = 10.0;
    std::uint64_t f1_samples = 512, f1_seed = 0, f1_window = 100;
    std::vector<std::uint64_t> f1_bounds = {10, 100, 1000};
    unsigned f1_threads = 0;
    std::string f1_out, f1_svg;
    auto* f1 = app.add_subcommand("fig1",
                                  "Entropy / local-mass comparison of logit schemes on "
                                  "IID Gaussian logits");
    f1->add_option("--lengths", f1_lengths, "context lengths")->delimiter(',')->capture_default_str();
    f1->add_option("--schemes", f1_schemes, "identity|logn|si")->delimiter(',')->capture_default_str();
    f1->add_option("--s", f1_s, "LogN multiplier s")->capture_default_str();
    f1->add_option("--tau", f1_tau)->capture_default_str();
    f1->add_option("--samples", f1_samples)->capture_default_str();
    f1->add_option("--seed", f1_seed)->capture_default_str();
    f1->add_option("--boundaries", f1_bounds, "range-entropy boundaries")->delimiter(',')->capture_default_str();
    f1->add_option("--local-window", f1_window)->capture_default_str();
    f1->add_option("--threads", f1_threads)->capture_default_str();
    f1->add_option("--out", f1_out, "output CSV path")->required();
    f1->add_option("--svg", f1_svg, "optional SVG chart path");

    // fig2
    double f2_tau = 10.0;
    std::vector<std::uint64_t> f2_deltas = {2, 5, 10};
    std::uint64_t f2_tmin = 100, f2_tmax = 100000, f2_points = 16;
    std::uint64_t f2_samples = 2048, f2_seed = 0;
    std::string f2_modifier = "si";
    unsigned f2_threads = 0;
    std::string f2_out, f2_svg;
    auto* f2 = app.add_subcommand("fig2", "Range-entropy scaling fits vs ln t and sqrt(ln t)");
    f2->add_option("--tau", f2_tau)->capture_default_str();
    f2->add_option("--delta", f2_deltas)->delimiter(',')->capture_default_str();
    f2->add_option("--t-min", f2_tmin)->capture_default_str();
    f2->add_option("--t-max", f2_tmax)->capture_default_str();
    f2->add_option("--t-points", f2_points)->capture_default_str();
    f2->add_option("--samples", f2_samples)->capture_default_str();
    f2->add_option("--seed", f2_seed)->capture_default_str();
    f2->add_option("--modifier", f2_modifier, "si|id (id = unscaled control)")
        ->check(CLI::IsMember({"si", "id"}))
        ->capture_default_str();
    f2->add_option("--threads", f2_threads)->capture_default_str();
    f2->add_option("--out", f2_out, "output CSV path")->required();
    f2->add_option("--svg", f2_svg, "optional SVG chart path");

    // attend
    AttendArgs at;
    auto* atc = app.add_subcommand("attend", "Dense causal attention over SIAT tensor files");
    atc->add_option("--q", at.q_path)->required();
    atc->add_option("--k", at.k_path)->required();
    atc->add_option("--v", at.v_path)->required();
    atc->add_option("--pos", at.pos, "positional scheme")
        ->check(CLI::IsMember({"nope", "rope", "prope", "ntk"}))
        ->capture_default_str();
    atc->add_option("--theta", at.theta)->capture_default_str();
    atc->add_option("--effective-base", at.effective_base)->capture_default_str();
    atc->add_option("--train-len", at.train_len);
    atc->add_option("--infer-len", at.infer_len);
    atc->add_option("--modifier", at.modifier, "logit modifier")
        ->check(CLI::IsMember({"id", "si", "logn", "alibi"}))
        ->capture_default_str();
    atc->add_option("--tau", at.tau)->capture_default_str();
    atc->add_option("--logn-s", at.logn_s)->capture_default_str();
    atc->add_option("--heads", at.heads)->capture_default_str();
    atc->add_option("--head", at.head)->capture_default_str();
    atc->add_option("--out", at.out_path, "output SIAT tensor")->required();
    atc->add_option("--weights", at.weights_path, "optional weights SIAT tensor");
    atc->add_option("--metrics", at.metrics_path, "optional metrics CSV");
    atc->add_option("--metrics-query", at.metrics_query, "query row for metrics (-1 = last)")
        ->capture_default_str();
    atc->add_option("--boundaries", at.boundaries)->delimiter(',')->capture_default_str();
    atc->add_option("--local-window", at.local_window)->capture_default_str();

    // qq
    std::string qq_in, qq_out;
    std::uint64_t qq_n = 99;
    auto* qq = app.add_subcommand("qq", "QQ points of a SIAT tensor against the standard normal");
    qq->add_option("--in", qq_in, "input SIAT tensor")->required();
    qq->add_option("--quantiles", qq_n)->capture_default_str();
    qq->add_option("--out", qq_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);

        if (sc->parsed()) return run_schedule(sc_tau, sc_tmax, sc_out);

        if (t1->parsed()) {
            McConfig mc{t1_samples, t1_seed, resolve_params(t1_tau)};
            const ExperimentReport report =
                run_theorem1(resolve_params(t1_tau), t1_deltas, t1_ts, mc, t1_threads);
            write_csv(report, t1_out);
            return 0;
        }

        if (f1->parsed()) {
            std::vector<LogitModel> schemes;
            for (const std::string& token : f1_schemes)
                schemes.push_back(parse_scheme(token, f1_tau, f1_s));
            McConfig mc{f1_samples, f1_seed, IdentityLogits{}};
            const ExperimentReport report =
                run_fig1(f1_lengths, schemes, mc, f1_bounds, f1_window, f1_threads);
            write_csv(report, f1_out);
            if (!f1_svg.empty()) emit_fig1_svg(report, f1_svg);
            return 0;
        }

        if (f2->parsed()) {
            const ScheduleParams params = resolve_params(f2_tau);
            McConfig mc{f2_samples, f2_seed,
                        f2_modifier == "id" ? LogitModel{IdentityLogits{}} : LogitModel{params}};
            const std::vector<std::uint64_t> grid = log_spaced_grid(f2_tmin, f2_tmax, f2_points);
            const ExperimentReport report = run_fig2(params, f2_deltas, grid, mc, f2_threads);
            write_csv(report, f2_out);
            if (!f2_svg.empty()) emit_fig2_svg(report, f2_svg);
            return 0;
        }

        if (atc->parsed()) {
            if (at.pos == "ntk" && (at.train_len == 0 || at.infer_len == 0))
                throw CLI::ValidationError(
                    "attend: --pos ntk requires --train-len and --infer-len");
            return run_attend(at);
        }

        if (qq->parsed()) {
            const Tensor in = read_tensor(qq_in);
            const auto points = qq_points(in.data, qq_n);
            std::vector<Series> cols = {Series{"theoretical", {}}, Series{"empirical", {}}};
            for (const QqPoint& pt : points) {
                cols[0].values.push_back(pt.theoretical);
                cols[1].values.push_back(pt.empirical);
            }
            std::vector<std::pair<std::string, std::string>> meta = {
                {"kind", "qq"},
                {"quantiles", std::to_string(qq_n)},
                {"sample_size", std::to_string(in.size())},
            };
            std::ofstream f(qq_out, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + qq_out);
            f << to_csv(meta, cols);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
