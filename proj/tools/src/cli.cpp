#include "chaostune_cli/cli.hpp"

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaostune/config.hpp"
#include "chaostune/csv.hpp"
#include "chaostune/error.hpp"
#include "chaostune/experiments.hpp"
#include "chaostune/metrics.hpp"
#include "chaostune/plot.hpp"
#include "chaostune/text.hpp"

namespace chaostune::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

RunConfig resolve_config(const GlobalOptions& g) {
    RunConfig cfg = g.config.empty() ? default_config() : load_config(g.config);
    if (g.seed) cfg.set_seed(*g.seed);
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    return cfg;
}

json optional_number(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metrics_json(const RunMetrics& m) {
    return {{"count", m.count},
            {"rmse", number(m.rmse)},
            {"max_abs_err", number(m.max_abs_err)},
            {"transient", m.transient},
            {"max_abs_err_after_transient", optional_number(m.max_abs_err_after)},
            {"window_averages", m.window_averages},
            {"diverged", m.diverged},
            {"divergence_time", optional_number(m.divergence_time)}};
}

void print_rows(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
    std::size_t w = 0;
    for (const auto& [k, _] : rows) w = std::max(w, k.size());
    for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
}

std::string show(std::optional<double> v) { return v ? format_double(*v) : std::string("-"); }

std::vector<std::pair<std::string, std::string>> metrics_rows(const RunMetrics& m, bool trajectory = true) {
    std::vector<std::pair<std::string, std::string>> rows{{"count", std::to_string(m.count)},
                                                          {"rmse", format_double(m.rmse)},
                                                          {"max |err|", format_double(m.max_abs_err)}};
    if (trajectory) {
        rows.emplace_back("max |err| after " + format_double(m.transient) + " s", show(m.max_abs_err_after));
        rows.emplace_back("diverged", m.diverged ? "yes" : "no");
        rows.emplace_back("divergence time", show(m.divergence_time));
    }
    return rows;
}

void write_json(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

Scenario optional_scenario(const std::string& path) {
    return path.empty() ? Scenario{} : load_scenario(path);
}

struct SimulateArgs {
    std::string scenario;
    bool plot = false;
};

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a, std::ostream& out) {
    const Scenario sc = optional_scenario(a.scenario);
    const RunConfig cfg = with_scenario(resolve_config(g), sc);
    const Trajectory tr = simulate(cfg.initial, cfg.loop, cfg.simulation, sc.events, cfg.adaptive.binding);
    const RunMetrics m = compute_metrics(tr);

    write_text_file(cfg.out_dir / "trajectory.csv", trajectory_to_csv(tr));
    json summary = {{"command", "simulate"},
                    {"status", std::string(to_string(tr.status))},
                    {"rows", tr.rows.size()},
                    {"binding", cfg.adaptive.binding.to_string()},
                    {"metrics", metrics_json(m)}};
    write_json(cfg.out_dir / "summary.json", summary);
    if (a.plot) {
        write_text_file(cfg.out_dir / "error.svg", render_svg(error_plot(tr)));
        write_text_file(cfg.out_dir / "phase.svg", render_svg(phase_plot(tr)));
    }
    auto rows = metrics_rows(m);
    rows.insert(rows.begin(), {"status", std::string(to_string(tr.status))});
    rows.insert(rows.begin() + 1, {"rows", std::to_string(tr.rows.size())});
    print_rows(out, rows);
    out << "wrote " << (cfg.out_dir / "trajectory.csv").string() << '\n';
    return kExitOk;
}

struct CollectArgs {
    std::optional<std::size_t> episodes;
    std::string scenario;
    std::string binding;
    std::string coupling;
    std::string out;
};

int cmd_collect(const GlobalOptions& g, const CollectArgs& a, std::ostream& out) {
    RunConfig cfg = with_scenario(resolve_config(g), optional_scenario(a.scenario));
    if (a.episodes) {
        if (*a.episodes == 0) throw Error(ErrorCode::InvalidArgument, "--episodes must be >= 1");
        cfg.collection.episodes = *a.episodes;
    }
    if (!a.binding.empty()) cfg.adaptive.binding = SigmaBinding::parse(a.binding);
    if (!a.coupling.empty()) cfg.collection.sigmas.coupling = Coupling::parse(a.coupling);
    const Dataset ds = collect_dataset(collection_spec(cfg));
    const fs::path path = a.out.empty() ? cfg.out_dir / "dataset.csv" : fs::path(a.out);
    write_text_file(path, dataset_to_csv(ds));
    print_rows(out, {{"episodes", std::to_string(cfg.collection.episodes)},
                     {"records", std::to_string(ds.records.size())},
                     {"binding", cfg.adaptive.binding.to_string()},
                     {"coupling", cfg.collection.sigmas.coupling.to_string()}});
    out << "wrote " << path.string() << '\n';
    return kExitOk;
}

struct TrainArgs {
    std::string dataset;
    std::optional<int> epochs;
    std::optional<double> lr;
    std::optional<std::size_t> batch_size;
    bool include_u = false;
    std::string out;
};

Dataset load_split(const RunConfig& cfg, const std::string& path) {
    Dataset ds = dataset_from_csv(read_text_file(path));
    return split_dataset(std::move(ds), cfg.collection.split_ratio, cfg.seed);
}

int cmd_train(const GlobalOptions& g, const TrainArgs& a, std::ostream& out) {
    RunConfig cfg = resolve_config(g);
    auto& tr = cfg.surrogate.training;
    if (a.epochs) {
        if (*a.epochs < 1) throw Error(ErrorCode::InvalidArgument, "--epochs must be >= 1");
        tr.epochs = *a.epochs;
    }
    if (a.lr) {
        if (!(*a.lr > 0.0)) throw Error(ErrorCode::InvalidArgument, "--lr must be > 0");
        tr.lr0 = *a.lr;
    }
    if (a.batch_size) {
        if (*a.batch_size < 2) throw Error(ErrorCode::InvalidArgument, "--batch-size must be >= 2");
        tr.batch_size = *a.batch_size;
    }
    if (a.include_u) cfg.surrogate.net.input_dim = 6;

    const Dataset ds = load_split(cfg, a.dataset);
    RegressionNet net(cfg.surrogate.net);
    const TrainLog log = train(net, ds, tr);

    const fs::path ckpt = a.out.empty() ? cfg.out_dir / "model.json" : fs::path(a.out);
    save_checkpoint(net, ckpt);
    write_text_file(cfg.out_dir / "train_log.csv", train_log_to_csv(log));

    out << "epoch  lr          train_rmse            test_rmse\n";
    for (const auto& row : log) {
        out << std::left << std::setw(7) << row.epoch << std::setw(12) << format_double(row.lr) << std::setw(22)
            << format_double(row.train_rmse) << format_double(row.test_rmse) << '\n';
    }
    out << "wrote " << ckpt.string() << '\n';
    return kExitOk;
}

struct AdaptiveArgs {
    std::string scenario;
    std::string checkpoint;
    std::string dataset;
    std::optional<double> threshold;
    std::optional<std::size_t> window;
    std::optional<std::size_t> max_attempts;
    std::string binding;
    std::string coupling;
    bool plot = false;
};

int cmd_adaptive(const GlobalOptions& g, const AdaptiveArgs& a, std::ostream& out) {
    const Scenario sc = optional_scenario(a.scenario);
    RunConfig cfg = with_scenario(resolve_config(g), sc);
    auto& ad = cfg.adaptive;
    if (a.threshold) ad.err_threshold = *a.threshold;
    if (a.window) ad.window = *a.window;
    if (a.max_attempts) ad.max_attempts = *a.max_attempts;
    if (!a.binding.empty()) ad.binding = SigmaBinding::parse(a.binding);
    if (!a.coupling.empty()) ad.sampler.coupling = Coupling::parse(a.coupling);
    validate(ad);

    RegressionNet net = load_checkpoint(a.checkpoint);
    if (!net.trained()) throw Error(ErrorCode::Untrained, "checkpoint " + a.checkpoint + " holds an untrained network");
    MemoryBuffer memory;
    if (!a.dataset.empty()) {
        const Dataset ds = load_split(cfg, a.dataset);
        memory = seeded_memory(cfg, ds.train_records());
    } else {
        memory.prev_sys_avg = net.train_mean_err();
    }

    // Scenario binding/coupling were folded into cfg above; flags win over both.
    Scenario events_only;
    events_only.events = sc.events;
    const AdaptiveRun run = run_adaptive_experiment(cfg, events_only, std::move(net), std::move(memory));
    const RunMetrics m = compute_metrics(run.trajectory);

    std::size_t updates = 0, misses = 0, retrains = 0;
    for (const auto& e : run.events) {
        updates += e.kind == EventKind::SigmaUpdate;
        misses += e.kind == EventKind::NoImprovement;
        retrains += e.kind == EventKind::Retrain;
    }
    write_text_file(cfg.out_dir / "trajectory.csv", trajectory_to_csv(run.trajectory));
    write_text_file(cfg.out_dir / "events.csv", event_log_to_csv(run.events));
    json summary = {{"command", "adaptive"},
                    {"status", std::string(to_string(run.trajectory.status))},
                    {"rows", run.trajectory.rows.size()},
                    {"binding", ad.binding.to_string()},
                    {"coupling", ad.sampler.coupling.to_string()},
                    {"sigma_updates", updates},
                    {"no_improvement", misses},
                    {"retrains", retrains},
                    {"memo_size", run.buffer.memo.size()},
                    {"metrics", metrics_json(m)}};
    write_json(cfg.out_dir / "summary.json", summary);
    if (a.plot) {
        write_text_file(cfg.out_dir / "error.svg", render_svg(error_plot(run.trajectory)));
        write_text_file(cfg.out_dir / "phase.svg", render_svg(phase_plot(run.trajectory)));
        write_text_file(cfg.out_dir / "sigmas.svg",
                        render_svg(sigmas_plot(run.events, cfg.simulation.t_end)));
    }

    auto rows = metrics_rows(m);
    rows.insert(rows.begin(), {{"status", std::string(to_string(run.trajectory.status))},
                               {"sigma updates", std::to_string(updates)},
                               {"no improvement", std::to_string(misses)},
                               {"retrains", std::to_string(retrains)}});
    print_rows(out, rows);
    out << "wrote " << (cfg.out_dir / "events.csv").string() << '\n';
    return kExitOk;
}

struct EvaluateArgs {
    std::string trajectory;
    std::string checkpoint;
    std::string dataset;
    std::string predictions;
    double transient = 0.5;
};

int cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a, std::ostream& out) {
    const RunConfig cfg = resolve_config(g);
    const int sources = !a.trajectory.empty() + !a.predictions.empty() + !a.checkpoint.empty();
    if (sources != 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "evaluate needs exactly one of --trajectory, --predictions or --checkpoint with --dataset");
    }
    json summary = {{"command", "evaluate"}};
    RunMetrics m;
    if (!a.trajectory.empty()) {
        const Trajectory tr = trajectory_from_csv(read_text_file(a.trajectory));
        m = compute_metrics(tr, MetricOptions{a.transient, cfg.adaptive.window});
        summary["source"] = "trajectory";
        summary["status"] = std::string(to_string(tr.status));
    } else {
        std::vector<PredictionPair> pairs;
        if (!a.predictions.empty()) {
            pairs = predictions_from_csv(read_text_file(a.predictions));
            summary["source"] = "predictions";
        } else {
            if (a.dataset.empty()) throw Error(ErrorCode::InvalidArgument, "--checkpoint needs --dataset");
            const RegressionNet net = load_checkpoint(a.checkpoint);
            const Dataset ds = load_split(cfg, a.dataset);
            const auto held_out = ds.test_records();
            const Eigen::VectorXd pred = predict_records(net, held_out);
            for (std::size_t i = 0; i < held_out.size(); ++i) {
                pairs.push_back({pred(static_cast<Eigen::Index>(i)), held_out[i].err});
            }
            write_text_file(cfg.out_dir / "predictions.csv", predictions_to_csv(pairs));
            summary["source"] = "checkpoint";
            summary["split"] = "test";
        }
        std::vector<double> p, t;
        for (const auto& pr : pairs) {
            p.push_back(pr.prediction);
            t.push_back(pr.target);
        }
        m = compute_metrics(p, t);
    }
    summary["metrics"] = metrics_json(m);
    write_json(cfg.out_dir / "summary.json", summary);
    print_rows(out, metrics_rows(m, a.trajectory.size() > 0));
    out << "wrote " << (cfg.out_dir / "summary.json").string() << '\n';
    return kExitOk;
}

struct PlotArgs {
    std::string kind;
    std::string input;
    std::string out;
    double t_end = 0.0;
};

int cmd_plot(const GlobalOptions& g, const PlotArgs& a, std::ostream& out) {
    const RunConfig cfg = resolve_config(g);
    const std::string text = read_text_file(a.input);
    PlotSpec spec;
    if (a.kind == "error") spec = error_plot(trajectory_from_csv(text));
    else if (a.kind == "phase") spec = phase_plot(trajectory_from_csv(text));
    else if (a.kind == "sigmas") spec = sigmas_plot(event_log_from_csv(text), a.t_end);
    else spec = rmse_plot(train_log_from_csv(text));
    const fs::path path = a.out.empty() ? cfg.out_dir / (a.kind + ".svg") : fs::path(a.out);
    write_text_file(path, render_svg(spec));
    out << "wrote " << path.string() << '\n';
    return kExitOk;
}

bool is_usage_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::ParseFailure:
        case ErrorCode::IoFailure:
        case ErrorCode::UnknownTarget:
        case ErrorCode::InvalidArgument:
        case ErrorCode::TooSmall:
        case ErrorCode::EmptyDataset:
        case ErrorCode::EmptyInput:
        case ErrorCode::Untrained:
        case ErrorCode::GainDegenerate:
            return true;
        default:
            return false;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulate, tune and evaluate a self-tuning chaotic oscillator controller", "chaostune"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "chaostune 0.1.0");

    GlobalOptions g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for every random stream")->group("Global");
    app.add_option("--config", g.config, "Run configuration (JSON)")->group("Global");
    app.add_option("--out-dir", g.out_dir, "Output directory (default from config, else ./out)")->group("Global");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
    c_sim->add_option("--scenario", sim.scenario, "Scenario file with scripted events");
    c_sim->add_flag("--plot", sim.plot, "Also write error.svg and phase.svg");

    CollectArgs col;
    auto* c_col = app.add_subcommand("collect", "Generate a training dataset from seeded episodes");
    c_col->add_option("--episodes", col.episodes, "Number of episodes");
    c_col->add_option("--scenario", col.scenario, "Take binding/coupling from a scenario file");
    c_col->add_option("--binding", col.binding, "Sigma binding t1,t2");
    c_col->add_option("--coupling", col.coupling, "s2/s1 ratio or 'uncoupled'");
    c_col->add_option("--out", col.out, "Dataset path (default <out-dir>/dataset.csv)");

    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "Train the error-prediction network");
    c_tr->add_option("--dataset", tr.dataset, "Dataset CSV")->required();
    c_tr->add_option("--epochs", tr.epochs, "Training epochs");
    c_tr->add_option("--lr", tr.lr, "Initial learning rate");
    c_tr->add_option("--batch-size", tr.batch_size, "Mini-batch size");
    c_tr->add_flag("--include-u", tr.include_u, "Use the control signal as a sixth input");
    c_tr->add_option("--out", tr.out, "Checkpoint path (default <out-dir>/model.json)");

    AdaptiveArgs ad;
    auto* c_ad = app.add_subcommand("adaptive", "Run the loop under online sigma retuning");
    c_ad->add_option("--scenario", ad.scenario, "Scenario file");
    c_ad->add_option("--checkpoint", ad.checkpoint, "Trained network checkpoint")->required();
    c_ad->add_option("--dataset", ad.dataset, "Training dataset used to seed the rehearsal memory");
    c_ad->add_option("--threshold", ad.threshold, "Error threshold that triggers a proposal");
    c_ad->add_option("--window", ad.window, "Steps between retraining probes");
    c_ad->add_option("--max-attempts", ad.max_attempts, "Candidate cap per trigger");
    c_ad->add_option("--binding", ad.binding, "Sigma binding t1,t2");
    c_ad->add_option("--coupling", ad.coupling, "s2/s1 ratio or 'uncoupled'");
    c_ad->add_flag("--plot", ad.plot, "Also write error, phase and sigma plots");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "Summarise a trajectory or a network's predictions");
    c_ev->add_option("--trajectory", ev.trajectory, "Trajectory CSV");
    c_ev->add_option("--checkpoint", ev.checkpoint, "Checkpoint to score on the dataset's held-out split");
    c_ev->add_option("--dataset", ev.dataset, "Dataset CSV (with --checkpoint)");
    c_ev->add_option("--predictions", ev.predictions, "Predictions CSV (prediction,target)");
    c_ev->add_option("--transient", ev.transient, "Seconds excluded from the post-transient maximum");

    PlotArgs pl;
    auto* c_pl = app.add_subcommand("plot", "Render an SVG line plot from a CSV file");
    c_pl->add_option("--kind", pl.kind, "error | phase | sigmas | rmse")
        ->required()
        ->check(CLI::IsMember({"error", "phase", "sigmas", "rmse"}));
    c_pl->add_option("--input", pl.input, "Input CSV")->required();
    c_pl->add_option("--out", pl.out, "SVG path (default <out-dir>/<kind>.svg)");
    c_pl->add_option("--t-end", pl.t_end, "Hold the last sigma values until this time");

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << "chaostune 0.1.0\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run 'chaostune --help' for usage\n";
        return kExitUsage;
    }
    if (seed_opt->count() > 0) g.seed = seed;

    try {
        if (c_sim->parsed()) return cmd_simulate(g, sim, out);
        if (c_col->parsed()) return cmd_collect(g, col, out);
        if (c_tr->parsed()) return cmd_train(g, tr, out);
        if (c_ad->parsed()) return cmd_adaptive(g, ad, out);
        if (c_ev->parsed()) return cmd_evaluate(g, ev, out);
        if (c_pl->parsed()) return cmd_plot(g, pl, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_usage_error(e.code()) ? kExitUsage : kExitInternal;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace chaostune::cli
