#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "entail/bm25.hpp"
#include "entail/cli.hpp"
#include "entail/corpus.hpp"
#include "entail/ensemble.hpp"
#include "entail/errors.hpp"
#include "entail/metrics.hpp"
#include "entail/prediction.hpp"
#include "entail/remote.hpp"
#include "entail/run.hpp"
#include "entail/selection.hpp"

namespace fs = std::filesystem;

namespace entail::cli {
namespace {

struct SelectionFlags {
    std::string params;  // JSON file, or "tuned"
    std::optional<double> alpha;
    std::optional<std::size_t> beta;
    std::optional<double> gamma;
    std::string train_data;
    std::string train_run;
};

struct GridFlags {
    std::vector<double> alphas = GridSpec::standard().alphas;
    std::vector<std::size_t> betas = GridSpec::standard().betas;
    std::vector<double> gammas = GridSpec::standard().gammas;

    GridSpec spec() const { return {alphas, betas, gammas}; }
};

struct Options {
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

    // gen
    std::string gen_out;
    std::string preset = "2022-train";
    std::size_t entries = 0;
    double mean_candidates = 0.0;
    double mean_positives = 0.0;
    std::size_t vocab = 0;
    std::uint64_t seed = 0;
    std::string gen_split;

    // score
    std::string scorer = "bm25";
    std::string data;
    std::string split = "test";
    std::string out;
    std::string model_id;
    double k1 = Bm25Params{}.k1;
    double b = Bm25Params{}.b;
    bool stopwords = false;
    bool stem = false;
    bool normalize = false;
    std::string endpoint;
    std::size_t max_in_flight = RemoteClientConfig{}.max_in_flight;
    long timeout_ms = RemoteClientConfig{}.timeout.count();
    int retries = RemoteClientConfig{}.retries;
    std::string run_file;

    // tune
    std::string run;
    GridFlags grid;
    std::string out_params;
    std::string out_grid;

    // predict / ensemble
    SelectionFlags selection;
    std::vector<std::string> inputs;
    bool raw = false;

    // eval
    std::string pred;
    std::string breakdown;

    // report
    std::vector<std::string> rows;
    bool ablation = false;
};

std::string error_line(std::string_view kind, std::string_view message) {
    return nlohmann::json{{"error", kind}, {"message", message}}.dump();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
}

Dataset load(const std::string& path, std::string_view split) {
    return load_dataset(path, parse_split(split));
}

std::optional<SelectionParams> parse_inline_params(const std::string& text) {
    std::istringstream in(text);
    SelectionParams params;
    char c1 = 0;
    char c2 = 0;
    if (!(in >> params.alpha >> c1 >> params.beta >> c2 >> params.gamma) || c1 != ',' || c2 != ',') {
        return std::nullopt;
    }
    in >> std::ws;
    if (!in.eof()) {
        return std::nullopt;
    }
    return params;
}

SelectionParams read_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read parameter file " + path);
    }
    try {
        return selection_params_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed parameter file " + path + ": " + e.what());
    }
}

SelectionParams resolve_selection(const SelectionFlags& flags, std::size_t threads) {
    SelectionParams params;
    bool have = false;
    if (flags.params == "tuned") {
        if (flags.train_data.empty() || flags.train_run.empty()) {
            throw UsageError("--params tuned needs --train-data and --train-run");
        }
        const Dataset train = load_dataset(flags.train_data, Split::train);
        params = grid_search(read_run(fs::path(flags.train_run)), train, GridSpec::standard(), threads).best;
        have = true;
    } else if (!flags.params.empty()) {
        params = read_params_file(flags.params);
        have = true;
    }
    if (flags.alpha) {
        params.alpha = *flags.alpha;
    }
    if (flags.beta) {
        params.beta = *flags.beta;
    }
    if (flags.gamma) {
        params.gamma = *flags.gamma;
    }
    if (!have && !(flags.alpha || flags.beta || flags.gamma)) {
        throw UsageError("no selection parameters: pass --params FILE|tuned or --alpha/--beta/--gamma");
    }
    params.validate();
    return params;
}

void add_selection_flags(CLI::App* cmd, SelectionFlags& flags) {
    cmd->add_option("--params", flags.params, "Selection parameters: JSON file or 'tuned'");
    cmd->add_option("--alpha", flags.alpha, "Absolute score threshold (0 disables)");
    cmd->add_option("--beta", flags.beta, "Maximum answers per entry");
    cmd->add_option("--gamma", flags.gamma, "Fraction of the top score (0 disables)");
    cmd->add_option("--train-data", flags.train_data, "Labeled train split used by --params tuned");
    cmd->add_option("--train-run", flags.train_run, "Run over the train split used by --params tuned");
}

void cmd_gen(const Options& o, CLI::App& cmd, std::ostream& out) {
    SyntheticConfig cfg = synthetic_preset(o.preset);
    if (cmd.count("--entries")) {
        cfg.n_entries = o.entries;
    }
    if (cmd.count("--mean-candidates")) {
        cfg.mean_candidates = o.mean_candidates;
    }
    if (cmd.count("--mean-positives")) {
        cfg.mean_positives = o.mean_positives;
    }
    if (cmd.count("--vocab")) {
        cfg.vocab_size = o.vocab;
    }
    if (cmd.count("--seed")) {
        cfg.seed = o.seed;
    }
    if (cmd.count("--split")) {
        cfg.split = parse_split(o.gen_split);
    }
    const Dataset dataset = generate_synthetic(cfg);
    write_dataset(dataset, o.gen_out);
    const auto report = validate_dataset(dataset);
    out << nlohmann::json{{"entries", report.n_entries},
                          {"mean_candidates", report.mean_candidates},
                          {"mean_positives", report.mean_positives.value_or(0.0)},
                          {"path", o.gen_out}}
               .dump()
        << '\n';
}

void cmd_score(const Options& o, std::ostream& out) {
    const Dataset dataset = load(o.data, o.split);
    Run run;
    if (o.scorer == "bm25") {
        Bm25Params params{o.k1, o.b, {o.stopwords, o.stem}};
        run = bm25_score_dataset(dataset, params, o.model_id.empty() ? "bm25" : o.model_id, o.threads);
    } else if (o.scorer == "remote") {
        if (o.endpoint.empty()) {
            throw UsageError("--scorer remote needs --endpoint");
        }
        RemoteClientConfig cfg;
        cfg.endpoint = o.endpoint;
        cfg.max_in_flight = o.max_in_flight;
        cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
        cfg.retries = o.retries;
        run = remote_score_dataset(dataset, cfg, o.model_id.empty() ? "remote" : o.model_id);
    } else if (o.scorer == "file") {
        if (o.run_file.empty()) {
            throw UsageError("--scorer file needs --run-file");
        }
        run = read_run(fs::path(o.run_file));
        check_coverage(run, dataset);
        if (!o.model_id.empty()) {
            run.model_id = o.model_id;
        }
    } else {
        throw UsageError("unknown scorer '" + o.scorer + "' (expected bm25, remote or file)");
    }
    if (o.normalize) {
        run = normalize_min_max(run);
    }
    write_run(run, fs::path(o.out));
    out << nlohmann::json{{"model_id", run.model_id}, {"records", run.size()}, {"path", o.out}}.dump() << '\n';
}

void cmd_tune(const Options& o, std::ostream& out) {
    const Dataset dataset = load_dataset(o.data, Split::train);
    const Run run = read_run(fs::path(o.run));
    const GridResult result = grid_search(run, dataset, o.grid.spec(), o.threads);
    const std::string best = to_json(result.best).dump();
    if (!o.out_params.empty()) {
        write_file(o.out_params, best + '\n');
    }
    if (!o.out_grid.empty()) {
        std::ostringstream csv;
        write_grid_csv(result.table, csv);
        write_file(o.out_grid, csv.str());
    }
    out << best << '\n';
}

void cmd_predict(const Options& o, std::ostream& out) {
    const Dataset dataset = load(o.data, o.split);
    const SelectionParams params = resolve_selection(o.selection, o.threads);
    Run run = read_run(fs::path(o.run));
    if (o.normalize) {
        run = normalize_min_max(run);
    }
    const auto predictions = select_run(run, dataset, params);
    write_predictions(predictions, fs::path(o.out));
    out << nlohmann::json{{"params", to_json(params)}, {"entries", predictions.size()}, {"path", o.out}}.dump()
        << '\n';
}

void cmd_ensemble(const Options& o, std::ostream& out) {
    std::optional<Dataset> dataset;
    if (!o.data.empty()) {
        dataset = load(o.data, o.split);
    }
    const SelectionParams params = resolve_selection(o.selection, o.threads);
    std::vector<AnswerSet> sets;
    for (const auto& path : o.inputs) {
        if (o.raw) {
            Run run = read_run(fs::path(path));
            if (dataset) {
                check_coverage(run, *dataset);
            }
            sets.push_back(answer_set_from_run(run));
        } else {
            sets.push_back(read_answer_set(path, dataset ? &*dataset : nullptr));
        }
        if (o.normalize) {
            sets.back() = normalize_min_max(sets.back());
        }
    }
    const auto predictions = combine(sets, params);
    write_predictions(predictions, fs::path(o.out));
    out << nlohmann::json{{"params", to_json(params)}, {"members", sets.size()}, {"path", o.out}}.dump() << '\n';
}

void cmd_eval(const Options& o, std::ostream& out) {
    const Dataset dataset = load(o.data, o.split);
    const auto predictions = read_predictions(fs::path(o.pred));
    const std::string json = to_json(evaluate(predictions, dataset)).dump() + '\n';
    if (!o.breakdown.empty()) {
        std::ostringstream csv;
        write_breakdown_csv(per_entry_breakdown(predictions, dataset), csv);
        write_file(o.breakdown, csv.str());
    }
    if (o.out.empty()) {
        out << json;
    } else {
        write_file(o.out, json);
    }
}

struct ReportRow {
    std::string description;
    std::optional<SelectionParams> params;
    EvalResult eval;
};

std::string format_fixed(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4f", value);
    return buffer;
}

std::string format_triple(const std::optional<SelectionParams>& params) {
    if (!params) {
        return "-";
    }
    return format_score(params->alpha) + ", " + std::to_string(params->beta) + ", " + format_score(params->gamma);
}

bool is_run_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path);
    }
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.front() != '#' && line != "\r") {
            return std::count(line.begin(), line.end(), '\t') == 3;
        }
    }
    return false;
}

void cmd_report(const Options& o, std::ostream& out) {
    const Dataset dataset = load(o.data, o.split);
    std::vector<ReportRow> table;
    for (const auto& spec : o.rows) {
        std::vector<std::string> parts;
        std::stringstream in(spec);
        for (std::string part; std::getline(in, part, '|');) {
            parts.push_back(part);
        }
        if (parts.size() < 2 || parts.size() > 3 || parts[0].empty() || parts[1].empty()) {
            throw UsageError("--row expects 'description|file[|alpha,beta,gamma or params.json]': " + spec);
        }
        std::optional<SelectionParams> params;
        if (parts.size() == 3 && !parts[2].empty()) {
            params = parse_inline_params(parts[2]);
            if (!params) {
                params = read_params_file(parts[2]);
            }
            params->validate();
        }
        if (is_run_file(parts[1])) {
            if (!params) {
                throw UsageError("row '" + parts[0] + "' names a run file and needs selection parameters");
            }
            const Run run = read_run(fs::path(parts[1]));
            if (o.ablation) {
                const auto base = select_run(run, dataset, SelectionParams::baseline());
                table.push_back({parts[0] + " (no rule)", SelectionParams::baseline(), evaluate(base, dataset)});
            }
            table.push_back({parts[0], params, evaluate(select_run(run, dataset, *params), dataset)});
        } else {
            const auto predictions = read_predictions(fs::path(parts[1]));
            table.push_back({parts[0], params, evaluate(predictions, dataset)});
        }
    }

    std::ostringstream md;
    md << "| Description | alpha, beta, gamma | Precision | Recall | F1 |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& row : table) {
        md << "| " << row.description << " | " << format_triple(row.params) << " | "
           << format_fixed(row.eval.precision) << " | " << format_fixed(row.eval.recall) << " | "
           << format_fixed(row.eval.f1) << " |\n";
    }
    if (o.out.empty()) {
        out << md.str();
    } else {
        write_file(o.out, md.str());
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"entail"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Case entailment pipeline: scoring, answer selection, ensembling and evaluation", "entail"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML experiment file; command-line flags take precedence");
    app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen", "Write a synthetic dataset in the on-disk corpus layout");
    gen->add_option("--out", o.gen_out, "Target directory (must be empty or absent)")->required();
    gen->add_option("--preset", o.preset, "2021-train, 2021-test, 2022-train or 2022-test")->capture_default_str();
    gen->add_option("--entries", o.entries, "Number of entries");
    gen->add_option("--mean-candidates", o.mean_candidates, "Mean candidate pool size");
    gen->add_option("--mean-positives", o.mean_positives, "Mean gold candidates per entry");
    gen->add_option("--vocab", o.vocab, "Vocabulary size");
    gen->add_option("--seed", o.seed, "RNG seed");
    gen->add_option("--split", o.gen_split, "train or test");

    auto* score = app.add_subcommand("score", "Score every (entry, candidate) pair and write a run file");
    score->add_option("--scorer", o.scorer, "bm25, remote or file")->capture_default_str();
    score->add_option("--data", o.data, "Dataset directory")->required();
    score->add_option("--split", o.split, "train or test")->capture_default_str();
    score->add_option("--out", o.out, "Run file to write")->required();
    score->add_option("--model-id", o.model_id, "Model id recorded in the run file");
    score->add_option("--k1", o.k1, "BM25 k1")->capture_default_str();
    score->add_option("--b", o.b, "BM25 b")->capture_default_str();
    score->add_flag("--stopwords", o.stopwords, "Drop English stopwords before BM25");
    score->add_flag("--stem", o.stem, "Strip plural suffixes before BM25");
    score->add_flag("--normalize", o.normalize, "Min-max normalize scores within each entry");
    score->add_option("--endpoint", o.endpoint, "Remote scorer base URL, e.g. http://127.0.0.1:8080");
    score->add_option("--max-in-flight", o.max_in_flight, "Concurrent remote requests")->capture_default_str();
    score->add_option("--timeout-ms", o.timeout_ms, "Per-request timeout")->capture_default_str();
    score->add_option("--retries", o.retries, "Retries per request")->capture_default_str();
    score->add_option("--run-file", o.run_file, "Existing run file for --scorer file");

    auto* tune = app.add_subcommand("tune", "Grid-search selection parameters on a labeled split");
    tune->add_option("--run", o.run, "Run file over the train split")->required();
    tune->add_option("--data", o.data, "Labeled train split")->required();
    tune->add_option("--alphas", o.grid.alphas, "Alpha values")->delimiter(',');
    tune->add_option("--betas", o.grid.betas, "Beta values")->delimiter(',');
    tune->add_option("--gammas", o.grid.gammas, "Gamma values")->delimiter(',');
    tune->add_option("--out-params", o.out_params, "Write the best triple as JSON");
    tune->add_option("--out-grid", o.out_grid, "Write every triple as CSV");

    auto* predict = app.add_subcommand("predict", "Apply answer selection to a run");
    predict->add_option("--run", o.run, "Run file")->required();
    predict->add_option("--data", o.data, "Dataset directory")->required();
    predict->add_option("--split", o.split, "train or test")->capture_default_str();
    predict->add_option("--out", o.out, "Prediction file to write")->required();
    predict->add_flag("--normalize", o.normalize, "Min-max normalize scores within each entry first");
    add_selection_flags(predict, o.selection);

    auto* ensemble = app.add_subcommand("ensemble", "Combine answer sets of several models");
    ensemble->add_option("--in", o.inputs, "Prediction or run files, one per model")->required();
    ensemble->add_option("--data", o.data, "Dataset directory (fills entries with empty selections)");
    ensemble->add_option("--split", o.split, "train or test")->capture_default_str();
    ensemble->add_option("--out", o.out, "Prediction file to write")->required();
    ensemble->add_flag("--raw", o.raw, "Inputs are full score runs rather than selected answers");
    ensemble->add_flag("--normalize", o.normalize, "Min-max normalize each member within each entry");
    add_selection_flags(ensemble, o.selection);

    auto* eval = app.add_subcommand("eval", "Micro precision, recall and F1 of a prediction file");
    eval->add_option("--pred", o.pred, "Prediction file")->required();
    eval->add_option("--data", o.data, "Labeled dataset directory")->required();
    eval->add_option("--split", o.split, "train or test")->capture_default_str();
    eval->add_option("--out", o.out, "Write the JSON result here instead of stdout");
    eval->add_option("--breakdown", o.breakdown, "Write a per-entry CSV breakdown");

    auto* report = app.add_subcommand("report", "Markdown results table over several runs or predictions");
    report->add_option("--data", o.data, "Labeled dataset directory")->required();
    report->add_option("--split", o.split, "train or test")->capture_default_str();
    report->add_option("--row", o.rows, "description|file[|alpha,beta,gamma or params.json]")->required();
    report->add_flag("--ablation", o.ablation, "Add a '(no rule)' baseline row for every run");
    report->add_option("--out", o.out, "Write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << error_line("usage", e.what()) << '\n';
        return kUsage;
    }

    try {
        if (gen->parsed()) {
            cmd_gen(o, *gen, out);
        } else if (score->parsed()) {
            cmd_score(o, out);
        } else if (tune->parsed()) {
            cmd_tune(o, out);
        } else if (predict->parsed()) {
            cmd_predict(o, out);
        } else if (ensemble->parsed()) {
            cmd_ensemble(o, out);
        } else if (eval->parsed()) {
            cmd_eval(o, out);
        } else if (report->parsed()) {
            cmd_report(o, out);
        }
    } catch (const UsageError& e) {
        err << error_line("usage", e.what()) << '\n';
        return kUsage;
    } catch (const TransportError& e) {
        err << error_line("transport", e.what()) << '\n';
        return kTransportError;
    } catch (const DataError& e) {
        err << error_line("data", e.what()) << '\n';
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        err << error_line("data", e.what()) << '\n';
        return kDataError;
    }
    return kOk;
}

}  // namespace entail::cli
