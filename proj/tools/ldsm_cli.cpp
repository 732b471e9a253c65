/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

// Command-line front end. Talks to the library only through ldsm.h.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldsm/ldsm.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kValidation = 3 };

class Failure {
public:
    Failure(int code, std::string message) : code_(code), message_(std::move(message)) {}
    int code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    int code_;
    std::string message_;
};

int exit_code_for(ldsm_status s) { return s == LDSM_ERR_INVALID_ARGUMENT ? kUsage : kData; }

void check(ldsm_status s, const std::string& what) {
    if (s != LDSM_OK) throw Failure(exit_code_for(s), what + ": " + ldsm_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const noexcept { Free(p); }
};
using Dataset = std::unique_ptr<ldsm_dataset, Deleter<ldsm_dataset, ldsm_dataset_free>>;
using Model = std::unique_ptr<ldsm_model, Deleter<ldsm_model, ldsm_model_free>>;
using Predictions = std::unique_ptr<ldsm_predictions, Deleter<ldsm_predictions, ldsm_predictions_free>>;
using Report = std::unique_ptr<ldsm_report, Deleter<ldsm_report, ldsm_report_free>>;
using Validation = std::unique_ptr<ldsm_validation, Deleter<ldsm_validation, ldsm_validation_free>>;

Dataset load_data(const std::string& path) {
    ldsm_dataset* d = nullptr;
    check(ldsm_dataset_load(path.c_str(), &d), "loading " + path);
    return Dataset(d);
}

Model load_model(const std::string& path) {
    ldsm_model* m = nullptr;
    check(ldsm_model_load(path.c_str(), &m), "loading " + path);
    return Model(m);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// key=value lines; '#' starts a comment. Keys name long options, with '_'
// and '-' interchangeable.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure(kUsage, "cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t number = 0;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Failure(kUsage, path + ":" + std::to_string(number) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        for (auto& c : key)
            if (c == '_') c = '-';
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

// Fills options not given on the command line from the config file, so the
// precedence is flags > config file > defaults.
void apply_config(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    for (const auto& [key, value] : read_config(path)) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub->get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw Failure(kUsage, "unknown key '" + key + "' in config file for '" + sub->get_name() + "'");
        }
        if (key == "config" || opt->count() > 0) continue;
        try {
            if (opt->get_type_size() == 0) {
                if (value == "true" || value == "1") opt->add_result(std::string("true"));
                else if (value != "false" && value != "0")
                    throw Failure(kUsage, "config key '" + key + "' expects true or false");
                else continue;
            } else {
                opt->add_result(value);
            }
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw Failure(kUsage, "config key '" + key + "': " + e.what());
        }
    }
}

struct TrainArgs {
    std::string data, model, trace, config;
    ldsm_train_params params{};
    std::string optimizer = "nag";
    bool compact = false;
};

struct PredictArgs {
    std::string model, data, output, config;
    std::size_t top_r = 0;
    std::size_t threads = 1;
};

struct EvalArgs {
    std::string predictions, data, output, config, propensity_train, propensity_file;
    std::vector<std::size_t> ks{1, 3, 5};
    double a = 0.55, b = 1.5;
};

struct ValidateArgs {
    std::string model, data, output, config;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    bool no_lemmas = false, no_synthetic = false;
    std::size_t top_r = 1;
};

struct InspectArgs {
    std::string model, data, config;
    bool nodes = false;
};

int cmd_train(TrainArgs& a) {
    a.params.optimizer = a.optimizer == "sgd" ? LDSM_SGD : LDSM_NAG;
    std::size_t n_warn = 0;
    check(ldsm_train_params_check(&a.params, &n_warn), "invalid parameters");
    for (std::size_t i = 0; i < n_warn; ++i) std::cerr << "warning: " << ldsm_warning(i) << '\n';

    auto data = load_data(a.data);
    ldsm_dataset_info info{};
    ldsm_dataset_info_get(data.get(), &info);
    if (info.duplicate_labels_dropped)
        std::cerr << "warning: dropped " << info.duplicate_labels_dropped << " repeated labels\n";

    const auto start = std::chrono::steady_clock::now();
    ldsm_model* raw = nullptr;
    check(ldsm_train(data.get(), &a.params, &raw), "training");
    Model model(raw);
    const double elapsed = seconds_since(start);

    check(a.compact ? ldsm_model_save_compact(model.get(), a.model.c_str()) : ldsm_model_save(model.get(), a.model.c_str()),
          "saving model");
    const std::string trace = a.trace.empty() ? a.model + ".trace.csv" : a.trace;
    check(ldsm_model_write_node_trace(model.get(), trace.c_str()), "writing node trace");

    ldsm_model_info mi{};
    ldsm_model_info_get(model.get(), &mi);
    std::cout << "trained " << mi.trees << " tree(s) on " << info.examples << " examples in " << std::fixed
              << std::setprecision(3) << elapsed << " s\n"
              << "nodes " << mi.nodes << ", leaves " << mi.leaves << ", max depth " << mi.max_depth << '\n'
              << "model: " << a.model << "\nnode trace: " << trace << '\n';
    return kOk;
}

int cmd_predict(PredictArgs& a) {
    auto model = load_model(a.model);
    auto data = load_data(a.data);
    ldsm_model_info mi{};
    ldsm_dataset_info di{};
    ldsm_model_info_get(model.get(), &mi);
    ldsm_dataset_info_get(data.get(), &di);
    if (di.features > mi.features)
        std::cerr << "warning: data has " << di.features << " features, model was trained on " << mi.features << '\n';

    const auto start = std::chrono::steady_clock::now();
    ldsm_predictions* raw = nullptr;
    check(ldsm_predict(model.get(), data.get(), a.top_r, a.threads, &raw), "predicting");
    Predictions preds(raw);
    const double elapsed = seconds_since(start);
    check(ldsm_predictions_save(preds.get(), a.output.c_str()), "writing predictions");

    const double per_example = di.examples ? elapsed * 1e3 / static_cast<double>(di.examples) : 0.0;
    std::cout << "predicted " << di.examples << " examples in " << std::fixed << std::setprecision(3) << elapsed
              << " s (" << std::setprecision(4) << per_example << " ms per example)\n"
              << "predictions: " << a.output << '\n';
    return kOk;
}

int cmd_eval(EvalArgs& a) {
    ldsm_predictions* raw = nullptr;
    check(ldsm_predictions_load(a.predictions.c_str(), &raw), "loading " + a.predictions);
    Predictions preds(raw);
    auto gold = load_data(a.data);
    Dataset train;
    if (!a.propensity_train.empty()) train = load_data(a.propensity_train);

    ldsm_eval_options opts;
    ldsm_eval_options_default(&opts);
    opts.ks = a.ks.data();
    opts.n_ks = a.ks.size();
    opts.propensity_train = train.get();
    opts.propensity_file = a.propensity_file.empty() ? nullptr : a.propensity_file.c_str();
    opts.propensity_a = a.a;
    opts.propensity_b = a.b;

    ldsm_report* rep = nullptr;
    check(ldsm_evaluate(preds.get(), gold.get(), &opts, &rep), "evaluating");
    Report report(rep);

    if (!a.output.empty()) check(ldsm_report_save_csv(report.get(), a.output.c_str()), "writing report");
    std::cout << "metric,k,value\n";
    for (std::size_t i = 0; i < ldsm_report_size(report.get()); ++i) {
        const char* metric = nullptr;
        std::size_t k = 0;
        double value = 0.0;
        ldsm_report_entry(report.get(), i, &metric, &k, &value);
        std::cout << metric << ',' << k << ',' << std::setprecision(6) << value << '\n';
    }
    if (const auto excluded = ldsm_report_excluded(report.get()))
        std::cerr << "note: " << excluded << " of " << ldsm_report_examples(report.get())
                  << " examples have no labels and were excluded\n";
    return kOk;
}

int cmd_validate(ValidateArgs& a) {
    if (a.model.empty() != a.data.empty()) throw Failure(kUsage, "--model and --data must be given together");
    Model model;
    Dataset data;
    if (!a.model.empty()) {
        model = load_model(a.model);
        data = load_data(a.data);
    }
    ldsm_validation_options opts;
    ldsm_validation_options_default(&opts);
    opts.samples = a.samples;
    opts.seed = a.seed;
    opts.lemma_suites = a.no_lemmas ? 0 : 1;
    opts.synthetic = a.no_synthetic ? 0 : 1;
    opts.model = model.get();
    opts.data = data.get();
    opts.top_r = a.top_r;

    ldsm_validation* raw = nullptr;
    check(ldsm_validate(&opts, &raw), "validating");
    Validation v(raw);
    if (!a.output.empty()) check(ldsm_validation_save_csv(v.get(), a.output.c_str()), "writing report");
    std::cout << ldsm_validation_text(v.get());
    return ldsm_validation_passed(v.get()) ? kOk : kValidation;
}

int cmd_inspect(InspectArgs& a) {
    auto model = load_model(a.model);
    ldsm_model_info mi{};
    ldsm_model_info_get(model.get(), &mi);
    std::cout << "trees " << mi.trees << "\narity " << mi.arity << "\nfeatures " << mi.features << "\nlabels "
              << mi.labels << "\nbase seed " << mi.base_seed << "\nmax depth " << mi.max_depth << "\nnodes "
              << mi.nodes << "\nleaves " << mi.leaves << '\n';
    if (!a.data.empty()) {
        auto data = load_data(a.data);
        double r_hat = 0.0;
        check(ldsm_model_avg_leaves(model.get(), data.get(), &r_hat), "routing");
        std::cout << "avg leaves per example " << std::setprecision(6) << r_hat << '\n';
    }

    struct Level {
        std::size_t internal = 0;
        double objective = 0, balancedness = 0, purity = 0;
    };
    std::map<std::uint32_t, Level> levels;
    for (std::size_t t = 0; t < mi.trees; ++t) {
        ldsm_tree_info ti{};
        check(ldsm_model_tree_info(model.get(), t, &ti), "reading tree");
        std::cout << "tree " << t << ": nodes " << ti.nodes << ", internal " << ti.internal << ", leaves "
                  << ti.leaves << ", depth " << ti.depth << '\n';
        for (std::uint32_t n = 0; n < ti.nodes; ++n) {
            ldsm_node_info ni{};
            check(ldsm_model_node_info(model.get(), t, n, &ni), "reading node");
            if (a.nodes) {
                std::cout << "  node " << n << " depth " << ni.depth << (ni.is_leaf ? " leaf" : " internal")
                          << " examples " << ni.examples << " labels " << ni.histogram_labels;
                if (!ni.is_leaf)
                    std::cout << " J " << ni.objective << " beta " << ni.balancedness << " alpha " << ni.purity;
                std::cout << '\n';
            }
            if (ni.is_leaf) continue;
            auto& l = levels[ni.depth];
            ++l.internal;
            l.objective += ni.objective;
            l.balancedness += ni.balancedness;
            l.purity += ni.purity;
        }
    }
    std::cout << "depth,internal_nodes,mean_objective,mean_balancedness,mean_purity\n";
    for (const auto& [depth, l] : levels) {
        const double n = static_cast<double>(l.internal);
        std::cout << depth << ',' << l.internal << ',' << l.objective / n << ',' << l.balancedness / n << ','
                  << l.purity / n << '\n';
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logarithmic-depth streaming multi-label decision trees"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ldsm_version()));

    TrainArgs train;
    ldsm_train_params_default(&train.params);
    auto* t = app.add_subcommand("train", "Grow an ensemble and save it");
    t->add_option("--config", train.config, "key=value file; flags override it");
    t->add_option("--data", train.data, "Training set")->required();
    t->add_option("--model", train.model, "Output model file")->required();
    t->add_option("--trace", train.trace, "Per-node objective CSV (default: <model>.trace.csv)");
    t->add_option("--arity", train.params.arity, "Children per node, M")->capture_default_str();
    t->add_option("--max-nodes", train.params.max_nodes, "Node budget per tree, T_max")->capture_default_str();
    t->add_option("--epochs", train.params.epochs, "Passes over each node's examples")->capture_default_str();
    t->add_option("--lambda1", train.params.lambda1, "Class integrity weight")->capture_default_str();
    t->add_option("--lambda2", train.params.lambda2, "Multi-way penalty weight")->capture_default_str();
    t->add_option("--optimizer", train.optimizer, "sgd or nag")
        ->check(CLI::IsMember({"sgd", "nag"}))
        ->capture_default_str();
    t->add_option("--step-size", train.params.step_size)->capture_default_str();
    t->add_option("--momentum", train.params.momentum, "NAG momentum")->capture_default_str();
    t->add_option("--min-split", train.params.min_split_examples, "Smallest child that may be split")
        ->capture_default_str();
    t->add_option("--top-r", train.params.top_r, "Default prediction length")->capture_default_str();
    t->add_option("--trees", train.params.trees, "Ensemble size")->capture_default_str();
    t->add_option("--seed", train.params.seed, "Tree i uses seed + i")->capture_default_str();
    t->add_option("--threads", train.params.threads, "0 = all cores")->capture_default_str();
    t->add_flag("--compact", train.compact, "Store weights as 32-bit floats");

    PredictArgs predict;
    auto* p = app.add_subcommand("predict", "Write top-r labels for every example");
    p->add_option("--config", predict.config);
    p->add_option("--model", predict.model)->required();
    p->add_option("--data", predict.data)->required();
    p->add_option("--output", predict.output, "Prediction file")->required();
    p->add_option("--top-r", predict.top_r, "0 = model default")->capture_default_str();
    p->add_option("--threads", predict.threads)->capture_default_str();

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "Score a prediction file against gold labels");
    e->add_option("--config", eval.config);
    e->add_option("--predictions", eval.predictions)->required();
    e->add_option("--data", eval.data, "Dataset holding the gold labels")->required();
    e->add_option("--output", eval.output, "Report CSV");
    e->add_option("--k", eval.ks, "Cut-offs")->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
    e->add_option("--propensity-train", eval.propensity_train, "Training set for PSP/PSN propensities");
    e->add_option("--propensity-file", eval.propensity_file, "Inverse propensities, one per label");
    e->add_option("--propensity-a", eval.a)->capture_default_str();
    e->add_option("--propensity-b", eval.b)->capture_default_str();

    ValidateArgs validate;
    auto* v = app.add_subcommand("validate", "Run the theory checks");
    v->add_option("--config", validate.config);
    v->add_option("--samples", validate.samples, "Random splits per suite")->capture_default_str();
    v->add_option("--seed", validate.seed)->capture_default_str();
    v->add_flag("--no-lemmas", validate.no_lemmas, "Skip the objective and beta/alpha suites");
    v->add_flag("--no-synthetic", validate.no_synthetic, "Skip the separable synthetic build");
    v->add_option("--model", validate.model, "Also check the first tree of this model");
    v->add_option("--data", validate.data, "Data for --model");
    v->add_option("--top-r", validate.top_r, "r for the entropy bound on --model")->capture_default_str();
    v->add_option("--output", validate.output, "Report CSV");

    InspectArgs inspect;
    auto* i = app.add_subcommand("inspect", "Print tree statistics");
    i->add_option("--config", inspect.config);
    i->add_option("--model", inspect.model)->required();
    i->add_option("--data", inspect.data, "Measure average leaves reached per example");
    i->add_flag("--nodes", inspect.nodes, "List every node");

    // Required options may come from the config file, so the requirement is
    // checked after merging.
    std::vector<std::pair<CLI::App*, std::string*>> configs{
        {t, &train.config}, {p, &predict.config}, {e, &eval.config}, {v, &validate.config}, {i, &inspect.config}};
    std::vector<std::pair<CLI::App*, CLI::Option*>> required;
    for (auto* sub : {t, p, e, v, i})
        for (auto* opt : sub->get_options())
            if (opt->get_required()) {
                opt->required(false);
                required.emplace_back(sub, opt);
            }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kUsage;
    }

    try {
        for (auto& [sub, path] : configs)
            if (sub->parsed()) apply_config(sub, *path);
        for (auto& [sub, opt] : required)
            if (opt->count() == 0 && sub->parsed())
                throw Failure(kUsage, opt->get_name() + " is required");

        if (t->parsed()) return cmd_train(train);
        if (p->parsed()) return cmd_predict(predict);
        if (e->parsed()) return cmd_eval(eval);
        if (v->parsed()) return cmd_validate(validate);
        if (i->parsed()) return cmd_inspect(inspect);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message() << '\n';
        return f.code();
    }
    return kUsage;
}
