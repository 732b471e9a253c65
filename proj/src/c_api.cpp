/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/ldsm.h"

#include <algorithm>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldsm/ensemble.hpp"
#include "ldsm/error.hpp"
#include "ldsm/metrics.hpp"
#include "ldsm/model_io.hpp"
#include "ldsm/validator.hpp"

struct ldsm_dataset {
    ldsm::Dataset data;
};

struct ldsm_model {
    ldsm::Ensemble ensemble;
};

struct ldsm_predictions {
    // Flattened so the C view can hand out stable pointers.
    std::vector<std::size_t> offsets{0};
    std::vector<std::uint32_t> labels;
    std::vector<double> scores;

    void push(const ldsm::Ranking& r) {
        for (const auto& s : r) {
            labels.push_back(s.label);
            scores.push_back(s.score);
        }
        offsets.push_back(labels.size());
    }
    std::size_t size() const noexcept { return offsets.size() - 1; }
    ldsm::Ranking at(std::size_t i) const {
        ldsm::Ranking r;
        for (std::size_t j = offsets[i]; j < offsets[i + 1]; ++j) r.push_back({labels[j], scores[j]});
        return r;
    }
    std::vector<ldsm::Ranking> all() const {
        std::vector<ldsm::Ranking> out;
        out.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i));
        return out;
    }
};

struct ldsm_report {
    ldsm::EvalReport report;
};

struct ldsm_validation {
    ldsm::ValidationReport report;
    std::string text;
};

namespace {

thread_local std::string g_error;
thread_local std::vector<std::string> g_warnings;

ldsm_status fail(ldsm_status status, const std::string& message) {
    g_error = message;
    return status;
}

// Maps exceptions escaping the core onto status codes.
template <class Fn>
ldsm_status guarded(Fn&& fn) {
    try {
        g_error.clear();
        return fn();
    } catch (const ldsm::ParseError& e) {
        return fail(LDSM_ERR_PARSE, e.what());
    } catch (const ldsm::FormatError& e) {
        return fail(LDSM_ERR_FORMAT, e.what());
    } catch (const ldsm::IoError& e) {
        return fail(LDSM_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(LDSM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(LDSM_ERR_DATA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(LDSM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(LDSM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LDSM_ERR_INTERNAL, "unknown error");
    }
}

#define LDSM_REQUIRE(ptr)                                                                     \
    do {                                                                                      \
        if (!(ptr)) return fail(LDSM_ERR_INVALID_ARGUMENT, "null argument: " #ptr);           \
    } while (0)

ldsm::TreeParams to_tree_params(const ldsm_train_params& p) {
    ldsm::TreeParams t;
    t.arity = p.arity;
    t.max_nodes = p.max_nodes;
    t.epochs = p.epochs;
    t.lambda1 = p.lambda1;
    t.lambda2 = p.lambda2;
    if (p.optimizer != LDSM_SGD && p.optimizer != LDSM_NAG) throw std::invalid_argument("unknown optimizer");
    t.optimizer.kind = p.optimizer == LDSM_SGD ? ldsm::OptimizerKind::sgd : ldsm::OptimizerKind::nag;
    t.optimizer.step_size = p.step_size;
    t.optimizer.momentum = p.momentum;
    t.min_split_examples = p.min_split_examples;
    t.top_r = p.top_r;
    t.seed = p.seed;
    return t;
}

const ldsm::Tree& tree_at(const ldsm_model* model, std::size_t tree) {
    if (tree >= model->ensemble.size()) throw std::invalid_argument("tree index out of range");
    return model->ensemble.trees[tree];
}

ldsm_status save_model(const ldsm_model* model, const char* path, ldsm::WeightWidth width) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(path);
    return guarded([&] {
        ldsm::save_ensemble(path, model->ensemble, width);
        return LDSM_OK;
    });
}

} // namespace

extern "C" {

const char* ldsm_last_error(void) { return g_error.c_str(); }

const char* ldsm_status_string(ldsm_status status) {
    switch (status) {
    case LDSM_OK: return "ok";
    case LDSM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LDSM_ERR_IO: return "i/o error";
    case LDSM_ERR_PARSE: return "parse error";
    case LDSM_ERR_FORMAT: return "model format error";
    case LDSM_ERR_DATA: return "unusable data";
    case LDSM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* ldsm_version(void) { return "1.0.0"; }

ldsm_status ldsm_dataset_load(const char* path, ldsm_dataset** out) {
    LDSM_REQUIRE(path);
    LDSM_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        *out = new ldsm_dataset{ldsm::load_dataset(path)};
        return LDSM_OK;
    });
}

void ldsm_dataset_free(ldsm_dataset* data) { delete data; }

ldsm_status ldsm_dataset_info_get(const ldsm_dataset* data, ldsm_dataset_info* out) {
    LDSM_REQUIRE(data);
    LDSM_REQUIRE(out);
    const auto& d = data->data;
    out->examples = d.size();
    out->features = d.num_features;
    out->labels = d.num_labels;
    out->unlabelled_examples = 0;
    for (const auto& ex : d.examples) out->unlabelled_examples += ex.labels.empty();
    out->duplicate_labels_dropped = d.duplicate_labels_dropped;
    return LDSM_OK;
}

void ldsm_train_params_default(ldsm_train_params* params) {
    if (!params) return;
    const ldsm::TreeParams t;
    params->arity = t.arity;
    params->max_nodes = t.max_nodes;
    params->epochs = t.epochs;
    params->lambda1 = t.lambda1;
    params->lambda2 = t.lambda2;
    params->optimizer = t.optimizer.kind == ldsm::OptimizerKind::sgd ? LDSM_SGD : LDSM_NAG;
    params->step_size = t.optimizer.step_size;
    params->momentum = t.optimizer.momentum;
    params->min_split_examples = t.min_split_examples;
    params->top_r = t.top_r;
    params->trees = 1;
    params->seed = t.seed;
    params->threads = 1;
}

ldsm_status ldsm_train_params_check(const ldsm_train_params* params, size_t* n_warnings) {
    LDSM_REQUIRE(params);
    return guarded([&] {
        if (params->trees < 1) throw std::invalid_argument("trees must be >= 1");
        g_warnings = ldsm::check_tree_params(to_tree_params(*params));
        if (n_warnings) *n_warnings = g_warnings.size();
        return LDSM_OK;
    });
}

const char* ldsm_warning(size_t index) { return index < g_warnings.size() ? g_warnings[index].c_str() : nullptr; }

ldsm_status ldsm_train(const ldsm_dataset* data, const ldsm_train_params* params, ldsm_model** out) {
    LDSM_REQUIRE(data);
    LDSM_REQUIRE(params);
    LDSM_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto tp = to_tree_params(*params);
        bool any_label = false;
        for (const auto& ex : data->data.examples) any_label = any_label || !ex.labels.empty();
        if (!any_label) return fail(LDSM_ERR_DATA, "dataset has no labelled examples");
        auto ensemble = ldsm::train_ensemble(data->data, tp, params->trees, params->seed, params->threads);
        *out = new ldsm_model{std::move(ensemble)};
        return LDSM_OK;
    });
}

ldsm_status ldsm_model_save(const ldsm_model* model, const char* path) {
    return save_model(model, path, ldsm::WeightWidth::f64);
}

ldsm_status ldsm_model_save_compact(const ldsm_model* model, const char* path) {
    return save_model(model, path, ldsm::WeightWidth::f32);
}

ldsm_status ldsm_model_load(const char* path, ldsm_model** out) {
    LDSM_REQUIRE(path);
    LDSM_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        *out = new ldsm_model{ldsm::load_ensemble(path)};
        return LDSM_OK;
    });
}

void ldsm_model_free(ldsm_model* model) { delete model; }

ldsm_status ldsm_model_info_get(const ldsm_model* model, ldsm_model_info* out) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(out);
    const auto& e = model->ensemble;
    *out = ldsm_model_info{};
    out->trees = e.size();
    out->features = e.trees.front().num_features();
    out->labels = e.trees.front().num_labels();
    out->arity = e.params.arity;
    out->base_seed = e.base_seed;
    out->top_r = e.params.top_r;
    for (const auto& t : e.trees) {
        out->max_depth = std::max(out->max_depth, t.depth());
        out->nodes += t.size();
        out->leaves += t.leaf_count();
    }
    return LDSM_OK;
}

ldsm_status ldsm_model_tree_info(const ldsm_model* model, size_t tree, ldsm_tree_info* out) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(out);
    return guarded([&] {
        const auto& t = tree_at(model, tree);
        out->nodes = t.size();
        out->internal = t.internal_count();
        out->leaves = t.leaf_count();
        out->depth = t.depth();
        return LDSM_OK;
    });
}

ldsm_status ldsm_model_node_info(const ldsm_model* model, size_t tree, uint32_t node, ldsm_node_info* out) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(out);
    return guarded([&] {
        const auto& t = tree_at(model, tree);
        if (node >= t.size()) throw std::invalid_argument("node index out of range");
        const auto& n = t.node(node);
        out->parent = n.parent;
        out->depth = n.depth;
        out->is_leaf = n.is_leaf() ? 1 : 0;
        out->examples = n.num_examples;
        out->histogram_labels = n.histogram.size();
        out->objective = n.summary.objective;
        out->balancedness = n.summary.balancedness;
        out->purity = n.summary.purity;
        return LDSM_OK;
    });
}

ldsm_status ldsm_model_avg_leaves(const ldsm_model* model, const ldsm_dataset* data, double* out) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(data);
    LDSM_REQUIRE(out);
    return guarded([&] {
        if (data->data.empty()) throw std::invalid_argument("dataset is empty");
        double total = 0.0;
        for (const auto& t : model->ensemble.trees)
            for (const auto& ex : data->data.examples) total += static_cast<double>(t.reached_leaves(ex.features).size());
        *out = total / static_cast<double>(data->data.size() * model->ensemble.size());
        return LDSM_OK;
    });
}

ldsm_status ldsm_model_write_node_trace(const ldsm_model* model, const char* path) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(path);
    return guarded([&] {
        std::ofstream out(path);
        if (!out) throw ldsm::IoError(std::string("cannot open '") + path + "' for writing");
        out << "tree,node,parent,depth,examples,objective,balancedness,purity\n";
        out.precision(17);
        for (std::size_t i = 0; i < model->ensemble.size(); ++i) {
            for (const auto& n : model->ensemble.trees[i].nodes()) {
                if (n.is_leaf()) continue;
                out << i << ',' << n.id << ',';
                if (n.parent == ldsm::kNoNode) out << -1;
                else out << n.parent;
                out << ',' << n.depth << ',' << n.num_examples << ',' << n.summary.objective << ','
                    << n.summary.balancedness << ',' << n.summary.purity << '\n';
            }
        }
        if (!out) throw ldsm::IoError(std::string("write failed for '") + path + "'");
        return LDSM_OK;
    });
}

ldsm_status ldsm_predict(const ldsm_model* model, const ldsm_dataset* data, size_t top_r, size_t threads,
                         ldsm_predictions** out) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(data);
    LDSM_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        const std::size_t r = top_r ? top_r : model->ensemble.params.top_r;
        const auto preds = ldsm::predict_all(model->ensemble, data->data, r, threads);
        auto holder = std::make_unique<ldsm_predictions>();
        for (const auto& p : preds) holder->push(p);
        *out = holder.release();
        return LDSM_OK;
    });
}

ldsm_status ldsm_predict_one(const ldsm_model* model, const uint32_t* indices, const double* values, size_t nnz,
                             size_t top_r, uint32_t* labels, double* scores, size_t capacity, size_t* written) {
    LDSM_REQUIRE(model);
    LDSM_REQUIRE(written);
    if (nnz && (!indices || !values)) return fail(LDSM_ERR_INVALID_ARGUMENT, "null feature arrays");
    if (capacity && (!labels || !scores)) return fail(LDSM_ERR_INVALID_ARGUMENT, "null output arrays");
    return guarded([&] {
        std::vector<ldsm::FeatureEntry> entries;
        entries.reserve(nnz);
        const std::size_t d = model->ensemble.trees.front().num_features();
        for (std::size_t i = 0; i < nnz; ++i) {
            if (indices[i] >= d) throw std::invalid_argument("feature index out of range");
            entries.push_back({indices[i], values[i]});
        }
        const ldsm::SparseVector x(std::move(entries));
        const std::size_t r = top_r ? top_r : model->ensemble.params.top_r;
        const auto top = ldsm::predict_ensemble(model->ensemble, x, r);
        const std::size_t n = std::min(capacity, top.size());
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = top[i].label;
            scores[i] = top[i].score;
        }
        *written = n;
        return LDSM_OK;
    });
}

ldsm_status ldsm_predictions_load(const char* path, ldsm_predictions** out) {
    LDSM_REQUIRE(path);
    LDSM_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto holder = std::make_unique<ldsm_predictions>();
        for (const auto& p : ldsm::load_predictions(path)) holder->push(p);
        *out = holder.release();
        return LDSM_OK;
    });
}

ldsm_status ldsm_predictions_save(const ldsm_predictions* preds, const char* path) {
    LDSM_REQUIRE(preds);
    LDSM_REQUIRE(path);
    return guarded([&] {
        const auto all = preds->all();
        ldsm::save_predictions(path, all);
        return LDSM_OK;
    });
}

size_t ldsm_predictions_count(const ldsm_predictions* preds) { return preds ? preds->size() : 0; }

ldsm_status ldsm_predictions_get(const ldsm_predictions* preds, size_t index, const uint32_t** labels,
                                 const double** scores, size_t* length) {
    LDSM_REQUIRE(preds);
    LDSM_REQUIRE(length);
    if (index >= preds->size()) return fail(LDSM_ERR_INVALID_ARGUMENT, "prediction index out of range");
    const std::size_t b = preds->offsets[index];
    if (labels) *labels = preds->labels.data() + b;
    if (scores) *scores = preds->scores.data() + b;
    *length = preds->offsets[index + 1] - b;
    return LDSM_OK;
}

void ldsm_predictions_free(ldsm_predictions* preds) { delete preds; }

void ldsm_eval_options_default(ldsm_eval_options* opts) {
    if (!opts) return;
    const ldsm::PropensityParams p;
    *opts = ldsm_eval_options{};
    opts->propensity_a = p.a;
    opts->propensity_b = p.b;
}

ldsm_status ldsm_evaluate(const ldsm_predictions* preds, const ldsm_dataset* gold, const ldsm_eval_options* opts,
                          ldsm_report** out) {
    LDSM_REQUIRE(preds);
    LDSM_REQUIRE(gold);
    LDSM_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        ldsm_eval_options o;
        ldsm_eval_options_default(&o);
        if (opts) o = *opts;
        std::vector<std::size_t> ks{1, 3, 5};
        if (o.ks) ks.assign(o.ks, o.ks + o.n_ks);
        for (std::size_t k : ks)
            if (k == 0) throw std::invalid_argument("k must be >= 1");

        std::vector<double> inv_prop;
        if (o.propensity_file) {
            inv_prop = ldsm::load_propensities(o.propensity_file);
        } else if (o.propensity_train) {
            const auto& train = o.propensity_train->data;
            inv_prop = ldsm::inverse_propensities(ldsm::label_counts(train), train.size(),
                                                  {o.propensity_a, o.propensity_b});
        }
        if (!inv_prop.empty() && inv_prop.size() < gold->data.num_labels)
            throw std::invalid_argument("propensities cover " + std::to_string(inv_prop.size()) + " labels, need " +
                                        std::to_string(gold->data.num_labels));

        if (preds->size() != gold->data.size())
            return fail(LDSM_ERR_DATA, std::to_string(preds->size()) + " predictions for " +
                                           std::to_string(gold->data.size()) + " examples");
        const auto all = preds->all();
        const auto labels = ldsm::gold_labels(gold->data);
        auto report = std::make_unique<ldsm_report>();
        report->report = ldsm::evaluate(all, labels, ks, inv_prop);
        *out = report.release();
        return LDSM_OK;
    });
}

size_t ldsm_report_size(const ldsm_report* report) { return report ? report->report.values.size() : 0; }

ldsm_status ldsm_report_entry(const ldsm_report* report, size_t index, const char** metric, size_t* k,
                              double* value) {
    LDSM_REQUIRE(report);
    if (index >= report->report.values.size()) return fail(LDSM_ERR_INVALID_ARGUMENT, "report index out of range");
    const auto& v = report->report.values[index];
    if (metric) *metric = v.metric.c_str();
    if (k) *k = v.k;
    if (value) *value = v.value;
    return LDSM_OK;
}

size_t ldsm_report_examples(const ldsm_report* report) { return report ? report->report.examples : 0; }
size_t ldsm_report_excluded(const ldsm_report* report) { return report ? report->report.empty_gold : 0; }

ldsm_status ldsm_report_save_csv(const ldsm_report* report, const char* path) {
    LDSM_REQUIRE(report);
    LDSM_REQUIRE(path);
    return guarded([&] {
        std::ofstream out(path);
        if (!out) throw ldsm::IoError(std::string("cannot open '") + path + "' for writing");
        ldsm::write_report_csv(out, report->report);
        if (!out) throw ldsm::IoError(std::string("write failed for '") + path + "'");
        return LDSM_OK;
    });
}

void ldsm_report_free(ldsm_report* report) { delete report; }

void ldsm_validation_options_default(ldsm_validation_options* opts) {
    if (!opts) return;
    const ldsm::ValidationConfig c;
    *opts = ldsm_validation_options{};
    opts->samples = c.n_samples;
    opts->seed = c.seed;
    opts->lemma_suites = c.lemma_suites ? 1 : 0;
    opts->synthetic = c.synthetic ? 1 : 0;
    opts->top_r = c.top_r;
}

ldsm_status ldsm_validate(const ldsm_validation_options* opts, ldsm_validation** out) {
    LDSM_REQUIRE(opts);
    LDSM_REQUIRE(out);
    *out = nullptr;
    if ((opts->model == nullptr) != (opts->data == nullptr))
        return fail(LDSM_ERR_INVALID_ARGUMENT, "model and data must be given together");
    return guarded([&] {
        ldsm::ValidationConfig cfg;
        cfg.n_samples = opts->samples;
        cfg.seed = opts->seed;
        cfg.lemma_suites = opts->lemma_suites != 0;
        cfg.synthetic = opts->synthetic != 0;
        cfg.top_r = opts->top_r ? opts->top_r : 1;
        const ldsm::Tree* tree = opts->model ? &opts->model->ensemble.trees.front() : nullptr;
        const ldsm::Dataset* data = opts->data ? &opts->data->data : nullptr;
        auto v = std::make_unique<ldsm_validation>();
        v->report = ldsm::run_validation(cfg, tree, data);
        std::ostringstream text;
        ldsm::write_validation_text(text, v->report);
        v->text = text.str();
        *out = v.release();
        return LDSM_OK;
    });
}

int ldsm_validation_passed(const ldsm_validation* v) { return v && v->report.passed() ? 1 : 0; }
size_t ldsm_validation_size(const ldsm_validation* v) { return v ? v->report.checks.size() : 0; }

ldsm_status ldsm_validation_check(const ldsm_validation* v, size_t index, ldsm_check_info* out) {
    LDSM_REQUIRE(v);
    LDSM_REQUIRE(out);
    if (index >= v->report.checks.size()) return fail(LDSM_ERR_INVALID_ARGUMENT, "check index out of range");
    const auto& c = v->report.checks[index];
    out->name = c.name.c_str();
    out->passed = c.passed ? 1 : 0;
    out->gating = c.gating ? 1 : 0;
    out->samples = c.samples;
    out->violations = c.violations;
    out->skipped = c.skipped;
    out->min_value = c.min_value;
    out->max_value = c.max_value;
    out->detail = c.detail.c_str();
    return LDSM_OK;
}

ldsm_status ldsm_validation_save_csv(const ldsm_validation* v, const char* path) {
    LDSM_REQUIRE(v);
    LDSM_REQUIRE(path);
    return guarded([&] {
        std::ofstream out(path);
        if (!out) throw ldsm::IoError(std::string("cannot open '") + path + "' for writing");
        ldsm::write_validation_csv(out, v->report);
        if (!out) throw ldsm::IoError(std::string("write failed for '") + path + "'");
        return LDSM_OK;
    });
}

const char* ldsm_validation_text(const ldsm_validation* v) { return v ? v->text.c_str() : ""; }

void ldsm_validation_free(ldsm_validation* v) { delete v; }

} // extern "C"
