/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "ldsm/error.hpp"

namespace ldsm {

SparseVector::SparseVector(std::vector<FeatureEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].index <= entries_[i - 1].index)
            throw std::invalid_argument("sparse vector indices must be strictly increasing");
    }
}

double SparseVector::squared_norm() const noexcept {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * e.value;
    return s;
}

void SparseVector::scale(double factor) noexcept {
    for (auto& e : entries_) e.value *= factor;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

template <typename T>
T parse_integer(std::string_view tok, std::size_t line, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
    return v;
}

double parse_real(std::string_view tok, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty() || !std::isfinite(v))
        throw ParseError(line, "invalid feature value '" + std::string(tok) + "'");
    return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

Example parse_line(std::string_view text, std::size_t line, const Dataset& ds, std::size_t& dup_labels) {
    Example ex;
    auto tokens = split_ws(text);
    std::size_t first_feature = 0;

    // Labels are the first token unless the line starts with whitespace or
    // the first token is already a feature pair.
    if (!tokens.empty() && !text.empty() && !is_space(text.front()) &&
        tokens[0].find(':') == std::string_view::npos) {
        first_feature = 1;
        std::string_view labels = tokens[0];
        std::size_t start = 0;
        while (start <= labels.size()) {
            std::size_t comma = labels.find(',', start);
            if (comma == std::string_view::npos) comma = labels.size();
            auto lab = parse_integer<LabelId>(labels.substr(start, comma - start), line, "label");
            if (lab >= ds.num_labels)
                throw ParseError(line, "label " + std::to_string(lab) + " out of range (K=" +
                                           std::to_string(ds.num_labels) + ")");
            ex.labels.push_back(lab);
            start = comma + 1;
        }
        std::sort(ex.labels.begin(), ex.labels.end());
        auto last = std::unique(ex.labels.begin(), ex.labels.end());
        dup_labels += static_cast<std::size_t>(ex.labels.end() - last);
        ex.labels.erase(last, ex.labels.end());
    }

    std::vector<FeatureEntry> feats;
    feats.reserve(tokens.size() - first_feature);
    for (std::size_t t = first_feature; t < tokens.size(); ++t) {
        auto tok = tokens[t];
        auto colon = tok.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(line, "expected index:value, got '" + std::string(tok) + "'");
        auto idx = parse_integer<FeatureIndex>(tok.substr(0, colon), line, "feature index");
        if (idx >= ds.num_features)
            throw ParseError(line, "feature index " + std::to_string(idx) + " out of range (D=" +
                                       std::to_string(ds.num_features) + ")");
        feats.push_back({idx, parse_real(tok.substr(colon + 1), line)});
    }
    std::sort(feats.begin(), feats.end(),
              [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < feats.size(); ++i) {
        if (feats[i].index == feats[i - 1].index)
            throw ParseError(line, "duplicate feature index " + std::to_string(feats[i].index));
    }
    ex.features = SparseVector(std::move(feats));
    return ex;
}

} // namespace

Dataset parse_dataset(std::istream& in) {
    Dataset ds;
    std::string text;
    std::size_t line = 0;

    if (!std::getline(in, text)) throw ParseError(1, "missing header");
    ++line;
    strip_cr(text);
    auto header = split_ws(text);
    if (header.size() != 3) throw ParseError(line, "header must be 'N D K'");
    const auto n = parse_integer<std::size_t>(header[0], line, "example count");
    ds.num_features = parse_integer<std::size_t>(header[1], line, "feature dimension");
    ds.num_labels = parse_integer<std::size_t>(header[2], line, "label dimension");

    ds.examples.reserve(n);
    while (ds.examples.size() < n) {
        if (!std::getline(in, text))
            throw ParseError(line + 1, "truncated file: expected " + std::to_string(n) + " examples, got " +
                                           std::to_string(ds.examples.size()));
        ++line;
        strip_cr(text);
        ds.examples.push_back(parse_line(text, line, ds, ds.duplicate_labels_dropped));
    }
    while (std::getline(in, text)) {
        ++line;
        strip_cr(text);
        if (!blank(text)) throw ParseError(line, "unexpected data after " + std::to_string(n) + " examples");
    }
    return ds;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset '" + path + "'");
    return parse_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    out << data.size() << ' ' << data.num_features << ' ' << data.num_labels << '\n';
    char buf[64];
    for (const auto& ex : data.examples) {
        for (std::size_t i = 0; i < ex.labels.size(); ++i) {
            if (i) out << ',';
            out << ex.labels[i];
        }
        for (const auto& f : ex.features) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), f.value);
            (void)ec;
            out << ' ' << f.index << ':' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
}

void save_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_dataset(out, data);
    if (!out) throw IoError("write failed for '" + path + "'");
}

void normalize_l2(Dataset& data) noexcept {
    for (auto& ex : data.examples) {
        const double norm = std::sqrt(ex.features.squared_norm());
        if (norm > 0.0) ex.features.scale(1.0 / norm);
    }
}

double dot(const SparseVector& x, std::span<const double> w) noexcept {
    assert(!w.empty());
    double s = w.back();
    for (const auto& e : x) {
        assert(e.index + 1 < w.size());
        s += e.value * w[e.index];
    }
    return s;
}

} // namespace ldsm
