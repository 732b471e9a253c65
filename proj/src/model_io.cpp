/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ldsm/error.hpp"

namespace ldsm {

namespace {

constexpr char kTreeMagic[8] = {'L', 'D', 'S', 'M', 'T', 'R', 'E', 'E'};
constexpr char kEnsembleMagic[8] = {'L', 'D', 'S', 'M', 'E', 'N', 'S', 'M'};

class Writer {
public:
    void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& bytes) : p_(bytes.data()), end_(bytes.data() + bytes.size()) {}

    void need(std::size_t n) const {
        if (static_cast<std::size_t>(end_ - p_) < n) throw FormatError("model file is truncated");
    }
    std::size_t remaining() const noexcept { return static_cast<std::size_t>(end_ - p_); }
    void raw(void* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, p_, n);
        p_ += n;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(*p_++);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    float f32() { return std::bit_cast<float>(u32()); }

    /// Element count that must fit in the remaining bytes.
    std::size_t count(std::size_t element_size) {
        const std::uint64_t n = u64();
        if (element_size && n > remaining() / element_size) throw FormatError("model file is truncated");
        return static_cast<std::size_t>(n);
    }

    void expect_magic(const char (&magic)[8]) {
        char got[8];
        raw(got, 8);
        if (std::memcmp(got, magic, 8) != 0) throw FormatError("not an ldsm model (bad magic)");
    }

private:
    const char* p_;
    const char* end_;
};

void write_params(Writer& w, const TreeParams& p) {
    w.i32(p.arity);
    w.u64(p.max_nodes);
    w.i32(p.epochs);
    w.f64(p.lambda1);
    w.f64(p.lambda2);
    w.u8(static_cast<std::uint8_t>(p.optimizer.kind));
    w.f64(p.optimizer.step_size);
    w.f64(p.optimizer.momentum);
    w.u64(p.seed);
    w.u64(p.min_split_examples);
    w.u64(p.top_r);
}

TreeParams read_params(Reader& r) {
    TreeParams p;
    p.arity = r.i32();
    p.max_nodes = r.u64();
    p.epochs = r.i32();
    p.lambda1 = r.f64();
    p.lambda2 = r.f64();
    const auto kind = r.u8();
    if (kind > 1) throw FormatError("unknown optimizer kind " + std::to_string(kind));
    p.optimizer.kind = static_cast<OptimizerKind>(kind);
    p.optimizer.step_size = r.f64();
    p.optimizer.momentum = r.f64();
    p.seed = r.u64();
    p.min_split_examples = r.u64();
    p.top_r = r.u64();
    try {
        check_tree_params(p);
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("stored parameters are invalid: ") + e.what());
    }
    return p;
}

void read_version(Reader& r) {
    const auto version = r.u32();
    if (version != kModelVersion)
        throw FormatError("unsupported model version " + std::to_string(version) + " (expected " +
                          std::to_string(kModelVersion) + ")");
}

} // namespace

std::string serialize_tree(const Tree& tree, WeightWidth width) {
    Writer w;
    w.raw(kTreeMagic, 8);
    w.u32(kModelVersion);
    w.u8(static_cast<std::uint8_t>(width));
    write_params(w, tree.params());
    w.u64(tree.num_features());
    w.u64(tree.num_labels());
    w.u64(tree.size());
    for (const auto& n : tree.nodes()) {
        w.u32(n.parent);
        w.u32(n.depth);
        w.u32(n.num_examples);
        w.u8(n.is_leaf() ? 1 : 0);
        if (!n.is_leaf())
            for (NodeId c : n.children) w.u32(c);
        w.u64(n.histogram.size());
        for (const auto& b : n.histogram) {
            w.u32(b.label);
            w.u32(b.count);
        }
        w.f64(n.summary.objective);
        w.f64(n.summary.balancedness);
        w.f64(n.summary.purity);
        w.f64(n.summary.label_mass);
        if (n.is_leaf()) continue;
        w.u64(n.features.size());
        for (FeatureIndex f : n.features) w.u32(f);
        for (const auto& reg : n.regressors) {
            for (std::size_t i = 0; i <= n.features.size(); ++i) {
                if (width == WeightWidth::f64) w.f64(reg.weight(i));
                else w.f32(static_cast<float>(reg.weight(i)));
            }
        }
    }
    return w.take();
}

namespace {

Tree read_tree(Reader& r) {
    r.expect_magic(kTreeMagic);
    read_version(r);
    const auto width_byte = r.u8();
    if (width_byte != 8 && width_byte != 4) throw FormatError("unsupported weight width " + std::to_string(width_byte));
    const TreeParams params = read_params(r);
    const auto d = r.u64();
    const auto k = r.u64();
    const std::size_t n_nodes = r.count(21);
    const auto m = static_cast<std::size_t>(params.arity);

    std::vector<TreeNode> nodes(n_nodes);
    for (std::size_t id = 0; id < n_nodes; ++id) {
        TreeNode& n = nodes[id];
        n.id = static_cast<NodeId>(id);
        n.parent = r.u32();
        n.depth = r.u32();
        n.num_examples = r.u32();
        const auto leaf = r.u8();
        if (leaf > 1) throw FormatError("bad leaf flag at node " + std::to_string(id));
        if (!leaf) {
            n.children.resize(m);
            for (auto& c : n.children) c = r.u32();
        }
        n.histogram.resize(r.count(8));
        for (auto& b : n.histogram) {
            b.label = r.u32();
            b.count = r.u32();
            if (b.label >= k) throw FormatError("histogram label out of range at node " + std::to_string(id));
        }
        n.summary.objective = r.f64();
        n.summary.balancedness = r.f64();
        n.summary.purity = r.f64();
        n.summary.label_mass = r.f64();
        if (leaf) continue;

        n.features.resize(r.count(4));
        for (auto& f : n.features) {
            f = r.u32();
            if (f >= d) throw FormatError("feature id out of range at node " + std::to_string(id));
        }
        const std::size_t dim = n.features.size() + 1;
        if (m * dim > r.remaining() / width_byte) throw FormatError("model file is truncated");
        n.regressors.reserve(m);
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> weights(dim);
            for (auto& v : weights) v = width_byte == 8 ? r.f64() : static_cast<double>(r.f32());
            n.regressors.emplace_back(std::move(weights));
        }
    }
    return Tree::from_nodes(params, d, k, std::move(nodes));
}

} // namespace

Tree deserialize_tree(const std::string& bytes) {
    Reader r(bytes);
    Tree t = read_tree(r);
    if (r.remaining() != 0) throw FormatError("trailing bytes after tree");
    return t;
}

std::string serialize_ensemble(const Ensemble& ensemble, WeightWidth width) {
    Writer w;
    w.raw(kEnsembleMagic, 8);
    w.u32(kModelVersion);
    w.u64(ensemble.size());
    w.u64(ensemble.base_seed);
    w.u64(params_hash(ensemble.params));
    for (const auto& t : ensemble.trees) {
        const std::string blob = serialize_tree(t, width);
        w.u64(blob.size());
        w.raw(blob.data(), blob.size());
    }
    return w.take();
}

Ensemble deserialize_ensemble(const std::string& bytes) {
    Reader r(bytes);
    r.expect_magic(kEnsembleMagic);
    read_version(r);
    const std::size_t count = r.count(8);
    Ensemble e;
    e.base_seed = r.u64();
    const std::uint64_t hash = r.u64();
    if (count == 0) throw FormatError("ensemble has no trees");

    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t len = r.count(1);
        std::string blob(len, '\0');
        r.raw(blob.data(), len);
        Tree t = deserialize_tree(blob);
        if (params_hash(t.params()) != hash)
            throw FormatError("tree " + std::to_string(i) + " was trained with different parameters");
        if (t.params().seed != e.base_seed + i)
            throw FormatError("tree " + std::to_string(i) + " has seed " + std::to_string(t.params().seed) +
                              ", expected " + std::to_string(e.base_seed + i));
        if (!e.trees.empty() && (t.num_features() != e.trees.front().num_features() ||
                                 t.num_labels() != e.trees.front().num_labels()))
            throw FormatError("trees disagree on feature or label dimension");
        e.trees.push_back(std::move(t));
    }
    if (r.remaining() != 0) throw FormatError("trailing bytes after ensemble");
    e.params = e.trees.front().params();
    e.params.seed = e.base_seed;
    return e;
}

void save_ensemble(const std::string& path, const Ensemble& ensemble, WeightWidth width) {
    const std::string bytes = serialize_ensemble(ensemble, width);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

Ensemble load_ensemble(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return deserialize_ensemble(bytes);
}

} // namespace ldsm
