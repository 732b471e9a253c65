/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ldsm/model_io.hpp"
#include "ldsm/sparse.hpp"
#include "ldsm/synthetic.hpp"

using namespace ldsm;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run cli(const std::string& args) {
    const std::string cmd = std::string(LDSM_CLI_PATH) + " " + args + " > cli_out.txt 2> cli_err.txt";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), slurp("cli_out.txt"), slurp("cli_err.txt")};
}

void ensure_data() {
    static bool done = false;
    if (done) return;
    save_dataset("cli_train.txt", make_orthogonal_classes(4, 64, 2));
    save_dataset("cli_test.txt", make_orthogonal_classes(4, 16, 2));
    done = true;
}

} // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("train --data cli_train.txt").code == 1); // --model missing
    CHECK(cli("train --data cli_train.txt --model m.bin --arity notanumber").code == 1);
    CHECK(cli("eval --predictions p.txt --data d.txt --k 0").code == 1);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("data errors exit with 2") {
    ensure_data();
    CHECK(cli("train --data no_such_file.txt --model cli_m.bin").code == 2);
    {
        std::ofstream bad("cli_bad.txt");
        bad << "1 2 2\n0 5:1\n";
    }
    const Run r = cli("train --data cli_bad.txt --model cli_m.bin");
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
    {
        std::ofstream junk("cli_junk.bin");
        junk << "junk";
    }
    CHECK(cli("predict --model cli_junk.bin --data cli_test.txt --output cli_p.txt").code == 2);
}

TEST_CASE("invalid hyper-parameters are usage errors") {
    ensure_data();
    CHECK(cli("train --data cli_train.txt --model cli_m.bin --arity 1").code == 1);
    CHECK(cli("train --data cli_train.txt --model cli_m.bin --step-size 0").code == 1);
}

TEST_CASE("train, predict, eval and inspect") {
    ensure_data();
    const Run train = cli("train --data cli_train.txt --model cli_model.bin --max-nodes 31 --trees 2 --seed 3");
    REQUIRE(train.code == 0);
    CHECK(train.out.find("trained 2 tree(s)") != std::string::npos);
    CHECK(slurp("cli_model.bin.trace.csv").rfind("tree,node,parent,depth,examples,objective,balancedness,purity", 0) == 0);

    REQUIRE(cli("predict --model cli_model.bin --data cli_test.txt --output cli_preds.txt --top-r 1").code == 0);
    const Run eval = cli("eval --predictions cli_preds.txt --data cli_test.txt --k 1 --output cli_report.csv");
    REQUIRE(eval.code == 0);
    CHECK(eval.out.find("P,1,1\n") != std::string::npos);
    CHECK(slurp("cli_report.csv").rfind("metric,k,value\n", 0) == 0);

    const Run eval_ps = cli("eval --predictions cli_preds.txt --data cli_test.txt --k 1,3 --propensity-train cli_train.txt");
    CHECK(eval_ps.code == 0);
    CHECK(eval_ps.out.find("PSP,3,") != std::string::npos);

    CHECK(cli("eval --predictions cli_preds.txt --data cli_train.txt").code == 2); // 16 predictions, 64 examples

    const Run inspect = cli("inspect --model cli_model.bin --data cli_test.txt");
    REQUIRE(inspect.code == 0);
    CHECK(inspect.out.find("trees 2") != std::string::npos);
    CHECK(inspect.out.find("avg leaves per example") != std::string::npos);
    CHECK(inspect.out.find("depth,internal_nodes,mean_objective,mean_balancedness,mean_purity") != std::string::npos);
}

TEST_CASE("training is byte-identical across runs and thread counts") {
    ensure_data();
    REQUIRE(cli("train --data cli_train.txt --model cli_a.bin --max-nodes 31 --trees 3 --threads 1").code == 0);
    REQUIRE(cli("train --data cli_train.txt --model cli_b.bin --max-nodes 31 --trees 3 --threads 3").code == 0);
    CHECK(slurp("cli_a.bin") == slurp("cli_b.bin"));
    REQUIRE(cli("train --data cli_train.txt --model cli_c.bin --max-nodes 31 --trees 3 --compact").code == 0);
    CHECK(slurp("cli_c.bin").size() < slurp("cli_a.bin").size());
}

TEST_CASE("config values apply and flags override them") {
    ensure_data();
    {
        std::ofstream cfg("cli_train.cfg");
        cfg << "# test config\narity = 4\nmax_nodes=21\nlambda1 = 0.5\nlambda2=2\nseed = 9\n";
    }
    REQUIRE(cli("train --config cli_train.cfg --data cli_train.txt --model cli_cfg.bin --seed 5").code == 0);
    const Ensemble e = load_ensemble("cli_cfg.bin");
    CHECK(e.params.arity == 4);
    CHECK(e.params.max_nodes == 21);
    CHECK(e.params.lambda1 == 0.5);
    CHECK(e.params.lambda2 == 2.0);
    CHECK(e.base_seed == 5);

    {
        std::ofstream cfg("cli_paths.cfg");
        cfg << "data = cli_train.txt\nmodel = cli_cfg2.bin\nmax-nodes = 3\n";
    }
    CHECK(cli("train --config cli_paths.cfg").code == 0);
    CHECK(load_ensemble("cli_cfg2.bin").trees[0].size() == 3);

    {
        std::ofstream cfg("cli_unknown.cfg");
        cfg << "colour = blue\n";
    }
    CHECK(cli("train --config cli_unknown.cfg --data cli_train.txt --model cli_x.bin").code == 1);
    CHECK(cli("train --config cli_missing.cfg --data cli_train.txt --model cli_x.bin").code == 1);
}

TEST_CASE("single-leaf model") {
    ensure_data();
    REQUIRE(cli("train --data cli_train.txt --model cli_leaf.bin --max-nodes 1").code == 0);
    const Run r = cli("inspect --model cli_leaf.bin --data cli_train.txt");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("max depth 0") != std::string::npos);
    CHECK(r.out.find("nodes 1\n") != std::string::npos);
    CHECK(r.out.find("avg leaves per example 1\n") != std::string::npos);
}

TEST_CASE("validate exits with 3 when a gating check fails") {
    ensure_data();
    // The synthetic separable suite passes on its own.
    const Run ok = cli("validate --no-lemmas --output cli_val.csv");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("separable_training_p1") != std::string::npos);
    CHECK(slurp("cli_val.csv").rfind("check,passed", 0) == 0);
    // The fixed-balance purity bound does not hold; see README.
    const Run bad = cli("validate --no-synthetic --samples 500");
    CHECK(bad.code == 3);
    CHECK(cli("validate --model cli_model.bin").code == 1); // --data missing
    REQUIRE(cli("train --data cli_train.txt --model cli_v.bin --max-nodes 31").code == 0);
    CHECK(cli("validate --no-lemmas --no-synthetic --model cli_v.bin --data cli_train.txt").code == 0);
}
