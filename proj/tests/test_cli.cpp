#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>
#include <string>

#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int rc = -1;
  std::string out;
};

Run qtp_run(const std::string& args) {
  const std::string cmd = std::string("QTP_LOG=error \"") + QTP_BINARY + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

const char* kBell =
    "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\n"
    "measure q -> c;\n";

// A labeled 30-circuit manifest shared by the training cases.
const fs::path& labeled_dir() {
  static const fs::path dir = [] {
    const auto d = qtp::test::scratch_dir("cli_labeled");
    REQUIRE(qtp_run("gen-corpus --count 30 --seed 1 --out " + q(d / "corpus")).rc == 0);
    REQUIRE(qtp_run("label --circuits " + q(d / "corpus") + " --profiles " + q(qtp::test::source_dir() / "profiles") +
                    " --out " + q(d / "labeled"))
                .rc == 0);
    write(d / "config.json",
          R"({"first_layer":"GAT","hidden":8,"heads":2,"residual_gcn_blocks":1,"ffnn_hidden":[16,8]})");
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("help and usage errors") {
  const Run help = qtp_run("--help");
  CHECK(help.rc == 0);
  for (const char* sub : {"featurize", "label", "gen-corpus", "stats", "train", "grid", "evaluate", "predict"}) {
    CHECK(help.out.find(sub) != std::string::npos);
  }
  const Run train_help = qtp_run("train --help");
  CHECK(train_help.rc == 0);
  for (const char* flag : {"--seed", "--jobs", "--epochs", "--folds", "--batch-size", "--out", "--split-mode"}) {
    CHECK(train_help.out.find(flag) != std::string::npos);
  }
  const Run label_help = qtp_run("label --help");
  for (const char* flag : {"--profiles", "--precompiled-dir", "--out"}) {
    CHECK(label_help.out.find(flag) != std::string::npos);
  }
  CHECK(qtp_run("grid --help").out.find("--budget") != std::string::npos);

  CHECK(qtp_run("").rc == 1);
  CHECK(qtp_run("frobnicate").rc == 1);
  CHECK(qtp_run("gen-corpus --out x --bogus-flag").rc == 1);
  CHECK(qtp_run("gen-corpus").rc == 1);
  CHECK(qtp_run("train --manifest /nonexistent.json --config /nonexistent.json --out x").rc == 1);
  CHECK(qtp_run("train --split-mode loo --manifest x --config x --out x").rc == 1);
}

TEST_CASE("data errors exit with code 2") {
  const auto d = qtp::test::scratch_dir("cli_data_errors");
  write(d / "bad.qasm", "OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n");
  CHECK(qtp_run("featurize " + q(d / "bad.qasm") + " --out " + q(d / "bad.dag.json")).rc == 2);
  write(d / "bad_profile.json", "{\"name\": 3}");
  fs::create_directories(d / "corpus");
  write(d / "corpus" / "bell.qasm", kBell);
  CHECK(qtp_run("label --circuits " + q(d / "corpus") + " --profiles " + q(d / "bad_profile.json") + " --out " +
                q(d / "out"))
            .rc == 2);
  write(d / "junk.ckpt", "not a checkpoint");
  CHECK(qtp_run("predict " + q(d / "corpus" / "bell.qasm") + " --checkpoint " + q(d / "junk.ckpt")).rc == 2);
  write(d / "manifest.json", "{");
  CHECK(qtp_run("stats --manifest " + q(d / "manifest.json") + " --out " + q(d / "stats")).rc == 2);
}

TEST_CASE("featurize writes graph JSON") {
  const auto d = qtp::test::scratch_dir("cli_featurize");
  write(d / "bell.qasm", kBell);
  REQUIRE(qtp_run("featurize " + q(d / "bell.qasm") + " --out " + q(d / "bell.dag.json")).rc == 0);
  const json g = json::parse(slurp(d / "bell.dag.json"));
  CHECK(g.at("num_qubits") == 2);
  CHECK(g.at("nodes").size() == 4);
  CHECK(g.at("edges").size() == 3);
}

TEST_CASE("label counts match a recount of the manifest costs") {
  const auto d = labeled_dir();
  const json m = json::parse(slurp(d / "labeled" / "manifest.json"));
  std::map<std::string, std::string> tech;
  for (const auto& dev : m.at("devices")) tech[dev.at("name")] = dev.at("technology");
  CHECK(tech.size() == 2);
  std::array<int, 2> counts{0, 0};
  for (const auto& e : m.at("entries")) {
    std::string best;
    double best_cost = INFINITY;
    for (const auto& [dev, cost] : e.at("costs").items()) {
      if (cost.get<double>() < best_cost) {
        best_cost = cost.get<double>();
        best = dev;
      }
    }
    const int label = tech.at(best) == "trapped-ion" ? 0 : 1;
    CHECK(e.at("label") == label);
    CHECK(fs::exists(d / "labeled" / e.at("dag_path").get<std::string>()));
    ++counts[label];
  }
  CHECK(counts[0] + counts[1] == 30);
  CHECK(counts[0] > 0);
  CHECK(m.at("class_counts") == json::array({counts[0], counts[1]}));

  const auto again = qtp::test::scratch_dir("cli_relabel");
  REQUIRE(qtp_run("label --circuits " + q(d / "corpus") + " --profiles " + q(qtp::test::source_dir() / "profiles") +
                  " --jobs 3 --out " + q(again))
              .rc == 0);
  const json m2 = json::parse(slurp(again / "manifest.json"));
  CHECK(m2.at("entries") == m.at("entries"));

  const auto st = qtp::test::scratch_dir("cli_stats");
  REQUIRE(qtp_run("stats --manifest " + q(d / "labeled" / "manifest.json") + " --out " + q(st)).rc == 0);
  std::size_t csvs = 0;
  for (const auto& de : fs::directory_iterator(st)) csvs += de.path().extension() == ".csv";
  CHECK(csvs > 0);
}

TEST_CASE("train, evaluate and predict") {
  const auto d = labeled_dir();
  const auto out = qtp::test::scratch_dir("cli_train");
  const std::string common = "train --manifest " + q(d / "labeled" / "manifest.json") + " --config " +
                             q(d / "config.json") + " --epochs 2 --folds 2 --batch-size 8 --seed 4 --out ";
  REQUIRE(qtp_run(common + q(out)).rc == 0);
  CHECK(fs::exists(out / "fold0.ckpt"));
  CHECK(fs::exists(out / "fold1.ckpt"));
  CHECK(fs::exists(out / "best.ckpt"));
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report.at("folds").size() == 2);

  const auto out2 = qtp::test::scratch_dir("cli_train2");
  REQUIRE(qtp_run(common + q(out2) + " --jobs 2").rc == 0);
  for (const char* f : {"fold0.ckpt", "fold1.ckpt", "best.ckpt", "report.json"}) {
    CHECK(slurp(out / f) == slurp(out2 / f));
  }

  REQUIRE(qtp_run("evaluate --checkpoint " + q(out / "best.ckpt") + " --manifest " +
                  q(d / "labeled" / "manifest.json") + " --out " + q(out / "eval.json"))
              .rc == 0);
  const json ev = json::parse(slurp(out / "eval.json"));
  CHECK(ev.contains("model"));

  write(out / "bell.qasm", kBell);
  const Run pr = qtp_run("predict " + q(out / "bell.qasm") + " --checkpoint " + q(out / "best.ckpt"));
  REQUIRE(pr.rc == 0);
  std::smatch match;
  const std::regex line(R"(^class=([01]) p0=([0-9.]+) p1=([0-9.]+)\n$)");
  REQUIRE(std::regex_match(pr.out, match, line));
  const double p0 = std::stod(match[2]);
  const double p1 = std::stod(match[3]);
  CHECK(std::abs(p0 + p1 - 1.0) <= 2e-6);
  CHECK(std::stoi(match[1]) == (p1 > p0 ? 1 : 0));
}

TEST_CASE("grid with a budget is reproducible") {
  const auto d = labeled_dir();
  const auto a = qtp::test::scratch_dir("cli_grid_a");
  const auto b = qtp::test::scratch_dir("cli_grid_b");
  const std::string common = "grid --manifest " + q(d / "labeled" / "manifest.json") +
                             " --budget 4 --seed 1 --epochs 1 --folds 2 --batch-size 16 --out ";
  REQUIRE(qtp_run(common + q(a)).rc == 0);
  REQUIRE(qtp_run(common + q(b) + " --jobs 2").rc == 0);
  const std::string table = slurp(a / "grid_table.csv");
  CHECK(table == slurp(b / "grid_table.csv"));
  CHECK(std::count(table.begin(), table.end(), '\n') == 5);
  CHECK(slurp(a / "grid_report.json") == slurp(b / "grid_report.json"));
}
