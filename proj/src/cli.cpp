#include "qtp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "qtp/checkpoint.hpp"
#include "qtp/corpus.hpp"
#include "qtp/dag.hpp"
#include "qtp/error.hpp"
#include "qtp/grid.hpp"
#include "qtp/io_util.hpp"
#include "qtp/log.hpp"
#include "qtp/manifest.hpp"
#include "qtp/qasm.hpp"
#include "qtp/stats.hpp"
#include "qtp/train.hpp"

namespace qtp {
namespace fs = std::filesystem;

namespace {

struct TrainFlags {
  std::uint64_t seed = 0;
  int jobs = 1;
  int epochs = 50;
  int folds = 5;
  int batch_size = 32;
  std::string split_mode = "cv";

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--epochs", epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--folds", folds, "Number of splits")->capture_default_str()->check(CLI::Range(2, 1000));
    app->add_option("--batch-size", batch_size, "Graphs per minibatch")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--split-mode", split_mode, "cv (k-fold) or shuffle (repeated stratified shuffles)")
        ->capture_default_str()
        ->check(CLI::IsMember({"cv", "shuffle"}));
  }

  TrainOptions options() const {
    TrainOptions o;
    o.seed = seed;
    o.jobs = jobs;
    o.epochs = epochs;
    o.folds = folds;
    o.batch_size = batch_size;
    o.split_mode = split_mode_from_name(split_mode);
    return o;
  }
};

std::vector<fs::path> expand_profiles(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    if (fs::is_directory(a)) {
      std::vector<fs::path> found;
      for (const auto& de : fs::directory_iterator(a)) {
        if (de.is_regular_file() && de.path().extension() == ".json") found.push_back(de.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(a);
    }
  }
  return out;
}

void featurize_one(const fs::path& in, const fs::path& out) {
  auto parsed = read_qasm_file(in);
  for (const auto& w : parsed.warnings) log_warn(in.filename().string() + ": " + w);
  save_dag(out, build_dag(parsed.circuit));
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Predict the better-suited quantum hardware technology for a circuit", "qtp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qtp 1.0");

  // featurize
  auto* feat = app.add_subcommand("featurize", "Convert QASM file(s) to .dag.json graphs");
  std::string feat_in, feat_out;
  feat->add_option("input", feat_in, "A .qasm file or a directory of them")->required()->check(CLI::ExistingPath);
  feat->add_option("--out", feat_out, "Output file (single input) or directory")->required();

  // label
  auto* label = app.add_subcommand("label", "Compile, score and label a circuit corpus");
  std::string label_circuits, label_out, label_pre, label_compiled;
  std::vector<std::string> label_profiles;
  bool label_no_builtin = false;
  int label_jobs = 1;
  label->add_option("--circuits", label_circuits, "Directory of .qasm files")
      ->required()
      ->check(CLI::ExistingDirectory);
  label->add_option("--profiles", label_profiles, "Device profile files or directories")
      ->required()
      ->expected(1, -1)
      ->check(CLI::ExistingPath);
  label->add_option("--out", label_out, "Output directory for manifest.json and dags/")->required();
  label->add_option("--precompiled-dir", label_pre, "Directory of <circuit>.<device>[.<variant>].qasm files")
      ->check(CLI::ExistingDirectory);
  label->add_flag("--no-builtin", label_no_builtin, "Score only precompiled variants");
  label->add_option("--compiled-out", label_compiled, "Write the chosen compiled form per device here");
  label->add_option("--jobs", label_jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic QASM corpus");
  int gen_count = 200;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CorpusParams gen_params;
  gen->add_option("--count", gen_count, "Number of circuits")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--min-qubits", gen_params.min_qubits)->capture_default_str();
  gen->add_option("--max-qubits", gen_params.max_qubits)->capture_default_str();
  gen->add_option("--min-depth", gen_params.min_depth)->capture_default_str();
  gen->add_option("--max-depth", gen_params.max_depth)->capture_default_str();

  // stats
  auto* st = app.add_subcommand("stats", "Descriptive CSV tables for a labeled manifest");
  std::string st_manifest, st_out;
  st->add_option("--manifest", st_manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  st->add_option("--out", st_out, "Output directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train one model configuration over stratified splits");
  std::string tr_manifest, tr_config, tr_out;
  TrainFlags tr_flags;
  tr->add_option("--manifest", tr_manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  tr->add_option("--config", tr_config, "Model config JSON")->required()->check(CLI::ExistingFile);
  tr->add_option("--out", tr_out, "Output directory for checkpoints and report.json")->required();
  tr_flags.attach(tr);

  // grid
  auto* gr = app.add_subcommand("grid", "Train the hyper-parameter grid and rank by class-0 F1");
  std::string gr_manifest, gr_out;
  std::size_t gr_budget = 0;
  TrainFlags gr_flags;
  gr->add_option("--manifest", gr_manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  gr->add_option("--out", gr_out, "Output directory for grid_table.csv and grid_report.json")->required();
  gr->add_option("--budget", gr_budget, "Sample this many configs (0 = full grid)")->capture_default_str();
  gr_flags.attach(gr);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score a checkpoint on a labeled manifest");
  std::string ev_ckpt, ev_manifest, ev_out;
  ev->add_option("--checkpoint", ev_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  ev->add_option("--manifest", ev_manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", ev_out, "Report JSON path")->required();

  // predict
  auto* pr = app.add_subcommand("predict", "Classify one circuit");
  std::string pr_circuit, pr_ckpt;
  pr->add_option("circuit", pr_circuit, "A .qasm file")->required()->check(CLI::ExistingFile);
  pr->add_option("--checkpoint", pr_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*feat) {
      if (fs::is_directory(feat_in)) {
        std::vector<fs::path> files;
        for (const auto& de : fs::directory_iterator(feat_in)) {
          if (de.is_regular_file() && de.path().extension() == ".qasm") files.push_back(de.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) featurize_one(f, fs::path(feat_out) / (f.stem().string() + ".dag.json"));
      } else {
        featurize_one(feat_in, feat_out);
      }
    } else if (*label) {
      std::vector<DeviceProfile> profiles;
      for (const auto& p : expand_profiles(label_profiles)) profiles.push_back(load_profile_file(p));
      ManifestOptions mo;
      mo.out_dir = label_out;
      if (!label_pre.empty()) mo.precompiled_dir = label_pre;
      if (!label_compiled.empty()) mo.compiled_out = label_compiled;
      mo.use_builtin = !label_no_builtin;
      mo.jobs = label_jobs;
      const auto m = build_manifest(label_circuits, profiles, mo);
      const auto counts = m.class_counts();
      log_info("labeled " + std::to_string(m.entries.size()) + " circuits (class0=" + std::to_string(counts[0]) +
               ", class1=" + std::to_string(counts[1]) + "), skipped " + std::to_string(m.skipped.size()));
    } else if (*gen) {
      write_corpus(gen_out, gen_corpus(gen_count, gen_seed, gen_params));
    } else if (*st) {
      write_stats(st_out, stats(load_manifest(st_manifest)));
    } else if (*tr) {
      const ModelConfig config = config_from_json(nlohmann::json::parse(read_text_file(tr_config)));
      const Dataset data = load_dataset(tr_manifest);
      const TrainOptions opts = tr_flags.options();
      const TrainResult r = train(config, data, opts);
      std::size_t best = 0;
      for (std::size_t f = 0; f < r.folds.size(); ++f) {
        const fs::path ck = fs::path(tr_out) / ("fold" + std::to_string(f) + ".ckpt");
        Checkpoint c{r.folds[f].model, r.folds[f].init_seed,
                     {{"fold", f},
                      {"epochs", opts.epochs},
                      {"folds", opts.folds},
                      {"batch_size", opts.batch_size},
                      {"split_mode", std::string(split_mode_name(opts.split_mode))},
                      {"run_seed", opts.seed},
                      {"train_size", r.folds[f].report.train_size}}};
        save_checkpoint(ck, c);
        if (r.folds[f].report.overall.classes[0].f1 > r.folds[best].report.overall.classes[0].f1) best = f;
      }
      fs::copy_file(fs::path(tr_out) / ("fold" + std::to_string(best) + ".ckpt"), fs::path(tr_out) / "best.ckpt",
                    fs::copy_options::overwrite_existing);
      auto report = to_json(r);
      report["best_fold"] = best;
      write_text_file(fs::path(tr_out) / "report.json", report.dump(2) + "\n");
    } else if (*gr) {
      const Dataset data = load_dataset(gr_manifest);
      const auto configs = sample_grid(gr_budget, gr_flags.seed);
      const auto rows = run_grid(configs, data, gr_flags.options());
      write_text_file(fs::path(gr_out) / "grid_table.csv", grid_table_csv(rows));
      write_text_file(fs::path(gr_out) / "grid_report.json", grid_to_json(rows).dump(2) + "\n");
    } else if (*ev) {
      const Checkpoint c = load_checkpoint(ev_ckpt);
      const Dataset data = load_dataset(ev_manifest);
      std::vector<int> all(data.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
      FoldReport rep = evaluate(c.model, data, all);
      rep.fold_id = c.metadata.value("fold", -1);
      nlohmann::json j = to_json(rep);
      j["model"] = c.model.config.name();
      write_text_file(ev_out, j.dump(2) + "\n");
    } else if (*pr) {
      const Checkpoint c = load_checkpoint(pr_ckpt);
      auto parsed = read_qasm_file(pr_circuit);
      for (const auto& w : parsed.warnings) log_warn(w);
      const ad::Tensor p = predict(c.model, make_batch(build_dag(parsed.circuit)));
      const int cls = p(0, 1) > p(0, 0) ? 1 : 0;
      std::cout << "class=" << cls << " p0=" << fmt6(p(0, 0)) << " p1=" << fmt6(p(0, 1)) << "\n";
    }
  } catch (const UsageError& e) {
    log_error(e.what());
    return 1;
  } catch (const DataError& e) {
    log_error(e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    log_error(std::string("malformed JSON: ") + e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    log_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    log_error(std::string("internal error: ") + e.what());
    return 3;
  }
  return 0;
}

}  // namespace qtp
