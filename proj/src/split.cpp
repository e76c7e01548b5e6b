#include "qtp/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qtp/error.hpp"
#include "qtp/random.hpp"

namespace qtp {

SplitMode split_mode_from_name(std::string_view name) {
  if (name == "cv") return SplitMode::CV;
  if (name == "shuffle") return SplitMode::Shuffle;
  throw DataError("unknown split mode: " + std::string(name));
}

std::string_view split_mode_name(SplitMode m) { return m == SplitMode::CV ? "cv" : "shuffle"; }

namespace {

std::array<std::vector<int>, 2> by_class(std::span<const int> labels, int k) {
  if (k < 2) throw DataError("need at least 2 folds");
  if (static_cast<int>(labels.size()) < k) throw DataError("fewer samples than folds");
  std::array<std::vector<int>, 2> cls;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("labels must be 0 or 1");
    cls[labels[i]].push_back(static_cast<int>(i));
  }
  if (cls[0].empty() || cls[1].empty()) throw DataError("stratification needs both classes present");
  return cls;
}

Fold complement(std::vector<int> test, std::size_t n) {
  std::sort(test.begin(), test.end());
  Fold f;
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (t < test.size() && test[t] == static_cast<int>(i)) {
      ++t;
    } else {
      f.train.push_back(static_cast<int>(i));
    }
  }
  f.test = std::move(test);
  return f;
}

}  // namespace

std::vector<Fold> stratified_split(std::span<const int> labels, int k, std::uint64_t seed) {
  auto cls = by_class(labels, k);
  Rng rng(seed);
  std::vector<std::vector<int>> tests(k);
  int pos = 0;
  for (auto& members : cls) {
    rng.shuffle(std::span<int>(members));
    for (int idx : members) {
      tests[pos].push_back(idx);
      pos = (pos + 1) % k;
    }
  }
  std::vector<Fold> folds;
  for (auto& t : tests) folds.push_back(complement(std::move(t), labels.size()));
  return folds;
}

std::vector<Fold> stratified_shuffle_splits(std::span<const int> labels, int k, std::uint64_t seed) {
  auto cls = by_class(labels, k);
  Rng rng(seed);
  std::vector<Fold> folds;
  for (int r = 0; r < k; ++r) {
    std::vector<int> test;
    for (auto& members : cls) {
      rng.shuffle(std::span<int>(members));
      const auto take = static_cast<std::size_t>(std::lround(static_cast<double>(members.size()) / k));
      test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    }
    folds.push_back(complement(std::move(test), labels.size()));
  }
  return folds;
}

std::vector<Fold> make_splits(std::span<const int> labels, int k, std::uint64_t seed, SplitMode mode) {
  return mode == SplitMode::CV ? stratified_split(labels, k, seed) : stratified_shuffle_splits(labels, k, seed);
}

}  // namespace qtp
