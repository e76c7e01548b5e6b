#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qtp {

enum class SplitMode { CV, Shuffle };

SplitMode split_mode_from_name(std::string_view name);
std::string_view split_mode_name(SplitMode m);

struct Fold {
  std::vector<int> train;  // ascending
  std::vector<int> test;   // ascending

  bool operator==(const Fold&) const = default;
};

/// Stratified k-fold: each class is shuffled and dealt round-robin over the
/// folds, the dealing position carrying over from one class to the next.
/// Throws DataError if k < 2, there are fewer than k samples, a label is not
/// 0/1, or a class is missing.
std::vector<Fold> stratified_split(std::span<const int> labels, int k, std::uint64_t seed);

/// k independent stratified shuffles, each holding out round(n_c / k) of
/// every class.
std::vector<Fold> stratified_shuffle_splits(std::span<const int> labels, int k, std::uint64_t seed);

std::vector<Fold> make_splits(std::span<const int> labels, int k, std::uint64_t seed, SplitMode mode);

}  // namespace qtp
