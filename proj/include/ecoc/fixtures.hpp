#ifndef ECOC_FIXTURES_HPP
#define ECOC_FIXTURES_HPP

// Datasets behind the bundled per-fold summary files in data/fixtures/.

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace ecoc {

struct DatasetInfo {
  std::string_view name;
  std::string_view file;
  std::size_t classes;
  /// r = published_m / published_n
  std::size_t published_m;
  std::size_t published_n;
  std::vector<std::string_view> models;
  /// Codeword lengths to evaluate bounds at; pendigits and vowel carry both 10 and 11.
  std::vector<std::size_t> evaluation_sizes;
};

inline const std::vector<DatasetInfo>& datasets() {
  static const std::vector<DatasetInfo> all = {
      {"pendigits", "pendigits.csv", 10, 2, 11, {"DT", "SVM"}, {10, 11}},
      {"usps", "usps.csv", 10, 2, 10, {"DT", "SVM"}, {10}},
      {"vowel", "vowel.csv", 11, 2, 11, {"DT", "SVM"}, {11, 10}},
      {"letters", "letters.csv", 26, 6, 26, {"DT", "SVM"}, {26}},
      {"cifar10", "cifar10.csv", 10, 2, 10, {"CNN"}, {10}},
      {"svhn", "svhn.csv", 10, 2, 10, {"CNN"}, {10}},
  };
  return all;
}

inline const DatasetInfo* find_dataset(std::string_view name) {
  for (const auto& d : datasets())
    if (d.name == name) return &d;
  return nullptr;
}

}  // namespace ecoc

#endif  // ECOC_FIXTURES_HPP
