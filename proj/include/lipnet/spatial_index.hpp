#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace lipnet {

/// Uniform hash grid over R^n (n <= 6). Points are stored by index; a query
/// returns candidates from the 3^n cells around a location, which covers every
/// point within one cell width in each coordinate.
class CellIndex {
 public:
  CellIndex(int dim, double cell) : dim_(dim), cell_(cell) {}

  void insert(const double* x, int id) { cells_[key_of(x, nullptr)].push_back(id); }

  template <class Fn>
  void for_each_near(const double* x, Fn&& fn) const {
    std::int64_t base[6];
    key_of(x, base);
    std::int64_t offs[6] = {-1, -1, -1, -1, -1, -1};
    while (true) {
      std::uint64_t k = 0;
      for (int i = 0; i < dim_; ++i) k = k * kRange + static_cast<std::uint64_t>(base[i] + offs[i] + kBias);
      auto it = cells_.find(k);
      if (it != cells_.end()) {
        for (int id : it->second) fn(id);
      }
      int i = 0;
      while (i < dim_ && offs[i] == 1) offs[i++] = -1;
      if (i == dim_) break;
      ++offs[i];
    }
  }

  double cell() const { return cell_; }

 private:
  static constexpr std::int64_t kBias = 1 << 9;
  static constexpr std::uint64_t kRange = 1 << 10;

  std::uint64_t key_of(const double* x, std::int64_t* coords) const {
    std::uint64_t k = 0;
    for (int i = 0; i < dim_; ++i) {
      const auto c = static_cast<std::int64_t>(std::floor(x[i] / cell_));
      if (coords) coords[i] = c;
      k = k * kRange + static_cast<std::uint64_t>(c + kBias);
    }
    return k;
  }

  int dim_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace lipnet
