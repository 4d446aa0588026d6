#include "hylo/grid.hpp"

#include <algorithm>

#include <cmath>
#include <numbers>
#include <string>

#include "hylo/errors.hpp"

namespace hylo {

Grid::Grid(std::vector<int> n, std::vector<double> box_length) {
  if (n.empty() || n.size() > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
  if (n.size() != box_length.size()) {
    throw InvalidArgument("grid: point counts and box lengths differ in dimension");
  }
  dim_ = static_cast<int>(n.size());
  size_ = 1;
  for (int a = 0; a < dim_; ++a) {
    const int na = n[a];
    if (na < 16 || (na & (na - 1)) != 0) {
      throw InvalidArgument("grid: n[" + std::to_string(a) + "] = " + std::to_string(na) +
                            " is not a power of two >= 16");
    }
    if (!(box_length[a] > 0.0) || !std::isfinite(box_length[a])) {
      throw InvalidArgument("grid: box length must be positive and finite");
    }
    size_ *= static_cast<std::size_t>(na);
    if (size_ > kMaxPoints) throw InvalidArgument("grid: more than 2^22 points");
    n_[a] = na;
    length_[a] = box_length[a];
    spacing_[a] = box_length[a] / na;
  }
  stride_ = {1, 1, 1};
  for (int a = dim_ - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * n_[a + 1];
  cell_volume_ = 1.0;
  for (int a = 0; a < dim_; ++a) cell_volume_ *= spacing_[a];

  auto tables = std::make_shared<Tables>();
  for (int a = 0; a < dim_; ++a) {
    auto& k = tables->k[a];
    k.resize(n_[a]);
    const double base = 2.0 * std::numbers::pi / length_[a];
    for (int i = 0; i < n_[a]; ++i) k[i] = base * (i <= n_[a] / 2 ? i : i - n_[a]);
  }
  tables->ksq.assign(size_, 0.0);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    const auto ijk = unravel(idx);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) s += tables->k[a][ijk[a]] * tables->k[a][ijk[a]];
    tables->ksq[idx] = s;
  }
  tables_ = std::move(tables);
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= length_[a];
  return v;
}

double Grid::max_spacing() const {
  double h = 0.0;
  for (int a = 0; a < dim_; ++a) h = std::max(h, spacing_[a]);
  return h;
}

double Grid::min_length() const {
  double l = length_[0];
  for (int a = 1; a < dim_; ++a) l = std::min(l, length_[a]);
  return l;
}

std::array<int, 3> Grid::unravel(std::size_t index) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = static_cast<int>(index / stride_[a]);
    index %= stride_[a];
  }
  return idx;
}

std::size_t Grid::ravel(const std::array<int, 3>& idx) const {
  std::size_t r = 0;
  for (int a = 0; a < dim_; ++a) r += static_cast<std::size_t>(idx[a]) * stride_[a];
  return r;
}

}  // namespace hylo
