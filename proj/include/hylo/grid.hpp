#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hylo {

using cplx = std::complex<double>;
using ComplexField = std::vector<cplx>;
using RealField = std::vector<double>;

// Uniform periodic box [-L_i/2, L_i/2) in dimension 1..3, row-major storage
// with the last axis fastest. Point counts are powers of two >= 16.
class Grid {
 public:
  static constexpr std::size_t kMaxPoints = std::size_t{1} << 22;

  Grid(std::vector<int> n, std::vector<double> box_length);
  static Grid line(int n, double length) { return Grid({n}, {length}); }

  int dim() const { return dim_; }
  int n(int axis) const { return n_[axis]; }
  double length(int axis) const { return length_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  std::vector<int> shape() const { return {n_.begin(), n_.begin() + dim_}; }
  std::vector<double> lengths() const { return {length_.begin(), length_.begin() + dim_}; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const;
  double max_spacing() const;
  double min_length() const;

  double coordinate(int axis, int i) const { return -0.5 * length_[axis] + i * spacing_[axis]; }
  // Angular wavenumber of FFT bin i along `axis` (negative frequencies wrap).
  double wavenumber(int axis, int i) const { return tables_->k[axis][i]; }
  std::span<const double> wavenumbers(int axis) const { return tables_->k[axis]; }
  bool is_nyquist(int axis, int i) const { return 2 * i == n_[axis]; }

  // |k|^2 at every grid point, in storage order.
  std::span<const double> k_squared() const { return tables_->ksq; }

  std::size_t stride(int axis) const { return stride_[axis]; }
  std::array<int, 3> unravel(std::size_t index) const;
  std::size_t ravel(const std::array<int, 3>& idx) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  struct Tables {
    std::array<std::vector<double>, 3> k;
    std::vector<double> ksq;
  };

  int dim_ = 1;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> length_{1.0, 1.0, 1.0};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t size_ = 1;
  double cell_volume_ = 1.0;
  std::shared_ptr<const Tables> tables_;
};

}  // namespace hylo
