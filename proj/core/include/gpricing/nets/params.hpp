#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gpricing::nets {

/// Parameter and gradient storage. Kept aligned to Eigen's maximum packet
/// alignment so vectorised kernels over a slice always take the same code
/// path (and therefore round identically) regardless of where the buffer
/// was allocated.
using ParamVector = std::vector<double, Eigen::aligned_allocator<double>>;

/// A named rows x cols block of a ParamStore, stored column-major.
struct Slice {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }

  bool operator==(const Slice&) const = default;
};

/// Flat parameter vector with named, contiguous slices. The flat layout is
/// what the optimizer and gradient buffers see.
class ParamStore {
 public:
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;

  /// Appends a zero-filled slice; returns its index. Names must be unique.
  int add(std::string name, std::size_t rows, std::size_t cols);

  /// Throws ConfigError if the slice does not exist.
  int index(std::string_view name) const;
  bool contains(std::string_view name) const;

  const Slice& slice(int i) const { return slices_[static_cast<std::size_t>(i)]; }
  const std::vector<Slice>& slices() const { return slices_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  std::span<double> view(int i);
  std::span<const double> view(int i) const;
  MatrixMap matrix(int i);
  ConstMatrixMap matrix(int i) const;

  /// Gradient-buffer view of slice i using this store's layout.
  MatrixMap matrix(int i, std::span<double> buffer) const;

  bool operator==(const ParamStore& other) const = default;

 private:
  ParamVector data_;
  std::vector<Slice> slices_;
  std::map<std::string, int, std::less<>> by_name_;
};

}  // namespace gpricing::nets
