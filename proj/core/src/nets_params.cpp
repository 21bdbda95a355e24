#include "gpricing/nets/params.hpp"

#include "gpricing/errors.hpp"

namespace gpricing::nets {

int ParamStore::add(std::string name, std::size_t rows, std::size_t cols) {
  if (by_name_.contains(name)) {
    throw ConfigError("ParamStore: duplicate slice '" + name + "'");
  }
  const int id = static_cast<int>(slices_.size());
  slices_.push_back({name, data_.size(), rows, cols});
  data_.resize(data_.size() + rows * cols, 0.0);
  by_name_.emplace(std::move(name), id);
  return id;
}

int ParamStore::index(std::string_view name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    throw ConfigError("ParamStore: no slice named '" + std::string(name) + "'");
  }
  return it->second;
}

bool ParamStore::contains(std::string_view name) const { return by_name_.find(name) != by_name_.end(); }

std::span<double> ParamStore::view(int i) {
  const Slice& s = slice(i);
  return std::span<double>(data_).subspan(s.offset, s.size());
}

std::span<const double> ParamStore::view(int i) const {
  const Slice& s = slice(i);
  return std::span<const double>(data_).subspan(s.offset, s.size());
}

ParamStore::MatrixMap ParamStore::matrix(int i) {
  const Slice& s = slice(i);
  return {data_.data() + s.offset, static_cast<Eigen::Index>(s.rows),
          static_cast<Eigen::Index>(s.cols)};
}

ParamStore::ConstMatrixMap ParamStore::matrix(int i) const {
  const Slice& s = slice(i);
  return {data_.data() + s.offset, static_cast<Eigen::Index>(s.rows),
          static_cast<Eigen::Index>(s.cols)};
}

ParamStore::MatrixMap ParamStore::matrix(int i, std::span<double> buffer) const {
  const Slice& s = slice(i);
  if (buffer.size() != data_.size()) {
    throw ValidationError("ParamStore: gradient buffer size mismatch");
  }
  return {buffer.data() + s.offset, static_cast<Eigen::Index>(s.rows),
          static_cast<Eigen::Index>(s.cols)};
}

}  // namespace gpricing::nets
