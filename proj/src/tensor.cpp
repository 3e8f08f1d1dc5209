#include "seqlab/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "seqlab/error.hpp"

namespace seqlab {

namespace {

std::size_t shape_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw DimensionError("negative dimension in tensor shape");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(shape_numel(shape_), 0.0);
}

Tensor Tensor::row(std::initializer_list<double> values) {
  Tensor t({1, static_cast<int>(values.size())});
  std::size_t i = 0;
  for (double v : values) t.data_[i++] = v;
  return t;
}

Tensor Tensor::row(const std::vector<double>& values) {
  Tensor t({1, static_cast<int>(values.size())});
  t.data_ = values;
  return t;
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  int r = static_cast<int>(rows.size());
  int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Tensor t({r, c});
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw DimensionError("ragged initializer for rank-2 tensor");
    for (double v : row) t.data_[i++] = v;
  }
  return t;
}

Tensor Tensor::identity(int n) {
  Tensor t({n, n});
  for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

int Tensor::rows() const {
  if (shape_.size() == 2) return shape_[0];
  if (shape_.size() == 1) return 1;
  throw DimensionError("matrix view requires rank 1 or 2, got rank " +
                       std::to_string(shape_.size()));
}

int Tensor::cols() const {
  if (shape_.size() == 2) return shape_[1];
  if (shape_.size() == 1) return shape_[0];
  throw DimensionError("matrix view requires rank 1 or 2, got rank " +
                       std::to_string(shape_.size()));
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

bool Tensor::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  if (shape_.empty()) return "scalar";
  std::string s;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape_[i]);
  }
  return s;
}

}  // namespace seqlab
