#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace seqlab {

// Dense row-major array of 64-bit floats. Everything in this project is
// rank 1 or rank 2; a rank-1 tensor of size n is interchangeable with a 1xn
// row wherever a matrix is expected. Dimensions may be zero (e.g. a 0xd
// gather result); the element count is always the product of the shape.
class Tensor {
public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape);

  // 1xN row tensor from a flat list, mostly for tests.
  static Tensor row(std::initializer_list<double> values);
  static Tensor row(const std::vector<double>& values);

  // Rank-2 tensor from nested lists.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor identity(int n);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }

  // Rows/cols of the matrix view: rank-1 tensors read as a single row.
  int rows() const;
  int cols() const;

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols() + c]; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v);

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  bool all_finite() const;

  // "3x4" style rendering for error messages.
  std::string shape_str() const;

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

// A named learnable tensor paired with its gradient accumulator. Gradients
// add up across backward passes until reset_grad() is called.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string param_name, Tensor initial)
      : name(std::move(param_name)), value(std::move(initial)), grad(Tensor::zeros(value.shape())) {}

  void reset_grad() { grad.fill(0.0); }
};

}  // namespace seqlab
