#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "seqlab/tensor.hpp"

namespace seqlab {

// Reverse-mode autodiff tape. Each differentiable operation appends one node
// holding its result; backward() replays the recorded operations exactly once
// in reverse execution order, accumulating gradients node-to-node and finally
// into bound Parameters.
//
// Tapes are single-threaded and short-lived: one per forward/backward pass.
// Parameters bound via parameter() are referenced, not copied, and must
// outlive the tape. Forward values stay finite for inputs within the usual
// magnitude bounds of double softmax/exp arithmetic (|logit gaps| < ~700).
class Tape {
public:
  using Id = std::int32_t;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves.
  Id constant(Tensor value);
  Id parameter(Parameter& p);
  // Read-only view of a parameter: backward drops gradients at this leaf.
  // Used by inference paths over a const model.
  Id frozen(const Parameter& p);

  // matmul(a[m x k], b[k x n]) -> [m x n].
  Id matmul(Id a, Id b);

  // Elementwise ops; binary ops require equal shapes.
  Id add(Id a, Id b);
  Id mul(Id a, Id b);
  Id tanh(Id a);
  Id sigmoid(Id a);
  Id log(Id a);  // requires strictly positive inputs
  Id negate(Id a);

  // Row-stable softmax over the last dimension of a rank-2 tensor.
  Id softmax_rows(Id logits);

  // Stacks table rows selected by token id; backward scatters into the table.
  Id gather_rows(Id table, std::vector<int> ids);

  Id transpose(Id a);

  // Concatenates rank-2 tensors with equal column counts along rows.
  Id concat_rows(const std::vector<Id>& parts);

  // Columns [begin, begin+count) of a rank-2 tensor.
  Id slice_cols(Id a, int begin, int count);

  // m[r x c] + row[1 x c], the one supported broadcast.
  Id add_row_broadcast(Id m, Id row);

  // Sum of all entries -> 1x1.
  Id sum_all(Id a);

  Id scale(Id a, double factor);

  // Single entry (r, c) -> 1x1.
  Id pick(Id a, int r, int c);

  const Tensor& value(Id id) const;

  // Value of a 1x1 node.
  double scalar(Id id) const;

  std::size_t node_count() const { return nodes_.size(); }

  // Seeds d(root)/d(root) = 1 and sweeps the whole tape in reverse order.
  // Parameter gradients are accumulated (+=); calling backward twice without
  // resetting doubles them.
  void backward(Id root);

private:
  struct Node {
    Tensor value;                      // owned result; empty for parameter leaves
    Tensor grad;                       // allocated lazily per backward pass
    const Parameter* view = nullptr;   // value source for parameter leaves
    Parameter* sink = nullptr;         // gradient destination, if trainable
    std::function<void(Tape&)> backprop;  // null for leaves
  };

  Id push(Tensor value, std::function<void(Tape&)> backprop);
  const Tensor& val(Id id) const;
  Tensor& grad(Id id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

// Compares the reverse-mode gradient of a scalar loss against central finite
// differences, coordinate by coordinate, and returns the largest relative
// error max(|g - g_fd| / max(|g|, |g_fd|, 1e-8)).
//
// loss_fn must evaluate the loss and run its backward pass, accumulating into
// the given parameters' grads. It is called twice up front to detect
// non-deterministic losses. eps must lie in (0, 1e-2].
double grad_check(const std::function<double()>& loss_fn,
                  std::span<Parameter* const> params, double eps);

}  // namespace seqlab
