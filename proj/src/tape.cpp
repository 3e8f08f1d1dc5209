#include "seqlab/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "seqlab/error.hpp"

namespace seqlab {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(op) + ": operand shapes differ, " + a.shape_str() +
                         " vs " + b.shape_str());
}

}  // namespace

Tape::Id Tape::push(Tensor value, std::function<void(Tape&)> backprop) {
  nodes_.push_back(Node{std::move(value), Tensor{}, nullptr, nullptr, std::move(backprop)});
  return static_cast<Id>(nodes_.size() - 1);
}

const Tensor& Tape::val(Id id) const {
  const Node& n = nodes_[id];
  return n.view ? n.view->value : n.value;
}

const Tensor& Tape::value(Id id) const { return val(id); }

double Tape::scalar(Id id) const {
  const Tensor& t = val(id);
  if (t.size() != 1)
    throw DimensionError("scalar() on tensor of shape " + t.shape_str());
  return t[0];
}

Tape::Id Tape::constant(Tensor value) { return push(std::move(value), nullptr); }

Tape::Id Tape::parameter(Parameter& p) {
  nodes_.push_back(Node{Tensor{}, Tensor{}, &p, &p, nullptr});
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::frozen(const Parameter& p) {
  nodes_.push_back(Node{Tensor{}, Tensor{}, &p, nullptr, nullptr});
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::matmul(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows())
    throw DimensionError("matmul: incompatible shapes " + ta.shape_str() + " and " +
                         tb.shape_str());
  const int m = ta.rows(), k = ta.cols(), n = tb.cols();
  Tensor out({m, n});
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double aip = ta.at(i, p);
      for (int j = 0; j < n; ++j) out.at(i, j) += aip * tb.at(p, j);
    }
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a, b, m, k, n](Tape& t) {
    const Tensor& g = t.grad(id);  // m x n
    const Tensor& va = t.val(a);
    const Tensor& vb = t.val(b);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    // dL/da = g . b^T, dL/db = a^T . g
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        const double gij = g.at(i, j);
        if (gij == 0.0) continue;
        for (int p = 0; p < k; ++p) {
          ga.at(i, p) += gij * vb.at(p, j);
          gb.at(p, j) += gij * va.at(i, p);
        }
      }
  };
  return id;
}

Tape::Id Tape::add(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  require_same_shape(ta, tb, "add");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += tb[i];
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a, b](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
  };
  return id;
}

Tape::Id Tape::mul(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  require_same_shape(ta, tb, "mul");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= tb[i];
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a, b](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& va = t.val(a);
    const Tensor& vb = t.val(b);
    Tensor& ga = t.grad(a);
    Tensor& gb = t.grad(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * vb[i];
      gb[i] += g[i] * va[i];
    }
  };
  return id;
}

Tape::Id Tape::tanh(Id a) {
  Tensor out = val(a);
  for (double& x : out.data()) x = std::tanh(x);
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& y = t.val(id);
    Tensor& ga = t.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  };
  return id;
}

Tape::Id Tape::sigmoid(Id a) {
  Tensor out = val(a);
  for (double& x : out.data()) x = 1.0 / (1.0 + std::exp(-x));
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& y = t.val(id);
    Tensor& ga = t.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  };
  return id;
}

Tape::Id Tape::log(Id a) {
  const Tensor& ta = val(a);
  Tensor out = ta;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0))
      throw DomainError("log: non-positive input " + std::to_string(out[i]) + " at index " +
                        std::to_string(i));
    out[i] = std::log(out[i]);
  }
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& x = t.val(a);
    Tensor& ga = t.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / x[i];
  };
  return id;
}

Tape::Id Tape::negate(Id a) {
  Tensor out = val(a);
  for (double& x : out.data()) x = -x;
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
  };
  return id;
}

Tape::Id Tape::softmax_rows(Id logits) {
  const Tensor& x = val(logits);
  if (x.rank() != 2)
    throw DimensionError("softmax_rows: expected rank-2 tensor, got " + x.shape_str());
  const int r = x.rows(), c = x.cols();
  Tensor out({r, c});
  for (int i = 0; i < r; ++i) {
    double mx = -HUGE_VAL;
    for (int j = 0; j < c; ++j) mx = std::max(mx, x.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < c; ++j) {
      double e = std::exp(x.at(i, j) - mx);
      out.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < c; ++j) out.at(i, j) /= sum;
  }
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, logits, r, c](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& p = t.val(id);
    Tensor& gx = t.grad(logits);
    // dL/dx_j = p_j * (dL/dp_j - sum_k dL/dp_k p_k), per row.
    for (int i = 0; i < r; ++i) {
      double dot = 0.0;
      for (int j = 0; j < c; ++j) dot += g.at(i, j) * p.at(i, j);
      for (int j = 0; j < c; ++j) gx.at(i, j) += p.at(i, j) * (g.at(i, j) - dot);
    }
  };
  return id;
}

Tape::Id Tape::gather_rows(Id table, std::vector<int> ids) {
  const Tensor& tab = val(table);
  if (tab.rank() != 2)
    throw DimensionError("gather_rows: table must be rank 2, got " + tab.shape_str());
  const int n = tab.rows(), d = tab.cols();
  for (int ix : ids)
    if (ix < 0 || ix >= n)
      throw IndexError("gather_rows: id " + std::to_string(ix) + " out of range [0, " +
                       std::to_string(n) + ")");
  Tensor out({static_cast<int>(ids.size()), d});
  for (std::size_t r = 0; r < ids.size(); ++r)
    for (int j = 0; j < d; ++j) out.at(static_cast<int>(r), j) = tab.at(ids[r], j);
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, table, ids = std::move(ids), d](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& gt = t.grad(table);
    for (std::size_t r = 0; r < ids.size(); ++r)
      for (int j = 0; j < d; ++j) gt.at(ids[r], j) += g.at(static_cast<int>(r), j);
  };
  return id;
}

Tape::Id Tape::transpose(Id a) {
  const Tensor& x = val(a);
  if (x.rank() != 2)
    throw DimensionError("transpose: expected rank-2 tensor, got " + x.shape_str());
  const int r = x.rows(), c = x.cols();
  Tensor out({c, r});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.at(j, i) = x.at(i, j);
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a, r, c](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad(a);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) ga.at(i, j) += g.at(j, i);
  };
  return id;
}

Tape::Id Tape::concat_rows(const std::vector<Id>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no operands");
  const int c = val(parts[0]).cols();
  int total = 0;
  for (Id p : parts) {
    const Tensor& tp = val(p);
    if (tp.rank() != 2 || tp.cols() != c)
      throw DimensionError("concat_rows: column mismatch, expected " + std::to_string(c) +
                           " got " + tp.shape_str());
    total += tp.rows();
  }
  Tensor out({total, c});
  int r0 = 0;
  for (Id p : parts) {
    const Tensor& tp = val(p);
    for (int i = 0; i < tp.rows(); ++i)
      for (int j = 0; j < c; ++j) out.at(r0 + i, j) = tp.at(i, j);
    r0 += tp.rows();
  }
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, parts, c](Tape& t) {
    const Tensor& g = t.grad(id);
    int r0 = 0;
    for (Id p : parts) {
      Tensor& gp = t.grad(p);
      const int pr = t.val(p).rows();
      for (int i = 0; i < pr; ++i)
        for (int j = 0; j < c; ++j) gp.at(i, j) += g.at(r0 + i, j);
      r0 += pr;
    }
  };
  return id;
}

Tape::Id Tape::slice_cols(Id a, int begin, int count) {
  const Tensor& x = val(a);
  if (x.rank() != 2 || begin < 0 || count < 0 || begin + count > x.cols())
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + x.shape_str());
  const int r = x.rows();
  Tensor out({r, count});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < count; ++j) out.at(i, j) = x.at(i, begin + j);
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a, begin, count, r](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad(a);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < count; ++j) ga.at(i, begin + j) += g.at(i, j);
  };
  return id;
}

Tape::Id Tape::add_row_broadcast(Id m, Id row) {
  const Tensor& tm = val(m);
  const Tensor& tr = val(row);
  if (tm.rank() != 2 || tr.rows() != 1 || tr.cols() != tm.cols())
    throw DimensionError("add_row_broadcast: " + tm.shape_str() + " + " + tr.shape_str());
  Tensor out = tm;
  for (int i = 0; i < tm.rows(); ++i)
    for (int j = 0; j < tm.cols(); ++j) out.at(i, j) += tr.at(0, j);
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, m, row](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& gm = t.grad(m);
    Tensor& gr = t.grad(row);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) {
        gm.at(i, j) += g.at(i, j);
        gr.at(0, j) += g.at(i, j);
      }
  };
  return id;
}

Tape::Id Tape::sum_all(Id a) {
  const Tensor& x = val(a);
  Tensor out({1, 1});
  double s = 0.0;
  for (double v : x.data()) s += v;
  out[0] = s;
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a](Tape& t) {
    const double g = t.grad(id)[0];
    Tensor& ga = t.grad(a);
    for (double& v : ga.data()) v += g;
  };
  return id;
}

Tape::Id Tape::scale(Id a, double factor) {
  Tensor out = val(a);
  for (double& x : out.data()) x *= factor;
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a, factor](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
  };
  return id;
}

Tape::Id Tape::pick(Id a, int r, int c) {
  const Tensor& x = val(a);
  if (x.rank() != 2 || r < 0 || r >= x.rows() || c < 0 || c >= x.cols())
    throw IndexError("pick: (" + std::to_string(r) + ", " + std::to_string(c) +
                     ") out of " + x.shape_str());
  Tensor out({1, 1});
  out[0] = x.at(r, c);
  Id id = push(std::move(out), nullptr);
  nodes_[id].backprop = [id, a, r, c](Tape& t) { t.grad(a).at(r, c) += t.grad(id)[0]; };
  return id;
}

void Tape::backward(Id root) {
  if (root < 0 || root >= static_cast<Id>(nodes_.size()))
    throw IndexError("backward: bad root node " + std::to_string(root));
  if (val(root).size() != 1)
    throw DimensionError("backward: root must be a scalar, got " + val(root).shape_str());
  for (Node& n : nodes_) {
    n.grad = Tensor::zeros(n.view ? n.view->value.shape() : n.value.shape());
  }
  nodes_[root].grad[0] = 1.0;
  for (Id i = static_cast<Id>(nodes_.size()) - 1; i >= 0; --i) {
    if (nodes_[i].backprop) nodes_[i].backprop(*this);
  }
  for (Node& n : nodes_) {
    if (!n.sink) continue;
    for (std::size_t i = 0; i < n.grad.size(); ++i) n.sink->grad[i] += n.grad[i];
  }
}

double grad_check(const std::function<double()>& loss_fn,
                  std::span<Parameter* const> params, double eps) {
  if (!(eps > 0.0) || eps > 1e-2)
    throw ConfigError("grad_check: eps must be in (0, 1e-2], got " + std::to_string(eps));

  const auto reset_all = [&] {
    for (Parameter* p : params) p->reset_grad();
  };

  reset_all();
  const double first = loss_fn();
  reset_all();
  const double second = loss_fn();
  if (first != second)
    throw DeterminismError("grad_check: loss function is not deterministic (" +
                           std::to_string(first) + " vs " + std::to_string(second) + ")");

  reset_all();
  loss_fn();
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) analytic.push_back(p->grad);

  double max_rel = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter* p = params[pi];
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double up = loss_fn();
      p->value[i] = saved - eps;
      const double down = loss_fn();
      p->value[i] = saved;
      const double fd = (up - down) / (2.0 * eps);
      const double g = analytic[pi][i];
      const double rel = std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  reset_all();
  return max_rel;
}

}  // namespace seqlab
