#include "arel/tape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arel {

namespace {

using CMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using MMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

CMap cmap(const Array& a) { return CMap(a.data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols())); }
MMap mmap(Array& a) { return MMap(a.data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols())); }

void require_same_shape(const Array& a, const Array& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  }
}

}  // namespace

NodeId Tape::leaf(Array value) {
  nodes_.push_back(Node{std::move(value), Array{}, nullptr, nullptr, {}});
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::param(ParamStore& store, const std::string& name) {
  auto& cache = param_cache_[&store];
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  NodeId id = leaf(store.value(name));
  nodes_[id].sink = &store;
  nodes_[id].sink_name = name;
  cache[name] = id;
  return id;
}

Array& Tape::grad(NodeId id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Array::zeros(n.value.shape());
  return n.grad;
}

NodeId Tape::emit(Array value, std::function<void(Tape&)> backward) {
  nodes_.push_back(Node{std::move(value), Array{}, std::move(backward), nullptr, {}});
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::backward(NodeId root) {
  if (nodes_[root].value.size() != 1) {
    throw std::invalid_argument("Tape::backward: root must be scalar");
  }
  grad(root)[0] += 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty() || !n.back) continue;
    n.back(*this);
  }
  for (Node& n : nodes_) {
    if (n.sink == nullptr || n.grad.empty()) continue;
    Array& g = n.sink->grad(n.sink_name);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
  }
}

void Tape::clear() {
  nodes_.clear();
  param_cache_.clear();
}

void Tape::accumulate(NodeId id, const Array& g) {
  Array& dst = grad(id);
  require_same_shape(dst, g, "Tape::accumulate");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
}

// ---------------------------------------------------------------------------

NodeId matmul(Tape& t, NodeId a, NodeId b) {
  const Array& av = t.value(a);
  const Array& bv = t.value(b);
  if (av.cols() != bv.rows()) {
    throw std::invalid_argument("matmul: inner extents differ " + shape_str(av.shape()) +
                                " vs " + shape_str(bv.shape()));
  }
  Array out = Array::zeros({av.rows(), bv.cols()});
  mmap(out).noalias() = cmap(av) * cmap(bv);
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, b, id](Tape& tt) {
    const Array& g = tt.grad(id);
    mmap(tt.grad(a)).noalias() += cmap(g) * cmap(tt.value(b)).transpose();
    mmap(tt.grad(b)).noalias() += cmap(tt.value(a)).transpose() * cmap(g);
  });
}

NodeId add(Tape& t, NodeId a, NodeId b) {
  const Array& av = t.value(a);
  const Array& bv = t.value(b);
  require_same_shape(av, bv, "add");
  Array out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, b, id](Tape& tt) {
    const Array& g = tt.grad(id);
    tt.accumulate(a, g);
    tt.accumulate(b, g);
  });
}

NodeId sub(Tape& t, NodeId a, NodeId b) {
  const Array& av = t.value(a);
  const Array& bv = t.value(b);
  require_same_shape(av, bv, "sub");
  Array out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, b, id](Tape& tt) {
    const Array& g = tt.grad(id);
    tt.accumulate(a, g);
    Array& gb = tt.grad(b);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
  });
}

NodeId mul(Tape& t, NodeId a, NodeId b) {
  const Array& av = t.value(a);
  const Array& bv = t.value(b);
  require_same_shape(av, bv, "mul");
  Array out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, b, id](Tape& tt) {
    const Array& g = tt.grad(id);
    const Array& av2 = tt.value(a);
    const Array& bv2 = tt.value(b);
    Array& ga = tt.grad(a);
    Array& gb = tt.grad(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * bv2[i];
      gb[i] += g[i] * av2[i];
    }
  });
}

NodeId affine(Tape& t, NodeId a, double alpha, double beta) {
  Array out = t.value(a);
  for (double& x : out.raw()) x = alpha * x + beta;
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, alpha, id](Tape& tt) {
    const Array& g = tt.grad(id);
    Array& ga = tt.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += alpha * g[i];
  });
}

NodeId add_col_broadcast(Tape& t, NodeId m, NodeId v) {
  const Array& mv = t.value(m);
  const Array& vv = t.value(v);
  if (vv.cols() != 1 || vv.rows() != mv.rows()) {
    throw std::invalid_argument("add_col_broadcast: vector shape " + shape_str(vv.shape()) +
                                " does not match matrix " + shape_str(mv.shape()));
  }
  Array out = mv;
  std::size_t r = mv.rows(), c = mv.cols();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] += vv[i];
  NodeId id = t.next_id();
  return t.emit(std::move(out), [m, v, id, r, c](Tape& tt) {
    const Array& g = tt.grad(id);
    tt.accumulate(m, g);
    Array& gv = tt.grad(v);
    for (std::size_t i = 0; i < r; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < c; ++j) s += g[i * c + j];
      gv[i] += s;
    }
  });
}

NodeId sigmoid(Tape& t, NodeId a) {
  Array out = t.value(a);
  for (double& x : out.raw()) x = 1.0 / (1.0 + std::exp(-x));
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, id](Tape& tt) {
    const Array& g = tt.grad(id);
    const Array& y = tt.value(id);
    Array& ga = tt.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

NodeId tanh_op(Tape& t, NodeId a) {
  Array out = t.value(a);
  for (double& x : out.raw()) x = std::tanh(x);
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, id](Tape& tt) {
    const Array& g = tt.grad(id);
    const Array& y = tt.value(id);
    Array& ga = tt.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

NodeId softsign_op(Tape& t, NodeId a) {
  Array out = t.value(a);
  for (double& x : out.raw()) x = x / (1.0 + std::abs(x));
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, id](Tape& tt) {
    const Array& g = tt.grad(id);
    const Array& y = tt.value(id);
    Array& ga = tt.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double d = 1.0 - std::abs(y[i]);  // = 1/(1+|x|)
      ga[i] += g[i] * d * d;
    }
  });
}

NodeId vstack(Tape& t, std::span<const NodeId> parts) {
  if (parts.empty()) throw std::invalid_argument("vstack: no parts");
  std::size_t c = t.value(parts[0]).cols();
  std::size_t r = 0;
  for (NodeId p : parts) {
    if (t.value(p).cols() != c) throw std::invalid_argument("vstack: column mismatch");
    r += t.value(p).rows();
  }
  Array out = Array::zeros({r, c});
  std::size_t row = 0;
  for (NodeId p : parts) {
    const Array& pv = t.value(p);
    std::copy(pv.data(), pv.data() + pv.size(), out.data() + row * c);
    row += pv.rows();
  }
  std::vector<NodeId> ps(parts.begin(), parts.end());
  NodeId id = t.next_id();
  return t.emit(std::move(out), [ps, id, c](Tape& tt) {
    const Array& g = tt.grad(id);
    std::size_t row = 0;
    for (NodeId p : ps) {
      Array& gp = tt.grad(p);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[row * c + i];
      row += tt.value(p).rows();
    }
  });
}

NodeId hstack(Tape& t, std::span<const NodeId> parts) {
  if (parts.empty()) throw std::invalid_argument("hstack: no parts");
  std::size_t r = t.value(parts[0]).rows();
  std::size_t c = 0;
  for (NodeId p : parts) {
    if (t.value(p).rows() != r) throw std::invalid_argument("hstack: row mismatch");
    c += t.value(p).cols();
  }
  Array out = Array::zeros({r, c});
  std::size_t col = 0;
  for (NodeId p : parts) {
    const Array& pv = t.value(p);
    std::size_t pc = pv.cols();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < pc; ++j) out[i * c + col + j] = pv[i * pc + j];
    col += pc;
  }
  std::vector<NodeId> ps(parts.begin(), parts.end());
  NodeId id = t.next_id();
  return t.emit(std::move(out), [ps, id, r, c](Tape& tt) {
    const Array& g = tt.grad(id);
    std::size_t col = 0;
    for (NodeId p : ps) {
      Array& gp = tt.grad(p);
      std::size_t pc = gp.cols();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < pc; ++j) gp[i * pc + j] += g[i * c + col + j];
      col += pc;
    }
  });
}

NodeId slice_rows(Tape& t, NodeId a, std::size_t r0, std::size_t r1) {
  const Array& av = t.value(a);
  if (r0 >= r1 || r1 > av.rows()) throw std::invalid_argument("slice_rows: bad range");
  std::size_t c = av.cols();
  Array out = Array::zeros({r1 - r0, c});
  std::copy(av.data() + r0 * c, av.data() + r1 * c, out.data());
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, id, r0, c](Tape& tt) {
    const Array& g = tt.grad(id);
    Array& ga = tt.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[r0 * c + i] += g[i];
  });
}

NodeId gather_rows_as_cols(Tape& t, NodeId table, std::span<const int> ids) {
  const Array& tv = t.value(table);
  std::size_t v = tv.rows(), e = tv.cols(), n = ids.size();
  if (n == 0) throw std::invalid_argument("gather_rows_as_cols: empty ids");
  for (int x : ids)
    if (x < 0 || static_cast<std::size_t>(x) >= v)
      throw std::out_of_range("gather_rows_as_cols: id " + std::to_string(x));
  Array out = Array::zeros({e, n});
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < e; ++i) out[i * n + j] = tv[static_cast<std::size_t>(ids[j]) * e + i];
  std::vector<int> idv(ids.begin(), ids.end());
  NodeId id = t.next_id();
  return t.emit(std::move(out), [table, id, idv, e, n](Tape& tt) {
    const Array& g = tt.grad(id);
    Array& gt = tt.grad(table);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < e; ++i) gt[static_cast<std::size_t>(idv[j]) * e + i] += g[i * n + j];
  });
}

NodeId im2col(Tape& t, NodeId a, std::size_t k) {
  const Array& av = t.value(a);
  std::size_t e = av.rows(), tlen = av.cols();
  if (k == 0 || k > tlen) throw std::invalid_argument("im2col: window exceeds length");
  std::size_t p = tlen - k + 1;
  Array out = Array::zeros({k * e, p});
  for (std::size_t w = 0; w < k; ++w)
    for (std::size_t i = 0; i < e; ++i)
      for (std::size_t j = 0; j < p; ++j) out[(w * e + i) * p + j] = av[i * tlen + j + w];
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, id, k, e, p, tlen](Tape& tt) {
    const Array& g = tt.grad(id);
    Array& ga = tt.grad(a);
    for (std::size_t w = 0; w < k; ++w)
      for (std::size_t i = 0; i < e; ++i)
        for (std::size_t j = 0; j < p; ++j) ga[i * tlen + j + w] += g[(w * e + i) * p + j];
  });
}

NodeId maxpool_cols(Tape& t, NodeId a, std::size_t window, std::size_t group_cols) {
  const Array& av = t.value(a);
  std::size_t r = av.rows(), c = av.cols();
  if (window == 0) throw std::invalid_argument("maxpool_cols: zero window");
  if (group_cols == 0 || c % group_cols != 0)
    throw std::invalid_argument("maxpool_cols: columns not divisible into groups");
  std::size_t groups = c / group_cols;
  std::size_t q = (group_cols + window - 1) / window;  // pooled cols per group
  Array out = Array::zeros({r, groups * q});
  std::vector<std::size_t> argmax(out.size());
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t qi = 0; qi < q; ++qi) {
      std::size_t j0 = g * group_cols + qi * window;
      std::size_t j1 = std::min(g * group_cols + group_cols, j0 + window);
      for (std::size_t i = 0; i < r; ++i) {
        std::size_t best = j0;
        double bv = av[i * c + j0];
        for (std::size_t j = j0 + 1; j < j1; ++j) {
          if (av[i * c + j] > bv) {
            bv = av[i * c + j];
            best = j;
          }
        }
        std::size_t oj = g * q + qi;
        out[i * (groups * q) + oj] = bv;
        argmax[i * (groups * q) + oj] = best;
      }
    }
  }
  NodeId id = t.next_id();
  std::size_t oc = groups * q;
  return t.emit(std::move(out), [a, id, argmax, r, c, oc](Tape& tt) {
    const Array& g = tt.grad(id);
    Array& ga = tt.grad(a);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < oc; ++j) ga[i * c + argmax[i * oc + j]] += g[i * oc + j];
  });
}

NodeId regroup_flatten(Tape& t, NodeId a, std::size_t group_cols) {
  const Array& av = t.value(a);
  std::size_t r = av.rows(), c = av.cols();
  if (group_cols == 0 || c % group_cols != 0)
    throw std::invalid_argument("regroup_flatten: columns not divisible into groups");
  std::size_t groups = c / group_cols;
  Array out = Array::zeros({r * group_cols, groups});
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < group_cols; ++j)
        out[(i * group_cols + j) * groups + g] = av[i * c + g * group_cols + j];
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, id, r, c, group_cols, groups](Tape& tt) {
    const Array& g_ = tt.grad(id);
    Array& ga = tt.grad(a);
    for (std::size_t g = 0; g < groups; ++g)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < group_cols; ++j)
          ga[i * c + g * group_cols + j] += g_[(i * group_cols + j) * groups + g];
  });
}

NodeId log_softmax_cols(Tape& t, NodeId a) {
  const Array& av = t.value(a);
  require_finite(av, "log_softmax_cols");
  std::size_t r = av.rows(), c = av.cols();
  Array out = av;
  for (std::size_t j = 0; j < c; ++j) {
    double mx = out[j];
    for (std::size_t i = 1; i < r; ++i) mx = std::max(mx, out[i * c + j]);
    double z = 0.0;
    for (std::size_t i = 0; i < r; ++i) z += std::exp(out[i * c + j] - mx);
    double lz = mx + std::log(z);
    for (std::size_t i = 0; i < r; ++i) out[i * c + j] -= lz;
  }
  NodeId id = t.next_id();
  return t.emit(std::move(out), [a, id, r, c](Tape& tt) {
    const Array& g = tt.grad(id);
    const Array& y = tt.value(id);
    Array& ga = tt.grad(a);
    for (std::size_t j = 0; j < c; ++j) {
      double gsum = 0.0;
      for (std::size_t i = 0; i < r; ++i) gsum += g[i * c + j];
      for (std::size_t i = 0; i < r; ++i)
        ga[i * c + j] += g[i * c + j] - std::exp(y[i * c + j]) * gsum;
    }
  });
}

NodeId weighted_pick_nll(Tape& t, NodeId logp, std::span<const int> targets,
                         std::span<const double> weights) {
  const Array& lv = t.value(logp);
  std::size_t r = lv.rows(), c = lv.cols();
  if (targets.size() != c || weights.size() != c)
    throw std::invalid_argument("weighted_pick_nll: need one target and weight per column");
  double total = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    int ti = targets[j];
    if (ti < 0 || static_cast<std::size_t>(ti) >= r)
      throw std::out_of_range("weighted_pick_nll: target out of range");
    total -= weights[j] * lv[static_cast<std::size_t>(ti) * c + j];
  }
  std::vector<int> tv(targets.begin(), targets.end());
  std::vector<double> wv(weights.begin(), weights.end());
  NodeId id = t.next_id();
  return t.emit(Array::from({1}, {total}), [logp, id, tv, wv, c](Tape& tt) {
    double g = tt.grad(id)[0];
    Array& gl = tt.grad(logp);
    for (std::size_t j = 0; j < c; ++j)
      gl[static_cast<std::size_t>(tv[j]) * c + j] -= g * wv[j];
  });
}

NodeId sum_all(Tape& t, NodeId a) {
  const Array& av = t.value(a);
  double s = 0.0;
  for (double x : av.raw()) s += x;
  NodeId id = t.next_id();
  return t.emit(Array::from({1}, {s}), [a, id](Tape& tt) {
    double g = tt.grad(id)[0];
    Array& ga = tt.grad(a);
    for (double& x : ga.raw()) x += g;
  });
}

NodeId mean_all(Tape& t, NodeId a) {
  const Array& av = t.value(a);
  double s = 0.0;
  for (double x : av.raw()) s += x;
  double n = static_cast<double>(av.size());
  NodeId id = t.next_id();
  return t.emit(Array::from({1}, {s / n}), [a, id, n](Tape& tt) {
    double g = tt.grad(id)[0] / n;
    Array& ga = tt.grad(a);
    for (double& x : ga.raw()) x += g;
  });
}

}  // namespace arel
