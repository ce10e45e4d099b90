#include "arel/kernels.hpp"

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

}  // namespace

Array matmul_arr(const Array& a, const Array& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul_arr: inner extents differ " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  }
  Array out = Array::zeros({a.rows(), b.cols()});
  mmap(out).noalias() = cmap(a) * cmap(b);
  return out;
}

Array linear_arr(const Array& w, const Array& x, const Array& b) {
  Array out = matmul_arr(w, x);
  std::size_t r = out.rows(), c = out.cols();
  if (b.size() != r) throw std::invalid_argument("linear_arr: bias size mismatch");
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] += b[i];
  return out;
}

Array vstack_arr(const std::vector<const Array*>& parts) {
  if (parts.empty()) throw std::invalid_argument("vstack_arr: no parts");
  std::size_t c = parts[0]->cols();
  std::size_t r = 0;
  for (const Array* p : parts) {
    if (p->cols() != c) throw std::invalid_argument("vstack_arr: column mismatch");
    r += p->rows();
  }
  Array out = Array::zeros({r, c});
  std::size_t row = 0;
  for (const Array* p : parts) {
    std::copy(p->data(), p->data() + p->size(), out.data() + row * c);
    row += p->rows();
  }
  return out;
}

Array sigmoid_arr(const Array& a) {
  Array out = a;
  for (double& x : out.raw()) x = 1.0 / (1.0 + std::exp(-x));
  return out;
}

Array tanh_arr(const Array& a) {
  require_finite(a, "tanh_act");
  Array out = a;
  for (double& x : out.raw()) x = std::tanh(x);
  return out;
}

Array softsign_arr(const Array& a) {
  require_finite(a, "softsign");
  Array out = a;
  for (double& x : out.raw()) x = x / (1.0 + std::abs(x));
  return out;
}

Array softmax(const Array& logits) {
  require_finite(logits, "softmax");
  Array out = logits;
  double mx = out[0];
  for (double x : out.raw()) mx = std::max(mx, x);
  double z = 0.0;
  for (double& x : out.raw()) {
    x = std::exp(x - mx);
    z += x;
  }
  for (double& x : out.raw()) x /= z;
  return out;
}

Array softmax_cols(const Array& logits) {
  require_finite(logits, "softmax_cols");
  std::size_t r = logits.rows(), c = logits.cols();
  Array out = logits;
  for (std::size_t j = 0; j < c; ++j) {
    double mx = out[j];
    for (std::size_t i = 1; i < r; ++i) mx = std::max(mx, out[i * c + j]);
    double z = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      double e = std::exp(out[i * c + j] - mx);
      out[i * c + j] = e;
      z += e;
    }
    for (std::size_t i = 0; i < r; ++i) out[i * c + j] /= z;
  }
  return out;
}

Array log_softmax_cols_arr(const Array& logits) {
  require_finite(logits, "log_softmax_cols_arr");
  std::size_t r = logits.rows(), c = logits.cols();
  Array out = logits;
  for (std::size_t j = 0; j < c; ++j) {
    double mx = out[j];
    for (std::size_t i = 1; i < r; ++i) mx = std::max(mx, out[i * c + j]);
    double z = 0.0;
    for (std::size_t i = 0; i < r; ++i) z += std::exp(out[i * c + j] - mx);
    double lz = mx + std::log(z);
    for (std::size_t i = 0; i < r; ++i) out[i * c + j] -= lz;
  }
  return out;
}

GruSlice GruSlice::from(const ParamStore& store, const std::string& prefix) {
  return GruSlice{&store.value(prefix + ".Wz"), &store.value(prefix + ".Uz"),
                  &store.value(prefix + ".bz"), &store.value(prefix + ".Wr"),
                  &store.value(prefix + ".Ur"), &store.value(prefix + ".br"),
                  &store.value(prefix + ".Wh"), &store.value(prefix + ".Uh"),
                  &store.value(prefix + ".bh")};
}

void add_gru_params(ParamStore& store, const std::string& prefix, std::size_t hidden,
                    std::size_t input, Rng& rng) {
  for (const char* g : {"z", "r", "h"}) {
    store.add_xavier(prefix + ".W" + g, {hidden, input}, rng);
    store.add_xavier(prefix + ".U" + g, {hidden, hidden}, rng);
    store.add(prefix + ".b" + g, {hidden});
  }
}

namespace {

// W*x + b + U*h, the pre-activation of one gate.
Array gate_preact(const Array& w, const Array& x, const Array& b, const Array& u,
                  const Array& h) {
  Array out = linear_arr(w, x, b);
  Array uh = matmul_arr(u, h);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += uh[i];
  return out;
}

}  // namespace

Array gru_cell(const Array& h_prev, const Array& x, const GruSlice& w) {
  require_finite(h_prev, "gru_cell h_prev");
  require_finite(x, "gru_cell x");
  std::size_t h = h_prev.rows(), b = h_prev.cols();
  if (x.cols() != b) throw std::invalid_argument("gru_cell: batch mismatch");
  Array z = sigmoid_arr(gate_preact(*w.Wz, x, *w.bz, *w.Uz, h_prev));
  Array r = sigmoid_arr(gate_preact(*w.Wr, x, *w.br, *w.Ur, h_prev));
  Array rh = r;
  for (std::size_t i = 0; i < rh.size(); ++i) rh[i] *= h_prev[i];
  Array hc = tanh_arr(gate_preact(*w.Wh, x, *w.bh, *w.Uh, rh));
  Array out = Array::zeros({h, b});
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - z[i]) * h_prev[i] + z[i] * hc[i];
  return out;
}

ConvBankSlice ConvBankSlice::from(const ParamStore& store, const std::string& prefix,
                                  const std::vector<std::size_t>& kernel_sizes) {
  ConvBankSlice s;
  for (std::size_t k : kernel_sizes) {
    std::string base = prefix + ".k" + std::to_string(k);
    s.banks.push_back({k, &store.value(base + ".W"), &store.value(base + ".b")});
  }
  return s;
}

void add_conv_bank_params(ParamStore& store, const std::string& prefix,
                          const std::vector<std::size_t>& kernel_sizes, std::size_t filters,
                          std::size_t emb_dim, Rng& rng) {
  for (std::size_t k : kernel_sizes) {
    std::string base = prefix + ".k" + std::to_string(k);
    store.add_xavier(base + ".W", {filters, k * emb_dim}, rng);
    store.add(base + ".b", {filters});
  }
}

std::size_t conv1d_bank_output_size(const ConvBankSlice& w, std::size_t t_len) {
  std::size_t total = 0;
  for (const auto& bank : w.banks) {
    std::size_t p = t_len - bank.k + 1;
    std::size_t q = (p + 1) / 2;
    total += bank.W->rows() * q;
  }
  return total;
}

Array conv1d_bank(const Array& embeddings, const ConvBankSlice& w) {
  require_finite(embeddings, "conv1d_bank");
  if (embeddings.ndim() != 2) throw std::invalid_argument("conv1d_bank: need T x E input");
  std::size_t t_len = embeddings.rows(), e = embeddings.cols();
  if (t_len == 0) throw std::invalid_argument("conv1d_bank: empty sequence");
  std::vector<double> flat;
  flat.reserve(conv1d_bank_output_size(w, t_len));
  for (const auto& bank : w.banks) {
    std::size_t k = bank.k;
    if (t_len < k) throw std::invalid_argument("conv1d_bank: sequence shorter than kernel");
    std::size_t f = bank.W->rows();
    std::size_t p = t_len - k + 1;
    // conv map (f x p)
    Array conv = Array::zeros({f, p});
    for (std::size_t fi = 0; fi < f; ++fi) {
      for (std::size_t j = 0; j < p; ++j) {
        double acc = (*bank.b)[fi];
        for (std::size_t wj = 0; wj < k; ++wj)
          for (std::size_t ei = 0; ei < e; ++ei)
            acc += (*bank.W)[fi * (k * e) + wj * e + ei] * embeddings[(j + wj) * e + ei];
        conv[fi * p + j] = acc;
      }
    }
    // max-pool window 2 stride 2, trailing window of 1 passes through
    std::size_t q = (p + 1) / 2;
    for (std::size_t fi = 0; fi < f; ++fi) {
      for (std::size_t qi = 0; qi < q; ++qi) {
        std::size_t j0 = 2 * qi;
        double v = conv[fi * p + j0];
        if (j0 + 1 < p) v = std::max(v, conv[fi * p + j0 + 1]);
        flat.push_back(v);
      }
    }
  }
  return Array::vec(std::move(flat));
}

GruRefs GruRefs::bind(Tape& t, ParamStore& store, const std::string& prefix) {
  return GruRefs{t.param(store, prefix + ".Wz"), t.param(store, prefix + ".Uz"),
                 t.param(store, prefix + ".bz"), t.param(store, prefix + ".Wr"),
                 t.param(store, prefix + ".Ur"), t.param(store, prefix + ".br"),
                 t.param(store, prefix + ".Wh"), t.param(store, prefix + ".Uh"),
                 t.param(store, prefix + ".bh")};
}

NodeId gru_cell_node(Tape& t, NodeId h_prev, NodeId x, const GruRefs& w) {
  NodeId z = sigmoid(t, add(t, linear_node(t, w.Wz, x, w.bz), matmul(t, w.Uz, h_prev)));
  NodeId r = sigmoid(t, add(t, linear_node(t, w.Wr, x, w.br), matmul(t, w.Ur, h_prev)));
  NodeId rh = mul(t, r, h_prev);
  NodeId hc = tanh_op(t, add(t, linear_node(t, w.Wh, x, w.bh), matmul(t, w.Uh, rh)));
  NodeId keep = mul(t, affine(t, z, -1.0, 1.0), h_prev);
  return add(t, keep, mul(t, z, hc));
}

NodeId linear_node(Tape& t, NodeId w, NodeId x, NodeId b) {
  return add_col_broadcast(t, matmul(t, w, x), b);
}

}  // namespace arel
