#pragma once

#include <string>
#include <vector>

#include "arel/array.hpp"
#include "arel/param_store.hpp"
#include "arel/tape.hpp"

namespace arel {

// ---------------------------------------------------------------------------
// Pure forward kernels. Vectors are single columns; batched variants take
// (dim x batch) matrices. These never touch a tape and are used for decoding.
// ---------------------------------------------------------------------------

Array matmul_arr(const Array& a, const Array& b);
// W*x + b where b broadcasts over columns
Array linear_arr(const Array& w, const Array& x, const Array& b);
Array vstack_arr(const std::vector<const Array*>& parts);

Array sigmoid_arr(const Array& a);
Array tanh_arr(const Array& a);
Array softsign_arr(const Array& a);

// Stable softmax of a 1-D array (max-subtracted); sums to 1.
Array softmax(const Array& logits);
// Column-wise softmax of a matrix.
Array softmax_cols(const Array& logits);
Array log_softmax_cols_arr(const Array& logits);

// One GRU's weights, viewed inside a ParamStore under a name prefix:
// <prefix>.Wz/.Uz/.bz/.Wr/.Ur/.br/.Wh/.Uh/.bh
struct GruSlice {
  const Array *Wz, *Uz, *bz, *Wr, *Ur, *br, *Wh, *Uh, *bh;
  static GruSlice from(const ParamStore& store, const std::string& prefix);
};

// Declares the GRU parameter entries (Xavier for matrices, zero biases).
void add_gru_params(ParamStore& store, const std::string& prefix, std::size_t hidden,
                    std::size_t input, Rng& rng);

// h_t = (1-z) (.) h_prev + z (.) h~ with
//   z  = sigmoid(Wz x + Uz h_prev + bz)
//   r  = sigmoid(Wr x + Ur h_prev + br)
//   h~ = tanh(Wh x + Uh (r (.) h_prev) + bh)
// h_prev is (H x B), x is (X x B).
Array gru_cell(const Array& h_prev, const Array& x, const GruSlice& w);

// Convolution bank weights: <prefix>.k<K>.W is (F x K*E), <prefix>.k<K>.b is (F).
struct ConvBankSlice {
  struct Bank {
    std::size_t k;
    const Array* W;
    const Array* b;
  };
  std::vector<Bank> banks;
  static ConvBankSlice from(const ParamStore& store, const std::string& prefix,
                            const std::vector<std::size_t>& kernel_sizes);
};

void add_conv_bank_params(ParamStore& store, const std::string& prefix,
                          const std::vector<std::size_t>& kernel_sizes, std::size_t filters,
                          std::size_t emb_dim, Rng& rng);

// Per kernel size k: valid convolution with stride 1 over the T time steps of
// the (T x E) embedding matrix, then max-pool window 2 stride 2 over time
// (a trailing odd window passes through), then flatten; results from all
// kernel sizes are concatenated. T must be >= max kernel size.
Array conv1d_bank(const Array& embeddings, const ConvBankSlice& w);

// Flattened output length of the bank for a fixed input length.
std::size_t conv1d_bank_output_size(const ConvBankSlice& w, std::size_t t_len);

// ---------------------------------------------------------------------------
// Tape composites.
// ---------------------------------------------------------------------------

struct GruRefs {
  NodeId Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;
  static GruRefs bind(Tape& t, ParamStore& store, const std::string& prefix);
};

NodeId gru_cell_node(Tape& t, NodeId h_prev, NodeId x, const GruRefs& w);
NodeId linear_node(Tape& t, NodeId w, NodeId x, NodeId b);

}  // namespace arel
