#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "arel/array.hpp"
#include "arel/param_store.hpp"

namespace arel {

using NodeId = std::uint32_t;

// Reverse-mode tape. Every primitive records its output value plus a closure
// that pushes adjoints to its inputs. backward() walks the records in exact
// reverse of recording order; a cleared tape accumulates nothing.
//
// Parameter leaves are cached per (store, name) pair: the first reference
// copies the value in, and backward() adds the leaf's adjoint back into the
// store's gradient buffer.
class Tape {
 public:
  NodeId leaf(Array value);
  NodeId param(ParamStore& store, const std::string& name);

  const Array& value(NodeId id) const { return nodes_[id].value; }
  Array& grad(NodeId id);

  // Registers a primitive. The closure receives the tape so it can read
  // values and accumulate gradients of its inputs.
  NodeId emit(Array value, std::function<void(Tape&)> backward);

  // Seeds d(root)/d(root) = 1 (root must be scalar) and runs the reverse
  // sweep, then flushes parameter-leaf adjoints into their stores.
  void backward(NodeId root);

  void clear();
  std::size_t size() const { return nodes_.size(); }
  // Id the next emitted node will get; lets ops capture their output id.
  NodeId next_id() const { return static_cast<NodeId>(nodes_.size()); }

  // Adds g into the gradient buffer of node id (allocating zeros on first
  // touch). Intended for backward closures.
  void accumulate(NodeId id, const Array& g);

 private:
  struct Node {
    Array value;
    Array grad;  // empty until touched
    std::function<void(Tape&)> back;
    ParamStore* sink = nullptr;
    std::string sink_name;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const ParamStore*, std::unordered_map<std::string, NodeId>> param_cache_;
};

// ---------------------------------------------------------------------------
// Primitive ops. Matrices are (rows x cols); 1-D arrays act as single columns.
// ---------------------------------------------------------------------------

// (m x k) * (k x n) -> (m x n)
NodeId matmul(Tape& t, NodeId a, NodeId b);
// elementwise, same shape
NodeId add(Tape& t, NodeId a, NodeId b);
NodeId sub(Tape& t, NodeId a, NodeId b);
NodeId mul(Tape& t, NodeId a, NodeId b);
// alpha * a + beta, elementwise
NodeId affine(Tape& t, NodeId a, double alpha, double beta);
// adds column vector v (r x 1) to every column of m (r x c)
NodeId add_col_broadcast(Tape& t, NodeId m, NodeId v);

NodeId sigmoid(Tape& t, NodeId a);
NodeId tanh_op(Tape& t, NodeId a);
NodeId softsign_op(Tape& t, NodeId a);

// concatenate along rows (equal cols) / along cols (equal rows)
NodeId vstack(Tape& t, std::span<const NodeId> parts);
NodeId hstack(Tape& t, std::span<const NodeId> parts);
NodeId slice_rows(Tape& t, NodeId a, std::size_t r0, std::size_t r1);

// column j of the output is row ids[j] of the (V x E) input, transposed:
// output is (E x n). Used for embedding lookup.
NodeId gather_rows_as_cols(Tape& t, NodeId table, std::span<const int> ids);

// sliding windows of width k over columns: (E x T) -> (k*E x T-k+1), where
// output column j stacks input columns j..j+k-1.
NodeId im2col(Tape& t, NodeId a, std::size_t k);

// max-pool over columns with the given window and stride = window, applied
// independently within consecutive groups of group_cols columns; a trailing
// short window passes through (ceil semantics).
NodeId maxpool_cols(Tape& t, NodeId a, std::size_t window, std::size_t group_cols);

// (F x G*P) -> (F*P x G): column g of the output is the row-major flattening
// of columns [g*P, (g+1)*P) of the input.
NodeId regroup_flatten(Tape& t, NodeId a, std::size_t group_cols);

// column-wise log-softmax over rows (max-subtracted)
NodeId log_softmax_cols(Tape& t, NodeId a);

// scalar: sum_j weights[j] * (-logp[targets[j], j])
NodeId weighted_pick_nll(Tape& t, NodeId logp, std::span<const int> targets,
                         std::span<const double> weights);

NodeId sum_all(Tape& t, NodeId a);
NodeId mean_all(Tape& t, NodeId a);

}  // namespace arel
