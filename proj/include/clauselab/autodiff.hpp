#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace clauselab::ad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A trainable tensor (column vectors are n x 1) with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  void zeroGrad() { grad.setZero(); }
};

/// Reverse-mode differentiation over vector-valued nodes. Nodes are appended
/// in evaluation order, so a single reverse sweep propagates gradients.
class Tape {
 public:
  using Node = std::int32_t;

  Node constant(Vector v);
  /// A column parameter used directly as a value.
  Node param(Parameter& p);
  /// W * x + b.
  Node affine(Parameter& w, Parameter& b, Node x);
  Node concat(std::span<const Node> parts);
  Node slice(Node x, Eigen::Index start, Eigen::Index length);
  Node add(Node a, Node b);
  Node mul(Node a, Node b);
  Node relu(Node x);
  Node relu6(Node x);
  Node tanh(Node x);
  Node sigmoid(Node x);
  /// weight * -log softmax(logits)[target], a 1-vector.
  Node weightedNll(Node logits, int target, double weight);
  /// Sum of 1-vectors scaled by `scale`.
  Node sumScaled(std::span<const Node> parts, double scale);

  const Vector& value(Node n) const { return nodes_[static_cast<std::size_t>(n)].value; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(root)/d(root) = 1 and accumulates into parameter gradients.
  void backward(Node root);
  void clear() { nodes_.clear(); }

 private:
  enum class Op : std::uint8_t {
    Constant, Param, Affine, Concat, Slice, Add, Mul, Relu, Relu6, Tanh, Sigmoid, Nll, Sum
  };

  struct Entry {
    Op op = Op::Constant;
    Vector value;
    Vector grad;
    Node a = -1;
    Node b = -1;
    Parameter* p0 = nullptr;
    Parameter* p1 = nullptr;
    Eigen::Index offset = 0;
    int target = 0;
    double scalar = 0;
    std::vector<Node> inputs;
  };

  Node push(Op op, Vector value, Node a = -1, Node b = -1);

  std::vector<Entry> nodes_;
};

}  // namespace clauselab::ad
