#include "clauselab/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace clauselab::ad {

namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Tape::Node Tape::push(Op op, Vector value, Node a, Node b) {
  Entry& e = nodes_.emplace_back();
  e.op = op;
  e.grad = Vector::Zero(value.size());
  e.value = std::move(value);
  e.a = a;
  e.b = b;
  return static_cast<Node>(nodes_.size() - 1);
}

Tape::Node Tape::constant(Vector v) { return push(Op::Constant, std::move(v)); }

Tape::Node Tape::param(Parameter& p) {
  if (p.value.cols() != 1) throw std::invalid_argument("parameter '" + p.name + "' is not a column vector");
  const Node n = push(Op::Param, p.value.col(0));
  nodes_.back().p0 = &p;
  return n;
}

Tape::Node Tape::affine(Parameter& w, Parameter& b, Node x) {
  const Vector& in = value(x);
  if (w.value.cols() != in.size() || b.value.rows() != w.value.rows()) {
    throw std::invalid_argument("affine shape mismatch in '" + w.name + "'");
  }
  Vector out = w.value * in + b.value.col(0);
  const Node n = push(Op::Affine, std::move(out), x);
  nodes_.back().p0 = &w;
  nodes_.back().p1 = &b;
  return n;
}

Tape::Node Tape::concat(std::span<const Node> parts) {
  Eigen::Index total = 0;
  for (Node p : parts) total += value(p).size();
  Vector out(total);
  Eigen::Index at = 0;
  for (Node p : parts) {
    out.segment(at, value(p).size()) = value(p);
    at += value(p).size();
  }
  const Node n = push(Op::Concat, std::move(out));
  nodes_.back().inputs.assign(parts.begin(), parts.end());
  return n;
}

Tape::Node Tape::slice(Node x, Eigen::Index start, Eigen::Index length) {
  Vector out = value(x).segment(start, length);
  const Node n = push(Op::Slice, std::move(out), x);
  nodes_.back().offset = start;
  return n;
}

Tape::Node Tape::add(Node a, Node b) {
  Vector out = value(a) + value(b);
  return push(Op::Add, std::move(out), a, b);
}

Tape::Node Tape::mul(Node a, Node b) {
  Vector out = value(a).cwiseProduct(value(b));
  return push(Op::Mul, std::move(out), a, b);
}

Tape::Node Tape::relu(Node x) {
  Vector out = value(x).cwiseMax(0.0);
  return push(Op::Relu, std::move(out), x);
}

Tape::Node Tape::relu6(Node x) {
  Vector out = value(x).cwiseMax(0.0).cwiseMin(6.0);
  return push(Op::Relu6, std::move(out), x);
}

Tape::Node Tape::tanh(Node x) {
  Vector out = value(x).array().tanh();
  return push(Op::Tanh, std::move(out), x);
}

Tape::Node Tape::sigmoid(Node x) {
  Vector out = value(x).unaryExpr(&logistic);
  return push(Op::Sigmoid, std::move(out), x);
}

Tape::Node Tape::weightedNll(Node logits, int target, double weight) {
  const Vector& z = value(logits);
  const double top = z.maxCoeff();
  const double logSum = top + std::log((z.array() - top).exp().sum());
  Vector out(1);
  out[0] = weight * (logSum - z[target]);
  const Node n = push(Op::Nll, std::move(out), logits);
  nodes_.back().target = target;
  nodes_.back().scalar = weight;
  return n;
}

Tape::Node Tape::sumScaled(std::span<const Node> parts, double scale) {
  Vector out = Vector::Zero(1);
  for (Node p : parts) out[0] += value(p)[0];
  out *= scale;
  const Node n = push(Op::Sum, std::move(out));
  nodes_.back().scalar = scale;
  nodes_.back().inputs.assign(parts.begin(), parts.end());
  return n;
}

void Tape::backward(Node root) {
  if (value(root).size() != 1) throw std::invalid_argument("backward needs a scalar root");
  for (Entry& e : nodes_) e.grad.setZero();
  nodes_[static_cast<std::size_t>(root)].grad[0] = 1.0;
  for (auto i = static_cast<std::size_t>(root) + 1; i-- > 0;) {
    Entry& e = nodes_[i];
    const Vector& g = e.grad;
    auto gradOf = [&](Node n) -> Vector& { return nodes_[static_cast<std::size_t>(n)].grad; };
    switch (e.op) {
      case Op::Constant:
        break;
      case Op::Param:
        e.p0->grad.col(0) += g;
        break;
      case Op::Affine: {
        const Vector& in = value(e.a);
        e.p0->grad.noalias() += g * in.transpose();
        e.p1->grad.col(0) += g;
        gradOf(e.a).noalias() += e.p0->value.transpose() * g;
        break;
      }
      case Op::Concat: {
        Eigen::Index at = 0;
        for (Node p : e.inputs) {
          const Eigen::Index len = value(p).size();
          gradOf(p) += g.segment(at, len);
          at += len;
        }
        break;
      }
      case Op::Slice:
        gradOf(e.a).segment(e.offset, g.size()) += g;
        break;
      case Op::Add:
        gradOf(e.a) += g;
        gradOf(e.b) += g;
        break;
      case Op::Mul:
        gradOf(e.a) += g.cwiseProduct(value(e.b));
        gradOf(e.b) += g.cwiseProduct(value(e.a));
        break;
      case Op::Relu: {
        const Vector& in = value(e.a);
        gradOf(e.a) += (in.array() > 0.0).cast<double>().matrix().cwiseProduct(g);
        break;
      }
      case Op::Relu6: {
        const Vector& in = value(e.a);
        gradOf(e.a) += ((in.array() > 0.0) && (in.array() < 6.0)).cast<double>().matrix().cwiseProduct(g);
        break;
      }
      case Op::Tanh:
        gradOf(e.a) += (1.0 - e.value.array().square()).matrix().cwiseProduct(g);
        break;
      case Op::Sigmoid:
        gradOf(e.a) += (e.value.array() * (1.0 - e.value.array())).matrix().cwiseProduct(g);
        break;
      case Op::Nll: {
        const Vector& z = value(e.a);
        Vector soft = (z.array() - z.maxCoeff()).exp();
        soft /= soft.sum();
        soft[e.target] -= 1.0;
        gradOf(e.a) += e.scalar * g[0] * soft;
        break;
      }
      case Op::Sum:
        for (Node p : e.inputs) gradOf(p)[0] += e.scalar * g[0];
        break;
    }
  }
}

}  // namespace clauselab::ad
