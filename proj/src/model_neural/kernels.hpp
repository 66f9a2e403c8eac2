#pragma once

// Forward computations shared by inference (plain vectors) and training
// (tape nodes).

#include <array>
#include <span>
#include <vector>

#include "clauselab/neural_model.hpp"

namespace clauselab::detail {

struct ValueOps {
  using V = ad::Vector;
  const std::vector<ad::Parameter>& p;

  V param(std::size_t i) { return p[i].value.col(0); }
  V affine(std::size_t w, std::size_t b, const V& x) { return p[w].value * x + p[b].value.col(0); }
  V zeros(Eigen::Index n) { return V::Zero(n); }
  V concat(std::span<const V> parts) {
    Eigen::Index total = 0;
    for (const V& v : parts) total += v.size();
    V out(total);
    Eigen::Index at = 0;
    for (const V& v : parts) {
      out.segment(at, v.size()) = v;
      at += v.size();
    }
    return out;
  }
  V slice(const V& x, Eigen::Index start, Eigen::Index len) { return x.segment(start, len); }
  V add(const V& a, const V& b) { return a + b; }
  V mul(const V& a, const V& b) { return a.cwiseProduct(b); }
  V relu(const V& x) { return x.cwiseMax(0.0); }
  V relu6(const V& x) { return x.cwiseMax(0.0).cwiseMin(6.0); }
  V tanh(const V& x) { return x.array().tanh(); }
  V sigmoid(const V& x) {
    return x.unaryExpr([](double z) {
      if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
      const double e = std::exp(z);
      return e / (1.0 + e);
    });
  }
};

struct TapeOps {
  using V = ad::Tape::Node;
  ad::Tape& tape;
  std::vector<ad::Parameter>& p;

  V param(std::size_t i) { return tape.param(p[i]); }
  V affine(std::size_t w, std::size_t b, V x) { return tape.affine(p[w], p[b], x); }
  V zeros(Eigen::Index n) { return tape.constant(ad::Vector::Zero(n)); }
  V concat(std::span<const V> parts) { return tape.concat(parts); }
  V slice(V x, Eigen::Index start, Eigen::Index len) { return tape.slice(x, start, len); }
  V add(V a, V b) { return tape.add(a, b); }
  V mul(V a, V b) { return tape.mul(a, b); }
  V relu(V x) { return tape.relu(x); }
  V relu6(V x) { return tape.relu6(x); }
  V tanh(V x) { return tape.tanh(x); }
  V sigmoid(V x) { return tape.sigmoid(x); }
};

template <class Ops>
typename Ops::V applySymbol(Ops& ops, const NeuralModel& model, std::uint32_t block,
                            std::span<const typename Ops::V> args) {
  const SymbolBlock& b = model.block(block);
  if (b.arity == 0) return ops.param(b.weight);
  auto z = ops.affine(b.weight, b.bias, ops.concat(args));
  return model.config().nonlinearity == Nonlinearity::Tanh ? ops.tanh(z) : ops.relu6(z);
}

template <class Ops>
typename Ops::V runLstm(Ops& ops, const LstmParams& lstm, std::span<const typename Ops::V> sequence) {
  using V = typename Ops::V;
  const Eigen::Index h = lstm.hidden;
  V hidden = ops.zeros(h);
  V cell = ops.zeros(h);
  for (const V& x : sequence) {
    const std::array<V, 2> in{x, hidden};
    V z = ops.affine(lstm.gates, lstm.gateBias, ops.concat(in));
    V input = ops.sigmoid(ops.slice(z, 0, h));
    V forget = ops.sigmoid(ops.slice(z, h, h));
    V output = ops.sigmoid(ops.slice(z, 2 * h, h));
    V candidate = ops.tanh(ops.slice(z, 3 * h, h));
    cell = ops.add(ops.mul(forget, cell), ops.mul(input, candidate));
    hidden = ops.mul(output, ops.tanh(cell));
  }
  return ops.affine(lstm.projection, lstm.projectionBias, hidden);
}

template <class Ops>
typename Ops::V runFin(Ops& ops, const FinParams& fin, typename Ops::V clause, typename Ops::V summary) {
  const std::array<typename Ops::V, 2> in{clause, summary};
  auto x = ops.relu(ops.affine(fin.w1, fin.b1, ops.concat(in)));
  x = ops.relu(ops.affine(fin.w2, fin.b2, x));
  return ops.affine(fin.w3, fin.b3, x);
}

}  // namespace clauselab::detail
