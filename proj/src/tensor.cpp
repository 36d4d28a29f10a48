#include "mfd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "mfd/error.hpp"
#include "mfd/kernels.hpp"

namespace mfd::ad {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<double>& Node::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw ShapeMismatch(std::string(op) + ": incompatible shapes " + shape_string(a) + " and " +
                      shape_string(b));
}

NodePtr make_leaf(Shape shape, std::vector<double> data, bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeMismatch("tensor dimensions must be positive, got " + shape_string(shape));
  }
  if (data.size() != shape_numel(shape)) {
    throw ShapeMismatch("data length " + std::to_string(data.size()) + " does not match shape " +
                        shape_string(shape));
  }
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return n;
}

// Records `fn` only when some parent participates in differentiation.
Tensor make_result(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
                   std::function<void(const std::vector<double>&)> fn) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->is_leaf = false;
  n->requires_grad = std::any_of(parents.begin(), parents.end(),
                                 [](const NodePtr& p) { return p->requires_grad; });
  if (n->requires_grad) {
    n->parents = std::move(parents);
    n->backward = std::move(fn);
  }
  return Tensor(std::move(n));
}

std::size_t rows_of(const Node& n) { return n.shape.size() <= 1 ? 1 : n.value.size() / n.shape.back(); }
std::size_t cols_of(const Node& n) { return n.shape.empty() ? 1 : n.shape.back(); }

void require_2d(const char* op, const Tensor& t) {
  if (t.rank() > 2) throw ShapeMismatch(std::string(op) + ": expected rank <= 2, got " + shape_string(t.shape()));
}

void require_same(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error(op, a.shape(), b.shape());
}

}  // namespace

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : node_(make_leaf(std::move(shape), std::move(data), requires_grad)) {}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({1}, {value}, requires_grad); }

Tensor Tensor::vector(std::vector<double> data, bool requires_grad) {
  const std::size_t n = data.size();
  return Tensor({n}, std::move(data), requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data, bool requires_grad) {
  return Tensor({rows, cols}, std::move(data), requires_grad);
}

const Shape& Tensor::shape() const { return node_->shape; }
const std::vector<double>& Tensor::value() const { return node_->value; }
std::size_t Tensor::rows() const { return rows_of(*node_); }
std::size_t Tensor::cols() const { return cols_of(*node_); }

std::span<double> Tensor::mutable_data() { return node_->value; }

double Tensor::item() const {
  if (numel() != 1) throw NotScalar("item() on tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
void Tensor::set_requires_grad(bool on) { node_->requires_grad = on; }
bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }
std::span<const double> Tensor::grad() const { return node_->grad; }
void Tensor::zero_grad() { node_->grad.clear(); }

Tensor Tensor::detach() const { return Tensor(shape(), node_->value, false); }

Tensor Tensor::reshape(Shape new_shape) const {
  if (shape_numel(new_shape) != numel()) shape_error("reshape", shape(), new_shape);
  auto self = node_;
  return make_result(std::move(new_shape), node_->value, {self},
                     [self](const std::vector<double>& g) {
                       auto& dst = self->grad_buffer();
                       for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
                     });
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw NotScalar("backward() needs a scalar loss, got shape " +
                    (loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
  }
  Node* root = loss.node();
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->is_leaf || !n->backward) continue;
    if (!n->grad.empty()) n->backward(n->grad);
  }
  // Free the graph: interior nodes drop their closures, parents and grads.
  for (Node* n : order) {
    if (n->is_leaf) continue;
    n->backward = nullptr;
    n->parents.clear();
    n->grad.clear();
    n->grad.shrink_to_fit();
  }
}

// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d("matmul", a);
  require_2d("matmul", b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k || b.rank() != 2) shape_error("matmul", a.shape(), b.shape());
  std::vector<double> out(m * n);
  kernels::gemm({false, false, m, n, k, a.data().data(), b.data().data(), out.data(), false});
  auto an = a.node_ptr(), bn = b.node_ptr();
  return make_result({m, n}, std::move(out), {an, bn}, [an, bn, m, n, k](const std::vector<double>& g) {
    if (an->requires_grad) {  // dA = G B^T
      kernels::gemm({false, true, m, k, n, g.data(), bn->value.data(), an->grad_buffer().data(), true});
    }
    if (bn->requires_grad) {  // dB = A^T G
      kernels::gemm({true, false, k, n, m, an->value.data(), g.data(), bn->grad_buffer().data(), true});
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_2d("transpose", a);
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  const auto& v = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = v[i * n + j];
  auto an = a.node_ptr();
  return make_result({n, m}, std::move(out), {an}, [an, m, n](const std::vector<double>& g) {
    auto& dst = an->grad_buffer();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) dst[i * n + j] += g[j * m + i];
  });
}

namespace {

template <typename Fwd, typename Bwd>
Tensor elementwise_binary(const char* op, const Tensor& a, const Tensor& b, Fwd fwd, Bwd bwd) {
  require_same(op, a, b);
  std::vector<double> out(a.numel());
  const auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i], bv[i]);
  auto an = a.node_ptr(), bn = b.node_ptr();
  return make_result(a.shape(), std::move(out), {an, bn}, [an, bn, bwd](const std::vector<double>& g) {
    const bool ga = an->requires_grad, gb = bn->requires_grad;
    std::vector<double>* da = ga ? &an->grad_buffer() : nullptr;
    std::vector<double>* db = gb ? &bn->grad_buffer() : nullptr;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double dai = 0, dbi = 0;
      bwd(an->value[i], bn->value[i], g[i], dai, dbi);
      if (ga) (*da)[i] += dai;
      if (gb) (*db)[i] += dbi;
    }
  });
}

template <typename Fwd, typename Bwd>
Tensor elementwise_unary(const Tensor& a, Fwd fwd, Bwd bwd) {
  std::vector<double> out(a.numel());
  const auto av = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i]);
  auto an = a.node_ptr();
  // The backward sees the input value and the output value.
  auto result = make_result(a.shape(), out, {an}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [an, bwd, y = std::move(out)](const std::vector<double>& g) {
      auto& dst = an->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * bwd(an->value[i], y[i]);
    };
  }
  return result;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double g, double& da, double& db) { da = g; db = g; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double g, double& da, double& db) { da = g; db = -g; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double x, double y, double g, double& da, double& db) { da = g * y; db = g * x; });
}

Tensor scale(const Tensor& a, double s) {
  return elementwise_unary(a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return elementwise_unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor relu(const Tensor& a) {
  return elementwise_unary(a, [](double x) { return x > 0 ? x : 0.0; },
                           [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return elementwise_unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor add_row(const Tensor& x, const Tensor& v) {
  require_2d("add_row", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (v.numel() != n) shape_error("add_row", x.shape(), v.shape());
  std::vector<double> out(x.data().begin(), x.data().end());
  const auto vv = v.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += vv[j];
  auto xn = x.node_ptr(), vn = v.node_ptr();
  return make_result(x.shape(), std::move(out), {xn, vn}, [xn, vn, m, n](const std::vector<double>& g) {
    if (xn->requires_grad) {
      auto& dx = xn->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
    }
    if (vn->requires_grad) {
      auto& dv = vn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) dv[j] += g[i * n + j];
    }
  });
}

Tensor mul_row(const Tensor& x, const Tensor& v) {
  require_2d("mul_row", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (v.numel() != n) shape_error("mul_row", x.shape(), v.shape());
  std::vector<double> out(x.numel());
  const auto xv = x.data(), vv = v.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = xv[i * n + j] * vv[j];
  auto xn = x.node_ptr(), vn = v.node_ptr();
  return make_result(x.shape(), std::move(out), {xn, vn}, [xn, vn, m, n](const std::vector<double>& g) {
    if (xn->requires_grad) {
      auto& dx = xn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) dx[i * n + j] += g[i * n + j] * vn->value[j];
    }
    if (vn->requires_grad) {
      auto& dv = vn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) dv[j] += g[i * n + j] * xn->value[i * n + j];
    }
  });
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat: no inputs");
  const Tensor& first = parts.front();
  const std::size_t m = first.rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_2d("concat", p);
    if (p.rank() != first.rank() || p.rows() != m) shape_error("concat", first.shape(), p.shape());
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(m * total);
  std::size_t offset = 0;
  std::vector<NodePtr> nodes;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto v = parts[k].data();
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(i * widths[k]), widths[k],
                  out.begin() + static_cast<std::ptrdiff_t>(i * total + offset));
    offset += widths[k];
    nodes.push_back(parts[k].node_ptr());
  }
  Shape shape = first.rank() == 1 ? Shape{total} : Shape{m, total};
  return make_result(std::move(shape), std::move(out), nodes,
                     [nodes, widths, m, total](const std::vector<double>& g) {
                       std::size_t off = 0;
                       for (std::size_t k = 0; k < nodes.size(); ++k) {
                         if (nodes[k]->requires_grad) {
                           auto& d = nodes[k]->grad_buffer();
                           for (std::size_t i = 0; i < m; ++i)
                             for (std::size_t j = 0; j < widths[k]; ++j)
                               d[i * widths[k] + j] += g[i * total + off + j];
                         }
                         off += widths[k];
                       }
                     });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat_rows: no inputs");
  const std::size_t n = parts.front().cols();
  std::size_t m = 0;
  std::vector<double> out;
  std::vector<NodePtr> nodes;
  std::vector<std::size_t> sizes;
  for (const auto& p : parts) {
    require_2d("concat_rows", p);
    if (p.cols() != n) shape_error("concat_rows", parts.front().shape(), p.shape());
    out.insert(out.end(), p.data().begin(), p.data().end());
    m += p.rows();
    nodes.push_back(p.node_ptr());
    sizes.push_back(p.numel());
  }
  return make_result({m, n}, std::move(out), nodes, [nodes, sizes](const std::vector<double>& g) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k]->requires_grad) {
        auto& d = nodes[k]->grad_buffer();
        for (std::size_t i = 0; i < sizes[k]; ++i) d[i] += g[off + i];
      }
      off += sizes[k];
    }
  });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count) {
  require_2d("slice_cols", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (count == 0 || begin + count > n) {
    throw ShapeMismatch("slice_cols: [" + std::to_string(begin) + ", +" + std::to_string(count) +
                        ") out of range for " + shape_string(x.shape()));
  }
  std::vector<double> out(m * count);
  const auto v = x.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < count; ++j) out[i * count + j] = v[i * n + begin + j];
  auto xn = x.node_ptr();
  Shape shape = x.rank() == 1 ? Shape{count} : Shape{m, count};
  return make_result(std::move(shape), std::move(out), {xn}, [xn, m, n, begin, count](const std::vector<double>& g) {
    auto& d = xn->grad_buffer();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < count; ++j) d[i * n + begin + j] += g[i * count + j];
  });
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count) {
  require_2d("slice_rows", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (count == 0 || begin + count > m) {
    throw ShapeMismatch("slice_rows: [" + std::to_string(begin) + ", +" + std::to_string(count) +
                        ") out of range for " + shape_string(x.shape()));
  }
  const auto v = x.data();
  std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(begin * n),
                          v.begin() + static_cast<std::ptrdiff_t>((begin + count) * n));
  auto xn = x.node_ptr();
  return make_result({count, n}, std::move(out), {xn}, [xn, begin, n](const std::vector<double>& g) {
    auto& d = xn->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) d[begin * n + i] += g[i];
  });
}

Tensor repeat_rows(const Tensor& x, std::size_t m) {
  if (x.rows() != 1) throw ShapeMismatch("repeat_rows expects a single row, got " + shape_string(x.shape()));
  const std::size_t n = x.cols();
  std::vector<double> out;
  out.reserve(m * n);
  for (std::size_t i = 0; i < m; ++i) out.insert(out.end(), x.data().begin(), x.data().end());
  auto xn = x.node_ptr();
  return make_result({m, n}, std::move(out), {xn}, [xn, m, n](const std::vector<double>& g) {
    auto& d = xn->grad_buffer();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) d[j] += g[i * n + j];
  });
}

Tensor softmax_rows(const Tensor& x) {
  require_2d("softmax_rows", x);
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> y(x.numel());
  const auto v = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = v.data() + i * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0;
    for (std::size_t j = 0; j < n; ++j) z += (y[i * n + j] = std::exp(row[j] - mx));
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] /= z;
  }
  auto xn = x.node_ptr();
  auto result = make_result(x.shape(), y, {xn}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [xn, y = std::move(y), m, n](const std::vector<double>& g) {
      auto& d = xn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i) {
        double dot = 0;
        for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * y[i * n + j];
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] += y[i * n + j] * (g[i * n + j] - dot);
      }
    };
  }
  return result;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require_2d("layer_norm", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (gain.numel() != n) shape_error("layer_norm gain", x.shape(), gain.shape());
  if (bias.numel() != n) shape_error("layer_norm bias", x.shape(), bias.shape());
  std::vector<double> xhat(x.numel()), inv_std(m), out(x.numel());
  const auto v = x.data(), gv = gain.data(), bv = bias.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = v.data() + i * n;
    double mu = 0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<double>(n);
    double var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (row[j] - mu) * inv_std[i];
      out[i * n + j] = xhat[i * n + j] * gv[j] + bv[j];
    }
  }
  auto xn = x.node_ptr(), gn = gain.node_ptr(), bn = bias.node_ptr();
  auto result = make_result(x.shape(), std::move(out), {xn, gn, bn}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [xn, gn, bn, xhat = std::move(xhat), inv_std = std::move(inv_std), m,
                               n](const std::vector<double>& g) {
      if (gn->requires_grad) {
        auto& dg = gn->grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) dg[j] += g[i * n + j] * xhat[i * n + j];
      }
      if (bn->requires_grad) {
        auto& db = bn->grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) db[j] += g[i * n + j];
      }
      if (xn->requires_grad) {
        auto& dx = xn->grad_buffer();
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < m; ++i) {
          double mean_d = 0, mean_dx = 0;
          for (std::size_t j = 0; j < n; ++j) {
            const double dxh = g[i * n + j] * gn->value[j];
            mean_d += dxh;
            mean_dx += dxh * xhat[i * n + j];
          }
          mean_d *= inv_n;
          mean_dx *= inv_n;
          for (std::size_t j = 0; j < n; ++j) {
            const double dxh = g[i * n + j] * gn->value[j];
            dx[i * n + j] += inv_std[i] * (dxh - mean_d - xhat[i * n + j] * mean_dx);
          }
        }
      }
    };
  }
  return result;
}

Tensor l2_normalize_rows(const Tensor& x) {
  require_2d("l2_normalize_rows", x);
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> y(x.numel()), norms(m);
  const auto v = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += v[i * n + j] * v[i * n + j];
    norms[i] = std::sqrt(s);
    if (norms[i] == 0.0) throw ZeroVector("l2_normalize_rows: row " + std::to_string(i) + " is zero");
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] = v[i * n + j] / norms[i];
  }
  auto xn = x.node_ptr();
  auto result = make_result(x.shape(), y, {xn}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [xn, y = std::move(y), norms = std::move(norms), m, n](const std::vector<double>& g) {
      auto& d = xn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i) {
        double dot = 0;
        for (std::size_t j = 0; j < n; ++j) dot += y[i * n + j] * g[i * n + j];
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] += (g[i * n + j] - y[i * n + j] * dot) / norms[i];
      }
    };
  }
  return result;
}

Tensor sum(const Tensor& x) {
  double s = 0;
  for (double v : x.data()) s += v;
  auto xn = x.node_ptr();
  return make_result({1}, {s}, {xn}, [xn](const std::vector<double>& g) {
    auto& d = xn->grad_buffer();
    for (double& di : d) di += g[0];
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor mean_rows(const Tensor& x) {
  require_2d("mean_rows", x);
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> out(n, 0.0);
  const auto v = x.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += v[i * n + j];
  for (double& o : out) o /= static_cast<double>(m);
  auto xn = x.node_ptr();
  return make_result({1, n}, std::move(out), {xn}, [xn, m, n](const std::vector<double>& g) {
    auto& d = xn->grad_buffer();
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] += g[j] * inv;
  });
}

Tensor mse(const Tensor& pred, const Tensor& target) {
  require_same("mse", pred, target);
  const Tensor diff = sub(pred, target);
  return mean(mul(diff, diff));
}

namespace {

// Ascending-order sum: the result depends only on the multiset of terms.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

std::vector<double> attention_weights(const Tensor& q, const Tensor& k, double scale_factor) {
  require_2d("attention_weights", q);
  require_2d("attention_weights", k);
  const std::size_t nq = q.rows(), d = q.cols(), r = k.rows();
  if (k.cols() != d) shape_error("attention_weights", q.shape(), k.shape());
  const auto qv = q.data(), kv = k.data();
  std::vector<double> weights(nq * r), terms(r);
  for (std::size_t i = 0; i < nq; ++i) {
    double* w = weights.data() + i * r;
    for (std::size_t j = 0; j < r; ++j) {
      double s = 0;
      for (std::size_t c = 0; c < d; ++c) s += qv[i * d + c] * kv[j * d + c];
      w[j] = s * scale_factor;
    }
    const double mx = *std::max_element(w, w + r);
    for (std::size_t j = 0; j < r; ++j) terms[j] = w[j] = std::exp(w[j] - mx);
    const double z = sorted_sum(terms);
    for (std::size_t j = 0; j < r; ++j) w[j] /= z;
  }
  return weights;
}

Tensor attend(const Tensor& q, const Tensor& k, const Tensor& v, double scale_factor) {
  require_2d("attend", q);
  require_2d("attend", k);
  require_2d("attend", v);
  const std::size_t nq = q.rows(), d = q.cols(), r = k.rows(), dv = v.cols();
  if (k.cols() != d) shape_error("attend (query/key)", q.shape(), k.shape());
  if (v.rows() != r) shape_error("attend (key/value)", k.shape(), v.shape());
  const auto vv = v.data();
  std::vector<double> weights = attention_weights(q, k, scale_factor), out(nq * dv);
  std::vector<double> terms(r);
  for (std::size_t i = 0; i < nq; ++i) {
    const double* w = weights.data() + i * r;
    for (std::size_t c = 0; c < dv; ++c) {
      for (std::size_t j = 0; j < r; ++j) terms[j] = w[j] * vv[j * dv + c];
      out[i * dv + c] = sorted_sum(terms);
    }
  }
  auto qn = q.node_ptr(), kn = k.node_ptr(), vn = v.node_ptr();
  auto result = make_result({nq, dv}, std::move(out), {qn, kn, vn}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [qn, kn, vn, weights = std::move(weights), nq, d, r, dv,
                               scale_factor](const std::vector<double>& g) {
      std::vector<double> dw(r), ds(r);
      for (std::size_t i = 0; i < nq; ++i) {
        const double* w = weights.data() + i * r;
        const double* gi = g.data() + i * dv;
        double wdw = 0;
        for (std::size_t j = 0; j < r; ++j) {
          double s = 0;
          for (std::size_t c = 0; c < dv; ++c) s += gi[c] * vn->value[j * dv + c];
          dw[j] = s;
          wdw += w[j] * s;
        }
        for (std::size_t j = 0; j < r; ++j) ds[j] = w[j] * (dw[j] - wdw) * scale_factor;
        if (vn->requires_grad) {
          auto& dV = vn->grad_buffer();
          for (std::size_t j = 0; j < r; ++j)
            for (std::size_t c = 0; c < dv; ++c) dV[j * dv + c] += w[j] * gi[c];
        }
        if (qn->requires_grad) {
          auto& dQ = qn->grad_buffer();
          for (std::size_t j = 0; j < r; ++j)
            for (std::size_t c = 0; c < d; ++c) dQ[i * d + c] += ds[j] * kn->value[j * d + c];
        }
        if (kn->requires_grad) {
          auto& dK = kn->grad_buffer();
          for (std::size_t j = 0; j < r; ++j)
            for (std::size_t c = 0; c < d; ++c) dK[j * d + c] += ds[j] * qn->value[i * d + c];
        }
      }
    };
  }
  return result;
}

}  // namespace mfd::ad
