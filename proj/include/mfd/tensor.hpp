#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mfd::ad {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

namespace detail {
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until populated
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(const std::vector<double>& grad_out)> backward;

  std::vector<double>& grad_buffer();
};
}  // namespace detail

// Dense row-major float64 array with reverse-mode autodiff. Tensor is a shared
// handle: copies alias the same node, as leaves in a ParamStore do.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor vector(std::vector<double> data, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                       bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const { return value().size(); }
  // Rank-1 tensors are treated as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const { return value(); }
  // In-place access for leaves (optimizer updates, initialization).
  std::span<double> mutable_data();
  double at(std::size_t i) const { return value()[i]; }
  double at(std::size_t r, std::size_t c) const { return value()[r * cols() + c]; }
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();

  // Same values, no history.
  Tensor detach() const;
  Tensor reshape(Shape shape) const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  const std::vector<double>& value() const;
  std::shared_ptr<detail::Node> node_;
};

// Populates grads of every requires_grad leaf reachable from `loss` and frees
// the recorded graph. Grads accumulate across calls until zero_grad().
void backward(const Tensor& loss);

// ---- primitives ----
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
// x[m,n] + v[n] on every row.
Tensor add_row(const Tensor& x, const Tensor& v);
// x[m,n] * v[n] on every row.
Tensor mul_row(const Tensor& x, const Tensor& v);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
// Concatenation along the last dimension; all inputs share the leading shape.
Tensor concat(const std::vector<Tensor>& parts);
// Stacks 2-D (or rank-1 row) inputs with equal column counts.
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count);
// [1,n] -> [m,n]
Tensor repeat_rows(const Tensor& x, std::size_t m);
Tensor softmax_rows(const Tensor& x);
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);
// Divides each row by its L2 norm; throws ZeroVector on an all-zero row.
Tensor l2_normalize_rows(const Tensor& x);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor mean_rows(const Tensor& x);
Tensor mse(const Tensor& pred, const Tensor& target);

// Scaled dot-product attention of each query row over key/value rows:
// softmax(q k^T * scale) v. Reductions over keys are sorted before summing so
// the result does not depend on key/value row order.
Tensor attend(const Tensor& q, const Tensor& k, const Tensor& v, double scale);
// The softmax weights attend() uses, row-major [q rows, k rows]; no graph is recorded.
std::vector<double> attention_weights(const Tensor& q, const Tensor& k, double scale);

}  // namespace mfd::ad
