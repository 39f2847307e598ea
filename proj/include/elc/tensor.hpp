#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace elc {

namespace detail {

struct TensorData {
  std::vector<size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until the tensor joins a taped graph
  bool requires_grad = false;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

}  // namespace detail

size_t shape_product(const std::vector<size_t>& shape);
std::string shape_to_string(const std::vector<size_t>& shape);

// Dense row-major tensor of 64-bit floats. Cheap to copy (shared handle).
// Values are immutable after construction; only the grad slot mutates.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<size_t> shape);
  static Tensor full(std::vector<size_t> shape, double v);
  static Tensor scalar(double v);
  static Tensor from_data(std::vector<size_t> shape, std::vector<double> data);
  // from_data with requires_grad set; the usual way to make a trainable
  // weight.
  static Tensor param(std::vector<size_t> shape, std::vector<double> data);

  bool defined() const { return d_ != nullptr; }

  const std::vector<size_t>& shape() const { return d_->shape; }
  size_t ndim() const { return d_->shape.size(); }
  size_t extent(size_t axis) const { return d_->shape.at(axis); }
  size_t size() const { return d_->value.size(); }

  std::span<const double> data() const { return d_->value; }

  bool requires_grad() const { return d_ && d_->requires_grad; }
  void set_requires_grad(bool b) { d_->requires_grad = b; }

  bool has_grad() const { return d_ && !d_->grad.empty(); }
  std::span<const double> grad() const { return d_->grad; }
  void zero_grad() {
    if (d_) d_->grad.assign(d_->value.size(), 0.0);
  }

  // Scalar extraction; throws unless size() == 1.
  double item() const;

  double at(std::initializer_list<size_t> idx) const;
  double grad_at(std::initializer_list<size_t> idx) const;

  // Identity of the underlying storage; used by the tape and by tests that
  // check aliasing.
  const std::shared_ptr<detail::TensorData>& node() const { return d_; }

  // Construction-time escape hatch used by init and optimizer code. Calling
  // this on a tensor that already participates in a recorded graph is a
  // contract violation.
  std::span<double> raw_value() { return d_->value; }
  std::span<double> raw_grad() {
    d_->ensure_grad();
    return d_->grad;
  }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorData> d) : d_(std::move(d)) {}
  std::shared_ptr<detail::TensorData> d_;
};

// Flat offset of a multi-index under row-major layout.
size_t flat_index(const std::vector<size_t>& shape,
                  std::initializer_list<size_t> idx);

}  // namespace elc
