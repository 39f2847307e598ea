#include "elc/tensor.hpp"

#include "elc/error.hpp"

namespace elc {

size_t shape_product(const std::vector<size_t>& shape) {
  size_t n = 1;
  for (size_t e : shape) n *= e;
  return n;
}

std::string shape_to_string(const std::vector<size_t>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::zeros(std::vector<size_t> shape) {
  return full(std::move(shape), 0.0);
}

Tensor Tensor::full(std::vector<size_t> shape, double v) {
  for (size_t e : shape) {
    if (e == 0) throw ContractError("tensor extents must be positive");
  }
  auto d = std::make_shared<detail::TensorData>();
  d->value.assign(shape_product(shape), v);
  d->shape = std::move(shape);
  return Tensor(std::move(d));
}

Tensor Tensor::scalar(double v) { return full({1}, v); }

Tensor Tensor::from_data(std::vector<size_t> shape, std::vector<double> data) {
  for (size_t e : shape) {
    if (e == 0) throw ContractError("tensor extents must be positive");
  }
  if (shape_product(shape) != data.size()) {
    throw DimensionError("from_data: shape " + shape_to_string(shape) +
                         " does not match data length " +
                         std::to_string(data.size()));
  }
  auto d = std::make_shared<detail::TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(data);
  return Tensor(std::move(d));
}

Tensor Tensor::param(std::vector<size_t> shape, std::vector<double> data) {
  Tensor t = from_data(std::move(shape), std::move(data));
  t.set_requires_grad(true);
  return t;
}

double Tensor::item() const {
  if (!d_ || d_->value.size() != 1) {
    throw ContractError("item(): tensor is not scalar, shape " +
                        (d_ ? shape_to_string(d_->shape) : "<undefined>"));
  }
  return d_->value[0];
}

size_t flat_index(const std::vector<size_t>& shape,
                  std::initializer_list<size_t> idx) {
  if (idx.size() != shape.size()) {
    throw DimensionError("index rank " + std::to_string(idx.size()) +
                         " does not match tensor rank " +
                         std::to_string(shape.size()));
  }
  size_t off = 0;
  size_t axis = 0;
  for (size_t v : idx) {
    if (v >= shape[axis]) {
      throw ContractError("index out of range on axis " +
                          std::to_string(axis));
    }
    off = off * shape[axis] + v;
    ++axis;
  }
  return off;
}

double Tensor::at(std::initializer_list<size_t> idx) const {
  return d_->value[flat_index(d_->shape, idx)];
}

double Tensor::grad_at(std::initializer_list<size_t> idx) const {
  if (!has_grad()) throw ContractError("grad_at: tensor has no gradient");
  return d_->grad[flat_index(d_->shape, idx)];
}

}  // namespace elc
