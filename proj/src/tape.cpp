#include "elc/tape.hpp"

#include "elc/error.hpp"

namespace elc {

namespace {
thread_local Tape* g_active_tape = nullptr;
}

Tape* Tape::active() { return g_active_tape; }

void Tape::record(const std::vector<Tensor>& inputs, const Tensor& output,
                  std::function<void()> pull) {
  for (const Tensor& in : inputs) {
    if (in.requires_grad()) in.node()->ensure_grad();
  }
  output.node()->requires_grad = true;
  output.node()->ensure_grad();
  ops_.push_back(Op{output, std::move(pull)});
}

void Tape::backward(const Tensor& scalar_loss) {
  if (!scalar_loss.defined() || scalar_loss.size() != 1) {
    throw ContractError(
        "backward: loss must be a scalar tensor, got shape " +
        (scalar_loss.defined() ? shape_to_string(scalar_loss.shape())
                               : std::string("<undefined>")));
  }
  if (backward_done_) {
    throw ContractError("backward: tape already replayed once");
  }
  backward_done_ = true;
  scalar_loss.node()->ensure_grad();
  scalar_loss.node()->grad[0] = 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    it->pull();
  }
}

TapeScope::TapeScope(Tape& t) : prev_(g_active_tape) { g_active_tape = &t; }

TapeScope::~TapeScope() { g_active_tape = prev_; }

bool grad_wanted(std::initializer_list<const Tensor*> inputs) {
  if (g_active_tape == nullptr) return false;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

}  // namespace elc
