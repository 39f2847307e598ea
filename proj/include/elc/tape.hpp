#pragma once

#include <functional>
#include <vector>

#include "elc/tensor.hpp"

namespace elc {

// Reverse-mode tape. Operations append themselves in execution order while a
// TapeScope is open on the current thread; backward() replays them once, in
// reverse, accumulating gradients additively (fan-out sums contributions).
//
// The tape is rebuilt per forward pass. A tape and the tensors recorded on it
// belong to one thread; independent tapes on independent threads are fine.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // The tape ops record against, or nullptr when recording is off.
  static Tape* active();

  // Appends one operation. `pull` reads the output's grad and accumulates
  // into the inputs' grads. Grad buffers of all participants are allocated
  // (zeroed) here so that accumulation is always well-defined.
  void record(const std::vector<Tensor>& inputs, const Tensor& output,
              std::function<void()> pull);

  // Drives gradients of `scalar_loss` into every recorded tensor.
  // Callable once per tape.
  void backward(const Tensor& scalar_loss);

  size_t size() const { return ops_.size(); }

 private:
  friend class TapeScope;
  struct Op {
    Tensor output;
    std::function<void()> pull;
  };
  std::vector<Op> ops_;
  bool backward_done_ = false;
};

// RAII activation of a tape on the current thread.
class TapeScope {
 public:
  explicit TapeScope(Tape& t);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

// True when a tape is active and at least one input wants gradients.
bool grad_wanted(std::initializer_list<const Tensor*> inputs);

}  // namespace elc
