#ifndef JOINTPROF_SUMMATION_HPP
#define JOINTPROF_SUMMATION_HPP

#include <cmath>

namespace jointprof {

// Neumaier compensated accumulator. Keeps long sums accurate to a few ulp
// so conservation checks at 2^24 terms stay inside 1e-9, and gives a fixed,
// order-dependent result we can make deterministic by fixing the order.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  // Folds another accumulator in; call in a fixed order for determinism.
  void merge(const Accumulator& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace jointprof

#endif  // JOINTPROF_SUMMATION_HPP
