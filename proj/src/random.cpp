#include "specdep/random.hpp"

#include <cmath>
#include <numbers>

namespace specdep {

double NormalStream::operator()() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;  // (0, 1]
  const double u2 = static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;        // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace specdep
