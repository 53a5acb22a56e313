#include "promind/types.hpp"

#include <cmath>

namespace promind {

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

double unwrap_near(double reference, double angle) {
  return reference + wrap_angle(angle - reference);
}

}  // namespace promind
