#pragma once

#include <cmath>
#include <utility>

namespace qotto {

/// Golden-section search for a maximum of f on [lo, hi]. Returns the best
/// (x, f(x)) seen, which for a multimodal f is a local maximum inside the
/// bracket.
template <class F>
std::pair<double, double> golden_section_maximize(F&& f, double lo, double hi,
                                                  double tol,
                                                  int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

} // namespace qotto
