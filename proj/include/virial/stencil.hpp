#ifndef VIRIAL_STENCIL_HPP_
#define VIRIAL_STENCIL_HPP_

namespace virial::stencil {

// 4th-order first derivatives on a uniform axis of n >= 5 nodes.  `at(k)`
// returns the sample at node k.  The periodic variant wraps indices; the
// bounded variant switches to one-sided 5-point stencils at the edges.

template <typename F>
auto d1_periodic(F&& at, int i, int n, double inv_12h) {
  if (n < 5) {  // the 5-point wrap would alias; drop to 2nd order
    int im1 = i - 1 < 0 ? i - 1 + n : i - 1;
    int ip1 = i + 1 >= n ? i + 1 - n : i + 1;
    return (at(ip1) - at(im1)) * (6.0 * inv_12h);
  }
  int im2 = i - 2 < 0 ? i - 2 + n : i - 2;
  int im1 = i - 1 < 0 ? i - 1 + n : i - 1;
  int ip1 = i + 1 >= n ? i + 1 - n : i + 1;
  int ip2 = i + 2 >= n ? i + 2 - n : i + 2;
  return (at(im2) - 8.0 * at(im1) + 8.0 * at(ip1) - at(ip2)) * inv_12h;
}

template <typename F>
auto d1_bounded(F&& at, int i, int n, double inv_12h) {
  if (i >= 2 && i <= n - 3)
    return (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) *
           inv_12h;
  if (i == 0)
    return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) -
            3.0 * at(4)) *
           inv_12h;
  if (i == 1)
    return (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) +
            at(4)) *
           inv_12h;
  if (i == n - 2)
    return (-at(n - 5) + 6.0 * at(n - 4) - 18.0 * at(n - 3) +
            10.0 * at(n - 2) + 3.0 * at(n - 1)) *
           inv_12h;
  return (3.0 * at(n - 5) - 16.0 * at(n - 4) + 36.0 * at(n - 3) -
          48.0 * at(n - 2) + 25.0 * at(n - 1)) *
         inv_12h;
}

}  // namespace virial::stencil

#endif  // VIRIAL_STENCIL_HPP_
