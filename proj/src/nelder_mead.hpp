#pragma once

#include <functional>
#include <vector>

namespace bnbar {

struct NmResult {
  std::vector<double> x;
  double fmin = 0.0;
  long long n_eval = 0;
  bool converged = false;
};

// Plain Nelder-Mead with standard coefficients. Declares convergence when
// the best value improves by less than tol over a full refresh cycle of
// n+1 iterations; gives up after max_iter iterations.
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, double step, double tol,
                     long long max_iter);

}  // namespace bnbar
