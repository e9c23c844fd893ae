#pragma once

#include <stdexcept>
#include <string>

namespace betacoal {

// Parameters outside the regime where a quantity is defined
// (e.g. the rate function needs a > 1, the record engine needs a in (0,1)).
class regime_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// theta*psi(j) >= lambda_j at some state j: the transform is infinite
// from state j on, so the recursion refuses to continue.
class admissibility_error : public std::domain_error {
public:
  admissibility_error(int state, double theta_psi, double rate)
      : std::domain_error("admissibility violated at state " + std::to_string(state) +
                          ": theta*psi = " + std::to_string(theta_psi) +
                          " >= lambda = " + std::to_string(rate) +
                          " (transform infinite for all n >= " + std::to_string(state) + ")"),
        state_(state) {}
  int state() const noexcept { return state_; }

private:
  int state_;
};

} // namespace betacoal
