#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnpcurv/kernel.hpp"

namespace cnpcurv {

struct IdentityBattery {
  int id2_cases = 0;
  std::vector<int> id2_per_d;  // index d - 1
  bool id2_ok = true;
  bool weights_ok = true;
  bool convolution_ok = true;
  std::optional<std::string> counterexample;  // first failure

  bool ok() const { return id2_ok && weights_ok && convolution_ok; }
  std::string summary() const;
};

// Exact checks over d <= d_max and n <= n_max: the multinomial sum identity for every |beta| <= n,
// row sums of the weights and the a/b convolution for each preset, plus `extra` when given.
IdentityBattery run_identity_battery(int d_max, int n_max, const KernelSpec* extra = nullptr);

}  // namespace cnpcurv
