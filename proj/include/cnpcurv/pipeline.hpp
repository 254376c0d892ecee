#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "cnpcurv/charfn.hpp"
#include "cnpcurv/config.hpp"
#include "cnpcurv/curvature.hpp"
#include "cnpcurv/fibredim.hpp"
#include "cnpcurv/kernel.hpp"
#include "cnpcurv/tuple.hpp"

namespace cnpcurv {

struct Horizons {
  std::optional<int> N_op;
  std::optional<int> N_theta;
  std::optional<int> n_max;
};

struct ResolvedHorizons {
  int N_op = 0;
  int N_theta = 0;
  int n_max = 0;
  std::optional<int> nilpotency;
};

// N_theta defaults to 12 and is raised to 2m - 2 for tuples nilpotent of order m,
// N_op defaults to N_theta (12 when not nilpotent), n_max to N_theta.
ResolvedHorizons resolve_horizons(const OperatorTuple& t, const Horizons& h);

struct CurvatureOptions {
  Horizons horizons;
  double radius = 0.999;
  int samples = 4000;
  std::uint64_t seed = 7;
  int fd_samples = 50;
  double fd_radius = 0.8;
  Tolerances tol;
};

// Owns the objects a report is derived from; the series points into pkg.
struct Analysis {
  KernelSpec kernel;
  std::unique_ptr<DefectPackage> pkg;
  std::unique_ptr<CharacteristicSeries> series;
  PurityReport purity;
  CurvatureReport report;
};

// load -> defect -> purity -> taylor -> traces -> curvature -> fd -> assess.
// The verdict is stored in the report; callers decide whether a failed verdict is fatal.
Analysis analyze(const OperatorTuple& t, const KernelSpec& kernel, const CurvatureOptions& opt);

struct FdOptions {
  Horizons horizons;
  int samples = 50;
  double radius = 0.8;
  std::uint64_t seed = 7;
  Tolerances tol;
};

FibreDimReport fibre_dimension(const OperatorTuple& t, const KernelSpec& kernel, const FdOptions& opt);

// The kernel at the horizon a run needs; custom kernels cannot grow.
KernelSpec kernel_for(const KernelSpec& k, int horizon);

nlohmann::ordered_json to_json(const CurvatureReport& r);
nlohmann::ordered_json to_json(const FibreDimReport& r);
nlohmann::ordered_json to_json(const PointEvaluation& e);
nlohmann::ordered_json matrix_json(const cmat& m);
std::string to_csv(const CurvatureReport& r);

// 17 significant digits
std::string fmt17(double v);

}  // namespace cnpcurv
