#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acma/domains.hpp"
#include "run_config.hpp"

namespace acma::cli {

struct Experiment {
  AlmostComplexStructure structure;
  Frame frame;
  DefiningFunction rho;
  GridPtr grid;
  std::shared_ptr<const MAOperator> op;
};

/// Structure, frame, domain and grid from the [domain] and [structure] sections.
Experiment build_experiment(const RunConfig& config, double h);

/// Named closed-form fields:
///   zero, one, const:<c>, rho, normsq, x1, z1sq (|z_1|^2), re_z1sq (Re z_1^2),
///   manufactured (|z|^2 + x_1^4 / 10), holder:<alpha> (-|x - e_1|^{1 + alpha}),
///   det:<name> (det A of another named field, pointwise).
PointFunction named_field(const std::string& name, const Experiment& experiment);

/// Names accepted by named_field (parameterized entries shown with their prefix).
std::vector<std::string> field_names();

}  // namespace acma::cli
