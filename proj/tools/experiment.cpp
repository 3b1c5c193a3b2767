#include "experiment.hpp"

#include <cmath>

namespace acma::cli {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::config_error, what); }

double parameter(const std::string& name, std::size_t colon) {
  std::string arg = name.substr(colon + 1);
  try {
    std::size_t used = 0;
    double v = std::stod(arg, &used);
    if (used == arg.size()) return v;
  } catch (const std::exception&) {
  }
  config_error("bad parameter in field '" + name + "'");
}

}  // namespace

Experiment build_experiment(const RunConfig& config, double h) {
  const long n = config.integer("domain", "n");
  if (n != 1 && n != 2) config_error("domain.n must be 1 or 2");
  const int dim = static_cast<int>(2 * n);
  const std::string family = config.text("structure", "family");
  AlmostComplexStructure j = AlmostComplexStructure::standard(static_cast<int>(n));
  if (family == "sheared") {
    j = AlmostComplexStructure::sheared(static_cast<int>(n), config.real("structure", "epsilon"));
  } else if (family != "standard") {
    config_error("structure.family must be standard or sheared, got '" + family + "'");
  }
  Frame frame = split_frame(j, Vec::Zero(dim));

  const std::string shape = config.text("domain", "shape");
  DefiningFunction rho = DefiningFunction::ball(dim, config.real("domain", "radius"));
  if (shape == "ellipsoid") {
    std::vector<double> axes = config.reals("domain", "semi_axes");
    if (static_cast<int>(axes.size()) != dim) config_error("domain.semi_axes needs " + std::to_string(dim) + " entries");
    rho = DefiningFunction::ellipsoid(Eigen::Map<const Eigen::VectorXd>(axes.data(), dim));
  } else if (shape != "ball") {
    config_error("domain.shape must be ball or ellipsoid, got '" + shape + "'");
  }
  GridPtr grid = grid_build(rho, Box::cube(dim, config.real("domain", "box_half_width")), h, frame);
  auto op = std::make_shared<const MAOperator>(grid, frame);
  return {j, frame, rho, grid, op};
}

PointFunction named_field(const std::string& name, const Experiment& ex) {
  const std::size_t colon = name.find(':');
  const std::string head = name.substr(0, colon);
  if (colon != std::string::npos) {
    if (head == "const") {
      double c = parameter(name, colon);
      return [c](const Vec&) { return c; };
    }
    if (head == "holder") {
      double alpha = parameter(name, colon);
      return [alpha](const Vec& x) {
        Vec d = x;
        d[0] -= 1.0;
        return -std::pow(d.norm(), 1.0 + alpha);
      };
    }
    if (head == "det") {
      PointFunction inner = named_field(name.substr(colon + 1), ex);
      Frame frame = ex.frame;
      return [frame, inner](const Vec& x) { return hermitian_det(a_matrix(frame, inner, x)); };
    }
    config_error("unknown field '" + name + "'");
  }
  if (name == "zero") return [](const Vec&) { return 0.0; };
  if (name == "one") return [](const Vec&) { return 1.0; };
  if (name == "rho") return ex.rho.value;
  if (name == "normsq") return [](const Vec& x) { return x.squaredNorm(); };
  if (name == "x1") return [](const Vec& x) { return x[0]; };
  if (name == "z1sq") return [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; };
  if (name == "re_z1sq") return [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; };
  if (name == "manufactured") return [](const Vec& x) { return x.squaredNorm() + 0.1 * std::pow(x[0], 4); };
  config_error("unknown field '" + name + "'");
}

std::vector<std::string> field_names() {
  return {"zero", "one", "const:<c>", "rho", "normsq", "x1", "z1sq", "re_z1sq", "manufactured", "holder:<alpha>",
          "det:<field>"};
}

}  // namespace acma::cli
