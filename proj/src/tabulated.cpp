#include "acma/tabulated.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace acma {

RegularTable::RegularTable(Vec lo, double h, std::array<int, kMaxRealDim> counts, int components,
                           std::vector<double> data)
    : lo_(std::move(lo)), h_(h), counts_(counts), components_(components), data_(std::move(data)) {
  size_t total = static_cast<size_t>(components_);
  for (int a = 0; a < dim(); ++a) {
    if (counts_[a] < 4) {
      throw Error(ErrorCode::parse_error, "table needs at least 4 samples per axis");
    }
    total *= static_cast<size_t>(counts_[a]);
  }
  if (total != data_.size()) throw Error(ErrorCode::parse_error, "table size does not match counts");
}

RegularTable RegularTable::from_rows(int dim, int components,
                                     const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::parse_error, "empty table");
  std::vector<std::set<double>> axes(dim);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != dim + components) {
      throw Error(ErrorCode::parse_error, "table row has wrong column count");
    }
    for (int a = 0; a < dim; ++a) axes[a].insert(r[a]);
  }
  Vec lo(dim);
  std::array<int, kMaxRealDim> counts{};
  double h = 0.0;
  for (int a = 0; a < dim; ++a) {
    lo[a] = *axes[a].begin();
    counts[a] = static_cast<int>(axes[a].size());
    if (counts[a] < 2) throw Error(ErrorCode::parse_error, "table axis is degenerate");
    double ha = (*axes[a].rbegin() - lo[a]) / (counts[a] - 1);
    if (a == 0) h = ha;
    if (std::abs(ha - h) > 1e-9 * std::max(1.0, h)) {
      throw Error(ErrorCode::parse_error, "table spacing differs between axes");
    }
  }
  size_t npoints = 1;
  for (int a = 0; a < dim; ++a) npoints *= static_cast<size_t>(counts[a]);
  if (npoints != rows.size()) throw Error(ErrorCode::parse_error, "table is not a complete regular grid");
  std::vector<double> data(npoints * components, 0.0);
  for (const auto& r : rows) {
    size_t idx = 0;
    for (int a = dim - 1; a >= 0; --a) {
      long k = std::lround((r[a] - lo[a]) / h);
      idx = idx * counts[a] + static_cast<size_t>(k);
    }
    std::copy(r.begin() + dim, r.end(), data.begin() + static_cast<long>(idx * components));
  }
  return RegularTable(lo, h, counts, components, std::move(data));
}

Eigen::VectorXd RegularTable::operator()(const Vec& x) const {
  const int d = dim();
  std::array<int, kMaxRealDim> base{};
  std::array<std::array<double, 4>, kMaxRealDim> w{};
  for (int a = 0; a < d; ++a) {
    double t = (x[a] - lo_[a]) / h_;
    int i = static_cast<int>(std::floor(t)) - 1;
    i = std::clamp(i, 0, counts_[a] - 4);
    base[a] = i;
    double s = t - i;  // local coordinate relative to node i, nodes at 0..3
    for (int m = 0; m < 4; ++m) {
      double l = 1.0;
      for (int k = 0; k < 4; ++k) {
        if (k != m) l *= (s - k) / static_cast<double>(m - k);
      }
      w[a][m] = l;
    }
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(components_);
  int corners = 1 << (2 * d);
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    size_t idx = 0;
    for (int a = d - 1; a >= 0; --a) {
      int m = (c >> (2 * a)) & 3;
      weight *= w[a][m];
      idx = idx * counts_[a] + static_cast<size_t>(base[a] + m);
    }
    const double* src = data_.data() + idx * components_;
    for (int k = 0; k < components_; ++k) out[k] += weight * src[k];
  }
  return out;
}

}  // namespace acma
