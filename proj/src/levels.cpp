#include "nvpair/levels.hpp"

#include <cmath>

#include "nvpair/eigensolver.hpp"
#include "nvpair/errors.hpp"
#include "nvpair/parallel.hpp"

namespace nvpair {
namespace {

constexpr double kTieTolerance = 1e-6;

// Index of the eigenvector with the largest weight on basis state `state`,
// skipping `exclude`.
int dominant_level(const CMatrix& vectors, int state, int exclude) {
  int best = -1;
  double best_w = -1.0;
  for (int k = 0; k < vectors.cols(); ++k) {
    if (k == exclude) continue;
    const double w = std::norm(vectors(state, k));
    if (w > best_w) {
      best_w = w;
      best = k;
    }
  }
  return best;
}

}  // namespace

Vec3 field_axis(const SpinSystemConfig& config) {
  const double norm = config.b_field.norm();
  if (norm == 0.0) return Vec3::UnitZ();
  return config.b_field / norm;
}

LevelSweep sweep_levels(const SpinSystemConfig& config, double b_min, double b_max, int n, int threads) {
  if (n < 2) throw InvalidArgument("a level sweep needs at least two field points");
  if (!(b_min < b_max)) throw InvalidArgument("b_min must be below b_max");
  config.validate();
  const Vec3 axis = field_axis(config);
  const ProductBasis basis(config.spins);

  LevelSweep out;
  out.b_values.resize(n);
  std::vector<EigenDecomposition> eigs(n);
  for (int k = 0; k < n; ++k) out.b_values[k] = b_min + (b_max - b_min) * k / (n - 1);
  parallel_for(n, threads, [&](std::size_t k) {
    eigs[k] = eigh(build_hamiltonian(config.with_field(axis * out.b_values[k])));
  });

  const int dim = basis.dim();
  std::vector<int> previous;
  for (int k = 0; k < n; ++k) {
    const auto& e = eigs[k];
    std::vector<double> levels(dim);
    std::vector<std::string> labels(dim);
    std::vector<double> overlaps(dim);
    std::vector<int> chosen(dim);
    for (int lv = 0; lv < dim; ++lv) {
      levels[lv] = e.values[lv];
      int best = 0;
      int second = -1;
      for (int s = 0; s < dim; ++s) {
        const double w = std::norm(e.vectors(s, lv));
        if (w > std::norm(e.vectors(best, lv))) {
          second = best;
          best = s;
        } else if (s != best && (second < 0 || w > std::norm(e.vectors(second, lv)))) {
          second = s;
        }
      }
      if (!previous.empty() && second >= 0 &&
          std::norm(e.vectors(best, lv)) - std::norm(e.vectors(second, lv)) < kTieTolerance &&
          previous[lv] == second) {
        best = second;
      }
      chosen[lv] = best;
      labels[lv] = basis.label(best);
      overlaps[lv] = std::norm(e.vectors(best, lv));
    }
    previous = chosen;
    out.levels.push_back(std::move(levels));
    out.labels.push_back(std::move(labels));
    out.overlaps.push_back(std::move(overlaps));
  }
  return out;
}

double branch_gap(const SpinSystemConfig& config, const std::vector<double>& branch_a,
                  const std::vector<double>& branch_b, double b_gauss) {
  const ProductBasis basis(config.spins);
  const int a = basis.index_of(branch_a);
  const int b = basis.index_of(branch_b);
  if (a == b) throw InvalidArgument("anticrossing branches must differ");
  const auto e = eigh(build_hamiltonian(config.with_field(field_axis(config) * b_gauss)));
  const int la = dominant_level(e.vectors, a, -1);
  int lb = dominant_level(e.vectors, b, -1);
  if (lb == la) lb = dominant_level(e.vectors, b, la);
  return std::abs(e.values[la] - e.values[lb]);
}

LacResult find_lac(const SpinSystemConfig& config, const std::vector<double>& branch_a,
                   const std::vector<double>& branch_b, double b_lo, double b_hi) {
  if (!(b_lo < b_hi)) throw InvalidArgument("b_lo must be below b_hi");
  auto gap = [&](double b) { return branch_gap(config, branch_a, branch_b, b); };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = b_lo;
  double hi = b_hi;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = gap(x1);
  double f2 = gap(x2);
  while (hi - lo > 1e-4) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = gap(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = gap(x2);
    }
  }
  LacResult r;
  r.b_lac = 0.5 * (lo + hi);
  r.min_gap = gap(r.b_lac);
  const double edge = std::min(gap(b_lo), gap(b_hi));
  if (!(r.min_gap < edge)) {
    throw BracketingError("no interior gap minimum in [" + std::to_string(b_lo) + ", " +
                          std::to_string(b_hi) + "] G");
  }
  return r;
}

}  // namespace nvpair
