#include "csr/diffnum/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "csr/error.hpp"

namespace csr::diffnum {

std::vector<std::vector<double>> central_differences(ParamStore& store,
                                                     const LossVector& losses,
                                                     double h) {
  const std::size_t total = store.scalar_count();
  std::vector<std::vector<double>> out;
  std::size_t flat = 0;
  for (Parameter& p : store.params()) {
    for (std::size_t i = 0; i < p.value.size(); ++i, ++flat) {
      const double saved = p.value[i];
      p.value[i] = saved + h;
      const std::vector<double> plus = losses(store);
      p.value[i] = saved - h;
      const std::vector<double> minus = losses(store);
      p.value[i] = saved;
      if (out.empty()) out.assign(plus.size(), std::vector<double>(total, 0.0));
      if (plus.size() != out.size() || minus.size() != out.size()) {
        throw UsageError("central_differences: loss vector length changed");
      }
      for (std::size_t l = 0; l < plus.size(); ++l) out[l][flat] = (plus[l] - minus[l]) / (2.0 * h);
    }
  }
  return out;
}

std::vector<double> flatten_gradients(const ParamStore& store) {
  std::vector<double> g;
  g.reserve(store.scalar_count());
  for (const Parameter& p : store.params()) {
    g.insert(g.end(), p.grad.values().begin(), p.grad.values().end());
  }
  return g;
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport compare_gradients(const ParamStore& store,
                                  const std::vector<double>& analytic,
                                  const std::vector<double>& numeric, double floor) {
  if (analytic.size() != numeric.size() || analytic.size() != store.scalar_count()) {
    throw UsageError("compare_gradients: length mismatch");
  }
  GradCheckReport report;
  std::size_t flat = 0;
  for (const Parameter& p : store.params()) {
    for (std::size_t i = 0; i < p.value.size(); ++i, ++flat) {
      const double err = relative_error(analytic[flat], numeric[flat], floor);
      ++report.checked;
      if (!(err <= report.max_rel_error)) {
        report.max_rel_error = err;
        report.worst_param = p.name;
        report.worst_offset = i;
        report.worst_analytic = analytic[flat];
        report.worst_numeric = numeric[flat];
      }
    }
  }
  return report;
}

}  // namespace csr::diffnum
