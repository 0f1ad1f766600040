#include "lassoggm/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lassoggm {

double kl_loss(const SymMatrix& truth, const SymMatrix& est) {
  if (truth.rows() != est.rows()) throw std::invalid_argument("kl_loss: dimension mismatch");
  const SymMatrix est_inv = inverse_pd(est);
  const double tr = truth.cwiseProduct(est_inv).sum();
  // log|Omega Est^{-1}| = log|Omega| - log|Est|
  const double ld = log_det_pd(truth) - log_det_pd(est);
  return tr - ld - static_cast<double>(truth.rows());
}

ConfusionCounts confusion(const Adjacency& truth, const Adjacency& est) {
  if (truth.rows() != est.rows()) throw std::invalid_argument("confusion: dimension mismatch");
  ConfusionCounts c;
  const Index p = truth.rows();
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const bool t = truth(i, j) != 0;
      const bool e = est(i, j) != 0;
      if (t && e) ++c.tp;
      else if (!t && !e) ++c.tn;
      else if (e) ++c.fp;
      else ++c.fn;
    }
  }
  return c;
}

namespace {
double ratio(long num, long den) {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                  : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double den = (tn + fp) * (tp + fn) * (tp + fp) * (tn + fn);
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (tn * tp - fp * fn) / std::sqrt(den);
}

double sensitivity(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }
double specificity(const ConfusionCounts& c) { return ratio(c.tn, c.tn + c.fp); }
double false_positive_rate(const ConfusionCounts& c) { return ratio(c.fp, c.fp + c.tn); }
double false_negative_rate(const ConfusionCounts& c) { return ratio(c.fn, c.fn + c.tp); }

SymMatrix partial_correlation(const SymMatrix& m) {
  const Vector d = m.diagonal().array().sqrt().inverse();
  SymMatrix out = -(d.asDiagonal() * m * d.asDiagonal());
  out.diagonal().setOnes();
  return out;
}

Adjacency threshold_edges(const SymMatrix& precision, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("threshold_edges: threshold must be nonnegative");
  const SymMatrix pc = partial_correlation(precision);
  const Index p = pc.rows();
  Adjacency a = Adjacency::Identity(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) a(i, j) = a(j, i) = std::abs(pc(i, j)) > t ? 1 : 0;
  }
  return a;
}

Adjacency support(const SymMatrix& precision) { return threshold_edges(precision, 0.0); }

double predictive_squared_error(const Matrix& pred, const Matrix& actual) {
  if (pred.rows() != actual.rows() || pred.cols() != actual.cols()) {
    throw std::invalid_argument("predictive_squared_error: shape mismatch");
  }
  if (pred.size() == 0) return 0.0;
  return (pred - actual).squaredNorm() / static_cast<double>(pred.size());
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: size mismatch");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra;
  std::map<int, double> rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto c2 = [](double x) { return 0.5 * x * (x - 1.0); };
  double sum_ij = 0.0;
  for (const auto& [k, v] : joint) sum_ij += c2(v);
  double sum_a = 0.0;
  for (const auto& [k, v] : ra) sum_a += c2(v);
  double sum_b = 0.0;
  for (const auto& [k, v] : rb) sum_b += c2(v);
  const double expected = sum_a * sum_b / c2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both trivial partitions
  return (sum_ij - expected) / (max_index - expected);
}

}  // namespace lassoggm
