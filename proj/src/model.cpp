#include "rdsim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rdsim {
namespace {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on the Legendre recurrence.  Order 64 resolves every bin integral
// here to machine precision (the integrand is smooth inside each bin).
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// int_a^b w^m J(w) dw for m = 0 (weight) or m = 1 (first moment).  Bins from
// the logarithmic grid can span several decades, so integrate in v = ln(w)
// where the integrand w^(m+1) J(w) is analytic with mild derivatives; 64
// nodes then give machine precision for every bin.
double bin_integral(const BathSpec& bath, double a, double b, int m) {
  static const GaussRule rule = gauss_legendre(64);
  const double la = std::log(a), lb = std::log(b);
  const double mid = 0.5 * (la + lb);
  const double half = 0.5 * (lb - la);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double w = std::exp(mid + half * rule.x[i]);
    const double f = w * spectral_density(bath, w);
    acc += rule.w[i] * (m == 0 ? f : w * f);
  }
  return half * acc;
}

void validate_bath(const BathSpec& bath) {
  if (bath.alpha < 0.0) throw std::runtime_error("ERROR: bath alpha must be >= 0");
  if (bath.s <= 0.0) throw std::runtime_error("ERROR: bath exponent s must be > 0");
  if (bath.omega_c <= 0.0) throw std::runtime_error("ERROR: bath omega_c must be > 0");
  if (bath.n_modes < 0) throw std::runtime_error("ERROR: bath n_modes must be >= 0");
  if (bath.alpha > 0.0 && bath.n_modes == 0)
    throw std::runtime_error("ERROR: a coupled bath (alpha > 0) needs n_modes >= 1");
  if (bath.n_modes > 0) {
    const double lo = bath.omega_min_factor * bath.omega_c;
    if (!(bath.omega_max > lo))
      throw std::runtime_error("ERROR: bath omega_max must exceed the lower grid edge");
  }
}

DiscretizedBath from_edges(const BathSpec& bath, std::vector<double> edges,
                           const std::vector<double>* centers) {
  DiscretizedBath out;
  const int n = static_cast<int>(edges.size()) - 1;
  out.omega.resize(n);
  out.phi.resize(n);
  for (int k = 0; k < n; ++k) {
    const double weight = bin_integral(bath, edges[k], edges[k + 1], 0);
    const double moment = bin_integral(bath, edges[k], edges[k + 1], 1);
    if (!(weight > 0.0))
      throw std::runtime_error("ERROR: bath bin " + std::to_string(k + 1) +
                               " carries no spectral weight");
    out.phi[k] = std::sqrt(weight);
    out.omega[k] = centers ? (*centers)[k] : moment / weight;
  }
  out.edges = std::move(edges);
  return out;
}

}  // namespace

double DrivingField::value(double t) const {
  return amplitude * std::cos(frequency * t + phase);
}

double spectral_density(const BathSpec& bath, double w) {
  if (w <= 0.0) return 0.0;
  return 2.0 * bath.alpha * std::pow(bath.omega_c, 1.0 - bath.s) * std::pow(w, bath.s) *
         std::exp(-w / bath.omega_c);
}

DiscretizedBath discretize_bath(const BathSpec& bath) {
  validate_bath(bath);
  if (bath.n_modes == 0) return {};
  const int n = bath.n_modes;
  const double lo = bath.omega_min_factor * bath.omega_c;
  const double ratio = std::pow(lo / bath.omega_max, 1.0 / n);
  std::vector<double> edges(n + 1);
  for (int i = 0; i <= n; ++i) edges[i] = bath.omega_max * std::pow(ratio, n - i);
  edges.front() = lo;  // pin against pow() rounding
  edges.back() = bath.omega_max;
  return from_edges(bath, std::move(edges), nullptr);
}

DiscretizedBath discretize_bath_at(const BathSpec& bath, const std::vector<double>& centers) {
  validate_bath(bath);
  if (centers.empty()) return {};
  if (static_cast<int>(centers.size()) != bath.n_modes)
    throw std::runtime_error("ERROR: hand-placed bath modes must match n_modes");
  const double lo = bath.omega_min_factor * bath.omega_c;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (!(centers[k] > lo && centers[k] < bath.omega_max))
      throw std::runtime_error("ERROR: bath mode frequency " + std::to_string(centers[k]) +
                               " lies outside the discretized band");
    if (k > 0 && !(centers[k] > centers[k - 1]))
      throw std::runtime_error("ERROR: hand-placed bath modes must be strictly ascending");
  }
  std::vector<double> edges(centers.size() + 1);
  edges.front() = lo;
  edges.back() = bath.omega_max;
  for (std::size_t k = 1; k < centers.size(); ++k)
    edges[k] = 0.5 * (centers[k - 1] + centers[k]);
  return from_edges(bath, std::move(edges), &centers);
}

void validate(const ModelSpec& model) {
  if (model.omega_L <= 0.0 || model.omega_R <= 0.0)
    throw std::runtime_error("ERROR: resonator frequencies must be > 0");
  if (model.drive_L.frequency < 0.0 || model.drive_R.frequency < 0.0)
    throw std::runtime_error("ERROR: driving frequencies must be >= 0");
  validate_bath(model.bath);
}

}  // namespace rdsim
