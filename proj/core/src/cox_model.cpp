#include "coxsvrg/cox_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coxsvrg {

namespace {

void check_theta(const SurvivalDataset& data, std::span<const double> theta) {
  if (theta.size() != data.n_features())
    throw std::invalid_argument("theta length does not match feature count");
  for (double v : theta)
    if (!std::isfinite(v)) throw std::invalid_argument("theta must be finite");
}

// Walks order[0..p_limit] accumulating the stabilized sums
//   s2 = sum_q exp(z_q - c),   s1 = sum_q x_q exp(z_q - c)
// under a running max shift c, recording z_q into products, and calls
// emit(f, s1, s2, c) at every failure ordinal whose prefix ends at the
// current position (ordinals arrive in increasing order). Charges exactly
// p_limit + 1 inner products.
template <typename Emit>
void prefix_sweep(const SurvivalDataset& data, const RiskSetIndex& idx,
                  std::span<const double> theta, std::size_t p_limit,
                  InnerProductLedger& ledger, std::vector<double>& products,
                  Emit&& emit) {
  const std::size_t d = data.n_features();
  products.resize(p_limit + 1);
  std::vector<double> s1(d, 0.0);
  double s2 = 0.0;
  double c = -std::numeric_limits<double>::infinity();

  std::size_t f = 0;
  const std::size_t n_fail = idx.n_failures();
  for (std::size_t p = 0; p <= p_limit; ++p) {
    const std::size_t patient = idx.patient_at(p);
    const std::span<const double> x = data.row(patient);
    const double z = feature_product(data, patient, theta, ledger);
    products[p] = z;
    if (z > c) {
      if (s2 > 0.0) {
        const double rescale = std::exp(c - z);
        s2 *= rescale;
        for (std::size_t k = 0; k < d; ++k) s1[k] *= rescale;
      }
      c = z;
    }
    const double w = std::exp(z - c);
    s2 += w;
    for (std::size_t k = 0; k < d; ++k) s1[k] += w * x[k];
    while (f < n_fail && idx.failure_prefix_end(f) == p) {
      emit(f, s1, s2, c);
      ++f;
    }
  }
}

}  // namespace

double feature_product(const SurvivalDataset& data, std::size_t patient,
                       std::span<const double> v, InnerProductLedger& ledger) {
  const std::span<const double> x = data.row(patient);
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) acc += x[k] * v[k];
  ledger.charge();
  return acc;
}

std::vector<double> softmax_weights(const SurvivalDataset& data, const RiskSetIndex& idx,
                                    std::size_t f, std::span<const double> theta,
                                    InnerProductLedger& ledger) {
  check_theta(data, theta);
  const std::size_t size = idx.risk_size(f);
  std::vector<double> products(size);
  for (std::size_t p = 0; p < size; ++p)
    products[p] = feature_product(data, idx.patient_at(p), theta, ledger);
  return softmax_weights_from_products(idx, f, products);
}

std::vector<double> softmax_weights_from_products(const RiskSetIndex& idx, std::size_t f,
                                                  std::span<const double> products) {
  const std::size_t size = idx.risk_size(f);
  if (products.size() < size)
    throw std::invalid_argument("softmax_weights: not enough products for the risk set");
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < size; ++p) c = std::max(c, products[p]);
  std::vector<double> w(size);
  double total = 0.0;
  for (std::size_t p = 0; p < size; ++p) {
    w[p] = std::exp(products[p] - c);
    total += w[p];
  }
  for (std::size_t p = 0; p < size; ++p) w[p] /= total;
  return w;
}

std::vector<double> subfunction_gradient(const SurvivalDataset& data,
                                         const RiskSetIndex& idx, std::size_t f,
                                         std::span<const double> theta,
                                         InnerProductLedger& ledger) {
  check_theta(data, theta);
  const std::size_t d = data.n_features();
  std::vector<double> grad(d, 0.0);
  std::vector<double> products;
  prefix_sweep(data, idx, theta, idx.failure_prefix_end(f), ledger, products,
               [&](std::size_t g, const std::vector<double>& s1, double s2, double) {
                 if (g != f) return;
                 const std::span<const double> xi = data.row(idx.failure_patient(f));
                 for (std::size_t k = 0; k < d; ++k) grad[k] = -xi[k] + s1[k] / s2;
               });
  return grad;
}

double neg_partial_loglik(const SurvivalDataset& data, const RiskSetIndex& idx,
                          std::span<const double> theta, InnerProductLedger& ledger) {
  check_theta(data, theta);
  double total = 0.0;
  std::vector<double> products;
  prefix_sweep(data, idx, theta, idx.n_active() - 1, ledger, products,
               [&](std::size_t f, const std::vector<double>&, double s2, double c) {
                 const double zi = products[idx.failure_position(f)];
                 total += -zi + std::log(s2) + c;
               });
  return total / static_cast<double>(idx.n_failures());
}

std::vector<double> full_gradient(const SurvivalDataset& data, const RiskSetIndex& idx,
                                  std::span<const double> theta,
                                  InnerProductLedger& ledger) {
  std::vector<double> grad;
  loglik_and_gradient(data, idx, theta, grad, ledger);
  return grad;
}

double loglik_and_gradient(const SurvivalDataset& data, const RiskSetIndex& idx,
                           std::span<const double> theta, std::vector<double>& grad,
                           InnerProductLedger& ledger) {
  check_theta(data, theta);
  const std::size_t d = data.n_features();
  const double n = static_cast<double>(idx.n_failures());
  grad.assign(d, 0.0);
  double total = 0.0;
  std::vector<double> products;
  prefix_sweep(data, idx, theta, idx.n_active() - 1, ledger, products,
               [&](std::size_t f, const std::vector<double>& s1, double s2, double c) {
                 const std::span<const double> xi = data.row(idx.failure_patient(f));
                 for (std::size_t k = 0; k < d; ++k) grad[k] += -xi[k] + s1[k] / s2;
                 total += -products[idx.failure_position(f)] + std::log(s2) + c;
               });
  for (std::size_t k = 0; k < d; ++k) grad[k] /= n;
  return total / n;
}

std::vector<double> minibatch_gradient(const SurvivalDataset& data,
                                       const RiskSetIndex& idx,
                                       std::span<const std::size_t> batch,
                                       std::span<const double> theta,
                                       InnerProductLedger& ledger) {
  check_theta(data, theta);
  if (batch.empty()) throw std::invalid_argument("minibatch_gradient: empty batch");
  const std::size_t d = data.n_features();
  std::size_t p_max = 0;
  for (std::size_t f : batch) {
    if (f >= idx.n_failures())
      throw std::invalid_argument("minibatch_gradient: failure ordinal out of range");
    p_max = std::max(p_max, idx.failure_prefix_end(f));
  }
  // in_batch[f] counts multiplicity so callers passing sets and the solver's
  // without-replacement batches both work.
  std::vector<std::uint32_t> in_batch(idx.n_failures(), 0);
  for (std::size_t f : batch) ++in_batch[f];

  std::vector<double> grad(d, 0.0);
  std::vector<double> products;
  prefix_sweep(data, idx, theta, p_max, ledger, products,
               [&](std::size_t f, const std::vector<double>& s1, double s2, double) {
                 if (!in_batch[f]) return;
                 const double mult = in_batch[f];
                 const std::span<const double> xi = data.row(idx.failure_patient(f));
                 for (std::size_t k = 0; k < d; ++k)
                   grad[k] += mult * (-xi[k] + s1[k] / s2);
               });
  const double b = static_cast<double>(batch.size());
  for (std::size_t k = 0; k < d; ++k) grad[k] /= b;
  return grad;
}

PhaseCache::PhaseCache(const SurvivalDataset& data, const RiskSetIndex& idx,
                       std::vector<double> anchor, InnerProductLedger& ledger)
    : idx_(&idx), dim_(data.n_features()), anchor_(std::move(anchor)) {
  check_theta(data, anchor_);
  const std::size_t n_active = idx.n_active();
  const std::size_t n_fail = idx.n_failures();
  subgradients_.assign(n_fail * dim_, 0.0);
  full_gradient_.assign(dim_, 0.0);

  prefix_sweep(data, idx, anchor_, n_active - 1, ledger, products_,
               [&](std::size_t f, const std::vector<double>& s1, double s2, double c) {
                 const std::span<const double> xi = data.row(idx.failure_patient(f));
                 double* g = subgradients_.data() + f * dim_;
                 for (std::size_t k = 0; k < dim_; ++k) g[k] = -xi[k] + s1[k] / s2;
                 loglik_ += -products_[idx.failure_position(f)] + std::log(s2) + c;
               });
  loglik_ /= static_cast<double>(n_fail);
  for (std::size_t f = 0; f < n_fail; ++f) {
    const double* g = subgradients_.data() + f * dim_;
    for (std::size_t k = 0; k < dim_; ++k) full_gradient_[k] += g[k];
  }
  for (std::size_t k = 0; k < dim_; ++k)
    full_gradient_[k] /= static_cast<double>(n_fail);

  // Weights under one global shift so any prefix shares one cumulative array.
  double c = -std::numeric_limits<double>::infinity();
  for (double z : products_) c = std::max(c, z);
  weights_.resize(n_active);
  prefix_sums_.resize(n_active);
  double run = 0.0;
  for (std::size_t p = 0; p < n_active; ++p) {
    weights_[p] = std::exp(products_[p] - c);
    run += weights_[p];
    prefix_sums_[p] = run;
  }
}

std::size_t PhaseCache::sample_anchor_softmax(std::size_t f, Rng& rng) const {
  const std::size_t p_end = idx_->failure_prefix_end(f);
  const double total = prefix_sums_[p_end];
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error("anchor softmax sampling: degenerate prefix weights");
  const double target = rng.uniform01() * total;
  const auto first = prefix_sums_.begin();
  std::size_t pos = static_cast<std::size_t>(
      std::upper_bound(first, first + p_end + 1, target) - first);
  if (pos > p_end) pos = p_end;
  return pos;
}

}  // namespace coxsvrg
