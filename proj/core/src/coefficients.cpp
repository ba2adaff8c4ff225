#include "execlab/coefficients.hpp"

#include "execlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

namespace execlab {

namespace {

constexpr double kGridTolerance = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void fnv1a(std::uint64_t& h, double v) {
  unsigned char bytes[sizeof(double)];
  std::memcpy(bytes, &v, sizeof(double));
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
}

}  // namespace

CoefficientModel CoefficientModel::build(std::vector<CoefficientPiece> pieces, double gamma0,
                                         double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ModelError("horizon T must be positive and finite");
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
    throw ModelError("gamma0 must be positive and finite");
  if (pieces.empty()) throw ModelError("at least one coefficient piece is required");
  if (pieces.front().t_from != 0.0) throw ModelError("the first piece must start at t = 0");
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (!(pieces[i].t_from > pieces[i - 1].t_from))
      throw ModelError("piece start times must be strictly increasing");
    if (!(pieces[i].t_from < horizon))
      throw ModelError("piece start times must lie in [0, T)");
  }

  ConditionReport report;
  report.epsilon = std::numeric_limits<double>::infinity();
  for (const auto& p : pieces) {
    if (!std::isfinite(p.rho) || !std::isfinite(p.mu) || !std::isfinite(p.sigma))
      throw ModelError("coefficients must be finite");
    const double margin = Coefficients{p.rho, p.mu, p.sigma}.margin();
    if (!(margin > 0.0)) {
      std::ostringstream msg;
      msg << "condition 2*rho + mu - sigma^2 > 0 violated on piece starting at t = "
          << p.t_from << " (value " << margin << ")";
      throw ModelError(msg.str());
    }
    report.epsilon = std::min(report.epsilon, margin);
    report.rho_bound = std::max(report.rho_bound, std::abs(p.rho));
    report.mu_bound = std::max(report.mu_bound, std::abs(p.mu));
    report.sigma2_bound = std::max(report.sigma2_bound, p.sigma * p.sigma);
  }
  // Finitely many finite pieces: both properties follow from positivity.
  report.positive = true;
  report.uniformly_positive = true;
  report.bounded = true;

  CoefficientModel model;
  model.horizon_ = horizon;
  model.gamma0_ = gamma0;
  model.pieces_ = std::move(pieces);
  model.conditions_ = report;
  return model;
}

CoefficientModel CoefficientModel::constant(double rho, double mu, double sigma, double gamma0,
                                            double horizon) {
  return build({{0.0, rho, mu, sigma}}, gamma0, horizon);
}

CoefficientModel build_model(std::vector<CoefficientPiece> pieces, double gamma0,
                             double horizon) {
  return CoefficientModel::build(std::move(pieces), gamma0, horizon);
}

std::vector<double> CoefficientModel::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < pieces_.size(); ++i) out.push_back(pieces_[i].t_from);
  return out;
}

std::size_t CoefficientModel::piece_index(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double v, const CoefficientPiece& p) { return v < p.t_from; });
  if (it == pieces_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(pieces_.begin(), it)) - 1;
}

Coefficients CoefficientModel::at(double t) const {
  const auto& p = pieces_[piece_index(t)];
  return {p.rho, p.mu, p.sigma};
}

Coefficients CoefficientModel::on_interval(double a, double b) const {
  return at(0.5 * (a + b));
}

template <typename Value>
double CoefficientModel::integrate(double a, double b, Value value) const {
  if (b < a) return -integrate(b, a, value);
  double total = 0.0;
  for (std::size_t i = piece_index(a); i < pieces_.size(); ++i) {
    const double lo = std::max(a, pieces_[i].t_from);
    const double hi = (i + 1 < pieces_.size()) ? std::min(b, pieces_[i + 1].t_from) : b;
    if (hi > lo) total += value(pieces_[i]) * (hi - lo);
    if (i + 1 < pieces_.size() && pieces_[i + 1].t_from >= b) break;
  }
  return total;
}

double CoefficientModel::integrate_rho(double a, double b) const {
  return integrate(a, b, [](const CoefficientPiece& p) { return p.rho; });
}

double CoefficientModel::integrate_mu(double a, double b) const {
  return integrate(a, b, [](const CoefficientPiece& p) { return p.mu; });
}

double CoefficientModel::integrate_sigma2(double a, double b) const {
  return integrate(a, b, [](const CoefficientPiece& p) { return p.sigma * p.sigma; });
}

bool CoefficientModel::sigma_vanishes() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const CoefficientPiece& p) { return p.sigma == 0.0; });
}

bool CoefficientModel::rho_vanishes() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const CoefficientPiece& p) { return p.rho == 0.0; });
}

std::string CoefficientModel::hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  fnv1a(h, horizon_);
  fnv1a(h, gamma0_);
  for (const auto& p : pieces_) {
    fnv1a(h, p.t_from);
    fnv1a(h, p.rho);
    fnv1a(h, p.mu);
    fnv1a(h, p.sigma);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------

TimeGrid::TimeGrid(double t0, double t_end, std::size_t n_steps)
    : t0_(t0), t_end_(t_end), n_steps_(n_steps), h_(0.0) {
  if (n_steps == 0) throw ModelError("a time grid needs at least one step");
  if (!(t_end > t0)) throw ModelError("a time grid needs t_end > t0");
  h_ = (t_end - t0) / static_cast<double>(n_steps);
}

TimeGrid TimeGrid::with_step(double horizon, double h) {
  if (!(h > 0.0)) throw ModelError("grid step must be positive");
  const double ratio = horizon / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > kGridTolerance * std::max(1.0, n))
    throw ModelError("T / h must be a positive integer");
  return uniform(horizon, static_cast<std::size_t>(n));
}

bool TimeGrid::contains_point(double t) const {
  const double pos = (t - t0_) / h_;
  const double k = std::round(pos);
  return k >= 0.0 && k <= static_cast<double>(n_steps_) &&
         std::abs(pos - k) <= kGridTolerance * std::max(1.0, k);
}

std::size_t TimeGrid::index_of(double t) const {
  if (!contains_point(t)) {
    std::ostringstream msg;
    msg << "time " << t << " is not a grid point";
    throw ModelError(msg.str());
  }
  return static_cast<std::size_t>(std::round((t - t0_) / h_));
}

TimeGrid TimeGrid::tail(std::size_t k) const {
  if (k >= n_steps_) throw ModelError("tail grid must keep at least one step");
  return {time(k), t_end_, n_steps_ - k};
}

void require_aligned(const TimeGrid& grid, const CoefficientModel& model) {
  if (std::abs(grid.t_end() - model.horizon()) > kGridTolerance * model.horizon())
    throw ModelError("grid must end at the model horizon T");
  if (grid.t0() < 0.0) throw ModelError("grid must start inside [0, T]");
  for (double b : model.breakpoints()) {
    if (b <= grid.t0()) continue;
    if (!grid.contains_point(b)) {
      std::ostringstream msg;
      msg << "model breakpoint t = " << b << " is not a grid point (h = " << grid.step() << ")";
      throw ModelError(msg.str());
    }
  }
}

std::vector<Coefficients> step_coefficients(const CoefficientModel& model,
                                            const TimeGrid& grid) {
  std::vector<Coefficients> out(grid.n_steps());
  const auto& pieces = model.pieces();
  std::size_t idx = 0;
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const double mid = 0.5 * (grid.time(k) + grid.time(k + 1));
    while (idx + 1 < pieces.size() && pieces[idx + 1].t_from <= mid) ++idx;
    out[k] = {pieces[idx].rho, pieces[idx].mu, pieces[idx].sigma};
  }
  return out;
}

// ---------------------------------------------------------------------------

MarketPath MarketPath::tail(std::size_t k) const {
  MarketPath out;
  out.grid = grid.tail(k);
  out.dw.assign(dw.begin() + static_cast<std::ptrdiff_t>(k), dw.end());
  out.w.resize(w.size() - k);
  for (std::size_t i = 0; i < out.w.size(); ++i) out.w[i] = w[k + i] - w[k];
  out.gamma.assign(gamma.begin() + static_cast<std::ptrdiff_t>(k), gamma.end());
  out.alpha.assign(alpha.begin() + static_cast<std::ptrdiff_t>(k), alpha.end());
  out.path_id = path_id;
  out.seed = seed;
  return out;
}

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_id) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(path_id + 0x632BE59BD9B4E019ULL));
}

MarketPath simulate_path(const CoefficientModel& model, const TimeGrid& grid,
                         std::uint64_t master_seed, std::uint64_t path_id) {
  require_aligned(grid, model);
  const std::size_t n = grid.n_steps();
  const double h = grid.step();
  const double sqrt_h = std::sqrt(h);

  MarketPath path{grid, {}, {}, {}, {}, path_id, path_seed(master_seed, path_id)};
  path.dw.resize(n);
  path.w.resize(n + 1);
  path.gamma.resize(n + 1);
  path.alpha.resize(n + 1);

  std::mt19937_64 engine(path.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  double log_gamma = std::log(model.gamma0());
  path.w[0] = 0.0;
  path.gamma[0] = model.gamma0();
  path.alpha[0] = 1.0 / model.gamma0();
  const auto& pieces = model.pieces();
  std::size_t idx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double mid = 0.5 * (grid.time(k) + grid.time(k + 1));
    while (idx + 1 < pieces.size() && pieces[idx + 1].t_from <= mid) ++idx;
    const CoefficientPiece& c = pieces[idx];
    const double dw = sqrt_h * normal(engine);
    path.dw[k] = dw;
    path.w[k + 1] = path.w[k] + dw;
    log_gamma += (c.mu - 0.5 * c.sigma * c.sigma) * h + c.sigma * dw;
    path.gamma[k + 1] = std::exp(log_gamma);
    path.alpha[k + 1] = 1.0 / path.gamma[k + 1];
  }
  return path;
}

std::vector<MarketPath> simulate_market(const CoefficientModel& model, const TimeGrid& grid,
                                        std::size_t n_paths, std::uint64_t master_seed) {
  if (n_paths == 0) throw ModelError("n_paths must be at least 1");
  require_aligned(grid, model);
  std::vector<MarketPath> paths(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    paths[i] = simulate_path(model, grid, master_seed, static_cast<std::uint64_t>(i));
  });
  return paths;
}

std::vector<double> stochastic_exponential(std::span<const double> q_increments,
                                           std::span<const double> q_quadratic) {
  if (q_increments.size() != q_quadratic.size())
    throw ModelError("Q increments and quadratic-variation increments differ in length");
  std::vector<double> out(q_increments.size() + 1);
  double log_value = 0.0;
  out[0] = 1.0;
  for (std::size_t k = 0; k < q_increments.size(); ++k) {
    log_value += q_increments[k] - 0.5 * q_quadratic[k];
    out[k + 1] = std::exp(log_value);
  }
  return out;
}

}  // namespace execlab
