#include "nlhelm/inverse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "nlhelm/errors.hpp"
#include "nlhelm/kernels.hpp"

namespace nlhelm {

void InverseConfig::validate() const {
  if (K == 0) throw InputError("inverse config field 'K': must be at least 1");
  if (!(interval.beta > interval.alpha)) throw InputError("inverse config field 'interval': need beta > alpha");
  if (ridge < 0.0) throw InputError("inverse config field 'ridge': must be non-negative");
  if (rings.kind == RingSelection::Kind::radius_range && !(rings.r_max >= rings.r_min)) {
    throw InputError("inverse config field 'rings': r_max < r_min");
  }
}

namespace {

// Error-free difference: a - b = s + e exactly.
void two_diff(double a, double b, double& s, double& e) {
  s = a - b;
  const double bb = a - s;
  e = (a - (s + bb)) + (bb - b);
}

// (hi + lo) / h as an unevaluated sum, using the exact FMA remainder.
void div_dd(double hi, double lo, double h, double& q, double& q_lo) {
  q = hi / h;
  const double rem = std::fma(-q, h, hi);
  q_lo = (rem + lo) / h;
}

// Same formula as the three-point stencil, written as a difference of divided
// differences carried in double-double so that cancellation at small spacing
// costs nothing beyond the rounding of the inputs.
double second_difference(double ym, double y0, double yp, double hm, double hp) {
  double sp, ep, sm, em;
  two_diff(yp, y0, sp, ep);
  two_diff(y0, ym, sm, em);
  double dp, dp_lo, dm, dm_lo;
  div_dd(sp, ep, hp, dp, dp_lo);
  div_dd(sm, em, hm, dm, dm_lo);
  double s, e;
  two_diff(dp, dm, s, e);
  return 2.0 * (s + (e + (dp_lo - dm_lo))) / (hp + hm);
}

}  // namespace

cdouble second_derivative_nonuniform(cdouble y_minus, cdouble y_0, cdouble y_plus, double h_minus,
                                     double h_plus) {
  if (!(h_minus > 0.0) || !(h_plus > 0.0)) {
    throw DomainError("second_derivative_nonuniform: spacings must be positive");
  }
  return {second_difference(y_minus.real(), y_0.real(), y_plus.real(), h_minus, h_plus),
          second_difference(y_minus.imag(), y_0.imag(), y_plus.imag(), h_minus, h_plus)};
}

std::vector<cdouble> recover_F_ell(const RingSamples& ring, double k, const RadialProfile& nu,
                                   const RadialProfile& eps) {
  const auto& r = ring.r;
  if (!(r[0] < r[1] && r[1] < r[2])) throw DomainError("recover_F_ell: radii must be increasing");
  const double e = eps(r[1]);
  if (e == 0.0) throw DomainError("recover_F_ell: eps(r) = 0, the nonlinear term cannot be recovered");
  const std::size_t m = ring.u[1].size();
  if (ring.u[0].size() != m || ring.u[2].size() != m) {
    throw DomainError("recover_F_ell: coefficient series of unequal length");
  }
  const double h_minus = r[1] - r[0];
  const double h_plus = r[2] - r[1];
  const double k2nu = k * k * nu(r[1]);
  std::vector<cdouble> out(m);
  for (std::size_t l = 0; l < m; ++l) {
    const double ld = static_cast<double>(l);
    const double lambda = ld * (ld + 1.0);
    const cdouble y2 = second_derivative_nonuniform(r[0] * ring.u[0][l], r[1] * ring.u[1][l],
                                                    r[2] * ring.u[2][l], h_minus, h_plus);
    const cdouble u = ring.u[1][l];
    out[l] = -2.0 / ((2.0 * ld + 1.0) * e) * (y2 / r[1] - lambda / (r[1] * r[1]) * u + k2nu * u);
  }
  return out;
}

RingSamples ring_from_field_samples(const std::array<double, 3>& r,
                                    const std::array<std::vector<cdouble>, 3>& samples,
                                    const QuadratureRule& rule, std::size_t n) {
  RingSamples ring;
  ring.r = r;
  for (std::size_t i = 0; i < 3; ++i) ring.u[i] = project(samples[i], rule, n);
  return ring;
}

std::size_t design_table_degree(std::size_t n, const InverseConfig& cfg) {
  const std::size_t rows = cfg.L_max == 0 ? n : std::min(cfg.L_max, n);
  return std::max((cfg.K > 0 ? cfg.K - 1 : 0) * 2 * n, rows + n);
}

Eigen::MatrixXcd design_matrix(const LegSeries& u, const InverseConfig& cfg, const GammaTable& table) {
  const std::size_t n = u.degree();
  const std::size_t rows = (cfg.L_max == 0 ? n : std::min(cfg.L_max, n)) + 1;
  if (design_table_degree(n, cfg) > table.max_degree()) {
    throw TableTooSmall("design_matrix: needs Gamma table degree " +
                        std::to_string(design_table_degree(n, cfg)) + ", have " +
                        std::to_string(table.max_degree()));
  }
  LegSeries d = star_convolve(u, cfg.intensity == IntensityMode::modulus ? u.conj() : u, table);
  if (cfg.intensity == IntensityMode::modulus) {
    for (auto& c : d.coeffs()) c = {c.real(), 0.0};
  }
  const LegSeries g = normalize_intensity(d, cfg.interval);
  const auto ladder = chebyshev_ladder(g, cfg.K, table);
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cfg.K));
  for (std::size_t k = 0; k < cfg.K; ++k) {
    const LegSeries c = star_convolve_truncated(ladder[k], u, table, rows - 1);
    for (std::size_t l = 0; l < rows; ++l) {
      m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) =
          2.0 * c[l] / (2.0 * static_cast<double>(l) + 1.0);
    }
  }
  return m;
}

RingSolve solve_ring(std::span<const cdouble> f_values, const Eigen::MatrixXcd& m, const InverseConfig& cfg) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (static_cast<Eigen::Index>(f_values.size()) < rows) {
    throw DomainError("solve_ring: " + std::to_string(f_values.size()) + " values for " +
                      std::to_string(rows) + " rows");
  }
  const bool ridge = cfg.ridge > 0.0;
  Eigen::MatrixXd a(2 * rows + (ridge ? cols : 0), cols);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
  a.topRows(rows) = m.real();
  a.middleRows(rows, rows) = m.imag();
  for (Eigen::Index i = 0; i < rows; ++i) {
    b(i) = f_values[static_cast<std::size_t>(i)].real();
    b(rows + i) = f_values[static_cast<std::size_t>(i)].imag();
  }
  if (ridge) a.bottomRows(cols) = std::sqrt(cfg.ridge) * Eigen::MatrixXd::Identity(cols, cols);

  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd x = cod.solve(b);

  RingSolve out;
  out.a.assign(x.data(), x.data() + x.size());
  out.rank = static_cast<std::size_t>(cod.rank());
  out.residual_norm = (a.topRows(2 * rows) * x - b.head(2 * rows)).norm();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.topRows(2 * rows));
  const auto& sv = svd.singularValues();
  const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  out.condition_estimate = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  return out;
}

namespace {

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NLHELM_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
    }
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

std::vector<std::size_t> selected_rings(const Trajectory& traj, const RingSelection& sel) {
  std::vector<std::size_t> idx;
  const std::size_t count = traj.r.size();
  if (count < 3) return idx;
  switch (sel.kind) {
    case RingSelection::Kind::all_interior:
      for (std::size_t j = 1; j + 1 < count; ++j) idx.push_back(j);
      break;
    case RingSelection::Kind::indices:
      for (std::size_t j : sel.indices) {
        if (j >= 1 && j + 1 < count) idx.push_back(j);
      }
      break;
    case RingSelection::Kind::radius_range:
      for (std::size_t j = 1; j + 1 < count; ++j) {
        if (traj.r[j] >= sel.r_min && traj.r[j] <= sel.r_max) idx.push_back(j);
      }
      break;
  }
  return idx;
}

}  // namespace

InverseResult invert(const Trajectory& traj, const InverseConfig& cfg) {
  cfg.validate();
  if (traj.r.size() < 3) throw DomainError("invert: no interior rings (trajectory has fewer than 3 points)");
  const auto rings = selected_rings(traj, cfg.rings);
  if (rings.empty()) throw DomainError("invert: no interior rings selected");

  const std::size_t n = traj.N();
  const GammaTable table = build_gamma_table(design_table_degree(n, cfg));
  const auto& phys = traj.config;

  InverseResult result;
  result.rings.resize(rings.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < rings.size(); i = next++) {
      try {
        const std::size_t j = rings[i];
        RingSamples ring;
        for (std::size_t s = 0; s < 3; ++s) {
          ring.r[s] = traj.r[j - 1 + s];
          ring.u[s] = traj.coefficients(j - 1 + s);
        }
        const auto f = recover_F_ell(ring, phys.k, phys.nu, phys.eps);
        const auto m = design_matrix(ring.u[1], cfg, table);
        auto solved = solve_ring(f, m, cfg);
        auto& rec = result.rings[i];
        rec.index = j;
        rec.r = traj.r[j];
        rec.a = std::move(solved.a);
        rec.residual_norm = solved.residual_norm;
        rec.condition_estimate = solved.condition_estimate;
        rec.rank = solved.rank;
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t workers = worker_count(cfg.threads, rings.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

Interval estimate_bounds(const Trajectory& traj, std::size_t t_grid_size) {
  if (traj.r.empty()) throw DomainError("estimate_bounds: empty trajectory");
  const QuadratureRule rule = gauss_legendre(std::max<std::size_t>(t_grid_size, 1));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<double> s(rule.size());
  for (std::size_t j = 0; j < traj.r.size(); ++j) {
    const auto field = field_at(traj, j, rule.nodes);
    kernels::abs2(field, s);
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-8) {
    lo -= 1e-8;
    hi += 1e-8;
  }
  const double margin = 0.01 * (hi - lo);
  return {lo - margin, hi + margin};
}

}  // namespace nlhelm
