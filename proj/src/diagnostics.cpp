#include "pdncg/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pdncg/kernels.hpp"
#include "pdncg/random.hpp"

namespace pdncg {

bool DiagnosticReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void DiagnosticReport::merge(const DiagnosticReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::string DiagnosticReport::csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "name,passed,value,threshold,detail\n";
  for (const auto& c : checks) {
    std::string d = c.detail;
    for (auto& ch : d) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    os << c.name << ',' << (c.passed ? 1 : 0) << ',' << c.value << ',' << c.threshold << ',' << d << '\n';
  }
  return os.str();
}

std::string DiagnosticReport::text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  return os.str();
}

namespace {

double diff_norm_ratio(const Vector& a, const Vector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::string at(const IterationRecord& r) {
  return "stage " + std::to_string(r.stage) + " iter " + std::to_string(r.iter);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

double fd_step(std::span<const double> x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, kernels::norm_inf(x));
}

DerivativeErrors check_derivatives(const SmoothedObjective& obj, int trials, std::uint64_t seed,
                                   double point_scale) {
  const Index n = obj.n();
  if (n > 256) throw std::invalid_argument("check_derivatives is meant for n <= 256");
  Rng rng(seed);
  DerivativeErrors e;
  e.trials = trials;
  Vector xp(static_cast<std::size_t>(n));
  auto shifted = [&](const Vector& x, const Vector& v, double t) {
    for (std::size_t i = 0; i < x.size(); ++i) xp[i] = x[i] + t * v[i];
    return xp;
  };
  for (int t = 0; t < trials; ++t) {
    Vector x = rng.normal_vector(n);
    for (auto& v : x) v *= point_scale;
    // Unit max-norm direction, so h is the largest coordinate perturbation.
    Vector v = rng.normal_vector(n);
    const double vmax = kernels::norm_inf(v);
    for (auto& e : v) e /= vmax;
    const double h = fd_step(x);

    const Vector g = objective_grad(obj, x);
    Vector gfd(static_cast<std::size_t>(n));
    Vector ei(static_cast<std::size_t>(n), 0.0);
    for (Index i = 0; i < n; ++i) {
      ei[static_cast<std::size_t>(i)] = 1.0;
      const double fp = objective_value(obj, shifted(x, ei, h));
      const double fm = objective_value(obj, shifted(x, ei, -h));
      gfd[static_cast<std::size_t>(i)] = (fp - fm) / (2.0 * h);
      ei[static_cast<std::size_t>(i)] = 0.0;
    }
    e.grad_max_error = std::max(e.grad_max_error, diff_norm_ratio(gfd, g));

    const Vector hv = hess_f_matvec(obj, x, v);
    Vector hfd = objective_grad(obj, shifted(x, v, h));
    const Vector gm = objective_grad(obj, shifted(x, v, -h));
    for (std::size_t i = 0; i < hfd.size(); ++i) hfd[i] = (hfd[i] - gm[i]) / (2.0 * h);
    e.hess_max_error = std::max(e.hess_max_error, diff_norm_ratio(hfd, hv));
  }
  return e;
}

DiagnosticReport derivative_report(const DerivativeErrors& e, const std::string& label,
                                   double grad_tol, double hess_tol) {
  DiagnosticReport r;
  r.add({label + ".gradient", e.grad_max_error <= grad_tol, e.grad_max_error, grad_tol,
         "max relative error " + fmt(e.grad_max_error) + " over " + std::to_string(e.trials) + " trials"});
  r.add({label + ".hessian", e.hess_max_error <= hess_tol, e.hess_max_error, hess_tol,
         "max relative error " + fmt(e.hess_max_error) + " over " + std::to_string(e.trials) + " trials"});
  return r;
}

DiagnosticReport check_solver_invariants(const std::vector<IterationRecord>& trace,
                                         const std::vector<StateSnapshot>& snapshots,
                                         const InvariantOptions& opt) {
  DiagnosticReport rep;

  // Monotone objective within each stage, plus the sufficient-decrease bound
  // for accepted steps.
  {
    CheckResult c{"monotone_objective", true, 0.0, 0.0, "objective nonincreasing in every stage"};
    for (std::size_t k = 0; k < trace.size() && c.passed; ++k) {
      const auto& r = trace[k];
      if (!r.terminal && r.f_next > r.f) {
        c = {"monotone_objective", false, r.f_next - r.f, 0.0,
             "objective increased at " + at(r) + " by " + fmt(r.f_next - r.f)};
      } else if (k + 1 < trace.size() && trace[k + 1].stage == r.stage && trace[k + 1].f > r.f) {
        c = {"monotone_objective", false, trace[k + 1].f - r.f, 0.0,
             "objective increased after " + at(r)};
      }
    }
    rep.add(c);
  }
  {
    CheckResult c{"sufficient_decrease", true, 0.0, opt.tau2, "accepted steps satisfy the Armijo bound"};
    for (const auto& r : trace) {
      if (r.terminal || !r.accepted) continue;
      const double allowed = r.f - opt.tau2 * r.alpha * r.energy;
      if (r.f_next > allowed) {
        c = {"sufficient_decrease", false, r.f_next - allowed, opt.tau2,
             "Armijo bound violated at " + at(r)};
        break;
      }
    }
    rep.add(c);
  }
  {
    CheckResult c{"dual_box", true, 0.0, 1.0 + opt.box_tol, ""};
    double worst = 0.0;
    for (const auto& r : trace) {
      worst = std::max(worst, r.dual_inf_norm);
      if (c.passed && r.dual_inf_norm > 1.0 + opt.box_tol) {
        c.passed = false;
        c.detail = "||g||_inf = " + fmt(r.dual_inf_norm) + " at " + at(r);
      }
    }
    for (const auto& s : snapshots) {
      double m = 0.0;
      for (std::size_t i = 0; i < s.g_re.size(); ++i) m = std::max(m, std::hypot(s.g_re[i], s.g_im[i]));
      worst = std::max(worst, m);
      if (c.passed && m > 1.0 + opt.box_tol) {
        c.passed = false;
        c.detail = "||g||_inf = " + fmt(m) + " in snapshot at stage " + std::to_string(s.stage) +
                   " iter " + std::to_string(s.iter);
      }
    }
    c.value = worst;
    if (c.passed) c.detail = "max ||g||_inf = " + fmt(worst);
    rep.add(c);
  }
  {
    CheckResult c{"energy_identity", true, 0.0, opt.energy_tol, ""};
    double worst = 0.0;
    for (const auto& r : trace) {
      if (r.terminal) continue;
      const double err = std::abs(r.energy_explicit + r.grad_dot_dx) / std::max(1.0, std::abs(r.grad_dot_dx));
      worst = std::max(worst, err);
      if (c.passed && err > opt.energy_tol) {
        c.passed = false;
        c.detail = "relative mismatch " + fmt(err) + " at " + at(r);
      }
    }
    c.value = worst;
    if (c.passed) c.detail = "max relative mismatch " + fmt(worst);
    rep.add(c);
  }
  {
    CheckResult c{"pcg_stopping_rule", true, 0.0, 0.0, ""};
    double worst = 0.0;
    for (const auto& r : trace) {
      if (r.terminal) continue;
      worst = std::max(worst, r.pcg_rel_residual / r.eta);
      if (c.passed && r.pcg_rel_residual > r.eta + opt.pcg_slack) {
        c.passed = false;
        c.detail = "||B dx + grad|| / ||grad|| = " + fmt(r.pcg_rel_residual) + " > eta = " +
                   fmt(r.eta) + " at " + at(r);
      }
    }
    c.value = worst;
    c.threshold = 1.0;
    if (c.passed) c.detail = "max residual/eta = " + fmt(worst);
    rep.add(c);
  }
  return rep;
}

std::vector<double> rate_probe(const std::vector<IterationRecord>& trace, int last) {
  std::vector<double> ratios;
  if (trace.size() < 2) return ratios;
  const int stage = trace.back().stage;
  std::size_t start = trace.size() - 1;
  while (start > 0 && trace[start - 1].stage == stage) --start;
  for (std::size_t k = start; k + 1 < trace.size(); ++k) {
    ratios.push_back(trace[k].grad_norm > 0.0 ? trace[k + 1].grad_norm / trace[k].grad_norm : 0.0);
  }
  if (last > 0 && ratios.size() > static_cast<std::size_t>(last)) {
    ratios.erase(ratios.begin(), ratios.end() - last);
  }
  return ratios;
}

CheckResult superlinear_check(const std::vector<double>& ratios, double final_max) {
  CheckResult c{"superlinear_rate", false, 0.0, final_max, ""};
  if (ratios.size() < 3) {
    c.detail = "need at least 3 ratios, have " + std::to_string(ratios.size());
    return c;
  }
  const double r1 = ratios[ratios.size() - 3];
  const double r2 = ratios[ratios.size() - 2];
  const double r3 = ratios.back();
  c.value = r3;
  c.passed = r1 > r2 && r2 > r3 && r3 < final_max;
  c.detail = "final ratios " + fmt(r1) + ", " + fmt(r2) + ", " + fmt(r3);
  return c;
}

}  // namespace pdncg
