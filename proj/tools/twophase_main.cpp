// Command-line front end of the two-phase overdetermined torsion toolkit.
//
// Subcommands: critical-radii, bifurcation-scan, trace-branch, counterexample,
// verify-identities, selftest. Tables and curves are CSV (header row, 17
// significant digits); structured diagnostics are JSON (schema in README.md).
// Exit codes: 0 success, 2 validation error, 3 solver failure, 4 acceptance
// failure. Outputs are byte-identical across runs with the same configuration
// (including --seed); no timing or environment data is ever written to files.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "twophase/annulus.hpp"
#include "twophase/branch.hpp"
#include "twophase/ck.hpp"
#include "twophase/harmonics.hpp"
#include "twophase/identities.hpp"
#include "twophase/linearization.hpp"
#include "twophase/radial.hpp"
#include "twophase/selfcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAcceptance = 4;

using nlohmann::json;

/// 17 significant digits, "." decimal (C locale is never changed).
std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct RunConfig {
  int dim = 2;
  double sigma_c = 2.0;
  double rho = 0.5;
  int mode_k = 2;
  double t_max = 0.02;
  int steps = 10;
  double epsilon = -1.0;  // < 0: select automatically
  double gamma = std::numeric_limits<double>::quiet_NaN();  // NaN: mid-gap
  int angular_order = 64;
  int radial_order = 32;
  double tol = 1e-6;
  std::string out;
  unsigned seed = 12345;
  bool parallel = false;
  std::string config_path;
  // selftest hooks
  double mutate_transmission = 0.0;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + path);
  return f;
}

std::string sibling_path(const std::string& primary, const std::string& suffix) {
  std::filesystem::path p(primary);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + suffix);
  return out.string();
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream f = open_output(path);
  f << doc.dump(2) << "\n";
}

/// Runs body(i) for i in [0, n); with parallel=true the iterations are spread
/// over hardware threads (independent configurations only; outputs are
/// written by the caller afterwards, so ordering never changes).
void parallel_for(int n, bool parallel, const std::function<void(int)>& body) {
  if (!parallel || n < 2) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers =
      std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// critical-radii
// ---------------------------------------------------------------------------

int cmd_critical_radii(const RunConfig& cfg) {
  std::vector<int> dims = cfg.dim == 0 ? std::vector<int>{2, 3, 4} : std::vector<int>{cfg.dim};
  if (cfg.mode_k < 0) throw std::invalid_argument("--mode-k must be >= 0");

  struct Row {
    int dim, k;
    double closed = 0.0, root = 0.0, diff = 0.0, det_dr = 0.0;
    bool critical = false;
  };
  std::vector<Row> rows;
  for (int dim : dims)
    for (int k = 0; k <= cfg.mode_k; ++k) rows.push_back(Row{dim, k});

  parallel_for(static_cast<int>(rows.size()), cfg.parallel, [&](int i) {
    Row& row = rows[i];
    if (row.k < 2) return;  // no critical radius below mode 2
    row.closed = twophase::critical_radius(row.dim, row.k);
    row.root = twophase::critical_radius_bisection(row.dim, cfg.sigma_c, row.k);
    row.diff = std::abs(row.closed - row.root);
    row.det_dr = twophase::det_frechet_dR(row.dim, cfg.sigma_c, row.root, row.k);
    row.critical = true;
  });

  const std::string path = cfg.out.empty() ? "critical_radii.csv" : cfg.out;
  std::ofstream f = open_output(path);
  f << "dim,k,R_star_closed,R_star_root,abs_diff,det_dR_at_root,note\n";
  bool pass = true;
  for (const Row& row : rows) {
    if (!row.critical) {
      f << row.dim << "," << row.k << ",nan,nan,nan,nan,no critical radius\n";
      continue;
    }
    f << row.dim << "," << row.k << "," << num(row.closed) << "," << num(row.root) << ","
      << num(row.diff) << "," << num(row.det_dr) << ",\n";
    if (row.diff > 1e-9) pass = false;
  }
  for (int dim : dims) {
    double prev = 0.0;
    bool monotone = true;
    for (const Row& row : rows) {
      if (row.dim != dim || !row.critical) continue;
      if (row.closed <= prev) monotone = false;
      prev = row.closed;
    }
    std::cout << "dim " << dim << ": monotone across k>=2: " << (monotone ? "pass" : "FAIL")
              << "\n";
    if (!monotone) pass = false;
  }
  std::cout << "wrote " << path << " (" << rows.size() << " rows); closed-vs-root agreement: "
            << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// bifurcation-scan
// ---------------------------------------------------------------------------

int cmd_bifurcation_scan(const RunConfig& cfg) {
  if (cfg.dim < 2) throw std::invalid_argument("--dim must be >= 2");
  if (cfg.mode_k < 0) throw std::invalid_argument("--mode-k must be >= 0");
  if (cfg.steps < 2) throw std::invalid_argument("--steps must be >= 2");
  const int n_r = cfg.steps;
  const int n_k = cfg.mode_k + 1;
  std::vector<double> det(n_r * n_k), det_dr(n_r * n_k);
  parallel_for(n_k, cfg.parallel, [&](int k) {
    for (int i = 0; i < n_r; ++i) {
      const double R = 0.01 + (0.99 - 0.01) * i / (n_r - 1);
      det[k * n_r + i] = twophase::det_frechet(cfg.dim, cfg.sigma_c, R, k);
      det_dr[k * n_r + i] = twophase::det_frechet_dR(cfg.dim, cfg.sigma_c, R, k);
    }
  });

  const std::string path = cfg.out.empty() ? "bifurcation_scan.csv" : cfg.out;
  std::ofstream f = open_output(path);
  f << "dim,sigma_c,k,R,det_M,det_dR_M\n";
  for (int k = 0; k < n_k; ++k) {
    for (int i = 0; i < n_r; ++i) {
      const double R = 0.01 + (0.99 - 0.01) * i / (n_r - 1);
      f << cfg.dim << "," << num(cfg.sigma_c) << "," << k << "," << num(R) << ","
        << num(det[k * n_r + i]) << "," << num(det_dr[k * n_r + i]) << "\n";
    }
  }
  std::cout << "wrote " << path << " (" << n_r * n_k << " rows)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// trace-branch
// ---------------------------------------------------------------------------

int cmd_trace_branch(const RunConfig& cfg) {
  using namespace twophase;
  if (cfg.steps < 1) throw std::invalid_argument("--steps must be >= 1");
  if (!(cfg.t_max > 0.0)) throw std::invalid_argument("--t-max must be positive");
  const int k_star = cfg.mode_k;
  const double rho_star = critical_radius(cfg.dim, k_star);  // validates k >= 2
  const auto kernel = kernel_vector(cfg.dim, cfg.sigma_c, k_star);
  const double slope = kernel[1] / kernel[0];
  const int K = k_star + 10;
  NewtonOptions nopts;
  nopts.tol = cfg.tol;

  const std::string path = cfg.out.empty() ? "branch.csv" : cfg.out;
  const std::string boundary_path = sibling_path(path, "_boundary.csv");
  std::ofstream f = open_output(path);
  f << "t,rho,residual,xi_over_eta,asphericity\n";

  ZonalBasis basis(cfg.dim, K);
  const int n_profile = 721;
  auto oscillation = [&](const PerturbedAnnulus& d) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < n_profile; ++i) {
      const double th = std::numbers::pi * i / (n_profile - 1);
      double r = 1.0;
      for (int k = 0; k <= K; ++k) r += d.xi[k] * basis.shape(k, th);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return hi - lo;
  };
  auto emit = [&](const BranchPoint& p) {
    const double ratio = p.domain.xi[k_star] / p.domain.eta[k_star];
    f << num(p.t) << "," << num(p.domain.rho) << "," << num(p.residual_sup) << "," << num(ratio)
      << "," << num(oscillation(p.domain)) << "\n";
    f.flush();
  };
  auto write_boundary = [&](const PerturbedAnnulus& d) {
    std::ofstream b = open_output(boundary_path);
    b << "theta,r_inner,r_outer\n";
    for (int i = 0; i < n_profile; ++i) {
      const double th = std::numbers::pi * i / (n_profile - 1);
      double rin = d.rho, rout = 1.0;
      for (int k = 0; k <= K; ++k) {
        rin += d.eta[k] * basis.shape(k, th);
        rout += d.xi[k] * basis.shape(k, th);
      }
      b << num(th) << "," << num(rin) << "," << num(rout) << "\n";
    }
  };

  std::vector<BranchPoint> points;
  {
    BranchPoint p0;
    p0.t = 0.0;
    p0.domain = PerturbedAnnulus::trivial(cfg.dim, rho_star, K);
    const OverdetResidual res =
        overdet_residual(solve_dirichlet(p0.domain, cfg.sigma_c), p0.domain);
    p0.residual_sup = res.sup();
    points.push_back(std::move(p0));
    emit(points.back());
  }
  try {
    for (int j = 1; j <= cfg.steps; ++j) {
      const double t = cfg.t_max * j / cfg.steps;
      PerturbedAnnulus start = PerturbedAnnulus::trivial(cfg.dim, rho_star, K);
      start.eta[k_star] = t;
      start.xi[k_star] = t * slope;
      const size_t n = points.size();
      if (n >= 3) {
        const PerturbedAnnulus& a = points[n - 2].domain;
        const PerturbedAnnulus& b = points[n - 1].domain;
        const double w = (t - points[n - 1].t) / (points[n - 1].t - points[n - 2].t);
        for (int k = 0; k <= K; ++k) {
          start.eta[k] = b.eta[k] + w * (b.eta[k] - a.eta[k]);
          start.xi[k] = b.xi[k] + w * (b.xi[k] - a.xi[k]);
        }
        start.rho = b.rho + w * (b.rho - a.rho);
      } else if (n == 2) {
        const PerturbedAnnulus& b = points[1].domain;
        const double scale = t / points[1].t;
        for (int k = 0; k <= K; ++k) {
          start.eta[k] = b.eta[k] * scale;
          start.xi[k] = b.xi[k] * scale;
        }
        start.rho = b.rho;
      }
      points.push_back(newton_solve(start, cfg.sigma_c, k_star, t, nopts));
      emit(points.back());
    }
  } catch (const std::exception& e) {
    // Partial rows are already on disk; keep the last good boundary too.
    write_boundary(points.back().domain);
    std::cerr << "solver failure at step " << points.size() << " of " << cfg.steps + 1 << ": "
              << e.what() << "\n";
    std::cerr << "partial output in " << path << " and " << boundary_path << "\n";
    return kExitSolver;
  }

  write_boundary(points.back().domain);
  const BranchCertificates cert = verify_branch_point(points.back(), cfg.sigma_c);
  const double interface_cert = std::max(cert.dirichlet_sup, cert.flux_sup);
  const bool pass = interface_cert <= 1e-8 && cert.refined_residual_sup <= 2e-8 &&
                    cert.max_interior_u < 0.0;
  std::cout << "wrote " << path << " and " << boundary_path << "\n"
            << "final point: rho=" << num(points.back().domain.rho)
            << " residual=" << num(points.back().residual_sup)
            << " interface certificate=" << num(interface_cert)
            << " refined residual=" << num(cert.refined_residual_sup)
            << " max interior u=" << num(cert.max_interior_u) << "\n"
            << "certificates: " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// counterexample / verify-identities
// ---------------------------------------------------------------------------

twophase::CKConfig make_ck_config(const RunConfig& cfg) {
  twophase::CKConfig ck;
  ck.dim = cfg.dim;
  ck.sigma_c = cfg.sigma_c;
  ck.inclusion_radius = cfg.rho;
  if (cfg.epsilon >= 0.0) ck.epsilon = cfg.epsilon;
  if (!std::isnan(cfg.gamma)) ck.gamma = cfg.gamma;
  return ck;
}

json identity_json(const twophase::IdentityReport& rep) {
  return json{{"xi1", rep.xi1},
              {"deficit", rep.deficit},
              {"term_I", rep.term_i},
              {"term_II", rep.term_ii},
              {"term_III", rep.term_iii},
              {"residual", rep.residual},
              {"relative_residual", rep.relative_residual},
              {"interface_trace_gap", rep.interface_trace_gap},
              {"outer_trace_sup", rep.outer_trace_sup},
              {"min_minus_u", rep.min_minus_u},
              {"radial_refinement_delta", rep.refinement_delta}};
}

int cmd_counterexample(const RunConfig& cfg) {
  using namespace twophase;
  if (cfg.angular_order < 8) throw std::invalid_argument("--angular-order must be >= 8");
  const CKConfig ck = make_ck_config(cfg);
  const Counterexample cx = build_counterexample(ck, cfg.angular_order);

  const std::string path = cfg.out.empty() ? "counterexample.csv" : cfg.out;
  std::ofstream f = open_output(path);
  f << "theta,r\n";
  for (int i = 0; i < cx.boundary.size(); ++i)
    f << num(cx.boundary.theta[i]) << "," << num(cx.boundary.r[i]) << "\n";

  const TwoPhaseFrame frame =
      translate_to_identity_frame(cx.solution, cx.gamma, cx.outer_bracket, cfg.angular_order,
                                  std::max(512, cfg.angular_order));
  json identity = json::array();
  double worst_rel = 0.0;
  for (double xi1 : {0.0, 1.0, -0.3}) {
    const IdentityReport rep = verify_identity(frame, xi1, cfg.radial_order);
    worst_rel = std::max(worst_rel, rep.relative_residual);
    identity.push_back(identity_json(rep));
  }

  json doc{{"command", "counterexample"},
           {"dim", cx.solution.dim},
           {"sigma_c", cx.solution.sigma_c},
           {"inclusion_radius", cx.solution.inclusion_radius},
           {"epsilon", cx.solution.epsilon},
           {"gamma", cx.gamma},
           {"outer_bracket", cx.outer_bracket},
           {"angular_order", cfg.angular_order},
           {"radial_order", cfg.radial_order},
           {"modal_coefficients",
            {{"a0", cx.solution.a0}, {"a1", cx.solution.a1}, {"b1", cx.solution.b1}}},
           {"level_set",
            {{"sup_error", cx.level_sup_error},
             {"monotone_min_radial_derivative", cx.monotonicity.min_radial_derivative},
             {"gap_max_inner", cx.gap.max_inner},
             {"gap_min_outer", cx.gap.min_outer}}},
           {"outer_flux", {{"mean", cx.flux_mean}, {"std", cx.flux_std}}},
           {"asphericity",
            {{"about_origin", cx.asphericity_origin}, {"about_center", cx.asphericity_center}}},
           {"interior_radiality_std", cx.radiality_std},
           {"cauchy_glue",
            {{"value_gap", cx.cauchy_value_gap}, {"flux_gap", cx.cauchy_flux_gap}}},
           {"identity_checks", identity}};
  const std::string json_path = sibling_path(path, ".json");
  write_json(json_path, doc);

  const bool pass = worst_rel <= cfg.tol;
  std::cout << "wrote " << path << " and " << json_path << "\n"
            << "epsilon=" << num(cx.solution.epsilon) << " gamma=" << num(cx.gamma)
            << " flux std=" << num(cx.flux_std)
            << " asphericity(origin)=" << num(cx.asphericity_origin)
            << " identity residual(worst rel)=" << num(worst_rel) << "\n";
  if (!pass)
    std::cerr << "identity residual exceeds --tol " << num(cfg.tol) << "\n";
  return pass ? kExitOk : kExitAcceptance;
}

int cmd_verify_identities(const RunConfig& cfg) {
  using namespace twophase;
  if (cfg.angular_order < 8) throw std::invalid_argument("--angular-order must be >= 8");

  // Randomized closed-form cross-checks on offset balls.
  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_ii = 0.0, worst_iii = 0.0, worst_grad = 0.0, worst_surface = 0.0;
  const int draws = 50;
  for (int draw = 0; draw < draws; ++draw) {
    OffsetBallConfig ball;
    ball.dim = (draw % 2 == 0) ? 2 : 3;
    ball.z1 = -0.5 + 1.0 * unif(rng);
    ball.lambda = 1.0 + unif(rng);
    ball.sigma_c = 0.2 + 4.8 * unif(rng);
    const double xi1 = -1.0 + 2.0 * unif(rng);
    const AngularQuadrature quad = build_quadrature(ball.dim, 64);
    const double ii_c = term_II_closed(ball);
    const double iii_c = term_III_closed(ball, xi1);
    worst_ii = std::max(worst_ii,
                        std::abs(ii_c - term_II_quadrature(ball, quad)) /
                            std::max(std::abs(ii_c), 1e-14));
    worst_iii = std::max(worst_iii,
                         std::abs(iii_c - term_III_quadrature(ball, quad, xi1)) /
                             std::max(std::abs(iii_c), 1e-14));
    const double h = 1e-6;
    const double fd = (term_III_closed(ball, xi1 + h) - term_III_closed(ball, xi1 - h)) / (2 * h);
    const Eigen::VectorXd grad = grad_xi_III_closed(ball);
    worst_grad = std::max(worst_grad, std::abs(grad[0] - fd));
    worst_surface = std::max(
        worst_surface, (grad - grad_xi_III_surface(ball, quad)).cwiseAbs().maxCoeff());
  }

  // Full identity on the asymmetric level-set configuration.
  const CKConfig ck = make_ck_config(cfg);
  const Counterexample cx = build_counterexample(ck, std::max(cfg.angular_order, 64));
  const TwoPhaseFrame frame =
      translate_to_identity_frame(cx.solution, cx.gamma, cx.outer_bracket, cfg.angular_order,
                                  std::max(512, cfg.angular_order));
  json identity = json::array();
  double worst_rel = 0.0;
  for (double xi1 : {0.0, 1.0, -0.3}) {
    const IdentityReport rep = verify_identity(frame, xi1, cfg.radial_order);
    worst_rel = std::max(worst_rel, rep.relative_residual);
    identity.push_back(identity_json(rep));
  }

  const bool closed_ok = worst_ii <= 1e-10 && worst_iii <= 1e-10 && worst_grad <= 1e-8 &&
                         worst_surface <= 1e-10;
  const bool identity_ok = worst_rel <= cfg.tol;
  json doc{{"command", "verify-identities"},
           {"seed", cfg.seed},
           {"draws", draws},
           {"offset_ball",
            {{"worst_II_relative", worst_ii},
             {"worst_III_relative", worst_iii},
             {"worst_grad_vs_fd", worst_grad},
             {"worst_grad_vs_surface_form", worst_surface},
             {"pass", closed_ok}}},
           {"frame",
            {{"dim", cx.solution.dim},
             {"sigma_c", cx.solution.sigma_c},
             {"epsilon", cx.solution.epsilon},
             {"gamma", cx.gamma},
             {"angular_order", cfg.angular_order},
             {"radial_order", cfg.radial_order}}},
           {"identity_checks", identity},
           {"identity_pass", identity_ok}};
  const std::string path = cfg.out.empty() ? "identities.json" : cfg.out;
  write_json(path, doc);

  std::cout << "wrote " << path << "\n"
            << "offset-ball closed forms: " << (closed_ok ? "pass" : "FAIL")
            << " (worst II rel " << num(worst_ii) << ", III rel " << num(worst_iii) << ")\n"
            << "identity residual (worst rel over xi): " << num(worst_rel) << " -> "
            << (identity_ok ? "pass" : "FAIL") << "\n";
  return closed_ok && identity_ok ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

int cmd_selftest(const RunConfig& cfg, int angular_override) {
  twophase::SelftestOptions opts;
  opts.mutate_transmission = cfg.mutate_transmission;
  opts.angular_order_override = angular_override;
  const std::vector<twophase::CriterionResult> results = twophase::run_selftest(opts);
  double total = 0.0;
  for (const twophase::CriterionResult& r : results) {
    total += r.elapsed_s;
    std::printf("[%s] %2d %-48s (%.2fs)%s%s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.summary.c_str(), r.elapsed_s, r.details.empty() ? "" : "  ",
                r.details.c_str());
  }
  const bool pass = twophase::all_passed(results);
  std::printf("selftest: %s (%zu suites, %.1fs total)\n", pass ? "PASS" : "FAIL",
              results.size(), total);
  if (!cfg.out.empty()) {
    json doc = json::array();
    for (const twophase::CriterionResult& r : results)
      doc.push_back(json{{"id", r.id},
                         {"summary", r.summary},
                         {"pass", r.pass},
                         {"details", r.details}});
    write_json(cfg.out, json{{"command", "selftest"}, {"pass", pass}, {"suites", doc}});
  }
  return pass ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// configuration plumbing
// ---------------------------------------------------------------------------

std::string dashify(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

/// Expands --config file values into flag tokens inserted right after the
/// subcommand name, so explicitly passed flags (parsed later, TakeLast policy)
/// override them.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  size_t subcmd_pos = std::string::npos;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      path = a.substr(9);
    else if (subcmd_pos == std::string::npos && !a.empty() && a[0] != '-')
      subcmd_pos = i;
  }
  if (path.empty() || subcmd_pos == std::string::npos) return args;

  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config file: " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + path + ": " + e.what());
  }
  if (!doc.is_object())
    throw std::invalid_argument("config file " + path + ": top level must be an object");

  std::vector<std::string> expanded(args.begin(), args.begin() + subcmd_pos + 1);
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    const std::string flag = "--" + dashify(key);
    if (value.is_boolean()) {
      expanded.push_back(flag + (value.get<bool>() ? "=true" : "=false"));
    } else if (value.is_number_integer()) {
      expanded.push_back(flag + "=" + std::to_string(value.get<long long>()));
    } else if (value.is_number()) {
      expanded.push_back(flag + "=" + num(value.get<double>()));
    } else if (value.is_string()) {
      expanded.push_back(flag + "=" + value.get<std::string>());
    } else {
      throw std::invalid_argument("config key '" + key + "': unsupported value type");
    }
  }
  expanded.insert(expanded.end(), args.begin() + subcmd_pos + 1, args.end());
  return expanded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for the two-phase overdetermined torsion problem"};
  app.require_subcommand(1);

  RunConfig radii_cfg, scan_cfg, branch_cfg, ck_cfg, ident_cfg, self_cfg;
  radii_cfg.dim = 0;
  radii_cfg.mode_k = 8;
  scan_cfg.mode_k = 6;
  scan_cfg.steps = 200;
  branch_cfg.tol = 1e-9;
  ck_cfg.rho = 1.0;
  ck_cfg.angular_order = 256;
  ident_cfg.rho = 1.0;
  int selftest_angular_override = 0;

  auto add_option = [](CLI::App* sub, const std::string& name, auto& target,
                       const std::string& help) {
    return sub->add_option(name, target, help)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  auto add_config = [&](CLI::App* sub, RunConfig& cfg) {
    add_option(sub, "--config", cfg.config_path,
               "JSON config file; explicit flags override its values");
    add_option(sub, "--out", cfg.out, "output path (derived names for secondary files)");
  };

  CLI::App* radii = app.add_subcommand(
      "critical-radii", "bifurcation radii R*(k): closed form vs determinant root");
  add_option(radii, "--dim", radii_cfg.dim, "ambient dimension (0 = all of 2,3,4)");
  add_option(radii, "--sigma-c", radii_cfg.sigma_c, "inclusion conductivity");
  add_option(radii, "--mode-k", radii_cfg.mode_k, "largest harmonic degree");
  radii->add_flag("--parallel", radii_cfg.parallel, "parallel sweep over rows");
  add_config(radii, radii_cfg);

  CLI::App* scan =
      app.add_subcommand("bifurcation-scan", "det M(R, k) heatmap data over R in [0.01, 0.99]");
  add_option(scan, "--dim", scan_cfg.dim, "ambient dimension");
  add_option(scan, "--sigma-c", scan_cfg.sigma_c, "inclusion conductivity");
  add_option(scan, "--mode-k", scan_cfg.mode_k, "largest harmonic degree");
  add_option(scan, "--steps", scan_cfg.steps, "radius samples per mode");
  scan->add_flag("--parallel", scan_cfg.parallel, "parallel sweep over modes");
  add_config(scan, scan_cfg);

  CLI::App* branch = app.add_subcommand(
      "trace-branch", "continue the non-radial branch pinned at mode k*");
  add_option(branch, "--dim", branch_cfg.dim, "ambient dimension (2 or 3)");
  add_option(branch, "--sigma-c", branch_cfg.sigma_c, "inclusion conductivity");
  add_option(branch, "--mode-k", branch_cfg.mode_k, "bifurcation mode k* (>= 2)");
  add_option(branch, "--t-max", branch_cfg.t_max, "final pinned amplitude");
  add_option(branch, "--steps", branch_cfg.steps, "continuation steps");
  add_option(branch, "--tol", branch_cfg.tol, "Newton residual tolerance");
  add_config(branch, branch_cfg);

  CLI::App* counter = app.add_subcommand(
      "counterexample", "asymmetric level-set domain from the exterior Cauchy solution");
  add_option(counter, "--dim", ck_cfg.dim, "ambient dimension (2 or 3)");
  add_option(counter, "--sigma-c", ck_cfg.sigma_c, "inclusion conductivity");
  add_option(counter, "--rho", ck_cfg.rho, "inclusion radius R");
  add_option(counter, "--epsilon", ck_cfg.epsilon, "center offset (< 0: select automatically)");
  add_option(counter, "--gamma", ck_cfg.gamma, "level value (default: middle of the gap)");
  add_option(counter, "--angular-order", ck_cfg.angular_order, "boundary sample count");
  add_option(counter, "--radial-order", ck_cfg.radial_order, "radial quadrature order");
  add_option(counter, "--tol", ck_cfg.tol, "identity residual acceptance threshold");
  add_config(counter, ck_cfg);

  CLI::App* ident = app.add_subcommand(
      "verify-identities", "integral identity and offset-ball closed-form checks");
  add_option(ident, "--dim", ident_cfg.dim, "ambient dimension of the level-set frame");
  add_option(ident, "--sigma-c", ident_cfg.sigma_c, "inclusion conductivity");
  add_option(ident, "--rho", ident_cfg.rho, "inclusion radius R");
  add_option(ident, "--epsilon", ident_cfg.epsilon, "center offset (< 0: select automatically)");
  add_option(ident, "--gamma", ident_cfg.gamma, "level value (default: middle of the gap)");
  add_option(ident, "--angular-order", ident_cfg.angular_order, "identity frame resolution");
  add_option(ident, "--radial-order", ident_cfg.radial_order, "radial quadrature order");
  add_option(ident, "--tol", ident_cfg.tol, "identity residual acceptance threshold");
  add_option(ident, "--seed", ident_cfg.seed, "RNG seed for the randomized draws");
  add_config(ident, ident_cfg);

  CLI::App* self = app.add_subcommand("selftest", "acceptance criteria and invariant suites");
  add_option(self, "--mutate-transmission", self_cfg.mutate_transmission,
             "test hook: perturb the transmission constant (nonzero must fail)");
  add_option(self, "--angular-order", selftest_angular_override,
             "test hook: override the orthonormality quadrature order (0 = documented default)");
  add_config(self, self_cfg);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (radii->parsed()) return cmd_critical_radii(radii_cfg);
    if (scan->parsed()) return cmd_bifurcation_scan(scan_cfg);
    if (branch->parsed()) return cmd_trace_branch(branch_cfg);
    if (counter->parsed()) return cmd_counterexample(ck_cfg);
    if (ident->parsed()) return cmd_verify_identities(ident_cfg);
    if (self->parsed()) return cmd_selftest(self_cfg, selftest_angular_override);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const twophase::NewtonFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
