#include "uzawa/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uzawa/csr.hpp"
#include "uzawa/problems.hpp"
#include "uzawa/theory.hpp"

namespace uzawa {
namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& v, const std::string& key, int line) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail_at(line, "bad number '" + v + "' for " + key);
  }
  if (pos != v.size()) fail_at(line, "bad number '" + v + "' for " + key);
  return out;
}

int parse_int(const std::string& v, const std::string& key, int line) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    fail_at(line, "bad integer '" + v + "' for " + key);
  }
  if (pos != v.size()) fail_at(line, "bad integer '" + v + "' for " + key);
  return out;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    fail_at(line, "bad seed '" + v + "' for " + key);
  }
  if (pos != v.size()) fail_at(line, "bad seed '" + v + "' for " + key);
  return out;
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail_at(line, "bad boolean '" + v + "' for " + key);
}

void apply_key(RunSpec& s, const std::string& key, const std::string& val, int line) {
  if (key == "problem")
    s.problem = val;
  else if (key == "n")
    s.n = parse_int(val, key, line);
  else if (key == "m")
    s.m = parse_int(val, key, line);
  else if (key == "nu")
    s.nu = parse_double(val, key, line);
  else if (key == "beta")
    s.beta = parse_double(val, key, line);
  else if (key == "b")
    s.b = parse_double(val, key, line);
  else if (key == "mu")
    s.mu = parse_double(val, key, line);
  else if (key == "eps")
    s.eps = parse_double(val, key, line);
  else if (key == "seed")
    s.seed = parse_u64(val, key, line);
  else if (key == "ahat")
    s.ahat = val;
  else if (key == "shat")
    s.shat = val;
  else if (key == "variant")
    s.variant = val;
  else if (key == "theta") {
    if (val == "adaptive")
      s.theta_adaptive = true;
    else
      s.theta = parse_double(val, key, line);
  } else if (key == "tol")
    s.tol = parse_double(val, key, line);
  else if (key == "stop")
    s.stop = val;
  else if (key == "stop_relative")
    s.stop_relative = parse_bool(val, key, line);
  else if (key == "max_iters")
    s.max_iters = parse_int(val, key, line);
  else if (key == "x0")
    s.x0 = val;
  else if (key == "y0")
    s.y0 = val;
  else if (key == "history")
    s.history = val;
  else if (key == "inner_tol")
    s.inner_tol = parse_double(val, key, line);
  else if (key == "inner_maxit")
    s.inner_maxit = parse_int(val, key, line);
  else
    fail_at(line, "unknown key '" + key + "'");
}

// Suffix grammar for parameterized devices: name:VALUE.
bool split_suffix(const std::string& s, const std::string& prefix, double* out) {
  if (s.rfind(prefix + ":", 0) != 0) return false;
  const std::string tail = s.substr(prefix.size() + 1);
  std::size_t pos = 0;
  try {
    *out = std::stod(tail, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == tail.size();
}

PrecondPtr parse_ahat_device(const std::string& name, const SparseMatrix& A) {
  if (name == "jacobi") return make_jacobi(A);
  if (name == "ic0") return make_ic0(A);
  if (name == "exact") return make_exact(A);
  double droptol = 0.0;
  if (split_suffix(name, "ict", &droptol)) return make_ict(A, droptol);
  throw std::invalid_argument("config: unknown ahat device '" + name + "'");
}

SaddleProblem build_problem(const RunSpec& s) {
  if (s.problem == "elasticity") return gen_elasticity(s.n, s.mu);
  if (s.problem == "convection") return gen_convection(s.n, s.b, s.mu);
  if (s.problem == "stokes") return gen_stokes_q1p0(s.n, s.nu, s.beta);
  if (s.problem == "algebraic") return gen_algebraic(s.n, s.m);
  if (s.problem == "qp") return gen_random_qp(s.n, s.m, s.eps, s.seed);
  throw std::invalid_argument("config: unknown problem '" + s.problem + "'");
}

PrecondPtr parse_shat_device(const RunSpec& s, const SaddleProblem& P, const PrecondPtr& ahat) {
  if (s.shat == "identity-plus-D") return make_schur_identity_plus_d(P.D);
  if (s.shat == "pressure-mass") {
    require(P.h > 0.0, "config: pressure-mass needs a grid problem");
    return make_schur_pressure_mass(P.m(), P.h);
  }
  double c = 0.0;
  if (split_suffix(s.shat, "scaled-identity", &c)) return make_scaled_identity(P.m(), c);
  if (s.shat == "diag-H" || s.shat == "exact-H") {
    require(ahat->linear(), "config: " + s.shat + " needs a linear ahat device");
    const int m = P.m();
    if (s.shat == "diag-H") {
      Vector d(static_cast<std::size_t>(m), 0.0);
      Vector e(static_cast<std::size_t>(m), 0.0);
      for (int j = 0; j < m; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        const Vector bj = matvec(P.B, e);
        d[static_cast<std::size_t>(j)] = dot(bj, ahat->apply(bj)) + P.D.at(j, j);
        e[static_cast<std::size_t>(j)] = 0.0;
      }
      return make_jacobi_vector(std::move(d), "diag-H");
    }
    require(m <= 2000, "config: exact-H is limited to m <= 2000");
    DenseMatrix H(m, m);
    Vector e(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
      e[static_cast<std::size_t>(j)] = 1.0;
      const Vector col =
          axpy(1.0, matvec_transpose(P.B, ahat->apply(matvec(P.B, e))), matvec(P.D, e));
      for (int i = 0; i < m; ++i) H.at(i, j) = col[static_cast<std::size_t>(i)];
      e[static_cast<std::size_t>(j)] = 0.0;
    }
    return make_exact_dense(std::move(H), "exact-H");
  }
  throw std::invalid_argument("config: unknown shat device '" + s.shat + "'");
}

Vector parse_y0(const RunSpec& s, int m) {
  if (s.y0 == "zeros" || s.y0.empty()) return {};
  if (s.y0.rfind("uniform:", 0) == 0) {
    const std::uint64_t seed = parse_u64(s.y0.substr(8), "y0", 0);
    return Rng(seed).uniform_vector(m);
  }
  throw std::invalid_argument("config: unknown y0 '" + s.y0 + "'");
}

}  // namespace

std::vector<RunSpec> parse_config_text(const std::string& text) {
  std::vector<RunSpec> specs;
  RunSpec cur;
  bool open = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) {
      if (open) specs.push_back(std::move(cur));
      cur = RunSpec{};
      open = false;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail_at(line, "expected key=value, got '" + s + "'");
    apply_key(cur, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
    open = true;
  }
  if (open) specs.push_back(std::move(cur));
  require(!specs.empty(), "config: no runs found");
  return specs;
}

std::vector<RunSpec> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string describe(const RunSpec& s) {
  std::ostringstream os;
  os << s.problem;
  if (s.n > 0) os << " n=" << s.n;
  if (s.problem == "algebraic" || s.problem == "qp") os << " m=" << s.m;
  if (s.problem == "stokes") os << " nu=" << s.nu;
  if (s.problem == "convection") os << " b=" << s.b;
  os << " " << s.variant << " ahat=" << s.ahat << " shat=" << s.shat << " theta=";
  if (s.theta_adaptive)
    os << "adaptive";
  else
    os << s.theta;
  return os.str();
}

RunOutcome execute_run(const RunSpec& spec) {
  const SaddleProblem P = build_problem(spec);
  const bool nonsym = spec.variant == "nonsymmetric";
  const SparseMatrix base = nonsym ? symmetric_part(P.A) : P.A;
  const PrecondPtr ahat = parse_ahat_device(spec.ahat, base);
  const PrecondPtr shat = parse_shat_device(spec, P, ahat);

  UzawaConfig cfg;
  if (spec.theta_adaptive) {
    require(spec.variant == "alg1" || nonsym,
            "config: theta=adaptive needs a linear ahat variant (alg1 or nonsymmetric)");
    cfg.theta.adaptive = true;
    cfg.theta.lambda_hat = lambda_hat_estimate(base, ahat, 30, spec.seed).lambda_min;
  } else {
    cfg.theta.value = spec.theta;
  }
  StopRule rule;
  if (spec.stop == "stacked")
    rule.kind = StopKind::Stacked;
  else if (spec.stop == "max")
    rule.kind = StopKind::MaxComponent;
  else
    throw std::invalid_argument("config: unknown stop '" + spec.stop + "'");
  rule.tol = spec.tol;
  rule.relative = spec.stop_relative;
  cfg.stops = {rule};
  cfg.max_iters = spec.max_iters;
  if (spec.x0 == "ones")
    cfg.x0.assign(static_cast<std::size_t>(P.n()), 1.0);
  else
    require(spec.x0 == "zeros" || spec.x0.empty(), "config: unknown x0 '" + spec.x0 + "'");
  cfg.y0 = parse_y0(spec, P.m());

  RunOutcome out;
  out.label = describe(spec);
  if (spec.variant == "alg1") {
    out.report = solve_alg1(P, ahat, shat, cfg);
  } else if (spec.variant == "alg2") {
    const SparseMatrix& A = P.A;
    const PrecondPtr psi_a =
        make_pcg_nonlinear([&A](const Vector& v) { return matvec(A, v); }, P.n(), ahat,
                           spec.inner_tol, spec.inner_maxit, "pcg[A;" + spec.ahat + "]");
    out.report = solve_alg2(P, psi_a, shat, cfg);
  } else if (spec.variant == "alg3") {
    const SparseMatrix& B = P.B;
    const SparseMatrix& D = P.D;
    const LinOp hop = [&B, &D, ahat](const Vector& v) {
      return axpy(1.0, matvec_transpose(B, ahat->apply(matvec(B, v))), matvec(D, v));
    };
    const PrecondPtr psi_h = make_pcg_nonlinear(hop, P.m(), shat, spec.inner_tol,
                                                spec.inner_maxit, "pcg[H;" + spec.shat + "]");
    out.report = solve_alg3(P, ahat, psi_h, cfg);
  } else if (nonsym) {
    out.report = solve_nonsymmetric(P, ahat, shat, cfg);
  } else {
    throw std::invalid_argument("config: unknown variant '" + spec.variant + "'");
  }
  if (!spec.history.empty()) write_history_csv(spec.history, out.report);
  return out;
}

void export_problem_selector(const std::string& selector, const std::string& dir) {
  RunSpec s;
  const std::size_t colon = selector.find(':');
  s.problem = selector.substr(0, colon);
  if (colon != std::string::npos) {
    std::istringstream in(selector.substr(colon + 1));
    std::string part;
    while (std::getline(in, part, ',')) {
      const std::size_t eq = part.find('=');
      require(eq != std::string::npos, "selector: expected key=value, got '" + part + "'");
      const std::string key = trim(part.substr(0, eq));
      require(key == "n" || key == "m" || key == "nu" || key == "beta" || key == "b" ||
                  key == "mu" || key == "eps" || key == "seed",
              "selector: key '" + key + "' is not a problem parameter");
      apply_key(s, key, trim(part.substr(eq + 1)), 0);
    }
  }
  export_problem(build_problem(s), s.problem, dir);
}

}  // namespace uzawa
