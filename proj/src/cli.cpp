#include "affq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "affq/error.hpp"
#include "affq/halfosc.hpp"
#include "affq/io.hpp"
#include "affq/phase_space.hpp"
#include "affq/verify.hpp"

namespace affq::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- observable grammar

enum class Tok { Number, Q, P, QP, Plus, Minus, Star, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  double value = 0.0;
  std::string text;
  int column = 0;  ///< 1-based
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s.c_str() + i;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) throw SyntaxError("malformed number", col);
      const std::size_t len = static_cast<std::size_t>(end - begin);
      out.push_back({Tok::Number, v, s.substr(i, len), col});
      i += len;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      const std::string word = s.substr(i, j - i);
      if (word == "q") out.push_back({Tok::Q, 0.0, word, col});
      else if (word == "p") out.push_back({Tok::P, 0.0, word, col});
      else if (word == "qp") out.push_back({Tok::QP, 0.0, word, col});
      else throw SyntaxError("unknown symbol '" + word + "'", col);
      i = j;
    } else {
      Tok k;
      switch (c) {
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '*': k = Tok::Star; break;
        case '^': k = Tok::Caret; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        default: throw SyntaxError(std::string("unexpected character '") + c + "'", col);
      }
      out.push_back({k, 0.0, std::string(1, c), col});
      ++i;
    }
  }
  out.push_back({Tok::End, 0.0, "", static_cast<int>(s.size()) + 1});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

  MonomialSum parse() {
    MonomialSum sum;
    double sign = 1.0;
    if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) sign = next().kind == Tok::Minus ? -1.0 : 1.0;
    sum.terms.push_back(term(sign));
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      sign = next().kind == Tok::Minus ? -1.0 : 1.0;
      sum.terms.push_back(term(sign));
    }
    if (peek().kind != Tok::End) throw SyntaxError("expected '+', '-' or '*' but found '" + peek().text + "'", peek().column);
    return sum;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  MonomialTerm term(double sign) {
    MonomialTerm t{sign, 0.0, 0};
    factor(t);
    while (peek().kind == Tok::Star) {
      next();
      factor(t);
    }
    return t;
  }

  void factor(MonomialTerm& t) {
    const Token& tok = next();
    switch (tok.kind) {
      case Tok::Number:
        t.coeff *= tok.value;
        return;
      case Tok::QP:
        t.beta += 1.0;
        t.n += 1;
        return;
      case Tok::Q:
        t.beta += peek().kind == Tok::Caret ? (next(), real_exponent()) : 1.0;
        return;
      case Tok::P: {
        if (peek().kind != Tok::Caret) {
          t.n += 1;
          return;
        }
        next();
        const Token& e = peek();
        const double v = real_exponent();
        if (v < 0.0 || v != std::floor(v)) throw SyntaxError("momentum power must be a non-negative integer", e.column);
        if (v > kMaxMomentumPower)
          throw SyntaxError("momentum power " + e.text + " exceeds the supported maximum " + std::to_string(kMaxMomentumPower),
                            e.column);
        t.n += static_cast<int>(v);
        if (t.n > kMaxMomentumPower)
          throw SyntaxError("total momentum power exceeds " + std::to_string(kMaxMomentumPower), e.column);
        return;
      }
      default:
        throw SyntaxError(tok.kind == Tok::End ? "unexpected end of input" : "expected a number, q, p or qp but found '" + tok.text + "'",
                          tok.column);
    }
  }

  // [-]number or ([-]number).
  double real_exponent() {
    const bool paren = peek().kind == Tok::LParen;
    if (paren) next();
    double sign = 1.0;
    if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) sign = next().kind == Tok::Minus ? -1.0 : 1.0;
    const Token& tok = next();
    if (tok.kind != Tok::Number)
      throw SyntaxError(tok.kind == Tok::End ? "expected an exponent" : "expected an exponent but found '" + tok.text + "'", tok.column);
    if (paren) {
      const Token& r = next();
      if (r.kind != Tok::RParen) throw SyntaxError("expected ')'", r.column);
    }
    return sign * tok.value;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- helpers

class UsageError : public Error {
 public:
  using Error::Error;
};

BasisSpec basis_of(const RunConfig& c) {
  const BasisSpec b{c.effective_basis_alpha(), c.n_max};
  b.validate();
  return b;
}

Weight weight_of(const RunConfig& c) {
  if (c.weight == "aw") return builtin(AwSpec{});
  if (c.weight == "acs") return builtin(AcsSpec{basis_state(BasisSpec{c.alpha, 3}, 0)});
  if (c.weight == "thermal") return builtin(ThermalSpec{c.alpha, c.t});
  throw UsageError("unknown weight '" + c.weight + "' (expected aw, acs or thermal)");
}

WaveFunction state_of(const RunConfig& c) {
  const auto colon = c.state.find(':');
  if (colon == std::string::npos) throw UsageError("state must be halfosc:N or laguerre:K (got '" + c.state + "')");
  const std::string kind = c.state.substr(0, colon);
  int k = 0;
  try {
    std::size_t used = 0;
    k = std::stoi(c.state.substr(colon + 1), &used);
    if (used != c.state.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("state index must be an integer (got '" + c.state + "')");
  }
  if (kind == "halfosc") return halfosc::eigenstate_analytic(k).phi;
  if (kind == "laguerre") {
    if (k < 0) throw UsageError("laguerre state index must be >= 0");
    return basis_state(BasisSpec{c.effective_basis_alpha(), std::max(k, 1)}, k);
  }
  throw UsageError("unknown state kind '" + kind + "' (expected halfosc or laguerre)");
}

PhaseSpaceGrid grid_of(const RunConfig& c) {
  return PhaseSpaceGrid::make(c.qmin, c.qmax, c.nq, c.pmin, c.pmax, c.np);
}

io::json config_json(const RunConfig& c) {
  return {{"weight", c.weight}, {"alpha", c.alpha},   {"basis-alpha", c.effective_basis_alpha()},
          {"n-max", c.n_max},   {"t", c.t},           {"n-terms", c.n_terms},
          {"f", c.f},           {"state", c.state},   {"fid-alpha", c.fid_alpha},
          {"q", c.q},           {"p", c.p},           {"qmin", c.qmin},
          {"qmax", c.qmax},     {"nq", c.nq},         {"pmin", c.pmin},
          {"pmax", c.pmax},     {"np", c.np},         {"method", c.method},
          {"n", c.n},           {"emit", c.emit}};
}

io::Manifest make_manifest(const RunConfig& c, const std::string& command, const io::json& tolerances) {
  io::Manifest m(c.out);
  m.meta()["program"] = "affq";
  m.meta()["version"] = kVersion;
  m.meta()["command"] = command;
  m.meta()["config"] = config_json(c);
  m.meta()["tolerances"] = tolerances;
  return m;
}

std::string fmt(double v) { return io::format_double(v); }

std::string matrix_csv(const Eigen::MatrixXcd& m) {
  std::string s = "m,n,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      s += std::to_string(i) + "," + std::to_string(j) + "," + fmt(m(i, j).real()) + "," + fmt(m(i, j).imag()) + "\n";
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------- subcommands

int cmd_repr(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-10);
  const auto b = basis_of(c);
  const GroupElement g(c.q, c.p);
  const auto u = matrix_u(b, g);
  double worst_col = 0.0;
  for (Eigen::Index k = 0; k < u.entries.cols(); ++k) worst_col = std::max(worst_col, u.entries.col(k).norm());
  // Unitarity identity U_mn(g^-1) = conj U_nm(g) on the computed block.
  const auto ui = matrix_u(b, inverse(g));
  const double unit = (ui.entries - u.entries.adjoint()).cwiseAbs().maxCoeff();
  out << "U(q,p) in basis alpha=" << fmt(b.alpha) << " N=" << b.n_max << " at (q,p)=(" << fmt(c.q) << "," << fmt(c.p) << ")\n";
  out << "max column norm " << fmt(worst_col) << (worst_col <= 1.0 + tol ? " (<= 1)" : " (exceeds 1 + tol)") << "\n";
  out << "max |U(g^-1) - U(g)^*| " << fmt(unit) << (unit <= tol ? " (within tol)" : " (exceeds tol)") << "\n";
  out << "border norm (truncation estimate) " << fmt(u.truncation_estimate) << "\n";
  if (c.out.empty()) {
    const Eigen::Index k = std::min<Eigen::Index>(u.entries.rows(), 6);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) out << (j ? "  " : "") << fmt(u.entries(i, j).real()) << (u.entries(i, j).imag() < 0 ? "" : "+") << fmt(u.entries(i, j).imag()) << "i";
      out << "\n";
    }
  } else {
    auto m = make_manifest(c, "repr", {{"unitarity", tol}});
    m.emit("matrix_u.csv", matrix_csv(u.entries), "matrix of U(q,p)");
    m.meta()["results"] = {{"max_column_norm", worst_col}, {"unitarity_residual", unit}, {"truncation_estimate", u.truncation_estimate}};
    m.write();
    out << "wrote " << (m.dir() / "manifest.json").string() << "\n";
  }
  return unit <= tol && worst_col <= 1.0 + tol ? 0 : 1;
}

int cmd_trace_u(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-4);
  const auto b = basis_of(c);
  const auto r = trace_u(b, GroupElement(c.q, c.p));
  const double closed_alpha = trace_u_closed_form(c.q, b.alpha);
  const double canonical = std::sqrt(c.q) / std::abs(c.q - 1.0);
  const double err = std::abs(r.value - closed_alpha);
  out << "trace_u  " << fmt(r.value.real()) << (r.value.imag() < 0 ? " - " : " + ") << fmt(std::abs(r.value.imag())) << "i"
      << "  closed(alpha=" << fmt(b.alpha) << ") " << fmt(closed_alpha) << "  sqrt(q)/|q-1| " << fmt(canonical)
      << "  |diff| " << fmt(err) << "  estimate " << fmt(r.error_estimate) << "\n";
  if (b.alpha != 0.0)
    out << "note: sqrt(q)/|q-1| is the alpha = 0 value; for alpha != 0 the Abel sum follows the closed(alpha) column\n";
  if (!c.out.empty()) {
    auto m = make_manifest(c, "trace-u", {{"agreement", tol}});
    m.meta()["results"] = {{"re", r.value.real()}, {"im", r.value.imag()}, {"closed_alpha", closed_alpha},
                           {"sqrt_q_over_abs_q_minus_1", canonical}, {"error_estimate", r.error_estimate}};
    m.write();
  }
  return err <= tol ? 0 : 1;
}

int cmd_constants(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-6);
  const auto w = weight_of(c);
  io::json res;
  out << "weight " << w.label << "\n";
  const auto tc = trace_condition(w);
  out << "trace condition: Fourier route " << fmt(tc.fourier_route.real()) << ", principal-value route "
      << fmt(tc.principal_route.real()) << ", discrepancy " << fmt(tc.discrepancy) << "\n";
  res["trace_fourier"] = tc.fourier_route.real();
  res["trace_principal"] = tc.principal_route.real();
  try {
    const auto k = compute_constants(w, {0.0, 1.0});
    out << "c_M " << fmt(k.c_M) << "\n";
    out << "Omega(1) " << fmt(k.omega_1.real()) << "  Omega'(1) " << fmt(k.omega_prime_1.real()) << "  Omega''(1) "
        << fmt(k.omega_second_1.real()) << "\n";
    for (const auto& d : k.d_beta)
      out << "d_" << fmt(d.beta) << " " << (d.value ? fmt(d.value->real()) : "diverges: " + d.divergence) << "\n";
    res["c_M"] = k.c_M;
  } catch (const DivergenceError& e) {
    out << "constants: " << e.what() << "\n";
  }
  if (c.weight == "acs") {
    const auto psi = basis_state(BasisSpec{c.alpha, 3}, 0);
    for (double g : {-4.0, -3.0, -2.0, -1.0, 0.0}) {
      try {
        const double v = acs_c_gamma(psi, g);
        out << "c_" << fmt(g) << " " << fmt(v) << "\n";
        res["c_" + fmt(g)] = v;
      } catch (const DivergenceError& e) {
        out << "c_" << fmt(g) << " diverges\n";
      }
    }
    const double K = kinetic_constant(psi);
    out << "K " << fmt(K) << (std::abs(K - 0.75) <= tol ? "  (= 3/4: self-adjointness threshold)" : "") << "\n";
    res["K"] = K;
  }
  if (c.weight == "thermal") {
    const auto th = thermal_constant(c.alpha, c.t);
    out << "thermal constant: series " << fmt(th.series_route) << "  Bessel " << fmt(th.bessel_route) << "  2pi/alpha "
        << fmt(th.closed) << "\n";
    res["thermal_series"] = th.series_route;
    res["thermal_bessel"] = th.bessel_route;
  }
  if (!c.out.empty()) {
    auto m = make_manifest(c, "constants", {{"agreement", tol}});
    m.meta()["results"] = res;
    m.write();
  }
  return std::abs(tc.fourier_route - tc.principal_route) <= tol ? 0 : 1;
}

int cmd_quantize(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-8);
  const auto obs = parse_observable(c.f);
  const auto b = basis_of(c);
  const auto op = c.weight == "thermal" ? thermal_quantize(c.alpha, c.t, obs, c.n_terms, b) : quantize(weight_of(c), obs, b);
  const auto& m = op.matrix.entries;
  const Eigen::Index k = m.rows() - 1;
  const double herm = (m - m.adjoint()).topLeftCorner(k, k).norm() / std::max(1.0, m.norm());
  out << "A_f for f = " << c.f << " with weight " << c.weight << "\n";
  out << "closed form: " << op.closed_form << "\n";
  out << "relative hermiticity residual (interior) " << fmt(herm) << (herm <= tol ? " (hermitian)" : " (not hermitian)") << "\n";
  if (op.series_tail > 0.0) out << "series tail bound " << fmt(op.series_tail) << "\n";
  if (c.out.empty()) {
    if (m.rows() <= 8) out << m << "\n";
  } else {
    auto man = make_manifest(c, "quantize", {{"hermiticity", tol}});
    man.emit("operator.csv", matrix_csv(m), "matrix of A_f");
    man.meta()["results"] = {{"closed_form", op.closed_form}, {"hermiticity_residual", herm}, {"series_tail", op.series_tail}};
    man.write();
    out << "wrote " << (man.dir() / "manifest.json").string() << "\n";
  }
  return 0;
}

void emit_quasi(io::Manifest& m, const std::string& stem, const QuasiDistribution& d, const io::json& extra) {
  m.emit(stem + ".csv", io::quasi_csv(d), to_string(d.kind));
  m.emit(stem + ".json", io::quasi_sidecar(d, extra).dump(2) + "\n", "sidecar");
}

int cmd_wigner(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-10);
  const auto phi = state_of(c);
  const auto grid = grid_of(c);
  const auto w = wigner_aw(phi, grid, tol);
  const auto [mn, mx] = std::minmax_element(w.values.begin(), w.values.end());
  out << "affine Wigner function of " << phi.label() << " on " << grid.q_nodes.size() << " x " << grid.p_nodes.size()
      << " nodes: min " << fmt(*mn) << " max " << fmt(*mx) << " imaginary residual " << fmt(w.imag_residual) << "\n";
  io::json extra = {{"tolerances", {{"wigner_rel_tol", tol}}}};
  std::optional<MarginalReport> rep;
  if (c.marginals) {
    rep = wigner_marginals(phi, grid);
    out << "marginals: q L1 " << fmt(rep->q_density_l1) << "  p L1 " << fmt(rep->p_density_l1) << "  mass "
        << fmt(rep->total_mass) << "\n";
    extra["marginals"] = {{"q_density_l1", rep->q_density_l1}, {"p_density_l1", rep->p_density_l1}, {"total_mass", rep->total_mass}};
  }
  if (!c.out.empty()) {
    auto m = make_manifest(c, "wigner", {{"wigner_rel_tol", tol}});
    emit_quasi(m, "wigner", w, extra);
    if (rep) {
      m.emit("p_marginal.csv", io::columns_csv({"q", "value"}, {grid.q_nodes, rep->p_marginal}), "p-marginal");
      m.emit("q_marginal.csv", io::columns_csv({"p", "value"}, {grid.p_nodes, rep->q_marginal}), "q-marginal");
    }
    m.write();
    out << "wrote " << (m.dir() / "manifest.json").string() << "\n";
  }
  return 0;
}

int cmd_acs_density(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-10);
  const auto phi = state_of(c);
  const auto fid = basis_state(BasisSpec{c.fid_alpha, 3}, 0);
  const auto grid = grid_of(c);
  const auto d = acs_density_grid(phi, fid, grid);
  const auto [mn, mx] = std::minmax_element(d.values.begin(), d.values.end());
  out << "ACS density of " << phi.label() << " with fiducial e_0^(" << fmt(c.fid_alpha) << "): min " << fmt(*mn) << " max "
      << fmt(*mx) << "\n";
  if (!c.out.empty()) {
    auto m = make_manifest(c, "acs-density", {{"recorded", tol}});
    emit_quasi(m, "acs_density", d, {{"fiducial_alpha", c.fid_alpha}});
    m.write();
    out << "wrote " << (m.dir() / "manifest.json").string() << "\n";
  }
  return 0;
}

int cmd_lower_symbol(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-7);
  const auto obs = parse_observable(c.f);
  const auto w = weight_of(c);
  const bool trace = c.method == "trace";
  if (!trace && c.method != "closed") throw UsageError("method must be closed or trace");
  auto eval = [&](double q, double p) { return trace ? lower_symbol_trace(w, obs, {q, p}, tol) : lower_symbol(w, obs, {q, p}); };
  if (c.out.empty()) {
    const double v = eval(c.q, c.p);
    out << "lower symbol of " << c.f << " (" << c.weight << ", " << c.method << ") at (" << fmt(c.q) << "," << fmt(c.p)
        << ") = " << fmt(v) << "   f = " << fmt(obs(c.q, c.p)) << "\n";
    return 0;
  }
  const auto grid = grid_of(c);
  QuasiDistribution d{grid, QuasiKind::LowerSymbol, std::vector<double>(grid.size()), {}, 0.0, c.f};
  for (std::size_t i = 0; i < grid.q_nodes.size(); ++i)
    for (std::size_t j = 0; j < grid.p_nodes.size(); ++j) d.values[i * grid.p_nodes.size() + j] = eval(grid.q_nodes[i], grid.p_nodes[j]);
  auto m = make_manifest(c, "lower-symbol", {{"trace_tol", tol}});
  emit_quasi(m, "lower_symbol", d, {{"method", c.method}, {"weight", c.weight}});
  m.write();
  out << "wrote " << (m.dir() / "manifest.json").string() << "\n";
  return 0;
}

int cmd_halfosc(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1e-10);
  if (c.spectrum) {
    const auto fd = halfosc::eigensolve_fd(4);
    const auto lg = halfosc::laguerre_spectrum(BasisSpec{2.0, std::max(c.n_max, 4)}, 4);
    out << "n  exact  finite-difference  (Richardson)  Laguerre N=" << std::max(c.n_max, 4) << "\n";
    for (int n = 1; n <= 4; ++n)
      out << n << "  " << fmt(2.0 * n - 0.5) << "  " << fmt(fd.levels[n - 1].energy) << "  " << fmt(fd.levels[n - 1].richardson_error)
          << "  " << fmt(lg[n - 1]) << "\n";
    for (const auto& wmsg : fd.warnings) out << "warning: " << wmsg << "\n";
  }
  static const std::vector<std::string> kAll = {"density", "wigner", "wavelet", "acs-density", "reconstructed", "momentum"};
  std::vector<std::string> emit = c.emit == "all" ? kAll : split_list(c.emit);
  for (const auto& e : emit)
    if (std::find(kAll.begin(), kAll.end(), e) == kAll.end())
      throw UsageError("unknown --emit item '" + e + "' (expected " + "density, wigner, wavelet, acs-density, reconstructed, momentum or all)");
  if (c.n < 1) throw UsageError("--n must be >= 1");
  const auto grid = grid_of(c);
  const auto phi = halfosc::eigenstate_analytic(c.n).phi;
  auto has = [&](const char* k) { return std::find(emit.begin(), emit.end(), k) != emit.end(); };
  io::Manifest m = make_manifest(c, "halfosc", {{"wigner_rel_tol", tol}});
  const bool write = !c.out.empty();
  const std::string stem = "phi" + std::to_string(c.n) + "_";
  if (has("density")) {
    std::vector<double> dens;
    for (double q : grid.q_nodes) dens.push_back(std::norm(phi(q)));
    if (write) m.emit(stem + "density.csv", io::columns_csv({"q", "value"}, {grid.q_nodes, dens}), "|phi(q)|^2");
    out << "density: " << grid.q_nodes.size() << " nodes\n";
  }
  if (has("wigner")) {
    const auto w = wigner_aw(phi, grid, tol);
    if (write) emit_quasi(m, stem + "wigner", w, {{"state", phi.label()}});
    out << "wigner: imaginary residual " << fmt(w.imag_residual) << ", min " << fmt(*std::min_element(w.values.begin(), w.values.end()))
        << "\n";
  }
  if (has("wavelet") || has("acs-density")) {
    const auto fid = halfosc::figure_fiducial();
    const auto sym = acs_symbol_grid(phi, fid, grid);
    if (has("wavelet")) {
      QuasiDistribution re = sym, im = sym;
      for (std::size_t k = 0; k < sym.complex_values.size(); ++k) {
        re.values[k] = sym.complex_values[k].real();
        im.values[k] = sym.complex_values[k].imag();
      }
      re.complex_values.clear();
      im.complex_values.clear();
      if (write) {
        emit_quasi(m, stem + "wavelet_re", re, {{"part", "re"}, {"fiducial_alpha", 1.0}});
        emit_quasi(m, stem + "wavelet_im", im, {{"part", "im"}, {"fiducial_alpha", 1.0}});
      }
      out << "wavelet transform: " << grid.size() << " nodes\n";
    }
    if (has("acs-density")) {
      QuasiDistribution d{grid, QuasiKind::AcsDensity, std::vector<double>(grid.size()), {}, 0.0, phi.label()};
      const double cm1 = admissibility_constant(fid);
      for (std::size_t k = 0; k < grid.size(); ++k) d.values[k] = std::norm(sym.complex_values[k]) / (2.0 * std::numbers::pi * cm1);
      if (write) emit_quasi(m, stem + "acs_density", d, {{"fiducial_alpha", 1.0}});
      out << "ACS density: min " << fmt(*std::min_element(d.values.begin(), d.values.end())) << "\n";
    }
  }
  if (has("reconstructed") || has("momentum")) {
    const auto rep = wigner_marginals(phi, grid);
    if (write && has("reconstructed"))
      m.emit(stem + "reconstructed_density.csv", io::columns_csv({"q", "value"}, {grid.q_nodes, rep.p_marginal}), "p-marginal");
    if (write && has("momentum"))
      m.emit(stem + "momentum_density.csv", io::columns_csv({"p", "value"}, {grid.p_nodes, rep.q_marginal}), "q-marginal");
    m.meta()["marginals"] = {{"q_density_l1", rep.q_density_l1}, {"p_density_l1", rep.p_density_l1}, {"total_mass", rep.total_mass}};
    out << "marginals: q L1 " << fmt(rep.q_density_l1) << "  p L1 " << fmt(rep.p_density_l1) << "  mass " << fmt(rep.total_mass) << "\n";
  }
  if (write) {
    m.write();
    out << "wrote " << (m.dir() / "manifest.json").string() << "\n";
  }
  return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const double tol = c.tol_or(1.0);
  verify::Options o;
  o.tol_scale = tol;
  const auto results = verify::run_all(o, c.only);
  int failed = 0;
  io::json rows = io::json::array();
  for (const auto& r : results) {
    out << verify::format_line(r) << "\n";
    if (!r.passed) ++failed;
    io::json parts = io::json::array();
    for (const auto& p : r.parts) parts.push_back({{"name", p.name}, {"measured", p.measured}, {"threshold", p.threshold}});
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"parts", parts}, {"error", r.detail}});
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  if (!c.out.empty()) {
    auto m = make_manifest(c, "verify", {{"threshold_scale", tol}});
    m.meta()["results"] = rows;
    m.write();
  }
  return failed == 0 ? 0 : 1;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--tol", c.tol, "Tolerance; 0 selects the subcommand default (recorded in the manifest)");
  sub->add_option("--out", c.out, "Output directory for CSV/JSON and manifest.json");
}
void add_basis(CLI::App* sub, RunConfig& c) {
  sub->add_option("--alpha", c.alpha, "Basis / weight parameter alpha");
  sub->add_option("--basis-alpha", c.basis_alpha, "Basis alpha when it differs from --alpha");
  sub->add_option("--n-max", c.n_max, "Basis truncation N");
}
void add_weight(CLI::App* sub, RunConfig& c) {
  sub->add_option("--weight", c.weight, "aw | acs | thermal")->check(CLI::IsMember({"aw", "acs", "thermal"}));
  sub->add_option("--t", c.t, "Thermal parameter t in [0,1)");
  sub->add_option("--n-terms", c.n_terms, "Thermal series terms");
}
void add_grid(CLI::App* sub, RunConfig& c) {
  sub->add_option("--qmin", c.qmin);
  sub->add_option("--qmax", c.qmax);
  sub->add_option("--nq", c.nq);
  sub->add_option("--pmin", c.pmin);
  sub->add_option("--pmax", c.pmax);
  sub->add_option("--np", c.np);
}
void add_point(CLI::App* sub, RunConfig& c) {
  sub->add_option("--q", c.q, "Group element q > 0");
  sub->add_option("--p", c.p, "Group element p");
}

// Config keys and their setters.
using Setter = std::function<void(const io::json&)>;
std::map<std::string, Setter> config_setters(RunConfig& c) {
  auto num = [](double& d) { return [&d](const io::json& j) { d = j.get<double>(); }; };
  auto integer = [](int& i) { return [&i](const io::json& j) { i = j.get<int>(); }; };
  auto str = [](std::string& s) { return [&s](const io::json& j) { s = j.get<std::string>(); }; };
  auto flag = [](bool& b) { return [&b](const io::json& j) { b = j.get<bool>(); }; };
  return {{"weight", str(c.weight)},       {"alpha", num(c.alpha)},     {"basis-alpha", num(c.basis_alpha)},
          {"n-max", integer(c.n_max)},     {"t", num(c.t)},             {"n-terms", integer(c.n_terms)},
          {"f", str(c.f)},                 {"state", str(c.state)},     {"fid-alpha", num(c.fid_alpha)},
          {"q", num(c.q)},                 {"p", num(c.p)},             {"qmin", num(c.qmin)},
          {"qmax", num(c.qmax)},           {"nq", integer(c.nq)},       {"pmin", num(c.pmin)},
          {"pmax", num(c.pmax)},           {"np", integer(c.np)},       {"tol", num(c.tol)},
          {"out", str(c.out)},             {"json-errors", flag(c.json_errors)},
          {"method", str(c.method)},       {"n", integer(c.n)},         {"emit", str(c.emit)},
          {"marginals", flag(c.marginals)}, {"spectrum", flag(c.spectrum)},
          {"only", [&c](const io::json& j) { c.only = j.get<std::vector<int>>(); }}};
}

void error_json(std::ostream& err, const std::string& type, const std::string& message, int code, int column = 0) {
  io::json j = {{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  if (column > 0) j["error"]["column"] = column;
  err << j.dump() << "\n";
}

}  // namespace

Observable parse_observable(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw SyntaxError("empty observable", 1);
  auto sum = Parser(text).parse();
  if (sum.terms.size() == 1) {
    const auto& t = sum.terms[0];
    if (t.coeff == 1.0 && t.beta == 0.0 && t.n > 0) return {MomentumPower{t.n}, text};
    if (t.coeff == 1.0 && t.n == 0) return {PositionFn::q_power(t.beta), text};
    if (t.coeff == 1.0 && t.beta == 1.0 && t.n == 1) return {Dilation{}, text};
  }
  return {std::move(sum), text};
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  io::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
  auto setters = config_setters(cfg);
  for (const auto& [k, v] : j.items()) {
    const auto it = setters.find(k);
    if (it == setters.end()) throw ConfigError("config file " + path + ": unknown key '" + k + "'");
    try {
      it->second(v);
    } catch (const io::json::exception& e) {
      throw ConfigError("config file " + path + ": bad value for '" + k + "': " + e.what());
    }
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  bool json_errors = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--json-errors") json_errors = true;
  auto fail = [&](const std::string& type, const std::string& msg, int code, int column = 0) {
    if (json_errors) error_json(err, type, msg, code, column);
    else err << "error: " << msg << "\n";
    return code;
  };

  // A config file is applied first so that flags override it.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      try {
        apply_config_file(argv[i + 1], c);
      } catch (const ConfigError& e) {
        return fail("config", e.what(), 2);
      }
    }
  json_errors = json_errors || c.json_errors;

  CLI::App app{"Affine covariant integral quantization toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_flag("--json-errors", c.json_errors, "Machine-readable errors on stderr");

  auto* repr = app.add_subcommand("repr", "Matrix of U(q,p) in the Laguerre basis");
  add_basis(repr, c);
  add_point(repr, c);
  add_common(repr, c);
  auto* tr = app.add_subcommand("trace-u", "Abel-summed trace of U(q,p) against the closed forms");
  add_basis(tr, c);
  add_point(tr, c);
  add_common(tr, c);
  auto* cons = app.add_subcommand("constants", "Weight constants, trace condition, ACS and thermal constants");
  add_basis(cons, c);
  add_weight(cons, c);
  add_common(cons, c);
  auto* qz = app.add_subcommand("quantize", "Matrix of A_f in the Laguerre basis");
  add_basis(qz, c);
  add_weight(qz, c);
  qz->add_option("--f", c.f, "Observable, e.g. '0.5*p^2 + 0.5*q^2'");
  add_common(qz, c);
  auto* wg = app.add_subcommand("wigner", "Affine Wigner function on a grid");
  add_basis(wg, c);
  wg->add_option("--state", c.state, "halfosc:N | laguerre:K");
  wg->add_flag("--marginals", c.marginals, "Also compute both marginals");
  add_grid(wg, c);
  add_common(wg, c);
  auto* ad = app.add_subcommand("acs-density", "ACS density |<q,p|phi>|^2 / (2 pi c_{-1}) on a grid");
  add_basis(ad, c);
  ad->add_option("--state", c.state, "halfosc:N | laguerre:K");
  ad->add_option("--fid-alpha", c.fid_alpha, "Fiducial e_0^(alpha)");
  add_grid(ad, c);
  add_common(ad, c);
  auto* ls = app.add_subcommand("lower-symbol", "Lower symbol at a point, or on a grid with --out");
  add_basis(ls, c);
  add_weight(ls, c);
  add_point(ls, c);
  add_grid(ls, c);
  ls->add_option("--f", c.f, "Observable");
  ls->add_option("--method", c.method, "closed | trace")->check(CLI::IsMember({"closed", "trace"}));
  add_common(ls, c);
  auto* ho = app.add_subcommand("halfosc", "Half-oscillator figure data");
  ho->add_option("--n", c.n, "Level n >= 1");
  ho->add_option("--emit", c.emit, "Comma list: density,wigner,wavelet,acs-density,reconstructed,momentum or all");
  ho->add_flag("--spectrum", c.spectrum, "Print finite-difference and Laguerre-basis energies");
  ho->add_option("--n-max", c.n_max, "Laguerre truncation for --spectrum");
  add_grid(ho, c);
  add_common(ho, c);
  auto* vf = app.add_subcommand("verify", "Run the acceptance checks");
  vf->add_option("--only", c.only, "Check ids");
  vf->add_option("--tol", c.tol, "Multiplier on every threshold");
  vf->add_option("--out", c.out, "Write manifest.json with the results");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }
  json_errors = json_errors || c.json_errors;

  try {
    if (repr->parsed()) return cmd_repr(c, out);
    if (tr->parsed()) return cmd_trace_u(c, out);
    if (cons->parsed()) return cmd_constants(c, out);
    if (qz->parsed()) return cmd_quantize(c, out);
    if (wg->parsed()) return cmd_wigner(c, out);
    if (ad->parsed()) return cmd_acs_density(c, out);
    if (ls->parsed()) return cmd_lower_symbol(c, out);
    if (ho->parsed()) return cmd_halfosc(c, out);
    if (vf->parsed()) return cmd_verify(c, out);
  } catch (const SyntaxError& e) {
    return fail("syntax", e.what(), 2, e.column());
  } catch (const UsageError& e) {
    return fail("usage", e.what(), 2);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), 2);
  } catch (const Error& e) {
    return fail("computation", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return fail("usage", "no subcommand", 2);
}

}  // namespace affq::cli
