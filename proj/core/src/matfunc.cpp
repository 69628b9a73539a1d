#include "shiftkrylov/matfunc.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>

#include "shiftkrylov/error.hpp"

namespace shiftkrylov {

namespace {

constexpr std::string_view header = "re_z,im_z,re_w,im_w";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view tok, const std::string& where) {
  tok = trim(tok);
  double v{};
  const char* first = tok.data();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(where + ": cannot parse '" + std::string(tok) + "'");
  return v;
}

void parse_kind(std::string_view text, QuadratureRule& rule, const std::string& where) {
  text = trim(text);
  if (text == "exp") {
    rule.kind = RuleKind::Exp;
    rule.gamma = 1.0;
    return;
  }
  constexpr std::string_view ml = "mittag_leffler";
  if (text.substr(0, ml.size()) == ml) {
    auto rest = trim(text.substr(ml.size()));
    constexpr std::string_view key = "gamma=";
    if (rest.substr(0, key.size()) != key) throw ParseError(where + ": mittag_leffler needs gamma=<value>");
    rule.kind = RuleKind::MittagLeffler;
    rule.gamma = parse_double(rest.substr(key.size()), where);
    if (!(rule.gamma > 0.0 && rule.gamma <= 1.0)) throw ParseError(where + ": gamma must lie in (0, 1]");
    return;
  }
  throw ParseError(where + ": unknown rule kind '" + std::string(text) + "'");
}

bool close(cplx a, cplx b, double scale) { return std::abs(a - b) <= 1e-10 * scale; }

}  // namespace

bool QuadratureRule::conjugate_symmetric() const {
  const std::size_t nu = nodes.size();
  std::vector<bool> used(nu, false);
  for (std::size_t j = 0; j < nu; ++j) {
    if (used[j]) continue;
    const cplx zc = std::conj(nodes[j]), wc = std::conj(weights[j]);
    const double zs = std::max(std::abs(nodes[j]), 1e-300), ws = std::max(std::abs(weights[j]), 1e-300);
    bool found = false;
    for (std::size_t k = j; k < nu && !found; ++k) {
      if (used[k] || !close(nodes[k], zc, zs) || !close(weights[k], wc, ws)) continue;
      used[j] = used[k] = true;
      found = true;
    }
    if (!found) return false;
  }
  return true;
}

void validate(const QuadratureRule& rule) {
  if (rule.nodes.empty()) throw ParseError("quadrature rule: no nodes");
  if (rule.nodes.size() != rule.weights.size()) throw ParseError("quadrature rule: node and weight counts differ");
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    if (!is_finite(rule.nodes[j]) || !is_finite(rule.weights[j]))
      throw ParseError("quadrature rule: entry " + std::to_string(j + 1) + " is not finite");
    for (std::size_t k = 0; k < j; ++k)
      if (rule.nodes[k] == rule.nodes[j])
        throw DuplicateNodes("quadrature rule: nodes " + std::to_string(k + 1) + " and " + std::to_string(j + 1) +
                             " coincide");
  }
}

QuadratureRule read_quadrature(std::istream& in, const std::string& source) {
  QuadratureRule rule;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  constexpr std::string_view kind_key = "kind:";
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto body = trim(text.substr(1));
      if (body.substr(0, kind_key.size()) == kind_key) parse_kind(body.substr(kind_key.size()), rule, where);
      continue;
    }
    if (!seen_header) {
      if (text != header) throw ParseError(where + ": expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    double f[4];
    std::size_t pos = 0;
    for (int c = 0; c < 4; ++c) {
      const auto comma = text.find(',', pos);
      if ((c < 3) != (comma != std::string_view::npos)) throw ParseError(where + ": expected 4 comma-separated fields");
      f[c] = parse_double(text.substr(pos, c < 3 ? comma - pos : std::string_view::npos), where);
      pos = comma + 1;
    }
    rule.nodes.emplace_back(f[0], f[1]);
    rule.weights.emplace_back(f[2], f[3]);
  }
  if (!seen_header) throw ParseError(source + ": missing header '" + std::string(header) + "'");
  if (rule.nodes.empty()) throw ParseError(source + ": no data rows");
  validate(rule);
  return rule;
}

QuadratureRule load_quadrature(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open quadrature file " + path.string());
  return read_quadrature(in, path.string());
}

template <Scalar T>
MatfuncResult eval_rational_action(const CsrMatrix<T>& A, std::span<const T> u0, const QuadratureRule& rule,
                                   const SolverConfig& cfg) {
  validate(rule);
  std::vector<cplx> shifts(rule.size());
  for (std::size_t j = 0; j < shifts.size(); ++j) shifts[j] = -rule.nodes[j];
  auto solved = solve_shifted_hessen(A, u0, std::span<const cplx>(shifts), cfg);

  std::vector<std::size_t> failed;
  for (std::size_t j = 0; j < shifts.size(); ++j)
    if (!solved.report.shifts[j].converged) failed.push_back(j);
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << "rational action: " << failed.size() << " of " << shifts.size() << " nodes did not converge (nodes";
    for (auto j : failed) msg << ' ' << j + 1;
    msg << ")";
    throw NotConverged(msg.str(), std::move(failed));
  }

  MatfuncResult out;
  out.value.assign(u0.size(), cplx{});
  for (std::size_t j = 0; j < shifts.size(); ++j)
    for (std::size_t q = 0; q < u0.size(); ++q) out.value[q] += rule.weights[j] * solved.solutions[j][q];
  if constexpr (!is_complex_v<T>) {
    if (rule.conjugate_symmetric()) {
      for (auto& v : out.value) v = v.real();
      out.real_part = true;
    }
  }
  out.report = std::move(solved.report);
  return out;
}

template MatfuncResult eval_rational_action(const CsrMatrix<double>&, std::span<const double>, const QuadratureRule&,
                                            const SolverConfig&);
template MatfuncResult eval_rational_action(const CsrMatrix<cplx>&, std::span<const cplx>, const QuadratureRule&,
                                            const SolverConfig&);

}  // namespace shiftkrylov
