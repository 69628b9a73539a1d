#include "cli_common.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <shiftkrylov/error.hpp>
#include <shiftkrylov/problems.hpp>

namespace shiftkrylov::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// Parses a prefix of `s` starting at `pos` as a double; advances pos.
bool parse_prefix(const std::string& s, std::size_t& pos, double& value) {
  const char* first = s.data() + pos;
  if (pos < s.size() && s[pos] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc{}) return false;
  pos = static_cast<std::size_t>(ptr - s.data());
  return true;
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  std::size_t pos = 0;
  double v{};
  if (s.empty() || !parse_prefix(s, pos, v) || pos != s.size())
    throw ConfigError("cannot parse " + what + " '" + text + "'");
  return v;
}

}  // namespace

int report_failure(std::ostream& err) {
  try {
    throw;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << '\n';
    return not_converged;
  } catch (const AllShiftsStalled& e) {
    err << "error: " << e.what() << '\n';
    return not_converged;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const InvalidGrid& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const InvalidDimensions& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const SingularReducedSystem& e) {
    err << "error: " << e.what() << '\n';
    return not_converged;
  } catch (const Error& e) {
    // Parse, format and dimension problems in the input files.
    err << "error: " << e.what() << '\n';
    return io_error;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return io_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return io_error;
  }
}

cplx parse_complex(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty complex number");
  std::size_t pos = 0;
  double a{};
  if (s == "i" || s == "+i") return {0.0, 1.0};
  if (s == "-i") return {0.0, -1.0};
  if (!parse_prefix(s, pos, a)) throw ConfigError("cannot parse complex number '" + text + "'");
  if (pos == s.size()) return {a, 0.0};
  if (s[pos] == 'i' && pos + 1 == s.size()) return {0.0, a};
  if (s[pos] != '+' && s[pos] != '-') throw ConfigError("cannot parse complex number '" + text + "'");
  double b{};
  if (s.substr(pos) == "+i") return {a, 1.0};
  if (s.substr(pos) == "-i") return {a, -1.0};
  if (!parse_prefix(s, pos, b) || pos + 1 != s.size() || s[pos] != 'i')
    throw ConfigError("cannot parse complex number '" + text + "'");
  return {a, b};
}

std::vector<cplx> parse_shifts(const std::string& text) {
  const std::string s = trim(text);
  if (s == "qcd") return gen_shifts(qcd_shift_set());
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "arithmetic") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) throw ConfigError("shift spec 'arithmetic:C:NU' expected, got '" + text + "'");
    const double c = parse_real(parts[0], "shift step");
    const double nu = parse_real(parts[1], "shift count");
    if (nu < 1 || nu != std::floor(nu)) throw ConfigError("shift count must be a positive integer");
    return gen_shifts(ShiftSpec::arithmetic(c, static_cast<std::size_t>(nu)));
  }
  if (kind == "list") {
    std::vector<cplx> values;
    for (const auto& item : split(rest, ',')) values.push_back(parse_complex(item));
    return gen_shifts(ShiftSpec::list(std::move(values)));
  }
  throw ConfigError("unknown shift spec '" + text + "' (use arithmetic:C:NU, list:S1,S2,... or qcd)");
}

std::string format_complex(cplx z) {
  std::ostringstream out;
  out << std::setprecision(6) << z.real();
  if (z.imag() != 0.0) out << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << 'i';
  return out.str();
}

VectorData read_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open vector file " + path.string());
  VectorData out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> width;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%' || t[0] == '#') continue;
    std::istringstream fields(t);
    std::vector<double> nums;
    std::string tok;
    while (fields >> tok) {
      std::size_t pos = 0;
      double v{};
      if (!parse_prefix(tok, pos, v) || pos != tok.size())
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + tok + "'");
      nums.push_back(v);
    }
    if (nums.size() != 1 && nums.size() != 2)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected one or two numbers");
    if (width && *width != nums.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": mixed real and complex entries");
    width = nums.size();
    out.values.emplace_back(nums[0], nums.size() == 2 ? nums[1] : 0.0);
  }
  if (out.values.empty()) throw ParseError("vector file " + path.string() + " has no entries");
  out.real = width == 1u;
  return out;
}

void write_vector(std::ostream& out, const std::vector<cplx>& v, bool real) {
  out << std::setprecision(17);
  for (const auto& z : v) {
    if (real)
      out << z.real() << '\n';
    else
      out << z.real() << ' ' << z.imag() << '\n';
  }
}

void write_vector(const std::filesystem::path& path, const std::vector<cplx>& v, bool real) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_vector(out, v, real);
}

VectorData make_vector(const std::string& source, index_t n) {
  VectorData out;
  const auto un = static_cast<std::size_t>(n);
  if (source == "ones") {
    out.values.assign(un, cplx(1.0));
    return out;
  }
  if (source.rfind("random:", 0) == 0) {
    const double seed = parse_real(source.substr(7), "random seed");
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    out.values.resize(un);
    for (auto& v : out.values) v = dist(rng);
    return out;
  }
  out = read_vector(source);
  if (out.values.size() != un)
    throw DimensionMismatch("vector file " + source + " has " + std::to_string(out.values.size()) +
                            " entries, operator order is " + std::to_string(n));
  return out;
}

GeneratorSpec parse_generator(const std::string& text) {
  std::istringstream in(text);
  GeneratorSpec spec;
  in >> spec.kind;
  if (spec.kind != "convdiff3d" && spec.kind != "laplace2d" && spec.kind != "laplace1d")
    throw ConfigError("unknown generator '" + spec.kind + "'");
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("generator parameter '" + tok + "' is not key=value");
    const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
    if (key == "n") {
      spec.n = static_cast<index_t>(parse_real(value, "grid size"));
    } else if (key == "eps") {
      spec.eps = parse_real(value, "eps");
    } else if (key == "r") {
      spec.r = parse_real(value, "r");
    } else if (key == "scale") {
      spec.scale = parse_real(value, "scale");
    } else if (key == "beta") {
      const auto parts = split(value, ',');
      if (parts.size() != 3) throw ConfigError("beta needs three comma-separated components");
      for (int d = 0; d < 3; ++d) spec.beta[d] = parse_real(parts[d], "beta");
    } else {
      throw ConfigError("unknown generator parameter '" + key + "'");
    }
  }
  return spec;
}

CsrMatrix<double> build(const GeneratorSpec& spec) {
  if (spec.kind == "convdiff3d") return gen_convdiff3d(spec.n, spec.eps, spec.beta, spec.r);
  if (spec.kind == "laplace2d") return gen_laplace2d(spec.n, spec.scale);
  if (spec.kind == "laplace1d") return gen_laplace1d(spec.n, spec.scale);
  throw ConfigError("unknown generator '" + spec.kind + "'");
}

std::vector<double> initial_vector(const GeneratorSpec& spec) {
  if (spec.kind == "convdiff3d") return convdiff3d_initial(spec.n);
  if (spec.kind == "laplace2d") return laplace2d_initial(spec.n);
  return laplace1d_initial(spec.n);
}

std::string describe(const GeneratorSpec& spec) {
  std::ostringstream out;
  out << spec.kind << " n=" << spec.n;
  if (spec.kind == "convdiff3d")
    out << " eps=" << spec.eps << " beta=" << spec.beta[0] << ',' << spec.beta[1] << ',' << spec.beta[2]
        << " r=" << spec.r;
  else
    out << " scale=" << spec.scale;
  return out.str();
}

CsrMatrix<cplx> complexify(const CsrMatrix<double>& A) {
  std::vector<cplx> v(A.values().begin(), A.values().end());
  return CsrMatrix<cplx>(A.rows(), A.cols(), A.row_ptr(), A.col_idx(), std::move(v));
}

}  // namespace shiftkrylov::cli
