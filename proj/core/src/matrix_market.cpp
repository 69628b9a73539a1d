#include "shiftkrylov/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace shiftkrylov {

namespace {

enum class Field { Real, Complex, Integer, Pattern };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class N>
N parse_number(std::string_view tok, std::size_t line_no) {
  N value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("Matrix Market line " + std::to_string(line_no) + ": cannot parse '" + std::string(tok) + "'");
  return value;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

template <Scalar T>
AnyCsrMatrix assemble(index_t rows, index_t cols, std::vector<Triplet<T>>& trip, bool symmetric) {
  if (symmetric) {
    const std::size_t stored = trip.size();
    for (std::size_t k = 0; k < stored; ++k)
      if (trip[k].row != trip[k].col) trip.push_back({trip[k].col, trip[k].row, trip[k].value});
  }
  return from_triplets<T>(rows, cols, std::span<const Triplet<T>>(trip));
}

template <Scalar T>
void write_value(std::ostream& out, T v) {
  char buf[64];
  auto emit = [&](double x) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, res.ptr - buf);
  };
  if constexpr (is_complex_v<T>) {
    emit(v.real());
    out << ' ';
    emit(v.imag());
  } else {
    emit(v);
  }
}

}  // namespace

AnyCsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("Matrix Market: empty input");

  const auto head = split_ws(line);
  if (head.size() != 5 || lower(std::string(head[0])) != "%%matrixmarket")
    throw ParseError("Matrix Market: missing or malformed %%MatrixMarket header");
  if (lower(std::string(head[1])) != "matrix") throw UnsupportedFormat("Matrix Market: only 'matrix' objects");
  const std::string format = lower(std::string(head[2]));
  if (format == "array") throw UnsupportedFormat("Matrix Market: array format is not supported");
  if (format != "coordinate") throw ParseError("Matrix Market: unknown format '" + format + "'");

  const std::string field_name = lower(std::string(head[3]));
  Field field;
  if (field_name == "real") field = Field::Real;
  else if (field_name == "complex") field = Field::Complex;
  else if (field_name == "integer") field = Field::Integer;
  else if (field_name == "pattern") field = Field::Pattern;
  else throw ParseError("Matrix Market: unknown field '" + field_name + "'");

  const std::string symmetry = lower(std::string(head[4]));
  bool symmetric = false;
  if (symmetry == "symmetric") symmetric = true;
  else if (symmetry == "hermitian" || symmetry == "skew-symmetric")
    throw UnsupportedFormat("Matrix Market: '" + symmetry + "' storage is not supported");
  else if (symmetry != "general") throw ParseError("Matrix Market: unknown symmetry '" + symmetry + "'");

  // Skip comments to reach the size line.
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("Matrix Market: missing size line");
    ++line_no;
    if (!line.empty() && line[0] == '%') continue;
    if (is_blank(line)) continue;
    break;
  }
  const auto size = split_ws(line);
  if (size.size() != 3) throw ParseError("Matrix Market line " + std::to_string(line_no) + ": bad size line");
  const auto rows = parse_number<index_t>(size[0], line_no);
  const auto cols = parse_number<index_t>(size[1], line_no);
  const auto entries = parse_number<index_t>(size[2], line_no);
  if (rows <= 0 || cols <= 0 || entries < 0)
    throw ParseError("Matrix Market line " + std::to_string(line_no) + ": invalid dimensions");

  const std::size_t per_entry = field == Field::Pattern ? 2 : field == Field::Complex ? 4 : 3;
  std::vector<Triplet<double>> real_trip;
  std::vector<Triplet<cplx>> cplx_trip;
  index_t read = 0;
  while (read < entries) {
    if (!std::getline(in, line))
      throw ParseError("Matrix Market: expected " + std::to_string(entries) + " entries, found " +
                       std::to_string(read));
    ++line_no;
    if (is_blank(line) || line[0] == '%') continue;
    const auto tok = split_ws(line);
    if (tok.size() != per_entry)
      throw ParseError("Matrix Market line " + std::to_string(line_no) + ": expected " + std::to_string(per_entry) +
                       " fields");
    const index_t i = parse_number<index_t>(tok[0], line_no) - 1;
    const index_t j = parse_number<index_t>(tok[1], line_no) - 1;
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw ParseError("Matrix Market line " + std::to_string(line_no) + ": index out of range");
    switch (field) {
      case Field::Pattern: real_trip.push_back({i, j, 1.0}); break;
      case Field::Integer:
        real_trip.push_back({i, j, static_cast<double>(parse_number<long long>(tok[2], line_no))});
        break;
      case Field::Real: real_trip.push_back({i, j, parse_number<double>(tok[2], line_no)}); break;
      case Field::Complex:
        cplx_trip.push_back({i, j, cplx(parse_number<double>(tok[2], line_no), parse_number<double>(tok[3], line_no))});
        break;
    }
    ++read;
  }

  if (field == Field::Complex) return assemble(rows, cols, cplx_trip, symmetric);
  return assemble(rows, cols, real_trip, symmetric);
}

AnyCsrMatrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open Matrix Market file '" + path.string() + "'");
  return read_matrix_market(in);
}

template <Scalar T>
void write_matrix_market(std::ostream& out, const CsrMatrix<T>& A) {
  out << "%%MatrixMarket matrix coordinate " << (is_complex_v<T> ? "complex" : "real") << " general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  for (index_t i = 0; i < A.rows(); ++i) {
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
      out << (i + 1) << ' ' << (A.col_idx()[k] + 1) << ' ';
      write_value(out, A.values()[k]);
      out << '\n';
    }
  }
}

template <Scalar T>
void save_matrix_market(const std::filesystem::path& path, const CsrMatrix<T>& A) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write Matrix Market file '" + path.string() + "'");
  write_matrix_market(out, A);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

template void write_matrix_market(std::ostream&, const CsrMatrix<double>&);
template void write_matrix_market(std::ostream&, const CsrMatrix<cplx>&);
template void save_matrix_market(const std::filesystem::path&, const CsrMatrix<double>&);
template void save_matrix_market(const std::filesystem::path&, const CsrMatrix<cplx>&);

}  // namespace shiftkrylov
