#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <shiftkrylov/csr_matrix.hpp>
#include <shiftkrylov/matrix_market.hpp>

namespace shiftkrylov::cli {

enum ExitCode : int { ok = 0, io_error = 1, usage_error = 2, not_converged = 3 };

/// Maps an exception escaping a command onto the exit-code contract and
/// prints it to `err`.
int report_failure(std::ostream& err);

/// "0.5", "-1e-3", "2i", "1-3i", "0.25+0.5i".
cplx parse_complex(const std::string& text);

/// `arithmetic:C:NU` (sigma_j = -C j), `list:S1,S2,...` or `qcd`.
std::vector<cplx> parse_shifts(const std::string& text);

std::string format_complex(cplx z);

/// One entry per line; complex entries as two whitespace-separated numbers.
/// Lines starting with '%' or '#' are skipped.
struct VectorData {
  std::vector<cplx> values;
  bool real = true;
};
VectorData read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, const std::vector<cplx>& v, bool real);
void write_vector(const std::filesystem::path& path, const std::vector<cplx>& v, bool real);

/// `ones`, `random:SEED` (uniform on [-1, 1)) or a vector file.
VectorData make_vector(const std::string& source, index_t n);

struct GeneratorSpec {
  std::string kind;  // convdiff3d | laplace2d | laplace1d
  index_t n = 0;
  double eps = 1.0;
  std::array<double, 3> beta{};
  double r = 0.0;
  double scale = 1.0;
};

/// "convdiff3d n=9 eps=1 beta=0,111.8,223.6 r=400" style generator string.
GeneratorSpec parse_generator(const std::string& text);
CsrMatrix<double> build(const GeneratorSpec& spec);
/// Companion initial-condition vector of the generator.
std::vector<double> initial_vector(const GeneratorSpec& spec);
std::string describe(const GeneratorSpec& spec);

CsrMatrix<cplx> complexify(const CsrMatrix<double>& A);

}  // namespace shiftkrylov::cli
