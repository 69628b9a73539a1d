#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "shiftkrylov/csr_matrix.hpp"

namespace shiftkrylov {

/// A matrix loaded from disk is real or complex depending on its field.
using AnyCsrMatrix = std::variant<CsrMatrix<double>, CsrMatrix<cplx>>;

/// Coordinate-format reader. `real`, `integer` and `pattern` fields load as
/// real (pattern entries become 1.0), `complex` as complex. Symmetric storage
/// is expanded and duplicates are summed.
AnyCsrMatrix read_matrix_market(std::istream& in);
AnyCsrMatrix load_matrix_market(const std::filesystem::path& path);

/// Writes `coordinate real|complex general` with round-trip precision.
template <Scalar T>
void write_matrix_market(std::ostream& out, const CsrMatrix<T>& A);
template <Scalar T>
void save_matrix_market(const std::filesystem::path& path, const CsrMatrix<T>& A);

}  // namespace shiftkrylov
