#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mixsel/mixture.hpp"

namespace mixsel {

/// Ground truth plus sample size and seed for one synthetic experiment.
struct DatasetSpec {
    MixtureModel truth;
    int n = 0;
    std::uint64_t seed = 0;
};

/// Three bivariate components with equal weights 1/3, arranged in a triangle;
/// each is the common density N(0, diag(2, 0.2)) rotated and shifted.
DatasetSpec example1_spec(int n = 600, std::uint64_t seed = 0);

/// Four overlapping bivariate components with weights (0.3, 0.3, 0.3, 0.1);
/// the first two share the mean (-2, -2) and differ only in covariance.
DatasetSpec example2_spec(int n = 1000, std::uint64_t seed = 0);

/// Single bivariate component N(0, diag(2, 0.2)); the setup behind the
/// profile-curve diagnostic.
DatasetSpec single_gaussian_spec(int n = 1000, std::uint64_t seed = 0);

/// n x d sample matrix; a pure function of the spec (seed included).
Matrix generate(const DatasetSpec& spec);

/// Comma-separated numeric matrix. An optional single header line is
/// skipped; `columns` selects 0-based column indices (empty = all).
/// Throws ParseError with 1-based row/column location, or EmptyFile.
Matrix load_csv(const std::string& path, bool has_header = false,
                const std::vector<int>& columns = {});
Matrix load_csv(std::istream& in, bool has_header = false,
                const std::vector<int>& columns = {});

void save_csv(const Matrix& data, const std::string& path);
void save_csv(const Matrix& data, std::ostream& out);

}  // namespace mixsel
