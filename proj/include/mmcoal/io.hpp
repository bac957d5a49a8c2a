#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmcoal/mutation.hpp"
#include "mmcoal/rates.hpp"
#include "mmcoal/xi.hpp"

namespace mmcoal {

struct DataSet {
    MutationModel model;
    SampleConfig sample;
    std::optional<std::uint64_t> seed;
};

/// {"loci": [{"alleles", "theta", "matrix"}, ...], "haplotypes": {"0101": 3, ...}, "seed": s}
/// Errors are ParseError messages carrying `source` and a line number where one is known.
DataSet parse_data(std::string_view text, const std::string& source = "<data>");
DataSet read_data(const std::string& path);
std::string format_data(const DataSet& data);
void write_data(const DataSet& data, const std::string& path);

/// {"kingman_mass": m0, "atoms": [{"coords": [r1, ...], "mass": w}, ...], "beta": {"alpha", "mass"}}
XiMeasure parse_xi_measure(std::string_view text, const std::string& source = "<measure>");
/// Same format with one coordinate per atom.
LambdaMeasure parse_lambda_measure(std::string_view text, const std::string& source = "<measure>");
std::string read_text(const std::string& path);

/// "lo:hi:count", inclusive and evenly spaced; a plain number is a one-point grid.
std::vector<double> parse_grid(std::string_view text);

}  // namespace mmcoal
