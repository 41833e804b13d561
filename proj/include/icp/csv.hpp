#pragma once

#include "icp/dataset.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace icp {

/// RFC-4180 reader: comma delimiter, optional double quotes with "" escapes,
/// CRLF or LF line endings. The first record is the header.
RawTable read_csv(std::istream& in);
RawTable read_csv_file(const std::string& path);

/// Quotes a field when it contains a comma, quote, or line break.
std::string csv_escape(std::string_view field);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Writes predictors, target, and an environment column named `env_name`.
void write_dataset_csv(std::ostream& out, const Dataset& d, std::string_view env_name = "env");

}  // namespace icp
