#pragma once

#include <istream>
#include <string>
#include <vector>

namespace prefixseal::cli {

using CsvRow = std::vector<std::string>;

// RFC 4180 reader. Accepts LF or CRLF; quoted fields may span lines. A
// trailing empty line is ignored.
// Throws SchemaViolation on an unterminated quote.
std::vector<CsvRow> read_csv(std::istream& in);

} // namespace prefixseal::cli
