#pragma once

#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace wcsense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// Bad flag combination or value that CLI11 cannot see on its own.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "start:stop:count", inclusive endpoints.
std::vector<double> parse_grid(std::string_view spec);
// Same syntax, log-spaced; start and stop must be > 0.
std::vector<double> parse_log_grid(std::string_view spec);

// 17 significant digits, shortest exponent form chosen by std::to_chars.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;  // nullopt -> empty cell

    std::string render() const;
};

std::string sha256_hex(std::string_view data);

// <dir>/<stem>.manifest.json for <dir>/<stem>.<ext>
std::string manifest_path_for(const std::string& csv_path);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wcsense::cli
