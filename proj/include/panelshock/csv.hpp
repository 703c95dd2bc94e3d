#ifndef PANELSHOCK_CSV_HPP
#define PANELSHOCK_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace panelshock {

// Round-trip-exact decimal formatting (17 significant digits) used for every
// numeric emission, so re-ingestion reproduces doubles bit-for-bit.
std::string format_double(double value);
double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_numbers;  // source line per row, for error context

  int column(const std::string& name) const;  // -1 if absent
  int require_column(const std::string& name, const std::string& file) const;
};

// Plain comma-separated values, no quoting, '\r' tolerated on input.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// FNV-1a over file bytes, hex-encoded; used for manifests and golden checks.
std::string hash_file(const std::filesystem::path& path);
std::string hash_bytes(const std::string& bytes);

}  // namespace panelshock

#endif
