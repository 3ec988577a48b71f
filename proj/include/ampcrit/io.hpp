#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ampcrit {

// Round-trip-safe decimal rendering (17 significant digits, '.' decimal).
std::string format_real(double v);

// Comma-separated with a mandatory header row; all reals go through
// format_real so identical runs produce identical bytes.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();
  ~CsvWriter();

 private:
  std::string path_;
  std::string buffer_;
  std::size_t columns_ = 0;
  bool open_ = true;
};

std::string csv_cell(double v);
std::string csv_cell(std::int64_t v);

// FNV-1a 64-bit content digest, hex-encoded.
std::string fnv1a64_hex(const std::string& bytes);
std::string digest_file(const std::string& path);

// Run manifest: config echo, outputs with digests, timestamps; written
// atomically (temp file + rename) at the end of a run.
struct RunManifest {
  std::string subcommand;
  std::string artifact_version;
  std::uint64_t seed = 0;
  std::string started_utc;
  std::string finished_utc;
  std::map<std::string, std::map<std::string, std::string>> config_echo;
  std::vector<std::string> output_files;  // paths relative to output dir

  void write(const std::string& output_dir) const;
};

std::string utc_timestamp();
void ensure_directory(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace ampcrit
