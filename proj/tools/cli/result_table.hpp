#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gmerton::cli {

enum class Verdict { Pass, Fail, Info };

const char* to_string(Verdict v);

struct ResultRow {
  std::string experiment;
  std::string quantity;
  double value = 0.0;
  double se_or_residual = 0.0;
  Verdict verdict = Verdict::Info;
};

/// Rows of one experiment file. Every written row carries the config hash
/// and seed. Columns, in order:
///   experiment,quantity,value,se_or_residual,verdict,config_hash,seed
class ResultTable {
 public:
  ResultTable(std::string config_hash, std::uint64_t seed)
      : config_hash_(std::move(config_hash)), seed_(seed) {}

  void add(std::string experiment, std::string quantity, double value,
           double se_or_residual, Verdict verdict);
  void add_check(std::string experiment, std::string quantity, double value,
                 double se_or_residual, bool pass) {
    add(std::move(experiment), std::move(quantity), value, se_or_residual,
        pass ? Verdict::Pass : Verdict::Fail);
  }

  const std::vector<ResultRow>& rows() const { return rows_; }
  bool all_pass() const;
  std::size_t failures() const;
  std::string to_csv() const;

 private:
  std::string config_hash_;
  std::uint64_t seed_;
  std::vector<ResultRow> rows_;
};

/// Shortest round-trip decimal representation ("nan", "inf" for non-finite).
std::string format_double(double v);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& text);

/// Writes bytes to dir/name, creating dir. Throws IoError on failure.
void write_text_file(const std::filesystem::path& dir, const std::string& name,
                     const std::string& contents);

/// key=value lines in insertion order.
std::string manifest_text(const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace gmerton::cli
