#include "cli/result_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "cli/config.hpp"

namespace gmerton::cli {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Info:
      return "info";
  }
  return "";
}

void ResultTable::add(std::string experiment, std::string quantity, double value,
                      double se_or_residual, Verdict verdict) {
  rows_.push_back({std::move(experiment), std::move(quantity), value, se_or_residual, verdict});
}

bool ResultTable::all_pass() const { return failures() == 0; }

std::size_t ResultTable::failures() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += row.verdict == Verdict::Fail ? 1 : 0;
  return n;
}

std::string ResultTable::to_csv() const {
  std::string out = "experiment,quantity,value,se_or_residual,verdict,config_hash,seed\n";
  const std::string seed = std::to_string(seed_);
  for (const auto& row : rows_) {
    out += csv_field(row.experiment) + ',' + csv_field(row.quantity) + ',' +
           format_double(row.value) + ',' + format_double(row.se_or_residual) + ',' +
           to_string(row.verdict) + ',' + config_hash_ + ',' + seed + '\n';
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void write_text_file(const std::filesystem::path& dir, const std::string& name,
                     const std::string& contents) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string manifest_text(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
  return out;
}

}  // namespace gmerton::cli
