#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace circlaw {

/// Header-first CSV writer; doubles use 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(const std::string& v);
  void end_row();
  std::size_t rows() const { return rows_; }

 private:
  void sep();

  std::ofstream out_;
  std::size_t columns_;
  std::size_t col_ = 0;
  std::size_t rows_ = 0;
  std::string path_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace circlaw
