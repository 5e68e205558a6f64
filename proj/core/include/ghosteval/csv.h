// CSV output in the project dialect: comma separated, header row, UTF-8,
// reals with 6 fractional digits, undefined values as "NA".

#ifndef GHOSTEVAL_CSV_H_
#define GHOSTEVAL_CSV_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghosteval::csv {

inline constexpr std::string_view kUndefined = "NA";

std::string format_real(double value);
std::string format_real(std::optional<double> value);
std::string escape(std::string_view field);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  /// A leading "# ..." line, written before the header.
  void set_comment(std::string comment) { comment_ = std::move(comment); }

  Writer& field(std::string_view value);
  Writer& field(double value);
  Writer& field(std::optional<double> value);
  Writer& field(std::int64_t value);
  Writer& empty();
  void end_row();

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> current_;
  std::string comment_;
};

}  // namespace ghosteval::csv

#endif  // GHOSTEVAL_CSV_H_
