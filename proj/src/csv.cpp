#include "icp/csv.hpp"

#include "icp/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

namespace icp {

RawTable read_csv(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw Error(ErrorKind::MalformedInput, "quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::MalformedInput, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw Error(ErrorKind::MalformedInput, "empty CSV input");
  RawTable table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (table.rows[r].size() != table.header.size())
      throw Error(ErrorKind::MalformedInput, "record " + std::to_string(r + 2) + " has " +
                                                 std::to_string(table.rows[r].size()) + " fields, header has " +
                                                 std::to_string(table.header.size()));
  return table;
}

RawTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot open " + path);
  return read_csv(in);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& d, std::string_view env_name) {
  for (const auto& name : d.names()) out << csv_escape(name) << ',';
  out << csv_escape(d.target_name()) << ',' << csv_escape(env_name) << "\r\n";
  for (Index i = 0; i < d.n(); ++i) {
    for (Index k = 0; k < d.p(); ++k) out << format_double(d.x()(i, k)) << ',';
    out << format_double(d.y()(i)) << ',' << d.env()[static_cast<std::size_t>(i)] << "\r\n";
  }
}

}  // namespace icp
