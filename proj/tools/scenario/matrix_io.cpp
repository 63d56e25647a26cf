#include "scenario/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nessresp::scenario {

namespace {

// Parses a real prefix of s; returns characters consumed (0 on failure).
std::size_t parse_real(std::string_view s, double& out) {
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;  // from_chars rejects a leading '+'
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  if (ec != std::errc()) return 0;
  return static_cast<std::size_t>(ptr - s.data());
}

}  // namespace

cplx parse_complex(std::string_view token) {
  const auto fail = [&] { return std::invalid_argument("not a complex number: '" + std::string(token) + "'"); };
  if (token.empty()) throw fail();

  // Pure imaginary shorthand: "i", "-i", "2.5i"
  if (token.back() == 'i' || token.back() == 'j') {
    const std::string_view body = token.substr(0, token.size() - 1);
    if (body.empty() || body == "+") return {0.0, 1.0};
    if (body == "-") return {0.0, -1.0};
    double re = 0.0;
    const std::size_t n = parse_real(body, re);
    if (n == body.size()) return {0.0, re};
    if (n == 0) throw fail();
    // re±imi
    const std::string_view rest = body.substr(n);
    if (rest.front() != '+' && rest.front() != '-') throw fail();
    if (rest.size() == 1) return {re, rest.front() == '+' ? 1.0 : -1.0};
    double im = 0.0;
    if (parse_real(rest, im) != rest.size()) throw fail();
    return {re, im};
  }
  double re = 0.0;
  if (parse_real(token, re) != token.size()) throw fail();
  return {re, 0.0};
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
  std::vector<std::vector<cplx>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<cplx> row;
    std::string tok;
    while (fields >> tok) {
      try {
        row.push_back(parse_complex(tok));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": row has " +
                               std::to_string(row.size()) + " entries, expected " +
                               std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("matrix file " + path.string() + " has no entries");
  if (rows.size() != rows.front().size())
    throw std::runtime_error("matrix file " + path.string() + " is " + std::to_string(rows.size()) + "x" +
                             std::to_string(rows.front().size()) + ", expected square");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[r][c];
  return m;
}

}  // namespace nessresp::scenario
