#include "lvpir/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "lvpir/errors.hpp"

namespace lvpir {

QuerySet::QuerySet(std::size_t message_count, std::vector<std::uint32_t> members)
    : message_count_(message_count), members_(std::move(members)) {
  if (message_count_ == 0) throw IndexError("query set over an empty message range");
  if (members_.empty()) throw IndexError("query set must be non-empty");
  std::sort(members_.begin(), members_.end());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] < 1 || members_[i] > message_count_)
      throw IndexError("query index " + std::to_string(members_[i]) + " outside [1.." +
                       std::to_string(message_count_) + "]");
    if (i > 0 && members_[i] == members_[i - 1])
      throw IndexError("duplicate query index " + std::to_string(members_[i]));
  }
}

QuerySet QuerySet::full(std::size_t message_count) {
  std::vector<std::uint32_t> all(message_count);
  for (std::size_t i = 0; i < message_count; ++i) all[i] = static_cast<std::uint32_t>(i + 1);
  return QuerySet(message_count, std::move(all));
}

QuerySet QuerySet::from_mask(std::size_t message_count, std::uint64_t mask) {
  std::vector<std::uint32_t> members;
  for (std::size_t i = 0; i < message_count && i < 64; ++i) {
    if (mask & (std::uint64_t{1} << i)) members.push_back(static_cast<std::uint32_t>(i + 1));
  }
  return QuerySet(message_count, std::move(members));
}

bool QuerySet::contains(std::uint32_t index) const {
  return std::binary_search(members_.begin(), members_.end(), index);
}

std::uint64_t QuerySet::mask() const {
  if (message_count_ > 64) throw TooLargeError("bitmask form requires K <= 64");
  std::uint64_t m = 0;
  for (auto i : members_) m |= std::uint64_t{1} << (i - 1);
  return m;
}

std::vector<std::uint8_t> QuerySet::indicator() const {
  std::vector<std::uint8_t> b(message_count_, 0);
  for (auto i : members_) b[i - 1] = 1;
  return b;
}

bool QuerySet::operator==(const QuerySet& other) const {
  return message_count_ == other.message_count_ && members_ == other.members_;
}

bool QuerySet::operator<(const QuerySet& other) const {
  return std::lexicographical_compare(members_.begin(), members_.end(),
                                      other.members_.begin(), other.members_.end());
}

std::string to_string(const QuerySet& q) {
  std::string s = "{";
  for (std::size_t i = 0; i < q.members().size(); ++i) {
    if (i) s += ",";
    s += std::to_string(q.members()[i]);
  }
  return s + "}";
}

LatentDistribution::LatentDistribution(std::vector<Rational> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ShapeError("empty latent distribution");
  Rational sum = 0;
  for (const auto& p : probs_) {
    if (p < 0 || p > 1) throw StochasticityError("latent probability outside [0,1]");
    sum += p;
  }
  // Guaranteed for anything derived from a column-stochastic matrix.
  if (sum != 1) throw std::logic_error("latent distribution sums to " + format_fraction(sum));
}

Rational total_variation(const LatentDistribution& a, const LatentDistribution& b) {
  if (a.size() != b.size()) throw ShapeError("total variation over mismatched alphabets");
  Rational sum = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    Rational d = a.at(t) - b.at(t);
    sum += d < 0 ? -d : d;
  }
  return sum / 2;
}

CharMatrix::CharMatrix(std::size_t latent_count, std::size_t message_count,
                       std::vector<Rational> row_major)
    : latent_count_(latent_count), message_count_(message_count), entries_(std::move(row_major)) {
  if (latent_count_ < 1 || message_count_ < 1) throw ShapeError("matrix dimensions must be >= 1");
  if (entries_.size() != latent_count_ * message_count_)
    throw ShapeError("entry count does not match declared dimensions");
  for (const auto& e : entries_) {
    if (e < 0 || e > 1) throw StochasticityError("matrix entry " + format_fraction(e) + " outside [0,1]");
  }
  for (std::size_t k = 0; k < message_count_; ++k) {
    Rational sum = 0;
    for (std::size_t t = 0; t < latent_count_; ++t) sum += at(t, k);
    if (sum != 1)
      throw StochasticityError("column " + std::to_string(k + 1) + " sums to " +
                               format_fraction(sum) + ", expected 1");
  }
}

std::vector<Rational> CharMatrix::column(std::size_t col) const {
  std::vector<Rational> c(latent_count_);
  for (std::size_t t = 0; t < latent_count_; ++t) c[t] = at(t, col);
  return c;
}

bool CharMatrix::operator==(const CharMatrix& other) const {
  return latent_count_ == other.latent_count_ && message_count_ == other.message_count_ &&
         entries_ == other.entries_;
}

namespace {

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

CharMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t latent_count = 0, message_count = 0;
  bool have_header = false;
  std::vector<Rational> entries;
  std::size_t rows_read = 0;

  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    auto tokens = tokenize(line);
    if (!have_header) {
      if (tokens.size() == 1) {
        // Degenerate shorthand: a single token is the sole entry of a
        // 1x1 matrix ("1" parses to [[1]]).
        latent_count = message_count = 1;
        entries.push_back(parse_rational_literal(tokens[0]));
        have_header = true;
        rows_read = 1;
        continue;
      }
      if (tokens.size() != 2)
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'T K'");
      try {
        latent_count = std::stoul(tokens[0]);
        message_count = std::stoul(tokens[1]);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed header 'T K'");
      }
      if (latent_count < 1 || message_count < 1)
        throw ShapeError("header dimensions must be >= 1");
      entries.reserve(latent_count * message_count);
      have_header = true;
      continue;
    }
    if (rows_read == latent_count)
      throw ShapeError("line " + std::to_string(line_no) + ": more than " +
                       std::to_string(latent_count) + " matrix rows");
    if (tokens.size() != message_count)
      throw ShapeError("line " + std::to_string(line_no) + ": row has " +
                       std::to_string(tokens.size()) + " entries, expected " +
                       std::to_string(message_count));
    for (const auto& tok : tokens) entries.push_back(parse_rational_literal(tok));
    ++rows_read;
  }
  if (!have_header) throw ParseError("missing 'T K' header");
  if (rows_read != latent_count)
    throw ShapeError("found " + std::to_string(rows_read) + " matrix rows, expected " +
                     std::to_string(latent_count));
  return CharMatrix(latent_count, message_count, std::move(entries));
}

CharMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str());
}

std::string serialize_matrix(const CharMatrix& m) {
  std::ostringstream out;
  out << m.latent_count() << " " << m.message_count() << "\n";
  for (std::size_t t = 0; t < m.latent_count(); ++t) {
    for (std::size_t k = 0; k < m.message_count(); ++k) {
      if (k) out << " ";
      out << format_fraction(m.at(t, k));
    }
    out << "\n";
  }
  return out.str();
}

LatentDistribution latent_prior(const CharMatrix& m) {
  std::vector<Rational> probs(m.latent_count());
  const Int k_count = m.message_count();
  for (std::size_t t = 0; t < m.latent_count(); ++t) {
    Rational sum = 0;
    for (std::size_t k = 0; k < m.message_count(); ++k) sum += m.at(t, k);
    probs[t] = sum / k_count;
  }
  return LatentDistribution(std::move(probs));
}

LatentDistribution posterior_given_query(const CharMatrix& m, const QuerySet& query) {
  if (query.message_count() != m.message_count())
    throw ShapeError("query universe does not match matrix column count");
  std::vector<Rational> probs(m.latent_count());
  const Int q_size = query.size();
  for (std::size_t t = 0; t < m.latent_count(); ++t) {
    Rational sum = 0;
    for (auto i : query.members()) sum += m.at(t, i - 1);
    probs[t] = sum / q_size;
  }
  return LatentDistribution(std::move(probs));
}

}  // namespace lvpir
