#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lvpir/rational.hpp"

namespace lvpir {

/// Non-empty sorted subset of the 1-based message indices [1..K].
class QuerySet {
 public:
  QuerySet(std::size_t message_count, std::vector<std::uint32_t> members);

  static QuerySet full(std::size_t message_count);
  // Bit i (LSB first) selects message index i+1. Requires K <= 64.
  static QuerySet from_mask(std::size_t message_count, std::uint64_t mask);

  std::size_t message_count() const { return message_count_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<std::uint32_t>& members() const { return members_; }
  bool contains(std::uint32_t index) const;
  bool is_full() const { return members_.size() == message_count_; }
  std::uint64_t mask() const;
  std::vector<std::uint8_t> indicator() const;

  bool operator==(const QuerySet& other) const;
  // Lexicographic on the sorted member sequence: {1,2} < {1,2,4} < {1,3}.
  bool operator<(const QuerySet& other) const;

 private:
  std::size_t message_count_;
  std::vector<std::uint32_t> members_;
};

std::string to_string(const QuerySet& q);

/// Exact distribution over the latent alphabet. Entries must sum to 1.
class LatentDistribution {
 public:
  explicit LatentDistribution(std::vector<Rational> probs);

  std::size_t size() const { return probs_.size(); }
  const Rational& at(std::size_t t) const { return probs_.at(t); }
  const std::vector<Rational>& probs() const { return probs_; }

  bool operator==(const LatentDistribution& other) const { return probs_ == other.probs_; }

 private:
  std::vector<Rational> probs_;
};

// Half the L1 distance between two distributions over the same alphabet.
Rational total_variation(const LatentDistribution& a, const LatentDistribution& b);

/// Column-stochastic matrix of conditional probabilities: entry (t, k) is
/// the probability of latent value t given that message k+1 is requested.
/// Immutable after construction; every column sums to exactly 1.
class CharMatrix {
 public:
  CharMatrix(std::size_t latent_count, std::size_t message_count,
             std::vector<Rational> row_major);

  std::size_t latent_count() const { return latent_count_; }    // T
  std::size_t message_count() const { return message_count_; }  // K
  const Rational& at(std::size_t row, std::size_t col) const {
    return entries_[row * message_count_ + col];
  }
  std::vector<Rational> column(std::size_t col) const;

  bool operator==(const CharMatrix& other) const;

 private:
  std::size_t latent_count_;
  std::size_t message_count_;
  std::vector<Rational> entries_;  // row-major
};

// Matrix file format: '#' comment lines, then "T K", then T rows of K
// entries (decimal or fraction literals). Throws ParseError, ShapeError or
// StochasticityError.
CharMatrix parse_matrix(const std::string& text);
CharMatrix load_matrix_file(const std::string& path);

// Canonical text form: "T K" header then fraction literals. Parsing the
// output reproduces the matrix bit-exactly.
std::string serialize_matrix(const CharMatrix& m);

// Prior of the latent variable under the uniform message prior: (1/K) H 1.
LatentDistribution latent_prior(const CharMatrix& m);

// Posterior of the latent variable given that the observed query makes all
// its members equally likely requests: (1/|q|) H b_q.
LatentDistribution posterior_given_query(const CharMatrix& m, const QuerySet& query);

}  // namespace lvpir
