#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace qconc {

using BigInt = boost::multiprecision::cpp_int;
using HermitianOp = Eigen::MatrixXcd;

// Weakly decreasing nonnegative parts, zero padded to the number of rows d.
class Partition {
public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);
  Partition(std::vector<int> parts, int d);

  const std::vector<int>& parts() const { return parts_; }
  int operator[](std::size_t i) const { return parts_[i]; }
  int n() const { return n_; }
  int d() const { return static_cast<int>(parts_.size()); }
  int length() const; // number of nonzero parts

  bool operator==(const Partition&) const = default;
  auto operator<=>(const Partition&) const = default;

private:
  std::vector<int> parts_;
  int n_ = 0;
};

// Nonnegative entries, any order.
class Composition {
public:
  Composition() = default;
  explicit Composition(std::vector<int> entries);

  const std::vector<int>& entries() const { return entries_; }
  int operator[](std::size_t i) const { return entries_[i]; }
  int n() const { return n_; }
  int k() const { return static_cast<int>(entries_.size()); }

private:
  std::vector<int> entries_;
  int n_ = 0;
};

// All partitions of n with at most d rows, lexicographically descending.
std::vector<Partition> enumerate_partitions(int n, int d);

// hooks[i][j] for the cell in row i, column j (0 based).
std::vector<std::vector<int>> hook_lengths(const Partition& p);

BigInt factorial(int n);
BigInt dim_sn_irrep(const Partition& p);
BigInt dim_ud_irrep(const Partition& p, int d);
inline BigInt dim_ud_irrep(const Partition& p) { return dim_ud_irrep(p, p.d()); }

// log(dim U / dim V) for the Weyl module with d rows.
double log_dim_ratio(const Partition& p, int d);

// Schur polynomial evaluated at nonnegative t (t.size() variables).
// Computed by the branching rule over interlacing sequences, no division.
double schur_poly(const Partition& p, const std::vector<double>& t);
double log_schur_poly(const Partition& p, const std::vector<double>& t);

// Character of the irrep lambda at the class with cycle type mu.
BigInt sn_character(const Partition& lambda, const Partition& mu);

BigInt class_size(const Partition& mu);

struct CharacterTable {
  int n = 0;
  std::vector<Partition> irreps;  // rows
  std::vector<Partition> classes; // columns, same order
  std::vector<BigInt> class_sizes;
  std::vector<std::vector<BigInt>> chi;
};

CharacterTable character_table(int n);

struct ProjectorOptions {
  std::int64_t max_dim = 1024;
};

// Isotypic projector of p inside (C^d)^{\otimes n}.
HermitianOp schur_weyl_projector(const Partition& p, int d, int n,
                                 const ProjectorOptions& opt = {});

struct IsotypicProjector {
  Partition irrep;
  HermitianOp P;
};

// Projectors for every partition of n with at most d rows, enumeration order.
std::vector<IsotypicProjector> schur_weyl_projectors(int d, int n,
                                                     const ProjectorOptions& opt = {});

// Permutation operator moving tensor factor i to position perm[i].
HermitianOp permutation_operator(const std::vector<int>& perm, int d);

// Haar twirl of (diag t)^{\otimes n}.
HermitianOp haar_twirled_iid_state(const std::vector<double>& t, int n,
                                   const ProjectorOptions& opt = {});

// Same, reusing precomputed projectors.
HermitianOp haar_twirled_iid_state(const std::vector<double>& t,
                                   const std::vector<IsotypicProjector>& projectors);

} // namespace qconc
